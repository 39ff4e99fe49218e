//! The word metric of F with respect to the finite presentation on
//! {x_0, x_1}: exact norms by Cayley-ball BFS, the breaking-point lower
//! bound, the D-statistic sandwich D/6 - 2 <= |f| <= 3D, and rewriting
//! into the two finite generators.

use crate::dyadic::Dyadic;
use crate::normal_form::NormalForm;
use crate::plmap::PLMap;
use crate::sample::random_word;
use crate::words::{Letter, Sign, Word};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Default cap on BFS state count.
pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("BFS state cap of {cap} states exceeded")]
pub struct ResourceLimit {
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormResult {
    Exact(u32),
    BeyondRadius,
}

/// Lower and upper norm bounds for a normal form: the breaking-point bound
/// and the D-statistic sandwich.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormBounds {
    pub lemma1_lb: u64,
    pub prop2_lb: Rational64,
    pub prop2_ub: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallStats {
    pub radius: u32,
    pub sphere_sizes: Vec<u64>,
    pub total: u64,
}

/// The four edge letters of the finite presentation's Cayley graph, in the
/// fixed deterministic expansion order.
pub fn finite_generator_letters() -> [Letter; 4] {
    [
        Letter::positive(0),
        Letter::negative(0),
        Letter::positive(1),
        Letter::negative(1),
    ]
}

/// Expands x_i into x_0^{-(i-1)} x_1 x_0^{i-1} for i >= 2 and free-reduces,
/// yielding a word over {x_0, x_1} of length at most 3D.
pub fn rewrite_to_finite_gens(a: &NormalForm) -> Word {
    let mut letters = Vec::new();
    for &letter in a.to_word().letters() {
        let i = letter.index;
        if i <= 1 {
            letters.push(letter);
        } else {
            let conj = (i - 1) as usize;
            letters.extend(std::iter::repeat_n(Letter::negative(0), conj));
            letters.push(Letter { index: 1, sign: letter.sign });
            letters.extend(std::iter::repeat_n(Letter::positive(0), conj));
        }
    }
    Word::from_letters(letters).free_reduce()
}

/// D/6 - 2 as an exact rational, and 3D.
pub fn prop2_bounds(a: &NormalForm) -> (Rational64, u64) {
    let d = a.d_statistic().0;
    let lb = Rational64::new(d as i64, 6) - Rational64::from_integer(2);
    (lb, 3 * d)
}

/// Ceiling of the maximum of max{1, a-2, b-2} over all breaking points;
/// 0 for the identity. Breaking points suffice: any point with a one-sided
/// slope != 1 lies on a segment that ends at a breaking point with larger
/// coordinates.
pub fn lemma1_lower_bound(f: &PLMap) -> u64 {
    if f.is_identity() {
        return 0;
    }
    let two = Dyadic::from(2);
    let mut best = Dyadic::one();
    for node in f.breaking_points() {
        for coord in [&node.a, &node.b] {
            let shifted = coord - &two;
            if shifted > best {
                best = shifted;
            }
        }
    }
    // breaking-point coordinates are dyadic, so the ceiling is exact
    best.ceil().max(num_bigint::BigInt::zero()).to_u64().unwrap_or(0)
}

pub fn norm_bounds(a: &NormalForm) -> NormBounds {
    let (prop2_lb, prop2_ub) = prop2_bounds(a);
    NormBounds {
        lemma1_lb: lemma1_lower_bound(&PLMap::from_word(&a.to_word())),
        prop2_lb,
        prop2_ub,
    }
}

struct BallElement {
    map: PLMap,
    dist: u32,
    parent: usize,
    letter: Option<Letter>,
}

/// A fully enumerated ball in the Cayley graph of {x_0^{±1}, x_1^{±1}},
/// with parent links for geodesic reconstruction.
pub struct Ball {
    radius: u32,
    elements: Vec<BallElement>,
    index: HashMap<Vec<u8>, usize>,
}

impl Ball {
    /// Frontier-by-frontier BFS from the identity, deduplicating by the
    /// canonical PLMap serialization. Deterministic: expansion order is
    /// insertion order times the fixed letter order.
    pub fn enumerate(radius: u32, cap: usize) -> Result<Ball, ResourceLimit> {
        let mut elements = vec![BallElement {
            map: PLMap::identity(),
            dist: 0,
            parent: 0,
            letter: None,
        }];
        let mut index = HashMap::new();
        index.insert(PLMap::identity().canonical_key(), 0usize);
        let mut frontier: Vec<usize> = vec![0];
        let steps: Vec<(Letter, PLMap)> = finite_generator_letters()
            .iter()
            .map(|&l| {
                let gen = PLMap::generator(l.index);
                let step = match l.sign {
                    Sign::Plus => gen,
                    Sign::Minus => gen.inverse(),
                };
                (l, step)
            })
            .collect();
        for dist in 1..=radius {
            let mut next = Vec::new();
            for &src in &frontier {
                let src_map = elements[src].map.clone();
                for (letter, step) in &steps {
                    let neighbor = src_map.compose(step);
                    let key = neighbor.canonical_key();
                    if index.contains_key(&key) {
                        continue;
                    }
                    if elements.len() >= cap {
                        return Err(ResourceLimit { cap });
                    }
                    index.insert(key, elements.len());
                    next.push(elements.len());
                    elements.push(BallElement {
                        map: neighbor,
                        dist,
                        parent: src,
                        letter: Some(*letter),
                    });
                }
            }
            frontier = next;
        }
        Ok(Ball { radius, elements, index })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains the identity
    }

    pub fn stats(&self) -> BallStats {
        let mut sphere_sizes = vec![0u64; self.radius as usize + 1];
        for e in &self.elements {
            sphere_sizes[e.dist as usize] += 1;
        }
        BallStats {
            radius: self.radius,
            sphere_sizes,
            total: self.elements.len() as u64,
        }
    }

    /// The exact norm of f, when f lies within the enumerated radius.
    pub fn norm_of(&self, f: &PLMap) -> Option<u32> {
        self.index
            .get(&f.canonical_key())
            .map(|&i| self.elements[i].dist)
    }

    pub fn maps(&self) -> impl Iterator<Item = (&PLMap, u32)> {
        self.elements.iter().map(|e| (&e.map, e.dist))
    }

    /// One geodesic word per element, reconstructed from parent links.
    pub fn geodesics(&self) -> impl Iterator<Item = (&PLMap, u32, Word)> {
        (0..self.elements.len()).map(move |i| {
            let e = &self.elements[i];
            (&e.map, e.dist, self.word_of(i))
        })
    }

    fn word_of(&self, mut i: usize) -> Word {
        let mut letters = Vec::new();
        while let Some(letter) = self.elements[i].letter {
            letters.push(letter);
            i = self.elements[i].parent;
        }
        letters.reverse();
        Word::from_letters(letters)
    }
}

/// Distance-only ball enumeration: keeps canonical keys and distances but
/// drops the maps themselves once a frontier is expanded, so much larger
/// radii fit in memory.
#[derive(Debug)]
pub struct DistanceMap {
    radius: u32,
    dist: HashMap<Vec<u8>, u32>,
    sphere_sizes: Vec<u64>,
}

impl DistanceMap {
    pub fn enumerate(radius: u32, cap: usize) -> Result<DistanceMap, ResourceLimit> {
        let mut dist = HashMap::new();
        dist.insert(PLMap::identity().canonical_key(), 0u32);
        let mut sphere_sizes = vec![1u64];
        let mut frontier = vec![PLMap::identity()];
        let steps: Vec<PLMap> = finite_generator_letters()
            .iter()
            .map(|l| {
                let gen = PLMap::generator(l.index);
                match l.sign {
                    Sign::Plus => gen,
                    Sign::Minus => gen.inverse(),
                }
            })
            .collect();
        for d in 1..=radius {
            let mut next = Vec::new();
            for src in &frontier {
                for step in &steps {
                    let neighbor = src.compose(step);
                    let key = neighbor.canonical_key();
                    if dist.contains_key(&key) {
                        continue;
                    }
                    if dist.len() >= cap {
                        return Err(ResourceLimit { cap });
                    }
                    dist.insert(key, d);
                    next.push(neighbor);
                }
            }
            sphere_sizes.push(next.len() as u64);
            frontier = next;
        }
        Ok(DistanceMap { radius, dist, sphere_sizes })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn norm_of(&self, f: &PLMap) -> Option<u32> {
        self.dist.get(&f.canonical_key()).copied()
    }

    pub fn stats(&self) -> BallStats {
        BallStats {
            radius: self.radius,
            sphere_sizes: self.sphere_sizes.clone(),
            total: self.sphere_sizes.iter().sum(),
        }
    }
}

/// The exact geodesic length of f in {x_0, x_1} if it is at most
/// max_radius, else a beyond-radius signal.
pub fn exact_norm(f: &PLMap, max_radius: u32, cap: usize) -> Result<NormResult, ResourceLimit> {
    if f.is_identity() {
        return Ok(NormResult::Exact(0));
    }
    let target = f.canonical_key();
    let mut seen = HashMap::new();
    seen.insert(PLMap::identity().canonical_key(), 0u32);
    let mut frontier = vec![PLMap::identity()];
    let steps: Vec<PLMap> = finite_generator_letters()
        .iter()
        .map(|l| {
            let gen = PLMap::generator(l.index);
            match l.sign {
                Sign::Plus => gen,
                Sign::Minus => gen.inverse(),
            }
        })
        .collect();
    for d in 1..=max_radius {
        let mut next = Vec::new();
        for src in &frontier {
            for step in &steps {
                let neighbor = src.compose(step);
                let key = neighbor.canonical_key();
                if seen.contains_key(&key) {
                    continue;
                }
                if seen.len() >= cap {
                    return Err(ResourceLimit { cap });
                }
                if key == target {
                    return Ok(NormResult::Exact(d));
                }
                seen.insert(key, d);
                next.push(neighbor);
            }
        }
        frontier = next;
    }
    Ok(NormResult::BeyondRadius)
}

/// Sphere sizes for distances 0..R.
pub fn ball_sizes(radius: u32, cap: usize) -> Result<BallStats, ResourceLimit> {
    Ok(DistanceMap::enumerate(radius, cap)?.stats())
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationReport {
    pub passed: bool,
    pub checks_run: usize,
    pub failures: Vec<String>,
}

fn map_of_word_with(generator: &dyn Fn(u32) -> PLMap, w: &Word) -> PLMap {
    let mut acc = PLMap::identity();
    for letter in w.letters() {
        let gen = generator(letter.index);
        let step = match letter.sign {
            Sign::Plus => gen,
            Sign::Minus => gen.inverse(),
        };
        acc = acc.compose(&step);
    }
    acc
}

fn shift_word(w: &Word, by: u32) -> Word {
    Word::from_letters(
        w.letters()
            .iter()
            .map(|l| Letter { index: l.index + by, sign: l.sign })
            .collect(),
    )
}

/// Soundness gate on the implementation: the finite relators, the infinite
/// family of relations up to max_index, and the conjugacy-idempotent law
/// phi^2(x) = x_0^{-1} phi(x) x_0 on seeded random words, all evaluated in
/// the PL model built from the supplied generator.
pub fn check_presentation_with(
    generator: &dyn Fn(u32) -> PLMap,
    max_index: u32,
    phi_samples: usize,
    rng: &mut impl Rng,
) -> PresentationReport {
    let mut failures = Vec::new();
    let mut checks_run = 0;

    let commutator = |a: &str, b: &str| format!("{a} {b} {}", {
        let wa = Word::parse(a).unwrap();
        let wb = Word::parse(b).unwrap();
        wa.inverse().concat(&wb.inverse())
    });
    for (a, b) in [
        ("x0 x1^-1", "x0^-1 x1 x0"),
        ("x0 x1^-1", "x0^-2 x1 x0^2"),
    ] {
        checks_run += 1;
        let relator = commutator(a, b);
        let w = Word::parse(&relator).unwrap();
        if !map_of_word_with(generator, &w).is_identity() {
            failures.push(format!("finite relator [{a}, {b}] is not trivial"));
        }
    }

    for i in 0..max_index {
        for j in (i + 1)..=max_index {
            checks_run += 1;
            let w = Word::parse(&format!("x{i}^-1 x{j} x{i} x{}^-1", j + 1)).unwrap();
            if !map_of_word_with(generator, &w).is_identity() {
                failures.push(format!(
                    "relation x{i}^-1 x{j} x{i} = x{} fails (witness {w})",
                    j + 1
                ));
            }
        }
    }

    for _ in 0..phi_samples {
        checks_run += 1;
        let w = random_word(rng, 5, 12);
        // phi^2(w) vs x_0^-1 phi(w) x_0
        let lhs = shift_word(&w, 2);
        let rhs = Word::parse("x0^-1")
            .unwrap()
            .concat(&shift_word(&w, 1))
            .concat(&Word::parse("x0").unwrap());
        if map_of_word_with(generator, &lhs) != map_of_word_with(generator, &rhs) {
            failures.push(format!("phi law fails on {w}"));
        }
    }

    PresentationReport { passed: failures.is_empty(), checks_run, failures }
}

pub fn check_presentation(
    max_index: u32,
    phi_samples: usize,
    rng: &mut impl Rng,
) -> PresentationReport {
    check_presentation_with(&PLMap::generator, max_index, phi_samples, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::Breakpoint;
    use crate::sample::rng_from_seed;

    fn nf(text: &str) -> NormalForm {
        NormalForm::normalize(&Word::parse(text).unwrap())
    }

    #[test]
    fn rewrite_examples() {
        let w = rewrite_to_finite_gens(&nf("x2"));
        assert_eq!(w, Word::parse("x0^-1 x1 x0").unwrap());
        assert_eq!(w.len(), 3);
        assert_eq!(rewrite_to_finite_gens(&nf("x1")), Word::parse("x1").unwrap());
        // x_2 x_3: the two expansions cancel down to 6 letters
        let w = rewrite_to_finite_gens(&nf("x2 x3"));
        assert_eq!(w, Word::parse("x0^-1 x1 x0^-1 x1 x0 x0").unwrap());
        assert_eq!(w.len(), 6);
    }

    #[test]
    fn rewrite_stays_under_3d_and_represents_same_element() {
        for text in ["", "x2", "x0 x1^-1 x0 x1^-1", "x4 x2^-1", "x5^2 x3 x0^-1"] {
            let a = nf(text);
            let w = rewrite_to_finite_gens(&a);
            assert!(w.letters().iter().all(|l| l.index <= 1));
            assert!(w.len() as u64 <= 3 * a.d_statistic().0, "word {text:?}");
            assert_eq!(
                PLMap::from_word(&w),
                PLMap::from_word(&a.to_word()),
                "word {text:?}"
            );
        }
    }

    #[test]
    fn prop2_bound_examples() {
        assert_eq!(
            prop2_bounds(&nf("x2")),
            (Rational64::new(-3, 2), 9)
        );
        assert_eq!(
            prop2_bounds(&NormalForm::identity()),
            (Rational64::from_integer(-2), 0)
        );
        assert_eq!(
            prop2_bounds(&nf("x0 x1^-1 x0 x1^-1")),
            (Rational64::from_integer(-1), 18)
        );
    }

    #[test]
    fn lemma1_examples() {
        assert_eq!(lemma1_lower_bound(&PLMap::generator(1)), 1);
        assert_eq!(lemma1_lower_bound(&PLMap::identity()), 0);
        // generator(5): nodes (5,5),(6,7) -> max{1, 4, 5} = 5
        assert_eq!(lemma1_lower_bound(&PLMap::generator(5)), 5);
    }

    #[test]
    fn exact_norm_examples() {
        let cap = DEFAULT_STATE_CAP;
        assert_eq!(exact_norm(&PLMap::identity(), 5, cap), Ok(NormResult::Exact(0)));
        assert_eq!(exact_norm(&PLMap::generator(0), 5, cap), Ok(NormResult::Exact(1)));
        assert_eq!(exact_norm(&PLMap::generator(2), 5, cap), Ok(NormResult::Exact(3)));
        assert_eq!(
            exact_norm(&PLMap::generator(9), 3, cap),
            Ok(NormResult::BeyondRadius)
        );
    }

    #[test]
    fn resource_cap_is_clean() {
        assert_eq!(
            DistanceMap::enumerate(4, 10).unwrap_err(),
            ResourceLimit { cap: 10 }
        );
    }

    #[test]
    fn ball_sizes_small() {
        let cap = DEFAULT_STATE_CAP;
        assert_eq!(ball_sizes(0, cap).unwrap().sphere_sizes, vec![1]);
        let stats = ball_sizes(1, cap).unwrap();
        assert_eq!(stats.sphere_sizes, vec![1, 4]);
        assert_eq!(stats.total, 5);
    }

    #[test]
    fn ball_and_distance_map_agree() {
        let ball = Ball::enumerate(4, DEFAULT_STATE_CAP).unwrap();
        let dmap = DistanceMap::enumerate(4, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(ball.stats(), dmap.stats());
        for (map, dist, word) in ball.geodesics() {
            assert_eq!(dmap.norm_of(map), Some(dist));
            assert_eq!(&PLMap::from_word(&word), map);
            assert_eq!(word.len() as u32, dist);
        }
    }

    #[test]
    fn presentation_check_passes() {
        let mut rng = rng_from_seed(7);
        let report = check_presentation(8, 25, &mut rng);
        assert!(report.passed, "failures: {:?}", report.failures);
    }

    #[test]
    fn presentation_check_catches_corruption() {
        // f_1 with its second node pushed off the true graph (slope 4 piece)
        let corrupted = |k: u32| {
            if k == 1 {
                PLMap::new_unchecked(
                    vec![Breakpoint::new(1, 1), Breakpoint::new(2, 5)],
                    3,
                )
            } else {
                PLMap::generator(k)
            }
        };
        let mut rng = rng_from_seed(7);
        let report = check_presentation_with(&corrupted, 4, 0, &mut rng);
        assert!(!report.passed);
        assert!(!report.failures.is_empty());
    }
}
