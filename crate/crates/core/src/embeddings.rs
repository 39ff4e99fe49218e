//! Quasi-isometric embeddings of F x Z^n into F.
//!
//! The F x Z case is the map Phi(x, t^k) = (x_0 x_1^{-1})^k phi^2(x), whose
//! image lies in the subgroup generated by x_0 x_1^{-1}, x_2 and x_3. The
//! F x Z^n case sends t_i to x_{2i-2} x_{2i-1}^{-1} and x to phi^{2n}(x).
//! The distortion function h(r) = (1/r) max{ |y|_H : y in H, |y|_F <= r }
//! is sampled by BFS in both Cayley graphs.

use crate::metrics::{prop2_bounds, DistanceMap, ResourceLimit};
use crate::normal_form::NormalForm;
use crate::plmap::PLMap;
use crate::words::Word;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use std::collections::HashMap;

/// An element of F x Z^n: the F factor as a normal form plus the vector of
/// Z exponents. Its norm is |k_1| + ... + |k_n| + |x|_F.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FxZnElement {
    pub x: NormalForm,
    pub k: Vec<i64>,
}

fn fxz_block() -> NormalForm {
    NormalForm::normalize(&Word::parse("x0 x1^-1").unwrap())
}

/// Phi(x, t^k) = (x_0 x_1^{-1})^k phi^2(x). Negative k is computed through
/// the inverse: Phi(x, t^k) = Phi(x^{-1}, t^{-k})^{-1}.
pub fn embed(x: &NormalForm, k: i64) -> NormalForm {
    if k < 0 {
        return embed(&x.inverse(), -k).inverse();
    }
    let block = fxz_block();
    let mut acc = NormalForm::identity();
    for _ in 0..k {
        acc = acc.multiply(&block);
    }
    acc.multiply(&x.shift(2))
}

/// The closed-form normal form of Phi(x, t^k) for k >= 0:
/// x_0^k x_{i_1+k+2}^{r_1} ... x_{i_n+k+2}^{r_n}
/// x_{j_m+k+2}^{-s_m} ... x_{j_1+k+2}^{-s_1} x_k^{-1} ... x_1^{-1}.
pub fn embed_closed_form(x: &NormalForm, k: u32) -> NormalForm {
    let mut pos = Vec::new();
    if k > 0 {
        pos.push((0, k));
    }
    pos.extend(x.positive_block().iter().map(|&(i, r)| (i + k + 2, r)));
    let mut neg: Vec<(u32, u32)> = (1..=k).map(|j| (j, 1)).collect();
    neg.extend(x.negative_block().iter().map(|&(j, s)| (j + k + 2, s)));
    NormalForm::from_parts(pos, neg)
        .expect("closed form of the embedding satisfies the normal-form conditions")
}

/// The F x Z^n embedding: (x_0 x_1^{-1})^{k_1} (x_2 x_3^{-1})^{k_2} ...
/// (x_{2n-2} x_{2n-1}^{-1})^{k_n} phi^{2n}(x). The factors pairwise commute
/// (disjoint supports, identity below 2n); the product order is fixed as
/// listed for determinism.
pub fn embed_n(x: &NormalForm, k: &[i64]) -> NormalForm {
    assert!(!k.is_empty(), "n must be at least 1");
    let n = k.len() as u32;
    let mut acc = NormalForm::identity();
    for (idx, &exp) in k.iter().enumerate() {
        let lo = 2 * idx as u32;
        let factor = NormalForm::normalize(
            &Word::parse(&format!("x{} x{}^-1", lo, lo + 1)).unwrap(),
        );
        let factor = if exp < 0 { factor.inverse() } else { factor };
        for _ in 0..exp.unsigned_abs() {
            acc = acc.multiply(&factor);
        }
    }
    acc.multiply(&x.shift(2 * n))
}

/// The generators of the Corollary-4 subgroup isomorphic to F x Z^n:
/// x_0 x_1^{-1}, x_2 x_3^{-1}, ..., x_{2n-2} x_{2n-1}^{-1}, x_{2n}, x_{2n+1}.
pub fn fxzn_generators(n: u32) -> Vec<NormalForm> {
    assert!(n >= 1);
    let mut gens = Vec::new();
    for i in 0..n {
        gens.push(NormalForm::normalize(
            &Word::parse(&format!("x{} x{}^-1", 2 * i, 2 * i + 1)).unwrap(),
        ));
    }
    gens.push(NormalForm::generator(2 * n));
    gens.push(NormalForm::generator(2 * n + 1));
    gens
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupReport {
    pub passed: bool,
    pub checks_run: usize,
    pub failures: Vec<String>,
}

fn commute(a: &PLMap, b: &PLMap) -> bool {
    a.compose(b) == b.compose(a)
}

/// Commutation and support facts underlying the subgroup constructions,
/// all checked as exact PLMap identities.
pub fn verify_subgroup_relations(n: u32, max_k: u32) -> SubgroupReport {
    let mut failures = Vec::new();
    let mut checks_run = 0;
    let map_of = |text: &str| PLMap::from_word(&Word::parse(text).unwrap());

    // x_0 x_1^{-1} commutes with x_2 and x_3
    let t1 = map_of("x0 x1^-1");
    for gen in ["x2", "x3"] {
        checks_run += 1;
        if !commute(&t1, &map_of(gen)) {
            failures.push(format!("[x0 x1^-1, {gen}] is not trivial"));
        }
    }

    // the free abelian family x_{2k} x_{2k+1}^{-1}
    let family: Vec<PLMap> = (0..=max_k)
        .map(|k| map_of(&format!("x{} x{}^-1", 2 * k, 2 * k + 1)))
        .collect();
    for k in 0..=max_k {
        checks_run += 1;
        match family[k as usize].support() {
            Ok(Some((lo, hi))) => {
                let (expect_lo, expect_hi) =
                    (crate::Dyadic::from(2 * k as i64), crate::Dyadic::from(2 * k as i64 + 2));
                if lo < expect_lo || hi > expect_hi {
                    failures.push(format!(
                        "support of x{} x{}^-1 escapes [{}, {}]",
                        2 * k,
                        2 * k + 1,
                        expect_lo,
                        expect_hi
                    ));
                }
            }
            _ => failures.push(format!("x{} x{}^-1 has no bounded support", 2 * k, 2 * k + 1)),
        }
        for l in (k + 1)..=max_k {
            checks_run += 1;
            if !commute(&family[k as usize], &family[l as usize]) {
                failures.push(format!(
                    "[x{} x{}^-1, x{} x{}^-1] is not trivial",
                    2 * k,
                    2 * k + 1,
                    2 * l,
                    2 * l + 1
                ));
            }
        }
    }

    // Corollary-4 generators for this n: the t_i pairwise commute and each
    // t_i commutes with the shifted F factor's generators
    let gens = fxzn_generators(n);
    let maps: Vec<PLMap> = gens.iter().map(|g| PLMap::from_word(&g.to_word())).collect();
    let n = n as usize;
    for i in 0..n {
        for j in (i + 1)..n {
            checks_run += 1;
            if !commute(&maps[i], &maps[j]) {
                failures.push(format!("[{}, {}] is not trivial", gens[i], gens[j]));
            }
        }
        for f_gen in [&maps[n], &maps[n + 1]] {
            checks_run += 1;
            if !commute(&maps[i], f_gen) {
                failures.push(format!("t_{} does not commute with the F factor", i + 1));
            }
        }
    }

    SubgroupReport { passed: failures.is_empty(), checks_run, failures }
}

#[derive(Clone, Debug, Serialize)]
pub struct QiSampleResult {
    pub element: String,
    pub k: i64,
    pub closed_form_ok: bool,
    pub d_shift_law: Option<bool>,
    pub pair_norm: Option<u32>,
    pub image_norm: Option<u32>,
    pub constants_ok: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QiReport {
    pub passed: bool,
    pub samples: Vec<QiSampleResult>,
}

/// Checks, per sample (x, t^k): the closed-form normal form of Phi, the
/// statistic law D(Phi) = D(x) + 4k + 4 under the hypotheses that make it
/// exact (both blocks nonempty, k >= 0), and the quasi-isometry constants
/// K = 18, C = 48 using exact norms where the BFS radius suffices and the
/// D-statistic sandwich otherwise.
pub fn qi_check(
    samples: &[FxZnElement],
    max_bfs_radius: u32,
    cap: usize,
) -> Result<QiReport, ResourceLimit> {
    let dmap = DistanceMap::enumerate(max_bfs_radius, cap)?;
    let mut results = Vec::with_capacity(samples.len());
    let mut passed = true;
    for sample in samples {
        assert_eq!(sample.k.len(), 1, "qi_check verifies the F x Z case");
        let x = &sample.x;
        let k = sample.k[0];
        let image = embed(x, k);

        let closed_form_ok = if k >= 0 {
            image == embed_closed_form(x, k as u32)
        } else {
            image.inverse() == embed_closed_form(&x.inverse(), (-k) as u32)
        };

        let d_shift_law = if !x.positive_block().is_empty()
            && !x.negative_block().is_empty()
            && k >= 0
        {
            Some(image.d_statistic().0 == x.d_statistic().0 + 4 * k as u64 + 4)
        } else {
            None
        };

        let x_norm = dmap.norm_of(&PLMap::from_word(&x.to_word()));
        let image_norm = dmap.norm_of(&PLMap::from_word(&image.to_word()));
        let pair_norm = x_norm.map(|v| v + k.unsigned_abs() as u32);

        // |pair|/18 - 2 <= |Phi| <= 18 |pair| + 48, on exact values when
        // both norms resolved, else on the D-sandwich intervals
        let constants_ok = match (pair_norm, image_norm) {
            (Some(p), Some(q)) => {
                let p = Rational64::from_integer(p as i64);
                let q = Rational64::from_integer(q as i64);
                p / 18 - 2 <= q && q <= p * 18 + 48
            }
            _ => {
                let interval = |nf: &NormalForm| {
                    let (lb, ub) = prop2_bounds(nf);
                    (lb.max(Rational64::zero()), Rational64::from_integer(ub as i64))
                };
                let (x_lo, x_hi) = match x_norm {
                    Some(v) => {
                        let v = Rational64::from_integer(v as i64);
                        (v, v)
                    }
                    None => interval(x),
                };
                let kk = Rational64::from_integer(k.abs());
                let (p_lo, p_hi) = (x_lo + kk, x_hi + kk);
                let (q_lo, q_hi) = match image_norm {
                    Some(v) => {
                        let v = Rational64::from_integer(v as i64);
                        (v, v)
                    }
                    None => interval(&image),
                };
                p_lo / 18 - 2 <= q_hi && q_lo <= p_hi * 18 + 48
            }
        };

        let ok = closed_form_ok && d_shift_law.unwrap_or(true) && constants_ok;
        passed &= ok;
        results.push(QiSampleResult {
            element: x.to_string(),
            k,
            closed_form_ok,
            d_shift_law,
            pair_norm,
            image_norm,
            constants_ok,
            exact: pair_norm.is_some() && image_norm.is_some(),
        });
    }
    Ok(QiReport { passed, samples: results })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionSample {
    pub element: NormalForm,
    pub word: String,
    pub h_norm: u32,
    pub f_norm: Option<u32>,
}

/// Sampled values of the distortion function. The h(r) values are lower
/// bounds for the true h(r): sampling can witness distortion but cannot
/// prove an unbounded function bounded.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub generator_set: String,
    pub h_radius: u32,
    pub f_radius: u32,
    pub samples: Vec<DistortionSample>,
    /// (r, h(r), witness word) for r = 1..f_radius.
    pub h_values: Vec<(u32, Rational64, String)>,
    /// Elements of the H-ball whose F-norm exceeds f_radius.
    pub beyond_radius: usize,
    /// h(r) <= 18 + 48/r for every sampled r.
    pub envelope_ok: bool,
}

/// BFS over the subgroup's Cayley graph to depth h_radius yields exact
/// |.|_H; each element's |.|_F is resolved by membership in the F-ball of
/// radius f_radius.
pub fn h_distortion(
    generators: &[NormalForm],
    generator_set: &str,
    h_radius: u32,
    f_radius: u32,
    cap: usize,
) -> Result<DistortionReport, ResourceLimit> {
    let steps: Vec<NormalForm> = generators
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();

    // BFS in H, keyed by the canonical PL serialization
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    seen.insert(PLMap::identity().canonical_key(), ());
    let mut frontier = vec![NormalForm::identity()];
    let mut elements: Vec<(NormalForm, u32)> = vec![(NormalForm::identity(), 0)];
    for depth in 1..=h_radius {
        let mut next = Vec::new();
        for src in &frontier {
            for step in &steps {
                let neighbor = src.multiply(step);
                let key = PLMap::from_word(&neighbor.to_word()).canonical_key();
                if seen.contains_key(&key) {
                    continue;
                }
                if seen.len() >= cap {
                    return Err(ResourceLimit { cap });
                }
                seen.insert(key, ());
                elements.push((neighbor.clone(), depth));
                next.push(neighbor);
            }
        }
        frontier = next;
    }

    let dmap = DistanceMap::enumerate(f_radius, cap)?;
    let mut samples = Vec::with_capacity(elements.len());
    let mut beyond_radius = 0;
    for (element, h_norm) in elements {
        let f_norm = dmap.norm_of(&PLMap::from_word(&element.to_word()));
        if f_norm.is_none() {
            beyond_radius += 1;
        }
        let word = element.to_string();
        samples.push(DistortionSample { element, word, h_norm, f_norm });
    }

    let mut h_values = Vec::new();
    let mut envelope_ok = true;
    for r in 1..=f_radius {
        let best = samples
            .iter()
            .filter(|s| s.f_norm.is_some_and(|f| f <= r))
            .max_by_key(|s| s.h_norm);
        let (max_h, witness) = match best {
            Some(s) => (s.h_norm, s.word.clone()),
            None => (0, String::new()),
        };
        // h(r) <= 18 + 48/r  <=>  max_h <= 18r + 48
        envelope_ok &= (max_h as i64) <= 18 * r as i64 + 48;
        h_values.push((r, Rational64::new(max_h as i64, r as i64), witness));
    }

    Ok(DistortionReport {
        generator_set: generator_set.to_string(),
        h_radius,
        f_radius,
        samples,
        h_values,
        beyond_radius,
        envelope_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::DEFAULT_STATE_CAP;

    fn nf(text: &str) -> NormalForm {
        NormalForm::normalize(&Word::parse(text).unwrap())
    }

    #[test]
    fn embed_examples() {
        assert_eq!(embed(&NormalForm::identity(), 1), nf("x0 x1^-1"));
        assert_eq!(embed(&nf("x0"), 0), nf("x2"));
        assert_eq!(embed(&nf("x0"), 1), nf("x0 x3 x1^-1"));
    }

    #[test]
    fn embed_matches_closed_form() {
        for (text, k) in [
            ("", 0u32),
            ("", 3),
            ("x0", 1),
            ("x0 x1^-1 x0 x1^-1", 2),
            ("x2 x4^-1", 0),
            ("x1^-1", 4),
        ] {
            let x = nf(text);
            assert_eq!(
                embed(&x, k as i64),
                embed_closed_form(&x, k),
                "x={text:?} k={k}"
            );
        }
    }

    #[test]
    fn embed_negative_k_via_inverse() {
        let x = nf("x0 x2^-1");
        let image = embed(&x, -2);
        assert_eq!(image.inverse(), embed(&x.inverse(), 2));
        // homomorphism: embed(x,-2) * embed(x^{-1},2) = embed(identity, 0)
        assert!(image.multiply(&embed(&x.inverse(), 2)).is_identity());
    }

    #[test]
    fn embed_homomorphism() {
        let pairs = [
            ("x0", 1i64, "x1 x0", 2i64),
            ("x0 x1^-1", 0, "x2", 3),
            ("x3^-1", 2, "x0^2", -1),
        ];
        for (xa, ka, xb, kb) in pairs {
            let (a, b) = (nf(xa), nf(xb));
            assert_eq!(
                embed(&a, ka).multiply(&embed(&b, kb)),
                embed(&a.multiply(&b), ka + kb),
                "({xa}, {ka}) * ({xb}, {kb})"
            );
        }
    }

    #[test]
    fn d_statistic_shift_law() {
        // x_0^2 x_2^-1 x_1^-1 has D = 6; k = 1 gives D' = 14
        let x = nf("x0 x1^-1 x0 x1^-1");
        assert_eq!(x.d_statistic().0, 6);
        assert_eq!(embed(&x, 1).d_statistic().0, 14);
    }

    #[test]
    fn embed_n_examples() {
        assert_eq!(embed_n(&NormalForm::identity(), &[0, 1]), nf("x2 x3^-1"));
        assert_eq!(embed_n(&nf("x0"), &[0, 0]), nf("x4"));
        assert_eq!(
            embed_n(&NormalForm::identity(), &[1, 1]),
            nf("x0 x1^-1 x2 x3^-1")
        );
        // n = 1 agrees with the F x Z embedding
        assert_eq!(embed_n(&nf("x1 x0"), &[2]), embed(&nf("x1 x0"), 2));
    }

    #[test]
    fn embed_image_in_subgroup_generators() {
        // Phi(x, t^k) written over the subgroup generators before
        // normalization: (x0 x1^-1)^k phi^2(x), with phi^2(x) a word in
        // x_{i+2}, i.e. in <x_2, x_3> by the shift
        let x = nf("x1 x0");
        let k = 2;
        let word = Word::parse("x0 x1^-1 x0 x1^-1 x3 x2").unwrap();
        assert_eq!(embed(&x, k), NormalForm::normalize(&word));
    }

    #[test]
    fn subgroup_relations_pass() {
        for n in 1..=4 {
            let report = verify_subgroup_relations(n, 5);
            assert!(report.passed, "n={n}: {:?}", report.failures);
        }
    }

    #[test]
    fn subgroup_relations_catch_mutation() {
        // x_0 x_1^{-1} does not commute with x_1
        let a = PLMap::from_word(&Word::parse("x0 x1^-1").unwrap());
        let b = PLMap::generator(1);
        assert!(!commute(&a, &b));
    }

    #[test]
    fn qi_check_small_samples() {
        let samples = vec![
            FxZnElement { x: nf("x2"), k: vec![0] },
            FxZnElement { x: NormalForm::identity(), k: vec![0] },
            FxZnElement { x: nf("x0 x1^-1 x0 x1^-1"), k: vec![1] },
            FxZnElement { x: nf("x1 x0"), k: vec![-2] },
        ];
        let report = qi_check(&samples, 8, DEFAULT_STATE_CAP).unwrap();
        assert!(report.passed, "{:#?}", report.samples);
        // (x_2, 0): pair norm 3, image x_4
        assert_eq!(report.samples[0].pair_norm, Some(3));
        assert_eq!(report.samples[2].d_shift_law, Some(true));
    }

    #[test]
    fn distortion_small() {
        let gens = fxzn_generators(1);
        let report = h_distortion(&gens, "fxz", 3, 3, DEFAULT_STATE_CAP).unwrap();
        // within F-ball radius 1 only the identity lies in H: h(1) = 0
        assert_eq!(report.h_values[0].1, Rational64::zero());
        // r = 3: x_2 has |.|_H = 1 and |.|_F = 3, so h(3) >= 1/3
        assert!(report.h_values[2].1 >= Rational64::new(1, 3));
        assert!(report.envelope_ok);
    }
}
