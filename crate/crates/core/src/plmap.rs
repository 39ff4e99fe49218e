//! Piecewise-linear homeomorphisms of the real line: the generators f_k
//! (identity below k, slope 2 on [k, k+1], translation by 1 above k+1) and
//! everything they generate under composition.
//!
//! A map is stored as its canonical breakpoint list plus the eventual
//! integer translation on the right. The node list contains exactly the
//! points where the slope changes, so structural equality is group-element
//! equality. All coordinates are exact dyadics and all slopes are powers
//! of two.

use crate::dyadic::Dyadic;
use crate::words::{Sign, Word};
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Breakpoint {
    pub a: Dyadic,
    pub b: Dyadic,
}

impl Breakpoint {
    pub fn new(a: impl Into<Dyadic>, b: impl Into<Dyadic>) -> Breakpoint {
        Breakpoint { a: a.into(), b: b.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLMap {
    nodes: Vec<Breakpoint>,
    tail_offset: i64,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidPLMap {
    #[error("breakpoints must be strictly increasing in both coordinates")]
    NotIncreasing,
    #[error("map must be the identity left of the first breakpoint")]
    LeftPieceNotIdentity,
    #[error("first breakpoint lies left of 0")]
    StartsBeforeZero,
    #[error("last breakpoint inconsistent with the tail translation")]
    TailMismatch,
    #[error("slope between breakpoints is not a power of two")]
    SlopeNotPowerOfTwo,
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("map has a nonzero eventual translation; its support is unbounded")]
pub struct UnboundedSupport;

fn slopes_equal(p: &(Dyadic, Dyadic), q: &(Dyadic, Dyadic), r: &(Dyadic, Dyadic)) -> bool {
    // (q.b - p.b)/(q.a - p.a) == (r.b - q.b)/(r.a - q.a), cross-multiplied
    let lhs = &(&q.1 - &p.1) * &(&r.0 - &q.0);
    let rhs = &(&r.1 - &q.1) * &(&q.0 - &p.0);
    lhs == rhs
}

/// Drops every point that is collinear with its neighbors, treating both
/// unbounded ends as slope-1 pieces. Points must lie on the graph.
fn canonical_nodes(points: Vec<(Dyadic, Dyadic)>, tail: i64) -> Vec<Breakpoint> {
    if points.is_empty() {
        return Vec::new();
    }
    let one = Dyadic::one();
    let first = points.first().unwrap();
    let last = points.last().unwrap();
    let before = (&first.0 - &one, &first.1 - &one);
    let after = (&last.0 + &one, &last.1 + &one);
    debug_assert_eq!(&last.1 - &last.0, Dyadic::from(tail));
    let mut kept = Vec::new();
    for i in 0..points.len() {
        let prev = if i == 0 { &before } else { &points[i - 1] };
        let next = if i + 1 == points.len() { &after } else { &points[i + 1] };
        if !slopes_equal(prev, &points[i], next) {
            kept.push(Breakpoint { a: points[i].0.clone(), b: points[i].1.clone() });
        }
    }
    kept
}

impl PLMap {
    pub fn identity() -> PLMap {
        PLMap { nodes: Vec::new(), tail_offset: 0 }
    }

    /// The generator f_k: nodes (k, k) and (k+1, k+2), tail translation 1.
    pub fn generator(k: u32) -> PLMap {
        let k = k as i64;
        PLMap {
            nodes: vec![Breakpoint::new(k, k), Breakpoint::new(k + 1, k + 2)],
            tail_offset: 1,
        }
    }

    /// Validates every invariant and merges collinear nodes.
    pub fn new(nodes: Vec<Breakpoint>, tail_offset: i64) -> Result<PLMap, InvalidPLMap> {
        if let Some(first) = nodes.first() {
            if first.a != first.b {
                return Err(InvalidPLMap::LeftPieceNotIdentity);
            }
            if !first.a.is_positive() && !first.a.is_zero() {
                return Err(InvalidPLMap::StartsBeforeZero);
            }
            let last = nodes.last().unwrap();
            if &last.b - &last.a != Dyadic::from(tail_offset) {
                return Err(InvalidPLMap::TailMismatch);
            }
        } else if tail_offset != 0 {
            return Err(InvalidPLMap::TailMismatch);
        }
        for w in nodes.windows(2) {
            if w[0].a >= w[1].a || w[0].b >= w[1].b {
                return Err(InvalidPLMap::NotIncreasing);
            }
            let slope = (&w[1].b - &w[0].b)
                .div_exact(&(&w[1].a - &w[0].a))
                .ok_or(InvalidPLMap::SlopeNotPowerOfTwo)?;
            if slope.as_power_of_two().is_none() {
                return Err(InvalidPLMap::SlopeNotPowerOfTwo);
            }
        }
        let points = nodes.into_iter().map(|n| (n.a, n.b)).collect();
        Ok(PLMap { nodes: canonical_nodes(points, tail_offset), tail_offset })
    }

    /// Skips validation. The caller asserts monotone nodes with exactly
    /// dyadic slopes; meant for constructing deliberately broken maps in
    /// tests.
    pub fn new_unchecked(nodes: Vec<Breakpoint>, tail_offset: i64) -> PLMap {
        PLMap { nodes, tail_offset }
    }

    pub fn nodes(&self) -> &[Breakpoint] {
        &self.nodes
    }

    /// Exactly the points where the left and right slopes differ.
    pub fn breaking_points(&self) -> &[Breakpoint] {
        &self.nodes
    }

    pub fn eventual_translation(&self) -> i64 {
        self.tail_offset
    }

    pub fn is_identity(&self) -> bool {
        self.nodes.is_empty() && self.tail_offset == 0
    }

    fn segment_slope(&self, i: usize) -> Dyadic {
        let (p, q) = (&self.nodes[i], &self.nodes[i + 1]);
        (&q.b - &p.b)
            .div_exact(&(&q.a - &p.a))
            .expect("slope of a valid map is dyadic")
    }

    /// Exact image of t under the piecewise-affine formula.
    pub fn evaluate(&self, t: &Dyadic) -> Dyadic {
        if self.nodes.is_empty() {
            return t + &Dyadic::from(self.tail_offset);
        }
        if *t <= self.nodes[0].a {
            return t.clone();
        }
        let last = self.nodes.last().unwrap();
        if *t >= last.a {
            return t + &Dyadic::from(self.tail_offset);
        }
        let i = self.nodes.partition_point(|n| n.a <= *t) - 1;
        let slope = self.segment_slope(i);
        &self.nodes[i].b + &(&slope * &(t - &self.nodes[i].a))
    }

    /// Exact preimage: the value s with f(s) = y.
    pub fn evaluate_inverse(&self, y: &Dyadic) -> Dyadic {
        if self.nodes.is_empty() {
            return y - &Dyadic::from(self.tail_offset);
        }
        if *y <= self.nodes[0].b {
            return y.clone();
        }
        let last = self.nodes.last().unwrap();
        if *y >= last.b {
            return y - &Dyadic::from(self.tail_offset);
        }
        let i = self.nodes.partition_point(|n| n.b <= *y) - 1;
        let slope = self.segment_slope(i);
        &self.nodes[i].a
            + &(y - &self.nodes[i].b)
                .div_exact(&slope)
                .expect("inverse slope of a valid map is dyadic")
    }

    /// Left and right one-sided derivatives at a.
    pub fn derivatives(&self, a: &Dyadic) -> (Dyadic, Dyadic) {
        let one = Dyadic::one();
        if self.nodes.len() < 2 {
            return (one.clone(), one);
        }
        let first = &self.nodes[0].a;
        let last = &self.nodes.last().unwrap().a;
        let left = if a <= first || a > last {
            one.clone()
        } else {
            // piece covering (a - eps, a): nodes[i].a < a <= nodes[i+1].a
            let i = self.nodes.partition_point(|n| n.a < *a) - 1;
            self.segment_slope(i)
        };
        let right = if a < first || a >= last {
            one
        } else {
            let i = self.nodes.partition_point(|n| n.a <= *a) - 1;
            self.segment_slope(i)
        };
        (left, right)
    }

    /// The composite t -> g(f(t)), i.e. "apply self, then g", matching the
    /// left-to-right word order of F. Candidate breakpoints are self's
    /// domain nodes plus g's domain nodes pulled back through self; collinear
    /// candidates are merged away.
    pub fn compose(&self, g: &PLMap) -> PLMap {
        let tail = self.tail_offset + g.tail_offset;
        let mut candidates: BTreeSet<Dyadic> = BTreeSet::new();
        for n in &self.nodes {
            candidates.insert(n.a.clone());
        }
        for n in &g.nodes {
            candidates.insert(self.evaluate_inverse(&n.a));
        }
        let points: Vec<(Dyadic, Dyadic)> = candidates
            .into_iter()
            .map(|t| {
                let y = g.evaluate(&self.evaluate(&t));
                (t, y)
            })
            .collect();
        PLMap { nodes: canonical_nodes(points, tail), tail_offset: tail }
    }

    /// The inverse homeomorphism: coordinates swap, the tail negates.
    pub fn inverse(&self) -> PLMap {
        PLMap {
            nodes: self
                .nodes
                .iter()
                .map(|n| Breakpoint { a: n.b.clone(), b: n.a.clone() })
                .collect(),
            tail_offset: -self.tail_offset,
        }
    }

    /// Left fold of compose over the letters of w.
    pub fn from_word(w: &Word) -> PLMap {
        let mut acc = PLMap::identity();
        for letter in w.letters() {
            let gen = PLMap::generator(letter.index);
            let step = match letter.sign {
                Sign::Plus => gen,
                Sign::Minus => gen.inverse(),
            };
            acc = acc.compose(&step);
        }
        acc
    }

    /// Smallest closed interval outside which the map is the identity.
    /// `Ok(None)` for the identity map itself; an error when the eventual
    /// translation is nonzero.
    pub fn support(&self) -> Result<Option<(Dyadic, Dyadic)>, UnboundedSupport> {
        if self.tail_offset != 0 {
            return Err(UnboundedSupport);
        }
        match (self.nodes.first(), self.nodes.last()) {
            (Some(first), Some(last)) => Ok(Some((first.a.clone(), last.a.clone()))),
            _ => Ok(None),
        }
    }

    /// Bit-exact, order-deterministic serialization for associative lookup
    /// keys: the tail, then the flat node coordinates as (m, e) pairs.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(16 + self.nodes.len() * 24);
        key.extend_from_slice(&self.tail_offset.to_le_bytes());
        let push_dyadic = |key: &mut Vec<u8>, d: &Dyadic| {
            key.extend_from_slice(&d.exp().to_le_bytes());
            let (sign, mag) = d.numer().to_bytes_le();
            key.push(match sign {
                num_bigint::Sign::Minus => 0,
                num_bigint::Sign::NoSign => 1,
                num_bigint::Sign::Plus => 2,
            });
            key.extend_from_slice(&(mag.len() as u32).to_le_bytes());
            key.extend_from_slice(&mag);
        };
        for n in &self.nodes {
            push_dyadic(&mut key, &n.a);
            push_dyadic(&mut key, &n.b);
        }
        key
    }

    /// JSON form {"tail": m, "nodes": [{"a": [m, e], "b": [m, e]}, ...]}
    /// with each coordinate equal to m * 2^{-e}.
    pub fn to_json(&self) -> Value {
        fn bigint_value(m: &BigInt) -> Value {
            match i64::try_from(m) {
                Ok(v) => json!(v),
                Err(_) => json!(m.to_string()),
            }
        }
        fn dyadic_value(d: &Dyadic) -> Value {
            json!([bigint_value(d.numer()), d.exp()])
        }
        json!({
            "tail": self.tail_offset,
            "nodes": self
                .nodes
                .iter()
                .map(|n| json!({"a": dyadic_value(&n.a), "b": dyadic_value(&n.b)}))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<PLMap, String> {
        fn bigint_of(v: &Value) -> Result<BigInt, String> {
            if let Some(n) = v.as_i64() {
                Ok(BigInt::from(n))
            } else if let Some(s) = v.as_str() {
                s.parse().map_err(|_| format!("bad integer {s:?}"))
            } else {
                Err(format!("expected integer, got {v}"))
            }
        }
        fn dyadic_of(v: &Value) -> Result<Dyadic, String> {
            let pair = v.as_array().filter(|a| a.len() == 2).ok_or("expected [m, e]")?;
            let m = bigint_of(&pair[0])?;
            let e = pair[1].as_u64().ok_or("exponent must be a nonnegative integer")?;
            Ok(Dyadic::new(m, u32::try_from(e).map_err(|_| "exponent too large")?))
        }
        let tail = value
            .get("tail")
            .and_then(Value::as_i64)
            .ok_or("missing integer field \"tail\"")?;
        let raw_nodes = value
            .get("nodes")
            .and_then(Value::as_array)
            .ok_or("missing array field \"nodes\"")?;
        let mut nodes = Vec::with_capacity(raw_nodes.len());
        for n in raw_nodes {
            let a = dyadic_of(n.get("a").ok_or("node missing \"a\"")?)?;
            let b = dyadic_of(n.get("b").ok_or("node missing \"b\"")?)?;
            nodes.push(Breakpoint { a, b });
        }
        PLMap::new(nodes, tail).map_err(|e| e.to_string())
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "identity");
        }
        let pieces: Vec<String> = self
            .nodes
            .iter()
            .map(|n| format!("({}, {})", n.a, n.b))
            .collect();
        write!(f, "nodes [{}], tail {:+}", pieces.join(", "), self.tail_offset)
    }
}
