//! Sparse Laurent polynomials with arbitrary-precision integer coefficients.
//!
//! [`TriLaurent`] carries the exponents of `(a, z, d)` where `d` stands for the
//! value `(a - a^-1) z^-1` of a split unknotted component and is kept symbolic
//! until [`expand_delta`] is applied. [`BiLaurent`] is a polynomial in `(a, z)`.
//!
//! Terms are stored sorted by exponent vector (lexicographic, ascending) with
//! no zero coefficients, so structural equality is polynomial equality and
//! serialization is byte-stable.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("negative power of d ({0}) cannot be expanded")]
    NegativeDeltaExponent(i32),
    #[error("malformed polynomial json: {0}")]
    MalformedJson(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<const N: usize> {
    terms: Vec<([i32; N], BigInt)>,
}

/// Polynomial in `a`, `z` and the symbolic `d`.
pub type TriLaurent = Laurent<3>;
/// Polynomial in `a` and `z`.
pub type BiLaurent = Laurent<2>;

impl<const N: usize> Default for Laurent<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Laurent<N> {
    pub fn zero() -> Self {
        Laurent { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::mono(BigInt::one(), [0; N])
    }

    pub fn mono(coeff: impl Into<BigInt>, exps: [i32; N]) -> Self {
        let coeff = coeff.into();
        if coeff.is_zero() {
            Self::zero()
        } else {
            Laurent { terms: vec![(exps, coeff)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = ([i32; N], C)>,
        C: Into<BigInt>,
    {
        let mut acc: BTreeMap<[i32; N], BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_default() += c.into();
        }
        Self::from_sorted_map(acc)
    }

    fn from_sorted_map(acc: BTreeMap<[i32; N], BigInt>) -> Self {
        Laurent { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == [0; N] && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (ascending lexicographic) exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i32; N], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e, c))
    }

    pub fn coeff(&self, exps: [i32; N]) -> BigInt {
        match self.terms.binary_search_by(|(e, _)| e.cmp(&exps)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Multiplies by `±x^exps`. Shifting every exponent by the same vector
    /// keeps the term order, so no re-sort is needed.
    pub fn mul_monomial(&self, exps: [i32; N], negate: bool) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut s = *e;
                for i in 0..N {
                    s[i] += exps[i];
                }
                (s, if negate { -c } else { c.clone() })
            })
            .collect();
        Laurent { terms }
    }

    pub fn mul_monomial_assign(&mut self, exps: [i32; N], negate: bool) {
        for (e, c) in self.terms.iter_mut() {
            for i in 0..N {
                e[i] += exps[i];
            }
            if negate {
                *c = -std::mem::take(c);
            }
        }
    }

    pub fn max_exponent(&self, var: usize) -> Option<i32> {
        self.terms.iter().map(|(e, _)| e[var]).max()
    }

    pub fn min_exponent(&self, var: usize) -> Option<i32> {
        self.terms.iter().map(|(e, _)| e[var]).min()
    }

    fn merge(a: &[([i32; N], BigInt)], b: &[([i32; N], BigInt)], negate_b: bool) -> Self {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(e, c)| (*e, if negate_b { -c } else { c.clone() })));
        Laurent { terms: out }
    }

    fn product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return self.scale_shift(c, *e);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return other.scale_shift(c, *e);
        }
        let mut acc: BTreeMap<[i32; N], BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for i in 0..N {
                    e[i] += eb[i];
                }
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        Self::from_sorted_map(acc)
    }

    fn scale_shift(&self, c: &BigInt, exps: [i32; N]) -> Self {
        let mut out = self.mul_monomial(exps, false);
        if !c.is_one() {
            for (_, v) in out.terms.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.product(self);
        }
        out
    }

    /// Machine form: `[[e_0, .., e_{N-1}, "coeff"], ..]` in canonical order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut row: Vec<Value> = e.iter().map(|&x| Value::from(x)).collect();
                    row.push(Value::String(c.to_string()));
                    Value::Array(row)
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self, PolyError> {
        let bad = |m: &str| PolyError::MalformedJson(m.to_string());
        let rows = v.as_array().ok_or_else(|| bad("expected an array of terms"))?;
        let mut terms = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_array().ok_or_else(|| bad("term is not an array"))?;
            if row.len() != N + 1 {
                return Err(bad(&format!("term must have {} entries", N + 1)));
            }
            let mut e = [0i32; N];
            for (i, slot) in e.iter_mut().enumerate() {
                *slot = row[i]
                    .as_i64()
                    .and_then(|x| i32::try_from(x).ok())
                    .ok_or_else(|| bad("exponent is not a 32-bit integer"))?;
            }
            let c: BigInt = row[N]
                .as_str()
                .ok_or_else(|| bad("coefficient must be a decimal string"))?
                .parse()
                .map_err(|_| bad("coefficient is not an integer"))?;
            terms.push((e, c));
        }
        Ok(Self::from_terms(terms))
    }

    pub fn parse_json(text: &str) -> Result<Self, PolyError> {
        let v: Value = serde_json::from_str(text).map_err(|e| PolyError::MalformedJson(e.to_string()))?;
        Self::from_json(&v)
    }

    /// Human form, e.g. `a^2 + a^-2 - z^2 - 1`.
    ///
    /// Terms are grouped by the magnitude of the `a` exponent (largest first,
    /// positive before negative), then by the remaining exponents descending.
    pub fn render(&self) -> String {
        const NAMES: [&str; 3] = ["a", "z", "d"];
        if self.is_zero() {
            return "0".to_string();
        }
        let mut order: Vec<&([i32; N], BigInt)> = self.terms.iter().collect();
        order.sort_by(|(x, _), (y, _)| {
            y[0].abs().cmp(&x[0].abs()).then(y[0].cmp(&x[0])).then_with(|| y[1..].cmp(&x[1..]))
        });
        let mut out = String::new();
        for (k, (e, c)) in order.into_iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(NAMES[i].to_string()),
                    _ => factors.push(format!("{}^{}", NAMES[i], x)),
                }
            }
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl<const N: usize> fmt::Debug for Laurent<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl<const N: usize> fmt::Display for Laurent<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<'a, const N: usize> Add<&'a Laurent<N>> for &'a Laurent<N> {
    type Output = Laurent<N>;
    fn add(self, rhs: &'a Laurent<N>) -> Laurent<N> {
        Laurent::merge(&self.terms, &rhs.terms, false)
    }
}

impl<const N: usize> Add for Laurent<N> {
    type Output = Laurent<N>;
    fn add(self, rhs: Laurent<N>) -> Laurent<N> {
        &self + &rhs
    }
}

impl<'a, const N: usize> Sub<&'a Laurent<N>> for &'a Laurent<N> {
    type Output = Laurent<N>;
    fn sub(self, rhs: &'a Laurent<N>) -> Laurent<N> {
        Laurent::merge(&self.terms, &rhs.terms, true)
    }
}

impl<const N: usize> Sub for Laurent<N> {
    type Output = Laurent<N>;
    fn sub(self, rhs: Laurent<N>) -> Laurent<N> {
        &self - &rhs
    }
}

impl<const N: usize> AddAssign<&Laurent<N>> for Laurent<N> {
    fn add_assign(&mut self, rhs: &Laurent<N>) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        *self = Laurent::merge(&self.terms, &rhs.terms, false);
    }
}

impl<const N: usize> AddAssign for Laurent<N> {
    fn add_assign(&mut self, rhs: Laurent<N>) {
        if self.is_zero() {
            *self = rhs;
        } else {
            *self += &rhs;
        }
    }
}

impl<'a, const N: usize> Mul<&'a Laurent<N>> for &'a Laurent<N> {
    type Output = Laurent<N>;
    fn mul(self, rhs: &'a Laurent<N>) -> Laurent<N> {
        self.product(rhs)
    }
}

impl<const N: usize> Mul for Laurent<N> {
    type Output = Laurent<N>;
    fn mul(self, rhs: Laurent<N>) -> Laurent<N> {
        self.product(&rhs)
    }
}

impl<const N: usize> Neg for Laurent<N> {
    type Output = Laurent<N>;
    fn neg(mut self) -> Laurent<N> {
        for (_, c) in self.terms.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl<const N: usize> Neg for &Laurent<N> {
    type Output = Laurent<N>;
    fn neg(self) -> Laurent<N> {
        -self.clone()
    }
}

impl<const N: usize> std::iter::Sum for Laurent<N> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        let mut acc = Self::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

impl TriLaurent {
    /// Re-types a polynomial with no `d` dependence.
    pub fn from_bi(p: &BiLaurent) -> Self {
        TriLaurent { terms: p.terms.iter().map(|(e, c)| ([e[0], e[1], 0], c.clone())).collect() }
    }
}

fn binomial_row(k: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..k {
        let next = &row[i as usize] * BigInt::from(k - i) / BigInt::from(i + 1);
        row.push(next);
    }
    row
}

/// Substitutes `d = (a - a^-1) z^-1` and collects terms.
pub fn expand_delta(p: &TriLaurent) -> Result<BiLaurent, PolyError> {
    if let Some(m) = p.min_exponent(2) {
        if m < 0 {
            return Err(PolyError::NegativeDeltaExponent(m));
        }
    }
    let mut rows: BTreeMap<u32, Vec<BigInt>> = BTreeMap::new();
    let mut acc: BTreeMap<[i32; 2], BigInt> = BTreeMap::new();
    for (&[ea, ez, ed], c) in p.terms() {
        let k = ed as u32;
        let row = rows.entry(k).or_insert_with(|| binomial_row(k));
        // (a - a^-1)^k = sum_i C(k,i) (-1)^i a^(k-2i)
        for (i, b) in row.iter().enumerate() {
            let i = i as i32;
            let term = c * b;
            let e = [ea + ed - 2 * i, ez - ed];
            let slot = acc.entry(e).or_default();
            if i % 2 == 1 {
                *slot -= term;
            } else {
                *slot += term;
            }
        }
    }
    Ok(BiLaurent::from_sorted_map(acc))
}

/// The polynomial `(a - a^-1) z^-1` itself.
pub fn delta_value() -> BiLaurent {
    BiLaurent::from_terms([([1, -1], 1), ([-1, -1], -1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tri(terms: &[(i32, i32, i32, i64)]) -> TriLaurent {
        TriLaurent::from_terms(terms.iter().map(|&(a, z, d, c)| ([a, z, d], c)))
    }

    fn bi(terms: &[(i32, i32, i64)]) -> BiLaurent {
        BiLaurent::from_terms(terms.iter().map(|&(a, z, c)| ([a, z], c)))
    }

    /// Term-by-term product with no ordering assumptions.
    fn naive_mul(p: &TriLaurent, q: &TriLaurent) -> Vec<([i32; 3], BigInt)> {
        let mut out: Vec<([i32; 3], BigInt)> = Vec::new();
        for (ea, ca) in p.terms() {
            for (eb, cb) in q.terms() {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                match out.iter_mut().find(|(x, _)| *x == e) {
                    Some((_, c)) => *c += ca * cb,
                    None => out.push((e, ca * cb)),
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out.sort();
        out
    }

    fn arb_tri() -> impl Strategy<Value = TriLaurent> {
        prop::collection::vec(((-4i32..=4), (-4i32..=4), (0i32..=3), (-5i64..=5)), 0..6)
            .prop_map(|v| TriLaurent::from_terms(v.into_iter().map(|(a, z, d, c)| ([a, z, d], c))))
    }

    #[test]
    fn ring_identities() {
        let p = tri(&[(1, 2, 0, 3), (-1, 0, 1, -2)]);
        assert_eq!(&p + &TriLaurent::zero(), p);
        assert_eq!(&p * &TriLaurent::one(), p);
        assert!((&p - &p).is_zero());
        let a = TriLaurent::mono(1, [1, 0, 0]);
        let ainv = TriLaurent::mono(1, [-1, 0, 0]);
        assert!((&a * &ainv).is_one());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = tri(&[(0, 0, 0, 2), (0, 0, 0, -2), (1, 1, 1, 0)]);
        assert!(p.is_zero());
        assert_eq!(TriLaurent::mono(0, [1, 2, 3]), TriLaurent::zero());
    }

    #[test]
    fn expand_single_delta() {
        let d = TriLaurent::mono(1, [0, 0, 1]);
        assert_eq!(expand_delta(&d).unwrap(), bi(&[(1, -1, 1), (-1, -1, -1)]));
        assert_eq!(expand_delta(&d).unwrap(), delta_value());
    }

    #[test]
    fn expand_worked_figure_eight_sum() {
        // a^2 - z^2 a^2 + (z^3 a - z a^-1) d
        let q = tri(&[(2, 0, 0, 1), (2, 2, 0, -1), (1, 3, 1, 1), (-1, 1, 1, -1)]);
        let p = expand_delta(&q).unwrap();
        assert_eq!(p, bi(&[(2, 0, 1), (-2, 0, 1), (0, 2, -1), (0, 0, -1)]));
        assert_eq!(p.render(), "a^2 + a^-2 - z^2 - 1");
    }

    #[test]
    fn expand_without_delta_is_retype() {
        let q = tri(&[(3, -1, 0, 4), (0, 2, 0, -7)]);
        assert_eq!(expand_delta(&q).unwrap(), bi(&[(3, -1, 4), (0, 2, -7)]));
    }

    #[test]
    fn expand_rejects_negative_delta() {
        let q = tri(&[(0, 0, -1, 1)]);
        assert_eq!(expand_delta(&q), Err(PolyError::NegativeDeltaExponent(-1)));
    }

    #[test]
    fn expand_matches_repeated_multiplication() {
        for k in 0..6 {
            let q = TriLaurent::mono(3, [1, 2, k]);
            let direct = &BiLaurent::mono(3, [1, 2]) * &delta_value().pow(k as u32);
            assert_eq!(expand_delta(&q).unwrap(), direct, "k = {k}");
        }
    }

    #[test]
    fn render_edge_cases() {
        assert_eq!(BiLaurent::zero().render(), "0");
        assert_eq!(BiLaurent::one().render(), "1");
        assert_eq!(bi(&[(0, 0, -1)]).render(), "-1");
        assert_eq!(bi(&[(-4, 0, -1), (-2, 2, 1), (-2, 0, 2)]).render(), "-a^-4 + a^-2*z^2 + 2*a^-2");
        assert_eq!(tri(&[(1, 1, 1, -3)]).render(), "-3*a*z*d");
    }

    #[test]
    fn machine_json_shape() {
        let p = bi(&[(2, 0, 1), (-2, 0, 1), (0, 2, -1), (0, 0, -1)]);
        assert_eq!(p.to_json().to_string(), r#"[[-2,0,"1"],[0,0,"-1"],[0,2,"-1"],[2,0,"1"]]"#);
    }

    #[test]
    fn big_coefficients_stay_exact() {
        let p = BiLaurent::from_terms([([0, 0], BigInt::from(u64::MAX)), ([1, 0], BigInt::from(1))]);
        let q = p.pow(5);
        let back = BiLaurent::parse_json(&q.to_json().to_string()).unwrap();
        assert_eq!(q, back);
        assert_eq!(q.coeff([0, 0]), BigInt::from(u64::MAX).pow(5));
    }

    proptest! {
        #[test]
        fn mul_matches_naive(p in arb_tri(), q in arb_tri()) {
            let fast = &p * &q;
            let slow = naive_mul(&p, &q);
            let fast: Vec<_> = fast.terms().map(|(e, c)| (*e, c.clone())).collect();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn ring_axioms(p in arb_tri(), q in arb_tri(), r in arb_tri()) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        }

        #[test]
        fn expand_is_multiplicative(p in arb_tri(), q in arb_tri()) {
            let lhs = expand_delta(&(&p * &q)).unwrap();
            let rhs = &expand_delta(&p).unwrap() * &expand_delta(&q).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn machine_round_trip(p in arb_tri()) {
            let b = expand_delta(&p).unwrap();
            prop_assert_eq!(BiLaurent::parse_json(&b.to_json().to_string()).unwrap(), b);
            prop_assert_eq!(TriLaurent::parse_json(&p.to_json().to_string()).unwrap(), p);
        }
    }
}
