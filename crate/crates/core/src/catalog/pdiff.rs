//! Differential operators on the circle in the basis `x^m D^k` with
//! `D = x ∂` and `k ≥ 0` (the polynomial sector; inverse powers of `D`
//! would require infinite expansions and are out of scope here).
//!
//! Composition follows from `D x^n = x^n (D + n)`:
//!
//! ```text
//! x^m D^k · x^n D^l = x^{m+n} (D+n)^k D^l
//! ```
//!
//! with `(D+n)^k` expanded binomially. Operators act on monomials by
//! `x^m D^k : x^s -> s^k x^{s+m}`, which gives an independent route for
//! verifying the composition rule.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{binomial, int_pow, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PDiffError {
    #[error("formal-pseudodifferential sector out of scope (power of D must be ≥ 0, got {0})")]
    NegativeOrder(i64),
}

/// Finite sum over the basis `x^m D^k`, `m ∈ Z`, `k ≥ 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct PDiffOp {
    terms: BTreeMap<(i64, i64), Scalar>,
}

impl PDiffOp {
    pub fn zero() -> Self {
        PDiffOp::default()
    }

    /// The basis operator `x^m D^k`.
    pub fn basis(m: i64, k: i64) -> Result<Self, PDiffError> {
        PDiffOp::term(m, k, Scalar::one())
    }

    pub fn term(m: i64, k: i64, c: Scalar) -> Result<Self, PDiffError> {
        if k < 0 {
            return Err(PDiffError::NegativeOrder(k));
        }
        let mut out = PDiffOp::zero();
        out.push(m, k, c);
        Ok(out)
    }

    fn push(&mut self, m: i64, k: i64, c: Scalar) {
        debug_assert!(k >= 0);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(m, k)) {
            Some(v) => {
                let sum = &*v + &c;
                if sum.is_zero() {
                    self.terms.remove(&(m, k));
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert((m, k), c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, k), c) in &other.terms {
            out.push(*m, *k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PDiffOp {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return PDiffOp::zero();
        }
        PDiffOp {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    /// Apply to the monomial `x^s`; the result maps each output exponent
    /// offset `m` to the coefficient `Σ_k c_{m,k} s^k`.
    pub fn apply_to_monomial(&self, s: i64) -> BTreeMap<i64, Scalar> {
        let mut out: BTreeMap<i64, Scalar> = BTreeMap::new();
        for ((m, k), c) in &self.terms {
            let weight = Scalar::from_rational(int_pow(s, *k as u32));
            let entry = out.entry(*m).or_insert_with(Scalar::zero);
            *entry = &*entry + &(c * &weight);
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|((m, k), c)| format!("({})*x^{}D^{}", c, m, k))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Composition `x^m D^k · x^n D^l = Σ_j C(k,j) n^{k-j} x^{m+n} D^{j+l}`.
pub fn pdiff_mul(x: &PDiffOp, y: &PDiffOp) -> PDiffOp {
    let mut out = PDiffOp::zero();
    for ((m, k), a) in x.terms() {
        for ((n, l), b) in y.terms() {
            for j in 0..=*k {
                let w = &binomial(*k, j) * &int_pow(*n, (*k - j) as u32);
                out.push(m + n, j + l, &(a * b) * &Scalar::from_rational(w));
            }
        }
    }
    out
}

pub fn pdiff_commutator(x: &PDiffOp, y: &PDiffOp) -> PDiffOp {
    pdiff_mul(x, y).sub(&pdiff_mul(y, x))
}

/// The closed commutator formula
/// `[x^m D^k, x^n D^l] = x^{m+n} ((D+n)^k D^l - (D+m)^l D^k)`, expanded.
pub fn commutator_closed_form(m: i64, k: i64, n: i64, l: i64) -> Result<PDiffOp, PDiffError> {
    if k < 0 {
        return Err(PDiffError::NegativeOrder(k));
    }
    if l < 0 {
        return Err(PDiffError::NegativeOrder(l));
    }
    let mut out = PDiffOp::zero();
    for j in 0..=k {
        let w = &binomial(k, j) * &int_pow(n, (k - j) as u32);
        out.push(m + n, j + l, Scalar::from_rational(w));
    }
    for j in 0..=l {
        let w = &binomial(l, j) * &int_pow(m, (l - j) as u32);
        out.push(m + n, j + k, -&Scalar::from_rational(w));
    }
    Ok(out)
}

/// The basis map `w(x^μ D^k) = x^μ (μ - D)^k`, extended linearly.
/// It reverses the sign of the Lie bracket (`w[A,B] = -[wA, wB]`), so its
/// anti-fixed span is a subalgebra.
pub fn w_map(x: &PDiffOp) -> PDiffOp {
    let mut out = PDiffOp::zero();
    for ((mu, k), c) in x.terms() {
        // (μ - D)^k = Σ_j C(k,j) μ^{k-j} (-1)^j D^j
        for j in 0..=*k {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let wcoef = &binomial(*k, j) * &(int_pow(*mu, (*k - j) as u32) * crate::scalar::rat(sign));
            out.push(*mu, j, c * &Scalar::from_rational(wcoef));
        }
    }
    out
}

/// The change of variable `x -> 1/x`: `σ(x^μ D^k) = x^{-μ} (-D)^k`.
/// An algebra automorphism; its fixed span is a subalgebra.
pub fn sigma_map(x: &PDiffOp) -> PDiffOp {
    let mut out = PDiffOp::zero();
    for ((mu, k), c) in x.terms() {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out.push(-mu, *k, c * &Scalar::from_int(sign));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    B,
    C,
}

/// The `C`-series element `x^m D^k - w(x^m D^k)` or the `B`-series element
/// `x^{-m} D^k + σ(x^{-m} D^k)`.
pub fn series_element(series: Series, m: i64, k: i64) -> Result<PDiffOp, PDiffError> {
    match series {
        Series::C => {
            let base = PDiffOp::basis(m, k)?;
            Ok(base.sub(&w_map(&base)))
        }
        Series::B => {
            let base = PDiffOp::basis(-m, k)?;
            Ok(base.add(&sigma_map(&base)))
        }
    }
}

/// A symmetrized basis slice together with its closure certificate: every
/// pairwise commutator must be (anti-)invariant under the defining map,
/// which is exactly membership in the series' span.
pub struct SeriesBasis {
    pub series: Series,
    pub elements: Vec<(i64, i64, PDiffOp)>,
    /// Failed membership checks, rendered; empty means the certificate
    /// passes.
    pub failures: Vec<String>,
    pub checked_pairs: u64,
}

pub fn series_basis(
    series: Series,
    m_range: impl IntoIterator<Item = i64>,
    k_range: impl IntoIterator<Item = i64> + Clone,
) -> Result<SeriesBasis, PDiffError> {
    let mut elements = Vec::new();
    for m in m_range {
        for k in k_range.clone() {
            elements.push((m, k, series_element(series, m, k)?));
        }
    }
    let mut failures = Vec::new();
    let mut checked_pairs = 0;
    for (m1, k1, a) in &elements {
        for (m2, k2, b) in &elements {
            checked_pairs += 1;
            let u = pdiff_commutator(a, b);
            let ok = match series {
                Series::C => w_map(&u) == u.neg(),
                Series::B => sigma_map(&u) == u,
            };
            if !ok {
                failures.push(format!(
                    "[{:?}({}, {}), {:?}({}, {})] = {} escapes the series span",
                    series,
                    m1,
                    k1,
                    series,
                    m2,
                    k2,
                    u.render()
                ));
            }
        }
    }
    Ok(SeriesBasis { series, elements, failures, checked_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(m: i64, k: i64) -> PDiffOp {
        PDiffOp::basis(m, k).unwrap()
    }

    #[test]
    fn commutator_examples() {
        // [xD, x^2 D] = x^3 D
        assert_eq!(pdiff_commutator(&b(1, 1), &b(2, 1)), b(3, 1));
        // [D, x^n] = n x^n
        for n in -4..=4i64 {
            let got = pdiff_commutator(&b(0, 1), &b(n, 0));
            assert_eq!(got, b(n, 0).scaled(&Scalar::from_int(n)));
        }
        // multiplication operators commute
        assert!(pdiff_commutator(&b(2, 0), &b(-3, 0)).is_zero());
    }

    #[test]
    fn negative_order_is_rejected() {
        assert_eq!(PDiffOp::basis(0, -1), Err(PDiffError::NegativeOrder(-1)));
        assert_eq!(commutator_closed_form(0, -1, 0, 0), Err(PDiffError::NegativeOrder(-1)));
    }

    #[test]
    fn composition_matches_the_action_on_monomials() {
        // (xy)(x^s) = x(y(x^s)) — an independent check of the product rule.
        for m in -3..=3i64 {
            for k in 0..=3i64 {
                for n in -3..=3i64 {
                    for l in 0..=3i64 {
                        let x = b(m, k);
                        let y = b(n, l);
                        let xy = pdiff_mul(&x, &y);
                        for s in -5..=5i64 {
                            let direct = xy.apply_to_monomial(s);
                            // y sends x^s to (s^l) x^{s+n}; then apply x.
                            let first = y.apply_to_monomial(s);
                            let mut composed: BTreeMap<i64, Scalar> = BTreeMap::new();
                            for (off1, c1) in first {
                                for (off2, c2) in x.apply_to_monomial(s + off1) {
                                    let e = composed
                                        .entry(off1 + off2)
                                        .or_insert_with(Scalar::zero);
                                    *e = &*e + &(&c1 * &c2);
                                }
                            }
                            composed.retain(|_, v| !v.is_zero());
                            assert_eq!(direct, composed, "m={} k={} n={} l={} s={}", m, k, n, l, s);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_matches_closed_form() {
        for m in -3..=3i64 {
            for k in 0..=3i64 {
                for n in -3..=3i64 {
                    for l in 0..=3i64 {
                        assert_eq!(
                            pdiff_commutator(&b(m, k), &b(n, l)),
                            commutator_closed_form(m, k, n, l).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn series_examples() {
        // C-series at m = 0, k = 1: D - (0 - D) = 2D.
        assert_eq!(
            series_element(Series::C, 0, 1).unwrap(),
            b(0, 1).scaled(&Scalar::from_int(2))
        );
        // B-series at m = 0: doubled for even k, zero for odd k.
        assert_eq!(
            series_element(Series::B, 0, 2).unwrap(),
            b(0, 2).scaled(&Scalar::from_int(2))
        );
        assert!(series_element(Series::B, 0, 3).unwrap().is_zero());
    }

    #[test]
    fn w_is_an_involution_reversing_the_bracket() {
        for m in -2..=2i64 {
            for k in 0..=2i64 {
                let x = b(m, k);
                assert_eq!(w_map(&w_map(&x)), x);
                for n in -2..=2i64 {
                    for l in 0..=2i64 {
                        let y = b(n, l);
                        assert_eq!(
                            w_map(&pdiff_commutator(&x, &y)),
                            pdiff_commutator(&w_map(&x), &w_map(&y)).neg()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_is_an_automorphism() {
        for m in -2..=2i64 {
            for k in 0..=2i64 {
                let x = b(m, k);
                assert_eq!(sigma_map(&sigma_map(&x)), x);
                for n in -2..=2i64 {
                    for l in 0..=2i64 {
                        let y = b(n, l);
                        assert_eq!(
                            sigma_map(&pdiff_mul(&x, &y)),
                            pdiff_mul(&sigma_map(&x), &sigma_map(&y))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closure_certificates_pass_small() {
        for series in [Series::B, Series::C] {
            let basis = series_basis(series, (-2..=2).filter(|m| *m != 0), 0..=2).unwrap();
            assert!(basis.failures.is_empty(), "{:?}", basis.failures);
            assert!(basis.checked_pairs > 0);
        }
    }
}
