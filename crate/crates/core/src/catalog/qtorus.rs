//! The quantum torus: the associative algebra on invertible `U`, `V` with
//! `V U = q U V`, kept in the normal order `U`-before-`V`. Its commutator
//! Lie algebra realizes the sin-algebra bracket exactly, which makes it an
//! independent oracle for the derived mode computation.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Finite sum of normally ordered words `U^k V^m`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct QTorusOp {
    terms: BTreeMap<(i64, i64), Scalar>,
}

impl QTorusOp {
    pub fn zero() -> Self {
        QTorusOp::default()
    }

    /// The word `U^k V^m`.
    pub fn word(k: i64, m: i64) -> Self {
        QTorusOp::term(k, m, Scalar::one())
    }

    pub fn term(k: i64, m: i64, c: Scalar) -> Self {
        let mut out = QTorusOp::zero();
        out.add_term(k, m, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, k: i64, m: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(k, m)) {
            Some(v) => {
                let sum = &*v + &c;
                if sum.is_zero() {
                    self.terms.remove(&(k, m));
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert((k, m), c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((k, m), c) in &other.terms {
            out.add_term(*k, *m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QTorusOp {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return QTorusOp::zero();
        }
        QTorusOp {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|((k, m), c)| format!("({})*U^{}V^{}", c, k, m))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Normal-ordered product: `U^k V^m · U^l V^n = q^{ml} U^{k+l} V^{m+n}`
/// (one `V`-past-`U` exchange per crossing).
pub fn qtorus_mul(x: &QTorusOp, y: &QTorusOp) -> QTorusOp {
    let mut out = QTorusOp::zero();
    for ((k, m), a) in x.terms() {
        for ((l, n), b) in y.terms() {
            let reorder = Scalar::q_pow(m * l);
            out.add_term(k + l, m + n, &(a * b) * &reorder);
        }
    }
    out
}

pub fn qtorus_commutator(x: &QTorusOp, y: &QTorusOp) -> QTorusOp {
    qtorus_mul(x, y).sub(&qtorus_mul(y, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn defining_relation() {
        // V · U = q · UV
        let v = QTorusOp::word(0, 1);
        let u = QTorusOp::word(1, 0);
        assert_eq!(qtorus_mul(&v, &u), QTorusOp::term(1, 1, Scalar::q()));
        // U · V is already normal ordered.
        assert_eq!(qtorus_mul(&u, &v), QTorusOp::word(1, 1));
    }

    #[test]
    fn commutator_example() {
        // [U V, V] = (1 - q) U V^2
        let x = QTorusOp::word(1, 1);
        let y = QTorusOp::word(0, 1);
        assert_eq!(qtorus_commutator(&x, &y), QTorusOp::term(1, 2, sc("1 - q")));
        assert!(qtorus_commutator(&x, &x).is_zero());
    }

    #[test]
    fn words_bracket_like_the_sin_algebra() {
        for k in -3..=3i64 {
            for m in -3..=3i64 {
                for l in -3..=3i64 {
                    for n in -3..=3i64 {
                        let got = qtorus_commutator(&QTorusOp::word(k, m), &QTorusOp::word(l, n));
                        let coeff = &Scalar::q_pow(m * l) - &Scalar::q_pow(n * k);
                        assert_eq!(got, QTorusOp::term(k + l, m + n, coeff));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplication_is_associative() {
        let bound = 3i64;
        let mut words = Vec::new();
        for k in -bound..=bound {
            for m in -bound..=bound {
                words.push(QTorusOp::word(k, m));
            }
        }
        // Monomial triples; bilinearity extends the law to sums.
        for x in words.iter().step_by(3) {
            for y in words.iter().step_by(3) {
                for z in words.iter().step_by(3) {
                    let lhs = qtorus_mul(&qtorus_mul(x, y), z);
                    let rhs = qtorus_mul(x, &qtorus_mul(y, z));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
