//! Finite-support `Z x Z` matrices: the Lie algebra spanned by matrix
//! units `E_{ij}` with `[E_{ij}, E_{kl}] = δ_{jk} E_{il} - δ_{li} E_{kj}`,
//! together with the order-preserving and order-reversing symmetries the
//! catalog algebras twist by.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// A matrix with finitely many nonzero entries, indexed over `Z x Z`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct GlInfElem {
    entries: BTreeMap<(i64, i64), Scalar>,
}

impl GlInfElem {
    pub fn zero() -> Self {
        GlInfElem::default()
    }

    /// The matrix unit `E_{ij}`.
    pub fn unit(i: i64, j: i64) -> Self {
        GlInfElem::term(i, j, Scalar::one())
    }

    pub fn term(i: i64, j: i64, c: Scalar) -> Self {
        let mut out = GlInfElem::zero();
        out.add_entry(i, j, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i64, i64), &Scalar)> {
        self.entries.iter()
    }

    pub fn add_entry(&mut self, i: i64, j: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&(i, j)) {
            Some(v) => {
                let sum = &*v + &c;
                if sum.is_zero() {
                    self.entries.remove(&(i, j));
                } else {
                    *v = sum;
                }
            }
            None => {
                self.entries.insert((i, j), c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in &other.entries {
            out.add_entry(*i, *j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GlInfElem {
            entries: self.entries.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return GlInfElem::zero();
        }
        GlInfElem {
            entries: self.entries.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    /// Matrix product (finite support makes this exact).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = GlInfElem::zero();
        for ((i, j), a) in &self.entries {
            for ((k, l), b) in &other.entries {
                if j == k {
                    out.add_entry(*i, *l, a * b);
                }
            }
        }
        out
    }

    /// Drop all entries outside the box `[-m, m]^2`.
    pub fn truncate(&self, m: i64) -> Self {
        GlInfElem {
            entries: self
                .entries
                .iter()
                .filter(|(&(i, j), _)| i.abs() <= m && j.abs() <= m)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Largest absolute row/column index with a nonzero entry.
    pub fn extent(&self) -> i64 {
        self.entries
            .keys()
            .map(|(i, j)| i.abs().max(j.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.entries
            .iter()
            .map(|((i, j), c)| format!("({})*E[{},{}]", c, i, j))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `[x, y] = xy - yx`.
pub fn glinf_bracket(x: &GlInfElem, y: &GlInfElem) -> GlInfElem {
    x.mul(y).sub(&y.mul(x))
}

/// Product where the intermediate summation index is confined to
/// `[-m, m]`; the independent finite-matrix route used by the truncation
/// oracle.
pub fn trunc_mul(x: &GlInfElem, y: &GlInfElem, m: i64) -> GlInfElem {
    let xt = x.truncate(m);
    let yt = y.truncate(m);
    let mut out = GlInfElem::zero();
    for ((i, j), a) in xt.entries() {
        if j.abs() > m {
            continue;
        }
        for ((k, l), b) in yt.entries() {
            if j == k {
                out.add_entry(*i, *l, a * b);
            }
        }
    }
    out.truncate(m)
}

pub fn trunc_bracket(x: &GlInfElem, y: &GlInfElem, m: i64) -> GlInfElem {
    trunc_mul(x, y, m).sub(&trunc_mul(y, x, m))
}

/// Named symmetries of the matrix algebra used by the catalog: the
/// diagonal shift and four order-2 twists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlAction {
    /// `E_{ij} -> E_{i+1,j+1}`.
    ShiftT,
    /// `E_{ij} -> -E_{ji}` (commutes with the shift).
    Eps32b,
    /// The composite `E_{ij} -> -E_{j+1,i+1}`.
    EpsTilde32b,
    /// `E_{ij} -> -E_{-j,-i}` (conjugates the shift to its inverse).
    Eps52Phi1,
    /// `E_{ij} -> E_{-i,-j}` (also inverts the shift).
    Eps52Phi2,
}

impl GlAction {
    pub fn names() -> &'static [&'static str] {
        &["shiftT", "eps32b", "epsTilde32b", "eps52_phi1", "eps52_phi2"]
    }

    pub fn parse(name: &str) -> Option<GlAction> {
        match name {
            "shiftT" => Some(GlAction::ShiftT),
            "eps32b" => Some(GlAction::Eps32b),
            "epsTilde32b" => Some(GlAction::EpsTilde32b),
            "eps52_phi1" => Some(GlAction::Eps52Phi1),
            "eps52_phi2" => Some(GlAction::Eps52Phi2),
            _ => None,
        }
    }

    fn apply_unit(&self, i: i64, j: i64) -> (i64, i64, bool) {
        match self {
            GlAction::ShiftT => (i + 1, j + 1, false),
            GlAction::Eps32b => (j, i, true),
            GlAction::EpsTilde32b => (j + 1, i + 1, true),
            GlAction::Eps52Phi1 => (-j, -i, true),
            GlAction::Eps52Phi2 => (-i, -j, false),
        }
    }

    pub fn apply(&self, x: &GlInfElem) -> GlInfElem {
        let mut out = GlInfElem::zero();
        for ((i, j), c) in x.entries() {
            let (i2, j2, negate) = self.apply_unit(*i, *j);
            out.add_entry(i2, j2, if negate { -c } else { c.clone() });
        }
        out
    }
}

/// Apply a named symmetry once.
pub fn glinf_action(action: GlAction, x: &GlInfElem) -> GlInfElem {
    action.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        let e01 = GlInfElem::unit(0, 1);
        let e10 = GlInfElem::unit(1, 0);
        let expected = GlInfElem::unit(0, 0).sub(&GlInfElem::unit(1, 1));
        assert_eq!(glinf_bracket(&e01, &e10), expected);
        let e23 = GlInfElem::unit(2, 3);
        assert!(glinf_bracket(&e01, &e23).is_zero());
        assert!(glinf_bracket(&e01, &e01).is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric_and_jacobi_on_units() {
        let bound = 3i64;
        let mut units = Vec::new();
        for i in -bound..=bound {
            for j in -bound..=bound {
                units.push(GlInfElem::unit(i, j));
            }
        }
        for x in &units {
            for y in &units {
                assert!(glinf_bracket(x, y).add(&glinf_bracket(y, x)).is_zero());
            }
        }
        // Jacobi on a thinner slice (the full cube runs in the acceptance
        // suite).
        let mut small = Vec::new();
        for i in -1..=1i64 {
            for j in -1..=1i64 {
                small.push(GlInfElem::unit(i, j));
            }
        }
        for x in &small {
            for y in &small {
                for z in &small {
                    let lhs = glinf_bracket(x, &glinf_bracket(y, z));
                    let rhs = glinf_bracket(&glinf_bracket(x, y), z)
                        .add(&glinf_bracket(y, &glinf_bracket(x, z)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        assert_eq!(
            glinf_action(GlAction::ShiftT, &GlInfElem::unit(0, 3)),
            GlInfElem::unit(1, 4)
        );
        assert_eq!(
            glinf_action(GlAction::Eps32b, &GlInfElem::unit(0, 3)),
            GlInfElem::unit(3, 0).neg()
        );
        // The composite: eps52_phi1 ∘ shiftT ∘ eps52_phi1 = shiftT^{-1}.
        for i in -3..=3i64 {
            for j in -3..=3i64 {
                let x = GlInfElem::unit(i, j);
                let conj = glinf_action(
                    GlAction::Eps52Phi1,
                    &glinf_action(GlAction::ShiftT, &glinf_action(GlAction::Eps52Phi1, &x)),
                );
                assert_eq!(conj, GlInfElem::unit(i - 1, j - 1));
            }
        }
    }

    #[test]
    fn actions_are_automorphisms_with_declared_orders() {
        let bound = 3i64;
        let mut units = Vec::new();
        for i in -bound..=bound {
            for j in -bound..=bound {
                units.push(GlInfElem::unit(i, j));
            }
        }
        for action in [
            GlAction::ShiftT,
            GlAction::Eps32b,
            GlAction::EpsTilde32b,
            GlAction::Eps52Phi1,
            GlAction::Eps52Phi2,
        ] {
            for x in &units {
                for y in &units {
                    let lhs = action.apply(&glinf_bracket(x, y));
                    let rhs = glinf_bracket(&action.apply(x), &action.apply(y));
                    assert_eq!(lhs, rhs, "automorphism property for {:?}", action);
                }
            }
        }
        for x in &units {
            // The three twists are involutions.
            for eps in [GlAction::Eps32b, GlAction::Eps52Phi1, GlAction::Eps52Phi2] {
                assert_eq!(eps.apply(&eps.apply(x)), *x);
            }
            // eps32b commutes with the shift.
            assert_eq!(
                GlAction::Eps32b.apply(&GlAction::ShiftT.apply(x)),
                GlAction::ShiftT.apply(&GlAction::Eps32b.apply(x))
            );
            // epsTilde32b = eps32b ∘ shiftT.
            assert_eq!(
                GlAction::EpsTilde32b.apply(x),
                GlAction::Eps32b.apply(&GlAction::ShiftT.apply(x))
            );
            // eps52_phi2 also conjugates the shift to its inverse.
            let conj = GlAction::Eps52Phi2.apply(
                &GlAction::ShiftT.apply(&GlAction::Eps52Phi2.apply(x)),
            );
            let (i, j) = *x.entries().next().unwrap().0;
            assert_eq!(conj, GlInfElem::unit(i - 1, j - 1));
        }
    }

    #[test]
    fn truncated_product_agrees_inside_the_box() {
        // For single matrix units the truncated product equals the exact
        // one whenever all indices fit.
        for i in -4..=4i64 {
            for j in -4..=4i64 {
                let x = GlInfElem::unit(i, j);
                for k in -4..=4i64 {
                    for l in -4..=4i64 {
                        let y = GlInfElem::unit(k, l);
                        let exact = glinf_bracket(&x, &y);
                        let trunc = trunc_bracket(&x, &y, 12);
                        assert_eq!(exact, trunc);
                    }
                }
            }
        }
    }
}
