//! The index group Γ, its elements and its scalar characters.
//!
//! Exactly four families of groups are representable, covering every group
//! the catalog algebras use:
//!
//! * `Z^N` — free abelian of rank `N` (including the trivial group `Z^0`);
//! * `Z/M` — cyclic of order `M`;
//! * `Z2 x Z^N` — a commuting order-2 generator `e` next to a free part;
//! * `Dinf` — infinite dihedral `<e, T | e^2 = 1, e T e = T^-1>`.
//!
//! Elements are kept in canonical form (reduced residues, sign bit in
//! `{0,1}`) so they are usable as ordered map keys. The word `(v, s)`
//! denotes `T^v * e^s`; multiplication is
//! `(v, s) (w, t) = (v ∘ flip^s(w), s ⊕ t)` where `flip` negates the vector
//! for the dihedral family and is the identity otherwise.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element does not belong to group {0}")]
    ElementSpecMismatch(String),
    #[error("unsupported group shape: {0}")]
    BadSpec(String),
    #[error("character value must be nonzero")]
    ZeroCharacterValue,
    #[error("character relation violated: {0}")]
    RelationViolated(String),
    #[error("expected {expected} character values, got {got}")]
    WrongValueCount { expected: usize, got: usize },
    #[error("cannot parse group element '{0}'")]
    BadElement(String),
}

/// How the order-2 generator (when present) interacts with the free part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flip {
    None,
    /// `e` commutes with the free generators (`Z2 x Z^N`).
    TrivialInvolution,
    /// `e T e = T^-1` (infinite dihedral; free rank is 1).
    InvertingInvolution,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupSpec {
    free_rank: usize,
    torsion: Option<u32>,
    flip: Flip,
}

impl GroupSpec {
    /// `Z^n` (free abelian; `n = 0` is the trivial group).
    pub fn free(n: usize) -> Self {
        GroupSpec { free_rank: n, torsion: None, flip: Flip::None }
    }

    /// `Z/m`.
    pub fn cyclic(m: u32) -> Self {
        assert!(m >= 1, "cyclic modulus must be positive");
        GroupSpec { free_rank: 0, torsion: Some(m), flip: Flip::None }
    }

    /// `Z2 x Z^n` with a commuting involution.
    pub fn z2_cross_free(n: usize) -> Self {
        GroupSpec { free_rank: n, torsion: None, flip: Flip::TrivialInvolution }
    }

    /// The infinite dihedral group.
    pub fn infinite_dihedral() -> Self {
        GroupSpec { free_rank: 1, torsion: None, flip: Flip::InvertingInvolution }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> Option<u32> {
        self.torsion
    }

    pub fn flip(&self) -> Flip {
        self.flip
    }

    pub fn has_sign(&self) -> bool {
        self.flip != Flip::None
    }

    /// Number of coordinates an element carries (torsion uses one slot).
    fn coord_len(&self) -> usize {
        self.free_rank + usize::from(self.torsion.is_some())
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem { vec: vec![0; self.coord_len()], sign: false }
    }

    pub fn validate(&self, g: &GroupElem) -> Result<(), GroupError> {
        let ok = g.vec.len() == self.coord_len()
            && (!g.sign || self.has_sign())
            && match self.torsion {
                Some(m) => g.vec[0] >= 0 && g.vec[0] < i64::from(m),
                None => true,
            };
        if ok {
            Ok(())
        } else {
            Err(GroupError::ElementSpecMismatch(self.to_string()))
        }
    }

    fn reduce(&self, mut vec: Vec<i64>, sign: bool) -> GroupElem {
        if let Some(m) = self.torsion {
            vec[0] = vec[0].rem_euclid(i64::from(m));
        }
        GroupElem { vec, sign: sign && self.has_sign() }
    }

    /// Build an element from raw coordinates (reduced mod torsion).
    pub fn elem(&self, coords: &[i64], sign: bool) -> Result<GroupElem, GroupError> {
        if coords.len() != self.coord_len() || (sign && !self.has_sign()) {
            return Err(GroupError::ElementSpecMismatch(self.to_string()));
        }
        Ok(self.reduce(coords.to_vec(), sign))
    }

    fn flip_vec(&self, v: &[i64], times: bool) -> Vec<i64> {
        if times && self.flip == Flip::InvertingInvolution {
            v.iter().map(|x| -x).collect()
        } else {
            v.to_vec()
        }
    }

    pub fn mul(&self, g: &GroupElem, h: &GroupElem) -> Result<GroupElem, GroupError> {
        self.validate(g)?;
        self.validate(h)?;
        let hw = self.flip_vec(&h.vec, g.sign);
        let vec = g.vec.iter().zip(&hw).map(|(a, b)| a + b).collect();
        Ok(self.reduce(vec, g.sign ^ h.sign))
    }

    pub fn inv(&self, g: &GroupElem) -> Result<GroupElem, GroupError> {
        self.validate(g)?;
        let flipped = self.flip_vec(&g.vec, g.sign);
        Ok(self.reduce(flipped.iter().map(|x| -x).collect(), g.sign))
    }

    /// All elements whose coordinates lie in `[-bound, bound]` (cyclic groups
    /// enumerate every residue; the sign bit doubles the count).
    pub fn enumerate(&self, bound: i64) -> Vec<GroupElem> {
        let mut coords: Vec<Vec<i64>> = vec![vec![]];
        if let Some(m) = self.torsion {
            coords = (0..i64::from(m)).map(|r| vec![r]).collect();
        }
        for _ in 0..self.free_rank {
            let mut next = Vec::new();
            for prefix in &coords {
                for x in -bound..=bound {
                    let mut v = prefix.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            coords = next;
        }
        let signs: &[bool] = if self.has_sign() { &[false, true] } else { &[false] };
        let mut out = Vec::new();
        for sign in signs {
            for v in &coords {
                out.push(GroupElem { vec: v.clone(), sign: *sign });
            }
        }
        out
    }

    /// Parse an element in the same syntax `Display` emits.
    ///
    /// Accepted forms: `1` (identity), `T^3`, `T`, bare integers for rank-1
    /// and cyclic groups, `(1,0,2)` vectors, with an optional `e*` or `e`
    /// prefix when the group has an order-2 generator.
    pub fn parse_elem(&self, text: &str) -> Result<GroupElem, GroupError> {
        let s = text.trim();
        let bad = || GroupError::BadElement(s.to_string());
        let (sign, rest) = if let Some(r) = s.strip_prefix("e*") {
            (true, r.trim())
        } else if s == "e" {
            (true, "")
        } else {
            (false, s)
        };
        if sign && !self.has_sign() {
            return Err(bad());
        }
        // "1" is the identity literal, except in cyclic groups where the
        // identity renders as residue "0" and "1" is a residue.
        let identity_literal = rest == "1" && self.torsion.is_none();
        let word_vec: Vec<i64> = if rest.is_empty() || identity_literal {
            vec![0; self.coord_len()]
        } else if let Some(body) = rest.strip_prefix('(') {
            let body = body.strip_suffix(')').ok_or_else(bad)?;
            let coords: Result<Vec<i64>, _> =
                body.split(',').map(|p| p.trim().parse::<i64>()).collect();
            let coords = coords.map_err(|_| bad())?;
            if coords.len() != self.coord_len() {
                return Err(bad());
            }
            coords
        } else if self.coord_len() == 1 {
            let k = if rest == "T" {
                1
            } else if let Some(exp) = rest.strip_prefix("T^") {
                exp.parse::<i64>().map_err(|_| bad())?
            } else {
                rest.parse::<i64>().map_err(|_| bad())?
            };
            vec![k]
        } else {
            return Err(bad());
        };
        // The text denotes the word e^sign * T^word_vec; multiply it out.
        let eps = GroupElem { vec: vec![0; self.coord_len()], sign };
        let trans = self.reduce(word_vec, false);
        self.mul(&eps, &trans)
    }

    pub fn fmt_elem(&self, g: &GroupElem) -> String {
        let word = self.flip_vec(&g.vec, g.sign);
        let vec_part = if word.iter().all(|x| *x == 0) {
            String::new()
        } else if self.torsion.is_some() {
            format!("{}", word[0])
        } else if self.coord_len() == 1 {
            match word[0] {
                1 => "T".to_string(),
                k => format!("T^{}", k),
            }
        } else {
            format!(
                "({})",
                word.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            )
        };
        match (g.sign, vec_part.is_empty()) {
            (false, true) => {
                if self.torsion.is_some() {
                    "0".to_string()
                } else {
                    "1".to_string()
                }
            }
            (false, false) => vec_part,
            (true, true) => "e".to_string(),
            (true, false) => format!("e*{}", vec_part),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.flip, self.torsion, self.free_rank) {
            (Flip::None, Some(m), _) => write!(f, "Z/{}", m),
            (Flip::None, None, 1) => write!(f, "Z"),
            (Flip::None, None, n) => write!(f, "Z^{}", n),
            (Flip::TrivialInvolution, _, 1) => write!(f, "Z2xZ"),
            (Flip::TrivialInvolution, _, n) => write!(f, "Z2xZ^{}", n),
            (Flip::InvertingInvolution, _, _) => write!(f, "Dinf"),
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || GroupError::BadSpec(s.to_string());
        if s == "Z" {
            Ok(GroupSpec::free(1))
        } else if s == "Dinf" {
            Ok(GroupSpec::infinite_dihedral())
        } else if s == "Z2xZ" {
            Ok(GroupSpec::z2_cross_free(1))
        } else if let Some(n) = s.strip_prefix("Z2xZ^") {
            Ok(GroupSpec::z2_cross_free(n.parse().map_err(|_| bad())?))
        } else if let Some(n) = s.strip_prefix("Z^") {
            Ok(GroupSpec::free(n.parse().map_err(|_| bad())?))
        } else if let Some(m) = s.strip_prefix("Z/") {
            let m: u32 = m.parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(bad());
            }
            Ok(GroupSpec::cyclic(m))
        } else {
            Err(bad())
        }
    }
}

/// Group element in canonical form. Interpret `(vec, sign)` as the word
/// `T^vec * e^sign`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem {
    vec: Vec<i64>,
    sign: bool,
}

impl GroupElem {
    pub fn coords(&self) -> &[i64] {
        &self.vec
    }

    pub fn sign(&self) -> bool {
        self.sign
    }

    pub fn is_identity(&self) -> bool {
        !self.sign && self.vec.iter().all(|x| *x == 0)
    }

    /// Flat encoding (coordinates, then the sign bit when present) used to
    /// label generators indexed by group elements.
    pub fn encode(&self, spec: &GroupSpec) -> Vec<i64> {
        let mut v = self.vec.clone();
        if spec.has_sign() {
            v.push(i64::from(self.sign));
        }
        v
    }

    pub fn decode(spec: &GroupSpec, index: &[i64]) -> Result<GroupElem, GroupError> {
        if spec.has_sign() {
            let (last, coords) = index
                .split_last()
                .ok_or_else(|| GroupError::ElementSpecMismatch(spec.to_string()))?;
            spec.elem(coords, *last != 0)
        } else {
            spec.elem(index, false)
        }
    }
}

/// A homomorphism `χ: Γ -> Scalar^×`, given by its values on generators.
///
/// Value order: the order-2 generator `e` first (when present), then the
/// cyclic generator (when present), then the free generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    spec: GroupSpec,
    eps: Option<Scalar>,
    torsion: Option<Scalar>,
    free: Vec<Scalar>,
}

impl Character {
    pub fn make(spec: &GroupSpec, values: &[Scalar]) -> Result<Character, GroupError> {
        let expected = usize::from(spec.has_sign())
            + usize::from(spec.torsion().is_some())
            + spec.free_rank();
        if values.len() != expected {
            return Err(GroupError::WrongValueCount { expected, got: values.len() });
        }
        if values.iter().any(Scalar::is_zero) {
            return Err(GroupError::ZeroCharacterValue);
        }
        let mut it = values.iter().cloned();
        let eps = spec.has_sign().then(|| it.next().unwrap());
        let torsion = spec.torsion().map(|_| it.next().unwrap());
        let free: Vec<Scalar> = it.collect();
        if let Some(e) = &eps {
            if e.pow(2).unwrap() != Scalar::one() {
                return Err(GroupError::RelationViolated(
                    "χ(e)^2 ≠ 1 (e has order 2)".into(),
                ));
            }
        }
        if let (Some(m), Some(t)) = (spec.torsion(), &torsion) {
            if t.pow(i64::from(m)).unwrap() != Scalar::one() {
                return Err(GroupError::RelationViolated(format!(
                    "χ(torsion generator)^{} ≠ 1 (generator has order {})",
                    m, m
                )));
            }
        }
        if spec.flip() == Flip::InvertingInvolution
            && free[0].pow(2).unwrap() != Scalar::one()
        {
            return Err(GroupError::RelationViolated(
                "χ(T)^2 ≠ 1 under inverting involution".into(),
            ));
        }
        Ok(Character { spec: spec.clone(), eps, torsion, free })
    }

    /// The default character: each free generator goes to `q` (rank 1) or to
    /// distinct primes 2, 3, 5, ... (rank ≥ 2); `e` and cyclic/dihedral
    /// generators go to -1.
    pub fn symbolic(spec: &GroupSpec) -> Character {
        const PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];
        let mut values = Vec::new();
        if spec.has_sign() {
            values.push(Scalar::from_int(-1));
        }
        if spec.torsion().is_some() {
            values.push(Scalar::from_int(-1));
        }
        if spec.flip() == Flip::InvertingInvolution {
            values.push(Scalar::from_int(-1));
        } else if spec.free_rank() == 1 {
            values.push(Scalar::q());
        } else {
            for i in 0..spec.free_rank() {
                values.push(Scalar::from_int(PRIMES[i]));
            }
        }
        Character::make(spec, &values).expect("default character satisfies all relations")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn eval(&self, g: &GroupElem) -> Result<Scalar, GroupError> {
        self.spec.validate(g)?;
        let mut acc = Scalar::one();
        if g.sign {
            acc = &acc * self.eps.as_ref().expect("sign implies flip");
        }
        let mut coords = g.vec.iter();
        if let Some(t) = &self.torsion {
            let r = *coords.next().unwrap();
            acc = &acc * &t.pow(r).expect("character values are nonzero");
        }
        for (v, x) in self.free.iter().zip(coords) {
            acc = &acc * &v.pow(*x).expect("character values are nonzero");
        }
        Ok(acc)
    }

    /// Evaluate and raise to an integer power in one step: `χ(g)^k`.
    pub fn eval_pow(&self, g: &GroupElem, k: i64) -> Result<Scalar, GroupError> {
        Ok(self.eval(g)?.pow(k).expect("character values are nonzero"))
    }

    /// Human-readable description ("χ(e) = -1, χ(T) = q").
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(e) = &self.eps {
            parts.push(format!("χ(e) = {}", e));
        }
        if let Some(t) = &self.torsion {
            parts.push(format!("χ(1) = {}", t));
        }
        if self.free.len() == 1 {
            parts.push(format!("χ(T) = {}", self.free[0]));
        } else {
            for (i, v) in self.free.iter().enumerate() {
                parts.push(format!("χ(T{}) = {}", i + 1, v));
            }
        }
        parts.join(", ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn sc(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn abelian_addition() {
        let g = GroupSpec::free(2);
        let a = g.elem(&[1, 0], false).unwrap();
        let b = g.elem(&[0, 2], false).unwrap();
        assert_eq!(g.mul(&a, &b).unwrap(), g.elem(&[1, 2], false).unwrap());
    }

    #[test]
    fn dihedral_conjugation_inverts() {
        let g = GroupSpec::infinite_dihedral();
        let e = g.parse_elem("e").unwrap();
        let t3 = g.parse_elem("T^3").unwrap();
        let out = g.mul(&g.mul(&e, &t3).unwrap(), &e).unwrap();
        assert_eq!(out, g.parse_elem("T^-3").unwrap());
    }

    #[test]
    fn torsion_wraps() {
        let g = GroupSpec::cyclic(2);
        let one = g.elem(&[1], false).unwrap();
        assert_eq!(g.mul(&one, &one).unwrap(), g.identity());
        let z4 = GroupSpec::cyclic(4);
        let three = z4.elem(&[3], false).unwrap();
        assert_eq!(z4.inv(&three).unwrap(), z4.elem(&[1], false).unwrap());
    }

    #[test]
    fn free_inverse() {
        let g = GroupSpec::free(1);
        let five = g.elem(&[5], false).unwrap();
        assert_eq!(g.inv(&five).unwrap(), g.elem(&[-5], false).unwrap());
    }

    #[test]
    fn dihedral_reflections_are_involutions() {
        let g = GroupSpec::infinite_dihedral();
        let h = g.parse_elem("e*T^2").unwrap();
        assert_eq!(g.mul(&h, &h).unwrap(), g.identity());
        assert_eq!(g.inv(&h).unwrap(), h);
    }

    #[test]
    fn group_laws_exhaustive_small() {
        for spec in [
            GroupSpec::free(1),
            GroupSpec::free(2),
            GroupSpec::cyclic(4),
            GroupSpec::z2_cross_free(1),
            GroupSpec::infinite_dihedral(),
        ] {
            let elems = spec.enumerate(2);
            for g in &elems {
                let gi = spec.inv(g).unwrap();
                assert_eq!(spec.mul(g, &gi).unwrap(), spec.identity());
                assert_eq!(spec.mul(&gi, g).unwrap(), spec.identity());
                assert_eq!(spec.mul(g, &spec.identity()).unwrap(), *g);
            }
            // Associativity on a thinner slice to keep the cube small.
            let slice = spec.enumerate(1);
            for a in &slice {
                for b in &slice {
                    for c in &slice {
                        let ab_c = spec.mul(&spec.mul(a, b).unwrap(), c).unwrap();
                        let a_bc = spec.mul(a, &spec.mul(b, c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc, "associativity in {}", spec);
                    }
                }
            }
        }
    }

    #[test]
    fn character_on_z() {
        let spec = GroupSpec::free(1);
        let chi = Character::make(&spec, &[Scalar::q()]).unwrap();
        let g = spec.elem(&[3], false).unwrap();
        assert_eq!(chi.eval(&g).unwrap(), Scalar::q_pow(3));
        assert_eq!(chi.eval(&spec.identity()).unwrap(), Scalar::one());
    }

    #[test]
    fn character_on_z2_cross_z() {
        let spec = GroupSpec::z2_cross_free(1);
        let chi = Character::make(&spec, &[Scalar::from_int(-1), Scalar::q()]).unwrap();
        let g = spec.parse_elem("e*T^2").unwrap();
        assert_eq!(chi.eval(&g).unwrap(), sc("-q^2"));
    }

    #[test]
    fn dihedral_character_needs_involutive_t() {
        let spec = GroupSpec::infinite_dihedral();
        let err = Character::make(&spec, &[Scalar::from_int(-1), Scalar::q()]).unwrap_err();
        assert!(matches!(err, GroupError::RelationViolated(msg)
            if msg.contains("χ(T)^2 ≠ 1 under inverting involution")));
        let ok = Character::make(&spec, &[Scalar::from_int(-1), Scalar::from_int(-1)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn torsion_character_must_be_root_of_unity() {
        let spec = GroupSpec::cyclic(4);
        assert!(Character::make(&spec, &[Scalar::from_int(-1)]).is_ok());
        assert!(Character::make(&spec, &[Scalar::q()]).is_err());
        let spec3 = GroupSpec::cyclic(3);
        assert!(Character::make(&spec3, &[Scalar::from_int(-1)]).is_err());
        assert!(Character::make(&spec3, &[Scalar::one()]).is_ok());
    }

    #[test]
    fn characters_are_multiplicative_exhaustive_small() {
        let cases: Vec<(GroupSpec, Vec<Scalar>)> = vec![
            (GroupSpec::free(1), vec![Scalar::q()]),
            (GroupSpec::free(2), vec![Scalar::from_int(2), Scalar::from_int(3)]),
            (GroupSpec::cyclic(2), vec![Scalar::from_int(-1)]),
            (GroupSpec::z2_cross_free(1), vec![Scalar::from_int(-1), Scalar::q()]),
            (
                GroupSpec::infinite_dihedral(),
                vec![Scalar::from_int(-1), Scalar::from_int(-1)],
            ),
        ];
        for (spec, values) in cases {
            let chi = Character::make(&spec, &values).unwrap();
            let elems = spec.enumerate(2);
            for a in &elems {
                for b in &elems {
                    let ab = spec.mul(a, b).unwrap();
                    assert_eq!(
                        chi.eval(&ab).unwrap(),
                        &chi.eval(a).unwrap() * &chi.eval(b).unwrap(),
                        "multiplicativity in {}",
                        spec
                    );
                }
            }
        }
    }

    #[test]
    fn eval_at_rational_character() {
        let spec = GroupSpec::free(2);
        let chi = Character::make(&spec, &[Scalar::from_int(2), Scalar::from_int(3)]).unwrap();
        let g = spec.elem(&[2, -1], false).unwrap();
        let v = chi.eval(&g).unwrap();
        assert_eq!(v.eval(&rat(5)).unwrap(), crate::scalar::ratio(4, 3));
    }

    #[test]
    fn elem_parse_display_round_trip() {
        let cases = [
            (GroupSpec::free(1), vec!["1", "T", "T^-4"]),
            (GroupSpec::free(3), vec!["(1,0,2)", "(0,0,0)"]),
            (GroupSpec::cyclic(4), vec!["0", "3"]),
            (GroupSpec::z2_cross_free(1), vec!["e", "e*T^-2", "T^2"]),
            (GroupSpec::infinite_dihedral(), vec!["e", "e*T^3", "T^-1"]),
        ];
        for (spec, texts) in cases {
            for t in texts {
                let g = spec.parse_elem(t).unwrap();
                let shown = spec.fmt_elem(&g);
                assert_eq!(spec.parse_elem(&shown).unwrap(), g, "{} in {}", t, spec);
            }
            // Round trip every enumerated element too.
            for g in spec.enumerate(2) {
                assert_eq!(spec.parse_elem(&spec.fmt_elem(&g)).unwrap(), g);
            }
        }
    }

    #[test]
    fn spec_parse_display() {
        for text in ["Z", "Z^2", "Z/4", "Z2xZ", "Dinf"] {
            let spec: GroupSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("Z/0".parse::<GroupSpec>().is_err());
        assert!("Q".parse::<GroupSpec>().is_err());
    }
}
