//! The coefficient field: rational functions in one formal parameter `q`.
//!
//! A [`Scalar`] is a quotient `num/den` of Laurent polynomials held in a
//! canonical form, so that `==` decides equality of the represented rational
//! functions. Internally exponents are counted in units of `q^(1/2)` (the
//! field is really `Q(p)` with `q = p^2`); this keeps half-integer powers
//! such as `q^(3/2)` representable with integer bookkeeping. All public
//! constructors and the display grammar speak in terms of `q`.
//!
//! Canonical form of a nonzero scalar:
//! * `den` is an ordinary polynomial (lowest exponent 0) with leading
//!   coefficient 1 and no common factor with the polynomial part of `num`;
//! * the Laurent shift of the fraction lives entirely in `num`;
//! * zero is `0/1`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, kept reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer as a [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for the fraction `n/d` as a [`Rational`].
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Binomial coefficient as a [`Rational`] (zero outside `0 <= k <= n`).
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || k > n || n < 0 {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= Rational::new((n - j).into(), (j + 1).into());
    }
    acc
}

/// `base^exp` for small non-negative integer exponents.
pub fn int_pow(base: i64, exp: u32) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(base).pow(exp))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("evaluation pole")]
    EvaluationPole,
    #[error("negative exponent at q0 = 0")]
    NegativeExponentAtZero,
    #[error("half-integer exponent has no rational value")]
    HalfExponent,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Laurent polynomial with [`Rational`] coefficients.
///
/// Exponents are in internal half-steps: the stored exponent `e` represents
/// `q^(e/2)`. Use [`LaurentPoly::q_pow`] for integer powers of `q` and
/// [`LaurentPoly::half_pow`] for powers of `q^(1/2)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        LaurentPoly { coeffs }
    }

    /// `q^k` (stored as internal exponent `2k`).
    pub fn q_pow(k: i64) -> Self {
        Self::half_pow(2 * k)
    }

    /// `q^(h/2)` (stored as internal exponent `h`).
    pub fn half_pow(h: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(h, Rational::one());
        LaurentPoly { coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut out = LaurentPoly::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exp: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rational)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiply by the monomial with internal exponent `d`.
    pub fn shifted(&self, d: i64) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + d, c.clone())).collect(),
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Dense coefficient vector of the polynomial part, lowest exponent first.
    ///
    /// Only valid when `min_exp == 0`; callers shift first.
    fn to_dense(&self) -> Vec<Rational> {
        let deg = self.max_exp().unwrap_or(0);
        let mut v = vec![Rational::zero(); (deg + 1) as usize];
        for (e, c) in &self.coeffs {
            v[*e as usize] = c.clone();
        }
        v
    }

    fn from_dense(v: &[Rational]) -> Self {
        LaurentPoly::from_terms(v.iter().enumerate().map(|(e, c)| (e as i64, c.clone())))
    }
}

fn dense_trim(v: &mut Vec<Rational>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

/// Remainder of dense polynomial division (both inputs trimmed, divisor nonzero).
fn dense_rem(mut a: Vec<Rational>, b: &[Rational]) -> Vec<Rational> {
    let db = b.len() - 1;
    let lead = &b[db];
    while a.len() > db {
        let da = a.len() - 1;
        let factor = &a[da] / lead;
        if !factor.is_zero() {
            for i in 0..=db {
                let t = &b[i] * &factor;
                a[da - db + i] -= t;
            }
        }
        a.pop();
        dense_trim(&mut a);
        if a.is_empty() {
            break;
        }
    }
    a
}

/// Exact dense division; panics if the division is not exact.
fn dense_div_exact(mut a: Vec<Rational>, b: &[Rational]) -> Vec<Rational> {
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db)];
    while a.len() > db {
        let da = a.len() - 1;
        let factor = &a[da] / lead;
        q[da - db] = factor.clone();
        for i in 0..=db {
            let t = &b[i] * &factor;
            a[da - db + i] -= t;
        }
        a.pop();
        dense_trim(&mut a);
        if a.is_empty() {
            break;
        }
    }
    assert!(a.is_empty(), "inexact polynomial division");
    q
}

/// Monic gcd of two dense polynomials (either may be empty = zero).
fn dense_gcd(mut a: Vec<Rational>, mut b: Vec<Rational>) -> Vec<Rational> {
    dense_trim(&mut a);
    dense_trim(&mut b);
    while !b.is_empty() {
        let r = dense_rem(a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in &mut a {
            *c /= lead.clone();
        }
    }
    a
}

/// Element of the field `Q(q)` (with `q^(1/2)` adjoined), in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(rat(n))
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar { num: LaurentPoly::constant(c), den: LaurentPoly::one() }
    }

    /// The formal parameter `q`.
    pub fn q() -> Self {
        Scalar::q_pow(1)
    }

    /// `q^k`.
    pub fn q_pow(k: i64) -> Self {
        Scalar { num: LaurentPoly::q_pow(k), den: LaurentPoly::one() }
    }

    /// `q^(h/2)` — the half-exponent constructor.
    pub fn q_half_pow(h: i64) -> Self {
        Scalar { num: LaurentPoly::half_pow(h), den: LaurentPoly::one() }
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        Scalar { num: p, den: LaurentPoly::one() }
    }

    /// Canonical representative of `num/den`.
    ///
    /// `normalize(a*c, b*c) == normalize(a, b)` for every nonzero `c`.
    pub fn normalize(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar::zero());
        }
        let a = num.min_exp().unwrap();
        let b = den.min_exp().unwrap();
        let n = num.shifted(-a);
        let d = den.shifted(-b);
        // Fast path: monomial numerator or denominator cannot share a
        // nonconstant factor once shifts are stripped.
        let (mut n, mut d) = if n.num_terms() == 1 || d.num_terms() == 1 {
            (n, d)
        } else {
            let g = dense_gcd(n.to_dense(), d.to_dense());
            if g.len() > 1 {
                (
                    LaurentPoly::from_dense(&dense_div_exact(n.to_dense(), &g)),
                    LaurentPoly::from_dense(&dense_div_exact(d.to_dense(), &g)),
                )
            } else {
                (n, d)
            }
        };
        let lead = d.coeffs.get(&d.max_exp().unwrap()).unwrap().clone();
        if !lead.is_one() {
            let inv = Rational::one() / lead;
            n = n.scaled(&inv);
            d = d.scaled(&inv);
        }
        Ok(Scalar { num: n.shifted(a - b), den: d })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::InverseOfZero);
        }
        Scalar::normalize(self.den.clone(), self.num.clone())
    }

    /// `self^k` for any integer `k` (negative powers via the inverse).
    pub fn pow(&self, k: i64) -> Result<Self, ScalarError> {
        if k == 0 {
            return Ok(Scalar::one());
        }
        if self.is_zero() {
            if k < 0 {
                return Err(ScalarError::InverseOfZero);
            }
            return Ok(Scalar::zero());
        }
        // Monomial fast path: (c q^(e/2))^k computed directly.
        if self.den.is_one() && self.num.num_terms() == 1 {
            let (e, c) = self.num.terms().next().unwrap();
            let mag = c.pow(k.unsigned_abs().min(u32::MAX as u64) as i32);
            let coeff = if k < 0 { Rational::one() / mag } else { mag };
            return Ok(Scalar {
                num: LaurentPoly::half_pow(e * k).scaled(&coeff),
                den: LaurentPoly::one(),
            });
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Exact evaluation at `q = q0`.
    pub fn eval(&self, q0: &Rational) -> Result<Rational, ScalarError> {
        let eval_poly = |p: &LaurentPoly| -> Result<Rational, ScalarError> {
            let mut acc = Rational::zero();
            for (e, c) in p.terms() {
                if e % 2 != 0 {
                    return Err(ScalarError::HalfExponent);
                }
                let k = e / 2;
                if q0.is_zero() {
                    if k < 0 {
                        return Err(ScalarError::NegativeExponentAtZero);
                    }
                    if k == 0 {
                        acc += c.clone();
                    }
                    continue;
                }
                let mut powed = Rational::one();
                for _ in 0..k.unsigned_abs() {
                    powed *= q0.clone();
                }
                if k < 0 {
                    powed = Rational::one() / powed;
                }
                acc += c * powed;
            }
            Ok(acc)
        };
        let d = eval_poly(&self.den)?;
        if d.is_zero() {
            return Err(ScalarError::EvaluationPole);
        }
        Ok(eval_poly(&self.num)? / d)
    }

    /// True when every monomial is an integer power of `q`.
    pub fn is_integral_exponent(&self) -> bool {
        self.num.terms().all(|(e, _)| e % 2 == 0) && self.den.terms().all(|(e, _)| e % 2 == 0)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        // Polynomials (den = 1) stay canonical under plain addition.
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.add(&rhs.num), den: LaurentPoly::one() };
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        Scalar::normalize(num, den).expect("denominators are nonzero")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.mul(&rhs.num), den: LaurentPoly::one() };
        }
        Scalar::normalize(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
            .expect("denominators are nonzero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn fmt_monomial(e: i64) -> String {
    if e == 0 {
        return String::new();
    }
    if e % 2 == 0 {
        let k = e / 2;
        if k == 1 {
            "q".to_string()
        } else {
            format!("q^{}", k)
        }
    } else {
        format!("q^({}/2)", e)
    }
}

fn fmt_poly(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // Exponents in non-increasing order.
    for (i, (e, c)) in p.coeffs.iter().rev().enumerate() {
        let mono = fmt_monomial(*e);
        let mag = c.abs();
        let mut body = if mono.is_empty() {
            format!("{}", mag)
        } else if mag.is_one() {
            mono
        } else {
            format!("{}*{}", mag, mono)
        };
        if i == 0 {
            if c.is_negative() {
                body = format!("-{}", body);
            }
            out.push_str(&body);
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    out
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_poly(self))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", fmt_poly(&self.num));
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", fmt_poly(&self.num))
        } else {
            fmt_poly(&self.num)
        };
        write!(f, "{}/({})", num, fmt_poly(&self.den))
    }
}

// ---------------------------------------------------------------------------
// Parsing: the same grammar the renderer emits, plus ordinary arithmetic.
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' exponent)?
//   atom   := integer | 'q' | '(' expr ')'
//   exponent := ['-'] integer | '(' ['-'] integer ['/' ('1'|'2')] ')'
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, b: u8) -> Result<(), ScalarError> {
        match self.bump() {
            Some(x) if x == b => Ok(()),
            other => Err(ScalarError::Parse(format!(
                "expected '{}', found {:?}",
                b as char,
                other.map(|c| c as char)
            ))),
        }
    }

    fn integer(&mut self) -> Result<i64, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ScalarError::Parse("expected integer".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .map_err(|e| ScalarError::Parse(e.to_string()))
    }

    fn signed_integer(&mut self) -> Result<i64, ScalarError> {
        if self.peek() == Some(b'-') {
            self.bump();
            Ok(-self.integer()?)
        } else {
            self.integer()
        }
    }

    fn exponent(&mut self) -> Result<i64, ScalarError> {
        // Returns the exponent in internal half-steps.
        if self.peek() == Some(b'(') {
            self.bump();
            let n = self.signed_integer()?;
            let half = if self.peek() == Some(b'/') {
                self.bump();
                match self.integer()? {
                    1 => 2,
                    2 => 1,
                    d => {
                        return Err(ScalarError::Parse(format!(
                            "unsupported exponent denominator {}",
                            d
                        )))
                    }
                }
            } else {
                2
            };
            self.expect(b')')?;
            Ok(n * half)
        } else {
            Ok(self.signed_integer()? * 2)
        }
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'q') => {
                self.bump();
                Ok(Scalar::q())
            }
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Scalar::from_int(self.integer()?)),
            other => Err(ScalarError::Parse(format!(
                "unexpected token {:?}",
                other.map(|c| c as char)
            ))),
        }
    }

    fn factor(&mut self) -> Result<Scalar, ScalarError> {
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(-self.factor()?);
        }
        let is_q = self.peek() == Some(b'q');
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            if is_q {
                // Allow half-integer exponents on the bare parameter.
                return Ok(Scalar::q_half_pow(self.exponent()?));
            }
            let e = self.signed_integer()?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Some(b'/') => {
                    self.bump();
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(ScalarError::DivisionByZero);
                    }
                    acc = &acc * &d.inv()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s);
        let out = p.expr()?;
        if p.peek().is_some() {
            return Err(ScalarError::Parse(format!(
                "trailing input at byte {}",
                p.pos
            )));
        }
        Ok(out)
    }
}
