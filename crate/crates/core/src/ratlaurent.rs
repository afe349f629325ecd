//! Exact rationals and Laurent polynomials in `x1, ..., xn`.
//!
//! Every polynomial carries its ambient dimension `n`. Exponents of
//! `x1..x(n-1)` are non-negative; only the boundary coordinate `xn` may carry
//! negative powers. With that restriction the sparse term map is a canonical
//! normal form, so equality of polynomials is plain map equality and
//! "is this identity exactly zero" is decidable.
//!
//! Coordinate indices in this API are zero-based (`0..n`); the text form uses
//! the one-based names `x1..xn`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatLaurentError {
    #[error("point lies on the boundary: last coordinate is zero")]
    BoundaryPoint,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative exponent {exponent} on x{var}; only the last coordinate may be inverted")]
    NegativeExponent { var: usize, exponent: i32 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `num/den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses the strict rational grammar `-?[0-9]+(/[1-9][0-9]*)?`.
pub fn parse_rational(s: &str) -> Result<Rational, RatLaurentError> {
    let err = |pos: usize, msg: &str| RatLaurentError::Parse {
        pos,
        msg: msg.to_string(),
    };
    let bytes = s.as_bytes();
    let mut pos = 0;
    let negative = bytes.first() == Some(&b'-');
    if negative {
        pos += 1;
    }
    let num_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == num_start {
        return Err(err(pos, "expected digits"));
    }
    let mut numer: BigInt = s[num_start..pos].parse().map_err(|_| err(num_start, "bad integer"))?;
    if negative {
        numer = -numer;
    }
    let mut denom = BigInt::one();
    if pos < bytes.len() {
        if bytes[pos] != b'/' {
            return Err(err(pos, "expected '/' or end of input"));
        }
        pos += 1;
        let den_start = pos;
        if pos >= bytes.len() || !(b'1'..=b'9').contains(&bytes[pos]) {
            return Err(err(pos, "denominator must start with a non-zero digit"));
        }
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos != bytes.len() {
            return Err(err(pos, "trailing characters after denominator"));
        }
        denom = s[den_start..pos].parse().map_err(|_| err(den_start, "bad integer"))?;
    }
    Ok(Rational::new(numer, denom))
}

/// Exponent vector of a single term.
///
/// Ordered graded-lexicographically: first by total degree, then by the
/// exponent sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<i32>,
}

impl Monomial {
    pub fn new(exps: Vec<i32>) -> Result<Self, RatLaurentError> {
        let n = exps.len();
        for (var, &e) in exps.iter().enumerate() {
            if e < 0 && var + 1 != n {
                return Err(RatLaurentError::NegativeExponent {
                    var: var + 1,
                    exponent: e,
                });
            }
        }
        Ok(Self { exps })
    }

    pub fn one(nvars: usize) -> Self {
        Self {
            exps: vec![0; nvars],
        }
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Self { exps }
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> i64 {
        self.exps.iter().map(|&e| e as i64).sum()
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse Laurent polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_(var+1)`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index {var} out of range for n={nvars}");
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, var), Rational::one());
        p
    }

    /// `xn^e` for any integer `e`.
    pub fn boundary_power(nvars: usize, e: i32) -> Self {
        let mut exps = vec![0; nvars];
        exps[nvars - 1] = e;
        Self::monomial(Rational::one(), Monomial { exps })
    }

    pub fn monomial(coeff: Rational, mono: Monomial) -> Self {
        let mut p = Self::zero(mono.nvars());
        p.add_term(mono, coeff);
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self, RatLaurentError> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(RatLaurentError::DimensionMismatch {
                    expected: nvars,
                    got: m.nvars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.exps.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(
            self.nvars, other.nvars,
            "Laurent polynomials over different dimensions"
        );
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the zero-based coordinate `var`.
    pub fn deriv(&self, var: usize) -> Self {
        assert!(var < self.nvars, "variable index {var} out of range");
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[var] -= 1;
            out.add_term(Monomial { exps }, c * rat(e as i64));
        }
        out
    }

    /// Exact substitution. The last coordinate must be non-zero.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, RatLaurentError> {
        if point.len() != self.nvars {
            return Err(RatLaurentError::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        if point.last().is_none_or(Zero::is_zero) {
            return Err(RatLaurentError::BoundaryPoint);
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&m.exps) {
                if e != 0 {
                    term *= x.pow(e);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Floating-point evaluation; no boundary check.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exps
                    .iter()
                    .zip(point)
                    .fold(rational_to_f64(c), |acc, (&e, &x)| acc * x.powi(e))
            })
            .sum()
    }

    /// Multiplicative inverse of a single-term polynomial `c * xn^e`.
    pub fn inverse_boundary_monomial(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        let n = self.nvars;
        if m.exps[..n - 1].iter().any(|&e| e != 0) {
            return None;
        }
        let mut exps = vec![0; n];
        exps[n - 1] = -m.exps[n - 1];
        Some(Self::monomial(c.recip(), Monomial { exps }))
    }

    /// Lowest exponent of `xn` over all terms, or `None` for zero.
    pub fn min_boundary_exponent(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.exps[self.nvars - 1]).min()
    }

    /// Parses the canonical text form produced by `Display`.
    pub fn parse(s: &str, nvars: usize) -> Result<Self, RatLaurentError> {
        Parser::new(s, nvars).parse()
    }
}


pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Shift both parts down so the quotient fits in f64.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        self.check_dim(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        self.check_dim(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.check_dim(rhs);
        let mut out = LaurentPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

fn fmt_monomial(m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if e != 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text: terms in descending graded-lex order, e.g.
/// `1/2*x1^2 - 1/2*x2^2 + x1*x3^-2`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let is_const = m.exps.iter().all(|&e| e == 0);
            if is_const {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                fmt_monomial(m, f)?;
            } else {
                write!(f, "{abs}*")?;
                fmt_monomial(m, f)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, nvars: usize) -> Self {
        Self { src, pos: 0, nvars }
    }

    fn err(&self, msg: &str) -> RatLaurentError {
        RatLaurentError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek() == Some(b' ') {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> Result<&'a str, RatLaurentError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn parse(mut self) -> Result<LaurentPoly, RatLaurentError> {
        if self.nvars == 0 {
            return Err(self.err("dimension must be at least 1"));
        }
        let mut out = LaurentPoly::zero(self.nvars);
        self.skip_ws();
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.pos += 1;
        }
        loop {
            self.skip_ws();
            let (mono, mut coeff) = self.term()?;
            if negative {
                coeff = -coeff;
            }
            out.add_term(mono, coeff);
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(_) => return Err(self.err("expected '+', '-' or end of input")),
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Rational), RatLaurentError> {
        let mut coeff = Rational::one();
        let mut exps = vec![0i32; self.nvars];
        let mut expect_factor = true;
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let start = self.pos;
            self.digits()?;
            if self.peek() == Some(b'/') {
                self.pos += 1;
                self.digits()?;
            }
            coeff = parse_rational(&self.src[start..self.pos]).map_err(|e| match e {
                RatLaurentError::Parse { pos, msg } => RatLaurentError::Parse {
                    pos: start + pos,
                    msg,
                },
                other => other,
            })?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                expect_factor = false;
            }
        }
        while expect_factor {
            if self.peek() != Some(b'x') {
                return Err(self.err("expected variable 'x<i>'"));
            }
            self.pos += 1;
            let idx: usize = self
                .digits()?
                .parse()
                .map_err(|_| self.err("variable index too large"))?;
            if idx == 0 || idx > self.nvars {
                return Err(self.err("variable index out of range"));
            }
            let mut e: i32 = 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let neg = self.peek() == Some(b'-');
                if neg {
                    self.pos += 1;
                }
                e = self
                    .digits()?
                    .parse()
                    .map_err(|_| self.err("exponent too large"))?;
                if neg {
                    e = -e;
                }
            }
            exps[idx - 1] = exps[idx - 1]
                .checked_add(e)
                .ok_or_else(|| self.err("exponent overflow"))?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                expect_factor = false;
            }
        }
        let mono = Monomial::new(exps).map_err(|_| self.err("negative exponent on non-boundary variable"))?;
        Ok((mono, coeff))
    }
}

impl FromStr for LaurentPoly {
    type Err = RatLaurentError;

    /// Parses with the dimension inferred from the largest variable index.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut max_idx = 1usize;
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'x' {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if let Ok(v) = s[start..j].parse::<usize>() {
                    max_idx = max_idx.max(v);
                }
                i = j;
            } else {
                i += 1;
            }
        }
        if max_idx > 64 {
            return Err(RatLaurentError::Parse {
                pos: 0,
                msg: "too many variables".into(),
            });
        }
        Self::parse(s, max_idx)
    }
}
