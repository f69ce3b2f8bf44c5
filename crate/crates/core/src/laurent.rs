//! Laurent polynomials with complex double-precision coefficients.
//!
//! A [`LaurentPoly`] stores a dense coefficient run starting at `min_exp`.
//! Leading and trailing coefficients whose magnitude does not exceed the zero
//! tolerance are trimmed on construction, so `degree()` and `span()` always
//! refer to significant coefficients. The zero polynomial has an empty run and
//! degree [`Degree::NegInfinity`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Magnitude at or below which a coefficient is treated as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// Allowed deviation of `|z|` from 1 in [`LaurentPoly::eval`].
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;

/// Degree of a polynomial; the zero polynomial sits below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    min_exp: i64,
    coeffs: Vec<Complex64>,
}

impl Default for LaurentPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl LaurentPoly {
    /// Builds `Σ coeffs[k] z^(min_exp + k)`, trimming negligible ends with the
    /// default tolerance.
    pub fn new(min_exp: i64, coeffs: Vec<Complex64>) -> Self {
        Self::with_tol(min_exp, coeffs, DEFAULT_ZERO_TOL)
    }

    pub fn with_tol(min_exp: i64, coeffs: Vec<Complex64>, tol: f64) -> Self {
        let mut p = LaurentPoly { min_exp, coeffs };
        p.trim(tol);
        p
    }

    /// Ordinary polynomial from real coefficients, lowest power first.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(0, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        LaurentPoly {
            min_exp: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::one())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · z^exp`.
    pub fn monomial(c: Complex64, exp: i64) -> Self {
        Self::new(exp, vec![c])
    }

    /// The monomial `z^exp`.
    pub fn z_pow(exp: i64) -> Self {
        Self::monomial(Complex64::one(), exp)
    }

    fn trim(&mut self, tol: f64) {
        let first = self.coeffs.iter().position(|c| c.norm() > tol);
        match first {
            None => {
                self.coeffs.clear();
                self.min_exp = 0;
            }
            Some(first) => {
                let last = self.coeffs.iter().rposition(|c| c.norm() > tol).unwrap();
                self.coeffs.truncate(last + 1);
                self.coeffs.drain(..first);
                self.min_exp += first as i64;
            }
        }
    }

    /// Copy with ends trimmed at `tol` instead of the default tolerance.
    pub fn trimmed(&self, tol: f64) -> Self {
        Self::with_tol(self.min_exp, self.coeffs.clone(), tol)
    }

    /// Lowest exponent with a nonzero coefficient; 0 for the zero polynomial.
    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when there are no negative exponents.
    pub fn is_ordinary(&self) -> bool {
        self.is_zero() || self.min_exp >= 0
    }

    pub fn degree(&self) -> Degree {
        if self.is_zero() {
            Degree::NegInfinity
        } else {
            Degree::Finite(self.min_exp + self.coeffs.len() as i64 - 1)
        }
    }

    /// `degree − min_exp`: the Euclidean size of a Laurent polynomial, since
    /// monomials are exactly the units of the ring.
    pub fn span(&self) -> Degree {
        if self.is_zero() {
            Degree::NegInfinity
        } else {
            Degree::Finite(self.coeffs.len() as i64 - 1)
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Coefficient of `z^exp`.
    pub fn coeff(&self, exp: i64) -> Complex64 {
        let k = exp - self.min_exp;
        if k < 0 || k >= self.coeffs.len() as i64 {
            Complex64::zero()
        } else {
            self.coeffs[k as usize]
        }
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of squared coefficient magnitudes (the `L²(T)` norm squared).
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluates at a point of the unit circle.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > UNIT_CIRCLE_TOL {
            return Err(Error::OffCircle { modulus });
        }
        Ok(self.eval_at(z))
    }

    /// Evaluates at any nonzero point without the unit-circle check.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        if self.min_exp != 0 {
            acc *= z.powi(self.min_exp as i32);
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.min_exp, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `p(z^n)`: coefficient at exponent `e` moves to `n·e`.
    pub fn substitute_power(&self, n: usize) -> Self {
        self.upsample(n, 0)
    }

    /// `z^offset · p(z^n)`.
    pub(crate) fn upsample(&self, n: usize, offset: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let len = (self.coeffs.len() - 1) * n + 1;
        let mut out = vec![Complex64::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k * n] = *c;
        }
        LaurentPoly {
            min_exp: self.min_exp * n as i64 + offset,
            coeffs: out,
        }
    }

    /// Keeps the coefficients at exponents `≡ residue (mod n)` and re-indexes
    /// them by `(e − residue) / n` (floor division for negative exponents).
    pub(crate) fn downsample(&self, n: usize, residue: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = n as i64;
        let r = residue as i64;
        let lo = self.min_exp;
        let hi = lo + self.coeffs.len() as i64 - 1;
        // first exponent ≥ lo congruent to r
        let start = lo + (r - lo).rem_euclid(n);
        if start > hi {
            return Self::zero();
        }
        let coeffs = (start..=hi)
            .step_by(n as usize)
            .map(|e| self.coeffs[(e - lo) as usize])
            .collect();
        Self::new((start - r).div_euclid(n), coeffs)
    }

    /// Para-conjugate `p̃(z) = Σ conj(c_k) z^(−k)`, which equals `conj(p(z))`
    /// on the unit circle.
    pub fn paraconj(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        LaurentPoly {
            min_exp: -(self.min_exp + self.coeffs.len() as i64 - 1),
            coeffs,
        }
    }

    /// Splits `p = z^l · q` with `q` an ordinary polynomial and `q(0) ≠ 0`.
    pub fn normalize_monomial(&self) -> Result<(i64, LaurentPoly)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok((self.min_exp, self.shift(-self.min_exp)))
    }

    /// Euclidean division of ordinary polynomials with the default tolerance.
    pub fn divrem(&self, g: &LaurentPoly) -> Result<(LaurentPoly, LaurentPoly)> {
        self.divrem_tol(g, DEFAULT_ZERO_TOL)
    }

    /// `self = g·q + r` with `deg r < deg g`.
    ///
    /// Each long-division step removes the current leading coefficient
    /// exactly; what is left is trimmed at `tol · max(1, |self|∞)`.
    /// If `deg g > deg self` the quotient is zero and the remainder is `self`.
    pub fn divrem_tol(&self, g: &LaurentPoly, tol: f64) -> Result<(LaurentPoly, LaurentPoly)> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !self.is_ordinary() || !g.is_ordinary() {
            return Err(Error::NotOrdinary);
        }
        if self.is_zero() {
            return Ok((Self::zero(), Self::zero()));
        }
        // dense from exponent 0
        let mut rem: Vec<Complex64> = dense_from_zero(self);
        let div: Vec<Complex64> = dense_from_zero(g);
        let dg = div.len() - 1;
        let lead_inv = div[dg].inv();
        if rem.len() < div.len() {
            return Ok((Self::zero(), self.clone()));
        }
        let qlen = rem.len() - dg;
        let mut quot = vec![Complex64::zero(); qlen];
        for k in (0..qlen).rev() {
            let top = k + dg;
            let c = rem[top] * lead_inv;
            quot[k] = c;
            for (i, d) in div.iter().enumerate().take(dg) {
                rem[k + i] -= c * d;
            }
            rem[top] = Complex64::zero();
        }
        rem.truncate(dg);
        let scale = self.max_abs().max(1.0);
        Ok((
            Self::with_tol(0, quot, tol * scale),
            Self::with_tol(0, rem, tol * scale),
        ))
    }

    /// Largest coefficient-wise difference `|a_e − b_e|` over all exponents.
    pub fn max_coeff_diff(&self, other: &LaurentPoly) -> f64 {
        let lo = self.min_exp.min(other.min_exp);
        let hi = match (self.degree(), other.degree()) {
            (Degree::NegInfinity, Degree::NegInfinity) => return 0.0,
            (a, b) => a.max(b).finite().unwrap(),
        };
        (lo..=hi)
            .map(|e| (self.coeff(e) - other.coeff(e)).norm())
            .fold(0.0, f64::max)
    }

    fn combine(&self, other: &LaurentPoly, sign: f64) -> LaurentPoly {
        if self.is_zero() {
            return other.scale(Complex64::new(sign, 0.0));
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.min_exp.min(other.min_exp);
        let hi = self.degree().max(other.degree()).finite().unwrap();
        let mut out = vec![Complex64::zero(); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[(self.min_exp - lo) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[(other.min_exp - lo) as usize + k] += c * sign;
        }
        LaurentPoly::new(lo, out)
    }

    fn product(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.min_exp + other.min_exp, out)
    }
}

fn dense_from_zero(p: &LaurentPoly) -> Vec<Complex64> {
    let mut v = vec![Complex64::zero(); p.min_exp as usize];
    v.extend_from_slice(&p.coeffs);
    v
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k > 0 {
                write!(f, " + ")?;
            }
            let e = self.min_exp + k as i64;
            let coeff = if c.im == 0.0 {
                alloc::format!("{}", c.re)
            } else {
                alloc::format!("({}{:+}i)", c.re, c.im)
            };
            match e {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}·z")?,
                _ => write!(f, "{coeff}·z^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.product(rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}
