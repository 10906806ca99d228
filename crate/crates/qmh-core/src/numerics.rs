//! High-precision real/complex arithmetic facade.
//!
//! Every other module computes exclusively through this layer: a
//! [`NumericContext`] fixes the working precision and tolerance policy, and
//! [`HPComplex`] is the universal value type (a pair of [`rug::Float`]s,
//! backed by MPFR). Only the transcendentals actually needed are exposed:
//! exp, ln, sqrt and powers, all on the principal branch. Since the only
//! base ever exponentiated is a real q in (0, 1), `q^z = exp(z ln q)` is
//! single-valued and no branch tracking is required.

use rug::float::Round;
use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};

/// Guard bits added on top of the requested precision for all internal
/// arithmetic, so that accumulated roundoff over long series stays far below
/// the eps of the *stated* precision.
const GUARD_BITS: u32 = 64;

/// Working precision plus tolerance policy. Immutable after construction.
///
/// `eps` is the unit roundoff at the stated precision, `2^(1-precision_bits)`.
/// All tolerances in the crate are expressed relative to `eps`, so the whole
/// artifact re-scales when the precision changes.
#[derive(Debug, Clone)]
pub struct NumericContext {
    precision_bits: u32,
    working_bits: u32,
    eps: Float,
    series_tol: Float,
    max_terms: usize,
}

impl NumericContext {
    /// Create a context with the default tolerance policy:
    /// `eps = 2^(1-precision_bits)`, `series_tol = eps * 2^16`,
    /// `max_terms = 4096`.
    ///
    /// Rejects `precision_bits < 64`.
    pub fn new(precision_bits: u32) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::PrecisionTooLow(precision_bits));
        }
        let working_bits = precision_bits + GUARD_BITS;
        let eps = Float::with_val(working_bits, Float::u_exp(1, 1 - precision_bits as i32));
        let series_tol = Float::with_val(working_bits, Float::u_exp(1, 17 - precision_bits as i32));
        Ok(Self {
            precision_bits,
            working_bits,
            eps,
            series_tol,
            max_terms: 4096,
        })
    }

    /// Replace the series-length cap. Values below 64 are rejected.
    ///
    /// The default of 4096 covers every built-in configuration with q <= 0.9;
    /// infinite products at q very close to 1 (e.g. 0.999) need more factors.
    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms < 64 {
            return Err(Error::InvalidContext(format!(
                "max_terms must be >= 64, got {max_terms}"
            )));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    /// Replace the relative series truncation tolerance. Must satisfy
    /// `eps <= series_tol <= 1e-6`.
    pub fn with_series_tol(mut self, series_tol: Float) -> Result<Self> {
        if series_tol < self.eps || series_tol > 1e-6 {
            return Err(Error::InvalidContext(format!(
                "series_tol must lie in [eps, 1e-6], got {series_tol}"
            )));
        }
        self.series_tol = Float::with_val(self.working_bits, series_tol);
        Ok(self)
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Precision actually used for arithmetic (stated precision plus guard
    /// bits).
    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }

    /// Unit roundoff `2^(1-precision_bits)` at the stated precision.
    pub fn eps(&self) -> &Float {
        &self.eps
    }

    pub fn series_tol(&self) -> &Float {
        &self.series_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// `eps * 2^log2_factor`, the usual way tolerances are stated.
    pub fn scaled_eps(&self, log2_factor: i32) -> Float {
        Float::with_val(
            self.working_bits,
            Float::u_exp(1, 1 - self.precision_bits as i32 + log2_factor),
        )
    }

    /// Exact power of two at working precision.
    pub fn two_pow(&self, exponent: i32) -> Float {
        Float::with_val(self.working_bits, Float::u_exp(1, exponent))
    }

    /// A real value at working precision.
    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.working_bits, value)
    }

    /// The exact rational `num/den` rounded once at working precision.
    pub fn float_ratio(&self, num: i64, den: i64) -> Float {
        assert!(den != 0, "float_ratio: zero denominator");
        Float::with_val(self.working_bits, num) / self.float(den)
    }

    /// Parse a decimal (or `p/q` rational) string at working precision.
    pub fn parse_float(&self, s: &str) -> Result<Float> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n = Float::parse(num.trim())
                .map_err(|e| Error::Domain(format!("cannot parse '{num}': {e}")))?;
            let d = Float::parse(den.trim())
                .map_err(|e| Error::Domain(format!("cannot parse '{den}': {e}")))?;
            let d = Float::with_val(self.working_bits, d);
            if d.is_zero() {
                return Err(Error::Domain(format!("zero denominator in '{s}'")));
            }
            return Ok(Float::with_val(self.working_bits, n) / d);
        }
        let v = Float::parse(s).map_err(|e| Error::Domain(format!("cannot parse '{s}': {e}")))?;
        Ok(Float::with_val(self.working_bits, v))
    }
}

/// High-precision complex scalar. Finite by construction; operations that can
/// leave the finite range are exposed as fallible module-level functions.
#[derive(Debug, Clone, PartialEq)]
pub struct HPComplex {
    re: Float,
    im: Float,
}

impl HPComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Float::new(prec),
        }
    }

    pub fn zero(ctx: &NumericContext) -> Self {
        Self {
            re: Float::new(ctx.working_bits()),
            im: Float::new(ctx.working_bits()),
        }
    }

    pub fn one(ctx: &NumericContext) -> Self {
        Self {
            re: ctx.float(1),
            im: Float::new(ctx.working_bits()),
        }
    }

    pub fn i(ctx: &NumericContext) -> Self {
        Self {
            re: Float::new(ctx.working_bits()),
            im: ctx.float(1),
        }
    }

    /// Build from f64 parts (test/geometry convenience; not for values that
    /// must be exact beyond double precision).
    pub fn from_f64(ctx: &NumericContext, re: f64, im: f64) -> Self {
        Self {
            re: ctx.float(re),
            im: ctx.float(im),
        }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn into_parts(self) -> (Float, Float) {
        (self.re, self.im)
    }

    fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    fn prec_with(&self, rhs: &Self) -> u32 {
        self.prec().max(rhs.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True when the imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: (-&self.re).complete(self.re.prec()),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        Self {
            re: (&self.re + &rhs.re).complete(p),
            im: (&self.im + &rhs.im).complete(p),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        Self {
            re: (&self.re - &rhs.re).complete(p),
            im: (&self.im - &rhs.im).complete(p),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        let re = (&self.re * &rhs.re).complete(p) - (&self.im * &rhs.im).complete(p);
        let im = (&self.re * &rhs.im).complete(p) + (&self.im * &rhs.re).complete(p);
        Self { re, im }
    }

    pub fn mul_float(&self, rhs: &Float) -> Self {
        let p = self.prec().max(rhs.prec());
        Self {
            re: (&self.re * rhs).complete(p),
            im: (&self.im * rhs).complete(p),
        }
    }

    /// Complex division. Division by exactly zero yields non-finite parts;
    /// callers guard denominators (the public series operations check their
    /// outputs with [`ensure_finite`]).
    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.prec_with(rhs);
        let d = rhs.abs_sqr();
        let re = ((&self.re * &rhs.re).complete(p) + (&self.im * &rhs.im).complete(p)) / &d;
        let im = ((&self.im * &rhs.re).complete(p) - (&self.re * &rhs.im).complete(p)) / &d;
        Self { re, im }
    }

    pub fn div_float(&self, rhs: &Float) -> Self {
        let p = self.prec().max(rhs.prec());
        Self {
            re: (&self.re / rhs).complete(p),
            im: (&self.im / rhs).complete(p),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.abs_sqr();
        Self {
            re: (&self.re / &d).complete(p),
            im: -(&self.im / &d).complete(p),
        }
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn abs_sqr(&self) -> Float {
        let p = self.prec();
        (&self.re * &self.re).complete(p) + (&self.im * &self.im).complete(p)
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    /// Complex exponential.
    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Self {
            re: (&m * &c).complete(p),
            im: (&m * &s).complete(p),
        }
    }

    /// Principal natural logarithm. Errors at z = 0.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("ln(0) is undefined".into()));
        }
        Ok(Self {
            re: self.abs().ln(),
            im: self.arg(),
        })
    }

    /// Principal square root (branch cut on the negative real axis, values
    /// with nonnegative real part).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return Self {
                re: Float::new(p),
                im: Float::new(p),
            };
        }
        let r = self.abs();
        if self.re.is_sign_positive() || self.re.is_zero() {
            let t = ((&r + &self.re).complete(p) / 2u32).sqrt();
            let im = (&self.im / &t).complete(p) / 2u32;
            Self { re: t, im }
        } else {
            let t = ((&r - &self.re).complete(p) / 2u32).sqrt();
            let re = self.im.clone().abs() / (&t).clone() / 2u32;
            // im == 0 on the cut maps to +i sqrt(|re|)
            let im = if self.im.is_sign_positive() || self.im.is_zero() {
                t
            } else {
                -t
            };
            Self { re, im }
        }
    }

    /// Integer power by binary exponentiation (exact repeated-multiplication
    /// semantics).
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n == 0 {
            let mut one = Float::new(p);
            one += 1u32;
            return Self {
                re: one,
                im: Float::new(p),
            };
        }
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self.clone();
        let mut acc: Option<HPComplex> = None;
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.expect("n > 0")
    }

    /// `|self - other|`.
    pub fn dist(&self, other: &Self) -> Float {
        self.sub(other).abs()
    }
}

impl std::fmt::Display for HPComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_sign_positive() {
            write!(f, "{} + {}i", self.re, self.im)
        } else {
            write!(f, "{} - {}i", self.re, self.im.clone().abs())
        }
    }
}

impl std::ops::Add for &HPComplex {
    type Output = HPComplex;
    fn add(self, rhs: &HPComplex) -> HPComplex {
        HPComplex::add(self, rhs)
    }
}

impl std::ops::Sub for &HPComplex {
    type Output = HPComplex;
    fn sub(self, rhs: &HPComplex) -> HPComplex {
        HPComplex::sub(self, rhs)
    }
}

impl std::ops::Mul for &HPComplex {
    type Output = HPComplex;
    fn mul(self, rhs: &HPComplex) -> HPComplex {
        HPComplex::mul(self, rhs)
    }
}

impl std::ops::Neg for &HPComplex {
    type Output = HPComplex;
    fn neg(self) -> HPComplex {
        HPComplex::neg(self)
    }
}

/// `q^z = exp(z ln q)` for real q in (0, 1); single-valued because the base
/// is a positive real (real logarithm).
pub fn q_pow(q: &Float, z: &HPComplex, ctx: &NumericContext) -> Result<HPComplex> {
    ensure_q_range(q)?;
    real_base_pow(q, z, ctx)
}

/// `base^z = exp(z ln base)` for a positive real base.
pub fn real_base_pow(base: &Float, z: &HPComplex, ctx: &NumericContext) -> Result<HPComplex> {
    if !base.is_finite() || !base.is_sign_positive() || base.is_zero() {
        return Err(Error::Domain(format!(
            "real_base_pow requires a positive base, got {base}"
        )));
    }
    let lnb = HPComplex::from_real(Float::with_val(ctx.working_bits(), base.ln_ref()));
    let out = z.mul(&lnb).exp();
    ensure_finite(out, "real_base_pow")
}

/// `z^alpha = exp(alpha ln z)` on the principal branch. `0^alpha` is 0 for
/// alpha > 0, 1 for alpha = 0, and a domain error for alpha < 0.
pub fn complex_pow_real(z: &HPComplex, alpha: &Float, ctx: &NumericContext) -> Result<HPComplex> {
    if z.is_zero() {
        if alpha.is_zero() {
            return Ok(HPComplex::one(ctx));
        }
        if alpha.is_sign_positive() {
            return Ok(HPComplex::zero(ctx));
        }
        return Err(Error::Domain("0 raised to a negative power".into()));
    }
    let out = z.ln()?.mul_float(alpha).exp();
    ensure_finite(out, "complex_pow_real")
}

/// If `x` lies within `window` of an integer, return that integer.
/// Values beyond the exact-i64 range return `None`.
pub fn nearest_integer_within(x: &Float, window: &Float) -> Option<i64> {
    let rounded = x.clone().round();
    let diff = (x - &rounded).complete(x.prec()).abs();
    if diff < *window && rounded.clone().abs() < 9.0e15 {
        Some(rounded.to_f64() as i64)
    } else {
        None
    }
}

/// Validate 0 < q < 1 strictly.
pub fn ensure_q_range(q: &Float) -> Result<()> {
    if !q.is_finite() || !q.is_sign_positive() || q.is_zero() || *q >= 1u32 {
        return Err(Error::QOutOfRange(q.to_string()));
    }
    Ok(())
}

/// Reject non-finite results at operation boundaries.
pub fn ensure_finite(z: HPComplex, what: &'static str) -> Result<HPComplex> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// True when `a` and `b` agree in their leading `bits` bits:
/// `|a - b| <= 2^-bits * max(|a|, |b|)`, with exact-zero handled separately.
pub fn agrees_to_bits(a: &Float, b: &Float, bits: u32) -> bool {
    let p = a.prec().max(b.prec());
    let diff = (a - b).complete(p).abs();
    let ma = a.clone().abs();
    let mb = b.clone().abs();
    let m = if ma > mb { ma } else { mb };
    if m.is_zero() {
        return diff.is_zero();
    }
    diff <= m * Float::with_val(p, Float::u_exp(1, -(bits as i32)))
}

/// Round a working-precision value to the stated precision (used when
/// printing at the context's nominal accuracy).
pub fn round_to_stated(x: &Float, ctx: &NumericContext) -> Float {
    let mut y = x.clone();
    y.set_prec_round(ctx.precision_bits(), Round::Nearest);
    y
}
