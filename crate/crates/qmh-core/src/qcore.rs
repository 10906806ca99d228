//! q-numbers, q-Pochhammer symbols, the q-Gamma function, and the normalized
//! Pochhammer ratios whose limits and bounds drive the Mehler-Heine analysis.
//!
//! Throughout, the base satisfies 0 < q < 1 strictly ([`QBase`] enforces it).

use rug::ops::CompleteRound;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{
    ensure_finite, ensure_q_range, nearest_integer_within, q_pow, real_base_pow, HPComplex,
    NumericContext,
};

/// The global base q, validated to lie strictly inside (0, 1).
#[derive(Debug, Clone)]
pub struct QBase {
    q: Float,
}

impl QBase {
    pub fn new(q: Float) -> Result<Self> {
        ensure_q_range(&q)?;
        Ok(Self { q })
    }

    /// Exact rational base `num/den`, rounded once at working precision.
    pub fn from_ratio(num: i64, den: i64, ctx: &NumericContext) -> Result<Self> {
        Self::new(ctx.float_ratio(num, den))
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    /// `1 - q` at the precision of the base.
    pub fn one_minus_q(&self) -> Float {
        (1u32 - &self.q).complete(self.q.prec())
    }

    /// `q^e` for real e.
    pub fn pow_real(&self, e: &Float) -> Float {
        use rug::ops::Pow;
        self.q.clone().pow(e)
    }

    /// `q^z` for complex z.
    pub fn pow_complex(&self, z: &HPComplex, ctx: &NumericContext) -> Result<HPComplex> {
        q_pow(&self.q, z, ctx)
    }
}

/// The q-number `[z]_q = (1 - q^z)/(1 - q)`.
pub fn q_number(z: &HPComplex, q: &QBase, ctx: &NumericContext) -> Result<HPComplex> {
    let qz = q.pow_complex(z, ctx)?;
    let one = HPComplex::one(ctx);
    ensure_finite(one.sub(&qz).div_float(&q.one_minus_q()), "q_number")
}

/// `[z]_q` for real z (the common case in scale factors).
pub fn q_number_real(z: &Float, q: &QBase) -> Float {
    (1u32 - q.pow_real(z)) / q.one_minus_q()
}

/// Finite q-Pochhammer symbol `(a; q)_k = prod_{j=0}^{k-1} (1 - a q^j)`,
/// with the empty product `(a; q)_0 = 1`.
pub fn q_pochhammer(a: &HPComplex, q: &QBase, k: usize, ctx: &NumericContext) -> HPComplex {
    let mut prod = HPComplex::one(ctx);
    let mut w = a.clone();
    let one = HPComplex::one(ctx);
    for _ in 0..k {
        prod = prod.mul(&one.sub(&w));
        w = w.mul_float(q.q());
    }
    prod
}

/// Infinite q-Pochhammer symbol `(a; q)_inf`.
///
/// The product is truncated once `|a q^k| < eps * 2^-8`; the dropped tail is
/// certified through `|log prod_{j>=k} (1 - a q^j)| <= 2 |a| q^k / (1 - q)`
/// (valid once `|a q^k| < 1/2`), which keeps the relative error below
/// `ctx.series_tol`. Exceeding `ctx.max_terms` reports the bound achieved.
pub fn q_pochhammer_inf(a: &HPComplex, q: &QBase, ctx: &NumericContext) -> Result<HPComplex> {
    let cutoff = ctx.scaled_eps(-8);
    let one = HPComplex::one(ctx);
    let mut prod = HPComplex::one(ctx);
    let mut w = a.clone();
    for _ in 0..ctx.max_terms() {
        if w.abs() < cutoff {
            return ensure_finite(prod, "q_pochhammer_inf");
        }
        prod = prod.mul(&one.sub(&w));
        w = w.mul_float(q.q());
    }
    let bound = ctx.float(2) * w.abs() / q.one_minus_q();
    Err(Error::TruncationFailure {
        terms: ctx.max_terms(),
        bound: format!("{:e}", bound.to_f64()),
    })
}

/// Value of the q-Gamma function, or a pole marker.
#[derive(Debug, Clone)]
pub enum QGammaValue {
    Regular(HPComplex),
    /// The argument hits the pole set `z = -n + 2 pi i k / ln q`.
    Pole,
}

impl QGammaValue {
    pub fn is_pole(&self) -> bool {
        matches!(self, QGammaValue::Pole)
    }

    pub fn value(&self) -> Option<&HPComplex> {
        match self {
            QGammaValue::Regular(v) => Some(v),
            QGammaValue::Pole => None,
        }
    }
}

/// q-Gamma: `Gamma_q(z) = (q; q)_inf / (q^z; q)_inf * (1 - q)^(1-z)`,
/// reporting poles instead of evaluating them.
///
/// Pole detection: `(q^z; q)_inf` vanishes exactly when `q^z q^m = 1` for
/// some m >= 0; we flag `|q^z q^m - 1| < eps * 2^16`, which separates true
/// poles from near-pole arguments where the quotient is still meaningful.
pub fn q_gamma_value(z: &HPComplex, q: &QBase, ctx: &NumericContext) -> Result<QGammaValue> {
    let qz = q.pow_complex(z, ctx)?;
    let pole_window = ctx.scaled_eps(16);
    let cutoff = ctx.scaled_eps(-8);
    let one = HPComplex::one(ctx);

    // walk q^z q^m while the factors can still be near 1
    let mut w = qz.clone();
    let mut m = 0usize;
    while w.abs() >= cutoff && m <= ctx.max_terms() {
        if one.sub(&w).abs() < pole_window {
            return Ok(QGammaValue::Pole);
        }
        w = w.mul_float(q.q());
        m += 1;
    }

    let num = q_pochhammer_inf(&HPComplex::from_real(q.q().clone()), q, ctx)?;
    let den = q_pochhammer_inf(&qz, q, ctx)?;
    let one_minus_z = one.sub(z);
    let pow = real_base_pow(&q.one_minus_q(), &one_minus_z, ctx)?;
    let value = ensure_finite(num.div(&den).mul(&pow), "q_gamma")?;
    Ok(QGammaValue::Regular(value))
}

/// q-Gamma as a plain value; arguments on the pole set are an error.
pub fn q_gamma(z: &HPComplex, q: &QBase, ctx: &NumericContext) -> Result<HPComplex> {
    match q_gamma_value(z, q, ctx)? {
        QGammaValue::Regular(v) => Ok(v),
        QGammaValue::Pole => Err(Error::QGammaPole(z.to_string())),
    }
}

/// The Gamma quotient `Gamma_q(z+k)/Gamma_q(z) = (q^z; q)_k / (1-q)^k`,
/// computed factor by factor as `prod_{j=0}^{k-1} [z+j]_q` so that neither
/// Gamma value is ever formed.
pub fn q_gamma_ratio(
    z: &HPComplex,
    k: usize,
    q: &QBase,
    ctx: &NumericContext,
) -> Result<HPComplex> {
    let mut prod = HPComplex::one(ctx);
    let one = HPComplex::one(ctx);
    let one_minus_q = q.one_minus_q();
    let mut w = q.pow_complex(z, ctx)?;
    for _ in 0..k {
        prod = prod.mul(&one.sub(&w).div_float(&one_minus_q));
        w = w.mul_float(q.q());
    }
    ensure_finite(prod, "q_gamma_ratio")
}

/// The normalized ratio `(q^-n; q)_k / ([n]_q^k q^(-nk))` for 0 <= k <= n.
///
/// Multiplied out factor by factor as `(q^n - q^j) / [n]_q`, so every partial
/// product stays O(1) instead of passing through `q^(-nk)`; the final
/// magnitude is bounded by `q^binom(k,2)`.
pub fn normalized_qminus_ratio(
    n: u32,
    k: u32,
    q: &QBase,
    ctx: &NumericContext,
) -> Result<HPComplex> {
    if k > n {
        return Err(Error::Domain(format!(
            "normalized_qminus_ratio requires k <= n, got k = {k}, n = {n}"
        )));
    }
    let qn_number = q_number_real(&ctx.float(n), q);
    let qn = q.pow_real(&ctx.float(n));
    let mut prod = ctx.float(1);
    let mut qj = ctx.float(1);
    for _ in 0..k {
        prod *= (&qn - &qj).complete(ctx.working_bits()) / &qn_number;
        qj *= q.q();
    }
    ensure_finite(HPComplex::from_real(prod), "normalized_qminus_ratio")
}

/// The normalized shifted ratio `(q^(an+b); q)_k / ((1-q)^k [n]_{q^a}^k)`
/// for a > 0 and complex b, under the hypothesis `an + Re(b)` not in
/// {0, -1, -2, ...}.
pub fn normalized_shifted_ratio(
    a: &Float,
    b: &HPComplex,
    n: u32,
    k: u32,
    q: &QBase,
    ctx: &NumericContext,
) -> Result<HPComplex> {
    if !a.is_sign_positive() || a.is_zero() {
        return Err(Error::HypothesisViolation(format!(
            "exponent slope a must be positive, got {a}"
        )));
    }
    if k > n {
        return Err(Error::Domain(format!(
            "normalized_shifted_ratio requires k <= n, got k = {k}, n = {n}"
        )));
    }
    let an_plus_re_b = (a * &ctx.float(n)).complete(ctx.working_bits()) + b.re();
    check_not_nonpositive_integer(&an_plus_re_b, "a*n + Re(b)", ctx)?;

    let qa = QBase::new(q.pow_real(a))?;
    let denom_factor = q.one_minus_q() * q_number_real(&ctx.float(n), &qa);
    let exponent = HPComplex::from_real((a * &ctx.float(n)).complete(ctx.working_bits())).add(b);
    let mut w = q.pow_complex(&exponent, ctx)?;
    let one = HPComplex::one(ctx);
    let mut prod = HPComplex::one(ctx);
    for _ in 0..k {
        prod = prod.mul(&one.sub(&w).div_float(&denom_factor));
        w = w.mul_float(q.q());
    }
    ensure_finite(prod, "normalized_shifted_ratio")
}

/// Error if `x` sits within the exactness window `eps * 2^16` of a
/// nonpositive integer.
pub(crate) fn check_not_nonpositive_integer(
    x: &Float,
    what: &str,
    ctx: &NumericContext,
) -> Result<()> {
    let window = ctx.scaled_eps(16);
    if let Some(m) = nearest_integer_within(x, &window) {
        if m <= 0 {
            return Err(Error::HypothesisViolation(format!(
                "{what} = {m} lies in {{0, -1, -2, ...}}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::agrees_to_bits;

    fn ctx() -> NumericContext {
        NumericContext::new(256).unwrap()
    }

    fn half(ctx: &NumericContext) -> QBase {
        QBase::from_ratio(1, 2, ctx).unwrap()
    }

    #[test]
    fn qbase_rejects_out_of_range() {
        let c = ctx();
        assert!(QBase::new(c.float(0)).is_err());
        assert!(QBase::new(c.float(1)).is_err());
        assert!(QBase::new(c.float(-0.3)).is_err());
        assert!(QBase::new(c.float(1.5)).is_err());
        assert!(QBase::new(c.float(0.5)).is_ok());
    }

    #[test]
    fn q_number_known_values() {
        let c = ctx();
        let q = half(&c);
        // [3]_{1/2} = (1 - 1/8)/(1/2) = 1.75
        let v = q_number(&HPComplex::from_real(c.float(3)), &q, &c).unwrap();
        assert_eq!(v.re(), &c.float_ratio(7, 4));
        assert!(v.im().is_zero());
        // [1]_q = 1 for any q
        for (num, den) in [(1, 10), (1, 2), (9, 10)] {
            let qq = QBase::from_ratio(num, den, &c).unwrap();
            let one = q_number(&HPComplex::one(&c), &qq, &c).unwrap();
            assert!(one.dist(&HPComplex::one(&c)) < c.scaled_eps(4));
        }
    }

    #[test]
    fn q_number_complex_matches_oracle() {
        // (1 - q^{2-3i})/(1-q) against a 50-digit mpmath evaluation
        let c = ctx();
        let q = half(&c);
        let z = HPComplex::new(c.float(2), c.float(-3));
        let got = q_number(&z, &q, &c).unwrap();
        let want = HPComplex::new(
            c.parse_float("2.243497208982890699052404960303710660657150961747816")
                .unwrap(),
            c.parse_float("-0.4367025408874357042548069877169030135791315824511055")
                .unwrap(),
        );
        assert!(got.dist(&want) < c.float(1e-50));
    }

    #[test]
    fn pochhammer_finite_values() {
        let c = ctx();
        let q = half(&c);
        // empty product
        let z = HPComplex::new(c.float(4), c.float(9));
        assert_eq!(q_pochhammer(&z, &q, 0, &c), HPComplex::one(&c));
        // (1/2; 1/2)_2 = (1 - 1/2)(1 - 1/4) = 0.375
        let v = q_pochhammer(&HPComplex::from_real(c.float_ratio(1, 2)), &q, 2, &c);
        assert_eq!(v.re(), &c.float_ratio(3, 8));
        // (2; 1/2)_3 contains the factor (1 - 2/2) = 0
        let v = q_pochhammer(&HPComplex::from_real(c.float(2)), &q, 3, &c);
        assert!(v.is_zero());
    }

    #[test]
    fn pochhammer_infinite_matches_oracle() {
        let c = ctx();
        let q = half(&c);
        // all factors 1
        let v = q_pochhammer_inf(&HPComplex::zero(&c), &q, &c).unwrap();
        assert_eq!(v, HPComplex::one(&c));
        // (1/2; 1/2)_inf against a 500-factor 60-digit product
        let v = q_pochhammer_inf(&HPComplex::from_real(c.float_ratio(1, 2)), &q, &c).unwrap();
        let want = c
            .parse_float("0.2887880950866024212788997219292307800889119048406858")
            .unwrap();
        assert!((v.re() - &want).complete(c.working_bits()).abs() < c.float(1e-50));
        // against the finite product at the truncation depth
        let finite = q_pochhammer(&HPComplex::from_real(c.float_ratio(1, 2)), &q, 400, &c);
        assert!(v.dist(&finite) < c.scaled_eps(8));
    }

    #[test]
    fn pochhammer_infinite_index_shift() {
        // (a; q)_inf = (1 - a)(aq; q)_inf
        let c = ctx();
        let q = half(&c);
        for a in [c.float_ratio(1, 2), c.float_ratio(1, 4)] {
            let a = HPComplex::from_real(a);
            let lhs = q_pochhammer_inf(&a, &q, &c).unwrap();
            let shifted = q_pochhammer_inf(&a.mul_float(q.q()), &q, &c).unwrap();
            let rhs = HPComplex::one(&c).sub(&a).mul(&shifted);
            assert!(lhs.dist(&rhs) < c.scaled_eps(8));
        }
    }

    #[test]
    fn pochhammer_infinite_respects_max_terms() {
        let c = NumericContext::new(256).unwrap().with_max_terms(64).unwrap();
        let q = QBase::from_ratio(999, 1000, &c).unwrap();
        let r = q_pochhammer_inf(&HPComplex::from_real(c.float_ratio(1, 2)), &q, &c);
        assert!(matches!(r, Err(Error::TruncationFailure { .. })));
    }

    #[test]
    fn q_gamma_known_values() {
        let c = ctx();
        let q = half(&c);
        // Gamma_q(1) = 1
        let v = q_gamma(&HPComplex::one(&c), &q, &c).unwrap();
        assert!(v.dist(&HPComplex::one(&c)) < c.scaled_eps(8));
        // Gamma_q(3) = [2]_q [1]_q = 1 + q = 1.5
        let v = q_gamma(&HPComplex::from_real(c.float(3)), &q, &c).unwrap();
        assert!(v.dist(&HPComplex::from_real(c.float_ratio(3, 2))) < c.scaled_eps(8));
    }

    #[test]
    fn q_gamma_pole_detection() {
        let c = ctx();
        let q = half(&c);
        for z in [0i32, -1, -2, -7] {
            let r = q_gamma(&HPComplex::from_real(c.float(z)), &q, &c);
            assert!(matches!(r, Err(Error::QGammaPole(_))), "z = {z}");
            let v = q_gamma_value(&HPComplex::from_real(c.float(z)), &q, &c).unwrap();
            assert!(v.is_pole());
        }
        // the complex pole -1 + 2 pi i / ln q
        let two_pi = c.float(rug::float::Constant::Pi) * 2u32;
        let im = two_pi / c.float_ratio(1, 2).ln();
        let z = HPComplex::new(c.float(-1), im);
        assert!(q_gamma_value(&z, &q, &c).unwrap().is_pole());
    }

    #[test]
    fn q_gamma_ratio_values() {
        let c = ctx();
        let q = half(&c);
        // (q; q)_2/(1-q)^2 = Gamma_q(3)/Gamma_q(1) = 1.5
        let v = q_gamma_ratio(&HPComplex::one(&c), 2, &q, &c).unwrap();
        assert!(v.dist(&HPComplex::from_real(c.float_ratio(3, 2))) < c.scaled_eps(8));
        // empty product
        let z = HPComplex::new(c.float(-3), c.float(11));
        assert_eq!(q_gamma_ratio(&z, 0, &q, &c).unwrap(), HPComplex::one(&c));
        // dual route: Gamma-quotient evaluation of the same quantity
        let z = HPComplex::new(c.float(2), c.float(-3));
        let via_ratio = q_gamma_ratio(&z, 3, &q, &c).unwrap();
        let zp3 = z.add(&HPComplex::from_real(c.float(3)));
        let via_gamma = q_gamma(&zp3, &q, &c)
            .unwrap()
            .div(&q_gamma(&z, &q, &c).unwrap());
        let rel = via_ratio.dist(&via_gamma) / via_gamma.abs();
        assert!(rel <= c.scaled_eps(4), "rel = {rel}");
    }

    #[test]
    fn qminus_ratio_values() {
        let c = ctx();
        let q = half(&c);
        // k = 0: empty product, the Lemma-5 equality case
        assert_eq!(
            normalized_qminus_ratio(5, 0, &q, &c).unwrap(),
            HPComplex::one(&c)
        );
        // n = k = 1: single factor (1 - q^{-1}) q / [1]_q = -1/2
        let v = normalized_qminus_ratio(1, 1, &q, &c).unwrap();
        assert!(v.dist(&HPComplex::from_real(c.float_ratio(-1, 2))) < c.scaled_eps(8));
        // limit value at n = 200, k = 7: (-1)^7 q^21 (1-q)^7 = -2^-28
        let v = normalized_qminus_ratio(200, 7, &q, &c).unwrap();
        let lim = HPComplex::from_real(-c.two_pow(-28));
        assert!(v.dist(&lim) < c.float(1e-40));
        // domain check
        assert!(normalized_qminus_ratio(3, 4, &q, &c).is_err());
    }

    #[test]
    fn shifted_ratio_values() {
        let c = ctx();
        let q = half(&c);
        let b6 = HPComplex::from_real(c.float(6));
        // empty product
        assert_eq!(
            normalized_shifted_ratio(&c.float(3), &b6, 4, 0, &q, &c).unwrap(),
            HPComplex::one(&c)
        );
        // single factor (1 - q^9)/((1-q)[1]_{q^3}) = (511/512)/(1/2) = 511/256
        let v = normalized_shifted_ratio(&c.float(3), &b6, 1, 1, &q, &c).unwrap();
        assert!(v.dist(&HPComplex::from_real(c.float_ratio(511, 256))) < c.scaled_eps(8));
        // limit value [3]_q^5 = (7/4)^5 at n = 150
        let v = normalized_shifted_ratio(&c.float(3), &b6, 150, 5, &q, &c).unwrap();
        let lim = HPComplex::from_real(c.parse_float("16.4130859375").unwrap());
        assert!(v.dist(&lim) < c.float(1e-40));
    }

    #[test]
    fn shifted_ratio_hypothesis_violation() {
        let c = ctx();
        let q = half(&c);
        // a*n + Re(b) = 2 - 2 = 0 is in the excluded set
        let b = HPComplex::from_real(c.float(-2));
        let r = normalized_shifted_ratio(&c.float(1), &b, 2, 1, &q, &c);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
        // a <= 0 rejected
        let r = normalized_shifted_ratio(&c.float(0), &b, 2, 1, &q, &c);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn gamma_recurrence_spot() {
        // Gamma_q(z+1) = [z]_q Gamma_q(z)
        let c = ctx();
        let q = half(&c);
        let z = HPComplex::new(c.float_ratio(7, 3), c.float_ratio(-5, 4));
        let zp1 = z.add(&HPComplex::one(&c));
        let lhs = q_gamma(&zp1, &q, &c).unwrap();
        let rhs = q_number(&z, &q, &c).unwrap().mul(&q_gamma(&z, &q, &c).unwrap());
        let rel = lhs.dist(&rhs) / lhs.abs();
        assert!(rel <= c.scaled_eps(4));
    }

    #[test]
    fn gamma_half_approaches_sqrt_pi() {
        // |Gamma_q(1/2) - sqrt(pi)| decreases along q -> 1^-
        let c = NumericContext::new(128)
            .unwrap()
            .with_max_terms(400_000)
            .unwrap();
        let sqrt_pi = c
            .parse_float("1.77245385090551602729816748334114518279754945612238712821381")
            .unwrap();
        let mut last: Option<Float> = None;
        for (num, den) in [(9, 10), (99, 100), (999, 1000)] {
            let q = QBase::from_ratio(num, den, &c).unwrap();
            let g = q_gamma(&HPComplex::from_real(c.float_ratio(1, 2)), &q, &c).unwrap();
            let diff = (g.re() - &sqrt_pi).complete(c.working_bits()).abs();
            if let Some(prev) = &last {
                assert!(diff < *prev, "trend broken at q = {num}/{den}");
            }
            last = Some(diff);
        }
    }

    #[test]
    fn agrees_helper_sanity() {
        let c = ctx();
        assert!(agrees_to_bits(&c.float(1), &c.float(1), 200));
        assert!(!agrees_to_bits(&c.float(1), &c.float(1.1), 10));
    }
}
