//! The modified Weibull lifetime family used for each cause of failure.
//!
//! For a cause with parameters `(lambda, alpha, beta)` write `z = (t/alpha)^beta`.
//! Then
//!
//! ```text
//! S(t) = exp{ lambda * alpha * (1 - e^z) }
//! F(t) = 1 - S(t)
//! f(t) = lambda * beta * (t/alpha)^(beta-1) * e^z * S(t)
//! ```
//!
//! `f` is the exact derivative of `F`: the chain rule brings down
//! `(beta/alpha) (t/alpha)^(beta-1)`, whose `1/alpha` cancels the `alpha` in
//! the exponent's prefactor.
//!
//! The two causes share `alpha` and `beta`, so survival functions multiply by
//! adding rates: `S(t; l1) * S(t; l2) = S(t; l1 + l2)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `e^z` overflows past this; survival is reported as exactly zero.
pub const EXP_CLAMP: f64 = 700.0;

/// One of the four model parameters, in Gibbs update order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    Lambda1,
    Lambda2,
    Alpha,
    Beta,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Lambda1, Param::Lambda2, Param::Alpha, Param::Beta];

    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda1 => "lambda1",
            Param::Lambda2 => "lambda2",
            Param::Alpha => "alpha",
            Param::Beta => "beta",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cause of an observed failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cause {
    One,
    Two,
}

impl Cause {
    pub fn label(self) -> u8 {
        match self {
            Cause::One => 1,
            Cause::Two => 2,
        }
    }

    pub fn from_label(label: u8) -> Option<Cause> {
        match label {
            1 => Some(Cause::One),
            2 => Some(Cause::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Cause {
        match self {
            Cause::One => Cause::Two,
            Cause::Two => Cause::One,
        }
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// Parameters of a single cause-specific lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskParams {
    lambda: f64,
    alpha: f64,
    beta: f64,
}

impl RiskParams {
    pub fn new(lambda: f64, alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_positive("lambda", lambda)?,
            alpha: check_positive("alpha", alpha)?,
            beta: check_positive("beta", beta)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `lambda * alpha * (1 - e^z)`, i.e. `ln S(t)`, with `-inf` once `z`
    /// passes [`EXP_CLAMP`].
    fn log_survival_unchecked(&self, t: f64) -> f64 {
        let z = (t / self.alpha).powf(self.beta);
        if z > EXP_CLAMP {
            return f64::NEG_INFINITY;
        }
        -self.lambda * self.alpha * z.exp_m1()
    }

    pub fn log_survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.log_survival_unchecked(t))
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        Ok(self.log_survival(t)?.exp())
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        Ok(-self.log_survival(t)?.exp_m1())
    }

    /// Log density; `t` must be strictly positive.
    pub fn log_pdf(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                domain: "(0, inf)",
            });
        }
        let log_ratio = (t / self.alpha).ln();
        let z = (self.beta * log_ratio).exp();
        if z > EXP_CLAMP {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(
            self.lambda.ln() + self.beta.ln() + (self.beta - 1.0) * log_ratio + z
                - self.lambda * self.alpha * z.exp_m1(),
        )
    }

    /// Density. As `t -> 0+` it tends to 0 for `beta > 1`, to `lambda` for
    /// `beta = 1` and diverges for `beta < 1`; `t = 0` itself is rejected.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        Ok(self.log_pdf(t)?.exp())
    }

    /// Inverse CDF: `t = alpha * [ln(1 - ln(1-u)/(lambda*alpha))]^(1/beta)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain {
                what: "u",
                value: u,
                domain: "(0, 1)",
            });
        }
        let z = (-(-u).ln_1p() / (self.lambda * self.alpha)).ln_1p();
        Ok(self.alpha * z.powf(1.0 / self.beta))
    }

    /// Draw one lifetime by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open_unit(rng))
            .expect("open_unit returns a value in (0, 1)")
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "t",
            value: t,
            domain: "[0, inf)",
        })
    }
}

/// Uniform draw on the open interval (0, 1).
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// The full parameter state `(lambda1, lambda2, alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr")]
pub struct ModelParams {
    lambda1: f64,
    lambda2: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct ParamsRepr {
    lambda1: f64,
    lambda2: f64,
    alpha: f64,
    beta: f64,
}

impl TryFrom<ParamsRepr> for ModelParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        Self::new(r.lambda1, r.lambda2, r.alpha, r.beta)
    }
}

impl ModelParams {
    pub fn new(lambda1: f64, lambda2: f64, alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            lambda1: check_positive("lambda1", lambda1)?,
            lambda2: check_positive("lambda2", lambda2)?,
            alpha: check_positive("alpha", alpha)?,
            beta: check_positive("beta", beta)?,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn get(&self, which: Param) -> f64 {
        match which {
            Param::Lambda1 => self.lambda1,
            Param::Lambda2 => self.lambda2,
            Param::Alpha => self.alpha,
            Param::Beta => self.beta,
        }
    }

    /// Copy with one coordinate replaced.
    pub fn with(&self, which: Param, value: f64) -> Result<Self> {
        check_positive(which.name(), value)?;
        let mut out = *self;
        match which {
            Param::Lambda1 => out.lambda1 = value,
            Param::Lambda2 => out.lambda2 = value,
            Param::Alpha => out.alpha = value,
            Param::Beta => out.beta = value,
        }
        Ok(out)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.lambda1, self.lambda2, self.alpha, self.beta]
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        match values {
            [l1, l2, a, b] => Self::new(*l1, *l2, *a, *b),
            _ => Err(Error::Config(format!(
                "expected 4 parameter values, got {}",
                values.len()
            ))),
        }
    }

    /// Cause-specific parameters sharing `alpha` and `beta`.
    pub fn risk(&self, cause: Cause) -> RiskParams {
        let lambda = match cause {
            Cause::One => self.lambda1,
            Cause::Two => self.lambda2,
        };
        RiskParams {
            lambda,
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    /// Law of the observed minimum: rate `lambda1 + lambda2`.
    pub fn total_risk(&self) -> RiskParams {
        RiskParams {
            lambda: self.lambda1 + self.lambda2,
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Draw both latent lifetimes and return the smaller one with its cause.
/// Exact ties go to cause 1.
pub fn sample_latent_pair<R: Rng + ?Sized>(mp: &ModelParams, rng: &mut R) -> (f64, Cause) {
    let x1 = mp.risk(Cause::One).sample(rng);
    let x2 = mp.risk(Cause::Two).sample(rng);
    if x1 <= x2 {
        (x1, Cause::One)
    } else {
        (x2, Cause::Two)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deserialization_validates() {
        let ok: ModelParams =
            serde_json::from_str(r#"{"lambda1":1,"lambda2":0.6,"alpha":0.3,"beta":0.1}"#).unwrap();
        assert_eq!(ok.to_array(), [1.0, 0.6, 0.3, 0.1]);
        assert!(serde_json::from_str::<ModelParams>(
            r#"{"lambda1":1,"lambda2":-0.6,"alpha":0.3,"beta":0.1}"#
        )
        .is_err());
    }
    use crate::stats::ks_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rp(l: f64, a: f64, b: f64) -> RiskParams {
        RiskParams::new(l, a, b).unwrap()
    }

    // 1 - e^(1-e) and e^(1-e), 40 digits via mpmath.
    const F_AT_ONE: f64 = 0.820_625_921_265_982_818_038_010_412_681_683_5;
    const S_AT_ONE: f64 = 0.179_374_078_734_017_181_961_989_587_318_316_5;

    #[test]
    fn cdf_at_zero_and_infinity() {
        for p in [rp(1.0, 1.0, 1.0), rp(0.6, 0.3, 0.1), rp(2.0, 5.0, 3.0)] {
            assert_eq!(p.cdf(0.0).unwrap(), 0.0);
            assert_eq!(p.survival(0.0).unwrap(), 1.0);
        }
        let p = rp(1.0, 1.0, 1.0);
        assert!((p.cdf(1e6).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_high_precision_value() {
        let p = rp(1.0, 1.0, 1.0);
        assert!((p.cdf(1.0).unwrap() - F_AT_ONE).abs() < 1e-15);
        assert!((p.survival(1.0).unwrap() - S_AT_ONE).abs() < 1e-15);
    }

    #[test]
    fn negative_time_is_rejected() {
        let p = rp(1.0, 1.0, 1.0);
        assert!(p.cdf(-1.0).is_err());
        assert!(p.survival(-0.5).is_err());
        assert!(p.pdf(0.0).is_err());
        assert!(p.pdf(-1.0).is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(RiskParams::new(0.0, 1.0, 1.0).is_err());
        assert!(RiskParams::new(1.0, -1.0, 1.0).is_err());
        assert!(RiskParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.3, 0.1).is_err());
    }

    #[test]
    fn survival_plus_cdf_is_one() {
        let p = rp(0.7, 0.3, 0.1);
        for i in 0..200 {
            let t = i as f64 * 0.05;
            let s = p.survival(t).unwrap() + p.cdf(t).unwrap();
            assert!((s - 1.0).abs() <= f64::EPSILON, "t={t}: {s}");
        }
    }

    #[test]
    fn survival_closed_under_minimum() {
        let mp = ModelParams::new(1.0, 0.6, 0.3, 0.1).unwrap();
        let (a, b, tot) = (mp.risk(Cause::One), mp.risk(Cause::Two), mp.total_risk());
        for i in 0..100 {
            let t = 0.01 * i as f64 + 1e-3 * (i * i) as f64;
            let lhs = a.survival(t).unwrap() * b.survival(t).unwrap();
            assert!((lhs - tot.survival(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn overflow_clamps_to_zero_survival() {
        let p = rp(1.0, 1.0, 5.0);
        assert_eq!(p.survival(1e3).unwrap(), 0.0);
        assert_eq!(p.cdf(1e3).unwrap(), 1.0);
        assert_eq!(p.log_pdf(1e3).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn pdf_limit_at_zero_for_unit_shape() {
        let p = rp(1.7, 2.0, 1.0);
        assert!((p.pdf(1e-12).unwrap() - 1.7).abs() < 1e-9);
    }

    #[test]
    fn pdf_matches_central_difference_of_cdf() {
        for p in [rp(1.0, 1.0, 1.0), rp(1.0, 0.3, 0.1), rp(0.5, 2.0, 2.5)] {
            for i in 1..=50 {
                let t = 0.1 * i as f64;
                let h = 1e-6 * t;
                // dF/dt = -dS/dt; differencing S avoids cancellation where F is near 1.
                let num = -(p.survival(t + h).unwrap() - p.survival(t - h).unwrap()) / (2.0 * h);
                let f = p.pdf(t).unwrap();
                if f > 1e-200 {
                    assert!((f / num - 1.0).abs() < 1e-5, "{p:?} t={t}: {f} vs {num}");
                }
            }
        }
    }

    // Adaptive Simpson in z = (t/alpha)^beta, where the integrand
    // f(t) dt/dz is smooth (the t^(beta-1) singularity is absorbed).
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let c = 0.5 * (a + b);
        let (fa, fb, fc) = (f(a), f(b), f(c));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
        fn rec<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            fa: f64,
            fb: f64,
            fc: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let c = 0.5 * (a + b);
            let (d, e) = (0.5 * (a + c), 0.5 * (c + b));
            let (fd, fe) = (f(d), f(e));
            let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
            let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1)
                + rec(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)
        }
        rec(f, a, b, fa, fb, fc, whole, tol, depth)
    }

    #[test]
    fn pdf_integrates_to_one() {
        for p in [rp(1.0, 0.3, 0.1), rp(1.0, 1.0, 1.0), rp(0.2, 4.0, 2.0)] {
            let (a, b) = (p.alpha(), p.beta());
            let integrand = |z: f64| {
                if z <= 0.0 {
                    // limit of f(t) dt/dz as z -> 0: lambda * alpha
                    return p.lambda() * a;
                }
                let t = a * z.powf(1.0 / b);
                let dt_dz = a / b * z.powf(1.0 / b - 1.0);
                p.pdf(t).unwrap() * dt_dz
            };
            // e^z beyond this point leaves S below e^-60.
            let upper = (1.0 + 60.0 / (p.lambda() * a)).ln();
            let total = simpson(&integrand, 0.0, upper, 1e-12, 40);
            assert!((total - 1.0).abs() < 1e-6, "{p:?}: {total}");
        }
    }

    #[test]
    fn quantile_round_trips() {
        for p in [
            rp(1.0, 0.3, 0.1),
            rp(1.6, 0.3, 0.1),
            rp(1.0, 1.0, 1.0),
            rp(0.03, 30.0, 0.5),
        ] {
            for i in 1..=99 {
                let u = i as f64 / 100.0;
                let t = p.quantile(u).unwrap();
                assert!((p.cdf(t).unwrap() - u).abs() < 1e-10, "{p:?} u={u}");
            }
        }
    }

    #[test]
    fn quantile_domain_and_small_u() {
        let p = rp(1.0, 1.0, 1.0);
        assert!(p.quantile(0.0).is_err());
        assert!(p.quantile(1.0).is_err());
        assert!(p.quantile(f64::NAN).is_err());
        let t = p.quantile(1e-15).unwrap();
        assert!(t > 0.0 && t < 1e-14);
    }

    #[test]
    fn sampled_median_matches_quantile() {
        let p = rp(1.0, 0.3, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| p.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let med = xs[n / 2];
        // Empirical CDF at the sample median sits within 2 binomial SE of 0.5.
        let fm = p.cdf(med).unwrap();
        assert!((fm - 0.5).abs() < 2.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn equal_rates_give_fair_causes() {
        let mp = ModelParams::new(0.8, 0.8, 0.3, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| sample_latent_pair(&mp, &mut rng).1 == Cause::One)
            .count();
        let p = ones as f64 / n as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn cause_probability_is_rate_share() {
        // Hazards are proportional in lambda, so P(cause 1) = l1 / (l1 + l2).
        let mp = ModelParams::new(1.0, 0.6, 0.3, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| sample_latent_pair(&mp, &mut rng).1 == Cause::One)
            .count();
        let share = 1.0 / 1.6;
        let p = ones as f64 / n as f64;
        assert!((p - share).abs() < 3.0 * (share * (1.0 - share) / n as f64).sqrt());
    }

    #[test]
    fn latent_minimum_follows_total_rate() {
        let mp = ModelParams::new(1.0, 0.6, 0.3, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| sample_latent_pair(&mp, &mut rng).0)
            .collect();
        let tot = mp.total_risk();
        let d = ks_distance(&xs, |t| tot.cdf(t).unwrap());
        assert!(d < 0.02, "KS {d}");
    }
}
