//! The von Mises and wrapped normal models and the population values of the
//! robust dispersion functionals under them.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circular::{canon, AngleSample};
use crate::dispersion::DispersionKind;
use crate::error::{Error, Result};
use crate::special::{
    bessel_i_scaled, bessel_ratio, bessel_ratio_inverse, find_root, integrate, QuadratureSpec,
    RootSpec,
};

/// Model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    VonMises,
    WrappedNormal,
}

impl ModelKind {
    /// Name of the scale parameter (`kappa` or `sigma`).
    pub fn parameter_name(self) -> &'static str {
        match self {
            ModelKind::VonMises => "kappa",
            ModelKind::WrappedNormal => "sigma",
        }
    }

    /// Parameter value meaning "no concentration at all" (explosion).
    pub fn exploded_parameter(self) -> f64 {
        match self {
            ModelKind::VonMises => 0.0,
            ModelKind::WrappedNormal => f64::INFINITY,
        }
    }

    /// Parameter value meaning "point mass" (implosion).
    pub fn imploded_parameter(self) -> f64 {
        match self {
            ModelKind::VonMises => f64::INFINITY,
            ModelKind::WrappedNormal => 0.0,
        }
    }
}

/// A von Mises `vM(μ, κ)` or wrapped normal `WN(μ, σ)` distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularModel {
    kind: ModelKind,
    mu: f64,
    param: f64,
    /// Density at the mode for von Mises, `1/(2π e^{-κ} I₀(κ))`.
    #[serde(skip)]
    peak: f64,
}

/// Population values of the dispersion functionals at a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationDispersion {
    pub csd: f64,
    pub cmad: f64,
    pub clms: f64,
    pub clts: f64,
    pub mean_resultant: f64,
}

impl PopulationDispersion {
    pub fn get(&self, kind: DispersionKind) -> f64 {
        match kind {
            DispersionKind::Cmad => self.cmad,
            DispersionKind::Clms => self.clms,
            DispersionKind::Clts => self.clts,
            DispersionKind::Csd => self.csd,
        }
    }
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::tight()
}

impl CircularModel {
    pub fn new(kind: ModelKind, mu: f64, param: f64) -> Result<Self> {
        let mu = crate::circular::canonicalize(mu)?;
        let ok = match kind {
            ModelKind::VonMises => param >= 0.0 && param.is_finite(),
            ModelKind::WrappedNormal => param > 0.0 && param.is_finite(),
        };
        if !ok {
            return Err(Error::OutOfRange { what: kind.parameter_name(), value: param });
        }
        let peak = match kind {
            ModelKind::VonMises => 1.0 / (TAU * bessel_i_scaled(0, param)?),
            ModelKind::WrappedNormal => wrapped_normal_density(0.0, param),
        };
        Ok(CircularModel { kind, mu, param, peak })
    }

    pub fn von_mises(mu: f64, kappa: f64) -> Result<Self> {
        Self::new(ModelKind::VonMises, mu, kappa)
    }

    pub fn wrapped_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(ModelKind::WrappedNormal, mu, sigma)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// The same model with location 0.
    pub fn centered(&self) -> Self {
        CircularModel { mu: 0.0, ..*self }
    }

    /// Density at `theta`.
    pub fn density(&self, theta: f64) -> f64 {
        self.centered_density(canon(theta - self.mu))
    }

    /// Density of the centred model at offset `t` from the location.
    pub(crate) fn centered_density(&self, t: f64) -> f64 {
        match self.kind {
            ModelKind::VonMises => {
                let half = (0.5 * t).sin();
                // κ(cos t − 1) written as −2κ sin²(t/2) to keep precision for small t
                (-2.0 * self.param * half * half).exp() * self.peak
            }
            ModelKind::WrappedNormal => wrapped_normal_density(t, self.param),
        }
    }

    pub fn log_density(&self, theta: f64) -> f64 {
        match self.kind {
            ModelKind::VonMises => {
                let t = canon(theta - self.mu);
                let half = (0.5 * t).sin();
                -2.0 * self.param * half * half + self.peak.ln()
            }
            ModelKind::WrappedNormal => self.density(theta).ln(),
        }
    }

    /// Probability mass between the location and `μ + t`, for `t ∈ [0, π]`.
    pub fn central_mass(&self, t: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&t) {
            return Err(Error::OutOfRange { what: "central mass half-width", value: t });
        }
        integrate(|x| self.centered_density(x), 0.0, t, &tight())
    }

    /// Mass from the location to `μ + x` for any real `x` (negative for `x < 0`).
    pub(crate) fn signed_mass(&self, x: f64) -> Result<f64> {
        let r = canon(x);
        let turns = ((x - r) / TAU).round();
        let m = self.central_mass(r.abs())?;
        Ok(turns + m.copysign(r))
    }

    /// Distribution function anchored at `F(−π) = 0`.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        let theta = crate::circular::canonicalize(theta)?;
        let v = self.signed_mass(theta - self.mu)? - self.signed_mass(-PI - self.mu)?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Inverse of [`cdf`](Self::cdf).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange { what: "probability", value: p });
        }
        let base = self.signed_mass(-PI - self.mu)?;
        let root = find_root(
            |th| {
                self.signed_mass(th - self.mu).map(|m| m - base - p).unwrap_or(f64::NAN)
            },
            &RootSpec { low: -PI, high: PI, tol: 1e-13, max_iter: 300 },
        )?;
        Ok(canon(root))
    }

    /// Half-width `t` around the location holding central mass `2·mass`,
    /// i.e. the root of `central_mass(t) = mass` for `mass ∈ (0, 0.5)`.
    pub fn central_quantile(&self, mass: f64) -> Result<f64> {
        if !(mass > 0.0 && mass < 0.5) {
            return Err(Error::OutOfRange { what: "central mass", value: mass });
        }
        let high = match self.kind {
            ModelKind::VonMises if self.param > 100.0 => (12.0 / self.param.sqrt()).min(PI),
            ModelKind::WrappedNormal => (12.0 * self.param).min(PI),
            _ => PI,
        };
        // Newton's method safeguarded by bisection; the mass at each new
        // iterate is obtained by integrating only over the step.
        let sigma_equiv = (-2.0 * self.mean_resultant().ln()).sqrt();
        let z = std::f64::consts::SQRT_2 * inverse_erf_guess(2.0 * mass);
        let mut t = (z * sigma_equiv).clamp(0.05 * high, 0.9 * high);
        if !t.is_finite() {
            t = 0.5 * high;
        }
        let (mut lo, mut hi) = (0.0, high);
        let mut c = self.central_mass(t)?;
        for _ in 0..200 {
            let g = c - mass;
            if g == 0.0 {
                return Ok(t);
            }
            if g < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let d = self.centered_density(t);
            let mut next = t - g / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            let step = integrate(
                |x| self.centered_density(x),
                t.min(next),
                t.max(next),
                &tight(),
            )?;
            c += if next > t { step } else { -step };
            t = next;
        }
        Err(Error::MaxIterExceeded { iterations: 200 })
    }

    /// Offset of the upper quartile from the location, `F⁻¹(3/4) − μ`.
    pub fn upper_quartile_offset(&self) -> Result<f64> {
        self.central_quantile(0.25)
    }

    /// Mean resultant length `ρ`.
    pub fn mean_resultant(&self) -> f64 {
        mean_resultant(self.kind, self.param)
    }

    /// Second trigonometric moment `E cos 2(Θ − μ)`.
    pub fn second_moment(&self) -> f64 {
        match self.kind {
            ModelKind::VonMises => {
                let k = self.param;
                if k == 0.0 {
                    return 0.0;
                }
                bessel_i_scaled(2, k).expect("kappa validated")
                    / bessel_i_scaled(0, k).expect("kappa validated")
            }
            ModelKind::WrappedNormal => (-2.0 * self.param * self.param).exp(),
        }
    }

    pub fn csd(&self) -> f64 {
        csd_from_param(self.kind, self.param)
    }

    /// Population CSD, CMAD, CLMS and CLTS.
    pub fn population_dispersion(&self) -> Result<PopulationDispersion> {
        self.require_positive()?;
        let q3 = self.upper_quartile_offset()?;
        let clts = self.clts_at(q3)?;
        Ok(PopulationDispersion {
            csd: self.csd(),
            cmad: q3,
            clms: q3,
            clts,
            mean_resultant: self.mean_resultant(),
        })
    }

    /// Population value of one dispersion functional.
    pub fn dispersion(&self, kind: DispersionKind) -> Result<f64> {
        self.require_positive()?;
        match kind {
            DispersionKind::Csd => Ok(self.csd()),
            DispersionKind::Cmad | DispersionKind::Clms => self.upper_quartile_offset(),
            DispersionKind::Clts => self.clts_at(self.upper_quartile_offset()?),
        }
    }

    /// CSD of the model restricted to `[μ − q3, μ + q3]`.
    pub(crate) fn clts_at(&self, q3: f64) -> Result<f64> {
        let integral = integrate(
            |t| {
                let h = (0.5 * t).sin();
                4.0 * h * h * self.centered_density(t)
            },
            0.0,
            q3,
            &tight(),
        )?;
        Ok((4.0 * integral).max(0.0).sqrt())
    }

    fn require_positive(&self) -> Result<()> {
        if self.param > 0.0 {
            Ok(())
        } else {
            Err(Error::OutOfRange { what: self.kind.parameter_name(), value: self.param })
        }
    }

    /// Draws one angle.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            ModelKind::VonMises => canon(self.mu + best_fisher_offset(self.param, rng)),
            ModelKind::WrappedNormal => {
                let z: f64 = rng.sample(StandardNormal);
                canon(self.mu + self.param * z)
            }
        }
    }

    /// Draws `n` angles from `rng`.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<AngleSample> {
        AngleSample::new((0..n).map(|_| self.draw(rng)).collect())
    }

    /// Draws `n` angles from a generator seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<AngleSample> {
        self.sample_with(n, &mut stream_rng(seed, 0))
    }
}

/// Rough inverse error function, accurate enough to seed Newton's method.
fn inverse_erf_guess(x: f64) -> f64 {
    let a = 0.147;
    let ln = (1.0 - x * x).ln();
    let t = 2.0 / (PI * a) + 0.5 * ln;
    ((t * t - ln / a).sqrt() - t).sqrt().copysign(x)
}

/// Independent generator for task `stream` of a computation seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Best–Fisher wrapped-Cauchy rejection sampler for the centred von Mises.
fn best_fisher_offset<R: Rng + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    if kappa < 1e-12 {
        return rng.random_range(-PI..PI);
    }
    let s = (1.0 + 4.0 * kappa * kappa).sqrt();
    let tau = 1.0 + s;
    // (τ − √(2τ))/(2κ) rewritten without cancellation
    let rho = 2.0 * kappa * tau / ((s + 1.0) * (tau + (2.0 * tau).sqrt()));
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = ((1.0 + r * z) / (r + z)).clamp(-1.0, 1.0);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let t = f.acos();
            return if u3 > 0.5 { t } else { -t };
        }
    }
}

fn wrapped_normal_density(t: f64, sigma: f64) -> f64 {
    if sigma <= 2.5 {
        let m_max = f64::max(3.0, (5.0 * sigma / TAU).ceil() + 2.0) as i64;
        let norm = 1.0 / (sigma * TAU.sqrt());
        (-m_max..=m_max)
            .map(|m| {
                let x = t + TAU * m as f64;
                (-x * x / (2.0 * sigma * sigma)).exp()
            })
            .sum::<f64>()
            * norm
    } else {
        let mut sum = 1.0;
        let mut m = 1.0;
        loop {
            let w = (-m * m * sigma * sigma / 2.0).exp();
            if w < 1e-16 {
                break;
            }
            sum += 2.0 * w * (m * t).cos();
            m += 1.0;
        }
        sum / TAU
    }
}

/// Mean resultant length of the family at parameter `param`.
pub fn mean_resultant(kind: ModelKind, param: f64) -> f64 {
    match kind {
        ModelKind::VonMises => bessel_ratio(param),
        ModelKind::WrappedNormal => (-0.5 * param * param).exp(),
    }
}

/// CSD implied by a parameter value.
pub fn csd_from_param(kind: ModelKind, param: f64) -> f64 {
    crate::circular::csd_from_resultant(mean_resultant(kind, param))
}

/// Consistency map from a CSD value to the family parameter:
/// `κ = A⁻¹(1 − CSD²/2)` or `σ = √(−2 log(1 − CSD²/2))`.
///
/// A CSD of 0 maps to the imploded parameter and `CSD ≥ √2` to the exploded one.
pub fn param_from_csd(kind: ModelKind, csd: f64) -> Result<f64> {
    if !(csd >= 0.0) {
        return Err(Error::OutOfRange { what: "CSD", value: csd });
    }
    let rho = 1.0 - 0.5 * csd * csd;
    if rho <= 0.0 {
        return Ok(kind.exploded_parameter());
    }
    if rho >= 1.0 {
        return Ok(kind.imploded_parameter());
    }
    match kind {
        ModelKind::VonMises => {
            if rho >= 1.0 - 1e-15 {
                // A(κ) ≈ 1 − 1/(2κ)
                return Ok(0.5 / (1.0 - rho));
            }
            bessel_ratio_inverse(rho)
        }
        ModelKind::WrappedNormal => Ok((-2.0 * rho.ln()).sqrt()),
    }
}

/// Population value of `disp` in family `kind` at parameter `param` (the η map
/// expressed in the natural parameter).
pub fn eta(kind: ModelKind, disp: DispersionKind, param: f64) -> Result<f64> {
    CircularModel::new(kind, 0.0, param)?.dispersion(disp)
}

const LOG_PARAM_RANGE: (f64, f64) = (-34.0, 27.0);

/// Inverts η: the CSD of the family member whose `disp` value equals `s`.
pub fn eta_inverse(kind: ModelKind, disp: DispersionKind, s: f64) -> Result<f64> {
    let sup = disp.supremum();
    if !(s > 0.0 && s < sup) {
        return Err(Error::OutOfRange { what: "dispersion value", value: s });
    }
    if disp == DispersionKind::Csd {
        return Ok(s);
    }
    let param = |x: f64| x.exp();
    let g = |x: f64| eta(kind, disp, param(x)).map(|v| v - s).unwrap_or(f64::NAN);
    let (lo, hi) = LOG_PARAM_RANGE;
    // S decreases in κ and increases in σ
    let (flat, sharp) = match kind {
        ModelKind::VonMises => (lo, hi),
        ModelKind::WrappedNormal => (hi, lo),
    };
    let s_flat = g(flat) + s;
    let s_sharp = g(sharp) + s;
    if s >= s_flat {
        return Ok(csd_from_param(kind, param(flat)));
    }
    if s <= s_sharp {
        // normal regime: dispersion proportional to CSD
        return Ok(s * csd_from_param(kind, param(sharp)) / s_sharp);
    }
    let x = find_root(g, &RootSpec { low: lo, high: hi, tol: 1e-12, max_iter: 300 })?;
    Ok(csd_from_param(kind, param(x)))
}
