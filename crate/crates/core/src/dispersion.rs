//! Sample CMAD, CLMS and CLTS, and the consistency-mapped estimators of the
//! von Mises concentration and the wrapped normal scale.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circular::{arc_distance, csd, frechet_median, mean_resultant_length, AngleSample};
use crate::distributions::{eta_inverse, param_from_csd, ModelKind};
use crate::error::{Error, Result};
use crate::special::bessel_ratio_inverse;

/// Which dispersion measure to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersionKind {
    Cmad,
    Clms,
    Clts,
    Csd,
}

impl DispersionKind {
    pub const ALL: [DispersionKind; 4] =
        [DispersionKind::Cmad, DispersionKind::Clms, DispersionKind::Clts, DispersionKind::Csd];
    pub const ROBUST: [DispersionKind; 3] =
        [DispersionKind::Cmad, DispersionKind::Clms, DispersionKind::Clts];

    /// Supremum of the functional over all distributions on the circle.
    pub fn supremum(self) -> f64 {
        match self {
            DispersionKind::Cmad | DispersionKind::Clms => PI / 2.0,
            DispersionKind::Clts => (2.0 * (1.0 - 2.0 / PI)).sqrt(),
            DispersionKind::Csd => 2f64.sqrt(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DispersionKind::Cmad => "cmad",
            DispersionKind::Clms => "clms",
            DispersionKind::Clts => "clts",
            DispersionKind::Csd => "csd",
        }
    }
}

impl fmt::Display for DispersionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DispersionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cmad" => Ok(DispersionKind::Cmad),
            "clms" => Ok(DispersionKind::Clms),
            "clts" => Ok(DispersionKind::Clts),
            "csd" => Ok(DispersionKind::Csd),
            other => Err(Error::InvalidArgument(format!("unknown dispersion kind `{other}`"))),
        }
    }
}

/// Size of the half sample, `⌈n/2⌉ + 1`, clamped to `n`.
pub fn half_sample_size(n: usize) -> usize {
    (n.div_ceil(2) + 1).min(n)
}

/// The optimal arc found by CLMS or CLTS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    /// Index of the first point in ascending angle order.
    pub start_index: usize,
    pub start: f64,
    pub end: f64,
}

/// A sample dispersion value together with its optimal arc, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDispersion {
    pub value: f64,
    pub window: Option<Window>,
    pub median: Option<f64>,
}

fn require_two(s: &AngleSample) -> Result<()> {
    if s.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 angles, got {}", s.len())));
    }
    Ok(())
}

/// Median of a list of reals; even lengths take the midpoint of the two
/// central order statistics.
pub fn linear_median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Sample CMAD: median shortest-arc distance to the Fréchet median.
pub fn cmad_sample(s: &AngleSample) -> Result<f64> {
    Ok(cmad_with_median(s)?.0)
}

fn cmad_with_median(s: &AngleSample) -> Result<(f64, f64)> {
    let m = frechet_median(s)?;
    let mut d: Vec<f64> = s.angles().iter().map(|&a| arc_distance(a, m)).collect();
    Ok((linear_median(&mut d), m))
}

/// Sample CLMS: half the length of the shortest arc holding `h` points.
pub fn clms_sample(s: &AngleSample) -> Result<(f64, Window)> {
    require_two(s)?;
    let x = s.sorted();
    let n = x.len();
    let h = half_sample_size(n);
    let mut best = (f64::INFINITY, 0);
    for i in 0..n {
        let len = window_length(&x, i, h);
        if len < best.0 {
            best = (len, i);
        }
    }
    let (len, i) = best;
    Ok((0.5 * len, window(&x, i, h)))
}

fn window_length(x: &[f64], i: usize, h: usize) -> f64 {
    let j = i + h - 1;
    let n = x.len();
    let d = x[j % n] - x[i];
    if j >= n {
        d + TAU
    } else {
        d
    }
}

fn window(x: &[f64], i: usize, h: usize) -> Window {
    Window { start_index: i, start: x[i], end: x[(i + h - 1) % x.len()] }
}

/// CSD of `h` consecutive sorted points starting at `i`, summed in window order.
fn window_csd(x: &[f64], i: usize, h: usize) -> f64 {
    let n = x.len();
    // coincident points: exactly zero, which the sums below only approximate
    if (i..i + h).all(|k| x[k % n] == x[i]) {
        return 0.0;
    }
    let (mut c, mut s) = (0.0, 0.0);
    for k in i..i + h {
        c += x[k % n].cos();
        s += x[k % n].sin();
    }
    let r = ((c * c + s * s).sqrt() / h as f64).min(1.0);
    (2.0 * (1.0 - r)).max(0.0).sqrt()
}

/// Windows whose running-sum CSD lies within this of the best are re-evaluated directly.
const CLTS_RECHECK: f64 = 1e-9;

/// Sample CLTS: the smallest CSD over arcs of `h` consecutive sorted points.
pub fn clts_sample(s: &AngleSample) -> Result<(f64, Window)> {
    require_two(s)?;
    let x = s.sorted();
    let n = x.len();
    let h = half_sample_size(n);
    let (cos, sin): (Vec<f64>, Vec<f64>) = x.iter().map(|a| (a.cos(), a.sin())).unzip();
    let (mut c, mut sn) = (cos[..h].iter().sum::<f64>(), sin[..h].iter().sum::<f64>());
    let mut approx = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            if i % 1024 == 0 {
                c = (i..i + h).map(|k| cos[k % n]).sum();
                sn = (i..i + h).map(|k| sin[k % n]).sum();
            } else {
                let out = i - 1;
                let inn = (i + h - 1) % n;
                c += cos[inn] - cos[out];
                sn += sin[inn] - sin[out];
            }
        }
        let r = ((c * c + sn * sn).sqrt() / h as f64).min(1.0);
        approx.push((2.0 * (1.0 - r)).max(0.0).sqrt());
    }
    let floor = approx.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best = (f64::INFINITY, 0);
    for (i, &a) in approx.iter().enumerate() {
        if a <= floor + CLTS_RECHECK {
            let v = window_csd(&x, i, h);
            if v < best.0 {
                best = (v, i);
            }
        }
    }
    Ok((best.0, window(&x, best.1, h)))
}

/// Sample value of `kind`, with its window (CLMS, CLTS) or median (CMAD).
pub fn sample_dispersion(s: &AngleSample, kind: DispersionKind) -> Result<SampleDispersion> {
    match kind {
        DispersionKind::Cmad => {
            let (value, m) = cmad_with_median(s)?;
            Ok(SampleDispersion { value, window: None, median: Some(m) })
        }
        DispersionKind::Clms => {
            let (value, w) = clms_sample(s)?;
            Ok(SampleDispersion { value, window: Some(w), median: None })
        }
        DispersionKind::Clts => {
            let (value, w) = clts_sample(s)?;
            Ok(SampleDispersion { value, window: Some(w), median: None })
        }
        DispersionKind::Csd => Ok(SampleDispersion { value: csd(s), window: None, median: None }),
    }
}

/// Breakdown state reached by an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Breakdown {
    /// Dispersion at its supremum: the data look uniform.
    Explosion,
    /// Dispersion zero: the data look like a point mass.
    Implosion,
}

/// Outcome of the chain sample dispersion → CSD → model parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub kind: DispersionKind,
    pub model: ModelKind,
    pub n: usize,
    pub half_sample_size: usize,
    pub raw_dispersion: f64,
    pub mapped_csd: f64,
    /// κ̂ or σ̂; infinite values encode breakdown.
    pub parameter: f64,
    pub breakdown: Option<Breakdown>,
    pub window: Option<Window>,
    pub median: Option<f64>,
    pub warnings: Vec<String>,
}

/// Estimates the model parameter from `kind` through the consistency chain.
///
/// Breakdown is reported, not raised: a dispersion at its supremum yields
/// `κ̂ = 0` / `σ̂ = ∞`, a zero dispersion `κ̂ = ∞` / `σ̂ = 0`.
pub fn estimate_parameter(
    s: &AngleSample,
    kind: DispersionKind,
    model: ModelKind,
) -> Result<EstimateReport> {
    require_two(s)?;
    let n = s.len();
    let h = half_sample_size(n);
    let mut warnings = Vec::new();
    let sd = sample_dispersion(s, kind)?;
    let sup = kind.supremum();
    let (mapped_csd, parameter, breakdown) = if sd.value >= sup {
        warnings.push(format!("{kind} = {} reached its supremum {sup}", sd.value));
        (2f64.sqrt(), model.exploded_parameter(), Some(Breakdown::Explosion))
    } else if sd.value <= 0.0 {
        (0.0, model.imploded_parameter(), Some(Breakdown::Implosion))
    } else {
        let c = eta_inverse(model, kind, sd.value)?;
        (c, param_from_csd(model, c)?, None)
    };
    Ok(EstimateReport {
        kind,
        model,
        n,
        half_sample_size: h,
        raw_dispersion: sd.value,
        mapped_csd,
        parameter,
        breakdown,
        window: sd.window,
        median: sd.median,
        warnings,
    })
}

/// Maximum likelihood estimate of the von Mises concentration, `A⁻¹(ρ̂)`.
pub fn mle_von_mises_kappa(s: &AngleSample) -> Result<f64> {
    require_two(s)?;
    let rho = mean_resultant_length(s);
    if rho >= 1.0 - 1e-12 {
        return Err(Error::Explosion { value: rho, supremum: 1.0 });
    }
    bessel_ratio_inverse(rho)
}

/// Classical wrapped normal scale estimate `√(−2 log ρ̂)`.
pub fn classical_wn_sigma(s: &AngleSample) -> Result<f64> {
    require_two(s)?;
    let rho = mean_resultant_length(s);
    if rho <= 1e-12 {
        return Err(Error::DegenerateResultant { resultant: rho });
    }
    Ok((-2.0 * rho.ln()).max(0.0).sqrt())
}

/// The non-robust baseline estimator for a family.
pub fn classical_estimate(s: &AngleSample, model: ModelKind) -> Result<f64> {
    match model {
        ModelKind::VonMises => mle_von_mises_kappa(s),
        ModelKind::WrappedNormal => classical_wn_sigma(s),
    }
}
