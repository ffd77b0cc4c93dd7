//! Robust anomaly detection: Fréchet median, robust scale estimate and a
//! model-quantile cutoff on the arc distance to the median.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circular::{arc_distance, circular_mean, frechet_median, AngleSample};
use crate::dispersion::{classical_estimate, estimate_parameter, Breakdown, DispersionKind};
use crate::distributions::{CircularModel, ModelKind};
use crate::error::{Error, Result};

/// Which model quantile defines the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffRule {
    /// `c = F⁻¹(1 − α)` of the centred model; `P(d > c) = 2α`. Reproduces
    /// the published cutoffs.
    #[default]
    UpperTail,
    /// `c = F⁻¹(1 − α/2)`; `P(d > c) = α`.
    TwoSided,
}

impl CutoffRule {
    pub fn as_str(self) -> &'static str {
        match self {
            CutoffRule::UpperTail => "upper-tail",
            CutoffRule::TwoSided => "two-sided",
        }
    }
}

impl fmt::Display for CutoffRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CutoffRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper-tail" | "upper_tail" | "upper" => Ok(CutoffRule::UpperTail),
            "two-sided" | "two_sided" | "two" => Ok(CutoffRule::TwoSided),
            other => Err(Error::InvalidArgument(format!("unknown cutoff rule `{other}`"))),
        }
    }
}

/// Arc-distance cutoff `c_α(ψ)` for the centred model.
///
/// An infinitely concentrated model (`κ = ∞`, `σ = 0`) has cutoff 0.
pub fn cutoff(model: ModelKind, psi: f64, alpha: f64, rule: CutoffRule) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange { what: "alpha", value: alpha });
    }
    if psi == model.imploded_parameter() {
        return Ok(0.0);
    }
    if psi.is_nan() || psi == model.exploded_parameter() || psi <= 0.0 && model == ModelKind::WrappedNormal
    {
        return Err(Error::OutOfRange { what: model.parameter_name(), value: psi });
    }
    let half_mass = match rule {
        CutoffRule::UpperTail => 0.5 - alpha,
        CutoffRule::TwoSided => 0.5 - 0.5 * alpha,
    };
    if half_mass <= 0.0 {
        return Err(Error::OutOfRange { what: "alpha", value: alpha });
    }
    CircularModel::new(model, 0.0, psi)?.central_quantile(half_mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionConfig {
    pub model: ModelKind,
    pub alpha: f64,
    pub kind: DispersionKind,
    /// Use the circular mean and the classical estimate instead.
    pub baseline: bool,
    pub rule: CutoffRule,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            model: ModelKind::VonMises,
            alpha: 0.01,
            kind: DispersionKind::Clms,
            baseline: false,
            rule: CutoffRule::UpperTail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointFlag {
    pub index: usize,
    pub angle: f64,
    pub distance: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    /// Fréchet median, or the circular mean in baseline mode.
    pub median: f64,
    pub parameter: f64,
    /// `None` when the scale estimate exploded; then nothing is flagged.
    pub cutoff: Option<f64>,
    pub alpha: f64,
    pub model: ModelKind,
    pub kind: DispersionKind,
    pub baseline: bool,
    pub rule: CutoffRule,
    pub breakdown: Option<Breakdown>,
    pub points: Vec<PointFlag>,
    pub flagged_count: usize,
    pub warnings: Vec<String>,
}

impl DetectionReport {
    pub fn flagged_indices(&self) -> Vec<usize> {
        self.points.iter().filter(|p| p.flagged).map(|p| p.index).collect()
    }
}

/// Flags `θᵢ` with `d(θᵢ, μ̃) > c_α(ψ̂)`; ties stay unflagged.
pub fn detect(s: &AngleSample, cfg: &DetectionConfig) -> Result<DetectionReport> {
    if s.len() < 3 {
        return Err(Error::InvalidArgument(format!("detection needs n >= 3, got {}", s.len())));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::OutOfRange { what: "alpha", value: cfg.alpha });
    }
    let mut warnings = Vec::new();
    let (center, parameter, breakdown) = if cfg.baseline {
        let (mean, _) = circular_mean(s)?;
        (mean, classical_estimate(s, cfg.model)?, None)
    } else {
        let median = frechet_median(s)?;
        let est = estimate_parameter(s, cfg.kind, cfg.model)?;
        warnings.extend(est.warnings);
        (median, est.parameter, est.breakdown)
    };
    let c = match breakdown {
        Some(Breakdown::Explosion) => {
            warnings.push("scale estimate exploded: no cutoff exists, nothing flagged".into());
            None
        }
        Some(Breakdown::Implosion) => {
            warnings.push("scale estimate imploded: every point off the median is flagged".into());
            Some(0.0)
        }
        None => Some(cutoff(cfg.model, parameter, cfg.alpha, cfg.rule)?),
    };
    let points: Vec<PointFlag> = s
        .angles()
        .iter()
        .enumerate()
        .map(|(index, &angle)| {
            let distance = arc_distance(angle, center);
            PointFlag { index, angle, distance, flagged: c.is_some_and(|c| distance > c) }
        })
        .collect();
    let flagged_count = points.iter().filter(|p| p.flagged).count();
    Ok(DetectionReport {
        median: center,
        parameter,
        cutoff: c,
        alpha: cfg.alpha,
        model: cfg.model,
        kind: cfg.kind,
        baseline: cfg.baseline,
        rule: cfg.rule,
        breakdown,
        points,
        flagged_count,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::stream_rng;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_matches_model_tail() {
        for &(k, a) in &[(3.88, 0.01), (7.92, 0.05), (0.5, 0.2)] {
            let m = CircularModel::von_mises(0.0, k).unwrap();
            for rule in [CutoffRule::UpperTail, CutoffRule::TwoSided] {
                let c = cutoff(ModelKind::VonMises, k, a, rule).unwrap();
                let tail = 1.0 - 2.0 * m.central_mass(c).unwrap();
                let want = if rule == CutoffRule::UpperTail { 2.0 * a } else { a };
                assert!((tail - want).abs() < 1e-9, "{k} {a} {rule}");
            }
        }
        assert_eq!(cutoff(ModelKind::VonMises, f64::INFINITY, 0.01, CutoffRule::UpperTail).unwrap(), 0.0);
        assert!(cutoff(ModelKind::VonMises, 2.0, 0.6, CutoffRule::UpperTail).is_err());
        assert!(cutoff(ModelKind::VonMises, 2.0, 0.6, CutoffRule::TwoSided).is_ok());
        assert!(cutoff(ModelKind::VonMises, 2.0, 0.0, CutoffRule::TwoSided).is_err());
    }

    #[test]
    fn cutoff_is_monotone() {
        let mut last = PI;
        for &k in &[0.5, 1.0, 2.0, 5.0, 20.0, 200.0] {
            let c = cutoff(ModelKind::VonMises, k, 0.05, CutoffRule::UpperTail).unwrap();
            assert!(c < last);
            last = c;
        }
        let a = cutoff(ModelKind::WrappedNormal, 0.5, 0.01, CutoffRule::TwoSided).unwrap();
        let b = cutoff(ModelKind::WrappedNormal, 0.5, 0.05, CutoffRule::TwoSided).unwrap();
        assert!(a > b);
    }

    #[test]
    fn flags_far_point_and_rotates() {
        let mut v: Vec<f64> = (0..30).map(|i| 0.02 * (i as f64 - 15.0)).collect();
        v.push(2.8);
        let s = AngleSample::new(v).unwrap();
        let r = detect(&s, &DetectionConfig::default()).unwrap();
        assert_eq!(r.flagged_indices(), vec![30]);
        assert!(r.points.iter().all(|p| p.flagged == (p.distance > r.cutoff.unwrap())));
        for &c in &[1.0, -2.5, 3.1] {
            let rr = detect(&s.rotated(c), &DetectionConfig::default()).unwrap();
            assert_eq!(rr.flagged_indices(), r.flagged_indices());
        }
    }

    #[test]
    fn explosion_flags_nothing() {
        let v: Vec<f64> = (0..12).map(|i| -PI + 2.0 * PI * i as f64 / 12.0 + 0.01 * (i % 3) as f64).collect();
        let s = AngleSample::new(v).unwrap();
        let cfg = DetectionConfig { kind: DispersionKind::Cmad, ..Default::default() };
        match detect(&s, &cfg) {
            Ok(r) if r.breakdown == Some(Breakdown::Explosion) => {
                assert!(r.cutoff.is_none());
                assert_eq!(r.flagged_count, 0);
                assert!(!r.warnings.is_empty());
            }
            Ok(_) | Err(Error::NonUniqueMedian) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn implosion_flags_everything_off_median() {
        let s = AngleSample::new(vec![0.5, 0.5, 0.5, 0.5, 0.5, 1.0, -1.0]).unwrap();
        let r = detect(&s, &DetectionConfig::default()).unwrap();
        assert_eq!(r.breakdown, Some(Breakdown::Implosion));
        assert_eq!(r.cutoff, Some(0.0));
        assert_eq!(r.flagged_indices(), vec![5, 6]);
    }

    #[test]
    fn small_samples_rejected() {
        let s = AngleSample::new(vec![0.0, 1.0]).unwrap();
        assert!(detect(&s, &DetectionConfig::default()).is_err());
    }

    #[test]
    fn two_sided_false_alarm_rate() {
        let m = CircularModel::von_mises(0.0, 5.0).unwrap();
        let cfg = DetectionConfig { alpha: 0.05, rule: CutoffRule::TwoSided, ..Default::default() };
        let mut total = 0usize;
        let reps = 60;
        for r in 0..reps {
            let s = m.sample_with(200, &mut stream_rng(7, r)).unwrap();
            total += detect(&s, &cfg).unwrap().flagged_count;
        }
        let rate = total as f64 / (reps as f64 * 200.0);
        assert!((0.02..=0.09).contains(&rate), "{rate}");
    }
}
