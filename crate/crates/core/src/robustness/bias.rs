//! Monte Carlo relative-bias curves of the dispersion estimators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circular::{canon, AngleSample};
use crate::dispersion::{sample_dispersion, DispersionKind};
use crate::distributions::{stream_rng, CircularModel};
use crate::error::{Error, Result};
use crate::robustness::breakdown::{contaminant_count, replace_tail};

/// How contaminating points are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContaminationType {
    /// All contaminants at one angle.
    PointMass,
    /// Contaminants drawn from the clean model shifted to a new location.
    MeanShift,
}

impl ContaminationType {
    pub fn as_str(self) -> &'static str {
        match self {
            ContaminationType::PointMass => "point-mass",
            ContaminationType::MeanShift => "mean-shift",
        }
    }
}

impl fmt::Display for ContaminationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContaminationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "point-mass" | "pointmass" | "point_mass" => Ok(ContaminationType::PointMass),
            "mean-shift" | "meanshift" | "mean_shift" => Ok(ContaminationType::MeanShift),
            other => Err(Error::InvalidArgument(format!("unknown contamination type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasConfig {
    pub model: CircularModel,
    pub epsilon: f64,
    pub contamination: ContaminationType,
    pub grid_size: usize,
    pub sample_size: usize,
    pub seed: u64,
}

impl BiasConfig {
    pub fn new(model: CircularModel, epsilon: f64, contamination: ContaminationType) -> Self {
        BiasConfig { model, epsilon, contamination, grid_size: 181, sample_size: 5000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasPoint {
    pub theta: f64,
    /// `(S(contaminated) − S(clean)) / S(clean)`; NaN when `error` is set.
    pub rel_bias: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasCurve {
    pub kind: DispersionKind,
    pub epsilon: f64,
    pub contamination: ContaminationType,
    pub sample_size: usize,
    pub seed: u64,
    pub clean_value: f64,
    pub points: Vec<BiasPoint>,
}

/// Equispaced grid `θ_k = −π + 2πk/G`, `k = 0..G`.
pub fn theta_grid(grid_size: usize) -> Vec<f64> {
    (0..grid_size).map(|k| -PI + 2.0 * PI * k as f64 / grid_size as f64).collect()
}

/// The clean sample and the centred contaminant offsets shared by every grid point.
struct Design {
    clean: AngleSample,
    offsets: Vec<f64>,
}

fn design(cfg: &BiasConfig) -> Result<Design> {
    if !(0.0..0.5).contains(&cfg.epsilon) {
        return Err(Error::OutOfRange { what: "contamination fraction", value: cfg.epsilon });
    }
    if cfg.grid_size < 1 || cfg.sample_size < 2 {
        return Err(Error::InvalidArgument("grid size and sample size must be positive".into()));
    }
    let model = cfg.model.centered();
    let clean = model.sample_with(cfg.sample_size, &mut stream_rng(cfg.seed, 0))?;
    let m = contaminant_count(cfg.sample_size, cfg.epsilon);
    let offsets = match cfg.contamination {
        ContaminationType::PointMass => vec![0.0; m],
        ContaminationType::MeanShift => {
            let mut rng = stream_rng(cfg.seed, 1);
            (0..m).map(|_| model.draw(&mut rng)).collect()
        }
    };
    Ok(Design { clean, offsets })
}

fn contaminated(d: &Design, theta: f64) -> Result<AngleSample> {
    let values: Vec<f64> = d.offsets.iter().map(|&z| canon(theta + z)).collect();
    replace_tail(&d.clean, &values)
}

/// Relative bias curves for several kinds, sharing one clean sample and one
/// set of contaminant draws across kinds and grid points.
pub fn bias_curves(cfg: &BiasConfig, kinds: &[DispersionKind]) -> Result<Vec<BiasCurve>> {
    let d = design(cfg)?;
    let grid = theta_grid(cfg.grid_size);
    let clean_values = kinds
        .iter()
        .map(|&k| sample_dispersion(&d.clean, k).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    // per grid point, one result per kind
    let rows: Vec<Vec<BiasPoint>> = grid
        .par_iter()
        .map(|&theta| {
            let sample = contaminated(&d, theta);
            kinds
                .iter()
                .zip(&clean_values)
                .map(|(&k, &s0)| {
                    match sample.as_ref().map_err(Clone::clone).and_then(|s| sample_dispersion(s, k)) {
                        Ok(v) => BiasPoint { theta, rel_bias: (v.value - s0) / s0, error: None },
                        Err(e) => BiasPoint { theta, rel_bias: f64::NAN, error: Some(e.to_string()) },
                    }
                })
                .collect()
        })
        .collect();
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| BiasCurve {
            kind,
            epsilon: cfg.epsilon,
            contamination: cfg.contamination,
            sample_size: cfg.sample_size,
            seed: cfg.seed,
            clean_value: clean_values[i],
            points: rows.iter().map(|r| r[i].clone()).collect(),
        })
        .collect())
}

pub fn bias_curve(cfg: &BiasConfig, kind: DispersionKind) -> Result<BiasCurve> {
    Ok(bias_curves(cfg, &[kind])?.remove(0))
}

/// Relative bias of each kind at a single contamination location.
pub fn bias_at(cfg: &BiasConfig, kinds: &[DispersionKind], theta: f64) -> Result<Vec<f64>> {
    let d = design(cfg)?;
    let s = contaminated(&d, theta)?;
    kinds
        .iter()
        .map(|&k| {
            let s0 = sample_dispersion(&d.clean, k)?.value;
            Ok((sample_dispersion(&s, k)?.value - s0) / s0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::influence::InfluenceFunction;

    fn cfg(eps: f64, grid: usize, n: usize) -> BiasConfig {
        BiasConfig {
            grid_size: grid,
            sample_size: n,
            ..BiasConfig::new(
                CircularModel::von_mises(0.0, 2.0).unwrap(),
                eps,
                ContaminationType::PointMass,
            )
        }
    }

    #[test]
    fn zero_contamination_is_exactly_zero() {
        for c in bias_curves(&cfg(0.0, 19, 500), &DispersionKind::ALL).unwrap() {
            assert!(c.points.iter().all(|p| p.rel_bias == 0.0));
        }
    }

    #[test]
    fn csd_reacts_most_to_antipodal_contamination() {
        let b = bias_at(&cfg(0.1, 1, 5000), &DispersionKind::ALL, PI).unwrap();
        let csd = b[3];
        assert!(csd > 0.0);
        for &r in &b[..3] {
            assert!(csd > r.abs());
        }
    }

    #[test]
    fn sign_structure_follows_influence() {
        let c = cfg(0.05, 91, 5000);
        let curves = bias_curves(&c, &DispersionKind::ROBUST).unwrap();
        for curve in curves {
            let inf = InfluenceFunction::new(&c.model, curve.kind).unwrap();
            let q3 = inf.upper_quartile();
            let (mut agree, mut total) = (0, 0);
            for p in &curve.points {
                if (p.theta.abs() - q3).abs() < 0.3 {
                    continue;
                }
                total += 1;
                if p.rel_bias.signum() == inf.eval(p.theta).signum() {
                    agree += 1;
                }
            }
            assert!(agree as f64 >= 0.9 * total as f64, "{}: {agree}/{total}", curve.kind);
            let near0 = &curve.points[curve.points.len() / 2];
            assert!(near0.rel_bias < 0.0);
            assert!(curve.points[0].rel_bias > 0.0);
        }
    }

    #[test]
    fn deterministic_and_mean_shift_runs() {
        let mut c = cfg(0.1, 7, 300);
        c.contamination = ContaminationType::MeanShift;
        let a = bias_curves(&c, &DispersionKind::ALL).unwrap();
        let b = bias_curves(&c, &DispersionKind::ALL).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert!(bias_curves(&cfg(0.5, 3, 10), &[DispersionKind::Clms]).is_err());
        assert_eq!("mean-shift".parse::<ContaminationType>().unwrap(), ContaminationType::MeanShift);
    }
}
