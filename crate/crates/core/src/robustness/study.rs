//! Simulation study of the estimators under antipodal contamination.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::{classical_estimate, estimate_parameter, DispersionKind};
use crate::distributions::{stream_rng, CircularModel, ModelKind};
use crate::error::{Error, Result};
use crate::robustness::bias::ContaminationType;
use crate::robustness::breakdown::{contaminant_count, replace_tail};

/// Estimators compared in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// MLE for von Mises, `√(−2 log ρ̂)` for wrapped normal.
    Classical,
    Cmad,
    Clms,
    Clts,
}

impl Estimator {
    pub const ALL: [Estimator; 4] =
        [Estimator::Classical, Estimator::Cmad, Estimator::Clms, Estimator::Clts];

    pub fn label(self, family: ModelKind) -> &'static str {
        match (self, family) {
            (Estimator::Classical, ModelKind::VonMises) => "mle",
            (Estimator::Classical, ModelKind::WrappedNormal) => "classical",
            (Estimator::Cmad, _) => "cmad",
            (Estimator::Clms, _) => "clms",
            (Estimator::Clts, _) => "clts",
        }
    }

    fn kind(self) -> Option<DispersionKind> {
        match self {
            Estimator::Classical => None,
            Estimator::Cmad => Some(DispersionKind::Cmad),
            Estimator::Clms => Some(DispersionKind::Clms),
            Estimator::Clts => Some(DispersionKind::Clts),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Classical => "classical",
            Estimator::Cmad => "cmad",
            Estimator::Clms => "clms",
            Estimator::Clts => "clts",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub family: ModelKind,
    pub params: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub sample_size: usize,
    pub replications: usize,
    pub contamination: ContaminationType,
    pub seed: u64,
}

impl StudyConfig {
    /// The reference design: n = 200, 500 replications, ε ∈ {0, 0.1, 0.2},
    /// κ ∈ {1, 2, 5} or σ ∈ {0.5, 1, 1.2}, contamination centred at π.
    pub fn standard(family: ModelKind) -> Self {
        let params = match family {
            ModelKind::VonMises => vec![1.0, 2.0, 5.0],
            ModelKind::WrappedNormal => vec![0.5, 1.0, 1.2],
        };
        StudyConfig {
            family,
            params,
            epsilons: vec![0.0, 0.1, 0.2],
            sample_size: 200,
            replications: 500,
            contamination: ContaminationType::MeanShift,
            seed: 42,
        }
    }
}

/// Minimum, quartiles (type-7) and maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = (v.len() - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(FiveNumber { min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub param: f64,
    pub epsilon: f64,
    pub estimator: Estimator,
    /// `None` when every replication failed.
    pub summary: Option<FiveNumber>,
    /// Replications with an error or a non-finite estimate.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub family: ModelKind,
    pub sample_size: usize,
    pub replications: usize,
    pub contamination: ContaminationType,
    pub seed: u64,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    pub fn row(&self, param: f64, epsilon: f64, estimator: Estimator) -> Option<&StudyRow> {
        self.rows
            .iter()
            .find(|r| r.param == param && r.epsilon == epsilon && r.estimator == estimator)
    }
}

fn one_replication(cfg: &StudyConfig, pi: usize, ei: usize, rep: usize) -> [Option<f64>; 4] {
    let stream = ((pi * cfg.epsilons.len() + ei) * cfg.replications + rep) as u64;
    let mut rng = stream_rng(cfg.seed, stream);
    let psi = cfg.params[pi];
    let mut run = || -> Result<[Option<f64>; 4]> {
        let clean_model = CircularModel::new(cfg.family, 0.0, psi)?;
        let clean = clean_model.sample_with(cfg.sample_size, &mut rng)?;
        let m = contaminant_count(cfg.sample_size, cfg.epsilons[ei]);
        let contaminants: Vec<f64> = match cfg.contamination {
            ContaminationType::PointMass => vec![-PI; m],
            ContaminationType::MeanShift => {
                let shifted = CircularModel::new(cfg.family, PI, psi)?;
                (0..m).map(|_| shifted.draw(&mut rng)).collect()
            }
        };
        let s = replace_tail(&clean, &contaminants)?;
        Ok(Estimator::ALL.map(|e| {
            let v = match e.kind() {
                None => classical_estimate(&s, cfg.family),
                Some(k) => estimate_parameter(&s, k, cfg.family).map(|r| r.parameter),
            };
            v.ok().filter(|x| x.is_finite())
        }))
    };
    run().unwrap_or([None; 4])
}

/// Runs the study; rows are ordered by parameter, then ε, then estimator.
pub fn contamination_study(cfg: &StudyConfig) -> Result<StudyTable> {
    if cfg.sample_size < 2 || cfg.replications == 0 {
        return Err(Error::InvalidArgument("sample size ≥ 2 and replications ≥ 1 required".into()));
    }
    for &e in &cfg.epsilons {
        if !(0.0..0.5).contains(&e) {
            return Err(Error::OutOfRange { what: "contamination fraction", value: e });
        }
    }
    for &p in &cfg.params {
        CircularModel::new(cfg.family, 0.0, p)?;
    }
    let cells: Vec<(usize, usize)> = (0..cfg.params.len())
        .flat_map(|p| (0..cfg.epsilons.len()).map(move |e| (p, e)))
        .collect();
    let mut rows = Vec::new();
    for (pi, ei) in cells {
        let reps: Vec<[Option<f64>; 4]> = (0..cfg.replications)
            .into_par_iter()
            .map(|r| one_replication(cfg, pi, ei, r))
            .collect();
        for (j, &estimator) in Estimator::ALL.iter().enumerate() {
            let ok: Vec<f64> = reps.iter().filter_map(|r| r[j]).collect();
            rows.push(StudyRow {
                param: cfg.params[pi],
                epsilon: cfg.epsilons[ei],
                estimator,
                summary: FiveNumber::of(&ok),
                failures: cfg.replications - ok.len(),
            });
        }
    }
    Ok(StudyTable {
        family: cfg.family,
        sample_size: cfg.sample_size,
        replications: cfg.replications,
        contamination: cfg.contamination,
        seed: cfg.seed,
        rows,
    })
}
