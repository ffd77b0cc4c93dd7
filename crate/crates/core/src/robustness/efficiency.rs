//! Asymptotic variances, Fisher information and asymptotic relative
//! efficiency of the robust parameter estimators.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::DispersionKind;
use crate::distributions::{CircularModel, ModelKind};
use crate::error::{Error, Result};
use crate::robustness::influence::{zeta_derivative, InfluenceFunction};
use crate::special::{central_difference, integrate, QuadratureSpec};

/// Asymptotic variance of the sample version of `kind` at the centred model.
pub fn asymptotic_variance(model: &CircularModel, kind: DispersionKind) -> Result<f64> {
    let model = model.centered();
    match kind {
        DispersionKind::Cmad | DispersionKind::Clms => {
            let q3 = model.upper_quartile_offset()?;
            let f = model.density(q3);
            Ok(1.0 / (16.0 * f * f))
        }
        DispersionKind::Clts => {
            let inf = InfluenceFunction::new(&model, kind)?;
            let (q3, s) = (inf.upper_quartile(), inf.functional_value());
            let cq = q3.cos();
            let a = 1.0 - 0.5 * s * s - cq;
            let spec = QuadratureSpec::tight();
            // integrals over [q1, q3] = twice those over [0, q3]
            let first = 2.0 * integrate(|t| (cq - t.cos()) * model.density(t), 0.0, q3, &spec)?;
            let second =
                2.0 * integrate(|t| (cq - t.cos()).powi(2) * model.density(t), 0.0, q3, &spec)?;
            Ok((a * a + 4.0 * a * first + 4.0 * second) / (s * s))
        }
        DispersionKind::Csd => {
            // E[IF²] with IF = (1 − CSD²/2 − cos θ)/CSD and E cos θ = 1 − CSD²/2
            let c = model.csd();
            let rho = model.mean_resultant();
            let rho2 = model.second_moment();
            Ok((0.5 * (1.0 + rho2) - rho * rho) / (c * c))
        }
    }
}

/// `E_F[IF²]` by quadrature, split at the influence function's jumps.
pub fn expected_squared_influence(model: &CircularModel, kind: DispersionKind) -> Result<f64> {
    let inf = InfluenceFunction::new(model, kind)?;
    let model = inf.model();
    let q3 = inf.upper_quartile();
    let spec = QuadratureSpec::tight();
    let g = |t: f64| inf.eval(t).powi(2) * model.density(t);
    let inner = integrate(g, 0.0, q3, &spec)?;
    let outer = integrate(g, q3, PI, &spec)?;
    Ok(2.0 * (inner + outer))
}

/// Fisher information for the scale parameter at the model.
pub fn fisher_information(model: &CircularModel) -> Result<f64> {
    let model = model.centered();
    match model.kind() {
        ModelKind::VonMises => {
            let a = model.mean_resultant();
            Ok(0.5 * (1.0 + model.second_moment()) - a * a)
        }
        ModelKind::WrappedNormal => numeric_fisher_information(&model),
    }
}

/// `∫ (∂ψ log f)² f` with the score obtained by central differences in ψ.
pub fn numeric_fisher_information(model: &CircularModel) -> Result<f64> {
    let model = model.centered();
    let psi = model.param();
    if !(psi > 0.0) {
        return Err(Error::OutOfRange { what: model.kind().parameter_name(), value: psi });
    }
    let kind = model.kind();
    let score = |t: f64| {
        central_difference(
            |p| {
                CircularModel::new(kind, 0.0, p)
                    .map(|m| m.log_density(t))
                    .unwrap_or(f64::NAN)
            },
            psi,
        )
    };
    let v = integrate(|t| score(t).powi(2) * model.density(t), 0.0, PI, &QuadratureSpec::default())?;
    Ok(2.0 * v)
}

/// Asymptotic relative efficiency of the estimator built on `kind` with
/// respect to maximum likelihood: `(1/I(ψ)) / (ζ'(S)² AVar(S))`.
pub fn are(model: &CircularModel, kind: DispersionKind) -> Result<f64> {
    let info = fisher_information(model)?;
    let zeta = zeta_derivative(model, kind)?;
    let avar = asymptotic_variance(model, kind)?;
    Ok(1.0 / (info * zeta * zeta * avar))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArePoint {
    pub param: f64,
    pub are: f64,
}

/// ARE over a list of parameter values of one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreCurve {
    pub family: ModelKind,
    pub kind: DispersionKind,
    pub points: Vec<ArePoint>,
}

pub fn are_curve(family: ModelKind, kind: DispersionKind, params: &[f64]) -> Result<AreCurve> {
    let points = params
        .par_iter()
        .map(|&p| {
            let m = CircularModel::new(family, 0.0, p)?;
            Ok(ArePoint { param: p, are: are(&m, kind)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AreCurve { family, kind, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ModelKind;

    fn vm(k: f64) -> CircularModel {
        CircularModel::von_mises(0.0, k).unwrap()
    }

    #[test]
    fn avar_identity() {
        let models = [vm(0.5), vm(2.0), vm(5.0), CircularModel::wrapped_normal(0.0, 0.5).unwrap()];
        for m in models {
            for kind in DispersionKind::ALL {
                let a = asymptotic_variance(&m, kind).unwrap();
                let b = expected_squared_influence(&m, kind).unwrap();
                assert!((a - b).abs() <= 1e-7, "{m:?} {kind}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cmad_and_clms_share_variance() {
        let m = vm(3.0);
        assert_eq!(
            asymptotic_variance(&m, DispersionKind::Cmad).unwrap(),
            asymptotic_variance(&m, DispersionKind::Clms).unwrap()
        );
    }

    #[test]
    fn fisher_information_paths() {
        let closed = fisher_information(&vm(2.0)).unwrap();
        let numeric = numeric_fisher_information(&vm(2.0)).unwrap();
        assert!((closed - numeric).abs() < 1e-6);
        assert!((fisher_information(&vm(1e-8)).unwrap() - 0.5).abs() < 1e-8);
        // σ = 1: stable when the difference step is halved (central_difference
        // already extrapolates; compare with a plain half-step difference)
        let w = CircularModel::wrapped_normal(0.0, 1.0).unwrap();
        let i1 = fisher_information(&w).unwrap();
        let h = 5e-7;
        let half = 2.0
            * integrate(
                |t| {
                    let up = CircularModel::wrapped_normal(0.0, 1.0 + h).unwrap().log_density(t);
                    let dn = CircularModel::wrapped_normal(0.0, 1.0 - h).unwrap().log_density(t);
                    ((up - dn) / (2.0 * h)).powi(2) * w.density(t)
                },
                0.0,
                PI,
                &QuadratureSpec::default(),
            )
            .unwrap();
        assert!((i1 - half).abs() < 1e-6 * i1);
        // concentrated wrapped normal behaves like the normal: I(σ) ≈ 2/σ²
        let w = CircularModel::wrapped_normal(0.0, 0.2).unwrap();
        assert!((fisher_information(&w).unwrap() * 0.04 / 2.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn csd_estimator_is_efficient_for_von_mises() {
        // the CSD-based κ̂ is the MLE
        for &k in &[0.5, 2.0, 10.0] {
            let e = are(&vm(k), DispersionKind::Csd).unwrap();
            assert!((e - 1.0).abs() < 1e-5, "k={k}: {e}");
        }
    }

    #[test]
    fn are_reference_values() {
        let clms = are(&vm(1.0), DispersionKind::Clms).unwrap();
        assert!((clms - 0.588).abs() < 2e-3, "{clms}");
        let clts = are(&vm(2.0), DispersionKind::Clts).unwrap();
        assert!((clts - 0.342).abs() < 2e-3, "{clts}");
        let curve = are_curve(ModelKind::VonMises, DispersionKind::Clms, &[1.0, 2.0, 3.0]).unwrap();
        assert!(curve.points.windows(2).all(|w| w[1].are < w[0].are));
    }
}
