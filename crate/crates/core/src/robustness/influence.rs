//! Influence functions of the dispersion functionals and of the
//! parameter estimators derived from them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circular::canon;
use crate::dispersion::DispersionKind;
use crate::distributions::{eta, CircularModel};
use crate::error::{Error, Result};
use crate::special::central_difference;

/// Influence function of one dispersion functional at a centred model, with
/// the model quantities it needs precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceFunction {
    kind: DispersionKind,
    model: CircularModel,
    /// `F⁻¹(3/4)` of the centred model.
    q3: f64,
    /// Population value of the functional.
    value: f64,
    density_at_q3: f64,
}

impl InfluenceFunction {
    pub fn new(model: &CircularModel, kind: DispersionKind) -> Result<Self> {
        let model = model.centered();
        let q3 = model.upper_quartile_offset()?;
        let value = match kind {
            DispersionKind::Cmad | DispersionKind::Clms => q3,
            DispersionKind::Clts => model.clts_at(q3)?,
            DispersionKind::Csd => model.csd(),
        };
        Ok(InfluenceFunction { kind, model, q3, value, density_at_q3: model.density(q3) })
    }

    pub fn kind(&self) -> DispersionKind {
        self.kind
    }

    pub fn model(&self) -> &CircularModel {
        &self.model
    }

    pub fn upper_quartile(&self) -> f64 {
        self.q3
    }

    /// Population value `S(F)`.
    pub fn functional_value(&self) -> f64 {
        self.value
    }

    /// `IF(y; S, F)`.
    pub fn eval(&self, y: f64) -> f64 {
        let y = canon(y).abs();
        let s = self.value;
        match self.kind {
            DispersionKind::Cmad | DispersionKind::Clms => {
                let sign = if y > self.q3 {
                    1.0
                } else if y < self.q3 {
                    -1.0
                } else {
                    0.0
                };
                sign / (4.0 * self.density_at_q3)
            }
            DispersionKind::Clts => {
                let cq = self.q3.cos();
                let inner = if y < self.q3 { 2.0 * (cq - y.cos()) } else { 0.0 };
                (1.0 - 0.5 * s * s - cq + inner) / s
            }
            DispersionKind::Csd => (1.0 - 0.5 * s * s - y.cos()) / s,
        }
    }

    /// Supremum of `|IF|` over the circle.
    pub fn gross_error_sensitivity(&self) -> f64 {
        match self.kind {
            DispersionKind::Cmad | DispersionKind::Clms => 1.0 / (4.0 * self.density_at_q3),
            DispersionKind::Clts => self.eval(0.0).abs().max(self.eval(PI).abs()),
            DispersionKind::Csd => self.eval(PI).abs().max(self.eval(0.0).abs()),
        }
    }
}

/// `IF(y)` of CMAD and CLMS: `sign(|y| − q₃) / (4 f(q₃))`.
pub fn if_cmad_clms(model: &CircularModel, y: f64) -> Result<f64> {
    Ok(InfluenceFunction::new(model, DispersionKind::Clms)?.eval(y))
}

/// `IF(y)` of CLTS.
pub fn if_clts(model: &CircularModel, y: f64) -> Result<f64> {
    Ok(InfluenceFunction::new(model, DispersionKind::Clts)?.eval(y))
}

/// `IF(y)` of the CSD: `(1 − CSD²/2 − cos y)/CSD`.
pub fn if_csd(model: &CircularModel, y: f64) -> Result<f64> {
    Ok(InfluenceFunction::new(model, DispersionKind::Csd)?.eval(y))
}

/// Derivative of the map from the functional value to the model parameter,
/// `ζ'(S(F))`, obtained as the reciprocal of `dS/dψ` at the model parameter.
pub fn zeta_derivative(model: &CircularModel, kind: DispersionKind) -> Result<f64> {
    let family = model.kind();
    let psi = model.param();
    let h = f64::max(1e-6, 1e-6 * psi.abs());
    if psi - h <= 0.0 {
        return Err(Error::OutOfRange { what: "parameter for differentiation", value: psi });
    }
    // evaluate the forward map once up front so failures surface as errors
    eta(family, kind, psi - h)?;
    eta(family, kind, psi + h)?;
    let ds = central_difference(|p| eta(family, kind, p).unwrap_or(f64::NAN), psi);
    if !ds.is_finite() || ds == 0.0 {
        return Err(Error::OutOfRange { what: "dS/dparameter", value: ds });
    }
    Ok(1.0 / ds)
}

/// Influence function of the parameter estimator built on `kind`,
/// `ζ'(S(F)) · IF(y; S, F)`.
pub fn transformed_if(model: &CircularModel, kind: DispersionKind, y: f64) -> Result<f64> {
    let zeta = zeta_derivative(model, kind)?;
    Ok(zeta * InfluenceFunction::new(model, kind)?.eval(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IfPoint {
    pub y: f64,
    pub raw: f64,
    pub transformed: f64,
}

/// Raw and transformed influence function on an equispaced grid over `[−π, π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IfCurve {
    pub model: CircularModel,
    pub kind: DispersionKind,
    pub zeta_derivative: f64,
    pub points: Vec<IfPoint>,
}

pub fn if_curve(model: &CircularModel, kind: DispersionKind, grid_size: usize) -> Result<IfCurve> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} < 2")));
    }
    let inf = InfluenceFunction::new(model, kind)?;
    let zeta = zeta_derivative(model, kind)?;
    let points = (0..grid_size)
        .map(|k| {
            let y = -PI + 2.0 * PI * k as f64 / grid_size as f64;
            let raw = inf.eval(y);
            IfPoint { y, raw, transformed: zeta * raw }
        })
        .collect();
    Ok(IfCurve { model: model.centered(), kind, zeta_derivative: zeta, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ModelKind;
    use crate::robustness::functional::contaminated_value;
    use crate::special::bessel_ratio_derivative;

    fn vm(k: f64) -> CircularModel {
        CircularModel::von_mises(0.0, k).unwrap()
    }

    #[test]
    fn cmad_clms_steps() {
        let m = vm(0.5);
        let q3 = m.upper_quartile_offset().unwrap();
        let f = m.density(q3);
        assert!((if_cmad_clms(&m, PI).unwrap() - 1.0 / (4.0 * f)).abs() < 1e-14);
        assert!((if_cmad_clms(&m, 0.0).unwrap() + 1.0 / (4.0 * f)).abs() < 1e-14);
        let inf = InfluenceFunction::new(&m, DispersionKind::Cmad).unwrap();
        assert_eq!(inf.gross_error_sensitivity(), 1.0 / (4.0 * f));
        for k in 0..50 {
            let y = -PI + k as f64 * 0.125;
            assert_eq!(inf.eval(y).abs(), inf.gross_error_sensitivity());
        }
    }

    #[test]
    fn clts_branches() {
        let m = vm(0.5);
        let inf = InfluenceFunction::new(&m, DispersionKind::Clts).unwrap();
        let (q3, s) = (inf.upper_quartile(), inf.functional_value());
        let outer = (1.0 - 0.5 * s * s - q3.cos()) / s;
        assert!((inf.eval(2.9) - outer).abs() < 1e-14);
        assert!((inf.eval(q3 - 1e-12) - inf.eval(q3 + 1e-12)).abs() < 1e-10);
        // the inner part is −cos y shifted and scaled
        let a = inf.eval(0.1) - inf.eval(0.3);
        let b = (2.0 / s) * (0.3f64.cos() - 0.1f64.cos());
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn csd_values() {
        let m = vm(2.0);
        let c = m.csd();
        assert!((if_csd(&m, 0.0).unwrap() + c / 2.0).abs() < 1e-14);
        assert!((if_csd(&m, PI).unwrap() - (2.0 - c * c / 2.0) / c).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_oracle() {
        let eps = 1e-4;
        for model in [vm(0.5), vm(2.0), CircularModel::wrapped_normal(0.0, 0.8).unwrap()] {
            for kind in DispersionKind::ALL {
                let inf = InfluenceFunction::new(&model, kind).unwrap();
                for &y in &[0.0, 0.4, 1.9, 3.0] {
                    if (y - inf.upper_quartile()).abs() < 0.05 {
                        continue;
                    }
                    let base = contaminated_value(&model, kind, y, 0.0).unwrap();
                    let pert = contaminated_value(&model, kind, y, eps).unwrap();
                    let fd = (pert - base) / eps;
                    assert!((fd - inf.eval(y)).abs() < 5e-3, "{model:?} {kind} y={y}: {fd} vs {}", inf.eval(y));
                }
            }
        }
    }

    #[test]
    fn zeta_for_csd_matches_closed_form() {
        for &k in &[0.5, 2.0, 8.0] {
            let m = vm(k);
            let z = zeta_derivative(&m, DispersionKind::Csd).unwrap();
            let closed = -m.csd() / bessel_ratio_derivative(k);
            assert!((z / closed - 1.0).abs() < 1e-6, "k={k}: {z} vs {closed}");
        }
        let w = CircularModel::wrapped_normal(0.0, 0.7).unwrap();
        let z = zeta_derivative(&w, DispersionKind::Csd).unwrap();
        let c = w.csd();
        let closed = c / (0.7 * (1.0 - c * c / 2.0));
        assert!((z / closed - 1.0).abs() < 1e-6);
    }

    #[test]
    fn transformed_ratio_is_constant() {
        let m = vm(2.0);
        let curve = if_curve(&m, DispersionKind::Clms, 37).unwrap();
        let r0 = curve.points[0].transformed / curve.points[0].raw;
        for p in &curve.points {
            assert!((p.transformed / p.raw - r0).abs() <= 1e-9 * r0.abs());
        }
        assert_eq!(curve.model.kind(), ModelKind::VonMises);
    }

    #[test]
    fn curves_are_even_and_periodic() {
        let m = vm(1.3);
        for kind in DispersionKind::ALL {
            let inf = InfluenceFunction::new(&m, kind).unwrap();
            for k in 0..40 {
                let y = 0.08 * k as f64;
                assert_eq!(inf.eval(y), inf.eval(-y));
                assert!((inf.eval(y + 2.0 * PI) - inf.eval(y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clts_tends_to_linear_lts_shape() {
        let m = vm(100.0);
        let inf = InfluenceFunction::new(&m, DispersionKind::Clts).unwrap();
        let q3 = inf.upper_quartile();
        // the inner IF minus its value at 0, scaled by S/2, is 1 − cos y ≈ y²/2
        let s = inf.functional_value();
        let mut y = 0.01 * q3;
        while y < 0.5 * q3 {
            let shape = (inf.eval(y) - inf.eval(0.0)) * s / 2.0;
            assert!((shape / (y * y / 2.0) - 1.0).abs() < 0.02);
            y += 0.01 * q3;
        }
    }
}
