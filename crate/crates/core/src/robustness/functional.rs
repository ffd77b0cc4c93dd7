//! Direct numerical evaluation of the dispersion functionals at a centred
//! model contaminated by point masses, used to check influence functions
//! by finite differences.
//!
//! CSD, CMAD and CLMS are evaluated at `(1 − ε)F + εΔ_y`; CLTS at the
//! symmetric `(1 − ε)F + (ε/2)(Δ_y + Δ_{−y})`, whose optimal trimming arc
//! stays centred.

use std::f64::consts::{PI, TAU};

use crate::circular::{arc_distance, canon};
use crate::dispersion::DispersionKind;
use crate::distributions::CircularModel;
use crate::error::{Error, Result};
use crate::special::{find_root, integrate, QuadratureSpec, RootSpec};

/// Value of `kind` at the contaminated centred model described above.
pub fn contaminated_value(
    model: &CircularModel,
    kind: DispersionKind,
    y: f64,
    eps: f64,
) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::OutOfRange { what: "contamination fraction", value: eps });
    }
    let model = model.centered();
    let y = canon(y);
    match kind {
        DispersionKind::Csd => {
            let rho = model.mean_resultant();
            let c = (1.0 - eps) * rho + eps * y.cos();
            let s = eps * y.sin();
            Ok((2.0 * (1.0 - (c * c + s * s).sqrt())).max(0.0).sqrt())
        }
        DispersionKind::Cmad => cmad(&model, y, eps),
        DispersionKind::Clms => clms(&model, y.abs(), eps),
        DispersionKind::Clts => clts(&model, y.abs(), eps),
    }
}

fn root(f: impl Fn(f64) -> f64, low: f64, high: f64) -> Result<f64> {
    find_root(f, &RootSpec { low, high, tol: 1e-14, max_iter: 400 })
}

fn cmad(model: &CircularModel, y: f64, eps: f64) -> Result<f64> {
    let g = |x: f64| model.signed_mass(x).unwrap_or(f64::NAN);
    // stationarity of the mean arc distance: mass behind minus mass ahead,
    // plus the contaminating atom's pull
    let slope = |m: f64| {
        let atom = if canon(m - y) > 0.0 { 1.0 } else { -1.0 };
        (1.0 - eps) * (2.0 * g(m) - g(m - PI) - g(m + PI)) + eps * atom
    };
    let m = if eps == 0.0 { 0.0 } else { root(slope, -0.5, 0.5)? };
    let dy = arc_distance(y, m);
    root(
        |t| {
            let atom = if dy <= t { eps } else { 0.0 };
            (1.0 - eps) * (g(m + t) - g(m - t)) + atom - 0.5
        },
        0.0,
        PI,
    )
}

fn clms(model: &CircularModel, y: f64, eps: f64) -> Result<f64> {
    let target_out = 0.5 / (1.0 - eps);
    let target_in = (0.5 - eps) / (1.0 - eps);
    let t_out = model.central_quantile(0.5 * target_out)?;
    let t_in = model.central_quantile(0.5 * target_in)?;
    if y <= t_in {
        return Ok(t_in);
    }
    let mut best = y;
    if y >= t_out {
        best = best.min(t_out);
    }
    // shortest arc ending at the atom
    let g = |x: f64| model.signed_mass(x).unwrap_or(f64::NAN);
    let gy = g(y);
    let a = root(|a| gy - g(a) - target_in, y - TAU + 1e-12, y)?;
    Ok(best.min(0.5 * (y - a)))
}

fn clts(model: &CircularModel, y: f64, eps: f64) -> Result<f64> {
    let spec = QuadratureSpec::tight();
    let cos_moment = |t: f64| integrate(|x| x.cos() * model.density(x), 0.0, t, &spec);
    let t_in = model.central_quantile((0.5 - eps) / (2.0 * (1.0 - eps)))?;
    let t_out = model.central_quantile(0.25 / (1.0 - eps))?;
    let moment = if y < t_in {
        2.0 * (1.0 - eps) * cos_moment(t_in)? + eps * y.cos()
    } else if y > t_out {
        2.0 * (1.0 - eps) * cos_moment(t_out)?
    } else {
        // trimming boundary sits on the atoms, which are partially kept
        let kept = 0.5 - 2.0 * (1.0 - eps) * model.central_mass(y)?;
        2.0 * (1.0 - eps) * cos_moment(y)? + kept * y.cos()
    };
    let r = moment / 0.5;
    Ok((2.0 * (1.0 - r)).max(0.0).sqrt())
}
