//! Breakdown bounds and adversarial sample constructions.

use std::f64::consts::PI;

use crate::circular::{canon, AngleSample};
use crate::distributions::CircularModel;
use crate::error::{Error, Result};

/// Upper bound on the implosion breakdown value of the CMAD-based estimator,
/// `1 − 0.5 / P_F(μ − π/2 < Θ < μ + π/2)`.
pub fn cmad_breakdown_bound(model: &CircularModel) -> Result<f64> {
    if !(model.param() > 0.0) {
        return Err(Error::OutOfRange { what: model.kind().parameter_name(), value: model.param() });
    }
    let half_circle = 2.0 * model.centered().central_mass(PI / 2.0)?;
    Ok(1.0 - 0.5 / half_circle)
}

fn check_fraction(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfRange { what: "contamination fraction", value: eps });
    }
    Ok(())
}

/// Number of points replaced at contamination fraction `eps`: `round(ε·n)`.
pub fn contaminant_count(n: usize, eps: f64) -> usize {
    ((eps * n as f64).round() as usize).min(n)
}

/// Replaces the last `values.len()` points of `clean` by `values`.
pub fn replace_tail(clean: &AngleSample, values: &[f64]) -> Result<AngleSample> {
    let n = clean.len();
    if values.len() > n {
        return Err(Error::InvalidArgument(format!(
            "{} replacements for {n} points",
            values.len()
        )));
    }
    let mut v = clean.angles().to_vec();
    v[n - values.len()..].copy_from_slice(values);
    AngleSample::new(v)
}

/// Replaces the last `count` points by copies of `at`.
pub fn point_mass_replacement(clean: &AngleSample, count: usize, at: f64) -> Result<AngleSample> {
    replace_tail(clean, &vec![at; count.min(clean.len())])
}

/// Replaces the last `⌈n/2⌉` points by copies of the first point, so that
/// `⌈n/2⌉ + 1` observations coincide: CLMS and CLTS implode to zero.
pub fn implosion_sample(clean: &AngleSample) -> Result<AngleSample> {
    let n = clean.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 angles".into()));
    }
    point_mass_replacement(clean, n.div_ceil(2), clean.angles()[0])
}

/// Replaces a fraction `eps` of the points by the two-atom distribution
/// `½Δ_{μ−π/2} + ½Δ_{μ+π/2}`, which attacks CMAD through its median.
pub fn h_star_contamination(clean: &AngleSample, eps: f64, mu: f64) -> Result<AngleSample> {
    check_fraction(eps)?;
    let m = contaminant_count(clean.len(), eps);
    let atoms: Vec<f64> = (0..m)
        .map(|i| canon(if i % 2 == 0 { mu - PI / 2.0 } else { mu + PI / 2.0 }))
        .collect();
    replace_tail(clean, &atoms)
}

/// Replaces a fraction `eps` of the points by a point mass at the antipode of `mu`.
pub fn antipodal_contamination(clean: &AngleSample, eps: f64, mu: f64) -> Result<AngleSample> {
    check_fraction(eps)?;
    point_mass_replacement(clean, contaminant_count(clean.len(), eps), canon(mu + PI))
}

/// `n` points from the three-atom family `λΔ₀ + ½(1−λ)Δ_{cπ} + ½(1−λ)Δ_{−cπ}`,
/// whose CMAD is `cπ` while the median stays at 0 for `c < (1−λ)/(2−3λ)`.
pub fn three_atom_sample(n: usize, lambda: f64, c: f64) -> Result<AngleSample> {
    if !(0.0..0.5).contains(&lambda) || !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("three-atom family λ={lambda}, c={c}")));
    }
    let at_zero = (lambda * n as f64).round() as usize;
    let rest = n - at_zero;
    let mut v = vec![0.0; at_zero];
    v.extend((0..rest).map(|i| if i % 2 == 0 { c * PI } else { -c * PI }));
    AngleSample::new(v)
}
