//! Numerical kernel: modified Bessel functions of orders 0-2, the ratio
//! `A(κ) = I₁(κ)/I₀(κ)` and its inverse, adaptive Simpson quadrature,
//! a bracketing root finder and central differences.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Arguments at or below this use the power series, above it the
/// large-argument asymptotic expansion.
const SERIES_LIMIT: f64 = 15.0;

/// Exponentially scaled modified Bessel function `e^{-x} I_ν(x)`, ν ∈ {0, 1, 2}.
///
/// Never overflows; this is the form used everywhere inside the crate.
pub fn bessel_i_scaled(order: u32, x: f64) -> Result<f64> {
    if order > 2 {
        return Err(Error::InvalidArgument(format!("Bessel order {order} not supported")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange { what: "Bessel argument", value: x });
    }
    if x <= SERIES_LIMIT {
        Ok(series(order, x) * (-x).exp())
    } else {
        Ok(asymptotic_scaled(order, x))
    }
}

/// Modified Bessel function of the first kind `I_ν(x)` for ν ∈ {0, 1, 2}.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    let scaled = bessel_i_scaled(order, x)?;
    if x <= SERIES_LIMIT {
        return Ok(scaled * x.exp());
    }
    let v = (x + scaled.ln()).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { x })
    }
}

fn series(order: u32, x: f64) -> f64 {
    let nu = order as f64;
    let half = 0.5 * x;
    let q = half * half;
    // leading term (x/2)^ν / ν!
    let mut term = match order {
        0 => 1.0,
        1 => half,
        _ => 0.5 * q,
    };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn asymptotic_scaled(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (8.0 * k as f64 * x);
        let mag = term.abs();
        if mag > prev {
            break;
        }
        sum += term;
        if mag < 1e-17 * sum.abs() {
            break;
        }
        prev = mag;
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Mean resultant length of a von Mises distribution, `A(κ) = I₁(κ)/I₀(κ)`.
pub fn bessel_ratio(kappa: f64) -> f64 {
    if kappa <= 0.0 {
        return 0.0;
    }
    let i0 = bessel_i_scaled(0, kappa).expect("nonnegative finite argument");
    let i1 = bessel_i_scaled(1, kappa).expect("nonnegative finite argument");
    i1 / i0
}

/// Derivative `A'(κ) = 1 - A(κ)/κ - A(κ)²`.
pub fn bessel_ratio_derivative(kappa: f64) -> f64 {
    if kappa < 1e-8 {
        // A(κ) = κ/2 - κ³/16 + ...
        return 0.5 - 3.0 * kappa * kappa / 16.0;
    }
    let a = bessel_ratio(kappa);
    1.0 - a / kappa - a * a
}

/// Inverse of [`bessel_ratio`]: the κ ≥ 0 with `A(κ) = r`.
pub fn bessel_ratio_inverse(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::OutOfRange { what: "mean resultant length", value: r });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    // A(κ) ≈ 1 - 1/(2κ) for large κ, so 10/(1-r) always brackets the root.
    let high = f64::max(50.0, 10.0 / (1.0 - r));
    find_root(
        |k| bessel_ratio(k) - r,
        &RootSpec { low: 0.0, high, tol: 1e-14, max_iter: 300 },
    )
}

/// Error function, backed by `libm`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 50 }
    }
}

impl QuadratureSpec {
    pub fn tight() -> Self {
        QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-13, max_depth: 50 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_depth < 1 {
            return Err(Error::InvalidArgument(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }
}

/// Number of equal panels the interval is cut into before adapting, so that
/// narrow peaks are not stepped over by the first Simpson stencil.
const INITIAL_PANELS: usize = 16;

/// Every panel is bisected at least this many times before its error
/// estimate is trusted.
const MIN_REFINEMENTS: u32 = 2;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(a <= b) {
        return Err(Error::InvalidArgument(format!("integration bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut coarse = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { a + width * (i + 1) as f64 };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        coarse += whole;
        panels.push((lo, hi, flo, fmid, fhi, whole));
    }
    let tol = f64::max(spec.abs_tol, spec.rel_tol * coarse.abs());
    let share = tol / INITIAL_PANELS as f64;
    let mut total = 0.0;
    for (lo, hi, flo, fmid, fhi, whole) in panels {
        total += simpson_step(&f, lo, hi, flo, fmid, fhi, whole, share, spec.max_depth, spec.max_depth)
            .ok_or(Error::DepthExceeded { a, b })?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    let settled = max_depth - depth >= MIN_REFINEMENTS.min(max_depth) && delta.abs() <= 15.0 * tol;
    if settled || (m - a) <= f64::EPSILON * a.abs().max(1.0) {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, max_depth)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, max_depth)?;
    Some(l + r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub low: f64,
    pub high: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl RootSpec {
    pub fn new(low: f64, high: f64) -> Self {
        RootSpec { low, high, tol: 1e-12, max_iter: 200 }
    }
}

/// Brent's method (bisection / secant / inverse quadratic hybrid) on a sign-changing bracket.
pub fn find_root<F: Fn(f64) -> f64>(f: F, spec: &RootSpec) -> Result<f64> {
    if !(spec.low < spec.high) {
        return Err(Error::InvalidArgument(format!(
            "empty bracket [{}, {}]",
            spec.low, spec.high
        )));
    }
    let (mut a, mut b) = (spec.low, spec.high);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { low: a, high: b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::MaxIterExceeded { iterations: spec.max_iter })
}

/// Central difference derivative with step `max(1e-6, 1e-6·|x|)`, refined by
/// one Richardson extrapolation.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = f64::max(1e-6, 1e-6 * x.abs());
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let h2 = 0.5 * h;
    let d2 = (f(x + h2) - f(x - h2)) / (2.0 * h2);
    (4.0 * d2 - d1) / 3.0
}
