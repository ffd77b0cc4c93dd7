//! Circular violin plot: a von Mises kernel density mounted on the unit
//! circle, mirrored radially, clipped at the detection cutoff, with a
//! quartile box, a median tick and markers for flagged points.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::Serialize;

use crate::circular::{canon, circular_quartiles, AngleSample};
use crate::detect::DetectionReport;
use crate::error::{Error, Result};
use crate::special::bessel_i_scaled;

/// How the density is clipped at the detection cutoff `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClipMode {
    /// Ring thickness is zero outside the arc `[μ̃ − c, μ̃ + c]`.
    #[default]
    Angular,
    /// Ring thickness follows `min(f̂(θ), f̂(μ̃ ± c))`.
    Height,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KdeSpec {
    /// Kernel concentration `ν`.
    pub concentration: f64,
    pub grid_size: usize,
}

impl KdeSpec {
    pub fn new(concentration: f64) -> Result<Self> {
        let spec = KdeSpec { concentration, grid_size: 512 };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return Err(Error::OutOfRange { what: "kernel concentration", value: self.concentration });
        }
        if self.grid_size < 64 {
            return Err(Error::OutOfRange { what: "grid size", value: self.grid_size as f64 });
        }
        Ok(())
    }
}

/// Plug-in kernel concentration `(3nκ²I₂(2κ) / (4√π I₀(κ)²))^{2/5}`;
/// falls back to 1 when `κ̂` is zero or not finite.
pub fn default_bandwidth(n: usize, kappa: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("bandwidth needs n >= 2, got {n}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Ok(1.0);
    }
    // exponential scalings of I₂(2κ) and I₀(κ)² cancel
    let i2 = bessel_i_scaled(2, 2.0 * kappa)?;
    let i0 = bessel_i_scaled(0, kappa)?;
    let v = (3.0 * n as f64 * kappa * kappa * i2 / (4.0 * PI.sqrt() * i0 * i0)).powf(0.4);
    Ok(if v > 0.0 && v.is_finite() { v } else { 1.0 })
}

/// Von Mises kernel density estimate at arbitrary angles.
#[derive(Debug, Clone, PartialEq)]
pub struct Kde {
    angles: Vec<f64>,
    nu: f64,
    norm: f64,
}

impl Kde {
    pub fn new(s: &AngleSample, nu: f64) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::InvalidArgument("density estimate needs n >= 2".into()));
        }
        KdeSpec { concentration: nu, grid_size: 64 }.validate()?;
        let norm = 1.0 / (TAU * bessel_i_scaled(0, nu)? * s.len() as f64);
        Ok(Kde { angles: s.angles().to_vec(), nu, norm })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.norm * self.angles.iter().map(|&a| (self.nu * ((theta - a).cos() - 1.0)).exp()).sum::<f64>()
    }

    pub fn concentration(&self) -> f64 {
        self.nu
    }

    /// Global maximum, from the grid's local maxima refined by golden-section search.
    pub fn max_value(&self, grid: &[f64], values: &[f64]) -> f64 {
        let n = grid.len();
        let h = TAU / n as f64;
        let mut best = values.iter().copied().fold(0.0, f64::max);
        for k in 0..n {
            let (prev, next) = (values[(k + n - 1) % n], values[(k + 1) % n]);
            if values[k] < prev || values[k] < next {
                continue;
            }
            let (mut a, mut b) = (grid[k] - h, grid[k] + h);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            while b - a > 1e-10 {
                let (x1, x2) = (b - r * (b - a), a + r * (b - a));
                if self.eval(x1) < self.eval(x2) {
                    a = x1;
                } else {
                    b = x2;
                }
            }
            best = best.max(self.eval(0.5 * (a + b)));
        }
        best
    }
}

/// Grid angles `−π + 2πk/G`.
pub fn grid_angles(grid_size: usize) -> Vec<f64> {
    (0..grid_size).map(|k| -PI + TAU * k as f64 / grid_size as f64).collect()
}

/// Density on the equispaced grid.
pub fn von_mises_kde(s: &AngleSample, spec: &KdeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let kde = Kde::new(s, spec.concentration)?;
    Ok(grid_angles(spec.grid_size).into_iter().map(|t| kde.eval(t)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolinOptions {
    pub ring_base: f64,
    pub density_scale: f64,
    pub clip: ClipMode,
}

impl Default for ViolinOptions {
    fn default() -> Self {
        ViolinOptions { ring_base: 1.0, density_scale: 0.35, clip: ClipMode::Angular }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolinGeometry {
    pub ring_base: f64,
    pub density_scale: f64,
    pub clip_mode: ClipMode,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub max_density: f64,
    /// Largest of `f̂(μ̃ − c)`, `f̂(μ̃ + c)`; `None` without a cutoff.
    pub clip_value: Option<f64>,
    pub median: f64,
    pub cutoff: Option<f64>,
    pub box_low: f64,
    pub box_high: f64,
    /// Half ring thickness at each grid angle.
    pub thickness: Vec<f64>,
    pub flagged_points: Vec<f64>,
    pub marker_radius: f64,
    #[serde(skip)]
    kde: Kde,
}

impl ViolinGeometry {
    fn clipped(&self, theta: f64, f: f64) -> f64 {
        match (self.clip_mode, self.cutoff, self.clip_value) {
            (ClipMode::Angular, Some(c), _) => {
                if (canon(theta - self.median)).abs() <= c {
                    f
                } else {
                    0.0
                }
            }
            (ClipMode::Height, _, Some(v)) => f.min(v),
            _ => f,
        }
    }

    /// Half ring thickness at any angle.
    pub fn thickness_at(&self, theta: f64) -> f64 {
        self.density_scale * self.clipped(theta, self.kde.eval(theta)) / self.max_density
    }

    pub fn outer_radius(&self, k: usize) -> f64 {
        self.ring_base + self.thickness[k]
    }

    pub fn inner_radius(&self, k: usize) -> f64 {
        self.ring_base - self.thickness[k]
    }
}

/// Assembles the violin from a sample, its detection report and a kernel.
pub fn build_violin(
    s: &AngleSample,
    report: &DetectionReport,
    spec: &KdeSpec,
    opts: &ViolinOptions,
) -> Result<ViolinGeometry> {
    spec.validate()?;
    if report.points.len() != s.len() {
        return Err(Error::InvalidArgument("detection report does not match sample".into()));
    }
    if !(opts.density_scale > 0.0 && opts.density_scale < opts.ring_base) {
        return Err(Error::OutOfRange { what: "density scale", value: opts.density_scale });
    }
    let kde = Kde::new(s, spec.concentration)?;
    let grid = grid_angles(spec.grid_size);
    let density: Vec<f64> = grid.iter().map(|&t| kde.eval(t)).collect();
    let max_density = kde.max_value(&grid, &density);
    let median = report.median;
    let clip_value = report.cutoff.map(|c| kde.eval(median - c).max(kde.eval(median + c)));
    let (box_low, box_high) = circular_quartiles(s, median);
    let flagged_points = report.points.iter().filter(|p| p.flagged).map(|p| p.angle).collect();
    let mut g = ViolinGeometry {
        ring_base: opts.ring_base,
        density_scale: opts.density_scale,
        clip_mode: opts.clip,
        grid,
        density,
        max_density,
        clip_value,
        median,
        cutoff: report.cutoff,
        box_low,
        box_high,
        thickness: Vec::new(),
        flagged_points,
        marker_radius: opts.ring_base + opts.density_scale + 0.08,
        kde,
    };
    g.thickness = g
        .grid
        .iter()
        .zip(&g.density)
        .map(|(&t, &f)| g.density_scale * g.clipped(t, f) / g.max_density)
        .collect();
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub size: u32,
    pub ring_fill: String,
    pub ring_stroke: String,
    pub stroke_width: f64,
    pub box_color: String,
    pub box_width: f64,
    pub median_color: String,
    pub outlier_color: String,
    pub background: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            size: 480,
            ring_fill: "#9ecae1".into(),
            ring_stroke: "#3182bd".into(),
            stroke_width: 1.0,
            box_color: "#08306b".into(),
            box_width: 6.0,
            median_color: "#ffffff".into(),
            outlier_color: "#de2d26".into(),
            background: "#ffffff".into(),
        }
    }
}

struct Canvas {
    c: f64,
    unit: f64,
}

impl Canvas {
    /// Zero to the east, counterclockwise.
    fn xy(&self, r: f64, theta: f64) -> (f64, f64) {
        (self.c + self.unit * r * theta.cos(), self.c - self.unit * r * theta.sin())
    }

    fn pt(&self, out: &mut String, cmd: char, r: f64, theta: f64) {
        let (x, y) = self.xy(r, theta);
        let _ = write!(out, "{cmd}{x:.3},{y:.3} ");
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;")
}

/// Renders the geometry as a standalone SVG 1.1 document.
pub fn render_svg(g: &ViolinGeometry, style: &SvgStyle) -> String {
    let size = style.size as f64;
    let cv = Canvas { c: size / 2.0, unit: size / 2.0 / (g.marker_radius + 0.12) };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        style.size
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="{}"/>"#, escape(&style.background));

    let mut ring = String::new();
    let n = g.grid.len();
    for k in 0..n {
        cv.pt(&mut ring, if k == 0 { 'M' } else { 'L' }, g.outer_radius(k), g.grid[k]);
    }
    cv.pt(&mut ring, 'L', g.outer_radius(0), g.grid[0]);
    cv.pt(&mut ring, 'M', g.inner_radius(0), g.grid[0]);
    for k in (0..n).rev() {
        cv.pt(&mut ring, 'L', g.inner_radius(k), g.grid[k]);
    }
    ring.push('Z');
    let _ = writeln!(
        out,
        r#"<path class="ring" d="{}" fill="{}" fill-rule="evenodd" stroke="{}" stroke-width="{}"/>"#,
        ring,
        escape(&style.ring_fill),
        escape(&style.ring_stroke),
        style.stroke_width
    );

    // box arc from the lower to the upper quartile through the median
    let lo = canon(g.box_low - g.median);
    let hi = canon(g.box_high - g.median);
    let steps = 64;
    let mut arc = String::new();
    for i in 0..=steps {
        let t = g.median + lo + (hi - lo) * i as f64 / steps as f64;
        cv.pt(&mut arc, if i == 0 { 'M' } else { 'L' }, g.ring_base, t);
    }
    let _ = writeln!(
        out,
        r#"<path class="box" d="{}" fill="none" stroke="{}" stroke-width="{}" stroke-linecap="butt"/>"#,
        arc.trim_end(),
        escape(&style.box_color),
        style.box_width
    );

    let (x1, y1) = cv.xy(g.ring_base - 0.06, g.median);
    let (x2, y2) = cv.xy(g.ring_base + 0.06, g.median);
    let _ = writeln!(
        out,
        r#"<line class="median" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{}" stroke-width="2"/>"#,
        escape(&style.median_color)
    );

    for &a in &g.flagged_points {
        let (x, y) = cv.xy(g.marker_radius, a);
        let _ = writeln!(
            out,
            r#"<circle class="outlier" cx="{x:.3}" cy="{y:.3}" r="4" fill="{}"/>"#,
            escape(&style.outlier_color)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{detect, DetectionConfig};
    use crate::distributions::CircularModel;
    use crate::special::bessel_i;

    fn cluster() -> AngleSample {
        CircularModel::von_mises(0.7, 4.0).unwrap().sample(60, 3).unwrap()
    }

    #[test]
    fn kde_integrates_to_one_and_is_positive() {
        for &nu in &[0.05, 2.0, 40.0] {
            let spec = KdeSpec { concentration: nu, grid_size: 512 };
            let f = von_mises_kde(&cluster(), &spec).unwrap();
            assert!(f.iter().all(|&v| v > 0.0));
            let total = f.iter().sum::<f64>() * TAU / f.len() as f64;
            assert!((total - 1.0).abs() < 1e-3, "{nu}: {total}");
        }
    }

    #[test]
    fn kde_limits() {
        let s = AngleSample::new(vec![0.0, -PI]).unwrap();
        let kde = Kde::new(&s, 3.0).unwrap();
        assert!((kde.eval(0.0) - kde.eval(PI)).abs() < 1e-14);
        let flat = Kde::new(&cluster(), 1e-9).unwrap();
        for &t in &[-3.0, 0.0, 2.0] {
            assert!((flat.eval(t) - 1.0 / TAU).abs() < 1e-8);
        }
        assert!(Kde::new(&AngleSample::new(vec![1.0]).unwrap(), 1.0).is_err());
    }

    #[test]
    fn bandwidth_formula() {
        let k: f64 = 3.88;
        let direct = (3.0 * 14.0 * k * k * bessel_i(2, 2.0 * k).unwrap()
            / (4.0 * PI.sqrt() * bessel_i(0, k).unwrap().powi(2)))
        .powf(0.4);
        assert!((default_bandwidth(14, k).unwrap() - direct).abs() < 1e-12 * direct);
        let ratio = default_bandwidth(28, k).unwrap() / default_bandwidth(14, k).unwrap();
        assert!((ratio - 2f64.powf(0.4)).abs() < 1e-12);
        assert_eq!(default_bandwidth(14, 0.0).unwrap(), 1.0);
        assert_eq!(default_bandwidth(14, f64::INFINITY).unwrap(), 1.0);
    }

    fn geometry(s: &AngleSample, clip: ClipMode) -> ViolinGeometry {
        let r = detect(s, &DetectionConfig { alpha: 0.05, ..Default::default() }).unwrap();
        let spec = KdeSpec::new(default_bandwidth(s.len(), r.parameter).unwrap()).unwrap();
        build_violin(s, &r, &spec, &ViolinOptions { clip, ..Default::default() }).unwrap()
    }

    #[test]
    fn mirroring_and_clipping() {
        let s = cluster();
        for clip in [ClipMode::Angular, ClipMode::Height] {
            let g = geometry(&s, clip);
            for k in 0..g.grid.len() {
                let outer = g.outer_radius(k) - g.ring_base;
                let inner = g.ring_base - g.inner_radius(k);
                assert!((outer - inner).abs() <= 1e-12);
                assert!(g.thickness[k] >= 0.0 && g.thickness[k] <= g.density_scale + 1e-15);
            }
            if clip == ClipMode::Height {
                let cap = g.density_scale * g.clip_value.unwrap() / g.max_density;
                assert!(g.thickness.iter().all(|&t| t <= cap + 1e-15));
            } else {
                let c = g.cutoff.unwrap();
                for (k, &t) in g.grid.iter().enumerate() {
                    if canon(t - g.median).abs() > c {
                        assert_eq!(g.thickness[k], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_covariance() {
        let s = cluster();
        let g = geometry(&s, ClipMode::Angular);
        let c = 1.234;
        let r = geometry(&s.rotated(c), ClipMode::Angular);
        assert!(canon(r.median - g.median - c).abs() < 1e-9);
        assert!(canon(r.box_low - g.box_low - c).abs() < 1e-9);
        assert!(canon(r.box_high - g.box_high - c).abs() < 1e-9);
        for &t in &[-2.0, 0.3, 0.9, 1.5] {
            assert!((r.thickness_at(t + c) - g.thickness_at(t)).abs() < 1e-9);
        }
        assert_eq!(r.flagged_points.len(), g.flagged_points.len());
        for (a, b) in r.flagged_points.iter().zip(&g.flagged_points) {
            assert!(canon(a - b - c).abs() < 1e-9);
        }
    }

    #[test]
    fn svg_structure() {
        let mut v: Vec<f64> = (0..20).map(|i| 0.05 * i as f64).collect();
        v.push(3.0);
        let s = AngleSample::new(v).unwrap();
        let g = geometry(&s, ClipMode::Angular);
        let svg = render_svg(&g, &SvgStyle::default());
        assert_eq!(svg, render_svg(&g, &SvgStyle::default()));
        assert_eq!(svg.matches("class=\"ring\"").count(), 1);
        assert_eq!(svg.matches("class=\"box\"").count(), 1);
        assert_eq!(svg.matches("class=\"median\"").count(), 1);
        assert_eq!(svg.matches("class=\"outlier\"").count(), g.flagged_points.len());
        assert!(!g.flagged_points.is_empty());
        let tight = AngleSample::new((0..20).map(|i| 0.01 * i as f64).collect()).unwrap();
        let r = detect(&tight, &DetectionConfig { alpha: 1e-6, ..Default::default() }).unwrap();
        let spec = KdeSpec::new(5.0).unwrap();
        let g = build_violin(&tight, &r, &spec, &ViolinOptions::default()).unwrap();
        assert_eq!(render_svg(&g, &SvgStyle::default()).matches("class=\"outlier\"").count(), 0);
    }
}
