//! Angles, samples and classical circular summaries.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};

/// Resultant lengths below this make the mean direction meaningless.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Two Fréchet objective values closer than this are treated as tied.
const MEDIAN_TIE_TOLERANCE: f64 = 1e-11;

/// Maps a finite real number to its representative in `[-π, π)`.
pub fn canonicalize(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidAngle(x));
    }
    Ok(canon(x))
}

/// Infallible canonicalization for values already known to be finite.
pub(crate) fn canon(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r >= PI {
        -PI
    } else {
        r
    }
}

/// Shortest arc distance `π − |π − |a − b||`, in `[0, π]`.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = PI - (PI - (a - b).abs()).abs();
    d.max(0.0)
}

/// A non-empty sample of canonical angles with optional per-point labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSample {
    angles: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl AngleSample {
    /// Builds a sample from radians, canonicalizing every value.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let angles = values.into_iter().map(canonicalize).collect::<Result<Vec<_>>>()?;
        Ok(AngleSample { angles, labels: None })
    }

    pub fn from_degrees(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|d| d.to_radians()).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.angles.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} angles",
                labels.len(),
                self.angles.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// The sample shifted by `c` radians.
    pub fn rotated(&self, c: f64) -> Self {
        AngleSample {
            angles: self.angles.iter().map(|&a| canon(a + c)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// The sample mirrored through the zero direction.
    pub fn reflected(&self) -> Self {
        AngleSample {
            angles: self.angles.iter().map(|&a| canon(-a)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// A copy without the points at the given indices.
    pub fn without(&self, indices: &[usize]) -> Result<Self> {
        let angles: Vec<f64> = self
            .angles
            .iter()
            .enumerate()
            .filter(|(i, _)| !indices.contains(i))
            .map(|(_, &a)| a)
            .collect();
        AngleSample::new(angles)
    }

    /// Angles sorted ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.angles.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Sample circular mean direction and mean resultant length.
pub fn circular_mean(s: &AngleSample) -> Result<(f64, f64)> {
    let (c, sn) = trig_sums(s.angles());
    let n = s.len() as f64;
    let rho = ((c * c + sn * sn).sqrt() / n).min(1.0);
    if rho < MEAN_TOLERANCE {
        return Err(Error::DegenerateResultant { resultant: rho });
    }
    Ok((canon(sn.atan2(c)), rho))
}

/// Sample mean resultant length; defined for every sample.
pub fn mean_resultant_length(s: &AngleSample) -> f64 {
    let (c, sn) = trig_sums(s.angles());
    ((c * c + sn * sn).sqrt() / s.len() as f64).min(1.0)
}

fn trig_sums(angles: &[f64]) -> (f64, f64) {
    angles.iter().fold((0.0, 0.0), |(c, s), &a| (c + a.cos(), s + a.sin()))
}

/// Circular standard deviation `√(2(1 − ρ̂))`.
pub fn csd(s: &AngleSample) -> f64 {
    csd_from_resultant(mean_resultant_length(s))
}

pub fn csd_from_resultant(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).max(0.0).sqrt()
}

/// Mean, resultant length, CSD and (if unique) the Fréchet median of a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularSummary {
    pub mean: Option<f64>,
    pub resultant_length: f64,
    pub csd: f64,
    pub median: Option<f64>,
}

pub fn summarize(s: &AngleSample) -> CircularSummary {
    let resultant_length = mean_resultant_length(s);
    CircularSummary {
        mean: circular_mean(s).ok().map(|(m, _)| m),
        resultant_length,
        csd: csd_from_resultant(resultant_length),
        median: frechet_median(s).ok(),
    }
}

/// Evaluates the mean arc distance objective at arbitrary points in
/// `O(log n)` each, after an `O(n log n)` setup.
pub(crate) struct FrechetObjective {
    ext: Vec<f64>,
    prefix: Vec<f64>,
    n: usize,
}

impl FrechetObjective {
    pub(crate) fn new(angles: &[f64]) -> Self {
        let mut sorted = angles.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut ext = Vec::with_capacity(3 * n);
        ext.extend(sorted.iter().map(|a| a - TAU));
        ext.extend(sorted.iter().copied());
        ext.extend(sorted.iter().map(|a| a + TAU));
        let mut prefix = Vec::with_capacity(3 * n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &x in &ext {
            acc += x;
            prefix.push(acc);
        }
        FrechetObjective { ext, prefix, n }
    }

    /// `(1/n) Σ d(θᵢ, m)` for canonical `m`.
    pub(crate) fn value(&self, m: f64) -> f64 {
        let lo = self.ext.partition_point(|&x| x < m - PI);
        let hi = lo + self.n;
        let mid = lo + self.ext[lo..hi].partition_point(|&x| x < m);
        let left_cnt = (mid - lo) as f64;
        let right_cnt = (hi - mid) as f64;
        let left_sum = self.prefix[mid] - self.prefix[lo];
        let right_sum = self.prefix[hi] - self.prefix[mid];
        (left_cnt * m - left_sum + right_sum - right_cnt * m) / self.n as f64
    }
}

/// Sample Fréchet median: the minimizer of the mean shortest-arc distance.
///
/// The objective is piecewise linear with breakpoints at the sample points
/// and their antipodes, so only those 2n candidates are evaluated. A tied
/// contiguous arc of minimizers resolves to its midpoint; disjoint minimizers
/// (or the whole circle) are reported as [`Error::NonUniqueMedian`].
pub fn frechet_median(s: &AngleSample) -> Result<f64> {
    let angles = s.angles();
    let objective = FrechetObjective::new(angles);
    let mut candidates: Vec<f64> =
        angles.iter().flat_map(|&a| [a, canon(a + PI)]).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let values: Vec<f64> = candidates.iter().map(|&m| objective.value(m)).collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let minimal: Vec<bool> = values.iter().map(|&v| v <= best + MEDIAN_TIE_TOLERANCE).collect();

    let k = candidates.len();
    if minimal.iter().all(|&b| b) {
        return Err(Error::NonUniqueMedian);
    }
    // Start scanning just after a non-minimal candidate so runs do not wrap.
    let first_gap = minimal.iter().position(|&b| !b).expect("a non-minimal candidate exists");
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for step in 1..=k {
        let i = (first_gap + step) % k;
        match (minimal[i], current.as_mut()) {
            (true, Some(run)) => run.1 = i,
            (true, None) => current = Some((i, i)),
            (false, Some(_)) => runs.push(current.take().expect("open run")),
            (false, None) => {}
        }
    }
    if let Some(run) = current {
        runs.push(run);
    }
    if runs.len() != 1 {
        return Err(Error::NonUniqueMedian);
    }
    let (start, end) = runs[0];
    let a = candidates[start];
    let mut b = candidates[end];
    if b < a {
        b += TAU;
    }
    Ok(canon(0.5 * (a + b)))
}

/// Lower and upper circular quartiles around `median`: the ⌈n/4⌉-th point
/// counted clockwise and counterclockwise from the median.
///
/// Points coinciding with the median belong to neither side. If a side has
/// fewer than ⌈n/4⌉ points, its farthest point is used (or the median itself
/// when that side is empty).
pub fn circular_quartiles(s: &AngleSample, median: f64) -> (f64, f64) {
    let k = s.len().div_ceil(4);
    let mut above: Vec<f64> = Vec::new();
    let mut below: Vec<f64> = Vec::new();
    for &a in s.angles() {
        let delta = canon(a - median);
        if delta > 0.0 {
            above.push(delta);
        } else if delta < 0.0 {
            below.push(-delta);
        }
    }
    let pick = |mut side: Vec<f64>| -> f64 {
        side.sort_by(f64::total_cmp);
        match side.len() {
            0 => 0.0,
            len => side[(k - 1).min(len - 1)],
        }
    };
    let high = pick(above);
    let low = pick(below);
    (canon(median - low), canon(median + high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(v: &[f64]) -> AngleSample {
        AngleSample::new(v.to_vec()).unwrap()
    }

    fn brute_objective(angles: &[f64], m: f64) -> f64 {
        angles.iter().map(|&a| arc_distance(a, m)).sum::<f64>() / angles.len() as f64
    }

    #[test]
    fn canonicalize_examples() {
        assert!((canonicalize(1.5 * PI).unwrap() + 0.5 * PI).abs() < 1e-15);
        assert_eq!(canonicalize(-PI).unwrap(), -PI);
        assert_eq!(canonicalize(PI).unwrap(), -PI);
        assert_eq!(canonicalize(0.0).unwrap(), 0.0);
        assert!(canonicalize(f64::NAN).is_err());
        assert!(canonicalize(f64::INFINITY).is_err());
    }

    #[test]
    fn arc_distance_examples() {
        assert!((arc_distance(0.0, PI) - PI).abs() < 1e-15);
        assert!((arc_distance(-3.0, 3.0) - (TAU - 6.0)).abs() < 1e-12);
        assert!((arc_distance(0.5, 0.7) - 0.2).abs() < 1e-12);
        assert_eq!(arc_distance(1.0, 1.0), 0.0);
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let [a, b, c]: [f64; 3] = std::array::from_fn(|_| rng.random_range(-PI..PI));
            assert!(arc_distance(a, c) <= arc_distance(a, b) + arc_distance(b, c) + 1e-12);
        }
    }

    #[test]
    fn mean_examples() {
        assert_eq!(circular_mean(&sample(&[0.3])).unwrap(), (0.3, 1.0));
        let (m, r) = circular_mean(&sample(&[-0.4, 0.4])).unwrap();
        assert!(m.abs() < 1e-15 && (r - 0.4f64.cos()).abs() < 1e-15);
        assert!(matches!(
            circular_mean(&sample(&[0.0, PI])),
            Err(Error::DegenerateResultant { .. })
        ));
    }

    #[test]
    fn csd_examples() {
        assert_eq!(csd(&sample(&[1.2])), 0.0);
        assert!((csd(&sample(&[0.0, PI])) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn median_examples() {
        assert!(frechet_median(&sample(&[-1.0, 0.0, 1.0])).unwrap().abs() < 1e-15);
        assert_eq!(frechet_median(&sample(&[0.2])).unwrap(), 0.2);
        // whole circle is minimal for antipodal pairs
        assert!(matches!(frechet_median(&sample(&[0.0, PI])), Err(Error::NonUniqueMedian)));
        // two points: every point of the shorter arc between them is minimal
        let m = frechet_median(&sample(&[0.2, 0.6])).unwrap();
        assert!((m - 0.4).abs() < 1e-12);
    }

    #[test]
    fn median_disjoint_minimizers_are_rejected() {
        // equally spaced triangle: the three points tie, separated by non-minimal arcs
        let s = sample(&[0.0, TAU / 3.0, -TAU / 3.0]);
        assert!(matches!(frechet_median(&s), Err(Error::NonUniqueMedian)));
    }

    #[test]
    fn median_beats_every_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.random_range(1..=50);
            let spread = rng.random_range(0.1..3.0);
            let c = rng.random_range(-PI..PI);
            let v: Vec<f64> = (0..n).map(|_| c + rng.random_range(-spread..spread)).collect();
            let s = AngleSample::new(v).unwrap();
            let Ok(m) = frechet_median(&s) else { continue };
            let at_m = brute_objective(s.angles(), m);
            for &a in s.angles() {
                assert!(at_m <= brute_objective(s.angles(), a) + 1e-12);
                assert!(at_m <= brute_objective(s.angles(), canon(a + PI)) + 1e-12);
            }
        }
    }

    #[test]
    fn fast_objective_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..=60);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
            let obj = FrechetObjective::new(&v);
            for _ in 0..10 {
                let m = rng.random_range(-PI..PI);
                assert!((obj.value(m) - brute_objective(&v, m)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quartile_examples() {
        let h = 0.3;
        let s = sample(&[-2.0 * h, -h, 0.0, h, 2.0 * h]);
        let (lo, hi) = circular_quartiles(&s, 0.0);
        assert!((lo + 0.6).abs() < 1e-12 && (hi - 0.6).abs() < 1e-12);
        assert_eq!(circular_quartiles(&sample(&[1.0]), 1.0), (1.0, 1.0));
        let grid: Vec<f64> = (0..8).map(|k| -PI + k as f64 * PI / 4.0).collect();
        let (lo, hi) = circular_quartiles(&sample(&grid), 0.0);
        assert!((lo + PI / 2.0).abs() < 1e-12 && (hi - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_and_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.random_range(3..40);
            let v: Vec<f64> = (0..n).map(|_| 0.8 * rng.random_range(-1.0..1.0f64)).collect();
            let s = AngleSample::new(v).unwrap();
            let c = rng.random_range(-10.0..10.0);
            let r = s.rotated(c);
            assert!((csd(&r) - csd(&s)).abs() < 1e-12);
            assert!((csd(&s.reflected()) - csd(&s)).abs() < 1e-12);
            let (m0, _) = circular_mean(&s).unwrap();
            let (m1, _) = circular_mean(&r).unwrap();
            assert!(arc_distance(m1, canon(m0 + c)) < 1e-12);
            if let Ok(med) = frechet_median(&s) {
                let med_r = frechet_median(&r).unwrap();
                assert!(arc_distance(med_r, canon(med + c)) < 1e-12);
                let med_f = frechet_median(&s.reflected()).unwrap();
                assert!(arc_distance(med_f, canon(-med)) < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn canonicalization_invariants(x in -1e4f64..1e4) {
            let c = canonicalize(x).unwrap();
            prop_assert!((-PI..PI).contains(&c));
            prop_assert_eq!(canonicalize(c).unwrap(), c);
            let shifted = canonicalize(x + TAU).unwrap();
            prop_assert!(arc_distance(shifted, c) < 1e-9);
            let k = (x - c) / TAU;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }

        #[test]
        fn summary_csd_matches_resultant(v in proptest::collection::vec(-PI..PI, 1..40)) {
            let s = AngleSample::new(v).unwrap();
            let sum = summarize(&s);
            prop_assert!((0.0..=1.0).contains(&sum.resultant_length));
            prop_assert!((sum.csd - (2.0 * (1.0 - sum.resultant_length)).sqrt()).abs() < 1e-12);
        }
    }
}
