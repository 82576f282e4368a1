//! Cohort effect index series, its coefficient of variation, and peak
//! (generation gap) detection.
//!
//! Cohorts are keyed by birth year `year - age`: the cohort direction on the
//! grid advances year and age together, which keeps the birth year fixed.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryField, GeometryOptions};
use crate::surface::{MortalitySurface, Sex};

/// Default upper birth year kept when trimming the young-cohort tail.
pub const DEFAULT_TRIM_YEAR: i32 = 1970;
/// Default analysis window for AICE and generation gaps.
pub const DEFAULT_WINDOW: (i32, i32) = (1922, 1970);

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("geometry field ({0}x{1} from {2}/{3}) does not match surface ({4}x{5} from {6}/{7})")]
    Mismatch(usize, usize, i32, i32, usize, usize, i32, i32),
    #[error("series is empty after trimming at {0}")]
    EmptySeries(i32),
    #[error("window [{0}, {1}] contains {2} entries; at least 2 are required")]
    SampleSize(i32, i32, usize),
    #[error("mean CEI over the window is zero; AICE is undefined")]
    UndefinedAice,
    #[error("invalid window [{0}, {1}]")]
    Window(i32, i32),
    #[error("invalid peak parameters: {0}")]
    Parameters(String),
}

/// How per-point contributions are combined within a cohort.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Plain sum over the cohort's points.
    #[default]
    Sum,
    /// Sum divided by the number of contributing points.
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeiEntry {
    pub cei: f64,
    pub point_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub sex: Sex,
    pub source_label: String,
    pub z_scale: f64,
    pub log_rates: bool,
    pub grid_step: f64,
    pub normalization: Normalization,
}

/// Cohort effect index per birth year, over a contiguous range of birth years.
#[derive(Clone, Debug, PartialEq)]
pub struct CeiSeries {
    entries: BTreeMap<i32, CeiEntry>,
    pub meta: SeriesMeta,
}

impl CeiSeries {
    /// Builds a series from `(birth_year, cei, point_count)` rows.
    ///
    /// Rows must cover consecutive birth years; values must be finite and
    /// nonnegative.
    pub fn from_entries(
        rows: impl IntoIterator<Item = (i32, CeiEntry)>,
        meta: SeriesMeta,
    ) -> Result<Self, AnalyticsError> {
        let entries: BTreeMap<i32, CeiEntry> = rows.into_iter().collect();
        let years: Vec<i32> = entries.keys().copied().collect();
        if years.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(AnalyticsError::Parameters("birth years must be contiguous".into()));
        }
        if entries.values().any(|e| !(e.cei >= 0.0 && e.cei.is_finite())) {
            return Err(AnalyticsError::Parameters("CEI values must be finite and >= 0".into()));
        }
        Ok(Self { entries, meta })
    }

    /// Series with unit point counts built from plain values starting at `first_year`.
    pub fn from_values(first_year: i32, values: &[f64]) -> Result<Self, AnalyticsError> {
        Self::from_entries(
            values.iter().enumerate().map(|(k, &cei)| (first_year + k as i32, CeiEntry { cei, point_count: 1 })),
            SeriesMeta {
                sex: Sex::Total,
                source_label: String::new(),
                z_scale: 1.0,
                log_rates: false,
                grid_step: 1.0,
                normalization: Normalization::Sum,
            },
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_year(&self) -> Option<i32> {
        self.entries.keys().next().copied()
    }

    pub fn last_year(&self) -> Option<i32> {
        self.entries.keys().next_back().copied()
    }

    pub fn get(&self, birth_year: i32) -> Option<&CeiEntry> {
        self.entries.get(&birth_year)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i32, &CeiEntry)> + '_ {
        self.entries.iter().map(|(y, e)| (*y, e))
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.values().map(|e| e.cei).collect()
    }

    /// Entries with birth years inside `window`.
    pub fn window(&self, window: RangeInclusive<i32>) -> impl DoubleEndedIterator<Item = (i32, &CeiEntry)> + '_ {
        self.entries.range(window).map(|(y, e)| (*y, e))
    }

    /// Copy of the series with every value multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|(y, e)| (*y, CeiEntry { cei: e.cei * k, ..*e })).collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Sums `|NC_1 - NC_2|` over the valid points of each birth cohort.
///
/// Every birth year from `first_year - last_age` to `last_year - first_age`
/// gets an entry; cohorts without valid points have `cei = 0`.
pub fn cei_series(
    field: &GeometryField,
    surface: &MortalitySurface,
    normalization: Normalization,
) -> Result<CeiSeries, AnalyticsError> {
    if field.n_years() != surface.n_years()
        || field.n_ages() != surface.n_ages()
        || field.first_year() != surface.first_year()
        || field.first_age() != surface.first_age()
    {
        return Err(AnalyticsError::Mismatch(
            field.n_years(),
            field.n_ages(),
            field.first_year(),
            field.first_age(),
            surface.n_years(),
            surface.n_ages(),
            surface.first_year(),
            surface.first_age(),
        ));
    }
    let lo = surface.first_year() - surface.last_age();
    let hi = surface.last_year() - surface.first_age();
    let mut entries: BTreeMap<i32, CeiEntry> =
        (lo..=hi).map(|c| (c, CeiEntry { cei: 0.0, point_count: 0 })).collect();
    for (year, age, p) in field.iter() {
        if !p.valid {
            continue;
        }
        let e = entries.get_mut(&(year - age)).expect("birth year within range");
        e.cei += (p.normal_curvatures[0] - p.normal_curvatures[1]).abs();
        e.point_count += 1;
    }
    if normalization == Normalization::Mean {
        for e in entries.values_mut() {
            if e.point_count > 0 {
                e.cei /= e.point_count as f64;
            }
        }
    }
    let GeometryOptions { z_scale, log_rates, grid_step } = *field.options();
    Ok(CeiSeries {
        entries,
        meta: SeriesMeta {
            sex: surface.sex(),
            source_label: surface.source_label().to_string(),
            z_scale,
            log_rates,
            grid_step,
            normalization,
        },
    })
}

/// Drops entries born after `max_birth_year`.
pub fn trim_series(series: &CeiSeries, max_birth_year: i32) -> Result<CeiSeries, AnalyticsError> {
    let entries: BTreeMap<i32, CeiEntry> =
        series.entries.range(..=max_birth_year).map(|(y, e)| (*y, *e)).collect();
    if entries.is_empty() {
        return Err(AnalyticsError::EmptySeries(max_birth_year));
    }
    Ok(CeiSeries { entries, meta: series.meta.clone() })
}

/// Location and extent of one run of elevated CEI values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub start_year: i32,
    pub end_year: i32,
    pub width_years: u32,
    pub max_cei: f64,
    pub max_year: i32,
}

/// Summary statistics and generation gaps of a CEI series over a window.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CohortReport {
    pub window: (i32, i32),
    pub n: usize,
    pub mean: Option<f64>,
    pub stdev: Option<f64>,
    pub aice: Option<f64>,
    pub peaks: Vec<Peak>,
    pub min_gap: Option<u32>,
    pub max_gap: Option<u32>,
}

fn check_window((y0, y1): (i32, i32)) -> Result<(), AnalyticsError> {
    if y0 > y1 {
        return Err(AnalyticsError::Window(y0, y1));
    }
    Ok(())
}

/// Aggregating index of cohort effect: sample standard deviation (n - 1
/// denominator) divided by the mean of the windowed CEI values.
pub fn aice(series: &CeiSeries, window: (i32, i32)) -> Result<CohortReport, AnalyticsError> {
    check_window(window)?;
    let values: Vec<f64> = series.window(window.0..=window.1).map(|(_, e)| e.cei).collect();
    let n = values.len();
    if n < 2 {
        return Err(AnalyticsError::SampleSize(window.0, window.1, n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if !(mean > 0.0) {
        return Err(AnalyticsError::UndefinedAice);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let stdev = var.sqrt();
    Ok(CohortReport {
        window,
        n,
        mean: Some(mean),
        stdev: Some(stdev),
        aice: Some(stdev / mean),
        ..Default::default()
    })
}

/// Rolling-median baseline and threshold used for peak detection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakParams {
    /// Odd window length of the centred rolling median, in years.
    pub median_width: usize,
    /// A year is elevated when `cei > threshold · baseline`.
    pub threshold: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self { median_width: 21, threshold: 1.25 }
    }
}

/// Centred rolling median of width `width` (odd). Near the ends the window
/// shrinks symmetrically, down to the point itself at the first and last
/// index.
pub fn rolling_median(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let n = values.len();
    let mut buf = Vec::with_capacity(width);
    (0..n)
        .map(|i| {
            let k = half.min(i).min(n - 1 - i);
            buf.clear();
            buf.extend_from_slice(&values[i - k..=i + k]);
            buf.sort_by(f64::total_cmp);
            buf[k]
        })
        .collect()
}

/// Finds maximal runs of consecutive years where the CEI exceeds
/// `threshold` times its rolling-median baseline.
pub fn detect_peaks(
    series: &CeiSeries,
    window: (i32, i32),
    params: &PeakParams,
) -> Result<CohortReport, AnalyticsError> {
    check_window(window)?;
    if params.median_width == 0 || params.median_width.is_multiple_of(2) {
        return Err(AnalyticsError::Parameters(format!(
            "median width must be odd and positive, got {}",
            params.median_width
        )));
    }
    if !(params.threshold > 0.0 && params.threshold.is_finite()) {
        return Err(AnalyticsError::Parameters(format!("threshold must be > 0, got {}", params.threshold)));
    }
    let (years, values): (Vec<i32>, Vec<f64>) = series.window(window.0..=window.1).map(|(y, e)| (y, e.cei)).unzip();
    if values.is_empty() {
        return Err(AnalyticsError::SampleSize(window.0, window.1, 0));
    }
    if values.len() < params.median_width {
        return Err(AnalyticsError::Parameters(format!(
            "window holds {} years, shorter than the median width {}",
            values.len(),
            params.median_width
        )));
    }
    let baseline = rolling_median(&values, params.median_width);
    let mut peaks = Vec::new();
    let mut run: Option<usize> = None;
    for i in 0..=values.len() {
        let elevated = i < values.len() && values[i] > params.threshold * baseline[i];
        match (elevated, run) {
            (true, None) => run = Some(i),
            (false, Some(start)) => {
                let (max_idx, max_cei) = (start..i)
                    .map(|k| (k, values[k]))
                    .fold((start, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                peaks.push(Peak {
                    start_year: years[start],
                    end_year: years[i - 1],
                    width_years: (i - start) as u32,
                    max_cei,
                    max_year: years[max_idx],
                });
                run = None;
            }
            _ => {}
        }
    }
    Ok(CohortReport {
        window,
        n: values.len(),
        min_gap: peaks.iter().map(|p| p.width_years).min(),
        max_gap: peaks.iter().map(|p| p.width_years).max(),
        peaks,
        ..Default::default()
    })
}

/// AICE and generation gaps combined in one report.
pub fn cohort_report(
    series: &CeiSeries,
    window: (i32, i32),
    params: &PeakParams,
) -> Result<CohortReport, AnalyticsError> {
    let stats = aice(series, window)?;
    let gaps = detect_peaks(series, window, params)?;
    Ok(CohortReport { mean: stats.mean, stdev: stats.stdev, aice: stats.aice, ..gaps })
}

/// Shape of the young-cohort tail of an untrimmed series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UShapeReport {
    pub split_year: i32,
    /// Least-squares slope of CEI against birth year over the tail, excluding
    /// the terminal drop. `None` with fewer than two such entries.
    pub tail_slope: Option<f64>,
    /// First birth year of the terminal drop, if any.
    pub drop_start: Option<i32>,
    pub rising_tail: bool,
}

/// Fraction of the preceding tail maximum below which trailing entries are
/// counted as the terminal drop.
pub const DROP_FRACTION: f64 = 0.5;

/// Describes the part of the series born after `split_year`: its linear trend
/// and where the final drop (cohorts with too few interior points) begins.
///
/// The drop is the longest suffix whose values all stay below
/// [`DROP_FRACTION`] times the largest tail value before it.
pub fn u_shape_diagnostic(series: &CeiSeries, split_year: i32) -> UShapeReport {
    let tail: Vec<(i32, f64)> = series.iter().filter(|(y, _)| *y > split_year).map(|(y, e)| (y, e.cei)).collect();
    let n = tail.len();
    let mut drop_at = n;
    if n >= 2 {
        let mut prefix_max = vec![0.0f64; n + 1];
        for k in 0..n {
            prefix_max[k + 1] = prefix_max[k].max(tail[k].1);
        }
        let mut suffix_max = 0.0f64;
        for d in (1..n).rev() {
            suffix_max = suffix_max.max(tail[d].1);
            if suffix_max < DROP_FRACTION * prefix_max[d] {
                drop_at = d;
            }
        }
    }
    let body = &tail[..drop_at];
    let tail_slope = (body.len() >= 2).then(|| {
        let m = body.len() as f64;
        let my = body.iter().map(|p| p.0 as f64).sum::<f64>() / m;
        let mv = body.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = body.iter().map(|p| (p.0 as f64 - my) * (p.1 - mv)).sum();
        let sxx: f64 = body.iter().map(|p| (p.0 as f64 - my).powi(2)).sum();
        sxy / sxx
    });
    UShapeReport {
        split_year,
        tail_slope,
        drop_start: (drop_at < n).then(|| tail[drop_at].0),
        rising_tail: tail_slope.is_some_and(|s| s > 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_geometry_field;

    fn series(first: i32, values: &[f64]) -> CeiSeries {
        CeiSeries::from_values(first, values).unwrap()
    }

    #[test]
    fn planar_surface_gives_zero_series() {
        let s = MortalitySurface::from_fn(1950, 0, 20, 30, Sex::Total, "plane", |y, a| {
            0.001 * (y - 1950) as f64 + 0.002 * a as f64 + 0.01
        })
        .unwrap();
        let f = compute_geometry_field(&s, &GeometryOptions::default()).unwrap();
        let c = cei_series(&f, &s, Normalization::Sum).unwrap();
        assert_eq!(c.first_year(), Some(1950 - 29));
        assert_eq!(c.last_year(), Some(1969));
        assert!(c.iter().all(|(_, e)| e.cei < 1e-12));
    }

    #[test]
    fn mismatched_field() {
        let a = MortalitySurface::from_fn(0, 0, 5, 5, Sex::Total, "", |_, _| 0.1).unwrap();
        let b = MortalitySurface::from_fn(1, 0, 5, 5, Sex::Total, "", |_, _| 0.1).unwrap();
        let f = compute_geometry_field(&a, &GeometryOptions::default()).unwrap();
        assert!(matches!(cei_series(&f, &b, Normalization::Sum), Err(AnalyticsError::Mismatch(..))));
    }

    #[test]
    fn mean_normalization_divides_by_count() {
        let s = MortalitySurface::from_fn(0, 0, 8, 8, Sex::Total, "", |y, a| {
            (0.3 * y as f64).sin().abs() * 0.01 + 0.001 * (a * a) as f64
        })
        .unwrap();
        let f = compute_geometry_field(&s, &GeometryOptions::default()).unwrap();
        let sum = cei_series(&f, &s, Normalization::Sum).unwrap();
        let mean = cei_series(&f, &s, Normalization::Mean).unwrap();
        for ((_, a), (_, b)) in sum.iter().zip(mean.iter()) {
            assert_eq!(a.point_count, b.point_count);
            if a.point_count > 0 {
                assert!((a.cei / a.point_count as f64 - b.cei).abs() < 1e-18);
            } else {
                assert_eq!((a.cei, b.cei), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn trim_counts_and_errors() {
        let s = series(1900, &vec![1.0; 106]);
        let t = trim_series(&s, 1970).unwrap();
        assert_eq!(t.len(), 71);
        assert_eq!((t.first_year(), t.last_year()), (Some(1900), Some(1970)));
        assert_eq!(trim_series(&t, 1970).unwrap(), t);
        assert_eq!(trim_series(&s, 1899), Err(AnalyticsError::EmptySeries(1899)));
    }

    #[test]
    fn aice_examples() {
        assert_eq!(aice(&series(0, &[4.0; 5]), (0, 4)).unwrap().aice, Some(0.0));
        let r = aice(&series(0, &[1.0, 2.0, 3.0]), (0, 2)).unwrap();
        assert_eq!((r.mean, r.stdev, r.aice), (Some(2.0), Some(1.0), Some(0.5)));
        let r10 = aice(&series(0, &[10.0, 20.0, 30.0]), (0, 2)).unwrap();
        assert_eq!(r10.aice, Some(0.5));
    }

    #[test]
    fn aice_errors() {
        assert_eq!(aice(&series(0, &[0.0; 4]), (0, 3)), Err(AnalyticsError::UndefinedAice));
        assert_eq!(aice(&series(0, &[1.0, 2.0]), (1, 5)), Err(AnalyticsError::SampleSize(1, 5, 1)));
        assert_eq!(aice(&series(0, &[1.0, 2.0]), (5, 1)), Err(AnalyticsError::Window(5, 1)));
    }

    #[test]
    fn rolling_median_shrinks_at_edges() {
        let v = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(rolling_median(&v, 3), vec![5.0, 4.0, 2.0, 3.0, 3.0]);
        assert_eq!(rolling_median(&v, 5), vec![5.0, 4.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn rectangular_pulse_is_one_peak() {
        let mut v = vec![1.0; 49];
        for x in &mut v[20..26] {
            *x = 3.0;
        }
        let r = detect_peaks(&series(1922, &v), (1922, 1970), &PeakParams::default()).unwrap();
        assert_eq!(r.peaks.len(), 1);
        let p = r.peaks[0];
        assert_eq!((p.start_year, p.end_year, p.width_years), (1942, 1947, 6));
        assert_eq!((r.min_gap, r.max_gap), (Some(6), Some(6)));
    }

    #[test]
    fn constant_series_has_no_peaks() {
        let r = detect_peaks(&series(1922, &[2.0; 49]), (1922, 1970), &PeakParams::default()).unwrap();
        assert!(r.peaks.is_empty());
        assert_eq!((r.min_gap, r.max_gap), (None, None));
    }

    #[test]
    fn peak_parameter_errors() {
        let s = series(1922, &[1.0; 10]);
        assert!(matches!(
            detect_peaks(&s, (1922, 1931), &PeakParams::default()),
            Err(AnalyticsError::Parameters(_))
        ));
        let even = PeakParams { median_width: 4, ..Default::default() };
        assert!(matches!(detect_peaks(&s, (1922, 1931), &even), Err(AnalyticsError::Parameters(_))));
    }

    #[test]
    fn u_shape_rising_then_zero() {
        let mut v: Vec<f64> = (0..30).map(|k| 1.0 + 0.1 * k as f64).collect();
        *v.last_mut().unwrap() = 0.0;
        let r = u_shape_diagnostic(&series(1960, &v), 1970);
        assert!(r.rising_tail);
        assert!(r.tail_slope.unwrap() > 0.0);
        assert_eq!(r.drop_start, Some(1989));
    }

    #[test]
    fn u_shape_flat() {
        let r = u_shape_diagnostic(&series(1960, &[1.0; 30]), 1970);
        assert_eq!(r.drop_start, None);
        assert!(r.tail_slope.unwrap().abs() < 1e-12);
        assert!(!r.rising_tail);
    }

    #[test]
    fn from_entries_rejects_gaps_and_negatives() {
        let meta = series(0, &[1.0]).meta;
        let e = |cei| CeiEntry { cei, point_count: 1 };
        assert!(CeiSeries::from_entries([(0, e(1.0)), (2, e(1.0))], meta.clone()).is_err());
        assert!(CeiSeries::from_entries([(0, e(-1.0))], meta).is_err());
    }
}
