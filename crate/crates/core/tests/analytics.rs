use cohort_core::analytics::{
    aice, cei_series, detect_peaks, trim_series, CeiSeries, Normalization, PeakParams,
};
use cohort_core::geometry::{compute_geometry_field, GeometryOptions};
use cohort_core::ingest::{parse_csv_matrix, parse_json, serialize, SurfaceFormat};
use cohort_core::oracle::{smooth_cei, AnalyticSurface, CohortMeasure};
use cohort_core::{MortalitySurface, Sex};
use proptest::prelude::*;

/// Independent walk over the grid: for every birth year, visit the points of
/// that cohort diagonal directly and add up |NC_1 - NC_2|.
fn naive_cei(field: &cohort_core::GeometryField, c: i32) -> (f64, usize) {
    let mut sum = 0.0;
    let mut count = 0;
    for i in 0..field.n_years() {
        let year = field.first_year() + i as i32;
        let age = year - c;
        let j = age - field.first_age();
        if j < 0 || j as usize >= field.n_ages() {
            continue;
        }
        let p = field.at(i, j as usize);
        if p.valid {
            sum += (p.normal_curvatures[0] - p.normal_curvatures[1]).abs();
            count += 1;
        }
    }
    (sum, count)
}

fn wavy_surface() -> MortalitySurface {
    MortalitySurface::from_fn(1930, 0, 40, 60, Sex::Total, "wavy", |y, a| {
        let (t, x) = ((y - 1930) as f64, a as f64);
        0.0002 * (0.07 * x).exp() * (1.0 + 0.2 * (0.9 * (t - x)).sin()) + 0.00005 * (0.3 * t).cos().abs()
    })
    .unwrap()
}

#[test]
fn cei_matches_naive_rewalk() {
    let s = wavy_surface();
    let f = compute_geometry_field(&s, &GeometryOptions::default()).unwrap();
    let series = cei_series(&f, &s, Normalization::Sum).unwrap();
    assert_eq!(series.len(), 40 + 60 - 1);
    for (c, e) in series.iter() {
        let (sum, count) = naive_cei(&f, c);
        assert_eq!(e.cei.to_bits(), sum.to_bits(), "birth year {c}");
        assert_eq!(e.point_count, count);
        assert!(e.cei >= 0.0);
        if count == 0 {
            assert_eq!(e.cei, 0.0);
        }
    }
}

#[test]
fn ridge_series_peaks_at_axis_and_matches_quadrature() {
    let ridge = AnalyticSurface::gaussian_ridge(50.0, 0.0);
    let s = ridge.materialize(0, 0, 100, 100, 1.0);
    let f = compute_geometry_field(&s, &GeometryOptions::default()).unwrap();
    let series = cei_series(&f, &s, Normalization::Sum).unwrap();
    let (argmax, peak) = series.iter().max_by(|a, b| a.1.cei.total_cmp(&b.1.cei)).unwrap();
    assert_eq!(argmax, 0);
    assert_eq!(peak.point_count, 98);
    // valid points on the axis are t = 1..=98; each stands for one unit of t
    let smooth = smooth_cei(&ridge, 0.0, (0.5, 98.5), 1.0, CohortMeasure::CalendarTime).unwrap();
    assert!((smooth - 7.84).abs() < 1e-9);
    assert!((peak.cei - smooth).abs() / smooth < 0.10);
    // far from the ridge the series is small
    assert!(series.get(40).unwrap().cei < 0.01 * peak.cei);
}

#[test]
fn peak_detection_on_constructed_series() {
    let mut v = vec![1.0; 49];
    for (k, x) in v.iter_mut().enumerate() {
        *x += 0.01 * ((k * 7) % 5) as f64;
    }
    for x in &mut v[8..11] {
        *x = 2.0;
    }
    for x in &mut v[25..35] {
        *x = 2.5;
    }
    let s = CeiSeries::from_values(1922, &v).unwrap();
    let r = detect_peaks(&s, (1922, 1970), &PeakParams::default()).unwrap();
    let spans: Vec<(i32, i32)> = r.peaks.iter().map(|p| (p.start_year, p.end_year)).collect();
    assert_eq!(spans, vec![(1930, 1932), (1947, 1956)]);
    assert_eq!((r.min_gap, r.max_gap), (Some(3), Some(10)));
}

fn positive_series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, 2..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn aice_is_scale_invariant(v in positive_series(), k in 0.01f64..1000.0) {
        let s = CeiSeries::from_values(1900, &v).unwrap();
        let w = (1900, 1900 + v.len() as i32 - 1);
        let a = aice(&s, w).unwrap().aice.unwrap();
        let b = aice(&s.scaled(k), w).unwrap().aice.unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn adding_a_constant_lowers_aice(v in positive_series(), shift in 0.1f64..10.0) {
        let s = CeiSeries::from_values(1900, &v).unwrap();
        let w = (1900, 1900 + v.len() as i32 - 1);
        let base = aice(&s, w).unwrap();
        prop_assume!(base.stdev.unwrap() > 1e-9);
        let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
        let t = aice(&CeiSeries::from_values(1900, &shifted).unwrap(), w).unwrap();
        prop_assert!(t.aice.unwrap() < base.aice.unwrap());
    }

    #[test]
    fn peaks_are_deterministic_and_inside_window(v in prop::collection::vec(0.0f64..5.0, 25..90), w in 1usize..6) {
        let s = CeiSeries::from_values(1900, &v).unwrap();
        let window = (1900, 1900 + v.len() as i32 - 1);
        let params = PeakParams { median_width: 2 * w + 1, threshold: 1.25 };
        let a = detect_peaks(&s, window, &params).unwrap();
        let b = detect_peaks(&s, window, &params).unwrap();
        prop_assert_eq!(&a, &b);
        for p in &a.peaks {
            prop_assert!(p.start_year <= p.end_year);
            prop_assert!(p.start_year >= window.0 && p.end_year <= window.1);
            prop_assert_eq!(p.width_years as i32, p.end_year - p.start_year + 1);
        }
    }

    #[test]
    fn trimming_is_monotone_and_idempotent(n in 5usize..60, y1 in 1900i32..1960, y2 in 1900i32..1960) {
        let s = CeiSeries::from_values(1900, &vec![1.0; n]).unwrap();
        let (lo, hi) = (y1.min(y2), y1.max(y2));
        let small = trim_series(&s, lo).unwrap();
        let large = trim_series(&s, hi).unwrap();
        prop_assert!(small.iter().all(|(y, _)| large.get(y).is_some()));
        prop_assert_eq!(trim_series(&small, lo).unwrap(), small);
    }

    #[test]
    fn surface_round_trips(
        (ny, na) in (1usize..6, 1usize..6),
        seed in prop::collection::vec(prop::option::weighted(0.8, 0.0f64..2.0), 36),
        first_year in 1800i32..2000,
    ) {
        let cells: Vec<Option<f64>> = seed.into_iter().take(ny * na).collect();
        let s = MortalitySurface::new(first_year, 0, ny, na, cells, Sex::Female, "rt").unwrap();
        let csv = serialize(&s, SurfaceFormat::Csv);
        prop_assert_eq!(parse_csv_matrix(&csv, first_year, 0, Sex::Female, "rt").unwrap(), s.clone());
        let json = serialize(&s, SurfaceFormat::Json);
        prop_assert_eq!(parse_json(&json).unwrap(), s);
    }
}
