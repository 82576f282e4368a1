//! CSV and JSON renderings of geometry fields, CEI series and reports.
//!
//! Output is deterministic: fixed column and key order, floats in shortest
//! round-trip form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analytics::{AnalyticsError, CeiEntry, CeiSeries, CohortReport, SeriesMeta, UShapeReport};
use crate::geometry::GeometryField;

pub const FIELD_CSV_HEADER: &str = "year,age,valid,n_t,n_x,n_z,nc1,nc2,nc3,nc4";
pub const SERIES_CSV_HEADER: &str = "birth_year,cei,point_count";

/// One row per grid point: year, age, validity, unit normal and the four
/// normal curvatures.
pub fn field_to_csv(field: &GeometryField) -> String {
    let mut out = String::with_capacity(field.points().len() * 64);
    out.push_str(FIELD_CSV_HEADER);
    out.push('\n');
    for (year, age, p) in field.iter() {
        let n = p.normal;
        let nc = p.normal_curvatures;
        writeln!(
            out,
            "{year},{age},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            u8::from(p.valid),
            n.x,
            n.y,
            n.z,
            nc[0],
            nc[1],
            nc[2],
            nc[3]
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct FieldPointDoc {
    year: i32,
    age: i32,
    valid: bool,
    normal: [f64; 3],
    normal_curvatures: [f64; 4],
}

#[derive(Serialize)]
struct FieldDoc<'a> {
    first_year: i32,
    first_age: i32,
    n_years: usize,
    n_ages: usize,
    options: &'a crate::geometry::GeometryOptions,
    valid_points: usize,
    points: Vec<FieldPointDoc>,
}

pub fn field_to_json(field: &GeometryField) -> String {
    let doc = FieldDoc {
        first_year: field.first_year(),
        first_age: field.first_age(),
        n_years: field.n_years(),
        n_ages: field.n_ages(),
        options: field.options(),
        valid_points: field.valid_count(),
        points: field
            .iter()
            .map(|(year, age, p)| FieldPointDoc {
                year,
                age,
                valid: p.valid,
                normal: p.normal.into(),
                normal_curvatures: p.normal_curvatures,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("field serializes")
}

pub fn series_to_csv(series: &CeiSeries) -> String {
    let mut out = String::from(SERIES_CSV_HEADER);
    out.push('\n');
    for (year, e) in series.iter() {
        writeln!(out, "{year},{:?},{}", e.cei, e.point_count).unwrap();
    }
    out
}

#[derive(Serialize, Deserialize)]
struct SeriesRow {
    birth_year: i32,
    cei: f64,
    point_count: usize,
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    meta: SeriesMeta,
    entries: Vec<SeriesRow>,
}

pub fn series_to_json(series: &CeiSeries) -> String {
    let doc = SeriesDoc {
        meta: series.meta.clone(),
        entries: series
            .iter()
            .map(|(birth_year, e)| SeriesRow { birth_year, cei: e.cei, point_count: e.point_count })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("series serializes")
}

#[derive(Debug, thiserror::Error)]
pub enum SeriesReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Series(#[from] AnalyticsError),
    #[error("expected header `{SERIES_CSV_HEADER}`")]
    Header,
}

/// Reads a series written by [`series_to_csv`]. Metadata is not stored in
/// the CSV form and is reset to defaults.
pub fn series_from_csv(text: &str) -> Result<CeiSeries, SeriesReadError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    if reader.headers()?.iter().collect::<Vec<_>>() != ["birth_year", "cei", "point_count"] {
        return Err(SeriesReadError::Header);
    }
    let rows: Vec<SeriesRow> = reader.deserialize().collect::<Result<_, _>>()?;
    let meta = CeiSeries::from_values(0, &[])?.meta;
    Ok(CeiSeries::from_entries(
        rows.into_iter().map(|r| (r.birth_year, CeiEntry { cei: r.cei, point_count: r.point_count })),
        meta,
    )?)
}

pub fn series_from_json(text: &str) -> Result<CeiSeries, SeriesReadError> {
    let doc: SeriesDoc = serde_json::from_str(text)?;
    Ok(CeiSeries::from_entries(
        doc.entries.into_iter().map(|r| (r.birth_year, CeiEntry { cei: r.cei, point_count: r.point_count })),
        doc.meta,
    )?)
}

pub fn report_to_json(report: &CohortReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Peaks as CSV: `start_year,end_year,width_years,max_year,max_cei`.
pub fn peaks_to_csv(report: &CohortReport) -> String {
    let mut out = String::from("start_year,end_year,width_years,max_year,max_cei\n");
    for p in &report.peaks {
        writeln!(out, "{},{},{},{},{:?}", p.start_year, p.end_year, p.width_years, p.max_year, p.max_cei).unwrap();
    }
    out
}

pub fn u_shape_to_json(report: &UShapeReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{cei_series, Normalization};
    use crate::geometry::{compute_geometry_field, GeometryOptions};
    use crate::surface::{MortalitySurface, Sex};

    fn sample() -> (MortalitySurface, GeometryField) {
        let s = MortalitySurface::from_fn(1990, 0, 5, 4, Sex::Total, "s", |y, a| {
            0.001 * ((y - 1990) * (y - 1990)) as f64 + 0.002 * (a * a) as f64
        })
        .unwrap();
        let f = compute_geometry_field(&s, &GeometryOptions::default()).unwrap();
        (s, f)
    }

    #[test]
    fn field_csv_has_one_row_per_point() {
        let (_, f) = sample();
        let csv = field_to_csv(&f);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(FIELD_CSV_HEADER));
        assert_eq!(lines.count(), 20);
        assert!(csv.contains("\n1991,1,1,"));
        assert!(csv.contains("\n1990,0,0,0.0,0.0,0.0,0.0,0.0,0.0,0.0\n"));
    }

    #[test]
    fn field_json_lists_points() {
        let (_, f) = sample();
        let v: serde_json::Value = serde_json::from_str(&field_to_json(&f)).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 20);
        assert_eq!(v["valid_points"], 6);
    }

    #[test]
    fn series_round_trips() {
        let (s, f) = sample();
        let series = cei_series(&f, &s, Normalization::Sum).unwrap();
        let back = series_from_json(&series_to_json(&series)).unwrap();
        assert_eq!(back, series);
        let back = series_from_csv(&series_to_csv(&series)).unwrap();
        assert_eq!(back.values(), series.values());
        assert!(series_to_csv(&series).starts_with("birth_year,cei,point_count\n"));
    }

    #[test]
    fn series_csv_rejects_wrong_header() {
        assert!(matches!(series_from_csv("year,value\n1,2\n"), Err(SeriesReadError::Header)));
    }
}
