//! Readers and writers for mortality surfaces.
//!
//! Three layouts are supported:
//!
//! * HMD `Mx_1x1` period death-rate text files (title line, blank line,
//!   `Year Age Female Male Total` header, whitespace-separated rows; the
//!   open age group `110+` is read as age 110 and `.` marks a missing rate),
//! * headerless CSV matrices (rows = years, columns = ages, empty field =
//!   missing),
//! * a JSON document `{years, ages, sex, source_label, rates, missing_mask}`.
//!
//! Floats are written in Rust's shortest round-trip representation, so
//! `parse(serialize(s)) == s` holds bit-for-bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::{MortalitySurface, Sex};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("parse error at row {row}, column {col}: `{token}` is not a number")]
    Cell { row: usize, col: usize, token: String },
    #[error("ragged CSV: row {row} has {found} fields, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("structural error: {0}")]
    Structure(String),
    #[error("duplicate entry for year {year}, age {age} (line {line})")]
    Duplicate { year: i32, age: i32, line: usize },
    #[error("invalid rate {value} at year {year}, age {age}: rates must be finite and >= 0")]
    Value { year: i32, age: i32, value: f64 },
    #[error("invalid JSON surface: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Line accounting for an HMD parse: every input line lands in exactly one bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HmdParseStats {
    pub total_lines: usize,
    pub preamble_lines: usize,
    pub data_rows: usize,
    pub blank_lines: usize,
}

/// The three sex-specific surfaces of one HMD file.
#[derive(Clone, Debug, PartialEq)]
pub struct HmdSurfaces {
    pub female: MortalitySurface,
    pub male: MortalitySurface,
    pub total: MortalitySurface,
    pub stats: HmdParseStats,
}

impl HmdSurfaces {
    pub fn get(&self, sex: Sex) -> &MortalitySurface {
        match sex {
            Sex::Female => &self.female,
            Sex::Male => &self.male,
            Sex::Total => &self.total,
        }
    }

    pub fn into_sex(self, sex: Sex) -> MortalitySurface {
        match sex {
            Sex::Female => self.female,
            Sex::Male => self.male,
            Sex::Total => self.total,
        }
    }
}

const HMD_HEADER: [&str; 5] = ["Year", "Age", "Female", "Male", "Total"];

fn parse_age_token(tok: &str) -> Option<i32> {
    tok.strip_suffix('+').unwrap_or(tok).parse().ok()
}

fn parse_rate_token(tok: &str) -> Option<Option<f64>> {
    if tok == "." {
        Some(None)
    } else {
        tok.parse::<f64>().ok().map(Some)
    }
}

/// Parses an HMD `Mx_1x1` file into female, male and total surfaces.
pub fn parse_hmd(text: &str) -> Result<HmdSurfaces, IngestError> {
    let mut stats = HmdParseStats::default();
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (_, title) = lines
        .next()
        .ok_or(IngestError::Format { line: 1, msg: "empty input".into() })?;
    let title = title.trim();
    if title.is_empty() {
        return Err(IngestError::Format { line: 1, msg: "missing title line".into() });
    }
    match lines.next() {
        Some((_, l)) if l.trim().is_empty() => {}
        Some((n, _)) => {
            return Err(IngestError::Format { line: n, msg: "expected blank line after title".into() })
        }
        None => return Err(IngestError::Format { line: 2, msg: "truncated after title".into() }),
    }
    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(HMD_HEADER.iter().copied()) => {}
        Some((n, l)) => {
            return Err(IngestError::Format {
                line: n,
                msg: format!("expected header `Year Age Female Male Total`, found `{}`", l.trim()),
            })
        }
        None => return Err(IngestError::Format { line: 3, msg: "missing column header".into() }),
    }
    stats.preamble_lines = 3;
    stats.total_lines = 3;

    // year -> (first line of block, age -> [f, m, t])
    let mut blocks: BTreeMap<i32, BTreeMap<i32, [Option<f64>; 3]>> = BTreeMap::new();
    let mut current_year: Option<i32> = None;

    for (n, line) in lines {
        stats.total_lines += 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            stats.blank_lines += 1;
            continue;
        }
        if toks.len() != 5 {
            return Err(IngestError::Format {
                line: n,
                msg: format!("expected 5 fields, found {}", toks.len()),
            });
        }
        let year: i32 = toks[0]
            .parse()
            .map_err(|_| IngestError::Format { line: n, msg: format!("bad year `{}`", toks[0]) })?;
        let age = parse_age_token(toks[1])
            .ok_or_else(|| IngestError::Format { line: n, msg: format!("bad age `{}`", toks[1]) })?;
        let mut vals = [None; 3];
        for (k, tok) in toks[2..].iter().enumerate() {
            vals[k] = parse_rate_token(tok).ok_or_else(|| IngestError::Format {
                line: n,
                msg: format!("bad rate `{tok}`"),
            })?;
        }

        if current_year != Some(year) {
            if blocks.contains_key(&year) {
                return Err(IngestError::Structure(format!(
                    "year {year} reappears at line {n} after its block ended"
                )));
            }
            if let Some(prev) = current_year {
                if year != prev + 1 {
                    return Err(IngestError::Structure(format!(
                        "year block {year} at line {n} does not follow {prev}"
                    )));
                }
            }
            current_year = Some(year);
        }
        let block = blocks.entry(year).or_default();
        if block.insert(age, vals).is_some() {
            return Err(IngestError::Duplicate { year, age, line: n });
        }
        stats.data_rows += 1;
    }

    let (&first_year, first_block) = blocks
        .iter()
        .next()
        .ok_or_else(|| IngestError::Structure("no data rows".into()))?;
    let ages: Vec<i32> = first_block.keys().copied().collect();
    let first_age = ages[0];
    if ages.iter().enumerate().any(|(k, &a)| a != first_age + k as i32) {
        return Err(IngestError::Structure(format!("ages in year {first_year} are not contiguous")));
    }
    for (year, block) in &blocks {
        if !block.keys().copied().eq(ages.iter().copied()) {
            return Err(IngestError::Structure(format!(
                "year {year} covers a different age range than year {first_year}"
            )));
        }
    }

    let n_years = blocks.len();
    let n_ages = ages.len();
    let mut cols: [Vec<Option<f64>>; 3] = Default::default();
    for block in blocks.values() {
        for vals in block.values() {
            for k in 0..3 {
                cols[k].push(vals[k]);
            }
        }
    }
    let [f, m, t] = cols;
    let build = |rates, sex| {
        MortalitySurface::new(first_year, first_age, n_years, n_ages, rates, sex, title.to_string())
    };
    Ok(HmdSurfaces {
        female: build(f, Sex::Female)?,
        male: build(m, Sex::Male)?,
        total: build(t, Sex::Total)?,
        stats,
    })
}

/// Parses a headerless numeric CSV matrix (rows = years, columns = ages).
pub fn parse_csv_matrix(
    text: &str,
    first_year: i32,
    first_age: i32,
    sex: Sex,
    source_label: &str,
) -> Result<MortalitySurface, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rates = Vec::new();
    let mut width = None;
    let mut n_rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(IngestError::Ragged { row, found: record.len(), expected });
        }
        for (c, field) in record.iter().enumerate() {
            if field.is_empty() {
                rates.push(None);
            } else {
                let v = field.parse::<f64>().map_err(|_| IngestError::Cell {
                    row,
                    col: c + 1,
                    token: field.to_string(),
                })?;
                rates.push(Some(v));
            }
        }
        n_rows += 1;
    }
    let n_ages = width.ok_or_else(|| IngestError::Structure("empty CSV".into()))?;
    MortalitySurface::new(first_year, first_age, n_rows, n_ages, rates, sex, source_label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceFormat {
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct SurfaceDoc {
    years: Vec<i32>,
    ages: Vec<i32>,
    sex: Sex,
    source_label: String,
    rates: Vec<Vec<Option<f64>>>,
    missing_mask: Vec<Vec<bool>>,
}

/// Writes a surface as a CSV matrix or a JSON document.
///
/// The CSV form carries values only; year/age origin, sex and label must be
/// supplied again when reading it back.
pub fn serialize(surface: &MortalitySurface, format: SurfaceFormat) -> String {
    match format {
        SurfaceFormat::Csv => {
            let mut out = String::new();
            for i in 0..surface.n_years() {
                for j in 0..surface.n_ages() {
                    if j > 0 {
                        out.push(',');
                    }
                    if let Some(v) = surface.at(i, j) {
                        write!(out, "{v:?}").unwrap();
                    }
                }
                // a lone missing cell would otherwise be a blank line
                if surface.n_ages() == 1 && surface.at(i, 0).is_none() {
                    out.push_str("\"\"");
                }
                out.push('\n');
            }
            out
        }
        SurfaceFormat::Json => {
            let rows = 0..surface.n_years();
            let doc = SurfaceDoc {
                years: surface.years().collect(),
                ages: surface.ages().collect(),
                sex: surface.sex(),
                source_label: surface.source_label().to_string(),
                rates: rows
                    .clone()
                    .map(|i| (0..surface.n_ages()).map(|j| surface.at(i, j)).collect())
                    .collect(),
                missing_mask: rows
                    .map(|i| (0..surface.n_ages()).map(|j| surface.is_missing(i, j)).collect())
                    .collect(),
            };
            serde_json::to_string_pretty(&doc).expect("surface serializes")
        }
    }
}

/// Reads the JSON document written by [`serialize`].
pub fn parse_json(text: &str) -> Result<MortalitySurface, IngestError> {
    let doc: SurfaceDoc = serde_json::from_str(text)?;
    let contiguous = |v: &[i32]| v.windows(2).all(|w| w[1] == w[0] + 1);
    if doc.years.is_empty() || doc.ages.is_empty() {
        return Err(IngestError::Structure("empty year or age axis".into()));
    }
    if !contiguous(&doc.years) || !contiguous(&doc.ages) {
        return Err(IngestError::Structure("years and ages must be consecutive".into()));
    }
    if doc.rates.len() != doc.years.len() || doc.missing_mask.len() != doc.years.len() {
        return Err(IngestError::Structure("row count does not match years".into()));
    }
    let mut rates = Vec::with_capacity(doc.years.len() * doc.ages.len());
    for (i, (row, mask)) in doc.rates.iter().zip(&doc.missing_mask).enumerate() {
        if row.len() != doc.ages.len() || mask.len() != doc.ages.len() {
            return Err(IngestError::Structure(format!("row {} has the wrong width", i + 1)));
        }
        for (j, (v, &missing)) in row.iter().zip(mask).enumerate() {
            if missing != v.is_none() {
                return Err(IngestError::Structure(format!(
                    "missing_mask disagrees with rates at year {}, age {}",
                    doc.years[i], doc.ages[j]
                )));
            }
            rates.push(*v);
        }
    }
    MortalitySurface::new(
        doc.years[0],
        doc.ages[0],
        doc.years.len(),
        doc.ages.len(),
        rates,
        doc.sex,
        doc.source_label,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "United Kingdom, Death rates (period 1x1), \tLast modified: 01 Jan 2024\n\
\n\
  Year          Age             Female            Male           Total\n\
  1933           27             0.002935          0.003633          0.003281\n\
  1933          110+            0.551786          0.476215          0.538332\n";

    fn hmd(rows: &[&str]) -> String {
        let mut s = String::from("Title line\n\n  Year  Age  Female  Male  Total\n");
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn hmd_column_mapping() {
        let text = hmd(&["1933  27  0.002935  0.003633  0.003281", "1933  28  0.1  0.2  0.3"]);
        let s = parse_hmd(&text).unwrap();
        assert_eq!(s.total.rate(1933, 27), Some(0.003281));
        assert_eq!(s.female.rate(1933, 27), Some(0.002935));
        assert_eq!(s.male.rate(1933, 27), Some(0.003633));
        assert_eq!(s.stats.data_rows, 2);
        assert_eq!(s.stats.total_lines, 5);
    }

    #[test]
    fn hmd_open_age_group() {
        let text = hmd(&["1950  109  0.5  0.4  0.45", "1950  110+  0.551786  0.476215  0.538332"]);
        let s = parse_hmd(&text).unwrap();
        assert_eq!(s.female.last_age(), 110);
        assert_eq!(s.female.rate(1950, 110), Some(0.551786));
    }

    #[test]
    fn hmd_missing_token() {
        let text = hmd(&["1915  103  .  .  .", "1915  104  0.1  0.2  0.3"]);
        let s = parse_hmd(&text).unwrap();
        for sex in Sex::ALL {
            assert_eq!(s.get(sex).rate(1915, 103), None);
            assert!(s.get(sex).is_missing(0, 0));
        }
    }

    #[test]
    fn hmd_real_style_header_with_tab() {
        // The two sample rows are ages 27 and 110, which are not contiguous.
        assert!(matches!(parse_hmd(SAMPLE), Err(IngestError::Structure(_))));
    }

    #[test]
    fn hmd_bad_header_names_line() {
        let text = "Title\n\nYear Age Female Male\n1933 27 0.1 0.2 0.3\n";
        match parse_hmd(text) {
            Err(IngestError::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_hmd("Title\nnot blank\n") {
            Err(IngestError::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hmd_bad_row_names_line() {
        let text = hmd(&["1933 27 0.1 0.2 0.3", "1933 28 0.1 x 0.3"]);
        match parse_hmd(&text) {
            Err(IngestError::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hmd_duplicate_cell() {
        let text = hmd(&["1933 27 0.1 0.2 0.3", "1933 27 0.1 0.2 0.3"]);
        assert!(matches!(parse_hmd(&text), Err(IngestError::Duplicate { year: 1933, age: 27, line: 5 })));
    }

    #[test]
    fn hmd_non_contiguous_years() {
        let gap = hmd(&["1933 27 0.1 0.2 0.3", "1935 27 0.1 0.2 0.3"]);
        assert!(matches!(parse_hmd(&gap), Err(IngestError::Structure(_))));
        let reentry = hmd(&["1933 27 0.1 0.2 0.3", "1934 27 0.1 0.2 0.3", "1933 28 0.1 0.2 0.3"]);
        assert!(matches!(parse_hmd(&reentry), Err(IngestError::Structure(_))));
    }

    #[test]
    fn hmd_mismatched_age_ranges() {
        let text = hmd(&["1933 0 0.1 0.2 0.3", "1933 1 0.1 0.2 0.3", "1934 0 0.1 0.2 0.3"]);
        assert!(matches!(parse_hmd(&text), Err(IngestError::Structure(_))));
    }

    #[test]
    fn hmd_trailing_blank_lines_are_counted() {
        let mut text = hmd(&["1933 27 0.1 0.2 0.3"]);
        text.push_str("\n   \n");
        let s = parse_hmd(&text).unwrap();
        assert_eq!(s.stats.blank_lines, 2);
        assert_eq!(
            s.stats.total_lines,
            s.stats.preamble_lines + s.stats.data_rows + s.stats.blank_lines
        );
    }

    #[test]
    fn csv_layout() {
        let s = parse_csv_matrix("0.1,0.2\n0.3,0.4", 2000, 0, Sex::Total, "t").unwrap();
        assert_eq!(s.rate(2000, 0), Some(0.1));
        assert_eq!(s.rate(2001, 1), Some(0.4));
        assert_eq!((s.n_years(), s.n_ages()), (2, 2));
    }

    #[test]
    fn csv_ragged_row() {
        match parse_csv_matrix("1,2\n3", 0, 0, Sex::Total, "") {
            Err(IngestError::Ragged { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_empty_field_is_missing() {
        let s = parse_csv_matrix("0.1,,0.3", 0, 0, Sex::Total, "").unwrap();
        assert_eq!(s.at(0, 1), None);
        assert_eq!(s.at(0, 2), Some(0.3));
    }

    #[test]
    fn csv_bad_cell_reports_coordinates() {
        match parse_csv_matrix("0.1,0.2\n0.3,abc", 0, 0, Sex::Total, "") {
            Err(IngestError::Cell { row, col, .. }) => assert_eq!((row, col), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_scientific_notation() {
        let s = parse_csv_matrix("1e-3,2.5E-4", 0, 0, Sex::Total, "").unwrap();
        assert_eq!(s.at(0, 1), Some(2.5e-4));
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(matches!(
            parse_csv_matrix("0.1,-0.2", 0, 0, Sex::Total, ""),
            Err(IngestError::Value { .. })
        ));
    }

    #[test]
    fn csv_round_trip_text() {
        let s = parse_csv_matrix("0.1,0.2\n0.3,0.4", 2000, 0, Sex::Total, "").unwrap();
        assert_eq!(serialize(&s, SurfaceFormat::Csv), "0.1,0.2\n0.3,0.4\n");
    }

    #[test]
    fn missing_cell_round_trips() {
        let s = parse_csv_matrix("0.1,,0.3\n1,2,3", 1990, 5, Sex::Male, "x").unwrap();
        let text = serialize(&s, SurfaceFormat::Csv);
        assert_eq!(text.lines().next(), Some("0.1,,0.3"));
        let back = parse_csv_matrix(&text, 1990, 5, Sex::Male, "x").unwrap();
        assert_eq!(back, s);
        let back = parse_json(&serialize(&s, SurfaceFormat::Json)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_schema_keys() {
        let s = parse_csv_matrix("0.1,0.2", 2000, 0, Sex::Female, "lbl").unwrap();
        let v: serde_json::Value = serde_json::from_str(&serialize(&s, SurfaceFormat::Json)).unwrap();
        for key in ["years", "ages", "sex", "source_label", "rates", "missing_mask"] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(v["sex"], "female");
    }
}
