//! Rectangular year × age grids of death rates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::IngestError;

/// Which sex column of a life-table file a surface was built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
    #[default]
    Total,
}

impl Sex {
    pub const ALL: [Sex; 3] = [Sex::Female, Sex::Male, Sex::Total];

    pub fn as_str(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
            Sex::Total => "total",
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(Sex::Female),
            "male" | "m" => Ok(Sex::Male),
            "total" | "t" | "both" => Ok(Sex::Total),
            other => Err(format!("unknown sex `{other}` (expected female, male or total)")),
        }
    }
}

/// A dense grid of death rates indexed by consecutive calendar years (rows)
/// and consecutive integer ages (columns).
///
/// Missing cells are `None`; they are never coerced to zero. A surface is
/// immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct MortalitySurface {
    first_year: i32,
    first_age: i32,
    n_years: usize,
    n_ages: usize,
    rates: Vec<Option<f64>>,
    sex: Sex,
    source_label: String,
}

impl MortalitySurface {
    /// Builds a surface from row-major cells (`n_years` rows of `n_ages`).
    ///
    /// Every present rate must be finite and nonnegative.
    pub fn new(
        first_year: i32,
        first_age: i32,
        n_years: usize,
        n_ages: usize,
        rates: Vec<Option<f64>>,
        sex: Sex,
        source_label: impl Into<String>,
    ) -> Result<Self, IngestError> {
        if n_years == 0 || n_ages == 0 {
            return Err(IngestError::Structure("surface has no cells".into()));
        }
        if rates.len() != n_years * n_ages {
            return Err(IngestError::Structure(format!(
                "expected {} cells for {n_years} years x {n_ages} ages, got {}",
                n_years * n_ages,
                rates.len()
            )));
        }
        for (k, r) in rates.iter().enumerate() {
            if let Some(v) = *r {
                if !v.is_finite() || v < 0.0 {
                    return Err(IngestError::Value {
                        year: first_year + (k / n_ages) as i32,
                        age: first_age + (k % n_ages) as i32,
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            first_year,
            first_age,
            n_years,
            n_ages,
            rates,
            sex,
            source_label: source_label.into(),
        })
    }

    /// Builds a fully populated surface by evaluating `f(year, age)` on every cell.
    pub fn from_fn(
        first_year: i32,
        first_age: i32,
        n_years: usize,
        n_ages: usize,
        sex: Sex,
        source_label: impl Into<String>,
        mut f: impl FnMut(i32, i32) -> f64,
    ) -> Result<Self, IngestError> {
        let mut rates = Vec::with_capacity(n_years * n_ages);
        for i in 0..n_years {
            for j in 0..n_ages {
                rates.push(Some(f(first_year + i as i32, first_age + j as i32)));
            }
        }
        Self::new(first_year, first_age, n_years, n_ages, rates, sex, source_label)
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.n_years as i32 - 1
    }

    pub fn first_age(&self) -> i32 {
        self.first_age
    }

    pub fn last_age(&self) -> i32 {
        self.first_age + self.n_ages as i32 - 1
    }

    pub fn n_years(&self) -> usize {
        self.n_years
    }

    pub fn n_ages(&self) -> usize {
        self.n_ages
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.first_year..=self.last_year()
    }

    pub fn ages(&self) -> impl Iterator<Item = i32> + '_ {
        self.first_age..=self.last_age()
    }

    pub fn sex(&self) -> Sex {
        self.sex
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    /// Cell by grid index (row = year index, column = age index).
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.rates[i * self.n_ages + j]
    }

    /// Cell by calendar year and age; `None` if outside the grid or missing.
    pub fn rate(&self, year: i32, age: i32) -> Option<f64> {
        let i = usize::try_from(year - self.first_year).ok()?;
        let j = usize::try_from(age - self.first_age).ok()?;
        if i >= self.n_years || j >= self.n_ages {
            return None;
        }
        self.at(i, j)
    }

    pub fn is_missing(&self, i: usize, j: usize) -> bool {
        self.at(i, j).is_none()
    }

    pub fn missing_count(&self) -> usize {
        self.rates.iter().filter(|r| r.is_none()).count()
    }

    /// Row-major cells.
    pub fn cells(&self) -> &[Option<f64>] {
        &self.rates
    }

    /// Transposed copy: years become ages and vice versa.
    pub fn transposed(&self) -> Self {
        let mut rates = Vec::with_capacity(self.rates.len());
        for j in 0..self.n_ages {
            for i in 0..self.n_years {
                rates.push(self.at(i, j));
            }
        }
        Self {
            first_year: self.first_age,
            first_age: self.first_year,
            n_years: self.n_ages,
            n_ages: self.n_years,
            rates,
            sex: self.sex,
            source_label: self.source_label.clone(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = label.into();
        self
    }
}
