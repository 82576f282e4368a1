//! Detection and measurement of birth-cohort effects in mortality surfaces.
//!
//! A year × age grid of death rates is treated as a discrete surface. At each
//! interior grid point the normal curvature is estimated along four stencil
//! directions; the absolute difference between the cohort direction and the
//! anti-diagonal direction, summed over each birth cohort, gives the cohort
//! effect index (CEI) series. Its coefficient of variation over a window is
//! the aggregating index of cohort effect (AICE), and runs of elevated CEI
//! give generation gaps.
//!
//! ```
//! use cohort_core::{analytics, geometry, surface::{MortalitySurface, Sex}};
//!
//! let s = MortalitySurface::from_fn(1950, 0, 30, 40, Sex::Total, "demo", |y, a| {
//!     0.0005 * (0.08 * a as f64).exp() * (1.0 - 0.01 * (y - 1950) as f64)
//! })
//! .unwrap();
//! let field = geometry::compute_geometry_field(&s, &Default::default()).unwrap();
//! let series = analytics::cei_series(&field, &s, Default::default()).unwrap();
//! assert_eq!(series.first_year(), Some(1950 - 39));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytics;
pub mod export;
pub mod geometry;
pub mod ingest;
pub mod oracle;
pub mod surface;

pub use analytics::{
    aice, cei_series, cohort_report, detect_peaks, trim_series, u_shape_diagnostic, AnalyticsError, CeiEntry,
    CeiSeries, CohortReport, Normalization, Peak, PeakParams, UShapeReport,
};
pub use geometry::{compute_geometry_field, GeometryError, GeometryField, GeometryOptions, PointGeometry};
pub use ingest::{parse_csv_matrix, parse_hmd, HmdSurfaces, IngestError, SurfaceFormat};
pub use oracle::{AnalyticSurface, CohortMeasure, OracleError, Profile};
pub use surface::{MortalitySurface, Sex};
