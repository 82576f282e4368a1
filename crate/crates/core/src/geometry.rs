//! Discrete curvature on a regular year × age grid.
//!
//! Every interior grid point gets four three-point stencil curves through it:
//!
//! | k | stencil                                  | direction in (t, x) |
//! |---|------------------------------------------|---------------------|
//! | 1 | `p[i-1][j-1], p[i][j], p[i+1][j+1]`      | cohort, (1, 1)      |
//! | 2 | `p[i-1][j+1], p[i][j], p[i+1][j-1]`      | anti-diagonal, (1, -1) |
//! | 3 | `p[i-1][j], p[i][j], p[i+1][j]`          | along years, (1, 0) |
//! | 4 | `p[i][j-1], p[i][j], p[i][j+1]`          | along ages, (0, 1)  |
//!
//! For each curve the chord-length parameter, a constrained least-squares
//! tangent and a curvature vector are computed. The surface normal is the
//! unit vector least aligned with the four tangents, and the normal
//! curvature in direction k is `N · CV_k`.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::surface::MortalitySurface;

pub type Vec3 = Vector3<f64>;

/// Below this norm a tangent is considered degenerate.
pub const TANGENT_EPS: f64 = 1e-14;
/// Minimum separation between the two smallest eigenvalues of the tangent
/// scatter matrix for the normal to be well defined.
pub const EIGENGAP_EPS: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate stencil: consecutive points coincide")]
    DegenerateStencil,
    #[error("degenerate tangent: least-squares tangent norm {0:e} is below threshold")]
    DegenerateTangent(f64),
    #[error("ambiguous normal: eigengap {0:e} below threshold")]
    AmbiguousNormal(f64),
    #[error("surface is {0}x{1}; at least 3x3 is required")]
    TooSmall(usize, usize),
    #[error("invalid geometry option: {0}")]
    Options(String),
}

/// A sample of the surface embedded in R³: (year, age, rate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint3 {
    pub t: f64,
    pub x: f64,
    pub z: f64,
}

impl GridPoint3 {
    pub fn new(t: f64, x: f64, z: f64) -> Self {
        Self { t, x, z }
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.t, self.x, self.z)
    }
}

/// Chord-length parameter of a three-point curve: `s0 = 0`, `s2 = 1`,
/// `s1 = |q1 - q0| / (|q1 - q0| + |q2 - q1|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscreteParams {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
}

impl DiscreteParams {
    pub fn as_array(self) -> [f64; 3] {
        [self.s0, self.s1, self.s2]
    }
}

pub fn discrete_parameter(
    q0: GridPoint3,
    q1: GridPoint3,
    q2: GridPoint3,
) -> Result<DiscreteParams, GeometryError> {
    let a = (q1.to_vec() - q0.to_vec()).norm();
    let b = (q2.to_vec() - q1.to_vec()).norm();
    if a == 0.0 || b == 0.0 {
        return Err(GeometryError::DegenerateStencil);
    }
    Ok(DiscreteParams { s0: 0.0, s1: a / (a + b), s2: 1.0 })
}

/// Slope at the middle sample of the line through `(s1, v1)` that best fits
/// the two outer samples in the least-squares sense.
#[inline]
pub fn ls_derivative(values: [f64; 3], params: [f64; 3]) -> f64 {
    let [v0, v1, v2] = values;
    let [s0, s1, s2] = params;
    let (d0, d2) = (s0 - s1, s2 - s1);
    (d0 * (v0 - v1) + d2 * (v2 - v1)) / (d0 * d0 + d2 * d2)
}

/// Componentwise [`ls_derivative`] of three vectors.
#[inline]
fn ls_derivative_vec(values: [Vec3; 3], params: [f64; 3]) -> Vec3 {
    let [v0, v1, v2] = values;
    let [s0, s1, s2] = params;
    let (d0, d2) = (s0 - s1, s2 - s1);
    ((v0 - v1) * d0 + (v2 - v1) * d2) / (d0 * d0 + d2 * d2)
}

/// A three-point discrete curve together with its chord-length parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StencilCurve {
    pub points: [GridPoint3; 3],
    pub params: DiscreteParams,
}

impl StencilCurve {
    pub fn new(q0: GridPoint3, q1: GridPoint3, q2: GridPoint3) -> Result<Self, GeometryError> {
        let params = discrete_parameter(q0, q1, q2)?;
        Ok(Self { points: [q0, q1, q2], params })
    }

    fn vecs(&self) -> [Vec3; 3] {
        self.points.map(GridPoint3::to_vec)
    }
}

/// Least-squares tangent `T` at the middle point and its normalization `V`.
pub fn discrete_tangent(curve: &StencilCurve) -> Result<(Vec3, Vec3), GeometryError> {
    let t = ls_derivative_vec(curve.vecs(), curve.params.as_array());
    let n = t.norm();
    if !(n >= TANGENT_EPS) {
        return Err(GeometryError::DegenerateTangent(n));
    }
    Ok((t, t / n))
}

/// Curvature vector `V'(s1) / |T|` at the middle point.
///
/// The unit tangent field is sampled at three parameters: the least-squares
/// tangent at `s1`, and the two chord directions, each placed at the
/// parameter midpoint of its chord (`s1 / 2` and `(1 + s1) / 2`), where a
/// chord direction is a second-order estimate of the curve's tangent.
pub fn curvature_vector(curve: &StencilCurve) -> Result<Vec3, GeometryError> {
    let (t, v) = discrete_tangent(curve)?;
    let [q0, q1, q2] = curve.vecs();
    let back = unit(q1 - q0)?;
    let fwd = unit(q2 - q1)?;
    let DiscreteParams { s0, s1, s2 } = curve.params;
    let params = [0.5 * (s0 + s1), s1, 0.5 * (s1 + s2)];
    let dv = ls_derivative_vec([back, v, fwd], params);
    Ok(dv / t.norm())
}

fn unit(v: Vec3) -> Result<Vec3, GeometryError> {
    let n = v.norm();
    if !(n >= TANGENT_EPS) {
        return Err(GeometryError::DegenerateStencil);
    }
    Ok(v / n)
}

/// Sum of squared projections of `n` onto the tangents; the objective the
/// surface normal minimizes.
pub fn normal_objective(n: &Vec3, tangents: &[Vec3; 4]) -> f64 {
    tangents.iter().map(|v| n.dot(v).powi(2)).sum()
}

/// Outcome of the normal fit: the unit normal and the minimized objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalFit {
    pub normal: Vec3,
    /// Smallest eigenvalue of `Σ V_k V_kᵀ`, equal to the objective at `normal`.
    pub residual: f64,
    pub eigengap: f64,
}

/// Unit vector minimizing `Σ (N · V_k)²`: the eigenvector of `Σ V_k V_kᵀ`
/// for its smallest eigenvalue, oriented so that `N_z ≥ 0` (or, when
/// `N_z = 0`, so that the first nonzero component is positive).
pub fn estimate_normal(tangents: &[Vec3; 4]) -> Result<NormalFit, GeometryError> {
    let m: Matrix3<f64> = tangents.iter().map(|v| v * v.transpose()).sum();
    let eig = SymmetricEigen::new(m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (lo, mid) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    let gap = mid - lo;
    if !(gap >= EIGENGAP_EPS) {
        return Err(GeometryError::AmbiguousNormal(gap));
    }
    let mut n: Vec3 = eig.eigenvectors.column(order[0]).normalize();
    let lead = [n.z, n.x, n.y].into_iter().find(|c| *c != 0.0).unwrap_or(1.0);
    if lead < 0.0 {
        n = -n;
    }
    Ok(NormalFit { normal: n, residual: lo.max(0.0), eigengap: gap })
}

#[inline]
pub fn normal_curvature(normal: &Vec3, curvature: &Vec3) -> f64 {
    normal.dot(curvature)
}

/// How grid cells are mapped to points in R³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryOptions {
    /// Multiplier applied to the (possibly log-transformed) rate.
    pub z_scale: f64,
    /// Use `ln(rate)` instead of the raw rate; zero rates become missing.
    pub log_rates: bool,
    /// Distance between neighbouring years (and ages) in the embedding.
    pub grid_step: f64,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self { z_scale: 1.0, log_rates: false, grid_step: 1.0 }
    }
}

impl GeometryOptions {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.z_scale > 0.0 && self.z_scale.is_finite()) {
            return Err(GeometryError::Options(format!("z_scale must be > 0, got {}", self.z_scale)));
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(GeometryError::Options(format!(
                "grid_step must be > 0, got {}",
                self.grid_step
            )));
        }
        Ok(())
    }

    fn height(&self, rate: f64) -> Option<f64> {
        let z = if self.log_rates {
            if rate > 0.0 {
                rate.ln()
            } else {
                return None;
            }
        } else {
            rate
        };
        Some(z * self.z_scale)
    }
}

/// Geometry at one grid point. Invalid points (border, missing neighbours,
/// degenerate stencils) carry all-zero fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointGeometry {
    pub valid: bool,
    pub tangents: [Vec3; 4],
    pub curvatures: [Vec3; 4],
    pub normal: Vec3,
    pub normal_curvatures: [f64; 4],
}

impl PointGeometry {
    pub const INVALID: Self = Self {
        valid: false,
        tangents: [Vec3::new(0.0, 0.0, 0.0); 4],
        curvatures: [Vec3::new(0.0, 0.0, 0.0); 4],
        normal: Vec3::new(0.0, 0.0, 0.0),
        normal_curvatures: [0.0; 4],
    };
}

/// Offsets (year, age) of the first stencil point; the third is the negation.
pub const STENCIL_OFFSETS: [(isize, isize); 4] = [(-1, -1), (-1, 1), (-1, 0), (0, -1)];

/// Computes the geometry of a single grid point from its 3×3 neighbourhood,
/// `nbhd[di + 1][dj + 1]` holding the point at year offset `di`, age offset `dj`.
pub fn point_geometry(nbhd: &[[GridPoint3; 3]; 3]) -> Result<PointGeometry, GeometryError> {
    let center = nbhd[1][1];
    let mut tangents = [Vec3::zeros(); 4];
    let mut curvatures = [Vec3::zeros(); 4];
    for (k, &(di, dj)) in STENCIL_OFFSETS.iter().enumerate() {
        let q0 = nbhd[(1 + di) as usize][(1 + dj) as usize];
        let q2 = nbhd[(1 - di) as usize][(1 - dj) as usize];
        let curve = StencilCurve::new(q0, center, q2)?;
        tangents[k] = discrete_tangent(&curve)?.1;
        curvatures[k] = curvature_vector(&curve)?;
    }
    let normal = estimate_normal(&tangents)?.normal;
    let normal_curvatures = curvatures.map(|cv| normal_curvature(&normal, &cv));
    Ok(PointGeometry { valid: true, tangents, curvatures, normal, normal_curvatures })
}

/// Per-point geometry over a whole surface, row-major in (year, age).
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryField {
    first_year: i32,
    first_age: i32,
    n_years: usize,
    n_ages: usize,
    points: Vec<PointGeometry>,
    options: GeometryOptions,
}

impl GeometryField {
    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn first_age(&self) -> i32 {
        self.first_age
    }

    pub fn n_years(&self) -> usize {
        self.n_years
    }

    pub fn n_ages(&self) -> usize {
        self.n_ages
    }

    pub fn options(&self) -> &GeometryOptions {
        &self.options
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &PointGeometry {
        &self.points[i * self.n_ages + j]
    }

    pub fn points(&self) -> &[PointGeometry] {
        &self.points
    }

    pub fn valid_count(&self) -> usize {
        self.points.iter().filter(|p| p.valid).count()
    }

    /// `(year, age, geometry)` for every grid point, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, &PointGeometry)> + '_ {
        self.points.iter().enumerate().map(move |(k, p)| {
            (
                self.first_year + (k / self.n_ages) as i32,
                self.first_age + (k % self.n_ages) as i32,
                p,
            )
        })
    }
}

/// Runs the stencil computation at every grid point.
///
/// Border points and points whose 3×3 neighbourhood touches a missing cell
/// (or a nonpositive rate in log mode) are left invalid with zero fields;
/// so are points where a stencil or the normal fit is degenerate.
pub fn compute_geometry_field(
    surface: &MortalitySurface,
    options: &GeometryOptions,
) -> Result<GeometryField, GeometryError> {
    options.validate()?;
    let (ny, na) = (surface.n_years(), surface.n_ages());
    if ny < 3 || na < 3 {
        return Err(GeometryError::TooSmall(ny, na));
    }
    let h = options.grid_step;
    let (y0, a0) = (surface.first_year() as f64, surface.first_age() as f64);
    let lifted: Vec<Option<GridPoint3>> = (0..ny * na)
        .map(|k| {
            let (i, j) = (k / na, k % na);
            let z = options.height(surface.at(i, j)?)?;
            Some(GridPoint3::new((y0 + i as f64) * h, (a0 + j as f64) * h, z))
        })
        .collect();

    let points: Vec<PointGeometry> = (0..ny * na)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / na, k % na);
            if i == 0 || j == 0 || i + 1 == ny || j + 1 == na {
                return PointGeometry::INVALID;
            }
            let mut nbhd = [[GridPoint3::new(0.0, 0.0, 0.0); 3]; 3];
            for (di, row) in nbhd.iter_mut().enumerate() {
                for (dj, cell) in row.iter_mut().enumerate() {
                    match lifted[(i + di - 1) * na + (j + dj - 1)] {
                        Some(p) => *cell = p,
                        None => return PointGeometry::INVALID,
                    }
                }
            }
            point_geometry(&nbhd).unwrap_or(PointGeometry::INVALID)
        })
        .collect();

    Ok(GeometryField {
        first_year: surface.first_year(),
        first_age: surface.first_age(),
        n_years: ny,
        n_ages: na,
        points,
        options: *options,
    })
}
