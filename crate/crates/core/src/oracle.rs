//! Exact geometry of smooth graph surfaces `z = f(t, x)`.
//!
//! Each catalog surface carries hand-written first and second derivatives.
//! Normal curvature along a parameter-plane direction `d` is
//! `II(d, d) / I(d, d)` with the upward unit normal:
//!
//! ```text
//!            dᵀ H d
//! κ(d) = ─────────────────────────────
//!        (|d|² + (∇f·d)²) √(1 + |∇f|²)
//! ```
//!
//! These values are the reference the discrete kernel is tested against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::{MortalitySurface, Sex};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("derivative `{which}` disagrees with finite differences at ({t}, {x}): {analytic} vs {numeric}")]
    DerivativeMismatch { which: &'static str, t: f64, x: f64, analytic: f64, numeric: f64 },
    #[error("point ({t}, {x}) lies outside the surface domain")]
    OutOfDomain { t: f64, x: f64 },
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("quadrature did not converge after {0} halvings")]
    Quadrature(usize),
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// Value and first two derivatives of a function of one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Smooth one-dimensional profiles used to build ridge and separable surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `amplitude · exp(-(u - center)² / width)`
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// `amplitude · sin(frequency · u + phase)`
    Sine { amplitude: f64, frequency: f64, phase: f64 },
    /// `amplitude · exp(rate · u)`
    Exponential { amplitude: f64, rate: f64 },
    /// `slope · u + intercept`
    Linear { slope: f64, intercept: f64 },
}

impl Profile {
    pub fn jet(&self, u: f64) -> Jet1 {
        match *self {
            Profile::Gaussian { amplitude, center, width } => {
                let w = u - center;
                let g = amplitude * (-w * w / width).exp();
                let k = 2.0 / width;
                Jet1 { v: g, d1: -k * w * g, d2: (k * k * w * w - k) * g }
            }
            Profile::Sine { amplitude, frequency, phase } => {
                let a = frequency * u + phase;
                Jet1 {
                    v: amplitude * a.sin(),
                    d1: amplitude * frequency * a.cos(),
                    d2: -amplitude * frequency * frequency * a.sin(),
                }
            }
            Profile::Exponential { amplitude, rate } => {
                let e = amplitude * (rate * u).exp();
                Jet1 { v: e, d1: rate * e, d2: rate * rate * e }
            }
            Profile::Linear { slope, intercept } => Jet1 { v: slope * u + intercept, d1: slope, d2: 0.0 },
        }
    }
}

/// Value, gradient and Hessian of `f(t, x)` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub f: f64,
    pub ft: f64,
    pub fx: f64,
    pub ftt: f64,
    pub ftx: f64,
    pub fxx: f64,
}

/// Catalog of smooth test surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum AnalyticSurface {
    /// `a·t + b·x + c`
    Plane { a: f64, b: f64, c: f64 },
    /// Upper hemisphere of radius `radius` centred at `(center_t, center_x, base)`.
    SphereCap { radius: f64, center_t: f64, center_x: f64, base: f64 },
    /// `g(t - x - offset)`: constant along every cohort line.
    CylinderRidge { profile: Profile, offset: f64 },
    /// `base + amplitude · exp(-((t-ct)² + (x-cx)²) / (2σ²))`
    GaussianBump { amplitude: f64, sigma: f64, center_t: f64, center_x: f64, base: f64 },
    /// `u(t) · v(x)`
    ProductSeparable { u: Profile, v: Profile },
}

impl AnalyticSurface {
    pub fn plane(a: f64, b: f64, c: f64) -> Self {
        Self::Plane { a, b, c }
    }

    pub fn sphere_cap(radius: f64, center_t: f64, center_x: f64) -> Self {
        Self::SphereCap { radius, center_t, center_x, base: 0.0 }
    }

    /// Ridge `exp(-(t - x - offset)² / width)`.
    pub fn gaussian_ridge(width: f64, offset: f64) -> Self {
        Self::CylinderRidge { profile: Profile::Gaussian { amplitude: 1.0, center: 0.0, width }, offset }
    }

    pub fn gaussian_bump(amplitude: f64, sigma: f64, center_t: f64, center_x: f64) -> Self {
        Self::GaussianBump { amplitude, sigma, center_t, center_x, base: 0.0 }
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        match *self {
            Self::SphereCap { radius, center_t, center_x, .. } => {
                let (dt, dx) = (t - center_t, x - center_x);
                dt * dt + dx * dx < radius * radius
            }
            _ => t.is_finite() && x.is_finite(),
        }
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.jet(t, x).f
    }

    /// Value and derivatives; outside the domain the result is NaN.
    pub fn jet(&self, t: f64, x: f64) -> Jet2 {
        match *self {
            Self::Plane { a, b, c } => {
                Jet2 { f: a * t + b * x + c, ft: a, fx: b, ftt: 0.0, ftx: 0.0, fxx: 0.0 }
            }
            Self::SphereCap { radius, center_t, center_x, base } => {
                let (dt, dx) = (t - center_t, x - center_x);
                let w = (radius * radius - dt * dt - dx * dx).sqrt();
                let w3 = w * w * w;
                Jet2 {
                    f: base + w,
                    ft: -dt / w,
                    fx: -dx / w,
                    ftt: -1.0 / w - dt * dt / w3,
                    ftx: -dt * dx / w3,
                    fxx: -1.0 / w - dx * dx / w3,
                }
            }
            Self::CylinderRidge { profile, offset } => {
                let g = profile.jet(t - x - offset);
                Jet2 { f: g.v, ft: g.d1, fx: -g.d1, ftt: g.d2, ftx: -g.d2, fxx: g.d2 }
            }
            Self::GaussianBump { amplitude, sigma, center_t, center_x, base } => {
                let (dt, dx) = (t - center_t, x - center_x);
                let s2 = sigma * sigma;
                let e = amplitude * (-(dt * dt + dx * dx) / (2.0 * s2)).exp();
                Jet2 {
                    f: base + e,
                    ft: -dt / s2 * e,
                    fx: -dx / s2 * e,
                    ftt: (dt * dt / s2 - 1.0) / s2 * e,
                    ftx: dt * dx / (s2 * s2) * e,
                    fxx: (dx * dx / s2 - 1.0) / s2 * e,
                }
            }
            Self::ProductSeparable { u, v } => {
                let (a, b) = (u.jet(t), v.jet(x));
                Jet2 {
                    f: a.v * b.v,
                    ft: a.d1 * b.v,
                    fx: a.v * b.d1,
                    ftt: a.d2 * b.v,
                    ftx: a.d1 * b.d1,
                    fxx: a.v * b.d2,
                }
            }
        }
    }

    /// Checks the hand-written derivatives against central differences at
    /// `samples` random points of `[t0, t1] × [x0, x1]` (within the domain).
    ///
    /// Agreement is required to `1e-6 · max(1, |f|)`.
    pub fn self_check(
        &self,
        t_range: (f64, f64),
        x_range: (f64, f64),
        samples: usize,
        seed: u64,
    ) -> Result<(), OracleError> {
        check_derivatives(self, |t, x| self.jet(t, x), t_range, x_range, samples, seed)
    }

    /// Samples the surface at `(year · step, age · step)` for each grid cell.
    /// Cells outside the domain are missing.
    pub fn materialize(
        &self,
        first_year: i32,
        first_age: i32,
        n_years: usize,
        n_ages: usize,
        step: f64,
    ) -> MortalitySurface {
        let mut cells = Vec::with_capacity(n_years * n_ages);
        for i in 0..n_years {
            for j in 0..n_ages {
                let t = (first_year + i as i32) as f64 * step;
                let x = (first_age + j as i32) as f64 * step;
                cells.push(self.contains(t, x).then(|| self.value(t, x)).filter(|z| *z >= 0.0));
            }
        }
        MortalitySurface::new(first_year, first_age, n_years, n_ages, cells, Sex::Total, self.label())
            .expect("catalog surfaces produce finite values")
    }

    pub fn label(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

fn check_derivatives(
    surface: &AnalyticSurface,
    jet: impl Fn(f64, f64) -> Jet2,
    t_range: (f64, f64),
    x_range: (f64, f64),
    samples: usize,
    seed: u64,
) -> Result<(), OracleError> {
    const H1: f64 = 1e-5;
    const H2: f64 = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < samples {
        attempts += 1;
        if attempts > samples * 100 {
            return Err(OracleError::Argument("sample box barely intersects the domain".into()));
        }
        let t = rng.gen_range(t_range.0..=t_range.1);
        let x = rng.gen_range(x_range.0..=x_range.1);
        let m = 2.0 * H2;
        let corners = [(t - m, x - m), (t + m, x + m), (t - m, x + m), (t + m, x - m)];
        if !corners.iter().all(|&(a, b)| surface.contains(a, b)) {
            continue;
        }
        let f = |a: f64, b: f64| surface.value(a, b);
        let j = jet(t, x);
        let numeric = [
            ("f_t", j.ft, (f(t + H1, x) - f(t - H1, x)) / (2.0 * H1)),
            ("f_x", j.fx, (f(t, x + H1) - f(t, x - H1)) / (2.0 * H1)),
            ("f_tt", j.ftt, (f(t + H2, x) - 2.0 * j.f + f(t - H2, x)) / (H2 * H2)),
            ("f_xx", j.fxx, (f(t, x + H2) - 2.0 * j.f + f(t, x - H2)) / (H2 * H2)),
            (
                "f_tx",
                j.ftx,
                (f(t + H2, x + H2) - f(t + H2, x - H2) - f(t - H2, x + H2) + f(t - H2, x - H2))
                    / (4.0 * H2 * H2),
            ),
        ];
        let tol = 1e-6 * j.f.abs().max(1.0);
        for (which, analytic, numeric) in numeric {
            if !((analytic - numeric).abs() <= tol) {
                return Err(OracleError::DerivativeMismatch { which, t, x, analytic, numeric });
            }
        }
        checked += 1;
    }
    Ok(())
}

/// Normal curvature and upward unit normal at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothCurvatureSample {
    pub t: f64,
    pub x: f64,
    pub normal: [f64; 3],
    pub curvature: f64,
}

/// Normal curvature of `surface` at `(t, x)` along the parameter-plane
/// direction `d`, signed with the upward normal.
pub fn smooth_normal_curvature(
    surface: &AnalyticSurface,
    (t, x): (f64, f64),
    d: (f64, f64),
) -> Result<f64, OracleError> {
    Ok(smooth_curvature_sample(surface, (t, x), d)?.curvature)
}

pub fn smooth_curvature_sample(
    surface: &AnalyticSurface,
    (t, x): (f64, f64),
    (dt, dx): (f64, f64),
) -> Result<SmoothCurvatureSample, OracleError> {
    if dt == 0.0 && dx == 0.0 {
        return Err(OracleError::ZeroDirection);
    }
    if !surface.contains(t, x) {
        return Err(OracleError::OutOfDomain { t, x });
    }
    let j = surface.jet(t, x);
    Ok(SmoothCurvatureSample { t, x, normal: upward_normal(&j), curvature: curvature_of_jet(&j, (dt, dx)) })
}

fn upward_normal(j: &Jet2) -> [f64; 3] {
    let w = (1.0 + j.ft * j.ft + j.fx * j.fx).sqrt();
    [-j.ft / w, -j.fx / w, 1.0 / w]
}

fn curvature_of_jet(j: &Jet2, (dt, dx): (f64, f64)) -> f64 {
    let second = j.ftt * dt * dt + 2.0 * j.ftx * dt * dx + j.fxx * dx * dx;
    let slope = j.ft * dt + j.fx * dx;
    let first = dt * dt + dx * dx + slope * slope;
    second / (first * (1.0 + j.ft * j.ft + j.fx * j.fx).sqrt())
}

/// Parameter-plane direction whose lift is orthogonal (in R³) to the lift of
/// `d`, i.e. `I(d, e) = 0`, oriented so that `(d, e)` is positively oriented.
pub fn tangent_plane_orthogonal(j: &Jet2, (dt, dx): (f64, f64)) -> (f64, f64) {
    let g11 = 1.0 + j.ft * j.ft;
    let g12 = j.ft * j.fx;
    let g22 = 1.0 + j.fx * j.fx;
    let (wt, wx) = (g11 * dt + g12 * dx, g12 * dt + g22 * dx);
    (-wx, wt)
}

/// Measure used when integrating along a cohort line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CohortMeasure {
    /// Arc length of the lifted cohort curve.
    #[default]
    ArcLength,
    /// Calendar time `t` along the cohort, one unit per year; this is the
    /// measure implicit in summing one term per grid point at unit spacing.
    CalendarTime,
}

/// `|NC_T - NC_N|` at `(t, t - birth)` where `T` is the cohort direction and
/// `N` its orthogonal complement in the tangent plane.
pub fn cohort_integrand(surface: &AnalyticSurface, t: f64, birth: f64) -> Result<f64, OracleError> {
    let x = t - birth;
    if !surface.contains(t, x) {
        return Err(OracleError::OutOfDomain { t, x });
    }
    let j = surface.jet(t, x);
    let along = curvature_of_jet(&j, (1.0, 1.0));
    let across = curvature_of_jet(&j, tangent_plane_orthogonal(&j, (1.0, 1.0)));
    Ok((along - across).abs())
}

/// Smooth cohort effect index of the cohort born at `birth`: the integral of
/// [`cohort_integrand`] over `t ∈ [a, b]` on the path `(t, t - birth)`.
///
/// Composite midpoint rule starting from `step`, halved until two successive
/// estimates agree to `1e-8` relative (`1e-14` absolute near zero).
pub fn smooth_cei(
    surface: &AnalyticSurface,
    birth: f64,
    (a, b): (f64, f64),
    step: f64,
    measure: CohortMeasure,
) -> Result<f64, OracleError> {
    const MAX_HALVINGS: usize = 20;
    if !(b > a) || !(step > 0.0) {
        return Err(OracleError::Argument(format!("need a < b and step > 0, got [{a}, {b}], {step}")));
    }
    for t in [a, b] {
        if !surface.contains(t, t - birth) {
            return Err(OracleError::OutOfDomain { t, x: t - birth });
        }
    }
    let integrand = |t: f64| -> Result<f64, OracleError> {
        let value = cohort_integrand(surface, t, birth)?;
        Ok(match measure {
            CohortMeasure::CalendarTime => value,
            CohortMeasure::ArcLength => {
                let j = surface.jet(t, t - birth);
                let dz = j.ft + j.fx;
                value * (2.0 + dz * dz).sqrt()
            }
        })
    };
    let midpoint = |n: usize| -> Result<f64, OracleError> {
        let h = (b - a) / n as f64;
        let mut sum = 0.0;
        for k in 0..n {
            sum += integrand(a + (k as f64 + 0.5) * h)?;
        }
        Ok(sum * h)
    };
    let mut n = ((b - a) / step).ceil().max(1.0) as usize;
    let mut prev = midpoint(n)?;
    for _ in 0..MAX_HALVINGS {
        n *= 2;
        let next = midpoint(n)?;
        if (next - prev).abs() <= 1e-8 * next.abs() + 1e-14 {
            return Ok(next);
        }
        prev = next;
    }
    Err(OracleError::Quadrature(MAX_HALVINGS))
}
