//! Inputs shared by the kernel benchmarks.

use cohort_core::{MortalitySurface, Sex};

/// Gompertz-like surface with a mild cohort ripple, `n_years × n_ages`.
pub fn mortality_like(n_years: usize, n_ages: usize) -> MortalitySurface {
    MortalitySurface::from_fn(1900, 0, n_years, n_ages, Sex::Total, "bench", |y, a| {
        let (t, x) = ((y - 1900) as f64, a as f64);
        let cohort = 1.0 + 0.05 * (0.4 * (t - x)).sin();
        1e-4 * (0.09 * x).exp() * (-0.01 * t).exp() * cohort
    })
    .expect("finite rates")
}
