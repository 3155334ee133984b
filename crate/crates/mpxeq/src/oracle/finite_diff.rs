//! Central finite differences of full equilibrium re-solves.

use serde::Serialize;

use crate::compstat::{perturb, Perturbation, PerturbationResult};
use crate::economy::MultiplexEconomy;
use crate::equilibrium::{solve_equilibrium, EquilibriumSolution};
use crate::error::Result;
use crate::json::ser;
use crate::linalg::{Mat, Vector};

/// Default difference step.
pub const STEP: f64 = 1e-5;

/// Scale below which a derivative field counts as zero when forming
/// relative errors.
pub const ERROR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct FieldErrors {
    pub price: f64,
    pub welfare: f64,
    pub consumption: f64,
}

impl FieldErrors {
    pub fn max(&self) -> f64 {
        self.price.max(self.welfare).max(self.consumption)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub step: f64,
    pub analytic: PerturbationResult,
    /// Differences of `ln p^s - ln p^1`.
    #[serde(serialize_with = "ser::vector")]
    pub price: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub welfare: Vector,
    /// Differences of `ln x_i^s`, `s x n`.
    #[serde(serialize_with = "ser::matrix")]
    pub consumption: Mat,
    /// `|analytic - numeric|_inf / max(|analytic|_inf, |numeric|_inf, floor)` per field.
    pub errors: FieldErrors,
}

fn relative(a: &[f64], f: &[f64]) -> f64 {
    let diff = a.iter().zip(f).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = a.iter().chain(f).map(|x| x.abs()).fold(ERROR_FLOOR, f64::max);
    diff / scale
}

fn log_prices(c: &EquilibriumSolution) -> Vector {
    let p1 = c.prices[0];
    c.prices.map(|p| (p / p1).ln())
}

pub fn finite_difference_check(e: &MultiplexEconomy, p: &Perturbation, h: f64) -> Result<DerivativeReport> {
    let analytic = perturb(e, p)?;
    let plus = solve_equilibrium(&p.apply(e, h)?)?;
    let minus = solve_equilibrium(&p.apply(e, -h)?)?;
    let price = (log_prices(&plus) - log_prices(&minus)) / (2.0 * h);
    let welfare = (&plus.utilities - &minus.utilities) / (2.0 * h);
    let consumption = (plus.allocation.map(f64::ln) - minus.allocation.map(f64::ln)) / (2.0 * h);
    let errors = FieldErrors {
        price: relative(analytic.price.as_slice(), price.as_slice()),
        welfare: relative(analytic.welfare.as_slice(), welfare.as_slice()),
        consumption: relative(analytic.consumption.as_slice(), consumption.as_slice()),
    };
    Ok(DerivativeReport {
        step: h,
        analytic,
        price,
        welfare,
        consumption,
        errors,
    })
}
