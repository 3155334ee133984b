//! Closed-form interior competitive equilibrium.
//!
//! Everything follows from the effective endowment `mu`, the reciprocal of
//! each consumer's budget multiplier. It spans the null space of
//! `Mbar = sum_s alpha^s (I - eta^s 1') M^s`; the particular solution
//! `mu = H^-1 omega^1` with `H = Mbar + alpha^1 eta^1 1' M^1` fixes the
//! price of good 1 at one.

use serde::Serialize;

use crate::centrality::{influences, LayerInfluence};
use crate::economy::MultiplexEconomy;
use crate::error::{Cell, Error, Result};
use crate::json::ser;
use crate::linalg::{checked_inverse, max_abs, max_abs_vec, numerical_rank, ones, Mat, Vector};

/// Relative singular-value threshold for the rank of `Mbar`.
pub const RANK_TOL: f64 = 1e-10;
/// Allocations at or below this are treated as corners.
pub const INTERIOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SystemMatrices {
    #[serde(serialize_with = "ser::matrix")]
    pub mbar: Mat,
    #[serde(serialize_with = "ser::matrix")]
    pub h: Mat,
    #[serde(skip)]
    pub h_inv: Mat,
    pub rank: usize,
    pub cond_h: f64,
    /// `max |Mbar mu|` at the selected `mu`.
    pub null_residual: f64,
}

impl SystemMatrices {
    /// Rank condition: `Mbar` has rank `n - 1`.
    pub fn unique(&self) -> bool {
        self.rank + 1 == self.mbar.nrows()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSolution {
    #[serde(serialize_with = "ser::vector")]
    pub mu: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub prices: Vector,
    /// `s x n`, row `s` is good `s`.
    #[serde(serialize_with = "ser::matrix")]
    pub allocation: Mat,
    #[serde(serialize_with = "ser::matrix")]
    pub effective: Mat,
    #[serde(serialize_with = "ser::vector")]
    pub utilities: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub shadow: Vector,
    pub interior: bool,
    pub unique: bool,
}

/// Equilibrium with the intermediate objects other modules reuse.
#[derive(Debug, Clone)]
pub struct Solved {
    pub influences: Vec<LayerInfluence>,
    pub system: SystemMatrices,
    pub solution: EquilibriumSolution,
}

pub fn solve_effective_endowment(e: &MultiplexEconomy) -> Result<(Vector, SystemMatrices)> {
    let infl = influences(e)?;
    effective_endowment_from(e, &infl)
}

pub(crate) fn system_matrices(e: &MultiplexEconomy, infl: &[LayerInfluence]) -> (Mat, Mat) {
    let n = e.n();
    let mut mbar = Mat::zeros(n, n);
    for (g, l) in e.goods().iter().zip(infl) {
        let proj = Mat::identity(n, n) - g.shares() * ones(n).transpose();
        mbar += (proj * &l.m) * g.alpha();
    }
    let g1 = e.good(0);
    let h = &mbar + (g1.shares() * (ones(n).transpose() * &infl[0].m)) * g1.alpha();
    (mbar, h)
}

pub(crate) fn effective_endowment_from(
    e: &MultiplexEconomy,
    infl: &[LayerInfluence],
) -> Result<(Vector, SystemMatrices)> {
    let (mbar, h) = system_matrices(e, infl);
    let (h_inv, cond_h) = checked_inverse(&h).map_err(|cond| Error::SingularH { cond })?;
    let mu = &h_inv * e.good(0).endowments();
    if let Some((i, &v)) = mu.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::NonPositiveMu { consumer: i, value: v });
    }
    let null_residual = max_abs_vec(&(&mbar * &mu));
    let rank = numerical_rank(&mbar, RANK_TOL);
    Ok((
        mu,
        SystemMatrices {
            mbar,
            h,
            h_inv,
            rank,
            cond_h,
            null_residual,
        },
    ))
}

/// Prices, allocation and utilities implied by an effective endowment.
/// Prices are scaled so that `p^1 = 1`; `mu` is rescaled to match.
pub(crate) fn solution_from_mu(
    e: &MultiplexEconomy,
    infl: &[LayerInfluence],
    mu: &Vector,
    unique: bool,
) -> Result<EquilibriumSolution> {
    let n = e.n();
    let sbar = e.num_goods();
    let mut prices = Vector::zeros(sbar);
    let mut allocation = Mat::zeros(sbar, n);
    for (s, (g, l)) in e.goods().iter().zip(infl).enumerate() {
        let b = &l.m * mu;
        let agg = b.sum();
        prices[s] = g.alpha() * agg / g.aggregate();
        allocation.set_row(s, &(b * (g.aggregate() / agg)).transpose());
    }
    let p1 = prices[0];
    prices /= p1;
    let mu = mu / p1;
    let effective = effective_consumption(e, &allocation);

    let mut worst: Option<Cell> = None;
    for s in 0..sbar {
        for i in 0..n {
            let v = allocation[(s, i)];
            if v <= INTERIOR_TOL && worst.is_none_or(|c| v < c.value) {
                worst = Some(Cell { good: s, consumer: i, value: v });
            }
        }
    }
    if let Some(c) = worst {
        return Err(Error::NonInteriorEquilibrium(c));
    }
    let utilities = utilities(e, &effective);
    let shadow = mu.map(|m| 1.0 / m);
    Ok(EquilibriumSolution {
        mu,
        prices,
        allocation,
        effective,
        utilities,
        shadow,
        interior: true,
        unique,
    })
}

pub fn solve_equilibrium(e: &MultiplexEconomy) -> Result<EquilibriumSolution> {
    Ok(solve(e)?.solution)
}

/// [`solve_equilibrium`] keeping the influence and system matrices.
pub fn solve(e: &MultiplexEconomy) -> Result<Solved> {
    let infl = influences(e)?;
    let (mu, system) = effective_endowment_from(e, &infl)?;
    let solution = solution_from_mu(e, &infl, &mu, system.unique())?;
    Ok(Solved {
        influences: infl,
        system,
        solution,
    })
}

/// `q^s = x^s + phi^s G^s x^s` for every good, as an `s x n` matrix.
pub fn effective_consumption(e: &MultiplexEconomy, allocation: &Mat) -> Mat {
    let mut q = allocation.clone();
    for (s, g) in e.goods().iter().enumerate() {
        let x = allocation.row(s).transpose();
        let qs = &x + g.spillover() * &x;
        q.set_row(s, &qs.transpose());
    }
    q
}

/// `u_i = sum_s alpha^s ln q_i^s`; `-inf` where some `q <= 0`.
pub fn utilities(e: &MultiplexEconomy, effective: &Mat) -> Vector {
    let n = e.n();
    Vector::from_fn(n, |i, _| {
        e.goods()
            .iter()
            .enumerate()
            .map(|(s, g)| {
                let q = effective[(s, i)];
                if q > 0.0 {
                    g.alpha() * q.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .sum()
    })
}

/// Utility profile of an arbitrary allocation.
pub fn utilities_of(e: &MultiplexEconomy, allocation: &Mat) -> Vector {
    utilities(e, &effective_consumption(e, allocation))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// `max_s |sum_i x_i^s - omega^s|`.
    pub market_clearing: f64,
    /// `max_i |p.x_i - p.omega_i|`.
    pub budget: f64,
    /// Relative first-order residual: equality on interior cells,
    /// `alpha mu / p <= q` on corner cells.
    pub foc: f64,
    /// Mismatch between the reported effective consumption and `x + phi G x`.
    pub effective: f64,
    /// Largest negative consumption or effective consumption.
    pub positivity: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn verify_equilibrium(e: &MultiplexEconomy, c: &EquilibriumSolution) -> Result<VerificationReport> {
    verify_equilibrium_tol(e, c, 1e-8)
}

pub fn verify_equilibrium_tol(e: &MultiplexEconomy, c: &EquilibriumSolution, tol: f64) -> Result<VerificationReport> {
    let n = e.n();
    let sbar = e.num_goods();
    if c.mu.len() != n
        || c.prices.len() != sbar
        || c.allocation.shape() != (sbar, n)
        || c.effective.shape() != (sbar, n)
    {
        return Err(Error::DimensionMismatch(format!(
            "candidate does not match an economy with {n} consumers and {sbar} goods"
        )));
    }
    let x = &c.allocation;
    let w = e.endowment_matrix();
    let mut market_clearing: f64 = 0.0;
    for s in 0..sbar {
        market_clearing = market_clearing.max((x.row(s).sum() - w.row(s).sum()).abs());
    }
    let spend = x.transpose() * &c.prices;
    let income = w.transpose() * &c.prices;
    let budget = max_abs_vec(&(spend - income));

    let q = effective_consumption(e, x);
    let effective = max_abs(&(&q - &c.effective));
    let mut foc: f64 = 0.0;
    let mut positivity: f64 = 0.0;
    for (s, g) in e.goods().iter().enumerate() {
        for i in 0..n {
            let demand = g.alpha() * c.mu[i] / c.prices[s];
            let qi = q[(s, i)];
            positivity = positivity.max(-x[(s, i)]).max(-qi);
            let r = if x[(s, i)] > 1e-9 * g.aggregate() {
                (demand - qi).abs() / qi.abs().max(f64::MIN_POSITIVE)
            } else {
                (demand - qi).max(0.0) / qi.abs().max(f64::MIN_POSITIVE)
            };
            foc = foc.max(r);
        }
    }
    let passed = [market_clearing, budget, foc, effective, positivity]
        .iter()
        .all(|&r| r <= tol);
    Ok(VerificationReport {
        market_clearing,
        budget,
        foc,
        effective,
        positivity,
        tolerance: tol,
        passed,
    })
}

/// Effective endowment when every price is one and incomes are `t`.
pub fn exogenous_price_mu(e: &MultiplexEconomy, t: &Vector) -> Result<Vector> {
    if t.len() != e.n() {
        return Err(Error::DimensionMismatch(format!("expected {} incomes, got {}", e.n(), t.len())));
    }
    let infl = influences(e)?;
    let n = e.n();
    let agg = e
        .goods()
        .iter()
        .zip(&infl)
        .fold(Mat::zeros(n, n), |acc, (g, l)| acc + &l.m * g.alpha());
    let (inv, _) = checked_inverse(&agg).map_err(|_| Error::SingularAggregate)?;
    Ok(inv * t)
}
