//! Walrasian price adjustment around a best-response Nash solver.
//!
//! For fixed prices, consumers repeatedly best-respond to the others'
//! consumption (damped Jacobi). Each best response is the Cobb-Douglas
//! demand on effective consumption, clamped at zero with the budget
//! re-spread over the remaining goods. Prices then move with relative
//! excess demand.

use serde::Serialize;

use crate::centrality::influences;
use crate::economy::MultiplexEconomy;
use crate::equilibrium::{effective_consumption, system_matrices, utilities, EquilibriumSolution, INTERIOR_TOL, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, Mat, Vector};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TatonnementConfig {
    pub kappa: f64,
    pub damping: f64,
    pub max_iterations: usize,
    /// On `max_s |z^s| / omega^s`.
    pub tolerance: f64,
    pub price_floor: f64,
}

impl Default for TatonnementConfig {
    fn default() -> Self {
        TatonnementConfig {
            kappa: 0.1,
            damping: 0.5,
            max_iterations: 10_000,
            tolerance: 1e-10,
            price_floor: 1e-9,
        }
    }
}

impl TatonnementConfig {
    fn check(&self) -> Result<()> {
        let ok = self.kappa > 0.0
            && self.kappa <= 1.0
            && self.damping > 0.0
            && self.damping <= 1.0
            && self.tolerance > 0.0
            && self.price_floor > 0.0
            && self.max_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("tatonnement configuration out of range".into()))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TatonnementOutcome {
    pub solution: EquilibriumSolution,
    pub iterations: usize,
    pub excess_demand: f64,
}

const INNER_MAX: usize = 10_000;
const INNER_TOL: f64 = 1e-14;

/// Demand of one consumer given prices, wealth and external effective
/// consumption `ext`. Returns consumption and the inverse budget multiplier.
pub fn best_response(alphas: &Vector, prices: &Vector, wealth: f64, ext: &Vector) -> (Vector, f64) {
    let sbar = alphas.len();
    let brk: Vec<f64> = (0..sbar).map(|s| prices[s] * ext[s] / alphas[s]).collect();
    let mut order: Vec<usize> = (0..sbar).collect();
    order.sort_by(|&a, &b| brk[a].total_cmp(&brk[b]));
    let mut lambda = 0.0;
    let (mut num, mut den) = (wealth, 0.0);
    for (k, &s) in order.iter().enumerate() {
        num += prices[s] * ext[s];
        den += alphas[s];
        lambda = num / den;
        if k + 1 == sbar || lambda <= brk[order[k + 1]] {
            break;
        }
    }
    let x = Vector::from_fn(sbar, |s, _| (alphas[s] * lambda / prices[s] - ext[s]).max(0.0));
    (x, lambda)
}

struct Nash {
    x: Mat,
    lambda: Vector,
}

fn nash(e: &MultiplexEconomy, spill: &[Mat], prices: &Vector, start: &Mat, damping: f64) -> Nash {
    let (n, sbar) = (e.n(), e.num_goods());
    let alphas = e.alphas();
    let omega = e.endowment_matrix();
    let wealth: Vec<f64> = (0..n).map(|i| prices.dot(&omega.column(i))).collect();
    let scale = omega.amax();
    let mut x = start.clone();
    let mut lambda = Vector::zeros(n);
    for _ in 0..INNER_MAX {
        let mut next = Mat::zeros(sbar, n);
        for i in 0..n {
            let ext = Vector::from_fn(sbar, |s, _| (0..n).map(|j| spill[s][(i, j)] * x[(s, j)]).sum());
            let (xi, li) = best_response(&alphas, prices, wealth[i], &ext);
            next.set_column(i, &xi);
            lambda[i] = li;
        }
        let step = &next - &x;
        x += step.clone() * damping;
        if step.amax() <= INNER_TOL * scale {
            break;
        }
    }
    Nash { x, lambda }
}

pub fn tatonnement_solve(e: &MultiplexEconomy, cfg: TatonnementConfig) -> Result<TatonnementOutcome> {
    cfg.check()?;
    let sbar = e.num_goods();
    let spill: Vec<Mat> = e.goods().iter().map(|g| g.spillover()).collect();
    let totals: Vector = Vector::from_iterator(sbar, e.goods().iter().map(|g| g.aggregate()));
    let alphas = e.alphas();
    // Prices of the economy without spillovers.
    let mut prices = alphas.component_div(&totals);
    prices /= prices[0];
    let mut x = e.endowment_matrix();
    let mut excess = f64::INFINITY;
    for it in 0..=cfg.max_iterations {
        let eq = nash(e, &spill, &prices, &x, cfg.damping);
        x = eq.x;
        let z = Vector::from_fn(sbar, |s, _| x.row(s).sum() - totals[s]);
        excess = z.component_div(&totals).amax();
        if excess < cfg.tolerance {
            return Ok(TatonnementOutcome {
                solution: assemble(e, prices, x, eq.lambda),
                iterations: it,
                excess_demand: excess,
            });
        }
        if it == cfg.max_iterations {
            break;
        }
        for s in 0..sbar {
            prices[s] = (prices[s] * (1.0 + cfg.kappa * z[s] / totals[s])).max(cfg.price_floor);
        }
        prices /= prices[0];
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual: excess,
    })
}

fn assemble(e: &MultiplexEconomy, prices: Vector, allocation: Mat, mu: Vector) -> EquilibriumSolution {
    let effective = effective_consumption(e, &allocation);
    let unique = influences(e)
        .map(|infl| {
            let (mbar, _) = system_matrices(e, &infl);
            numerical_rank(&mbar, RANK_TOL) + 1 == e.n()
        })
        .unwrap_or(false);
    EquilibriumSolution {
        shadow: mu.map(|m| 1.0 / m),
        mu,
        prices,
        interior: allocation.iter().all(|&v| v > INTERIOR_TOL),
        utilities: utilities(e, &effective),
        allocation,
        effective,
        unique,
    }
}
