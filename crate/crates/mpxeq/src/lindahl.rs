//! Interior Lindahl equilibrium with personalized externality prices.

use serde::Serialize;

use crate::centrality::influences;
use crate::economy::MultiplexEconomy;
use crate::equilibrium::{self, effective_consumption, utilities, INTERIOR_TOL};
use crate::error::{Cell, Error, Result};
use crate::json::ser;
use crate::linalg::{max_abs, Mat, Vector};
use crate::welfare::{pareto_from, planner_kkt_residual};

#[derive(Debug, Clone, Serialize)]
pub struct LindahlSolution {
    /// `alpha^s / omega^s`.
    pub goods_prices: Vec<f64>,
    /// Own prices `b~_i^s p^s`, `s x n`.
    #[serde(serialize_with = "ser::matrix")]
    pub own_prices: Mat,
    /// Per good, `n x n` matrix of personalized prices: entry `(i, j)` is
    /// what consumer `i` pays for `j`'s consumption; the diagonal holds own prices.
    #[serde(serialize_with = "ser::matrices")]
    pub price_tensor: Vec<Mat>,
    #[serde(serialize_with = "ser::matrix")]
    pub allocation: Mat,
    /// Income shares `sum_s alpha^s eta^s`.
    #[serde(serialize_with = "ser::vector")]
    pub gamma: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub utilities: Vector,
    pub residuals: LindahlResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct LindahlResiduals {
    /// `max |p_ii - (p - sum_{j != i} p_ji)|`.
    pub compatibility: f64,
    pub market_clearing: f64,
    /// Extended budgets.
    pub budget: f64,
}

pub fn solve_lindahl(e: &MultiplexEconomy) -> Result<LindahlSolution> {
    let infl = influences(e)?;
    let n = e.n();
    let sbar = e.num_goods();
    let gamma = e.weighted_shares();

    let goods_prices: Vec<f64> = e.goods().iter().map(|g| g.alpha() / g.aggregate()).collect();
    let mut own_prices = Mat::zeros(sbar, n);
    let mut price_tensor = Vec::with_capacity(sbar);
    let mut allocation = Mat::zeros(sbar, n);
    for (s, (g, l)) in e.goods().iter().zip(&infl).enumerate() {
        let own = &l.tilde_b * goods_prices[s];
        let mut p = g.network() * g.phi();
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] *= own[i];
            }
            p[(i, i)] = own[i];
        }
        own_prices.set_row(s, &own.transpose());
        price_tensor.push(p);
        let x = &l.m * gamma.component_div(&l.tilde_b) * g.aggregate();
        allocation.set_row(s, &x.transpose());
    }

    let bad: Vec<Cell> = allocation
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= INTERIOR_TOL)
        .map(|(k, &v)| Cell {
            good: k % sbar,
            consumer: k / sbar,
            value: v,
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::NonInteriorLindahl(bad));
    }

    let mut compatibility: f64 = 0.0;
    let mut market_clearing: f64 = 0.0;
    for (s, g) in e.goods().iter().enumerate() {
        let p = &price_tensor[s];
        for i in 0..n {
            let others: f64 = (0..n).filter(|&j| j != i).map(|j| p[(j, i)]).sum();
            compatibility = compatibility.max((p[(i, i)] - (goods_prices[s] - others)).abs());
        }
        market_clearing = market_clearing.max((allocation.row(s).sum() - g.aggregate()).abs());
    }
    let mut budget: f64 = 0.0;
    for i in 0..n {
        let mut spend = 0.0;
        let mut income = 0.0;
        for (s, g) in e.goods().iter().enumerate() {
            spend += (0..n).map(|j| price_tensor[s][(i, j)] * allocation[(s, j)]).sum::<f64>();
            income += goods_prices[s] * g.endowments()[i];
        }
        budget = budget.max((spend - income).abs());
    }

    let q = effective_consumption(e, &allocation);
    Ok(LindahlSolution {
        goods_prices,
        own_prices,
        price_tensor,
        utilities: utilities(e, &q),
        allocation,
        gamma,
        residuals: LindahlResiduals {
            compatibility,
            market_clearing,
            budget,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// Nobody is worse off under Lindahl and somebody is better off.
    LindahlDominates,
    /// The reverse.
    CompetitiveDominates,
    Equal,
    /// Some consumers gain, others lose.
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct LindahlComparison {
    pub lindahl: LindahlSolution,
    #[serde(serialize_with = "ser::vector")]
    pub competitive_utilities: Vector,
    /// `u^L - u*`.
    #[serde(serialize_with = "ser::vector")]
    pub delta_u: Vector,
    /// `max |x^L - X^(gamma)|` against the planner solution at weights gamma.
    pub planner_gap: f64,
    pub planner_kkt_residual: f64,
    pub dominance: Dominance,
}

pub fn compare_lindahl(e: &MultiplexEconomy) -> Result<LindahlComparison> {
    let lindahl = solve_lindahl(e)?;
    let comp = equilibrium::solve(e)?;
    let planner = pareto_from(e, &comp.influences, &lindahl.gamma)?;
    let planner_gap = max_abs(&(&planner.allocation - &lindahl.allocation));
    let kkt = planner_kkt_residual(e, &lindahl.gamma, &lindahl.allocation);
    let delta_u = &lindahl.utilities - &comp.solution.utilities;
    let tol = 1e-12;
    let dominance = if delta_u.iter().all(|d| d.abs() <= tol) {
        Dominance::Equal
    } else if delta_u.iter().all(|&d| d >= -tol) {
        Dominance::LindahlDominates
    } else if delta_u.iter().all(|&d| d <= tol) {
        Dominance::CompetitiveDominates
    } else {
        Dominance::Mixed
    };
    Ok(LindahlComparison {
        lindahl,
        competitive_utilities: comp.solution.utilities,
        delta_u,
        planner_gap,
        planner_kkt_residual: kkt,
        dominance,
    })
}
