//! Weighted-utilitarian planner solved numerically.

use serde::Serialize;

use crate::economy::MultiplexEconomy;
use crate::equilibrium::{effective_consumption, utilities};
use crate::error::{Error, Result};
use crate::json::ser;
use crate::linalg::{Mat, Vector};

use super::simplex::{minimize, SpgConfig};

#[derive(Debug, Clone, Serialize)]
pub struct PlannerOutcome {
    #[serde(serialize_with = "ser::matrix")]
    pub allocation: Mat,
    /// `theta' u(x)`.
    pub value: f64,
    pub iterations: usize,
    pub stationarity: f64,
}

/// Maximize `theta' u(x)` over feasible allocations by projected gradient,
/// starting from the equal split.
pub fn numeric_planner(e: &MultiplexEconomy, theta: &Vector) -> Result<PlannerOutcome> {
    numeric_planner_with(e, theta, SpgConfig::default())
}

pub fn numeric_planner_with(e: &MultiplexEconomy, theta: &Vector, cfg: SpgConfig) -> Result<PlannerOutcome> {
    let (n, sbar) = (e.n(), e.num_goods());
    if theta.len() != n {
        return Err(Error::DimensionMismatch(format!("theta has {} entries, expected {n}", theta.len())));
    }
    if theta.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain("planner weights must be positive".into()));
    }
    let totals: Vec<f64> = e.goods().iter().map(|g| g.aggregate()).collect();
    let spill: Vec<Mat> = e.goods().iter().map(|g| g.spillover()).collect();
    let alphas = e.alphas();

    // Flat layout: block s holds good s for all consumers.
    let unflat = |v: &Vector| Mat::from_fn(sbar, n, |s, i| v[s * n + i]);
    let objective = |v: &Vector| -> f64 {
        let q = effective_consumption(e, &unflat(v));
        if q.iter().any(|&x| x <= 0.0) {
            return f64::INFINITY;
        }
        -theta.dot(&utilities(e, &q))
    };
    let gradient = |v: &Vector| -> Vector {
        let q = effective_consumption(e, &unflat(v));
        let mut g = Vector::zeros(n * sbar);
        for s in 0..sbar {
            let w = Vector::from_fn(n, |i, _| theta[i] * alphas[s] / q[(s, i)]);
            let d = &w + spill[s].transpose() * &w;
            for j in 0..n {
                g[s * n + j] = -d[j];
            }
        }
        g
    };
    let x0 = Vector::from_fn(n * sbar, |k, _| totals[k / n] / n as f64);
    let r = minimize(objective, gradient, x0, &totals, cfg);
    if !r.converged {
        return Err(Error::NoConvergence {
            iterations: r.iterations,
            residual: r.stationarity,
        });
    }
    Ok(PlannerOutcome {
        allocation: unflat(&r.x),
        value: -r.value,
        iterations: r.iterations,
        stationarity: r.stationarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, Edgeworth};
    use crate::oracle::curves::contract_curve;
    use crate::welfare::pareto_allocation;

    #[test]
    fn benchmark_at_income_shares() {
        let e = fixtures::benchmark();
        let r = numeric_planner(&e, &e.weighted_shares()).unwrap();
        let expect = Mat::from_row_slice(2, 2, &[0.78, 1.22, 0.78, 1.22]);
        assert!((&r.allocation - expect).amax() < 1e-7);
    }

    #[test]
    fn example_one_lands_on_contract_curve() {
        let e = fixtures::example_i(0.7, 0.5);
        let r = numeric_planner(&e, &Vector::from_vec(vec![0.5, 0.5])).unwrap();
        let (x, y) = (r.allocation[(0, 0)], r.allocation[(1, 0)]);
        assert!((y - contract_curve(Edgeworth::I, 0.7, x).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn matches_closed_form_interior() {
        let e = fixtures::example_v(0.5);
        let theta = Vector::from_vec(vec![0.3, 0.2, 0.25, 0.25]);
        let r = numeric_planner(&e, &theta).unwrap();
        let p = pareto_allocation(&e, &theta).unwrap();
        let closed = theta.dot(&p.utilities);
        assert!((r.value - closed).abs() < 1e-9);
        assert!(r.value <= closed + 1e-12);
    }
}
