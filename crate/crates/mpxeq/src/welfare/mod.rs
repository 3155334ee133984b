//! Pareto frontier, efficiency diagnosis and measurement, and explicit
//! Pareto improvements when the equilibrium is inefficient.

pub mod lp;

use serde::Serialize;

use crate::centrality::{influences, parallel_verdict, LayerInfluence, ParallelVerdict};
use crate::economy::MultiplexEconomy;
use crate::equilibrium::{self, effective_consumption, utilities, utilities_of, Solved};
use crate::error::{Cell, Error, Result};
use crate::json::ser;
use crate::linalg::{max_abs, ones, Mat, Vector};

/// Smallest line-search step before giving up.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ParetoSolution {
    /// Normalized weights.
    #[serde(serialize_with = "ser::vector")]
    pub weights: Vector,
    #[serde(serialize_with = "ser::matrix")]
    pub allocation: Mat,
    /// Resource multipliers `beta^s = alpha^s 1'theta / omega^s`.
    #[serde(serialize_with = "ser::vector")]
    pub multipliers: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub utilities: Vector,
    /// Relative planner first-order residual.
    pub kkt_residual: f64,
}

fn check_weights(n: usize, theta: &Vector) -> Result<Vector> {
    if theta.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} weights, got {}", theta.len())));
    }
    if theta.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(Error::Domain("Pareto weights must be strictly positive".into()));
    }
    Ok(theta / theta.sum())
}

/// Interior solution of `max sum_i theta_i u_i` over feasible allocations.
pub fn pareto_allocation(e: &MultiplexEconomy, theta: &Vector) -> Result<ParetoSolution> {
    pareto_from(e, &influences(e)?, theta)
}

pub(crate) fn pareto_from(e: &MultiplexEconomy, infl: &[LayerInfluence], theta: &Vector) -> Result<ParetoSolution> {
    let w = check_weights(e.n(), theta)?;
    let n = e.n();
    let mut allocation = Mat::zeros(e.num_goods(), n);
    for (s, (g, l)) in e.goods().iter().zip(infl).enumerate() {
        let x = &l.m * w.component_div(&l.tilde_b) * g.aggregate();
        allocation.set_row(s, &x.transpose());
    }
    let bad: Vec<Cell> = cells_where(&allocation, |v| v <= 0.0);
    if !bad.is_empty() {
        return Err(Error::NonInteriorPareto(bad));
    }
    let multipliers = Vector::from_iterator(e.num_goods(), e.goods().iter().map(|g| g.alpha() / g.aggregate()));
    let q = effective_consumption(e, &allocation);
    Ok(ParetoSolution {
        kkt_residual: planner_kkt_residual(e, &w, &allocation),
        utilities: utilities(e, &q),
        weights: w,
        allocation,
        multipliers,
    })
}

fn cells_where(x: &Mat, pred: impl Fn(f64) -> bool) -> Vec<Cell> {
    let mut out = Vec::new();
    for s in 0..x.nrows() {
        for i in 0..x.ncols() {
            if pred(x[(s, i)]) {
                out.push(Cell { good: s, consumer: i, value: x[(s, i)] });
            }
        }
    }
    out
}

/// Planner stationarity `(I + phi G')(theta . alpha / q) = beta 1` with
/// `beta = alpha 1'theta / omega`, as a max relative residual over goods.
pub fn planner_kkt_residual(e: &MultiplexEconomy, theta: &Vector, allocation: &Mat) -> f64 {
    let n = e.n();
    let q = effective_consumption(e, allocation);
    let tsum = theta.sum();
    let mut worst: f64 = 0.0;
    for (s, g) in e.goods().iter().enumerate() {
        let beta = g.alpha() * tsum / g.aggregate();
        let v = Vector::from_fn(n, |i, _| theta[i] * g.alpha() / q[(s, i)]);
        let lhs = &v + g.spillover().transpose() * &v;
        let r = (lhs - ones(n) * beta).amax() / beta;
        worst = worst.max(r);
    }
    worst
}

/// Layer weights `rho^s = (mu . b~^s) / (mu' b~^s)`.
pub fn layer_weights(solved: &Solved) -> Vec<Vector> {
    let mu = &solved.solution.mu;
    solved
        .influences
        .iter()
        .map(|l| {
            let v = mu.component_mul(&l.tilde_b);
            let total = v.sum();
            v / total
        })
        .collect()
}

/// `sum_i a_i ln(a_i / b_i)` with `0 ln 0 = 0`.
pub fn kl_divergence(a: &Vector, b: &Vector) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| if x == 0.0 { 0.0 } else { x * (x / y).ln() })
        .sum()
}

/// Hellinger distance `sqrt(sum (sqrt a - sqrt b)^2)`.
pub fn hellinger(a: &Vector, b: &Vector) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x.sqrt() - y.sqrt()).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `L(theta) = (1'theta) sum_s alpha^s KL(theta/1'theta || rho^s)`.
pub fn loss_from(alphas: &Vector, rho: &[Vector], theta: &Vector) -> f64 {
    let total = theta.sum();
    let w = theta / total;
    total
        * rho
            .iter()
            .zip(alphas.iter())
            .map(|(r, a)| a * kl_divergence(&w, r))
            .sum::<f64>()
}

#[derive(Debug, Clone, Serialize)]
pub struct EfficiencyVerdict {
    pub parallel: ParallelVerdict,
    /// Supporting Pareto weight, present only when the layers are parallel.
    #[serde(serialize_with = "ser::opt_vector")]
    pub theta_star: Option<Vector>,
    /// `max |X^(theta*) - X*|` when `theta*` exists.
    pub reproduction_error: Option<f64>,
}

pub fn efficiency_verdict(e: &MultiplexEconomy) -> Result<EfficiencyVerdict> {
    let solved = equilibrium::solve(e)?;
    verdict_from(e, &solved)
}

fn verdict_from(e: &MultiplexEconomy, solved: &Solved) -> Result<EfficiencyVerdict> {
    let parallel = parallel_verdict(e, &solved.influences);
    if !parallel.parallel {
        return Ok(EfficiencyVerdict {
            parallel,
            theta_star: None,
            reproduction_error: None,
        });
    }
    let b = &solved.influences[0].tilde_b;
    let v = b.component_mul(&solved.solution.mu);
    let theta = &v / v.sum();
    let p = pareto_from(e, &solved.influences, &theta)?;
    let err = max_abs(&(&p.allocation - &solved.solution.allocation));
    Ok(EfficiencyVerdict {
        parallel,
        theta_star: Some(theta),
        reproduction_error: Some(err),
    })
}

/// Largest weighted utility gain over the equilibrium at weights `theta`.
pub fn efficiency_loss(e: &MultiplexEconomy, theta: &Vector) -> Result<f64> {
    let solved = equilibrium::solve(e)?;
    check_weights(e.n(), theta)?;
    Ok(loss_from(&e.alphas(), &layer_weights(&solved), theta))
}

#[derive(Debug, Clone, Serialize)]
pub struct ResourceUtilization {
    pub cru: f64,
    #[serde(serialize_with = "ser::vector")]
    pub theta_hat: Vector,
    /// Bounds on `ln cru`.
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// Allocation attaining the equilibrium utilities with a `cru` share of resources.
    #[serde(serialize_with = "ser::matrix")]
    pub witness: Mat,
    pub witness_feasible: bool,
}

/// Coefficient of resource utilization with its KL/Hellinger bounds.
/// A witness with negative entries is flagged, not rejected.
pub fn resource_utilization(e: &MultiplexEconomy) -> Result<ResourceUtilization> {
    let solved = equilibrium::solve(e)?;
    Ok(cru_from(e, &solved, &layer_weights(&solved)))
}

/// As [`resource_utilization`], but an infeasible witness is an error.
pub fn resource_utilization_strict(e: &MultiplexEconomy) -> Result<ResourceUtilization> {
    let r = resource_utilization(e)?;
    if !r.witness_feasible {
        return Err(Error::ConstructionInfeasible(cells_where(&r.witness, |v| v < 0.0)));
    }
    Ok(r)
}

fn cru_from(e: &MultiplexEconomy, solved: &Solved, rho: &[Vector]) -> ResourceUtilization {
    let n = e.n();
    let alphas = e.alphas();
    let geo = Vector::from_fn(n, |i, _| {
        rho.iter()
            .zip(alphas.iter())
            .map(|(r, a)| a * r[i].ln())
            .sum::<f64>()
            .exp()
    });
    let cru = geo.sum();
    let theta_hat = &geo / cru;

    let mut ln_lower: f64 = 0.0;
    let mut upper_sum = 0.0;
    for (s, rs) in rho.iter().enumerate() {
        for (t, rt) in rho.iter().enumerate() {
            ln_lower = ln_lower.min(-kl_divergence(rs, rt));
            upper_sum += alphas[s] * alphas[t] * hellinger(rs, rt).powi(2);
        }
    }

    let mut witness = Mat::zeros(e.num_goods(), n);
    for (s, (g, l)) in e.goods().iter().zip(&solved.influences).enumerate() {
        let q = geo.component_div(&l.tilde_b) * g.aggregate();
        witness.set_row(s, &(&l.m * q).transpose());
    }
    let witness_feasible = witness.iter().all(|&v| v >= 0.0);
    ResourceUtilization {
        cru,
        theta_hat,
        ln_lower,
        ln_upper: -0.5 * upper_sum,
        witness,
        witness_feasible,
    }
}

/// `varpi = sum_s alpha^s rho^s`: no local redistribution raises the
/// `varpi`-weighted sum of utilities.
pub fn no_improvement_weight(e: &MultiplexEconomy) -> Result<Vector> {
    let solved = equilibrium::solve(e)?;
    Ok(varpi_from(e, &layer_weights(&solved)))
}

fn varpi_from(e: &MultiplexEconomy, rho: &[Vector]) -> Vector {
    rho.iter()
        .zip(e.goods())
        .fold(Vector::zeros(e.n()), |acc, (r, g)| acc + r * g.alpha())
}

#[derive(Debug, Clone, Serialize)]
pub struct Improvement {
    #[serde(serialize_with = "ser::matrix")]
    pub allocation: Mat,
    pub step: f64,
    /// The pair of goods that is reallocated.
    pub goods: (usize, usize),
    /// Reallocation directions in units of goods `s` and `t`.
    #[serde(serialize_with = "ser::vector")]
    pub tau_s: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub tau_t: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub gains: Vector,
    /// Smallest utility gain.
    pub margin: f64,
}

/// Reallocate goods `s, t` of the most dissimilar pair so every consumer
/// gains. Directions solve `1'M^s tau^s = 0`, `1'M^t tau^t = 0` and
/// `alpha^t q^s tau^t + alpha^s q^t tau^s >= q^s q^t` (in effective units)
/// via an LP; the step is halved from 1 until the move is strictly improving.
pub fn construct_improvement(e: &MultiplexEconomy) -> Result<Improvement> {
    let solved = equilibrium::solve(e)?;
    improvement_from(e, &solved)
}

fn improvement_from(e: &MultiplexEconomy, solved: &Solved) -> Result<Improvement> {
    let verdict = parallel_verdict(e, &solved.influences);
    if verdict.parallel {
        return Err(Error::ParallelNoImprovement);
    }
    let (s, t) = verdict.worst_pair.expect("non-parallel implies at least two goods");
    let n = e.n();
    let x = &solved.solution.allocation;
    let q = &solved.solution.effective;
    let (a_s, a_t) = (e.good(s).alpha(), e.good(t).alpha());
    let qmax = q.iter().cloned().fold(0.0, f64::max);
    let bound = 10.0 * qmax;

    // Variables: tau^s (n), tau^t (n), z. Maximize z subject to
    // -(alpha^s q_t tau^s + alpha^t q_s tau^t) + q_s q_t z <= 0.
    let nv = 2 * n + 1;
    let mut problem = lp::Lp {
        c: {
            let mut c = vec![0.0; nv];
            c[2 * n] = 1.0;
            c
        },
        lower: [vec![-bound; 2 * n], vec![0.0]].concat(),
        upper: [vec![bound; 2 * n], vec![1.0]].concat(),
        ..Default::default()
    };
    for i in 0..n {
        let (qs, qt) = (q[(s, i)], q[(t, i)]);
        let mut row = vec![0.0; nv];
        row[i] = -a_s * qt;
        row[n + i] = -a_t * qs;
        row[2 * n] = qs * qt;
        problem.a_ub.push(row);
        problem.b_ub.push(0.0);
    }
    for (k, good) in [s, t].into_iter().enumerate() {
        let mut row = vec![0.0; nv];
        for i in 0..n {
            row[k * n + i] = solved.influences[good].tilde_b[i];
        }
        problem.a_eq.push(row);
        problem.b_eq.push(0.0);
    }
    let sol = problem.solve().map_err(|_| Error::ImprovementInfeasible(s, t))?;
    let z = sol.x[2 * n];
    if !(z > 1e-12) {
        return Err(Error::ImprovementInfeasible(s, t));
    }
    let hat_s = Vector::from_fn(n, |i, _| sol.x[i] / z);
    let hat_t = Vector::from_fn(n, |i, _| sol.x[n + i] / z);
    let tau_s = &solved.influences[s].m * hat_s;
    let tau_t = &solved.influences[t].m * hat_t;

    let base = &solved.solution.utilities;
    let mut step = 1.0;
    while step >= MIN_STEP {
        let mut cand = x.clone();
        for i in 0..n {
            cand[(s, i)] += step * tau_s[i];
            cand[(t, i)] += step * tau_t[i];
        }
        if cand.iter().all(|&v| v >= 0.0) {
            let u = utilities_of(e, &cand);
            let gains = &u - base;
            if gains.iter().all(|&g| g > 0.0) {
                let margin = gains.min();
                return Ok(Improvement {
                    allocation: cand,
                    step,
                    goods: (s, t),
                    tau_s,
                    tau_t,
                    gains,
                    margin,
                });
            }
        }
        step *= 0.5;
    }
    Err(Error::LineSearchFailed(MIN_STEP))
}

#[derive(Debug, Clone, Serialize)]
pub struct WelfareReport {
    pub verdict: EfficiencyVerdict,
    #[serde(serialize_with = "ser::vector")]
    pub alphas: Vector,
    #[serde(serialize_with = "ser::vectors")]
    pub rho: Vec<Vector>,
    pub utilization: ResourceUtilization,
    /// `L` at the utilization minimizer, equal to `-ln cru`.
    pub min_loss: f64,
    #[serde(serialize_with = "ser::vector")]
    pub varpi: Vector,
    pub improvement_available: bool,
}

impl WelfareReport {
    /// Efficiency loss `L(theta)` for these equilibrium layer weights.
    pub fn loss(&self, theta: &Vector) -> f64 {
        loss_from(&self.alphas, &self.rho, theta)
    }
}

pub fn welfare_report(e: &MultiplexEconomy) -> Result<WelfareReport> {
    let solved = equilibrium::solve(e)?;
    let verdict = verdict_from(e, &solved)?;
    let rho = layer_weights(&solved);
    let utilization = cru_from(e, &solved, &rho);
    let alphas = e.alphas();
    let min_loss = loss_from(&alphas, &rho, &utilization.theta_hat);
    let varpi = varpi_from(e, &rho);
    let improvement_available = !verdict.parallel.parallel;
    Ok(WelfareReport {
        verdict,
        alphas,
        rho,
        utilization,
        min_loss,
        varpi,
        improvement_available,
    })
}
