//! Report assembly for subcommands that combine several library calls.

use serde::Serialize;

use mpxeq::centrality::{influences, katz_centralities, parallel_verdict, ParallelVerdict};
use mpxeq::compstat::{perturb, Perturbation, PerturbationResult};
use mpxeq::economy::{validate_economy, AssumptionReport};
use mpxeq::equilibrium::{self, solve_effective_endowment, verify_equilibrium, EquilibriumSolution, SystemMatrices, VerificationReport};
use mpxeq::json::ser;
use mpxeq::linalg::{max_abs, Mat, Vector};
use mpxeq::oracle::finite_diff::{finite_difference_check, FieldErrors, STEP};
use mpxeq::oracle::random::{self, random_perturbation, KINDS};
use mpxeq::oracle::{numeric_planner, tatonnement_solve, TatonnementConfig};
use mpxeq::welfare::pareto_allocation;
use mpxeq::{MultiplexEconomy, Result};

#[derive(Serialize)]
pub struct ValidateReport {
    pub consumers: usize,
    pub goods: Vec<String>,
    pub assumptions: AssumptionReport,
}

pub fn validate(e: &MultiplexEconomy) -> ValidateReport {
    let mut assumptions = validate_economy(e);
    assumptions.rank_condition = solve_effective_endowment(e).ok().map(|(_, sys)| sys.unique());
    ValidateReport {
        consumers: e.n(),
        goods: e.goods().iter().map(|g| g.name().to_string()).collect(),
        assumptions,
    }
}

#[derive(Serialize)]
pub struct SolveReport {
    pub equilibrium: EquilibriumSolution,
    pub system: SystemMatrices,
    pub verification: VerificationReport,
}

pub fn solve(e: &MultiplexEconomy) -> Result<SolveReport> {
    let solved = equilibrium::solve(e)?;
    let verification = verify_equilibrium(e, &solved.solution)?;
    Ok(SolveReport {
        equilibrium: solved.solution,
        system: solved.system,
        verification,
    })
}

#[derive(Serialize)]
pub struct LayerReport {
    pub good: String,
    pub spectral_ok: bool,
    pub condition: f64,
    #[serde(serialize_with = "ser::matrix")]
    pub influence_matrix: Mat,
    #[serde(serialize_with = "ser::vector")]
    pub tilde_b: Vector,
    /// `M^s mu*`, absent when the effective endowment is undefined.
    #[serde(serialize_with = "ser::opt_vector")]
    pub katz: Option<Vector>,
    /// Generalized influence centrality `(H')^-1 b~^s`.
    #[serde(serialize_with = "ser::opt_vector")]
    pub influence: Option<Vector>,
}

#[derive(Serialize)]
pub struct CentralityReport {
    pub layers: Vec<LayerReport>,
    pub parallel: ParallelVerdict,
}

pub fn centrality(e: &MultiplexEconomy) -> Result<CentralityReport> {
    let infl = influences(e)?;
    let parallel = parallel_verdict(e, &infl);
    let sys = solve_effective_endowment(e).ok();
    let mut layers = Vec::with_capacity(infl.len());
    for (s, l) in infl.iter().enumerate() {
        let influence = match &sys {
            Some((_, system)) => Some(mpxeq::centrality::influence_centrality(e, &system.h, s)?),
            None => None,
        };
        layers.push(LayerReport {
            good: e.good(s).name().to_string(),
            spectral_ok: l.spectral_ok,
            condition: l.condition,
            influence_matrix: l.m.clone(),
            tilde_b: l.tilde_b.clone(),
            katz: sys.as_ref().map(|(mu, _)| katz_centralities(l, mu).b),
            influence,
        });
    }
    Ok(CentralityReport { layers, parallel })
}

#[derive(Serialize)]
pub struct DifferenceSummary {
    pub step: f64,
    #[serde(serialize_with = "ser::vector")]
    pub price: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub welfare: Vector,
    #[serde(serialize_with = "ser::matrix")]
    pub consumption: Mat,
    pub errors: FieldErrors,
}

#[derive(Serialize)]
pub struct CompstatReport {
    pub derivatives: PerturbationResult,
    /// Direction of each relative price: "+", "-" or "0".
    pub price_signs: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_differences: Option<DifferenceSummary>,
}

fn sign(v: f64, scale: f64) -> &'static str {
    if v.abs() <= 1e-12 * scale.max(1.0) {
        "0"
    } else if v > 0.0 {
        "+"
    } else {
        "-"
    }
}

pub fn compstat(e: &MultiplexEconomy, p: &Perturbation, fd_step: Option<f64>) -> Result<CompstatReport> {
    let derivatives = perturb(e, p)?;
    let scale = derivatives.price.amax();
    let price_signs = derivatives.price.iter().map(|&v| sign(v, scale)).collect();
    let finite_differences = match fd_step {
        Some(h) => {
            let r = finite_difference_check(e, p, h)?;
            Some(DifferenceSummary {
                step: h,
                price: r.price,
                welfare: r.welfare,
                consumption: r.consumption,
                errors: r.errors,
            })
        }
        None => None,
    };
    Ok(CompstatReport {
        derivatives,
        price_signs,
        finite_differences,
    })
}

#[derive(Serialize)]
pub struct TatonnementCheck {
    pub iterations: usize,
    pub excess_demand: f64,
    pub interior: bool,
    pub verification_passed: bool,
    /// Largest difference from the closed form in allocation and prices.
    pub closed_form_gap: Option<f64>,
}

#[derive(Serialize)]
pub struct PlannerCheck {
    #[serde(serialize_with = "ser::vector")]
    pub weights: Vector,
    pub numeric_value: f64,
    pub closed_form_value: Option<f64>,
    pub iterations: usize,
}

#[derive(Serialize)]
pub struct DifferenceCheck {
    pub kind: &'static str,
    pub errors: FieldErrors,
}

#[derive(Serialize)]
pub struct OracleReport {
    pub tatonnement: TatonnementCheck,
    pub planner: PlannerCheck,
    pub finite_differences: Vec<DifferenceCheck>,
}

/// Tatonnement against the closed form, the numeric planner at the income
/// weights, and one seeded random perturbation of each kind.
pub fn oracle(e: &MultiplexEconomy, seed: u64) -> Result<OracleReport> {
    let closed = equilibrium::solve_equilibrium(e).ok();
    let t = tatonnement_solve(e, TatonnementConfig::default())?;
    let verification_passed = equilibrium::verify_equilibrium_tol(e, &t.solution, 1e-6)?.passed;
    let closed_form_gap = closed.as_ref().map(|c| {
        max_abs(&(&t.solution.allocation - &c.allocation)).max((&t.solution.prices - &c.prices).amax())
    });

    let weights = e.weighted_shares();
    let numeric = numeric_planner(e, &weights)?;
    let closed_form_value = pareto_allocation(e, &weights).ok().map(|p| weights.dot(&p.utilities));

    let mut finite_differences = Vec::new();
    if closed.is_some() {
        let mut rng = random::rng(seed);
        for kind in KINDS {
            let p = random_perturbation(&mut rng, e, kind);
            let r = finite_difference_check(e, &p, STEP)?;
            finite_differences.push(DifferenceCheck { kind, errors: r.errors });
        }
    }
    Ok(OracleReport {
        tatonnement: TatonnementCheck {
            iterations: t.iterations,
            excess_demand: t.excess_demand,
            interior: t.solution.interior,
            verification_passed,
            closed_form_gap,
        },
        planner: PlannerCheck {
            weights,
            numeric_value: numeric.value,
            closed_form_value,
            iterations: numeric.iterations,
        },
        finite_differences,
    })
}
