//! First-order comparative statics of the interior equilibrium.
//!
//! Every perturbation kind reduces to directions `(tau^s, alpha-dot^s,
//! M-dot^s)`. Differentiating `Mbar mu = 0` gives `Mbar mu-dot = r` with
//! `1'r = 0`; since `Mbar H^-1 z = z` on that subspace, `mu-dot = H^-1 r` is
//! a valid particular solution, and all reported quantities are invariant
//! to adding multiples of `mu`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::centrality::influence_centrality_from;
use crate::economy::MultiplexEconomy;
use crate::equilibrium::{self, Solved};
use crate::error::{Error, Result};
use crate::json::ser;
use crate::linalg::{ones, Mat, Vector};

/// Tolerance on the zero-sum requirement of preference directions.
pub const ZERO_SUM_TOL: f64 = 1e-12;

/// A direction of change in the primitives.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// Per-good endowment directions `tau^s`.
    Endowment(Vec<Vector>),
    /// Preference-weight direction, summing to zero.
    Preference(Vector),
    /// Per-good network directions `Gamma^s`.
    Network(Vec<Mat>),
    /// Per-good spillover directions.
    Phi(Vector),
}

impl Perturbation {
    pub fn kind(&self) -> &'static str {
        match self {
            Perturbation::Endowment(_) => "endowment",
            Perturbation::Preference(_) => "preference",
            Perturbation::Network(_) => "network",
            Perturbation::Phi(_) => "phi",
        }
    }

    /// Move one unit of `good` from consumer `from` to consumer `to`.
    pub fn transfer(e: &MultiplexEconomy, from: usize, to: usize, good: usize) -> Self {
        let mut taus = vec![Vector::zeros(e.n()); e.num_goods()];
        taus[good][from] = -1.0;
        taus[good][to] = 1.0;
        Perturbation::Endowment(taus)
    }

    /// Check dimensions and the kind-specific invariants against `e`.
    pub fn check(&self, e: &MultiplexEconomy) -> Result<()> {
        let (n, sbar) = (e.n(), e.num_goods());
        let dims = |what: &str| Error::DimensionMismatch(format!("{what} does not match {n} consumers and {sbar} goods"));
        match self {
            Perturbation::Endowment(taus) => {
                if taus.len() != sbar || taus.iter().any(|t| t.len() != n) {
                    return Err(dims("endowment direction"));
                }
            }
            Perturbation::Preference(tau) => {
                if tau.len() != sbar {
                    return Err(dims("preference direction"));
                }
                if tau.sum().abs() > ZERO_SUM_TOL {
                    return Err(Error::validation("tau", "preference direction must sum to zero"));
                }
            }
            Perturbation::Network(gammas) => {
                if gammas.len() != sbar || gammas.iter().any(|g| g.shape() != (n, n)) {
                    return Err(dims("network direction"));
                }
                for (s, g) in gammas.iter().enumerate() {
                    if let Some(i) = (0..n).find(|&i| g[(i, i)] != 0.0) {
                        return Err(Error::validation(format!("gamma[{s}][{i}][{i}]"), "diagonal must be zero"));
                    }
                }
            }
            Perturbation::Phi(d) => {
                if d.len() != sbar {
                    return Err(dims("phi direction"));
                }
            }
        }
        Ok(())
    }

    /// The economy moved by `h` along this direction.
    pub fn apply(&self, e: &MultiplexEconomy, h: f64) -> Result<MultiplexEconomy> {
        self.check(e)?;
        let goods = e
            .goods()
            .iter()
            .enumerate()
            .map(|(s, g)| match self {
                Perturbation::Endowment(t) => g.with_endowments(g.endowments() + &t[s] * h),
                Perturbation::Preference(t) => g.with_alpha(g.alpha() + h * t[s]),
                Perturbation::Network(gm) => g.with_network(g.network() + &gm[s] * h),
                Perturbation::Phi(d) => g.with_phi(g.phi() + h * d[s]),
            })
            .collect();
        e.with_goods(goods)
    }

    /// Parse the JSON form, resolving goods by name; goods not mentioned
    /// get a zero direction.
    pub fn from_json(e: &MultiplexEconomy, text: &[u8]) -> Result<Self> {
        let raw: RawPerturbation = serde_json::from_slice(text).map_err(|err| Error::Parse(err.to_string()))?;
        let (n, sbar) = (e.n(), e.num_goods());
        let index = |name: &str, field: &str| {
            e.good_index(name)
                .ok_or_else(|| Error::validation(format!("{field}.{name}"), "unknown good"))
        };
        let p = match raw {
            RawPerturbation::Endowment { tau } => {
                let mut taus = vec![Vector::zeros(n); sbar];
                for (name, v) in tau {
                    let s = index(&name, "tau")?;
                    if v.len() != n {
                        return Err(Error::validation(format!("tau.{name}"), format!("expected {n} entries")));
                    }
                    taus[s] = Vector::from_vec(v);
                }
                Perturbation::Endowment(taus)
            }
            RawPerturbation::Preference { tau } => {
                let mut t = Vector::zeros(sbar);
                for (name, v) in tau {
                    t[index(&name, "tau")?] = v;
                }
                Perturbation::Preference(t)
            }
            RawPerturbation::Network { gamma } => {
                let mut gs = vec![Mat::zeros(n, n); sbar];
                for (name, rows) in gamma {
                    let s = index(&name, "gamma")?;
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(Error::validation(format!("gamma.{name}"), format!("expected {n}x{n}")));
                    }
                    gs[s] = crate::linalg::from_rows(&rows);
                }
                Perturbation::Network(gs)
            }
            RawPerturbation::Phi { dphi } => {
                let mut d = Vector::zeros(sbar);
                for (name, v) in dphi {
                    d[index(&name, "dphi")?] = v;
                }
                Perturbation::Phi(d)
            }
        };
        p.check(e)?;
        Ok(p)
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawPerturbation {
    Endowment { tau: BTreeMap<String, Vec<f64>> },
    Preference { tau: BTreeMap<String, f64> },
    Network { gamma: BTreeMap<String, Vec<Vec<f64>>> },
    Phi { dphi: BTreeMap<String, f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationResult {
    pub kind: String,
    #[serde(serialize_with = "ser::vector")]
    pub mu: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub mu_dot: Vector,
    /// `d ln p^s - d ln p^1` per good.
    #[serde(serialize_with = "ser::vector")]
    pub price: Vector,
    /// Part of `price` from the centrality terms `d ln b^s`.
    #[serde(serialize_with = "ser::vector")]
    pub price_redistribution: Vector,
    /// Part from changes in aggregate endowments.
    #[serde(serialize_with = "ser::vector")]
    pub price_aggregate: Vector,
    /// Part from changes in preference weights.
    #[serde(serialize_with = "ser::vector")]
    pub price_preference: Vector,
    #[serde(serialize_with = "ser::vector")]
    pub welfare: Vector,
    /// `mu-dot_i / mu_i`.
    #[serde(serialize_with = "ser::vector")]
    pub welfare_income: Vector,
    /// `-sum_s alpha^s d ln b^s`, common to all consumers.
    pub welfare_price: f64,
    /// `sum_s alpha^s 1'tau^s / omega^s`, common to all consumers.
    pub welfare_aggregate: f64,
    /// `sum_s alpha-dot^s ln q_i^s`.
    #[serde(serialize_with = "ser::vector")]
    pub welfare_preference: Vector,
    /// `d ln x_i^s`, `s x n`.
    #[serde(serialize_with = "ser::matrix")]
    pub consumption: Mat,
}

struct Directions {
    tau: Vec<Vector>,
    alpha_dot: Vector,
    m_dot: Vec<Mat>,
}

fn directions(e: &MultiplexEconomy, solved: &Solved, p: &Perturbation) -> Directions {
    let (n, sbar) = (e.n(), e.num_goods());
    let mut d = Directions {
        tau: vec![Vector::zeros(n); sbar],
        alpha_dot: Vector::zeros(sbar),
        m_dot: vec![Mat::zeros(n, n); sbar],
    };
    match p {
        Perturbation::Endowment(t) => d.tau = t.clone(),
        Perturbation::Preference(t) => d.alpha_dot = t.clone(),
        Perturbation::Network(gm) => {
            for (s, g) in e.goods().iter().enumerate() {
                let m = &solved.influences[s].m;
                d.m_dot[s] = -(m * &gm[s] * m) * g.phi();
            }
        }
        Perturbation::Phi(dp) => {
            for (s, g) in e.goods().iter().enumerate() {
                let m = &solved.influences[s].m;
                d.m_dot[s] = -(m * g.network() * m) * dp[s];
            }
        }
    }
    d
}

pub fn perturb(e: &MultiplexEconomy, p: &Perturbation) -> Result<PerturbationResult> {
    p.check(e)?;
    let solved = equilibrium::solve(e)?;
    if !solved.system.unique() {
        return Err(Error::RankDeficient {
            rank: solved.system.rank,
            expected: e.n() - 1,
        });
    }
    let d = directions(e, &solved, p);
    let r = rhs(e, &solved, &d);
    let mu_dot = &solved.system.h_inv * r;
    let mut out = evaluate(e, &solved, &d, &mu_dot);
    out.kind = p.kind().to_string();
    Ok(out)
}

/// Right-hand side `r` of `Mbar mu-dot = r`.
fn rhs(e: &MultiplexEconomy, solved: &Solved, d: &Directions) -> Vector {
    let n = e.n();
    let mu = &solved.solution.mu;
    let prices = &solved.solution.prices;
    let mut r = Vector::zeros(n);
    for (s, g) in e.goods().iter().enumerate() {
        let eta = g.shares();
        let proj = |v: Vector| {
            let total = v.sum();
            v - &eta * total
        };
        r += proj(d.tau[s].clone()) * prices[s];
        let m = &solved.influences[s].m;
        r -= proj(m * mu) * d.alpha_dot[s];
        r -= proj(&d.m_dot[s] * mu) * g.alpha();
    }
    r
}

fn evaluate(e: &MultiplexEconomy, solved: &Solved, d: &Directions, mu_dot: &Vector) -> PerturbationResult {
    let (n, sbar) = (e.n(), e.num_goods());
    let mu = &solved.solution.mu;
    let q = &solved.solution.effective;
    let mut dlnb = Vector::zeros(sbar);
    let mut agg = Vector::zeros(sbar);
    let mut consumption = Mat::zeros(sbar, n);
    for (s, g) in e.goods().iter().enumerate() {
        let m = &solved.influences[s].m;
        let b = m * mu;
        let db = m * mu_dot + &d.m_dot[s] * mu;
        dlnb[s] = db.sum() / b.sum();
        agg[s] = d.tau[s].sum() / g.aggregate();
        for i in 0..n {
            consumption[(s, i)] = db[i] / b[i] - dlnb[s] + agg[s];
        }
    }
    let alphas = e.alphas();
    let pref = d.alpha_dot.component_div(&alphas);
    let price_redistribution = dlnb.add_scalar(-dlnb[0]);
    let price_aggregate = (-&agg).add_scalar(agg[0]);
    let price_preference = pref.add_scalar(-pref[0]);
    let price = &price_redistribution + &price_aggregate + &price_preference;

    let welfare_income = mu_dot.component_div(mu);
    let welfare_price = -alphas.dot(&dlnb);
    let welfare_aggregate = alphas.dot(&agg);
    let welfare_preference = Vector::from_fn(n, |i, _| (0..sbar).map(|s| d.alpha_dot[s] * q[(s, i)].ln()).sum());
    let welfare = welfare_income.add_scalar(welfare_price + welfare_aggregate) + &welfare_preference;
    PerturbationResult {
        kind: String::new(),
        mu: mu.clone(),
        mu_dot: mu_dot.clone(),
        price,
        price_redistribution,
        price_aggregate,
        price_preference,
        welfare,
        welfare_income,
        welfare_price,
        welfare_aggregate,
        welfare_preference,
        consumption,
    }
}

/// Derivatives from an arbitrary solution `mu_dot` of the differentiated
/// system; used to check that the reported quantities do not depend on
/// which solution is picked.
pub fn perturb_with_mu_dot(e: &MultiplexEconomy, p: &Perturbation, mu_dot: &Vector) -> Result<PerturbationResult> {
    p.check(e)?;
    let solved = equilibrium::solve(e)?;
    let d = directions(e, &solved, p);
    let mut out = evaluate(e, &solved, &d, mu_dot);
    out.kind = p.kind().to_string();
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferSign {
    /// Sign of the change in `p^s / p^1`: -1, 0 or 1.
    pub sign: i8,
    /// `|c_j^s - c_i^s|`.
    pub margin: f64,
    /// Generalized influence centrality of the watched good.
    #[serde(serialize_with = "ser::vector")]
    pub centrality: Vector,
    /// `d ln(p^s/p^1)` for a unit transfer.
    pub price_effect: f64,
}

/// Direction in which moving one unit of good `on_good` from consumer `from`
/// to consumer `to` moves the price of `watch_good` relative to good 1.
pub fn transfer_price_sign(
    e: &MultiplexEconomy,
    from: usize,
    to: usize,
    on_good: usize,
    watch_good: usize,
) -> Result<TransferSign> {
    let (n, sbar) = (e.n(), e.num_goods());
    if from >= n || to >= n || on_good >= sbar || watch_good >= sbar {
        return Err(Error::DimensionMismatch(format!("transfer indices out of range for {n} consumers and {sbar} goods")));
    }
    let solved = equilibrium::solve(e)?;
    if !solved.system.unique() {
        return Err(Error::RankDeficient {
            rank: solved.system.rank,
            expected: n - 1,
        });
    }
    let infl = &solved.influences[watch_good];
    let c = influence_centrality_from(&solved.system.h, &infl.tilde_b)?;
    let diff = c[to] - c[from];
    let scale = c.amax();
    let sign = if watch_good == 0 || diff.abs() <= 1e-12 * scale {
        0
    } else if diff > 0.0 {
        1
    } else {
        -1
    };
    let b = infl.tilde_b.dot(&solved.solution.mu);
    let price_effect = if watch_good == 0 {
        0.0
    } else {
        solved.solution.prices[on_good] * diff / b
    };
    Ok(TransferSign {
        sign,
        margin: diff.abs(),
        centrality: c,
        price_effect,
    })
}

/// `1' tau` per good: zero for pure redistributions.
pub fn aggregate_changes(p: &Perturbation) -> Option<Vector> {
    match p {
        Perturbation::Endowment(t) => Some(Vector::from_iterator(t.len(), t.iter().map(|v| v.dot(&ones(v.len()))))),
        _ => None,
    }
}
