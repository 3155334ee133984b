//! Economy data model, validation, interchange format and assumption checks.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{from_rows, to_rows, Mat, Vector};

/// Tolerance on `sum(alpha) == 1`.
pub const ALPHA_SUM_TOL: f64 = 1e-12;
/// Smallest admissible endowment.
pub const MIN_ENDOWMENT: f64 = 1e-12;

/// One good together with the network layer on which its consumption spills over.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodLayer {
    name: String,
    alpha: f64,
    phi: f64,
    network: Mat,
    endowments: Vector,
}

impl GoodLayer {
    /// Builds a layer without checking it; checks run when the layer is
    /// placed in a [`MultiplexEconomy`].
    pub fn new(name: impl Into<String>, alpha: f64, phi: f64, network: Mat, endowments: Vector) -> Self {
        GoodLayer {
            name: name.into(),
            alpha,
            phi,
            network,
            endowments,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn network(&self) -> &Mat {
        &self.network
    }

    pub fn endowments(&self) -> &Vector {
        &self.endowments
    }

    /// Aggregate endowment.
    pub fn aggregate(&self) -> f64 {
        self.endowments.sum()
    }

    /// Endowment shares, summing to one.
    pub fn shares(&self) -> Vector {
        &self.endowments / self.aggregate()
    }

    /// Largest link weight.
    pub fn gbar(&self) -> f64 {
        self.network.iter().cloned().fold(0.0, f64::max)
    }

    /// `phi * G`.
    pub fn spillover(&self) -> Mat {
        &self.network * self.phi
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        GoodLayer { alpha, ..self.clone() }
    }

    pub fn with_phi(&self, phi: f64) -> Self {
        GoodLayer { phi, ..self.clone() }
    }

    pub fn with_network(&self, network: Mat) -> Self {
        GoodLayer { network, ..self.clone() }
    }

    pub fn with_endowments(&self, endowments: Vector) -> Self {
        GoodLayer {
            endowments,
            ..self.clone()
        }
    }
}

/// A pure exchange economy whose goods carry their own externality network.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexEconomy {
    consumers: Vec<String>,
    goods: Vec<GoodLayer>,
}

impl MultiplexEconomy {
    pub fn new(consumers: Vec<String>, goods: Vec<GoodLayer>) -> Result<Self> {
        let e = MultiplexEconomy { consumers, goods };
        e.check()?;
        Ok(e)
    }

    /// Consumers named "1", "2", ...
    pub fn with_numbered_consumers(goods: Vec<GoodLayer>) -> Result<Self> {
        let n = goods.first().map_or(0, |g| g.endowments.len());
        Self::new((1..=n).map(|i| i.to_string()).collect(), goods)
    }

    fn check(&self) -> Result<()> {
        let n = self.consumers.len();
        if n == 0 {
            return Err(Error::validation("consumers", "at least one consumer is required"));
        }
        let mut seen = HashSet::new();
        for (i, c) in self.consumers.iter().enumerate() {
            if c.is_empty() || !seen.insert(c.as_str()) {
                return Err(Error::validation(
                    format!("consumers[{i}]"),
                    "consumer names must be nonempty and unique",
                ));
            }
        }
        if self.goods.is_empty() {
            return Err(Error::validation("goods", "at least one good is required"));
        }
        let mut names = HashSet::new();
        let mut alpha_sum = 0.0;
        for (s, g) in self.goods.iter().enumerate() {
            let at = |field: &str| format!("goods[{s}].{field}");
            if g.name.is_empty() || !names.insert(g.name.as_str()) {
                return Err(Error::validation(at("name"), "good names must be nonempty and unique"));
            }
            if !(g.alpha.is_finite() && g.alpha > 0.0 && g.alpha <= 1.0) {
                return Err(Error::validation(at("alpha"), format!("alpha must lie in (0, 1], got {}", g.alpha)));
            }
            alpha_sum += g.alpha;
            if !g.phi.is_finite() {
                return Err(Error::validation(at("phi"), "phi must be finite"));
            }
            if g.endowments.len() != n {
                return Err(Error::validation(
                    at("endowments"),
                    format!("expected {n} entries, got {}", g.endowments.len()),
                ));
            }
            for (i, &w) in g.endowments.iter().enumerate() {
                if !(w.is_finite() && w > MIN_ENDOWMENT) {
                    return Err(Error::validation(
                        format!("goods[{s}].endowments[{i}]"),
                        format!("endowments must exceed {MIN_ENDOWMENT:e}, got {w}"),
                    ));
                }
            }
            if g.network.nrows() != n || g.network.ncols() != n {
                return Err(Error::validation(
                    at("network"),
                    format!("expected {n}x{n}, got {}x{}", g.network.nrows(), g.network.ncols()),
                ));
            }
            for i in 0..n {
                for j in 0..n {
                    let v = g.network[(i, j)];
                    let path = format!("goods[{s}].network[{i}][{j}]");
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::validation(path, format!("link weights must be nonnegative, got {v}")));
                    }
                    if i == j && v != 0.0 {
                        return Err(Error::validation(path, "self-links are not allowed"));
                    }
                }
            }
        }
        if (alpha_sum - 1.0).abs() > ALPHA_SUM_TOL {
            return Err(Error::validation("goods[*].alpha", format!("alphas must sum to 1, got {alpha_sum}")));
        }
        Ok(())
    }

    /// Number of consumers.
    pub fn n(&self) -> usize {
        self.consumers.len()
    }

    /// Number of goods.
    pub fn num_goods(&self) -> usize {
        self.goods.len()
    }

    pub fn consumers(&self) -> &[String] {
        &self.consumers
    }

    pub fn goods(&self) -> &[GoodLayer] {
        &self.goods
    }

    pub fn good(&self, s: usize) -> &GoodLayer {
        &self.goods[s]
    }

    pub fn good_index(&self, name: &str) -> Option<usize> {
        self.goods.iter().position(|g| g.name == name)
    }

    pub fn alphas(&self) -> Vector {
        Vector::from_iterator(self.goods.len(), self.goods.iter().map(|g| g.alpha))
    }

    /// Endowments as an `s x n` matrix.
    pub fn endowment_matrix(&self) -> Mat {
        Mat::from_fn(self.num_goods(), self.n(), |s, i| self.goods[s].endowments[i])
    }

    /// Smallest endowment share over all consumers and goods.
    pub fn eta_min(&self) -> f64 {
        self.goods
            .iter()
            .flat_map(|g| g.shares().iter().cloned().collect::<Vec<_>>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest link weight over all layers.
    pub fn gbar(&self) -> f64 {
        self.goods.iter().map(GoodLayer::gbar).fold(0.0, f64::max)
    }

    /// `sum_s alpha^s eta^s`: the income shares at no-externality prices.
    pub fn weighted_shares(&self) -> Vector {
        self.goods
            .iter()
            .fold(Vector::zeros(self.n()), |acc, g| acc + g.shares() * g.alpha)
    }

    /// Replace the goods, re-running validation.
    pub fn with_goods(&self, goods: Vec<GoodLayer>) -> Result<Self> {
        Self::new(self.consumers.clone(), goods)
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serialize_economy(self).as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGood {
    name: String,
    alpha: f64,
    phi: f64,
    network: Vec<Vec<f64>>,
    endowments: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEconomy {
    consumers: Vec<String>,
    goods: Vec<RawGood>,
}

/// Parse an economy document and validate it.
pub fn parse_economy(text: &[u8]) -> Result<MultiplexEconomy> {
    let raw: RawEconomy = serde_json::from_slice(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = raw.consumers.len();
    let mut goods = Vec::with_capacity(raw.goods.len());
    for (s, g) in raw.goods.into_iter().enumerate() {
        if let Some(i) = g.network.iter().position(|row| row.len() != n) {
            return Err(Error::validation(
                format!("goods[{s}].network[{i}]"),
                format!("expected {n} entries, got {}", g.network[i].len()),
            ));
        }
        if g.network.len() != n {
            return Err(Error::validation(
                format!("goods[{s}].network"),
                format!("expected {n} rows, got {}", g.network.len()),
            ));
        }
        let network = if n == 0 { Mat::zeros(0, 0) } else { from_rows(&g.network) };
        goods.push(GoodLayer::new(g.name, g.alpha, g.phi, network, Vector::from_vec(g.endowments)));
    }
    MultiplexEconomy::new(raw.consumers, goods)
}

/// Canonical JSON document for an economy.
pub fn serialize_economy(e: &MultiplexEconomy) -> String {
    crate::json::to_string(e)
}

impl Serialize for MultiplexEconomy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawEconomy {
            consumers: self.consumers.clone(),
            goods: self
                .goods
                .iter()
                .map(|g| RawGood {
                    name: g.name.clone(),
                    alpha: g.alpha,
                    phi: g.phi,
                    network: to_rows(&g.network),
                    endowments: g.endowments.iter().cloned().collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

/// Assumption bounds for one good.
#[derive(Debug, Clone, Serialize)]
pub struct LayerAssumptions {
    pub good: String,
    /// Lower bound on phi from own-layer shares.
    pub a2a: bool,
    pub a2a_margin: f64,
    /// Bound on |phi| from global shares and weights.
    pub a2b: bool,
    pub a2b_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub layers: Vec<LayerAssumptions>,
    /// Rank condition on the system matrix; `None` until an equilibrium solve fills it in.
    pub rank_condition: Option<bool>,
    pub worst_margin: f64,
}

impl AssumptionReport {
    pub fn all_a2a(&self) -> bool {
        self.layers.iter().all(|l| l.a2a)
    }

    pub fn all_a2b(&self) -> bool {
        self.layers.iter().all(|l| l.a2b)
    }
}

/// Evaluate the spillover-size assumptions. Margins are `bound - |phi|`
/// (for 2A, `phi + bound`), infinite for empty layers or a single consumer.
pub fn validate_economy(e: &MultiplexEconomy) -> AssumptionReport {
    let n = e.n();
    let eta_min = e.eta_min();
    let gbar = e.gbar();
    let b_bound = if n == 1 || gbar == 0.0 {
        f64::INFINITY
    } else {
        eta_min / ((n + 1) as f64 * gbar)
    };
    let layers: Vec<_> = e
        .goods
        .iter()
        .map(|g| {
            let gs = g.gbar();
            let a_bound = if n == 1 || gs == 0.0 {
                f64::INFINITY
            } else {
                g.shares().min() / ((n - 1) as f64 * gs)
            };
            let a2a_margin = g.phi + a_bound;
            let a2b_margin = b_bound - g.phi.abs();
            LayerAssumptions {
                good: g.name.clone(),
                a2a: a2a_margin > 0.0,
                a2a_margin,
                a2b: a2b_margin > 0.0,
                a2b_margin,
            }
        })
        .collect();
    let worst_margin = layers
        .iter()
        .map(|l| l.a2a_margin.min(l.a2b_margin))
        .fold(f64::INFINITY, f64::min);
    AssumptionReport {
        layers,
        rank_condition: None,
        worst_margin,
    }
}

/// How the comparison weight scales with the number of neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonMode {
    /// Weight grows with the neighbor count.
    Linear,
    /// Only the neighbors' average matters.
    Average,
}

#[derive(Debug, Clone)]
pub struct ComparisonEconomy {
    pub economy: MultiplexEconomy,
    /// Consumers without neighbors; their rows of the comparison network are zero.
    pub isolated: Vec<usize>,
}

/// Two-good economy with one private good and one good subject to social
/// comparison of intensity `intensity` with the given neighbor sets.
pub fn build_comparison_economy(
    neighbors: &[Vec<usize>],
    intensity: f64,
    mode: ComparisonMode,
    private_good: GoodLayer,
    comparison_endowments: Vector,
) -> Result<ComparisonEconomy> {
    let n = neighbors.len();
    if private_good.endowments.len() != n || comparison_endowments.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} neighbor sets but endowment vectors of length {} and {}",
            private_good.endowments.len(),
            comparison_endowments.len()
        )));
    }
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::Domain(format!("comparison intensity must be >= 0, got {intensity}")));
    }
    let mut g = Mat::zeros(n, n);
    let mut isolated = Vec::new();
    for (i, set) in neighbors.iter().enumerate() {
        let mut uniq = HashSet::new();
        for &j in set {
            if j >= n {
                return Err(Error::DegenerateNetwork(format!("consumer {i} lists unknown neighbor {j}")));
            }
            if j == i {
                return Err(Error::DegenerateNetwork(format!("consumer {i} lists itself as a neighbor")));
            }
            uniq.insert(j);
        }
        let ni = uniq.len();
        if ni == 0 {
            isolated.push(i);
            continue;
        }
        let scale = match mode {
            ComparisonMode::Linear => ni as f64,
            ComparisonMode::Average => 1.0,
        };
        let w = scale / (ni as f64 * (1.0 + intensity * scale));
        for j in uniq {
            g[(i, j)] = w;
        }
    }
    let comparison = GoodLayer::new(
        "comparison",
        1.0 - private_good.alpha,
        -intensity,
        g,
        comparison_endowments,
    );
    let economy = MultiplexEconomy::with_numbered_consumers(vec![private_good, comparison])?;
    Ok(ComparisonEconomy { economy, isolated })
}
