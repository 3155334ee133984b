//! Seeded random economies and perturbations for property runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compstat::Perturbation;
use crate::economy::{validate_economy, GoodLayer, MultiplexEconomy};
use crate::equilibrium::solve;
use crate::linalg::{Mat, Vector};

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Network structure of a random economy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Independent sparse weighted layers.
    Generic,
    /// Every layer is empty, a cycle or complete, with uniform weights.
    Regular,
    /// All layers share one network and one spillover.
    IdenticalLayers,
    /// No spillovers at all.
    NoSpillover,
}

impl Family {
    /// Mostly generic draws, with enough structured ones that both
    /// outcomes of the parallel test occur.
    pub fn draw(rng: &mut impl Rng) -> Self {
        match rng.random_range(0..10) {
            0..=5 => Family::Generic,
            6 | 7 => Family::Regular,
            8 => Family::IdenticalLayers,
            _ => Family::NoSpillover,
        }
    }
}

fn sparse_network(rng: &mut impl Rng, n: usize) -> Mat {
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(0.5) {
                g[(i, j)] = rng.random_range(0.05..=1.0);
            }
        }
    }
    g
}

fn regular_network(rng: &mut impl Rng, n: usize) -> Mat {
    let w = rng.random_range(0.05..=1.0);
    match rng.random_range(0..3) {
        0 => Mat::zeros(n, n),
        1 if n > 2 => Mat::from_fn(n, n, |i, j| if (i + 1) % n == j || (j + 1) % n == i { w } else { 0.0 }),
        _ => Mat::from_fn(n, n, |i, j| if i != j { w } else { 0.0 }),
    }
}

/// Normalized weights bounded away from the simplex boundary.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vector {
    let v = Vector::from_fn(n, |_, _| rng.random_range(0.2..1.0));
    let total = v.sum();
    v / total
}

/// A random economy satisfying the global spillover bound, with mixed
/// spillover signs.
pub fn random_economy(rng: &mut impl Rng, family: Family, max_n: usize, max_goods: usize) -> MultiplexEconomy {
    loop {
        let n = rng.random_range(2..=max_n.max(2));
        let sbar = rng.random_range(2..=max_goods.max(2));
        let alphas = random_weights(rng, sbar);
        let shared = sparse_network(rng, n);
        let networks: Vec<Mat> = (0..sbar)
            .map(|_| match family {
                Family::Generic => sparse_network(rng, n),
                Family::Regular => regular_network(rng, n),
                Family::IdenticalLayers => shared.clone(),
                Family::NoSpillover => Mat::zeros(n, n),
            })
            .collect();
        let goods: Vec<GoodLayer> = (0..sbar)
            .map(|s| {
                let w = Vector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
                GoodLayer::new(format!("g{}", s + 1), alphas[s], 0.0, networks[s].clone(), w)
            })
            .collect();
        let Ok(draft) = MultiplexEconomy::with_numbered_consumers(goods) else { continue };
        let gbar = draft.gbar();
        if gbar == 0.0 {
            return draft;
        }
        let bound = draft.eta_min() / ((n + 1) as f64 * gbar);
        let first_sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let shared_phi = first_sign * rng.random_range(0.2..1.0) * 0.9 * bound;
        let goods = draft
            .goods()
            .iter()
            .enumerate()
            .map(|(s, g)| {
                let phi = match family {
                    Family::IdenticalLayers => shared_phi,
                    _ => {
                        let sign = if s % 2 == 0 { first_sign } else { -first_sign };
                        sign * rng.random_range(0.2..1.0) * 0.9 * bound
                    }
                };
                g.with_phi(if g.gbar() == 0.0 { 0.0 } else { phi })
            })
            .collect();
        let Ok(e) = draft.with_goods(goods) else { continue };
        if validate_economy(&e).all_a2b() {
            return e;
        }
    }
}

/// [`random_economy`] redrawn until the closed-form equilibrium is interior
/// and unique.
pub fn random_interior_economy(rng: &mut impl Rng, family: Family, max_n: usize, max_goods: usize) -> MultiplexEconomy {
    loop {
        let e = random_economy(rng, family, max_n, max_goods);
        if solve(&e).is_ok_and(|s| s.system.unique()) {
            return e;
        }
    }
}

/// Perturbation kinds in a fixed order.
pub const KINDS: [&str; 4] = ["endowment", "preference", "network", "phi"];

/// Random direction of the given kind. Network directions only move
/// existing links, so small steps keep weights non-negative.
pub fn random_perturbation(rng: &mut impl Rng, e: &MultiplexEconomy, kind: &str) -> Perturbation {
    let (n, sbar) = (e.n(), e.num_goods());
    let mut unit = || rng.random_range(-1.0..1.0);
    match kind {
        "endowment" => Perturbation::Endowment((0..sbar).map(|_| Vector::from_fn(n, |_, _| unit())).collect()),
        "preference" => {
            let t = Vector::from_fn(sbar, |_, _| unit());
            let mean = t.mean();
            Perturbation::Preference(t.add_scalar(-mean))
        }
        "network" => Perturbation::Network(
            e.goods()
                .iter()
                .map(|g| g.network().map(|w| if w > 0.0 { unit() * w.min(1.0) } else { 0.0 }))
                .collect(),
        ),
        "phi" => Perturbation::Phi(Vector::from_fn(sbar, |_, _| unit())),
        other => panic!("unknown perturbation kind {other}"),
    }
}

/// Random pure redistribution of every good.
pub fn random_redistribution(rng: &mut impl Rng, e: &MultiplexEconomy) -> Perturbation {
    let n = e.n();
    Perturbation::Endowment(
        (0..e.num_goods())
            .map(|_| {
                let t = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                let mean = t.mean();
                t.add_scalar(-mean)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let a = random_economy(&mut rng(7), Family::Generic, 6, 4);
        let b = random_economy(&mut rng(7), Family::Generic, 6, 4);
        assert_eq!(a.hash(), b.hash());
        assert!(validate_economy(&a).all_a2b());
    }

    #[test]
    fn structured_families_are_parallel() {
        let mut r = rng(11);
        for family in [Family::Regular, Family::IdenticalLayers, Family::NoSpillover] {
            for _ in 0..10 {
                let e = random_economy(&mut r, family, 6, 4);
                assert!(crate::centrality::check_parallel(&e).unwrap().parallel, "{family:?}");
            }
        }
    }
}
