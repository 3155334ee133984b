//! Layer influence matrices, Katz-Bonacich centralities and the parallel
//! condition across layers.

use serde::Serialize;

use crate::economy::{GoodLayer, MultiplexEconomy};
use crate::error::{Error, Result};
use crate::linalg::{checked_inverse, cosine_dissimilarity, max_abs, ones, Mat, Vector};

/// Cosine dissimilarity at or below which two centrality vectors count as parallel.
pub const PARALLEL_TOL: f64 = 1e-10;

/// `M = (I + phi G)^-1` for one layer with its transposed centrality.
#[derive(Debug, Clone)]
pub struct LayerInfluence {
    pub good: usize,
    pub m: Mat,
    /// `M' 1`.
    pub tilde_b: Vector,
    /// Whether `1 + lambda_min(phi G) > 0` (real parts for nonsymmetric layers).
    pub spectral_ok: bool,
    /// 1-norm condition number of `I + phi G`.
    pub condition: f64,
}

pub fn leontief_inverse(good: usize, layer: &GoodLayer) -> Result<LayerInfluence> {
    let n = layer.endowments().len();
    let pg = layer.spillover();
    let a = Mat::identity(n, n) + &pg;
    let (m, condition) = checked_inverse(&a).map_err(|cond| Error::SingularLayer { good, cond })?;
    let tilde_b = m.transpose() * ones(n);
    Ok(LayerInfluence {
        good,
        m,
        tilde_b,
        spectral_ok: spectral_ok(&pg),
        condition,
    })
}

fn spectral_ok(pg: &Mat) -> bool {
    let inf_norm = pg
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if inf_norm < 1.0 {
        return true;
    }
    let lambda_min = pg
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    1.0 + lambda_min > 0.0
}

/// Influence matrices of every layer.
pub fn influences(e: &MultiplexEconomy) -> Result<Vec<LayerInfluence>> {
    e.goods()
        .iter()
        .enumerate()
        .map(|(s, g)| leontief_inverse(s, g))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Katz {
    /// `M z`.
    pub b: Vector,
    /// `1' M z`.
    pub aggregate: f64,
    pub tilde_b: Vector,
}

pub fn katz_centralities(infl: &LayerInfluence, z: &Vector) -> Katz {
    let b = &infl.m * z;
    Katz {
        aggregate: b.sum(),
        b,
        tilde_b: infl.tilde_b.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelVerdict {
    pub parallel: bool,
    /// Most dissimilar pair of goods, absent with a single good.
    pub worst_pair: Option<(usize, usize)>,
    /// `1 - cos` of the worst pair.
    pub dissimilarity: f64,
    /// Per layer: column sums of the network are constant.
    pub regular: Vec<bool>,
    /// All layers share the same `phi G`.
    pub identical: bool,
}

pub fn check_parallel(e: &MultiplexEconomy) -> Result<ParallelVerdict> {
    Ok(parallel_verdict(e, &influences(e)?))
}

/// Parallel verdict from precomputed influence matrices.
pub fn parallel_verdict(e: &MultiplexEconomy, infl: &[LayerInfluence]) -> ParallelVerdict {
    let mut worst_pair = None;
    let mut dissimilarity = 0.0;
    for s in 0..infl.len() {
        for t in s + 1..infl.len() {
            let d = cosine_dissimilarity(&infl[s].tilde_b, &infl[t].tilde_b);
            if worst_pair.is_none() || d > dissimilarity {
                dissimilarity = d;
                worst_pair = Some((s, t));
            }
        }
    }
    let n = e.n();
    let regular = e
        .goods()
        .iter()
        .map(|g| {
            let col = g.network().transpose() * ones(n);
            col.iter().all(|&v| v == 0.0) || cosine_dissimilarity(&col, &ones(n)) <= PARALLEL_TOL
        })
        .collect();
    let first = e.good(0).spillover();
    let identical = e.goods().iter().all(|g| max_abs(&(g.spillover() - &first)) <= 1e-12);
    ParallelVerdict {
        parallel: dissimilarity <= PARALLEL_TOL,
        worst_pair,
        dissimilarity,
        regular,
        identical,
    }
}

/// Generalized influence centrality `c^s = (H')^-1 b~^s`.
pub fn influence_centrality(e: &MultiplexEconomy, h: &Mat, s: usize) -> Result<Vector> {
    let infl = leontief_inverse(s, e.good(s))?;
    influence_centrality_from(h, &infl.tilde_b)
}

pub(crate) fn influence_centrality_from(h: &Mat, tilde_b: &Vector) -> Result<Vector> {
    let (hinv_t, _) = checked_inverse(&h.transpose()).map_err(|cond| Error::SingularH { cond })?;
    Ok(hinv_t * tilde_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn neumann(pg: &Mat, terms: usize) -> Mat {
        let n = pg.nrows();
        let mut sum = Mat::identity(n, n);
        let mut term = Mat::identity(n, n);
        for _ in 0..terms {
            term = -(&term * pg);
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_spillover_is_identity() {
        let e = fixtures::benchmark();
        let l = leontief_inverse(0, e.good(0)).unwrap();
        assert_eq!(l.m, Mat::identity(2, 2));
        assert!(l.spectral_ok);
    }

    #[test]
    fn directed_dyad() {
        let e = fixtures::example_i(0.7, 0.5);
        let l = leontief_inverse(1, e.good(1)).unwrap();
        let expected = Mat::from_row_slice(2, 2, &[1.0, -0.7, 0.0, 1.0]);
        assert!(max_abs(&(&l.m - &expected)) < 1e-15);
        // Nilpotent layer: the series terminates.
        assert!(max_abs(&(&l.m - neumann(&e.good(1).spillover(), 1))) < 1e-15);
        let k = katz_centralities(&l, &ones(2));
        assert!((k.tilde_b[0] - 1.0).abs() < 1e-15);
        assert!((k.tilde_b[1] - 0.3).abs() < 1e-15);
        assert!((k.aggregate - 1.3).abs() < 1e-15);
    }

    #[test]
    fn weighted_star_residual() {
        let e = fixtures::example_v(0.5);
        let g = e.good(1);
        let l = leontief_inverse(1, g).unwrap();
        let resid = (Mat::identity(4, 4) + g.spillover()) * &l.m - Mat::identity(4, 4);
        assert!(max_abs(&resid) < 1e-12);
        assert!(l.m.iter().all(|&v| v.abs() > 0.0));
        assert!(max_abs(&(&l.m - neumann(&g.spillover(), 60))) < 1e-12);
        // Undirected: transposed and plain centralities coincide.
        assert!((&l.m * ones(4) - &l.tilde_b).amax() < 1e-14);
    }

    #[test]
    fn aggregate_is_dot_with_tilde_b() {
        let e = fixtures::example_v(0.4);
        let z = Vector::from_vec(vec![0.3, 1.2, 0.7, 2.0]);
        for l in influences(&e).unwrap() {
            let k = katz_centralities(&l, &z);
            assert!((k.aggregate - z.dot(&k.tilde_b)).abs() <= 1e-10 * k.aggregate.abs());
        }
    }

    #[test]
    fn singular_layer_detected() {
        let e = fixtures::example_ii(1.0, 0.5);
        match leontief_inverse(1, e.good(1)) {
            Err(Error::SingularLayer { good: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spectral_fallback() {
        // Undirected dyad with weight 1.5: eigenvalue -1.5.
        let bad = Mat::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]);
        assert!(!spectral_ok(&bad));
        // Directed dyad: nilpotent, eigenvalues 0.
        let ok = Mat::from_row_slice(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        assert!(spectral_ok(&ok));
    }

    #[test]
    fn parallel_verdicts() {
        let v = check_parallel(&fixtures::example_ii(0.4, 0.5)).unwrap();
        assert!(v.parallel);
        assert!(v.regular.iter().all(|&r| r));

        let v = check_parallel(&fixtures::example_i(0.7, 0.5)).unwrap();
        assert!(!v.parallel);
        assert_eq!(v.worst_pair, Some((0, 1)));
        let a = Vector::from_vec(vec![1.0, 1.0]);
        let b = Vector::from_vec(vec![1.0, 0.3]);
        let d = 1.0 - a.dot(&b) / (a.norm() * b.norm());
        assert!((v.dissimilarity - d).abs() < 1e-15);

        let v = check_parallel(&fixtures::line_pair()).unwrap();
        assert!(v.parallel);
        assert!(!v.identical);
        assert!(!v.regular.iter().all(|&r| r));

        let v = check_parallel(&fixtures::example_iii(0.3, 0.5)).unwrap();
        assert!(v.parallel && v.identical);
    }

    #[test]
    fn benchmark_influence_is_flat() {
        // With no spillovers, H' 1 = alpha^1 1, so every c^s is constant.
        let e = fixtures::benchmark();
        let (_, sys) = crate::equilibrium::solve_effective_endowment(&e).unwrap();
        for s in 0..2 {
            let c = influence_centrality(&e, &sys.h, s).unwrap();
            assert!((c.max() - c.min()).abs() < 1e-14);
            assert!((c[0] - 2.0).abs() < 1e-14);
        }
    }
}
