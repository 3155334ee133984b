//! Reference economies used throughout the documentation and tests.

use serde::{Deserialize, Serialize};

use crate::economy::{GoodLayer, MultiplexEconomy};
use crate::linalg::{Mat, Vector};

/// The three 2x2 Edgeworth-box examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edgeworth {
    /// Consumer 1 benefits from consumer 2's `y`; no reverse link.
    I,
    /// Both consumers benefit from each other's `y`.
    II,
    /// Directed link from consumer 1 to 2 in both goods.
    III,
}

impl std::str::FromStr for Edgeworth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" | "1" => Ok(Edgeworth::I),
            "II" | "ii" | "2" => Ok(Edgeworth::II),
            "III" | "iii" | "3" => Ok(Edgeworth::III),
            _ => Err(format!("unknown example '{s}', expected I, II or III")),
        }
    }
}

fn mat(n: usize, entries: &[(usize, usize, f64)]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for &(i, j, v) in edges {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

fn build(goods: Vec<GoodLayer>) -> MultiplexEconomy {
    MultiplexEconomy::with_numbered_consumers(goods).expect("fixture economies are valid")
}

/// Two consumers, two goods, no spillovers.
pub fn benchmark() -> MultiplexEconomy {
    let z = Mat::zeros(2, 2);
    build(vec![
        GoodLayer::new("x", 0.5, 0.0, z.clone(), Vector::from_vec(vec![1.44, 0.56])),
        GoodLayer::new("y", 0.5, 0.0, z, Vector::from_vec(vec![0.12, 1.88])),
    ])
}

/// Edgeworth-box example with total endowment 2 of each good and consumer
/// 1 holding `(x1, y1)`. `alpha` is the weight on good `x`.
pub fn edgeworth(example: Edgeworth, phi: f64, alpha: f64, x1: f64, y1: f64) -> MultiplexEconomy {
    let link = mat(2, &[(0, 1, 1.0)]);
    let (gx, phix, gy) = match example {
        Edgeworth::I => (Mat::zeros(2, 2), 0.0, link),
        Edgeworth::II => (Mat::zeros(2, 2), 0.0, undirected(2, &[(0, 1, 1.0)])),
        Edgeworth::III => (link.clone(), phi, link),
    };
    build(vec![
        GoodLayer::new("x", alpha, phix, gx, Vector::from_vec(vec![x1, 2.0 - x1])),
        GoodLayer::new("y", 1.0 - alpha, phi, gy, Vector::from_vec(vec![y1, 2.0 - y1])),
    ])
}

/// Edgeworth example with the benchmark endowments.
pub fn example(example: Edgeworth, phi: f64, alpha: f64) -> MultiplexEconomy {
    edgeworth(example, phi, alpha, 1.44, 0.12)
}

pub fn example_i(phi: f64, alpha: f64) -> MultiplexEconomy {
    example(Edgeworth::I, phi, alpha)
}

pub fn example_ii(phi: f64, alpha: f64) -> MultiplexEconomy {
    example(Edgeworth::II, phi, alpha)
}

pub fn example_iii(phi: f64, alpha: f64) -> MultiplexEconomy {
    example(Edgeworth::III, phi, alpha)
}

/// Unweighted star on four consumers centered at consumer 1.
pub fn star4() -> Mat {
    undirected(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
}

/// Complement of [`star4`]: the triangle on consumers 2, 3, 4.
pub fn star4_complement() -> Mat {
    undirected(4, &[(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
}

/// Four consumers with equal endowments 0.25 of `m` goods (2 or 3), equal
/// weights, common spillover `phi`; good 1 on the star, good 2 on
/// `(1 - beta) star + beta complement`, good 3 (if present) private.
pub fn example_iv(m: usize, phi: f64, beta: f64) -> MultiplexEconomy {
    assert!(m == 2 || m == 3, "example IV has two or three goods");
    let w = Vector::from_element(4, 0.25);
    let a = 1.0 / m as f64;
    let g2 = star4() * (1.0 - beta) + star4_complement() * beta;
    let mut goods = vec![
        GoodLayer::new("1", a, phi, star4(), w.clone()),
        GoodLayer::new("2", a, phi, g2, w.clone()),
    ];
    if m == 3 {
        goods.push(GoodLayer::new("3", a, phi, Mat::zeros(4, 4), w));
    }
    build(goods)
}

/// Four consumers, equal endowments 0.25; good 1 private with weight 1/3,
/// good 2 on a weighted star (weight `sigma`), good 3 on the line 1-2-3-4
/// (weight `2/3 - sigma`), both with spillover -0.04. At `sigma = 2/3`
/// good 3 has zero weight and is dropped.
pub fn example_v(sigma: f64) -> MultiplexEconomy {
    let w = Vector::from_element(4, 0.25);
    let star = undirected(4, &[(0, 1, 1.01), (0, 2, 1.0), (0, 3, 1.0)]);
    let line = undirected(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]);
    let a1 = 1.0 / 3.0;
    let a2 = sigma;
    let a3 = 1.0 - a1 - a2;
    let mut goods = vec![
        GoodLayer::new("1", a1, 0.0, Mat::zeros(4, 4), w.clone()),
        GoodLayer::new("2", a2, -0.04, star, w.clone()),
    ];
    if a3 > 1e-12 {
        goods.push(GoodLayer::new("3", a3, -0.04, line, w));
    } else {
        goods[1] = goods[1].with_alpha(1.0 - a1);
    }
    build(goods)
}

/// Two line networks with opposite-sign spillovers satisfying
/// `(1 - phi1)(1 - phi2) = 1`: layer 1 is 2-1-4-3 with `phi = 0.2`,
/// layer 2 is 1-2-3-4 with `phi = -0.25`.
pub fn line_pair() -> MultiplexEconomy {
    let g1 = undirected(4, &[(1, 0, 1.0), (0, 3, 1.0), (3, 2, 1.0)]);
    let g2 = undirected(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]);
    let w1 = Vector::from_vec(vec![0.3, 0.2, 0.25, 0.25]);
    let w2 = Vector::from_vec(vec![0.2, 0.3, 0.3, 0.2]);
    build(vec![
        GoodLayer::new("1", 0.5, 0.2, g1, w1),
        GoodLayer::new("2", 0.5, -0.25, g2, w2),
    ])
}
