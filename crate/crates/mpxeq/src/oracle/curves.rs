//! Closed-form equilibrium loci and contract curves of the 2x2 examples,
//! in consumer 1's coordinates `(x, y)` of a box with sides 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::Edgeworth;

#[derive(Debug, Clone, Serialize)]
pub struct CurveSample {
    pub example: Edgeworth,
    pub phi: f64,
    pub x: Vec<f64>,
    pub y_equilibrium: Vec<f64>,
    pub y_contract: Vec<f64>,
}

fn check(phi: f64, x: f64) -> Result<()> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::Domain(format!("phi = {phi} is outside (0, 1)")));
    }
    if !(0.0..=2.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is outside [0, 2]")));
    }
    Ok(())
}

/// `y` on the locus of competitive equilibria at `x`.
pub fn equilibrium_locus(example: Edgeworth, phi: f64, x: f64) -> Result<f64> {
    check(phi, x)?;
    Ok(match example {
        Edgeworth::I => {
            if x <= 2.0 * phi / (1.0 + phi) {
                0.0
            } else {
                2.0 * ((1.0 + phi) * x - 2.0 * phi) / (2.0 * (1.0 - phi) + phi * x)
            }
        }
        Edgeworth::II => saturated(phi, x),
        Edgeworth::III => x,
    })
}

/// `y` on the contract curve at `x`.
pub fn contract_curve(example: Edgeworth, phi: f64, x: f64) -> Result<f64> {
    check(phi, x)?;
    Ok(match example {
        Edgeworth::I => {
            if x <= 2.0 * phi {
                0.0
            } else {
                (x - 2.0 * phi) / (1.0 - phi)
            }
        }
        Edgeworth::II => saturated(phi, x),
        Edgeworth::III => x,
    })
}

fn saturated(phi: f64, x: f64) -> f64 {
    if x <= 2.0 * phi / (1.0 + phi) {
        0.0
    } else if x <= 2.0 / (1.0 + phi) {
        ((1.0 + phi) * x - 2.0 * phi) / (1.0 - phi)
    } else {
        2.0
    }
}

pub fn textbook_curves(example: Edgeworth, phi: f64, grid: &[f64]) -> Result<CurveSample> {
    let mut y_equilibrium = Vec::with_capacity(grid.len());
    let mut y_contract = Vec::with_capacity(grid.len());
    for &x in grid {
        y_equilibrium.push(equilibrium_locus(example, phi, x)?);
        y_contract.push(contract_curve(example, phi, x)?);
    }
    Ok(CurveSample {
        example,
        phi,
        x: grid.to_vec(),
        y_equilibrium,
        y_contract,
    })
}

/// `points` evenly spaced values covering `[0, 2]`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| 2.0 * k as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_points() {
        let y = equilibrium_locus(Edgeworth::I, 0.7, 1.0821).unwrap();
        assert!((y - 0.6475).abs() < 2e-4);
        assert_eq!(contract_curve(Edgeworth::I, 0.7, 1.4).unwrap(), 0.0);
        assert_eq!(equilibrium_locus(Edgeworth::III, 0.3, 0.5).unwrap(), 0.5);
        assert_eq!(contract_curve(Edgeworth::III, 0.3, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn curves_are_continuous_and_end_at_the_corner() {
        for phi in [0.1, 0.4, 0.7] {
            for ex in [Edgeworth::I, Edgeworth::II] {
                let s = textbook_curves(ex, phi, &uniform_grid(2001)).unwrap();
                for w in s.y_equilibrium.windows(2).chain(s.y_contract.windows(2)) {
                    assert!((w[1] - w[0]).abs() < 0.01);
                    assert!(w[1] >= w[0]);
                }
                assert!((s.y_equilibrium[2000] - 2.0).abs() < 1e-12);
                assert!((s.y_contract[2000] - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn domain() {
        assert!(matches!(equilibrium_locus(Edgeworth::I, 0.5, 2.1), Err(Error::Domain(_))));
        assert!(matches!(contract_curve(Edgeworth::I, 1.0, 1.0), Err(Error::Domain(_))));
    }
}
