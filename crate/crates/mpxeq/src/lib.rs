//! Competitive and Lindahl equilibria of pure exchange economies where
//! consumption of each good spills over along its own network layer.
//!
//! Consumer `i` values good `s` through effective consumption
//! `q_i^s = x_i^s + phi^s sum_j g_ij^s x_j^s` with Cobb-Douglas weights
//! `alpha^s`. Interior equilibria are solved in closed form through the
//! layer influence matrices `M^s = (I + phi^s G^s)^-1`.

pub mod centrality;
pub mod compstat;
pub mod economy;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod lindahl;
pub mod linalg;
pub mod oracle;
pub mod welfare;

pub use economy::{parse_economy, serialize_economy, validate_economy, GoodLayer, MultiplexEconomy};
pub use equilibrium::{solve_equilibrium, EquilibriumSolution};
pub use error::{Error, Result};
