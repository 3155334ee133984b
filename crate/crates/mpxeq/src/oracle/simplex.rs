//! Spectral projected gradient on products of scaled simplices.
//!
//! Variables are a flat vector split into equal-length blocks; block `k`
//! lives on `{x >= 0, 1'x = totals[k]}`. Barzilai-Borwein step lengths with
//! an Armijo backtrack along the projected direction.

use crate::linalg::Vector;

#[derive(Debug, Clone, Copy)]
pub struct SpgConfig {
    pub initial_step: f64,
    /// Stop when `max |P(x - g) - x|` falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SpgConfig {
    fn default() -> Self {
        SpgConfig {
            initial_step: 1e-2,
            tolerance: 1e-9,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpgResult {
    pub x: Vector,
    pub value: f64,
    pub iterations: usize,
    /// Final projected-gradient norm.
    pub stationarity: f64,
    pub converged: bool,
}

/// Euclidean projection of `v` onto `{x >= 0, 1'x = total}`.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - total) / (k as f64 + 1.0);
        if uk - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

fn project(v: &Vector, totals: &[f64]) -> Vector {
    let block = v.len() / totals.len();
    let mut out = Vec::with_capacity(v.len());
    for (k, &t) in totals.iter().enumerate() {
        out.extend(project_simplex(&v.as_slice()[k * block..(k + 1) * block], t));
    }
    Vector::from_vec(out)
}

/// Minimize `f` over the product of scaled simplices. `f` may return
/// `+inf` outside its domain; such trial points are rejected.
pub fn minimize<F, G>(f: F, grad: G, x0: Vector, totals: &[f64], cfg: SpgConfig) -> SpgResult
where
    F: Fn(&Vector) -> f64,
    G: Fn(&Vector) -> Vector,
{
    const ARMIJO: f64 = 1e-4;
    let mut x = project(&x0, totals);
    let mut fx = f(&x);
    let mut g = grad(&x);
    let mut step = cfg.initial_step;
    let mut stationarity = (&project(&(&x - &g), totals) - &x).amax();
    for it in 0..cfg.max_iterations {
        if stationarity < cfg.tolerance {
            return SpgResult {
                x,
                value: fx,
                iterations: it,
                stationarity,
                converged: true,
            };
        }
        let d = &project(&(&x - &g * step), totals) - &x;
        let slope = g.dot(&d);
        let mut lambda = 1.0;
        let (x_new, f_new) = loop {
            let trial = &x + &d * lambda;
            let ft = f(&trial);
            // Near the optimum decreases drop below rounding in `f`; accept
            // those trial points rather than stalling.
            let noise = 4.0 * f64::EPSILON * (1.0 + fx.abs());
            if ft.is_finite() && ft <= fx + ARMIJO * lambda * slope + noise {
                break (trial, ft);
            }
            lambda *= 0.5;
            if lambda < 1e-20 {
                break (x.clone(), fx);
            }
        };
        let g_new = grad(&x_new);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        step = if sy > 0.0 { (s.dot(&s) / sy).clamp(1e-12, 1e12) } else { step * 2.0 };
        if s.amax() == 0.0 {
            // Stalled: the backtrack could not make progress at this scale.
            step = cfg.initial_step.min(step * 0.5);
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        stationarity = (&project(&(&x - &g), totals) - &x).amax();
    }
    SpgResult {
        x,
        value: fx,
        iterations: cfg.max_iterations,
        stationarity,
        converged: stationarity < cfg.tolerance,
    }
}

/// Minimize over the probability simplex, starting from its barycenter.
pub fn minimize_on_simplex<F, G>(f: F, grad: G, n: usize, cfg: SpgConfig) -> SpgResult
where
    F: Fn(&Vector) -> f64,
    G: Fn(&Vector) -> Vector,
{
    minimize(f, grad, Vector::from_element(n, 1.0 / n as f64), &[1.0], cfg)
}

/// `min_theta sum_s alpha^s KL(theta || rho^s)` by direct minimization.
pub fn min_weighted_kl(alphas: &Vector, rho: &[Vector]) -> SpgResult {
    let n = rho[0].len();
    let lnr = |i: usize| -> f64 { alphas.iter().zip(rho).map(|(a, r)| a * r[i].max(1e-300).ln()).sum() };
    let weighted: Vec<f64> = (0..n).map(lnr).collect();
    let f = |t: &Vector| -> f64 {
        t.iter()
            .zip(&weighted)
            .map(|(&ti, w)| if ti > 0.0 { ti * (ti.ln() - w) } else { 0.0 })
            .sum()
    };
    let grad = |t: &Vector| Vector::from_fn(n, |i, _| t[i].max(1e-300).ln() + 1.0 - weighted[i]);
    minimize_on_simplex(f, grad, n, SpgConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5], 1.0);
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[3.0, 0.0, -1.0], 2.0);
        assert_eq!(p, vec![2.0, 0.0, 0.0]);
        let p = project_simplex(&[0.2, 0.1], 1.0);
        assert!((p[0] - 0.55).abs() < 1e-15 && (p[1] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn quadratic_on_simplex() {
        let c = Vector::from_vec(vec![0.7, 0.5, -0.2]);
        let r = minimize_on_simplex(
            |x| (x - &c).norm_squared(),
            |x| (x - &c) * 2.0,
            3,
            SpgConfig::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 0.6).abs() < 1e-9 && (r.x[1] - 0.4).abs() < 1e-9 && r.x[2].abs() < 1e-12);
    }

    #[test]
    fn weighted_kl_is_normalized_geometric_mean() {
        let rho = vec![
            Vector::from_vec(vec![0.5, 0.3, 0.2]),
            Vector::from_vec(vec![0.1, 0.6, 0.3]),
        ];
        let alphas = Vector::from_vec(vec![0.4, 0.6]);
        let geo = Vector::from_fn(3, |i, _| rho[0][i].powf(0.4) * rho[1][i].powf(0.6));
        let r = min_weighted_kl(&alphas, &rho);
        assert!((r.value + geo.sum().ln()).abs() < 1e-12);
        assert!((&r.x - &geo / geo.sum()).amax() < 1e-8);
    }
}
