//! Dense two-phase simplex for the small bounded LPs of the improvement
//! construction. Bland's rule throughout, so no cycling.

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    Infeasible,
    Unbounded,
}

/// `maximize c'x` subject to `a_ub x <= b_ub`, `a_eq x = b_eq`,
/// `lower <= x <= upper` (all bounds finite).
#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

const EPS: f64 = 1e-11;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximize `cost` over columns allowed by `enter`.
    fn optimize(&mut self, cost: &[f64], enter: impl Fn(usize) -> bool) -> Result<(), LpError> {
        let rhs = self.ncols;
        loop {
            let entering = (0..self.ncols).filter(|&j| enter(j)).find(|&j| {
                let reduced = cost[j]
                    - self
                        .rows
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &b)| cost[b] * row[j])
                        .sum::<f64>();
                reduced > EPS
            });
            let Some(c) = entering else { return Ok(()) };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[rhs] / row[c];
                    let better = match best {
                        None => true,
                        Some((bi, br)) => ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < self.basis[bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return Err(LpError::Unbounded) };
            self.pivot(r, c);
        }
    }

    fn value(&self, col: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(0.0, |r| self.rows[r][self.ncols])
    }
}

impl Lp {
    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let nv = self.c.len();
        // Shift x = lower + y with 0 <= y <= upper - lower.
        let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
        let shift = |a: &[f64], b: f64| b - a.iter().zip(&self.lower).map(|(x, l)| x * l).sum::<f64>();
        for (a, &b) in self.a_ub.iter().zip(&self.b_ub) {
            rows.push((a.clone(), shift(a, b), false));
        }
        for j in 0..nv {
            let mut a = vec![0.0; nv];
            a[j] = 1.0;
            rows.push((a, self.upper[j] - self.lower[j], false));
        }
        for (a, &b) in self.a_eq.iter().zip(&self.b_eq) {
            rows.push((a.clone(), shift(a, b), true));
        }
        let m = rows.len();
        let n_slack = rows.iter().filter(|r| !r.2).count();
        // Columns: structural | slacks | artificials | rhs.
        let ncols = nv + n_slack + m;
        let art0 = nv + n_slack;
        let mut tab = Tableau {
            rows: vec![vec![0.0; ncols + 1]; m],
            basis: vec![0; m],
            ncols,
        };
        let mut slack = nv;
        for (i, (a, b, eq)) in rows.iter().enumerate() {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            let row = &mut tab.rows[i];
            for j in 0..nv {
                row[j] = sign * a[j];
            }
            row[ncols] = sign * b;
            let mut basic = None;
            if !eq {
                row[slack] = sign;
                if sign > 0.0 {
                    basic = Some(slack);
                }
                slack += 1;
            }
            row[art0 + i] = 1.0;
            tab.basis[i] = basic.unwrap_or(art0 + i);
        }
        // Artificial columns already in use as basis are the only ones that matter;
        // unused ones are zeroed so they never enter.
        for i in 0..m {
            if tab.basis[i] != art0 + i {
                tab.rows[i][art0 + i] = 0.0;
            }
        }

        let phase1: Vec<f64> = (0..ncols).map(|j| if j >= art0 { -1.0 } else { 0.0 }).collect();
        let used: Vec<bool> = (0..m).map(|i| tab.basis[i] == art0 + i).collect();
        tab.optimize(&phase1, |j| j < art0 || used[j - art0])?;
        let infeas: f64 = (0..m).filter(|&i| used[i]).map(|i| tab.value(art0 + i)).sum();
        let scale = rows.iter().map(|r| r.1.abs()).fold(1.0, f64::max);
        if infeas > 1e-9 * scale {
            return Err(LpError::Infeasible);
        }
        // Drive remaining artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&j| tab.rows[r][j].abs() > 1e-9) {
                    tab.pivot(r, c);
                }
            }
        }

        let mut cost = vec![0.0; ncols];
        cost[..nv].copy_from_slice(&self.c);
        tab.optimize(&cost, |j| j < art0)?;
        let x: Vec<f64> = (0..nv).map(|j| self.lower[j] + tab.value(j)).collect();
        let objective = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}
