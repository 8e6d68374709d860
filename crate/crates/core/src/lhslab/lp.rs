//! Minimum-L1-residual LP over deterministic strategies and grid points,
//! solved by a dense revised simplex.
//!
//! Variables are `w[lambda, j] >= 0` plus a pair of unit-cost slacks per row.
//! Row `(x, a, c)` reads `sum_{lambda: lambda_x = a} sum_j w[lambda, j] v_j[c] = target[x][a][c]`
//! with `v_j = (1, r_j)`. Pricing over the `2^n |grid|` weight columns is
//! done per grid point: the best strategy picks, setting by setting, the
//! outcome with the larger dual value.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Residual at or below which the problem counts as feasible.
    pub lp_tol: f64,
    pub max_iterations: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            lp_tol: 1e-7,
            max_iterations: 50_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LhsLpSolution {
    pub feasible: bool,
    /// `|| A w - b ||_1` recomputed from the returned weights.
    pub residual: f64,
    /// Nonzero weights as `(lambda, j, w)`, sorted by `(lambda, j)`.
    pub weights: Vec<(usize, usize, f64)>,
    /// `sum_lambda w[lambda, j]` for each grid point.
    pub point_masses: Vec<f64>,
    pub iterations: usize,
}

impl LhsLpSolution {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().map(|w| w.2).sum()
    }
}

/// Dense data of one LP instance.
pub(crate) struct LpData<'a> {
    pub n_settings: usize,
    pub points: &'a [[f64; 3]],
    /// `targets[(x * 2 + a) * 4 + c]`.
    pub targets: Vec<f64>,
}

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-13;
const DEGENERATE_RUN: usize = 50;
const REFACTOR_EVERY: usize = 100;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Var {
    Weight { lambda: usize, j: usize },
    SlackPos(usize),
    SlackNeg(usize),
}

struct Simplex<'a> {
    data: &'a LpData<'a>,
    m: usize,
    g: usize,
    sign: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<Var>,
    binv: Vec<Vec<f64>>,
    x: Vec<f64>,
}

fn vcomp(p: &[f64; 3], c: usize) -> f64 {
    if c == 0 {
        1.0
    } else {
        p[c - 1]
    }
}

impl<'a> Simplex<'a> {
    fn new(data: &'a LpData<'a>) -> Self {
        let m = data.targets.len();
        let sign: Vec<f64> = data.targets.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let rhs: Vec<f64> = data.targets.iter().zip(&sign).map(|(b, s)| b * s).collect();
        let binv = (0..m).map(|i| (0..m).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
        Self {
            data,
            m,
            g: data.points.len(),
            basis: (0..m).map(Var::SlackPos).collect(),
            x: rhs.clone(),
            sign,
            rhs,
            binv,
        }
    }

    fn cost(v: Var) -> f64 {
        match v {
            Var::Weight { .. } => 0.0,
            _ => 1.0,
        }
    }

    /// Column in the sign-flipped system.
    fn column(&self, v: Var) -> Vec<f64> {
        let mut col = vec![0.0; self.m];
        match v {
            Var::SlackPos(i) => col[i] = 1.0,
            Var::SlackNeg(i) => col[i] = -1.0,
            Var::Weight { lambda, j } => {
                let p = &self.data.points[j];
                for x in 0..self.data.n_settings {
                    let a = (lambda >> x) & 1;
                    for c in 0..4 {
                        let row = (x * 2 + a) * 4 + c;
                        col[row] = self.sign[row] * vcomp(p, c);
                    }
                }
            }
        }
        col
    }

    fn duals(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &v) in self.basis.iter().enumerate() {
            let cb = Self::cost(v);
            if cb != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += cb * self.binv[i][k];
                }
            }
        }
        y
    }

    /// `g[x][a][j] = sum_c y~[(x,a,c)] v_j[c]` with `y~ = y * sign`.
    fn dual_scores(&self, y: &[f64]) -> Vec<f64> {
        let n = self.data.n_settings;
        let mut scores = vec![0.0; n * 2 * self.g];
        for x in 0..n {
            for a in 0..2 {
                let base = (x * 2 + a) * 4;
                let yy: [f64; 4] = std::array::from_fn(|c| y[base + c] * self.sign[base + c]);
                for (j, p) in self.data.points.iter().enumerate() {
                    scores[(x * 2 + a) * self.g + j] = yy[0] + yy[1] * p[0] + yy[2] * p[1] + yy[3] * p[2];
                }
            }
        }
        scores
    }

    fn weight_reduced_cost(&self, scores: &[f64], lambda: usize, j: usize) -> f64 {
        -(0..self.data.n_settings)
            .map(|x| scores[(x * 2 + ((lambda >> x) & 1)) * self.g + j])
            .sum::<f64>()
    }

    /// Most negative reduced cost (Dantzig).
    fn price_dantzig(&self, y: &[f64]) -> Option<Var> {
        let scores = self.dual_scores(y);
        let n = self.data.n_settings;
        let mut best: Option<(f64, Var)> = None;
        let consider = |rc: f64, v: Var, best: &mut Option<(f64, Var)>| {
            if rc < -PRICE_TOL && best.is_none_or(|(b, _)| rc < b) {
                *best = Some((rc, v));
            }
        };
        for j in 0..self.g {
            let mut lambda = 0usize;
            let mut total = 0.0;
            for x in 0..n {
                let s0 = scores[(x * 2) * self.g + j];
                let s1 = scores[(x * 2 + 1) * self.g + j];
                if s1 > s0 {
                    lambda |= 1 << x;
                    total += s1;
                } else {
                    total += s0;
                }
            }
            consider(-total, Var::Weight { lambda, j }, &mut best);
        }
        for i in 0..self.m {
            consider(1.0 - y[i], Var::SlackPos(i), &mut best);
            consider(1.0 + y[i], Var::SlackNeg(i), &mut best);
        }
        best.map(|(_, v)| v)
    }

    /// Lowest-index improving column (Bland); weights are indexed `lambda * |grid| + j`.
    fn price_bland(&self, y: &[f64]) -> Option<Var> {
        let scores = self.dual_scores(y);
        for lambda in 0..(1usize << self.data.n_settings) {
            for j in 0..self.g {
                if self.weight_reduced_cost(&scores, lambda, j) < -PRICE_TOL {
                    return Some(Var::Weight { lambda, j });
                }
            }
        }
        (0..self.m)
            .find(|&i| 1.0 - y[i] < -PRICE_TOL)
            .map(Var::SlackPos)
            .or_else(|| (0..self.m).find(|&i| 1.0 + y[i] < -PRICE_TOL).map(Var::SlackNeg))
    }

    fn var_index(&self, v: Var) -> usize {
        let nw = (1usize << self.data.n_settings) * self.g;
        match v {
            Var::Weight { lambda, j } => lambda * self.g + j,
            Var::SlackPos(i) => nw + i,
            Var::SlackNeg(i) => nw + self.m + i,
        }
    }

    fn pivot(&mut self, r: usize, d: &[f64], entering: Var) {
        let m = self.m;
        let dr = d[r];
        for k in 0..m {
            self.binv[r][k] /= dr;
        }
        self.x[r] /= dr;
        let row_r = self.binv[r].clone();
        let xr = self.x[r];
        for i in 0..m {
            if i != r && d[i] != 0.0 {
                let f = d[i];
                for k in 0..m {
                    self.binv[i][k] -= f * row_r[k];
                }
                self.x[i] -= f * xr;
                if self.x[i] < 0.0 && self.x[i] > -1e-13 {
                    self.x[i] = 0.0;
                }
            }
        }
        self.basis[r] = entering;
    }

    /// Rebuilds `B^{-1}` from the basis columns by Gauss-Jordan elimination.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&v| self.column(v)).collect();
        let mut a: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|k| cols[k][i]).collect()).collect();
        let mut inv: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
        for col in 0..m {
            let p = (col..m)
                .max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))
                .expect("nonempty");
            if a[p][col].abs() < 1e-14 {
                return Err(Error::Singular);
            }
            a.swap(col, p);
            inv.swap(col, p);
            let piv = a[col][col];
            for k in 0..m {
                a[col][k] /= piv;
                inv[col][k] /= piv;
            }
            for i in 0..m {
                if i != col {
                    let f = a[i][col];
                    if f != 0.0 {
                        for k in 0..m {
                            a[i][k] -= f * a[col][k];
                            inv[i][k] -= f * inv[col][k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.x = (0..m)
            .map(|i| (0..m).map(|k| self.binv[i][k] * self.rhs[k]).sum::<f64>().max(0.0))
            .collect();
        Ok(())
    }

    fn solve(&mut self, max_iterations: usize) -> Result<usize> {
        let mut bland = false;
        let mut degenerate_run = 0;
        for iter in 0..max_iterations {
            if iter > 0 && iter % REFACTOR_EVERY == 0 {
                self.refactor()?;
            }
            let y = self.duals();
            let entering = if bland { self.price_bland(&y) } else { self.price_dantzig(&y) };
            let Some(entering) = entering else {
                self.refactor()?;
                return Ok(iter);
            };
            let col = self.column(entering);
            let d: Vec<f64> = (0..self.m)
                .map(|i| (0..self.m).map(|k| self.binv[i][k] * col[k]).sum())
                .collect();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if d[i] > PIVOT_TOL {
                    let theta = self.x[i] / d[i];
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            if theta < best - 1e-15 {
                                true
                            } else if theta <= best + 1e-15 {
                                if bland {
                                    self.var_index(self.basis[i]) < self.var_index(self.basis[r])
                                } else {
                                    d[i] > d[r]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some((i, theta));
                    }
                }
            }
            let Some((r, theta)) = leave else {
                return Err(Error::InvalidParameter("LP is unbounded".into()));
            };
            if theta <= DEGENERATE_STEP {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            self.pivot(r, &d, entering);
        }
        Err(Error::IterationCap(max_iterations))
    }
}

pub(crate) fn solve(data: &LpData<'_>, opts: &LpOptions) -> Result<LhsLpSolution> {
    let mut sx = Simplex::new(data);
    let iterations = sx.solve(opts.max_iterations)?;
    let g = data.points.len();
    let mut weights: Vec<(usize, usize, f64)> = sx
        .basis
        .iter()
        .zip(&sx.x)
        .filter_map(|(&v, &x)| match v {
            Var::Weight { lambda, j } if x > 0.0 => Some((lambda, j, x)),
            _ => None,
        })
        .collect();
    weights.sort_by_key(|&(lambda, j, _)| (lambda, j));
    let mut point_masses = vec![0.0; g];
    for &(_, j, w) in &weights {
        point_masses[j] += w;
    }
    let residual = residual(data, &weights);
    Ok(LhsLpSolution {
        feasible: residual <= opts.lp_tol,
        residual,
        weights,
        point_masses,
        iterations,
    })
}

/// `|| A w - b ||_1` in the original orientation.
pub(crate) fn residual(data: &LpData<'_>, weights: &[(usize, usize, f64)]) -> f64 {
    let mut lhs = vec![0.0; data.targets.len()];
    for &(lambda, j, w) in weights {
        let p = &data.points[j];
        for x in 0..data.n_settings {
            let a = (lambda >> x) & 1;
            for c in 0..4 {
                lhs[(x * 2 + a) * 4 + c] += w * vcomp(p, c);
            }
        }
    }
    lhs.iter().zip(&data.targets).map(|(l, b)| (l - b).abs()).sum()
}
