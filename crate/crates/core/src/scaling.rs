//! Conditional families `sigma_t`, their Bloch profiles and the boundary-scaling fit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matcore::{
    conditional_state, inner, norm, support_kernel_projectors, untrusted_block, ComplexMatrix,
    DensityMatrix, Tolerances, C64,
};

/// Values of `|b_t|` or `d_t` at or below this are treated as identically zero.
pub const NUMERIC_FLOOR: f64 = 1e-14;

/// Bloch data of one unnormalized qubit state `[[a, b], [conj b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochProfile {
    pub t: f64,
    pub m: f64,
    pub r: [f64; 3],
    pub b: C64,
    pub d: f64,
    /// `|R_perp| / m`.
    pub u: f64,
    /// `(m - R_z) / m = 2 d / m`.
    pub delta: f64,
}

impl BlochProfile {
    pub fn from_sigma(t: f64, sigma: &ComplexMatrix) -> Self {
        let a = sigma[(0, 0)].re;
        let d = sigma[(1, 1)].re;
        let b = sigma[(0, 1)];
        let m = a + d;
        let r = [2.0 * b.re, -2.0 * b.im, a - d];
        Self {
            t,
            m,
            r,
            b,
            d,
            u: (r[0].hypot(r[1])) / m,
            delta: 2.0 * d / m,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalFamily {
    pub t_grid: Vec<f64>,
    pub sigmas: Vec<ComplexMatrix>,
    pub profiles: Vec<BlochProfile>,
}

impl ConditionalFamily {
    fn from_sigmas(t_grid: &[f64], sigmas: Vec<ComplexMatrix>) -> Self {
        let profiles = t_grid
            .iter()
            .zip(&sigmas)
            .map(|(&t, s)| BlochProfile::from_sigma(t, s))
            .collect();
        Self {
            t_grid: t_grid.to_vec(),
            sigmas,
            profiles,
        }
    }

    pub const CSV_HEADER: &'static str = "t,m,Rx,Ry,Rz,abs_b,d,u,delta";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.profiles {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                p.t,
                p.m,
                p.r[0],
                p.r[1],
                p.r[2],
                p.b.norm(),
                p.d,
                p.u,
                p.delta
            );
        }
        out
    }
}

/// `n` logarithmically spaced points in `[tmin, tmax]`.
pub fn log_grid(tmin: f64, tmax: f64, n: usize) -> Result<Vec<f64>> {
    if !(tmin > 0.0 && tmax > tmin && tmax.is_finite()) || n < 2 {
        return Err(Error::InvalidParameter(
            "log grid needs 0 < tmin < tmax and at least 2 points".into(),
        ));
    }
    let (l0, l1) = (tmin.ln(), tmax.ln());
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                tmax
            } else if k == 0 {
                tmin
            } else {
                (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// The default grid: 20 points in `[1e-4, 1e-2]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-4, 1e-2, 20).expect("valid constants")
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if t_grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "t grid must be strictly positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_pair(alpha0: &[C64], alpha1: &[C64], dx: usize, tol: &Tolerances) -> Result<()> {
    if alpha0.len() != dx || alpha1.len() != dx {
        return Err(Error::DimensionMismatch(format!("untrusted vectors must have length {dx}")));
    }
    let defect = (norm(alpha0) - 1.0)
        .abs()
        .max((norm(alpha1) - 1.0).abs())
        .max(inner(alpha0, alpha1).norm());
    if defect > tol.eps_zero {
        return Err(Error::NotOrthonormal(defect));
    }
    Ok(())
}

/// `xi_t = (alpha0 + t alpha1) / sqrt(1 + t^2)`.
pub fn xi_t(alpha0: &[C64], alpha1: &[C64], t: f64) -> Vec<C64> {
    let s = 1.0 / (1.0 + t * t).sqrt();
    alpha0.iter().zip(alpha1).map(|(a, b)| (a + b * t) * s).collect()
}

/// Conditional states at `xi_t` for a trusted qubit.
pub fn sigma_family(
    rho: &DensityMatrix,
    alpha0: &[C64],
    alpha1: &[C64],
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<ConditionalFamily> {
    let (dx, dy) = rho.dims();
    if dy != 2 {
        return Err(Error::DimensionMismatch(format!(
            "trusted dimension {dy} needs a compression pair (compressed_slice)"
        )));
    }
    check_pair(alpha0, alpha1, dx, tol)?;
    check_grid(t_grid)?;
    let sigmas = t_grid
        .iter()
        .map(|&t| conditional_state(rho, &xi_t(alpha0, alpha1, t), tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalFamily::from_sigmas(t_grid, sigmas))
}

/// Conditional states compressed to the ordered basis `(phi, beta)` with
/// `phi` in the support and `beta` in the kernel of `A = <alpha0|rho|alpha0>`.
pub fn compressed_slice(
    rho: &DensityMatrix,
    alpha0: &[C64],
    alpha1: &[C64],
    phi: &[C64],
    beta: &[C64],
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<ConditionalFamily> {
    let (dx, dy) = rho.dims();
    check_pair(alpha0, alpha1, dx, tol)?;
    check_grid(t_grid)?;
    if phi.len() != dy || beta.len() != dy {
        return Err(Error::DimensionMismatch(format!("trusted vectors must have length {dy}")));
    }
    let defect = (norm(phi) - 1.0)
        .abs()
        .max((norm(beta) - 1.0).abs())
        .max(inner(phi, beta).norm());
    if defect > tol.eps_zero {
        return Err(Error::NotOrthonormal(defect));
    }
    let a = untrusted_block(rho, alpha0, alpha0)?.hermitian_part();
    let tr = rho.matrix().trace().re;
    if norm(&a.matvec(beta)) > tol.eps_zero * tr {
        return Err(Error::NotInSubspace("beta is not in the kernel of A".into()));
    }
    let sk = support_kernel_projectors(&a, tol)?;
    if norm(&sk.kernel.matvec(phi)) > tol.eps_zero.sqrt() {
        return Err(Error::NotInSubspace("phi is not in the support of A".into()));
    }
    let basis = [phi.to_vec(), beta.to_vec()];
    let sigmas = t_grid
        .iter()
        .map(|&t| Ok(conditional_state(rho, &xi_t(alpha0, alpha1, t), tol)?.compress(&basis)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalFamily::from_sigmas(t_grid, sigmas))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    /// Log-log slope of `|b_t|`; `None` when some `|b_t|` is below the floor.
    pub slope_b: Option<f64>,
    /// Log-log slope of `d_t`; `None` when `d_below_floor`.
    pub slope_d: Option<f64>,
    pub d_below_floor: bool,
    /// `min |b_t| / t`.
    pub l_hat: f64,
    /// `max d_t / t^2`.
    pub c_hat: f64,
    pub passes: bool,
    pub points: usize,
}

impl ScalingReport {
    /// Threshold `4 c_hat / l_hat` that the cap parameter `K` must exceed.
    pub fn k_threshold(&self) -> f64 {
        4.0 * self.c_hat / self.l_hat
    }

    /// Fits raw series `(t, |b_t|, d_t)` restricted to `window`.
    pub fn from_series(t: &[f64], abs_b: &[f64], d: &[f64], window: (f64, f64)) -> Result<Self> {
        if t.len() != abs_b.len() || t.len() != d.len() {
            return Err(Error::DimensionMismatch("series lengths differ".into()));
        }
        let idx: Vec<usize> = (0..t.len())
            .filter(|&k| t[k] >= window.0 && t[k] <= window.1)
            .collect();
        if idx.len() < 4 {
            return Err(Error::EmptyWindow);
        }
        let lt: Vec<f64> = idx.iter().map(|&k| t[k].ln()).collect();

        let slope_b = if idx.iter().all(|&k| abs_b[k] > NUMERIC_FLOOR) {
            Some(ols_slope(&lt, &idx.iter().map(|&k| abs_b[k].ln()).collect::<Vec<_>>()))
        } else {
            None
        };
        let above: Vec<usize> = (0..idx.len()).filter(|&i| d[idx[i]] > NUMERIC_FLOOR).collect();
        let d_below_floor = above.len() < 2;
        let slope_d = if d_below_floor {
            None
        } else {
            let x: Vec<f64> = above.iter().map(|&i| lt[i]).collect();
            let y: Vec<f64> = above.iter().map(|&i| d[idx[i]].ln()).collect();
            Some(ols_slope(&x, &y))
        };
        let l_hat = idx.iter().map(|&k| abs_b[k] / t[k]).fold(f64::INFINITY, f64::min);
        let c_hat = idx.iter().map(|&k| d[k] / (t[k] * t[k])).fold(f64::NEG_INFINITY, f64::max);
        let first_order = slope_b.is_some_and(|s| (s - 1.0).abs() <= 0.05);
        let second_order = d_below_floor || slope_d.is_some_and(|s| s >= 1.95);
        let passes = first_order && second_order && l_hat > Tolerances::default().eps_zero && c_hat.is_finite();
        Ok(Self {
            slope_b,
            slope_d,
            d_below_floor,
            l_hat,
            c_hat,
            passes,
            points: idx.len(),
        })
    }
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Least-squares log-log slopes of `|b_t|` and `d_t` over `window`.
pub fn scaling_fit(fam: &ConditionalFamily, window: (f64, f64)) -> Result<ScalingReport> {
    let abs_b: Vec<f64> = fam.profiles.iter().map(|p| p.b.norm()).collect();
    let d: Vec<f64> = fam.profiles.iter().map(|p| p.d).collect();
    ScalingReport::from_series(&fam.t_grid, &abs_b, &d, window)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectCurve {
    /// `(t, u_t, delta_t)`.
    pub points: Vec<(f64, f64, f64)>,
    /// `max delta_t / u_t^2`; `None` when there is no tangential motion.
    pub c_fit: Option<f64>,
}

impl DefectCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u,delta\n");
        for (t, u, d) in &self.points {
            let _ = writeln!(out, "{t:e},{u:e},{d:e}");
        }
        out
    }
}

/// `(u_t, delta_t)` pairs and the smallest `C` with `delta <= C u^2` on the grid.
pub fn defect_curve(fam: &ConditionalFamily, tol: &Tolerances) -> Result<DefectCurve> {
    if let Some(p) = fam.profiles.iter().find(|p| p.m <= tol.eps_zero) {
        return Err(Error::ZeroTrace(p.m));
    }
    let points: Vec<(f64, f64, f64)> = fam.profiles.iter().map(|p| (p.t, p.u, p.delta)).collect();
    let c_fit = if points.iter().all(|&(_, u, _)| u <= NUMERIC_FLOOR) {
        None
    } else {
        Some(points.iter().fold(0.0f64, |acc, &(_, u, delta)| {
            if u > NUMERIC_FLOOR {
                acc.max(delta / (u * u))
            } else if delta > NUMERIC_FLOOR {
                f64::INFINITY
            } else {
                acc
            }
        }))
    };
    Ok(DefectCurve { points, c_fit })
}
