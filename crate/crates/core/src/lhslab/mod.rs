//! Finite projective assemblages and their grid-discretized LHS linear program.
//!
//! Feasibility of the LP exhibits an LHS model for the chosen settings.
//! Infeasibility at a finite grid only records how far the discretized model
//! is from the data; it is never a steering certificate.

mod grid;
mod lp;

pub use grid::HiddenGrid;
pub use lp::{LhsLpSolution, LpOptions};

use crate::error::{Error, Result};
use crate::matcore::{conditional_state, norm, ComplexMatrix, DensityMatrix, Tolerances, C64};
use crate::scaling::BlochProfile;

pub const MAX_SETTINGS: usize = 12;

/// Unit vector of the untrusted qubit with Bloch direction `n`.
pub fn ket_from_bloch(n: [f64; 3]) -> Result<Vec<C64>> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::ZeroVector);
    }
    let theta = (n[2] / len).clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    Ok(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// Binary projective assemblage `sigma_{a|x}`; outcome 0 projects on `xi_x`, outcome 1 on its complement.
#[derive(Debug, Clone)]
pub struct Assemblage {
    pub settings: Vec<Vec<C64>>,
    pub members: Vec<[ComplexMatrix; 2]>,
}

impl Assemblage {
    pub fn from_state(rho: &DensityMatrix, directions: &[Vec<C64>], tol: &Tolerances) -> Result<Self> {
        if rho.dims() != (2, 2) {
            return Err(Error::DimensionMismatch("assemblages are built on two-qubit states".into()));
        }
        if directions.len() > MAX_SETTINGS {
            return Err(Error::TooManySettings(directions.len(), MAX_SETTINGS));
        }
        let mut settings = Vec::with_capacity(directions.len());
        let mut members = Vec::with_capacity(directions.len());
        for xi in directions {
            if xi.len() != 2 {
                return Err(Error::DimensionMismatch("settings are untrusted qubit vectors".into()));
            }
            let n = norm(xi);
            if (n - 1.0).abs() > tol.eps_zero.max(1e-12) {
                return Err(Error::NotNormalized(n));
            }
            let perp = vec![-xi[1].conj(), xi[0].conj()];
            members.push([conditional_state(rho, xi, tol)?, conditional_state(rho, &perp, tol)?]);
            settings.push(xi.clone());
        }
        Ok(Self { settings, members })
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// Largest Frobenius distance between the per-setting sums `sigma_{0|x} + sigma_{1|x}`.
    pub fn no_signalling_defect(&self) -> f64 {
        let sums: Vec<ComplexMatrix> = self.members.iter().map(|[a, b]| a + b).collect();
        sums.iter()
            .flat_map(|s| sums.iter().map(move |t| (s - t).frobenius_norm()))
            .fold(0.0, f64::max)
    }

    fn targets(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() * 8);
        for pair in &self.members {
            for s in pair {
                let p = BlochProfile::from_sigma(0.0, s);
                out.extend([p.m, p.r[0], p.r[1], p.r[2]]);
            }
        }
        out
    }
}

/// Minimum-L1-residual fit of the assemblage by grid-supported deterministic LHS models.
pub fn lhs_lp(asm: &Assemblage, grid: &HiddenGrid, opts: &LpOptions) -> Result<LhsLpSolution> {
    if asm.len() > MAX_SETTINGS {
        return Err(Error::TooManySettings(asm.len(), MAX_SETTINGS));
    }
    let data = lp::LpData {
        n_settings: asm.len(),
        points: grid.points(),
        targets: asm.targets(),
    };
    lp::solve(&data, opts)
}

/// Recomputes `|| A w - b ||_1` for externally supplied weights.
pub fn lp_residual(asm: &Assemblage, grid: &HiddenGrid, weights: &[(usize, usize, f64)]) -> f64 {
    let data = lp::LpData {
        n_settings: asm.len(),
        points: grid.points(),
        targets: asm.targets(),
    };
    lp::residual(&data, weights)
}

/// Mass on the punctured cap `{r : 1 - r.c <= K^2 t^2 / 2}` without the contact atom.
pub fn cap_mass(sol: &LhsLpSolution, grid: &HiddenGrid, t: f64, k: f64, contact_dir: [f64; 3]) -> Result<f64> {
    if !(t > 0.0) || !(k > 0.0) {
        return Err(Error::InvalidParameter("cap parameters t and K must be positive".into()));
    }
    if sol.point_masses.len() != grid.len() {
        return Err(Error::DimensionMismatch("solution and grid sizes differ".into()));
    }
    let n = grid::dot(contact_dir, contact_dir).sqrt();
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    let c = [contact_dir[0] / n, contact_dir[1] / n, contact_dir[2] / n];
    let height = k * k * t * t / 2.0;
    Ok(grid
        .points()
        .iter()
        .enumerate()
        .filter(|&(j, p)| Some(j) != grid.contact_index() && 1.0 - grid::dot(*p, c) <= height)
        .map(|(j, _)| sol.point_masses[j])
        .sum())
}
