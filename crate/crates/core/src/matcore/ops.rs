use super::density::{Cut, DensityMatrix};
use super::eigen::eigh;
use super::matrix::{norm, ComplexMatrix, C64, ONE, ZERO};
use super::Tolerances;
use crate::error::{Error, Result};

/// Partial transpose of a `dX*dY` square matrix on the chosen factor.
pub fn partial_transpose(m: &ComplexMatrix, dims: (usize, usize), cut: Cut) -> Result<ComplexMatrix> {
    let (dx, dy) = dims;
    if m.rows() != dx * dy || m.cols() != dx * dy {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not match declared cut {dx}x{dy}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dx * dy, dx * dy, |i, j| {
        let (x, y) = (i / dy, i % dy);
        let (xp, yp) = (j / dy, j % dy);
        match cut {
            Cut::Y => m[(x * dy + yp, xp * dy + y)],
            Cut::X => m[(xp * dy + y, x * dy + yp)],
        }
    }))
}

impl DensityMatrix {
    pub fn partial_transpose(&self, cut: Cut) -> ComplexMatrix {
        partial_transpose(self.matrix(), self.dims(), cut).expect("dims validated at construction")
    }
}

/// Trusted-side operator `(<u| ⊗ I) rho (|w> ⊗ I)`.
pub fn untrusted_block(rho: &DensityMatrix, u: &[C64], w: &[C64]) -> Result<ComplexMatrix> {
    let (dx, dy) = rho.dims();
    if u.len() != dx || w.len() != dx {
        return Err(Error::DimensionMismatch(format!(
            "untrusted vectors of length {}/{} on a {dx}x{dy} cut",
            u.len(),
            w.len()
        )));
    }
    let mut out = ComplexMatrix::zeros(dy, dy);
    for x in 0..dx {
        let cu = u[x].conj();
        if cu == ZERO {
            continue;
        }
        for xp in 0..dx {
            let f = cu * w[xp];
            if f == ZERO {
                continue;
            }
            for y in 0..dy {
                for yp in 0..dy {
                    out[(y, yp)] += f * rho.entry(x, y, xp, yp);
                }
            }
        }
    }
    Ok(out)
}

/// Unnormalized trusted conditional state `<xi| rho |xi>` for a unit untrusted vector.
pub fn conditional_state(rho: &DensityMatrix, xi: &[C64], tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = norm(xi);
    if (n - 1.0).abs() > tol.eps_zero.max(1e-12) {
        return Err(Error::NotNormalized(n));
    }
    untrusted_block(rho, xi, xi)
}

/// Exchanges the two tensor factors.
pub fn swap_parties(rho: &DensityMatrix) -> DensityMatrix {
    let (dx, dy) = rho.dims();
    let m = ComplexMatrix::from_fn(dx * dy, dx * dy, |i, j| {
        let (y, x) = (i / dx, i % dx);
        let (yp, xp) = (j / dx, j % dx);
        rho.entry(x, y, xp, yp)
    });
    DensityMatrix::new_unchecked(m, (dy, dx))
}

/// Unitary whose first column is `v`.
///
/// A complex Householder reflection maps `e0` to `e^{-i arg v0} v`; the phase is
/// restored on the first column only, so `v = e0` yields the identity.
pub fn unitary_completion(v: &[C64]) -> Result<ComplexMatrix> {
    let n = v.len();
    let nv = norm(v);
    if n == 0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    if (nv - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(nv));
    }
    let v: Vec<C64> = v.iter().map(|z| z / nv).collect();
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
    let w: Vec<C64> = v.iter().map(|z| z * phase.conj()).collect();
    let mut u: Vec<C64> = w.clone();
    u[0] -= ONE;
    let uu = norm(&u).powi(2);
    let mut h = ComplexMatrix::identity(n);
    if uu > 1e-30 {
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] -= u[i] * u[j].conj() * (2.0 / uu);
            }
        }
    }
    // exact first column
    h.set_column(0, &w);
    for i in 0..n {
        h[(i, 0)] *= phase;
    }
    Ok(h)
}

/// Unitary `U` with `U e_col = v`, obtained from [`unitary_completion`] by
/// exchanging column 0 with column `col`.
pub fn unitary_with_column(v: &[C64], col: usize) -> Result<ComplexMatrix> {
    let u = unitary_completion(v)?;
    if col >= v.len() {
        return Err(Error::DimensionMismatch(format!("column {col} out of range")));
    }
    if col == 0 {
        return Ok(u);
    }
    let n = v.len();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let jj = if j == 0 {
            col
        } else if j == col {
            0
        } else {
            j
        };
        u[(i, jj)]
    }))
}

/// Cholesky factor `L` (lower triangular, real nonnegative diagonal) of a
/// 3x3 positive semidefinite matrix.
///
/// Pivots below `eps_zero * tr H` are set to zero, which handles the
/// rank-deficient case.
pub fn psd_cholesky3(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if h.rows() != 3 || h.cols() != 3 {
        return Err(Error::DimensionMismatch("psd_cholesky3 expects a 3x3 matrix".into()));
    }
    let defect = h.hermiticity_defect();
    if defect > tol.eps_eq.max(1e-12 * h.frobenius_norm()) {
        return Err(Error::NotHermitian(defect));
    }
    let tr = h.trace().re;
    let min = eigh(h)?.min();
    if min < -tol.eps_psd * tr.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotPositive(min));
    }
    let scale = tr.max(f64::MIN_POSITIVE);
    let mut l = ComplexMatrix::zeros(3, 3);
    for j in 0..3 {
        let d = h[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if d <= tol.eps_zero * scale {
            if d < -tol.eps_psd * scale {
                return Err(Error::NotPositive(d));
            }
            continue;
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..3 {
            let s: C64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (h[(i, j)] - s) / ljj;
        }
    }
    let err = (&(&l * &l.adjoint()) - h).frobenius_norm();
    if err > tol.eps_eq * scale {
        return Err(Error::NotPositive(-err));
    }
    Ok(l)
}

/// Spectral projectors of a positive semidefinite operator.
#[derive(Debug, Clone)]
pub struct SupportKernel {
    pub support: ComplexMatrix,
    pub kernel: ComplexMatrix,
    pub rank: usize,
    /// Orthonormal basis of the support, eigenvalues descending.
    pub support_basis: Vec<Vec<C64>>,
    pub support_eigenvalues: Vec<f64>,
    /// Orthonormal basis of the kernel.
    pub kernel_basis: Vec<Vec<C64>>,
}

/// Splits the space into eigenvalues above `eps_zero * tr A` (support) and the rest (kernel).
pub fn support_kernel_projectors(a: &ComplexMatrix, tol: &Tolerances) -> Result<SupportKernel> {
    let spec = eigh(a)?;
    let tr = a.trace().re;
    if spec.max() <= 0.0 || tr <= 0.0 {
        return Err(Error::ZeroOperator);
    }
    if spec.min() < -tol.eps_psd * tr {
        return Err(Error::NotPositive(spec.min()));
    }
    let n = spec.dim();
    let threshold = tol.eps_zero * tr;
    let mut support = ComplexMatrix::zeros(n, n);
    let mut kernel = ComplexMatrix::zeros(n, n);
    let mut support_basis = Vec::new();
    let mut support_eigenvalues = Vec::new();
    let mut kernel_basis = Vec::new();
    for k in 0..n {
        let v = spec.eigenvector(k);
        let p = ComplexMatrix::projector(&v);
        if spec.eigenvalues[k] > threshold {
            support = &support + &p;
            support_basis.push(v);
            support_eigenvalues.push(spec.eigenvalues[k]);
        } else {
            kernel = &kernel + &p;
            kernel_basis.push(v);
        }
    }
    Ok(SupportKernel {
        rank: support_basis.len(),
        support,
        kernel,
        support_basis,
        support_eigenvalues,
        kernel_basis,
    })
}
