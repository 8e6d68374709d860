//! Boundary contacts: kernel bases, product vectors in two-dimensional null
//! spaces, local-unitary normal forms and the filtered standard class.

use crate::error::{Error, Result};
use crate::matcore::{
    eigh, inner, kron_vec, norm, normalize, unitary_completion, unitary_with_column, untrusted_block,
    ComplexMatrix, DensityMatrix, Tolerances, C64, ONE, ZERO,
};

/// Product vector `alpha ⊗ beta` annihilated by a state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductNullDatum {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    /// `|| rho (alpha ⊗ beta) ||`.
    pub residual: f64,
}

impl ProductNullDatum {
    /// Builds a datum from arbitrary nonzero vectors, normalizing both and recording the residual.
    pub fn new(rho: &DensityMatrix, alpha: &[C64], beta: &[C64]) -> Result<Self> {
        let (dx, dy) = rho.dims();
        if alpha.len() != dx || beta.len() != dy {
            return Err(Error::DimensionMismatch("contact vector lengths".into()));
        }
        let alpha = canonical_phase(&normalize(alpha)?);
        let beta = canonical_phase(&normalize(beta)?);
        let residual = norm(&rho.matrix().matvec(&kron_vec(&alpha, &beta)));
        Ok(Self { alpha, beta, residual })
    }

    /// The same contact seen after exchanging the parties.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            residual: self.residual,
        }
    }
}

/// Rotates a vector so its first non-negligible component is real positive.
pub fn canonical_phase(v: &[C64]) -> Vec<C64> {
    let scale = norm(v);
    match v.iter().find(|z| z.norm() > 1e-12 * scale) {
        Some(lead) => {
            let ph = lead.conj() / lead.norm();
            let mut out: Vec<C64> = v.iter().map(|z| z * ph).collect();
            if let Some(k) = v.iter().position(|z| z.norm() > 1e-12 * scale) {
                out[k] = C64::new(out[k].norm(), 0.0);
            }
            out
        }
        None => v.to_vec(),
    }
}

/// Orthonormal basis of the eigenspace with eigenvalues `<= eps_zero * tr rho`.
pub fn kernel_basis(rho: &DensityMatrix, tol: &Tolerances) -> Vec<Vec<C64>> {
    let spec = eigh(rho.matrix()).expect("density matrices are Hermitian");
    let threshold = tol.eps_zero * rho.matrix().trace().re;
    (0..spec.dim())
        .filter(|&k| spec.eigenvalues[k] <= threshold)
        .map(|k| canonical_phase(&spec.eigenvector(k)))
        .collect()
}

/// Point `x psi1 + y psi2` of a two-dimensional span that is a product vector.
#[derive(Debug, Clone)]
pub struct PencilRoot {
    pub x: C64,
    pub y: C64,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    /// `x psi1 + y psi2 = scale * alpha ⊗ beta`.
    pub scale: C64,
    /// `det(x A1 + y A2)` at the returned root.
    pub det: C64,
}

fn coefficient_matrix(psi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, psi.to_vec()).expect("two-qubit vector")
}

fn det2(m: &ComplexMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Splits a (numerically) rank-one coefficient matrix `C = s alpha beta^T`.
fn factor_rank_one(cm: &ComplexMatrix) -> Result<(Vec<C64>, Vec<C64>, C64)> {
    let spec = eigh(&(cm * &cm.adjoint()))?;
    let alpha = canonical_phase(&spec.eigenvector(0));
    let conj_alpha: Vec<C64> = alpha.iter().map(|z| z.conj()).collect();
    let b = cm.transpose().matvec(&conj_alpha);
    let s = norm(&b);
    if s == 0.0 {
        return Err(Error::ZeroVector);
    }
    let beta = canonical_phase(&b);
    // b = s_phase * beta with |s_phase| = s
    let k = beta.iter().position(|z| z.norm() > 0.0).expect("nonzero");
    let scale = b[k] / beta[k];
    Ok((alpha, beta, scale))
}

// Tie-break between two finite roots: smaller modulus, then real part, then imaginary part.
fn root_order(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

/// Finds a product vector in `span{psi1, psi2}` for two-qubit vectors.
///
/// With `A_k` the 2x2 coefficient matrices, `det(A1 + s A2)` is a quadratic in
/// `s = y/x`. A vanishing leading coefficient means a root at infinity
/// (`psi2` itself is a product). Among the roots, the one with the smallest
/// `|s|` is returned (then smaller real part, then smaller imaginary part);
/// the root at infinity comes last. An identically vanishing pencil yields
/// `(1, 0)`.
pub fn product_vector_in_span(psi1: &[C64], psi2: &[C64]) -> Result<PencilRoot> {
    if psi1.len() != 4 || psi2.len() != 4 {
        return Err(Error::DimensionMismatch("pencil search expects two-qubit vectors".into()));
    }
    let (n1, n2) = (norm(psi1), norm(psi2));
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let g = inner(psi1, psi2).norm() / (n1 * n2);
    if 1.0 - g * g <= 1e-20 {
        return Err(Error::LinearlyDependent);
    }
    let a1 = coefficient_matrix(psi1);
    let a2 = coefficient_matrix(psi2);
    let c0 = det2(&a1);
    let c2 = det2(&a2);
    let c1 = a1[(0, 0)] * a2[(1, 1)] + a2[(0, 0)] * a1[(1, 1)] - a1[(0, 1)] * a2[(1, 0)] - a2[(0, 1)] * a1[(1, 0)];

    let scale = (n1 + n2) * (n1 + n2);
    let tiny = 1e-14 * scale;
    let (x, y) = if c2.norm() <= tiny {
        if c1.norm() > tiny {
            (ONE, -c0 / c1)
        } else if c0.norm() > tiny {
            (ZERO, ONE)
        } else {
            (ONE, ZERO)
        }
    } else {
        let disc = (c1 * c1 - c0 * c2 * 4.0).sqrt();
        // stable pair of roots
        let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
            -(c1 + disc) * 0.5
        } else {
            -(c1 - disc) * 0.5
        };
        let mut roots = vec![q / c2];
        if q.norm() > 0.0 {
            roots.push(c0 / q);
        } else {
            roots.push(ZERO);
        }
        roots.sort_by(root_order);
        (ONE, roots[0])
    };

    let combo: Vec<C64> = psi1.iter().zip(psi2).map(|(p, q)| x * p + y * q).collect();
    let cm = coefficient_matrix(&combo);
    let (alpha, beta, scale) = factor_rank_one(&cm)?;
    Ok(PencilRoot {
        x,
        y,
        alpha,
        beta,
        scale,
        det: det2(&cm),
    })
}

/// Looks for a product vector in the kernel of a two-qubit state.
///
/// Returns `None` when the kernel is trivial or contains no product vector
/// within `eps_zero`.
pub fn find_boundary_contact(rho: &DensityMatrix, tol: &Tolerances) -> Result<Option<ProductNullDatum>> {
    if !rho.is_two_qubit() {
        return Err(Error::DimensionMismatch(
            "boundary contacts are searched on two-qubit cuts; use the support-kernel criterion".into(),
        ));
    }
    let kernel = kernel_basis(rho, tol);
    let accept = |alpha: &[C64], beta: &[C64]| -> Result<Option<ProductNullDatum>> {
        let d = ProductNullDatum::new(rho, alpha, beta)?;
        Ok((d.residual <= tol.eps_zero).then_some(d))
    };
    match kernel.len() {
        0 => Ok(None),
        1 => {
            let (alpha, beta, _) = factor_rank_one(&coefficient_matrix(&kernel[0]))?;
            accept(&alpha, &beta)
        }
        _ => {
            for i in 0..kernel.len() {
                for j in i + 1..kernel.len() {
                    let root = product_vector_in_span(&kernel[i], &kernel[j])?;
                    if let Some(d) = accept(&root.alpha, &root.beta)? {
                        return Ok(Some(d));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Local unitaries moving a contact to `|01>`.
#[derive(Debug, Clone)]
pub struct NormalForm {
    /// `(U_A^dagger ⊗ U_B^dagger) rho (U_A ⊗ U_B)`.
    pub rho_std: DensityMatrix,
    /// `U_A |0> = alpha`.
    pub u_a: ComplexMatrix,
    /// `U_B |1> = beta`.
    pub u_b: ComplexMatrix,
}

impl NormalForm {
    /// `<00| rho_std |11>`.
    pub fn coherence(&self) -> C64 {
        self.rho_std.matrix()[(0, 3)]
    }
}

fn check_datum(rho: &DensityMatrix, datum: &ProductNullDatum, tol: &Tolerances) -> Result<ProductNullDatum> {
    let fresh = ProductNullDatum::new(rho, &datum.alpha, &datum.beta)?;
    if fresh.residual > tol.eps_zero {
        return Err(Error::ResidualTooLarge(fresh.residual));
    }
    Ok(fresh)
}

pub fn normal_form(rho: &DensityMatrix, datum: &ProductNullDatum, tol: &Tolerances) -> Result<NormalForm> {
    if !rho.is_two_qubit() {
        return Err(Error::DimensionMismatch("normal form is defined on two qubits".into()));
    }
    let datum = check_datum(rho, datum, tol)?;
    let u_a = unitary_completion(&datum.alpha)?;
    let u_b = unitary_with_column(&datum.beta, 1)?;
    let rho_std = rho.transform(&u_a.adjoint().kron(&u_b.adjoint()))?;
    Ok(NormalForm { rho_std, u_a, u_b })
}

/// Evidence that a state is a filtered standard-form state.
#[derive(Debug, Clone)]
pub struct FilteredClassWitness {
    /// `M beta` with `M = (<alpha| ⊗ I) rho (|alpha_perp> ⊗ I)`.
    pub eta: Vec<C64>,
    pub alpha_perp: Vec<C64>,
    /// Trusted-side filter with `G^dagger |0> = eta`, `G^dagger |1> = beta`.
    pub g: ComplexMatrix,
    pub omega: DensityMatrix,
    /// `<00| omega |11>`.
    pub coherence: C64,
    /// `tr[(I ⊗ G) rho (I ⊗ G^dagger)]`.
    pub normalization: f64,
}

/// Builds the filter exposing the standard form, or `None` when `M beta`
/// vanishes (the boundary-scaling route does not apply; this is not a
/// separability claim).
pub fn recognize_filtered_class(
    rho: &DensityMatrix,
    datum: &ProductNullDatum,
    tol: &Tolerances,
) -> Result<Option<FilteredClassWitness>> {
    if !rho.is_two_qubit() {
        return Err(Error::DimensionMismatch("filtered class is defined on two qubits".into()));
    }
    let datum = check_datum(rho, datum, tol)?;
    let u_a = unitary_completion(&datum.alpha)?;
    let alpha_perp = u_a.column(1);
    let m = untrusted_block(rho, &datum.alpha, &alpha_perp)?;
    let eta = m.matvec(&datum.beta);
    if norm(&eta) <= tol.eps_zero {
        return Ok(None);
    }
    let mut g_dag = ComplexMatrix::zeros(2, 2);
    g_dag.set_column(0, &eta);
    g_dag.set_column(1, &datum.beta);
    let g = g_dag.adjoint();
    let filtered = &(&ComplexMatrix::identity(2).kron(&g) * rho.matrix()) * &ComplexMatrix::identity(2).kron(&g_dag);
    let normalization = filtered.trace().re;
    let omega = rho.transform(&u_a.adjoint().kron(&g))?;
    let coherence = omega.matrix()[(0, 3)];
    Ok(Some(FilteredClassWitness {
        eta,
        alpha_perp,
        g,
        omega,
        coherence,
        normalization,
    }))
}
