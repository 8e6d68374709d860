//! Entanglement and steering verdicts.

use crate::error::{Error, Result};
use crate::matcore::{
    eigh, inner, kron_vec, min_eigenvalue, norm, support_kernel_projectors, swap_parties,
    untrusted_block, ComplexMatrix, Cut, DensityMatrix, Tolerances, C64, ZERO,
};
use crate::nullspace::{find_boundary_contact, normal_form, ProductNullDatum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Steerability {
    Yes,
    No,
    Undetermined,
}

impl Steerability {
    pub fn as_str(self) -> &'static str {
        match self {
            Steerability::Yes => "yes",
            Steerability::No => "no",
            Steerability::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    ProductNull,
    SupportKernel,
    None,
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::ProductNull => "product-null",
            Mechanism::SupportKernel => "support-kernel",
            Mechanism::None => "none",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub npt: bool,
    pub min_pt_eigenvalue: f64,
    pub steerable_a_to_b: Steerability,
    pub steerable_b_to_a: Steerability,
    pub mechanism: Mechanism,
    /// Tangential coherence in the frame where the contact sits at `|01>`;
    /// the raw `<00|rho|11>` when no contact was found.
    pub coherence: C64,
    pub w_bd: Option<f64>,
    /// Boundary minor of the standard-form state, when a contact exists.
    pub boundary_minor: Option<f64>,
    pub contact: Option<ProductNullDatum>,
    pub support_kernel: Option<SupportKernelOutcome>,
}

/// Smallest eigenvalue of the partial transpose on the trusted side.
pub fn ppt_check(rho: &DensityMatrix, tol: &Tolerances) -> (bool, f64) {
    let min = min_eigenvalue(&rho.partial_transpose(Cut::Y)).expect("partial transpose is Hermitian");
    (min >= -tol.eps_psd, min)
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.is_two_qubit() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a two-qubit state, got {}x{}",
            rho.dims().0,
            rho.dims().1
        )))
    }
}

/// Determinant of the partial-transpose block on `span{|01>, |10>}` of a standard-form state.
pub fn boundary_minor(rho_std: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    require_two_qubit(rho_std)?;
    let m = rho_std.matrix();
    let leak = norm(&m.row(1));
    if leak > tol.eps_zero {
        return Err(Error::NotStandardForm(leak));
    }
    let pt = rho_std.partial_transpose(Cut::Y);
    Ok(pt[(1, 1)].re * pt[(2, 2)].re - pt[(1, 2)].norm_sqr())
}

/// `|rho_{00,11}|^2 - rho_{01,01} rho_{10,10}`.
pub fn w_bd(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho)?;
    let m = rho.matrix();
    Ok(m[(0, 3)].norm_sqr() - m[(1, 1)].re * m[(2, 2)].re)
}

/// `<00| rho |11>`.
pub fn tangential_coherence(rho: &DensityMatrix) -> Result<C64> {
    require_two_qubit(rho)?;
    Ok(rho.matrix()[(0, 3)])
}

/// `(1/4) [(XX - YY) - i (XY + YX)]` from Pauli correlators.
pub fn pauli_coherence(xx: f64, yy: f64, xy: f64, yx: f64) -> Result<C64> {
    for (name, v) in [("XX", xx), ("YY", yy), ("XY", xy), ("YX", yx)] {
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::InvalidParameter(format!("correlator {name} = {v} outside [-1, 1]")));
        }
    }
    Ok(C64::new(xx - yy, -(xy + yx)) * 0.25)
}

/// `(<XX>, <YY>, <XY>, <YX>)` of a two-qubit state.
pub fn pauli_correlators(rho: &DensityMatrix) -> Result<(f64, f64, f64, f64)> {
    require_two_qubit(rho)?;
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let y = ComplexMatrix::from_vec(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
        .expect("2x2");
    let ev = |a: &ComplexMatrix, b: &ComplexMatrix| (rho.matrix() * &a.kron(b)).trace().re;
    Ok((ev(&x, &x), ev(&y, &y), ev(&x, &y), ev(&y, &x)))
}

fn coherence_flag(c: C64, tol: &Tolerances) -> Steerability {
    if c.norm() > tol.eps_zero {
        Steerability::Yes
    } else {
        Steerability::No
    }
}

/// Two-qubit pipeline: contact search, normal form and tangential-coherence test in both directions.
pub fn product_null_verdict(rho: &DensityMatrix, tol: &Tolerances) -> Result<Verdict> {
    require_two_qubit(rho)?;
    let (is_ppt, min) = ppt_check(rho, tol);
    let w = w_bd(rho)?;
    let Some(datum) = find_boundary_contact(rho, tol)? else {
        return Ok(Verdict {
            npt: !is_ppt,
            min_pt_eigenvalue: min,
            steerable_a_to_b: Steerability::Undetermined,
            steerable_b_to_a: Steerability::Undetermined,
            mechanism: Mechanism::None,
            coherence: rho.matrix()[(0, 3)],
            w_bd: Some(w),
            boundary_minor: None,
            contact: None,
            support_kernel: None,
        });
    };
    let forward = normal_form(rho, &datum, tol)?;
    let backward = normal_form(&swap_parties(rho), &datum.swapped(), tol)?;
    Ok(Verdict {
        npt: !is_ppt,
        min_pt_eigenvalue: min,
        steerable_a_to_b: coherence_flag(forward.coherence(), tol),
        steerable_b_to_a: coherence_flag(backward.coherence(), tol),
        mechanism: Mechanism::ProductNull,
        coherence: forward.coherence(),
        w_bd: Some(w),
        boundary_minor: Some(boundary_minor(&forward.rho_std, tol)?),
        contact: Some(datum),
        support_kernel: None,
    })
}

/// Verdict for a general cut through the support-kernel criterion on a chosen untrusted pair.
///
/// Only the direction from the untrusted side to the trusted side is assessed.
pub fn support_kernel_verdict(
    rho: &DensityMatrix,
    alpha0: &[C64],
    alpha1: &[C64],
    tol: &Tolerances,
) -> Result<Verdict> {
    let (is_ppt, min) = ppt_check(rho, tol);
    let outcome = support_kernel_criterion(rho, alpha0, alpha1, tol)?;
    let fires = outcome.fires;
    Ok(Verdict {
        npt: !is_ppt,
        min_pt_eigenvalue: min,
        steerable_a_to_b: if fires { Steerability::Yes } else { Steerability::Undetermined },
        steerable_b_to_a: Steerability::Undetermined,
        mechanism: if fires { Mechanism::SupportKernel } else { Mechanism::None },
        coherence: outcome.decomposition.v,
        w_bd: if rho.is_two_qubit() { Some(w_bd(rho)?) } else { None },
        boundary_minor: None,
        contact: None,
        support_kernel: Some(outcome),
    })
}

/// The 2x2 untrusted block `[[A, B], [B^dagger, D]]` on `span{alpha0, alpha1}`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub d: ComplexMatrix,
    pub alpha0: Vec<C64>,
    pub alpha1: Vec<C64>,
    pub p_supp: ComplexMatrix,
    pub p_ker: ComplexMatrix,
    pub rank_a: usize,
    pub support_basis: Vec<Vec<C64>>,
    pub support_eigenvalues: Vec<f64>,
    /// `P_supp B P_ker`.
    pub coupling: ComplexMatrix,
    /// Leading singular pair of the coupling, when it is nonzero.
    pub phi: Option<Vec<C64>>,
    pub beta: Option<Vec<C64>>,
    /// `<phi| B |beta>`.
    pub v: C64,
}

impl BlockDecomposition {
    /// `sum_ij |alpha_i><alpha_j| ⊗ block_ij` on the full space.
    pub fn block_operator(&self) -> ComplexMatrix {
        let p = |u: &[C64], w: &[C64]| ComplexMatrix::outer(u, w);
        let terms = [
            p(&self.alpha0, &self.alpha0).kron(&self.a),
            p(&self.alpha0, &self.alpha1).kron(&self.b),
            p(&self.alpha1, &self.alpha0).kron(&self.b.adjoint()),
            p(&self.alpha1, &self.alpha1).kron(&self.d),
        ];
        terms.iter().skip(1).fold(terms[0].clone(), |acc, t| &acc + t)
    }

    /// Trace of the block, used as the scale for relative thresholds.
    pub fn scale(&self) -> f64 {
        self.a.trace().re + self.d.trace().re
    }
}

#[derive(Debug, Clone)]
pub struct SupportKernelOutcome {
    pub fires: bool,
    pub decomposition: BlockDecomposition,
    /// `-|v|^2`, the determinant of the partial transpose restricted to
    /// `span{alpha0 ⊗ conj(beta), alpha1 ⊗ conj(phi)}`.
    pub npt_minor: f64,
}

fn check_orthonormal(alpha0: &[C64], alpha1: &[C64], dx: usize, tol: &Tolerances) -> Result<()> {
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

/// Support-kernel criterion on the block of `span{alpha0, alpha1}`.
///
/// Fires when `A != 0`, `ker A != {0}` and `||P_supp B P_ker|| > eps_zero tr rho`.
pub fn support_kernel_criterion(
    rho: &DensityMatrix,
    alpha0: &[C64],
    alpha1: &[C64],
    tol: &Tolerances,
) -> Result<SupportKernelOutcome> {
    let (dx, dy) = rho.dims();
    check_orthonormal(alpha0, alpha1, dx, tol)?;
    if dy < 2 {
        return Err(Error::DimensionMismatch("trusted dimension must be at least 2".into()));
    }
    let a = untrusted_block(rho, alpha0, alpha0)?.hermitian_part();
    let b = untrusted_block(rho, alpha0, alpha1)?;
    let d = untrusted_block(rho, alpha1, alpha1)?.hermitian_part();
    let tr = rho.matrix().trace().re;

    let split = if a.trace().re > tol.eps_zero * tr {
        support_kernel_projectors(&a, tol).ok()
    } else {
        None
    };
    let (p_supp, p_ker, rank_a, support_basis, support_eigenvalues) = match split {
        Some(sk) => (sk.support, sk.kernel, sk.rank, sk.support_basis, sk.support_eigenvalues),
        None => (ComplexMatrix::zeros(dy, dy), ComplexMatrix::identity(dy), 0, vec![], vec![]),
    };
    let coupling = &(&p_supp * &b) * &p_ker;
    let mut decomposition = BlockDecomposition {
        a,
        b,
        d,
        alpha0: alpha0.to_vec(),
        alpha1: alpha1.to_vec(),
        p_supp,
        p_ker,
        rank_a,
        support_basis,
        support_eigenvalues,
        coupling,
        phi: None,
        beta: None,
        v: ZERO,
    };
    let fires = rank_a > 0 && rank_a < dy && decomposition.coupling.frobenius_norm() > tol.eps_zero * tr;
    let mut npt_minor = 0.0;
    if fires {
        let cc = &decomposition.coupling * &decomposition.coupling.adjoint();
        let phi = eigh(&cc)?.eigenvector(0);
        let cb = decomposition.coupling.adjoint().matvec(&phi);
        let nb = norm(&cb);
        let beta: Vec<C64> = cb.iter().map(|z| z / nb).collect();
        let v = decomposition.b.sandwich(&phi, &beta);
        npt_minor = -v.norm_sqr();
        decomposition.phi = Some(phi);
        decomposition.beta = Some(beta);
        decomposition.v = v;
    }
    Ok(SupportKernelOutcome {
        fires,
        decomposition,
        npt_minor,
    })
}

/// Determinant of the partial transpose restricted to `span{alpha0 ⊗ conj(beta), alpha1 ⊗ conj(phi)}`.
pub fn restricted_pt_minor(rho: &DensityMatrix, block: &BlockDecomposition) -> Option<f64> {
    let (phi, beta) = (block.phi.as_ref()?, block.beta.as_ref()?);
    let conj = |v: &[C64]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
    let basis = [kron_vec(&block.alpha0, &conj(beta)), kron_vec(&block.alpha1, &conj(phi))];
    let pt = rho.partial_transpose(Cut::Y);
    let m = pt.compress(&basis);
    Some((m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re)
}

/// Two-term product decomposition of a pure-contact block with vanishing coupling.
#[derive(Debug, Clone)]
pub struct PureContactDecomposition {
    pub a: f64,
    pub kappa: C64,
    pub phi: Vec<C64>,
    /// `sqrt(a) alpha0 + (conj(kappa)/sqrt(a)) alpha1`.
    pub eta: Vec<C64>,
    /// `D - (|kappa|^2 / a) |phi><phi|`.
    pub schur: ComplexMatrix,
    pub schur_min_eigenvalue: f64,
}

impl PureContactDecomposition {
    /// `|eta><eta| ⊗ |phi><phi| + |alpha1><alpha1| ⊗ S`.
    pub fn reconstruct(&self, alpha1: &[C64]) -> ComplexMatrix {
        &ComplexMatrix::projector(&self.eta).kron(&ComplexMatrix::projector(&self.phi))
            + &ComplexMatrix::projector(alpha1).kron(&self.schur)
    }
}

#[derive(Debug, Clone)]
pub enum PureContactOutcome {
    Separable(PureContactDecomposition),
    Coupled,
}

pub fn pure_contact_decomposition(block: &BlockDecomposition, tol: &Tolerances) -> Result<PureContactOutcome> {
    if block.rank_a != 1 {
        return Err(Error::NotPureContact(block.rank_a));
    }
    let scale = block.scale();
    if block.coupling.frobenius_norm() > tol.eps_zero * scale {
        return Ok(PureContactOutcome::Coupled);
    }
    let phi = block.support_basis[0].clone();
    let a = block.support_eigenvalues[0];
    let kappa = block.b.sandwich(&phi, &phi);
    let schur = &block.d - &ComplexMatrix::projector(&phi).scale_real(kappa.norm_sqr() / a);
    let schur_min = min_eigenvalue(&schur)?;
    if schur_min < -tol.eps_psd * scale {
        return Err(Error::NotPositive(schur_min));
    }
    let sa = a.sqrt();
    let eta = block
        .alpha0
        .iter()
        .zip(&block.alpha1)
        .map(|(x0, x1)| x0 * sa + x1 * (kappa.conj() / sa))
        .collect();
    Ok(PureContactOutcome::Separable(PureContactDecomposition {
        a,
        kappa,
        phi,
        eta,
        schur,
        schur_min_eigenvalue: schur_min,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{bell_mix, cholesky_branch, embed_trusted, from_h_block, werner, with_trusted_spectator, CholeskyParams, HBlockParams};
    use crate::matcore::{basis_vector, c, r};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn phi_plus() -> DensityMatrix {
        let s = 0.5f64.sqrt();
        DensityMatrix::pure(&[r(s), ZERO, ZERO, r(s)], (2, 2)).unwrap()
    }

    fn e(n: usize, k: usize) -> Vec<C64> {
        basis_vector(n, k)
    }

    #[test]
    fn ppt_on_reference_states() {
        let (ppt, min) = ppt_check(&phi_plus(), &tol());
        assert!(!ppt && (min + 0.5).abs() < 1e-14);
        assert!(ppt_check(&bell_mix(0.4, 0.4, 0.2).unwrap(), &tol()).0);
        let p = HBlockParams { h00: 1.0, h11: 0.5, h22: 0.8, h01: c(0.1, 0.3), h02: ZERO, h12: c(-0.2, 0.4) };
        assert!(ppt_check(&from_h_block(&p).unwrap(), &tol()).0);
    }

    #[test]
    fn boundary_minor_values() {
        let m = boundary_minor(&bell_mix(0.5, 0.3, 0.2).unwrap(), &tol()).unwrap();
        assert!((m + 0.01).abs() < 1e-15);
        let p = HBlockParams { h00: 1.0, h11: 0.5, h22: 0.8, h01: ZERO, h02: ZERO, h12: r(0.2) };
        assert_eq!(boundary_minor(&from_h_block(&p).unwrap(), &tol()).unwrap(), 0.0);
        let (rho, _) = cholesky_branch(&CholeskyParams::new(1.0, 1.0, 1.0, ZERO, ZERO, r(0.5))).unwrap();
        assert!((boundary_minor(&rho, &tol()).unwrap() + (2.0f64 / 13.0).powi(2)).abs() < 1e-15);
        assert!(matches!(
            boundary_minor(&DensityMatrix::maximally_mixed((2, 2)), &tol()),
            Err(Error::NotStandardForm(_))
        ));
    }

    #[test]
    fn witness_values() {
        assert!((w_bd(&bell_mix(0.5, 0.3, 0.2).unwrap()).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(w_bd(&DensityMatrix::maximally_mixed((2, 2))).unwrap(), -1.0 / 16.0);
        let w = w_bd(&werner(0.45).unwrap()).unwrap();
        // coherence vanishes for the singlet mixture; the populations make W negative
        assert!(w < 0.0);
    }

    #[test]
    fn pauli_and_direct_coherence_agree() {
        let (xx, yy, xy, yx) = pauli_correlators(&phi_plus()).unwrap();
        assert!((xx - 1.0).abs() < 1e-15 && (yy + 1.0).abs() < 1e-15);
        assert!((pauli_coherence(xx, yy, xy, yx).unwrap() - r(0.5)).norm() < 1e-15);
        assert!((tangential_coherence(&phi_plus()).unwrap() - r(0.5)).norm() < 1e-15);
        let rho = DensityMatrix::pure(&[r(0.6), ZERO, ZERO, c(0.0, 0.8)], (2, 2)).unwrap();
        let (xx, yy, xy, yx) = pauli_correlators(&rho).unwrap();
        let pc = pauli_coherence(xx, yy, xy, yx).unwrap();
        assert!((pc - tangential_coherence(&rho).unwrap()).norm() < 1e-15);
        assert!(pauli_coherence(1.5, 0.0, 0.0, 0.0).is_err());
        let prod = DensityMatrix::pure(&e(4, 0), (2, 2)).unwrap();
        assert_eq!(tangential_coherence(&prod).unwrap(), ZERO);
    }

    #[test]
    fn verdicts_on_reference_states() {
        let (rho, _) = cholesky_branch(&CholeskyParams::new(1.0, 1.0, 1.0, ZERO, ZERO, r(0.5))).unwrap();
        let v = product_null_verdict(&rho, &tol()).unwrap();
        assert!(v.npt);
        assert_eq!((v.steerable_a_to_b, v.steerable_b_to_a), (Steerability::Yes, Steerability::Yes));
        assert_eq!(v.mechanism, Mechanism::ProductNull);

        let v = product_null_verdict(&werner(0.45).unwrap(), &tol()).unwrap();
        assert!(v.npt);
        assert_eq!(v.mechanism, Mechanism::None);
        assert_eq!(v.steerable_a_to_b, Steerability::Undetermined);

        let v = product_null_verdict(&bell_mix(0.4, 0.4, 0.2).unwrap(), &tol()).unwrap();
        assert!(!v.npt);
        assert_eq!((v.steerable_a_to_b, v.steerable_b_to_a), (Steerability::No, Steerability::No));
    }

    #[test]
    fn support_kernel_on_two_qubit_standard_family() {
        let p = HBlockParams { h00: 1.0, h11: 0.5, h22: 0.8, h01: c(0.1, 0.0), h02: c(0.2, -0.1), h12: r(0.1) };
        let rho = from_h_block(&p).unwrap();
        let out = support_kernel_criterion(&rho, &e(2, 0), &e(2, 1), &tol()).unwrap();
        assert!(out.fires);
        assert!((out.decomposition.v.norm() - p.h02.norm() / p.trace()).abs() < 1e-14);
        assert!((out.npt_minor - restricted_pt_minor(&rho, &out.decomposition).unwrap()).abs() < 1e-14);

        let p0 = HBlockParams { h02: ZERO, ..p };
        let out = support_kernel_criterion(&from_h_block(&p0).unwrap(), &e(2, 0), &e(2, 1), &tol()).unwrap();
        assert!(!out.fires);
    }

    #[test]
    fn support_kernel_on_embedding() {
        let p = HBlockParams { h00: 1.0, h11: 0.5, h22: 0.8, h01: c(0.1, 0.0), h02: c(0.2, -0.1), h12: r(0.1) };
        let rho = embed_trusted(&from_h_block(&p).unwrap(), 3).unwrap();
        let out = support_kernel_criterion(&rho, &e(2, 0), &e(2, 1), &tol()).unwrap();
        assert!(out.fires);
        assert!((out.decomposition.v.norm() - p.h02.norm() / p.trace()).abs() < 1e-14);
        assert!(min_eigenvalue(&rho.partial_transpose(Cut::Y)).unwrap() < -tol().eps_psd);
        let v = support_kernel_verdict(&rho, &e(2, 0), &e(2, 1), &tol()).unwrap();
        assert_eq!(v.mechanism, Mechanism::SupportKernel);
    }

    #[test]
    fn support_kernel_never_fires_with_full_rank_spectator() {
        let tau = ComplexMatrix::diag_real(&[0.7, 0.3]);
        let rho = with_trusted_spectator(&werner(0.45).unwrap(), &tau).unwrap();
        for (a0, a1) in [
            (e(2, 0), e(2, 1)),
            (vec![r(0.6), c(0.0, 0.8)], vec![c(0.0, 0.8), r(0.6)]),
        ] {
            assert!(!support_kernel_criterion(&rho, &a0, &a1, &tol()).unwrap().fires);
        }
    }

    #[test]
    fn support_kernel_rejects_non_orthonormal_pair() {
        let rho = DensityMatrix::maximally_mixed((2, 2));
        let a1 = vec![r(0.6), r(0.8)];
        assert!(matches!(
            support_kernel_criterion(&rho, &e(2, 0), &a1, &tol()),
            Err(Error::NotOrthonormal(_))
        ));
    }

    fn pure_contact_block(a: f64, kappa: C64, d: ComplexMatrix, phi: &[C64]) -> BlockDecomposition {
        let n = phi.len();
        let p = ComplexMatrix::projector(phi);
        let alpha0 = e(2, 0);
        let alpha1 = e(2, 1);
        let full = &(&ComplexMatrix::outer(&alpha0, &alpha0).kron(&p.scale_real(a))
            + &ComplexMatrix::outer(&alpha0, &alpha1).kron(&p.scale(kappa)))
            + &(&ComplexMatrix::outer(&alpha1, &alpha0).kron(&p.scale(kappa.conj()))
                + &ComplexMatrix::outer(&alpha1, &alpha1).kron(&d));
        let tr = full.trace().re;
        let rho = DensityMatrix::new_unchecked(full.scale_real(1.0 / tr), (2, n));
        let mut out = support_kernel_criterion(&rho, &alpha0, &alpha1, &tol()).unwrap().decomposition;
        // undo normalization for exact comparisons
        out.a = out.a.scale_real(tr);
        out.b = out.b.scale_real(tr);
        out.d = out.d.scale_real(tr);
        out.coupling = out.coupling.scale_real(tr);
        out.support_eigenvalues = out.support_eigenvalues.iter().map(|v| v * tr).collect();
        out
    }

    #[test]
    fn pure_contact_with_zero_kappa() {
        let phi = e(2, 0);
        let d = ComplexMatrix::diag_real(&[0.3, 0.5]);
        let block = pure_contact_block(1.0, ZERO, d.clone(), &phi);
        let PureContactOutcome::Separable(dec) = pure_contact_decomposition(&block, &tol()).unwrap() else {
            panic!("expected a decomposition");
        };
        assert!(dec.schur.approx_eq(&d, 1e-14));
        assert!(dec.reconstruct(&block.alpha1).approx_eq(&block.block_operator(), 1e-14));
    }

    #[test]
    fn pure_contact_schur_term() {
        // a = 1, kappa = 1/2, D = |phi><phi|: Schur term (3/4)|phi><phi|
        let phi = vec![r(0.6), c(0.0, 0.8)];
        let block = pure_contact_block(1.0, r(0.5), ComplexMatrix::projector(&phi), &phi);
        let PureContactOutcome::Separable(dec) = pure_contact_decomposition(&block, &tol()).unwrap() else {
            panic!("expected a decomposition");
        };
        assert!(dec.schur.approx_eq(&ComplexMatrix::projector(&phi).scale_real(0.75), 1e-14));
        assert!(dec.reconstruct(&block.alpha1).approx_eq(&block.block_operator(), 1e-14));
        assert!(dec.schur_min_eigenvalue > -1e-14);
    }

    #[test]
    fn pure_contact_reports_coupling() {
        let p = HBlockParams { h00: 1.0, h11: 0.5, h22: 0.8, h01: ZERO, h02: r(0.3), h12: ZERO };
        let rho = from_h_block(&p).unwrap();
        let out = support_kernel_criterion(&rho, &e(2, 0), &e(2, 1), &tol()).unwrap();
        assert!(out.fires);
        assert!(matches!(pure_contact_decomposition(&out.decomposition, &tol()).unwrap(), PureContactOutcome::Coupled));
        let mixed = support_kernel_criterion(&DensityMatrix::maximally_mixed((2, 2)), &e(2, 0), &e(2, 1), &tol()).unwrap();
        assert!(matches!(pure_contact_decomposition(&mixed.decomposition, &tol()), Err(Error::NotPureContact(2))));
    }
}
