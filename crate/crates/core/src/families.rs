//! Parametrized product-null state families.
//!
//! All standard representatives annihilate `|01>`; the 3x3 block `H` lives on
//! `span{|00>, |10>, |11>}` in that order.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::matcore::{
    eigh, r, unitary_completion, unitary_with_column, ComplexMatrix,
    DensityMatrix, Tolerances, C64, ZERO,
};

/// Indices of `|00>, |10>, |11>` in the two-qubit basis.
pub const SUPPORT_INDICES: [usize; 3] = [0, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HBlockParams {
    pub h00: f64,
    pub h11: f64,
    pub h22: f64,
    pub h01: C64,
    pub h02: C64,
    pub h12: C64,
}

impl HBlockParams {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(3, 3);
        h[(0, 0)] = r(self.h00);
        h[(1, 1)] = r(self.h11);
        h[(2, 2)] = r(self.h22);
        h[(0, 1)] = self.h01;
        h[(1, 0)] = self.h01.conj();
        h[(0, 2)] = self.h02;
        h[(2, 0)] = self.h02.conj();
        h[(1, 2)] = self.h12;
        h[(2, 1)] = self.h12.conj();
        h
    }

    pub fn from_matrix(h: &ComplexMatrix) -> Self {
        Self {
            h00: h[(0, 0)].re,
            h11: h[(1, 1)].re,
            h22: h[(2, 2)].re,
            h01: h[(0, 1)],
            h02: h[(0, 2)],
            h12: h[(1, 2)],
        }
    }

    /// `H = L L^dagger` for the lower-triangular Cholesky chart.
    pub fn from_cholesky(p: &CholeskyParams) -> Self {
        Self::from_matrix(&(&p.lower() * &p.lower().adjoint()))
    }

    pub fn trace(&self) -> f64 {
        self.h00 + self.h11 + self.h22
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CholeskyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl CholeskyParams {
    pub fn new(a: f64, b: f64, c: f64, x: C64, y: C64, z: C64) -> Self {
        Self { a, b, c, x, y, z }
    }

    /// `L = [[a,0,0],[x,b,0],[z,y,c]]`.
    pub fn lower(&self) -> ComplexMatrix {
        let mut l = ComplexMatrix::zeros(3, 3);
        l[(0, 0)] = r(self.a);
        l[(1, 0)] = self.x;
        l[(1, 1)] = r(self.b);
        l[(2, 0)] = self.z;
        l[(2, 1)] = self.y;
        l[(2, 2)] = r(self.c);
        l
    }

    pub fn normalization(&self) -> f64 {
        self.a * self.a
            + self.b * self.b
            + self.c * self.c
            + self.x.norm_sqr()
            + self.y.norm_sqr()
            + self.z.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub nu: [f64; 3],
    /// `theta12, theta13, theta23` in `[0, pi/2]`.
    pub theta: [f64; 3],
    /// `phi12, phi13, phi23` in `[0, 2pi)`.
    pub phi: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementParams {
    pub theta_a: f64,
    pub phi_a: f64,
    pub theta_b: f64,
    pub phi_b: f64,
}

impl PlacementParams {
    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>` for each party.
    pub fn vectors(&self) -> (Vec<C64>, Vec<C64>) {
        (
            bloch_ket(self.theta_a, self.phi_a),
            bloch_ket(self.theta_b, self.phi_b),
        )
    }

    fn validate(&self) -> Result<()> {
        for (name, t) in [("theta_a", self.theta_a), ("theta_b", self.theta_b)] {
            if !(0.0..=PI).contains(&t) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, pi]")));
            }
        }
        for (name, p) in [("phi_a", self.phi_a), ("phi_b", self.phi_b)] {
            if !(0.0..2.0 * PI).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 2pi)")));
            }
        }
        Ok(())
    }
}

pub fn bloch_ket(theta: f64, phi: f64) -> Vec<C64> {
    vec![
        r((theta / 2.0).cos()),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Local placement of a standard representative.
#[derive(Debug, Clone)]
pub enum Placement {
    Identity,
    Angles(PlacementParams),
    /// `U_A` on the untrusted side, `U_B` on the trusted side.
    Unitaries(ComplexMatrix, ComplexMatrix),
}

impl Placement {
    pub fn unitaries(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        match self {
            Placement::Identity => Ok((ComplexMatrix::identity(2), ComplexMatrix::identity(2))),
            Placement::Angles(p) => {
                p.validate()?;
                let (alpha, beta) = p.vectors();
                Ok((unitary_completion(&alpha)?, unitary_with_column(&beta, 1)?))
            }
            Placement::Unitaries(ua, ub) => {
                let tol = Tolerances::default();
                for u in [ua, ub] {
                    if u.rows() != 2 || u.cols() != 2 {
                        return Err(Error::DimensionMismatch("placement unitaries must be 2x2".into()));
                    }
                    let d = (&(&u.adjoint() * u) - &ComplexMatrix::identity(2)).frobenius_norm();
                    if d > tol.eps_eq.max(1e-12) {
                        return Err(Error::InvalidParameter(format!(
                            "placement matrix is not unitary (defect {d:.2e})"
                        )));
                    }
                }
                Ok((ua.clone(), ub.clone()))
            }
        }
    }
}

fn embed_h(h: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (i, &ii) in SUPPORT_INDICES.iter().enumerate() {
        for (j, &jj) in SUPPORT_INDICES.iter().enumerate() {
            m[(ii, jj)] = h[(i, j)] * scale;
        }
    }
    m
}

/// Standard product-null state `rho = embed(H) / tr H`.
pub fn from_h_block(p: &HBlockParams) -> Result<DensityMatrix> {
    let tol = Tolerances::default();
    let h = p.matrix();
    if h.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let tr = p.trace();
    if !(tr > 0.0) {
        return Err(Error::ZeroTrace(tr));
    }
    let min = eigh(&h)?.min();
    if min < -tol.eps_psd * tr {
        return Err(Error::NotPositive(min));
    }
    Ok(DensityMatrix::new_unchecked(embed_h(&h, 1.0 / tr), (2, 2)))
}

/// Rank-three Cholesky branch; returns the state and `h02 / N = a conj(z) / N`.
pub fn cholesky_branch(p: &CholeskyParams) -> Result<(DensityMatrix, C64)> {
    for (name, v) in [("a", p.a), ("b", p.b), ("c", p.c)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let l = p.lower();
    let h = &l * &l.adjoint();
    let n = p.normalization();
    let rho = DensityMatrix::new_unchecked(embed_h(&h, 1.0 / n), (2, 2));
    Ok((rho, p.z.conj() * (p.a / n)))
}

/// `R_ij(theta, phi)` acting on the coordinate plane `(i, j)` of C^3.
pub fn plane_rotation(i: usize, j: usize, theta: f64, phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(3);
    let (s, co) = theta.sin_cos();
    m[(i, i)] = r(co);
    m[(j, j)] = r(co);
    m[(i, j)] = C64::from_polar(s, phi);
    m[(j, i)] = -C64::from_polar(s, -phi);
    m
}

impl SpectralParams {
    fn validate(&self) -> Result<()> {
        if self.nu.iter().any(|&v| !(v > 0.0)) || (self.nu.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "spectral weights must be positive and sum to 1".into(),
            ));
        }
        if self.theta.iter().any(|t| !(0.0..=FRAC_PI_2).contains(t)) {
            return Err(Error::InvalidParameter("rotation angles must lie in [0, pi/2]".into()));
        }
        if self.phi.iter().any(|p| !(0.0..2.0 * PI).contains(p)) {
            return Err(Error::InvalidParameter("phases must lie in [0, 2pi)".into()));
        }
        Ok(())
    }

    /// `V = R23 R13 R12` with each column rephased so that `V[0][k]` is real nonnegative.
    pub fn eigenbasis(&self) -> ComplexMatrix {
        let r12 = plane_rotation(0, 1, self.theta[0], self.phi[0]);
        let r13 = plane_rotation(0, 2, self.theta[1], self.phi[1]);
        let r23 = plane_rotation(1, 2, self.theta[2], self.phi[2]);
        let mut v = &(&r23 * &r13) * &r12;
        for k in 0..3 {
            let lead = v[(0, k)];
            if lead.norm() > 0.0 {
                let ph = lead.conj() / lead.norm();
                for i in 0..3 {
                    v[(i, k)] *= ph;
                }
                v[(0, k)] = r(v[(0, k)].norm());
            }
        }
        v
    }
}

/// Spectral branch `sum_k nu_k |phi_k><phi_k|`; returns the state and
/// `C03 = sum_k nu_k V[0][k] conj(V[2][k])`.
pub fn spectral_branch(p: &SpectralParams) -> Result<(DensityMatrix, C64)> {
    p.validate()?;
    let v = p.eigenbasis();
    let mut h = ComplexMatrix::zeros(3, 3);
    for k in 0..3 {
        let col = v.column(k);
        h = &h + &ComplexMatrix::projector(&col).scale_real(p.nu[k]);
    }
    let c03 = (0..3).map(|k| v[(0, k)] * v[(2, k)].conj() * p.nu[k]).sum();
    Ok((DensityMatrix::new_unchecked(embed_h(&h, 1.0), (2, 2)), c03))
}

/// X-type section of the Cholesky branch (`x = y = 0`).
pub fn x_family(a: f64, b: f64, c_: f64, z: C64) -> Result<DensityMatrix> {
    cholesky_branch(&CholeskyParams::new(a, b, c_, ZERO, ZERO, z)).map(|(rho, _)| rho)
}

fn check_simplex(w: &[f64]) -> Result<()> {
    if w.iter().any(|&v| !(v > 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "weights must be positive and sum to 1".into(),
        ));
    }
    Ok(())
}

/// `p |Phi+><Phi+| + q |Phi-><Phi-| + r |10><10|`, built entrywise.
pub fn bell_mix(p: f64, q: f64, r_: f64) -> Result<DensityMatrix> {
    check_simplex(&[p, q, r_])?;
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = r((p + q) / 2.0);
    m[(3, 3)] = r((p + q) / 2.0);
    m[(0, 3)] = r((p - q) / 2.0);
    m[(3, 0)] = r((p - q) / 2.0);
    m[(2, 2)] = r(r_);
    Ok(DensityMatrix::new_unchecked(m, (2, 2)))
}

/// `p|00><00| + q|10><10| + r|phi><phi|` with `|phi> = cos(theta)|00> + e^{i phi} sin(theta)|11>`.
pub fn two_product_one_entangled(p: f64, q: f64, r_: f64, theta: f64, phi: f64) -> Result<DensityMatrix> {
    check_simplex(&[p, q, r_])?;
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::InvalidParameter("theta must lie in (0, pi/2)".into()));
    }
    let ent = [r(theta.cos()), ZERO, ZERO, C64::from_polar(theta.sin(), phi)];
    let mut m = ComplexMatrix::projector(&ent).scale_real(r_);
    m[(0, 0)] += r(p);
    m[(2, 2)] += r(q);
    Ok(DensityMatrix::new_unchecked(m, (2, 2)))
}

/// `(U_A ⊗ G U_B) rho0 (U_A ⊗ G U_B)^dagger`, renormalized.
///
/// A null vector `|a>|b>` of `rho0` maps to `U_A|a> ⊗ (G^dagger)^{-1} U_B|b>`.
pub fn place_and_filter(
    rho0: &DensityMatrix,
    placement: &Placement,
    filter: Option<&ComplexMatrix>,
) -> Result<DensityMatrix> {
    if !rho0.is_two_qubit() {
        return Err(Error::DimensionMismatch("place_and_filter expects two qubits".into()));
    }
    let (ua, ub) = placement.unitaries()?;
    let trusted = match filter {
        Some(g) => {
            if g.rows() != 2 || g.cols() != 2 {
                return Err(Error::DimensionMismatch("filter must be 2x2".into()));
            }
            if g.determinant().norm() <= Tolerances::default().eps_zero {
                return Err(Error::Singular);
            }
            g * &ub
        }
        None => ub,
    };
    rho0.transform(&ua.kron(&trusted))
}

/// Image of the standard null vector `|01>` under [`place_and_filter`].
pub fn placed_null_vector(placement: &Placement, filter: Option<&ComplexMatrix>) -> Result<(Vec<C64>, Vec<C64>)> {
    let (ua, ub) = placement.unitaries()?;
    let alpha = ua.column(0);
    let mut beta = ub.column(1);
    if let Some(g) = filter {
        beta = g.adjoint().inverse()?.matvec(&beta);
    }
    Ok((alpha, beta))
}

/// Werner state `v |psi-><psi-| + (1 - v) I/4`.
pub fn werner(v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter("Werner visibility must lie in [0, 1]".into()));
    }
    let s = 0.5f64.sqrt();
    let singlet = [ZERO, r(s), r(-s), ZERO];
    let m = &ComplexMatrix::projector(&singlet).scale_real(v)
        + &ComplexMatrix::identity(4).scale_real((1.0 - v) / 4.0);
    Ok(DensityMatrix::new_unchecked(m, (2, 2)))
}

/// Pads the trusted factor to dimension `dy` with unpopulated levels.
pub fn embed_trusted(rho: &DensityMatrix, dy: usize) -> Result<DensityMatrix> {
    let (dx, dy0) = rho.dims();
    if dy < dy0 {
        return Err(Error::DimensionMismatch(format!("cannot embed dimension {dy0} into {dy}")));
    }
    let m = ComplexMatrix::from_fn(dx * dy, dx * dy, |i, j| {
        let (x, y, xp, yp) = (i / dy, i % dy, j / dy, j % dy);
        if y < dy0 && yp < dy0 {
            rho.entry(x, y, xp, yp)
        } else {
            ZERO
        }
    });
    Ok(DensityMatrix::new_unchecked(m, (dx, dy)))
}

/// `rho ⊗ tau` with the spectator appended to the trusted side.
pub fn with_trusted_spectator(rho: &DensityMatrix, tau: &ComplexMatrix) -> Result<DensityMatrix> {
    let tol = Tolerances::default();
    let (dx, dy) = rho.dims();
    let n = tau.rows();
    let tau = DensityMatrix::from_unnormalized(tau.clone(), (1, n), &tol)?;
    Ok(DensityMatrix::new_unchecked(
        rho.matrix().kron(tau.matrix()),
        (dx, dy * n),
    ))
}

/// Named family with its parameters, as read from flat parameter files.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    HBlock(HBlockParams),
    Cholesky(CholeskyParams),
    Spectral(SpectralParams),
    XFamily { a: f64, b: f64, c: f64, z: C64 },
    BellMix { p: f64, q: f64, r: f64 },
    TwoProductOneEntangled { p: f64, q: f64, r: f64, theta: f64, phi: f64 },
    Werner { v: f64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            FamilySpec::HBlock(p) => from_h_block(p),
            FamilySpec::Cholesky(p) => cholesky_branch(p).map(|(rho, _)| rho),
            FamilySpec::Spectral(p) => spectral_branch(p).map(|(rho, _)| rho),
            FamilySpec::XFamily { a, b, c, z } => x_family(*a, *b, *c, *z),
            FamilySpec::BellMix { p, q, r } => bell_mix(*p, *q, *r),
            FamilySpec::TwoProductOneEntangled { p, q, r, theta, phi } => {
                two_product_one_entangled(*p, *q, *r, *theta, *phi)
            }
            FamilySpec::Werner { v } => werner(*v),
        }
    }

    /// Closed-form tangential coherence `<00|rho|11>` where the family provides one.
    pub fn analytic_coherence(&self) -> Option<C64> {
        match self {
            FamilySpec::HBlock(p) => Some(p.h02 / p.trace()),
            FamilySpec::Cholesky(p) => Some(p.z.conj() * (p.a / p.normalization())),
            FamilySpec::Spectral(p) => spectral_branch(p).ok().map(|(_, c03)| c03),
            FamilySpec::XFamily { a, b, c: cc, z } => {
                Some(z.conj() * (a / (a * a + b * b + cc * cc + z.norm_sqr())))
            }
            FamilySpec::BellMix { p, q, .. } => Some(r((p - q) / 2.0)),
            FamilySpec::TwoProductOneEntangled { r: w, theta, phi, .. } => {
                Some(C64::from_polar(w * theta.cos() * theta.sin(), -phi))
            }
            FamilySpec::Werner { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{basis_vector, c, kron_vec, min_eigenvalue, norm, Cut};

    fn ket01() -> Vec<C64> {
        basis_vector(4, 1)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn rank_one_h_block() {
        let p = HBlockParams { h00: 1.0, h11: 0.0, h22: 0.0, h01: ZERO, h02: ZERO, h12: ZERO };
        let rho = from_h_block(&p).unwrap();
        assert_eq!(rho.matrix(), &ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn diagonal_h_block() {
        let p = HBlockParams { h00: 1.0, h11: 1.0, h22: 1.0, h01: ZERO, h02: ZERO, h12: ZERO };
        let rho = from_h_block(&p).unwrap();
        let third = 1.0 / 3.0;
        assert!(rho.matrix().approx_eq(&ComplexMatrix::diag_real(&[third, 0.0, third, third]), 1e-16));
    }

    #[test]
    fn h_block_rank_matches_state_rank() {
        let t = tol();
        let g = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64 + 0.5, j as f64 - 0.3 * i as f64));
        let h = &g * &g.adjoint();
        let rho = from_h_block(&HBlockParams::from_matrix(&h)).unwrap();
        let rank = |m: &ComplexMatrix| {
            let s = eigh(m).unwrap();
            let tr = m.trace().re;
            s.eigenvalues.iter().filter(|&&v| v > t.eps_zero * tr).count()
        };
        assert_eq!(rank(rho.matrix()), 2);
        assert_eq!(rank(&h), 2);
        assert!(norm(&rho.matrix().matvec(&ket01())) < 1e-15);
    }

    #[test]
    fn indefinite_h_block_is_rejected() {
        let p = HBlockParams { h00: 1.0, h11: 1.0, h22: 1.0, h01: ZERO, h02: r(2.0), h12: ZERO };
        assert!(matches!(from_h_block(&p), Err(Error::NotPositive(_))));
    }

    #[test]
    fn cholesky_z_zero_is_diagonal() {
        let (rho, h02) = cholesky_branch(&CholeskyParams::new(1.0, 1.0, 1.0, ZERO, ZERO, ZERO)).unwrap();
        let third = 1.0 / 3.0;
        assert!(rho.matrix().approx_eq(&ComplexMatrix::diag_real(&[third, 0.0, third, third]), 1e-16));
        assert_eq!(h02, ZERO);
        assert!(min_eigenvalue(&rho.partial_transpose(Cut::Y)).unwrap() >= -tol().eps_psd);
    }

    #[test]
    fn cholesky_known_coherence() {
        // N = 3 + 1/4 = 13/4, <00|rho|11> = (1/2)/(13/4) = 2/13
        let (rho, h02) = cholesky_branch(&CholeskyParams::new(1.0, 1.0, 1.0, ZERO, ZERO, r(0.5))).unwrap();
        assert!((rho.matrix()[(0, 3)] - r(2.0 / 13.0)).norm() < 1e-16);
        assert!((h02 - r(2.0 / 13.0)).norm() < 1e-16);
        assert!(min_eigenvalue(&rho.partial_transpose(Cut::Y)).unwrap() < -tol().eps_psd);
    }

    #[test]
    fn cholesky_rejects_nonpositive_scale() {
        assert!(cholesky_branch(&CholeskyParams::new(0.0, 1.0, 1.0, ZERO, ZERO, ZERO)).is_err());
        assert!(cholesky_branch(&CholeskyParams::new(1.0, -1.0, 1.0, ZERO, ZERO, ZERO)).is_err());
    }

    #[test]
    fn spectral_identity_chart() {
        let p = SpectralParams { nu: [0.5, 0.3, 0.2], theta: [0.0; 3], phi: [0.0; 3] };
        let (rho, c03) = spectral_branch(&p).unwrap();
        assert_eq!(c03, ZERO);
        assert!(rho.matrix().approx_eq(&ComplexMatrix::diag_real(&[0.5, 0.0, 0.3, 0.2]), 1e-16));
    }

    #[test]
    fn spectral_single_rotation_coherence() {
        // R13(pi/4, 0): C03 = sin cos (nu3 - nu1) = -1/8
        let p = SpectralParams {
            nu: [0.5, 0.25, 0.25],
            theta: [0.0, std::f64::consts::FRAC_PI_4, 0.0],
            phi: [0.0; 3],
        };
        let (rho, c03) = spectral_branch(&p).unwrap();
        assert!((c03 - r(-0.125)).norm() < 1e-15);
        assert!((rho.matrix()[(0, 3)] - c03).norm() < 1e-15);
        let p = SpectralParams { phi: [0.0, 1.1, 0.0], ..p };
        let (rho, c03) = spectral_branch(&p).unwrap();
        assert!((rho.matrix()[(0, 3)] - c03).norm() < 1e-15);
    }

    #[test]
    fn spectral_rejects_off_simplex() {
        let p = SpectralParams { nu: [0.5, 0.3, 0.3], theta: [0.0; 3], phi: [0.0; 3] };
        assert!(spectral_branch(&p).is_err());
    }

    #[test]
    fn x_family_matches_cholesky_section() {
        let x = x_family(1.0, 1.0, 1.0, r(0.5)).unwrap();
        let (ch, _) = cholesky_branch(&CholeskyParams::new(1.0, 1.0, 1.0, ZERO, ZERO, r(0.5))).unwrap();
        assert_eq!(x, ch);
        let z = c(0.3, -0.7);
        let x = x_family(0.7, 1.2, 0.4, z).unwrap();
        let expected = z.conj() * (0.7 / (0.49 + 1.44 + 0.16 + z.norm_sqr()));
        assert!((x.matrix()[(0, 3)] - expected).norm() < 1e-16);
        assert!(x_family(1.0, 1.0, 0.0, z).is_err());
    }

    #[test]
    fn bell_mix_entries() {
        let rho = bell_mix(0.5, 0.3, 0.2).unwrap();
        assert_eq!(rho.matrix()[(0, 3)], r((0.5 - 0.3) / 2.0));
        assert!((rho.matrix()[(0, 3)].re - 0.1).abs() < 1e-16);
        let rho = bell_mix(0.4, 0.4, 0.2).unwrap();
        assert_eq!(rho.matrix()[(0, 3)], ZERO);
        assert!(min_eigenvalue(&rho.partial_transpose(Cut::Y)).unwrap() >= -1e-15);
        assert!(bell_mix(0.6, 0.4, 0.0).is_err());
    }

    #[test]
    fn two_product_one_entangled_coherence() {
        let third = 1.0 / 3.0;
        let rho = two_product_one_entangled(third, third, third, std::f64::consts::FRAC_PI_4, 0.0).unwrap();
        assert!((rho.matrix()[(0, 3)] - r(1.0 / 6.0)).norm() < 1e-15);
        let rho = two_product_one_entangled(third, third, third, std::f64::consts::FRAC_PI_4, FRAC_PI_2).unwrap();
        let coh = rho.matrix()[(0, 3)];
        assert!(coh.re.abs() < 1e-15);
        assert!((coh.norm() - 1.0 / 6.0).abs() < 1e-15);
        assert!(two_product_one_entangled(third, third, third, 0.0, 0.0).is_err());
    }

    #[test]
    fn identity_placement_returns_input() {
        let (rho, _) = cholesky_branch(&CholeskyParams::new(1.0, 0.5, 2.0, c(0.1, 0.2), r(-0.3), r(0.5))).unwrap();
        let out = place_and_filter(&rho, &Placement::Identity, None).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));
    }

    #[test]
    fn filter_moves_null_vector() {
        let (rho, _) = cholesky_branch(&CholeskyParams::new(1.0, 0.5, 2.0, c(0.1, 0.2), r(-0.3), r(0.5))).unwrap();
        let g = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let out = place_and_filter(&rho, &Placement::Identity, Some(&g)).unwrap();
        // kernel recomputation: |0> ⊗ |1>/2 is annihilated
        let v = kron_vec(&[r(1.0), ZERO], &[ZERO, r(0.5)]);
        assert!(norm(&out.matrix().matvec(&v)) < 1e-15);
        let (a, b) = placed_null_vector(&Placement::Identity, Some(&g)).unwrap();
        assert!((b[1] - r(0.5)).norm() < 1e-15 && a[0] == r(1.0));
    }

    #[test]
    fn angle_placement_null_vector() {
        let (rho, _) = cholesky_branch(&CholeskyParams::new(1.0, 0.5, 2.0, c(0.1, 0.2), r(-0.3), r(0.5))).unwrap();
        let pl = Placement::Angles(PlacementParams { theta_a: 1.0, phi_a: 0.3, theta_b: 2.0, phi_b: 4.0 });
        let g = ComplexMatrix::from_vec(2, 2, vec![r(1.0), c(0.2, 0.1), r(0.0), r(1.5)]).unwrap();
        let out = place_and_filter(&rho, &pl, Some(&g)).unwrap();
        let (a, b) = placed_null_vector(&pl, Some(&g)).unwrap();
        let (alpha, _) = PlacementParams { theta_a: 1.0, phi_a: 0.3, theta_b: 2.0, phi_b: 4.0 }.vectors();
        assert!(norm(&a.iter().zip(&alpha).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-15);
        assert!(norm(&out.matrix().matvec(&kron_vec(&a, &b))) < 1e-14);
    }

    #[test]
    fn singular_filter_rejected() {
        let rho = bell_mix(0.5, 0.3, 0.2).unwrap();
        let g = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(place_and_filter(&rho, &Placement::Identity, Some(&g)).unwrap_err(), Error::Singular);
    }

    #[test]
    fn werner_and_embeddings_are_states() {
        let w = werner(0.45).unwrap();
        assert!((w.matrix().trace().re - 1.0).abs() < 1e-15);
        let e = embed_trusted(&bell_mix(0.5, 0.3, 0.2).unwrap(), 3).unwrap();
        assert_eq!(e.dims(), (2, 3));
        assert!((e.entry(0, 0, 1, 1) - r(0.1)).norm() < 1e-16);
        let tau = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let s = with_trusted_spectator(&w, &tau).unwrap();
        assert_eq!(s.dims(), (2, 4));
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-15);
    }
}
