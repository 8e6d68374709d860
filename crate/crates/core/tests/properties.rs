use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use steercert::certify::{
    ppt_check, product_null_verdict, pure_contact_decomposition, support_kernel_criterion, w_bd,
    PureContactOutcome, Steerability,
};
use steercert::families::{
    bell_mix, cholesky_branch, from_h_block, place_and_filter, spectral_branch, x_family, CholeskyParams, FamilySpec,
    Placement, SpectralParams, SUPPORT_INDICES,
};
use steercert::lhslab::{lhs_lp, Assemblage, HiddenGrid, LpOptions};
use steercert::matcore::{
    basis_vector, eigh, kron_vec, min_eigenvalue, normalize, partial_transpose, psd_cholesky3,
    support_kernel_projectors, swap_parties, unitary_completion, ComplexMatrix, Cut, DensityMatrix, Tolerances, C64,
};
use steercert::nullspace::{find_boundary_contact, normal_form, product_vector_in_span, recognize_filtered_class};
use steercert::sampling::Sampler;
use steercert::scaling::{default_grid, scaling_fit, sigma_family, BlochProfile};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn tol() -> Tolerances {
    Tolerances::default()
}

fn e(k: usize) -> Vec<C64> {
    basis_vector(2, k)
}

fn random_state(s: &mut Sampler, dims: (usize, usize), rank: usize) -> DensityMatrix {
    DensityMatrix::new(s.psd(dims.0 * dims.1, rank).hermitian_part(), dims, &tol()).unwrap()
}

fn spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let mut v = eigh(m).unwrap().eigenvalues;
    v.sort_by(f64::total_cmp);
    v
}

// Two-qubit state with a product vector in its kernel: random for ranks 1 and 2,
// a locally placed and filtered Cholesky-branch state for rank 3.
fn contact_state(s: &mut Sampler, rank: usize) -> DensityMatrix {
    if rank < 3 {
        return random_state(s, (2, 2), rank);
    }
    let (rho0, _) = cholesky_branch(&s.cholesky_params()).unwrap();
    let g = &s.haar_unitary(2) + &ComplexMatrix::identity(2).scale_real(0.5);
    let placement = Placement::Unitaries(s.haar_unitary(2), s.haar_unitary(2));
    place_and_filter(&rho0, &placement, Some(&g)).unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 2usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partial_transpose_is_an_involution(seed: u64, d in dims(), cut_y: bool) {
        let mut s = Sampler::new(seed);
        let n = d.0 * d.1;
        let m = ComplexMatrix::from_fn(n, n, |_, _| s.complex_normal());
        let cut = if cut_y { Cut::Y } else { Cut::X };
        let twice = partial_transpose(&partial_transpose(&m, d, cut).unwrap(), d, cut).unwrap();
        prop_assert_eq!(twice, m);
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity(seed: u64, d in dims()) {
        let mut s = Sampler::new(seed);
        let h = s.psd(d.0 * d.1, d.0 * d.1);
        let pt = partial_transpose(&h, d, Cut::Y).unwrap();
        prop_assert!((pt.trace() - h.trace()).norm() < 1e-14);
        prop_assert!(pt.hermiticity_defect() <= h.hermiticity_defect() + 1e-16);
    }

    #[test]
    fn conditional_states_are_positive_and_complete(seed: u64, d in dims(), rank in 1usize..=4) {
        let mut s = Sampler::new(seed);
        let rho = random_state(&mut s, d, rank.min(d.0 * d.1));
        let u = s.haar_unitary(d.0);
        let mut total = 0.0;
        for k in 0..d.0 {
            let sigma = steercert::matcore::conditional_state(&rho, &u.column(k), &tol()).unwrap();
            prop_assert!(min_eigenvalue(&sigma).unwrap() >= -tol().eps_psd);
            total += sigma.trace().re;
        }
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cholesky3_roundtrip(seed: u64, rank in 1usize..=3) {
        let mut s = Sampler::new(seed);
        let h = s.psd(3, rank).scale_real(s.uniform(0.1, 10.0));
        let l = psd_cholesky3(&h, &tol()).unwrap();
        let err = (&(&l * &l.adjoint()) - &h).frobenius_norm() / h.trace().re;
        prop_assert!(err <= 1e-10, "error {err}");
        for i in 0..3 {
            prop_assert!(l[(i, i)].im == 0.0 && l[(i, i)].re >= 0.0);
            for j in i + 1..3 {
                prop_assert_eq!(l[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn support_and_kernel_projectors(seed: u64, n in 2usize..=4, rank in 1usize..=4) {
        let mut s = Sampler::new(seed);
        let a = s.psd(n, rank.min(n));
        let sk = support_kernel_projectors(&a, &tol()).unwrap();
        prop_assert!((&sk.support * &sk.kernel).max_abs() <= 1e-12);
        prop_assert!((&a * &sk.kernel).frobenius_norm() <= tol().eps_zero * a.trace().re);
        prop_assert_eq!(sk.rank, rank.min(n));
    }

    #[test]
    fn generator_outputs_are_states(seed: u64) {
        let mut s = Sampler::new(seed);
        let p = s.cholesky_params();
        let nu = [s.uniform(0.01, 1.0), s.uniform(0.01, 1.0), s.uniform(0.01, 1.0)];
        let total: f64 = nu.iter().sum();
        let spec = SpectralParams {
            nu: nu.map(|v| v / total),
            theta: [s.uniform(0.0, FRAC_PI_2), s.uniform(0.0, FRAC_PI_2), s.uniform(0.0, FRAC_PI_2)],
            phi: [s.uniform(0.0, 6.0), s.uniform(0.0, 6.0), s.uniform(0.0, 6.0)],
        };
        let (a, b) = (s.uniform(0.0, 1.0), s.uniform(0.0, 1.0));
        let cc = s.uniform(0.01, 1.0);
        let zmax = (a * cc).sqrt();
        let z = C64::from_polar(s.uniform(0.0, zmax), s.uniform(0.0, 6.0));
        let w = [s.uniform(0.0, 1.0), s.uniform(0.0, 1.0), s.uniform(0.01, 1.0)];
        let wt: f64 = w.iter().sum();
        let states = [
            cholesky_branch(&p).unwrap().0,
            spectral_branch(&spec).unwrap().0,
            x_family(a, b, cc, z).unwrap(),
            bell_mix(w[0] / wt, w[1] / wt, w[2] / wt).unwrap(),
        ];
        for rho in &states {
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(min_eigenvalue(rho.matrix()).unwrap() >= -tol().eps_psd);
            // every family is in standard form: |01> is in the kernel
            prop_assert!(steercert::matcore::norm(&rho.matrix().matvec(&basis_vector(4, 1))) <= tol().eps_eq);
        }
    }

    #[test]
    fn matched_spectra_give_equivalent_blocks(seed: u64) {
        let mut s = Sampler::new(seed);
        let p = s.cholesky_params();
        let (rho, _) = cholesky_branch(&p).unwrap();
        let h = rho.matrix().principal(&SUPPORT_INDICES);
        let hs = spectrum(&h);
        let mut nu = [0.0; 3];
        nu.copy_from_slice(&hs);
        let spec = SpectralParams {
            nu,
            theta: [s.uniform(0.0, FRAC_PI_2), s.uniform(0.0, FRAC_PI_2), s.uniform(0.0, FRAC_PI_2)],
            phi: [s.uniform(0.0, 6.0), s.uniform(0.0, 6.0), s.uniform(0.0, 6.0)],
        };
        let (rho2, _) = spectral_branch(&spec).unwrap();
        let hs2 = spectrum(&rho2.matrix().principal(&SUPPORT_INDICES));
        for (x, y) in hs.iter().zip(&hs2) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn cholesky_branch_is_ppt_iff_z_vanishes(seed: u64, zero_z: bool) {
        let mut s = Sampler::new(seed);
        let mut p = s.cholesky_params();
        if zero_z {
            p.z = ZERO;
        }
        let (rho, coh) = cholesky_branch(&p).unwrap();
        let (is_ppt, _) = ppt_check(&rho, &tol());
        prop_assert_eq!(is_ppt, zero_z);
        prop_assert_eq!(coh.norm() <= tol().eps_zero, is_ppt);
    }

    #[test]
    fn bell_mix_coherence_is_exact(p in 0.0f64..1.0, q in 0.0f64..1.0, r in 0.0f64..1.0) {
        prop_assume!(p + q + r > 1e-3);
        let n = p + q + r;
        let (p, q, r) = (p / n, q / n, 1.0 - p / n - q / n);
        prop_assume!(r >= 0.0);
        let rho = bell_mix(p, q, r).unwrap();
        prop_assert_eq!(rho.matrix()[(0, 3)].re, (p - q) / 2.0);
        let spec = FamilySpec::BellMix { p, q, r };
        prop_assert_eq!(spec.analytic_coherence().unwrap(), rho.matrix()[(0, 3)]);
    }

    #[test]
    fn pencil_root_is_a_product_vector(seed: u64, product_first: bool) {
        let mut s = Sampler::new(seed);
        let psi1 = if product_first {
            kron_vec(&s.haar_vector(2), &s.haar_vector(2))
        } else {
            s.haar_vector(4)
        };
        let psi2 = s.haar_vector(4);
        let root = product_vector_in_span(&psi1, &psi2).unwrap();
        prop_assert!(root.det.norm() <= 1e-9);
        let v: Vec<C64> = psi1.iter().zip(&psi2).map(|(a, b)| a * root.x + b * root.y).collect();
        let prod = kron_vec(&root.alpha, &root.beta);
        let diff: Vec<C64> = v.iter().zip(&prod).map(|(a, b)| a - b * root.scale).collect();
        prop_assert!(steercert::matcore::norm(&diff) <= 1e-9);
    }

    #[test]
    fn rank_two_states_have_a_contact(seed: u64) {
        let mut s = Sampler::new(seed);
        let rho = random_state(&mut s, (2, 2), 2);
        prop_assert!(find_boundary_contact(&rho, &tol()).unwrap().is_some());
    }

    #[test]
    fn normal_form_moves_contact_to_01(seed: u64, rank in 1usize..=3) {
        let mut s = Sampler::new(seed);
        let rho = contact_state(&mut s, rank);
        let datum = find_boundary_contact(&rho, &tol()).unwrap().unwrap();
        let nf = normal_form(&rho, &datum, &tol()).unwrap();
        let col = nf.rho_std.matrix().matvec(&basis_vector(4, 1));
        prop_assert!(steercert::matcore::norm(&col) <= 1e-9);
        for (x, y) in spectrum(rho.matrix()).iter().zip(spectrum(nf.rho_std.matrix())) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn filtered_class_witness(seed: u64, rank in 2usize..=3) {
        let mut s = Sampler::new(seed);
        let rho = contact_state(&mut s, rank);
        let datum = find_boundary_contact(&rho, &tol()).unwrap().unwrap();
        if let Some(w) = recognize_filtered_class(&rho, &datum, &tol()).unwrap() {
            prop_assert!(steercert::matcore::inner(&datum.beta, &w.eta).norm() <= 1e-10);
            let col = w.omega.matrix().matvec(&basis_vector(4, 1));
            prop_assert!(steercert::matcore::norm(&col) <= 1e-10);
            prop_assert!(w.coherence.im.abs() <= 1e-10 && w.coherence.re > 0.0);
        }
    }

    #[test]
    fn verdict_is_symmetric_under_swap(seed: u64, rank in 1usize..=4) {
        let mut s = Sampler::new(seed);
        let rho = if rank == 4 { random_state(&mut s, (2, 2), 3) } else { contact_state(&mut s, rank) };
        let v = product_null_verdict(&rho, &tol()).unwrap();
        let w = product_null_verdict(&swap_parties(&rho), &tol()).unwrap();
        prop_assert_eq!(v.steerable_a_to_b, w.steerable_b_to_a);
        prop_assert_eq!(v.steerable_b_to_a, w.steerable_a_to_b);
        prop_assert_eq!(v.npt, w.npt);
        if v.contact.is_some() {
            prop_assert!(v.steerable_a_to_b != Steerability::Undetermined);
        }
    }

    #[test]
    fn standard_family_entangled_iff_coherent(seed: u64, zero_z: bool) {
        let mut s = Sampler::new(seed);
        let mut h = s.h_block();
        if zero_z {
            // drop the coherence through the Cholesky data so positivity is kept
            let mut p = s.cholesky_params();
            p.z = ZERO;
            h = steercert::families::HBlockParams::from_cholesky(&p);
        }
        let rho = from_h_block(&h).unwrap();
        prop_assert_eq!(rho.matrix()[(0, 3)].norm() <= tol().eps_zero, ppt_check(&rho, &tol()).0);
    }

    #[test]
    fn support_kernel_firing_implies_npt(seed: u64, dy in 2usize..=4, rank in 1usize..=6) {
        let mut s = Sampler::new(seed);
        let rho = random_state(&mut s, (2, dy), rank.min(2 * dy));
        let u = s.haar_unitary(2);
        let out = support_kernel_criterion(&rho, &u.column(0), &u.column(1), &tol()).unwrap();
        if out.fires {
            prop_assert!(min_eigenvalue(&rho.partial_transpose(Cut::Y)).unwrap() < -tol().eps_psd);
            prop_assert!(out.npt_minor < 0.0);
        }
        let d = &out.decomposition;
        // positivity forces B^dagger beta = 0 on ker A
        for k in 0..dy {
            let beta = d.p_ker.column(k);
            prop_assert!(steercert::matcore::norm(&d.b.adjoint().matvec(&beta)) <= 1e-6);
        }
    }

    #[test]
    fn positive_witness_means_npt(seed: u64) {
        let mut s = Sampler::new(seed);
        let rho = contact_state(&mut s, 3);
        let datum = find_boundary_contact(&rho, &tol()).unwrap().unwrap();
        let std = normal_form(&rho, &datum, &tol()).unwrap().rho_std;
        if w_bd(&std).unwrap() > tol().eps_zero {
            prop_assert!(!ppt_check(&std, &tol()).0);
        }
    }

    #[test]
    fn pure_contact_reconstructs(seed: u64) {
        let mut s = Sampler::new(seed);
        let phi = s.haar_vector(2);
        let a = s.uniform(0.1, 2.0);
        let kappa = s.complex_normal();
        let pp = ComplexMatrix::projector(&phi);
        let d = &pp.scale_real(kappa.norm_sqr() / a) + &s.psd(2, 1);
        let b = pp.scale(kappa);
        let u = unitary_completion(&s.haar_vector(2)).unwrap();
        let (a0, a1) = (u.column(0), u.column(1));
        let o = |x: &[C64], y: &[C64]| ComplexMatrix::outer(x, y);
        let m = &(&(&o(&a0, &a0).kron(&pp.scale_real(a)) + &o(&a0, &a1).kron(&b)) + &o(&a1, &a0).kron(&b.adjoint()))
            + &o(&a1, &a1).kron(&d);
        let tr = m.trace().re;
        let rho = DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part(), (2, 2), &tol()).unwrap();
        let block = support_kernel_criterion(&rho, &a0, &a1, &tol()).unwrap().decomposition;
        let PureContactOutcome::Separable(dec) = pure_contact_decomposition(&block, &tol()).unwrap() else {
            return Err(TestCaseError::fail("coupled"));
        };
        prop_assert!((&dec.reconstruct(&a1) - rho.matrix()).max_abs() <= 1e-10);
        prop_assert!(dec.schur_min_eigenvalue >= -tol().eps_psd);
    }

    #[test]
    fn bloch_dictionary(seed: u64) {
        let mut s = Sampler::new(seed);
        let rho = random_state(&mut s, (2, 2), 4);
        let a0 = normalize(&s.haar_vector(2)).unwrap();
        let a1v = vec![-a0[1].conj(), a0[0].conj()];
        let fam = sigma_family(&rho, &a0, &a1v, &default_grid(), &tol()).unwrap();
        for (p, sigma) in fam.profiles.iter().zip(&fam.sigmas) {
            prop_assert!((p.r[0].hypot(p.r[1]) - 2.0 * p.b.norm()).abs() <= 1e-15);
            prop_assert!((p.m - p.r[2] - 2.0 * p.d).abs() <= 1e-15);
            let q = BlochProfile::from_sigma(p.t, sigma);
            prop_assert_eq!(q, *p);
            let len = (p.r[0] * p.r[0] + p.r[1] * p.r[1] + p.r[2] * p.r[2]).sqrt();
            prop_assert!(len <= p.m * (1.0 + tol().eps_zero));
        }
    }

    #[test]
    fn slopes_ignore_phase_of_coherence(seed: u64, phase in 0.0f64..std::f64::consts::TAU) {
        let mut s = Sampler::new(seed);
        let p = s.cholesky_params();
        // diag(1, 1, e^{i phase}) on the H block rotates h02 and h12 together
        let rot = C64::from_polar(1.0, phase);
        let q = CholeskyParams { z: p.z * rot, y: p.y * rot, ..p };
        let fit = |p: &CholeskyParams| {
            let (rho, _) = cholesky_branch(p).unwrap();
            scaling_fit(&sigma_family(&rho, &e(0), &e(1), &default_grid(), &tol()).unwrap(), (1e-4, 1e-2)).unwrap()
        };
        let (f, g) = (fit(&p), fit(&q));
        prop_assert!((f.slope_b.unwrap() - g.slope_b.unwrap()).abs() <= 1e-9);
        prop_assert_eq!(f.passes, g.passes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lp_residual_is_monotone(seed: u64) {
        let mut s = Sampler::new(seed);
        let rho = random_state(&mut s, (2, 2), 4);
        let dirs: Vec<Vec<C64>> = (0..4).map(|_| s.haar_vector(2)).collect();
        let opts = LpOptions::default();
        let grid = HiddenGrid::build(40, false, [0.0, 0.0, 1.0]).unwrap();
        let few = Assemblage::from_state(&rho, &dirs[..3], &tol()).unwrap();
        let all = Assemblage::from_state(&rho, &dirs, &tol()).unwrap();
        let r_few = lhs_lp(&few, &grid, &opts).unwrap().residual;
        let r_all = lhs_lp(&all, &grid, &opts).unwrap().residual;
        let r_fine = lhs_lp(&all, &grid.refined(), &opts).unwrap().residual;
        prop_assert!(r_all >= r_few - 1e-9, "{r_all} < {r_few}");
        prop_assert!(r_fine <= r_all + 1e-9, "{r_fine} > {r_all}");
    }

    #[test]
    fn feasible_solutions_reproduce_the_reduced_state(seed: u64) {
        let mut s = Sampler::new(seed);
        // separable and well inside the state space: mixed with noise
        let a = kron_vec(&s.haar_vector(2), &s.haar_vector(2));
        let m = &ComplexMatrix::projector(&a).scale_real(0.5) + &ComplexMatrix::identity(4).scale_real(0.125);
        let rho = DensityMatrix::two_qubit(m, &tol()).unwrap();
        let dirs: Vec<Vec<C64>> = (0..3).map(|_| s.haar_vector(2)).collect();
        let asm = Assemblage::from_state(&rho, &dirs, &tol()).unwrap();
        let grid = HiddenGrid::build(200, false, [0.0, 0.0, 1.0]).unwrap();
        let sol = lhs_lp(&asm, &grid, &LpOptions::default()).unwrap();
        prop_assert!(sol.feasible, "residual {}", sol.residual);
        prop_assert!(sol.weights.iter().all(|w| w.2 >= 0.0));
        prop_assert!(sol.total_weight() <= 1.0 + sol.residual + 1e-12);
        let mut reduced = [0.0f64; 4];
        for (j, w) in sol.point_masses.iter().enumerate() {
            let p = grid.points()[j];
            reduced[0] += w;
            for c in 0..3 {
                reduced[c + 1] += w * p[c];
            }
        }
        for pair in &asm.members {
            let sum = &pair[0] + &pair[1];
            let prof = BlochProfile::from_sigma(0.0, &sum);
            let target = [prof.m, prof.r[0], prof.r[1], prof.r[2]];
            for c in 0..4 {
                prop_assert!((reduced[c] - target[c]).abs() <= sol.residual + tol().eps_eq);
            }
        }
    }
}
