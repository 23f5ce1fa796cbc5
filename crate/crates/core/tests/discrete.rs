use gbdt::discrete::*;
use gbdt::linalg::{c, identity, inv_hpd, CMatrix, Hermitian};
use gbdt::random;
use gbdt::{Error, ParameterTriple, SignatureJ, Tolerances, Variant};

fn scalar(v: f64) -> CMatrix {
    CMatrix::from_element(1, 1, c(v, 0.0))
}

fn largest(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

struct Case {
    triple: ParameterTriple,
    data: JacobiData,
}

fn seeded(seed: u64, n: usize, h: usize, truncation: usize) -> Case {
    let mut rng = random::rng(seed);
    let triple = random::triple(&mut rng, Variant::Discrete, n, h).unwrap();
    let data = random::jacobi_data(&mut rng, h, truncation).unwrap();
    Case { triple, data }
}

fn boundary(seed: u64, n: usize, h: usize, truncation: usize) -> Case {
    let mut rng = random::rng(seed);
    let triple = random::boundary_triple(&mut rng, n, h).unwrap();
    let data = random::jacobi_data(&mut rng, h, truncation).unwrap();
    Case { triple, data }
}

#[test]
fn free_jacobi_matrix() {
    let jm = build_initial_jacobi(&JacobiData::free(2, 5)).unwrap();
    assert_eq!(jm.truncation(), 5);
    for k in 1..=5 {
        assert!((jm.a(k) - identity(2) * c(0.0, -1.0)).norm() < 1e-15);
        assert!(jm.b(k).norm() < 1e-15);
    }
    let dense = jm.to_dense();
    assert!((&dense - dense.adjoint()).norm() < 1e-15);
}

#[test]
fn scalar_jacobi_diagonal_is_q() {
    let qs: Vec<f64> = (1..=7).map(|k| (k as f64).sin()).collect();
    let data = JacobiData::new(
        vec![Hermitian::identity(1); 7],
        qs.iter().map(|&q| scalar(q)).collect(),
        1e-12,
    )
    .unwrap();
    let jm = build_initial_jacobi(&data).unwrap();
    for k in 1..=6 {
        assert!((jm.b(k)[(0, 0)] - c(qs[k - 1], 0.0)).norm() < 1e-15);
    }
}

#[test]
fn jacobi_data_validation() {
    let h = Hermitian::identity(1);
    assert!(matches!(
        JacobiData::new(vec![h.clone(), h.clone()], vec![scalar(0.0)], 1e-12),
        Err(Error::Dimension { .. })
    ));
    assert!(matches!(
        JacobiData::new(vec![Hermitian::from_real_diagonal(&[-1.0]), h.clone()], vec![scalar(0.0); 2], 1e-12),
        Err(Error::NotPositiveDefinite { .. })
    ));
    let c2 = Hermitian::from_real_diagonal(&[1.0, 2.0]);
    let q = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(matches!(
        JacobiData::new(vec![c2.clone(), c2], vec![q.clone(), q], 1e-12),
        Err(Error::Identity { .. })
    ));
}

#[test]
fn free_xi_is_the_signature() {
    let data = JacobiData::free(3, 4);
    let j = SignatureJ::new(Variant::Discrete, 3).matrix();
    for k in 1..=5 {
        assert_eq!(xi(&data, k).unwrap(), j);
        assert_eq!(xi_inverse(&j, &j), j);
    }
}

#[test]
fn recursion_keeps_the_identity() {
    let case = seeded(21, 3, 2, 50);
    let traj = run_recursion(&case.triple, &case.data, &Tolerances::default()).unwrap();
    assert_eq!(traj.truncation(), 50);
    assert!(largest(traj.identity_residuals()) <= 1e-10);
    assert!(largest(traj.adjoint_form_residuals().unwrap()) <= 1e-10);
    assert!(traj.algebra_residual().unwrap() <= 1e-14);
    assert!(traj.increment_min_eigenvalues().iter().all(|&m| m >= -1e-12));
}

#[test]
fn zero_pi_gives_unchanged_jacobi_matrix() {
    let mut rng = random::rng(4);
    let triple = random::degenerate_triple(&mut rng, Variant::Discrete, 2, 2).unwrap();
    let data = random::jacobi_data(&mut rng, 2, 20).unwrap();
    let tol = Tolerances::default();
    let traj = run_recursion(&triple, &data, &tol).unwrap();
    assert!(traj.s.iter().all(|s| *s == triple.s0));
    let tj = transform_jacobi(&traj, &tol).unwrap();
    let original = build_initial_jacobi(&data).unwrap();
    for k in 1..=20 {
        assert_eq!(tj.c(k), data.c(k));
        assert_eq!(tj.q(k), data.q(k));
    }
    assert!((tj.jacobi.to_dense() - original.to_dense()).norm() == 0.0);
}

#[test]
fn transformed_c_dominates_c() {
    let case = seeded(5, 2, 2, 30);
    let tol = Tolerances::default();
    let traj = run_recursion(&case.triple, &case.data, &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    for k in 1..=31 {
        assert!(tj.c(k).min_eigenvalue() >= case.data.c(k).min_eigenvalue() - 1e-12);
    }
    assert!(largest(tj.commutation_residuals()) <= 1e-10);
    assert!(largest(tj.jacobi.hermitian_residuals()) <= 1e-12);
}

#[test]
fn xi_tilde_identities() {
    let case = seeded(9, 2, 2, 30);
    let tol = Tolerances::default();
    let traj = run_recursion(&case.triple, &case.data, &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    let rep = xi_tilde_checks(&traj, &tj, &tol).unwrap();
    assert!(largest(rep.j_unitarity.iter().copied()) <= 1e-10);
    assert!(largest(rep.lower_block.iter().copied()) <= 1e-10);
    assert!(largest(rep.corner_block.iter().copied()) <= 1e-12);
    assert!(largest(rep.consistency.iter().copied()) <= 1e-10);
    assert!(largest(rep.factorization.unwrap()) <= 1e-9);
    assert!(largest(rep.forward.iter().copied()) <= 1e-10);
    // C̆(k) differs from C(k)⁻¹ by X₁₁(k), which is not small here.
    assert!(largest(rep.lower_block_untransformed.iter().copied()) > 1e-3);
}

#[test]
fn singular_a_skips_factorization() {
    let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let s0 = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)]);
    let s0h = Hermitian::new(s0.clone()).unwrap();
    let a = a * inv_hpd(&s0h).unwrap().as_matrix();
    let pi0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let triple = ParameterTriple::discrete(a, s0, pi0).unwrap();
    let tol = Tolerances::default();
    let traj = run_recursion(&triple, &JacobiData::free(1, 10), &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    let rep = xi_tilde_checks(&traj, &tj, &tol).unwrap();
    assert!(rep.factorization.is_none());
    assert!(rep.factorization_note.unwrap().contains("singular"));
    assert!(largest(rep.forward) <= 1e-10);
}

#[test]
fn eigen_blocks_for_boundary_triple() {
    let case = boundary(13, 3, 2, 40);
    let tol = Tolerances::default();
    let traj = run_recursion(&case.triple, &case.data, &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    let blocks = eigen_blocks(&traj, &tj).unwrap();
    assert_eq!(blocks.y.len(), 40);
    assert!(blocks.y.iter().all(|y| y.nrows() == 2 && y.ncols() == 3));
    assert!(blocks.max_row_residual() <= 1e-9);
}

#[test]
fn eigen_blocks_need_the_boundary_condition() {
    let case = seeded(13, 2, 1, 10);
    let tol = Tolerances::default();
    let traj = run_recursion(&case.triple, &case.data, &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    assert!(matches!(eigen_blocks(&traj, &tj), Err(Error::BoundaryCondition { .. })));
}

#[test]
fn scalar_example_eigenvector() {
    let pi0 = CMatrix::from_row_slice(1, 2, &[c(0.0, 0.0), c(1.0, 0.0)]);
    let triple = ParameterTriple::discrete(scalar(2.0), scalar(1.0), pi0).unwrap();
    let tol = Tolerances::default();
    let traj = run_recursion(&triple, &JacobiData::free(1, 40), &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    let blocks = eigen_blocks(&traj, &tj).unwrap();
    assert!(blocks.max_row_residual() <= 1e-10);
}

#[test]
fn discrete_solution_dynamics() {
    let case = boundary(31, 2, 2, 30);
    let tol = Tolerances::default();
    let traj = run_recursion(&case.triple, &case.data, &tol).unwrap();
    let tj = transform_jacobi(&traj, &tol).unwrap();
    let blocks = eigen_blocks(&traj, &tj).unwrap();
    let sol = discrete_solution(&blocks, &case.triple.a);
    assert_eq!(sol.psi(0.0).unwrap(), blocks.y);
    for t in [0.1, 1.0, 5.0] {
        let r = sol.dynamical_residual(&tj.jacobi, t).unwrap();
        assert!(r <= 1e-9 * (1.0 + case.triple.a.norm()), "t = {t}: {r}");
    }
    // Ψ(s + t) = Ψ(s) e^{-itA}
    let (s, t) = (0.7, 1.9);
    let e = sol.propagator(t).unwrap();
    for (joint, left) in sol.psi(s + t).unwrap().iter().zip(sol.psi(s).unwrap()) {
        assert!((joint - left * &e).norm() <= 1e-12 * (1.0 + joint.norm()));
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let case = seeded(2, 2, 2, 5);
    let data = JacobiData::free(1, 5);
    assert!(matches!(
        run_recursion(&case.triple, &data, &Tolerances::default()),
        Err(Error::Dimension { .. })
    ));
}
