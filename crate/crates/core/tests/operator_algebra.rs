use faer::Mat;
use nanoqed::lindblad::{liouvillian, steady_state, Collapse};
use nanoqed::opalg::{
    annihilation, dissipator, embed, expectation, hamiltonian_part, kron, number, vectorize, HilbertLayout,
    QuantumOperator, Superoperator, CAVITY, NANORESONATOR, TRANSMON,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn op_from(layout: &HilbertLayout, values: &[(f64, f64)]) -> QuantumOperator {
    let d = layout.total_dim();
    QuantumOperator::from_fn(layout, |i, j| {
        let (re, im) = values[(i * d + j) % values.len()];
        C64::new(re, im)
    })
}

#[test]
fn number_operator_spectrum() {
    let a = annihilation(4).unwrap();
    let n = &a.adjoint() * &a;
    let ev = n.eigenvalues_hermitian();
    for (k, e) in ev.iter().enumerate() {
        assert!((e - k as f64).abs() < 1e-12);
    }
}

#[test]
fn disjoint_embeddings_commute() {
    let layout = HilbertLayout::default();
    let a = embed(&annihilation(4).unwrap(), CAVITY, &layout).unwrap();
    let b = embed(&annihilation(5).unwrap(), NANORESONATOR, &layout).unwrap();
    assert_eq!((&a * &b).max_abs_diff(&(&b * &a)), 0.0);
}

#[test]
fn embedded_number_trace() {
    let layout = HilbertLayout::default();
    let n = embed(&number(4).unwrap(), CAVITY, &layout).unwrap();
    assert!((n.trace().re - (3 * 5 * 6) as f64).abs() < 1e-12);
}

#[test]
fn embedded_identity_is_identity() {
    let layout = HilbertLayout::default();
    for (pos, d) in [(TRANSMON, 3), (CAVITY, 4), (NANORESONATOR, 5)] {
        let single = HilbertLayout::single(d).unwrap();
        let id = embed(&QuantumOperator::identity(&single), pos, &layout).unwrap();
        assert_eq!(id.max_abs_diff(&QuantumOperator::identity(&layout)), 0.0);
    }
}

#[test]
fn decay_steady_state_is_ground() {
    let sm = QuantumOperator::transition(2, 0, 1).unwrap();
    let layout = HilbertLayout::single(2).unwrap();
    let l = liouvillian(&QuantumOperator::zeros(&layout), &[Collapse { name: "decay", rate: 3.0, operator: sm }])
        .unwrap();
    let ss = steady_state(&l).unwrap();
    assert!((ss.rho.get(0, 0) - c(1.0)).norm() < 1e-14);
}

#[test]
fn expectation_examples() {
    let layout = HilbertLayout::single(4).unwrap();
    let n = number(4).unwrap();
    let ground = QuantumOperator::transition(4, 0, 0).unwrap();
    assert_eq!(expectation(&ground, &n).unwrap(), c(0.0));
    let mixed = QuantumOperator::identity(&layout).scale_real(0.25);
    assert!((expectation(&mixed, &n).unwrap() - c(1.5)).norm() < 1e-15);

    let nbar: f64 = 0.3;
    let x = nbar / (1.0 + nbar);
    let dim = 60;
    let p: Vec<f64> = (0..dim).map(|k| (1.0 - x) * x.powi(k as i32)).collect();
    let thermal = QuantumOperator::diagonal(&HilbertLayout::single(dim).unwrap(), &p).unwrap();
    let got = expectation(&thermal, &number(dim).unwrap()).unwrap().re;
    assert!((got - nbar).abs() < 1e-12);
}

#[test]
fn hamiltonian_superoperator_examples() {
    let layout = HilbertLayout::single(3).unwrap();
    let zero = hamiltonian_part(&QuantumOperator::zeros(&layout), 1e-12).unwrap();
    assert_eq!(zero.frobenius_norm(), 0.0);

    let h = QuantumOperator::diagonal(&layout, &[0.3, -1.0, 2.0]).unwrap();
    let rho = QuantumOperator::diagonal(&layout, &[0.5, 0.2, 0.3]).unwrap();
    let drho = hamiltonian_part(&h, 1e-12).unwrap().apply(&rho).unwrap();
    assert!(drho.frobenius_norm() < 1e-15);
}

/// exp(Lt) by scaling and squaring of a Taylor series.
fn propagate(l: &Superoperator, t: f64) -> Mat<C64> {
    let m = l.matrix();
    let n = m.nrows();
    let norm = l.frobenius_norm() * t;
    let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
    let dt = t / f64::from(2u32.pow(squarings));
    let mut term = Mat::<C64>::identity(n, n);
    let mut sum = Mat::<C64>::identity(n, n);
    for k in 1..20 {
        term = &term * m;
        term = &term * faer::Scale(c(dt / k as f64));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn two_level_precession() {
    let layout = HilbertLayout::single(2).unwrap();
    let w = 2.0;
    let h = QuantumOperator::diagonal(&layout, &[-w / 2.0, w / 2.0]).unwrap();
    let l = hamiltonian_part(&h, 1e-12).unwrap();
    let plus = QuantumOperator::from_fn(&layout, |_, _| c(0.5));
    let sx = QuantumOperator::from_fn(&layout, |i, j| if i != j { c(1.0) } else { c(0.0) });
    for t in [0.1, 0.7, 1.9] {
        let u = propagate(&l, t);
        let v = vectorize(&plus);
        let out: Vec<C64> = (0..4).map(|i| (0..4).map(|j| u[(i, j)] * v[j]).sum()).collect();
        let rho = nanoqed::opalg::devectorize(&out).unwrap();
        let got = expectation(&rho, &sx).unwrap().re;
        assert!((got - (w * t).cos()).abs() < 1e-10, "t = {t}: {got}");
    }
}

#[test]
fn kron_matches_vectorized_product() {
    let layout = HilbertLayout::single(3).unwrap();
    let a = op_from(&layout, &[(0.1, 0.2), (-0.7, 0.4), (1.1, -0.3), (0.5, 0.9)]);
    let b = op_from(&layout, &[(0.3, -0.6), (0.8, 0.1), (-0.2, 0.7)]);
    let rho = op_from(&layout, &[(0.4, 0.0), (0.1, -0.2), (0.6, 0.5), (-0.3, 0.3), (0.9, 0.1)]);
    let want = vectorize(&(&(&a * &rho) * &b));
    let k = kron(&b.matrix().transpose().to_owned(), a.matrix());
    let v = vectorize(&rho);
    for (i, w) in want.iter().enumerate() {
        let got: C64 = (0..9).map(|j| k[(i, j)] * v[j]).sum();
        assert!((got - w).norm() < 1e-14);
    }
}

proptest! {
    #[test]
    fn embedding_preserves_spectrum(diag in prop::collection::vec(-3.0f64..3.0, 4)) {
        let layout = HilbertLayout::hybrid(2, 4, 3).unwrap();
        let single = HilbertLayout::single(4).unwrap();
        let op = QuantumOperator::diagonal(&single, &diag).unwrap();
        let ev = embed(&op, CAVITY, &layout).unwrap().eigenvalues_hermitian();
        let mut want: Vec<f64> = diag.iter().flat_map(|d| std::iter::repeat_n(*d, 6)).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in ev.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn dissipator_keeps_hermiticity(
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        state in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
    ) {
        let layout = HilbertLayout::single(3).unwrap();
        let a = op_from(&layout, &values);
        let rho = op_from(&layout, &state).hermitian_part();
        let out = dissipator(&a).apply(&rho).unwrap();
        prop_assert!(out.hermiticity_deviation() < 1e-12);
        let l = dissipator(&a).add(&hamiltonian_part(&rho, 1e-12).unwrap());
        prop_assert!(l.trace_defect() < 1e-10);
    }

    #[test]
    fn truncated_commutator_identity(d in 2usize..8) {
        let a = annihilation(d).unwrap();
        let comm = a.commutator(&a.adjoint());
        for i in 0..d {
            for j in 0..d {
                let want = if i != j { 0.0 } else if i == d - 1 { 1.0 - d as f64 } else { 1.0 };
                prop_assert!((comm.get(i, j) - c(want)).norm() < 1e-14);
            }
        }
    }
}
