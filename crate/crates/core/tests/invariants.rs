//! Property tests for the invariants each module promises.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qvariant::norm_laws::{
    is_generalized_diagonal, preserves_pnorm_formal_even, preserves_pnorm_numeric, NumericCheck,
};
use qvariant::numerics::random::{
    gaussian_matrix, generalized_diagonal, haar_orthogonal, haar_special_orthogonal, haar_unitary, real_determinant,
};
use qvariant::numerics::{complete_to_unitary, p_norm, quaternion_sqrt, rotation_block_decompose, Complex, Quaternion};
use qvariant::postbqp::{or_solve_gate_g, varphi_overlap, varphi_overlap_circuit, BooleanFunction};
use qvariant::protocols::{build_discrimination_setup, discrimination_distribution, discrimination_error, option_i_ensemble_tvd};
use qvariant::sqrt::{embed_sqrt, real_orthogonal_sqrt, unitary_sqrt};
use qvariant::state::{
    amplitude_recursive, apply_gate, apply_nonlinear, measure_distribution, random_circuit, run_prefix, Gate,
    MeasurementRule, NonlinearKind, NormalizationMode, StateVector,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex() -> impl Strategy<Value = Complex> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn random_state(seed: u64, n: usize) -> StateVector {
    let mut r = rng(seed);
    let amps = (0..1 << n).map(|_| Complex::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    StateVector::new(n, amps).unwrap()
}

fn random_invertible(seed: u64, dim: usize) -> Gate {
    Gate::invertible(gaussian_matrix(&mut rng(seed), dim, dim, true)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_norm_is_homogeneous(
        v in prop::collection::vec(complex(), 1..8),
        c in complex(),
        p in prop::sample::select(vec![1.0, 2.0, 3.0, 4.0, 7.5]),
    ) {
        prop_assume!(v.iter().any(|z| z.norm() > 1e-3));
        let scaled: Vec<Complex> = v.iter().map(|z| c * z).collect();
        let lhs = p_norm(&scaled, p).unwrap();
        let rhs = c.norm() * p_norm(&v, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn completion_is_unitary(seed in any::<u64>(), n in 2usize..8, k in 1usize..3) {
        let u = haar_unitary(&mut rng(seed), n);
        let cols: Vec<_> = (0..k.min(n)).map(|j| u.column(j)).collect();
        let w = complete_to_unitary(&cols).unwrap();
        prop_assert!(w.unitarity_residual() <= 1e-10);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                prop_assert!((w[(i, j)] - c.as_slice()[i]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn rotation_blocks_reconstruct(seed in any::<u64>(), n in 2usize..=8) {
        let u = haar_orthogonal(&mut rng(seed), n);
        let b = rotation_block_decompose(&u).unwrap();
        prop_assert!(b.residual <= 1e-9);
        prop_assert_eq!(b.determinant_sign() > 0, real_determinant(&u) > 0.0);
    }

    #[test]
    fn quaternion_roots_multiply_back(w in -10.0..10.0f64, x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64, pure_real in any::<bool>()) {
        let q = if pure_real { Quaternion::new(-w.abs(), 0.0, 0.0, 0.0) } else { Quaternion::new(w, x, y, z) };
        let r = quaternion_sqrt(q);
        prop_assert!((r * r - q).norm() <= 1e-12 * q.norm().max(1.0));
    }

    #[test]
    fn distributions_ignore_global_scale(seed in any::<u64>(), n in 1usize..5, c in complex(), p in 0.5..8.0f64) {
        prop_assume!(c.norm() > 1e-3);
        let s = random_state(seed, n);
        let rule = MeasurementRule::new(p).unwrap();
        let a = measure_distribution(&s, &rule);
        let b = measure_distribution(&s.scaled(c).unwrap(), &rule);
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn local_mode_keeps_branch_weights(seed in any::<u64>(), n in 2usize..5, target_pick in any::<usize>()) {
        let s = random_state(seed, n);
        let target = target_pick % n;
        let out = apply_gate(&s, &random_invertible(seed ^ 1, 2), &[target], NormalizationMode::Local).unwrap();
        let other = (target + 1) % n;
        for bit in 0..2u8 {
            let before = s.branch_weight(other, bit);
            let after = out.branch_weight(other, bit);
            prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        }
        // Branch-by-branch: every assignment of the untouched qubits.
        let shift = n - 1 - target;
        for rest in 0..(1usize << n) {
            if (rest >> shift) & 1 == 1 {
                continue;
            }
            let w = |st: &StateVector| st.amplitude(rest).norm_sqr() + st.amplitude(rest | 1 << shift).norm_sqr();
            prop_assert!((w(&s) - w(&out)).abs() <= 1e-12 * w(&s).max(1.0));
        }
    }

    #[test]
    fn unitary_gates_keep_the_two_norm(seed in any::<u64>(), n in 2usize..5) {
        let s = random_state(seed, n);
        let g = Gate::unitary(haar_unitary(&mut rng(seed ^ 2), 4)).unwrap();
        let out = apply_gate(&s, &g, &[0, n - 1], NormalizationMode::UnitaryOnly).unwrap();
        prop_assert!((out.norm2() - s.norm2()).abs() <= 1e-12 * s.norm2());
    }

    #[test]
    fn squaring_gate_squares_the_norm(x in complex(), y in complex()) {
        prop_assume!(x.norm() + y.norm() > 1e-3);
        let v = StateVector::new(1, vec![x, y]).unwrap();
        let g = apply_nonlinear(&v, NonlinearKind::G, 0).unwrap();
        prop_assert!((g.norm2() - v.norm2().powi(2)).abs() <= 1e-12 * v.norm2().powi(2).max(1.0));
        let unit = StateVector::new(1, vec![x / v.norm2(), y / v.norm2()]).unwrap();
        prop_assert!((apply_nonlinear(&unit, NonlinearKind::G, 0).unwrap().norm2() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn local_equals_global_on_product_states(seed in any::<u64>()) {
        let a = random_state(seed, 1);
        let b = random_state(seed ^ 3, 2);
        let s = a.tensor(&b);
        let g = random_invertible(seed ^ 4, 4);
        let local = apply_gate(&s, &g, &[1, 2], NormalizationMode::Local).unwrap();
        let global = apply_gate(&s, &g, &[1, 2], NormalizationMode::Global).unwrap();
        let ratio = local.norm2() / global.norm2();
        for x in 0..8 {
            prop_assert!((local.amplitude(x) - global.amplitude(x) * ratio).norm() <= 1e-12 * local.norm2());
        }
    }

    #[test]
    fn recursive_amplitudes_match_dense(seed in any::<u64>(), n in 1usize..=6, gates in 1usize..=10, x_pick in any::<usize>(), t_pick in any::<usize>()) {
        let c = random_circuit(&mut rng(seed), n, gates);
        let t = t_pick % (c.len() + 1);
        let x = x_pick % (1 << n);
        let dense = run_prefix(&c, &StateVector::zero_state(n), t).unwrap();
        prop_assert!((amplitude_recursive(&c, x, t).unwrap() - dense.amplitude(x)).norm() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn formal_verdicts_are_sound(seed in any::<u64>(), n in 2usize..=4, p in prop::sample::select(vec![4u32, 6]), scale in prop::sample::select(vec![1.0, 1.0, 1.1])) {
        let mut r = rng(seed);
        let a = generalized_diagonal(&mut r, n, false).scale(Complex::new(scale, 0.0));
        let formal = preserves_pnorm_formal_even(&a, p).unwrap();
        if formal.preserves {
            let check = NumericCheck { trials: 10_000, seed, tol: 1e-10, ..NumericCheck::default() };
            prop_assert!(preserves_pnorm_numeric(&a, p as f64, &check).unwrap().preserves);
        } else {
            prop_assert!(scale != 1.0);
        }
    }

    #[test]
    fn unimodular_generalized_diagonals_preserve(seed in any::<u64>(), n in 2usize..=4, p in prop::sample::select(vec![1.0, 3.0, 4.0, 6.0]), complex_entries in any::<bool>()) {
        let a = generalized_diagonal(&mut rng(seed), n, complex_entries);
        let check = NumericCheck { seed, ..NumericCheck::default() };
        prop_assert!(preserves_pnorm_numeric(&a, p, &check).unwrap().preserves);
        if !complex_entries && p as u32 % 2 == 0 {
            prop_assert!(preserves_pnorm_formal_even(&a, p as u32).unwrap().preserves);
        }
    }

    #[test]
    fn odd_p_preservers_keep_signs(seed in any::<u64>(), n in 2usize..=4, p in prop::sample::select(vec![1.0, 3.0])) {
        let mut r = rng(seed);
        let a = generalized_diagonal(&mut r, n, false);
        prop_assert!(preserves_pnorm_numeric(&a, p, &NumericCheck::default()).unwrap().preserves);
        let mut signs = vec![0i8; n];
        for _ in 0..1000 {
            let x: Vec<Complex> = (0..n).map(|_| Complex::new(r.random_range(0.0..1.0), 0.0)).collect();
            for (j, y) in a.apply_to(&x).iter().enumerate() {
                let s = if y.re > 0.0 { 1 } else if y.re < 0.0 { -1 } else { 0 };
                if s != 0 {
                    prop_assert!(signs[j] == 0 || signs[j] == s);
                    signs[j] = s;
                }
            }
        }
    }

    #[test]
    fn non_integer_p_always_has_a_witness(seed in any::<u64>(), n in 2usize..=4, p in prop::sample::select(vec![0.5, 1.5, 2.5])) {
        let a = gaussian_matrix(&mut rng(seed), n, n, false);
        prop_assume!(!is_generalized_diagonal(&a, 1e-8).unwrap().is_generalized_diagonal);
        let check = NumericCheck { seed, ..NumericCheck::default() };
        let v = preserves_pnorm_numeric(&a, p, &check).unwrap();
        prop_assert!(!v.preserves && v.witness.is_some());
    }

    #[test]
    fn circuit_overlaps_match_closed_form(seed in any::<u64>(), n in 1usize..=8, i_pick in any::<i32>()) {
        let f = BooleanFunction::random(&mut rng(seed), n).unwrap();
        prop_assume!(f.ones() > 0 && 2 * f.ones() != 1 << n);
        let i = i_pick.rem_euclid(2 * n as i32 + 1) - n as i32;
        let circuit = varphi_overlap_circuit(&f, i).unwrap();
        prop_assert!((circuit - varphi_overlap(f.ones(), n, i).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn or_solver_errs_rarely(n in 1usize..=8, ones_pick in any::<usize>()) {
        let ones = 1 + ones_pick % (1 << n);
        let solve = or_solve_gate_g(&BooleanFunction::with_count(n, ones).unwrap()).unwrap();
        prop_assert!(solve.satisfiable);
        prop_assert!(1.0 - solve.prob_one <= 2f64.powi(-3 * n as i32) + 1e-15);
    }

    #[test]
    fn discrimination_is_cyclic(d in 2usize..=9, p in 1.0..64.0f64) {
        let s = build_discrimination_setup(d, p).unwrap();
        let e0 = discrimination_error(&s, 0).unwrap();
        for j in 0..d {
            let dist = discrimination_distribution(&s, j).unwrap();
            prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!((discrimination_error(&s, j).unwrap() - e0).abs() <= 1e-12);
        }
    }

    #[test]
    fn discrimination_improves_with_p(d in 2usize..=9) {
        let errors: Vec<f64> = [2.0, 4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&p| discrimination_error(&build_discrimination_setup(d, p).unwrap(), 0).unwrap())
            .collect();
        for w in errors.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn two_norm_measurement_choices_do_not_signal(d in 2usize..=8) {
        prop_assert!(option_i_ensemble_tvd(2.0, d).unwrap() <= 1e-12);
    }

    #[test]
    fn roots_land_in_their_groups(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let u = haar_unitary(&mut r, n);
        let c = unitary_sqrt(&u).unwrap();
        prop_assert!(c.residual <= 1e-9 && c.group_residual <= 1e-9);
        let o = haar_orthogonal(&mut r, n);
        let real = real_orthogonal_sqrt(&o).unwrap();
        if real.exists {
            prop_assert!(real.residual <= 1e-9 && real.group_residual <= 1e-9);
        }
        let e = embed_sqrt(&o).unwrap();
        prop_assert!(real_determinant(e.target.as_ref().unwrap()) > 0.0);
        prop_assert!(e.residual <= 1e-9 && e.group_residual <= 1e-9);
    }

    #[test]
    fn complex_and_real_roots_agree_on_rotations(seed in any::<u64>(), n in 2usize..=6) {
        let u = haar_special_orthogonal(&mut rng(seed), n);
        let a = unitary_sqrt(&u).unwrap().root.unwrap();
        let b = real_orthogonal_sqrt(&u).unwrap().root.unwrap();
        prop_assert!(a.sub(&b).frobenius_norm() <= 1e-8);
    }
}
