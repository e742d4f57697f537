use proptest::prelude::*;

use qobserve::lie::stabilize_with;
use qobserve::random::{self, seeded};
use qobserve::{
    analyze, commutator, dynamical_algebra, evolve, expm, generalized_observability_space, hs_inner, indistinguishable,
    observability_space, orbit_sample, orthonormal_extend, project, run_experiment, spectral, stabilize,
    traceless_shift, trace_product, Action, DensityState, ExperimentScript, Matrix, ScriptBackAction, Segment,
    Subspace, System, Tol,
};

fn tol() -> Tol {
    Tol::default()
}

fn skew(seed: u64, n: usize) -> Matrix {
    random::traceless_hermitian::<f64, _>(&mut seeded(seed), n).mul_i()
}

fn system(seed: u64, n: usize, gens: usize) -> System {
    let mut rng = seeded(seed);
    let hams: Vec<Matrix> = (0..gens).map(|_| random::hermitian(&mut rng, n)).collect();
    let s = random::traceless_hermitian::<f64, _>(&mut rng, n);
    System::from_hamiltonians(&hams, &s, "random", &tol()).unwrap()
}

/// Single-generator system: abelian algebra, usually not observable in one step.
fn weak_system(seed: u64, n: usize) -> System {
    system(seed, n, 1)
}

/// Generators and observable both block diagonal, so every `V_k` stays
/// inside the block-diagonal subalgebra.
fn confined_system(seed: u64, n: usize) -> System {
    let mut rng = seeded(seed);
    let split = 1 + (seed as usize) % (n - 1);
    let block = |m: Matrix| {
        Matrix::from_fn(n, |i, j| if (i < split) == (j < split) { m[(i, j)] } else { qobserve::cplx(0.0, 0.0) })
    };
    let hams: Vec<Matrix> = (0..2).map(|_| block(random::hermitian(&mut rng, n))).collect();
    let s = block(random::traceless_hermitian::<f64, _>(&mut rng, n));
    System::from_hamiltonians(&hams, &s, "confined", &tol()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_identity(seed in any::<u64>(), n in 2usize..6) {
        let (a, b, c) = (skew(seed, n), skew(seed ^ 1, n), skew(seed ^ 2, n));
        let br = |x: &Matrix, y: &Matrix| commutator(x, y).unwrap();
        let sum = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(sum.norm() < 1e-10 * a.norm() * b.norm() * c.norm());
    }

    #[test]
    fn bracket_is_ad_invariant(seed in any::<u64>(), n in 2usize..6) {
        let (a, b, c) = (skew(seed, n), skew(seed ^ 3, n), skew(seed ^ 4, n));
        let lhs = hs_inner(&commutator(&a, &b).unwrap(), &c).unwrap();
        let rhs = hs_inner(&a, &commutator(&b, &c).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn exponential_inverse(seed in any::<u64>(), n in 2usize..7, scale in 0.01f64..2.0, big in 1.0f64..1e3) {
        let sim_tol = tol().sim_tol;
        let g = random::ginibre::<f64, _>(&mut seeded(seed), n);
        let a = g.scale(scale / g.norm());
        let prod = &expm(&a) * &expm(&a.scale(-1.0));
        let err = (&prod - &Matrix::identity(n)).max_abs();
        prop_assert!(err < sim_tol, "err {err}");
        let k = skew(seed, n);
        let k = k.scale(big / k.norm());
        let prod = &expm(&k) * &expm(&k.scale(-1.0));
        let err = (&prod - &Matrix::identity(n)).max_abs();
        prop_assert!(err < sim_tol * 1e2, "skew err {err}");
        prop_assert!(expm(&k).is_unitary(sim_tol * 1e2));
    }

    #[test]
    fn spectral_is_complete(seed in any::<u64>(), n in 2usize..7) {
        let (s, mult) = random::clustered_observable::<f64, _>(&mut seeded(seed), n);
        let sd = spectral(&s, &tol()).unwrap();
        prop_assert_eq!(sd.multiplicities.iter().sum::<usize>(), n);
        prop_assert_eq!(&sd.multiplicities, &mult);
        let mut sum = Matrix::zeros(n);
        for p in &sd.projectors {
            sum += p;
            prop_assert!((&(p * p) - p).max_abs() < 1e-10);
        }
        prop_assert!((&sum - &Matrix::identity(n)).max_abs() < 1e-10);
        prop_assert!((&sd.reconstruct() - &s).max_abs() < 1e-10);
    }

    #[test]
    fn traceless_shift_is_idempotent(seed in any::<u64>(), n in 2usize..6) {
        let h = random::hermitian::<f64, _>(&mut seeded(seed), n);
        let once = traceless_shift(&h);
        prop_assert!(once.trace().norm() < 1e-12);
        prop_assert!((&traceless_shift(&once) - &once).max_abs() < 1e-14);
    }

    #[test]
    fn extension_is_monotone_and_idempotent(seed in any::<u64>(), n in 2usize..5, count in 1usize..10) {
        let mut space = Subspace::empty(n);
        for i in 0..count {
            let x = skew(seed.wrapping_add(i as u64), n);
            let (grown, _) = orthonormal_extend(&space, &x, &tol()).unwrap();
            prop_assert!(grown.dim() >= space.dim());
            let (again, added) = orthonormal_extend(&grown, &x, &tol()).unwrap();
            prop_assert!(!added);
            prop_assert_eq!(again.dim(), grown.dim());
            space = grown;
        }
        for (i, a) in space.basis().iter().enumerate() {
            for (j, b) in space.basis().iter().enumerate() {
                let g = hs_inner(a, b).unwrap().re;
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn observability_space_is_stable(seed in any::<u64>(), n in 2usize..5) {
        let sys = weak_system(seed, n);
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        let v = observability_space(&sys, &tol()).unwrap();
        prop_assert!(v.dim() <= n * n - 1);
        prop_assert!(v.contains(&sys.skew_observable(), &tol()));
        for f in v.basis() {
            for b in l.basis() {
                prop_assert!(v.contains(&commutator(b, f).unwrap(), &tol()));
            }
        }
    }

    #[test]
    fn generators_suffice_for_stabilization(seed in any::<u64>(), n in 2usize..5, gens in 1usize..3) {
        let sys = system(seed, n, gens);
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        let by_generators = stabilize_with(n, &[sys.skew_observable()], sys.generators(), &tol()).unwrap();
        let by_algebra = stabilize(&[sys.skew_observable()], &l, &tol()).unwrap();
        prop_assert_eq!(by_generators.dim(), by_algebra.dim());
        prop_assert!(by_generators.same_as(&by_algebra, &tol()));
    }

    #[test]
    fn last_basis_element_is_needed(seed in any::<u64>(), n in 2usize..5) {
        let sys = weak_system(seed, n);
        let v = observability_space(&sys, &tol()).unwrap();
        prop_assume!(v.dim() > 1);
        let trimmed = Subspace::span(n, &v.basis()[..v.dim() - 1], &tol()).unwrap();
        let l = dynamical_algebra(&sys, &tol()).unwrap();
        let stable = trimmed.basis().iter().all(|f| {
            l.basis().iter().all(|b| trimmed.contains(&commutator(b, f).unwrap(), &tol()))
        });
        prop_assert!(!(stable && trimmed.contains(&sys.skew_observable(), &tol())));
    }

    #[test]
    fn sequence_is_monotone(seed in any::<u64>(), n in 2usize..5) {
        let sys = weak_system(seed, n);
        let mut prev = generalized_observability_space(&sys, 0, None, &tol()).unwrap();
        for k in 1..5 {
            let next = generalized_observability_space(&sys, k, None, &tol()).unwrap();
            prop_assert!(next.contains_subspace(&prev, &tol()));
            prev = next;
        }
    }

    #[test]
    fn report_consistency(seed in any::<u64>(), n in 2usize..5, gens in 1usize..3) {
        let sys = system(seed, n, gens);
        let r = analyze(&sys, 4, &tol()).unwrap();
        prop_assert_eq!(r.observable_one_step, r.dims_vk[0] == n * n - 1);
        let flags: Vec<bool> = r.observable_k.values().copied().collect();
        prop_assert!(flags.windows(2).all(|w| !w[0] || w[1]));
        if r.controllable {
            prop_assert!(r.observable_one_step);
        }
        if r.first_order_condition {
            prop_assert!(r.observable_one_step);
        }
    }

    #[test]
    fn indistinguishable_at_k_implies_lower_orders(seed in any::<u64>(), n in 2usize..5) {
        let sys = confined_system(seed, n);
        let v3 = generalized_observability_space(&sys, 3, None, &tol()).unwrap();
        prop_assert!(!v3.is_full());
        // a difference orthogonal to V_3
        let dir = qobserve::gellmann::su_basis::<f64>(n)
            .into_iter()
            .map(|e| v3.residual(&e))
            .find(|r| r.norm() > 1e-3)
            .unwrap();
        let delta = dir.mul_neg_i().hermitian_part().scale(0.05 / dir.norm());
        let rho1 = random::density::<f64, _>(&mut seeded(seed ^ 9), n);
        let rho2 = &rho1 + &delta;
        for k in 1..=3 {
            prop_assert!(indistinguishable(&sys, &rho1, &rho2, k, &tol()).unwrap().indistinguishable);
        }
    }

    #[test]
    fn evolution_preserves_purity(seed in any::<u64>(), n in 2usize..5, steps in 1usize..5) {
        let sys = system(seed, n, 2);
        let mut rng = seeded(seed ^ 5);
        let rho = DensityState::trace_one(random::density(&mut rng, n), &tol()).unwrap();
        let controls: Vec<Vec<f64>> = (0..steps).map(|i| vec![(i as f64).sin() * 2.0, 1.5 - i as f64]).collect();
        let out = evolve(&rho, &sys, 1.7, &controls).unwrap();
        let purity = |m: &Matrix| trace_product(m, m).re;
        prop_assert!((purity(&out.matrix) - purity(&rho.matrix)).abs() < 1e-10);
        prop_assert!((out.matrix.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_properties(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = seeded(seed);
        let (s, _) = random::clustered_observable::<f64, _>(&mut rng, n);
        let sd = spectral(&s, &tol()).unwrap();
        let rho = DensityState::trace_one(random::density(&mut rng, n), &tol()).unwrap();
        let p = project(&rho, &sd);
        let pp = project(&p, &sd);
        prop_assert!((&pp.matrix - &p.matrix).max_abs() < 1e-12);
        prop_assert!((p.matrix.trace().re - 1.0).abs() < 1e-12);
        // self-dual: Tr(P(a) b) = Tr(a P(b))
        let a = random::hermitian::<f64, _>(&mut rng, n);
        let lhs = trace_product(&sd.pinch(&a), &rho.matrix).re;
        let rhs = trace_product(&a, &sd.pinch(&rho.matrix)).re;
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn output_shift_is_constant(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = seeded(seed);
        let hams: Vec<Matrix> = (0..2).map(|_| random::hermitian(&mut rng, n)).collect();
        let raw = random::hermitian::<f64, _>(&mut rng, n);
        let sys = System::from_hamiltonians(&hams, &raw, "shifted", &tol()).unwrap();
        let rho = DensityState::trace_one(random::density(&mut rng, n), &tol()).unwrap();
        let script = ExperimentScript {
            segments: (0..3)
                .map(|i| Segment {
                    action: Action::Evolve { duration: 0.5 + i as f64, controls: vec![vec![1.0, -0.5], vec![0.3, 2.0]] },
                    measure_after: true,
                })
                .collect(),
            observables: None,
            back_action: ScriptBackAction::VonNeumann,
        };
        let a = run_experiment(&rho, &sys, &script, &tol()).unwrap();
        let b = run_experiment(&rho.to_traceless(), &sys, &script, &tol()).unwrap();
        let shift = raw.trace().re / n as f64;
        for k in 0..3 {
            prop_assert!((a.outputs[k] - a.outputs_shifted[k] - shift).abs() < 1e-12);
            prop_assert!((a.outputs[k] - b.outputs[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn indistinguishable_states_give_equal_experiments(seed in any::<u64>(), n in 2usize..5) {
        let sys = confined_system(seed, n);
        let k = 2;
        let vk = generalized_observability_space(&sys, k, None, &tol()).unwrap();
        prop_assert!(!vk.is_full());
        let dir = qobserve::gellmann::su_basis::<f64>(n)
            .into_iter()
            .map(|e| vk.residual(&e))
            .find(|r| r.norm() > 1e-3)
            .unwrap();
        let delta = dir.mul_neg_i().hermitian_part().scale(0.1 / dir.norm());
        let mut rng = seeded(seed ^ 17);
        let rho1 = random::traceless_hermitian::<f64, _>(&mut rng, n).scale(0.1);
        let rho2 = &rho1 + &delta;
        let a = DensityState::traceless(rho1, &tol()).unwrap();
        let b = DensityState::traceless(rho2, &tol()).unwrap();
        for trial in 0..5 {
            let xs = qobserve::sample_propagators(&sys, k, seed ^ trial, 6).unwrap();
            let script = ExperimentScript::from_unitaries(xs);
            let ya = run_experiment(&a, &sys, &script, &tol()).unwrap();
            let yb = run_experiment(&b, &sys, &script, &tol()).unwrap();
            for (p, q) in ya.outputs.iter().zip(&yb.outputs) {
                prop_assert!((p - q).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sampled_outputs_follow_one_step_verdict(seed in any::<u64>(), n in 2usize..4) {
        let sys = weak_system(seed, n);
        let v = observability_space(&sys, &tol()).unwrap();
        let mut rng = seeded(seed ^ 23);
        let rho1 = random::density::<f64, _>(&mut rng, n);
        let s = sys.observable();

        // a pair differing inside V⊥ is never separated by the orbit
        if !v.is_full() {
            let dir = qobserve::gellmann::su_basis::<f64>(n)
                .into_iter()
                .map(|e| v.residual(&e))
                .find(|r| r.norm() > 1e-3)
                .unwrap();
            let rho2 = &rho1 + &dir.mul_neg_i().hermitian_part().scale(0.05 / dir.norm());
            prop_assert!(indistinguishable(&sys, &rho1, &rho2, 1, &tol()).unwrap().indistinguishable);
            let o1 = orbit_sample(&sys, &rho1, 100, seed, 8).unwrap();
            let o2 = orbit_sample(&sys, &rho2, 100, seed, 8).unwrap();
            for (a, b) in o1.iter().zip(&o2) {
                prop_assert!((trace_product(s, a).re - trace_product(s, b).re).abs() < 1e-9);
            }
        }

        // a pair differing along V is separated by some sample
        let along = v.basis()[v.dim() - 1].mul_neg_i().scale(0.05);
        let rho3 = &rho1 + &along;
        let verdict = indistinguishable(&sys, &rho1, &rho3, 1, &tol()).unwrap();
        prop_assert!(!verdict.indistinguishable);
        let o1 = orbit_sample(&sys, &rho1, 200, seed ^ 1, 8).unwrap();
        let o3 = orbit_sample(&sys, &rho3, 200, seed ^ 1, 8).unwrap();
        let gap = o1
            .iter()
            .zip(&o3)
            .map(|(a, b)| (trace_product(s, a).re - trace_product(s, b).re).abs())
            .fold(0.0, f64::max);
        prop_assert!(gap > 10.0 * tol().rank_tol, "gap {gap}");
    }

    #[test]
    fn permutation_design_is_full_rank(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = seeded(seed);
        // small integers so repeated diagonal values are common
        let d: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0..3) as f64).collect();
        prop_assume!(d.iter().any(|x| *x != d[0]));
        let design = qobserve::design_permutation_experiment(&Matrix::diagonal(&d), &tol()).unwrap();
        prop_assert_eq!(design.rank, n);
        prop_assert!(design.design_matrix.len() >= n);
        prop_assert_eq!(design.permutations[0].one_line.clone(), (0..n).collect::<Vec<_>>());
        prop_assert_eq!(design.multiplicities.iter().sum::<usize>(), n);
    }
}
