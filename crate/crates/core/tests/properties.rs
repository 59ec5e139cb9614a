use num_complex::Complex64 as C64;
use proptest::prelude::*;
use symwit::compiler::{compile, permutation_sum, sign_expansion, Coeff, LocalTerm, Schedule};
use symwit::counts::{evaluate_counts, simulate_counts, CountRecord, CountsDataset};
use symwit::linalg::{Mat2, StateVector};
use symwit::optimize::{max_bisep_seesaw, max_ppt, optimize_witness, setting_basis, PptProblem, SolverConfig};
use symwit::optimize::WitnessOptimizationProblem;
use symwit::symmetric::{collective_j, dicke, is_permutation_invariant, symmetrize, CollectiveAxis, DickeLabel};
use symwit::witness::{catalog, expectation, noise_tolerance, NoiseModel, Target};
use symwit::DenseOperator;

fn hermitian(n: usize) -> impl Strategy<Value = DenseOperator> {
    let d = 1usize << n;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
        let a = DenseOperator::new(n, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap();
        (&a + &a.adjoint()).scale(0.5)
    })
}

fn mat2() -> impl Strategy<Value = Mat2> {
    prop::array::uniform4((-1.0f64..1.0, -1.0f64..1.0))
        .prop_map(|v| [[C64::new(v[0].0, v[0].1), C64::new(v[1].0, v[1].1)], [C64::new(v[2].0, v[2].1), C64::new(v[3].0, v[3].1)]])
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| StateVector::normalized(n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dicke_states_are_normalized_jz_eigenstates(n in 1usize..=8, m_frac in 0.0f64..=1.0) {
        let m = (m_frac * n as f64).round() as usize;
        let psi = dicke(n, m).unwrap();
        prop_assert!((psi.inner(&psi).unwrap().re - 1.0).abs() < 1e-12);
        let jz = collective_j(n, CollectiveAxis::Z).unwrap();
        let v = jz.expectation(&psi).unwrap().re;
        prop_assert!((v - (n as f64 / 2.0 - m as f64)).abs() < 1e-12);
    }

    #[test]
    fn sign_expansion_matches_permutation_sum(ops in prop::collection::vec(mat2(), 1..=5)) {
        let lhs = permutation_sum(&ops).unwrap();
        prop_assert!(lhs.max_abs_diff(&sign_expansion(&ops)).unwrap() < 1e-10);
    }

    #[test]
    fn symmetrize_is_an_idempotent_projection(a in hermitian(3)) {
        let s = symmetrize(&a);
        prop_assert!(is_permutation_invariant(&s));
        prop_assert!(symmetrize(&s).max_abs_diff(&s).unwrap() < 1e-12);
        prop_assert!((s.trace() - a.trace()).norm() < 1e-12);
    }

    #[test]
    fn compiled_schedules_reconstruct(a in hermitian(3)) {
        let s = symmetrize(&a);
        let schedule = compile(&s).unwrap();
        prop_assert!(schedule.reconstruct().max_abs_diff(&s).unwrap() < 1e-10);
        prop_assert!(schedule.settings().len() <= 25);
    }

    #[test]
    fn partial_transpose_is_an_involution(a in hermitian(3), side in prop::sample::subsequence(vec![0usize, 1, 2], 1..=2)) {
        let pt = a.partial_transpose(&side).unwrap();
        prop_assert!(pt.partial_transpose(&side).unwrap().max_abs_diff(&a).unwrap() == 0.0);
        prop_assert!((pt.trace() - a.trace()).norm() < 1e-12);
    }

    #[test]
    fn decimals_are_exact(int in 0i64..100_000, frac in 0u32..10_000) {
        let c = Coeff::decimal(&format!("{int}.{frac:04}"));
        prop_assert_eq!(c, Coeff::ratio(int * 10_000 + frac as i64, 10_000));
    }

    #[test]
    fn witness_vanishes_at_the_noise_threshold(k in 0usize..9) {
        let names = ["WP_D63", "WP3_D63", "WP2_D63", "WI2_D63", "WI2_D5", "WP_D41", "WI3_D41", "WP_D42", "WP3_D42"];
        let w = catalog(names[k]).unwrap();
        let noise = NoiseModel::white(w.num_qubits());
        let target = DenseOperator::projector(w.target_state());
        let p = noise_tolerance(&w, &noise, &target).unwrap();
        let mut rho = target.scale(1.0 - p);
        rho.add_scaled(p, noise.rho()).unwrap();
        prop_assert!(expectation(&w, &rho).unwrap().abs() < 1e-9);
    }

    #[test]
    fn fidelity_bound_never_exceeds_fidelity(psi in state(4), weight in 0.0f64..1.0) {
        let w = catalog("WP3_D42").unwrap();
        let mut rho = DenseOperator::projector(w.target_state()).scale(1.0 - weight);
        rho.add_scaled(weight, &DenseOperator::projector(&psi)).unwrap();
        let fidelity = rho.expectation(w.target_state()).unwrap().re;
        let bound = symwit::witness::fidelity_bound(&w, expectation(&w, &rho).unwrap()).unwrap();
        prop_assert!(bound <= fidelity + 1e-9);
    }

    #[test]
    fn counts_evaluation_is_linear(seed in 0u64..1000, shots in 10u64..500) {
        let w = catalog("WP3_D42").unwrap();
        let schedule = w.schedule().unwrap();
        let data = simulate_counts(&DenseOperator::projector(w.target_state()), &schedule, shots, seed).unwrap();
        let base = evaluate_counts(&schedule, &data, None, 0, 0).unwrap();
        let doubled = evaluate_counts(&schedule.scaled(Coeff::int(2)), &data, None, 0, 0).unwrap();
        prop_assert_eq!(doubled.witness_value, 2.0 * base.witness_value);
        let sum: f64 = base.per_term.iter().map(|t| t.contribution).sum();
        prop_assert!((sum - base.witness_value).abs() < 1e-12);
    }

    #[test]
    fn ndjson_round_trip(records in prop::collection::vec((prop::array::uniform3(-3i64..=3), prop::collection::vec(any::<bool>(), 3), 0u64..1000), 1..20)) {
        let records: Vec<CountRecord> = records
            .into_iter()
            .filter(|(v, _, _)| *v != [0, 0, 0])
            .map(|(v, minus, count)| CountRecord { setting: v.map(|x| x as f64), minus, count })
            .collect();
        prop_assume!(!records.is_empty());
        let data = CountsDataset::new(3, records).unwrap();
        let back = CountsDataset::from_ndjson(&data.to_ndjson()).unwrap();
        prop_assert_eq!(back, data);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ppt_bounds_the_seesaw(a in hermitian(3), k in 0usize..3) {
        let m = symmetrize(&a);
        let config = SolverConfig { seesaw_restarts: 10, ..SolverConfig::default() };
        let ppt = max_ppt(&PptProblem { observable: m.clone(), bipartition: vec![k] }, &config).unwrap();
        let seesaw = max_bisep_seesaw(&m, &[k], &config).unwrap();
        prop_assert!(ppt.value >= seesaw.value - 1e-6, "{} < {}", ppt.value, seesaw.value);
        prop_assert!(ppt.report.min_eigenvalue_slack >= -1e-8);
        prop_assert!(seesaw.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn optimized_witnesses_satisfy_the_constraints(axes in prop::sample::select(vec!["z", "xy", "xz", "xyz"]), nw in any::<bool>()) {
        use CollectiveAxis::{X, Y, Z};
        let axes: Vec<CollectiveAxis> = axes.chars().map(|c| match c { 'x' => X, 'y' => Y, _ => Z }).collect();
        let n = 4;
        let target = dicke(n, 2).unwrap();
        let noise = if nw {
            // A custom noise state: equal mixture of the two neighbouring Dicke states.
            let mut rho = DenseOperator::projector(&dicke(n, 1).unwrap()).scale(0.5);
            rho.add_scaled(0.5, &DenseOperator::projector(&dicke(n, 3).unwrap())).unwrap();
            NoiseModel::custom("neighbours", rho).unwrap()
        } else {
            NoiseModel::white(n)
        };
        let problem = WitnessOptimizationProblem {
            name: "p".into(),
            target: Target::Dicke(DickeLabel::new(n, 2).unwrap()),
            noise,
            basis: setting_basis(n, &axes, false),
        };
        match optimize_witness(&problem, &SolverConfig::default()) {
            Ok((w, report)) => {
                let value = expectation(&w, &DenseOperator::projector(&target)).unwrap();
                prop_assert!((value + 1.0).abs() < 1e-9);
                prop_assert!(w.lmi_min_eigenvalue(w.alpha().unwrap()).unwrap() >= -1e-9);
                prop_assert!(report.converged && report.gap < 1e-6);
            }
            Err(e) => prop_assert!(matches!(e, symwit::Error::Infeasible(_)), "{e}"),
        }
    }
}

#[test]
fn single_term_schedule_counts() {
    // (σ_z + 𝟙)^{⊗2} on |00⟩ is 4.
    let s = Schedule::new(2, [LocalTerm::from_vector(2, Coeff::int(1), [0.0, 0.0, 1.0], 1.0)]);
    let data = simulate_counts(&DenseOperator::projector(&StateVector::basis(2, 0).unwrap()), &s, 50, 0).unwrap();
    assert_eq!(evaluate_counts(&s, &data, None, 0, 0).unwrap().witness_value, 4.0);
}
