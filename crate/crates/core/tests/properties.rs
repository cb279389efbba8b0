//! Property-based invariants.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rydchain_core::analytics::{fit_exponential_decay, two_atom_coefficients};
use rydchain_core::dynamics::{
    apply_blockaded_gate, apply_ideal_gate, apply_realistic_pulse, HamiltonianSpec, InteractionRange, PulseStep,
    Transition,
};
use rydchain_core::lattice::{coupling_matrix, sample_configuration, CouplingMatrix, DisorderSpec, LatticeSpec};
use rydchain_core::montecarlo::{aggregate, realization_seed};
use rydchain_core::protocols::{
    mps_area_schedule, mps_area_schedule_closed_form, mps_area_schedule_polynomial, plan_transport,
};
use rydchain_core::statekit::{reduce_to_site, LevelScheme, StateVector};
use rydchain_core::targets::{dimer_target_direct, dimer_target_mps};

fn random_state(n: usize, scheme: LevelScheme, seeds: &[(f64, f64)]) -> StateVector {
    let dim = scheme.local_dim().pow(n as u32);
    let amps = (0..dim)
        .map(|i| {
            let (re, im) = seeds[i % seeds.len()];
            Complex64::new(re + 0.01 * i as f64, im)
        })
        .collect();
    let mut psi = StateVector::from_amplitudes(n, scheme, amps).unwrap();
    psi.normalize().unwrap();
    psi
}

fn amplitude_seeds() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..16)
}

fn transition_for(scheme: LevelScheme, upper: bool) -> Transition {
    if upper && scheme == LevelScheme::ThreeLevel {
        Transition::RydbergHyperfine
    } else {
        Transition::GroundRydberg
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(
        n in 1usize..6,
        three in any::<bool>(),
        upper in any::<bool>(),
        site_pick in 0usize..6,
        theta in -PI..PI,
        ratio in 0.1f64..50.0,
        seeds in amplitude_seeds(),
    ) {
        let scheme = if three { LevelScheme::ThreeLevel } else { LevelScheme::TwoLevel };
        let psi = random_state(n, scheme, &seeds);
        let step = PulseStep::literal(site_pick % n + 1, transition_for(scheme, upper), theta).unwrap();
        let h = HamiltonianSpec::resonant(CouplingMatrix::ideal_chain(n, ratio), InteractionRange::Full);
        for out in [
            apply_ideal_gate(&psi, &step).unwrap(),
            apply_blockaded_gate(&psi, &step, 1).unwrap(),
            apply_realistic_pulse(&psi, &step, &h, 1.0).unwrap(),
        ] {
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_step_undoes_ideal_gate(
        n in 1usize..6,
        site_pick in 0usize..6,
        theta in -PI..PI,
        seeds in amplitude_seeds(),
    ) {
        let psi = random_state(n, LevelScheme::TwoLevel, &seeds);
        let step = PulseStep::literal(site_pick % n + 1, Transition::GroundRydberg, theta).unwrap();
        let back = apply_ideal_gate(&apply_ideal_gate(&psi, &step).unwrap(), &step.inverse()).unwrap();
        let dev = psi.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-12);
    }

    #[test]
    fn reduced_density_is_a_state(n in 1usize..6, site_pick in 0usize..6, seeds in amplitude_seeds()) {
        let psi = random_state(n, LevelScheme::TwoLevel, &seeds);
        let rho = reduce_to_site(&psi, site_pick % n + 1).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let [lo, hi] = rho.eigenvalues();
        prop_assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
    }

    #[test]
    fn mps_and_direct_dimer_states_agree(n in 1usize..10, z in -10.0f64..10.0) {
        let a = dimer_target_mps(n, z).unwrap();
        let b = dimer_target_direct(n, z, 1).unwrap();
        let dev = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev <= 1e-12);
    }

    #[test]
    fn area_solvers_agree(n in 1usize..13, z in 0.05f64..12.0, radius in 1usize..4) {
        let rec = mps_area_schedule(n, z, radius).unwrap();
        prop_assert!(rec.relation_residual() < 1e-10);
        let poly = mps_area_schedule_polynomial(n, z, radius).unwrap();
        for (a, b) in rec.thetas.iter().zip(&poly.thetas) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        if radius == 1 {
            let closed = mps_area_schedule_closed_form(n, z).unwrap();
            for (a, b) in rec.thetas.iter().zip(&closed.thetas) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coupling_matrix_is_symmetric_with_zero_diagonal(n in 2usize..8, seed in any::<u64>()) {
        let spec = LatticeSpec::new(n, 4.1, 6.9).unwrap();
        let config = sample_configuration(&spec, &DisorderSpec::ANISOTROPIC, seed).unwrap();
        let v = coupling_matrix(&config, 6.9, 4.1).unwrap();
        for k in 0..n {
            prop_assert_eq!(v.get(k, k), 0.0);
            for m in 0..n {
                prop_assert_eq!(v.get(k, m), v.get(m, k));
                prop_assert!(v.get(k, m) >= 0.0);
            }
        }
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(n in 2usize..8, seed in any::<u64>()) {
        let spec = LatticeSpec::new(n, 4.1, 1.0).unwrap();
        let a = sample_configuration(&spec, &DisorderSpec::ISOTROPIC, seed).unwrap();
        let b = sample_configuration(&spec, &DisorderSpec::ISOTROPIC, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn realization_seeds_separate_indices(master in any::<u64>(), n in 2usize..20, g in 0usize..100, r in 0usize..1000) {
        let s = realization_seed(master, n, g, r);
        prop_assert_eq!(s, realization_seed(master, n, g, r));
        prop_assert_ne!(s, realization_seed(master, n, g, r + 1));
        prop_assert_ne!(s, realization_seed(master, n, g + 1, r));
    }

    #[test]
    fn aggregate_bounds(values in prop::collection::vec(0.0f64..=1.0, 1..200)) {
        let stats = aggregate(&values).unwrap();
        prop_assert!(stats.min <= stats.mean && stats.mean <= stats.max);
        prop_assert!(stats.std_error >= 0.0);
        prop_assert!((0.0..=1.0).contains(&stats.mean));
    }

    #[test]
    fn two_atom_probabilities_sum_to_one(ratio in 0.01f64..200.0) {
        let c = two_atom_coefficients(ratio, 1.0).unwrap();
        let ghz = c.gamma.norm_sqr() + c.delta.norm_sqr();
        let transport = c.delta_transport.norm_sqr() + c.delta_prime.norm_sqr() + c.delta_double_prime.norm_sqr();
        prop_assert!((ghz - 1.0).abs() < 1e-12);
        prop_assert!((transport - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_decay_is_recovered(a in 0.5f64..1.0, b in 0.0f64..0.3) {
        let points: Vec<(f64, f64)> = (2..=7).map(|n| (n as f64, a * (-b * (n as f64 - 2.0)).exp())).collect();
        let fit = fit_exponential_decay(&points).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-8);
        prop_assert!((fit.b - b).abs() < 1e-8);
    }

    #[test]
    fn transport_accepts_any_normalized_qubit(phi in 0.0..TAU, theta in 0.0..PI, n in 2usize..6) {
        let alpha = Complex64::new((theta / 2.0).cos(), 0.0);
        let beta = Complex64::from_polar((theta / 2.0).sin(), phi);
        prop_assert!(plan_transport(n, alpha, beta).is_ok());
    }
}
