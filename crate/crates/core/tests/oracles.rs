//! End-to-end checks against closed-form two-atom results and the ideal
//! blockade limit.

use num_complex::Complex64;
use rydchain_core::analytics::{ghz_fidelity_two_atoms, two_atom_coefficients};
use rydchain_core::dynamics::{apply_realistic_pulse_in_place, HamiltonianSpec, InteractionDiagonal, InteractionRange};
use rydchain_core::lattice::CouplingMatrix;
use rydchain_core::montecarlo::{run_sweep, ProtocolSpec, SweepSpec};
use rydchain_core::protocols::{execute, plan_dimer_mps, plan_ghz, plan_transport, Backend, ProtocolKind};
use rydchain_core::statekit::{LevelScheme, StateVector};
use rydchain_core::targets::{dimer_target_direct, protocol_fidelity};

fn realistic(n: usize, v0: f64, range: InteractionRange) -> Backend {
    Backend::Realistic {
        hamiltonian: HamiltonianSpec::resonant(CouplingMatrix::ideal_chain(n, v0), range),
        omega: 1.0,
    }
}

#[test]
fn ghz2_pair_follows_closed_form() {
    let plan = plan_ghz(2, LevelScheme::TwoLevel).unwrap();
    for i in 0..100 {
        let ratio = 0.1 + (100.0 - 0.1) * i as f64 / 99.0;
        let out = execute(&plan, &realistic(2, ratio, InteractionRange::Full), plan.initial_state().unwrap()).unwrap();
        let simulated = protocol_fidelity(&plan, &out).unwrap();
        let expected = ghz_fidelity_two_atoms(ratio, 1.0).unwrap();
        assert!((simulated - expected).abs() < 1e-10, "ratio {ratio}: {simulated} vs {expected}");
    }
}

#[test]
fn sweep_reproduces_pair_curve() {
    let grid: Vec<f64> = (1..=30).map(|k| k as f64).collect();
    let spec = SweepSpec::new(ProtocolSpec::new(ProtocolKind::Ghz2), vec![2], grid.clone());
    for (outcome, ratio) in run_sweep(&spec).unwrap().iter().zip(grid) {
        let mean = outcome.result.as_ref().unwrap().stats.mean;
        assert!((mean - ghz_fidelity_two_atoms(ratio, 1.0).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn transport_pair_amplitudes_match_coefficients() {
    let plan = plan_transport(2, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    for i in 0..20 {
        let ratio = 0.5 + i as f64 * 2.5;
        let h = HamiltonianSpec::resonant(CouplingMatrix::ideal_chain(2, ratio), InteractionRange::Full);
        let coeffs = two_atom_coefficients(ratio, 1.0).unwrap();
        let run = |occ: &[u8]| {
            let mut psi = StateVector::basis_state(LevelScheme::TwoLevel, occ).unwrap();
            let diag = InteractionDiagonal::new(psi.basis(), &h).unwrap();
            for step in plan.steps() {
                apply_realistic_pulse_in_place(&mut psi, step, &diag, 1.0).unwrap();
            }
            psi
        };
        let from_ground = run(&[0, 0]);
        let from_excited = run(&[1, 0]);
        let close = |a: Complex64, b: f64| (a.norm() - b).abs() < 1e-10;
        assert!(close(from_ground.amplitude(&[0, 1]).unwrap(), coeffs.gamma.norm()), "ratio {ratio}");
        assert!(close(from_ground.amplitude(&[1, 1]).unwrap(), coeffs.gamma_prime.norm()));
        assert!(close(from_excited.amplitude(&[0, 0]).unwrap(), coeffs.delta_transport.norm()));
        assert!(close(from_excited.amplitude(&[1, 1]).unwrap(), coeffs.delta_prime.norm()));
        assert!(close(from_excited.amplitude(&[0, 1]).unwrap(), coeffs.delta_double_prime.norm()));
    }
}

#[test]
fn weak_and_strong_interaction_limits() {
    let fidelity = |kind: LevelScheme, n: usize, ratio: f64| {
        let plan = plan_ghz(n, kind).unwrap();
        let out = execute(&plan, &realistic(n, ratio, InteractionRange::Full), plan.initial_state().unwrap()).unwrap();
        protocol_fidelity(&plan, &out).unwrap()
    };
    assert!((fidelity(LevelScheme::ThreeLevel, 2, 1e-4) - 0.25).abs() < 1e-3);
    assert!(fidelity(LevelScheme::ThreeLevel, 2, 1e4) >= 0.999);
    assert!(fidelity(LevelScheme::TwoLevel, 4, 1e4) < 0.1);
}

#[test]
fn ideal_backend_reaches_targets() {
    for n in 2..=8 {
        let plan = plan_ghz(n, LevelScheme::ThreeLevel).unwrap();
        let out = execute(&plan, &Backend::Ideal, plan.initial_state().unwrap()).unwrap();
        assert!((protocol_fidelity(&plan, &out).unwrap() - 1.0).abs() < 1e-10, "ghz3 n={n}");
        for z in [0.1, 1.0, 10.0] {
            for radius in [1, 2] {
                let plan = plan_dimer_mps(n, z, radius).unwrap();
                let out = execute(&plan, &Backend::Ideal, plan.initial_state().unwrap()).unwrap();
                let f = protocol_fidelity(&plan, &out).unwrap();
                assert!((f - 1.0).abs() < 1e-10, "mps n={n} z={z} R={radius}: {f}");
            }
        }
        let plan = plan_transport(n, Complex64::new(0.6, 0.0), Complex64::new(0.0, -0.8)).unwrap();
        let out = execute(&plan, &Backend::Ideal, plan.initial_state().unwrap()).unwrap();
        assert!((protocol_fidelity(&plan, &out).unwrap() - 1.0).abs() < 1e-10, "transport n={n}");
    }
}

#[test]
fn strong_nearest_neighbour_blockade_matches_ideal() {
    for n in 2..=6 {
        for plan in [
            plan_ghz(n, LevelScheme::TwoLevel).unwrap(),
            plan_ghz(n, LevelScheme::ThreeLevel).unwrap(),
            plan_dimer_mps(n, 1.0, 1).unwrap(),
            plan_transport(n, Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)).unwrap(),
        ] {
            let ideal = execute(&plan, &Backend::Ideal, plan.initial_state().unwrap()).unwrap();
            let real = execute(
                &plan,
                &realistic(n, 1e6, InteractionRange::NearestNeighborOnly),
                plan.initial_state().unwrap(),
            )
            .unwrap();
            let overlap = ideal.inner(&real).unwrap().norm_sqr();
            assert!(overlap >= 1.0 - 1e-6, "{:?} n={n}: {overlap}", plan.kind());
        }
    }
}

#[test]
fn ideal_dimer_amplitude_ratios_are_powers_of_z() {
    for n in 1..=8 {
        for z in [0.1, 1.0, 10.0, 0.5] {
            let plan = plan_dimer_mps(n, z, 1).unwrap();
            let out = execute(&plan, &Backend::Ideal, plan.initial_state().unwrap()).unwrap();
            let basis = *out.basis();
            let vacuum = out.amplitudes()[0];
            for (i, amp) in out.amplitudes().iter().enumerate() {
                let occ = basis.decode(i);
                let allowed = occ.windows(2).all(|w| w[0] + w[1] < 2);
                if allowed {
                    let expected = vacuum * z.powi(basis.rydberg_count(i) as i32);
                    assert!((amp - expected).norm() <= 1e-12 * expected.norm().max(1.0), "n={n} z={z} i={i}");
                } else {
                    assert!(amp.norm() < 1e-12);
                }
            }
            let direct = dimer_target_direct(n, z, 1).unwrap();
            assert!((direct.inner(&out).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
