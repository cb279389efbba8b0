//! Target states and fidelities.

use alloc::vec;

use num_complex::Complex64;

use crate::protocols::{ProtocolKind, ProtocolParams, ProtocolPlan};
use crate::statekit::{
    check_qubit_normalization, inner_product, level, reduce_to_site, Basis, LevelScheme,
    SingleQubitDensity, StateVector,
};
use crate::{Error, Result};

/// Nearest-neighbour dimer tensors with boundary vectors `l = (z, 1)` and
/// `r = (0, 1)ᵀ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpsTensors {
    pub x0: [[f64; 2]; 2],
    pub x1: [[f64; 2]; 2],
    pub left: [f64; 2],
    pub right: [f64; 2],
}

impl MpsTensors {
    pub fn new(z: f64) -> Self {
        MpsTensors {
            x0: [[0.0, 0.0], [z, 1.0]],
            x1: [[0.0, 1.0], [0.0, 0.0]],
            left: [z, 1.0],
            right: [0.0, 1.0],
        }
    }

    /// `l · X_{i_1} ⋯ X_{i_N} · r`.
    pub fn contract(&self, occupations: &[u8]) -> f64 {
        let mut row = self.left;
        for &i in occupations {
            let x = if i == 0 { &self.x0 } else { &self.x1 };
            row = [
                row[0] * x[0][0] + row[1] * x[1][0],
                row[0] * x[0][1] + row[1] * x[1][1],
            ];
        }
        row[0] * self.right[0] + row[1] * self.right[1]
    }
}

/// `(|0 x 0 x …⟩ + |x 0 x 0 …⟩)/√2` with `x = |1̃⟩` in the three-level scheme
/// and `x = |1⟩` otherwise. Odd lengths are accepted.
pub fn ghz_target(n_sites: usize, scheme: LevelScheme) -> Result<StateVector> {
    if n_sites < 2 {
        return Err(Error::validation("GHZ targets need at least two sites"));
    }
    let excited = match scheme {
        LevelScheme::TwoLevel => level::RYDBERG,
        LevelScheme::ThreeLevel => level::HYPERFINE,
    };
    let even: vec::Vec<u8> = (1..=n_sites).map(|s| if s % 2 == 0 { excited } else { 0 }).collect();
    let odd: vec::Vec<u8> = (1..=n_sites).map(|s| if s % 2 == 1 { excited } else { 0 }).collect();
    let mut psi = StateVector::ground_state(n_sites, scheme)?;
    let basis = *psi.basis();
    let amp = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let amps = psi.amplitudes_mut();
    amps[0] = Complex64::new(0.0, 0.0);
    amps[basis.encode(&even)?] = amp;
    amps[basis.encode(&odd)?] = amp;
    Ok(psi)
}

/// Normalised `Π_k (1 + z P σ⁺_k) |0…0⟩`, where `P` forbids excitations
/// within `radius` sites of `k`; operators act from site N down to site 1.
pub fn dimer_target_direct(n_sites: usize, z: f64, radius: usize) -> Result<StateVector> {
    if radius == 0 {
        return Err(Error::parameter("blockade radius must be at least 1"));
    }
    let mut psi = StateVector::ground_state(n_sites, LevelScheme::TwoLevel)?;
    let basis = *psi.basis();
    for site in (1..=n_sites).rev() {
        let stride = basis.stride(site);
        let lo = site.saturating_sub(radius).max(1);
        let hi = (site + radius).min(n_sites);
        let amps = psi.amplitudes_mut();
        for i in 0..basis.dim() {
            if basis.digit(i, site) != 0 || amps[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            if (lo..=hi).any(|q| q != site && basis.digit(i, q) == level::RYDBERG) {
                continue;
            }
            let add = amps[i] * z;
            amps[i + stride] += add;
        }
    }
    psi.normalize()?;
    Ok(psi)
}

/// Nearest-neighbour dimer state from the matrix-product form.
pub fn dimer_target_mps(n_sites: usize, z: f64) -> Result<StateVector> {
    let basis = Basis::new(n_sites, LevelScheme::TwoLevel)?;
    let tensors = MpsTensors::new(z);
    let amplitudes = (0..basis.dim())
        .map(|i| Complex64::new(tensors.contract(&basis.decode(i)), 0.0))
        .collect();
    let mut psi = StateVector::from_amplitudes(n_sites, LevelScheme::TwoLevel, amplitudes)?;
    psi.normalize()?;
    Ok(psi)
}

/// `|⟨target|state⟩|²`, clamped to `[0, 1]`.
pub fn fidelity_pure(target: &StateVector, state: &StateVector) -> Result<f64> {
    Ok(inner_product(target, state)?.norm_sqr().clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩` for a normalised single-qubit ket.
pub fn fidelity_mixed_single_qubit(target: [Complex64; 2], rho: &SingleQubitDensity) -> Result<f64> {
    check_qubit_normalization(target[0], target[1])?;
    Ok(rho.expectation(target).clamp(0.0, 1.0))
}

/// What a protocol's output is scored against.
#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolTarget {
    Pure(StateVector),
    /// Reduced state of `site` compared with `ket`.
    Qubit { site: usize, ket: [Complex64; 2] },
}

impl ProtocolTarget {
    /// GHZ and dimer plans target a pure state; transport targets the input
    /// qubit on the last site.
    pub fn for_plan(plan: &ProtocolPlan) -> Result<Self> {
        match (plan.kind(), plan.params()) {
            (ProtocolKind::Ghz2 | ProtocolKind::Ghz3, _) => {
                Ok(ProtocolTarget::Pure(ghz_target(plan.n_sites(), plan.scheme())?))
            }
            (ProtocolKind::DimerMps, &ProtocolParams::DimerMps { z, radius }) => Ok(ProtocolTarget::Pure(
                dimer_target_direct(plan.n_sites(), z, radius)?,
            )),
            (ProtocolKind::Transport, &ProtocolParams::Transport { alpha, beta }) => Ok(ProtocolTarget::Qubit {
                site: plan.n_sites(),
                ket: [alpha, beta],
            }),
            _ => Err(Error::validation("plan parameters do not match its kind")),
        }
    }

    pub fn fidelity(&self, state: &StateVector) -> Result<f64> {
        match self {
            ProtocolTarget::Pure(target) => fidelity_pure(target, state),
            ProtocolTarget::Qubit { site, ket } => {
                fidelity_mixed_single_qubit(*ket, &reduce_to_site(state, *site)?)
            }
        }
    }
}

/// Fidelity of a protocol output with the protocol's own target.
pub fn protocol_fidelity(plan: &ProtocolPlan, state: &StateVector) -> Result<f64> {
    ProtocolTarget::for_plan(plan)?.fidelity(state)
}
