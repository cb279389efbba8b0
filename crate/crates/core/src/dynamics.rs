//! Gate backends and Hamiltonian builders.
//!
//! Two backends act on [`StateVector`]s:
//!
//! * the ideal constrained rotation `1 − P + P·exp(−iθσ_y)`, where `P`
//!   projects every site within the blockade radius onto levels other than
//!   the Rydberg level;
//! * exact evolution under one site's drive plus the full interaction
//!   Hamiltonian, applied block by block with a closed-form 2×2 exponential.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::lattice::CouplingMatrix;
use crate::statekit::{level, Basis, LevelScheme, StateVector, NORM_TOLERANCE};
use crate::{Error, Result};

/// Largest chain accepted by the dense Hamiltonian builders.
pub const DENSE_MAX_SITES: usize = 12;
/// Largest matrix accepted by [`ground_state_dense`].
pub const DENSE_EIGEN_MAX_DIM: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pair of levels coupled by a pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transition {
    /// `|0⟩ ↔ |1⟩`, subject to the blockade.
    GroundRydberg,
    /// `|1⟩ ↔ |1̃⟩`, three-level scheme only.
    RydbergHyperfine,
}

impl Transition {
    /// `(lower, upper)` levels; the rotation maps `lower → upper` for θ > 0.
    pub const fn levels(self) -> (u8, u8) {
        match self {
            Transition::GroundRydberg => (level::GROUND, level::RYDBERG),
            Transition::RydbergHyperfine => (level::RYDBERG, level::HYPERFINE),
        }
    }

    pub const fn code(self) -> &'static str {
        match self {
            Transition::GroundRydberg => "01",
            Transition::RydbergHyperfine => "12",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "01" => Some(Transition::GroundRydberg),
            "12" => Some(Transition::RydbergHyperfine),
            _ => None,
        }
    }

    pub fn check_scheme(self, scheme: LevelScheme) -> Result<()> {
        if self == Transition::RydbergHyperfine && scheme != LevelScheme::ThreeLevel {
            return Err(Error::Scheme(
                "the Rydberg-hyperfine transition needs the three-level scheme",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseLabel {
    /// Population inversion, θ = π/2.
    NamedPi,
    /// Equal splitting, θ = π/4.
    NamedHalfPi,
    /// Arbitrary angle.
    Literal,
}

/// One addressed square pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseStep {
    site: usize,
    transition: Transition,
    theta: f64,
    label: PulseLabel,
}

impl PulseStep {
    pub fn pi(site: usize, transition: Transition) -> Self {
        PulseStep {
            site,
            transition,
            theta: core::f64::consts::FRAC_PI_2,
            label: PulseLabel::NamedPi,
        }
    }

    pub fn half_pi(site: usize, transition: Transition) -> Self {
        PulseStep {
            site,
            transition,
            theta: core::f64::consts::FRAC_PI_4,
            label: PulseLabel::NamedHalfPi,
        }
    }

    /// Rotation by `theta ∈ [−π, π]`.
    pub fn literal(site: usize, transition: Transition, theta: f64) -> Result<Self> {
        if !(theta.is_finite() && libm::fabs(theta) <= core::f64::consts::PI) {
            return Err(Error::parameter(format!(
                "rotation angle {theta} is outside [-π, π]"
            )));
        }
        Ok(PulseStep {
            site,
            transition,
            theta,
            label: PulseLabel::Literal,
        })
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn transition(&self) -> Transition {
        self.transition
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn label(&self) -> PulseLabel {
        self.label
    }

    /// `(cos θ, sin θ)`, exact for the named pulses.
    pub fn cos_sin(&self) -> (f64, f64) {
        match self.label {
            PulseLabel::NamedPi => (0.0, 1.0),
            PulseLabel::NamedHalfPi => (core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2),
            PulseLabel::Literal => (libm::cos(self.theta), libm::sin(self.theta)),
        }
    }

    /// Same pulse with the opposite rotation.
    pub fn inverse(&self) -> Self {
        PulseStep {
            theta: -self.theta,
            label: PulseLabel::Literal,
            ..*self
        }
    }

    fn check(&self, basis: &Basis, scheme: LevelScheme) -> Result<()> {
        basis.check_site(self.site)?;
        self.transition.check_scheme(scheme)
    }
}

/// Instantaneous single-site gate on the `{|0⟩, |1⟩}` levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteGate {
    pub site: usize,
    pub matrix: [[Complex64; 2]; 2],
}

impl SiteGate {
    /// `i^power · σ_y`.
    pub fn phased_sigma_y(site: usize, power: u32) -> Self {
        let phase = match power % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let i = Complex64::new(0.0, 1.0);
        SiteGate {
            site,
            matrix: [[ZERO, -i * phase], [i * phase, ZERO]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InteractionRange {
    Full,
    NearestNeighborOnly,
}

impl InteractionRange {
    pub const fn code(self) -> &'static str {
        match self {
            InteractionRange::Full => "full",
            InteractionRange::NearestNeighborOnly => "nn",
        }
    }
}

/// Couplings, detunings and interaction range of the full Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    couplings: CouplingMatrix,
    detuning: Vec<f64>,
    range: InteractionRange,
}

impl HamiltonianSpec {
    pub fn new(couplings: CouplingMatrix, detuning: Vec<f64>, range: InteractionRange) -> Result<Self> {
        if detuning.len() != couplings.n_sites() {
            return Err(Error::Shape {
                expected: couplings.n_sites(),
                found: detuning.len(),
            });
        }
        if detuning.iter().any(|d| !d.is_finite()) {
            return Err(Error::parameter("detunings must be finite"));
        }
        Ok(HamiltonianSpec {
            couplings,
            detuning,
            range,
        })
    }

    /// Zero detuning on every site.
    pub fn resonant(couplings: CouplingMatrix, range: InteractionRange) -> Self {
        let n = couplings.n_sites();
        HamiltonianSpec {
            couplings,
            detuning: vec![0.0; n],
            range,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.couplings.n_sites()
    }

    pub fn couplings(&self) -> &CouplingMatrix {
        &self.couplings
    }

    pub fn detuning(&self) -> &[f64] {
        &self.detuning
    }

    pub fn range(&self) -> InteractionRange {
        self.range
    }

    /// Couplings with the range truncation applied.
    pub fn active_couplings(&self) -> CouplingMatrix {
        match self.range {
            InteractionRange::Full => self.couplings.clone(),
            InteractionRange::NearestNeighborOnly => self.couplings.nearest_neighbor_only(),
        }
    }
}

/// Interaction energy of every basis state, cached for repeated pulses.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionDiagonal {
    energies: Vec<f64>,
}

impl InteractionDiagonal {
    pub fn new(basis: &Basis, h: &HamiltonianSpec) -> Result<Self> {
        if h.n_sites() != basis.n_sites() {
            return Err(Error::Shape {
                expected: basis.n_sites(),
                found: h.n_sites(),
            });
        }
        let couplings = h.active_couplings();
        let n = basis.n_sites();
        let mut rydberg = vec![false; n];
        let energies = (0..basis.dim())
            .map(|idx| {
                for (s, slot) in rydberg.iter_mut().enumerate() {
                    *slot = basis.digit(idx, s + 1) == level::RYDBERG;
                }
                couplings.configuration_energy(&rydberg)
            })
            .collect();
        Ok(InteractionDiagonal { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

fn check_norm(before: f64, psi: &StateVector) -> Result<()> {
    let after = psi.norm_sqr();
    let drift = libm::fabs(after - before);
    if drift > NORM_TOLERANCE * before.max(1.0) {
        return Err(Error::Numerical {
            context: "norm preservation",
            residual: drift,
        });
    }
    Ok(())
}

/// Ideal gate with nearest-neighbour blockade.
pub fn apply_ideal_gate(psi: &StateVector, step: &PulseStep) -> Result<StateVector> {
    apply_blockaded_gate(psi, step, 1)
}

/// Ideal gate whose `0 ↔ 1` rotation is blocked by any Rydberg excitation
/// within `radius` sites of the target.
pub fn apply_blockaded_gate(psi: &StateVector, step: &PulseStep, radius: usize) -> Result<StateVector> {
    let mut out = psi.clone();
    apply_blockaded_gate_in_place(&mut out, step, radius)?;
    Ok(out)
}

pub fn apply_blockaded_gate_in_place(
    psi: &mut StateVector,
    step: &PulseStep,
    radius: usize,
) -> Result<()> {
    let basis = *psi.basis();
    step.check(&basis, psi.scheme())?;
    let before = psi.norm_sqr();
    let site = step.site();
    let n = basis.n_sites();
    let (lower, upper) = step.transition().levels();
    let stride = basis.stride(site);
    let shift = stride * usize::from(upper - lower);
    let (c, s) = step.cos_sin();
    let constrained = step.transition() == Transition::GroundRydberg;
    let lo = site.saturating_sub(radius).max(1);
    let hi = (site + radius).min(n);
    let amps = psi.amplitudes_mut();
    for i in 0..basis.dim() {
        if basis.digit(i, site) != lower {
            continue;
        }
        if constrained
            && (lo..=hi).any(|q| q != site && basis.digit(i, q) == level::RYDBERG)
        {
            continue;
        }
        let j = i + shift;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = a * c - b * s;
        amps[j] = a * s + b * c;
    }
    check_norm(before, psi)
}

/// Exact pulse under the drive on `step.site()` plus all interactions.
///
/// Detunings in `h` are ignored: protocol pulses are resonant.
pub fn apply_realistic_pulse(
    psi: &StateVector,
    step: &PulseStep,
    h: &HamiltonianSpec,
    omega: f64,
) -> Result<StateVector> {
    let diag = InteractionDiagonal::new(psi.basis(), h)?;
    let mut out = psi.clone();
    apply_realistic_pulse_in_place(&mut out, step, &diag, omega)?;
    Ok(out)
}

/// Block-wise evolution with a precomputed interaction diagonal.
pub fn apply_realistic_pulse_in_place(
    psi: &mut StateVector,
    step: &PulseStep,
    diag: &InteractionDiagonal,
    omega: f64,
) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::parameter(format!("Rabi frequency must be positive, got {omega}")));
    }
    let basis = *psi.basis();
    step.check(&basis, psi.scheme())?;
    if diag.energies.len() != basis.dim() {
        return Err(Error::Shape {
            expected: basis.dim(),
            found: diag.energies.len(),
        });
    }
    let before = psi.norm_sqr();
    let site = step.site();
    let (lower, upper) = step.transition().levels();
    let shift = basis.stride(site) * usize::from(upper - lower);
    let t = step.theta() / (2.0 * omega);
    let w = 2.0 * omega;
    let energies = &diag.energies;
    let amps = psi.amplitudes_mut();
    for i in 0..basis.dim() {
        let digit = basis.digit(i, site);
        if digit == lower {
            let j = i + shift;
            let u = block_propagator(energies[i], energies[j], w, t);
            let (a, b) = (amps[i], amps[j]);
            amps[i] = u[0][0] * a + u[0][1] * b;
            amps[j] = u[1][0] * a + u[1][1] * b;
        } else if digit != upper {
            amps[i] *= phase(-energies[i] * t);
        }
    }
    check_norm(before, psi)
}

fn phase(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

/// `exp(−it [[d1, −iw], [iw, d2]])`.
fn block_propagator(d1: f64, d2: f64, w: f64, t: f64) -> [[Complex64; 2]; 2] {
    let mean = 0.5 * (d1 + d2);
    let half_gap = 0.5 * (d1 - d2);
    let r = libm::hypot(half_gap, w);
    let global = phase(-mean * t);
    let (sin_rt, cos_rt) = (libm::sin(r * t), libm::cos(r * t));
    // sin(rt)/r → t as r → 0.
    let sinc = if r == 0.0 { t } else { sin_rt / r };
    let diag_shift = Complex64::new(0.0, half_gap * sinc);
    let off = w * sinc;
    [
        [global * (cos_rt - diag_shift), global * -off],
        [global * off, global * (cos_rt + diag_shift)],
    ]
}

/// Applies an instantaneous gate to the `{|0⟩, |1⟩}` levels of one site.
pub fn apply_site_gate_in_place(psi: &mut StateVector, gate: &SiteGate) -> Result<()> {
    let basis = *psi.basis();
    basis.check_site(gate.site)?;
    let before = psi.norm_sqr();
    let stride = basis.stride(gate.site);
    let m = gate.matrix;
    let amps = psi.amplitudes_mut();
    for i in 0..basis.dim() {
        if basis.digit(i, gate.site) != level::GROUND {
            continue;
        }
        let j = i + stride;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0][0] * a + m[0][1] * b;
        amps[j] = m[1][0] * a + m[1][1] * b;
    }
    check_norm(before, psi)
}

fn dense_basis(n_sites: usize) -> Result<Basis> {
    if n_sites > DENSE_MAX_SITES {
        return Err(Error::Capacity {
            n_sites,
            local_dim: 2,
            limit: 1 << DENSE_MAX_SITES,
        });
    }
    Basis::new(n_sites, LevelScheme::TwoLevel)
}

fn check_drives(omega_per_site: &[f64], n_sites: usize) -> Result<()> {
    if omega_per_site.len() != n_sites {
        return Err(Error::Shape {
            expected: n_sites,
            found: omega_per_site.len(),
        });
    }
    if omega_per_site.iter().any(|w| !w.is_finite()) {
        return Err(Error::parameter("Rabi frequencies must be finite"));
    }
    Ok(())
}

/// Adds `coefficient · σ_y` on `site` to `h`, wherever `allowed` holds for
/// the `|0⟩` partner index.
fn add_sigma_y(h: &mut DMatrix<Complex64>, basis: &Basis, site: usize, coefficient: f64, allowed: impl Fn(usize) -> bool) {
    let stride = basis.stride(site);
    for i in (0..basis.dim()).filter(|&i| basis.digit(i, site) == 0) {
        if !allowed(i) {
            continue;
        }
        let j = i + stride;
        h[(j, i)] += Complex64::new(0.0, coefficient);
        h[(i, j)] += Complex64::new(0.0, -coefficient);
    }
}

/// `Σ_k (2Ω_k σ_y^(k) + Δ_k n_k) + Σ_{k<m} V_km n_k n_m` on a two-level chain.
///
/// The drive uses the same `2Ω` matrix element as [`apply_realistic_pulse`].
pub fn build_full_hamiltonian(h: &HamiltonianSpec, omega_per_site: &[f64]) -> Result<DMatrix<Complex64>> {
    let basis = dense_basis(h.n_sites())?;
    check_drives(omega_per_site, h.n_sites())?;
    let diag = InteractionDiagonal::new(&basis, h)?;
    let dim = basis.dim();
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for i in 0..dim {
        let detuning: f64 = (1..=basis.n_sites())
            .filter(|&s| basis.digit(i, s) == level::RYDBERG)
            .map(|s| h.detuning()[s - 1])
            .sum();
        out[(i, i)] = Complex64::new(diag.energies[i] + detuning, 0.0);
    }
    for (k, &w) in omega_per_site.iter().enumerate() {
        if w != 0.0 {
            add_sigma_y(&mut out, &basis, k + 1, 2.0 * w, |_| true);
        }
    }
    Ok(out)
}

/// `Σ_k Ω_k P_{k−1} σ_y^(k) P_{k+1}`, optionally plus `(V0/64) Σ_k n_k n_{k+2}`.
pub fn build_effective_hamiltonian(
    n_sites: usize,
    omega_per_site: &[f64],
    include_nnn: bool,
    v0: f64,
) -> Result<DMatrix<Complex64>> {
    let basis = dense_basis(n_sites)?;
    check_drives(omega_per_site, n_sites)?;
    let dim = basis.dim();
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    let free = |i: usize, q: usize| q == 0 || q > n_sites || basis.digit(i, q) == 0;
    for (k, &w) in omega_per_site.iter().enumerate() {
        let site = k + 1;
        if w != 0.0 {
            add_sigma_y(&mut out, &basis, site, w, |i| free(i, site - 1) && free(i, site + 1));
        }
    }
    if include_nnn {
        for i in 0..dim {
            let pairs = (1..=n_sites.saturating_sub(2))
                .filter(|&s| basis.digit(i, s) == 1 && basis.digit(i, s + 2) == 1)
                .count();
            out[(i, i)] += Complex64::new(v0 / 64.0 * pairs as f64, 0.0);
        }
    }
    Ok(out)
}

/// Lowest eigenpair of a Hermitian matrix, returned as a two-level chain
/// state when the dimension is a power of two.
pub fn ground_state_dense(h: &DMatrix<Complex64>) -> Result<(f64, StateVector)> {
    let (energy, vector) = lowest_eigenpair(h)?;
    let dim = vector.len();
    if !dim.is_power_of_two() {
        return Err(Error::validation(format!(
            "dimension {dim} is not that of a two-level chain"
        )));
    }
    let n_sites = dim.trailing_zeros() as usize;
    let psi = StateVector::from_amplitudes(n_sites.max(1), LevelScheme::TwoLevel, vector.iter().copied().collect())
        .map_err(|_| Error::validation("a 1×1 matrix has no chain interpretation"))?;
    Ok((energy, psi))
}

/// Lowest eigenvalue and normalised eigenvector of a Hermitian matrix.
pub fn lowest_eigenpair(h: &DMatrix<Complex64>) -> Result<(f64, DVector<Complex64>)> {
    let dim = h.nrows();
    if dim == 0 || h.ncols() != dim {
        return Err(Error::Shape {
            expected: dim,
            found: h.ncols(),
        });
    }
    if dim > DENSE_EIGEN_MAX_DIM {
        return Err(Error::Capacity {
            n_sites: dim,
            local_dim: 1,
            limit: DENSE_EIGEN_MAX_DIM,
        });
    }
    let scale = h.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    let asym = (h - h.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if asym.is_nan() || asym > 1e-12 * scale {
        return Err(Error::validation("matrix is not Hermitian"));
    }
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let (k, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::Numerical {
            context: "eigen decomposition",
            residual: f64::NAN,
        })?;
    let mut v = eig.eigenvectors.column(k).into_owned();
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    let residual = (h * &v - &v * Complex64::new(energy, 0.0)).norm();
    if residual.is_nan() || residual > 1e-8 * scale {
        return Err(Error::Numerical {
            context: "ground state residual",
            residual,
        });
    }
    Ok((energy, v))
}

/// `exp(−i t H)` through the Hermitian eigendecomposition.
pub fn hermitian_propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| phase(-e * t)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statekit::{ground_state, inner_product};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis_state(occ: &[u8]) -> StateVector {
        StateVector::basis_state(LevelScheme::TwoLevel, occ).unwrap()
    }

    fn distance(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn ideal_spec(n: usize, v0: f64, range: InteractionRange) -> HamiltonianSpec {
        HamiltonianSpec::resonant(CouplingMatrix::ideal_chain(n, v0), range)
    }

    #[test]
    fn pi_pulse_on_free_atom() {
        let step = PulseStep::pi(1, Transition::GroundRydberg);
        let up = apply_ideal_gate(&basis_state(&[0]), &step).unwrap();
        assert!(distance(&up, &basis_state(&[1])) < 1e-15);
        let down = apply_ideal_gate(&basis_state(&[1]), &step).unwrap();
        assert!((down.amplitudes()[0] - c(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn toffoli_truth_table() {
        // Target site 2; flips exactly when both neighbours are in |0⟩.
        let step = PulseStep::pi(2, Transition::GroundRydberg);
        for idx in 0..8usize {
            let occ = [(idx >> 2) as u8 & 1, (idx >> 1) as u8 & 1, idx as u8 & 1];
            let out = apply_ideal_gate(&basis_state(&occ), &step).unwrap();
            let controls_free = occ[0] == 0 && occ[2] == 0;
            let mut expect = occ;
            if controls_free {
                expect[1] ^= 1;
            }
            let amp = out.amplitude(&expect).unwrap();
            assert!((amp.norm() - 1.0).abs() < 1e-15, "{occ:?}");
            if !controls_free {
                assert_eq!(amp, c(1.0));
            }
        }
    }

    #[test]
    fn ghz_entangling_step() {
        let input = StateVector::from_amplitudes(
            2,
            LevelScheme::TwoLevel,
            vec![c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)],
        )
        .unwrap();
        let out = apply_ideal_gate(&input, &PulseStep::pi(2, Transition::GroundRydberg)).unwrap();
        assert!((out.amplitude(&[0, 1]).unwrap() - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.amplitude(&[1, 0]).unwrap() - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn hyperfine_transition_needs_three_levels() {
        let psi = ground_state(2, LevelScheme::TwoLevel).unwrap();
        let step = PulseStep::pi(1, Transition::RydbergHyperfine);
        assert!(matches!(apply_ideal_gate(&psi, &step), Err(Error::Scheme(_))));
        let spec = ideal_spec(2, 1.0, InteractionRange::Full);
        assert!(matches!(
            apply_realistic_pulse(&psi, &step, &spec, 1.0),
            Err(Error::Scheme(_))
        ));
    }

    #[test]
    fn hyperfine_pulse_is_unconstrained() {
        let psi = StateVector::basis_state(LevelScheme::ThreeLevel, &[1, 1]).unwrap();
        let out = apply_ideal_gate(&psi, &PulseStep::pi(1, Transition::RydbergHyperfine)).unwrap();
        assert_eq!(out.amplitude(&[2, 1]).unwrap(), c(1.0));
    }

    #[test]
    fn blockade_radius_two() {
        let psi = basis_state(&[1, 0, 0]);
        let step = PulseStep::pi(3, Transition::GroundRydberg);
        assert_eq!(apply_blockaded_gate(&psi, &step, 1).unwrap().amplitude(&[1, 0, 1]).unwrap(), c(1.0));
        assert_eq!(apply_blockaded_gate(&psi, &step, 2).unwrap(), psi);
    }

    #[test]
    fn ideal_gate_inverse_restores_input() {
        let mut psi = ground_state(3, LevelScheme::ThreeLevel).unwrap();
        for (k, a) in psi.amplitudes_mut().iter_mut().enumerate() {
            *a = Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos());
        }
        psi.normalize().unwrap();
        for step in [
            PulseStep::literal(2, Transition::GroundRydberg, 0.9).unwrap(),
            PulseStep::literal(1, Transition::RydbergHyperfine, -2.1).unwrap(),
        ] {
            let there = apply_ideal_gate(&psi, &step).unwrap();
            let back = apply_ideal_gate(&there, &step.inverse()).unwrap();
            assert!(distance(&back, &psi) < 1e-12);
        }
    }

    #[test]
    fn literal_angle_range() {
        assert!(PulseStep::literal(1, Transition::GroundRydberg, 3.2).is_err());
        assert!(PulseStep::literal(1, Transition::GroundRydberg, f64::NAN).is_err());
        assert_eq!(PulseStep::half_pi(1, Transition::GroundRydberg).theta(), FRAC_PI_4);
    }

    #[test]
    fn realistic_without_interaction_matches_ideal_free_atom() {
        let spec = ideal_spec(1, 0.0, InteractionRange::Full);
        for occ in [[0u8], [1u8]] {
            let psi = basis_state(&occ);
            let step = PulseStep::pi(1, Transition::GroundRydberg);
            let a = apply_realistic_pulse(&psi, &step, &spec, 3.0).unwrap();
            let b = apply_ideal_gate(&psi, &step).unwrap();
            assert!(distance(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn realistic_pulse_rejects_zero_omega() {
        let spec = ideal_spec(2, 1.0, InteractionRange::Full);
        let psi = ground_state(2, LevelScheme::TwoLevel).unwrap();
        let step = PulseStep::pi(1, Transition::GroundRydberg);
        assert!(matches!(apply_realistic_pulse(&psi, &step, &spec, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn two_atom_ghz_amplitude_matches_closed_form() {
        for ratio in [1.0, 6.9, 15.5] {
            let spec = ideal_spec(2, ratio, InteractionRange::Full);
            let psi = ground_state(2, LevelScheme::TwoLevel).unwrap();
            let psi = apply_realistic_pulse(&psi, &PulseStep::half_pi(1, Transition::GroundRydberg), &spec, 1.0).unwrap();
            let psi = apply_realistic_pulse(&psi, &PulseStep::pi(2, Transition::GroundRydberg), &spec, 1.0).unwrap();
            let tau = (ratio * ratio + 16.0f64).sqrt();
            let x = core::f64::consts::PI * tau / 8.0;
            let gamma = phase(-core::f64::consts::PI * ratio / 8.0)
                * Complex64::new(x.cos(), ratio * x.sin() / tau);
            let amp = psi.amplitude(&[1, 0]).unwrap() * core::f64::consts::SQRT_2;
            assert!((amp - gamma).norm() < 1e-10, "ratio {ratio}");
        }
    }

    #[test]
    fn strong_nearest_neighbor_blockade_approaches_ideal() {
        let spec = ideal_spec(3, 1e6, InteractionRange::NearestNeighborOnly);
        let psi = StateVector::from_amplitudes(
            3,
            LevelScheme::TwoLevel,
            vec![c(0.5), c(0.5), c(0.0), c(0.0), c(0.5), c(0.5), c(0.0), c(0.0)],
        )
        .unwrap();
        for site in 1..=3 {
            let step = PulseStep::pi(site, Transition::GroundRydberg);
            let a = apply_realistic_pulse(&psi, &step, &spec, 1.0).unwrap();
            let b = apply_ideal_gate(&psi, &step).unwrap();
            assert!(distance(&a, &b) < 1e-4, "site {site}");
            assert!(inner_product(&a, &b).unwrap().norm() > 1.0 - 1e-8);
        }
    }

    #[test]
    fn block_decomposition_equals_dense_exponential() {
        let n = 3;
        let mut couplings = vec![0.0; 9];
        let vals = [(0, 1, 2.3), (0, 2, 0.4), (1, 2, 1.7)];
        for &(a, b, v) in &vals {
            couplings[a * n + b] = v;
            couplings[b * n + a] = v;
        }
        let spec = HamiltonianSpec::resonant(
            CouplingMatrix::from_rows(n, couplings).unwrap(),
            InteractionRange::Full,
        );
        let mut psi = ground_state(n, LevelScheme::TwoLevel).unwrap();
        for (k, a) in psi.amplitudes_mut().iter_mut().enumerate() {
            *a = Complex64::new(1.0 + k as f64, 0.5 * k as f64);
        }
        psi.normalize().unwrap();
        let omega = 0.8;
        for site in 1..=n {
            let step = PulseStep::literal(site, Transition::GroundRydberg, 1.1).unwrap();
            let fast = apply_realistic_pulse(&psi, &step, &spec, omega).unwrap();
            let mut drive = vec![0.0; n];
            drive[site - 1] = omega;
            let h = build_full_hamiltonian(&spec, &drive).unwrap();
            let u = hermitian_propagator(&h, step.theta() / (2.0 * omega));
            let dense = &u * DVector::from_column_slice(psi.amplitudes());
            let err: f64 = dense.iter().zip(fast.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum();
            assert!(err.sqrt() < 1e-9, "site {site}");
        }
    }

    #[test]
    fn full_hamiltonian_structure() {
        let spec = ideal_spec(3, 5.0, InteractionRange::Full);
        let h = build_full_hamiltonian(&spec, &[0.0; 3]).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(h[(i, j)], ZERO);
                }
            }
        }
        // |111⟩: two nearest-neighbour pairs and one next-nearest pair.
        assert!((h[(7, 7)].re - (10.0 + 5.0 / 64.0)).abs() < 1e-12);
        let nn = build_full_hamiltonian(&ideal_spec(3, 5.0, InteractionRange::NearestNeighborOnly), &[0.0; 3]).unwrap();
        assert_eq!(nn[(5, 5)], ZERO);

        let two = build_full_hamiltonian(&ideal_spec(2, 5.0, InteractionRange::Full), &[0.0, 0.7]).unwrap();
        // |01⟩ ↔ |11⟩ block is driven by site 1, which is off here; site 2 couples |10⟩ ↔ |11⟩.
        assert_eq!(two[(3, 2)], Complex64::new(0.0, 1.4));
        assert_eq!(two[(2, 3)], Complex64::new(0.0, -1.4));
        assert_eq!(two[(3, 3)], c(5.0));
    }

    #[test]
    fn detuning_enters_the_diagonal() {
        let spec = HamiltonianSpec::new(CouplingMatrix::ideal_chain(2, 1.0), vec![0.5, -2.0], InteractionRange::Full).unwrap();
        let h = build_full_hamiltonian(&spec, &[0.0, 0.0]).unwrap();
        assert_eq!(h[(1, 1)], c(-2.0));
        assert_eq!(h[(2, 2)], c(0.5));
        assert_eq!(h[(3, 3)], c(-0.5));
        assert!(HamiltonianSpec::new(CouplingMatrix::ideal_chain(2, 1.0), vec![0.0], InteractionRange::Full).is_err());
    }

    #[test]
    fn effective_hamiltonian_blockade_and_nnn() {
        let h = build_effective_hamiltonian(2, &[1.0, 1.0], false, 0.0).unwrap();
        // No drive into or out of |11⟩.
        for i in 0..4 {
            assert_eq!(h[(3, i)], ZERO);
            assert_eq!(h[(i, 3)], ZERO);
        }
        let h3 = build_effective_hamiltonian(3, &[0.0; 3], true, 64.0).unwrap();
        assert_eq!(h3[(5, 5)], c(1.0));
        assert_eq!(h3[(7, 7)], c(1.0));
        assert_eq!(h3[(3, 3)], ZERO);
    }

    #[test]
    fn effective_propagator_equals_ideal_gate() {
        let n = 3;
        let mut psi = ground_state(n, LevelScheme::TwoLevel).unwrap();
        for (k, a) in psi.amplitudes_mut().iter_mut().enumerate() {
            *a = Complex64::new((k as f64).cos(), (2.0 * k as f64).sin());
        }
        psi.normalize().unwrap();
        let (omega, t) = (1.3, 0.7);
        for site in 1..=n {
            let mut drive = vec![0.0; n];
            drive[site - 1] = omega;
            let h = build_effective_hamiltonian(n, &drive, false, 0.0).unwrap();
            let u = hermitian_propagator(&h, t);
            let dense = &u * DVector::from_column_slice(psi.amplitudes());
            let step = PulseStep::literal(site, Transition::GroundRydberg, omega * t).unwrap();
            let ideal = apply_ideal_gate(&psi, &step).unwrap();
            let err: f64 = dense.iter().zip(ideal.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum();
            assert!(err.sqrt() < 1e-10);
        }
    }

    #[test]
    fn dense_ground_states() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0), c(-1.5), c(0.0), c(2.0)]));
        let (e, psi) = ground_state_dense(&h).unwrap();
        assert_eq!(e, -1.5);
        assert!((psi.amplitudes()[1].norm() - 1.0).abs() < 1e-12);

        let i = Complex64::new(0.0, 1.0);
        let pauli = DMatrix::from_row_slice(2, 2, &[ZERO, -i * 2.0, i * 2.0, ZERO]);
        let (e, _) = ground_state_dense(&pauli).unwrap();
        assert!((e + 2.0).abs() < 1e-12);

        let bad = DMatrix::from_row_slice(2, 2, &[ZERO, c(1.0), c(0.0), ZERO]);
        assert!(matches!(ground_state_dense(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn site_gate_sigma_y_powers() {
        let g = SiteGate::phased_sigma_y(1, 1);
        let mut psi = basis_state(&[0]);
        apply_site_gate_in_place(&mut psi, &g).unwrap();
        // i·σ_y|0⟩ = i·i|1⟩ = −|1⟩.
        assert!((psi.amplitudes()[1] - c(-1.0)).norm() < 1e-15);
        assert_eq!(FRAC_PI_2, PulseStep::pi(1, Transition::GroundRydberg).theta());
    }
}
