//! Chain geometry, Gaussian positional disorder and van der Waals couplings.
//!
//! The ideal chain lies along the third axis, `r_k = (0, 0, k·r0)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Trap spacing used in the disorder scenarios, μm.
pub const DEFAULT_SPACING_UM: f64 = 4.1;
/// Isotropic positional spread, μm.
pub const ISO_SIGMA_UM: f64 = 0.12;
/// Spread along the first (transverse) axis in the anisotropic scenario, μm.
pub const ANISO_LONG_SIGMA_UM: f64 = 1.0;

pub type Position = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub n_sites: usize,
    /// Spacing `r0` in μm.
    pub spacing_r0: f64,
    /// Nearest-neighbour interaction `V0 = C6 / r0^6`, rad/μs.
    pub v0: f64,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, spacing_r0: f64, v0: f64) -> Result<Self> {
        let spec = LatticeSpec {
            n_sites,
            spacing_r0,
            v0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::validation("a chain needs at least one site"));
        }
        if !(self.spacing_r0 > 0.0 && self.spacing_r0.is_finite()) {
            return Err(Error::parameter(format!(
                "spacing must be positive and finite, got {}",
                self.spacing_r0
            )));
        }
        if !(self.v0 >= 0.0 && self.v0.is_finite()) {
            return Err(Error::parameter(format!(
                "V0 must be non-negative and finite, got {}",
                self.v0
            )));
        }
        Ok(())
    }

    /// Van der Waals coefficient implied by `V0` and `r0`.
    pub fn c6(&self) -> f64 {
        self.v0 * libm::pow(self.spacing_r0, 6.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DisorderKind {
    None,
    Isotropic,
    Anisotropic,
    Custom,
}

impl DisorderKind {
    pub const fn label(self) -> &'static str {
        match self {
            DisorderKind::None => "none",
            DisorderKind::Isotropic => "iso",
            DisorderKind::Anisotropic => "aniso",
            DisorderKind::Custom => "custom",
        }
    }
}

/// Per-axis Gaussian widths of the trap positions, μm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisorderSpec {
    sigma: [f64; 3],
    kind: DisorderKind,
}

impl DisorderSpec {
    pub const NONE: DisorderSpec = DisorderSpec {
        sigma: [0.0; 3],
        kind: DisorderKind::None,
    };
    pub const ISOTROPIC: DisorderSpec = DisorderSpec {
        sigma: [ISO_SIGMA_UM; 3],
        kind: DisorderKind::Isotropic,
    };
    pub const ANISOTROPIC: DisorderSpec = DisorderSpec {
        sigma: [ANISO_LONG_SIGMA_UM, ISO_SIGMA_UM, ISO_SIGMA_UM],
        kind: DisorderKind::Anisotropic,
    };

    /// Arbitrary widths; an all-zero vector is reported as [`DisorderKind::None`].
    pub fn custom(sigma: [f64; 3]) -> Result<Self> {
        if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::parameter(format!(
                "disorder widths must be finite and non-negative, got {sigma:?}"
            )));
        }
        let kind = if sigma == [0.0; 3] {
            DisorderKind::None
        } else {
            DisorderKind::Custom
        };
        Ok(DisorderSpec { sigma, kind })
    }

    /// Looks up `none`, `iso` or `aniso`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Self::NONE),
            "iso" => Some(Self::ISOTROPIC),
            "aniso" => Some(Self::ANISOTROPIC),
            _ => None,
        }
    }

    pub fn sigma(&self) -> [f64; 3] {
        self.sigma
    }

    pub fn kind(&self) -> DisorderKind {
        self.kind
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    pub fn is_none(&self) -> bool {
        self.kind == DisorderKind::None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomConfiguration {
    positions: Vec<Position>,
}

impl AtomConfiguration {
    /// Requires finite coordinates; coincident atoms are caught by
    /// [`coupling_matrix`].
    pub fn new(positions: Vec<Position>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::validation("a configuration needs at least one atom"));
        }
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::validation("atom positions must be finite"));
        }
        Ok(AtomConfiguration { positions })
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn n_sites(&self) -> usize {
        self.positions.len()
    }
}

pub fn ideal_configuration(spec: &LatticeSpec) -> Result<AtomConfiguration> {
    spec.validate()?;
    let positions = (1..=spec.n_sites)
        .map(|k| [0.0, 0.0, k as f64 * spec.spacing_r0])
        .collect();
    AtomConfiguration::new(positions)
}

/// Ideal chain plus independent Gaussian displacements drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn sample_configuration(
    spec: &LatticeSpec,
    disorder: &DisorderSpec,
    seed: u64,
) -> Result<AtomConfiguration> {
    let mut config = ideal_configuration(spec)?;
    if disorder.is_none() {
        return Ok(config);
    }
    let mut normals = GaussianStream::new(seed);
    for pos in &mut config.positions {
        for (x, sigma) in pos.iter_mut().zip(disorder.sigma) {
            *x += sigma * normals.next_standard();
        }
    }
    Ok(config)
}

/// Standard normal deviates from a seeded ChaCha8 stream via Box–Muller.
///
/// Only `libm` transcendental functions are used, so the stream is identical
/// on every platform.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on (0, 1] with 53 random bits.
    fn next_open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_open_unit();
        let u2 = self.next_open_unit();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = core::f64::consts::TAU * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }
}

/// Symmetric pairwise interaction energies with zero diagonal, rad/μs.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    /// Uniform chain with `V0/|k−m|^6` couplings.
    pub fn ideal_chain(n_sites: usize, v0: f64) -> Self {
        let mut m = CouplingMatrix::zeros(n_sites);
        for k in 0..n_sites {
            for l in k + 1..n_sites {
                let d = (l - k) as f64;
                m.set_pair(k, l, v0 / libm::pow(d, 6.0));
            }
        }
        m
    }

    pub fn zeros(n_sites: usize) -> Self {
        CouplingMatrix {
            n: n_sites,
            entries: vec![0.0; n_sites * n_sites],
        }
    }

    /// Builds from a full row-major matrix, validating symmetry and signs.
    pub fn from_rows(n_sites: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n_sites * n_sites {
            return Err(Error::Shape {
                expected: n_sites * n_sites,
                found: entries.len(),
            });
        }
        let m = CouplingMatrix {
            n: n_sites,
            entries,
        };
        for k in 0..n_sites {
            if m.get(k, k) != 0.0 {
                return Err(Error::validation("coupling matrix diagonal must vanish"));
            }
            for l in 0..n_sites {
                let v = m.get(k, l);
                if !(v.is_finite() && v >= 0.0) || v != m.get(l, k) {
                    return Err(Error::validation(
                        "couplings must be finite, non-negative and symmetric",
                    ));
                }
            }
        }
        Ok(m)
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// Entry for 0-based sites `k`, `m`.
    #[inline]
    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.entries[k * self.n + m]
    }

    fn set_pair(&mut self, k: usize, m: usize, v: f64) {
        self.entries[k * self.n + m] = v;
        self.entries[m * self.n + k] = v;
    }

    /// Copy with every entry beyond nearest neighbours set to zero.
    pub fn nearest_neighbor_only(&self) -> Self {
        let mut out = self.clone();
        for k in 0..self.n {
            for m in k + 2..self.n {
                out.set_pair(k, m, 0.0);
            }
        }
        out
    }

    /// Interaction energy `Σ_{k<m} V_km n_k n_m` of a Rydberg occupation mask.
    pub fn configuration_energy(&self, rydberg: &[bool]) -> f64 {
        let mut e = 0.0;
        for k in 0..self.n {
            if !rydberg[k] {
                continue;
            }
            for (m, _) in rydberg.iter().enumerate().skip(k + 1).filter(|(_, &r)| r) {
                e += self.get(k, m);
            }
        }
        e
    }
}

/// `V_km = V0 (r0 / |r_k − r_m|)^6` over the full 3-D distance.
pub fn coupling_matrix(config: &AtomConfiguration, v0: f64, r0: f64) -> Result<CouplingMatrix> {
    if !(r0 > 0.0 && r0.is_finite()) || !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::parameter(format!(
            "need r0 > 0 and V0 >= 0, got r0 = {r0}, V0 = {v0}"
        )));
    }
    let pos = config.positions();
    let mut out = CouplingMatrix::zeros(pos.len());
    for k in 0..pos.len() {
        for m in k + 1..pos.len() {
            let d2: f64 = (0..3).map(|i| (pos[k][i] - pos[m][i]) * (pos[k][i] - pos[m][i])).sum();
            if d2 == 0.0 {
                return Err(Error::SingularGeometry {
                    first: k + 1,
                    second: m + 1,
                });
            }
            let ratio2 = r0 * r0 / d2;
            out.set_pair(k, m, v0 * ratio2 * ratio2 * ratio2);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn ideal_positions() {
        let cfg = ideal_configuration(&LatticeSpec::new(2, 4.1, 1.0).unwrap()).unwrap();
        assert_eq!(cfg.positions(), &[[0.0, 0.0, 4.1], [0.0, 0.0, 8.2]]);
        let one = ideal_configuration(&LatticeSpec::new(1, 4.1, 1.0).unwrap()).unwrap();
        assert_eq!(one.n_sites(), 1);
        let five = ideal_configuration(&LatticeSpec::new(5, 1.0, 1.0).unwrap()).unwrap();
        for (k, p) in five.positions().iter().enumerate() {
            assert_eq!(p[2], (k + 1) as f64);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(LatticeSpec::new(0, 1.0, 1.0).is_err());
        assert!(LatticeSpec::new(3, 0.0, 1.0).is_err());
        assert!(LatticeSpec::new(3, 1.0, -1.0).is_err());
        assert!(DisorderSpec::custom([0.1, -0.1, 0.0]).is_err());
        assert_eq!(DisorderSpec::custom([0.0; 3]).unwrap().kind(), DisorderKind::None);
        let spec = LatticeSpec::new(2, 2.0, 3.0).unwrap();
        assert_eq!(spec.c6(), 192.0);
    }

    #[test]
    fn ideal_couplings() {
        let spec = LatticeSpec::new(5, 4.1, 7.0).unwrap();
        let v = coupling_matrix(&ideal_configuration(&spec).unwrap(), 7.0, 4.1).unwrap();
        for k in 0..5 {
            assert_eq!(v.get(k, k), 0.0);
            for m in 0..5 {
                if k != m {
                    let d = (k as f64 - m as f64).abs();
                    assert!(rel(v.get(k, m), 7.0 / d.powi(6)) < 1e-12);
                }
            }
        }
        assert!(rel(v.get(0, 2), 7.0 / 64.0) < 1e-12);
        let reference = CouplingMatrix::ideal_chain(5, 7.0);
        for k in 0..5 {
            for m in 0..5 {
                assert!((v.get(k, m) - reference.get(k, m)).abs() <= 1e-12 * 7.0);
            }
        }
    }

    #[test]
    fn transverse_displacement_gives_an_eighth() {
        let cfg = AtomConfiguration::new(vec![[0.0, 0.0, 0.0], [2.0, 0.0, 2.0]]).unwrap();
        let v = coupling_matrix(&cfg, 1.0, 2.0).unwrap();
        assert!(rel(v.get(0, 1), 0.125) < 1e-12);
    }

    #[test]
    fn coincident_atoms_are_rejected() {
        let cfg = AtomConfiguration::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0; 3]]).unwrap();
        assert_eq!(
            coupling_matrix(&cfg, 1.0, 1.0),
            Err(Error::SingularGeometry { first: 1, second: 3 })
        );
    }

    #[test]
    fn zero_disorder_is_exactly_ideal() {
        let spec = LatticeSpec::new(6, 4.1, 1.0).unwrap();
        let a = sample_configuration(&spec, &DisorderSpec::NONE, 42).unwrap();
        assert_eq!(a, ideal_configuration(&spec).unwrap());
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let spec = LatticeSpec::new(6, 4.1, 1.0).unwrap();
        let a = sample_configuration(&spec, &DisorderSpec::ANISOTROPIC, 7).unwrap();
        let b = sample_configuration(&spec, &DisorderSpec::ANISOTROPIC, 7).unwrap();
        let c = sample_configuration(&spec, &DisorderSpec::ANISOTROPIC, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sample_variance_matches_sigma() {
        let spec = LatticeSpec::new(1, 4.1, 1.0).unwrap();
        let n = 100_000;
        let mut sums = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for seed in 0..n {
            let p = sample_configuration(&spec, &DisorderSpec::ISOTROPIC, seed).unwrap().positions()[0];
            let ideal = [0.0, 0.0, 4.1];
            for i in 0..3 {
                let d = p[i] - ideal[i];
                sums[i] += d;
                sq[i] += d * d;
            }
        }
        for i in 0..3 {
            let mean = sums[i] / n as f64;
            let var = sq[i] / n as f64 - mean * mean;
            assert!(rel(var, ISO_SIGMA_UM * ISO_SIGMA_UM) < 0.02, "axis {i}: {var}");
        }
    }

    #[test]
    fn nearest_neighbor_truncation() {
        let v = CouplingMatrix::ideal_chain(4, 1.0).nearest_neighbor_only();
        assert_eq!(v.get(0, 2), 0.0);
        assert_eq!(v.get(3, 1), 0.0);
        assert_eq!(v.get(2, 3), 1.0);
        assert_eq!(v.configuration_energy(&[true, true, true, false]), 2.0);
    }

    #[test]
    fn presets() {
        assert_eq!(DisorderSpec::preset("iso").unwrap().sigma(), [0.12; 3]);
        assert_eq!(DisorderSpec::preset("aniso").unwrap().sigma(), [1.0, 0.12, 0.12]);
        assert!(DisorderSpec::preset("none").unwrap().is_none());
        assert!(DisorderSpec::preset("bogus").is_none());
    }
}
