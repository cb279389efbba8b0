//! Dense state vectors over chains of two- or three-level atoms.
//!
//! Basis states are indexed in radix order with site 1 as the most
//! significant digit, so `|i_1 i_2 … i_N⟩` lives at
//! `Σ_j i_j · d^(N-j)` for local dimension `d`. The same indexing serves both
//! level schemes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Default cap on the number of amplitudes a state may hold.
pub const DEFAULT_CAPACITY: usize = 1 << 20;

/// Tolerance on the squared norm of states that are supposed to be normalised.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Level labels.
pub mod level {
    pub const GROUND: u8 = 0;
    pub const RYDBERG: u8 = 1;
    /// Hyperfine ground state `|1̃⟩`; three-level scheme only.
    pub const HYPERFINE: u8 = 2;
}

/// Number of internal levels kept per atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LevelScheme {
    /// Ground `|0⟩` and Rydberg `|1⟩`.
    TwoLevel,
    /// Ground, Rydberg and hyperfine `|1̃⟩`.
    ThreeLevel,
}

impl LevelScheme {
    pub const fn local_dim(self) -> usize {
        match self {
            LevelScheme::TwoLevel => 2,
            LevelScheme::ThreeLevel => 3,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            LevelScheme::TwoLevel => "two-level",
            LevelScheme::ThreeLevel => "three-level",
        }
    }
}

/// Radix indexing for a chain of `n_sites` atoms with a fixed local dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Basis {
    n_sites: usize,
    local_dim: usize,
    dim: usize,
}

impl Basis {
    pub fn new(n_sites: usize, scheme: LevelScheme) -> Result<Self> {
        Self::with_capacity(n_sites, scheme, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(n_sites: usize, scheme: LevelScheme, limit: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::validation("a chain needs at least one site"));
        }
        let local_dim = scheme.local_dim();
        let capacity_error = Error::Capacity {
            n_sites,
            local_dim,
            limit,
        };
        let exp = u32::try_from(n_sites).map_err(|_| capacity_error.clone())?;
        let dim = local_dim.checked_pow(exp).ok_or(capacity_error.clone())?;
        if dim > limit {
            return Err(capacity_error);
        }
        Ok(Basis {
            n_sites,
            local_dim,
            dim,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index step between basis states that differ by one unit on `site`.
    #[inline]
    pub fn stride(&self, site: usize) -> usize {
        debug_assert!(site >= 1 && site <= self.n_sites);
        self.local_dim.pow((self.n_sites - site) as u32)
    }

    /// Level of `site` in basis state `index`.
    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> u8 {
        ((index / self.stride(site)) % self.local_dim) as u8
    }

    pub fn encode(&self, occupations: &[u8]) -> Result<usize> {
        if occupations.len() != self.n_sites {
            return Err(Error::Shape {
                expected: self.n_sites,
                found: occupations.len(),
            });
        }
        occupations.iter().try_fold(0usize, |acc, &level| {
            if usize::from(level) >= self.local_dim {
                Err(Error::validation(format!(
                    "level {level} does not exist in a {}-level scheme",
                    self.local_dim
                )))
            } else {
                Ok(acc * self.local_dim + usize::from(level))
            }
        })
    }

    pub fn decode(&self, mut index: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.n_sites];
        for slot in out.iter_mut().rev() {
            *slot = (index % self.local_dim) as u8;
            index /= self.local_dim;
        }
        out
    }

    /// Number of sites in the Rydberg level for basis state `index`.
    pub fn rydberg_count(&self, index: usize) -> usize {
        (1..=self.n_sites)
            .filter(|&s| self.digit(index, s) == level::RYDBERG)
            .count()
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            Err(Error::SiteIndex {
                site,
                n_sites: self.n_sites,
            })
        } else {
            Ok(())
        }
    }
}

/// Dense pure state of a chain.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: Basis,
    scheme: LevelScheme,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// All atoms in `|0⟩`.
    pub fn ground_state(n_sites: usize, scheme: LevelScheme) -> Result<Self> {
        Self::ground_state_with_capacity(n_sites, scheme, DEFAULT_CAPACITY)
    }

    pub fn ground_state_with_capacity(
        n_sites: usize,
        scheme: LevelScheme,
        limit: usize,
    ) -> Result<Self> {
        let basis = Basis::with_capacity(n_sites, scheme, limit)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            basis,
            scheme,
            amplitudes,
        })
    }

    /// Product basis state with the given level on every site.
    pub fn basis_state(scheme: LevelScheme, occupations: &[u8]) -> Result<Self> {
        let basis = Basis::new(occupations.len(), scheme)?;
        let index = basis.encode(occupations)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            basis,
            scheme,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; no normalisation is applied.
    pub fn from_amplitudes(
        n_sites: usize,
        scheme: LevelScheme,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let basis = Basis::new(n_sites, scheme)?;
        if amplitudes.len() != basis.dim() {
            return Err(Error::Shape {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector {
            basis,
            scheme,
            amplitudes,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn scheme(&self) -> LevelScheme {
        self.scheme
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[u8]) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.encode(occupations)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        libm::fabs(self.norm_sqr() - 1.0) <= NORM_TOLERANCE
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = libm::sqrt(self.norm_sqr());
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("cannot normalise a zero or non-finite state"));
        }
        let inv = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        inner_product(self, other)
    }

    /// Total probability of finding `site` in `lvl`.
    pub fn level_population(&self, site: usize, lvl: u8) -> Result<f64> {
        self.basis.check_site(site)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.digit(*i, site) == lvl)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub(crate) fn same_space(&self, other: &StateVector) -> Result<()> {
        if self.scheme != other.scheme || self.n_sites() != other.n_sites() {
            return Err(Error::Shape {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// All atoms in `|0⟩`.
pub fn ground_state(n_sites: usize, scheme: LevelScheme) -> Result<StateVector> {
    StateVector::ground_state(n_sites, scheme)
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.same_space(b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `(α|0⟩ + β|1⟩)₁ ⊗ |0…0⟩` on a two-level chain.
///
/// The pair must already be normalised; it is never rescaled silently.
pub fn embed_initial_qubit(alpha: Complex64, beta: Complex64, n_sites: usize) -> Result<StateVector> {
    check_qubit_normalization(alpha, beta)?;
    let mut psi = StateVector::ground_state(n_sites, LevelScheme::TwoLevel)?;
    let stride = psi.basis.stride(1);
    psi.amplitudes[0] = alpha;
    psi.amplitudes[stride] = beta;
    Ok(psi)
}

pub(crate) fn check_qubit_normalization(alpha: Complex64, beta: Complex64) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if !norm.is_finite() || libm::fabs(norm - 1.0) > NORM_TOLERANCE {
        return Err(Error::validation(format!(
            "|α|²+|β|² = {norm} is not 1 within {NORM_TOLERANCE:e}"
        )));
    }
    Ok(())
}

/// 2×2 density matrix of a single two-level atom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitDensity {
    matrix: [[Complex64; 2]; 2],
}

impl SingleQubitDensity {
    const TOLERANCE: f64 = 1e-12;

    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let rho = SingleQubitDensity { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalised ket.
    pub fn pure(ket: [Complex64; 2]) -> Result<Self> {
        check_qubit_normalization(ket[0], ket[1])?;
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = ket[i] * ket[j].conj();
            }
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.matrix[0][0].re;
        let d = self.matrix[1][1].re;
        let b = self.matrix[0][1];
        let mean = 0.5 * (a + d);
        let radius = libm::sqrt(0.25 * (a - d) * (a - d) + b.norm_sqr());
        [mean - radius, mean + radius]
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, ket: [Complex64; 2]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += ket[i].conj() * self.matrix[i][j] * ket[j];
            }
        }
        acc.re
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let herm = (m[0][1] - m[1][0].conj()).norm()
            + libm::fabs(m[0][0].im)
            + libm::fabs(m[1][1].im);
        if herm.is_nan() || herm > Self::TOLERANCE {
            return Err(Error::validation("density matrix is not Hermitian"));
        }
        let trace_error = libm::fabs(self.trace().re - 1.0);
        if trace_error.is_nan() || trace_error > Self::TOLERANCE {
            return Err(Error::validation("density matrix does not have unit trace"));
        }
        if self.eigenvalues()[0] < -Self::TOLERANCE {
            return Err(Error::validation("density matrix has a negative eigenvalue"));
        }
        Ok(())
    }
}

/// Reduced density matrix of one site of a two-level chain.
pub fn reduce_to_site(psi: &StateVector, site: usize) -> Result<SingleQubitDensity> {
    if psi.scheme() != LevelScheme::TwoLevel {
        return Err(Error::Scheme("partial trace is defined for two-level chains"));
    }
    let basis = psi.basis();
    basis.check_site(site)?;
    let stride = basis.stride(site);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    let amps = psi.amplitudes();
    // Pair every index with the site in |0⟩ with its |1⟩ partner.
    for i0 in (0..basis.dim()).filter(|&i| basis.digit(i, site) == 0) {
        let pair = [amps[i0], amps[i0 + stride]];
        for a in 0..2 {
            for b in 0..2 {
                m[a][b] += pair[a] * pair[b].conj();
            }
        }
    }
    // Enforce exact hermiticity against rounding in the accumulation.
    let off = 0.5 * (m[0][1] + m[1][0].conj());
    m[0][1] = off;
    m[1][0] = off.conj();
    m[0][0].im = 0.0;
    m[1][1].im = 0.0;
    SingleQubitDensity::new(m)
}
