//! Disorder-averaged fidelity sweeps.
//!
//! A sweep is a grid of cells `(N, V0/Ω)`; each cell averages the realistic
//! protocol fidelity over independently sampled atom configurations. Every
//! realization has its own seed derived from `(master_seed, N, grid index,
//! realization)`, so results do not depend on evaluation order. Rabi
//! frequency is fixed to 1 and `V0` equals the grid value.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{HamiltonianSpec, InteractionRange};
use crate::lattice::{coupling_matrix, sample_configuration, DisorderSpec, LatticeSpec, DEFAULT_SPACING_UM};
use crate::protocols::{execute, plan_dimer_mps, plan_ghz, plan_transport, Backend, ProtocolKind, ProtocolPlan};
use crate::statekit::LevelScheme;
use crate::targets::ProtocolTarget;
use crate::{Error, Result};

/// Protocol selection with its kind-specific parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// Dimer weight, read by the dimer-MPS kind.
    pub z: f64,
    /// Blockade radius of the dimer-MPS schedule.
    pub radius: usize,
    /// Transported qubit.
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind) -> Self {
        let amp = core::f64::consts::FRAC_1_SQRT_2;
        ProtocolSpec {
            kind,
            z: 1.0,
            radius: 1,
            alpha: Complex64::new(amp, 0.0),
            beta: Complex64::new(amp, 0.0),
        }
    }

    pub fn plan(&self, n_sites: usize) -> Result<ProtocolPlan> {
        match self.kind {
            ProtocolKind::Ghz2 => plan_ghz(n_sites, LevelScheme::TwoLevel),
            ProtocolKind::Ghz3 => plan_ghz(n_sites, LevelScheme::ThreeLevel),
            ProtocolKind::DimerMps => plan_dimer_mps(n_sites, self.z, self.radius),
            ProtocolKind::Transport => plan_transport(n_sites, self.alpha, self.beta),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub protocol: ProtocolSpec,
    pub n_values: Vec<usize>,
    /// Strictly increasing `V0/Ω` values.
    pub grid: Vec<f64>,
    pub disorder: DisorderSpec,
    pub realizations: usize,
    pub master_seed: u64,
    pub range: InteractionRange,
    /// Trap spacing in μm.
    pub spacing_r0: f64,
}

impl SweepSpec {
    pub fn new(protocol: ProtocolSpec, n_values: Vec<usize>, grid: Vec<f64>) -> Self {
        SweepSpec {
            protocol,
            n_values,
            grid,
            disorder: DisorderSpec::NONE,
            realizations: 1,
            master_seed: 0,
            range: InteractionRange::Full,
            spacing_r0: DEFAULT_SPACING_UM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::validation("at least one realization is required"));
        }
        if self.n_values.is_empty() || self.grid.is_empty() {
            return Err(Error::validation("a sweep needs at least one chain length and one grid point"));
        }
        if self.grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::validation("grid values must be finite and non-negative"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("grid must be strictly increasing"));
        }
        if !(self.spacing_r0 > 0.0 && self.spacing_r0.is_finite()) {
            return Err(Error::validation("trap spacing must be positive"));
        }
        Ok(())
    }

    /// Cells in output order: chain length outermost, grid innermost.
    pub fn cells(&self) -> Vec<SweepCell> {
        self.n_values
            .iter()
            .flat_map(|&n_sites| {
                self.grid.iter().enumerate().map(move |(grid_index, &v0_over_omega)| SweepCell {
                    n_sites,
                    grid_index,
                    v0_over_omega,
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepCell {
    pub n_sites: usize,
    pub grid_index: usize,
    pub v0_over_omega: f64,
}

/// Aggregated fidelity of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub protocol: ProtocolKind,
    pub n_sites: usize,
    pub v0_over_omega: f64,
    pub disorder: &'static str,
    pub realizations: usize,
    pub stats: FidelityStats,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityStats {
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

/// Result for one cell; failures stay local to the cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellOutcome {
    pub cell: SweepCell,
    pub result: core::result::Result<SweepRecord, Error>,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN_GAMMA);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable per-realization seed.
pub fn realization_seed(master_seed: u64, n_sites: usize, grid_index: usize, realization: usize) -> u64 {
    [n_sites as u64, grid_index as u64, realization as u64]
        .iter()
        .fold(splitmix64(master_seed), |h, &v| splitmix64(h ^ splitmix64(v)))
}

/// Plan and target of one cell, shared by all its realizations.
#[derive(Clone, Debug)]
pub struct CellRunner<'a> {
    spec: &'a SweepSpec,
    cell: SweepCell,
    plan: ProtocolPlan,
    target: ProtocolTarget,
}

impl<'a> CellRunner<'a> {
    pub fn new(spec: &'a SweepSpec, cell: SweepCell) -> Result<Self> {
        let plan = spec.protocol.plan(cell.n_sites)?;
        // Fail on capacity before any realization runs.
        plan.initial_state()?;
        let target = ProtocolTarget::for_plan(&plan)?;
        Ok(CellRunner {
            spec,
            cell,
            plan,
            target,
        })
    }

    pub fn cell(&self) -> SweepCell {
        self.cell
    }

    /// Without disorder every realization is identical.
    pub fn is_deterministic(&self) -> bool {
        self.spec.disorder.is_none()
    }

    pub fn realization(&self, index: usize) -> Result<f64> {
        let v0 = self.cell.v0_over_omega;
        let lattice = LatticeSpec::new(self.cell.n_sites, self.spec.spacing_r0, v0)?;
        let seed = realization_seed(self.spec.master_seed, self.cell.n_sites, self.cell.grid_index, index);
        let config = sample_configuration(&lattice, &self.spec.disorder, seed)?;
        let couplings = coupling_matrix(&config, v0, self.spec.spacing_r0)?;
        let backend = Backend::Realistic {
            hamiltonian: HamiltonianSpec::resonant(couplings, self.spec.range),
            omega: 1.0,
        };
        let out = execute(&self.plan, &backend, self.plan.initial_state()?)?;
        self.target.fidelity(&out)
    }

    pub fn record(&self, values: &[f64]) -> Result<SweepRecord> {
        Ok(SweepRecord {
            protocol: self.spec.protocol.kind,
            n_sites: self.cell.n_sites,
            v0_over_omega: self.cell.v0_over_omega,
            disorder: self.spec.disorder.label(),
            realizations: values.len(),
            stats: aggregate(values)?,
        })
    }
}

/// Single-sample fidelity of `cell` for realization `index`.
pub fn realization_fidelity(spec: &SweepSpec, cell: SweepCell, index: usize) -> Result<f64> {
    CellRunner::new(spec, cell)?.realization(index)
}

/// Mean, standard error and range of fidelities clamped to `[0, 1]`.
pub fn aggregate(values: &[f64]) -> Result<FidelityStats> {
    if values.is_empty() {
        return Err(Error::validation("nothing to aggregate"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            context: "fidelity aggregation",
            residual: f64::NAN,
        });
    }
    let n = values.len() as f64;
    let clamped = values.iter().map(|v| v.clamp(0.0, 1.0));
    let min = clamped.clone().fold(1.0, f64::min);
    let max = clamped.clone().fold(0.0, f64::max);
    // Offsetting by the minimum makes identical samples average exactly.
    let mean = (min + clamped.clone().map(|v| v - min).sum::<f64>() / n).clamp(min, max);
    let std_error = if values.len() > 1 {
        let var = clamped.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        libm::sqrt(var / n)
    } else {
        0.0
    };
    Ok(FidelityStats {
        mean,
        std_error,
        min,
        max,
    })
}

/// All realizations of one cell, evaluated in order.
pub fn cell_values(runner: &CellRunner<'_>, realizations: usize) -> Result<Vec<f64>> {
    if runner.is_deterministic() {
        let v = runner.realization(0)?;
        return Ok(alloc::vec![v; realizations]);
    }
    (0..realizations).map(|r| runner.realization(r)).collect()
}

/// Sequential sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CellOutcome>> {
    spec.validate()?;
    Ok(spec
        .cells()
        .into_iter()
        .map(|cell| CellOutcome {
            cell,
            result: CellRunner::new(spec, cell)
                .and_then(|runner| runner.record(&cell_values(&runner, spec.realizations)?)),
        })
        .collect())
}

/// Short description of the sweep used in manifests.
pub fn describe(spec: &SweepSpec) -> String {
    format!(
        "protocol={} z={} R={} alpha={} beta={} disorder={} sigma={:?} realizations={} seed={} range={} r0={}",
        spec.protocol.kind.code(),
        spec.protocol.z,
        spec.protocol.radius,
        spec.protocol.alpha,
        spec.protocol.beta,
        spec.disorder.label(),
        spec.disorder.sigma(),
        spec.realizations,
        spec.master_seed,
        spec.range.code(),
        spec.spacing_r0,
    )
}
