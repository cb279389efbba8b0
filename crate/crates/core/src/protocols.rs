//! Pulse sequences for GHZ preparation, dimer-MPS preparation and
//! single-qubit transport, the pulse-area solvers and duration accounting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{
    apply_blockaded_gate_in_place, apply_realistic_pulse_in_place, apply_site_gate_in_place,
    HamiltonianSpec, InteractionDiagonal, PulseStep, SiteGate, Transition,
};
use crate::statekit::{check_qubit_normalization, embed_initial_qubit, LevelScheme, StateVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    /// GHZ preparation without the hyperfine shelving pulses.
    Ghz2,
    /// GHZ preparation shelving each excitation into `|1̃⟩`.
    Ghz3,
    DimerMps,
    Transport,
}

impl ProtocolKind {
    pub const fn code(self) -> &'static str {
        match self {
            ProtocolKind::Ghz2 => "ghz2",
            ProtocolKind::Ghz3 => "ghz3",
            ProtocolKind::DimerMps => "mps",
            ProtocolKind::Transport => "transport",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "ghz2" => Some(ProtocolKind::Ghz2),
            "ghz3" => Some(ProtocolKind::Ghz3),
            "mps" => Some(ProtocolKind::DimerMps),
            "transport" => Some(ProtocolKind::Transport),
            _ => None,
        }
    }

    pub const fn scheme(self) -> LevelScheme {
        match self {
            ProtocolKind::Ghz3 => LevelScheme::ThreeLevel,
            _ => LevelScheme::TwoLevel,
        }
    }

    /// Number of pulses (post-corrections excluded) for a chain of `n` sites.
    pub const fn pulse_count(self, n: usize) -> usize {
        match self {
            ProtocolKind::Ghz2 | ProtocolKind::DimerMps => n,
            ProtocolKind::Ghz3 => 2 * n,
            ProtocolKind::Transport => 2 * n - 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProtocolParams {
    Ghz,
    DimerMps { z: f64, radius: usize },
    Transport { alpha: Complex64, beta: Complex64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolPlan {
    kind: ProtocolKind,
    n_sites: usize,
    steps: Vec<PulseStep>,
    post_steps: Vec<SiteGate>,
    params: ProtocolParams,
}

impl ProtocolPlan {
    /// Assembles a plan from explicit steps, validating sites and transitions.
    pub fn from_parts(
        kind: ProtocolKind,
        n_sites: usize,
        steps: Vec<PulseStep>,
        post_steps: Vec<SiteGate>,
        params: ProtocolParams,
    ) -> Result<Self> {
        let scheme = kind.scheme();
        for step in &steps {
            if step.site() == 0 || step.site() > n_sites {
                return Err(Error::SiteIndex {
                    site: step.site(),
                    n_sites,
                });
            }
            step.transition().check_scheme(scheme)?;
        }
        if let Some(gate) = post_steps.iter().find(|g| g.site == 0 || g.site > n_sites) {
            return Err(Error::SiteIndex {
                site: gate.site,
                n_sites,
            });
        }
        Ok(ProtocolPlan {
            kind,
            n_sites,
            steps,
            post_steps,
            params,
        })
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn steps(&self) -> &[PulseStep] {
        &self.steps
    }

    pub fn post_steps(&self) -> &[SiteGate] {
        &self.post_steps
    }

    pub fn scheme(&self) -> LevelScheme {
        self.kind.scheme()
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    /// Range of the ideal blockade assumed by the plan.
    pub fn blockade_radius(&self) -> usize {
        match self.params {
            ProtocolParams::DimerMps { radius, .. } => radius,
            _ => 1,
        }
    }

    /// State the protocol starts from.
    pub fn initial_state(&self) -> Result<StateVector> {
        match self.params {
            ProtocolParams::Transport { alpha, beta } => embed_initial_qubit(alpha, beta, self.n_sites),
            _ => StateVector::ground_state(self.n_sites, self.scheme()),
        }
    }
}

pub fn plan_ghz(n_sites: usize, scheme: LevelScheme) -> Result<ProtocolPlan> {
    if n_sites < 2 {
        return Err(Error::validation("GHZ preparation needs at least two sites"));
    }
    let shelve = scheme == LevelScheme::ThreeLevel;
    let mut steps = vec![PulseStep::half_pi(1, Transition::GroundRydberg)];
    for k in 1..n_sites {
        steps.push(PulseStep::pi(k + 1, Transition::GroundRydberg));
        if shelve {
            steps.push(PulseStep::pi(k, Transition::RydbergHyperfine));
        }
    }
    if shelve {
        steps.push(PulseStep::pi(n_sites, Transition::RydbergHyperfine));
    }
    let kind = if shelve {
        ProtocolKind::Ghz3
    } else {
        ProtocolKind::Ghz2
    };
    ProtocolPlan::from_parts(kind, n_sites, steps, Vec::new(), ProtocolParams::Ghz)
}

/// Rotation angles of the dimer-MPS sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaSchedule {
    pub thetas: Vec<f64>,
    pub z: f64,
    pub radius: usize,
}

impl AreaSchedule {
    /// `max_j |sin θ_j / Π_{k=j}^{j+R} cos θ_k − z|`, with `cos θ_k = 1` past the end.
    pub fn relation_residual(&self) -> f64 {
        let n = self.thetas.len();
        (0..n)
            .map(|j| {
                let prod: f64 = (j..=j + self.radius)
                    .map(|k| if k < n { libm::cos(self.thetas[k]) } else { 1.0 })
                    .product();
                libm::fabs(libm::sin(self.thetas[j]) / prod - self.z)
            })
            .fold(0.0, f64::max)
    }
}

fn check_schedule_inputs(n_sites: usize, z: f64, radius: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::validation("a chain needs at least one site"));
    }
    if radius == 0 {
        return Err(Error::parameter("blockade radius must be at least 1"));
    }
    if !z.is_finite() {
        return Err(Error::parameter(format!("z must be finite, got {z}")));
    }
    Ok(())
}

/// Backward recursion `tan θ_k = z Π_{j=k+1}^{k+R} cos θ_j` from the last site.
pub fn mps_area_schedule(n_sites: usize, z: f64, radius: usize) -> Result<AreaSchedule> {
    check_schedule_inputs(n_sites, z, radius)?;
    let mut thetas = vec![0.0; n_sites];
    let mut cosines = vec![1.0; n_sites];
    for k in (0..n_sites).rev() {
        let prod: f64 = (k + 1..=k + radius)
            .map(|j| cosines.get(j).copied().unwrap_or(1.0))
            .product();
        thetas[k] = libm::atan(z * prod);
        cosines[k] = libm::cos(thetas[k]);
    }
    Ok(AreaSchedule { thetas, z, radius })
}

/// Closed-form nearest-neighbour schedule.
///
/// With `s = √(1+4z²)`, `u = 1+s`, `ρ = (1−s)/(1+s)` and `m = N+2−k`,
/// `cos² θ_k = (2/u)(1 − ρ^m)/(1 − ρ^(m+1))`.
pub fn mps_area_schedule_closed_form(n_sites: usize, z: f64) -> Result<AreaSchedule> {
    check_schedule_inputs(n_sites, z, 1)?;
    let s = libm::sqrt(1.0 + 4.0 * z * z);
    let u = 1.0 + s;
    let rho = (1.0 - s) / u;
    let thetas = (1..=n_sites)
        .map(|k| {
            let m = (n_sites + 2 - k) as i32;
            let cos2 = (2.0 / u) * (1.0 - libm::pow(rho, m as f64)) / (1.0 - libm::pow(rho, (m + 1) as f64));
            angle_from_cos2(cos2, z)
        })
        .collect();
    Ok(AreaSchedule {
        thetas,
        z,
        radius: 1,
    })
}

fn angle_from_cos2(cos2: f64, z: f64) -> f64 {
    let sin = libm::sqrt((1.0 - cos2).max(0.0));
    let theta = libm::atan2(sin, libm::sqrt(cos2));
    if z < 0.0 {
        -theta
    } else {
        theta
    }
}

/// Schedule from the roots of `λ^(R+1) − λ^R − z²`.
///
/// The sequence `q_k = Σ_j A_j λ_j^k` solves `q_k = q_{k−1} + z² q_{k−R−1}`
/// with `q_{−R} = … = q_0 = 1`, and `cos² θ_{N+1−m} = q_{m−1}/q_m`.
pub fn mps_area_schedule_polynomial(n_sites: usize, z: f64, radius: usize) -> Result<AreaSchedule> {
    check_schedule_inputs(n_sites, z, radius)?;
    if z == 0.0 {
        return Ok(AreaSchedule {
            thetas: vec![0.0; n_sites],
            z,
            radius,
        });
    }
    let a = z * z;
    let roots = characteristic_roots(radius, a)?;
    let weights: Vec<Complex64> = roots
        .iter()
        .enumerate()
        .map(|(k, &lk)| {
            let mut num = lk.powu(radius as u32);
            let mut den = Complex64::new(1.0, 0.0);
            for (j, &lj) in roots.iter().enumerate() {
                if j != k {
                    num *= Complex64::new(1.0, 0.0) - lj;
                    den *= lk - lj;
                }
            }
            num / den
        })
        .collect();
    let q = |k: usize| -> f64 {
        roots
            .iter()
            .zip(&weights)
            .map(|(l, w)| w * l.powu(k as u32))
            .sum::<Complex64>()
            .re
    };
    let mut thetas = vec![0.0; n_sites];
    let mut prev = q(0);
    for m in 1..=n_sites {
        let next = q(m);
        thetas[n_sites - m] = angle_from_cos2(prev / next, z);
        prev = next;
    }
    Ok(AreaSchedule { thetas, z, radius })
}

/// All roots of `λ^(R+1) − λ^R − a` by Durand–Kerner with a Newton polish.
fn characteristic_roots(radius: usize, a: f64) -> Result<Vec<Complex64>> {
    let degree = radius + 1;
    let eval = |x: Complex64| x.powu(radius as u32) * (x - 1.0) - a;
    let deriv = |x: Complex64| {
        x.powu(radius as u32) * (degree as f64) - x.powu(radius as u32 - 1) * (radius as f64)
    };
    // Cauchy bound on the root moduli.
    let bound = 1.0 + a.max(1.0);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
    for _ in 0..1000 {
        let mut shift = 0.0f64;
        for k in 0..degree {
            let lk = roots[k];
            let den: Complex64 = (0..degree).filter(|&j| j != k).map(|j| lk - roots[j]).product();
            let step = eval(lk) / den;
            roots[k] = lk - step;
            shift = shift.max(step.norm() / lk.norm().max(1.0));
        }
        if shift < 1e-15 {
            break;
        }
    }
    for root in &mut roots {
        for _ in 0..3 {
            let d = deriv(*root);
            if d.norm() > 0.0 {
                *root -= eval(*root) / d;
            }
        }
    }
    let scale = roots.iter().map(|r| libm::pow(r.norm(), degree as f64)).fold(a, f64::max);
    let residual = roots.iter().map(|&r| eval(r).norm()).fold(0.0, f64::max) / scale;
    if residual.is_nan() || residual > 1e-10 {
        return Err(Error::Numerical {
            context: "characteristic polynomial roots",
            residual,
        });
    }
    Ok(roots)
}

/// Literal-angle pulses on sites 1…N in order.
pub fn plan_dimer_mps(n_sites: usize, z: f64, radius: usize) -> Result<ProtocolPlan> {
    let schedule = mps_area_schedule(n_sites, z, radius)?;
    let steps = schedule
        .thetas
        .iter()
        .enumerate()
        .map(|(k, &theta)| PulseStep::literal(k + 1, Transition::GroundRydberg, theta))
        .collect::<Result<Vec<_>>>()?;
    ProtocolPlan::from_parts(
        ProtocolKind::DimerMps,
        n_sites,
        steps,
        Vec::new(),
        ProtocolParams::DimerMps { z, radius },
    )
}

/// Swap cascade moving the state of site 1 to site N, with the parity
/// correction `i^(N−1) σ_y` on site N for even N.
pub fn plan_transport(n_sites: usize, alpha: Complex64, beta: Complex64) -> Result<ProtocolPlan> {
    if n_sites < 2 {
        return Err(Error::validation("transport needs at least two sites"));
    }
    check_qubit_normalization(alpha, beta)?;
    let mut steps = Vec::with_capacity(2 * n_sites - 2);
    for k in 1..n_sites {
        steps.push(PulseStep::pi(k + 1, Transition::GroundRydberg));
        steps.push(PulseStep::pi(k, Transition::GroundRydberg));
    }
    let post_steps = if n_sites % 2 == 0 {
        vec![SiteGate::phased_sigma_y(n_sites, (n_sites - 1) as u32)]
    } else {
        Vec::new()
    };
    ProtocolPlan::from_parts(
        ProtocolKind::Transport,
        n_sites,
        steps,
        post_steps,
        ProtocolParams::Transport { alpha, beta },
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum Backend {
    /// Perfect blockade over the plan's blockade radius.
    Ideal,
    /// Exact evolution under the interacting Hamiltonian at Rabi frequency `omega`.
    Realistic { hamiltonian: HamiltonianSpec, omega: f64 },
}

/// Runs every pulse, then the post-corrections.
pub fn execute(plan: &ProtocolPlan, backend: &Backend, initial: StateVector) -> Result<StateVector> {
    if initial.n_sites() != plan.n_sites() || initial.scheme() != plan.scheme() {
        return Err(Error::Shape {
            expected: plan.scheme().local_dim().pow(plan.n_sites() as u32),
            found: initial.dim(),
        });
    }
    let mut psi = initial;
    match backend {
        Backend::Ideal => {
            let radius = plan.blockade_radius();
            for step in plan.steps() {
                apply_blockaded_gate_in_place(&mut psi, step, radius)?;
            }
        }
        Backend::Realistic { hamiltonian, omega } => {
            let diag = InteractionDiagonal::new(psi.basis(), hamiltonian)?;
            for step in plan.steps() {
                apply_realistic_pulse_in_place(&mut psi, step, &diag, *omega)?;
            }
        }
    }
    for gate in plan.post_steps() {
        apply_site_gate_in_place(&mut psi, gate)?;
    }
    Ok(psi)
}

/// Timing of the `|1⟩ ↔ |1̃⟩` pulses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum DurationPolicy {
    /// Driven at the same Rabi frequency as the Rydberg transition.
    SameAsOmega,
    /// Treated as taking no time.
    #[default]
    Instantaneous,
}

impl DurationPolicy {
    pub const fn code(self) -> &'static str {
        match self {
            DurationPolicy::SameAsOmega => "same",
            DurationPolicy::Instantaneous => "instantaneous",
        }
    }
}

/// Total pulse time in μs; each pulse lasts `|θ| / (2Ω)`.
pub fn protocol_duration(plan: &ProtocolPlan, omega: f64, policy: DurationPolicy) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::parameter(format!("Rabi frequency must be positive, got {omega}")));
    }
    Ok(plan
        .steps()
        .iter()
        .filter(|s| {
            s.transition() == Transition::GroundRydberg || policy == DurationPolicy::SameAsOmega
        })
        .map(|s| libm::fabs(s.theta()) / (2.0 * omega))
        .sum())
}
