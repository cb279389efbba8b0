//! Two-atom closed forms, the RK-point overlap check, exponential decay fits
//! and the timing-budget estimate of the largest feasible chain.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{build_full_hamiltonian, ground_state_dense, HamiltonianSpec, InteractionRange};
use crate::lattice::CouplingMatrix;
use crate::protocols::{plan_dimer_mps, plan_ghz, plan_transport, protocol_duration, DurationPolicy, ProtocolKind};
use crate::statekit::LevelScheme;
use crate::targets::dimer_target_direct;
use crate::{Error, Result};

/// Amplitudes of the two-atom GHZ and transport sequences.
///
/// GHZ: `W₂(π) W₁(π/2)|00⟩ = (|01⟩ + γ|10⟩ + δ|11⟩)/√2`.
/// Transport: `W₁(π) W₂(π)(α|00⟩ + β|10⟩) = α(γ|01⟩ + γ′|11⟩) + β(δ_t|00⟩ + δ′|11⟩ + δ″|01⟩)`.
/// Where only a modulus is known in closed form the field holds it as a
/// real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoAtomCoefficients {
    pub gamma: Complex64,
    pub delta: Complex64,
    pub gamma_prime: Complex64,
    pub delta_prime: Complex64,
    /// Modulus of the `|00⟩` coefficient in the β branch of transport, `|γ|`.
    pub delta_transport: Complex64,
    pub delta_double_prime: Complex64,
    pub tau: f64,
}

fn phase(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::parameter(alloc::format!("Rabi frequency must be positive, got {omega}")));
    }
    Ok(())
}

pub fn two_atom_coefficients(v0: f64, omega: f64) -> Result<TwoAtomCoefficients> {
    check_omega(omega)?;
    use core::f64::consts::PI;
    let tau = libm::sqrt(v0 * v0 + 16.0 * omega * omega);
    let x = PI * tau / (8.0 * omega);
    let gamma = phase(-PI * v0 / (8.0 * omega)) * Complex64::new(libm::cos(x), v0 * libm::sin(x) / tau);
    let y = PI * tau / (4.0 * omega);
    let delta_prime = phase(-PI * v0 / (4.0 * omega))
        * Complex64::new(tau * libm::sin(y), v0 * libm::cos(y) - v0)
        * (2.0 * omega / (tau * tau));
    let g2 = gamma.norm_sqr().min(1.0);
    // 1 − |γ|², free of cancellation when |γ| → 1.
    let leak = 16.0 * omega * omega * libm::sin(x) * libm::sin(x) / (tau * tau);
    let rest = libm::sqrt(leak);
    Ok(TwoAtomCoefficients {
        gamma,
        delta: Complex64::new(rest, 0.0),
        gamma_prime: Complex64::new(rest, 0.0),
        delta_prime,
        delta_transport: Complex64::new(libm::sqrt(g2), 0.0),
        delta_double_prime: Complex64::new(leak, 0.0),
        tau,
    })
}

/// `|1 + γ|² / 4`.
pub fn ghz_fidelity_two_atoms(v0: f64, omega: f64) -> Result<f64> {
    let gamma = two_atom_coefficients(v0, omega)?.gamma;
    Ok((Complex64::new(1.0, 0.0) + gamma).norm_sqr() / 4.0)
}

/// First local maximum of [`ghz_fidelity_two_atoms`] in `V0/Ω ∈ (0, upper]`.
pub fn leftmost_ghz_peak(upper: f64) -> Result<f64> {
    let f = |r: f64| ghz_fidelity_two_atoms(r, 1.0);
    let step = 1e-3;
    let samples = libm::ceil(upper / step) as usize;
    let mut prev = f(step)?;
    let mut cur = f(2.0 * step)?;
    for k in 3..=samples {
        let next = f(k as f64 * step)?;
        if cur > prev && cur >= next {
            return golden_max(&f, (k - 2) as f64 * step, k as f64 * step);
        }
        prev = cur;
        cur = next;
    }
    Err(Error::Numerical {
        context: "leftmost fidelity peak",
        residual: upper,
    })
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    while hi - lo > 1e-12 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if f(a)? < f(b)? {
            lo = a;
        } else {
            hi = b;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Detuning and dimer weight at which the chain's ground state is a dimer state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RkPoint {
    pub detuning: f64,
    pub z: f64,
}

/// `Δ = 2⁶Ω²/V0 − 3V0/2⁶`, `z = −V0/(2⁶Ω)`.
pub fn rk_point(v0: f64, omega: f64) -> Result<RkPoint> {
    check_omega(omega)?;
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(Error::parameter(alloc::format!("V0 must be positive, got {v0}")));
    }
    Ok(RkPoint {
        detuning: 64.0 * omega * omega / v0 - 3.0 * v0 / 64.0,
        z: -v0 / (64.0 * omega),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RkCheck {
    pub point: RkPoint,
    pub ground_energy: f64,
    /// `|⟨dimer(z)|ground⟩|²`.
    pub overlap: f64,
}

/// Dense ground state of `Σ(Ω σ_y + Δ_k n_k) + Σ V_km n_k n_m` at the RK point,
/// compared with the dimer state of weight `z`.
///
/// With `boundary_corrected` the end sites, which have one neighbour fewer,
/// get `Δ + V0/64`.
pub fn rk_overlap(
    n_sites: usize,
    v0: f64,
    omega: f64,
    range: InteractionRange,
    boundary_corrected: bool,
) -> Result<RkCheck> {
    let point = rk_point(v0, omega)?;
    let mut detuning = vec![point.detuning; n_sites];
    if boundary_corrected {
        detuning[0] += v0 / 64.0;
        detuning[n_sites - 1] += v0 / 64.0;
    }
    let spec = HamiltonianSpec::new(CouplingMatrix::ideal_chain(n_sites, v0), detuning, range)?;
    // The builder's drive is 2Ω_k σ_y.
    let h = build_full_hamiltonian(&spec, &vec![0.5 * omega; n_sites])?;
    let (ground_energy, ground) = ground_state_dense(&h)?;
    let target = dimer_target_direct(n_sites, point.z, 1)?;
    let basis = *target.basis();
    // The σ_y drive is the σ_x drive conjugated by diag(1, i) on every site.
    let amp: Complex64 = target
        .amplitudes()
        .iter()
        .zip(ground.amplitudes())
        .enumerate()
        .map(|(i, (t, g))| {
            let gauge = match basis.rydberg_count(i) % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            (t * gauge).conj() * g
        })
        .sum();
    Ok(RkCheck {
        point,
        ground_energy,
        overlap: amp.norm_sqr(),
    })
}

/// `f(N) = a·exp(−b(N−2))` fitted by unweighted least squares.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub a: f64,
    pub b: f64,
    pub se_a: f64,
    pub se_b: f64,
    pub residual_sum_squares: f64,
    pub n_points: usize,
}

impl DecayFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.a * libm::exp(-self.b * (n - 2.0))
    }
}

/// Levenberg–Marquardt on `(N, F)` pairs, started from a log-linear fit.
pub fn fit_exponential_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 3 {
        return Err(Error::Fit("at least three points are required"));
    }
    if points.iter().any(|(n, f)| !n.is_finite() || !f.is_finite()) {
        return Err(Error::Fit("points must be finite"));
    }
    let first = points[0].0;
    if points.iter().all(|p| p.0 == first) {
        return Err(Error::Fit("at least two distinct chain lengths are required"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0 - 2.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();

    let (mut a, mut b) = initial_guess(&xs, &ys);
    let rss = |a: f64, b: f64| -> f64 {
        xs.iter().zip(&ys).map(|(x, y)| { let r = y - a * libm::exp(-b * x); r * r }).sum()
    };
    let mut cost = rss(a, b);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for (x, y) in xs.iter().zip(&ys) {
            let e = libm::exp(-b * x);
            let r = y - a * e;
            let j = [e, -a * x * e];
            for p in 0..2 {
                jtr[p] += j[p] * r;
                for q in 0..2 {
                    jtj[p][q] += j[p] * j[q];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let m = [
                [jtj[0][0] * (1.0 + lambda), jtj[0][1]],
                [jtj[1][0], jtj[1][1] * (1.0 + lambda)],
            ];
            let Some(step) = solve2(m, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let (na, nb) = (a + step[0], b + step[1]);
            let new_cost = rss(na, nb);
            if new_cost <= cost {
                let converged = libm::fabs(step[0]) <= 1e-15 * libm::fabs(a).max(1.0)
                    && libm::fabs(step[1]) <= 1e-15 * libm::fabs(b).max(1.0);
                a = na;
                b = nb;
                cost = new_cost;
                lambda = (lambda * 0.1).max(1e-12);
                improved = !converged;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Fit("iteration diverged"));
    }

    let mut jtj = [[0.0f64; 2]; 2];
    for x in &xs {
        let e = libm::exp(-b * x);
        let j = [e, -a * x * e];
        for p in 0..2 {
            for q in 0..2 {
                jtj[p][q] += j[p] * j[q];
            }
        }
    }
    let dof = (points.len() - 2) as f64;
    let s2 = cost / dof;
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let (se_a, se_b) = if det > 0.0 {
        (libm::sqrt(s2 * jtj[1][1] / det), libm::sqrt(s2 * jtj[0][0] / det))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(DecayFit {
        a,
        b,
        se_a,
        se_b,
        residual_sum_squares: cost,
        n_points: points.len(),
    })
}

fn initial_guess(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    if ys.iter().all(|&y| y > 0.0) {
        let n = xs.len() as f64;
        let ls: Vec<f64> = ys.iter().map(|&y| libm::log(y)).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let ml = ls.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxl: f64 = xs.iter().zip(&ls).map(|(x, l)| (x - mx) * (l - ml)).sum();
        let slope = sxl / sxx;
        (libm::exp(ml - slope * mx), -slope)
    } else {
        (ys.iter().sum::<f64>() / ys.len() as f64, 0.0)
    }
}

fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ])
}

/// Chain length cap of [`estimate_n_max`].
pub const N_MAX_SEARCH_LIMIT: usize = 10_000;

/// Largest `N ≥ 2` whose protocol fits in `tau_exp`, or 1 if none does.
///
/// `z` is only read for the dimer-MPS kind (nearest-neighbour blockade).
/// Durations depend on the Rabi frequency alone.
pub fn estimate_n_max(
    kind: ProtocolKind,
    z: f64,
    omega: f64,
    tau_exp: f64,
    policy: DurationPolicy,
) -> Result<usize> {
    check_omega(omega)?;
    if tau_exp.is_nan() || tau_exp < 0.0 {
        return Err(Error::parameter(alloc::format!("time budget must be non-negative, got {tau_exp}")));
    }
    let duration = |n: usize| -> Result<f64> {
        let plan = match kind {
            ProtocolKind::Ghz2 => plan_ghz(n, LevelScheme::TwoLevel)?,
            ProtocolKind::Ghz3 => plan_ghz(n, LevelScheme::ThreeLevel)?,
            ProtocolKind::DimerMps => plan_dimer_mps(n, z, 1)?,
            ProtocolKind::Transport => {
                plan_transport(n, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))?
            }
        };
        protocol_duration(&plan, omega, policy)
    };
    let mut best = 1;
    for n in 2..=N_MAX_SEARCH_LIMIT {
        if duration(n)? > tau_exp {
            break;
        }
        best = n;
    }
    Ok(best)
}
