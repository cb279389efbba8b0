//! Command-line interface.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rydchain_core::analytics::{estimate_n_max, fit_exponential_decay, rk_overlap};
use rydchain_core::dynamics::InteractionRange;
use rydchain_core::lattice::DisorderSpec;
use rydchain_core::montecarlo::{describe, ProtocolSpec, SweepSpec};
use rydchain_core::protocols::{
    mps_area_schedule, mps_area_schedule_closed_form, mps_area_schedule_polynomial, AreaSchedule,
    DurationPolicy, ProtocolKind,
};
use rydchain_core::statekit::NORM_TOLERANCE;
use rydchain_core::Error as CoreError;

use crate::manifest::{manifest_path, RunManifest};
use crate::planfile::render_plan;
use crate::sweep::{run_sweep, WORKERS_ENV};
use crate::table::{float, parse_fit_points, write_areas, write_raw, write_sweep};
use crate::CliError;

/// Largest chain accepted by `rk-check`.
pub const RK_MAX_SITES: usize = 10;
/// Agreement required between pulse-area solvers.
pub const AREA_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "rydchain", version, about = "Rydberg-chain state preparation and transport simulator")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Disorder-averaged fidelity over a grid of chain lengths and V0/Ω.
    Sweep(SweepArgs),
    /// Pulse areas of the dimer-MPS sequence, cross-checked between solvers.
    MpsAreas(MpsAreasArgs),
    /// Fit F(N) = a·exp(−b(N−2)) to (N, fidelity) data.
    Fit(FitArgs),
    /// Overlap of the dense ground state with the dimer state at the RK point.
    RkCheck(RkCheckArgs),
    /// Longest chain each protocol can process within a time budget.
    Nmax(NmaxArgs),
    /// Print the pulse sequence of a protocol.
    Plan(PlanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Ghz2,
    Ghz3,
    Mps,
    Transport,
}

impl From<ProtocolArg> for ProtocolKind {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Ghz2 => ProtocolKind::Ghz2,
            ProtocolArg::Ghz3 => ProtocolKind::Ghz3,
            ProtocolArg::Mps => ProtocolKind::DimerMps,
            ProtocolArg::Transport => ProtocolKind::Transport,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DisorderArg {
    None,
    Iso,
    Aniso,
}

impl From<DisorderArg> for DisorderSpec {
    fn from(d: DisorderArg) -> Self {
        match d {
            DisorderArg::None => DisorderSpec::NONE,
            DisorderArg::Iso => DisorderSpec::ISOTROPIC,
            DisorderArg::Aniso => DisorderSpec::ANISOTROPIC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RangeArg {
    Full,
    Nn,
}

impl From<RangeArg> for InteractionRange {
    fn from(r: RangeArg) -> Self {
        match r {
            RangeArg::Full => InteractionRange::Full,
            RangeArg::Nn => InteractionRange::NearestNeighborOnly,
        }
    }
}

/// Protocol selection shared by `sweep` and `plan`.
#[derive(Debug, Args)]
pub struct ProtocolOpts {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    /// Dimer weight (mps only).
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// Blockade radius (mps only).
    #[arg(long = "R")]
    pub radius: Option<usize>,
    /// Input amplitude `re` or `re,im` (transport only).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Input amplitude `re` or `re,im` (transport only).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub protocol: ProtocolOpts,
    /// Chain lengths: `4`, `2,4,6` or `2..7` (inclusive).
    #[arg(long)]
    pub n: String,
    /// V0/Ω values: `0.1,1,10` or `start:stop:count`.
    #[arg(long)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "none")]
    pub disorder: DisorderArg,
    /// Defaults to 1000, or 100 for mps.
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "full")]
    pub range: RangeArg,
    /// Trap spacing in μm.
    #[arg(long, default_value_t = rydchain_core::lattice::DEFAULT_SPACING_UM)]
    pub r0: f64,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-realization fidelities.
    #[arg(long)]
    pub raw_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AreaMethod {
    Recursion,
    Polynomial,
}

#[derive(Debug, Args)]
pub struct MpsAreasArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    #[arg(long = "R", default_value_t = 1)]
    pub radius: usize,
    /// Solver whose angles are written.
    #[arg(long, value_enum, default_value = "recursion")]
    pub method: AreaMethod,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV of (N, fidelity) rows, or a sweep CSV.
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RkRangeArg {
    Nn,
    Full,
    Both,
}

#[derive(Debug, Args)]
pub struct RkCheckArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 64.0)]
    pub v0_over_omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value = "both")]
    pub range: RkRangeArg,
    /// Shift the end-site detuning by V0/64.
    #[arg(long)]
    pub boundary_corrected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Same,
    Instantaneous,
}

impl From<PolicyArg> for DurationPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Same => DurationPolicy::SameAsOmega,
            PolicyArg::Instantaneous => DurationPolicy::Instantaneous,
        }
    }
}

#[derive(Debug, Args)]
pub struct NmaxArgs {
    /// Time budget in μs.
    #[arg(long, default_value_t = 2.0)]
    pub tau_exp: f64,
    /// Interaction strength in rad/μs.
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI * 8.4)]
    pub v0: f64,
    /// V0/Ω; sets Ω.
    #[arg(long, default_value_t = 6.9)]
    pub ratio: f64,
    #[arg(long, value_enum, default_value = "instantaneous")]
    pub policy: PolicyArg,
    /// Dimer weights reported for the mps protocol.
    #[arg(long, value_delimiter = ',', default_value = "1,10", allow_hyphen_values = true)]
    pub z: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub protocol: ProtocolOpts,
    #[arg(long)]
    pub n: usize,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => cmd_sweep(&args, out),
        Command::MpsAreas(args) => cmd_mps_areas(&args, out),
        Command::Fit(args) => cmd_fit(&args, out),
        Command::RkCheck(args) => cmd_rk_check(&args, out),
        Command::Nmax(args) => cmd_nmax(&args, out),
        Command::Plan(args) => {
            let spec = protocol_spec(&args.protocol)?;
            write!(out, "{}", render_plan(&spec.plan(args.n)?))?;
            Ok(())
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn protocol_spec(opts: &ProtocolOpts) -> Result<ProtocolSpec, CliError> {
    let kind = ProtocolKind::from(opts.protocol);
    let mut spec = ProtocolSpec::new(kind);
    if kind != ProtocolKind::DimerMps && (opts.z.is_some() || opts.radius.is_some()) {
        return Err(usage("--z and --R apply to the mps protocol only"));
    }
    if kind != ProtocolKind::Transport && (opts.alpha.is_some() || opts.beta.is_some()) {
        return Err(usage("--alpha and --beta apply to the transport protocol only"));
    }
    if let Some(z) = opts.z {
        spec.z = z;
    }
    if let Some(r) = opts.radius {
        spec.radius = r;
    }
    let alpha = opts.alpha.as_deref().map(parse_amplitude).transpose()?;
    let beta = opts.beta.as_deref().map(parse_amplitude).transpose()?;
    let complement = |a: Complex64| -> Result<Complex64, CliError> {
        let rest = 1.0 - a.norm_sqr();
        if rest < -NORM_TOLERANCE {
            return Err(usage(format!("|amplitude|² = {} exceeds 1", a.norm_sqr())));
        }
        Ok(Complex64::new(rest.max(0.0).sqrt(), 0.0))
    };
    match (alpha, beta) {
        (Some(a), Some(b)) => (spec.alpha, spec.beta) = (a, b),
        (Some(a), None) => (spec.alpha, spec.beta) = (a, complement(a)?),
        (None, Some(b)) => (spec.alpha, spec.beta) = (complement(b)?, b),
        (None, None) => {}
    }
    Ok(spec)
}

/// `re` or `re,im`.
pub fn parse_amplitude(raw: &str) -> Result<Complex64, CliError> {
    let (re, im) = raw.split_once(',').unwrap_or((raw, "0"));
    let part = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("cannot read amplitude {raw:?}")))
    };
    Ok(Complex64::new(part(re)?, part(im)?))
}

/// `4`, `2,4,6` or `2..7`.
pub fn parse_n_list(raw: &str) -> Result<Vec<usize>, CliError> {
    let bad = || usage(format!("cannot read chain lengths from {raw:?}"));
    let values: Vec<usize> = if let Some((a, b)) = raw.split_once("..") {
        let (a, b) = (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?);
        if b < a {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        raw.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage("chain lengths must be strictly increasing"));
    }
    Ok(values)
}

/// `a,b,c` or `start:stop:count` with evenly spaced points, endpoints included.
pub fn parse_grid(raw: &str) -> Result<Vec<f64>, CliError> {
    let bad = || usage(format!("cannot read grid from {raw:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = raw.split(':').collect();
    match parts[..] {
        [start, stop, count] => {
            let (start, stop) = (num(start)?, num(stop)?);
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            match count {
                0 => Err(bad()),
                1 => Ok(vec![start]),
                _ => {
                    let step = (stop - start) / (count - 1) as f64;
                    Ok((0..count)
                        .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                        .collect())
                }
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let protocol = protocol_spec(&args.protocol)?;
    let n_values = parse_n_list(&args.n)?;
    let grid = parse_grid(&args.grid)?;
    if args.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    let mut spec = SweepSpec::new(protocol, n_values, grid);
    spec.disorder = args.disorder.into();
    spec.realizations = args.realizations.unwrap_or(match protocol.kind {
        ProtocolKind::DimerMps => 100,
        _ => 1000,
    });
    spec.master_seed = args.seed;
    spec.range = args.range.into();
    spec.spacing_r0 = args.r0;
    spec.validate()?;

    let mut manifest = RunManifest::new("sweep");
    manifest.master_seed = Some(spec.master_seed);
    manifest
        .param("protocol", protocol.kind.code())
        .param("n", join(spec.n_values.iter().map(usize::to_string)))
        .param("grid", join(spec.grid.iter().map(|&g| float(g))))
        .param("disorder", spec.disorder.label())
        .param("sigma_um", join(spec.disorder.sigma().iter().map(|&s| float(s))))
        .param("realizations", spec.realizations)
        .param("range", spec.range.code())
        .param("r0_um", float(spec.spacing_r0))
        .param("omega", "1.0");
    match protocol.kind {
        ProtocolKind::DimerMps => {
            manifest.param("z", float(protocol.z)).param("R", protocol.radius);
        }
        ProtocolKind::Transport => {
            manifest
                .param("alpha", format!("{},{}", float(protocol.alpha.re), float(protocol.alpha.im)))
                .param("beta", format!("{},{}", float(protocol.beta.re), float(protocol.beta.im)));
        }
        _ => {}
    }
    manifest.notes.push(describe(&spec));
    if matches!(protocol.kind, ProtocolKind::Ghz2 | ProtocolKind::Ghz3) && spec.n_values.iter().any(|n| n % 2 == 1)
    {
        manifest
            .notes
            .push("odd chain lengths use the alternating GHZ target with unequal excitation counts".into());
    }
    manifest.outputs.push(args.out.display().to_string());
    if let Some(raw) = &args.raw_out {
        manifest.outputs.push(raw.display().to_string());
    }

    let run = run_sweep(&spec, args.workers)?;
    for outcome in &run.outcomes {
        if let Err(e) = &outcome.result {
            manifest.notes.push(format!(
                "cell N={} v0_over_omega={} failed: {e}",
                outcome.cell.n_sites,
                float(outcome.cell.v0_over_omega)
            ));
        }
    }
    manifest.write(&manifest_path(&args.out))?;
    let mut file = create(&args.out)?;
    write_sweep(&mut file, &run.outcomes)?;
    file.flush().map_err(|e| CliError::io(&args.out, e))?;
    if let Some(raw_path) = &args.raw_out {
        let mut file = create(raw_path)?;
        write_raw(&mut file, &run.outcomes, &run.raw)?;
        file.flush().map_err(|e| CliError::io(raw_path, e))?;
    }
    let failed = run.outcomes.iter().filter(|o| o.result.is_err()).count();
    writeln!(
        out,
        "wrote {} cells to {}",
        run.outcomes.len() - failed,
        args.out.display()
    )?;
    if let Some(first) = run.outcomes.iter().find_map(|o| o.result.as_ref().err()) {
        return Err(first.clone().into());
    }
    Ok(())
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(",")
}

fn max_difference(a: &AreaSchedule, b: &AreaSchedule) -> f64 {
    a.thetas
        .iter()
        .zip(&b.thetas)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn cmd_mps_areas(args: &MpsAreasArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let recursion = mps_area_schedule(args.n, args.z, args.radius)?;
    let polynomial = mps_area_schedule_polynomial(args.n, args.z, args.radius)?;
    let mut comparisons = vec![("polynomial", max_difference(&recursion, &polynomial))];
    if args.radius == 1 {
        let closed = mps_area_schedule_closed_form(args.n, args.z)?;
        comparisons.push(("closed_form", max_difference(&recursion, &closed)));
    }
    let chosen = match args.method {
        AreaMethod::Recursion => &recursion,
        AreaMethod::Polynomial => &polynomial,
    };
    match &args.out {
        Some(path) => {
            let mut manifest = RunManifest::new("mps-areas");
            manifest
                .param("n", args.n)
                .param("z", float(args.z))
                .param("R", args.radius)
                .param("method", format!("{:?}", args.method).to_lowercase());
            manifest.outputs.push(path.display().to_string());
            manifest.write(&manifest_path(path))?;
            let mut file = create(path)?;
            write_areas(&mut file, &chosen.thetas)?;
            file.flush().map_err(|e| CliError::io(path, e))?;
        }
        None => write_areas(&mut *out, &chosen.thetas)?,
    }
    let mut disagreement = None;
    for (name, diff) in comparisons {
        let status = if diff <= AREA_AGREEMENT { "ok" } else { "DISAGREE" };
        eprintln!("recursion vs {name}: max |Δθ| = {diff:e} {status}");
        if diff > AREA_AGREEMENT {
            disagreement = Some(format!("recursion and {name} schedules differ by {diff:e}"));
        }
    }
    match disagreement {
        Some(msg) => Err(CliError::Disagreement(msg)),
        None => Ok(()),
    }
}

fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = File::open(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let points = parse_fit_points(file)?;
    let fit = fit_exponential_decay(&points)?;
    writeln!(out, "a = {} ± {}", float(fit.a), float(fit.se_a))?;
    writeln!(out, "b = {} ± {}", float(fit.b), float(fit.se_b))?;
    writeln!(
        out,
        "a={} b={} sa={} sb={}",
        float(fit.a),
        float(fit.b),
        float(fit.se_a),
        float(fit.se_b)
    )?;
    Ok(())
}

fn cmd_rk_check(args: &RkCheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.n > RK_MAX_SITES {
        return Err(CoreError::Capacity {
            n_sites: args.n,
            local_dim: 2,
            limit: 1 << RK_MAX_SITES,
        }
        .into());
    }
    if args.n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let ranges: &[RangeArg] = match args.range {
        RkRangeArg::Nn => &[RangeArg::Nn],
        RkRangeArg::Full => &[RangeArg::Full],
        RkRangeArg::Both => &[RangeArg::Nn, RangeArg::Full],
    };
    let v0 = args.v0_over_omega * args.omega;
    for &range in ranges {
        let range = InteractionRange::from(range);
        let check = rk_overlap(args.n, v0, args.omega, range, args.boundary_corrected)?;
        writeln!(
            out,
            "range={} detuning={} z={} ground_energy={} overlap={}",
            range.code(),
            float(check.point.detuning),
            float(check.point.z),
            float(check.ground_energy),
            float(check.overlap)
        )?;
    }
    Ok(())
}

fn cmd_nmax(args: &NmaxArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(args.ratio > 0.0 && args.ratio.is_finite()) {
        return Err(usage("--ratio must be positive"));
    }
    let omega = args.v0 / args.ratio;
    let policy = DurationPolicy::from(args.policy);
    writeln!(
        out,
        "omega={} tau_exp={} policy={}",
        float(omega),
        float(args.tau_exp),
        policy.code()
    )?;
    let mut rows: Vec<(String, ProtocolKind, f64)> = vec![
        ("transport".into(), ProtocolKind::Transport, 0.0),
        ("ghz2".into(), ProtocolKind::Ghz2, 0.0),
        ("ghz3".into(), ProtocolKind::Ghz3, 0.0),
    ];
    for &z in &args.z {
        rows.push((format!("mps(z={})", float(z)), ProtocolKind::DimerMps, z));
    }
    for (name, kind, z) in rows {
        let n_max = estimate_n_max(kind, z, omega, args.tau_exp, policy)?;
        writeln!(out, "{name} n_max={n_max}")?;
    }
    Ok(())
}
