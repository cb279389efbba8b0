//! Line-based text form of protocol plans.
//!
//! ```text
//! # kind=transport n=3 alpha=0.6,0 beta=0,0.8
//! 2 01 pi
//! 1 01 pi
//! 3 01 pi
//! 2 01 pi
//! ```
//!
//! Step lines are `site transition angle` where the angle is `pi`, `halfpi`
//! or a literal θ. Post-correction lines are `site sy power`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rydchain_core::dynamics::{PulseLabel, PulseStep, SiteGate, Transition};
use rydchain_core::protocols::{ProtocolKind, ProtocolParams, ProtocolPlan};

use crate::table::float;
use crate::CliError;

pub fn render_plan(plan: &ProtocolPlan) -> String {
    let mut s = format!("# kind={} n={}", plan.kind().code(), plan.n_sites());
    match *plan.params() {
        ProtocolParams::Ghz => {}
        ProtocolParams::DimerMps { z, radius } => {
            let _ = write!(s, " z={} R={radius}", float(z));
        }
        ProtocolParams::Transport { alpha, beta } => {
            let _ = write!(
                s,
                " alpha={},{} beta={},{}",
                float(alpha.re),
                float(alpha.im),
                float(beta.re),
                float(beta.im)
            );
        }
    }
    s.push('\n');
    for step in plan.steps() {
        let angle = match step.label() {
            PulseLabel::NamedPi => "pi".to_string(),
            PulseLabel::NamedHalfPi => "halfpi".to_string(),
            PulseLabel::Literal => float(step.theta()),
        };
        let _ = writeln!(s, "{} {} {angle}", step.site(), step.transition().code());
    }
    for gate in plan.post_steps() {
        let power = sigma_y_power(gate).expect("plans only carry phased σ_y corrections");
        let _ = writeln!(s, "{} sy {power}", gate.site);
    }
    s
}

fn sigma_y_power(gate: &SiteGate) -> Option<u32> {
    (0..4).find(|&p| SiteGate::phased_sigma_y(gate.site, p) == *gate)
}

pub fn parse_plan(text: &str) -> Result<ProtocolPlan, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i as u64 + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_error(1, "empty plan"))?;
    let fields = header
        .strip_prefix('#')
        .ok_or_else(|| parse_error(hline, "plan must start with a '# kind=... n=...' header"))?;
    let mut kind = None;
    let mut n_sites = None;
    let mut z = None;
    let mut radius = None;
    let mut alpha = None;
    let mut beta = None;
    for field in fields.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_error(hline, format!("expected key=value, got {field:?}")))?;
        match key {
            "kind" => {
                kind = Some(
                    ProtocolKind::from_code(value)
                        .ok_or_else(|| parse_error(hline, format!("unknown kind {value:?}")))?,
                )
            }
            "n" => n_sites = Some(number::<usize>(hline, value)?),
            "z" => z = Some(number::<f64>(hline, value)?),
            "R" => radius = Some(number::<usize>(hline, value)?),
            "alpha" => alpha = Some(complex(hline, value)?),
            "beta" => beta = Some(complex(hline, value)?),
            _ => return Err(parse_error(hline, format!("unknown header key {key:?}"))),
        }
    }
    let kind = kind.ok_or_else(|| parse_error(hline, "header lacks kind"))?;
    let n_sites = n_sites.ok_or_else(|| parse_error(hline, "header lacks n"))?;
    let missing = |what: &str| parse_error(hline, format!("header lacks {what}"));
    let params = match kind {
        ProtocolKind::Ghz2 | ProtocolKind::Ghz3 => ProtocolParams::Ghz,
        ProtocolKind::DimerMps => ProtocolParams::DimerMps {
            z: z.ok_or_else(|| missing("z"))?,
            radius: radius.ok_or_else(|| missing("R"))?,
        },
        ProtocolKind::Transport => ProtocolParams::Transport {
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            beta: beta.ok_or_else(|| missing("beta"))?,
        },
    };

    let mut steps = Vec::new();
    let mut post_steps = Vec::new();
    for (line, body) in lines {
        if body.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = body.split_whitespace().collect();
        let [site, op, arg] = parts[..] else {
            return Err(parse_error(line, "expected three fields"));
        };
        let site = number::<usize>(line, site)?;
        if op == "sy" {
            post_steps.push(SiteGate::phased_sigma_y(site, number::<u32>(line, arg)?));
            continue;
        }
        if !post_steps.is_empty() {
            return Err(parse_error(line, "pulses must precede post-corrections"));
        }
        let transition =
            Transition::from_code(op).ok_or_else(|| parse_error(line, format!("unknown transition {op:?}")))?;
        let step = match arg {
            "pi" => PulseStep::pi(site, transition),
            "halfpi" => PulseStep::half_pi(site, transition),
            theta => PulseStep::literal(site, transition, number::<f64>(line, theta)?)
                .map_err(|e| parse_error(line, e.to_string()))?,
        };
        steps.push(step);
    }
    Ok(ProtocolPlan::from_parts(kind, n_sites, steps, post_steps, params)?)
}

fn parse_error(line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: u64, raw: &str) -> Result<T, CliError> {
    raw.parse().map_err(|_| parse_error(line, format!("cannot read number from {raw:?}")))
}

fn complex(line: u64, raw: &str) -> Result<Complex64, CliError> {
    let (re, im) = raw.split_once(',').unwrap_or((raw, "0"));
    Ok(Complex64::new(number(line, re)?, number(line, im)?))
}
