//! Parallel sweep driver.
//!
//! Cells and realizations are spread over a rayon pool; results are
//! collected in index order, so the output does not depend on the number of
//! workers.

use rayon::prelude::*;
use rydchain_core::montecarlo::{CellOutcome, CellRunner, SweepSpec};
use rydchain_core::Result;

/// Environment variable read for the default worker count.
pub const WORKERS_ENV: &str = "RYDCHAIN_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub outcomes: Vec<CellOutcome>,
    /// Per-realization fidelities of each cell; empty for failed cells.
    pub raw: Vec<Vec<f64>>,
}

/// Runs the sweep on `workers` threads, or on rayon's default pool size.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<SweepRun> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| rydchain_core::Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let cells = spec.cells();
    let results: Vec<_> = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                let values = CellRunner::new(spec, cell).and_then(|runner| {
                    let values = cell_values(&runner, spec.realizations)?;
                    Ok((runner.record(&values)?, values))
                });
                (cell, values)
            })
            .collect()
    });
    let mut run = SweepRun {
        outcomes: Vec::with_capacity(results.len()),
        raw: Vec::with_capacity(results.len()),
    };
    for (cell, result) in results {
        match result {
            Ok((record, values)) => {
                run.outcomes.push(CellOutcome {
                    cell,
                    result: Ok(record),
                });
                run.raw.push(values);
            }
            Err(e) => {
                run.outcomes.push(CellOutcome { cell, result: Err(e) });
                run.raw.push(Vec::new());
            }
        }
    }
    Ok(run)
}

fn cell_values(runner: &CellRunner<'_>, realizations: usize) -> Result<Vec<f64>> {
    if runner.is_deterministic() {
        let v = runner.realization(0)?;
        return Ok(vec![v; realizations]);
    }
    (0..realizations)
        .into_par_iter()
        .map(|r| runner.realization(r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rydchain_core::lattice::DisorderSpec;
    use rydchain_core::montecarlo::{self, ProtocolSpec};
    use rydchain_core::protocols::ProtocolKind;

    #[test]
    fn parallel_matches_sequential() {
        let mut spec = SweepSpec::new(ProtocolSpec::new(ProtocolKind::Transport), vec![2, 3], vec![6.9, 15.5]);
        spec.disorder = DisorderSpec::ISOTROPIC;
        spec.realizations = 12;
        spec.master_seed = 99;
        let seq = montecarlo::run_sweep(&spec).unwrap();
        for workers in [1, 3] {
            let par = run_sweep(&spec, Some(workers)).unwrap();
            assert_eq!(par.outcomes, seq);
            assert!(par.raw.iter().all(|v| v.len() == 12));
        }
    }
}
