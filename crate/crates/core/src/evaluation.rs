//! Measurement-rate sweeps: MSE of basis-pursuit reconstructions as a
//! function of the percentage of observed samples, per basis.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sensing::{measure, measurement_count, SamplingPattern};
use crate::signal::Frame;
use crate::solver::{solve_bp, SolverConfig};
use crate::transforms::{BasisKind, SparsityBasis};

pub const CSV_HEADER: &str = "basis,percentage,trial,seed,M,mse,converged,iterations";

/// `(1/N) Σ (f(n) − f̂(n))²`.
pub fn mse(original: &Frame, reconstructed: &Frame) -> Result<f64> {
    if original.len() != reconstructed.len() {
        return Err(Error::LengthMismatch {
            expected: original.len(),
            found: reconstructed.len(),
        });
    }
    let sum: f64 = original
        .samples()
        .iter()
        .zip(reconstructed.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / original.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub basis: BasisKind,
    pub percentage: u32,
    pub trial: usize,
    pub seed: u64,
    pub m: usize,
    pub mse: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// One reconstruction: draw a pattern from `trial_seed`, measure, solve,
/// score against `frame`.
pub fn run_cell(
    frame: &Frame,
    basis: &SparsityBasis,
    percentage: u32,
    trial: usize,
    trial_seed: u64,
    solver: &SolverConfig,
) -> Result<SweepRow> {
    if !(1..=100).contains(&percentage) {
        return Err(Error::InvalidSweep(format!("percentage {percentage} outside 1..=100")));
    }
    let n = frame.len();
    let m = measurement_count(percentage, n);
    let pattern = SamplingPattern::draw(n, m, trial_seed)?;
    let meas = measure(frame, pattern, basis.clone())?;
    let rec = solve_bp(&meas, solver)?;
    Ok(SweepRow {
        basis: basis.kind(),
        percentage,
        trial,
        seed: trial_seed,
        m,
        mse: mse(frame, &rec.frame)?,
        converged: rec.converged,
        iterations: rec.iterations,
    })
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Strictly increasing, each in 1..=100.
    pub percentages: Vec<u32>,
    pub trials: usize,
    pub bases: Vec<BasisKind>,
    pub base_seed: u64,
    pub frame: Frame,
    pub solver: SolverConfig,
}

impl SweepSpec {
    /// 20..=90 step 10, 10 trials, both bases, seed 0, default solver.
    pub fn new(frame: Frame) -> Self {
        SweepSpec {
            percentages: (20..=90).step_by(10).collect(),
            trials: 10,
            bases: BasisKind::ALL.to_vec(),
            base_seed: 0,
            frame,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSweep(m.into()));
        if self.percentages.is_empty() {
            return bad("no percentages");
        }
        if self.percentages.windows(2).any(|w| w[0] >= w[1]) {
            return bad("percentages must be strictly increasing");
        }
        if self.percentages.iter().any(|p| !(1..=100).contains(p)) {
            return bad("percentages must lie in 1..=100");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.bases.is_empty() {
            return bad("no bases");
        }
        for &p in &self.percentages {
            if measurement_count(p, self.frame.len()) == 0 {
                return Err(Error::InvalidSweep(format!(
                    "{p}% of {} samples rounds to zero measurements",
                    self.frame.len()
                )));
            }
        }
        self.solver.validate()
    }

    /// Seed for trial `trial` at percentage position `percentage_index`:
    /// `base_seed + percentage_index × trials + trial` (wrapping). The same
    /// seed, hence the same sampling pattern, is used for every basis.
    pub fn trial_seed(&self, percentage_index: usize, trial: usize) -> u64 {
        self.base_seed
            .wrapping_add((percentage_index * self.trials + trial) as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellAggregate {
    pub basis: BasisKind,
    pub percentage: u32,
    pub mean_mse: f64,
    pub median_mse: f64,
    pub converged: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Ordered by basis, then percentage, then trial.
    pub rows: Vec<SweepRow>,
    pub aggregate: Vec<CellAggregate>,
}

impl SweepReport {
    pub fn cell(&self, basis: BasisKind, percentage: u32) -> Option<&CellAggregate> {
        self.aggregate
            .iter()
            .find(|a| a.basis == basis && a.percentage == percentage)
    }

    pub fn mean_mse(&self, basis: BasisKind, percentage: u32) -> Option<f64> {
        self.cell(basis, percentage).map(|a| a.mean_mse)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs every (basis, percentage, trial) cell. Cells run in parallel; each
/// solve is sequential, so the report does not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let n = spec.frame.len();
    let bases = spec
        .bases
        .iter()
        .map(|&k| SparsityBasis::new(k, n))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for basis in &bases {
        for (pi, &p) in spec.percentages.iter().enumerate() {
            for trial in 0..spec.trials {
                jobs.push((basis, p, trial, spec.trial_seed(pi, trial)));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(basis, p, trial, seed)| run_cell(&spec.frame, basis, p, trial, seed, &spec.solver))
        .collect::<Result<Vec<_>>>()?;

    let aggregate = rows
        .chunks(spec.trials)
        .map(|cell| {
            let mut mses: Vec<f64> = cell.iter().map(|r| r.mse).collect();
            CellAggregate {
                basis: cell[0].basis,
                percentage: cell[0].percentage,
                mean_mse: mses.iter().sum::<f64>() / mses.len() as f64,
                median_mse: median(&mut mses),
                converged: cell.iter().filter(|r| r.converged).count(),
                trials: cell.len(),
            }
        })
        .collect();
    Ok(SweepReport { rows, aggregate })
}

/// Ten significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.9e}")
}

/// Writes the CSV form: header, one line per row, then the aggregate block
/// as `#`-prefixed comment lines.
pub fn write_csv_to<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Write {
        path: "<csv>".into(),
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Write {
        path: "<csv>".into(),
        reason: e.to_string(),
    };
    w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.basis.to_string(),
            r.percentage.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.m.to_string(),
            format_float(r.mse),
            r.converged.to_string(),
            r.iterations.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let mut out = w.into_inner().map_err(|e| io_err(e.into_error()))?;
    writeln!(
        out,
        "# aggregate: basis,percentage,mean_mse,median_mse,converged,trials"
    )
    .map_err(io_err)?;
    for a in &report.aggregate {
        writeln!(
            out,
            "# {},{},{},{},{},{}",
            a.basis,
            a.percentage,
            format_float(a.mean_mse),
            format_float(a.median_mse),
            a.converged,
            a.trials
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_csv(report: &SweepReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::Write {
        path: path.into(),
        reason: e.to_string(),
    })?;
    write_csv_to(report, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Write { reason, .. } => Error::Write {
            path: path.into(),
            reason,
        },
        other => other,
    })
}
