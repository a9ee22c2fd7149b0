mod args;

use std::process::ExitCode;

use clap::Parser;
use csaudio::evaluation::format_float;
use csaudio::{
    measure, mse, read_wav_frame, run_sweep, solve_bp, sparsity_count, synthesize, write_csv, write_wav, BasisKind,
    Error, Frame, SamplingPattern, SparsityBasis, SweepSpec, SynthSpec,
};

use args::{Cli, Command, ReconstructArgs, SourceArgs, SweepArgs, SynthArgs, SynthParams, TransformArgs};

enum Failure {
    /// Bad combination of arguments that clap cannot see; exit 2.
    Usage(String),
    /// I/O or runtime failure; exit 1.
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidSweep(_)
            | Error::InvalidSynth(_)
            | Error::InvalidMeasurementCount { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reconstruct(a) => reconstruct(a),
        Command::Sweep(a) => sweep(a),
        Command::Synth(a) => synth(a),
        Command::Transform(a) => transform(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn synth_spec(kind: args::SynthKindArg, p: &SynthParams, n: usize, seed: u64) -> SynthSpec {
    SynthSpec {
        kind: kind.into(),
        n,
        k: p.synth_k,
        fundamental_index: p.fundamental,
        harmonic_count: p.harmonics,
        decay: p.decay,
        seed,
    }
}

/// Loads the WAV window or synthesizes a frame sparse in `synth_basis`.
fn load_frame(src: &SourceArgs, synth_basis: BasisKind, seed: u64) -> Result<Frame, Failure> {
    match (&src.input, src.synth_kind) {
        (Some(path), _) => Ok(read_wav_frame(path, src.frame_start, src.frame_len as usize)?),
        (None, Some(kind)) => {
            let n = src.synth.synth_n.unwrap_or(src.frame_len as usize);
            let spec = synth_spec(kind, &src.synth, n, seed);
            spec.validate(synth_basis)?;
            Ok(synthesize(&spec, &SparsityBasis::new(synth_basis, n)?)?)
        }
        (None, None) => Err(Failure::Usage("one of --input or --synth-kind is required".into())),
    }
}

fn reconstruct(a: ReconstructArgs) -> Result<(), Failure> {
    let kind: BasisKind = a.basis.into();
    let solver = a.solver.config();
    solver.validate()?;
    let frame = load_frame(&a.source, kind, a.seed)?;
    let n = frame.len();
    let m = csaudio::measurement_count(a.percent, n);
    let pattern = SamplingPattern::draw(n, m, a.seed)?;
    let meas = measure(&frame, pattern, SparsityBasis::new(kind, n)?)?;
    let rec = solve_bp(&meas, &solver)?;
    let err = mse(&frame, &rec.frame)?;
    if !rec.converged {
        eprintln!(
            "warning: solver stopped after {} iterations without converging (residual {})",
            rec.iterations,
            format_float(rec.final_residual)
        );
    }
    if let Some(path) = &a.output {
        write_wav(path, &rec.frame)?;
        eprintln!("wrote {}", path.display());
    }
    println!(
        "basis={kind} percent={} M={m} mse={} converged={} iters={}",
        a.percent,
        format_float(err),
        rec.converged,
        rec.iterations
    );
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    if a.percent_min > a.percent_max {
        return Err(Failure::Usage(format!(
            "--percent-min {} exceeds --percent-max {}",
            a.percent_min, a.percent_max
        )));
    }
    let frame = load_frame(&a.source, BasisKind::Dct, a.seed)?;
    let spec = SweepSpec {
        percentages: (a.percent_min..=a.percent_max)
            .step_by(a.percent_step as usize)
            .collect(),
        trials: a.trials as usize,
        bases: match a.basis {
            Some(b) => vec![b.into()],
            None => BasisKind::ALL.to_vec(),
        },
        base_seed: a.seed,
        solver: a.solver.config(),
        ..SweepSpec::new(frame)
    };
    spec.validate()?;
    let report = run_sweep(&spec)?;

    let stalled = report.rows.iter().filter(|r| !r.converged).count();
    if stalled > 0 {
        eprintln!(
            "warning: {stalled} of {} reconstructions did not converge",
            report.rows.len()
        );
    }
    if let Some(path) = &a.csv {
        write_csv(&report, path)?;
        eprintln!("wrote {} rows to {}", report.rows.len(), path.display());
    }
    for cell in &report.aggregate {
        println!(
            "basis={} percent={} mean_mse={} median_mse={} converged={}/{}",
            cell.basis,
            cell.percentage,
            format_float(cell.mean_mse),
            format_float(cell.median_mse),
            cell.converged,
            cell.trials
        );
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let kind: BasisKind = a.basis.into();
    let n = a.synth.synth_n.unwrap_or(3000);
    let spec = synth_spec(a.synth_kind, &a.synth, n, a.seed);
    spec.validate(kind)?;
    let frame = synthesize(&spec, &SparsityBasis::new(kind, n)?)?;
    write_wav(&a.output, &frame)?;
    println!(
        "output={} N={n} peak={}",
        a.output.display(),
        format_float(frame.peak())
    );
    Ok(())
}

fn transform(a: TransformArgs) -> Result<(), Failure> {
    let kind: BasisKind = a.basis.into();
    let frame = load_frame(&a.source, kind, a.seed)?;
    let coeffs = SparsityBasis::new(kind, frame.len())?.forward(frame.samples())?;
    let mags = coeffs.magnitudes();
    let mut order: Vec<usize> = (0..mags.len()).collect();
    // Stable sort keeps the lower index first among equal magnitudes.
    order.sort_by(|&i, &j| mags[j].total_cmp(&mags[i]));
    for &i in order.iter().take(a.top_k) {
        println!("index={i} magnitude={}", format_float(mags[i]));
    }
    println!(
        "basis={kind} N={} sparsity_count={}",
        frame.len(),
        sparsity_count(&coeffs, 1e-3)
    );
    Ok(())
}
