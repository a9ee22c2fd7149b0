//! Compressive-sensing reconstruction of audio frames.
//!
//! A frame is observed at a random subset of its time samples and recovered
//! by l1 minimization of its coefficients in an orthonormal DCT-II or unitary
//! DFT basis. The [`evaluation`] module sweeps the fraction of observed
//! samples and reports the mean squared error per basis.
//!
//! ```
//! use csaudio::{measure, solve_bp, synthesize, SamplingPattern, SolverConfig, SparsityBasis, SynthSpec};
//!
//! let basis = SparsityBasis::dct(256).unwrap();
//! let frame = synthesize(&SynthSpec::sparse(256, 6, 1), &basis).unwrap();
//! let pattern = SamplingPattern::draw(256, 96, 42).unwrap();
//! let meas = measure(&frame, pattern, basis).unwrap();
//! let rec = solve_bp(&meas, &SolverConfig::default()).unwrap();
//! assert!(csaudio::mse(&frame, &rec.frame).unwrap() < 1e-10);
//! ```

pub mod error;
pub mod evaluation;
pub mod rng;
pub mod sensing;
pub mod signal;
pub mod solver;
pub mod transforms;

pub use error::{Error, Result};
pub use evaluation::{
    mse, run_cell, run_sweep, write_csv, write_csv_to, CellAggregate, SweepReport, SweepRow, SweepSpec,
};
pub use sensing::{
    measure, measurement_count, CsOperator, DenseOperator, MeasurementSet, MeasurementVector, SamplingPattern,
};
pub use signal::{read_wav_frame, synthesize, write_wav, Frame, Origin, SynthKind, SynthSpec};
pub use solver::{l1_norm, solve_bp, solve_bp_traced, solve_omp, Reconstruction, SolverConfig};
pub use transforms::{
    dct_forward, dct_inverse, dft_forward, dft_inverse, sparsity_count, BasisKind, BasisRow, CoefficientVector,
    SparsityBasis,
};
