//! Fixtures shared by the benchmarks.

use csaudio::{synthesize, Frame, SparsityBasis, SynthSpec};

pub const FRAME_LEN: usize = 3000;

/// Harmonic frame with ten decaying partials, sparse in the DCT.
pub fn harmonic_frame(n: usize) -> Frame {
    synthesize(&SynthSpec::harmonic(n, 8, 10, 0.7), &SparsityBasis::dct(n).unwrap()).unwrap()
}

pub fn vowel_frame(n: usize) -> Frame {
    synthesize(
        &SynthSpec::vowel_proxy(n, 8, 10, 0.7, 1),
        &SparsityBasis::dct(n).unwrap(),
    )
    .unwrap()
}
