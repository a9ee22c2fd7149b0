//! Frames, WAV I/O and synthetic test signals.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;
use crate::transforms::{BasisKind, CoefficientVector, SparsityBasis};

pub const DEFAULT_SAMPLE_RATE: u32 = 8000;

/// Peak amplitude of synthesized frames.
pub const SYNTH_PEAK: f64 = 0.9;

/// Energy of the vowel-proxy perturbation relative to the harmonic part.
pub const VOWEL_PERTURBATION_ENERGY: f64 = 0.01;

/// Where a frame came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    File { path: PathBuf, offset: usize },
    Synth(String),
    Derived(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, offset } => write!(f, "{}@{offset}", path.display()),
            Origin::Synth(desc) => write!(f, "synth:{desc}"),
            Origin::Derived(desc) => write!(f, "derived:{desc}"),
        }
    }
}

/// A non-empty run of finite real samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    samples: Vec<f64>,
    sample_rate: u32,
    origin: Origin,
}

impl Frame {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::with_origin(samples, sample_rate, Origin::Derived("memory".into()))
    }

    pub fn with_origin(samples: Vec<f64>, sample_rate: u32, origin: Origin) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Frame {
            samples,
            sample_rate,
            origin,
        })
    }

    pub(crate) fn derived(samples: Vec<f64>, what: &str) -> Result<Self> {
        Self::with_origin(samples, DEFAULT_SAMPLE_RATE, Origin::Derived(what.into()))
    }

    /// Same rate and provenance as `self`, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::with_origin(samples, self.sample_rate, self.origin.clone())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(source) => Error::Read {
            path: path.into(),
            source,
        },
        hound::Error::Unsupported => Error::UnsupportedEncoding {
            path: path.into(),
            reason: "unsupported WAV format".into(),
        },
        other => Error::MalformedWav {
            path: path.into(),
            reason: other.to_string(),
        },
    }
}

/// Reads `len` samples starting at `start` from channel 0 of a 16-bit PCM
/// WAV file. Each sample `v` becomes `v / 32768`.
pub fn read_wav_frame(path: impl AsRef<Path>, start: usize, len: usize) -> Result<Frame> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedEncoding {
            path: path.into(),
            reason: format!(
                "need 16-bit integer PCM, found {}-bit {:?}",
                spec.bits_per_sample, spec.sample_format
            ),
        });
    }
    let channels = spec.channels.max(1) as usize;
    let available = reader.duration() as usize;
    if len == 0 {
        return Err(Error::EmptyFrame);
    }
    if start.checked_add(len).is_none_or(|end| end > available) {
        return Err(Error::FrameOutOfRange { start, len, available });
    }
    let samples = reader
        .into_samples::<i16>()
        .skip(start * channels)
        .step_by(channels)
        .take(len)
        .map(|s| s.map(|v| v as f64 / 32768.0).map_err(|e| map_hound(path, e)))
        .collect::<Result<Vec<f64>>>()?;
    if samples.len() != len {
        return Err(Error::MalformedWav {
            path: path.into(),
            reason: format!("data chunk ended after {} of {len} samples", samples.len()),
        });
    }
    Frame::with_origin(
        samples,
        spec.sample_rate,
        Origin::File {
            path: path.into(),
            offset: start,
        },
    )
}

/// Quantizes an amplitude to 16-bit PCM: clamp to [-1, 1], scale by 32768,
/// round to nearest, saturate at 32767.
pub fn quantize(amplitude: f64) -> i16 {
    (amplitude.clamp(-1.0, 1.0) * 32768.0).round().min(32767.0) as i16
}

/// Writes a mono 16-bit PCM WAV.
pub fn write_wav(path: impl AsRef<Path>, frame: &Frame) -> Result<()> {
    let path = path.as_ref();
    let write_err = |e: hound::Error| Error::Write {
        path: path.into(),
        reason: e.to_string(),
    };
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: frame.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(write_err)?;
    for &v in frame.samples() {
        writer.write_sample(quantize(v)).map_err(write_err)?;
    }
    writer.finalize().map_err(write_err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Exactly K nonzero coefficients at random positions.
    Sparse,
    /// Harmonic series on multiples of a fundamental basis index.
    Harmonic,
    /// Harmonic series plus a dense low-level perturbation.
    VowelProxy,
}

impl FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sparse" => Ok(SynthKind::Sparse),
            "harmonic" => Ok(SynthKind::Harmonic),
            "vowel-proxy" => Ok(SynthKind::VowelProxy),
            other => Err(format!("unknown synth kind '{other}'")),
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::Sparse => "sparse",
            SynthKind::Harmonic => "harmonic",
            SynthKind::VowelProxy => "vowel-proxy",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n: usize,
    /// Nonzero count for `Sparse`.
    pub k: usize,
    pub fundamental_index: usize,
    pub harmonic_count: usize,
    /// Amplitude ratio between consecutive harmonics, in (0, 1].
    pub decay: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn sparse(n: usize, k: usize, seed: u64) -> Self {
        SynthSpec {
            kind: SynthKind::Sparse,
            n,
            k,
            seed,
            ..Self::harmonic(n, 8, 10, 0.7)
        }
    }

    pub fn harmonic(n: usize, fundamental_index: usize, harmonic_count: usize, decay: f64) -> Self {
        SynthSpec {
            kind: SynthKind::Harmonic,
            n,
            k: harmonic_count,
            fundamental_index,
            harmonic_count,
            decay,
            seed: 0,
        }
    }

    pub fn vowel_proxy(n: usize, fundamental_index: usize, harmonic_count: usize, decay: f64, seed: u64) -> Self {
        SynthSpec {
            kind: SynthKind::VowelProxy,
            seed,
            ..Self::harmonic(n, fundamental_index, harmonic_count, decay)
        }
    }

    fn describe(&self) -> String {
        match self.kind {
            SynthKind::Sparse => format!("sparse n={} k={} seed={}", self.n, self.k, self.seed),
            _ => format!(
                "{} n={} f0={} h={} decay={} seed={}",
                self.kind, self.n, self.fundamental_index, self.harmonic_count, self.decay, self.seed
            ),
        }
    }

    pub fn validate(&self, basis: BasisKind) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSynth(msg));
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        match self.kind {
            SynthKind::Sparse => {
                if self.k == 0 || self.k > self.n {
                    return bad(format!("need 1 <= K <= N, got K = {} with N = {}", self.k, self.n));
                }
            }
            SynthKind::Harmonic | SynthKind::VowelProxy => {
                if self.fundamental_index == 0 || self.harmonic_count == 0 {
                    return bad("fundamental index and harmonic count must be positive".into());
                }
                if !(self.decay > 0.0 && self.decay <= 1.0) {
                    return bad(format!("decay must lie in (0, 1], got {}", self.decay));
                }
                let top = self.fundamental_index.checked_mul(self.harmonic_count);
                if top.is_none_or(|t| t >= self.n) {
                    return bad(format!(
                        "fundamental {} x {} harmonics must stay below N = {}",
                        self.fundamental_index, self.harmonic_count, self.n
                    ));
                }
                // DFT harmonics also occupy mirror bins N - k; they must not collide.
                if basis == BasisKind::Dft && 2 * top.unwrap_or(usize::MAX) > self.n {
                    return bad(format!(
                        "in the DFT basis the highest harmonic bin must not exceed N/2 = {}",
                        self.n / 2
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Builds a deterministic test frame whose coefficients in `basis` follow
/// `spec`, peak-normalized to [`SYNTH_PEAK`].
///
/// DFT coefficient vectors are made conjugate-symmetric so the frame is
/// real: a sparse DFT frame places K nonzeros as conjugate pairs (plus a
/// self-conjugate bin 0 or N/2 when needed for parity), and each harmonic
/// occupies bin `f·h` and its mirror.
pub fn synthesize(spec: &SynthSpec, basis: &SparsityBasis) -> Result<Frame> {
    spec.validate(basis.kind())?;
    if basis.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            found: basis.len(),
        });
    }
    let mut rng = rng::seeded(spec.seed);
    let coeffs = match spec.kind {
        SynthKind::Sparse => sparse_coefficients(spec, basis.kind(), &mut rng),
        SynthKind::Harmonic | SynthKind::VowelProxy => harmonic_coefficients(spec, basis.kind()),
    };
    let mut samples = basis.inverse(&coeffs)?.samples;

    if spec.kind == SynthKind::VowelProxy {
        // White noise in time is dense in either orthonormal basis, and its
        // coefficient energy equals its time energy.
        let noise: Vec<f64> = (0..spec.n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let e_sig: f64 = samples.iter().map(|v| v * v).sum();
        let e_noise: f64 = noise.iter().map(|v| v * v).sum();
        if e_noise > 0.0 {
            let g = (VOWEL_PERTURBATION_ENERGY * e_sig / e_noise).sqrt();
            samples.iter_mut().zip(&noise).for_each(|(s, w)| *s += g * w);
        }
    }

    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        let g = SYNTH_PEAK / peak;
        samples.iter_mut().for_each(|v| *v *= g);
    }
    Frame::with_origin(samples, DEFAULT_SAMPLE_RATE, Origin::Synth(spec.describe()))
}

fn random_amplitude(rng: &mut rng::SeededRng) -> f64 {
    let mag = 0.5 + rng::unit_f64(rng);
    if rng::uniform_below(rng, 2) == 0 {
        mag
    } else {
        -mag
    }
}

fn sparse_coefficients(spec: &SynthSpec, kind: BasisKind, rng: &mut rng::SeededRng) -> CoefficientVector {
    let n = spec.n;
    match kind {
        BasisKind::Dct => {
            let mut c = vec![0.0; n];
            for pos in rng::permutation_prefix(rng, n, spec.k) {
                c[pos] = random_amplitude(rng);
            }
            CoefficientVector::Dct(c)
        }
        BasisKind::Dft => {
            let mut selfconj = vec![0];
            if n.is_multiple_of(2) && n > 1 {
                selfconj.push(n / 2);
            }
            let pair_bins = (n - 1) / 2;
            let mut singles = spec.k % 2;
            let mut pairs = spec.k / 2;
            if pairs > pair_bins {
                singles += 2;
                pairs -= 1;
            }
            let mut c = vec![Complex64::default(); n];
            for i in rng::permutation_prefix(rng, selfconj.len(), singles) {
                c[selfconj[i]] = Complex64::new(random_amplitude(rng), 0.0);
            }
            for p in rng::permutation_prefix(rng, pair_bins, pairs) {
                let bin = p + 1;
                let phase = 2.0 * std::f64::consts::PI * rng::unit_f64(rng);
                let z = Complex64::from_polar(random_amplitude(rng).abs(), phase);
                c[bin] = z;
                c[n - bin] = z.conj();
            }
            CoefficientVector::Dft(c)
        }
    }
}

fn harmonic_coefficients(spec: &SynthSpec, kind: BasisKind) -> CoefficientVector {
    let n = spec.n;
    let amps = (1..=spec.harmonic_count).map(|h| (spec.fundamental_index * h, spec.decay.powi(h as i32 - 1)));
    match kind {
        BasisKind::Dct => {
            let mut c = vec![0.0; n];
            for (bin, a) in amps {
                c[bin] = a;
            }
            CoefficientVector::Dct(c)
        }
        BasisKind::Dft => {
            let mut c = vec![Complex64::default(); n];
            for (bin, a) in amps {
                c[bin] = Complex64::new(a, 0.0);
                c[n - bin] = Complex64::new(a, 0.0);
            }
            CoefficientVector::Dft(c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::sparsity_count;

    #[test]
    fn quantize_contract() {
        assert_eq!(quantize(1.5), 32767);
        assert_eq!(quantize(1.0), 32767);
        assert_eq!(quantize(-1.0), -32768);
        assert_eq!(quantize(-7.0), -32768);
        assert_eq!(quantize(0.5), 16384);
        assert_eq!(quantize(0.0), 0);
    }

    #[test]
    fn frame_rejects_empty_and_nan() {
        assert!(matches!(Frame::new(vec![], 8000), Err(Error::EmptyFrame)));
        assert!(matches!(
            Frame::new(vec![0.0, f64::NAN], 8000),
            Err(Error::NonFinite(1))
        ));
        assert!(matches!(
            Frame::new(vec![f64::INFINITY], 8000),
            Err(Error::NonFinite(0))
        ));
    }

    #[test]
    fn sparse_k1_dct_has_single_coefficient() {
        let basis = SparsityBasis::dct(64).unwrap();
        let f = synthesize(&SynthSpec::sparse(64, 1, 3), &basis).unwrap();
        let c = basis.forward(f.samples()).unwrap().magnitudes();
        let (imax, peak) = c
            .iter()
            .enumerate()
            .fold((0, 0.0), |b, (i, &m)| if m > b.1 { (i, m) } else { b });
        assert!(peak > 0.0);
        for (i, m) in c.iter().enumerate() {
            if i != imax {
                assert!(*m < 1e-12 * peak);
            }
        }
        // Peak normalization of a single cosine atom.
        assert!((f.peak() - SYNTH_PEAK).abs() < 1e-12);
    }

    #[test]
    fn sparse_counts_are_exact_in_both_bases() {
        for kind in BasisKind::ALL {
            for &(n, k) in &[(64usize, 5usize), (64, 1), (63, 6), (8, 8), (7, 7), (128, 33)] {
                let basis = SparsityBasis::new(kind, n).unwrap();
                let f = synthesize(&SynthSpec::sparse(n, k, 17), &basis).unwrap();
                let c = basis.forward(f.samples()).unwrap();
                let mags = c.magnitudes();
                let peak = mags.iter().cloned().fold(0.0, f64::max);
                assert_eq!(mags.iter().filter(|&&m| m > 1e-9).count(), k, "{kind} n={n} k={k}");
                assert!(mags.iter().all(|&m| m > 1e-9 || m < 1e-12 * peak));
                assert_eq!(sparsity_count(&c, 1e-6), k);
            }
        }
    }

    #[test]
    fn harmonic_ratios_before_normalization() {
        let spec = SynthSpec::harmonic(100, 7, 3, 0.5);
        for kind in BasisKind::ALL {
            let basis = SparsityBasis::new(kind, 100).unwrap();
            let f = synthesize(&spec, &basis).unwrap();
            let c = basis.forward(f.samples()).unwrap().magnitudes();
            assert!((c[14] / c[7] - 0.5).abs() < 1e-12);
            assert!((c[21] / c[7] - 0.25).abs() < 1e-12);
            let expected = if kind == BasisKind::Dct { 3 } else { 6 };
            assert_eq!(sparsity_count(&basis.forward(f.samples()).unwrap(), 1e-9), expected);
        }
    }

    #[test]
    fn vowel_proxy_is_dense_with_one_percent_perturbation() {
        let basis = SparsityBasis::dct(3000).unwrap();
        let clean = synthesize(&SynthSpec::harmonic(3000, 8, 10, 0.7), &basis).unwrap();
        let vowel = synthesize(&SynthSpec::vowel_proxy(3000, 8, 10, 0.7, 4), &basis).unwrap();
        let c = basis.forward(vowel.samples()).unwrap();
        assert!(sparsity_count(&c, 1e-9) > 2900);
        // Undo normalization and compare the perturbation energy.
        let peak_clean = clean.peak();
        let mags = c.magnitudes();
        let harmonic_bins: Vec<usize> = (1..=10).map(|h| 8 * h).collect();
        let e_h: f64 = harmonic_bins.iter().map(|&b| mags[b] * mags[b]).sum();
        let e_rest: f64 = mags
            .iter()
            .enumerate()
            .filter(|(i, _)| !harmonic_bins.contains(i))
            .map(|(_, m)| m * m)
            .sum();
        let ratio = e_rest / e_h;
        assert!(ratio > 0.005 && ratio < 0.015, "ratio {ratio}");
        assert!(peak_clean > 0.0);
    }

    #[test]
    fn synthesize_is_deterministic() {
        for kind in BasisKind::ALL {
            let basis = SparsityBasis::new(kind, 256).unwrap();
            for spec in [SynthSpec::sparse(256, 9, 5), SynthSpec::vowel_proxy(256, 4, 6, 0.8, 5)] {
                assert_eq!(synthesize(&spec, &basis).unwrap(), synthesize(&spec, &basis).unwrap());
            }
        }
    }

    #[test]
    fn synth_spec_validation() {
        let dct = SparsityBasis::dct(100).unwrap();
        let dft = SparsityBasis::dft(100).unwrap();
        assert!(synthesize(&SynthSpec::sparse(100, 0, 1), &dct).is_err());
        assert!(synthesize(&SynthSpec::sparse(100, 101, 1), &dct).is_err());
        assert!(synthesize(&SynthSpec::harmonic(100, 10, 10, 0.5), &dct).is_err());
        assert!(synthesize(&SynthSpec::harmonic(100, 9, 11, 0.5), &dct).is_ok());
        assert!(synthesize(&SynthSpec::harmonic(100, 9, 11, 0.5), &dft).is_err());
        assert!(synthesize(&SynthSpec::harmonic(100, 10, 5, 0.5), &dft).is_ok());
        assert!(synthesize(&SynthSpec::harmonic(100, 5, 5, 0.0), &dct).is_err());
        assert!(synthesize(&SynthSpec::harmonic(100, 5, 5, 1.2), &dct).is_err());
        assert!(synthesize(&SynthSpec::harmonic(64, 5, 5, 0.5), &dct).is_err());
    }
}
