//! Orthonormal DCT-II and unitary DFT sparsity bases.
//!
//! Both transforms are normalized so that their matrices are orthonormal
//! (unitary for the DFT). The inverse matrix `B` is then the (conjugate)
//! transpose of the forward matrix, and any subset of its rows has
//! orthonormal rows, which the solver relies on.
//!
//! The fast paths run on `rustfft` for any length. [`direct`] holds the
//! O(N²) definitions, used as the reference the fast paths are checked
//! against.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal::Frame;

/// Which transform pair is used as the sparsity domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Dct,
    Dft,
}

impl BasisKind {
    pub const ALL: [BasisKind; 2] = [BasisKind::Dct, BasisKind::Dft];

    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Dct => "dct",
            BasisKind::Dft => "dft",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BasisKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dct" => Ok(BasisKind::Dct),
            "dft" => Ok(BasisKind::Dft),
            other => Err(format!("unknown basis '{other}' (expected dct or dft)")),
        }
    }
}

struct Plan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// DCT only: `e^{-jπk/2N}` for k in 0..N.
    twiddles: Vec<Complex64>,
    /// DCT only: the c(k) normalization.
    scale: Vec<f64>,
}

/// A transform of fixed length with its FFT plans precomputed.
///
/// Cloning is cheap; the plans are shared and immutable.
#[derive(Clone)]
pub struct SparsityBasis {
    kind: BasisKind,
    n: usize,
    plan: Arc<Plan>,
}

impl fmt::Debug for SparsityBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparsityBasis")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for SparsityBasis {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.n == other.n
    }
}

impl SparsityBasis {
    pub fn new(kind: BasisKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLength);
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let (twiddles, scale) = match kind {
            BasisKind::Dct => {
                let tw = (0..n)
                    .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2 * n) as f64))
                    .collect();
                (tw, (0..n).map(|k| dct_scale(k, n)).collect())
            }
            BasisKind::Dft => (Vec::new(), Vec::new()),
        };
        Ok(SparsityBasis {
            kind,
            n,
            plan: Arc::new(Plan {
                fwd,
                inv,
                twiddles,
                scale,
            }),
        })
    }

    pub fn dct(n: usize) -> Result<Self> {
        Self::new(BasisKind::Dct, n)
    }

    pub fn dft(n: usize) -> Result<Self> {
        Self::new(BasisKind::Dft, n)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Forward transform of a real time-domain signal.
    pub fn forward(&self, samples: &[f64]) -> Result<CoefficientVector> {
        self.check_len(samples.len())?;
        Ok(match self.kind {
            BasisKind::Dct => CoefficientVector::Dct(self.dct_analyze(samples)),
            BasisKind::Dft => {
                let buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                CoefficientVector::Dft(self.dft_analyze(&buf))
            }
        })
    }

    /// Inverse transform back to a real signal.
    ///
    /// For the DFT the real part is kept; the fraction of energy that sat in
    /// the discarded imaginary part is reported rather than treated as an
    /// error.
    pub fn inverse(&self, coeffs: &CoefficientVector) -> Result<RealSignal> {
        if coeffs.kind() != self.kind {
            return Err(Error::BasisMismatch {
                expected: self.kind,
                found: coeffs.kind(),
            });
        }
        self.check_len(coeffs.len())?;
        Ok(match coeffs {
            CoefficientVector::Dct(c) => RealSignal {
                samples: self.dct_synthesize(c),
                discarded_imag_energy: 0.0,
            },
            CoefficientVector::Dft(c) => {
                let t = self.dft_synthesize(c);
                let total: f64 = t.iter().map(|z| z.norm_sqr()).sum();
                let imag: f64 = t.iter().map(|z| z.im * z.im).sum();
                RealSignal {
                    samples: t.iter().map(|z| z.re).collect(),
                    discarded_imag_energy: if total > 0.0 { imag / total } else { 0.0 },
                }
            }
        })
    }

    /// Row `t` of the inverse-transform matrix: the functional that maps a
    /// coefficient vector to the time sample at index `t`.
    pub fn inverse_row(&self, t: usize) -> Result<BasisRow> {
        if t >= self.n {
            return Err(Error::IndexOutOfRange { index: t, len: self.n });
        }
        Ok(match self.kind {
            BasisKind::Dct => BasisRow::Dct((0..self.n).map(|k| direct::dct_entry(k, t, self.n)).collect()),
            BasisKind::Dft => BasisRow::Dft((0..self.n).map(|k| direct::dft_entry(k, t, self.n).conj()).collect()),
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }

    // Makhoul's reordering: one length-N complex FFT per DCT, any N.
    fn dct_analyze(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut v = vec![Complex64::default(); n];
        for i in 0..n.div_ceil(2) {
            v[i] = Complex64::new(x[2 * i], 0.0);
        }
        for i in 0..n / 2 {
            v[n - 1 - i] = Complex64::new(x[2 * i + 1], 0.0);
        }
        self.plan.fwd.process(&mut v);
        v.iter()
            .zip(&self.plan.twiddles)
            .zip(&self.plan.scale)
            .map(|((vk, w), c)| (vk * w).re * c)
            .collect()
    }

    fn dct_synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let plan = &*self.plan;
        let raw = |k: usize| if k < n { coeffs[k] / plan.scale[k] } else { 0.0 };
        let mut v: Vec<Complex64> = (0..n)
            .map(|k| plan.twiddles[k].conj() * Complex64::new(raw(k), -raw(n - k)))
            .collect();
        plan.inv.process(&mut v);
        let inv_n = 1.0 / n as f64;
        let mut out = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            out[2 * i] = v[i].re * inv_n;
        }
        for i in 0..n / 2 {
            out[2 * i + 1] = v[n - 1 - i].re * inv_n;
        }
        out
    }

    fn dft_analyze(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.plan.fwd.process(&mut buf);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    fn dft_synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.plan.inv.process(&mut buf);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }
}

fn dct_scale(k: usize, n: usize) -> f64 {
    if k == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    }
}

/// Output of an inverse transform.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    pub samples: Vec<f64>,
    /// Share of the synthesized energy that was imaginary and dropped
    /// (always 0 for the DCT).
    pub discarded_imag_energy: f64,
}

/// Coefficients in a sparsity basis; the variant is the basis tag.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientVector {
    Dct(Vec<f64>),
    Dft(Vec<Complex64>),
}

impl CoefficientVector {
    pub fn zeros(kind: BasisKind, n: usize) -> Self {
        match kind {
            BasisKind::Dct => CoefficientVector::Dct(vec![0.0; n]),
            BasisKind::Dft => CoefficientVector::Dft(vec![Complex64::default(); n]),
        }
    }

    pub fn kind(&self) -> BasisKind {
        match self {
            CoefficientVector::Dct(_) => BasisKind::Dct,
            CoefficientVector::Dft(_) => BasisKind::Dft,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CoefficientVector::Dct(v) => v.len(),
            CoefficientVector::Dft(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        match self {
            CoefficientVector::Dct(v) => v.iter().map(|x| x.abs()).collect(),
            CoefficientVector::Dft(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn as_dct(&self) -> Option<&[f64]> {
        match self {
            CoefficientVector::Dct(v) => Some(v),
            CoefficientVector::Dft(_) => None,
        }
    }

    pub fn as_dft(&self) -> Option<&[Complex64]> {
        match self {
            CoefficientVector::Dft(v) => Some(v),
            CoefficientVector::Dct(_) => None,
        }
    }

    /// Largest `|values[k] - conj(values[N-k])|` over k = 1..N-1 plus
    /// `|Im values[0]|`. Zero for DCT vectors.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        match self {
            CoefficientVector::Dct(_) => 0.0,
            CoefficientVector::Dft(v) => {
                let n = v.len();
                let mut worst = v.first().map_or(0.0, |z| z.im.abs());
                for k in 1..n {
                    worst = worst.max((v[k] - v[n - k].conj()).norm());
                }
                worst
            }
        }
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        match self {
            CoefficientVector::Dct(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            CoefficientVector::Dft(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }
}

/// A row of the inverse-transform matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisRow {
    Dct(Vec<f64>),
    Dft(Vec<Complex64>),
}

impl BasisRow {
    /// `Σ_k row[k] · coeffs[k]` (no conjugation: this is a matrix row acting
    /// on a column vector).
    pub fn apply(&self, coeffs: &CoefficientVector) -> Result<Complex64> {
        match (self, coeffs) {
            (BasisRow::Dct(r), CoefficientVector::Dct(c)) => {
                Ok(Complex64::new(r.iter().zip(c).map(|(a, b)| a * b).sum(), 0.0))
            }
            (BasisRow::Dft(r), CoefficientVector::Dft(c)) => Ok(r.iter().zip(c).map(|(a, b)| a * b).sum()),
            (row, c) => Err(Error::BasisMismatch {
                expected: row.kind(),
                found: c.kind(),
            }),
        }
    }

    pub fn kind(&self) -> BasisKind {
        match self {
            BasisRow::Dct(_) => BasisKind::Dct,
            BasisRow::Dft(_) => BasisKind::Dft,
        }
    }
}

/// Scalar field of a basis's coefficients: `f64` pairs with the DCT,
/// `Complex64` with the DFT. Lets the solvers be written once.
pub trait Coefficient:
    Copy
    + Default
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    const KIND: BasisKind;

    fn from_real(v: f64) -> Self;
    fn real(self) -> f64;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn div(self, other: Self) -> Self;

    /// Coefficients to time domain (`B·c`), kept in this field.
    fn synthesize(basis: &SparsityBasis, coeffs: &[Self]) -> Vec<Self>;
    /// Time domain to coefficients (`Bᴴ·t`).
    fn analyze(basis: &SparsityBasis, time: &[Self]) -> Vec<Self>;
    /// Entry `B[t][k]`.
    fn basis_entry(t: usize, k: usize, n: usize) -> Self;

    fn wrap(values: Vec<Self>) -> CoefficientVector;
    fn unwrap(coeffs: &CoefficientVector) -> Option<&[Self]>;

    /// Soft threshold: shrink the modulus by `threshold`, keep sign/phase.
    fn shrink(self, threshold: f64) -> Self {
        let m = self.modulus();
        if m <= threshold {
            Self::default()
        } else {
            self.scale((m - threshold) / m)
        }
    }
}

impl Coefficient for f64 {
    const KIND: BasisKind = BasisKind::Dct;

    fn from_real(v: f64) -> Self {
        v
    }
    fn real(self) -> f64 {
        self
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn div(self, other: Self) -> Self {
        self / other
    }
    fn synthesize(basis: &SparsityBasis, coeffs: &[Self]) -> Vec<Self> {
        debug_assert_eq!(basis.kind, BasisKind::Dct);
        basis.dct_synthesize(coeffs)
    }
    fn analyze(basis: &SparsityBasis, time: &[Self]) -> Vec<Self> {
        debug_assert_eq!(basis.kind, BasisKind::Dct);
        basis.dct_analyze(time)
    }
    fn basis_entry(t: usize, k: usize, n: usize) -> Self {
        direct::dct_entry(k, t, n)
    }
    fn wrap(values: Vec<Self>) -> CoefficientVector {
        CoefficientVector::Dct(values)
    }
    fn unwrap(coeffs: &CoefficientVector) -> Option<&[Self]> {
        coeffs.as_dct()
    }
}

impl Coefficient for Complex64 {
    const KIND: BasisKind = BasisKind::Dft;

    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn real(self) -> f64 {
        self.re
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn div(self, other: Self) -> Self {
        self / other
    }
    fn synthesize(basis: &SparsityBasis, coeffs: &[Self]) -> Vec<Self> {
        debug_assert_eq!(basis.kind, BasisKind::Dft);
        basis.dft_synthesize(coeffs)
    }
    fn analyze(basis: &SparsityBasis, time: &[Self]) -> Vec<Self> {
        debug_assert_eq!(basis.kind, BasisKind::Dft);
        basis.dft_analyze(time)
    }
    fn basis_entry(t: usize, k: usize, n: usize) -> Self {
        direct::dft_entry(k, t, n).conj()
    }
    fn wrap(values: Vec<Self>) -> CoefficientVector {
        CoefficientVector::Dft(values)
    }
    fn unwrap(coeffs: &CoefficientVector) -> Option<&[Self]> {
        coeffs.as_dft()
    }
}

/// Direct O(N²) evaluation of both transforms. This is the defining form;
/// the FFT-based paths in [`SparsityBasis`] must agree with it.
pub mod direct {
    use super::*;

    /// Forward DCT matrix entry `Ψᵀ[k][n] = c(k) cos((2n+1)kπ / 2N)`.
    pub fn dct_entry(k: usize, n: usize, len: usize) -> f64 {
        // Reduce the phase modulo 4N in exact integer arithmetic first.
        let phase = ((2 * n + 1) * k) % (4 * len);
        dct_scale(k, len) * (PI * phase as f64 / (2 * len) as f64).cos()
    }

    /// Forward unitary DFT matrix entry `e^{-j2πnk/N} / √N`.
    pub fn dft_entry(k: usize, n: usize, len: usize) -> Complex64 {
        let phase = (n * k) % len;
        Complex64::from_polar(1.0 / (len as f64).sqrt(), -2.0 * PI * phase as f64 / len as f64)
    }

    pub fn dct_forward(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| (0..n).map(|t| x[t] * dct_entry(k, t, n)).sum())
            .collect()
    }

    pub fn dct_inverse(c: &[f64]) -> Vec<f64> {
        let n = c.len();
        (0..n)
            .map(|t| (0..n).map(|k| c[k] * dct_entry(k, t, n)).sum())
            .collect()
    }

    pub fn dft_forward(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| (0..n).map(|t| x[t] * dft_entry(k, t, n)).sum())
            .collect()
    }

    pub fn dft_inverse(c: &[Complex64]) -> Vec<Complex64> {
        let n = c.len();
        (0..n)
            .map(|t| (0..n).map(|k| c[k] * dft_entry(k, t, n).conj()).sum())
            .collect()
    }
}

fn frame_basis(kind: BasisKind, frame: &Frame) -> SparsityBasis {
    // Frames are non-empty by construction.
    SparsityBasis::new(kind, frame.len()).expect("frame length is non-zero")
}

pub fn dct_forward(frame: &Frame) -> CoefficientVector {
    CoefficientVector::Dct(frame_basis(BasisKind::Dct, frame).dct_analyze(frame.samples()))
}

pub fn dft_forward(frame: &Frame) -> CoefficientVector {
    let basis = frame_basis(BasisKind::Dft, frame);
    let buf: Vec<Complex64> = frame.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    CoefficientVector::Dft(basis.dft_analyze(&buf))
}

pub fn dct_inverse(coeffs: &CoefficientVector) -> Result<Frame> {
    if coeffs.kind() != BasisKind::Dct {
        return Err(Error::BasisMismatch {
            expected: BasisKind::Dct,
            found: coeffs.kind(),
        });
    }
    let basis = SparsityBasis::dct(coeffs.len())?;
    Frame::derived(basis.inverse(coeffs)?.samples, "idct")
}

/// Returns the real frame and the discarded imaginary energy ratio.
pub fn dft_inverse(coeffs: &CoefficientVector) -> Result<(Frame, f64)> {
    if coeffs.kind() != BasisKind::Dft {
        return Err(Error::BasisMismatch {
            expected: BasisKind::Dft,
            found: coeffs.kind(),
        });
    }
    let basis = SparsityBasis::dft(coeffs.len())?;
    let out = basis.inverse(coeffs)?;
    Ok((Frame::derived(out.samples, "idft")?, out.discarded_imag_energy))
}

/// Number of coefficients whose magnitude exceeds `rel_threshold` times the
/// largest magnitude. An all-zero vector has count 0.
pub fn sparsity_count(coeffs: &CoefficientVector, rel_threshold: f64) -> usize {
    let mags = coeffs.magnitudes();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0;
    }
    mags.iter().filter(|&&m| m > rel_threshold * peak).count()
}
