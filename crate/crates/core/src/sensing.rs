//! Random time-sample selection and the compressive-sensing operator.
//!
//! The operator `Ω` is the row subset of the inverse-transform matrix `B`
//! picked by a [`SamplingPattern`]. Applying it to a coefficient vector
//! yields the selected time samples of the corresponding signal. Because `B`
//! is orthonormal, `Ω·Ωᴴ = I_M`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng;
use crate::signal::Frame;
use crate::transforms::{BasisKind, Coefficient, CoefficientVector, SparsityBasis};

/// Largest `N` for which [`CsOperator::materialize`] builds an explicit matrix.
pub const MATERIALIZE_LIMIT: usize = 4096;

/// `M = round(percentage / 100 × N)`, rounding halves up.
pub fn measurement_count(percentage: u32, n: usize) -> usize {
    (percentage as usize * n + 50) / 100
}

/// The ordered time indices selected for measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingPattern {
    indices: Vec<usize>,
    n: usize,
    seed: u64,
}

impl SamplingPattern {
    /// Draws the first `m` entries of a seeded random permutation of `0..n`.
    pub fn draw(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidMeasurementCount { m, n });
        }
        let indices = rng::permutation_prefix(&mut rng::seeded(seed), n, m);
        Ok(SamplingPattern { indices, n, seed })
    }

    /// Wraps an explicit index list. Indices must be distinct and `< n`.
    pub fn from_indices(n: usize, indices: Vec<usize>, seed: u64) -> Result<Self> {
        if indices.is_empty() || indices.len() > n {
            return Err(Error::InvalidMeasurementCount { m: indices.len(), n });
        }
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPattern(format!("index {i} repeated")));
            }
        }
        Ok(SamplingPattern { indices, n, seed })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Text form with the explicit index list on a second line.
    pub fn to_text_with_indices(&self) -> String {
        let list: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        format!("{self}\n{}\n", list.join(" "))
    }
}

/// `"N M seed"`.
impl fmt::Display for SamplingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.n, self.m(), self.seed)
    }
}

/// Parses `"N M seed"`, optionally followed by whitespace-separated indices.
/// Without indices the pattern is regenerated from the seed.
impl FromStr for SamplingPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::InvalidPattern(format!("missing {what}")))?;
            tok.parse::<u64>()
                .map_err(|_| Error::InvalidPattern(format!("bad {what} '{tok}'")))
        };
        let n = next("N")? as usize;
        let m = next("M")? as usize;
        let seed = next("seed")?;
        let rest: Vec<usize> = tokens
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidPattern(format!("bad index '{t}'")))
            })
            .collect::<Result<_>>()?;
        if rest.is_empty() {
            Self::draw(n, m, seed)
        } else if rest.len() != m {
            Err(Error::InvalidPattern(format!(
                "header says M = {m} but {} indices follow",
                rest.len()
            )))
        } else {
            Self::from_indices(n, rest, seed)
        }
    }
}

/// Observed samples `y` together with where and under which basis they will
/// be interpreted.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    y: Vec<f64>,
    pattern: SamplingPattern,
    basis: SparsityBasis,
}

impl MeasurementSet {
    pub fn new(y: Vec<f64>, pattern: SamplingPattern, basis: SparsityBasis) -> Result<Self> {
        if y.len() != pattern.m() {
            return Err(Error::LengthMismatch {
                expected: pattern.m(),
                found: y.len(),
            });
        }
        if pattern.n() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                found: pattern.n(),
            });
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(MeasurementSet { y, pattern, basis })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pattern(&self) -> &SamplingPattern {
        &self.pattern
    }

    pub fn basis(&self) -> &SparsityBasis {
        &self.basis
    }

    pub fn operator(&self) -> CsOperator {
        CsOperator {
            pattern: self.pattern.clone(),
            basis: self.basis.clone(),
        }
    }
}

/// Picks `frame[pattern.indices[i]]` for each `i`.
pub fn sample_frame(frame: &Frame, pattern: &SamplingPattern) -> Result<Vec<f64>> {
    if pattern.n() != frame.len() {
        return Err(Error::LengthMismatch {
            expected: frame.len(),
            found: pattern.n(),
        });
    }
    let s = frame.samples();
    Ok(pattern.indices().iter().map(|&i| s[i]).collect())
}

pub fn measure(frame: &Frame, pattern: SamplingPattern, basis: SparsityBasis) -> Result<MeasurementSet> {
    let y = sample_frame(frame, &pattern)?;
    MeasurementSet::new(y, pattern, basis)
}

/// A vector in measurement space (length M).
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementVector {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl MeasurementVector {
    pub fn len(&self) -> usize {
        match self {
            MeasurementVector::Real(v) => v.len(),
            MeasurementVector::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            MeasurementVector::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            MeasurementVector::Complex(v) => v.clone(),
        }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Coefficient> Matrix<T> {
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::default(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `A·Aᴴ`.
    pub fn gram(&self) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.rows * self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                let v = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .fold(T::default(), |acc, (&a, &b)| acc + a * b.conj());
                data.push(v);
            }
        }
        Matrix {
            rows: self.rows,
            cols: self.rows,
            data,
        }
    }
}

/// An explicit `Ω`, for verification at small N.
#[derive(Debug, Clone, PartialEq)]
pub enum DenseOperator {
    Dct(Matrix<f64>),
    Dft(Matrix<Complex64>),
}

/// `Ω = B[pattern, :]`, applied without forming the matrix.
#[derive(Debug, Clone)]
pub struct CsOperator {
    pattern: SamplingPattern,
    basis: SparsityBasis,
}

impl CsOperator {
    pub fn new(pattern: SamplingPattern, basis: SparsityBasis) -> Result<Self> {
        if pattern.n() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                found: pattern.n(),
            });
        }
        Ok(CsOperator { pattern, basis })
    }

    pub fn pattern(&self) -> &SamplingPattern {
        &self.pattern
    }

    pub fn basis(&self) -> &SparsityBasis {
        &self.basis
    }

    /// `Ω·x`: the selected time samples of the signal with coefficients `x`.
    /// Real for the DCT, complex for the DFT.
    pub fn apply(&self, x: &CoefficientVector) -> Result<MeasurementVector> {
        self.check_coeffs(x)?;
        Ok(match x {
            CoefficientVector::Dct(c) => MeasurementVector::Real(self.apply_raw(c)),
            CoefficientVector::Dft(c) => MeasurementVector::Complex(self.apply_raw(c)),
        })
    }

    /// `Ωᴴ·r`. A real `r` is accepted for either basis.
    pub fn adjoint(&self, r: &MeasurementVector) -> Result<CoefficientVector> {
        if r.len() != self.pattern.m() {
            return Err(Error::LengthMismatch {
                expected: self.pattern.m(),
                found: r.len(),
            });
        }
        match (self.basis.kind(), r) {
            (BasisKind::Dct, MeasurementVector::Real(v)) => Ok(CoefficientVector::Dct(self.adjoint_raw(v))),
            (BasisKind::Dct, MeasurementVector::Complex(_)) => Err(Error::BasisMismatch {
                expected: BasisKind::Dct,
                found: BasisKind::Dft,
            }),
            (BasisKind::Dft, r) => Ok(CoefficientVector::Dft(self.adjoint_raw(&r.to_complex()))),
        }
    }

    pub fn materialize(&self) -> Result<DenseOperator> {
        let n = self.basis.len();
        if n > MATERIALIZE_LIMIT {
            return Err(Error::MaterializeTooLarge {
                n,
                limit: MATERIALIZE_LIMIT,
            });
        }
        Ok(match self.basis.kind() {
            BasisKind::Dct => DenseOperator::Dct(self.materialize_raw()),
            BasisKind::Dft => DenseOperator::Dft(self.materialize_raw()),
        })
    }

    fn check_coeffs(&self, x: &CoefficientVector) -> Result<()> {
        if x.kind() != self.basis.kind() {
            return Err(Error::BasisMismatch {
                expected: self.basis.kind(),
                found: x.kind(),
            });
        }
        if x.len() != self.basis.len() {
            return Err(Error::LengthMismatch {
                expected: self.basis.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn apply_raw<C: Coefficient>(&self, x: &[C]) -> Vec<C> {
        let t = C::synthesize(&self.basis, x);
        self.pattern.indices().iter().map(|&i| t[i]).collect()
    }

    pub(crate) fn adjoint_raw<C: Coefficient>(&self, r: &[C]) -> Vec<C> {
        let mut t = vec![C::default(); self.basis.len()];
        for (&i, &v) in self.pattern.indices().iter().zip(r) {
            t[i] = v;
        }
        C::analyze(&self.basis, &t)
    }

    /// Column `k` of `Ω`.
    pub(crate) fn column<C: Coefficient>(&self, k: usize) -> Vec<C> {
        let n = self.basis.len();
        self.pattern
            .indices()
            .iter()
            .map(|&t| C::basis_entry(t, k, n))
            .collect()
    }

    fn materialize_raw<C: Coefficient>(&self) -> Matrix<C> {
        let n = self.basis.len();
        let mut data = Vec::with_capacity(self.pattern.m() * n);
        for &t in self.pattern.indices() {
            data.extend((0..n).map(|k| C::basis_entry(t, k, n)));
        }
        Matrix {
            rows: self.pattern.m(),
            cols: n,
            data,
        }
    }
}
