//! Equality-constrained l1 minimization (basis pursuit) and a greedy
//! orthogonal matching pursuit used to cross-check it.
//!
//! Basis pursuit is solved with ADMM on the splitting
//!
//! ```text
//! minimize ‖z‖₁  subject to  x = z,  Ωx = y
//! ```
//!
//! Since the rows of `Ω` are orthonormal, projecting onto `{x : Ωx = y}` is
//! `v − Ωᴴ(Ωv − y)`: one inverse transform, overwrite the observed samples,
//! one forward transform. No linear system is ever solved.

use crate::error::{Error, Result};
use crate::sensing::{CsOperator, MeasurementSet};
use crate::signal::Frame;
use crate::transforms::{Coefficient, CoefficientVector};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative feasibility `‖Ωz − y‖ / ‖y‖` required to stop.
    pub residual_tol: f64,
    /// Relative iterate change `‖z_k − z_{k−1}‖ / ‖z_k‖` required to stop.
    pub change_tol: f64,
    /// ADMM penalty; the shrinkage threshold is `1 / admm_rho`.
    pub admm_rho: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 5000,
            residual_tol: 1e-6,
            change_tol: 1e-8,
            admm_rho: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !open_unit(self.residual_tol) || !open_unit(self.change_tol) {
            return Err(Error::InvalidConfig("tolerances must lie in (0, 1)".into()));
        }
        if !(self.admm_rho > 0.0 && self.admm_rho.is_finite()) {
            return Err(Error::InvalidConfig("admm_rho must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub coeffs: CoefficientVector,
    pub frame: Frame,
    pub iterations: usize,
    /// `‖Ω·coeffs − y‖ / ‖y‖` (0 when `y = 0`).
    pub final_residual: f64,
    pub converged: bool,
    /// DFT only: share of the inverse transform's energy that was imaginary.
    pub discarded_imag_energy: f64,
}

/// Sum of coefficient magnitudes (complex modulus for the DFT).
pub fn l1_norm(x: &CoefficientVector) -> f64 {
    x.magnitudes().iter().sum()
}

fn norm<C: Coefficient>(v: &[C]) -> f64 {
    v.iter().map(|c| c.modulus_sqr()).sum::<f64>().sqrt()
}

fn residual_norm<C: Coefficient>(op: &CsOperator, x: &[C], y: &[f64]) -> f64 {
    op.apply_raw(x)
        .iter()
        .zip(y)
        .map(|(&a, &b)| (a - C::from_real(b)).modulus_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_measurements(meas: &MeasurementSet) -> Result<()> {
    if let Some(i) = meas.y().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

fn finish(
    meas: &MeasurementSet,
    coeffs: CoefficientVector,
    iterations: usize,
    final_residual: f64,
    converged: bool,
) -> Result<Reconstruction> {
    let out = meas.basis().inverse(&coeffs)?;
    Ok(Reconstruction {
        coeffs,
        frame: Frame::derived(out.samples, "reconstruction")?,
        iterations,
        final_residual,
        converged,
        discarded_imag_energy: out.discarded_imag_energy,
    })
}

/// Basis pursuit: `min ‖x‖₁ s.t. Ωx = y`.
///
/// Non-convergence within `max_iters` is not an error; the returned
/// reconstruction has `converged = false`.
pub fn solve_bp(meas: &MeasurementSet, config: &SolverConfig) -> Result<Reconstruction> {
    solve_bp_inner(meas, config, None)
}

/// As [`solve_bp`], also returning `‖x − z‖` after every iteration.
pub fn solve_bp_traced(meas: &MeasurementSet, config: &SolverConfig) -> Result<(Reconstruction, Vec<f64>)> {
    let mut trace = Vec::new();
    let rec = solve_bp_inner(meas, config, Some(&mut trace))?;
    Ok((rec, trace))
}

fn solve_bp_inner(
    meas: &MeasurementSet,
    config: &SolverConfig,
    trace: Option<&mut Vec<f64>>,
) -> Result<Reconstruction> {
    config.validate()?;
    check_measurements(meas)?;
    let op = meas.operator();
    let out = match meas.basis().kind() {
        crate::transforms::BasisKind::Dct => admm::<f64>(&op, meas.y(), config, trace),
        crate::transforms::BasisKind::Dft => admm::<Complex64>(&op, meas.y(), config, trace),
    };
    finish(meas, out.coeffs, out.iterations, out.residual, out.converged)
}

struct AdmmOutput {
    coeffs: CoefficientVector,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn admm<C: Coefficient>(
    op: &CsOperator,
    y: &[f64],
    config: &SolverConfig,
    mut trace: Option<&mut Vec<f64>>,
) -> AdmmOutput {
    let n = op.basis().len();
    let basis = op.basis();
    let indices = op.pattern().indices();
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if y_norm == 0.0 {
        return AdmmOutput {
            coeffs: C::wrap(vec![C::default(); n]),
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }

    let threshold = 1.0 / config.admm_rho;
    // Start from the minimum-energy feasible point with the dual at the
    // shrinkage threshold along its sign pattern. With M = N this is already
    // the fixed point.
    let y_field: Vec<C> = y.iter().map(|&v| C::from_real(v)).collect();
    let mut z = op.adjoint_raw(&y_field);
    let mut u: Vec<C> = z
        .iter()
        .map(|&c| {
            let m = c.modulus();
            if m > 0.0 {
                c.scale(threshold / m)
            } else {
                C::default()
            }
        })
        .collect();
    let mut z_prev = vec![C::default(); n];
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=config.max_iters {
        iterations = it;

        // x = P(z − u): synthesize, overwrite observed samples, analyze.
        let v: Vec<C> = z.iter().zip(&u).map(|(&a, &b)| a - b).collect();
        let mut t = C::synthesize(basis, &v);
        for (&i, &yi) in indices.iter().zip(y) {
            t[i] = C::from_real(yi);
        }
        let x = C::analyze(basis, &t);

        std::mem::swap(&mut z, &mut z_prev);
        let mut primal = 0.0;
        let mut change = 0.0;
        let mut z_norm = 0.0;
        for k in 0..n {
            let w = x[k] + u[k];
            let zk = w.shrink(threshold);
            z[k] = zk;
            u[k] = w - zk;
            primal += (x[k] - zk).modulus_sqr();
            change += (zk - z_prev[k]).modulus_sqr();
            z_norm += zk.modulus_sqr();
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(primal.sqrt());
        }

        let rel_change = if z_norm > 0.0 {
            (change / z_norm).sqrt()
        } else {
            f64::INFINITY
        };
        if rel_change <= config.change_tol {
            residual = residual_norm(op, &z, y) / y_norm;
            if residual <= config.residual_tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        residual = residual_norm(op, &z, y) / y_norm;
    }

    AdmmOutput {
        coeffs: C::wrap(z),
        iterations,
        residual,
        converged,
    }
}

/// Orthogonal matching pursuit over the columns of `Ω`.
///
/// Picks at most `k_max` atoms, stopping early once the relative residual
/// drops to `residual_tol`. Correlation ties go to the lowest index.
pub fn solve_omp(meas: &MeasurementSet, k_max: usize, residual_tol: f64) -> Result<Reconstruction> {
    check_measurements(meas)?;
    let m = meas.pattern().m();
    if k_max == 0 || k_max > m {
        return Err(Error::InvalidConfig(format!("K_max must lie in 1..={m}, got {k_max}")));
    }
    let op = meas.operator();
    let (coeffs, iterations, residual) = match meas.basis().kind() {
        crate::transforms::BasisKind::Dct => omp::<f64>(&op, meas.y(), k_max, residual_tol),
        crate::transforms::BasisKind::Dft => omp::<Complex64>(&op, meas.y(), k_max, residual_tol),
    };
    finish(meas, coeffs, iterations, residual, residual <= residual_tol)
}

fn inner<C: Coefficient>(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).fold(C::default(), |acc, (&x, &y)| acc + x.conj() * y)
}

fn omp<C: Coefficient>(op: &CsOperator, y_obs: &[f64], k_max: usize, tol: f64) -> (CoefficientVector, usize, f64) {
    let n = op.basis().len();
    let y: Vec<C> = y_obs.iter().map(|&v| C::from_real(v)).collect();
    let y_norm = norm(&y);
    if y_norm == 0.0 {
        return (C::wrap(vec![C::default(); n]), 0, 0.0);
    }

    let mut active: Vec<usize> = Vec::new();
    let mut in_active = vec![false; n];
    // Incremental QR of the active columns: q holds orthonormal columns,
    // r[j] the j-th column of the upper-triangular factor.
    let mut q: Vec<Vec<C>> = Vec::new();
    let mut r: Vec<Vec<C>> = Vec::new();
    let mut residual = y.clone();

    while active.len() < k_max && norm(&residual) / y_norm > tol {
        let corr = op.adjoint_raw(&residual);
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in corr.iter().enumerate() {
            if in_active[k] {
                continue;
            }
            let mag = c.modulus();
            if best.is_none_or(|(_, b)| mag > b) {
                best = Some((k, mag));
            }
        }
        let Some((k, mag)) = best else { break };
        if mag == 0.0 {
            break;
        }

        let col = op.column::<C>(k);
        let mut v = col.clone();
        let mut rcol = vec![C::default(); q.len() + 1];
        // Two Gram-Schmidt passes keep q orthonormal to working precision.
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let h = inner(qj, &v);
                rcol[j] += h;
                v.iter_mut().zip(qj).for_each(|(vi, &qi)| *vi -= qi * h);
            }
        }
        let vn = norm(&v);
        if vn <= 1e-12 * norm(&col) {
            // Column already in the span of the active set.
            in_active[k] = true;
            continue;
        }
        rcol[q.len()] = C::from_real(vn);
        v.iter_mut().for_each(|vi| *vi = vi.scale(1.0 / vn));
        let h = inner(&v, &residual);
        residual.iter_mut().zip(&v).for_each(|(ri, &vi)| *ri -= vi * h);
        q.push(v);
        r.push(rcol);
        active.push(k);
        in_active[k] = true;
    }

    // Back-substitute R·c = Qᴴ·y.
    let rhs: Vec<C> = q.iter().map(|qj| inner(qj, &y)).collect();
    let s = active.len();
    let mut c = vec![C::default(); s];
    for i in (0..s).rev() {
        let mut acc = rhs[i];
        for j in i + 1..s {
            acc -= r[j][i] * c[j];
        }
        c[i] = acc.div(r[i][i]);
    }
    let mut x = vec![C::default(); n];
    for (&k, &v) in active.iter().zip(&c) {
        x[k] = v;
    }
    let res = residual_norm(op, &x, y_obs) / y_norm;
    (C::wrap(x), s, res)
}
