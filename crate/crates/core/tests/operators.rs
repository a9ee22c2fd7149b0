//! Transform and sensing-operator properties, checked against explicit
//! matrices built from the direct definitions.

use csaudio::sensing::DenseOperator;
use csaudio::transforms::direct;
use csaudio::{
    measure, BasisKind, BasisRow, CoefficientVector, CsOperator, Frame, MeasurementVector, SamplingPattern,
    SparsityBasis,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_frame(n: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Frame::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect(), 8000).unwrap()
}

fn to_c(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn coeffs_c(c: &CoefficientVector) -> Vec<Complex64> {
    match c {
        CoefficientVector::Dct(v) => to_c(v),
        CoefficientVector::Dft(v) => v.clone(),
    }
}

/// Forward matrix `F[k][t]` from the direct definitions.
fn forward_matrix(kind: BasisKind, n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|k| {
            (0..n)
                .map(|t| match kind {
                    BasisKind::Dct => Complex64::new(direct::dct_entry(k, t, n), 0.0),
                    BasisKind::Dft => direct::dft_entry(k, t, n),
                })
                .collect()
        })
        .collect()
}

#[test]
fn explicit_matrices_are_unitary() {
    for n in [1usize, 2, 3, 8, 17, 64] {
        for kind in BasisKind::ALL {
            let f = forward_matrix(kind, n);
            for i in 0..n {
                for j in 0..n {
                    let v: Complex64 = (0..n).map(|t| f[i][t] * f[j][t].conj()).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).norm() < 1e-10, "{kind} n={n} ({i},{j}) {v}");
                }
            }
        }
    }
}

#[test]
fn stacked_inverse_rows_reproduce_inverse_transform() {
    for n in [5usize, 32, 45] {
        for kind in BasisKind::ALL {
            let basis = SparsityBasis::new(kind, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let c = match kind {
                BasisKind::Dct => CoefficientVector::Dct((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()),
                BasisKind::Dft => {
                    // Conjugate-symmetric so the inverse is real and comparable.
                    let f = random_frame(n, 3);
                    basis.forward(f.samples()).unwrap()
                }
            };
            let via_inverse = basis.inverse(&c).unwrap().samples;
            for (t, &expected) in via_inverse.iter().enumerate() {
                let row = basis.inverse_row(t).unwrap();
                let v = row.apply(&c).unwrap();
                assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12);
                // Row t of B is column t of the forward matrix, conjugated.
                let f = forward_matrix(kind, n);
                match row {
                    BasisRow::Dct(r) => {
                        assert!(r.iter().enumerate().all(|(k, x)| (x - f[k][t].re).abs() < 1e-12))
                    }
                    BasisRow::Dft(r) => {
                        assert!(r.iter().enumerate().all(|(k, x)| (x - f[k][t].conj()).norm() < 1e-12))
                    }
                }
            }
        }
    }
}

#[test]
fn pattern_indices_are_uniform() {
    let (n, m) = (1000, 300);
    let mut counts = vec![0u32; n];
    for seed in 0..200 {
        for &i in SamplingPattern::draw(n, m, seed).unwrap().indices() {
            counts[i] += 1;
        }
    }
    for (i, &c) in counts.iter().enumerate() {
        let freq = c as f64 / 200.0;
        assert!((freq - 0.3).abs() <= 0.15, "index {i}: {freq}");
    }
    // Counts are Bin(200, 0.3), so about 10% of indices land outside ±0.05 even
    // for an exact sampler. The band is checked as a fraction of indices.
    let within = counts
        .iter()
        .filter(|&&c| (c as f64 / 200.0 - 0.3).abs() <= 0.05)
        .count();
    assert!(within as f64 / n as f64 > 0.85, "{within} of {n} within ±0.05");
}

#[test]
fn operator_commutes_with_measurement() {
    for n in [8usize, 64, 3000] {
        for kind in BasisKind::ALL {
            let basis = SparsityBasis::new(kind, n).unwrap();
            for seed in 0..5u64 {
                let frame = random_frame(n, seed);
                let pattern = SamplingPattern::draw(n, (n / 3).max(1), seed).unwrap();
                let op = CsOperator::new(pattern.clone(), basis.clone()).unwrap();
                let applied = op.apply(&basis.forward(frame.samples()).unwrap()).unwrap().to_complex();
                let meas = measure(&frame, pattern, basis.clone()).unwrap();
                for (a, &b) in applied.iter().zip(meas.y()) {
                    assert!((a - Complex64::new(b, 0.0)).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn adjoint_identity_and_row_orthonormality() {
    let (n, m) = (64, 20);
    for kind in BasisKind::ALL {
        let basis = SparsityBasis::new(kind, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for pair in 0..50u64 {
            let op = CsOperator::new(SamplingPattern::draw(n, m, pair).unwrap(), basis.clone()).unwrap();
            let x = match kind {
                BasisKind::Dct => CoefficientVector::Dct((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()),
                BasisKind::Dft => CoefficientVector::Dft(
                    (0..n)
                        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect(),
                ),
            };
            let r: Vec<Complex64> = match kind {
                BasisKind::Dct => (0..m)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
                    .collect(),
                BasisKind::Dft => (0..m)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            };
            let r_vec = match kind {
                BasisKind::Dct => MeasurementVector::Real(r.iter().map(|z| z.re).collect()),
                BasisKind::Dft => MeasurementVector::Complex(r.clone()),
            };
            let ox = op.apply(&x).unwrap().to_complex();
            let ohr = coeffs_c(&op.adjoint(&r_vec).unwrap());
            let lhs: Complex64 = ox.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
            let rhs: Complex64 = coeffs_c(&x).iter().zip(&ohr).map(|(a, b)| a.conj() * b).sum();
            assert!((lhs - rhs).norm() / lhs.norm() < 1e-10);

            // Ω(Ωᴴ r) = r.
            let back = op.apply(&op.adjoint(&r_vec).unwrap()).unwrap().to_complex();
            assert!(back.iter().zip(&r).all(|(a, b)| (a - b).norm() < 1e-10));
        }
    }
}

#[test]
fn matrix_free_equals_materialized_n32_m12() {
    let (n, m) = (32, 12);
    for kind in BasisKind::ALL {
        let basis = SparsityBasis::new(kind, n).unwrap();
        let op = CsOperator::new(SamplingPattern::draw(n, m, 4).unwrap(), basis.clone()).unwrap();
        let x = basis.forward(random_frame(n, 8).samples()).unwrap();
        let fast = op.apply(&x).unwrap().to_complex();
        let slow: Vec<Complex64> = match (op.materialize().unwrap(), &x) {
            (DenseOperator::Dct(a), CoefficientVector::Dct(v)) => to_c(&a.mul_vec(v)),
            (DenseOperator::Dft(a), CoefficientVector::Dft(v)) => a.mul_vec(v),
            _ => unreachable!(),
        };
        assert!(fast.iter().zip(&slow).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}

#[test]
fn operator_agrees_with_direct_inverse_rows() {
    let n = 24;
    for kind in BasisKind::ALL {
        let basis = SparsityBasis::new(kind, n).unwrap();
        let op = CsOperator::new(SamplingPattern::draw(n, 9, 1).unwrap(), basis.clone()).unwrap();
        let x = basis.forward(random_frame(n, 2).samples()).unwrap();
        let fast = op.apply(&x).unwrap().to_complex();
        for (i, &t) in op.pattern().indices().iter().enumerate() {
            let v = basis.inverse_row(t).unwrap().apply(&x).unwrap();
            assert!((v - fast[i]).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn patterns_are_distinct_and_reproducible(n in 1usize..400, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let m = ((frac * n as f64) as usize).clamp(1, n);
        let p = SamplingPattern::draw(n, m, seed).unwrap();
        prop_assert_eq!(p.m(), m);
        let mut idx = p.indices().to_vec();
        idx.sort_unstable();
        idx.dedup();
        prop_assert_eq!(idx.len(), m);
        prop_assert!(idx.iter().all(|&i| i < n));
        prop_assert_eq!(&SamplingPattern::draw(n, m, seed).unwrap(), &p);
        prop_assert_eq!(&p.to_string().parse::<SamplingPattern>().unwrap(), &p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_round_trip_and_match_direct(
        values in prop::collection::vec(-10.0f64..10.0, 1..96),
        dft in any::<bool>(),
    ) {
        let n = values.len();
        let kind = if dft { BasisKind::Dft } else { BasisKind::Dct };
        let basis = SparsityBasis::new(kind, n).unwrap();
        let c = basis.forward(&values).unwrap();
        let back = basis.inverse(&c).unwrap();
        prop_assert!(back.discarded_imag_energy < 1e-20);
        for (a, b) in values.iter().zip(&back.samples) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let reference = match kind {
            BasisKind::Dct => to_c(&direct::dct_forward(&values)),
            BasisKind::Dft => direct::dft_forward(&to_c(&values)),
        };
        for (a, b) in coeffs_c(&c).iter().zip(&reference) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }
}
