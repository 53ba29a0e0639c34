//! Matrix exponential by degree-13 Padé approximation with scaling and
//! squaring.

use nalgebra::{ComplexField, DMatrix};

const B: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `‖A‖₁` above which the argument is halved before the Padé step.
const THETA_13: f64 = 5.371_920_351_148_152;

fn norm1<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` for a square real or complex matrix. Returns `None` if the
/// Padé denominator is singular or the result is not finite.
pub fn expm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = norm1(a);
    if !norm.is_finite() {
        return None;
    }
    let s = if norm > THETA_13 {
        ComplexField::ceil(ComplexField::log2(norm / THETA_13)) as i32
    } else {
        0
    };
    let scale = T::from_real(ComplexField::powi(2.0, -s));
    let a = a.map(|z| z * scale.clone());
    let b = |k: usize| T::from_real(B[k]);
    let id = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &a * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let mut r = (&v - &u).lu().solve(&(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().all(|z| z.clone().is_finite()) {
        Some(r)
    } else {
        None
    }
}
