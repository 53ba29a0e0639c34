//! Special functions shared by the operator builders and the closed-form
//! rate expressions.

use num_traits::Float;

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by upward three-term
/// recurrence.
///
/// Negative degrees or orders are unrepresentable by construction.
pub fn laguerre(n: usize, alpha: usize, x: f64) -> f64 {
    let a = alpha as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    const SMALL: [f64; 8] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0];
    if n < SMALL.len() {
        SMALL[n].ln()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Bose occupation `1/(e^{ω/T} − 1)`; exactly zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let r = omega / temperature;
    if r > 700.0 {
        0.0
    } else {
        1.0 / r.exp_m1()
    }
}

/// Matrix element `⟨n| exp[x(a − a†)] |m⟩` of the displacement operator.
///
/// Uses the Laguerre closed form with the factorial ratio in log space.
/// For `n ≥ m` the element carries the sign `(−1)^{n−m}`; elements above the
/// diagonal are sign-free, which is the form quoted for `D_{n,n−k}` in
/// the multi-photon resonance formulas.
pub fn displacement_element(n: usize, m: usize, x: f64) -> f64 {
    let (hi, lo) = if n >= m { (n, m) } else { (m, n) };
    let k = hi - lo;
    let x2 = x * x;
    let lag = laguerre(lo, k, x2);
    if lag == 0.0 {
        return 0.0;
    }
    let power = if k == 0 {
        0.0
    } else if x == 0.0 {
        return 0.0;
    } else {
        k as f64 * x.abs().ln()
    };
    let log_mag = power - 0.5 * x2 + 0.5 * (ln_factorial(lo) - ln_factorial(hi));
    let mut value = log_mag.exp() * lag;
    // x^k carries the sign of x for odd k
    if x < 0.0 && k % 2 == 1 {
        value = -value;
    }
    if n > m && k % 2 == 1 {
        value = -value;
    }
    value
}
