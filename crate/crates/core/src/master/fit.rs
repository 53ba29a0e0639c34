//! Frequency and envelope decay of a damped oscillation.

use alloc::vec::Vec;

use num_traits::Float;

use crate::{Error, Result};

/// Minimum number of oscillation periods covered by a fitted series.
pub const MIN_PERIODS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RabiFit {
    /// Angular frequency.
    pub omega: f64,
    /// Envelope decay rate.
    pub decay: f64,
    /// Interpolated `(time, value)` extrema used for the envelope.
    pub extrema: Vec<(f64, f64)>,
}

/// `|Σ_j y_j e^{−iωt_j}|²`.
fn power(times: &[f64], y: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (t, v) in times.iter().zip(y) {
        let (s, c) = (omega * t).sin_cos();
        re += v * c;
        im -= v * s;
    }
    re * re + im * im
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() <= 1e-12 * (a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Vertex of the parabola through three equally spaced samples, as an
/// offset in `[-1, 1]` and the vertex value.
fn parabolic_vertex(y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        return (0.0, y1);
    }
    let off = (0.5 * (y0 - y2) / denom).clamp(-1.0, 1.0);
    (off, y1 - 0.25 * (y0 - y2) * off)
}

/// Angular frequency of the strongest spectral peak above 1.5 cycles per
/// window, refined between the neighbouring grid points of an eightfold
/// zero-padded grid.
fn dominant_frequency(times: &[f64], y: &[f64], dt: f64) -> f64 {
    let span = times[times.len() - 1] - times[0];
    let step = 2.0 * core::f64::consts::PI / (8.0 * span);
    let lo = 2.0 * core::f64::consts::PI * 1.5 / span;
    let hi = core::f64::consts::PI / dt;
    let mut best = (lo, f64::NEG_INFINITY);
    let mut w = lo;
    while w <= hi {
        let p = power(times, y, w);
        if p > best.1 {
            best = (w, p);
        }
        w += step;
    }
    golden_max(|w| power(times, y, w), (best.0 - step).max(lo * 0.5), best.0 + step)
}

/// Fits `y(t) ≈ c + A e^{−Γt} cos(Ωt + φ)` on a uniform time grid.
///
/// `Ω` is the peak of the discrete spectrum of the mean-removed,
/// Hann-tapered series.
/// `Γ` is the slope of a log-linear regression of peak-to-trough
/// amplitudes between successive extrema against their mid-times; an
/// extremum must dominate a window of half a period to count, which rejects
/// small fast ripples. Needs at least [`MIN_PERIODS`] periods and three
/// extrema.
pub fn fit_rabi_decay(times: &[f64], values: &[f64]) -> Result<RabiFit> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::invalid("series", "times and values differ in length"));
    }
    if n < 16 {
        return Err(Error::invalid("series", "need at least 16 samples"));
    }
    if values.iter().chain(times).any(|v| !v.is_finite()) {
        return Err(Error::invalid("series", "non-finite sample"));
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::invalid("series", "times must be uniformly spaced and ascending"));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    // Hann taper suppresses leakage from the window edges and the baseline
    let centred: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - mean) * (core::f64::consts::PI * i as f64 / (n - 1) as f64).sin().powi(2))
        .collect();
    let omega = dominant_frequency(times, &centred, dt);
    let period = 2.0 * core::f64::consts::PI / omega;

    let half_window = ((0.25 * period / dt).round() as usize).max(1);
    // (time, value, is_max)
    let mut ext: Vec<(f64, f64, bool)> = Vec::new();
    for i in 1..n - 1 {
        let lo = i.saturating_sub(half_window);
        let hi = (i + half_window).min(n - 1);
        let window = &values[lo..=hi];
        let is_max = window.iter().all(|v| *v <= values[i]) && values[i] > values[i - 1];
        let is_min = window.iter().all(|v| *v >= values[i]) && values[i] < values[i - 1];
        if !(is_max || is_min) || i - lo < half_window || hi - i < half_window {
            continue;
        }
        let (off, v) = parabolic_vertex(values[i - 1], values[i], values[i + 1]);
        let e = (times[i] + off * dt, v, is_max);
        match ext.last_mut() {
            Some(last) if last.2 == is_max => {
                if (is_max && v > last.1) || (!is_max && v < last.1) {
                    *last = e;
                }
            }
            _ => ext.push(e),
        }
    }
    if ext.len() < 3 {
        return Err(Error::Overdamped { extrema: ext.len() });
    }
    let span = times[n - 1] - times[0];
    if span < MIN_PERIODS * period {
        return Err(Error::invalid("series", "covers fewer than 5 oscillation periods"));
    }
    let mut xs = Vec::with_capacity(ext.len() - 1);
    let mut ys = Vec::with_capacity(ext.len() - 1);
    for w in ext.windows(2) {
        let amp = (w[1].1 - w[0].1).abs();
        if amp > 0.0 {
            xs.push(0.5 * (w[0].0 + w[1].0));
            ys.push(amp.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::Overdamped { extrema: ext.len() });
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(RabiFit {
        omega,
        decay: -sxy / sxx,
        extrema: ext.iter().map(|e| (e.0, e.1)).collect(),
    })
}
