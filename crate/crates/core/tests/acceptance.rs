//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 so the suite never blocks `cargo test`; set `USC_RELAX_STRICT=1`
//! to exit 1 on any failure and `USC_RELAX_SLOW=1` to add the slow tier.

use std::time::{Duration, Instant};

use usc_relax_core::dipole::{solve_double_well, WellParams};
use usc_relax_core::edm::{self, EdmParams};
use usc_relax_core::eigen::diagonalize;
use usc_relax_core::expm::expm;
use usc_relax_core::grwa;
use usc_relax_core::master::{
    evolve, fit_rabi_decay, gibbs_state, right_vacuum_state, steady_state, trace_distance, BathSpec, DressedModel,
    Frame, Observable,
};
use usc_relax_core::operators::{
    build_polaron_rabi, build_rabi, cavity_quadrature, dipole_sx, displacement_element, fock_ladder,
    polaron_energy_shift, ModelParams,
};
use usc_relax_core::response::{cavity_structure_factor, linear_grid, peaks, system_impedance, transmission};
use usc_relax_core::{CMatrix, DMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn polaron(g: f64, eps: f64, n_fock: usize) -> DressedModel {
    DressedModel::rabi(&ModelParams::rabi(g, eps).with_n_fock(n_fock), Frame::Polaron).unwrap()
}

fn gibbs_stationarity() -> Outcome {
    let (mut worst_res, mut worst_td) = (0.0f64, 0.0f64);
    for g in [0.0, 1.0, 3.0] {
        for eps in [0.0, 1.0] {
            let model = polaron(g, eps, 80);
            let baths = BathSpec::standard_pair(0.05, &model.params);
            for t in [0.0, 0.2, 0.5] {
                let l = model.liouvillian(&baths, t, 24).unwrap();
                let gibbs = gibbs_state(&l.level_freqs, t);
                worst_res = worst_res.max(l.apply(&gibbs).norm());
                worst_td = worst_td.max(trace_distance(&steady_state(&l).unwrap(), &gibbs));
            }
        }
    }
    outcome(
        worst_res < 1e-9 && worst_td < 1e-8,
        format!("max residual {worst_res:.2e}, max trace distance {worst_td:.2e}"),
    )
}

fn weak_coupling_gap() -> Outcome {
    let lambda = polaron(0.0, 0.0, 80).gap(0.05, 0.0, 24).unwrap();
    outcome((lambda + 0.025).abs() < 1e-6, format!("λ = {lambda:.9}"))
}

fn usc_breakdown() -> Outcome {
    let gs = [1.5, 2.0, 2.5, 3.0];
    let gaps: Vec<f64> = gs
        .iter()
        .map(|&g| polaron(g, 0.0, 80).gap(0.05, 0.0, 24).unwrap().abs())
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let slopes: Vec<f64> = gaps.windows(2).map(|w| (w[1].ln() - w[0].ln()) / 0.5).collect();
    let ratios: Vec<f64> = slopes.windows(2).map(|s| s[1] / s[0]).collect();
    let linear = ratios.iter().all(|r| *r > 0.5 && *r < 2.0);
    outcome(
        decreasing && linear,
        format!(
            "|λ| = [{}], adjacent slope ratios {ratios:.3?}",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn resonant_resurrection() -> Outcome {
    let gap = |eps: f64| polaron(3.0, eps, 80).gap(0.05, 0.0, 24).unwrap().abs();
    let (half, one) = (gap(0.5), gap(1.0));
    let eps: Vec<f64> = (0..=30).map(|i| 0.85 + 0.01 * i as f64).collect();
    let scan: Vec<f64> = eps.iter().map(|&e| gap(e)).collect();
    let best = (0..scan.len()).max_by(|&a, &b| scan[a].total_cmp(&scan[b])).unwrap();
    let local_max = best > 0 && best < scan.len() - 1 && (0.9..=1.1).contains(&eps[best]);
    outcome(
        one >= 10.0 * half && local_max,
        format!(
            "|λ(1)|/|λ(0.5)| = {:.1}, max of |λ| at ε = {:.2}",
            one / half,
            eps[best]
        ),
    )
}

fn grwa_accuracy() -> Outcome {
    let mut report = Vec::new();
    let mut pass = true;
    for g in [2.0, 2.5, 3.0, 3.5] {
        let mut worst: f64 = 0.0;
        for k in 0..=3usize {
            let params = ModelParams::rabi(g, k as f64).with_n_fock(160);
            let exact = diagonalize(&build_polaron_rabi(&params).unwrap()).unwrap();
            let approx = if k == 0 {
                grwa::symmetric_levels(&params, 6).unwrap()
            } else {
                grwa::k_resonance_levels(k, &params, 6).unwrap()
            };
            for (a, e) in approx.iter().zip(&exact.frequencies) {
                worst = worst.max((a - e).abs());
            }
        }
        pass &= worst < 0.05;
        report.push(format!("g={g}: {worst:.3}"));
    }
    outcome(pass, format!("max level error (tol 0.05) {}", report.join(", ")))
}

fn rabi_oscillation(k: usize) -> Outcome {
    let gamma = 0.002;
    let model = polaron(3.0, k as f64, 80);
    let omega = grwa::rabi_frequency(k, k, &model.params).unwrap().abs();
    let baths = BathSpec::standard_pair(gamma, &model.params);
    let l = model.liouvillian(&baths, 0.0, 24).unwrap();
    let rho0 = right_vacuum_state(&model, 24).unwrap();
    let sx = Observable::project("sx", &model, &model.ops.dipole, 24);
    let period = 2.0 * std::f64::consts::PI / omega;
    let times = linear_grid(0.0, 8.0 * period, 4001);
    let traj = evolve(&l, &rho0, &times, &[sx], false).unwrap();
    let series = traj.series("sx").unwrap();
    let fit = match fit_rabi_decay(&times, series) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("fit failed: {e}")),
    };
    let rate = k as f64 * gamma / 2.0;
    let freq_err = fit.omega / omega - 1.0;
    let decay_err = fit.decay / rate - 1.0;
    let mut collapse: f64 = 0.0;
    let fit_period = 2.0 * std::f64::consts::PI / fit.omega;
    for (t, s) in times.iter().zip(series) {
        if *t > 3.0 * fit_period {
            break;
        }
        let rescaled = (rate * t).exp() * (s + 0.5) - 0.5;
        collapse = collapse.max((rescaled - 0.5 * (fit.omega * t).cos()).abs());
    }
    outcome(
        freq_err.abs() < 0.05 && decay_err.abs() < 0.15 && collapse < 0.1,
        format!(
            "k={k}: Ω fit {:.5} vs Ω_(k,k) {omega:.5} ({:+.2}%), decay {:+.1}% of kγ/2, collapse deviation {collapse:.3}",
            fit.omega,
            100.0 * freq_err,
            100.0 * decay_err
        ),
    )
}

/// Strongest two peaks of |T(ω)| on `omegas`, as (ω, |T|), strongest first.
fn transmission_peaks(g: f64, eps: f64, omegas: &[f64]) -> Vec<(f64, f64)> {
    let model = polaron(g, eps, ModelParams::rabi(g, eps).n_fock);
    let q = cavity_quadrature(2, model.params.n_fock).unwrap();
    let s = cavity_structure_factor(&model.eig, &q, 0.2, 24, omegas, 0.01).unwrap();
    let t = transmission(&system_impedance(&s), 100.0).unwrap().magnitudes();
    peaks(&t).into_iter().take(2).map(|(i, v)| (omegas[i], v)).collect()
}

fn balance(p: &[(f64, f64)]) -> f64 {
    if p.len() < 2 {
        0.0
    } else {
        p[1].1 / p[0].1
    }
}

fn transmission_map() -> Outcome {
    // hybridization: weaker/stronger of the two leading |T| peaks
    let g = 0.1;
    let omegas = linear_grid(0.6, 1.6, 5001);
    let eps: Vec<f64> = (-100..=100).map(|i| 0.01 * i as f64).collect();
    let scan: Vec<Vec<(f64, f64)>> = eps.iter().map(|&e| transmission_peaks(g, e, &omegas)).collect();
    let mix: Vec<f64> = scan.iter().map(|p| balance(p)).collect();
    let best = (0..eps.len()).max_by(|&a, &b| mix[a].total_cmp(&mix[b])).unwrap();
    // resonance window: bare dipole detuning below g
    let in_window = (1.0 + eps[best] * eps[best]).sqrt() - 1.0 < g;
    let at_zero = &scan[100];
    let split = (at_zero[0].0 - at_zero[1].0).abs();
    let edges_bare = mix[0] < 0.1 && mix[200] < 0.1;
    let weak_ok = in_window && edges_bare && mix[100] > 0.5 && (split / g - 1.0).abs() < 0.1;

    let g = 2.5;
    let omegas = linear_grid(0.5, 1.5, 2001);
    let mut usc_ok = true;
    let mut centres = Vec::new();
    for sign in [1.0, -1.0] {
        let eps: Vec<f64> = (0..=140).map(|i| sign * (0.3 + 0.01 * i as f64)).collect();
        let mix: Vec<f64> = eps
            .iter()
            .map(|&e| balance(&transmission_peaks(g, e, &omegas)))
            .collect();
        let best = (0..eps.len()).max_by(|&a, &b| mix[a].total_cmp(&mix[b])).unwrap();
        usc_ok &= (eps[best].abs() - 1.0).abs() <= 0.1 && mix[best] > 0.5;
        centres.push(eps[best]);
    }
    outcome(
        weak_ok && usc_ok,
        format!(
            "g=0.1: mixing {:.2} at ε=0, peak {:.2} at ε = {:.2}, {:.3} at |ε|=1, splitting {split:.4} ({:+.1}% of g); g=2.5: crossings at ε = {centres:.2?}",
            mix[100],
            mix[best],
            eps[best],
            mix[200].max(mix[0]),
            100.0 * (split / 0.1 - 1.0)
        ),
    )
}

fn edm_purcell() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=3usize {
        for x in [1.0, 2.0] {
            let p = EdmParams::new(x, k as f64, 1, 0.1);
            let purcell = edm::resonance_splitting(k, &p).powi(2) * p.n as f64 / p.gamma;
            worst = worst.max((edm::total_rate(&p).unwrap() / purcell - 1.0).abs());
        }
    }
    let step = 1e-3;
    let omegas = linear_grid(-4.0, 4.0, 8001);
    let mut peaks_ok = true;
    let mut peak_count = 0;
    for x in [0.5, 1.0, 2.0] {
        let p = EdmParams::new(x, 1.0, 1, 0.1).with_temperature(2.0);
        let rates = edm::gamma_t_grid(&omegas, &p).unwrap();
        let found: Vec<f64> = peaks(&rates).iter().map(|(i, _)| omegas[*i]).collect();
        peaks_ok &= found.iter().all(|w| (w - w.round()).abs() <= step + 1e-12);
        for j in -3..=3 {
            peaks_ok &= found.iter().any(|w| (w - j as f64).abs() <= step + 1e-12);
        }
        peak_count += found.len();
    }
    outcome(
        worst < 0.02 && peaks_ok,
        format!(
            "max Purcell deviation {:.2}%, {peak_count} Γ_T peaks all on ω_c(q−r)",
            100.0 * worst
        ),
    )
}

/// Numerov shooting with the same hard walls; bisects on the node count.
fn shooting_level(p: &WellParams, nodes: usize, lo: f64, hi: f64, steps: usize) -> f64 {
    let h = 2.0 * p.x_max / steps as f64;
    let count_nodes = |e: f64| -> usize {
        let k2 = |x: f64| 2.0 * p.mass * (e - p.potential(x));
        let mut x = -p.x_max;
        let (mut y0, mut y1) = (0.0f64, 1e-12f64);
        let mut count = 0;
        for _ in 1..steps {
            let (ka, kb, kc) = (k2(x), k2(x + h), k2(x + 2.0 * h));
            let y2 = (2.0 * y1 * (1.0 - 5.0 * h * h * kb / 12.0) - y0 * (1.0 + h * h * ka / 12.0))
                / (1.0 + h * h * kc / 12.0);
            if y2 * y1 < 0.0 {
                count += 1;
            }
            y0 = y1;
            y1 = y2;
            x += h;
            let m = y1.abs().max(y0.abs());
            if m > 1e100 {
                y0 /= m;
                y1 /= m;
            }
        }
        count
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if count_nodes(mid) > nodes {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

/// Index of the exact eigenvector with the largest overlap with `v`.
fn best_match(vectors: &CMatrix, v: &[f64]) -> usize {
    let overlap = |c: usize| {
        v.iter()
            .enumerate()
            .map(|(i, x)| vectors[(i, c)].re * x)
            .sum::<f64>()
            .abs()
    };
    (0..40).max_by(|&a, &b| overlap(a).total_cmp(&overlap(b))).unwrap()
}

fn oracle_equivalences() -> Outcome {
    // displacement elements against a truncated matrix exponential
    let nf = 160;
    let (a, a_dag) = fock_ladder(nf).unwrap();
    let gen: DMatrix<f64> = (&a.entries - &a_dag.entries).map(|z| z.re);
    let mut disp_err: f64 = 0.0;
    for x in [0.5, 1.5, 2.5, 3.5] {
        let d = expm(&(&gen * x)).unwrap();
        for n in 0..=40 {
            for m in 0..=40 {
                disp_err = disp_err.max((displacement_element(n, m, x) - d[(n, m)]).abs());
            }
        }
    }

    // polaron spectrum shifted back to the laboratory frame
    let mut frame_err: f64 = 0.0;
    for g in [0.5, 2.0, 3.0] {
        for eps in [0.0, 1.0] {
            let p = ModelParams::rabi(g, eps).with_n_fock(140);
            let lab = diagonalize(&build_rabi(&p).unwrap()).unwrap();
            let pol = diagonalize(&build_polaron_rabi(&p).unwrap()).unwrap();
            let shift = polaron_energy_shift(&p);
            for n in 0..10 {
                frame_err = frame_err.max((lab.frequencies[n] - pol.frequencies[n] - shift).abs());
            }
        }
    }

    // closed-form dressed-state elements at g = 3
    let params = ModelParams::rabi(3.0, 0.0).with_n_fock(160);
    let eig = diagonalize(&build_polaron_rabi(&params).unwrap()).unwrap();
    let qm = eig.project(&cavity_quadrature(2, params.n_fock).unwrap(), 40);
    let sm = eig.project(&dipole_sx(1, params.n_fock).unwrap(), 40);
    let idx = |n: usize, plus: bool| best_match(&eig.vectors, &grwa::symmetric_state(n, plus, &params).unwrap());
    let (mut cav_err, mut dip_err): (f64, f64) = (0.0, 0.0);
    for n in 2..=4 {
        let el = grwa::dressed_matrix_elements(n, &params).unwrap();
        let pairs = [(true, false), (false, true), (true, true), (false, false)];
        for (j, (hi, lo)) in pairs.iter().enumerate() {
            let (i1, i2) = (idx(n, *hi), idx(n - 1, *lo));
            cav_err = cav_err.max((qm[(i1, i2)].norm() - el.cavity[j].abs()).abs());
            dip_err = dip_err.max((sm[(i1, i2)].norm() - el.dipole[j].abs()).abs());
        }
    }
    let el = grwa::dressed_matrix_elements(2, &params).unwrap();
    let g0 = idx(0, true);
    for (j, plus) in [true, false].iter().enumerate() {
        let i = idx(1, *plus);
        cav_err = cav_err.max((qm[(g0, i)].norm() - el.ground_cavity[j].abs()).abs());
        dip_err = dip_err.max((sm[(g0, i)].norm() - el.ground_dipole[j].abs()).abs());
    }

    // finite-difference wells against shooting
    let mut well_err: f64 = 0.0;
    for qe in [0.0, 0.3] {
        let p = WellParams {
            qe,
            ..WellParams::default()
        };
        let spec = solve_double_well(&p, 4).unwrap();
        for n in 0..4 {
            let oracle = shooting_level(&p, n, -6.0, 10.0, 20_000);
            well_err = well_err.max((spec.energies[n] - oracle).abs() / oracle.abs());
        }
    }

    let pass = disp_err < 1e-8 && frame_err < 1e-6 && cav_err < 0.02 && dip_err < 0.02 && well_err < 1e-6;
    outcome(
        pass,
        format!(
            "displacement {disp_err:.1e}, frames {frame_err:.1e}, dressed elements cavity {cav_err:.3} dipole {dip_err:.3}, wells {well_err:.1e}"
        ),
    )
}

fn main() {
    let strict = std::env::var("USC_RELAX_STRICT").is_ok_and(|v| v == "1");
    let slow = std::env::var("USC_RELAX_SLOW").is_ok_and(|v| v == "1");

    type Check = Box<dyn Fn() -> Outcome>;
    let mut criteria: Vec<(&str, Option<Duration>, Check)> = vec![
        (
            "1 gibbs-stationarity",
            Some(Duration::from_secs(30)),
            Box::new(gibbs_stationarity),
        ),
        ("2 weak-coupling-gap", None, Box::new(weak_coupling_gap)),
        (
            "3 usc-relaxation-breakdown",
            Some(Duration::from_secs(120)),
            Box::new(usc_breakdown),
        ),
        ("4 resonant-tunneling", None, Box::new(resonant_resurrection)),
        (
            "5 grwa-spectrum",
            Some(Duration::from_secs(60)),
            Box::new(grwa_accuracy),
        ),
        (
            "6 rabi-oscillations",
            Some(Duration::from_secs(120)),
            Box::new(|| {
                let (a, b) = (rabi_oscillation(1), rabi_oscillation(2));
                outcome(a.pass && b.pass, format!("{}; {}", a.detail, b.detail))
            }),
        ),
        ("7 transmission-map", None, Box::new(transmission_map)),
        ("8 edm-purcell", None, Box::new(edm_purcell)),
        ("9 oracle-equivalences", None, Box::new(oracle_equivalences)),
    ];
    if slow {
        criteria.push((
            "6 rabi-oscillations-slow",
            None,
            Box::new(|| {
                let (a, b) = (rabi_oscillation(3), rabi_oscillation(4));
                outcome(a.pass && b.pass, format!("{}; {}", a.detail, b.detail))
            }),
        ));
    }

    let mut failures = 0;
    for (name, budget, check) in &criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = budget.iter().all(|b| elapsed <= *b);
        let pass = out.pass && in_time;
        if !pass {
            failures += 1;
        }
        let budget_note = match budget {
            Some(b) if !in_time => format!(", over the {} s budget", b.as_secs()),
            _ => String::new(),
        };
        println!(
            "{} {name}: {} [{:.1} s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if strict && failures > 0 {
        std::process::exit(1);
    }
}
