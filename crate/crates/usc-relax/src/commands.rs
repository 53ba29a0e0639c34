//! Subcommands. Each validates its axes, evaluates the grid and returns a
//! [`ScanResult`].

use anyhow::{anyhow, bail, Result};
use usc_relax_core::dipole::{solve_double_well, tla_parameters};
use usc_relax_core::edm;
use usc_relax_core::grwa;
use usc_relax_core::master::{
    evolve, fit_rabi_decay, liouvillian_gap, right_vacuum_state, DressedModel, Frame, Observable,
};
use usc_relax_core::response::{
    cavity_structure_factor, dipole_structure_factor, radiation_impedance, system_impedance, transmission,
    DIPOLE_LINEWIDTH,
};

use crate::config::{Axis, RunConfig};
use crate::scan::{coordinate, grid_points, run_points, Point, ScanResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GapScan,
    Spectrum,
    Evolve,
    Transmission,
    DipoleResponse,
    EdmRates,
    EdmEvolve,
    Tla,
    RabiFreq,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GapScan => "gap-scan",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::Transmission => "transmission",
            Command::DipoleResponse => "dipole-response",
            Command::EdmRates => "edm-rates",
            Command::EdmEvolve => "edm-evolve",
            Command::Tla => "tla",
            Command::RabiFreq => "rabi-freq",
        }
    }

    fn allowed_axes(self) -> &'static [&'static str] {
        match self {
            Command::GapScan => &["g", "epsilon", "T"],
            Command::Spectrum => &["g", "epsilon"],
            Command::Evolve => &["g"],
            Command::Transmission | Command::DipoleResponse => &["g", "epsilon", "T", "omega"],
            Command::EdmRates => &["g", "T", "omega"],
            Command::EdmEvolve => &["g", "epsilon", "T"],
            Command::Tla => &[],
            Command::RabiFreq => &["g"],
        }
    }

    pub fn run(self, config: &RunConfig, jobs: usize) -> Result<ScanResult> {
        for axis in &config.axes {
            if !self.allowed_axes().contains(&axis.name()) {
                bail!(
                    "invalid `axes`: `{}` cannot be scanned by {}; accepted: {:?}",
                    axis.name(),
                    self.name(),
                    self.allowed_axes()
                );
            }
        }
        let points = grid_points(config);
        let (columns, notes, rows) = match self {
            Command::GapScan => gap_scan(config, &points, jobs)?,
            Command::Spectrum => spectrum(config, &points, jobs)?,
            Command::Evolve => evolve_rabi(config, &points, jobs)?,
            Command::Transmission => response(config, &points, jobs, false)?,
            Command::DipoleResponse => response(config, &points, jobs, true)?,
            Command::EdmRates => edm_rates(config, &points, jobs)?,
            Command::EdmEvolve => edm_evolve(config, &points, jobs)?,
            Command::Tla => tla(config)?,
            Command::RabiFreq => rabi_freq(config, &points, jobs)?,
        };
        let prefix = self != Command::GapScan;
        let mut all_columns: Vec<String> = Vec::new();
        if prefix {
            all_columns.extend(config.outer_axes().iter().map(|a| a.name().to_string()));
        }
        all_columns.extend(columns);
        let rows = points
            .iter()
            .zip(rows)
            .flat_map(|(p, block)| {
                block.into_iter().map(move |r| {
                    let mut row: Vec<f64> = if prefix {
                        p.iter().map(|(_, v)| *v).collect()
                    } else {
                        Vec::new()
                    };
                    row.extend(r);
                    row
                })
            })
            .collect();
        Ok(ScanResult {
            command: self.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            notes,
            axes: config.axes.iter().map(|a| (a.name().to_string(), a.values())).collect(),
            columns: all_columns,
            rows,
        })
    }
}

type Table = (Vec<String>, Vec<String>, Vec<Vec<Vec<f64>>>);

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn nan_rows(count: usize, width: usize) -> Vec<Vec<f64>> {
    vec![vec![f64::NAN; width]; count]
}

fn truncation_note(config: &RunConfig) -> String {
    format!(
        "truncation: n_fock={} levels={} frame=polaron",
        config.n_fock(),
        config.levels
    )
}

fn omega_grid(config: &RunConfig, default: (f64, f64, usize)) -> Vec<f64> {
    config
        .axis("omega")
        .cloned()
        .unwrap_or(Axis("omega".into(), default.0, default.1, default.2))
        .values()
}

fn gap_scan(config: &RunConfig, points: &[Point], jobs: usize) -> Result<Table> {
    let with_t = config.axis("T").is_some();
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let (g, eps) = (coordinate(p, "g", config.g), coordinate(p, "epsilon", config.epsilon));
        let t = coordinate(p, "T", config.temperature);
        let params = config.model(g, eps);
        let model = DressedModel::rabi(&params, Frame::Polaron)?;
        let lambda = liouvillian_gap(&model.liouvillian(&config.baths(&params), t, config.levels)?)?;
        let mut row = vec![g, eps];
        if with_t {
            row.push(t);
        }
        row.push(lambda);
        Ok(vec![row])
    };
    let fallback = |p: &Point| {
        let mut row = vec![coordinate(p, "g", config.g), coordinate(p, "epsilon", config.epsilon)];
        if with_t {
            row.push(coordinate(p, "T", config.temperature));
        }
        row.push(f64::NAN);
        vec![row]
    };
    let rows = run_points(points, jobs, eval, fallback)?;
    let mut columns = names(&["g", "epsilon"]);
    if with_t {
        columns.push("T".into());
    }
    columns.push("lambda".into());
    Ok((columns, vec![truncation_note(config)], rows))
}

/// gRWA levels at `ε`: symmetric at `ε = 0`, k-resonance at `k = round(ε/ω_c) ≥ 1`.
fn grwa_levels(config: &RunConfig, g: f64, eps: f64) -> Option<Vec<f64>> {
    let params = config.model(g, eps);
    let k = (eps.abs() / config.omega_c).round() as usize;
    if eps == 0.0 {
        grwa::symmetric_levels(&params, config.spectrum_levels).ok()
    } else if k >= 1 && eps > 0.0 {
        grwa::k_resonance_levels(k, &params, config.spectrum_levels).ok()
    } else {
        None
    }
}

fn spectrum(config: &RunConfig, points: &[Point], jobs: usize) -> Result<Table> {
    let count = config.spectrum_levels;
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let (g, eps) = (coordinate(p, "g", config.g), coordinate(p, "epsilon", config.epsilon));
        let model = DressedModel::rabi(&config.model(g, eps), Frame::Polaron)?;
        if model.eig.converged_levels < count {
            bail!("only {} levels certified", model.eig.converged_levels);
        }
        let approx = grwa_levels(config, g, eps);
        Ok((0..count)
            .map(|i| {
                let a = approx.as_ref().and_then(|v| v.get(i).copied()).unwrap_or(f64::NAN);
                vec![i as f64, model.eig.frequencies[i], a]
            })
            .collect())
    };
    let fallback = |_: &Point| (0..count).map(|i| vec![i as f64, f64::NAN, f64::NAN]).collect();
    let rows = run_points(points, jobs, eval, fallback)?;
    Ok((
        names(&["level_index", "omega_exact", "omega_grwa"]),
        vec![truncation_note(config)],
        rows,
    ))
}

fn evolve_rabi(config: &RunConfig, points: &[Point], jobs: usize) -> Result<Table> {
    let k = config.k;
    let eps = k.map_or(config.epsilon, |k| k as f64 * config.omega_c);
    let times_for = |g: f64| -> Result<Vec<f64>> {
        let t_end = match (config.t_end, k) {
            (Some(t), _) => t,
            (None, Some(k)) => {
                let omega = grwa::rabi_frequency(k, k, &config.model(g, eps))?.abs();
                8.0 * 2.0 * std::f64::consts::PI / omega
            }
            (None, None) => bail!("evolve needs `t_end` or `k`"),
        };
        Ok((0..config.t_points)
            .map(|i| t_end * i as f64 / (config.t_points - 1) as f64)
            .collect())
    };
    let fits = std::sync::Mutex::new(Vec::new());
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let g = coordinate(p, "g", config.g);
        let params = config.model(g, eps);
        let model = DressedModel::rabi(&params, Frame::Polaron)?;
        let m = config.levels;
        let l = model.liouvillian(&config.baths(&params), config.temperature, m)?;
        let rho0 = right_vacuum_state(&model, m)?;
        let sx = Observable::project("sx", &model, &model.ops.dipole, m);
        let times = times_for(g)?;
        let traj = evolve(&l, &rho0, &times, &[sx], false)?;
        let series = traj.series("sx").expect("requested observable");
        let rate = k.map_or(f64::NAN, |k| k as f64 * config.gamma / 2.0);
        let note = match fit_rabi_decay(&times, series) {
            Ok(f) => format!("fit g={g}: omega={} decay={}", f.omega, f.decay),
            Err(e) => format!("fit g={g}: {e}"),
        };
        let idx = points.iter().position(|q| q == p).unwrap_or(0);
        fits.lock().expect("fit notes").push((idx, note));
        Ok(times
            .iter()
            .zip(series)
            .map(|(t, s)| vec![*t, *s, (rate * t).exp() * (s + 0.5) - 0.5])
            .collect())
    };
    let fallback = |p: &Point| {
        let n = times_for(coordinate(p, "g", config.g)).map_or(1, |t| t.len());
        nan_rows(n, 3)
    };
    let rows = run_points(points, jobs, eval, fallback)?;
    let mut notes = vec![truncation_note(config), format!("epsilon: {eps}")];
    if let Some(k) = k {
        for p in points {
            let g = coordinate(p, "g", config.g);
            if let Ok(om) = grwa::rabi_frequency(k, k, &config.model(g, eps)) {
                notes.push(format!("omega_kk g={g}: {}", om.abs()));
            }
        }
    }
    let mut fits = fits.into_inner().expect("fit notes");
    // notes follow grid order whatever the worker order
    fits.sort_by_key(|(i, _)| *i);
    notes.extend(fits.into_iter().map(|(_, n)| n));
    Ok((names(&["t", "sx", "sx_rescaled"]), notes, rows))
}

fn response(config: &RunConfig, points: &[Point], jobs: usize, dipole: bool) -> Result<Table> {
    let omegas = omega_grid(config, (0.0, 2.0, 801));
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("invalid `axes`: the omega grid must be strictly ascending");
    }
    let eta = config.eta.unwrap_or(if dipole {
        DIPOLE_LINEWIDTH * config.omega_c
    } else {
        config.omega_c / config.q_factor
    });
    let width = 4;
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let (g, eps) = (coordinate(p, "g", config.g), coordinate(p, "epsilon", config.epsilon));
        let t = coordinate(p, "T", config.temperature);
        let model = DressedModel::rabi(&config.model(g, eps), Frame::Polaron)?;
        let m = config.levels;
        if dipole {
            let s = dipole_structure_factor(&model.eig, &model.ops.dipole, t, m, &omegas, eta)?;
            let z = radiation_impedance(&s);
            Ok((0..omegas.len())
                .map(|i| vec![omegas[i], s.values[i].re, z.values[i].re, z.values[i].im])
                .collect())
        } else {
            let s = cavity_structure_factor(&model.eig, &model.ops.cavity, t, m, &omegas, eta)?;
            let tr = transmission(&system_impedance(&s), config.q_factor)?;
            Ok((0..omegas.len())
                .map(|i| vec![omegas[i], tr.values[i].norm(), tr.values[i].re, tr.values[i].im])
                .collect())
        }
    };
    let fallback = |_: &Point| {
        omegas
            .iter()
            .map(|w| {
                let mut r = vec![f64::NAN; width];
                r[0] = *w;
                r
            })
            .collect()
    };
    let rows = run_points(points, jobs, eval, fallback)?;
    let columns = if dipole {
        names(&["omega", "s_dip", "re_z_rad", "im_z_rad"])
    } else {
        names(&["omega", "abs_t", "re_t", "im_t"])
    };
    Ok((columns, vec![truncation_note(config), format!("eta: {eta}")], rows))
}

fn edm_rates(config: &RunConfig, points: &[Point], jobs: usize) -> Result<Table> {
    let omegas = omega_grid(config, (0.0, 4.0, 801));
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let g = coordinate(p, "g", config.g);
        let t = coordinate(p, "T", config.temperature);
        let params = config.edm(g, config.epsilon, t);
        let plus = edm::gamma_t_grid(&omegas, &params)?;
        let minus = edm::gamma_t_grid(&omegas.iter().map(|w| -w).collect::<Vec<_>>(), &params)?;
        let unit = params.rate_unit();
        Ok((0..omegas.len())
            .map(|i| {
                let total = plus[i] - minus[i];
                vec![omegas[i], plus[i], total, total / unit]
            })
            .collect())
    };
    let fallback = |_: &Point| omegas.iter().map(|w| vec![*w, f64::NAN, f64::NAN, f64::NAN]).collect();
    let rows = run_points(points, jobs, eval, fallback)?;
    let unit = config.omega_d * config.omega_d * config.wells as f64 / config.gamma;
    Ok((
        names(&["omega", "gamma_t", "gamma_tot", "gamma_tot_norm"]),
        vec![format!("rate unit omega_d^2 N / gamma: {unit}")],
        rows,
    ))
}

fn edm_evolve(config: &RunConfig, points: &[Point], jobs: usize) -> Result<Table> {
    let nb = config.n_boson;
    let times_for = |p: &Point| -> Result<Vec<f64>> {
        let params = config.edm(
            coordinate(p, "g", config.g),
            coordinate(p, "epsilon", config.epsilon),
            coordinate(p, "T", config.temperature),
        );
        let t_end = match config.t_end {
            Some(t) => t,
            None => {
                let total = edm::total_rate(&params)?;
                if !(total > 0.0) {
                    return Err(anyhow!("no net cooling; set `t_end`"));
                }
                10.0 / total
            }
        };
        Ok((0..config.t_points)
            .map(|i| t_end * i as f64 / (config.t_points - 1) as f64)
            .collect())
    };
    let notes = std::sync::Mutex::new(Vec::new());
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let params = config.edm(
            coordinate(p, "g", config.g),
            coordinate(p, "epsilon", config.epsilon),
            coordinate(p, "T", config.temperature),
        );
        let times = times_for(p)?;
        let ev = edm::effective_dipole_evolve(&params, config.m0, &times)?;
        let idx = points.iter().position(|q| q == p).unwrap_or(0);
        notes.lock().expect("notes").push((
            idx,
            format!(
                "point {idx}: cooling={} heating={} warnings={:?}",
                ev.cooling, ev.heating, ev.warnings
            ),
        ));
        let n = ev.trajectory.series("n").expect("number series");
        Ok(times
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut r = vec![*t, n[i]];
                r.extend(&ev.trajectory.populations[i]);
                r
            })
            .collect())
    };
    let fallback = |p: &Point| nan_rows(times_for(p).map_or(1, |t| t.len()), 2 + nb);
    let rows = run_points(points, jobs, eval, fallback)?;
    let mut notes = notes.into_inner().expect("notes");
    notes.sort_by_key(|(i, _)| *i);
    let mut columns = names(&["t", "n"]);
    columns.extend((0..nb).map(|i| format!("p{i}")));
    Ok((columns, notes.into_iter().map(|(_, n)| n).collect(), rows))
}

fn tla(config: &RunConfig) -> Result<Table> {
    let well = config.well();
    let r = tla_parameters(&well)?;
    let tilted = solve_double_well(&well, 2)?;
    let row = vec![
        well.qe,
        r.omega_d,
        r.x_10,
        r.epsilon,
        r.gap_ratio,
        f64::from(u8::from(r.below_barrier)),
        f64::from(u8::from(r.valid)),
        r.energies[0],
        r.energies[1],
        r.energies[2],
        r.omega_epsilon(),
        tilted.energies[1] - tilted.energies[0],
    ];
    Ok((
        names(&[
            "qe",
            "omega_d",
            "x_10",
            "epsilon",
            "gap_ratio",
            "below_barrier",
            "valid",
            "e0",
            "e1",
            "e2",
            "omega_eps",
            "tilted_gap",
        ]),
        vec![format!("warnings: {:?}", r.warnings)],
        vec![vec![row]],
    ))
}

fn rabi_freq(config: &RunConfig, points: &[Point], jobs: usize) -> Result<Table> {
    let pairs: Vec<(usize, usize)> = (1..=config.k_max)
        .flat_map(|k| (k..=config.n_max.max(k)).map(move |n| (k, n)))
        .collect();
    let eval = |p: &Point| -> Result<Vec<Vec<f64>>> {
        let g = coordinate(p, "g", config.g);
        let params = config.model(g, config.epsilon);
        pairs
            .iter()
            .map(|&(k, n)| {
                Ok(vec![
                    k as f64,
                    n as f64,
                    g / config.omega_c,
                    grwa::rabi_frequency(k, n, &params)?,
                ])
            })
            .collect()
    };
    let fallback = |_: &Point| {
        pairs
            .iter()
            .map(|&(k, n)| vec![k as f64, n as f64, f64::NAN, f64::NAN])
            .collect()
    };
    let rows = run_points(points, jobs, eval, fallback)?;
    Ok((names(&["k", "n", "x", "omega_kn"]), Vec::new(), rows))
}
