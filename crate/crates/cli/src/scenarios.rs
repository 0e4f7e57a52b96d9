//! Registry of the named reproduction scenarios.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use ladderfl::dressed::{diagonalize, transition_frequencies, DressedOp};
use ladderfl::effective::shifted_resonance;
use rayon::ThreadPool;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Samples};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_sig, Artifact, Plot, Table};
use crate::tasks::{self, DRIVE, FREQUENCY};

const THREE_XI: [f64; 3] = [FRAC_1_SQRT_2, 1.0, SQRT_2];

type Runner = fn(&RunConfig, &ThreadPool) -> CliResult<(Vec<Artifact>, Value)>;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    defaults: fn() -> RunConfig,
    #[serde(skip)]
    run: Runner,
}

impl Scenario {
    /// Default configuration with the swept symbols filled in.
    pub fn defaults(&self) -> RunConfig {
        let mut cfg = (self.defaults)();
        cfg.scenario = Some(self.name.to_string());
        cfg
    }

    pub fn swept(&self) -> Vec<String> {
        self.defaults().sweeps.keys().cloned().collect()
    }

    pub fn run(&self, cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
        (self.run)(cfg, pool).map_err(|e| e.context(&format!("scenario {}", self.name)))
    }
}

pub const SCENARIOS: [Scenario; 9] = [
    Scenario {
        name: "fig2",
        description: "steady-state populations over drive detuning and amplitude",
        defaults: fig2_defaults,
        run: fig2,
    },
    Scenario {
        name: "fig3b",
        description: "incoherent spectrum, weak drive (Omega = 5)",
        defaults: fig3b_defaults,
        run: labelled_spectrum,
    },
    Scenario {
        name: "fig3c",
        description: "incoherent spectrum, strong drive (Omega = 40), with peak table",
        defaults: fig3c_defaults,
        run: labelled_spectrum,
    },
    Scenario {
        name: "fig4",
        description: "normalised spectrum versus drive amplitude",
        defaults: fig4_defaults,
        run: spectrum_family,
    },
    Scenario {
        name: "fig5",
        description: "g2(tau) in the weak-driving regime",
        defaults: fig5_defaults,
        run: g2_family,
    },
    Scenario {
        name: "fig6",
        description: "g2(tau) in the strong-driving regime for three dipole ratios",
        defaults: fig6_defaults,
        run: g2_family,
    },
    Scenario {
        name: "fig7",
        description: "normalised spectrum versus drive detuning for three dipole ratios",
        defaults: fig7_defaults,
        run: spectrum_family,
    },
    Scenario {
        name: "fig8",
        description: "dressed-line auto-correlations, closed form and regression",
        defaults: fig8_defaults,
        run: fig8,
    },
    Scenario {
        name: "fig9",
        description: "dressed-line cross-correlations in forward and backward time",
        defaults: fig9_defaults,
        run: fig9,
    },
];

pub fn find(name: &str) -> CliResult<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name).ok_or_else(|| {
        let names: Vec<&str> = SCENARIOS.iter().map(|s| s.name).collect();
        CliError::Usage(format!("unknown scenario {name:?}; available: {}", names.join(", ")))
    })
}

pub fn list_text() -> String {
    let mut out = format!("{:<7} {:<14} {}\n", "name", "swept", "description");
    for s in &SCENARIOS {
        let swept = s.swept().join(",");
        let swept = if swept.is_empty() { "-".to_string() } else { swept };
        out.push_str(&format!("{:<7} {:<14} {}\n", s.name, swept, s.description));
    }
    out
}

pub fn list_json() -> Value {
    SCENARIOS
        .iter()
        .map(|s| json!({"name": s.name, "swept": s.swept(), "description": s.description}))
        .collect()
}

fn with_params(omega: f64, delta: f64, xi: f64) -> RunConfig {
    let mut c = RunConfig::default();
    c.params.omega = Some(omega);
    c.params.alpha = Some(-120.0);
    c.params.delta = Some(delta);
    c.params.xi = Some(xi);
    c.model = Some("full".into());
    c
}

fn fig2_defaults() -> RunConfig {
    let mut c = with_params(40.0, 0.0, 1.0);
    c.sweeps.insert("delta".into(), Samples::range(-80.0, 80.0, 161));
    c.sweeps.insert("omega".into(), Samples::range(0.0, 60.0, 121));
    c
}

fn fig3b_defaults() -> RunConfig {
    let mut c = with_params(5.0, 0.0, 1.0);
    c.omega_grid = Some(Samples::range(-150.0, 150.0, 4096));
    c
}

fn fig3c_defaults() -> RunConfig {
    RunConfig { params: with_params(40.0, 0.0, 1.0).params, ..fig3b_defaults() }
}

fn fig4_defaults() -> RunConfig {
    let mut c = with_params(40.0, 0.0, 1.0);
    c.sweeps.insert("omega".into(), Samples::range(1.0, 60.0, 60));
    c.omega_grid = Some(Samples::range(-150.0, 150.0, 2048));
    c.normalization = Some("peak".into());
    c
}

fn fig5_defaults() -> RunConfig {
    let mut c = with_params(1.0, 0.0, 1.0);
    c.sweeps.insert("omega".into(), Samples::List(vec![0.1, 0.3, 0.6, 1.0]));
    c.tau_grid = Some(Samples::range(0.0, 10.0, 1001));
    c
}

fn fig6_defaults() -> RunConfig {
    let mut c = with_params(40.0, 0.0, 1.0);
    c.sweeps.insert("xi".into(), Samples::List(THREE_XI.to_vec()));
    c.tau_grid = Some(Samples::range(0.0, 5.0, 2001));
    c
}

fn fig7_defaults() -> RunConfig {
    let mut c = with_params(40.0, 0.0, 1.0);
    c.sweeps.insert("xi".into(), Samples::List(THREE_XI.to_vec()));
    c.sweeps.insert("delta".into(), Samples::range(-60.0, 60.0, 61));
    c.omega_grid = Some(Samples::range(-150.0, 150.0, 2048));
    c.normalization = Some("peak".into());
    c
}

fn fig8_defaults() -> RunConfig {
    let mut c = with_params(40.0, 0.0, 1.0);
    c.model = Some("secular".into());
    c.tau_grid = Some(Samples::range(0.0, 10.0, 1001));
    c
}

fn fig9_defaults() -> RunConfig {
    RunConfig { tau_grid: Some(Samples::range(-10.0, 10.0, 2001)), ..fig8_defaults() }
}

fn name_of(cfg: &RunConfig) -> String {
    cfg.scenario.clone().unwrap_or_else(|| "scenario".into())
}

fn fig2(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
    let name = name_of(cfg);
    let (table, mut summary) = tasks::steady(cfg, &name, pool)?;
    let (axes, points) = cfg.sweep_points()?;

    // Stark-shifted two-photon resonance overlay, one curve per ξ
    let xis: Vec<f64> = match cfg.sweeps.get("xi") {
        Some(s) => s.points()?,
        None => vec![cfg.base_params()?.xi],
    };
    let omegas: Vec<f64> = match cfg.sweeps.get("omega") {
        Some(s) => s.points()?,
        None => vec![cfg.base_params()?.omega],
    };
    let base = cfg.base_params()?;
    let mut overlay = Table::new(["xi", DRIVE, "delta_shifted [Gamma]"]);
    for &xi in &xis {
        for &omega in &omegas {
            let p = base.with_xi(xi).with_omega(omega);
            let d = shifted_resonance(&p).unwrap_or(f64::NAN);
            overlay.push_numbers([xi, omega, d]);
        }
    }

    // Location of the two-photon peak along δ at the Ω closest to 40
    let di = axes.iter().position(|a| *a == "delta");
    let oi = axes.iter().position(|a| *a == "omega");
    let mut resonance = Vec::new();
    if let (Some(di), Some(oi)) = (di, oi) {
        let target = omegas.iter().copied().min_by(|a, b| (a - 40.0).abs().total_cmp(&(b - 40.0).abs())).unwrap();
        for &xi in &xis {
            let mut best = (f64::NAN, f64::NEG_INFINITY);
            for (row, (coords, p)) in table.table.rows.iter().zip(&points) {
                if coords[oi] == target && p.xi == xi {
                    let pop_f: f64 = row[axes.len() + 2].parse().unwrap_or(f64::NAN);
                    if pop_f > best.1 {
                        best = (coords[di], pop_f);
                    }
                }
            }
            let shifted = shifted_resonance(&base.with_xi(xi).with_omega(target)).ok();
            resonance.push(json!({"xi": xi, "omega": target, "argmax_delta_pop_f": best.0, "delta_shifted": shifted}));
        }
    }
    summary["two_photon_peak"] = Value::Array(resonance);
    let overlay = Artifact {
        stem: format!("{name}_shifted_resonance"),
        title: "Stark-shifted two-photon resonance".into(),
        table: overlay,
        plot: Plot::Family { x: 2, y: 3, group: 1, values: xis, xlabel: DRIVE.into(), ylabel: "delta_shifted [Gamma]".into() },
    };
    Ok((vec![table, overlay], summary))
}

fn labelled_spectrum(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
    let name = name_of(cfg);
    let grid = cfg.omega_grid(Samples::range(-150.0, 150.0, 4096))?;
    if !cfg.sweeps.is_empty() {
        return Err(CliError::Usage("this scenario takes single parameter values, not sweeps".into()));
    }
    let (spec, summary) = tasks::spectrum(cfg, &name, &grid, pool)?;
    let p = cfg.base_params()?;
    let lines = transition_frequencies(&diagonalize(&p)?).all();
    let mut peaks = Table::new([FREQUENCY, "height", "nearest line", "line [Gamma]", "offset [Gamma]"]);
    for pk in summary["points"][0]["peaks"].as_array().into_iter().flatten() {
        let w = pk["omega"].as_f64().unwrap_or(f64::NAN);
        let h = pk["height"].as_f64().unwrap_or(f64::NAN);
        let (op, line) =
            lines.iter().copied().min_by(|a, b| (a.1 - w).abs().total_cmp(&(b.1 - w).abs())).expect("seven lines");
        peaks.push_row(vec![fmt_sig(w), fmt_sig(h), op.to_string(), fmt_sig(line), fmt_sig(w - line)]);
    }
    let peaks = Artifact {
        stem: format!("{name}_peaks"),
        title: "Spectral peaks".into(),
        table: peaks,
        plot: Plot::Lines { x: 1, ys: vec![2], xlabel: FREQUENCY.into(), ylabel: "height".into() },
    };
    Ok((vec![spec, peaks], summary))
}

fn spectrum_family(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
    let grid = cfg.omega_grid(Samples::range(-150.0, 150.0, 2048))?;
    let (a, v) = tasks::spectrum(cfg, &name_of(cfg), &grid, pool)?;
    Ok((vec![a], v))
}

fn g2_family(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
    let taus = cfg.tau_grid(Samples::range(0.0, 20.0, 2001))?;
    let (a, v) = tasks::second_order(cfg, &name_of(cfg), &taus, pool)?;
    Ok((vec![a], v))
}

fn fig8(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
    use DressedOp::*;
    let taus = cfg.tau_grid(Samples::range(0.0, 10.0, 1001))?;
    let pairs = [(Zero, Zero), (Plus(1), Plus(1)), (Plus(3), Plus(3))];
    let (a, v) = tasks::dressed_pairs(cfg, &name_of(cfg), "Dressed-line auto-correlations", &pairs, &taus, pool)?;
    Ok((vec![a], v))
}

fn fig9(cfg: &RunConfig, pool: &ThreadPool) -> CliResult<(Vec<Artifact>, Value)> {
    use DressedOp::*;
    let taus = cfg.tau_grid(Samples::range(-10.0, 10.0, 2001))?;
    let pairs = [(Minus(3), Plus(3)), (Minus(1), Plus(1)), (Minus(2), Plus(1))];
    let (a, v) = tasks::dressed_pairs(cfg, &name_of(cfg), "Dressed-line cross-correlations", &pairs, &taus, pool)?;
    Ok((vec![a], v))
}
