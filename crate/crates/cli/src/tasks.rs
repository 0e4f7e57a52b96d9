//! Computations shared by the subcommands and the scenarios. Each returns
//! the CSV artifacts plus a JSON summary for the metadata file.

use ladderfl::dressed::{
    analytic_g2, asymptotic_channel_rates, asymptotic_lambdas, channel_rates, diagonalize, population_evolution_matrix,
    secular_g2, secular_rates, transition_frequencies, DressedOp, G2Kind,
};
use ladderfl::dynamics::{g1, g2, g2_cross, steady_state};
use ladderfl::effective::{effective_params, shifted_resonance};
use ladderfl::spectrum::{incoherent_spectrum, Peak};
use ladderfl::{build_liouvillian, Model, Params, SpectrumNormalization};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_sig, Artifact, Plot, Table};

pub const DRIVE: &str = "Omega [Gamma]";
pub const FREQUENCY: &str = "omega-omega_d [Gamma]";
pub const DELAY: &str = "tau [1/Gamma]";

pub fn axis_header(axis: &str) -> &'static str {
    match axis {
        "xi" => "xi",
        "alpha" => "alpha [Gamma]",
        "delta" => "delta [Gamma]",
        "omega" => DRIVE,
        _ => unreachable!("axis names are checked before use"),
    }
}

/// Evaluates `f` for every sweep point on the pool, keeping input order.
fn map_points<T: Send>(
    pool: &ThreadPool,
    points: &[(Vec<f64>, Params)],
    f: impl Fn(&Params) -> CliResult<T> + Sync,
) -> CliResult<Vec<T>> {
    pool.install(|| {
        points
            .par_iter()
            .map(|(_, p)| f(p).map_err(|e| e.context(&describe(p))))
            .collect()
    })
}

fn describe(p: &Params) -> String {
    format!("Ω={} α={} δ={} ξ={}", fmt_sig(p.omega), fmt_sig(p.alpha), fmt_sig(p.delta), fmt_sig(p.xi))
}

fn params_json(p: &Params) -> Value {
    json!({"omega": p.omega, "alpha": p.alpha, "delta": p.delta, "xi": p.xi})
}

fn headers(axes: &[&str], rest: &[&str]) -> Vec<String> {
    axes.iter().map(|a| axis_header(a).to_string()).chain(rest.iter().map(|s| s.to_string())).collect()
}

/// Plot description for a long-format table: a family over the last swept
/// axis when there is one.
fn family_plot(axes: &[&str], points: &[(Vec<f64>, Params)], x: usize, y: usize, xlabel: &str, ylabel: &str) -> Plot {
    match axes.len() {
        0 => Plot::Lines { x, ys: vec![y], xlabel: xlabel.into(), ylabel: ylabel.into() },
        n => {
            let mut values: Vec<f64> = points.iter().map(|(c, _)| c[n - 1]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            Plot::Family { x, y, group: n, values, xlabel: xlabel.into(), ylabel: ylabel.into() }
        }
    }
}

pub fn steady(cfg: &RunConfig, stem: &str, pool: &ThreadPool) -> CliResult<(Artifact, Value)> {
    let model = cfg.model(Model::Full3Level)?;
    let (axes, points) = cfg.sweep_points()?;
    let pops = map_points(pool, &points, |p| Ok(steady_state(&build_liouvillian(p, model)?)?.populations()))?;
    let mut table = Table::new(headers(&axes, &["pop_g", "pop_e", "pop_f"]));
    for ((coords, _), pop) in points.iter().zip(&pops) {
        table.push_numbers(coords.iter().copied().chain(pop.iter().copied()));
    }
    let n = axes.len();
    let plot = match n {
        0 | 1 => Plot::Lines {
            x: 1,
            ys: (n + 1..=n + 3).collect(),
            xlabel: axes.first().map_or("", |a| axis_header(a)).into(),
            ylabel: "population".into(),
        },
        _ => Plot::Map {
            x: n - 1,
            y: n,
            z: (n + 1..=n + 3).collect(),
            xlabel: axis_header(axes[n - 2]).into(),
            ylabel: axis_header(axes[n - 1]).into(),
        },
    };
    let summary = json!({"model": model.to_string(), "points": points.len()});
    Ok((Artifact { stem: stem.into(), title: "Steady-state populations".into(), table, plot }, summary))
}

fn peaks_json(peaks: &[Peak]) -> Value {
    peaks.iter().map(|p| json!({"omega": p.omega, "height": p.height})).collect()
}

pub fn spectrum(cfg: &RunConfig, stem: &str, grid: &[f64], pool: &ThreadPool) -> CliResult<(Artifact, Value)> {
    let model = cfg.model(Model::Full3Level)?;
    let method = cfg.method()?;
    let norm = cfg.normalization()?;
    let (axes, points) = cfg.sweep_points()?;
    let spectra = map_points(pool, &points, |p| {
        let s = incoherent_spectrum(&build_liouvillian(p, model)?, grid, method)?;
        Ok(s.normalized(norm)?)
    })?;
    let density = match norm {
        SpectrumNormalization::Raw => "S_inc [1/Gamma]",
        SpectrumNormalization::Peak => "S_inc [peak=1]",
    };
    let mut table = Table::new(headers(&axes, &[FREQUENCY, density]));
    let mut per_point = Vec::new();
    for ((coords, p), s) in points.iter().zip(&spectra) {
        for (w, v) in s.omega_grid.iter().zip(&s.incoherent) {
            table.push_numbers(coords.iter().copied().chain([*w, *v]));
        }
        per_point.push(json!({
            "params": params_json(p),
            "coherent_weight": s.coherent_weight,
            "peaks": peaks_json(&s.peaks(0.01)),
        }));
    }
    let n = axes.len();
    let plot = family_plot(&axes, &points, n + 1, n + 2, FREQUENCY, density);
    let summary = json!({
        "model": model.to_string(),
        "method": method.to_string(),
        "normalization": norm.to_string(),
        "points": per_point,
    });
    Ok((Artifact { stem: stem.into(), title: "Incoherent fluorescence spectrum".into(), table, plot }, summary))
}

pub fn first_order(cfg: &RunConfig, stem: &str, taus: &[f64], pool: &ThreadPool) -> CliResult<(Artifact, Value)> {
    let model = cfg.model(Model::Full3Level)?;
    let (axes, points) = cfg.sweep_points()?;
    let traces = map_points(pool, &points, |p| Ok(g1(&build_liouvillian(p, model)?, taus)?))?;
    let mut table = Table::new(headers(&axes, &[DELAY, "Re g1", "Im g1"]));
    for ((coords, _), tr) in points.iter().zip(&traces) {
        for (t, v) in tr.tau.iter().zip(&tr.values) {
            table.push_numbers(coords.iter().copied().chain([*t, v.re, v.im]));
        }
    }
    let n = axes.len();
    let plot = match n {
        0 => Plot::Lines { x: 1, ys: vec![2, 3], xlabel: DELAY.into(), ylabel: "g1".into() },
        _ => family_plot(&axes, &points, n + 1, n + 2, DELAY, "Re g1"),
    };
    let norms: Vec<f64> = traces.iter().map(|t| t.normalization).collect();
    let summary = json!({"model": model.to_string(), "normalization": norms});
    Ok((Artifact { stem: stem.into(), title: "First-order correlation".into(), table, plot }, summary))
}

pub fn second_order(cfg: &RunConfig, stem: &str, taus: &[f64], pool: &ThreadPool) -> CliResult<(Artifact, Value)> {
    let model = cfg.model(Model::Full3Level)?;
    let (axes, points) = cfg.sweep_points()?;
    let traces = map_points(pool, &points, |p| Ok(g2(&build_liouvillian(p, model)?, taus)?))?;
    let mut table = Table::new(headers(&axes, &[DELAY, "g2"]));
    let mut per_point = Vec::new();
    for ((coords, p), tr) in points.iter().zip(&traces) {
        for (t, v) in tr.tau.iter().zip(&tr.values) {
            table.push_numbers(coords.iter().copied().chain([*t, *v]));
        }
        per_point.push(json!({"params": params_json(p), "g2_at_first_tau": tr.values[0], "normalization": tr.normalization}));
    }
    let n = axes.len();
    let plot = family_plot(&axes, &points, n + 1, n + 2, DELAY, "g2");
    let summary = json!({"model": model.to_string(), "points": per_point});
    Ok((Artifact { stem: stem.into(), title: "Second-order correlation".into(), table, plot }, summary))
}

/// Closed-form value of a dressed-line correlation: the catalog entry when
/// there is one, otherwise the general secular population solution.
pub fn closed_form(first: DressedOp, second: DressedOp, xi: f64, tau: f64) -> CliResult<f64> {
    let kind = if first == second { G2Kind::Auto(first) } else { G2Kind::Cross(first, second) };
    match analytic_g2(kind, xi, tau) {
        Ok(v) => Ok(v),
        Err(ladderfl::Error::UnsupportedKind(_)) => Ok(secular_g2(first, second, xi, tau)?),
        Err(e) => Err(e.into()),
    }
}

/// g⁽²⁾ for each (first, second) pair, numeric and closed form, on a τ grid
/// that may extend to negative delays: g(A, 0; B, −τ) = g(B, 0; A, τ).
pub fn dressed_pairs(
    cfg: &RunConfig,
    stem: &str,
    title: &str,
    pairs: &[(DressedOp, DressedOp)],
    taus: &[f64],
    pool: &ThreadPool,
) -> CliResult<(Artifact, Value)> {
    if !cfg.sweeps.is_empty() {
        return Err(CliError::Usage("dressed-line correlations do not take sweeps".into()));
    }
    let model = cfg.model(Model::DressedSecular(ladderfl::RateForm::Asymptotic))?;
    let p = cfg.base_params()?;
    let l = build_liouvillian(&p, model)?;
    let negative: Vec<f64> = taus.iter().rev().filter(|t| **t < 0.0).map(|t| -t).collect();
    let positive: Vec<f64> = taus.iter().copied().filter(|t| *t >= 0.0).collect();
    let columns = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(a, b)| -> CliResult<Vec<(f64, f64)>> {
                let mut out = Vec::with_capacity(taus.len());
                if !negative.is_empty() {
                    let tr = g2_cross(&l, b, a, &negative)?;
                    for (t, v) in tr.tau.iter().zip(&tr.values).rev() {
                        out.push((*v, closed_form(b, a, p.xi, *t)?));
                    }
                }
                if !positive.is_empty() {
                    let tr = g2_cross(&l, a, b, &positive)?;
                    for (t, v) in tr.tau.iter().zip(&tr.values) {
                        out.push((*v, closed_form(a, b, p.xi, *t)?));
                    }
                }
                Ok(out)
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut names = vec![DELAY.to_string()];
    for (a, b) in pairs {
        names.push(format!("g2({a};{b}) closed form"));
    }
    for (a, b) in pairs {
        names.push(format!("g2({a};{b}) regression"));
    }
    let mut table = Table::new(names);
    let mut worst = vec![0.0f64; pairs.len()];
    for (k, t) in taus.iter().enumerate() {
        let closed = columns.iter().map(|c| c[k].1);
        let numeric = columns.iter().map(|c| c[k].0);
        table.push_numbers(std::iter::once(*t).chain(closed).chain(numeric));
        for (w, c) in worst.iter_mut().zip(&columns) {
            *w = w.max((c[k].0 - c[k].1).abs());
        }
    }
    let deviations: Vec<Value> = pairs
        .iter()
        .zip(&worst)
        .map(|((a, b), w)| json!({"first": a.to_string(), "second": b.to_string(), "max_abs_deviation": w}))
        .collect();
    let summary = json!({"model": model.to_string(), "params": params_json(&p), "pairs": deviations});
    let plot = Plot::Lines { x: 1, ys: (2..=1 + 2 * pairs.len()).collect(), xlabel: DELAY.into(), ylabel: "g2".into() };
    Ok((Artifact { stem: stem.into(), title: title.into(), table, plot }, summary))
}

/// Dressed eigensystem, spectral lines, coefficients and secular rates.
pub fn dressed_report(p: &Params) -> CliResult<(Artifact, Value)> {
    let b = diagonalize(p)?;
    let lines = transition_frequencies(&b);
    let mut table = Table::new(["line", FREQUENCY]);
    for (op, w) in lines.all() {
        table.push_row(vec![op.to_string(), fmt_sig(w)]);
    }
    let rates = secular_rates(&b);
    let m = population_evolution_matrix(&b);
    let mut m_eigs: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    m_eigs.sort_by(f64::total_cmp);
    let [wm, wu, wl] = b.frequencies();
    let (lm, lp) = asymptotic_lambdas(p.gamma, p.xi);
    let effective = effective_params(p).ok();
    let summary = json!({
        "params": params_json(p),
        "eigenfrequencies": {"m": wm, "u": wu, "l": wl},
        "lines": lines.all().iter().map(|(op, w)| json!({"line": op.to_string(), "omega": w})).collect::<Vec<_>>(),
        "a": b.coefficients(),
        "channel_rates": channel_rates(&b),
        "asymptotic_channel_rates": asymptotic_channel_rates(p.gamma, p.xi),
        "coherence_rates": {"um": rates.gamma_um, "ml": rates.gamma_ml, "ul": rates.gamma_ul},
        "population_matrix_eigenvalues": m_eigs,
        "asymptotic_lambdas": {"minus": lm, "plus": lp},
        "shifted_resonance": shifted_resonance(p).ok(),
        "effective": effective.map(|e| json!({
            "omega_eff": e.omega_eff, "delta_g": e.delta_g, "delta_f": e.delta_f, "delta_eff": e.delta_eff,
        })),
    });
    let plot = Plot::Impulses { x: 2, xlabel: FREQUENCY.into() };
    Ok((Artifact { stem: "dressed".into(), title: "Dressed-state spectral lines".into(), table, plot }, summary))
}
