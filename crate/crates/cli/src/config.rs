//! Run configuration: scenario defaults, then a JSON file, then flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ladderfl::{Model, Params, SpectrumMethod, SpectrumNormalization};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Sweepable parameters, outermost first.
pub const SWEEP_AXES: [&str; 4] = ["xi", "alpha", "delta", "omega"];

/// A list of sample points: `"start:stop:count"` or an explicit array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    Range(String),
    List(Vec<f64>),
}

impl Samples {
    pub fn range(start: f64, stop: f64, count: usize) -> Self {
        Samples::Range(format!("{start}:{stop}:{count}"))
    }

    pub fn points(&self) -> CliResult<Vec<f64>> {
        let pts = match self {
            Samples::List(v) => v.clone(),
            Samples::Range(s) => {
                let parts: Vec<&str> = s.split(':').collect();
                let [a, b, n] = parts[..] else {
                    return Err(CliError::Usage(format!("range {s:?} must look like start:stop:count")));
                };
                let num = |x: &str| {
                    x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {x:?} in range {s:?}")))
                };
                let count: usize =
                    n.trim().parse().map_err(|_| CliError::Usage(format!("bad count {n:?} in range {s:?}")))?;
                let (start, stop) = (num(a)?, num(b)?);
                if count < 2 {
                    return Err(CliError::Usage(format!("range {s:?} needs at least 2 points")));
                }
                if !(stop > start) {
                    return Err(CliError::Usage(format!("range {s:?} must have stop > start")));
                }
                ladderfl::dynamics::linspace(start, stop, count)
            }
        };
        if pts.len() < 2 {
            return Err(CliError::Usage("a sweep or grid needs at least 2 points".into()));
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Usage("sample points must be finite".into()));
        }
        Ok(pts)
    }

    /// Points that must also be strictly ascending (τ and ω grids).
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        let pts = self.points()?;
        if pts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage("grid points must be strictly ascending".into()));
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

impl ParamsConfig {
    fn merge(&mut self, other: &ParamsConfig) {
        self.omega = other.omega.or(self.omega);
        self.alpha = other.alpha.or(self.alpha);
        self.delta = other.delta.or(self.delta);
        self.xi = other.xi.or(self.xi);
    }
}

/// Everything a run needs. Unset fields fall back to library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub params: ParamsConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub sweeps: BTreeMap<String, Samples>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Samples>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_grid: Option<Samples>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    /// Output directory (scenarios) or file stem (single commands).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `other` replace ours; sweeps are merged by name.
    pub fn merge(&mut self, other: &RunConfig) {
        self.scenario = other.scenario.clone().or(self.scenario.take());
        self.params.merge(&other.params);
        self.model = other.model.clone().or(self.model.take());
        for (k, v) in &other.sweeps {
            self.sweeps.insert(k.clone(), v.clone());
        }
        self.tau_grid = other.tau_grid.clone().or(self.tau_grid.take());
        self.omega_grid = other.omega_grid.clone().or(self.omega_grid.take());
        self.method = other.method.clone().or(self.method.take());
        self.normalization = other.normalization.clone().or(self.normalization.take());
        self.output = other.output.clone().or(self.output.take());
    }

    pub fn base_params(&self) -> CliResult<Params> {
        let d = Params::default();
        let p = Params {
            omega: self.params.omega.unwrap_or(d.omega),
            alpha: self.params.alpha.unwrap_or(d.alpha),
            delta: self.params.delta.unwrap_or(d.delta),
            xi: self.params.xi.unwrap_or(d.xi),
            ..d
        };
        p.validate()?;
        Ok(p)
    }

    pub fn model(&self, default: Model) -> CliResult<Model> {
        match &self.model {
            Some(m) => Ok(m.parse()?),
            None => Ok(default),
        }
    }

    pub fn method(&self) -> CliResult<SpectrumMethod> {
        self.method.as_deref().map_or(Ok(SpectrumMethod::EigenSum), |m| Ok(m.parse()?))
    }

    pub fn normalization(&self) -> CliResult<SpectrumNormalization> {
        self.normalization.as_deref().map_or(Ok(SpectrumNormalization::Raw), |m| Ok(m.parse()?))
    }

    pub fn tau_grid(&self, default: Samples) -> CliResult<Vec<f64>> {
        self.tau_grid.as_ref().unwrap_or(&default).grid()
    }

    pub fn omega_grid(&self, default: Samples) -> CliResult<Vec<f64>> {
        self.omega_grid.as_ref().unwrap_or(&default).grid()
    }

    /// Swept axes in canonical order with their points.
    pub fn sweep_axes(&self) -> CliResult<Vec<(&'static str, Vec<f64>)>> {
        for name in self.sweeps.keys() {
            if !SWEEP_AXES.contains(&name.as_str()) {
                return Err(CliError::Usage(format!("cannot sweep {name:?}; sweepable: {}", SWEEP_AXES.join(", "))));
            }
        }
        SWEEP_AXES
            .iter()
            .filter_map(|&axis| self.sweeps.get(axis).map(|s| (axis, s)))
            .map(|(axis, s)| Ok((axis, s.points().map_err(|e| e.context(axis))?)))
            .collect()
    }

    /// Cartesian product of the sweeps applied to the base parameters, in
    /// row-major order over [`SWEEP_AXES`]. Each point carries the swept
    /// values in axis order.
    pub fn sweep_points(&self) -> CliResult<(Vec<&'static str>, Vec<(Vec<f64>, Params)>)> {
        let base = self.base_params()?;
        let axes = self.sweep_axes()?;
        let names: Vec<&'static str> = axes.iter().map(|(n, _)| *n).collect();
        let mut points: Vec<(Vec<f64>, Params)> = vec![(Vec::new(), base)];
        for (axis, values) in &axes {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for (coords, p) in &points {
                for &v in values {
                    let mut c = coords.clone();
                    c.push(v);
                    next.push((c, set_axis(*p, axis, v)));
                }
            }
            points = next;
        }
        for (_, p) in &points {
            p.validate()?;
        }
        Ok((names, points))
    }
}

fn set_axis(p: Params, axis: &str, v: f64) -> Params {
    match axis {
        "xi" => p.with_xi(v),
        "alpha" => Params { alpha: v, ..p },
        "delta" => p.with_delta(v),
        "omega" => p.with_omega(v),
        _ => unreachable!("axis names are checked before use"),
    }
}

/// Parses `name=spec` where spec is `start:stop:count` or `v1,v2,...`.
pub fn parse_sweep_flag(s: &str) -> Result<(String, Samples), String> {
    let (name, spec) = s.split_once('=').ok_or_else(|| format!("sweep {s:?} must look like name=start:stop:count"))?;
    let spec = spec.trim();
    let samples = if spec.contains(':') {
        Samples::Range(spec.to_string())
    } else {
        let values: Result<Vec<f64>, _> = spec.split(',').map(|x| x.trim().parse::<f64>()).collect();
        Samples::List(values.map_err(|_| format!("sweep values {spec:?} are not numbers"))?)
    };
    Ok((name.trim().to_string(), samples))
}

pub fn parse_samples_flag(s: &str) -> Result<Samples, String> {
    parse_sweep_flag(&format!("grid={s}")).map(|(_, v)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(Samples::Range("0:1:3".into()).points().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Samples::List(vec![0.1, 0.3]).points().unwrap(), vec![0.1, 0.3]);
        assert!(Samples::Range("0:1:1".into()).points().is_err());
        assert!(Samples::Range("1:0:5".into()).points().is_err());
        assert!(Samples::Range("0:1".into()).points().is_err());
        assert!(Samples::List(vec![1.0]).points().is_err());
        assert!(Samples::List(vec![1.0, 0.5]).grid().is_err());
    }

    #[test]
    fn sweep_flags() {
        assert_eq!(parse_sweep_flag("delta=-80:80:161").unwrap(), ("delta".into(), Samples::Range("-80:80:161".into())));
        assert_eq!(parse_sweep_flag("xi=0.5, 1,2").unwrap(), ("xi".into(), Samples::List(vec![0.5, 1.0, 2.0])));
        assert!(parse_sweep_flag("xi").is_err());
        assert!(parse_sweep_flag("xi=a,b").is_err());
    }

    #[test]
    fn later_layers_win() {
        let mut a: RunConfig = serde_json::from_str(r#"{"params": {"omega": 5, "xi": 2}, "model": "full"}"#).unwrap();
        let b = RunConfig { params: ParamsConfig { omega: Some(40.0), ..Default::default() }, ..Default::default() };
        a.merge(&b);
        let p = a.base_params().unwrap();
        assert_eq!((p.omega, p.xi, p.alpha), (40.0, 2.0, -120.0));
        assert_eq!(a.model.as_deref(), Some("full"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"omgea": 4}"#).is_err());
    }

    #[test]
    fn cartesian_sweep_order() {
        let mut c = RunConfig::default();
        c.sweeps.insert("omega".into(), Samples::List(vec![1.0, 2.0]));
        c.sweeps.insert("delta".into(), Samples::List(vec![-1.0, 0.0, 1.0]));
        let (names, pts) = c.sweep_points().unwrap();
        assert_eq!(names, vec!["delta", "omega"]);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1].0, vec![-1.0, 2.0]);
        assert_eq!((pts[1].1.delta, pts[1].1.omega), (-1.0, 2.0));
        c.sweeps.insert("gamma".into(), Samples::List(vec![1.0, 2.0]));
        assert!(c.sweep_points().is_err());
    }
}
