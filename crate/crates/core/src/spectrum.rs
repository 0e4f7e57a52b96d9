//! Resonance-fluorescence spectrum from the first-order correlation.
//!
//! The frequency axis is in the rotating frame, ω − ω_d, in units of Γ. The
//! incoherent part is the one-sided transform of the fluctuation correlation
//!
//! c(τ) = ⟨ΔΣ₊(τ) ΔΣ₋(0)⟩ / ⟨Σ₊Σ₋⟩,  S_inc(ω) = (1/π) Re ∫₀^∞ e^{−iωτ} c(τ) dτ,
//!
//! and the elastic part is a delta function at ω = 0 with weight
//! |⟨Σ₋⟩|² / ⟨Σ₊Σ₋⟩.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::FftPlanner;

use crate::dynamics::{EmissionStats, Propagator};
use crate::error::{Error, Result};
use crate::linalg::{trace_functional, vec, Eigen9, Mat9, Vec9};
use crate::liouvillian::Liouvillian;
use crate::operators::{Mat3, C64};

/// FFT sampling step of the correlation trace.
pub const FFT_STEP: f64 = 0.002;
/// Length of the zero-padded FFT buffer.
pub const FFT_LEN: usize = 1 << 19;
/// Trace length in units of the slowest decay time.
pub const FFT_DECAY_TIMES: f64 = 30.0;
/// The FFT path refuses traces shorter than this many slowest decay times.
pub const MIN_DECAY_TIMES: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumMethod {
    /// Lorentzian sum over the Liouvillian eigenmodes.
    #[default]
    EigenSum,
    /// Trapezoid-weighted FFT of the sampled correlation trace.
    Fft,
}

impl fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumMethod::EigenSum => "eigen-sum",
            SpectrumMethod::Fft => "fft",
        })
    }
}

impl FromStr for SpectrumMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen-sum" | "eigen_sum" | "eigen" => Ok(SpectrumMethod::EigenSum),
            "fft" => Ok(SpectrumMethod::Fft),
            other => Err(Error::InvalidParameter { name: "method", reason: format!("unknown spectrum method {other:?}") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumNormalization {
    /// Density per unit ω, normalised by ⟨Σ₊Σ₋⟩.
    #[default]
    Raw,
    /// Scaled so the largest incoherent sample is 1.
    Peak,
}

impl fmt::Display for SpectrumNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumNormalization::Raw => "raw",
            SpectrumNormalization::Peak => "peak",
        })
    }
}

impl FromStr for SpectrumNormalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(SpectrumNormalization::Raw),
            "peak" => Ok(SpectrumNormalization::Peak),
            other => Err(Error::InvalidParameter { name: "normalization", reason: format!("unknown mode {other:?}") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub omega_grid: Vec<f64>,
    pub incoherent: Vec<f64>,
    pub coherent_weight: f64,
    pub normalization: SpectrumNormalization,
}

impl SpectrumResult {
    pub fn peak_height(&self) -> f64 {
        self.incoherent.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rescales the incoherent density. Converting back to raw is not
    /// possible once the scale is lost.
    pub fn normalized(mut self, mode: SpectrumNormalization) -> Result<Self> {
        match (self.normalization, mode) {
            (a, b) if a == b => {}
            (SpectrumNormalization::Raw, SpectrumNormalization::Peak) => {
                let peak = self.peak_height();
                if !(peak > 0.0) {
                    return Err(Error::Numeric("spectrum has no positive peak to normalise by".into()));
                }
                for v in &mut self.incoherent {
                    *v /= peak;
                }
                self.normalization = mode;
            }
            _ => return Err(Error::Numeric("peak-normalised spectrum cannot be converted to raw".into())),
        }
        Ok(self)
    }

    /// Local maxima above `rel_threshold` times the global maximum.
    pub fn peaks(&self, rel_threshold: f64) -> Vec<Peak> {
        find_peaks(&self.omega_grid, &self.incoherent, rel_threshold)
    }

    /// Trapezoid integral of the incoherent density.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.omega_grid, &self.incoherent)
    }

    /// max_ω |S(ω) − S(−ω)| / max S over a grid symmetric about zero.
    pub fn max_asymmetry(&self) -> Result<f64> {
        let n = self.omega_grid.len();
        let scale = self.omega_grid.iter().fold(0.0f64, |m, w| m.max(w.abs())).max(1.0);
        for k in 0..n {
            if (self.omega_grid[k] + self.omega_grid[n - 1 - k]).abs() > 1e-12 * scale {
                return Err(Error::Domain("asymmetry needs a grid symmetric about zero".into()));
            }
        }
        let peak = self.peak_height();
        let worst = (0..n).map(|k| (self.incoherent[k] - self.incoherent[n - 1 - k]).abs()).fold(0.0, f64::max);
        Ok(worst / peak)
    }
}

/// Computes the coherent weight and the incoherent density on `omega_grid`.
pub fn incoherent_spectrum(l: &Liouvillian, omega_grid: &[f64], method: SpectrumMethod) -> Result<SpectrumResult> {
    check_omega_grid(omega_grid)?;
    let stats = EmissionStats::new(l)?;
    stats.require_emission()?;
    let source = fluctuation_source(&stats);
    let measure = trace_functional(&stats.sigma_minus.0.adjoint());
    let incoherent = match method {
        SpectrumMethod::EigenSum => eigen_sum(l, &source, &measure, omega_grid)?,
        SpectrumMethod::Fft => fft_spectrum(l, &source, &measure, omega_grid)?,
    };
    if let Some(bad) = incoherent.iter().find(|v| !v.is_finite() || **v < -1e-8) {
        return Err(Error::Numeric(format!("spectral density {bad:.3e} is negative or non-finite")));
    }
    Ok(SpectrumResult {
        omega_grid: omega_grid.to_vec(),
        incoherent,
        coherent_weight: stats.coherent_fraction(),
        normalization: SpectrumNormalization::Raw,
    })
}

/// Largest |eigen-sum − FFT| over the grid, relative to the eigen-sum peak.
pub fn method_cross_check(l: &Liouvillian, omega_grid: &[f64]) -> Result<f64> {
    let a = incoherent_spectrum(l, omega_grid, SpectrumMethod::EigenSum)?;
    let b = incoherent_spectrum(l, omega_grid, SpectrumMethod::Fft)?;
    let worst = a.incoherent.iter().zip(&b.incoherent).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(worst / a.peak_height())
}

/// Integral of the incoherent density over `omega_grid` and the total
/// incoherent weight ⟨ΔΣ₊ΔΣ₋⟩/⟨Σ₊Σ₋⟩ it should approach.
pub fn sum_rule(l: &Liouvillian, omega_grid: &[f64]) -> Result<(f64, f64)> {
    let s = incoherent_spectrum(l, omega_grid, SpectrumMethod::EigenSum)?;
    Ok((s.integral(), 1.0 - s.coherent_weight))
}

/// vec((Σ₋ − ⟨Σ₋⟩) ρ_ss) / ⟨Σ₊Σ₋⟩
fn fluctuation_source(stats: &EmissionStats) -> Vec9 {
    let delta = stats.sigma_minus.0 - Mat3::identity() * stats.mean_lowering;
    vec(&(delta * stats.rho.matrix())) / C64::new(stats.intensity, 0.0)
}

fn check_omega_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("empty ω grid".into()));
    }
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::Domain("ω grid contains non-finite values".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("ω grid must be strictly ascending".into()));
    }
    Ok(())
}

fn zero_mode_cutoff(l: &Liouvillian) -> f64 {
    1e-9 * crate::linalg::norm1(l.matrix()).max(1.0)
}

fn eigen_sum(l: &Liouvillian, source: &Vec9, measure: &Vec9, grid: &[f64]) -> Result<Vec<f64>> {
    let prop = Propagator::new(l);
    let Some(eig) = prop.eigen() else {
        return resolvent(l, source, measure, grid);
    };
    let coeff = eig.inverse * source;
    let row = measure.transpose() * eig.vectors;
    let cutoff = zero_mode_cutoff(l);
    let modes: Vec<(C64, C64)> = (0..9)
        .filter(|&k| eig.values[k].norm() > cutoff)
        .map(|k| (row[k] * coeff[k], eig.values[k]))
        .collect();
    Ok(grid
        .iter()
        .map(|&w| {
            let iw = C64::new(0.0, w);
            modes.iter().map(|(c, lam)| c / (iw - lam)).sum::<C64>().re / PI
        })
        .collect())
}

/// (iω − L + |ρ_ss⟩⟨1|)⁻¹ applied to the trace-free source. The rank-one term
/// lifts the zero mode without touching the trace-free subspace, so this
/// equals the eigen-sum whenever the latter exists.
fn resolvent(l: &Liouvillian, source: &Vec9, measure: &Vec9, grid: &[f64]) -> Result<Vec<f64>> {
    let rho = crate::dynamics::steady_state(l)?;
    let lift = vec(rho.matrix()) * trace_functional(&Mat3::identity()).transpose();
    let base: Mat9 = lift - l.matrix();
    grid.iter()
        .map(|&w| {
            let a = base + Mat9::identity() * C64::new(0.0, w);
            let y = a.lu().solve(source).ok_or_else(|| Error::Numeric(format!("resolvent singular at ω = {w}")))?;
            Ok((measure.transpose() * y)[0].re / PI)
        })
        .collect()
}

/// Slowest non-stationary mode of L.
fn slowest_mode(l: &Liouvillian) -> Result<C64> {
    let eig = Eigen9::new(l.matrix())?;
    let cutoff = zero_mode_cutoff(l);
    eig.values
        .iter()
        .filter(|v| v.norm() > cutoff)
        .copied()
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .ok_or_else(|| Error::Numeric("Liouvillian has no decaying modes".into()))
}

fn fft_spectrum(l: &Liouvillian, source: &Vec9, measure: &Vec9, grid: &[f64]) -> Result<Vec<f64>> {
    let slow = slowest_mode(l)?;
    let rate = -slow.re;
    if !(rate > 0.0) {
        return Err(Error::Numeric(format!("slowest mode {slow} does not decay")));
    }
    let samples = ((FFT_DECAY_TIMES / rate / FFT_STEP).ceil() as usize + 1).min(FFT_LEN / 2);
    let tau_max = (samples - 1) as f64 * FFT_STEP;
    if tau_max * rate < MIN_DECAY_TIMES {
        return Err(Error::Truncation(tau_max * rate));
    }
    let nyquist = PI / FFT_STEP;
    if grid.iter().any(|w| w.abs() >= nyquist) {
        return Err(Error::Domain(format!("ω grid exceeds the FFT Nyquist limit {nyquist:.1}")));
    }

    let taus: Vec<f64> = (0..samples).map(|k| k as f64 * FFT_STEP).collect();
    let trace = Propagator::stepping(l).regression(source, measure, &taus)?;
    let c0 = trace[0];
    let c_end = trace[samples - 1];
    // c'(0) for the Euler–Maclaurin end correction.
    let dc0 = (measure.transpose() * (l.matrix() * source))[0];

    let mut buf = vec![C64::new(0.0, 0.0); FFT_LEN];
    for (k, c) in trace.iter().enumerate() {
        let w = if k == 0 || k == samples - 1 { 0.5 } else { 1.0 };
        buf[k] = c * (w * FFT_STEP);
    }
    FftPlanner::new().plan_fft_forward(FFT_LEN).process(&mut buf);

    let bin = 2.0 * PI / (FFT_LEN as f64 * FFT_STEP);
    let at_bin = |j: i64| buf[j.rem_euclid(FFT_LEN as i64) as usize];
    Ok(grid
        .iter()
        .map(|&w| {
            let x = w / bin;
            let j = x.floor();
            let t = x - j;
            let body = at_bin(j as i64) * (1.0 - t) + at_bin(j as i64 + 1) * t;
            let iw = C64::new(0.0, w);
            let end_correction = (dc0 - iw * c0) * (FFT_STEP * FFT_STEP / 12.0);
            let tail = c_end * (-iw * tau_max).exp() / (iw - slow);
            (body + end_correction + tail).re / PI
        })
        .collect())
}

/// A local maximum with its parabolic-interpolated position and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub omega: f64,
    pub height: f64,
}

/// Interior local maxima above `rel_threshold` times the global maximum,
/// refined by a parabola through the three neighbouring samples.
pub fn find_peaks(x: &[f64], y: &[f64], rel_threshold: f64) -> Vec<Peak> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Vec::new();
    }
    let top = y[..n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = rel_threshold * top;
    let mut out = Vec::new();
    for k in 1..n - 1 {
        if !(y[k] > y[k - 1] && y[k] >= y[k + 1] && y[k] >= floor) {
            continue;
        }
        let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
        let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
        let d0 = (y1 - y0) / (x1 - x0);
        let d1 = (y2 - y1) / (x2 - x1);
        let curv = (d1 - d0) / (x2 - x0);
        let peak = if curv < 0.0 {
            let vertex = 0.5 * (x0 + x1) - d0 / (2.0 * curv);
            let vertex = vertex.clamp(x0, x2);
            Peak { omega: vertex, height: y1 + d0 * (vertex - x1) + curv * (vertex - x0) * (vertex - x1) }
        } else {
            Peak { omega: x1, height: y1 }
        };
        out.push(peak);
    }
    out
}

/// Peaks of the Hann-windowed amplitude spectrum of a real signal sampled on
/// a uniform grid, in angular frequency. The mean is removed first.
pub fn oscillation_peaks(t: &[f64], y: &[f64], rel_threshold: f64) -> Result<Vec<Peak>> {
    let n = t.len();
    if n < 4 || y.len() != n {
        return Err(Error::Domain("need at least four samples with matching lengths".into()));
    }
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(Error::Domain("oscillation analysis needs a uniform ascending grid".into()));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let len = (16 * n).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); len];
    for k in 0..n {
        let hann = 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
        buf[k] = C64::new((y[k] - mean) * hann, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let half = len / 2;
    let freq: Vec<f64> = (0..half).map(|j| 2.0 * PI * j as f64 / (len as f64 * dt)).collect();
    let amp: Vec<f64> = buf[..half].iter().map(|z| z.norm()).collect();
    Ok(find_peaks(&freq, &amp, rel_threshold))
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}
