//! Dressed states of the rotating-frame Hamiltonian and the secular
//! (strong-drive) description of the emission.
//!
//! Dressed levels are labelled by sorting the eigenfrequencies,
//! ω_l ≤ ω_m ≤ ω_u. The eigenvector matrix `S` stores them in the column
//! order (m, u, l), and every dressed-basis matrix in this module (the
//! lowering-operator coefficients a₁…a₉, the population matrix M) uses that
//! row/column order.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::operators::{hamiltonian_full, lowering_operator, Mat3, Operator3, C64};
use crate::params::Params;

/// Two dressed eigenfrequencies closer than this are treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Dressed level, in the column order of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DressedLevel {
    M = 0,
    U = 1,
    L = 2,
}

impl DressedLevel {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone)]
pub struct DressedBasis {
    pub omega_l: f64,
    pub omega_m: f64,
    pub omega_u: f64,
    /// Columns are |m⟩, |u⟩, |l⟩ in the bare basis.
    pub s: Matrix3<f64>,
    pub s_inv: Matrix3<f64>,
    /// Σ₋ in the dressed basis, `a[(row, col)]` in (m, u, l) order;
    /// a₁ = `a[(0,0)]`, a₂ = `a[(0,1)]`, …, a₉ = `a[(2,2)]`.
    pub a: Matrix3<f64>,
    pub params: Params,
}

/// Diagonalises the rotating-frame Hamiltonian.
///
/// Each eigenvector is normalised with its largest-magnitude component made
/// positive, which fixes the signs of the a-coefficients.
pub fn diagonalize(p: &Params) -> Result<DressedBasis> {
    let h = hamiltonian_full(p)?.0.map(|z| z.re);
    let eig = h.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let [il, im, iu] = order;

    let fix_phase = |k: usize| -> Vector3<f64> {
        let v: Vector3<f64> = eig.eigenvectors.column(k).normalize();
        let big = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
        if big < 0.0 {
            -v
        } else {
            v
        }
    };
    let s = Matrix3::from_columns(&[fix_phase(im), fix_phase(iu), fix_phase(il)]);
    let s_inv = s
        .try_inverse()
        .ok_or_else(|| Error::Numeric("dressed eigenvector matrix is singular".into()))?;
    let sigma_minus = lowering_operator(p.xi)?.0.map(|z| z.re);
    let a = s_inv * sigma_minus * s;
    Ok(DressedBasis {
        omega_l: eig.eigenvalues[il],
        omega_m: eig.eigenvalues[im],
        omega_u: eig.eigenvalues[iu],
        s,
        s_inv,
        a,
        params: *p,
    })
}

impl DressedBasis {
    /// Eigenfrequencies in the column order of `S`: (ω_m, ω_u, ω_l).
    pub fn frequencies(&self) -> [f64; 3] {
        [self.omega_m, self.omega_u, self.omega_l]
    }

    pub fn ket(&self, level: DressedLevel) -> Vector3<f64> {
        self.s.column(level.index()).into_owned()
    }

    /// The nine coefficients a₁…a₉ (row-major in (m, u, l) order).
    pub fn coefficients(&self) -> [f64; 9] {
        let a = &self.a;
        [a[(0, 0)], a[(0, 1)], a[(0, 2)], a[(1, 0)], a[(1, 1)], a[(1, 2)], a[(2, 0)], a[(2, 1)], a[(2, 2)]]
    }

    /// Smallest gap between dressed eigenfrequencies.
    pub fn min_gap(&self) -> f64 {
        (self.omega_m - self.omega_l).min(self.omega_u - self.omega_m)
    }

    /// Fails when two dressed levels are unresolved.
    pub fn ensure_resolved(&self) -> Result<()> {
        let gap = self.min_gap();
        if gap < DEGENERACY_TOLERANCE {
            return Err(Error::Degenerate(gap));
        }
        Ok(())
    }

    /// Lifts a dressed-basis matrix (in (m, u, l) order) to the bare basis.
    pub fn to_bare(&self, dressed: &Matrix3<f64>) -> Operator3 {
        Operator3((self.s * dressed * self.s_inv).map(|x| C64::new(x, 0.0)))
    }

    /// Dressed transition operator as a bare-basis matrix.
    pub fn operator(&self, op: DressedOp) -> Operator3 {
        self.to_bare(&op.dressed_matrix())
    }

    /// Largest entry of |S⁻¹ H S − diag(ω_m, ω_u, ω_l)|.
    pub fn diagonalization_residual(&self) -> f64 {
        let h = hamiltonian_full(&self.params).map(|h| h.0.map(|z| z.re)).unwrap_or_else(|_| Matrix3::zeros());
        let d = self.s_inv * h * self.s - Matrix3::from_diagonal(&Vector3::from(self.frequencies()));
        d.amax()
    }
}

/// Residual of the dressed characteristic polynomial at ω.
pub fn characteristic_residual(p: &Params, w: f64) -> f64 {
    let half_sq = (p.omega / 2.0).powi(2);
    w.powi(3) + (p.alpha / 2.0 + 3.0 * p.delta) * w * w
        + (p.delta * (p.alpha + 2.0 * p.delta) - half_sq * (1.0 + p.xi * p.xi)) * w
        - 2.0 * p.delta * half_sq
}

/// Closed-form eigenfrequencies at two-photon resonance, ascending.
pub fn resonant_eigenfrequencies(p: &Params) -> [f64; 3] {
    let root = ((p.alpha / 4.0).powi(2) + (p.omega / 2.0).powi(2) * (1.0 + p.xi * p.xi)).sqrt();
    let mut w = [0.0, -p.alpha / 4.0 - root, -p.alpha / 4.0 + root];
    w.sort_by(f64::total_cmp);
    w
}

/// Dressed transition operators σ₀, σ±₁, σ±₂, σ±₃.
///
/// σ₊₁ = |l⟩⟨m|, σ₊₂ = |u⟩⟨m|, σ₊₃ = |u⟩⟨l|, σ₋ᵢ = σ₊ᵢ†,
/// σ₀ = |u⟩⟨u| − |l⟩⟨l|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DressedOp {
    Zero,
    Plus(u8),
    Minus(u8),
}

impl DressedOp {
    pub const ALL: [DressedOp; 7] = [
        DressedOp::Minus(3),
        DressedOp::Minus(2),
        DressedOp::Minus(1),
        DressedOp::Zero,
        DressedOp::Plus(1),
        DressedOp::Plus(2),
        DressedOp::Plus(3),
    ];

    fn checked(self) -> Result<Self> {
        match self {
            DressedOp::Plus(i) | DressedOp::Minus(i) if !(1..=3).contains(&i) => {
                Err(Error::UnsupportedKind(format!("dressed operator index {i}")))
            }
            _ => Ok(self),
        }
    }

    /// (from, to) for the transitions; `None` for σ₀.
    pub fn transition(self) -> Option<(DressedLevel, DressedLevel)> {
        use DressedLevel::*;
        match self {
            DressedOp::Zero => None,
            DressedOp::Plus(1) => Some((M, L)),
            DressedOp::Plus(2) => Some((M, U)),
            DressedOp::Plus(3) => Some((L, U)),
            DressedOp::Minus(1) => Some((L, M)),
            DressedOp::Minus(2) => Some((U, M)),
            DressedOp::Minus(3) => Some((U, L)),
            _ => None,
        }
    }

    /// Matrix in the dressed basis, (m, u, l) order.
    pub fn dressed_matrix(self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        match self.transition() {
            Some((from, to)) => m[(to.index(), from.index())] = 1.0,
            None => {
                m[(DressedLevel::U.index(), DressedLevel::U.index())] = 1.0;
                m[(DressedLevel::L.index(), DressedLevel::L.index())] = -1.0;
            }
        }
        m
    }

    pub fn dagger(self) -> Self {
        match self {
            DressedOp::Zero => DressedOp::Zero,
            DressedOp::Plus(i) => DressedOp::Minus(i),
            DressedOp::Minus(i) => DressedOp::Plus(i),
        }
    }
}

impl fmt::Display for DressedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DressedOp::Zero => write!(f, "0"),
            DressedOp::Plus(i) => write!(f, "+{i}"),
            DressedOp::Minus(i) => write!(f, "-{i}"),
        }
    }
}

impl FromStr for DressedOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches("sigma").trim_start_matches('σ');
        let op = match t {
            "0" => DressedOp::Zero,
            _ => {
                let (sign, rest) = t.split_at(t.len().min(1));
                let idx: u8 = rest.parse().map_err(|_| Error::UnsupportedKind(s.to_string()))?;
                match sign {
                    "+" => DressedOp::Plus(idx),
                    "-" | "m" => DressedOp::Minus(idx),
                    "p" => DressedOp::Plus(idx),
                    _ => return Err(Error::UnsupportedKind(s.to_string())),
                }
            }
        };
        op.checked()
    }
}

/// The seven spectral lines ω̃₀, ω̃±₁, ω̃±₂, ω̃±₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFrequencies {
    /// ω_m − ω_l
    pub w1: f64,
    /// ω_u − ω_m
    pub w2: f64,
    /// ω_u − ω_l
    pub w3: f64,
}

impl TransitionFrequencies {
    pub fn get(&self, op: DressedOp) -> f64 {
        match op {
            DressedOp::Zero => 0.0,
            DressedOp::Plus(1) => self.w1,
            DressedOp::Plus(2) => self.w2,
            DressedOp::Plus(3) => self.w3,
            DressedOp::Minus(1) => -self.w1,
            DressedOp::Minus(2) => -self.w2,
            DressedOp::Minus(3) => -self.w3,
            _ => f64::NAN,
        }
    }

    /// All seven lines ordered (−3, −2, −1, 0, +1, +2, +3).
    pub fn all(&self) -> [(DressedOp, f64); 7] {
        DressedOp::ALL.map(|op| (op, self.get(op)))
    }

    /// The seven line positions sorted ascending.
    pub fn sorted(&self) -> [f64; 7] {
        let mut w = self.all().map(|(_, w)| w);
        w.sort_by(f64::total_cmp);
        w
    }
}

pub fn transition_frequencies(b: &DressedBasis) -> TransitionFrequencies {
    let w1 = b.omega_m - b.omega_l;
    let w2 = b.omega_u - b.omega_m;
    TransitionFrequencies { w1, w2, w3: w1 + w2 }
}

/// Σ₋ in the dressed basis, S⁻¹Σ₋S, as a₁…a₉.
pub fn lowering_coefficients(b: &DressedBasis) -> [f64; 9] {
    b.coefficients()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularRates {
    /// Ω → ∞ limits of the σ₀ and σ±ᵢ channel rates.
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Coherence decay rates from the a-coefficients at the actual drive.
    pub gamma_um: f64,
    pub gamma_ml: f64,
    pub gamma_ul: f64,
    /// Nonzero eigenvalues of the population matrix in the Ω → ∞ limit.
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

/// Channel rates Γ₀…Γ₃ in the limit Ω → ∞.
pub fn asymptotic_channel_rates(gamma: f64, xi: f64) -> [f64; 4] {
    let xi2 = xi * xi;
    let side = xi2 * gamma / (2.0 * (1.0 + xi2));
    [(1.0 + xi2) * gamma / 4.0, side, side, (1.0 - xi2).powi(2) * gamma / (4.0 * (1.0 + xi2))]
}

/// Population relaxation eigenvalues (λ₋, λ₊) in the limit Ω → ∞.
pub fn asymptotic_lambdas(gamma: f64, xi: f64) -> (f64, f64) {
    let xi2 = xi * xi;
    (
        -3.0 * xi2 * gamma / (2.0 * (1.0 + xi2)),
        -gamma * (1.0 - xi2 + xi2 * xi2) / (2.0 * (1.0 + xi2)),
    )
}

pub fn secular_rates(b: &DressedBasis) -> SecularRates {
    let p = &b.params;
    let g = p.gamma;
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9] = b.coefficients();
    let sq = |x: f64| x * x;
    let [gamma0, gamma1, gamma2, gamma3] = asymptotic_channel_rates(g, p.xi);
    let (lambda_minus, lambda_plus) = asymptotic_lambdas(g, p.xi);
    SecularRates {
        gamma0,
        gamma1,
        gamma2,
        gamma3,
        gamma_um: g * (sq(a2) + sq(a4) + sq(a7) + sq(a8) + sq(a1 - a5)),
        gamma_ml: g * (sq(a3) + sq(a4) + sq(a6) + sq(a7) + sq(a1 - a9)),
        gamma_ul: g * (sq(a2) + sq(a3) + sq(a6) + sq(a8) + sq(a5 - a9)),
        lambda_minus,
        lambda_plus,
    }
}

/// Channel rates Γ₀…Γ₃ evaluated from the a-coefficients at finite drive.
///
/// Γ₀ = Γ((a₅ − a₉)/2)² projects the diagonal part of Σ₋ onto σ₀; Γᵢ for
/// i = 1, 2, 3 averages the up and down rates of the pair σ±ᵢ.
pub fn channel_rates(b: &DressedBasis) -> [f64; 4] {
    let g = b.params.gamma;
    let [_, a2, a3, a4, a5, a6, a7, a8, a9] = b.coefficients();
    [
        g * ((a5 - a9) / 2.0).powi(2),
        g * (a3 * a3 + a7 * a7) / 2.0,
        g * (a2 * a2 + a4 * a4) / 2.0,
        g * (a6 * a6 + a8 * a8) / 2.0,
    ]
}

/// Rate matrix M of the dressed populations (⟨σ_mm⟩, ⟨σ_uu⟩, ⟨σ_ll⟩).
pub fn population_evolution_matrix(b: &DressedBasis) -> Matrix3<f64> {
    let g = b.params.gamma;
    let [_, a2, a3, a4, _, a6, a7, a8, _] = b.coefficients().map(|x| x * x);
    Matrix3::new(
        -g * (a4 + a7),
        g * a2,
        g * a3,
        g * a4,
        -g * (a2 + a8),
        g * a6,
        g * a7,
        g * a8,
        -g * (a3 + a6),
    )
}

/// Dressed populations (mm, uu, ll) after τ in the Ω → ∞ secular limit.
///
/// C₁ is the mean population; the λ₋ mode has shape (−2, 1, 1) and the λ₊
/// mode (0, −1, 1).
pub fn analytic_two_time(initial: [f64; 3], rates: &SecularRates, tau: f64) -> Result<[f64; 3]> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("τ = {tau} must be ≥ 0")));
    }
    let [mm, uu, ll] = initial;
    let c1 = (ll + uu + mm) / 3.0;
    let c2 = (ll + uu - 2.0 * mm) / 6.0;
    let c3 = (ll - uu) / 2.0;
    let em = (rates.lambda_minus * tau).exp();
    let ep = (rates.lambda_plus * tau).exp();
    Ok([c1 - 2.0 * c2 * em, c1 + c2 * em - c3 * ep, c1 + c2 * em + c3 * ep])
}

/// Catalog of closed-form dressed-transition correlations g⁽²⁾(A, 0; B, τ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G2Kind {
    /// Auto-correlation of a single line (σ₀, σ±₁, σ±₂ or σ±₃).
    Auto(DressedOp),
    /// Photon on line A followed by a photon on line B.
    Cross(DressedOp, DressedOp),
    /// The (+1, −2) ordering with both exponentials carrying λ₋.
    ///
    /// Kept for comparison; the general solution gives a λ₊ second term,
    /// which is what `Cross(+1, −2)` evaluates.
    Plus1Minus2SingleRate,
}

impl fmt::Display for G2Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            G2Kind::Auto(op) => write!(f, "auto({op})"),
            G2Kind::Cross(a, b) => write!(f, "cross({a},{b})"),
            G2Kind::Plus1Minus2SingleRate => write!(f, "cross(+1,-2)[single-rate]"),
        }
    }
}

impl FromStr for G2Kind {
    type Err = Error;

    /// Accepts `auto0`, `auto+1`, `auto(-3)`, `cross(-1,+1)`, `-2,+1` …
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "cross(+1,-2)[single-rate]" {
            return Ok(G2Kind::Plus1Minus2SingleRate);
        }
        if let Some(rest) = t.strip_prefix("auto") {
            let inner = rest.trim_start_matches('(').trim_end_matches(')');
            return Ok(G2Kind::Auto(inner.parse()?));
        }
        let inner = t.strip_prefix("cross").unwrap_or(&t).trim_start_matches('(').trim_end_matches(')');
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::UnsupportedKind(s.to_string()))?;
        Ok(G2Kind::Cross(a.parse()?, b.parse()?))
    }
}

impl G2Kind {
    /// Every entry of the closed-form catalog.
    pub fn catalog() -> Vec<G2Kind> {
        use DressedOp::*;
        let mut v: Vec<G2Kind> = DressedOp::ALL.iter().map(|&op| G2Kind::Auto(op)).collect();
        for i in 1..=3 {
            v.push(G2Kind::Cross(Minus(i), Plus(i)));
        }
        for i in 1..=3 {
            v.push(G2Kind::Cross(Plus(i), Minus(i)));
        }
        v.push(G2Kind::Cross(Minus(2), Plus(1)));
        v.push(G2Kind::Cross(Plus(1), Minus(2)));
        v
    }

    /// (first, second) dressed operators of the correlation.
    pub fn operators(&self) -> (DressedOp, DressedOp) {
        match *self {
            G2Kind::Auto(op) => (op, op),
            G2Kind::Cross(a, b) => (a, b),
            G2Kind::Plus1Minus2SingleRate => (DressedOp::Plus(1), DressedOp::Minus(2)),
        }
    }
}

/// Closed-form secular correlation g⁽²⁾(A, 0; B, τ) from the catalog.
pub fn analytic_g2(kind: G2Kind, xi: f64, tau: f64) -> Result<f64> {
    use DressedOp::*;
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("τ = {tau} must be ≥ 0")));
    }
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParameter { name: "xi", reason: format!("{xi} must be finite and > 0") });
    }
    let (lm, lp) = asymptotic_lambdas(1.0, xi);
    let em = (lm * tau).exp();
    let ep = (lp * tau).exp();
    let bunched_pair = 1.0 + 0.5 * em + 1.5 * ep;
    let value = match kind {
        G2Kind::Auto(op) => match op.checked()? {
            Zero => 1.0 + 0.5 * em,
            Plus(1) | Minus(1) | Plus(2) | Minus(2) => 1.0 - em,
            _ => 1.0 + 0.5 * em - 1.5 * ep,
        },
        G2Kind::Cross(Minus(i), Plus(j)) if i == j && (1..=2).contains(&i) => 1.0 + 2.0 * em,
        G2Kind::Cross(Minus(3), Plus(3)) => bunched_pair,
        G2Kind::Cross(Plus(i), Minus(j)) if i == j && (1..=3).contains(&i) => bunched_pair,
        G2Kind::Cross(Minus(2), Plus(1)) => 1.0 + 2.0 * em,
        G2Kind::Cross(Plus(1), Minus(2)) => 1.0 + 0.5 * em - 1.5 * ep,
        G2Kind::Plus1Minus2SingleRate => 1.0 + 0.5 * em - 1.5 * em,
        other => return Err(Error::UnsupportedKind(other.to_string())),
    };
    Ok(value)
}

/// Secular correlation for any pair of dressed operators, from the general
/// population solution with the uniform Ω → ∞ steady state.
pub fn secular_g2(first: DressedOp, second: DressedOp, xi: f64, tau: f64) -> Result<f64> {
    let first = first.checked()?;
    let second = second.checked()?;
    let (lambda_minus, lambda_plus) = asymptotic_lambdas(1.0, xi);
    let rates = SecularRates {
        gamma0: 0.0,
        gamma1: 0.0,
        gamma2: 0.0,
        gamma3: 0.0,
        gamma_um: 0.0,
        gamma_ml: 0.0,
        gamma_ul: 0.0,
        lambda_minus,
        lambda_plus,
    };
    let ss = 1.0 / 3.0;
    // populations after the first emission, σ_A ρ_ss σ_A†
    let mut after = [0.0; 3];
    match first.transition() {
        Some((_, to)) => after[to.index()] = ss,
        None => {
            after[DressedLevel::U.index()] = ss;
            after[DressedLevel::L.index()] = ss;
        }
    }
    // σ_B†σ_B is a projector onto the source level(s) of B
    let weight = |pops: &[f64; 3], op: DressedOp| match op.transition() {
        Some((from, _)) => pops[from.index()],
        None => pops[DressedLevel::U.index()] + pops[DressedLevel::L.index()],
    };
    let uniform = [ss; 3];
    let evolved = analytic_two_time(after, &rates, tau)?;
    Ok(weight(&evolved, second) / (weight(&uniform, first) * weight(&uniform, second)))
}

/// Which form of the secular channel rates a dressed Liouvillian uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateForm {
    /// σ₀, σ±ᵢ channels with the Ω → ∞ rates Γ₀…Γ₃.
    #[default]
    Asymptotic,
    /// Every secular channel of S⁻¹Σ₋S with rates from the a-coefficients.
    General,
}

/// Jump operators (rate, X) of the secular master equation; each enters the
/// generator as (rate/2)·Λ(X).
pub fn secular_jump_operators(b: &DressedBasis, form: RateForm) -> Result<Vec<(f64, Operator3)>> {
    b.ensure_resolved()?;
    let g = b.params.gamma;
    let mut ops = Vec::new();
    match form {
        RateForm::Asymptotic => {
            let [g0, g1, g2, g3] = asymptotic_channel_rates(g, b.params.xi);
            ops.push((g0, b.operator(DressedOp::Zero)));
            for (i, rate) in [(1u8, g1), (2, g2), (3, g3)] {
                ops.push((rate, b.operator(DressedOp::Plus(i))));
                ops.push((rate, b.operator(DressedOp::Minus(i))));
            }
        }
        RateForm::General => {
            let diag = Matrix3::from_diagonal(&b.a.diagonal());
            ops.push((g, b.to_bare(&diag)));
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        let mut e = Matrix3::zeros();
                        e[(i, j)] = 1.0;
                        ops.push((g * b.a[(i, j)].powi(2), b.to_bare(&e)));
                    }
                }
            }
        }
    }
    Ok(ops)
}

/// The dressed eigenfrequencies as a bare-basis Hamiltonian, S diag(ω) S⁻¹.
pub fn dressed_hamiltonian(b: &DressedBasis) -> Mat3 {
    b.to_bare(&Matrix3::from_diagonal(&Vector3::from(b.frequencies()))).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn strong(xi: f64) -> DressedBasis {
        diagonalize(&Params::new(40.0, -120.0, 0.0, xi).unwrap()).unwrap()
    }

    /// Roots of the δ = 0 cubic: ω(ω² + (α/2)ω − (Ω/2)²(1 + ξ²)) = 0,
    /// via the quadratic formula.
    fn resonant_roots(omega: f64, alpha: f64, xi: f64) -> [f64; 3] {
        let b = alpha / 2.0;
        let c = -(omega / 2.0).powi(2) * (1.0 + xi * xi);
        let disc = (b * b - 4.0 * c).sqrt();
        let mut r = [0.0, (-b - disc) / 2.0, (-b + disc) / 2.0];
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn resonant_eigenvalues() {
        let b = strong(1.0);
        let oracle = resonant_roots(40.0, -120.0, 1.0);
        assert_abs_diff_eq!(oracle[0], -11.231, epsilon = 1e-3);
        assert_abs_diff_eq!(oracle[2], 71.231, epsilon = 1e-3);
        assert_abs_diff_eq!(b.omega_l, oracle[0], epsilon = 1e-9);
        assert_abs_diff_eq!(b.omega_m, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.omega_u, oracle[2], epsilon = 1e-9);
        let closed = resonant_eigenfrequencies(&b.params);
        for (x, y) in closed.iter().zip([b.omega_l, b.omega_m, b.omega_u]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-8);
        }
    }

    #[test]
    fn middle_state_has_no_intermediate_component() {
        for xi in [0.5, 1.0, 2f64.sqrt()] {
            let b = strong(xi);
            let m = b.ket(DressedLevel::M);
            assert!(m[1].abs() < 1e-9);
            // ∝ ξ|g⟩ − |f⟩
            let expected = Vector3::new(xi, 0.0, -1.0).normalize();
            assert!((m - expected).norm() < 1e-9 || (m + expected).norm() < 1e-9);
        }
    }

    #[test]
    fn eigen_residuals() {
        for &(o, d, x) in &[(40.0, 0.0, 1.0), (12.0, 7.0, 0.7), (55.0, -30.0, 1.8)] {
            let p = Params::new(o, -120.0, d, x).unwrap();
            let b = diagonalize(&p).unwrap();
            assert!(b.diagonalization_residual() < 1e-9);
            for w in b.frequencies() {
                assert!(characteristic_residual(&p, w).abs() < 1e-8);
            }
            for k in 0..3 {
                assert_abs_diff_eq!(b.s.column(k).norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn transition_lines() {
        let t = transition_frequencies(&strong(1.0));
        assert_eq!(t.get(DressedOp::Zero), 0.0);
        assert_eq!(t.w3, t.w1 + t.w2);
        assert_abs_diff_eq!(t.w1, 11.231, epsilon = 1e-3);
        assert_abs_diff_eq!(t.w2, 71.231, epsilon = 1e-3);
        assert_abs_diff_eq!(t.w3, 82.462, epsilon = 1e-3);
        assert_eq!(t.get(DressedOp::Minus(2)), -t.w2);
    }

    #[test]
    fn lowering_coefficients_reconstruct() {
        for xi in [0.6, 1.0, 1.7] {
            let b = strong(xi);
            assert!(b.a[(0, 0)].abs() < 1e-12, "a1 should vanish at δ = 0");
            let back = b.to_bare(&b.a).0;
            let sm = lowering_operator(xi).unwrap().0;
            assert!((back - sm).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
        }
    }

    #[test]
    fn strong_drive_coefficients() {
        let b = diagonalize(&Params::new(1e4, -120.0, 0.0, 1.0).unwrap()).unwrap();
        let a = b.coefficients();
        assert!((a[3] * a[3] - 0.25).abs() < 0.01 * 0.25);
        assert!((a[6] * a[6] - 0.25).abs() < 0.01 * 0.25);
    }

    #[test]
    fn rates_at_equal_dipoles() {
        assert_eq!(asymptotic_channel_rates(1.0, 1.0), [0.5, 0.25, 0.25, 0.0]);
        assert_eq!(asymptotic_lambdas(1.0, 1.0), (-0.75, -0.25));
        for xi in [0.3, 0.9, 1.1, 2.0] {
            assert!(asymptotic_channel_rates(1.0, xi)[3] > 0.0);
        }
        let r = secular_rates(&strong(1.0));
        assert!(r.gamma_um >= 0.0 && r.gamma_ml >= 0.0 && r.gamma_ul >= 0.0);
        assert!(r.lambda_minus <= 0.0 && r.lambda_plus <= 0.0);
    }

    #[test]
    fn population_matrix_conserves_probability() {
        let m = population_evolution_matrix(&diagonalize(&Params::new(1e4, -120.0, 0.0, 1.0).unwrap()).unwrap());
        for j in 0..3 {
            assert!(m.column(j).sum().abs() < 1e-12);
        }
        let mut ev: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[2].abs() < 1e-10);
        assert!((ev[0] + 0.75).abs() < 0.02 * 0.75);
        assert!((ev[1] + 0.25).abs() < 0.02 * 0.25);
    }

    #[test]
    fn two_time_solution_identities() {
        let rates = secular_rates(&strong(1.3));
        let init = [0.2, 0.5, 0.3];
        for (x, y) in analytic_two_time(init, &rates, 0.0).unwrap().iter().zip(init) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
        for tau in [0.1, 1.0, 7.0] {
            let s: f64 = analytic_two_time(init, &rates, tau).unwrap().iter().sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        }
        assert!(analytic_two_time(init, &rates, -1.0).is_err());
    }

    #[test]
    fn two_time_matches_matrix_exponential() {
        let b = diagonalize(&Params::new(1e4, -120.0, 0.0, 1.0).unwrap()).unwrap();
        let m = population_evolution_matrix(&b);
        // exp(M) by eigen-decomposition of the real 3×3 rate matrix
        let eig = m.map(|x| C64::new(x, 0.0));
        let mut big = crate::linalg::Mat9::zeros();
        for i in 0..3 {
            for j in 0..3 {
                big[(i, j)] = eig[(i, j)];
            }
        }
        let e = crate::linalg::expm(&big).unwrap();
        let numeric = [e[(0, 1)].re, e[(1, 1)].re, e[(2, 1)].re];
        let analytic = analytic_two_time([0.0, 1.0, 0.0], &secular_rates(&b), 1.0).unwrap();
        for (n, a) in numeric.iter().zip(analytic) {
            assert!((n - a).abs() <= 0.02 * n.abs().max(1e-3), "{n} vs {a}");
        }
    }

    #[test]
    fn catalog_fixed_points() {
        use DressedOp::*;
        assert_eq!(analytic_g2(G2Kind::Auto(Zero), 1.0, 0.0).unwrap(), 1.5);
        for i in 1..=3 {
            assert_eq!(analytic_g2(G2Kind::Auto(Plus(i)), 1.0, 0.0).unwrap(), 0.0);
            assert_eq!(analytic_g2(G2Kind::Auto(Minus(i)), 1.0, 0.0).unwrap(), 0.0);
            assert_eq!(analytic_g2(G2Kind::Cross(Plus(i), Minus(i)), 1.0, 0.0).unwrap(), 3.0);
        }
        assert_eq!(analytic_g2(G2Kind::Cross(Minus(1), Plus(1)), 1.0, 0.0).unwrap(), 3.0);
        for kind in G2Kind::catalog() {
            assert!((analytic_g2(kind, 1.0, 60.0).unwrap() - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn catalog_agrees_with_general_solution() {
        for kind in G2Kind::catalog() {
            let (a, b) = kind.operators();
            for xi in [0.7, 1.0, 1.4] {
                for tau in [0.0, 0.3, 2.0, 9.0] {
                    let closed = analytic_g2(kind, xi, tau).unwrap();
                    let general = secular_g2(a, b, xi, tau).unwrap();
                    assert_abs_diff_eq!(closed, general, epsilon = 1e-12);
                }
            }
        }
        let single = analytic_g2(G2Kind::Plus1Minus2SingleRate, 1.0, 1.0).unwrap();
        let general = secular_g2(DressedOp::Plus(1), DressedOp::Minus(2), 1.0, 1.0).unwrap();
        assert!((single - general).abs() > 0.1);
    }

    #[test]
    fn unsupported_kinds() {
        use DressedOp::*;
        assert!(matches!(analytic_g2(G2Kind::Cross(Plus(2), Plus(3)), 1.0, 0.0), Err(Error::UnsupportedKind(_))));
        assert!(matches!(analytic_g2(G2Kind::Auto(Plus(4)), 1.0, 0.0), Err(Error::UnsupportedKind(_))));
        assert!("+4".parse::<DressedOp>().is_err());
        assert!("x1".parse::<DressedOp>().is_err());
    }

    #[test]
    fn parse_kinds() {
        use DressedOp::*;
        assert_eq!("auto0".parse::<G2Kind>().unwrap(), G2Kind::Auto(Zero));
        assert_eq!("auto(-3)".parse::<G2Kind>().unwrap(), G2Kind::Auto(Minus(3)));
        assert_eq!("cross(-2,+1)".parse::<G2Kind>().unwrap(), G2Kind::Cross(Minus(2), Plus(1)));
        assert_eq!("+1,-2".parse::<G2Kind>().unwrap(), G2Kind::Cross(Plus(1), Minus(2)));
        for kind in G2Kind::catalog() {
            assert_eq!(kind.to_string().parse::<G2Kind>().unwrap(), kind);
        }
    }

    #[test]
    fn degenerate_levels_refuse_secular_model() {
        let b = diagonalize(&Params::new(0.0, -120.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(secular_jump_operators(&b, RateForm::Asymptotic), Err(Error::Degenerate(_))));
    }
}
