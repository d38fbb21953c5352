//! Closed-form phase sensitivities of the three detection schemes for an
//! SU(1,1) coherent state at port 1 and vacuum at port 0.
//!
//! * intensity difference `Ĝ_dif = ĝ₄ − ĝ₅`,
//! * single-mode intensity `ĝ₄`,
//! * balanced homodyne on port 4, `X̂ = ℜ{e^{−iθ_L} b̂₄}`.
//!
//! `Δθ = ΔŜ / |∂⟨Ŝ⟩/∂θ|` throughout.

use num_complex::Complex64;
use thiserror::Error;

use crate::mzi::{BeamSplitter, BeamSplitterPair, PhaseScenario};
use crate::qfi::{qfi_vacuum_port, InputMoments, QfiError, QfiScenario};
use crate::specfun::{self, SpecFunError};
use crate::states::{closed_form_stats, PhotonStatistics, StateError, StateSpec};

/// `|sin θ|` below this counts as a stationary point of the intensity signals.
pub const SIN_FLOOR: f64 = 1e-12;
/// Homodyne derivative magnitude below this counts as vanishing.
pub const HOMODYNE_DERIVATIVE_FLOOR: f64 = 1e-12;
/// Maximum number of terms summed for one homodyne series.
pub const MAX_SERIES_TERMS: usize = 1_000_000;
const SERIES_REL_TOL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectionError {
    #[error("derivative of the signal vanishes: {0}")]
    DerivativeVanishes(&'static str),
    #[error("degenerate configuration: ||α′β| − |αβ′|| = 0 for symmetric homodyne")]
    ConfigurationDegenerate,
    #[error("input carries no photons")]
    DegenerateInput,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Qfi(#[from] QfiError),
}

/// Coefficients of the intensity-difference signal and noise:
/// `⟨Ĝ_dif⟩ = δ_A⟨ĝ₁⟩`-type weight and `Δ²Ĝ_dif = δ_A²Δ²ĝ₁ + |δ_B|²⟨ĝ₁⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifCoefficients {
    pub delta_a: f64,
    pub delta_b: Complex64,
}

/// `δ₀`, `δ₁`: probabilities that a photon from port 0 or 1 exits at port 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingCoefficients {
    pub delta0: f64,
    pub delta1: f64,
    pub delta3: Complex64,
}

pub fn dif_coefficients(bs: BeamSplitterPair, theta: f64) -> DifCoefficients {
    let (t, r) = (bs.first.t_mag(), bs.first.r_mag());
    let (tp, rp) = (bs.second.t_mag(), bs.second.r_mag());
    let mix = t * r * tp * rp;
    let delta_a = 1.0 - 2.0 * (t * rp + r * tp).powi(2) + 4.0 * mix * (1.0 - theta.cos());
    let delta_b = Complex64::new(
        2.0 * tp * rp * theta.sin(),
        2.0 * (t * r * (1.0 - 2.0 * tp * tp) + (1.0 - 2.0 * t * t) * tp * rp * theta.cos()),
    );
    DifCoefficients { delta_a, delta_b }
}

pub fn sing_coefficients(bs: BeamSplitterPair, theta: f64) -> SingCoefficients {
    let (t, r) = (bs.first.t_mag(), bs.first.r_mag());
    let (tp, rp) = (bs.second.t_mag(), bs.second.r_mag());
    let mix = t * r * tp * rp;
    let cross = 2.0 * mix * theta.cos();
    let delta0 = (t * tp).powi(2) + (r * rp).powi(2) - cross;
    let delta1 = (t * rp).powi(2) + (tp * r).powi(2) + cross;
    // α*β(2|α′|² − 1) + α′*β′(|α|²e^{−iθ} − |β|²e^{iθ})
    let i = Complex64::i();
    let delta3 = i * (t * r * (2.0 * tp * tp - 1.0))
        + i * (tp * rp) * (t * t * Complex64::from_polar(1.0, -theta) - r * r * Complex64::from_polar(1.0, theta));
    SingCoefficients { delta0, delta1, delta3 }
}

/// Mean field and field variance of the port-1 state, from the series
/// expansions of `⟨b̂⟩` and `⟨b̂²⟩` in the photon-number basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneSeries {
    /// `Δ²b̂` rotated to the phase of `⟨b̂⟩`: `Δ²b̂ = μ e^{2i arg⟨b̂⟩}`.
    pub mu: f64,
    /// `⟨b̂⟩`
    pub nu: Complex64,
    /// `⟨ĝ⟩`
    pub g_bar: f64,
}

impl HomodyneSeries {
    pub fn field_variance(&self) -> Complex64 {
        self.mu * self.phase_factor() * self.phase_factor()
    }

    fn phase_factor(&self) -> Complex64 {
        if self.nu.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.nu / self.nu.norm()
        }
    }
}

/// Sums `Σ_{g ≥ start} exp(ln_term(g))` for a series whose term ratio
/// decreases monotonically, stopping once the geometric tail bound falls
/// below the relative tolerance.
fn sum_log_series(start: usize, ln_term: impl Fn(usize) -> f64) -> Result<f64, SpecFunError> {
    let mut sum = 0.0;
    let mut prev = 0.0;
    for g in start..start + MAX_SERIES_TERMS {
        let term = ln_term(g).exp();
        sum += term;
        if g > start && prev > 0.0 {
            let ratio = term / prev;
            if ratio < 1.0 && term * ratio / (1.0 - ratio) <= SERIES_REL_TOL * sum {
                return Ok(sum);
            }
        }
        if term == 0.0 && g > start {
            return Ok(sum);
        }
        prev = term;
    }
    Err(SpecFunError::NonConvergence {
        function: "homodyne_series",
        terms: MAX_SERIES_TERMS,
        partial_sum: sum,
    })
}

fn ln_gamma(x: f64) -> f64 {
    specfun::log_gamma(x).expect("positive argument")
}

fn ln_fact(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

pub fn homodyne_series(spec: &StateSpec) -> Result<HomodyneSeries, DetectionError> {
    let zero = HomodyneSeries {
        mu: 0.0,
        nu: Complex64::new(0.0, 0.0),
        g_bar: 0.0,
    };
    match spec {
        StateSpec::Vacuum => Ok(zero),
        StateSpec::Perelomov(s) => {
            if s.v() == 0.0 {
                return Ok(zero);
            }
            let two_a = s.a().value() * 2.0;
            let half = 0.5 * s.v();
            let ln_x = half.tanh().ln();
            // cosh^{−4a}(v/2) = (1 − tanh²(v/2))^{2a}
            let ln_pref = -2.0 * two_a * half.cosh().ln();
            let lg_a = ln_gamma(two_a);
            let nu_sum = sum_log_series(1, |g| {
                let gf = g as f64;
                0.5 * (ln_gamma(gf + two_a) + ln_gamma(gf + two_a - 1.0)) - lg_a - ln_fact(g - 1)
                    + (2.0 * gf - 1.0) * ln_x
                    + ln_pref
            })?;
            let b2_sum = sum_log_series(2, |g| {
                let gf = g as f64;
                0.5 * (ln_gamma(gf + two_a) + ln_gamma(gf + two_a - 2.0)) - lg_a - ln_fact(g - 2)
                    + (2.0 * gf - 2.0) * ln_x
                    + ln_pref
            })?;
            let stats = closed_form_stats(spec)?;
            Ok(HomodyneSeries {
                mu: b2_sum - nu_sum * nu_sum,
                nu: Complex64::from_polar(nu_sum, -s.phi()),
                g_bar: stats.mean,
            })
        }
        StateSpec::BarutGirardello(s) => {
            let x = s.xi_mag();
            if x == 0.0 {
                return Ok(zero);
            }
            let two_a = s.a().value() * 2.0;
            let ln_x = x.ln();
            let ln_i = specfun::bessel_i(s.a().twice() - 1, 2.0 * x)?.ln();
            let nu_sum = sum_log_series(1, |g| {
                let gf = g as f64;
                (2.0 * gf + two_a - 2.0) * ln_x
                    - ln_fact(g - 1)
                    - 0.5 * (ln_gamma(gf + two_a) + ln_gamma(gf + two_a - 1.0))
                    - ln_i
            })?;
            let b2_sum = sum_log_series(2, |g| {
                let gf = g as f64;
                (2.0 * gf + two_a - 3.0) * ln_x
                    - ln_fact(g - 2)
                    - 0.5 * (ln_gamma(gf + two_a) + ln_gamma(gf + two_a - 2.0))
                    - ln_i
            })?;
            let stats = closed_form_stats(spec)?;
            Ok(HomodyneSeries {
                mu: b2_sum - nu_sum * nu_sum,
                nu: Complex64::from_polar(nu_sum, s.xi_phase()),
                g_bar: stats.mean,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    IntensityDifference,
    SingleMode,
    HomodyneB,
    HomodyneC,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::IntensityDifference,
        Scheme::SingleMode,
        Scheme::HomodyneB,
        Scheme::HomodyneC,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::IntensityDifference => "dif",
            Self::SingleMode => "sing",
            Self::HomodyneB => "hom_b",
            Self::HomodyneC => "hom_c",
        }
    }

    /// Fisher-information scenario whose bound applies to this scheme.
    pub fn bound_scenario(&self) -> QfiScenario {
        match self {
            Self::IntensityDifference | Self::SingleMode => QfiScenario::TwoParameter,
            Self::HomodyneB => QfiScenario::Asymmetric,
            Self::HomodyneC => QfiScenario::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub scheme: Scheme,
    pub theta: f64,
    pub delta_theta: f64,
    /// Quantum Cramér-Rao bound of the matching phase-delay model.
    pub qcrb_ref: f64,
}

fn qcrb_reference(scheme: Scheme, stats: PhotonStatistics, bs: BeamSplitter) -> Result<f64, DetectionError> {
    let m = InputMoments::vacuum_port(crate::qfi::ModeMoments::number_only(stats));
    qfi_vacuum_port(&m, bs)?
        .qcrb(scheme.bound_scenario())
        .ok_or(DetectionError::DegenerateInput)
}

fn check_intensity_preconditions(bs: BeamSplitterPair, theta: f64) -> Result<f64, DetectionError> {
    let mix = bs.mixing_product();
    if mix == 0.0 {
        return Err(DetectionError::DerivativeVanishes("a beam splitter does not mix"));
    }
    if theta.sin().abs() < SIN_FLOOR {
        return Err(DetectionError::DerivativeVanishes("sin θ = 0"));
    }
    Ok(mix)
}

/// Bessel values `(|ξ|, I_{2a−1}, I_{2a}, I_{2a+1})` at `2|ξ|`.
fn bgcs_bessels(s: &crate::states::BarutGirardello) -> Result<(f64, f64, f64, f64), DetectionError> {
    let x = s.xi_mag();
    let order = s.a().twice() - 1;
    Ok((
        x,
        specfun::bessel_i(order, 2.0 * x)?,
        specfun::bessel_i(order + 1, 2.0 * x)?,
        specfun::bessel_i(order + 2, 2.0 * x)?,
    ))
}

/// Intensity-difference sensitivity; identical for asymmetric and
/// symmetric phase delays.
///
/// Perelomov:
/// `√(½δ_A² sinh²v + |δ_B|²(cosh v − 1)) / (4√a |αα′ββ′| |(cosh v − 1) sin θ|)`.
/// Barut-Girardello:
/// `√(δ_A²|ξ|[I_{2a−1}I_{2a+1} − I²_{2a}] + I_{2a−1}I_{2a}) / (4|αα′ββ′||sin θ|√|ξ| I_{2a})`.
pub fn sensitivity_dif(spec: &StateSpec, bs: BeamSplitterPair, theta: f64) -> Result<SensitivityPoint, DetectionError> {
    let mix = check_intensity_preconditions(bs, theta)?;
    let stats = closed_form_stats(spec)?;
    if !(stats.mean > 0.0) {
        return Err(DetectionError::DegenerateInput);
    }
    let DifCoefficients { delta_a, delta_b } = dif_coefficients(bs, theta);
    let sin = theta.sin().abs();
    let delta_theta = match spec {
        StateSpec::Perelomov(s) => {
            let (cm1, sh2) = (s.v().cosh() - 1.0, s.v().sinh().powi(2));
            (0.5 * delta_a * delta_a * sh2 + delta_b.norm_sqr() * cm1).sqrt()
                / (4.0 * s.a().value().sqrt() * mix * cm1 * sin)
        }
        StateSpec::BarutGirardello(s) => {
            let (x, i0, i1, i2) = bgcs_bessels(s)?;
            (delta_a * delta_a * x * (i0 * i2 - i1 * i1) + i0 * i1).sqrt() / (4.0 * mix * sin * x.sqrt() * i1)
        }
        StateSpec::Vacuum => unreachable!("zero mean rejected above"),
    };
    Ok(SensitivityPoint {
        scheme: Scheme::IntensityDifference,
        theta,
        delta_theta,
        qcrb_ref: qcrb_reference(Scheme::IntensityDifference, stats, bs.first)?,
    })
}

/// Single-mode intensity sensitivity.
///
/// Perelomov:
/// `√(½δ₁² sinh²v + |δ₃|²(cosh v − 1)) / (2√a |αα′ββ′| |sin θ (cosh v − 1)|)`.
/// Barut-Girardello:
/// `√(δ₁²|ξ|[I_{2a−1}I_{2a+1} − I²_{2a}] + (δ₁² + |δ₃|²)I_{2a−1}I_{2a}) / (2√|ξ| |αα′ββ′||sin θ| I_{2a})`.
pub fn sensitivity_sing(
    spec: &StateSpec,
    bs: BeamSplitterPair,
    theta: f64,
) -> Result<SensitivityPoint, DetectionError> {
    let mix = check_intensity_preconditions(bs, theta)?;
    let stats = closed_form_stats(spec)?;
    if !(stats.mean > 0.0) {
        return Err(DetectionError::DegenerateInput);
    }
    let SingCoefficients { delta1, delta3, .. } = sing_coefficients(bs, theta);
    let sin = theta.sin().abs();
    let delta_theta = match spec {
        StateSpec::Perelomov(s) => {
            let (cm1, sh2) = (s.v().cosh() - 1.0, s.v().sinh().powi(2));
            (0.5 * delta1 * delta1 * sh2 + delta3.norm_sqr() * cm1).sqrt()
                / (2.0 * s.a().value().sqrt() * mix * sin * cm1)
        }
        StateSpec::BarutGirardello(s) => {
            let (x, i0, i1, i2) = bgcs_bessels(s)?;
            (delta1 * delta1 * x * (i0 * i2 - i1 * i1) + (delta1 * delta1 + delta3.norm_sqr()) * i0 * i1).sqrt()
                / (2.0 * x.sqrt() * mix * sin * i1)
        }
        StateSpec::Vacuum => unreachable!("zero mean rejected above"),
    };
    Ok(SensitivityPoint {
        scheme: Scheme::SingleMode,
        theta,
        delta_theta,
        qcrb_ref: qcrb_reference(Scheme::SingleMode, stats, bs.first)?,
    })
}

/// Coefficient `A₁` of `b̂₁` in `b̂₄` and its θ-derivative.
fn port1_coefficient(bs: BeamSplitterPair, theta: f64, scenario: PhaseScenario) -> (Complex64, Complex64) {
    let (t, r) = (bs.first.t_mag(), bs.first.r_mag());
    let (tp, rp) = (bs.second.t_mag(), bs.second.r_mag());
    let i = Complex64::i();
    match scenario {
        PhaseScenario::Asymmetric => {
            let e = Complex64::from_polar(1.0, -theta);
            (i * (t * rp * e + r * tp), t * rp * e)
        }
        PhaseScenario::Symmetric => {
            let (em, ep) = (
                Complex64::from_polar(1.0, -0.5 * theta),
                Complex64::from_polar(1.0, 0.5 * theta),
            );
            (i * (t * rp * em + r * tp * ep), 0.5 * (t * rp * em - r * tp * ep))
        }
    }
}

/// Balanced-homodyne sensitivity at port 4.
///
/// With `b̂₄ = A₀ b̂₀ + A₁ b̂₁` and vacuum at port 0,
/// `⟨X̂⟩ = ℜ{e^{−iθ_L} A₁⟨b̂₁⟩}` and
/// `Δ²X̂ = ¼ + ½ℜ{e^{−2iθ_L} A₁² Δ²b̂₁} + ½|A₁|²(⟨ĝ₁⟩ − |⟨b̂₁⟩|²)`.
/// `theta_l` defaults to `arg⟨b̂₁⟩`, the local-oscillator phase aligned with
/// the mean field.
pub fn sensitivity_hom(
    spec: &StateSpec,
    bs: BeamSplitterPair,
    theta: f64,
    scenario: PhaseScenario,
    theta_l: Option<f64>,
) -> Result<SensitivityPoint, DetectionError> {
    let scheme = match scenario {
        PhaseScenario::Asymmetric => Scheme::HomodyneB,
        PhaseScenario::Symmetric => Scheme::HomodyneC,
    };
    if scenario == PhaseScenario::Symmetric && theta_l.is_none() {
        let gap = bs.second.t_mag() * bs.first.r_mag() - bs.first.t_mag() * bs.second.r_mag();
        if gap.abs() < HOMODYNE_DERIVATIVE_FLOOR {
            return Err(DetectionError::ConfigurationDegenerate);
        }
    }
    let series = homodyne_series(spec)?;
    if !(series.g_bar > 0.0) {
        return Err(DetectionError::DegenerateInput);
    }
    let theta_l = theta_l.unwrap_or_else(|| series.nu.arg());
    let lo = Complex64::from_polar(1.0, -theta_l);
    let (a1, da1) = port1_coefficient(bs, theta, scenario);
    let derivative = (lo * da1 * series.nu).re;
    if derivative.abs() < HOMODYNE_DERIVATIVE_FLOOR {
        return Err(DetectionError::DerivativeVanishes("homodyne mean is stationary"));
    }
    let variance = 0.25
        + 0.5 * (lo * lo * a1 * a1 * series.field_variance()).re
        + 0.5 * a1.norm_sqr() * (series.g_bar - series.nu.norm_sqr());
    let stats = PhotonStatistics {
        mean: series.g_bar,
        variance: closed_form_stats(spec)?.variance,
    };
    Ok(SensitivityPoint {
        scheme,
        theta,
        delta_theta: variance.max(0.0).sqrt() / derivative.abs(),
        qcrb_ref: qcrb_reference(scheme, stats, bs.first)?,
    })
}

/// Dispatches on `scheme` with the default local-oscillator phase.
pub fn sensitivity(
    scheme: Scheme,
    spec: &StateSpec,
    bs: BeamSplitterPair,
    theta: f64,
) -> Result<SensitivityPoint, DetectionError> {
    match scheme {
        Scheme::IntensityDifference => sensitivity_dif(spec, bs, theta),
        Scheme::SingleMode => sensitivity_sing(spec, bs, theta),
        Scheme::HomodyneB => sensitivity_hom(spec, bs, theta, PhaseScenario::Asymmetric, None),
        Scheme::HomodyneC => sensitivity_hom(spec, bs, theta, PhaseScenario::Symmetric, None),
    }
}

/// `R = Δθ(spec_p) / Δθ(spec_b)` under the same scheme and configuration.
pub fn performance_ratio(
    spec_p: &StateSpec,
    spec_b: &StateSpec,
    scheme: Scheme,
    bs: BeamSplitterPair,
    theta: f64,
) -> Result<f64, DetectionError> {
    Ok(sensitivity(scheme, spec_p, bs, theta)?.delta_theta / sensitivity(scheme, spec_b, bs, theta)?.delta_theta)
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
