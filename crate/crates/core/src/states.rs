//! SU(1,1) coherent states in the Holstein-Primakoff (single-mode Fock)
//! realization: Perelomov states, Barut-Girardello states and the vacuum.
//!
//! Both families are built as truncated Fock amplitude vectors. The cutoff
//! is chosen from an analytic bound on the neglected probability, so every
//! amplitude vector carries a certified `tail_mass`.

use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::{self, ln_factorial, SpecFunError};

/// Neglected probability allowed above an automatically chosen cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Largest cutoff the doubling search will try.
pub const MAX_CUTOFF: usize = 4096;
/// Hyperbolic angles beyond this keep `sinh`/`cosh` far from overflow
/// (mean photon number ~1e8).
pub const MAX_SQUEEZE_V: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("Bargmann index must be a positive half-integer, got {0}")]
    InvalidBargmann(f64),
    #[error("invalid state parameter: {0}")]
    InvalidParameter(String),
    #[error("cutoff {cutoff} leaves tail mass {tail_mass:e} above tolerance {TAIL_TOLERANCE:e}")]
    TailTooLarge { cutoff: usize, tail_mass: f64 },
    #[error("no cutoff up to {MAX_CUTOFF} brings the tail below {TAIL_TOLERANCE:e}")]
    CutoffExhausted,
    #[error("cutoff must be at least 1")]
    ZeroCutoff,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Bargmann index `a ∈ {1/2, 1, 3/2, ...}`, stored as the integer `2a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BargmannIndex(u32);

impl BargmannIndex {
    pub fn new(a: f64) -> Result<Self, StateError> {
        let twice = 2.0 * a;
        let rounded = twice.round();
        if !a.is_finite() || rounded < 1.0 || (twice - rounded).abs() > 1e-12 {
            return Err(StateError::InvalidBargmann(a));
        }
        Ok(Self(rounded as u32))
    }

    pub fn from_twice(twice_a: u32) -> Result<Self, StateError> {
        if twice_a == 0 {
            return Err(StateError::InvalidBargmann(0.0));
        }
        Ok(Self(twice_a))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `2a`, which is also the order offset of the Bessel functions.
    pub fn twice(self) -> u32 {
        self.0
    }

    /// `4 ⟨a,g| Ĉ |a,g⟩` for the Casimir `Ĉ = Â_z² − (Â₊Â₋ + Â₋Â₊)/2`,
    /// in exact integer arithmetic (every term is a multiple of 1/4).
    pub fn casimir_times_four(self, g: u64) -> i64 {
        let two_a = self.0 as i64;
        let g = g as i64;
        // 4(a+g)^2 = (2a + 2g)^2
        let az_sq = (two_a + 2 * g).pow(2);
        // 4 * [(g+1)(2a+g) + g(2a+g-1)] / 2
        let raise_lower = 2 * ((g + 1) * (two_a + g) + g * (two_a + g - 1));
        az_sq - raise_lower
    }
}

/// Perelomov coherent state parameters: `ξ = e^{−iφ} tanh(v/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perelomov {
    a: BargmannIndex,
    v: f64,
    phi: f64,
}

impl Perelomov {
    pub fn new(a: BargmannIndex, v: f64, phi: f64) -> Result<Self, StateError> {
        if !(v >= 0.0 && v <= MAX_SQUEEZE_V) {
            return Err(StateError::InvalidParameter(format!(
                "hyperbolic angle v must lie in [0, {MAX_SQUEEZE_V}], got {v}"
            )));
        }
        if !phi.is_finite() {
            return Err(StateError::InvalidParameter(format!(
                "phase φ must be finite, got {phi}"
            )));
        }
        Ok(Self { a, v, phi })
    }

    pub fn a(&self) -> BargmannIndex {
        self.a
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar((0.5 * self.v).tanh(), -self.phi)
    }
}

/// Barut-Girardello coherent state parameters: eigenvalue `ξ = |ξ| e^{iψ}`
/// of the lowering operator `Â₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarutGirardello {
    a: BargmannIndex,
    xi_mag: f64,
    xi_phase: f64,
}

impl BarutGirardello {
    pub fn new(a: BargmannIndex, xi_mag: f64, xi_phase: f64) -> Result<Self, StateError> {
        if !(xi_mag >= 0.0 && xi_mag.is_finite()) {
            return Err(StateError::InvalidParameter(format!(
                "|ξ| must be finite and nonnegative, got {xi_mag}"
            )));
        }
        if !xi_phase.is_finite() {
            return Err(StateError::InvalidParameter(format!(
                "arg ξ must be finite, got {xi_phase}"
            )));
        }
        Ok(Self { a, xi_mag, xi_phase })
    }

    pub fn a(&self) -> BargmannIndex {
        self.a
    }

    pub fn xi_mag(&self) -> f64 {
        self.xi_mag
    }

    pub fn xi_phase(&self) -> f64 {
        self.xi_phase
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.xi_mag, self.xi_phase)
    }
}

/// Declarative description of a single-mode input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Perelomov(Perelomov),
    BarutGirardello(BarutGirardello),
    Vacuum,
}

impl StateSpec {
    pub fn perelomov(a: f64, v: f64, phi: f64) -> Result<Self, StateError> {
        Ok(Self::Perelomov(Perelomov::new(BargmannIndex::new(a)?, v, phi)?))
    }

    pub fn barut_girardello(a: f64, xi_mag: f64, xi_phase: f64) -> Result<Self, StateError> {
        Ok(Self::BarutGirardello(BarutGirardello::new(
            BargmannIndex::new(a)?,
            xi_mag,
            xi_phase,
        )?))
    }

    /// Barut-Girardello state with `|ξ| = tanh(v/2)`, the identification used
    /// when BGCS curves are drawn against the same `v` as Perelomov curves.
    pub fn barut_girardello_from_v(a: f64, v: f64, xi_phase: f64) -> Result<Self, StateError> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(StateError::InvalidParameter(format!(
                "v must be finite and nonnegative, got {v}"
            )));
        }
        Self::barut_girardello(a, (0.5 * v).tanh(), xi_phase)
    }

    /// Whether the state is the Fock vacuum, whatever its parametrization.
    pub fn is_vacuum(&self) -> bool {
        match self {
            Self::Vacuum => true,
            Self::Perelomov(p) => p.v == 0.0,
            Self::BarutGirardello(b) => b.xi_mag == 0.0,
        }
    }

    /// `ln p_g`, the log photon-number probability.
    fn ln_probability(&self, g: usize) -> Result<f64, StateError> {
        Ok(match self {
            Self::Vacuum => {
                if g == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::Perelomov(p) => {
                if p.v == 0.0 {
                    return Self::Vacuum.ln_probability(g);
                }
                2.0 * pcs_ln_amplitude(p.a, p.v, g)
            }
            Self::BarutGirardello(b) => {
                if b.xi_mag == 0.0 {
                    return Self::Vacuum.ln_probability(g);
                }
                2.0 * bgcs_ln_amplitude(b.a, b.xi_mag, bgcs_ln_norm(b.a, b.xi_mag)?, g)
            }
        })
    }

    /// Ratio `p_{g+1} / p_g`; nonincreasing in `g` for both families.
    fn probability_ratio(&self, g: usize) -> f64 {
        let g = g as f64;
        match self {
            Self::Vacuum => 0.0,
            Self::Perelomov(p) => {
                let t = (0.5 * p.v).tanh();
                t * t * (g + p.a.twice() as f64) / (g + 1.0)
            }
            Self::BarutGirardello(b) => b.xi_mag * b.xi_mag / ((g + 1.0) * (g + b.a.twice() as f64)),
        }
    }

    /// Upper bound on `Σ_{g > cutoff} p_g`.
    ///
    /// With ratios nonincreasing from `g = cutoff + 1` on, the tail is
    /// dominated by the geometric series `p_{K+1} / (1 − r_{K+1})`.
    pub fn tail_bound(&self, cutoff: usize) -> Result<f64, StateError> {
        if self.is_vacuum() {
            return Ok(0.0);
        }
        let r = self.probability_ratio(cutoff + 1);
        if r >= 1.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.ln_probability(cutoff + 1)?.exp() / (1.0 - r))
    }

    /// Smallest cutoff whose tail bound is below [`TAIL_TOLERANCE`].
    pub fn auto_cutoff(&self) -> Result<usize, StateError> {
        if self.is_vacuum() {
            return Ok(1);
        }
        let mut hi = 8;
        while self.tail_bound(hi)? >= TAIL_TOLERANCE {
            if hi >= MAX_CUTOFF {
                return Err(StateError::CutoffExhausted);
            }
            hi = (2 * hi).min(MAX_CUTOFF);
        }
        let mut lo = 0;
        // invariant: bound(hi) < tol; bound(lo) >= tol or lo == 0
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.tail_bound(mid)? < TAIL_TOLERANCE {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi.max(1))
    }

    /// Fock amplitudes at the given cutoff, or at the automatic one.
    pub fn amplitudes(&self, cutoff: Option<usize>) -> Result<FockAmplitudes, StateError> {
        match self {
            Self::Vacuum => vacuum_amplitudes(cutoff.unwrap_or(1)),
            Self::Perelomov(p) => pcs_amplitudes(p, cutoff.map_or_else(|| self.auto_cutoff(), Ok)?),
            Self::BarutGirardello(b) => bgcs_amplitudes(b, cutoff.map_or_else(|| self.auto_cutoff(), Ok)?),
        }
    }

    pub fn bargmann(&self) -> Option<BargmannIndex> {
        match self {
            Self::Perelomov(p) => Some(p.a),
            Self::BarutGirardello(b) => Some(b.a),
            Self::Vacuum => None,
        }
    }
}

/// Truncated single-mode Fock expansion `Σ_{g ≤ cutoff} amps[g] |g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockAmplitudes {
    amps: Vec<Complex64>,
    tail_mass: f64,
}

impl FockAmplitudes {
    /// Wraps raw amplitudes; `tail_mass` is the caller's bound on the
    /// probability that lies above the last index.
    pub fn from_raw(amps: Vec<Complex64>, tail_mass: f64) -> Result<Self, StateError> {
        if amps.len() < 2 {
            return Err(StateError::ZeroCutoff);
        }
        Ok(Self { amps, tail_mass })
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amps.iter().map(Complex64::norm_sqr)
    }

    /// Photon-number mean and variance summed over the truncated support.
    pub fn statistics(&self) -> PhotonStatistics {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (g, p) in self.probabilities().enumerate() {
            let g = g as f64;
            m1 += g * p;
            m2 += g * g * p;
        }
        PhotonStatistics {
            mean: m1,
            variance: (m2 - m1 * m1).max(0.0),
        }
    }

    /// `⟨b̂⟩` in the truncated space.
    pub fn mean_annihilation(&self) -> Complex64 {
        (1..self.amps.len())
            .map(|g| self.amps[g - 1].conj() * self.amps[g] * (g as f64).sqrt())
            .sum()
    }

    /// `⟨b̂²⟩` in the truncated space.
    pub fn mean_annihilation_sq(&self) -> Complex64 {
        (2..self.amps.len())
            .map(|g| self.amps[g - 2].conj() * self.amps[g] * ((g * (g - 1)) as f64).sqrt())
            .sum()
    }

    /// `⟨b̂† ĝ⟩ = Σ_g conj(c_{g+1}) c_g √(g+1) g`.
    pub fn mean_creation_number(&self) -> Complex64 {
        (0..self.amps.len() - 1)
            .map(|g| self.amps[g + 1].conj() * self.amps[g] * ((g + 1) as f64).sqrt() * g as f64)
            .sum()
    }
}

/// Photon-number mean `⟨ĝ⟩` and variance `Δ²ĝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStatistics {
    pub mean: f64,
    pub variance: f64,
}

fn vacuum_amplitudes(cutoff: usize) -> Result<FockAmplitudes, StateError> {
    if cutoff == 0 {
        return Err(StateError::ZeroCutoff);
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(FockAmplitudes { amps, tail_mass: 0.0 })
}

/// `ln |c_g|` for the Perelomov state, with `(1 − tanh²(v/2))^a = cosh^{−2a}(v/2)`.
fn pcs_ln_amplitude(a: BargmannIndex, v: f64, g: usize) -> f64 {
    let two_a = a.twice() as f64;
    let half = 0.5 * v;
    let ln_gamma_ratio = specfun_ln_gamma(g as f64 + two_a) - ln_factorial(g) - specfun_ln_gamma(two_a);
    -two_a * half.cosh().ln() + 0.5 * ln_gamma_ratio + g as f64 * half.tanh().ln()
}

/// `ln` of the Barut-Girardello normalization `|ξ|^{2a−1} / I_{2a−1}(2|ξ|)`.
fn bgcs_ln_norm(a: BargmannIndex, xi_mag: f64) -> Result<f64, StateError> {
    let order = a.twice() - 1;
    let bessel = specfun::bessel_i(order, 2.0 * xi_mag)?;
    Ok(order as f64 * xi_mag.ln() - bessel.ln())
}

fn bgcs_ln_amplitude(a: BargmannIndex, xi_mag: f64, ln_norm: f64, g: usize) -> f64 {
    let two_a = a.twice() as f64;
    0.5 * ln_norm + g as f64 * xi_mag.ln() - 0.5 * (ln_factorial(g) + specfun_ln_gamma(g as f64 + two_a))
}

fn specfun_ln_gamma(x: f64) -> f64 {
    // arguments here are always >= 1
    specfun::log_gamma(x).expect("positive gamma argument")
}

fn check_tail(spec: &StateSpec, cutoff: usize) -> Result<f64, StateError> {
    if cutoff == 0 {
        return Err(StateError::ZeroCutoff);
    }
    let tail_mass = spec.tail_bound(cutoff)?;
    if tail_mass > TAIL_TOLERANCE {
        return Err(StateError::TailTooLarge { cutoff, tail_mass });
    }
    Ok(tail_mass)
}

/// Perelomov amplitudes
/// `c_g = (1 − |ξ|²)^a √(Γ(g+2a) / (g! Γ(2a))) ξ^g`.
pub fn pcs_amplitudes(state: &Perelomov, cutoff: usize) -> Result<FockAmplitudes, StateError> {
    let spec = StateSpec::Perelomov(*state);
    let tail_mass = check_tail(&spec, cutoff)?;
    if state.v == 0.0 {
        return vacuum_amplitudes(cutoff);
    }
    let amps = (0..=cutoff)
        .map(|g| Complex64::from_polar(pcs_ln_amplitude(state.a, state.v, g).exp(), -(g as f64) * state.phi))
        .collect();
    Ok(FockAmplitudes { amps, tail_mass })
}

/// Barut-Girardello amplitudes
/// `c_g = √(|ξ|^{2a−1} / I_{2a−1}(2|ξ|)) ξ^g / √(g! Γ(g+2a))`.
///
/// `ξ = 0` is the exact vacuum.
pub fn bgcs_amplitudes(state: &BarutGirardello, cutoff: usize) -> Result<FockAmplitudes, StateError> {
    let spec = StateSpec::BarutGirardello(*state);
    let tail_mass = check_tail(&spec, cutoff)?;
    if state.xi_mag == 0.0 {
        return vacuum_amplitudes(cutoff);
    }
    let ln_norm = bgcs_ln_norm(state.a, state.xi_mag)?;
    let amps = (0..=cutoff)
        .map(|g| {
            Complex64::from_polar(
                bgcs_ln_amplitude(state.a, state.xi_mag, ln_norm, g).exp(),
                g as f64 * state.xi_phase,
            )
        })
        .collect();
    Ok(FockAmplitudes { amps, tail_mass })
}

/// Applies `Â₋ |a,g⟩ = √(g(2a+g−1)) |a,g−1⟩`.
///
/// The image of a vector truncated at `cutoff` is fully determined only on
/// `g ≤ cutoff − 1`, so the returned (unnormalized) vector has `cutoff`
/// entries: `out[g] = √((g+1)(2a+g)) state[g+1]`.
pub fn lowering_apply(state: &FockAmplitudes, a: BargmannIndex) -> Vec<Complex64> {
    let two_a = a.twice() as f64;
    (0..state.cutoff())
        .map(|g| state.amps[g + 1] * ((g as f64 + 1.0) * (two_a + g as f64)).sqrt())
        .collect()
}

/// Exact photon statistics:
/// PCS `⟨ĝ⟩ = a(cosh v − 1)`, `Δ²ĝ = (a/2) sinh² v`;
/// BGCS `⟨ĝ⟩ = |ξ| I_{2a}/I_{2a−1}`, `Δ²ĝ = |ξ| X / I²_{2a−1}` with
/// `X = I_{2a−1}(|ξ| I_{2a+1} + I_{2a}) − |ξ| I²_{2a}` (all at `2|ξ|`).
pub fn closed_form_stats(spec: &StateSpec) -> Result<PhotonStatistics, StateError> {
    if spec.is_vacuum() {
        return Ok(PhotonStatistics {
            mean: 0.0,
            variance: 0.0,
        });
    }
    Ok(match spec {
        StateSpec::Perelomov(p) => {
            let a = p.a.value();
            PhotonStatistics {
                mean: a * (p.v.cosh() - 1.0),
                variance: 0.5 * a * p.v.sinh().powi(2),
            }
        }
        StateSpec::BarutGirardello(b) => {
            let x = b.xi_mag;
            let order = b.a.twice() - 1;
            // X / I²_{2a−1} rewritten with the stable ratios r1 = I_{2a}/I_{2a−1}, r2 = I_{2a+1}/I_{2a}
            let r1 = specfun::bessel_ratio(order, 2.0 * x)?;
            let r2 = specfun::bessel_ratio(order + 1, 2.0 * x)?;
            PhotonStatistics {
                mean: x * r1,
                variance: x * (x * r1 * r2 + r1 - x * r1 * r1),
            }
        }
        StateSpec::Vacuum => unreachable!("handled above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PCS_MEAN_1_1: f64 = 0.543_080_634_815_243_8;
    const PCS_VAR_1_1: f64 = 0.690_548_922_770_907_9;
    const BGCS_MEAN_1_1: f64 = 0.433_127_426_722_311_76;
    const BGCS_VAR_1_1: f64 = 0.379_273_205_498_596_7;

    #[test]
    fn bargmann_validation() {
        assert_eq!(BargmannIndex::new(0.5).unwrap().twice(), 1);
        assert_eq!(BargmannIndex::new(1.5).unwrap().twice(), 3);
        assert!(BargmannIndex::new(0.0).is_err());
        assert!(BargmannIndex::new(0.7).is_err());
        assert!(BargmannIndex::new(-1.0).is_err());
    }

    #[test]
    fn casimir_is_a_times_a_minus_one_on_basis() {
        for twice_a in 1..=8 {
            let a = BargmannIndex::from_twice(twice_a).unwrap();
            let expected = twice_a as i64 * (twice_a as i64 - 2);
            for g in 0..=50 {
                assert_eq!(a.casimir_times_four(g), expected, "2a={twice_a} g={g}");
            }
        }
    }

    #[test]
    fn pcs_zero_squeeze_is_vacuum() {
        let p = Perelomov::new(BargmannIndex::new(1.0).unwrap(), 0.0, 1.3).unwrap();
        let s = pcs_amplitudes(&p, 10).unwrap();
        assert_eq!(s.amps()[0], Complex64::new(1.0, 0.0));
        assert!(s.amps()[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn pcs_normalization_and_mean() {
        let p = Perelomov::new(BargmannIndex::new(1.0).unwrap(), 1.0, 0.0).unwrap();
        let s = pcs_amplitudes(&p, 60).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert_relative_eq!(s.statistics().mean, PCS_MEAN_1_1, max_relative = 1e-10);
    }

    #[test]
    fn bgcs_zero_xi_is_vacuum() {
        let b = BarutGirardello::new(BargmannIndex::new(1.0).unwrap(), 0.0, 0.0).unwrap();
        let s = bgcs_amplitudes(&b, 10).unwrap();
        assert_eq!(s.amps()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn bgcs_normalization_and_mean() {
        let b = BarutGirardello::new(BargmannIndex::new(1.0).unwrap(), 1.0, 0.0).unwrap();
        let s = bgcs_amplitudes(&b, 60).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert_relative_eq!(s.statistics().mean, BGCS_MEAN_1_1, max_relative = 1e-10);
    }

    #[test]
    fn explicit_cutoff_too_small_is_rejected() {
        let spec = StateSpec::perelomov(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(spec.amplitudes(Some(5)), Err(StateError::TailTooLarge { .. })));
        assert!(matches!(spec.amplitudes(Some(0)), Err(StateError::ZeroCutoff)));
    }

    #[test]
    fn squeeze_cap_and_cutoff_exhaustion() {
        assert!(StateSpec::perelomov(1.0, 20.5, 0.0).is_err());
        let wide = StateSpec::perelomov(1.0, 15.0, 0.0).unwrap();
        assert_eq!(wide.auto_cutoff(), Err(StateError::CutoffExhausted));
    }

    #[test]
    fn auto_cutoff_is_minimal() {
        for spec in [
            StateSpec::perelomov(1.0, 1.0, 0.0).unwrap(),
            StateSpec::perelomov(2.0, 2.0, 0.3).unwrap(),
            StateSpec::barut_girardello(1.5, 2.0, 0.0).unwrap(),
        ] {
            let k = spec.auto_cutoff().unwrap();
            assert!(spec.tail_bound(k).unwrap() < TAIL_TOLERANCE);
            assert!(spec.tail_bound(k - 1).unwrap() >= TAIL_TOLERANCE);
        }
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let spec = StateSpec::perelomov(1.5, 1.5, 0.0).unwrap();
        let big = spec.amplitudes(Some(400)).unwrap();
        let probs: Vec<f64> = big.probabilities().collect();
        for k in [5, 10, 20, 40] {
            let tail: f64 = probs[k + 1..].iter().sum();
            assert!(spec.tail_bound(k).unwrap() >= tail);
        }
    }

    #[test]
    fn lowering_of_vacuum_and_single_excitation() {
        let a = BargmannIndex::new(1.0).unwrap();
        let vac = StateSpec::Vacuum.amplitudes(Some(4)).unwrap();
        assert!(lowering_apply(&vac, a).iter().all(|c| c.norm() == 0.0));

        let mut amps = vec![Complex64::new(0.0, 0.0); 5];
        amps[1] = Complex64::new(1.0, 0.0);
        let one = FockAmplitudes::from_raw(amps, 0.0).unwrap();
        let out = lowering_apply(&one, a);
        assert_relative_eq!(out[0].re, 2f64.sqrt(), max_relative = 1e-15);
        assert!(out[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn bgcs_is_lowering_eigenstate() {
        let spec = BarutGirardello::new(BargmannIndex::new(1.0).unwrap(), 1.0, 0.7).unwrap();
        let s = StateSpec::BarutGirardello(spec).amplitudes(None).unwrap();
        let out = lowering_apply(&s, spec.a());
        let residual: f64 = out
            .iter()
            .zip(s.amps())
            .map(|(l, c)| (l - spec.xi() * c).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual <= 1e-8, "residual {residual}");
    }

    #[test]
    fn closed_form_reference_values() {
        let vac = closed_form_stats(&StateSpec::Vacuum).unwrap();
        assert_eq!((vac.mean, vac.variance), (0.0, 0.0));

        let pcs = closed_form_stats(&StateSpec::perelomov(1.0, 1.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(pcs.mean, PCS_MEAN_1_1, max_relative = 1e-14);
        assert_relative_eq!(pcs.variance, PCS_VAR_1_1, max_relative = 1e-14);

        let bgcs = closed_form_stats(&StateSpec::barut_girardello(1.0, 1.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(bgcs.mean, BGCS_MEAN_1_1, max_relative = 1e-13);
        assert_relative_eq!(bgcs.variance, BGCS_VAR_1_1, max_relative = 1e-13);
    }

    #[test]
    fn closed_form_matches_fock_moments_at_cutoff_80() {
        for spec in [
            StateSpec::perelomov(1.0, 1.0, 0.0).unwrap(),
            StateSpec::barut_girardello(1.0, 1.0, 0.0).unwrap(),
        ] {
            let exact = closed_form_stats(&spec).unwrap();
            let summed = spec.amplitudes(Some(80)).unwrap().statistics();
            assert_relative_eq!(summed.mean, exact.mean, max_relative = 1e-9);
            assert_relative_eq!(summed.variance, exact.variance, max_relative = 1e-9);
        }
    }

    #[test]
    fn tanh_half_v_parametrization() {
        let spec = StateSpec::barut_girardello_from_v(1.0, 1.0, 0.0).unwrap();
        let StateSpec::BarutGirardello(b) = spec else {
            unreachable!()
        };
        assert_relative_eq!(b.xi_mag(), 0.462_117_157_260_009_76, max_relative = 1e-15);
    }
}
