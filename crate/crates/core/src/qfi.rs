//! Quantum Fisher information for the three phase-delay models.
//!
//! * (a) two independent arm phases, estimated through the 2×2 Fisher
//!   matrix over `θ_s = θ₁ + θ₂`, `θ_d = θ₁ − θ₂`:
//!   `H^(a) = H_dd − H_sd² / H_ss`.
//! * (b) a single phase in the upper arm: `H^(b) = 4Δ²ĝ₃ = H_dd + H_ss − 2H_sd`.
//! * (c) symmetric arm phases `±θ/2`: `H^(c) = Δ²ĝ₂ + Δ²ĝ₃ = (H_ss + H_dd)/2`.
//!
//! All values are per shot.

use num_complex::Complex64;
use thiserror::Error;

use crate::mzi::BeamSplitter;
use crate::specfun::{self, SpecFunError};
use crate::states::{closed_form_stats, FockAmplitudes, PhotonStatistics, StateError, StateSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QfiError {
    #[error("input port 0 is not in the vacuum state")]
    NotVacuumPort,
    #[error("degenerate input: mean photon number of port 1 is zero")]
    DegenerateInput,
    #[error("mean photon number must be positive, got {0}")]
    NonPositiveMean(f64),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Which phase-delay model a Fisher information refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QfiScenario {
    TwoParameter,
    Asymmetric,
    Symmetric,
}

/// Fisher matrix elements over `(θ_s, θ_d)` and the three derived scalar
/// Fisher informations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfimResult {
    pub h_ss: f64,
    pub h_dd: f64,
    pub h_sd: f64,
    /// Absent when `h_ss = 0`, where the Schur complement is undefined.
    pub h_a: Option<f64>,
    pub h_b: f64,
    pub h_c: f64,
}

impl QfimResult {
    /// Derives `h_a`, `h_b`, `h_c` from the matrix elements.
    pub fn from_elements(h_ss: f64, h_dd: f64, h_sd: f64) -> Self {
        let h_a = (h_ss > 0.0).then(|| h_dd - h_sd * h_sd / h_ss);
        Self {
            h_ss,
            h_dd,
            h_sd,
            h_a,
            h_b: h_dd + h_ss - 2.0 * h_sd,
            h_c: 0.5 * (h_ss + h_dd),
        }
    }

    pub fn get(&self, scenario: QfiScenario) -> Option<f64> {
        match scenario {
            QfiScenario::TwoParameter => self.h_a,
            QfiScenario::Asymmetric => Some(self.h_b),
            QfiScenario::Symmetric => Some(self.h_c),
        }
    }

    pub fn qcrb(&self, scenario: QfiScenario) -> Option<f64> {
        self.get(scenario).and_then(qcrb)
    }

    pub fn qcrb_a(&self) -> Option<f64> {
        self.qcrb(QfiScenario::TwoParameter)
    }

    pub fn qcrb_b(&self) -> Option<f64> {
        self.qcrb(QfiScenario::Asymmetric)
    }

    pub fn qcrb_c(&self) -> Option<f64> {
        self.qcrb(QfiScenario::Symmetric)
    }
}

/// `1/√h`, or `None` when the information vanishes.
pub fn qcrb(h: f64) -> Option<f64> {
    (h > 0.0).then(|| 1.0 / h.sqrt())
}

/// Single-mode moments entering the Fisher matrix of a product input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMoments {
    pub mean_g: f64,
    pub var_g: f64,
    /// `⟨b̂⟩`
    pub mean_b: Complex64,
    /// `⟨b̂²⟩`
    pub mean_b_sq: Complex64,
    /// `⟨b̂† ĝ⟩`
    pub mean_bdag_g: Complex64,
}

impl ModeMoments {
    pub fn vacuum() -> Self {
        Self::number_only(PhotonStatistics {
            mean: 0.0,
            variance: 0.0,
        })
    }

    /// Moments of a phase-averaged state: only the number statistics survive.
    pub fn number_only(stats: PhotonStatistics) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            mean_g: stats.mean,
            var_g: stats.variance,
            mean_b: zero,
            mean_b_sq: zero,
            mean_bdag_g: zero,
        }
    }

    pub fn from_amplitudes(state: &FockAmplitudes) -> Self {
        let stats = state.statistics();
        Self {
            mean_g: stats.mean,
            var_g: stats.variance,
            mean_b: state.mean_annihilation(),
            mean_b_sq: state.mean_annihilation_sq(),
            mean_bdag_g: state.mean_creation_number(),
        }
    }

    fn is_vacuum(&self) -> bool {
        const EPS: f64 = 1e-14;
        self.mean_g.abs() <= EPS
            && self.var_g.abs() <= EPS
            && self.mean_b.norm() <= EPS
            && self.mean_b_sq.norm() <= EPS
            && self.mean_bdag_g.norm() <= EPS
    }

    /// `½⟨{ĝ, b̂†}⟩ − ⟨ĝ⟩⟨b̂†⟩ = ⟨b̂†ĝ⟩ + ½⟨b̂†⟩ − ⟨ĝ⟩⟨b̂†⟩`
    fn number_creation_cov(&self) -> Complex64 {
        let bdag = self.mean_b.conj();
        self.mean_bdag_g + 0.5 * bdag - self.mean_g * bdag
    }
}

/// Moments of the product input `|ψ₀⟩ ⊗ |ψ₁⟩` at ports 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputMoments {
    pub port0: ModeMoments,
    pub port1: ModeMoments,
}

impl InputMoments {
    pub fn vacuum_port(port1: ModeMoments) -> Self {
        Self {
            port0: ModeMoments::vacuum(),
            port1,
        }
    }

    /// Vacuum at port 0 and the closed-form statistics of `spec` at port 1.
    pub fn from_spec(spec: &StateSpec) -> Result<Self, QfiError> {
        Ok(Self::vacuum_port(ModeMoments::number_only(closed_form_stats(spec)?)))
    }

    pub fn port0_is_vacuum(&self) -> bool {
        self.port0.is_vacuum()
    }
}

/// Fisher matrix for an arbitrary product input.
///
/// With `Ĵ = i(b̂₀†b̂₁ − b̂₁†b̂₀)` and `c = 2|α|² − 1`, the arm photon
/// numbers after BS1 satisfy `ĝ₂ + ĝ₃ = ĝ₀ + ĝ₁` and
/// `ĝ₂ − ĝ₃ = c(ĝ₀ − ĝ₁) + 2|αβ| Ĵ`, so the elements are symmetrized
/// covariances of `ĝ₀`, `ĝ₁` and `Ĵ` over the product state.
pub fn qfim_general(m: &InputMoments, bs: BeamSplitter) -> QfimResult {
    let (p0, p1) = (&m.port0, &m.port1);
    let c = 2.0 * bs.t_mag().powi(2) - 1.0;
    let tr = bs.t_mag() * bs.r_mag();

    let b0dag = p0.mean_b.conj();
    let b0dag_sq = p0.mean_b_sq.conj();
    let var_j = p0.mean_g + p1.mean_g + 2.0 * (p0.mean_g * p1.mean_g - p0.mean_b.norm_sqr() * p1.mean_b.norm_sqr())
        - 2.0 * (b0dag_sq * p1.mean_b_sq - b0dag * b0dag * p1.mean_b * p1.mean_b).re;

    let cov_g0_j = -2.0 * (p0.number_creation_cov() * p1.mean_b).im;
    let cov_g1_j = -2.0 * (b0dag * p1.number_creation_cov().conj()).im;

    let h_ss = p0.var_g + p1.var_g;
    let h_dd = c * c * h_ss + 4.0 * tr * tr * var_j + 4.0 * c * tr * (cov_g0_j - cov_g1_j);
    let h_sd = c * (p0.var_g - p1.var_g) + 2.0 * tr * (cov_g0_j + cov_g1_j);
    QfimResult::from_elements(h_ss, h_dd, h_sd)
}

/// Fisher informations for a vacuum at port 0:
/// `H^(a) = 4|αβ|²⟨ĝ₁⟩`, `H^(b) = 4|α|⁴Δ²ĝ₁ + 4|αβ|²⟨ĝ₁⟩`,
/// `H^(c) = (|α|⁴ + |β|⁴)Δ²ĝ₁ + 2|αβ|²⟨ĝ₁⟩`.
pub fn qfi_vacuum_port(m: &InputMoments, bs: BeamSplitter) -> Result<QfimResult, QfiError> {
    if !m.port0_is_vacuum() {
        return Err(QfiError::NotVacuumPort);
    }
    let (n, var) = (m.port1.mean_g, m.port1.var_g);
    let q = bs.t_mag().powi(2);
    let p = 1.0 - q;
    let c = 2.0 * q - 1.0;
    let h_ss = var;
    Ok(QfimResult {
        h_ss,
        h_dd: c * c * var + 4.0 * q * p * n,
        h_sd: -c * var,
        h_a: (h_ss > 0.0).then(|| 4.0 * q * p * n),
        h_b: 4.0 * q * q * var + 4.0 * q * p * n,
        h_c: (q * q + p * p) * var + 2.0 * q * p * n,
    })
}

/// State-specific closed forms for a vacuum at port 0.
///
/// Perelomov:
/// `H^(a) = 4a|αβ|²(cosh v − 1)`,
/// `H^(b) = 4a|α|²(½|α|² sinh² v + |β|²(cosh v − 1))`,
/// `H^(c) = (a/2)(|α|⁴ + |β|⁴) sinh² v + 2a|αβ|²(cosh v − 1)`.
///
/// Barut-Girardello, with `I_k ≡ I_k(2|ξ|)` and
/// `X = I_{2a−1}(|ξ| I_{2a+1} + I_{2a}) − |ξ| I²_{2a}`:
/// `H^(a) = 4|ξ||αβ|² I_{2a}/I_{2a−1}`,
/// `H^(b) = 4|ξ|/I²_{2a−1} (|α|⁴ X + |αβ|² I_{2a−1} I_{2a})`,
/// `H^(c) = |ξ|/I²_{2a−1} ((|α|⁴ + |β|⁴) X + 2|αβ|² I_{2a−1} I_{2a})`.
pub fn qfi_closed_form(spec: &StateSpec, bs: BeamSplitter, scenario: QfiScenario) -> Result<f64, QfiError> {
    if spec.is_vacuum() {
        return Ok(0.0);
    }
    let q = bs.t_mag().powi(2);
    let p = 1.0 - q;
    let qp = q * p;
    Ok(match spec {
        StateSpec::Perelomov(s) => {
            let a = s.a().value();
            let (cosh_m1, sinh_sq) = (s.v().cosh() - 1.0, s.v().sinh().powi(2));
            match scenario {
                QfiScenario::TwoParameter => 4.0 * a * qp * cosh_m1,
                QfiScenario::Asymmetric => 4.0 * a * q * (0.5 * q * sinh_sq + p * cosh_m1),
                QfiScenario::Symmetric => 0.5 * a * (q * q + p * p) * sinh_sq + 2.0 * a * qp * cosh_m1,
            }
        }
        StateSpec::BarutGirardello(s) => {
            let x = s.xi_mag();
            let order = s.a().twice() - 1;
            let i_lo = specfun::bessel_i(order, 2.0 * x)?;
            let i_mid = specfun::bessel_i(order + 1, 2.0 * x)?;
            let i_hi = specfun::bessel_i(order + 2, 2.0 * x)?;
            let big_x = i_lo * (x * i_hi + i_mid) - x * i_mid * i_mid;
            match scenario {
                QfiScenario::TwoParameter => 4.0 * x * qp * i_mid / i_lo,
                QfiScenario::Asymmetric => 4.0 * x / (i_lo * i_lo) * (q * q * big_x + qp * i_lo * i_mid),
                QfiScenario::Symmetric => x / (i_lo * i_lo) * ((q * q + p * p) * big_x + 2.0 * qp * i_lo * i_mid),
            }
        }
        StateSpec::Vacuum => unreachable!("handled above"),
    })
}

/// Optimum of `H^(b)(|α|) = 4⟨ĝ₁⟩|α|² − 4(⟨ĝ₁⟩ − Δ²ĝ₁)|α|⁴` over `|α| ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalTransmission {
    pub alpha: f64,
    pub h_max: f64,
}

pub fn optimal_transmission_b(m: &InputMoments) -> Result<OptimalTransmission, QfiError> {
    if !m.port0_is_vacuum() {
        return Err(QfiError::NotVacuumPort);
    }
    let (n, var) = (m.port1.mean_g, m.port1.var_g);
    if !(n > 0.0) {
        return Err(QfiError::DegenerateInput);
    }
    if var >= 0.5 * n {
        return Ok(OptimalTransmission {
            alpha: 1.0,
            h_max: 4.0 * var,
        });
    }
    Ok(OptimalTransmission {
        alpha: (n / (2.0 * (n - var))).sqrt(),
        h_max: n * n / (n - var),
    })
}

/// Shot-noise limit `1/√⟨N⟩`.
pub fn snl(mean_photons: f64) -> Result<f64, QfiError> {
    if !(mean_photons > 0.0) {
        return Err(QfiError::NonPositiveMean(mean_photons));
    }
    Ok(1.0 / mean_photons.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PCS_MEAN: f64 = 0.543_080_634_815_243_8;

    fn pcs11() -> StateSpec {
        StateSpec::perelomov(1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn vacuum_input_gives_zero_information() {
        let m = InputMoments::from_spec(&StateSpec::Vacuum).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let r = qfim_general(&m, BeamSplitter::new(t).unwrap());
            assert_eq!((r.h_ss, r.h_dd, r.h_sd, r.h_b, r.h_c), (0.0, 0.0, 0.0, 0.0, 0.0));
            assert_eq!(r.h_a, None);
        }
    }

    #[test]
    fn balanced_pcs_reference_values() {
        let m = InputMoments::from_spec(&pcs11()).unwrap();
        let r = qfim_general(&m, BeamSplitter::balanced());
        assert_relative_eq!(r.h_a.unwrap(), PCS_MEAN, max_relative = 1e-12);
        assert_relative_eq!(r.h_b, 1.233_629_557_586_151_6, max_relative = 1e-12);
        assert_relative_eq!(r.h_c, 0.616_814_778_793_075_8, max_relative = 1e-12);
    }

    #[test]
    fn balanced_bgcs_reference_value() {
        let m = InputMoments::from_spec(&StateSpec::barut_girardello(1.0, 1.0, 0.0).unwrap()).unwrap();
        let r = qfim_general(&m, BeamSplitter::balanced());
        assert_relative_eq!(r.h_a.unwrap(), 0.433_127_426_722_311_76, max_relative = 1e-12);
        assert_relative_eq!(r.h_b, 0.812_400_632_220_908_5, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_port_extremes() {
        let m = InputMoments::from_spec(&pcs11()).unwrap();
        let full = qfi_vacuum_port(&m, BeamSplitter::new(1.0).unwrap()).unwrap();
        assert_eq!(full.h_a, Some(0.0));
        assert_relative_eq!(full.h_b, 4.0 * m.port1.var_g, max_relative = 1e-15);
        let none = qfi_vacuum_port(&m, BeamSplitter::new(0.0).unwrap()).unwrap();
        assert_eq!(none.h_b, 0.0);
    }

    #[test]
    fn vacuum_port_quarter_transmittance() {
        let m = InputMoments::from_spec(&pcs11()).unwrap();
        let r = qfi_vacuum_port(&m, BeamSplitter::from_transmittance(0.25).unwrap()).unwrap();
        assert_relative_eq!(r.h_a.unwrap(), 0.407_310_476_111_432_83, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_port_rejects_occupied_port_zero() {
        let occupied = ModeMoments::number_only(PhotonStatistics {
            mean: 1.0,
            variance: 1.0,
        });
        let m = InputMoments {
            port0: occupied,
            port1: occupied,
        };
        assert_eq!(
            qfi_vacuum_port(&m, BeamSplitter::balanced()),
            Err(QfiError::NotVacuumPort)
        );
    }

    #[test]
    fn closed_form_zero_squeeze_and_full_transmission() {
        let flat = StateSpec::perelomov(1.0, 0.0, 0.0).unwrap();
        for scenario in [
            QfiScenario::TwoParameter,
            QfiScenario::Asymmetric,
            QfiScenario::Symmetric,
        ] {
            assert_eq!(qfi_closed_form(&flat, BeamSplitter::balanced(), scenario).unwrap(), 0.0);
        }
        let h = qfi_closed_form(&pcs11(), BeamSplitter::new(1.0).unwrap(), QfiScenario::Asymmetric).unwrap();
        assert_relative_eq!(h, 2.762_195_691_083_631_4, max_relative = 1e-14);
    }

    #[test]
    fn closed_form_bgcs_balanced_b() {
        let spec = StateSpec::barut_girardello(1.0, 1.0, 0.0).unwrap();
        let h = qfi_closed_form(&spec, BeamSplitter::balanced(), QfiScenario::Asymmetric).unwrap();
        // (|ξ|/I₁²)(X + I₁I₂), X = I₁(|ξ|I₃ + I₂) − |ξ|I₂², evaluated with the bare series
        let (i1, i2, i3) = (
            specfun::bessel_i(1, 2.0).unwrap(),
            specfun::bessel_i(2, 2.0).unwrap(),
            specfun::bessel_i(3, 2.0).unwrap(),
        );
        let x = i1 * (i3 + i2) - i2 * i2;
        assert_relative_eq!(h, (x + i1 * i2) / (i1 * i1), max_relative = 1e-13);
        assert_relative_eq!(h, 0.812_400_632_220_908_5, max_relative = 1e-12);
    }

    #[test]
    fn optimal_transmission_branches() {
        let poisson = InputMoments::vacuum_port(ModeMoments::number_only(PhotonStatistics {
            mean: 2.0,
            variance: 2.0,
        }));
        let opt = optimal_transmission_b(&poisson).unwrap();
        assert_eq!((opt.alpha, opt.h_max), (1.0, 8.0));

        let pcs = optimal_transmission_b(&InputMoments::from_spec(&pcs11()).unwrap()).unwrap();
        assert_eq!(pcs.alpha, 1.0);
        assert_relative_eq!(pcs.h_max, 2.762_195_691_083_631_4, max_relative = 1e-14);

        let sub = InputMoments::vacuum_port(ModeMoments::number_only(PhotonStatistics {
            mean: 1.0,
            variance: 0.25,
        }));
        let opt = optimal_transmission_b(&sub).unwrap();
        assert_relative_eq!(opt.alpha, (2.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(opt.h_max, 4.0 / 3.0, max_relative = 1e-15);

        let empty = InputMoments::from_spec(&StateSpec::Vacuum).unwrap();
        assert_eq!(optimal_transmission_b(&empty), Err(QfiError::DegenerateInput));
    }

    #[test]
    fn shot_noise_limit() {
        assert_eq!(snl(1.0).unwrap(), 1.0);
        assert_relative_eq!(snl(100.0).unwrap(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(snl(PCS_MEAN).unwrap(), 1.356_962_486_001_578_7, max_relative = 1e-14);
        assert!(snl(0.0).is_err());
    }

    #[test]
    fn qcrb_of_zero_is_absent() {
        let r = QfimResult::from_elements(0.0, 0.0, 0.0);
        assert_eq!(r.qcrb_b(), None);
        assert_eq!(r.qcrb_a(), None);
    }
}
