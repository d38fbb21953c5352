//! Interferometer geometry shared by the closed forms and the oracle.
//!
//! Beam splitters follow `b̂₂ = α b̂₀ + β b̂₁`, `b̂₃ = β b̂₀ + α b̂₁` with real
//! `α = |α|` and `β = i√(1 − |α|²)`, so that `α*β = i|αβ|`.
//! The upper arm (mode 3) carries `θ₁`, the lower arm (mode 2) carries `θ₂`.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("transmission magnitude must lie in [0, 1], got {0}")]
pub struct InvalidTransmission(pub f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    t_mag: f64,
}

impl BeamSplitter {
    pub fn new(t_mag: f64) -> Result<Self, InvalidTransmission> {
        if !(0.0..=1.0).contains(&t_mag) {
            return Err(InvalidTransmission(t_mag));
        }
        Ok(Self { t_mag })
    }

    pub fn balanced() -> Self {
        Self {
            t_mag: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// Beam splitter with `|α|² = transmittance`.
    pub fn from_transmittance(transmittance: f64) -> Result<Self, InvalidTransmission> {
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(InvalidTransmission(transmittance));
        }
        Ok(Self {
            t_mag: transmittance.sqrt(),
        })
    }

    /// `|α|`
    pub fn t_mag(&self) -> f64 {
        self.t_mag
    }

    /// `|β| = √(1 − |α|²)`
    pub fn r_mag(&self) -> f64 {
        (1.0 - self.t_mag * self.t_mag).max(0.0).sqrt()
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.t_mag, 0.0)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::new(0.0, self.r_mag())
    }

    /// Mixing angle `τ` with `cos τ = |α|`.
    pub fn mixing_angle(&self) -> f64 {
        self.t_mag.clamp(0.0, 1.0).acos()
    }
}

/// First (BS1) and second (BS2) beam splitter of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterPair {
    pub first: BeamSplitter,
    pub second: BeamSplitter,
}

impl BeamSplitterPair {
    pub fn new(t1: f64, t2: f64) -> Result<Self, InvalidTransmission> {
        Ok(Self {
            first: BeamSplitter::new(t1)?,
            second: BeamSplitter::new(t2)?,
        })
    }

    pub fn balanced() -> Self {
        Self {
            first: BeamSplitter::balanced(),
            second: BeamSplitter::balanced(),
        }
    }

    /// `|αα′ββ′|`
    pub fn mixing_product(&self) -> f64 {
        self.first.t_mag() * self.first.r_mag() * self.second.t_mag() * self.second.r_mag()
    }
}

/// How the phase delay `θ` is distributed over the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseScenario {
    /// `θ₁ = θ`, `θ₂ = 0`.
    Asymmetric,
    /// `θ₁ = −θ₂ = θ/2`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseConfig {
    TwoParam { theta1: f64, theta2: f64 },
    Asymmetric(f64),
    Symmetric(f64),
}

impl PhaseConfig {
    pub fn from_scenario(scenario: PhaseScenario, theta: f64) -> Self {
        match scenario {
            PhaseScenario::Asymmetric => Self::Asymmetric(theta),
            PhaseScenario::Symmetric => Self::Symmetric(theta),
        }
    }

    /// `(θ₁, θ₂)`: phase on the upper arm (mode 3) and the lower arm (mode 2).
    pub fn arm_phases(&self) -> (f64, f64) {
        match *self {
            Self::TwoParam { theta1, theta2 } => (theta1, theta2),
            Self::Asymmetric(theta) => (theta, 0.0),
            Self::Symmetric(theta) => (0.5 * theta, -0.5 * theta),
        }
    }
}
