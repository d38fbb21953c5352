//! Brute-force two-mode Fock simulation of the interferometer.
//!
//! States are stored by total photon number: block `n` holds the amplitudes
//! of `|k, n − k⟩` for `k = 0..=n`. Beam splitters and phase shifts conserve
//! the total, so every block evolves on its own and nothing leaks out of the
//! grid. Slot 0 is the first output of a beam splitter (mode 2 after BS1,
//! mode 4 after BS2) and slot 1 the second.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::mzi::{BeamSplitter, BeamSplitterPair, PhaseConfig, PhaseScenario};
use crate::qfi::QfimResult;
use crate::states::{StateError, StateSpec};

/// Extra total-photon levels allocated above the input support.
pub const CUTOFF_HEADROOM: usize = 2;
pub const MAX_MONOMIAL_DEGREE: u32 = 4;
pub const MIN_STEP: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e-3;
/// Relative floor below which a numerical derivative counts as zero.
pub const DERIVATIVE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("monomial degree {0} exceeds {MAX_MONOMIAL_DEGREE}")]
    DegreeOverflow(u32),
    #[error("derivative {derivative:e} below floor {floor:e}; sensitivity diverges")]
    DerivativeVanishes { derivative: f64, floor: f64 },
    #[error("finite-difference step {0} outside [{MIN_STEP}, {MAX_STEP}]")]
    InvalidStep(f64),
    #[error("port amplitude list must not be empty")]
    EmptyPort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    blocks: Vec<Vec<Complex64>>,
}

impl TwoModeState {
    /// Vacuum on a grid holding up to `max_total` photons.
    pub fn vacuum(max_total: usize) -> Self {
        let mut blocks: Vec<Vec<Complex64>> = (0..=max_total).map(|n| vec![Complex64::new(0.0, 0.0); n + 1]).collect();
        blocks[0][0] = Complex64::new(1.0, 0.0);
        Self { blocks }
    }

    /// `|ψ₀⟩ ⊗ |ψ₁⟩` from single-mode Fock amplitudes, on a grid large enough
    /// to hold the product exactly plus [`CUTOFF_HEADROOM`].
    pub fn product(port0: &[Complex64], port1: &[Complex64]) -> Result<Self, OracleError> {
        if port0.is_empty() || port1.is_empty() {
            return Err(OracleError::EmptyPort);
        }
        let max_total = port0.len() + port1.len() - 2 + CUTOFF_HEADROOM;
        let zero = Complex64::new(0.0, 0.0);
        let blocks = (0..=max_total)
            .map(|n| {
                (0..=n)
                    .map(|k| match (port0.get(k), port1.get(n - k)) {
                        (Some(a), Some(b)) => a * b,
                        _ => zero,
                    })
                    .collect()
            })
            .collect();
        Ok(Self { blocks })
    }

    /// Vacuum at port 0 and `spec` at port 1. `cutoff` overrides the
    /// automatic single-mode truncation.
    pub fn build_input(spec: &StateSpec, cutoff: Option<usize>) -> Result<Self, OracleError> {
        let single = spec.amplitudes(cutoff)?;
        Self::product(&[Complex64::new(1.0, 0.0)], single.amps())
    }

    /// Largest total photon number held by the grid.
    pub fn max_total(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Amplitude of `|n₀, n₁⟩`; zero outside the grid.
    pub fn amp(&self, n0: usize, n1: usize) -> Complex64 {
        self.blocks.get(n0 + n1).map_or(Complex64::new(0.0, 0.0), |b| b[n0])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    /// `(n₀, n₁, probability)` over the whole grid.
    pub fn number_distribution(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(n, block)| block.iter().enumerate().map(move |(k, c)| (k, n - k, c.norm_sqr())))
    }

    /// Photon-number distribution of one slot.
    pub fn marginal(&self, slot: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.blocks.len()];
        for (n0, n1, p) in self.number_distribution() {
            out[if slot == 0 { n0 } else { n1 }] += p;
        }
        out
    }

    /// Applies `exp[iτ(b̂₀†b̂₁ + b̂₁†b̂₀)]` with `cos τ = |α|`.
    pub fn apply_beam_splitter(&self, bs: BeamSplitter) -> Self {
        BeamSplitterUnitary::new(bs, self.max_total()).apply(self)
    }

    /// Multiplies `|n₂, n₃⟩` by `e^{−iθ₂n₂} e^{−iθ₁n₃}`.
    pub fn apply_phases(&self, phases: PhaseConfig) -> Self {
        let (theta1, theta2) = phases.arm_phases();
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(n, block)| {
                block
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * Complex64::from_polar(1.0, -(theta2 * k as f64 + theta1 * (n - k) as f64)))
                    .collect()
            })
            .collect();
        Self { blocks }
    }

    /// Expectation of a normal-ordered monomial.
    pub fn moment(&self, m: &Monomial) -> Result<Complex64, OracleError> {
        let degree = m.degree();
        if degree > MAX_MONOMIAL_DEGREE {
            return Err(OracleError::DegreeOverflow(degree));
        }
        // ⟨ψ|b₀†^p b₁†^q b₀^r b₁^s|ψ⟩ = ⟨b₀^p b₁^q ψ | b₀^r b₁^s ψ⟩
        let lowered = |k: usize, j: usize, dk: u32, dj: u32| {
            let (dk, dj) = (dk as usize, dj as usize);
            self.amp(k + dk, j + dj) * (falling_sqrt(k + dk, dk) * falling_sqrt(j + dj, dj))
        };
        let [p, q] = m.create;
        let [r, s] = m.annihilate;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, block) in self.blocks.iter().enumerate() {
            for k in 0..block.len() {
                let j = n - k;
                acc += lowered(k, j, p, q).conj() * lowered(k, j, r, s);
            }
        }
        Ok(acc)
    }

    /// Means and (co)variances of the slot photon numbers.
    pub fn number_moments(&self) -> NumberMoments {
        let (mut m0, mut m1) = (0.0, 0.0);
        for (n0, n1, p) in self.number_distribution() {
            m0 += p * n0 as f64;
            m1 += p * n1 as f64;
        }
        let (mut v0, mut v1, mut c01) = (0.0, 0.0, 0.0);
        for (n0, n1, p) in self.number_distribution() {
            let (d0, d1) = (n0 as f64 - m0, n1 as f64 - m1);
            v0 += p * d0 * d0;
            v1 += p * d1 * d1;
            c01 += p * d0 * d1;
        }
        NumberMoments {
            mean: [m0, m1],
            var: [v0, v1],
            cov: c01,
        }
    }
}

/// `√(n!/(n−d)!)`
fn falling_sqrt(n: usize, d: usize) -> f64 {
    (n + 1 - d..=n).map(|i| i as f64).product::<f64>().sqrt()
}

/// Normal-ordered `b̂₀†^p b̂₁†^q b̂₀^r b̂₁^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub create: [u32; 2],
    pub annihilate: [u32; 2],
}

impl Monomial {
    pub fn new(create: [u32; 2], annihilate: [u32; 2]) -> Self {
        Self { create, annihilate }
    }

    pub fn number(slot: usize) -> Self {
        let mut e = [0; 2];
        e[slot] = 1;
        Self::new(e, e)
    }

    pub fn annihilation(slot: usize, power: u32) -> Self {
        let mut e = [0; 2];
        e[slot] = power;
        Self::new([0; 2], e)
    }

    pub fn degree(&self) -> u32 {
        self.create.iter().chain(&self.annihilate).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberMoments {
    pub mean: [f64; 2],
    pub var: [f64; 2],
    pub cov: f64,
}

/// Eigenvectors of the block generator `G_n`, with
/// `G_n[k+1][k] = √((k+1)(n−k))` and spectrum `{−n, −n+2, …, n}`.
/// They do not depend on the mixing angle, so one decomposition per block
/// serves every beam splitter.
fn block_eigenbasis(n: usize) -> Arc<(Vec<f64>, DMatrix<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, DMatrix<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("eigenbasis cache poisoned").get(&n) {
        return Arc::clone(hit);
    }
    let dim = n + 1;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        let x = (((k + 1) * (n - k)) as f64).sqrt();
        g[(k + 1, k)] = x;
        g[(k, k + 1)] = x;
    }
    let eig = SymmetricEigen::new(g);
    let entry = Arc::new((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors));
    cache
        .lock()
        .expect("eigenbasis cache poisoned")
        .entry(n)
        .or_insert(entry)
        .clone()
}

/// Block-diagonal beam-splitter unitary, `U_n = V_n diag(e^{iτλ}) V_nᵀ`,
/// applied as two real basis changes around a diagonal phase.
#[derive(Debug, Clone)]
pub struct BeamSplitterUnitary {
    tau: f64,
    bases: Vec<Arc<(Vec<f64>, DMatrix<f64>)>>,
}

impl BeamSplitterUnitary {
    pub fn new(bs: BeamSplitter, max_total: usize) -> Self {
        Self {
            tau: bs.mixing_angle(),
            bases: (0..=max_total).map(block_eigenbasis).collect(),
        }
    }

    pub fn apply(&self, state: &TwoModeState) -> TwoModeState {
        assert!(
            self.bases.len() >= state.blocks.len(),
            "unitary built for fewer photons than the state holds"
        );
        let blocks = state
            .blocks
            .iter()
            .zip(&self.bases)
            .map(|(psi, basis)| {
                let (lambda, v) = (&basis.0, &basis.1);
                let dim = psi.len();
                let rotated: Vec<Complex64> = (0..dim)
                    .map(|e| {
                        let proj: Complex64 = (0..dim).map(|j| psi[j] * v[(j, e)]).sum();
                        proj * Complex64::from_polar(1.0, self.tau * lambda[e])
                    })
                    .collect();
                (0..dim)
                    .map(|i| (0..dim).map(|e| rotated[e] * v[(i, e)]).sum())
                    .collect()
            })
            .collect();
        TwoModeState { blocks }
    }
}

/// Fisher matrix of the phase generators, `H_ij = 4 Cov(G_i, G_j)` with
/// `G_s = (ĝ₂ + ĝ₃)/2`, `G_d = (ĝ₂ − ĝ₃)/2`, evaluated on the post-BS1 state.
pub fn generator_covariance(state: &TwoModeState) -> QfimResult {
    let nm = state.number_moments();
    let (v2, v3, c) = (nm.var[0], nm.var[1], nm.cov);
    QfimResult::from_elements(v2 + v3 + 2.0 * c, v2 + v3 - 2.0 * c, v2 - v3)
}

/// Oracle Fisher matrix for `spec` at port 1 and vacuum at port 0.
pub fn oracle_qfim(spec: &StateSpec, bs: BeamSplitter, cutoff: Option<usize>) -> Result<QfimResult, OracleError> {
    let input = TwoModeState::build_input(spec, cutoff)?;
    Ok(generator_covariance(&input.apply_beam_splitter(bs)))
}

/// Measured quantity on output port 4 (slot 0 after BS2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `ĝ₄ − ĝ₅`
    IntensityDifference,
    /// `ĝ₄`
    SingleMode,
    /// `X̂ = (e^{−iθ_L} b̂₄ + e^{iθ_L} b̂₄†)/2`
    Quadrature { theta_l: f64 },
}

impl Observable {
    /// `(⟨Ŝ⟩, Δ²Ŝ)` on an output state.
    pub fn mean_and_variance(&self, out: &TwoModeState) -> (f64, f64) {
        match *self {
            Self::IntensityDifference => {
                let nm = out.number_moments();
                (nm.mean[0] - nm.mean[1], nm.var[0] + nm.var[1] - 2.0 * nm.cov)
            }
            Self::SingleMode => {
                let nm = out.number_moments();
                (nm.mean[0], nm.var[0])
            }
            Self::Quadrature { theta_l } => {
                let rot = Complex64::from_polar(1.0, -theta_l);
                let b = out.moment(&Monomial::annihilation(0, 1)).expect("degree 1");
                let b2 = out.moment(&Monomial::annihilation(0, 2)).expect("degree 2");
                let n = out.number_moments().mean[0];
                let mean = (rot * b).re;
                let second = 0.5 * (rot * rot * b2).re + 0.25 * (2.0 * n + 1.0);
                (mean, second - mean * mean)
            }
        }
    }
}

/// The input state after BS1, with the BS2 unitary precomputed, so many
/// phase settings can be evaluated cheaply.
#[derive(Debug, Clone)]
pub struct Interferometer {
    after_first: TwoModeState,
    second: BeamSplitterUnitary,
}

impl Interferometer {
    pub fn new(spec: &StateSpec, splitters: BeamSplitterPair, cutoff: Option<usize>) -> Result<Self, OracleError> {
        let input = TwoModeState::build_input(spec, cutoff)?;
        let max_total = input.max_total();
        Ok(Self {
            after_first: input.apply_beam_splitter(splitters.first),
            second: BeamSplitterUnitary::new(splitters.second, max_total),
        })
    }

    pub fn after_first(&self) -> &TwoModeState {
        &self.after_first
    }

    pub fn qfim(&self) -> QfimResult {
        generator_covariance(&self.after_first)
    }

    pub fn output(&self, phases: PhaseConfig) -> TwoModeState {
        self.second.apply(&self.after_first.apply_phases(phases))
    }

    /// `ΔŜ / |∂⟨Ŝ⟩/∂θ|` with the derivative from Richardson-extrapolated
    /// central differences at steps `dθ` and `dθ/2`.
    pub fn sensitivity(
        &self,
        observable: Observable,
        scenario: PhaseScenario,
        theta: f64,
        d_theta: f64,
    ) -> Result<f64, OracleError> {
        if !(MIN_STEP..=MAX_STEP).contains(&d_theta) {
            return Err(OracleError::InvalidStep(d_theta));
        }
        let eval = |th: f64| observable.mean_and_variance(&self.output(PhaseConfig::from_scenario(scenario, th)));
        let mean_at = |th: f64| eval(th).0;
        let central = |h: f64| (mean_at(theta + h) - mean_at(theta - h)) / (2.0 * h);
        let derivative = (4.0 * central(0.5 * d_theta) - central(d_theta)) / 3.0;
        let (mean, var) = eval(theta);
        let floor = DERIVATIVE_FLOOR * (1.0 + mean.abs());
        if derivative.abs() <= floor {
            return Err(OracleError::DerivativeVanishes { derivative, floor });
        }
        Ok(var.max(0.0).sqrt() / derivative.abs())
    }
}

/// One-shot numerical sensitivity; see [`Interferometer::sensitivity`].
pub fn numeric_sensitivity(
    spec: &StateSpec,
    splitters: BeamSplitterPair,
    observable: Observable,
    scenario: PhaseScenario,
    theta: f64,
    d_theta: f64,
) -> Result<f64, OracleError> {
    Interferometer::new(spec, splitters, None)?.sensitivity(observable, scenario, theta, d_theta)
}
