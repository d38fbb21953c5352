//! Scalar special functions: log-gamma, integer-order modified Bessel
//! functions of the first kind, and the ratio `I_{m+1}(x) / I_m(x)`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{function}: argument {value} outside the domain")]
    Domain { function: &'static str, value: f64 },
    #[error("{function}: series did not converge within {terms} terms (partial sum {partial_sum})")]
    NonConvergence {
        function: &'static str,
        terms: usize,
        partial_sum: f64,
    },
    #[error("invalid series tolerance: {0}")]
    InvalidTolerance(String),
}

/// Truncation control for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    rel_tol: f64,
    max_terms: usize,
}

impl SeriesTolerance {
    pub const DEFAULT_REL_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_TERMS: usize = 512;

    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self, SpecFunError> {
        if !(rel_tol > 0.0 && rel_tol < 1e-6) {
            return Err(SpecFunError::InvalidTolerance(format!(
                "rel_tol must lie in (0, 1e-6), got {rel_tol}"
            )));
        }
        if max_terms < 64 {
            return Err(SpecFunError::InvalidTolerance(format!(
                "max_terms must be at least 64, got {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            function: "log_gamma",
            value: x,
        });
    }
    // Γ(1) = Γ(2) = 1 exactly; the Lanczos sum leaves ~1e-16 residue there.
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `ln Γ(n + 1)` for small nonnegative integers, used pervasively by the
/// Fock amplitude builders.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

/// `I_m(x)` with the default series tolerance.
pub fn bessel_i(m: u32, x: f64) -> Result<f64, SpecFunError> {
    bessel_i_with(m, x, SeriesTolerance::default())
}

/// Modified Bessel function of the first kind of integer order `m`, summed
/// from its power series
///
/// `I_m(x) = Σ_n (x/2)^{2n+m} / (n! Γ(m+n+1))`
///
/// with every term formed in log space.
pub fn bessel_i_with(m: u32, x: f64, tol: SeriesTolerance) -> Result<f64, SpecFunError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            function: "bessel_i",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let ln_half_x = (0.5 * x).ln();
    let m_f = m as f64;
    let mut sum = 0.0;
    for n in 0..tol.max_terms {
        let n_f = n as f64;
        let ln_term = (2.0 * n_f + m_f) * ln_half_x - ln_factorial(n) - ln_factorial(n + m as usize);
        let term = ln_term.exp();
        sum += term;
        // Terms grow while (x/2)^2 > (n+1)(n+m+1); only stop on the decreasing tail.
        let ratio = 0.25 * x * x / ((n_f + 1.0) * (n_f + m_f + 1.0));
        if ratio < 1.0 && term <= tol.rel_tol * sum {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NonConvergence {
        function: "bessel_i",
        terms: tol.max_terms,
        partial_sum: sum,
    })
}

/// `I_{m+1}(x) / I_m(x)` for `x > 0`.
///
/// Evaluated from the Gauss continued fraction
/// `I_{m+1}/I_m = 1 / (2(m+1)/x + 1 / (2(m+2)/x + ...))`
/// with the modified Lentz algorithm, so it stays accurate where both
/// Bessel values underflow or where their series lose digits.
pub fn bessel_ratio(m: u32, x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain {
            function: "bessel_ratio",
            value: x,
        });
    }
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 100_000;

    let inv_x = 1.0 / x;
    let b = |k: usize| 2.0 * (m as f64 + k as f64) * inv_x;
    // f = 1 / (b1 + 1 / (b2 + ...)); evaluate g = b1 + 1/(b2 + ...) then invert.
    let mut f = b(1);
    if f == 0.0 {
        f = TINY;
    }
    let mut c = f;
    let mut d = 0.0;
    for k in 2..MAX_ITER {
        let bk = b(k);
        d = bk + d;
        if d == 0.0 {
            d = TINY;
        }
        c = bk + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(1.0 / f);
        }
    }
    Err(SpecFunError::NonConvergence {
        function: "bessel_ratio",
        terms: MAX_ITER,
        partial_sum: 1.0 / f,
    })
}
