//! Fisher-information, sensitivity and ratio sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use su11mzi::detection::{self, DetectionError, Scheme, SensitivityPoint};
use su11mzi::mzi::{BeamSplitter, BeamSplitterPair, PhaseScenario};
use su11mzi::oracle::{self, Interferometer, Observable, OracleError};
use su11mzi::qfi::{self, InputMoments, QfiError, QfiScenario, QfimResult};
use su11mzi::states::closed_form_stats;
use thiserror::Error;

use crate::config::{ConfigError, LabeledState, Plan};
use crate::table::Table;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Qfi(#[from] QfiError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    State(#[from] su11mzi::states::StateError),
}

const SCENARIOS: [(QfiScenario, &str); 3] = [
    (QfiScenario::TwoParameter, "a"),
    (QfiScenario::Asymmetric, "b"),
    (QfiScenario::Symmetric, "c"),
];

/// One row under construction: values plus status flags.
#[derive(Debug, Default)]
struct RowBuilder {
    values: Vec<Option<f64>>,
    flags: Vec<String>,
}

impl RowBuilder {
    fn value(&mut self, v: f64) {
        self.values.push(Some(v));
    }

    fn empty(&mut self, column: &str, flag: &str) {
        self.values.push(None);
        self.flags.push(format!("{column}:{flag}"));
    }

    fn blank(&mut self) {
        self.values.push(None);
    }

    fn optional(&mut self, column: &str, v: Option<f64>) {
        match v {
            Some(x) if x.is_finite() => self.value(x),
            _ => self.empty(column, "divergent"),
        }
    }

    /// A sensitivity cell, re-checked against its bound.
    fn sensitivity(
        &mut self,
        column: &str,
        result: Result<SensitivityPoint, DetectionError>,
        slack: f64,
    ) -> Result<(), SweepError> {
        match result {
            Ok(p) if p.delta_theta.is_finite() => {
                if p.delta_theta < p.qcrb_ref - slack {
                    self.flags.push(format!("{column}:below_qcrb"));
                }
                self.value(p.delta_theta);
            }
            Ok(_) | Err(DetectionError::DerivativeVanishes(_)) => self.empty(column, "divergent"),
            Err(DetectionError::ConfigurationDegenerate | DetectionError::DegenerateInput) => {
                self.empty(column, "degenerate")
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    fn oracle_sensitivity(&mut self, column: &str, result: Result<f64, OracleError>) -> Result<(), SweepError> {
        match result {
            Ok(x) if x.is_finite() => self.value(x),
            Ok(_) | Err(OracleError::DerivativeVanishes { .. }) => self.empty(column, "divergent"),
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }
}

fn assemble(columns: Vec<String>, rows: Vec<RowBuilder>) -> Table {
    let mut table = Table::new(columns);
    for r in rows {
        table.push(r.values, &r.flags);
    }
    table
}

/// `|α|²` grid `i/(n−1)`, exact at both endpoints.
pub fn transmittance_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

fn snl_of(state: &LabeledState) -> Option<f64> {
    let mean = closed_form_stats(&state.spec).ok()?.mean;
    qfi::snl(mean).ok()
}

/// `h_a`, `h_b`, `h_c`, their bounds and the shot-noise limit
/// versus `|α|²` for every configured state.
pub fn run_qfi_sweep(plan: &Plan) -> Result<Table, SweepError> {
    let mut columns = vec!["transmittance".to_string()];
    for s in &plan.states {
        for (_, tag) in SCENARIOS {
            columns.push(format!("{}_h_{tag}", s.label));
        }
        for (_, tag) in SCENARIOS {
            columns.push(format!("{}_qcrb_{tag}", s.label));
        }
        columns.push(format!("{}_snl", s.label));
        if plan.oracle {
            for (_, tag) in SCENARIOS {
                columns.push(format!("{}_oracle_h_{tag}", s.label));
            }
        }
    }
    let snls: Vec<Option<f64>> = plan.states.iter().map(snl_of).collect();
    let grid = transmittance_grid(plan.qfi_points);
    let rows = grid
        .par_iter()
        .map(|&q| -> Result<RowBuilder, SweepError> {
            let bs = BeamSplitter::from_transmittance(q).expect("grid lies in [0, 1]");
            let mut row = RowBuilder::default();
            row.value(q);
            for (s, snl) in plan.states.iter().zip(&snls) {
                let mut h = [0.0; 3];
                for (i, (scenario, _)) in SCENARIOS.iter().enumerate() {
                    h[i] = qfi::qfi_closed_form(&s.spec, bs, *scenario)?;
                    row.value(h[i]);
                }
                for (i, (_, tag)) in SCENARIOS.iter().enumerate() {
                    row.optional(&format!("{}_qcrb_{tag}", s.label), qfi::qcrb(h[i]));
                }
                row.optional(&format!("{}_snl", s.label), *snl);
                if plan.oracle {
                    let o = oracle::oracle_qfim(&s.spec, bs, s.cutoff)?;
                    for (scenario, tag) in SCENARIOS {
                        row.optional(&format!("{}_oracle_h_{tag}", s.label), o.get(scenario));
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(columns, rows))
}

/// Whether `θ` is a point where `scheme` necessarily diverges.
pub fn is_singular(scheme: Scheme, theta: f64, epsilon: f64) -> bool {
    let eps = epsilon.max(f64::EPSILON);
    match scheme {
        Scheme::IntensityDifference | Scheme::SingleMode => theta.sin().abs() < eps,
        Scheme::HomodyneB => theta.cos().abs() < eps,
        Scheme::HomodyneC => (0.5 * theta).cos().abs() < eps,
    }
}

/// The θ grid a scheme is evaluated on, with singular points shifted by
/// the grid's epsilon.
pub fn scheme_grid(plan: &Plan, scheme: Scheme) -> Vec<f64> {
    let grid = match scheme {
        Scheme::IntensityDifference | Scheme::SingleMode => plan.theta_grid,
        Scheme::HomodyneB | Scheme::HomodyneC => plan.homodyne_theta_grid,
    };
    grid.points()
        .into_iter()
        .map(|t| {
            if is_singular(scheme, t, grid.epsilon) {
                t + grid.epsilon.max(1e-9)
            } else {
                t
            }
        })
        .collect()
}

/// Splitters a scheme is evaluated with.
pub fn scheme_splitters(plan: &Plan, scheme: Scheme) -> BeamSplitterPair {
    match scheme {
        Scheme::IntensityDifference | Scheme::SingleMode => plan.intensity_splitters,
        Scheme::HomodyneB | Scheme::HomodyneC => plan.homodyne_splitters,
    }
}

/// Sorted union of the schemes' grids; `mask[j]` says whether `schemes[j]`
/// is evaluated at that θ.
pub fn union_grid(plan: &Plan, schemes: &[Scheme]) -> Vec<(f64, Vec<bool>)> {
    let mut tagged: Vec<(f64, usize)> = schemes
        .iter()
        .enumerate()
        .flat_map(|(j, &s)| scheme_grid(plan, s).into_iter().map(move |t| (t, j)))
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<(f64, Vec<bool>)> = Vec::new();
    for (t, j) in tagged {
        match out.last_mut() {
            Some((last, mask)) if *last == t => mask[j] = true,
            _ => {
                let mut mask = vec![false; schemes.len()];
                mask[j] = true;
                out.push((t, mask));
            }
        }
    }
    out
}

fn observable_for(scheme: Scheme, theta_l: f64) -> (Observable, PhaseScenario) {
    match scheme {
        Scheme::IntensityDifference => (Observable::IntensityDifference, PhaseScenario::Asymmetric),
        Scheme::SingleMode => (Observable::SingleMode, PhaseScenario::Asymmetric),
        Scheme::HomodyneB => (Observable::Quadrature { theta_l }, PhaseScenario::Asymmetric),
        Scheme::HomodyneC => (Observable::Quadrature { theta_l }, PhaseScenario::Symmetric),
    }
}

/// Finite-difference sensitivity on the truncated Fock space, with the same
/// observable and local-oscillator phase as the closed form.
pub struct SchemeOracle {
    interferometer: Interferometer,
    observable: Observable,
    scenario: PhaseScenario,
}

impl SchemeOracle {
    pub fn new(state: &LabeledState, scheme: Scheme, splitters: BeamSplitterPair) -> Result<Self, SweepError> {
        let theta_l = match scheme {
            Scheme::HomodyneB | Scheme::HomodyneC => detection::homodyne_series(&state.spec)?.nu.arg(),
            _ => 0.0,
        };
        let (observable, scenario) = observable_for(scheme, theta_l);
        Ok(Self {
            interferometer: Interferometer::new(&state.spec, splitters, state.cutoff)?,
            observable,
            scenario,
        })
    }

    pub fn sensitivity(&self, theta: f64, step: f64) -> Result<f64, OracleError> {
        self.interferometer
            .sensitivity(self.observable, self.scenario, theta, step)
    }
}

/// Bounds of a state: `qcrb_a` at the intensity splitter, `qcrb_b` and
/// `qcrb_c` at the homodyne splitter.
fn bound_constants(plan: &Plan, state: &LabeledState) -> Result<[Option<f64>; 3], SweepError> {
    let m = InputMoments::from_spec(&state.spec)?;
    let at = |bs: BeamSplitter| -> Result<QfimResult, SweepError> { Ok(qfi::qfi_vacuum_port(&m, bs)?) };
    let a = at(plan.intensity_splitters.first)?;
    let bc = at(plan.homodyne_splitters.first)?;
    Ok([a.qcrb_a(), bc.qcrb_b(), bc.qcrb_c()])
}

/// Δθ per scheme versus θ, with the three bound constants and the
/// shot-noise limit, for every configured state.
pub fn run_sensitivity_curve(plan: &Plan) -> Result<Table, SweepError> {
    let schemes = &plan.schemes;
    let mut columns = vec!["theta".to_string()];
    for s in &plan.states {
        for scheme in schemes {
            columns.push(format!("{}_dtheta_{}", s.label, scheme.name()));
        }
        for (_, tag) in SCENARIOS {
            columns.push(format!("{}_qcrb_{tag}", s.label));
        }
        columns.push(format!("{}_snl", s.label));
        if plan.oracle {
            for scheme in schemes {
                columns.push(format!("{}_oracle_{}", s.label, scheme.name()));
            }
        }
    }
    let mut constants = Vec::new();
    let mut oracles: Vec<Vec<Option<SchemeOracle>>> = Vec::new();
    for s in &plan.states {
        constants.push((bound_constants(plan, s)?, snl_of(s)));
        let mut per_scheme = Vec::new();
        for &scheme in schemes {
            per_scheme.push(if plan.oracle && !s.spec.is_vacuum() {
                Some(SchemeOracle::new(s, scheme, scheme_splitters(plan, scheme))?)
            } else {
                None
            });
        }
        oracles.push(per_scheme);
    }
    let slack = plan.tolerances.qcrb_slack;
    let grid = union_grid(plan, schemes);
    let rows = grid
        .par_iter()
        .map(|(theta, mask)| -> Result<RowBuilder, SweepError> {
            let mut row = RowBuilder::default();
            row.value(*theta);
            for ((s, (bounds, snl)), scheme_oracles) in plan.states.iter().zip(&constants).zip(&oracles) {
                for (j, &scheme) in schemes.iter().enumerate() {
                    let column = format!("{}_dtheta_{}", s.label, scheme.name());
                    if mask[j] {
                        let result = detection::sensitivity(scheme, &s.spec, scheme_splitters(plan, scheme), *theta);
                        row.sensitivity(&column, result, slack)?;
                    } else {
                        row.blank();
                    }
                }
                for (b, (_, tag)) in bounds.iter().zip(SCENARIOS) {
                    row.optional(&format!("{}_qcrb_{tag}", s.label), *b);
                }
                row.optional(&format!("{}_snl", s.label), *snl);
                if plan.oracle {
                    for (j, (scheme, o)) in schemes.iter().zip(scheme_oracles).enumerate() {
                        let column = format!("{}_oracle_{}", s.label, scheme.name());
                        match o {
                            Some(o) if mask[j] => {
                                row.oracle_sensitivity(&column, o.sensitivity(*theta, plan.tolerances.fd_step))?
                            }
                            Some(_) => row.blank(),
                            None => row.empty(&column, "degenerate"),
                        }
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(columns, rows))
}

/// `R = Δθ(numerator)/Δθ(denominator)` per ratio scheme versus θ.
pub fn run_ratio_sweep(plan: &Plan) -> Result<Table, SweepError> {
    let (ni, di) = plan.ratio.ok_or_else(|| ConfigError {
        path: "ratio".into(),
        message: "ratio sweep needs exactly two states or an explicit `ratio` pair".into(),
    })?;
    let (num, den) = (&plan.states[ni], &plan.states[di]);
    let schemes = &plan.ratio_schemes;
    let mut columns = vec!["theta".to_string()];
    for scheme in schemes {
        let n = scheme.name();
        columns.push(format!("{}_dtheta_{n}", num.label));
        columns.push(format!("{}_dtheta_{n}", den.label));
        columns.push(format!("ratio_{n}"));
    }
    let slack = plan.tolerances.qcrb_slack;
    let grid = union_grid(plan, schemes);
    let rows = grid
        .par_iter()
        .map(|(theta, mask)| -> Result<RowBuilder, SweepError> {
            let mut row = RowBuilder::default();
            row.value(*theta);
            for (j, &scheme) in schemes.iter().enumerate() {
                let n = scheme.name();
                if !mask[j] {
                    row.blank();
                    row.blank();
                    row.blank();
                    continue;
                }
                let bs = scheme_splitters(plan, scheme);
                let p = detection::sensitivity(scheme, &num.spec, bs, *theta);
                let b = detection::sensitivity(scheme, &den.spec, bs, *theta);
                let ratio = match (&p, &b) {
                    (Ok(p), Ok(b)) if b.delta_theta > 0.0 => Some(p.delta_theta / b.delta_theta),
                    _ => None,
                };
                row.sensitivity(&format!("{}_dtheta_{n}", num.label), p, slack)?;
                row.sensitivity(&format!("{}_dtheta_{n}", den.label), b, slack)?;
                row.optional(&format!("ratio_{n}"), ratio);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(columns, rows))
}

/// Golden-section minimum of a scheme's Δθ over `(0, π)` for intensity
/// schemes, returned as `(θ*, Δθ*)`.
pub fn optimal_intensity_theta(
    state: &LabeledState,
    scheme: Scheme,
    splitters: BeamSplitterPair,
    tol: f64,
) -> (f64, f64) {
    let f = |t: f64| {
        detection::sensitivity(scheme, &state.spec, splitters, t)
            .map(|p| p.delta_theta)
            .unwrap_or(f64::INFINITY)
    };
    detection::golden_section_min(f, 1e-3, PI - 1e-3, tol)
}
