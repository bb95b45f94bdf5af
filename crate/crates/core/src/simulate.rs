//! Fixed-step RK4 integration across a failure instant.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::failure::{apply_failure, FailureError, FailureScenario};
use crate::graph::{Digraph, InWeighting};
use crate::signal::{InputSignal, SignalError};

/// Default integration step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("state diverged (non-finite) at t = {t}")]
    Diverged { t: f64 },
    #[error("invalid time window: {0}")]
    Window(String),
    #[error("initial state has {got} entries, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Failure(#[from] FailureError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("trajectory csv: {0}")]
    Csv(String),
}

/// Sampled states; the failure instant, if any, is one of the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DVector<f64>>,
    failure_index: Option<usize>,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<DVector<f64>>,
        failure_index: Option<usize>,
    ) -> Result<Self, SimError> {
        if times.len() != states.len() {
            return Err(SimError::Csv("times and states differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::Csv("sample times must be strictly increasing".into()));
        }
        if failure_index.is_some_and(|i| i >= times.len()) {
            return Err(SimError::Csv("failure index past the last sample".into()));
        }
        Ok(Self {
            times,
            states,
            failure_index,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_f(&self) -> Option<f64> {
        self.failure_index.map(|i| self.times[i])
    }

    pub fn failure_index(&self) -> Option<usize> {
        self.failure_index
    }

    /// `(t_f, x(t_f))`.
    pub fn failure_sample(&self) -> Option<(f64, &DVector<f64>)> {
        self.failure_index.map(|i| (self.times[i], &self.states[i]))
    }

    /// True for samples at or after the failure instant.
    pub fn is_post_failure(&self, idx: usize) -> bool {
        self.failure_index.is_some_and(|f| idx >= f)
    }

    pub fn last(&self) -> Option<(f64, &DVector<f64>)> {
        self.times.last().map(|&t| (t, self.states.last().unwrap()))
    }

    /// CSV with columns `t, x1..xn, post_failure`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SimError> {
        let n = self.states.first().map_or(0, |x| x.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("post_failure".into());
        w.write_record(&header).map_err(csv_err)?;
        for (idx, (t, x)) in self.times.iter().zip(&self.states).enumerate() {
            let mut rec = vec![format!("{t:e}")];
            rec.extend(x.iter().map(|v| format!("{v:e}")));
            rec.push(if self.is_post_failure(idx) { "1" } else { "0" }.into());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| SimError::Csv(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, SimError> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(csv_err)?.clone();
        let cols = header.len();
        if cols < 2 || &header[0] != "t" || &header[cols - 1] != "post_failure" {
            return Err(SimError::Csv("expected columns t, x1..xn, post_failure".into()));
        }
        let n = cols - 2;
        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut failure_index = None;
        for (row, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let line = row + 2;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| SimError::Csv(format!("line {line}: bad number `{s}`")))
            };
            times.push(num(&rec[0])?);
            let x: Result<Vec<f64>, _> = (1..=n).map(|c| num(&rec[c])).collect();
            states.push(DVector::from_vec(x?));
            match rec[cols - 1].trim() {
                "0" => {
                    if failure_index.is_some() {
                        return Err(SimError::Csv(format!(
                            "line {line}: post_failure returns to 0"
                        )));
                    }
                }
                "1" => {
                    if failure_index.is_none() {
                        failure_index = Some(row);
                    }
                }
                other => {
                    return Err(SimError::Csv(format!(
                        "line {line}: post_failure must be 0 or 1, got `{other}`"
                    )))
                }
            }
        }
        Self::new(times, states, failure_index)
    }
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Csv(e.to_string())
}

fn rk4_segment(
    m: &DMatrix<f64>,
    input: &InputSignal,
    x: &mut DVector<f64>,
    t0: f64,
    t1: f64,
    step: f64,
    times: &mut Vec<f64>,
    states: &mut Vec<DVector<f64>>,
) -> Result<(), SimError> {
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(());
    }
    let steps = (span / step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let f = |t: f64, x: &DVector<f64>| -> Result<DVector<f64>, SimError> {
        let mut dx = m * x;
        if !input.is_zero() {
            dx += input.forcing(0, t)?;
        }
        Ok(dx)
    };
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let k1 = f(t, x)?;
        let k2 = f(t + h / 2.0, &(&*x + &k1 * (h / 2.0)))?;
        let k3 = f(t + h / 2.0, &(&*x + &k2 * (h / 2.0)))?;
        let k4 = f(t + h, &(&*x + &k3 * h))?;
        *x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let t_next = if s + 1 == steps { t1 } else { t0 + (s + 1) as f64 * h };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Diverged { t: t_next });
        }
        times.push(t_next);
        states.push(x.clone());
    }
    Ok(())
}

/// Integrates `ẋ = A x + B w` on `[t0, t_f]` and `ẋ = Ā x + B w` on `[t_f, t_end]`.
///
/// Each segment uses equal steps no longer than `step`, so `t_f` is a sample.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    g: &Digraph,
    a: &InWeighting,
    input: &InputSignal,
    x0: &[f64],
    t0: f64,
    scenario: Option<&FailureScenario>,
    t_end: f64,
    step: f64,
) -> Result<Trajectory, SimError> {
    let n = a.n();
    if x0.len() != n {
        return Err(SimError::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(SimError::Window(format!("step must be positive, got {step}")));
    }
    if !(t_end > t0) {
        return Err(SimError::Window(format!("need t0 < t_end, got {t0} and {t_end}")));
    }
    let mut x = DVector::from_column_slice(x0);
    let mut times = vec![t0];
    let mut states = vec![x.clone()];
    let Some(s) = scenario else {
        rk4_segment(a.matrix(), input, &mut x, t0, t_end, step, &mut times, &mut states)?;
        return Trajectory::new(times, states, None);
    };
    if !(s.t_f > t0 && s.t_f < t_end) {
        return Err(SimError::Window(format!(
            "need t0 < t_f < t_end, got {t0}, {}, {t_end}",
            s.t_f
        )));
    }
    let (_, abar) = apply_failure(g, a, s)?;
    rk4_segment(a.matrix(), input, &mut x, t0, s.t_f, step, &mut times, &mut states)?;
    let failure_index = times.len() - 1;
    rk4_segment(abar.matrix(), input, &mut x, s.t_f, t_end, step, &mut times, &mut states)?;
    Trajectory::new(times, states, Some(failure_index))
}
