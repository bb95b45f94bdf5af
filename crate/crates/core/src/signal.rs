//! Exogenous inputs `B w(t)` with closed-form derivatives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("derivative of order {order} requested, signal is differentiable to order {max}")]
    DerivativeUnavailable { order: usize, max: usize },
    #[error("B has {cols} columns but the signal has {components} components")]
    Dimension { cols: usize, components: usize },
}

/// One scalar input channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    Zero,
    /// `c[0] + c[1] t + c[2] t^2 + ...`
    Polynomial(Vec<f64>),
    /// `amplitude * sin(omega t + phase)`
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
}

impl Waveform {
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        match self {
            Waveform::Zero => 0.0,
            Waveform::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(order)
                .map(|(i, &ci)| {
                    let falling: f64 = ((i - order + 1)..=i).map(|f| f as f64).product();
                    ci * falling * t.powi((i - order) as i32)
                })
                .sum(),
            Waveform::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let shift = order as f64 * std::f64::consts::FRAC_PI_2;
                amplitude * omega.powi(order as i32) * (omega * t + phase + shift).sin()
            }
        }
    }
}

/// `B w(t)` with `w` built from closed-form waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSignal {
    b: DMatrix<f64>,
    components: Vec<Waveform>,
    max_order: usize,
}

impl InputSignal {
    /// No input at all.
    pub fn zero(n: usize) -> Self {
        Self {
            b: DMatrix::zeros(n, 0),
            components: Vec::new(),
            max_order: usize::MAX,
        }
    }

    pub fn new(b: DMatrix<f64>, components: Vec<Waveform>) -> Result<Self, SignalError> {
        if b.ncols() != components.len() {
            return Err(SignalError::Dimension {
                cols: b.ncols(),
                components: components.len(),
            });
        }
        Ok(Self {
            b,
            components,
            max_order: usize::MAX,
        })
    }

    /// Caps the derivative orders the signal is declared to have.
    pub fn with_max_order(mut self, max: usize) -> Self {
        self.max_order = max;
        self
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn n(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn components(&self) -> &[Waveform] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| matches!(c, Waveform::Zero)) || self.b.iter().all(|&v| v == 0.0)
    }

    /// `w^{(order)}(t)`.
    pub fn w_derivative(&self, order: usize, t: f64) -> Result<DVector<f64>, SignalError> {
        if order > self.max_order {
            return Err(SignalError::DerivativeUnavailable {
                order,
                max: self.max_order,
            });
        }
        Ok(DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| c.derivative(order, t)),
        ))
    }

    /// `B w^{(order)}(t)`, an `n`-vector.
    pub fn forcing(&self, order: usize, t: f64) -> Result<DVector<f64>, SignalError> {
        let w = self.w_derivative(order, t)?;
        Ok(&self.b * w)
    }
}

/// JSON form: `{"b": [[...], ...], "components": [...]}` with `b` row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDoc {
    pub b: Vec<Vec<f64>>,
    pub components: Vec<Waveform>,
}

impl InputDoc {
    pub fn into_signal(self, n: usize) -> Result<InputSignal, SignalError> {
        let m = self.components.len();
        if self.b.len() != n || self.b.iter().any(|r| r.len() != m) {
            return Err(SignalError::Dimension {
                cols: self.b.first().map_or(0, Vec::len),
                components: m,
            });
        }
        let b = DMatrix::from_fn(n, m, |r, c| self.b[r][c]);
        InputSignal::new(b, self.components)
    }
}
