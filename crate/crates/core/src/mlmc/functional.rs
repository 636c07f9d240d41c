//! Path functionals that are 1-Lipschitz in the supremum norm.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `X(1)`.
    Terminal,
    /// `max_t X(t)` over the grid points.
    Supremum,
    /// `∫_0^1 X(t) dt` by the trapezoid rule on the grid.
    Integral,
}

impl Functional {
    pub fn lipschitz_constant(self) -> f64 {
        1.0
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::Terminal => "terminal",
            Functional::Supremum => "supremum",
            Functional::Integral => "integral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "terminal" => Some(Functional::Terminal),
            "supremum" => Some(Functional::Supremum),
            "integral" => Some(Functional::Integral),
            _ => None,
        }
    }

    /// Evaluates on path values at the points of a uniform grid of `[0, 1]`.
    pub fn eval<T: Scalar>(self, values: &[T]) -> f64 {
        match self {
            Functional::Terminal => values[values.len() - 1].as_f64(),
            Functional::Supremum => values.iter().map(|v| v.as_f64()).fold(f64::NEG_INFINITY, f64::max),
            Functional::Integral => {
                let cells = values.len() - 1;
                let inner: f64 = values[1..cells].iter().map(|v| v.as_f64()).sum();
                (inner + 0.5 * (values[0].as_f64() + values[cells].as_f64())) / cells as f64
            }
        }
    }
}
