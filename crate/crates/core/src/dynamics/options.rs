use crate::exec::Execution;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Classical RK4 with a fixed step (ns).
    Rk4 { dt: f64 },
    /// Dormand–Prince 5(4) with error control.
    Adaptive { rtol: f64, atol: f64 },
}

impl Method {
    fn validate(&self) -> Result<()> {
        match *self {
            Method::Rk4 { dt } if !(dt > 0.0) => {
                Err(Error::InvalidParameter(format!("RK4 step {dt} must be > 0")))
            }
            Method::Adaptive { rtol, atol } if !(rtol > 0.0 && atol > 0.0) => Err(
                Error::InvalidParameter(format!("tolerances rtol={rtol}, atol={atol} must be > 0")),
            ),
            _ => Ok(()),
        }
    }
}

/// Integrator choice and numerical-hygiene thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionOptions {
    /// Method for density matrices.
    pub method: Method,
    /// Method for state vectors (cheap, so tighter by default).
    pub pure_method: Method,
    pub max_steps: usize,
    /// Largest adaptive step (ns).
    pub max_step: f64,
    /// Hygiene checks run every this many accepted steps.
    pub monitor_every: usize,
    pub norm_tolerance: f64,
    pub trace_tolerance: f64,
    /// Most negative eigenvalue tolerated at the end of a segment.
    pub negativity_tolerance: f64,
    /// Full eigenvalue checks only up to this dimension; above it the diagonal is checked.
    pub eigen_check_max_dim: usize,
    /// Largest population allowed in the top two Fock levels.
    pub leakage_tolerance: f64,
    pub execution: Execution,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        Self {
            method: Method::Adaptive {
                rtol: 1e-8,
                atol: 1e-10,
            },
            pure_method: Method::Adaptive {
                rtol: 1e-10,
                atol: 1e-12,
            },
            max_steps: 2_000_000,
            max_step: 10.0,
            monitor_every: 1,
            norm_tolerance: 1e-8,
            trace_tolerance: 1e-7,
            negativity_tolerance: 1e-6,
            eigen_check_max_dim: 256,
            leakage_tolerance: crate::tensorspace::LEAKAGE_TOLERANCE,
            execution: Execution::default(),
        }
    }
}

impl EvolutionOptions {
    pub fn fixed_step(dt: f64) -> Self {
        Self {
            method: Method::Rk4 { dt },
            pure_method: Method::Rk4 { dt },
            ..Self::default()
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.method.validate()?;
        self.pure_method.validate()?;
        if self.monitor_every == 0 {
            return Err(Error::InvalidParameter("monitor_every must be ≥ 1".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParameter("max_step must be > 0".into()));
        }
        Ok(())
    }
}
