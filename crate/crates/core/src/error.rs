use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("integration diverged at t = {t:e} s")]
    Divergence { t: f64 },
    #[error("tabulated drive covers [{start:e}, {end:e}] s but [{req_start:e}, {req_end:e}] s was requested")]
    Coverage {
        start: f64,
        end: f64,
        req_start: f64,
        req_end: f64,
    },
    #[error("probe amplitude too large: quadratic response is {ratio:.3e} of linear")]
    AmplitudeTooLarge { ratio: f64 },
    #[error("grid spacing {spacing:e} rad/s does not resolve features of width {required:e} rad/s")]
    Resolution { spacing: f64, required: f64 },
    #[error("infeasible geometry: thermal radius {r_t:e} m is not inside homogeneity radius {r_l:e} m")]
    InfeasibleGeometry { r_t: f64, r_l: f64 },
    #[error("search range [{lo:e}, {hi:e}] rad/s does not bracket a feasible optimum")]
    Bracketing { lo: f64, hi: f64 },
    #[error("invalid pulse sequence: {0}")]
    Sequence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
