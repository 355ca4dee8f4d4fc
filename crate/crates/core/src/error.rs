use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} out of range {lo}..={hi}")]
    Range {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("{}x = {x} lies outside the open domain ({lo}, {hi})", axis.map(|a| format!("axis {}: ", a + 1)).unwrap_or_default())]
    Domain {
        axis: Option<usize>,
        x: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate parameters: {function} = {value:e} vanishes")]
    Degenerate { function: String, value: f64 },

    #[error("stencil at x = {x} with step {h} leaves the domain ({lo}, {hi})")]
    Stencil { x: f64, h: f64, lo: f64, hi: f64 },

    #[error("integration blew up at x = {x} (|v| = {v:e})")]
    Singularity { x: f64, v: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn range(what: &'static str, value: usize, lo: usize, hi: usize) -> Self {
        Error::Range {
            what,
            value: value as i64,
            lo: lo as i64,
            hi: hi as i64,
        }
    }

    /// Attach an axis index to a domain error raised by a single profile.
    pub(crate) fn on_axis(self, axis: usize) -> Self {
        match self {
            Error::Domain { x, lo, hi, .. } => Error::Domain {
                axis: Some(axis),
                x,
                lo,
                hi,
            },
            other => other,
        }
    }
}
