use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("quadrature did not converge: error estimate {achieved:e} exceeds tolerance {requested:e} after {subintervals} subintervals")]
    Quadrature {
        achieved: f64,
        requested: f64,
        subintervals: usize,
    },

    /// The series hit its hard cap before the tail bound met the tolerance.
    #[error("series summation stopped at the hard cap of {terms} terms with unresolved tail bound {tail_bound:e}")]
    SeriesCap { terms: usize, tail_bound: f64 },

    #[error("{0}")]
    Unsupported(&'static str),

    /// The divergence is infinite because the first law has mass where the
    /// second has none.
    #[error("support mismatch: mass at y = {y} where the candidate distribution vanishes")]
    SupportMismatch { y: u64 },

    #[error("numerical failure at q = {q}: {cause}")]
    AtQ { q: f64, cause: Box<Error> },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn at_q(self, q: f64) -> Self {
        match self {
            e @ Error::AtQ { .. } => e,
            e => Error::AtQ {
                q,
                cause: Box::new(e),
            },
        }
    }

    /// True for errors that stem from invalid input rather than a numerical
    /// breakdown.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Domain { .. } | Error::Unsupported(_) => true,
            Error::AtQ { cause, .. } => cause.is_domain(),
            _ => false,
        }
    }
}
