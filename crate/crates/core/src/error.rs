use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy { achieved: f64, requested: f64 },

    #[error("degenerate lineshape: {0}; treat the spectrum as a delta function analytically")]
    DegenerateLineshape(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("degenerate kinetics: {0}")]
    DegenerateKinetics(String),

    #[error("transfer criterion never crossed 1/e within t_max = {t_max} fs")]
    NoCrossing { t_max: f64 },

    #[error("plateau not converged")]
    PlateauNotConverged,

    #[error("integrator failure at t = {t} fs: {msg}")]
    Integrator { t: f64, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    Parse { key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            msg: msg.into(),
        }
    }
}
