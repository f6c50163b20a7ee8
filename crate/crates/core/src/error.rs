use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("grid has {cells} cells, above the cap of {cap}")]
    CellCap { cells: usize, cap: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("non-finite value at cell {0}")]
    NonFinite(usize),

    #[error("invalid test function: {0}")]
    InvalidSpec(String),

    #[error("normalization undefined for the zero function")]
    ZeroFunction,

    #[error("parameter `{name}` = {value} outside {window}")]
    ParameterWindow {
        name: &'static str,
        value: f64,
        window: &'static str,
    },

    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("product-operator axiom violated: {0}")]
    ProductAxiom(String),

    #[error("t = {t} lies below t0 = {t0}; the small-t branch of the bound applies")]
    BelowThreshold { t: f64, t0: f64 },

    #[error("input norm {norm} exceeds 1")]
    NormTooLarge { norm: f64 },

    #[error("empty radius set")]
    EmptyRadii,

    #[error("maximal function vanishes at cell {0} where the potential does not")]
    MaximalVanishes(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn window(name: &'static str, value: f64, window: &'static str) -> Error {
    Error::ParameterWindow {
        name,
        value,
        window,
    }
}
