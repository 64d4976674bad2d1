use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A finite-difference stencil would reach the Hopf link, where the
    /// coordinate chart is singular.
    #[error("point s = {s} lies within h = {h} of the Hopf link")]
    DegenerateCoordinate { s: f64, h: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("possible multiple root in ({a}, {b})")]
    PossibleMultipleRoot { a: f64, b: f64 },

    #[error("wave vector b is not perpendicular to k (b.k = {dot})")]
    NotPerpendicular { dot: String },

    #[error("not an eigenfunction: {0}")]
    NotEigenfunction(String),

    #[error("field vanishes (|V| = {norm:e})")]
    VanishingField { norm: f64 },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("criterion not applicable: {0}")]
    Inapplicable(String),

    #[error("eigenvalues differ: {0} vs {1}")]
    EigenvalueMismatch(f64, f64),

    #[error("quadrature under-resolved: {value} is {distance:e} from the nearest integer")]
    UnderResolved { value: f64, distance: f64 },

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("collinearity found off the Hopf link at s = {s}")]
    OffLinkCollinearity { s: f64 },

    #[error("no certified eigenfunction after {trials} trials (best margin {best_margin:e})")]
    SearchFailed { trials: usize, best_margin: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
