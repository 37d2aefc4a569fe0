use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed ARFF at line {line}: {reason}")]
    MalformedArff { line: usize, reason: String },

    #[error("description is missing required key `{0}`")]
    MissingKey(String),

    #[error("cannot parse value `{value}` for key `{key}`")]
    UnparsableValue { key: String, value: String },

    #[error("inconsistent scenario: {0}")]
    InconsistentScenario(String),

    #[error("network error fetching {url}: {reason}")]
    Network { url: String, reason: String },

    #[error("scenario directory {} is missing {file}", dir.display())]
    IncompleteScenario { dir: PathBuf, file: String },

    #[error("degenerate dataset `{name}`: {reason}")]
    DegenerateDataset { name: String, reason: String },

    #[error("K = {k} exceeds feature count {d}")]
    KTooLarge { k: usize, d: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ANOVA needs at least two non-empty groups")]
    InsufficientGroups,

    #[error("collection is empty")]
    EmptyCollection,

    #[error("class {class} has {count} member(s); stratified split needs at least 2")]
    ClassTooSmall { class: usize, count: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.into(),
            source,
        })
    }
}
