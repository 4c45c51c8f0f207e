use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("document {id:?}: rationale span {start}..{end} out of bounds for {len} tokens")]
    SpanOutOfBounds {
        id: String,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("vocabulary is empty after applying min_df = {min_df}")]
    EmptyVocabulary { min_df: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model was trained against vocabulary {model}, but vocabulary {vocab} was supplied")]
    VocabularyMismatch { model: String, vocab: String },

    #[error("document {0:?} has no tokens")]
    EmptyDocument(String),

    #[error("document {id:?} has {len} tokens; at least {min} required")]
    NotSampleable { id: String, len: usize, min: usize },

    #[error("class {class} has {count} documents; at least {k} required for {k}-fold split")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        k: usize,
    },

    #[error("fold {0} has no positive test examples")]
    NoPositives(usize),

    #[error("missing model: {0}")]
    MissingModel(&'static str),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
