//! Error types, one enum per pipeline stage, unified by [`PipelineError`].

use thiserror::Error;

/// Errors raised while parsing a PDF byte stream.
#[derive(Debug, Error)]
pub enum ReadError {
    #[error("empty input")]
    EmptyInput,
    #[error("malformed PDF: {0}")]
    MalformedPdf(String),
    #[error("encrypted PDF: encryption dictionary present, decryption is not supported")]
    EncryptedPdf,
    #[error("truncated content stream: {0}")]
    TruncatedStream(String),
}

/// Errors raised by the layout-detection backends.
#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("failed to load layout model: {0}")]
    ModelLoad(String),
    #[error("layout model inference failed: {0}")]
    Inference(String),
}

/// Raised when a translation mangled a placeholder sentinel.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaceholderViolation {
    #[error("placeholder U+{0:04X} missing from translation")]
    Missing(u32),
    #[error("placeholder U+{0:04X} duplicated in translation")]
    Duplicated(u32),
    #[error("unknown placeholder U+{0:04X} in translation")]
    Unknown(u32),
}

/// Errors raised by translation services.
#[derive(Debug, Error)]
pub enum ServiceError {
    /// Worth retrying: rate limit, 5xx, timeout.
    #[error("transient service error: {0}")]
    Transient(String),
    /// Not worth retrying: auth failure, bad request.
    #[error("permanent service error: {0}")]
    Permanent(String),
    /// The service answered but the response shape was not understood.
    #[error("protocol error: {0}")]
    Protocol(String),
}

/// Errors raised when registering or constructing services.
#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("service {0:?} is already registered")]
    DuplicateService(String),
    #[error("service {0:?} is not registered")]
    UnknownService(String),
    #[error("service {service:?} requires config key {key:?}")]
    MissingConfig { service: String, key: String },
}

/// Cache-store failures; the pipeline degrades to no-cache on these.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache store unusable: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors raised by prompt templating.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("unknown template variable {{{0}}}")]
    UnknownVariable(String),
}

/// Errors raised while re-rendering and emitting PDFs.
#[derive(Debug, Error)]
pub enum RenderError {
    #[error("font subsetting failed: {0}")]
    FontSubset(String),
    #[error("emit failed: {0}")]
    Emit(String),
    #[error("page count mismatch: original {original}, translated {translated}")]
    PageCountMismatch { original: usize, translated: usize },
}

/// Errors raised parsing a page-selection spec like "1-3,5".
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BadPageSpec {
    #[error("bad page spec {0:?}: {1}")]
    Invalid(String, String),
}

/// Umbrella error for the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    PageSpec(#[from] BadPageSpec),
    #[error("page index {index} out of range: document has {pages} pages")]
    PageOutOfRange { index: usize, pages: usize },
    #[error("cancelled")]
    Cancelled,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
