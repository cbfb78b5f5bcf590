//! Layout-preserving PDF translation.
//!
//! `pdfglot` translates PDF documents while keeping their original layouts:
//! it extracts positioned text from the content streams, detects layout
//! regions, routes paragraph text through a pluggable translation service,
//! and re-renders the translation into the original bounding boxes, emitting
//! a monolingual and a bilingual (interleaved) PDF.
//!
//! # Pipeline
//!
//! ```text
//! bytes -> reader -> layout -> segment -> translate -> render -> (mono, dual)
//!          parse     detect    assemble   service +    line fill
//!          extract   assign    protect    cache        subset + emit
//! ```
//!
//! The end-to-end entry point is [`pipeline::translate_stream`]. Each stage
//! is usable on its own; see the module docs.

pub mod corpus;
pub mod error;
pub mod geom;
pub mod ir;
pub mod layout;
pub mod pipeline;
pub mod reader;
pub mod render;
pub mod segment;
pub mod translate;

pub use error::PipelineError;
pub use geom::BBox;
pub use ir::{DocumentIR, FontRef, PageIR, TextRun};
pub use pipeline::{translate_stream, CancellationToken, PipelineParams, RunReport};
