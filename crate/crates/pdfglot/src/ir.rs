//! Shared intermediate representation of a parsed document.
//!
//! The reader produces a [`DocumentIR`]; every later stage reads it and the
//! renderer builds new page content from it. The IR is immutable after
//! parsing and safe to share across concurrent readers.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use serde::Serialize;

use crate::geom::BBox;
use crate::reader::object::ObjectTable;

/// How raw show-string bytes map to glyph codes and Unicode.
#[derive(Debug, Clone)]
pub enum FontEncoding {
    /// One byte per glyph, decoded through a 256-entry table.
    SimpleByte(Box<[Option<char>; 256]>),
    /// Two-byte CIDs decoded through an embedded ToUnicode CMap.
    CidToUnicode(HashMap<u32, String>),
}

impl FontEncoding {
    /// Bytes consumed per glyph code.
    pub fn code_width(&self) -> usize {
        match self {
            FontEncoding::SimpleByte(_) => 1,
            FontEncoding::CidToUnicode(_) => 2,
        }
    }
}

/// Per-glyph horizontal metrics in 1/1000 em units.
#[derive(Debug, Clone)]
pub struct FontMetrics {
    /// Advance width per glyph code; codes not present fall back to
    /// `missing_width`.
    pub widths: HashMap<u32, f64>,
    /// Width used for codes without an entry (the font's MissingWidth when
    /// declared, else 500).
    pub missing_width: f64,
    pub ascent: f64,
    pub descent: f64,
}

impl FontMetrics {
    pub fn width(&self, code: u32) -> f64 {
        self.widths.get(&code).copied().unwrap_or(self.missing_width)
    }
}

/// Where a font's definition lives in the source document, for verbatim
/// re-use of the original font object when emitting output.
#[derive(Debug, Clone)]
pub enum FontOrigin {
    /// The resource entry was an indirect reference to this object.
    Object((u32, u16)),
    /// The resource entry was an inline dictionary; re-serialized on emit.
    Inline(crate::reader::object::Object),
}

/// A font referenced by extracted text.
#[derive(Debug, Clone)]
pub struct FontRef {
    /// Document-wide key ("14_0" for object 14 gen 0, or a synthetic key for
    /// inline dictionaries).
    pub id: String,
    /// BaseFont name, e.g. "Helvetica" or "ABCDEF+NotoSans".
    pub base_name: String,
    pub metrics: FontMetrics,
    pub encoding: FontEncoding,
    pub origin: FontOrigin,
}

/// One element of a show operation: encoded bytes or a TJ pen adjustment in
/// thousandths of an em.
#[derive(Debug, Clone, PartialEq)]
pub enum ShowPiece {
    Bytes(Vec<u8>),
    Adjust(f64),
}

/// One positioned text fragment: a maximal show-string drawn under one
/// unchanged text state.
#[derive(Debug, Clone)]
pub struct TextRun {
    /// Decoded Unicode text; never empty.
    pub text: String,
    pub bbox: BBox,
    /// Key into [`DocumentIR::fonts`].
    pub font: String,
    /// Font size in points.
    pub size: f64,
    /// 0-based page index.
    pub page_index: usize,
    /// Show structure (bytes and kern adjustments), kept for byte-faithful
    /// re-emission.
    pub pieces: Vec<ShowPiece>,
    /// Concatenated encoded show bytes of `pieces`.
    pub raw_bytes: Vec<u8>,
    /// Baseline rise (Ts) in points.
    pub rise: f64,
    /// Text-space-to-user-space matrix at the run start (Tm x CTM). The pen
    /// origin is `(tm[4], tm[5])`.
    pub tm: [f64; 6],
    /// Total pen advance in text-space points (before the matrix).
    pub advance: f64,
    pub char_spacing: f64,
    pub word_spacing: f64,
    /// Horizontal scaling as a fraction (1.0 = 100%).
    pub h_scale: f64,
    /// Non-axis-aligned runs are extracted but passed through verbatim.
    pub rotated: bool,
}

impl TextRun {
    /// Pen origin on the baseline, in user space.
    pub fn origin(&self) -> (f64, f64) {
        (self.tm[4], self.tm[5])
    }
}

/// One parsed page: geometry, extracted runs, and the decoded content with
/// the spans that must round-trip byte-identically into output.
#[derive(Debug, Clone)]
pub struct PageIR {
    pub index: usize,
    pub media_box: BBox,
    /// Runs in extraction (stream) order.
    pub runs: Vec<TextRun>,
    /// Decoded, concatenated content stream bytes.
    pub content: Vec<u8>,
    /// Spans into `content` holding non-text operators, preserved verbatim.
    pub non_text_ops: Vec<Range<usize>>,
    /// Page dictionary object id.
    pub object_id: (u32, u16),
    /// Page font resource name -> key into [`DocumentIR::fonts`].
    pub resource_fonts: BTreeMap<String, String>,
}

/// A structured diagnostic emitted while processing; never fatal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    /// Pipeline stage that raised it ("reader", "layout", ...).
    pub stage: &'static str,
    pub page: Option<usize>,
    pub message: String,
}

impl Warning {
    pub fn new(stage: &'static str, page: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            stage,
            page,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.page {
            Some(p) => write!(f, "[{} p{}] {}", self.stage, p + 1, self.message),
            None => write!(f, "[{}] {}", self.stage, self.message),
        }
    }
}

/// The parsed document. Immutable after parsing; the renderer constructs new
/// page content rather than mutating this.
#[derive(Debug)]
pub struct DocumentIR {
    pub pages: Vec<PageIR>,
    /// Document-wide font table keyed by [`FontRef::id`].
    pub fonts: BTreeMap<String, FontRef>,
    /// Full object table of the source file, used to copy untouched objects
    /// verbatim into output.
    pub objects: ObjectTable,
    /// Diagnostics collected during parsing.
    pub warnings: Vec<Warning>,
    source: Vec<u8>,
}

impl DocumentIR {
    pub(crate) fn new(
        pages: Vec<PageIR>,
        fonts: BTreeMap<String, FontRef>,
        objects: ObjectTable,
        warnings: Vec<Warning>,
        source: Vec<u8>,
    ) -> Self {
        Self {
            pages,
            fonts,
            objects,
            warnings,
            source,
        }
    }

    /// The original input bytes, retained unaltered.
    pub fn source_bytes(&self) -> &[u8] {
        &self.source
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    /// Font for a resource name on a given page, if present.
    pub fn page_font(&self, page: &PageIR, res_name: &str) -> Option<&FontRef> {
        page.resource_fonts
            .get(res_name)
            .and_then(|key| self.fonts.get(key))
    }
}
