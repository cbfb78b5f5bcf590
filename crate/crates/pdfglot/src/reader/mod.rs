//! PDF parsing: object/xref layer, content-stream tokenization, and
//! positioned-text extraction into [`DocumentIR`].
//!
//! Supported subset: unencrypted PDF 1.4-1.7, Flate/ASCIIHex/LZW filters
//! (with PNG predictors), classic xref tables plus xref/object streams,
//! simple fonts and CID fonts with ToUnicode. Encrypted files are an
//! explicit error; unsupported constructs degrade to warnings, never to
//! silent drops.

pub mod content;
pub mod extract;
pub mod filters;
pub mod font;
pub mod object;
pub mod tables;
pub mod xref;

use std::collections::BTreeMap;

use crate::error::ReadError;
use crate::geom::BBox;
use crate::ir::{DocumentIR, FontOrigin, FontRef, PageIR, Warning};
use crate::reader::object::{Dict, Object, ObjectTable};

pub use content::{tokenize_content_stream, Operator};
pub use extract::{extract_text_runs, non_text_spans, PageContext};
pub use font::decode_string;

/// US Letter, used when a page tree carries no MediaBox at all.
const DEFAULT_MEDIA_BOX: BBox = BBox {
    x0: 0.0,
    y0: 0.0,
    x1: 612.0,
    y1: 792.0,
};

/// Parses a PDF byte stream into the shared document representation.
pub fn parse_document(bytes: &[u8]) -> Result<DocumentIR, ReadError> {
    if bytes.is_empty() {
        return Err(ReadError::EmptyInput);
    }
    if !bytes.starts_with(b"%PDF-") {
        return Err(ReadError::MalformedPdf("missing %PDF- header".into()));
    }

    let mut warnings = Vec::new();
    let table = xref::load_objects(bytes, &mut warnings)?;

    let root = table
        .trailer
        .get("Root")
        .map(|o| table.resolve(o))
        .and_then(Object::as_dict)
        .ok_or_else(|| ReadError::MalformedPdf("trailer has no /Root catalog".into()))?;
    let pages_root = table
        .dict_get(root, "Pages")
        .and_then(Object::as_dict)
        .ok_or_else(|| ReadError::MalformedPdf("catalog has no /Pages".into()))?;

    let mut page_nodes = Vec::new();
    collect_pages(&table, pages_root, None, &Inherited::default(), &mut page_nodes, 0)?;
    if page_nodes.is_empty() {
        return Err(ReadError::MalformedPdf("document has no pages".into()));
    }

    let mut fonts: BTreeMap<String, FontRef> = BTreeMap::new();
    let mut pages = Vec::with_capacity(page_nodes.len());
    for (index, node) in page_nodes.into_iter().enumerate() {
        let page = build_page(&table, index, node, &mut fonts, &mut warnings)?;
        pages.push(page);
    }

    Ok(DocumentIR::new(pages, fonts, table, warnings, bytes.to_vec()))
}

/// Attributes inherited down the page tree.
#[derive(Default, Clone)]
struct Inherited {
    media_box: Option<BBox>,
    resources: Option<Dict>,
}

struct PageNode {
    dict: Dict,
    object_id: (u32, u16),
    inherited: Inherited,
}

fn collect_pages(
    table: &ObjectTable,
    node: &Dict,
    node_id: Option<(u32, u16)>,
    inherited: &Inherited,
    out: &mut Vec<PageNode>,
    depth: usize,
) -> Result<(), ReadError> {
    if depth > 64 {
        return Err(ReadError::MalformedPdf("page tree too deep (cycle?)".into()));
    }
    let mut inh = inherited.clone();
    if let Some(mb) = table.dict_get(node, "MediaBox") {
        if let Some(b) = array_to_bbox(table, mb) {
            inh.media_box = Some(b);
        }
    }
    if let Some(res) = table.dict_get(node, "Resources").and_then(Object::as_dict) {
        inh.resources = Some(res.clone());
    }
    let node_type = table.dict_get(node, "Type").and_then(Object::as_name);
    match node_type {
        Some("Pages") | None => {
            let kids = table
                .dict_get(node, "Kids")
                .and_then(Object::as_array)
                .ok_or_else(|| ReadError::MalformedPdf("/Pages node without /Kids".into()))?
                .to_vec();
            for kid in kids {
                let kid_id = kid.as_ref_id();
                let kid_dict = table
                    .resolve(&kid)
                    .as_dict()
                    .ok_or_else(|| ReadError::MalformedPdf("page tree kid is not a dict".into()))?
                    .clone();
                collect_pages(table, &kid_dict, kid_id, &inh, out, depth + 1)?;
            }
            Ok(())
        }
        Some("Page") => {
            out.push(PageNode {
                dict: node.clone(),
                object_id: node_id.unwrap_or((0, 0)),
                inherited: inh,
            });
            Ok(())
        }
        Some(other) => Err(ReadError::MalformedPdf(format!(
            "unexpected page tree node type /{other}"
        ))),
    }
}

fn array_to_bbox(table: &ObjectTable, obj: &Object) -> Option<BBox> {
    let arr = table.resolve(obj).as_array()?;
    if arr.len() < 4 {
        return None;
    }
    let v: Vec<f64> = arr
        .iter()
        .filter_map(|o| table.resolve(o).as_f64())
        .collect();
    if v.len() < 4 {
        return None;
    }
    Some(BBox::new(v[0], v[1], v[2], v[3]))
}

fn build_page(
    table: &ObjectTable,
    index: usize,
    node: PageNode,
    fonts: &mut BTreeMap<String, FontRef>,
    warnings: &mut Vec<Warning>,
) -> Result<PageIR, ReadError> {
    let media_box = node.inherited.media_box.unwrap_or_else(|| {
        warnings.push(Warning::new(
            "reader",
            Some(index),
            "page has no MediaBox; assuming US Letter",
        ));
        DEFAULT_MEDIA_BOX
    });

    // decode and concatenate the page's content stream(s)
    let mut content = Vec::new();
    match node.dict.get("Contents").map(|o| table.resolve(o)) {
        Some(Object::Stream(s)) => {
            append_decoded(table, s, &mut content, index, warnings);
        }
        Some(Object::Array(parts)) => {
            for part in parts.clone() {
                if let Object::Stream(s) = table.resolve(&part) {
                    append_decoded(table, s, &mut content, index, warnings);
                }
            }
        }
        Some(Object::Null) | None => {
            warnings.push(Warning::new("reader", Some(index), "page has no content stream"));
        }
        Some(other) => {
            return Err(ReadError::MalformedPdf(format!(
                "page {index} /Contents is {other:?}"
            )))
        }
    }

    // font resources
    let mut resource_fonts = BTreeMap::new();
    let resources = node.dict.get("Resources").map(|o| table.resolve(o));
    let resources = match resources.and_then(Object::as_dict) {
        Some(r) => Some(r.clone()),
        None => node.inherited.resources.clone(),
    };
    if let Some(res) = &resources {
        if let Some(font_dict) = table.dict_get(res, "Font").and_then(Object::as_dict) {
            for (res_name, entry) in font_dict {
                let (key, origin, dict) = match entry {
                    Object::Ref(n, g) => {
                        let Some(d) = table.get((*n, *g)).and_then(Object::as_dict) else {
                            warnings.push(Warning::new(
                                "reader",
                                Some(index),
                                format!("font /{res_name} points at missing object"),
                            ));
                            continue;
                        };
                        (format!("{n}_{g}"), FontOrigin::Object((*n, *g)), d.clone())
                    }
                    Object::Dict(d) => (
                        format!("p{index}_{res_name}"),
                        FontOrigin::Inline(Object::Dict(d.clone())),
                        d.clone(),
                    ),
                    other => {
                        warnings.push(Warning::new(
                            "reader",
                            Some(index),
                            format!("font /{res_name} is {other:?}; skipped"),
                        ));
                        continue;
                    }
                };
                fonts
                    .entry(key.clone())
                    .or_insert_with(|| font::build_font(table, key.clone(), origin, &dict, warnings));
                resource_fonts.insert(res_name.clone(), key);
            }
        }
    }

    let (ops, mut tok_warnings) = tokenize_content_stream(&content)?;
    for w in &mut tok_warnings {
        w.page = Some(index);
    }
    warnings.append(&mut tok_warnings);

    let ctx = PageContext {
        page_index: index,
        media_box,
        resource_fonts: &resource_fonts,
        fonts,
    };
    let runs = extract_text_runs(&ops, &ctx, warnings);
    let spans = non_text_spans(&ops);

    Ok(PageIR {
        index,
        media_box,
        runs,
        content,
        non_text_ops: spans,
        object_id: node.object_id,
        resource_fonts,
    })
}

fn append_decoded(
    table: &ObjectTable,
    stream: &object::Stream,
    content: &mut Vec<u8>,
    page: usize,
    warnings: &mut Vec<Warning>,
) {
    match filters::decode_stream(table, &stream.dict, &stream.data) {
        Ok(mut d) => {
            if !content.is_empty() {
                content.push(b'\n');
            }
            content.append(&mut d);
        }
        Err(e) => warnings.push(Warning::new(
            "reader",
            Some(page),
            format!("content stream undecodable ({e}); page text skipped"),
        )),
    }
}
