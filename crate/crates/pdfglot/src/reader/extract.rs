//! The extraction interpreter: walks tokenized operators, tracks graphics
//! and text state, and produces positioned [`TextRun`]s.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::geom::BBox;
use crate::ir::{FontEncoding, FontRef, ShowPiece, TextRun, Warning};
use crate::reader::content::Operator;
use crate::reader::font::decode_string;
use crate::reader::object::Object;

/// A TJ pen gap wider than this fraction of an em starts a new run.
const RUN_SPLIT_GAP_EM: f64 = 0.5;

pub type Matrix = [f64; 6];

pub const IDENTITY: Matrix = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0];

/// `a` applied first, then `b`.
pub fn mat_mul(a: Matrix, b: Matrix) -> Matrix {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
        a[4] * b[0] + a[5] * b[2] + b[4],
        a[4] * b[1] + a[5] * b[3] + b[5],
    ]
}

pub fn translation(tx: f64, ty: f64) -> Matrix {
    [1.0, 0.0, 0.0, 1.0, tx, ty]
}

pub fn apply(m: Matrix, x: f64, y: f64) -> (f64, f64) {
    (m[0] * x + m[2] * y + m[4], m[1] * x + m[3] * y + m[5])
}

#[derive(Debug, Clone)]
struct TextState {
    font_res: Option<String>,
    size: f64,
    char_spacing: f64,
    word_spacing: f64,
    h_scale: f64,
    leading: f64,
    rise: f64,
}

impl Default for TextState {
    fn default() -> Self {
        Self {
            font_res: None,
            size: 0.0,
            char_spacing: 0.0,
            word_spacing: 0.0,
            h_scale: 1.0,
            leading: 0.0,
            rise: 0.0,
        }
    }
}

/// Page-level inputs the interpreter needs.
pub struct PageContext<'a> {
    pub page_index: usize,
    pub media_box: BBox,
    /// Page resource name -> document font key.
    pub resource_fonts: &'a BTreeMap<String, String>,
    /// Document font table.
    pub fonts: &'a BTreeMap<String, FontRef>,
}

struct OpenRun {
    trm: Matrix,
    font_key: String,
    text: String,
    pieces: Vec<ShowPiece>,
    advance: f64,
    state: TextState,
}

struct Interp<'a> {
    ctx: &'a PageContext<'a>,
    ctm: Matrix,
    stack: Vec<(Matrix, TextState)>,
    text: TextState,
    tm: Matrix,
    tlm: Matrix,
    in_text: bool,
    run: Option<OpenRun>,
    runs: Vec<TextRun>,
    warnings: &'a mut Vec<Warning>,
}

impl<'a> Interp<'a> {
    fn current_font(&self) -> Option<&'a FontRef> {
        let res = self.text.font_res.as_deref()?;
        let key = self.ctx.resource_fonts.get(res)?;
        self.ctx.fonts.get(key)
    }

    fn warn(&mut self, msg: impl Into<String>) {
        self.warnings
            .push(Warning::new("reader", Some(self.ctx.page_index), msg));
    }

    fn flush(&mut self) {
        let Some(run) = self.run.take() else { return };
        if run.text.is_empty() {
            return;
        }
        let font = match self.ctx.fonts.get(&run.font_key) {
            Some(f) => f,
            None => return,
        };
        let ascent = font.metrics.ascent / 1000.0 * run.state.size + run.state.rise;
        let descent = font.metrics.descent / 1000.0 * run.state.size + run.state.rise;
        let corners = [
            apply(run.trm, 0.0, descent),
            apply(run.trm, run.advance, descent),
            apply(run.trm, run.advance, ascent),
            apply(run.trm, 0.0, ascent),
        ];
        let xs = corners.iter().map(|c| c.0);
        let ys = corners.iter().map(|c| c.1);
        let mut bbox = BBox {
            x0: xs.clone().fold(f64::INFINITY, f64::min),
            y0: ys.clone().fold(f64::INFINITY, f64::min),
            x1: xs.fold(f64::NEG_INFINITY, f64::max),
            y1: ys.fold(f64::NEG_INFINITY, f64::max),
        };
        let limit = self.ctx.media_box.expand(1.0);
        if !limit.contains(&bbox) {
            self.warnings.push(Warning::new(
                "reader",
                Some(self.ctx.page_index),
                format!(
                    "text run {:?} extends outside the page box; clamped",
                    truncate_for_log(&run.text)
                ),
            ));
            bbox = bbox.clamp_to(&limit);
        }
        let rotated = !(run.trm[1].abs() < 1e-9
            && run.trm[2].abs() < 1e-9
            && run.trm[0] > 0.0
            && run.trm[3] > 0.0);
        let raw_bytes = run
            .pieces
            .iter()
            .flat_map(|p| match p {
                ShowPiece::Bytes(b) => b.clone(),
                ShowPiece::Adjust(_) => Vec::new(),
            })
            .collect();
        self.runs.push(TextRun {
            text: run.text,
            bbox,
            font: run.font_key,
            size: run.state.size,
            page_index: self.ctx.page_index,
            pieces: run.pieces,
            raw_bytes,
            rise: run.state.rise,
            tm: run.trm,
            advance: run.advance,
            char_spacing: run.state.char_spacing,
            word_spacing: run.state.word_spacing,
            h_scale: run.state.h_scale,
            rotated,
        });
    }

    fn show(&mut self, raw: &[u8]) {
        if raw.is_empty() {
            return;
        }
        if !self.in_text {
            self.warn("show string outside BT/ET; ignored");
            return;
        }
        let Some(font) = self.current_font() else {
            self.warn("show string with no usable font; dropped");
            return;
        };
        let simple = matches!(font.encoding, FontEncoding::SimpleByte(_));
        let (text, codes, undecodable) = decode_string(font, raw);
        if undecodable > 0 {
            self.warn(format!(
                "{undecodable} code(s) not mapped to Unicode in font {:?}; replaced with U+FFFD",
                font.base_name
            ));
        }
        if self.run.is_none() {
            let font_key = self
                .text
                .font_res
                .as_deref()
                .and_then(|r| self.ctx.resource_fonts.get(r))
                .cloned()
                .unwrap_or_default();
            self.run = Some(OpenRun {
                trm: mat_mul(self.tm, self.ctm),
                font_key,
                text: String::new(),
                pieces: Vec::new(),
                advance: 0.0,
                state: self.text.clone(),
            });
        }
        // advance the pen code by code
        let mut total_tx = 0.0;
        for &(code, _) in &codes {
            let w0 = font.metrics.width(code) / 1000.0;
            let is_space = simple && code == 32;
            let tx = (w0 * self.text.size
                + self.text.char_spacing
                + if is_space { self.text.word_spacing } else { 0.0 })
                * self.text.h_scale;
            total_tx += tx;
        }
        let run = self.run.as_mut().expect("run opened above");
        run.text.push_str(&text);
        match run.pieces.last_mut() {
            Some(ShowPiece::Bytes(b)) => b.extend_from_slice(raw),
            _ => run.pieces.push(ShowPiece::Bytes(raw.to_vec())),
        }
        run.advance += total_tx;
        self.tm = mat_mul(translation(total_tx, 0.0), self.tm);
    }

    fn next_line(&mut self) {
        self.flush();
        self.tlm = mat_mul(translation(0.0, -self.text.leading), self.tlm);
        self.tm = self.tlm;
    }
}

fn truncate_for_log(s: &str) -> String {
    s.chars().take(24).collect()
}

/// Runs the interpreter over a tokenized content stream.
pub fn extract_text_runs(
    ops: &[Operator],
    ctx: &PageContext,
    warnings: &mut Vec<Warning>,
) -> Vec<TextRun> {
    let mut it = Interp {
        ctx,
        ctm: IDENTITY,
        stack: Vec::new(),
        text: TextState::default(),
        tm: IDENTITY,
        tlm: IDENTITY,
        in_text: false,
        run: None,
        runs: Vec::new(),
        warnings,
    };

    for op in ops {
        match op.name.as_str() {
            "BT" => {
                it.flush();
                it.in_text = true;
                it.tm = IDENTITY;
                it.tlm = IDENTITY;
            }
            "ET" => {
                it.flush();
                it.in_text = false;
            }
            "Tf" => {
                it.flush();
                it.text.font_res = op.operands.first().and_then(Object::as_name).map(str::to_owned);
                it.text.size = op.num(1).unwrap_or(0.0);
                if it.current_font().is_none() {
                    let name = it.text.font_res.clone().unwrap_or_default();
                    it.warn(format!("font resource /{name} not found on page"));
                }
            }
            "Tc" => {
                it.flush();
                it.text.char_spacing = op.num(0).unwrap_or(0.0);
            }
            "Tw" => {
                it.flush();
                it.text.word_spacing = op.num(0).unwrap_or(0.0);
            }
            "Tz" => {
                it.flush();
                it.text.h_scale = op.num(0).unwrap_or(100.0) / 100.0;
            }
            "TL" => {
                it.text.leading = op.num(0).unwrap_or(0.0);
            }
            "Ts" => {
                it.flush();
                it.text.rise = op.num(0).unwrap_or(0.0);
            }
            "Tr" => {
                it.flush();
            }
            "Td" => {
                it.flush();
                let (tx, ty) = (op.num(0).unwrap_or(0.0), op.num(1).unwrap_or(0.0));
                it.tlm = mat_mul(translation(tx, ty), it.tlm);
                it.tm = it.tlm;
            }
            "TD" => {
                it.flush();
                let (tx, ty) = (op.num(0).unwrap_or(0.0), op.num(1).unwrap_or(0.0));
                it.text.leading = -ty;
                it.tlm = mat_mul(translation(tx, ty), it.tlm);
                it.tm = it.tlm;
            }
            "Tm" => {
                it.flush();
                let m: Vec<f64> = (0..6).map(|i| op.num(i).unwrap_or(0.0)).collect();
                it.tlm = [m[0], m[1], m[2], m[3], m[4], m[5]];
                it.tm = it.tlm;
            }
            "T*" => it.next_line(),
            "Tj" => {
                if let Some(Object::Str(s)) = op.operands.first() {
                    it.show(&s.clone());
                }
            }
            "'" => {
                it.next_line();
                if let Some(Object::Str(s)) = op.operands.first() {
                    it.show(&s.clone());
                }
            }
            "\"" => {
                it.flush();
                it.text.word_spacing = op.num(0).unwrap_or(0.0);
                it.text.char_spacing = op.num(1).unwrap_or(0.0);
                it.next_line();
                if let Some(Object::Str(s)) = op.operands.get(2) {
                    it.show(&s.clone());
                }
            }
            "TJ" => {
                if let Some(Object::Array(items)) = op.operands.first() {
                    for item in items.clone() {
                        match item {
                            Object::Str(s) => it.show(&s),
                            Object::Int(_) | Object::Real(_) => {
                                let n = item.as_f64().unwrap_or(0.0);
                                let gap_em = -n / 1000.0;
                                if gap_em > RUN_SPLIT_GAP_EM {
                                    it.flush();
                                }
                                let tx = -n / 1000.0 * it.text.size * it.text.h_scale;
                                if let Some(run) = it.run.as_mut() {
                                    run.advance += tx;
                                    run.pieces.push(ShowPiece::Adjust(n));
                                }
                                it.tm = mat_mul(translation(tx, 0.0), it.tm);
                            }
                            _ => {}
                        }
                    }
                }
            }
            "q" => {
                it.flush();
                it.stack.push((it.ctm, it.text.clone()));
            }
            "Q" => {
                it.flush();
                if let Some((ctm, text)) = it.stack.pop() {
                    it.ctm = ctm;
                    it.text = text;
                } else {
                    it.warn("unbalanced Q; ignored");
                }
            }
            "cm" => {
                it.flush();
                let m: Vec<f64> = (0..6).map(|i| op.num(i).unwrap_or(0.0)).collect();
                it.ctm = mat_mul([m[0], m[1], m[2], m[3], m[4], m[5]], it.ctm);
            }
            _ => {
                if it.in_text && !is_harmless_in_text(&op.name) {
                    it.warn(format!(
                        "operator {:?} inside a text object is outside the supported subset; dropped",
                        op.name
                    ));
                }
            }
        }
    }
    it.flush();
    it.runs
}

/// Operators that may appear inside BT/ET without affecting extraction.
fn is_harmless_in_text(name: &str) -> bool {
    matches!(
        name,
        "g" | "G" | "rg" | "RG" | "k" | "K" | "cs" | "CS" | "sc" | "SC" | "scn" | "SCN" | "gs"
            | "w" | "J" | "j" | "M" | "d" | "ri" | "i" | "BMC" | "BDC" | "EMC" | "MP" | "DP"
            | "BX" | "EX"
    )
}

/// Spans of operators that must be preserved verbatim in output: everything
/// except text objects and text-state operators.
pub fn non_text_spans(ops: &[Operator]) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut in_text = false;
    for op in ops {
        match op.name.as_str() {
            "BT" => in_text = true,
            "ET" => in_text = false,
            "Tc" | "Tw" | "Tz" | "TL" | "Tf" | "Tr" | "Ts" | "Td" | "TD" | "Tm" | "T*" | "Tj"
            | "TJ" | "'" | "\"" => {}
            _ => {
                if !in_text {
                    spans.push(op.byte_span.clone());
                }
            }
        }
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{FontMetrics, FontOrigin};
    use crate::reader::content::tokenize_content_stream;
    use crate::reader::tables::{base_encoding_table, BaseEncoding};
    use std::collections::HashMap;

    fn helvetica() -> FontRef {
        let m = crate::reader::tables::builtin_metrics("Helvetica").unwrap();
        let mut widths = HashMap::new();
        for (i, &w) in m.widths.iter().enumerate() {
            widths.insert(32 + i as u32, f64::from(w));
        }
        FontRef {
            id: "f1".into(),
            base_name: "Helvetica".into(),
            metrics: FontMetrics {
                widths,
                missing_width: 500.0,
                ascent: m.ascent,
                descent: m.descent,
            },
            encoding: FontEncoding::SimpleByte(base_encoding_table(BaseEncoding::WinAnsi)),
            origin: FontOrigin::Object((5, 0)),
        }
    }

    fn extract(content: &[u8]) -> Vec<TextRun> {
        let fonts: BTreeMap<String, FontRef> = [("f1".to_string(), helvetica())].into();
        let resource_fonts: BTreeMap<String, String> = [("F1".to_string(), "f1".to_string())].into();
        let ctx = PageContext {
            page_index: 0,
            media_box: BBox::new(0.0, 0.0, 612.0, 792.0),
            resource_fonts: &resource_fonts,
            fonts: &fonts,
        };
        let (ops, _) = tokenize_content_stream(content).unwrap();
        let mut warnings = Vec::new();
        extract_text_runs(&ops, &ctx, &mut warnings)
    }

    #[test]
    fn helvetica_hi_advance() {
        // AFM widths: H = 722, i = 222
        let runs = extract(b"BT /F1 12 Tf 72 712 Td (Hi) Tj ET");
        assert_eq!(runs.len(), 1);
        let run = &runs[0];
        assert_eq!(run.text, "Hi");
        assert!((run.bbox.x0 - 72.0).abs() < 1e-9);
        let expected = (722.0 + 222.0) / 1000.0 * 12.0;
        assert!((run.advance - expected).abs() < 1e-9, "advance {}", run.advance);
        assert!((run.bbox.x1 - (72.0 + expected)).abs() < 1e-9);
        // baseline 712, Helvetica ascent 718/descent -207
        assert!((run.bbox.y1 - (712.0 + 0.718 * 12.0)).abs() < 1e-9);
        assert!((run.bbox.y0 - (712.0 - 0.207 * 12.0)).abs() < 1e-9);
    }

    #[test]
    fn tj_kern_gap_splits_runs_and_moves_pen() {
        // -1000 thousandths at 10pt = +10pt pen gap, > 0.5em so it splits
        let runs = extract(b"BT /F1 10 Tf 100 700 Td [(A) -1000 (B)] TJ ET");
        assert_eq!(runs.len(), 2);
        let w_a = 667.0 / 1000.0 * 10.0;
        assert!((runs[0].bbox.x0 - 100.0).abs() < 1e-9);
        let b_start = 100.0 + w_a + 10.0;
        assert!(
            (runs[1].bbox.x0 - b_start).abs() < 1e-9,
            "B starts at {}, expected {b_start}",
            runs[1].bbox.x0
        );
    }

    #[test]
    fn small_tj_kern_stays_in_run() {
        let runs = extract(b"BT /F1 10 Tf 100 700 Td [(A) -120 (B)] TJ ET");
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].text, "AB");
        let w_a = 667.0 / 1000.0 * 10.0;
        let w_b = 667.0 / 1000.0 * 10.0;
        let expected = w_a + 1.2 + w_b;
        assert!((runs[0].advance - expected).abs() < 1e-9);
        assert_eq!(
            runs[0].pieces,
            vec![
                ShowPiece::Bytes(b"A".to_vec()),
                ShowPiece::Adjust(-120.0),
                ShowPiece::Bytes(b"B".to_vec())
            ]
        );
    }

    #[test]
    fn horizontal_scaling_halves_advance() {
        let full = extract(b"BT /F1 10 Tf 0 700 Td (Hi) Tj ET");
        let half = extract(b"BT /F1 10 Tf 50 Tz 0 700 Td (Hi) Tj ET");
        assert!((half[0].advance - full[0].advance / 2.0).abs() < 1e-9);
    }

    #[test]
    fn char_and_word_spacing_apply() {
        let runs = extract(b"BT /F1 10 Tf 2 Tc 5 Tw 0 700 Td (a b) Tj ET");
        let w_a = 556.0 / 100.0;
        let w_sp = 278.0 / 100.0;
        let w_b = 556.0 / 100.0;
        // Tc on every glyph, Tw only on the space
        let expected = (w_a + 2.0) + (w_sp + 2.0 + 5.0) + (w_b + 2.0);
        assert!((runs[0].advance - expected).abs() < 1e-9);
    }

    #[test]
    fn consecutive_shows_merge_into_one_run() {
        let runs = extract(b"BT /F1 10 Tf 0 700 Td (Hel) Tj (lo) Tj ET");
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].text, "Hello");
    }

    #[test]
    fn state_change_starts_new_run() {
        let runs = extract(b"BT /F1 10 Tf 0 700 Td (a) Tj /F1 12 Tf (b) Tj ET");
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].size, 10.0);
        assert_eq!(runs[1].size, 12.0);
    }

    #[test]
    fn rotated_text_is_flagged() {
        let runs = extract(b"BT /F1 10 Tf 0 1 -1 0 300 300 Tm (up) Tj ET");
        assert_eq!(runs.len(), 1);
        assert!(runs[0].rotated);
    }

    #[test]
    fn ctm_scaling_applies_to_geometry() {
        let runs = extract(b"q 2 0 0 2 0 0 cm BT /F1 10 Tf 50 100 Td (H) Tj ET Q");
        let run = &runs[0];
        assert!((run.bbox.x0 - 100.0).abs() < 1e-9);
        let w_h = 722.0 / 100.0;
        assert!((run.bbox.x1 - (100.0 + 2.0 * w_h)).abs() < 1e-9);
        assert!(!run.rotated);
    }

    #[test]
    fn concat_of_run_texts_reproduces_stream_text() {
        let content: &[u8] = b"BT /F1 10 Tf 10 700 Td (one ) Tj [(two) -800 (three)] TJ 0 -14 Td (four) Tj ET";
        let runs = extract(content);
        let all: String = runs.iter().map(|r| r.text.as_str()).collect();
        assert_eq!(all, "one twothreefour");
    }

    #[test]
    fn tokenize_serialize_retokenize_same_runs() {
        let content: &[u8] =
            b"q 0.5 0 0 0.5 10 10 cm BT /F1 24 Tf 100 600 Td (scale) Tj ET Q 1 0 0 RG 10 10 m 50 50 l S";
        let (ops, _) = tokenize_content_stream(content).unwrap();
        let round = crate::reader::content::serialize_operators(content, &ops);
        let a = extract(content);
        let b = extract(&round);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.text, y.text);
            assert!((x.bbox.x0 - y.bbox.x0).abs() < 1e-12);
            assert!((x.bbox.y1 - y.bbox.y1).abs() < 1e-12);
        }
    }

    #[test]
    fn non_text_spans_cover_graphics_only() {
        let content: &[u8] = b"q 1 0 0 1 5 5 cm BT /F1 10 Tf (x) Tj ET 10 10 m 20 20 l S Q";
        let (ops, _) = tokenize_content_stream(content).unwrap();
        let spans = non_text_spans(&ops);
        let text: Vec<String> = spans
            .iter()
            .map(|s| String::from_utf8_lossy(&content[s.clone()]).into_owned())
            .collect();
        assert_eq!(text, vec!["q", "1 0 0 1 5 5 cm", "10 10 m", "20 20 l", "S", "Q"]);
    }
}
