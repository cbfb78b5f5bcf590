//! Paragraph assembly and placeholder protection.
//!
//! Assigned runs become reading-order paragraphs; formula runs and other
//! protected elements are masked behind private-use sentinel scalars so the
//! translation middleware only ever sees plain text.

use crate::error::PlaceholderViolation;
use crate::geom::{union_all, BBox};
use crate::ir::{FontRef, TextRun, Warning};
use crate::layout::{LayoutBox, LayoutClass};
use std::collections::BTreeMap;

/// First sentinel scalar; token k is `U+E000 + k`.
pub const PLACEHOLDER_BASE: u32 = 0xE000;
/// End of the private use area usable for sentinels.
const PLACEHOLDER_LIMIT: u32 = 0xF8FF;

/// Rows are bucketed when baselines sit within this fraction of the line
/// height.
const ROW_TOLERANCE_FACTOR: f64 = 0.6;
/// Same-row runs further apart than this fraction of the font size get a
/// space inserted between them.
const WORD_GAP_FACTOR: f64 = 0.25;
/// Paragraph reading order considers whitespace gaps wider than this.
const ORDER_GAP: f64 = 1.0;

/// A protected run-group: the original runs plus their joint box.
#[derive(Debug, Clone)]
pub struct ProtectedGroup {
    pub runs: Vec<TextRun>,
    pub bbox: BBox,
}

/// Ordered token -> protected-group map; tokens are consecutive private-use
/// scalars starting at U+E000.
#[derive(Debug, Clone, Default)]
pub struct PlaceholderMap {
    entries: Vec<ProtectedGroup>,
}

impl PlaceholderMap {
    pub fn token(index: usize) -> char {
        char::from_u32(PLACEHOLDER_BASE + index as u32).expect("PUA scalar")
    }

    pub fn index_of(token: char) -> Option<usize> {
        let cp = token as u32;
        (PLACEHOLDER_BASE..=PLACEHOLDER_LIMIT)
            .contains(&cp)
            .then(|| (cp - PLACEHOLDER_BASE) as usize)
    }

    pub fn get(&self, token: char) -> Option<&ProtectedGroup> {
        Self::index_of(token).and_then(|i| self.entries.get(i))
    }

    pub fn push(&mut self, group: ProtectedGroup) -> char {
        self.entries.push(group);
        Self::token(self.entries.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, &ProtectedGroup)> {
        self.entries.iter().enumerate().map(|(i, g)| (Self::token(i), g))
    }
}

/// A reading-order translation unit.
#[derive(Debug, Clone)]
pub struct Paragraph {
    pub id: usize,
    pub class: LayoutClass,
    pub bbox: BBox,
    /// Runs in reading order.
    pub runs: Vec<TextRun>,
    /// Separator inserted before each run when joining text; `seps[0]` is
    /// always empty.
    pub seps: Vec<String>,
    /// Text with protected elements replaced by sentinel scalars.
    pub masked_text: String,
    pub placeholders: PlaceholderMap,
    pub translatable: bool,
}

impl Paragraph {
    /// The unmasked source text (protected runs included literally), with
    /// line-break hyphens merged.
    pub fn plain_text(&self) -> String {
        let mut out = String::new();
        for (run, sep) in self.runs.iter().zip(&self.seps) {
            if sep == "\u{0}" {
                if out.ends_with('-') {
                    out.pop();
                }
            } else {
                out.push_str(sep);
            }
            out.push_str(&run.text);
        }
        out
    }
}

/// Groups assigned runs into reading-order paragraphs, one per non-empty
/// box. Rotated runs are left out (callers render them verbatim).
pub fn assemble_paragraphs(
    runs: &[TextRun],
    assignment: &[Option<usize>],
    boxes: &[LayoutBox],
) -> Vec<Paragraph> {
    let mut by_box: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (run_idx, assigned) in assignment.iter().enumerate() {
        if let Some(box_idx) = assigned {
            if !runs[run_idx].rotated {
                by_box.entry(*box_idx).or_default().push(run_idx);
            }
        }
    }

    // column-major reading order over the non-empty boxes
    let non_empty: Vec<usize> = by_box.keys().copied().collect();
    let rects: Vec<BBox> = non_empty.iter().map(|&i| boxes[i].bbox).collect();
    let order = reading_order(&rects);

    let mut paragraphs = Vec::new();
    for (pid, &pos) in order.iter().enumerate() {
        let box_idx = non_empty[pos];
        let members = &by_box[&box_idx];
        let ordered = order_runs_in_box(runs, members);
        let para_runs: Vec<TextRun> = ordered.iter().map(|&i| runs[i].clone()).collect();
        let seps = join_separators(&para_runs);
        let bbox = union_all(&para_runs.iter().map(|r| r.bbox).collect::<Vec<_>>())
            .unwrap_or(boxes[box_idx].bbox);
        let class = boxes[box_idx].class;
        let mut p = Paragraph {
            id: pid,
            class,
            bbox,
            runs: para_runs,
            seps,
            masked_text: String::new(),
            placeholders: PlaceholderMap::default(),
            translatable: class.translatable(),
        };
        p.masked_text = p.plain_text();
        paragraphs.push(p);
    }
    paragraphs
}

/// Top-to-bottom rows (0.6 x line-height tolerance), left-to-right within a
/// row.
fn order_runs_in_box(runs: &[TextRun], members: &[usize]) -> Vec<usize> {
    let mut line_heights: Vec<f64> = members.iter().map(|&i| runs[i].bbox.height()).collect();
    line_heights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let line_height = line_heights
        .get(line_heights.len() / 2)
        .copied()
        .unwrap_or(10.0);
    let tolerance = ROW_TOLERANCE_FACTOR * line_height;

    let mut sorted: Vec<usize> = members.to_vec();
    sorted.sort_by(|&a, &b| {
        runs[b]
            .bbox
            .y0
            .partial_cmp(&runs[a].bbox.y0)
            .unwrap()
            .then(runs[a].bbox.x0.partial_cmp(&runs[b].bbox.x0).unwrap())
            .then(a.cmp(&b))
    });

    // bucket into rows by baseline proximity
    let mut rows: Vec<(f64, Vec<usize>)> = Vec::new();
    for idx in sorted {
        let y = runs[idx].bbox.y0;
        match rows.last_mut() {
            Some((row_y, row)) if (*row_y - y).abs() <= tolerance => row.push(idx),
            _ => rows.push((y, vec![idx])),
        }
    }
    let mut out = Vec::new();
    for (_, mut row) in rows {
        row.sort_by(|&a, &b| {
            runs[a]
                .bbox
                .x0
                .partial_cmp(&runs[b].bbox.x0)
                .unwrap()
                .then(a.cmp(&b))
        });
        out.extend(row);
    }
    out
}

fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3000..=0x303F | 0x3040..=0x30FF | 0x3400..=0x4DBF | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF | 0xFF00..=0xFFEF | 0xAC00..=0xD7AF)
}

/// Separator before each run: rows joined with hyphen-merge/CJK/space rules,
/// same-row runs spaced only across a visible gap.
fn join_separators(runs: &[TextRun]) -> Vec<String> {
    let mut seps = vec![String::new()];
    for i in 1..runs.len() {
        let prev = &runs[i - 1];
        let cur = &runs[i];
        let same_row = (prev.bbox.y0 - cur.bbox.y0).abs()
            < ROW_TOLERANCE_FACTOR * prev.bbox.height().max(cur.bbox.height());
        let sep = if same_row {
            let gap = cur.bbox.x0 - prev.bbox.x1;
            if gap > WORD_GAP_FACTOR * prev.size
                && !prev.text.ends_with(' ')
                && !cur.text.starts_with(' ')
            {
                " "
            } else {
                ""
            }
        } else {
            // row boundary
            let prev_last = prev.text.chars().last();
            let cur_first = cur.text.chars().next();
            if prev_last == Some('-') {
                "\u{0}" // marker: merge the hyphen away
            } else if prev_last.is_some_and(is_cjk) && cur_first.is_some_and(is_cjk) {
                ""
            } else if prev.text.ends_with(' ') || cur.text.starts_with(' ') {
                ""
            } else {
                " "
            }
        };
        seps.push(sep.to_string());
    }
    seps
}

/// Column-major reading order of paragraph rectangles via recursive cuts on
/// the widest whitespace gap.
pub fn reading_order(rects: &[BBox]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rects.len()).collect();
    // canonical base order so the recursion is deterministic
    idx.sort_by(|&a, &b| {
        rects[b]
            .y1
            .partial_cmp(&rects[a].y1)
            .unwrap()
            .then(rects[a].x0.partial_cmp(&rects[b].x0).unwrap())
            .then(a.cmp(&b))
    });
    let mut out = Vec::with_capacity(rects.len());
    order_recurse(rects, &idx, 0, &mut out);
    out
}

fn order_recurse(rects: &[BBox], group: &[usize], depth: usize, out: &mut Vec<usize>) {
    if group.len() <= 1 || depth > 32 {
        out.extend_from_slice(group);
        return;
    }
    // column-major: a column split (horizontal gap) always wins over a row
    // split, so a left column is read fully before the right one
    let h = widest_gap(group.iter().map(|&i| (rects[i].x0, rects[i].x1)))
        .filter(|g| g.1 - g.0 > ORDER_GAP);
    let v = widest_gap(group.iter().map(|&i| (rects[i].y0, rects[i].y1)))
        .filter(|g| g.1 - g.0 > ORDER_GAP);
    let (vertical, gap) = match (h, v) {
        (Some(h), _) => (false, h),
        (None, Some(v)) => (true, v),
        (None, None) => {
            out.extend_from_slice(group);
            return;
        }
    };
    let mid = (gap.0 + gap.1) / 2.0;
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for &i in group {
        let c = rects[i].center();
        let take_first = if vertical { c.1 > mid } else { c.0 < mid };
        if take_first {
            first.push(i);
        } else {
            second.push(i);
        }
    }
    if first.is_empty() || second.is_empty() {
        out.extend_from_slice(group);
        return;
    }
    order_recurse(rects, &first, depth + 1, out);
    order_recurse(rects, &second, depth + 1, out);
}

fn widest_gap(intervals: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = intervals.collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut covered_to = v.first()?.1;
    let mut best: Option<(f64, f64)> = None;
    for &(s, e) in v.iter().skip(1) {
        if s > covered_to && best.is_none_or(|(bs, be)| s - covered_to > be - bs) {
            best = Some((covered_to, s));
        }
        covered_to = covered_to.max(e);
    }
    best
}

// ---------------------------------------------------------------------------
// Protection
// ---------------------------------------------------------------------------

/// Operator glyphs that make an adjacent italic single-glyph run look like
/// inline math.
const OPERATOR_CHARS: &str = "=+\u{2212}-<>\u{2264}\u{2265}\u{00B1}\u{00D7}\u{00F7}\u{2211}\u{220F}\u{222B}\u{2208}\u{2209}\u{2248}\u{2260}\u{221D}\u{223C}";

/// True for fonts whose glyphs must never reach a translation service.
pub fn is_math_font(base_name: &str) -> bool {
    let name = base_name.rsplit('+').next().unwrap_or(base_name);
    name.contains("Math")
        || name.starts_with("CM")
        || name.contains("MSAM")
        || name.contains("MSBM")
}

fn is_math_symbol(c: char) -> bool {
    matches!(c as u32,
        0x2200..=0x22FF            // mathematical operators
        | 0x2190..=0x21FF          // arrows
        | 0x0391..=0x03C9          // Greek
        | 0x2070..=0x209F          // super/subscripts
        | 0x27C0..=0x27EF)
        || "=±×÷√∞≈≠≤≥".contains(c)
}

/// True when a run's text is symbolic enough to protect on its own.
fn symbol_predicate(text: &str) -> bool {
    let t = text.trim();
    !t.is_empty()
        && t.chars().all(|c| c.is_whitespace() || c.is_ascii_digit() || is_math_symbol(c))
        && t.chars().any(is_math_symbol)
}

fn italic_flagged(base_name: &str) -> bool {
    let lower = base_name.to_ascii_lowercase();
    lower.contains("italic") || lower.contains("oblique")
}

/// Decides per run whether it must be protected.
fn protected_flags(p: &Paragraph, fonts: &BTreeMap<String, FontRef>) -> Vec<bool> {
    let font_name = |run: &TextRun| -> String {
        fonts
            .get(&run.font)
            .map(|f| f.base_name.clone())
            .unwrap_or_default()
    };
    let neighbor_operator = |i: usize| -> bool {
        let prev = i
            .checked_sub(1)
            .and_then(|j| p.runs.get(j))
            .and_then(|r| r.text.trim_end().chars().last());
        let next = p.runs.get(i + 1).and_then(|r| r.text.trim_start().chars().next());
        prev.is_some_and(|c| OPERATOR_CHARS.contains(c))
            || next.is_some_and(|c| OPERATOR_CHARS.contains(c))
    };
    p.runs
        .iter()
        .enumerate()
        .map(|(i, run)| {
            let name = font_name(run);
            is_math_font(&name)
                || symbol_predicate(&run.text)
                || (italic_flagged(&name)
                    && run.text.trim().chars().count() == 1
                    && neighbor_operator(i))
        })
        .collect()
}

/// Masks protected elements behind sentinel scalars, filling `masked_text`
/// and `placeholders`. Pre-existing private-use scalars in the source text
/// are stripped first (with a warning) so sentinel collisions cannot occur.
pub fn protect_elements(
    mut p: Paragraph,
    fonts: &BTreeMap<String, FontRef>,
    warnings: &mut Vec<Warning>,
) -> Paragraph {
    let sanitize = |s: &str, warnings: &mut Vec<Warning>, page: usize| -> String {
        if s.chars().any(|c| PlaceholderMap::index_of(c).is_some()) {
            warnings.push(Warning::new(
                "segment",
                Some(page),
                "source text contained private-use scalars; stripped before masking",
            ));
            s.chars()
                .filter(|&c| PlaceholderMap::index_of(c).is_none())
                .collect()
        } else {
            s.to_string()
        }
    };

    if !p.translatable {
        p.masked_text = String::new();
        p.placeholders = PlaceholderMap::default();
        return p;
    }

    let flags = protected_flags(&p, fonts);
    let page = p.runs.first().map(|r| r.page_index).unwrap_or(0);
    let mut masked = String::new();
    let mut map = PlaceholderMap::default();
    let mut i = 0;
    while i < p.runs.len() {
        if flags[i] {
            // consecutive protected runs form one group
            let start = i;
            while i < p.runs.len() && flags[i] {
                i += 1;
            }
            let group_runs: Vec<TextRun> = p.runs[start..i].to_vec();
            let bbox = union_all(&group_runs.iter().map(|r| r.bbox).collect::<Vec<_>>())
                .expect("group is non-empty");
            if map.len() as u32 >= PLACEHOLDER_LIMIT - PLACEHOLDER_BASE {
                warnings.push(Warning::new(
                    "segment",
                    Some(page),
                    "placeholder budget exhausted; protected text left inline",
                ));
                for (k, run) in group_runs.iter().enumerate() {
                    masked.push_str(&resolve_sep(&p.seps[start + k]));
                    masked.push_str(&sanitize(&run.text, warnings, page));
                }
                continue;
            }
            masked.push_str(&resolve_sep(&p.seps[start]));
            let token = map.push(ProtectedGroup {
                runs: group_runs,
                bbox,
            });
            masked.push(token);
        } else {
            let sep = resolve_sep(&p.seps[i]);
            // hyphen-merge marker eats the previous hyphen
            if p.seps[i] == "\u{0}" && masked.ends_with('-') {
                masked.pop();
            } else {
                masked.push_str(&sep);
            }
            masked.push_str(&sanitize(&p.runs[i].text, warnings, page));
            i += 1;
            continue;
        }
    }
    p.masked_text = masked;
    p.placeholders = map;
    p
}

fn resolve_sep(sep: &str) -> String {
    if sep == "\u{0}" {
        String::new()
    } else {
        sep.to_string()
    }
}

/// A piece of restored output: translated text, or a protected group to
/// re-emit verbatim (by placeholder index).
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Text(String),
    Protected(usize),
}

/// Splits translated text on sentinel scalars, checking every token is
/// consumed exactly once.
pub fn restore_elements(
    translated: &str,
    map: &PlaceholderMap,
) -> Result<Vec<Segment>, PlaceholderViolation> {
    let mut seen = vec![0usize; map.len()];
    let mut segments = Vec::new();
    let mut text = String::new();
    for c in translated.chars() {
        match PlaceholderMap::index_of(c) {
            Some(idx) => {
                if idx >= map.len() {
                    return Err(PlaceholderViolation::Unknown(c as u32));
                }
                seen[idx] += 1;
                if seen[idx] > 1 {
                    return Err(PlaceholderViolation::Duplicated(c as u32));
                }
                if !text.is_empty() {
                    segments.push(Segment::Text(std::mem::take(&mut text)));
                }
                segments.push(Segment::Protected(idx));
            }
            None => text.push(c),
        }
    }
    if !text.is_empty() {
        segments.push(Segment::Text(text));
    }
    if let Some(missing) = seen.iter().position(|&n| n == 0) {
        return Err(PlaceholderViolation::Missing(
            PLACEHOLDER_BASE + missing as u32,
        ));
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{FontEncoding, FontMetrics, FontOrigin, ShowPiece};
    use crate::reader::tables::{base_encoding_table, BaseEncoding};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn mk_run(text: &str, x: f64, y: f64, font: &str, size: f64) -> TextRun {
        let w = text.chars().count() as f64 * 0.5 * size;
        TextRun {
            text: text.to_string(),
            bbox: BBox::new(x, y, x + w, y + size),
            font: font.to_string(),
            size,
            page_index: 0,
            pieces: vec![ShowPiece::Bytes(text.as_bytes().to_vec())],
            raw_bytes: text.as_bytes().to_vec(),
            rise: 0.0,
            tm: [1.0, 0.0, 0.0, 1.0, x, y],
            advance: w,
            char_spacing: 0.0,
            word_spacing: 0.0,
            h_scale: 1.0,
            rotated: false,
        }
    }

    fn mk_font(key: &str, base_name: &str) -> (String, FontRef) {
        (
            key.to_string(),
            FontRef {
                id: key.to_string(),
                base_name: base_name.to_string(),
                metrics: FontMetrics {
                    widths: HashMap::new(),
                    missing_width: 500.0,
                    ascent: 718.0,
                    descent: -207.0,
                },
                encoding: FontEncoding::SimpleByte(base_encoding_table(BaseEncoding::WinAnsi)),
                origin: FontOrigin::Object((9, 0)),
            },
        )
    }

    fn fonts() -> BTreeMap<String, FontRef> {
        [mk_font("f1", "Helvetica"), mk_font("fm", "CMMI10")].into()
    }

    fn text_box(b: BBox) -> LayoutBox {
        LayoutBox {
            class: LayoutClass::PlainText,
            bbox: b,
            confidence: 1.0,
        }
    }

    #[test]
    fn rows_order_top_first() {
        let runs = vec![
            mk_run("second", 50.0, 688.0, "f1", 10.0),
            mk_run("first", 50.0, 700.0, "f1", 10.0),
        ];
        let boxes = [text_box(BBox::new(0.0, 600.0, 300.0, 760.0))];
        let ps = assemble_paragraphs(&runs, &[Some(0), Some(0)], &boxes);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].plain_text(), "first second");
    }

    #[test]
    fn single_run_paragraph_text_equals_run_text() {
        let runs = vec![mk_run("only", 50.0, 700.0, "f1", 10.0)];
        let boxes = [text_box(BBox::new(0.0, 0.0, 300.0, 760.0))];
        let ps = assemble_paragraphs(&runs, &[Some(0)], &boxes);
        assert_eq!(ps[0].plain_text(), "only");
    }

    #[test]
    fn hyphen_merge_across_rows() {
        let runs = vec![
            mk_run("transla-", 50.0, 700.0, "f1", 10.0),
            mk_run("tion", 50.0, 686.0, "f1", 10.0),
        ];
        let boxes = [text_box(BBox::new(0.0, 600.0, 300.0, 760.0))];
        let ps = assemble_paragraphs(&runs, &[Some(0), Some(0)], &boxes);
        let p = protect_elements(ps.into_iter().next().unwrap(), &fonts(), &mut Vec::new());
        assert_eq!(p.masked_text, "translation");
    }

    #[test]
    fn columns_read_left_before_right() {
        // two stacked paragraphs per column
        let rects = [
            BBox::new(320.0, 500.0, 550.0, 700.0), // right top
            BBox::new(50.0, 100.0, 280.0, 300.0),  // left bottom
            BBox::new(50.0, 500.0, 280.0, 700.0),  // left top
            BBox::new(320.0, 100.0, 550.0, 300.0), // right bottom
        ];
        assert_eq!(reading_order(&rects), vec![2, 1, 0, 3]);
    }

    #[test]
    fn title_row_precedes_columns() {
        let rects = [
            BBox::new(50.0, 500.0, 280.0, 700.0),  // left col
            BBox::new(320.0, 500.0, 550.0, 700.0), // right col
            BBox::new(100.0, 720.0, 500.0, 750.0), // spanning title
        ];
        assert_eq!(reading_order(&rects), vec![2, 0, 1]);
    }

    #[test]
    fn protect_masks_math_runs() {
        let runs = vec![
            mk_run("the relation ", 50.0, 700.0, "f1", 10.0),
            mk_run("E=mc2", 115.0, 700.0, "fm", 10.0),
            mk_run(" holds", 140.1, 700.0, "f1", 10.0),
        ];
        let boxes = [text_box(BBox::new(0.0, 600.0, 400.0, 760.0))];
        let ps = assemble_paragraphs(&runs, &[Some(0), Some(0), Some(0)], &boxes);
        let p = protect_elements(ps.into_iter().next().unwrap(), &fonts(), &mut Vec::new());
        assert_eq!(p.masked_text, "the relation \u{E000} holds");
        assert_eq!(p.placeholders.len(), 1);
        let group = p.placeholders.get('\u{E000}').unwrap();
        assert_eq!(group.runs.len(), 1);
        assert_eq!(group.runs[0].text, "E=mc2");
    }

    #[test]
    fn no_protected_runs_empty_map() {
        let runs = vec![mk_run("plain words", 50.0, 700.0, "f1", 10.0)];
        let boxes = [text_box(BBox::new(0.0, 600.0, 400.0, 760.0))];
        let ps = assemble_paragraphs(&runs, &[Some(0)], &boxes);
        let p = protect_elements(ps.into_iter().next().unwrap(), &fonts(), &mut Vec::new());
        assert_eq!(p.masked_text, "plain words");
        assert!(p.placeholders.is_empty());
    }

    #[test]
    fn preexisting_pua_scalars_are_stripped() {
        let runs = vec![mk_run("bad \u{E005}scalar", 50.0, 700.0, "f1", 10.0)];
        let boxes = [text_box(BBox::new(0.0, 600.0, 400.0, 760.0))];
        let ps = assemble_paragraphs(&runs, &[Some(0)], &boxes);
        let mut warnings = Vec::new();
        let p = protect_elements(ps.into_iter().next().unwrap(), &fonts(), &mut warnings);
        assert_eq!(p.masked_text, "bad scalar");
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn restore_round_trip_and_violations() {
        let mut map = PlaceholderMap::default();
        map.push(ProtectedGroup {
            runs: vec![mk_run("E=mc2", 0.0, 0.0, "fm", 10.0)],
            bbox: BBox::new(0.0, 0.0, 10.0, 10.0),
        });
        let ok = restore_elements("la relación \u{E000} se cumple", &map).unwrap();
        assert_eq!(
            ok,
            vec![
                Segment::Text("la relación ".into()),
                Segment::Protected(0),
                Segment::Text(" se cumple".into())
            ]
        );
        assert_eq!(
            restore_elements("sin marcador", &map),
            Err(PlaceholderViolation::Missing(0xE000))
        );
        assert_eq!(
            restore_elements("a \u{E000} b \u{E000}", &map),
            Err(PlaceholderViolation::Duplicated(0xE000))
        );
        assert_eq!(
            restore_elements("a \u{E000} \u{E001}", &map),
            Err(PlaceholderViolation::Unknown(0xE001))
        );
    }

    #[test]
    fn identity_restore_reproduces_run_sequence() {
        let runs = vec![
            mk_run("alpha ", 50.0, 700.0, "f1", 10.0),
            mk_run("β+γ", 90.0, 700.0, "fm", 10.0),
            mk_run(" omega", 115.0, 700.0, "f1", 10.0),
            mk_run("Σx", 50.0, 686.0, "fm", 10.0),
        ];
        let boxes = [text_box(BBox::new(0.0, 600.0, 400.0, 760.0))];
        let assignment = vec![Some(0); 4];
        let ps = assemble_paragraphs(&runs, &assignment, &boxes);
        let p = protect_elements(ps.into_iter().next().unwrap(), &fonts(), &mut Vec::new());
        let segs = restore_elements(&p.masked_text, &p.placeholders).unwrap();
        // stitch segments back into the full run sequence
        let mut restored: Vec<String> = Vec::new();
        for seg in segs {
            match seg {
                Segment::Text(t) => restored.push(t),
                Segment::Protected(i) => {
                    let g = p.placeholders.get(PlaceholderMap::token(i)).unwrap();
                    for r in &g.runs {
                        restored.push(r.text.clone());
                    }
                }
            }
        }
        assert_eq!(restored.concat(), p.plain_text());
    }

    #[test]
    fn assemble_is_permutation_invariant() {
        let mut runs = Vec::new();
        for row in 0..6 {
            runs.push(mk_run(
                &format!("left {row}"),
                50.0,
                700.0 - 14.0 * row as f64,
                "f1",
                10.0,
            ));
            runs.push(mk_run(
                &format!("right {row}"),
                320.0,
                700.0 - 14.0 * row as f64,
                "f1",
                10.0,
            ));
        }
        let boxes = [
            text_box(BBox::new(40.0, 600.0, 300.0, 720.0)),
            text_box(BBox::new(310.0, 600.0, 570.0, 720.0)),
        ];
        let assignment: Vec<Option<usize>> = runs
            .iter()
            .map(|r| if r.bbox.x0 < 300.0 { Some(0) } else { Some(1) })
            .collect();
        let base: Vec<String> = assemble_paragraphs(&runs, &assignment, &boxes)
            .iter()
            .map(Paragraph::plain_text)
            .collect();

        // brute-force expected order: sort each box's runs by (-y, x)
        let mut expected = Vec::new();
        for b in 0..2 {
            let mut members: Vec<&TextRun> = runs
                .iter()
                .zip(&assignment)
                .filter(|(_, a)| **a == Some(b))
                .map(|(r, _)| r)
                .collect();
            members.sort_by(|x, y| {
                y.bbox
                    .y0
                    .partial_cmp(&x.bbox.y0)
                    .unwrap()
                    .then(x.bbox.x0.partial_cmp(&y.bbox.x0).unwrap())
            });
            expected.push(
                members
                    .iter()
                    .map(|r| r.text.clone())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        assert_eq!(base, expected);

        let mut shuffled: Vec<(TextRun, Option<usize>)> =
            runs.iter().cloned().zip(assignment.iter().copied()).collect();
        shuffled.reverse();
        shuffled.swap(0, 5);
        let (sr, sa): (Vec<TextRun>, Vec<Option<usize>>) = shuffled.into_iter().unzip();
        let permuted: Vec<String> = assemble_paragraphs(&sr, &sa, &boxes)
            .iter()
            .map(Paragraph::plain_text)
            .collect();
        assert_eq!(base, permuted);
    }

    proptest! {
        // placeholder bijectivity over randomized paragraphs
        #[test]
        fn placeholder_bijectivity(spec in prop::collection::vec((any::<bool>(), 1..6usize), 1..24)) {
            let mut runs = Vec::new();
            let mut x = 50.0;
            for (i, (math, len)) in spec.iter().enumerate() {
                let text: String = (0..*len).map(|k| (b'a' + ((i + k) % 26) as u8) as char).collect();
                let font = if *math { "fm" } else { "f1" };
                let r = mk_run(&text, x, 700.0, font, 10.0);
                x = r.bbox.x1 + 1.0;
                runs.push(r);
            }
            let boxes = [text_box(BBox::new(0.0, 600.0, 5000.0, 760.0))];
            let assignment = vec![Some(0); runs.len()];
            let ps = assemble_paragraphs(&runs, &assignment, &boxes);
            let p = protect_elements(ps.into_iter().next().unwrap(), &fonts(), &mut Vec::new());
            // each token appears exactly once and the count matches the map
            let tokens: Vec<char> = p
                .masked_text
                .chars()
                .filter(|c| PlaceholderMap::index_of(*c).is_some())
                .collect();
            prop_assert_eq!(tokens.len(), p.placeholders.len());
            for (i, t) in tokens.iter().enumerate() {
                prop_assert_eq!(*t, PlaceholderMap::token(i));
            }
            // restoring the mask itself must succeed (identity translation)
            prop_assert!(restore_elements(&p.masked_text, &p.placeholders).is_ok());
        }
    }
}
