//! Builds [`FontRef`]s from page font resources: simple fonts with byte
//! encodings and CID (Type0) fonts with embedded ToUnicode CMaps.

use std::collections::HashMap;

use crate::ir::{FontEncoding, FontMetrics, FontOrigin, FontRef, Warning};
use crate::reader::filters::decode_stream;
use crate::reader::object::{Dict, Object, ObjectTable, Parser};
use crate::reader::tables::{base_encoding_table, builtin_metrics, glyph_name_to_char, BaseEncoding};

/// Fallback advance for glyphs without any width source, in 1/1000 em.
const DEFAULT_MISSING_WIDTH: f64 = 500.0;
const DEFAULT_ASCENT: f64 = 800.0;
const DEFAULT_DESCENT: f64 = -200.0;

/// Builds a [`FontRef`] from a resolved font dictionary.
pub fn build_font(
    table: &ObjectTable,
    id: String,
    origin: FontOrigin,
    dict: &Dict,
    warnings: &mut Vec<Warning>,
) -> FontRef {
    let base_name = table
        .dict_get(dict, "BaseFont")
        .and_then(Object::as_name)
        .unwrap_or("Unknown")
        .to_string();
    let subtype = table
        .dict_get(dict, "Subtype")
        .and_then(Object::as_name)
        .unwrap_or("");

    if subtype == "Type0" {
        build_cid_font(table, id, origin, dict, base_name, warnings)
    } else {
        build_simple_font(table, id, origin, dict, base_name, warnings)
    }
}

fn descriptor_metrics(table: &ObjectTable, dict: &Dict) -> (Option<f64>, Option<f64>, Option<f64>) {
    let Some(desc) = table.dict_get(dict, "FontDescriptor").and_then(Object::as_dict) else {
        return (None, None, None);
    };
    let ascent = table.dict_get(desc, "Ascent").and_then(Object::as_f64);
    let descent = table.dict_get(desc, "Descent").and_then(Object::as_f64);
    let missing = table.dict_get(desc, "MissingWidth").and_then(Object::as_f64);
    (ascent, descent, missing)
}

fn build_simple_font(
    table: &ObjectTable,
    id: String,
    origin: FontOrigin,
    dict: &Dict,
    base_name: String,
    warnings: &mut Vec<Warning>,
) -> FontRef {
    let subtype = table
        .dict_get(dict, "Subtype")
        .and_then(Object::as_name)
        .unwrap_or("Type1");
    let builtin = builtin_metrics(&base_name);

    // encoding: base choice, then /Differences overrides
    let default_base = if subtype == "TrueType" {
        BaseEncoding::WinAnsi
    } else {
        BaseEncoding::Standard
    };
    let mut enc_table = match table.dict_get(dict, "Encoding") {
        Some(Object::Name(n)) => base_encoding_table(named_base(n, default_base)),
        Some(Object::Dict(enc)) => {
            let base = match table.dict_get(enc, "BaseEncoding").and_then(Object::as_name) {
                Some(n) => named_base(n, default_base),
                None => default_base,
            };
            let mut t = base_encoding_table(base);
            if let Some(diffs) = table.dict_get(enc, "Differences").and_then(Object::as_array) {
                let mut code = 0usize;
                for item in diffs {
                    match table.resolve(item) {
                        Object::Int(c) => code = *c as usize,
                        Object::Name(glyph) => {
                            if code < 256 {
                                let mapped = glyph_name_to_char(glyph);
                                if mapped.is_none() {
                                    warnings.push(Warning::new(
                                        "reader",
                                        None,
                                        format!("unmapped glyph name /{glyph} in /Differences"),
                                    ));
                                }
                                t[code] = mapped;
                                code += 1;
                            }
                        }
                        _ => {}
                    }
                }
            }
            t
        }
        _ => base_encoding_table(default_base),
    };

    // run-of-the-mill symbol fonts (no meaningful byte semantics): leave the
    // table as-is; undecodable bytes become U+FFFD downstream
    if base_name.contains("Symbol") && !dict.contains_key("Encoding") {
        enc_table = base_encoding_table(BaseEncoding::Standard);
    }

    let (asc_d, desc_d, missing_d) = descriptor_metrics(table, dict);
    let missing_width = missing_d
        .or_else(|| builtin.as_ref().and_then(|m| m.fixed.map(f64::from)))
        .unwrap_or(DEFAULT_MISSING_WIDTH);

    let mut widths: HashMap<u32, f64> = HashMap::new();
    let first_char = table.dict_get(dict, "FirstChar").and_then(Object::as_int);
    let width_array = table.dict_get(dict, "Widths").and_then(Object::as_array);
    match (first_char, width_array) {
        (Some(first), Some(arr)) => {
            for (i, w) in arr.iter().enumerate() {
                if let Some(w) = table.resolve(w).as_f64() {
                    widths.insert(first as u32 + i as u32, w);
                }
            }
        }
        _ => {
            if let Some(m) = &builtin {
                if let Some(fixed) = m.fixed {
                    for code in 32..=126u32 {
                        widths.insert(code, f64::from(fixed));
                    }
                } else {
                    for (i, &w) in m.widths.iter().enumerate() {
                        widths.insert(32 + i as u32, f64::from(w));
                    }
                }
            } else {
                warnings.push(Warning::new(
                    "reader",
                    None,
                    format!("font {base_name:?} has no /Widths and no builtin metrics"),
                ));
            }
        }
    }

    let ascent = asc_d
        .or_else(|| builtin.as_ref().map(|m| m.ascent))
        .unwrap_or(DEFAULT_ASCENT);
    let descent = desc_d
        .or_else(|| builtin.as_ref().map(|m| m.descent))
        .unwrap_or(DEFAULT_DESCENT);

    FontRef {
        id,
        base_name,
        metrics: FontMetrics {
            widths,
            missing_width,
            ascent,
            descent,
        },
        encoding: FontEncoding::SimpleByte(enc_table),
        origin,
    }
}

fn named_base(name: &str, default: BaseEncoding) -> BaseEncoding {
    match name {
        "WinAnsiEncoding" => BaseEncoding::WinAnsi,
        "MacRomanEncoding" => BaseEncoding::MacRoman,
        "StandardEncoding" => BaseEncoding::Standard,
        _ => default,
    }
}

fn build_cid_font(
    table: &ObjectTable,
    id: String,
    origin: FontOrigin,
    dict: &Dict,
    base_name: String,
    warnings: &mut Vec<Warning>,
) -> FontRef {
    match table.dict_get(dict, "Encoding").and_then(Object::as_name) {
        Some("Identity-H") | None => {}
        Some(other) => warnings.push(Warning::new(
            "reader",
            None,
            format!("CID font {base_name:?} uses /{other}; treated as Identity-H"),
        )),
    }

    let descendant = table
        .dict_get(dict, "DescendantFonts")
        .and_then(Object::as_array)
        .and_then(|a| a.first())
        .map(|o| table.resolve(o))
        .and_then(Object::as_dict);

    let mut widths: HashMap<u32, f64> = HashMap::new();
    let mut default_width = 1000.0;
    let mut ascent = DEFAULT_ASCENT;
    let mut descent = DEFAULT_DESCENT;
    if let Some(desc_font) = descendant {
        if let Some(dw) = table.dict_get(desc_font, "DW").and_then(Object::as_f64) {
            default_width = dw;
        }
        if let Some(w) = table.dict_get(desc_font, "W").and_then(Object::as_array) {
            parse_w_array(table, w, &mut widths);
        }
        let (a, d, _) = descriptor_metrics(table, desc_font);
        if let Some(a) = a {
            ascent = a;
        }
        if let Some(d) = d {
            descent = d;
        }
    } else {
        warnings.push(Warning::new(
            "reader",
            None,
            format!("CID font {base_name:?} has no descendant font"),
        ));
    }

    let to_unicode = match table.dict_get(dict, "ToUnicode").and_then(Object::as_stream) {
        Some(stream) => match decode_stream(table, &stream.dict, &stream.data) {
            Ok(decoded) => parse_tounicode_cmap(&decoded, warnings),
            Err(e) => {
                warnings.push(Warning::new(
                    "reader",
                    None,
                    format!("ToUnicode for {base_name:?} unreadable: {e}"),
                ));
                HashMap::new()
            }
        },
        None => {
            warnings.push(Warning::new(
                "reader",
                None,
                format!("CID font {base_name:?} lacks ToUnicode; codes map to U+FFFD"),
            ));
            HashMap::new()
        }
    };

    FontRef {
        id,
        base_name,
        metrics: FontMetrics {
            widths,
            missing_width: default_width,
            ascent,
            descent,
        },
        encoding: FontEncoding::CidToUnicode(to_unicode),
        origin,
    }
}

/// /W array: `c [w1 w2 ...]` assigns consecutive widths from CID c;
/// `c1 c2 w` assigns w to the inclusive CID range.
fn parse_w_array(table: &ObjectTable, arr: &[Object], widths: &mut HashMap<u32, f64>) {
    let mut i = 0;
    while i < arr.len() {
        let Some(start) = table.resolve(&arr[i]).as_int() else {
            break;
        };
        match arr.get(i + 1).map(|o| table.resolve(o)) {
            Some(Object::Array(list)) => {
                for (k, w) in list.iter().enumerate() {
                    if let Some(w) = table.resolve(w).as_f64() {
                        widths.insert(start as u32 + k as u32, w);
                    }
                }
                i += 2;
            }
            Some(end_obj) => {
                let (Some(end), Some(w)) = (
                    end_obj.as_int(),
                    arr.get(i + 2).map(|o| table.resolve(o)).and_then(Object::as_f64),
                ) else {
                    break;
                };
                for cid in start..=end {
                    widths.insert(cid as u32, w);
                }
                i += 3;
            }
            None => break,
        }
    }
}

/// Minimal ToUnicode CMap reader: bfchar and bfrange sections; destination
/// strings are UTF-16BE.
fn parse_tounicode_cmap(data: &[u8], warnings: &mut Vec<Warning>) -> HashMap<u32, String> {
    let mut map = HashMap::new();
    let mut p = Parser::new(data);
    loop {
        p.skip_ws();
        if p.pos >= data.len() {
            break;
        }
        let before = p.pos;
        if data[p.pos..].starts_with(b"beginbfchar") {
            p.pos += b"beginbfchar".len();
            loop {
                p.skip_ws();
                if data[p.pos..].starts_with(b"endbfchar") {
                    p.pos += b"endbfchar".len();
                    break;
                }
                let (Ok(src), Ok(dst)) = (p.parse_object(), p.parse_object()) else {
                    warnings.push(Warning::new("reader", None, "malformed bfchar entry"));
                    return map;
                };
                if let (Object::Str(s), Object::Str(d)) = (src, dst) {
                    map.insert(bytes_to_code(&s), utf16be_to_string(&d));
                }
            }
        } else if data[p.pos..].starts_with(b"beginbfrange") {
            p.pos += b"beginbfrange".len();
            loop {
                p.skip_ws();
                if data[p.pos..].starts_with(b"endbfrange") {
                    p.pos += b"endbfrange".len();
                    break;
                }
                let (Ok(lo), Ok(hi), Ok(dst)) =
                    (p.parse_object(), p.parse_object(), p.parse_object())
                else {
                    warnings.push(Warning::new("reader", None, "malformed bfrange entry"));
                    return map;
                };
                match (lo, hi, dst) {
                    (Object::Str(lo), Object::Str(hi), Object::Str(base)) => {
                        let (lo, hi) = (bytes_to_code(&lo), bytes_to_code(&hi));
                        let base_str = utf16be_to_string(&base);
                        for (k, code) in (lo..=hi).enumerate() {
                            // increment the last scalar of the base string
                            let mut s = base_str.clone();
                            if let Some(last) = s.pop() {
                                let bumped =
                                    char::from_u32(last as u32 + k as u32).unwrap_or('\u{FFFD}');
                                s.push(bumped);
                            }
                            map.insert(code, s);
                        }
                    }
                    (Object::Str(lo), Object::Str(_hi), Object::Array(items)) => {
                        let lo = bytes_to_code(&lo);
                        for (k, item) in items.iter().enumerate() {
                            if let Object::Str(d) = item {
                                map.insert(lo + k as u32, utf16be_to_string(d));
                            }
                        }
                    }
                    _ => {
                        warnings.push(Warning::new("reader", None, "malformed bfrange entry"));
                    }
                }
            }
        } else {
            // skip any other CMap syntax
            p.pos += 1;
            let _ = p.read_token();
            if p.pos == before {
                p.pos += 1;
            }
        }
    }
    map
}

fn bytes_to_code(bytes: &[u8]) -> u32 {
    bytes.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32)
}

fn utf16be_to_string(bytes: &[u8]) -> String {
    let units: Vec<u16> = bytes
        .chunks(2)
        .map(|c| ((c[0] as u16) << 8) | *c.get(1).unwrap_or(&0) as u16)
        .collect();
    String::from_utf16_lossy(&units)
}

/// Decodes raw show-string bytes through a font's encoding.
///
/// Returns the decoded string plus per-glyph (code, char-count) pairs so the
/// extraction interpreter can advance the pen code by code. Undecodable
/// codes map to U+FFFD.
pub fn decode_string(font: &FontRef, raw: &[u8]) -> (String, Vec<(u32, usize)>, usize) {
    let mut text = String::new();
    let mut codes = Vec::new();
    let mut undecodable = 0usize;
    match &font.encoding {
        FontEncoding::SimpleByte(table) => {
            for &b in raw {
                match table[b as usize] {
                    Some(c) => {
                        text.push(c);
                        codes.push((b as u32, 1));
                    }
                    None => {
                        text.push('\u{FFFD}');
                        codes.push((b as u32, 1));
                        undecodable += 1;
                    }
                }
            }
        }
        FontEncoding::CidToUnicode(map) => {
            for pair in raw.chunks(2) {
                let code = bytes_to_code(pair);
                match map.get(&code) {
                    Some(s) if !s.is_empty() => {
                        text.push_str(s);
                        codes.push((code, s.chars().count()));
                    }
                    _ => {
                        text.push('\u{FFFD}');
                        codes.push((code, 1));
                        undecodable += 1;
                    }
                }
            }
        }
    }
    (text, codes, undecodable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn winansi_font() -> FontRef {
        FontRef {
            id: "t".into(),
            base_name: "Helvetica".into(),
            metrics: FontMetrics {
                widths: HashMap::new(),
                missing_width: 500.0,
                ascent: 718.0,
                descent: -207.0,
            },
            encoding: FontEncoding::SimpleByte(base_encoding_table(BaseEncoding::WinAnsi)),
            origin: FontOrigin::Object((1, 0)),
        }
    }

    #[test]
    fn decode_simple_bytes() {
        let font = winansi_font();
        let (text, codes, bad) = decode_string(&font, &[0x48, 0x69]);
        assert_eq!(text, "Hi");
        assert_eq!(codes, vec![(0x48, 1), (0x69, 1)]);
        assert_eq!(bad, 0);
    }

    #[test]
    fn undecodable_byte_is_replacement() {
        let font = winansi_font();
        let (text, _, bad) = decode_string(&font, &[0x48, 0x81]);
        assert_eq!(text, "H\u{FFFD}");
        assert_eq!(bad, 1);
    }

    #[test]
    fn decode_cid_with_tounicode() {
        let mut map = HashMap::new();
        map.insert(1u32, "你".to_string());
        let font = FontRef {
            id: "c".into(),
            base_name: "Fake-CJK".into(),
            metrics: FontMetrics {
                widths: HashMap::new(),
                missing_width: 1000.0,
                ascent: 880.0,
                descent: -120.0,
            },
            encoding: FontEncoding::CidToUnicode(map),
            origin: FontOrigin::Object((2, 0)),
        };
        let (text, codes, bad) = decode_string(&font, &[0x00, 0x01]);
        assert_eq!(text, "你");
        assert_eq!(codes, vec![(1, 1)]);
        assert_eq!(bad, 0);
    }

    #[test]
    fn cmap_bfchar_and_bfrange() {
        let cmap = b"
            /CIDInit /ProcSet findresource begin
            begincmap
            2 beginbfchar
            <0001> <4F60>
            <0002> <597D>
            endbfchar
            1 beginbfrange
            <0010> <0012> <0041>
            endbfrange
            endcmap
        ";
        let mut warnings = Vec::new();
        let map = parse_tounicode_cmap(cmap, &mut warnings);
        assert_eq!(map.get(&1).map(String::as_str), Some("你"));
        assert_eq!(map.get(&2).map(String::as_str), Some("好"));
        assert_eq!(map.get(&0x10).map(String::as_str), Some("A"));
        assert_eq!(map.get(&0x12).map(String::as_str), Some("C"));
        assert!(warnings.is_empty());
    }
}
