//! Cross-reference parsing: classic tables, xref streams, and object
//! streams, following the latest update chain only.

use std::collections::BTreeMap;

use crate::error::ReadError;
use crate::ir::Warning;
use crate::reader::filters::decode_stream;
use crate::reader::object::{Dict, Object, ObjectTable, Parser};

/// Where an object lives.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    /// Byte offset of "num gen obj" in the file.
    Offset(usize),
    /// (container object number, index within the object stream).
    InStream(u32, u32),
}

/// Loads every reachable object and the merged trailer.
pub fn load_objects(data: &[u8], warnings: &mut Vec<Warning>) -> Result<ObjectTable, ReadError> {
    let start = find_startxref(data)?;
    let mut slots: BTreeMap<u32, Slot> = BTreeMap::new();
    let mut trailer = Dict::new();
    let mut offset = Some(start);
    let mut visited = Vec::new();

    while let Some(off) = offset {
        if visited.contains(&off) {
            return Err(ReadError::MalformedPdf("xref chain loop".into()));
        }
        visited.push(off);
        if off >= data.len() {
            return Err(ReadError::MalformedPdf(format!(
                "xref offset {off} beyond EOF"
            )));
        }
        let section_trailer = if data[off..].starts_with(b"xref") {
            parse_xref_table(data, off, &mut slots)?
        } else {
            parse_xref_stream(data, off, &mut slots)?
        };
        // earlier sections in the chain must not override newer entries
        for (k, v) in &section_trailer {
            trailer.entry(k.clone()).or_insert_with(|| v.clone());
        }
        // hybrid files point at an additional xref stream
        if let Some(Object::Int(x)) = section_trailer.get("XRefStm") {
            let xs = *x as usize;
            if !visited.contains(&xs) && xs < data.len() {
                visited.push(xs);
                let _ = parse_xref_stream(data, xs, &mut slots)?;
            }
        }
        offset = match section_trailer.get("Prev") {
            Some(Object::Int(p)) => Some(*p as usize),
            _ => None,
        };
    }

    if trailer.contains_key("Encrypt") {
        return Err(ReadError::EncryptedPdf);
    }

    let mut table = ObjectTable {
        objects: BTreeMap::new(),
        trailer,
    };

    // first pass: objects stored at file offsets
    for (&num, &slot) in &slots {
        if let Slot::Offset(off) = slot {
            if off >= data.len() {
                warnings.push(Warning::new(
                    "reader",
                    None,
                    format!("object {num} offset beyond EOF; skipped"),
                ));
                continue;
            }
            match Parser::at(data, off).parse_indirect() {
                Ok(((n, g), obj)) => {
                    if n != num {
                        warnings.push(Warning::new(
                            "reader",
                            None,
                            format!("xref says object {num} at offset {off}, found {n}"),
                        ));
                    }
                    table.objects.insert((n, g), obj);
                }
                Err(e) => {
                    warnings.push(Warning::new(
                        "reader",
                        None,
                        format!("failed to parse object {num}: {e}"),
                    ));
                }
            }
        }
    }

    // second pass: objects packed in object streams
    let in_stream: Vec<(u32, u32, u32)> = slots
        .iter()
        .filter_map(|(&num, &slot)| match slot {
            Slot::InStream(container, idx) => Some((num, container, idx)),
            _ => None,
        })
        .collect();
    let mut decoded_cache: BTreeMap<u32, Vec<(u32, Object)>> = BTreeMap::new();
    for (num, container, idx) in in_stream {
        if !decoded_cache.contains_key(&container) {
            let parsed = parse_object_stream(&table, container).unwrap_or_else(|e| {
                warnings.push(Warning::new(
                    "reader",
                    None,
                    format!("object stream {container}: {e}"),
                ));
                Vec::new()
            });
            decoded_cache.insert(container, parsed);
        }
        let entries = &decoded_cache[&container];
        match entries.get(idx as usize) {
            Some((n, obj)) if *n == num => {
                table.objects.insert((num, 0), obj.clone());
            }
            _ => {
                // index mismatch: fall back to a scan of the pairs
                if let Some((_, obj)) = entries.iter().find(|(n, _)| *n == num) {
                    table.objects.insert((num, 0), obj.clone());
                } else {
                    warnings.push(Warning::new(
                        "reader",
                        None,
                        format!("object {num} not found in object stream {container}"),
                    ));
                }
            }
        }
    }

    Ok(table)
}

fn find_startxref(data: &[u8]) -> Result<usize, ReadError> {
    let tail_len = data.len().min(2048);
    let tail = &data[data.len() - tail_len..];
    let pos = find_last(tail, b"startxref")
        .ok_or_else(|| ReadError::MalformedPdf("startxref not found".into()))?;
    let mut p = Parser::at(tail, pos + b"startxref".len());
    match p.parse_number()? {
        Object::Int(v) if v >= 0 => Ok(v as usize),
        other => Err(ReadError::MalformedPdf(format!(
            "bad startxref value {other:?}"
        ))),
    }
}

fn find_last(hay: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.is_empty() || hay.len() < needle.len() {
        return None;
    }
    (0..=hay.len() - needle.len()).rev().find(|&i| &hay[i..i + needle.len()] == needle)
}

/// Classic `xref` table section; returns its trailer dictionary.
fn parse_xref_table(
    data: &[u8],
    off: usize,
    slots: &mut BTreeMap<u32, Slot>,
) -> Result<Dict, ReadError> {
    let mut p = Parser::at(data, off);
    p.expect_keyword("xref")?;
    loop {
        p.skip_ws();
        if p.data[p.pos..].starts_with(b"trailer") {
            p.pos += b"trailer".len();
            break;
        }
        let start = match p.parse_number()? {
            Object::Int(v) if v >= 0 => v as u32,
            other => return Err(ReadError::MalformedPdf(format!("bad xref start {other:?}"))),
        };
        let count = match p.parse_number()? {
            Object::Int(v) if v >= 0 => v as u32,
            other => return Err(ReadError::MalformedPdf(format!("bad xref count {other:?}"))),
        };
        p.skip_ws();
        for i in 0..count {
            // entries are fixed-width "nnnnnnnnnn ggggg t"
            let entry = p
                .data
                .get(p.pos..p.pos + 20)
                .ok_or_else(|| ReadError::MalformedPdf("truncated xref entry".into()))?;
            let text = std::str::from_utf8(&entry[..18])
                .map_err(|_| ReadError::MalformedPdf("non-ascii xref entry".into()))?;
            let offset: usize = text[0..10]
                .trim()
                .parse()
                .map_err(|_| ReadError::MalformedPdf("bad xref offset".into()))?;
            let kind = entry[17];
            let num = start + i;
            if kind == b'n' {
                slots.entry(num).or_insert(Slot::Offset(offset));
            }
            // advance past the entry, tolerating 19-byte (single-EOL) rows
            p.pos += 19;
            if p.data.get(p.pos).is_some_and(|&b| b == b'\n' || b == b'\r') {
                p.pos += 1;
            }
        }
    }
    match p.parse_object()? {
        Object::Dict(d) => Ok(d),
        other => Err(ReadError::MalformedPdf(format!(
            "expected trailer dictionary, found {other:?}"
        ))),
    }
}

/// Cross-reference stream (PDF 1.5+); returns its dict as the trailer.
fn parse_xref_stream(
    data: &[u8],
    off: usize,
    slots: &mut BTreeMap<u32, Slot>,
) -> Result<Dict, ReadError> {
    let (_, obj) = Parser::at(data, off).parse_indirect()?;
    let stream = obj
        .as_stream()
        .ok_or_else(|| ReadError::MalformedPdf("xref offset does not point at a stream".into()))?;
    let dict = stream.dict.clone();
    // the xref stream is self-contained: no indirect refs in its own params
    let scratch = ObjectTable::default();
    let decoded = decode_stream(&scratch, &dict, &stream.data)?;

    let w: Vec<usize> = dict
        .get("W")
        .and_then(Object::as_array)
        .ok_or_else(|| ReadError::MalformedPdf("xref stream missing /W".into()))?
        .iter()
        .filter_map(Object::as_int)
        .map(|v| v as usize)
        .collect();
    if w.len() < 3 {
        return Err(ReadError::MalformedPdf("xref stream /W too short".into()));
    }
    let size = dict
        .get("Size")
        .and_then(Object::as_int)
        .ok_or_else(|| ReadError::MalformedPdf("xref stream missing /Size".into()))?;
    let index: Vec<i64> = match dict.get("Index").and_then(Object::as_array) {
        Some(a) => a.iter().filter_map(Object::as_int).collect(),
        None => vec![0, size],
    };

    let row_len: usize = w.iter().sum();
    let mut rows = decoded.chunks(row_len);
    for pair in index.chunks(2) {
        let (start, count) = (pair[0] as u32, *pair.get(1).unwrap_or(&0) as u32);
        for i in 0..count {
            let Some(row) = rows.next() else {
                return Err(ReadError::MalformedPdf("xref stream data too short".into()));
            };
            let mut fields = [0u64; 3];
            let mut pos = 0;
            for (fi, &width) in w.iter().take(3).enumerate() {
                let mut v: u64 = 0;
                for _ in 0..width {
                    v = (v << 8) | row[pos] as u64;
                    pos += 1;
                }
                fields[fi] = v;
            }
            // a zero-width type field defaults to type 1
            let ftype = if w[0] == 0 { 1 } else { fields[0] };
            let num = start + i;
            match ftype {
                0 => {}
                1 => {
                    slots.entry(num).or_insert(Slot::Offset(fields[1] as usize));
                }
                2 => {
                    slots
                        .entry(num)
                        .or_insert(Slot::InStream(fields[1] as u32, fields[2] as u32));
                }
                _ => {}
            }
        }
    }
    Ok(dict)
}

/// Decodes a /Type /ObjStm container into its (object number, object) pairs.
fn parse_object_stream(table: &ObjectTable, container: u32) -> Result<Vec<(u32, Object)>, ReadError> {
    let obj = table
        .get((container, 0))
        .ok_or_else(|| ReadError::MalformedPdf(format!("object stream {container} missing")))?;
    let stream = obj
        .as_stream()
        .ok_or_else(|| ReadError::MalformedPdf(format!("object {container} is not a stream")))?;
    let data = decode_stream(table, &stream.dict, &stream.data)?;
    let n = table
        .dict_get(&stream.dict, "N")
        .and_then(Object::as_int)
        .ok_or_else(|| ReadError::MalformedPdf("ObjStm missing /N".into()))? as usize;
    let first = table
        .dict_get(&stream.dict, "First")
        .and_then(Object::as_int)
        .ok_or_else(|| ReadError::MalformedPdf("ObjStm missing /First".into()))? as usize;

    let mut header = Parser::new(&data);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let num = match header.parse_number()? {
            Object::Int(v) if v >= 0 => v as u32,
            other => return Err(ReadError::MalformedPdf(format!("bad ObjStm pair {other:?}"))),
        };
        let off = match header.parse_number()? {
            Object::Int(v) if v >= 0 => v as usize,
            other => return Err(ReadError::MalformedPdf(format!("bad ObjStm pair {other:?}"))),
        };
        pairs.push((num, off));
    }
    let mut out = Vec::with_capacity(n);
    for (num, off) in pairs {
        let pos = first + off;
        if pos >= data.len() {
            return Err(ReadError::MalformedPdf("ObjStm offset beyond data".into()));
        }
        let obj = Parser::at(&data, pos).parse_object()?;
        out.push((num, obj));
    }
    Ok(out)
}
