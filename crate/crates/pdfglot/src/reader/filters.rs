//! Stream filters: FlateDecode, ASCIIHexDecode, LZWDecode, and the PNG
//! predictors used by cross-reference streams.

use std::io::Read;

use crate::error::ReadError;
use crate::reader::object::{Dict, Object, ObjectTable};

/// Applies the stream's /Filter chain (with /DecodeParms) to `data`.
///
/// Unknown filters raise `MalformedPdf`; callers that can pass a stream
/// through opaquely should not decode it at all.
pub fn decode_stream(table: &ObjectTable, dict: &Dict, data: &[u8]) -> Result<Vec<u8>, ReadError> {
    let filters = match table.dict_get(dict, "Filter") {
        None => Vec::new(),
        Some(Object::Name(n)) => vec![n.clone()],
        Some(Object::Array(a)) => a
            .iter()
            .filter_map(|o| table.resolve(o).as_name().map(str::to_owned))
            .collect(),
        Some(other) => {
            return Err(ReadError::MalformedPdf(format!(
                "bad /Filter entry: {other:?}"
            )))
        }
    };
    let parms: Vec<Option<Dict>> = match table.dict_get(dict, "DecodeParms") {
        None => vec![None; filters.len()],
        Some(Object::Dict(d)) => vec![Some(d.clone())],
        Some(Object::Array(a)) => a
            .iter()
            .map(|o| table.resolve(o).as_dict().cloned())
            .collect(),
        Some(Object::Null) => vec![None; filters.len()],
        Some(other) => {
            return Err(ReadError::MalformedPdf(format!(
                "bad /DecodeParms entry: {other:?}"
            )))
        }
    };

    let mut out = data.to_vec();
    for (i, filter) in filters.iter().enumerate() {
        let parm = parms.get(i).cloned().flatten();
        out = match filter.as_str() {
            "FlateDecode" | "Fl" => {
                let inflated = flate_decode(&out)?;
                apply_predictor(table, inflated, parm.as_ref())?
            }
            "ASCIIHexDecode" | "AHx" => ascii_hex_decode(&out)?,
            "LZWDecode" | "LZW" => {
                let early = parm
                    .as_ref()
                    .and_then(|p| table.dict_get(p, "EarlyChange"))
                    .and_then(Object::as_int)
                    .unwrap_or(1);
                let decoded = lzw_decode(&out, early == 1)?;
                apply_predictor(table, decoded, parm.as_ref())?
            }
            other => {
                return Err(ReadError::MalformedPdf(format!(
                    "unsupported stream filter /{other}"
                )))
            }
        };
    }
    Ok(out)
}

pub fn flate_decode(data: &[u8]) -> Result<Vec<u8>, ReadError> {
    let mut out = Vec::new();
    let mut dec = flate2::read::ZlibDecoder::new(data);
    if dec.read_to_end(&mut out).is_ok() {
        return Ok(out);
    }
    // some producers write raw deflate without the zlib wrapper
    out.clear();
    let mut dec = flate2::read::DeflateDecoder::new(data);
    dec.read_to_end(&mut out)
        .map_err(|e| ReadError::MalformedPdf(format!("FlateDecode: {e}")))?;
    Ok(out)
}

pub fn flate_encode(data: &[u8]) -> Vec<u8> {
    use std::io::Write;
    let mut enc = flate2::write::ZlibEncoder::new(Vec::new(), flate2::Compression::default());
    enc.write_all(data).expect("in-memory write");
    enc.finish().expect("in-memory finish")
}

pub fn ascii_hex_decode(data: &[u8]) -> Result<Vec<u8>, ReadError> {
    let mut nibbles = Vec::with_capacity(data.len());
    for &b in data {
        match b {
            b'>' => break,
            b if b.is_ascii_hexdigit() => nibbles.push((b as char).to_digit(16).unwrap() as u8),
            b'\0' | b'\t' | b'\n' | b'\x0c' | b'\r' | b' ' => {}
            other => {
                return Err(ReadError::MalformedPdf(format!(
                    "ASCIIHexDecode: bad byte 0x{other:02x}"
                )))
            }
        }
    }
    if nibbles.len() % 2 == 1 {
        nibbles.push(0);
    }
    Ok(nibbles.chunks(2).map(|p| (p[0] << 4) | p[1]).collect())
}

/// PDF LZW variant: 8-bit symbols, clear code 256, EOD 257, codes grow from
/// 9 to 12 bits. `early_change` widens the code size one step early.
pub fn lzw_decode(data: &[u8], early_change: bool) -> Result<Vec<u8>, ReadError> {
    const CLEAR: u16 = 256;
    const EOD: u16 = 257;
    let mut table: Vec<Vec<u8>> = (0..258).map(|i| vec![i as u8]).collect();
    let mut out = Vec::new();
    let mut bit_pos = 0usize;
    let mut code_len = 9usize;
    let mut prev: Option<u16> = None;
    let early = usize::from(early_change);

    let read_code = |bit_pos: usize, code_len: usize| -> Option<u16> {
        let mut v: u32 = 0;
        for i in 0..code_len {
            let p = bit_pos + i;
            let byte = *data.get(p / 8)?;
            v = (v << 1) | ((byte >> (7 - (p % 8))) & 1) as u32;
        }
        Some(v as u16)
    };

    loop {
        let Some(code) = read_code(bit_pos, code_len) else {
            break; // trailing partial code is padding
        };
        bit_pos += code_len;
        match code {
            CLEAR => {
                table.truncate(258);
                code_len = 9;
                prev = None;
            }
            EOD => break,
            _ => {
                let entry: Vec<u8> = if (code as usize) < table.len() {
                    table[code as usize].clone()
                } else if let Some(p) = prev {
                    // code == next table index: previous entry + its first byte
                    let mut e = table[p as usize].clone();
                    e.push(table[p as usize][0]);
                    e
                } else {
                    return Err(ReadError::MalformedPdf("LZW: bad first code".into()));
                };
                out.extend_from_slice(&entry);
                if let Some(p) = prev {
                    let mut new_entry = table[p as usize].clone();
                    new_entry.push(entry[0]);
                    table.push(new_entry);
                }
                prev = Some(code);
                if table.len() + early >= (1 << code_len) && code_len < 12 {
                    code_len += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Undoes PNG row predictors (/Predictor >= 10) as used by xref streams.
fn apply_predictor(
    table: &ObjectTable,
    data: Vec<u8>,
    parm: Option<&Dict>,
) -> Result<Vec<u8>, ReadError> {
    let Some(parm) = parm else { return Ok(data) };
    let predictor = table
        .dict_get(parm, "Predictor")
        .and_then(Object::as_int)
        .unwrap_or(1);
    if predictor < 2 {
        return Ok(data);
    }
    let colors = table
        .dict_get(parm, "Colors")
        .and_then(Object::as_int)
        .unwrap_or(1) as usize;
    let bpc = table
        .dict_get(parm, "BitsPerComponent")
        .and_then(Object::as_int)
        .unwrap_or(8) as usize;
    let columns = table
        .dict_get(parm, "Columns")
        .and_then(Object::as_int)
        .unwrap_or(1) as usize;
    let bpp = (colors * bpc).div_ceil(8);
    let row_len = (colors * bpc * columns).div_ceil(8);

    if predictor == 2 {
        // TIFF predictor, 8-bit components only
        if bpc != 8 {
            return Err(ReadError::MalformedPdf("TIFF predictor with bpc != 8".into()));
        }
        let mut out = data;
        for row in out.chunks_mut(row_len) {
            for i in bpp..row.len() {
                row[i] = row[i].wrapping_add(row[i - bpp]);
            }
        }
        return Ok(out);
    }

    // PNG predictors: each row prefixed with a filter-type byte
    let stride = row_len + 1;
    let mut out = Vec::with_capacity(data.len());
    let mut prev_row = vec![0u8; row_len];
    for chunk in data.chunks(stride) {
        if chunk.len() < 2 {
            break;
        }
        let ftype = chunk[0];
        let mut row = chunk[1..].to_vec();
        row.resize(row_len, 0);
        for i in 0..row.len() {
            let a = if i >= bpp { row[i - bpp] } else { 0 };
            let b = prev_row[i];
            let c = if i >= bpp { prev_row[i - bpp] } else { 0 };
            let x = row[i];
            row[i] = match ftype {
                0 => x,
                1 => x.wrapping_add(a),
                2 => x.wrapping_add(b),
                3 => x.wrapping_add((((a as u16) + (b as u16)) / 2) as u8),
                4 => {
                    let p = a as i16 + b as i16 - c as i16;
                    let (pa, pb, pc) = (
                        (p - a as i16).abs(),
                        (p - b as i16).abs(),
                        (p - c as i16).abs(),
                    );
                    let pred = if pa <= pb && pa <= pc {
                        a
                    } else if pb <= pc {
                        b
                    } else {
                        c
                    };
                    x.wrapping_add(pred)
                }
                other => {
                    return Err(ReadError::MalformedPdf(format!(
                        "unknown PNG filter type {other}"
                    )))
                }
            };
        }
        out.extend_from_slice(&row);
        prev_row = row;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flate_round_trip() {
        let src = b"BT /F1 12 Tf (hello) Tj ET".repeat(20);
        let enc = flate_encode(&src);
        assert!(enc.len() < src.len());
        assert_eq!(flate_decode(&enc).unwrap(), src);
    }

    #[test]
    fn ascii_hex() {
        assert_eq!(ascii_hex_decode(b"48 65 6C 6C 6F>").unwrap(), b"Hello");
        assert_eq!(ascii_hex_decode(b"486>").unwrap(), vec![0x48, 0x60]);
        assert!(ascii_hex_decode(b"4Z>").is_err());
    }

    #[test]
    fn lzw_known_vector() {
        // vector generated by an independent encoder; decodes to
        // 45 45 45 65 65 65 66 66 66
        let data = [0x80, 0x11, 0x60, 0x46, 0x58, 0x21, 0x9a, 0x0d, 0x01];
        let out = lzw_decode(&data, true).unwrap();
        assert_eq!(out, vec![0x45, 0x45, 0x45, 0x65, 0x65, 0x65, 0x66, 0x66, 0x66]);
    }
}
