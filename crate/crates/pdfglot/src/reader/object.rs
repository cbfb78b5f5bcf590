//! PDF object model and the object-level parser.
//!
//! Covers the unencrypted PDF 1.4-1.7 subset: literal/hex strings, names
//! with `#xx` escapes, arrays, dictionaries, streams, and indirect
//! references. Streams keep their raw (still encoded) data.

use std::collections::BTreeMap;

use crate::error::ReadError;

pub type Dict = BTreeMap<String, Object>;

/// A parsed PDF object.
#[derive(Debug, Clone, PartialEq)]
pub enum Object {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    /// String bytes after escape processing; not necessarily UTF-8.
    Str(Vec<u8>),
    Name(String),
    Array(Vec<Object>),
    Dict(Dict),
    Stream(Stream),
    /// Indirect reference `num gen R`.
    Ref(u32, u16),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub dict: Dict,
    /// Raw stream data, exactly as stored in the file (filters not applied).
    pub data: Vec<u8>,
}

impl Object {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Object::Int(i) => Some(*i),
            Object::Real(r) => Some(*r as i64),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Object::Int(i) => Some(*i as f64),
            Object::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            Object::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[Object]> {
        match self {
            Object::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_dict(&self) -> Option<&Dict> {
        match self {
            Object::Dict(d) => Some(d),
            Object::Stream(s) => Some(&s.dict),
            _ => None,
        }
    }

    pub fn as_stream(&self) -> Option<&Stream> {
        match self {
            Object::Stream(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_ref_id(&self) -> Option<(u32, u16)> {
        match self {
            Object::Ref(n, g) => Some((*n, *g)),
            _ => None,
        }
    }
}

/// All indirect objects of a document plus the merged trailer.
#[derive(Debug, Default)]
pub struct ObjectTable {
    pub objects: BTreeMap<(u32, u16), Object>,
    pub trailer: Dict,
}

impl ObjectTable {
    pub fn get(&self, id: (u32, u16)) -> Option<&Object> {
        self.objects.get(&id)
    }

    /// Follows reference chains until a direct object (or Null for dangling
    /// references).
    pub fn resolve<'a>(&'a self, obj: &'a Object) -> &'a Object {
        let mut cur = obj;
        // reference chains deeper than this indicate a cycle
        for _ in 0..32 {
            match cur {
                Object::Ref(n, g) => match self.get((*n, *g)) {
                    Some(next) => cur = next,
                    None => return &Object::Null,
                },
                other => return other,
            }
        }
        &Object::Null
    }

    /// Resolved dictionary entry lookup.
    pub fn dict_get<'a>(&'a self, dict: &'a Dict, key: &str) -> Option<&'a Object> {
        dict.get(key).map(|o| self.resolve(o))
    }
}

pub fn is_whitespace(b: u8) -> bool {
    matches!(b, b'\0' | b'\t' | b'\n' | b'\x0c' | b'\r' | b' ')
}

pub fn is_delimiter(b: u8) -> bool {
    matches!(
        b,
        b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%'
    )
}

pub fn is_regular(b: u8) -> bool {
    !is_whitespace(b) && !is_delimiter(b)
}

/// Cursor over raw PDF bytes with object-level parsing.
pub struct Parser<'a> {
    pub data: &'a [u8],
    pub pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Self { data, pos }
    }

    fn err(&self, msg: impl Into<String>) -> ReadError {
        ReadError::MalformedPdf(format!("offset {}: {}", self.pos, msg.into()))
    }

    pub fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    pub fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if is_whitespace(b) {
                self.pos += 1;
            } else if b == b'%' {
                // comment runs to end of line
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Reads a run of regular characters (keyword, number, ...).
    pub fn read_token(&mut self) -> &'a [u8] {
        let start = self.pos;
        while self.peek().is_some_and(is_regular) {
            self.pos += 1;
        }
        &self.data[start..self.pos]
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ReadError> {
        self.skip_ws();
        let tok = self.read_token();
        if tok == kw.as_bytes() {
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {:?}, found {:?}",
                kw,
                String::from_utf8_lossy(tok)
            )))
        }
    }

    /// Parses one object starting at the cursor (after leading whitespace).
    pub fn parse_object(&mut self) -> Result<Object, ReadError> {
        self.skip_ws();
        let b = self.peek().ok_or_else(|| self.err("unexpected EOF"))?;
        match b {
            b'/' => self.parse_name().map(Object::Name),
            b'(' => self.parse_literal_string().map(Object::Str),
            b'<' => {
                if self.data.get(self.pos + 1) == Some(&b'<') {
                    self.parse_dict_or_stream()
                } else {
                    self.parse_hex_string().map(Object::Str)
                }
            }
            b'[' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Object::Array(items));
                        }
                        Some(_) => items.push(self.parse_object()?),
                        None => return Err(self.err("unterminated array")),
                    }
                }
            }
            b'+' | b'-' | b'.' | b'0'..=b'9' => self.parse_number_or_ref(),
            _ => {
                let tok = self.read_token();
                match tok {
                    b"true" => Ok(Object::Bool(true)),
                    b"false" => Ok(Object::Bool(false)),
                    b"null" => Ok(Object::Null),
                    _ => Err(self.err(format!("unexpected token {:?}", String::from_utf8_lossy(tok)))),
                }
            }
        }
    }

    fn parse_name(&mut self) -> Result<String, ReadError> {
        debug_assert_eq!(self.peek(), Some(b'/'));
        self.pos += 1;
        let mut out = String::new();
        while let Some(b) = self.peek() {
            if !is_regular(b) {
                break;
            }
            self.pos += 1;
            if b == b'#' {
                let hex = self
                    .data
                    .get(self.pos..self.pos + 2)
                    .ok_or_else(|| self.err("truncated #xx escape in name"))?;
                let v = u8::from_str_radix(std::str::from_utf8(hex).unwrap_or("zz"), 16)
                    .map_err(|_| self.err("bad #xx escape in name"))?;
                self.pos += 2;
                out.push(v as char);
            } else {
                out.push(b as char);
            }
        }
        Ok(out)
    }

    fn parse_literal_string(&mut self) -> Result<Vec<u8>, ReadError> {
        debug_assert_eq!(self.peek(), Some(b'('));
        self.pos += 1;
        let mut out = Vec::new();
        let mut depth = 1usize;
        while let Some(b) = self.peek() {
            self.pos += 1;
            match b {
                b'\\' => {
                    let esc = self.peek().ok_or_else(|| self.err("unterminated string"))?;
                    self.pos += 1;
                    match esc {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(0x08),
                        b'f' => out.push(0x0c),
                        b'(' => out.push(b'('),
                        b')' => out.push(b')'),
                        b'\\' => out.push(b'\\'),
                        b'\r' => {
                            // line continuation; swallow optional LF
                            if self.peek() == Some(b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'\n' => {}
                        b'0'..=b'7' => {
                            let mut v = (esc - b'0') as u32;
                            for _ in 0..2 {
                                match self.peek() {
                                    Some(d @ b'0'..=b'7') => {
                                        v = v * 8 + (d - b'0') as u32;
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push((v & 0xff) as u8);
                        }
                        other => out.push(other),
                    }
                }
                b'(' => {
                    depth += 1;
                    out.push(b);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(out);
                    }
                    out.push(b);
                }
                _ => out.push(b),
            }
        }
        Err(self.err("unterminated literal string"))
    }

    fn parse_hex_string(&mut self) -> Result<Vec<u8>, ReadError> {
        debug_assert_eq!(self.peek(), Some(b'<'));
        self.pos += 1;
        let mut nibbles = Vec::new();
        loop {
            match self.peek() {
                Some(b'>') => {
                    self.pos += 1;
                    break;
                }
                Some(b) if b.is_ascii_hexdigit() => {
                    nibbles.push((b as char).to_digit(16).unwrap() as u8);
                    self.pos += 1;
                }
                Some(b) if is_whitespace(b) => self.pos += 1,
                Some(_) => return Err(self.err("bad character in hex string")),
                None => return Err(self.err("unterminated hex string")),
            }
        }
        if nibbles.len() % 2 == 1 {
            nibbles.push(0);
        }
        Ok(nibbles.chunks(2).map(|p| (p[0] << 4) | p[1]).collect())
    }

    fn parse_number_or_ref(&mut self) -> Result<Object, ReadError> {
        let first = self.parse_number()?;
        // "num gen R" lookahead
        if let Object::Int(num) = first {
            if num >= 0 {
                let save = self.pos;
                self.skip_ws();
                if self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    if let Ok(Object::Int(gen)) = self.parse_number() {
                        self.skip_ws();
                        if self.peek() == Some(b'R')
                            && !self.data.get(self.pos + 1).copied().is_some_and(is_regular)
                        {
                            self.pos += 1;
                            return Ok(Object::Ref(num as u32, gen as u16));
                        }
                    }
                }
                self.pos = save;
            }
        }
        Ok(first)
    }

    pub fn parse_number(&mut self) -> Result<Object, ReadError> {
        self.skip_ws();
        let tok = self.read_token();
        if tok.is_empty() {
            return Err(self.err("expected number"));
        }
        let s = std::str::from_utf8(tok).map_err(|_| self.err("non-ascii number"))?;
        if s.contains('.') {
            s.parse::<f64>()
                .map(Object::Real)
                .map_err(|_| self.err(format!("bad real {s:?}")))
        } else {
            s.parse::<i64>()
                .map(Object::Int)
                .map_err(|_| self.err(format!("bad integer {s:?}")))
        }
    }

    fn parse_dict_or_stream(&mut self) -> Result<Object, ReadError> {
        self.pos += 2; // <<
        let mut dict = Dict::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'>') => {
                    if self.data.get(self.pos + 1) == Some(&b'>') {
                        self.pos += 2;
                        break;
                    }
                    return Err(self.err("lone '>' in dictionary"));
                }
                Some(b'/') => {
                    let key = self.parse_name()?;
                    let value = self.parse_object()?;
                    dict.insert(key, value);
                }
                Some(_) => return Err(self.err("expected name key in dictionary")),
                None => return Err(self.err("unterminated dictionary")),
            }
        }
        // stream keyword after the dict?
        let save = self.pos;
        self.skip_ws();
        if self.data[self.pos..].starts_with(b"stream") {
            self.pos += b"stream".len();
            // EOL after "stream": CRLF or LF
            if self.data.get(self.pos) == Some(&b'\r') {
                self.pos += 1;
            }
            if self.data.get(self.pos) == Some(&b'\n') {
                self.pos += 1;
            }
            let data = self.read_stream_data(&dict)?;
            return Ok(Object::Stream(Stream { dict, data }));
        }
        self.pos = save;
        Ok(Object::Dict(dict))
    }

    /// Reads stream data using /Length when it is a direct integer, falling
    /// back to scanning for "endstream" (covers indirect /Length).
    fn read_stream_data(&mut self, dict: &Dict) -> Result<Vec<u8>, ReadError> {
        let start = self.pos;
        if let Some(Object::Int(len)) = dict.get("Length") {
            let len = *len as usize;
            if start + len <= self.data.len() {
                let end = start + len;
                let mut probe = Parser::at(self.data, end);
                probe.skip_ws();
                if probe.data[probe.pos..].starts_with(b"endstream") {
                    self.pos = probe.pos + b"endstream".len();
                    return Ok(self.data[start..end].to_vec());
                }
            }
        }
        // scan for the closing keyword
        let hay = &self.data[start..];
        let needle = b"endstream";
        let mut idx = None;
        let mut i = 0;
        while i + needle.len() <= hay.len() {
            if &hay[i..i + needle.len()] == needle {
                idx = Some(i);
                break;
            }
            i += 1;
        }
        let end_rel = idx.ok_or_else(|| self.err("stream without endstream"))?;
        // strip the EOL that precedes endstream
        let mut data_end = start + end_rel;
        if data_end > start && self.data[data_end - 1] == b'\n' {
            data_end -= 1;
        }
        if data_end > start && self.data[data_end - 1] == b'\r' {
            data_end -= 1;
        }
        self.pos = start + end_rel + needle.len();
        Ok(self.data[start..data_end].to_vec())
    }

    /// Parses an indirect object "num gen obj ... endobj" at the cursor.
    pub fn parse_indirect(&mut self) -> Result<((u32, u16), Object), ReadError> {
        self.skip_ws();
        let num = match self.parse_number()? {
            Object::Int(n) if n >= 0 => n as u32,
            other => return Err(self.err(format!("bad object number {other:?}"))),
        };
        let gen = match self.parse_number()? {
            Object::Int(g) if g >= 0 => g as u16,
            other => return Err(self.err(format!("bad generation {other:?}"))),
        };
        self.expect_keyword("obj")?;
        let obj = self.parse_object()?;
        // be lenient about a missing endobj as long as the object parsed
        let save = self.pos;
        self.skip_ws();
        if self.data[self.pos..].starts_with(b"endobj") {
            self.pos += b"endobj".len();
        } else {
            self.pos = save;
        }
        Ok(((num, gen), obj))
    }
}
