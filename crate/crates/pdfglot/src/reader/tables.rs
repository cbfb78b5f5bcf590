//! Static encoding and metric tables: WinAnsi/MacRoman/Standard byte
//! encodings, a glyph-name-to-Unicode map, and Standard-14 advance widths.

/// WinAnsiEncoding for codes 0x80..=0xFF (0 = unmapped).
const WIN_ANSI_HIGH: [u16; 128] = [
    0x20AC, 0x0000, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x0000, 0x017D, 0x0000,
    0x0000, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x0000, 0x017E, 0x0178,
    0x00A0, 0x00A1, 0x00A2, 0x00A3, 0x00A4, 0x00A5, 0x00A6, 0x00A7,
    0x00A8, 0x00A9, 0x00AA, 0x00AB, 0x00AC, 0x00AD, 0x00AE, 0x00AF,
    0x00B0, 0x00B1, 0x00B2, 0x00B3, 0x00B4, 0x00B5, 0x00B6, 0x00B7,
    0x00B8, 0x00B9, 0x00BA, 0x00BB, 0x00BC, 0x00BD, 0x00BE, 0x00BF,
    0x00C0, 0x00C1, 0x00C2, 0x00C3, 0x00C4, 0x00C5, 0x00C6, 0x00C7,
    0x00C8, 0x00C9, 0x00CA, 0x00CB, 0x00CC, 0x00CD, 0x00CE, 0x00CF,
    0x00D0, 0x00D1, 0x00D2, 0x00D3, 0x00D4, 0x00D5, 0x00D6, 0x00D7,
    0x00D8, 0x00D9, 0x00DA, 0x00DB, 0x00DC, 0x00DD, 0x00DE, 0x00DF,
    0x00E0, 0x00E1, 0x00E2, 0x00E3, 0x00E4, 0x00E5, 0x00E6, 0x00E7,
    0x00E8, 0x00E9, 0x00EA, 0x00EB, 0x00EC, 0x00ED, 0x00EE, 0x00EF,
    0x00F0, 0x00F1, 0x00F2, 0x00F3, 0x00F4, 0x00F5, 0x00F6, 0x00F7,
    0x00F8, 0x00F9, 0x00FA, 0x00FB, 0x00FC, 0x00FD, 0x00FE, 0x00FF,
];

/// MacRomanEncoding for codes 0x80..=0xFF.
const MAC_ROMAN_HIGH: [u16; 128] = [
    0x00C4, 0x00C5, 0x00C7, 0x00C9, 0x00D1, 0x00D6, 0x00DC, 0x00E1,
    0x00E0, 0x00E2, 0x00E4, 0x00E3, 0x00E5, 0x00E7, 0x00E9, 0x00E8,
    0x00EA, 0x00EB, 0x00ED, 0x00EC, 0x00EE, 0x00EF, 0x00F1, 0x00F3,
    0x00F2, 0x00F4, 0x00F6, 0x00F5, 0x00FA, 0x00F9, 0x00FB, 0x00FC,
    0x2020, 0x00B0, 0x00A2, 0x00A3, 0x00A7, 0x2022, 0x00B6, 0x00DF,
    0x00AE, 0x00A9, 0x2122, 0x00B4, 0x00A8, 0x2260, 0x00C6, 0x00D8,
    0x221E, 0x00B1, 0x2264, 0x2265, 0x00A5, 0x00B5, 0x2202, 0x2211,
    0x220F, 0x03C0, 0x222B, 0x00AA, 0x00BA, 0x03A9, 0x00E6, 0x00F8,
    0x00BF, 0x00A1, 0x00AC, 0x221A, 0x0192, 0x2248, 0x2206, 0x00AB,
    0x00BB, 0x2026, 0x00A0, 0x00C0, 0x00C3, 0x00D5, 0x0152, 0x0153,
    0x2013, 0x2014, 0x201C, 0x201D, 0x2018, 0x2019, 0x00F7, 0x25CA,
    0x00FF, 0x0178, 0x2044, 0x20AC, 0x2039, 0x203A, 0xFB01, 0xFB02,
    0x2021, 0x00B7, 0x201A, 0x201E, 0x2030, 0x00C2, 0x00CA, 0x00C1,
    0x00CB, 0x00C8, 0x00CD, 0x00CE, 0x00CF, 0x00CC, 0x00D3, 0x00D4,
    0xF8FF, 0x00D2, 0x00DA, 0x00DB, 0x00D9, 0x0131, 0x02C6, 0x02DC,
    0x00AF, 0x02D8, 0x02D9, 0x02DA, 0x00B8, 0x02DD, 0x02DB, 0x02C7,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseEncoding {
    Standard,
    WinAnsi,
    MacRoman,
}

/// Builds the 256-entry byte-to-Unicode table for a base encoding.
pub fn base_encoding_table(base: BaseEncoding) -> Box<[Option<char>; 256]> {
    let mut table = Box::new([None; 256]);
    for code in 0x20..0x7fu16 {
        table[code as usize] = char::from_u32(code as u32);
    }
    match base {
        BaseEncoding::Standard => {
            // StandardEncoding deviations in the ASCII range
            table[0x27] = Some('\u{2019}'); // quoteright
            table[0x60] = Some('\u{2018}'); // quoteleft
        }
        BaseEncoding::WinAnsi => {
            for (i, &u) in WIN_ANSI_HIGH.iter().enumerate() {
                table[0x80 + i] = if u == 0 { None } else { char::from_u32(u as u32) };
            }
        }
        BaseEncoding::MacRoman => {
            for (i, &u) in MAC_ROMAN_HIGH.iter().enumerate() {
                table[0x80 + i] = char::from_u32(u as u32);
            }
        }
    }
    table
}

/// Unicode scalar for a glyph name (Adobe Glyph List subset plus the
/// uniXXXX / uXXXX[XX] conventions).
pub fn glyph_name_to_char(name: &str) -> Option<char> {
    if let Some(hex) = name.strip_prefix("uni") {
        if hex.len() >= 4 {
            if let Ok(v) = u32::from_str_radix(&hex[..4], 16) {
                return char::from_u32(v);
            }
        }
    }
    if let Some(hex) = name.strip_prefix('u') {
        if (4..=6).contains(&hex.len()) {
            if let Ok(v) = u32::from_str_radix(hex, 16) {
                return char::from_u32(v);
            }
        }
    }
    let mut chars = name.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_ascii_alphanumeric() {
            return Some(c);
        }
    }
    let u = match name {
        "space" => ' ',
        "exclam" => '!',
        "quotedbl" => '"',
        "numbersign" => '#',
        "dollar" => '$',
        "percent" => '%',
        "ampersand" => '&',
        "quotesingle" => '\'',
        "quoteright" => '\u{2019}',
        "quoteleft" => '\u{2018}',
        "parenleft" => '(',
        "parenright" => ')',
        "asterisk" => '*',
        "plus" => '+',
        "comma" => ',',
        "hyphen" | "minus" => '-',
        "period" => '.',
        "slash" => '/',
        "zero" => '0',
        "one" => '1',
        "two" => '2',
        "three" => '3',
        "four" => '4',
        "five" => '5',
        "six" => '6',
        "seven" => '7',
        "eight" => '8',
        "nine" => '9',
        "colon" => ':',
        "semicolon" => ';',
        "less" => '<',
        "equal" => '=',
        "greater" => '>',
        "question" => '?',
        "at" => '@',
        "bracketleft" => '[',
        "backslash" => '\\',
        "bracketright" => ']',
        "asciicircum" => '^',
        "underscore" => '_',
        "grave" => '`',
        "braceleft" => '{',
        "bar" => '|',
        "braceright" => '}',
        "asciitilde" => '~',
        "bullet" => '\u{2022}',
        "dagger" => '\u{2020}',
        "daggerdbl" => '\u{2021}',
        "ellipsis" => '\u{2026}',
        "emdash" => '\u{2014}',
        "endash" => '\u{2013}',
        "florin" => '\u{0192}',
        "fraction" => '\u{2044}',
        "guilsinglleft" => '\u{2039}',
        "guilsinglright" => '\u{203A}',
        "perthousand" => '\u{2030}',
        "quotedblbase" => '\u{201E}',
        "quotedblleft" => '\u{201C}',
        "quotedblright" => '\u{201D}',
        "quotesinglbase" => '\u{201A}',
        "trademark" => '\u{2122}',
        "fi" => '\u{FB01}',
        "fl" => '\u{FB02}',
        "Lslash" => '\u{0141}',
        "lslash" => '\u{0142}',
        "OE" => '\u{0152}',
        "oe" => '\u{0153}',
        "Scaron" => '\u{0160}',
        "scaron" => '\u{0161}',
        "Ydieresis" => '\u{0178}',
        "Zcaron" => '\u{017D}',
        "zcaron" => '\u{017E}',
        "dotlessi" => '\u{0131}',
        "degree" => '\u{00B0}',
        "plusminus" => '\u{00B1}',
        "multiply" => '\u{00D7}',
        "divide" => '\u{00F7}',
        "copyright" => '\u{00A9}',
        "registered" => '\u{00AE}',
        "section" => '\u{00A7}',
        "paragraph" => '\u{00B6}',
        "middot" | "periodcentered" => '\u{00B7}',
        "nbspace" => '\u{00A0}',
        "sterling" => '\u{00A3}',
        "yen" => '\u{00A5}',
        "cent" => '\u{00A2}',
        "currency" => '\u{00A4}',
        "Euro" => '\u{20AC}',
        "alpha" => '\u{03B1}',
        "beta" => '\u{03B2}',
        "gamma" => '\u{03B3}',
        "delta" => '\u{03B4}',
        "epsilon" => '\u{03B5}',
        "lambda" => '\u{03BB}',
        "mu" => '\u{03BC}',
        "pi" => '\u{03C0}',
        "sigma" => '\u{03C3}',
        "phi" => '\u{03C6}',
        "omega" => '\u{03C9}',
        "Gamma" => '\u{0393}',
        "Delta" => '\u{0394}',
        "Lambda" => '\u{039B}',
        "Pi" => '\u{03A0}',
        "Sigma" => '\u{03A3}',
        "Omega" => '\u{03A9}',
        "infinity" => '\u{221E}',
        "integral" => '\u{222B}',
        "partialdiff" => '\u{2202}',
        "summation" => '\u{2211}',
        "product" => '\u{220F}',
        "radical" => '\u{221A}',
        "approxequal" => '\u{2248}',
        "notequal" => '\u{2260}',
        "lessequal" => '\u{2264}',
        "greaterequal" => '\u{2265}',
        "element" => '\u{2208}',
        "arrowright" => '\u{2192}',
        "arrowleft" => '\u{2190}',
        _ => return None,
    };
    Some(u)
}

// ---------------------------------------------------------------------------
// Standard-14 metrics (codes 32..=126, units of 1/1000 em, from the Adobe
// core AFM files)
// ---------------------------------------------------------------------------

const HELVETICA_WIDTHS: [u16; 95] = [
    278, 278, 355, 556, 556, 889, 667, 222, 333, 333, 389, 584, 278, 333, 278, 278, 556, 556, 556,
    556, 556, 556, 556, 556, 556, 556, 278, 278, 584, 584, 584, 556, 1015, 667, 667, 722, 722,
    667, 611, 778, 722, 278, 500, 667, 556, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944,
    667, 667, 611, 278, 278, 278, 469, 556, 222, 556, 556, 500, 556, 556, 278, 556, 556, 222, 222,
    500, 222, 833, 556, 556, 556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500, 334, 260, 334,
    584,
];

const HELVETICA_BOLD_WIDTHS: [u16; 95] = [
    278, 333, 474, 556, 556, 889, 722, 278, 333, 333, 389, 584, 278, 333, 278, 278, 556, 556, 556,
    556, 556, 556, 556, 556, 556, 556, 333, 333, 584, 584, 584, 611, 975, 722, 722, 722, 722, 667,
    611, 778, 722, 278, 556, 722, 611, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944, 667,
    667, 611, 333, 278, 333, 584, 556, 278, 556, 611, 556, 611, 556, 333, 611, 611, 278, 278, 556,
    278, 889, 611, 611, 611, 611, 389, 556, 333, 611, 556, 778, 556, 556, 500, 389, 280, 389, 584,
];

const TIMES_ROMAN_WIDTHS: [u16; 95] = [
    250, 333, 408, 500, 500, 833, 778, 333, 333, 333, 500, 564, 250, 333, 250, 278, 500, 500, 500,
    500, 500, 500, 500, 500, 500, 500, 278, 278, 564, 564, 564, 444, 921, 722, 667, 667, 722, 611,
    556, 722, 722, 333, 389, 722, 611, 889, 722, 722, 556, 722, 667, 556, 611, 722, 722, 944, 722,
    722, 611, 333, 278, 333, 469, 500, 333, 444, 500, 444, 500, 444, 333, 500, 500, 278, 278, 500,
    278, 778, 500, 500, 500, 500, 333, 389, 278, 500, 500, 722, 500, 500, 444, 480, 200, 480, 541,
];

const TIMES_BOLD_WIDTHS: [u16; 95] = [
    250, 333, 555, 500, 500, 1000, 833, 333, 333, 333, 500, 570, 250, 333, 250, 278, 500, 500,
    500, 500, 500, 500, 500, 500, 500, 500, 333, 333, 570, 570, 570, 500, 930, 722, 667, 722, 722,
    667, 611, 778, 778, 389, 500, 778, 667, 944, 722, 778, 611, 778, 722, 556, 667, 722, 722,
    1000, 722, 722, 667, 333, 278, 333, 581, 500, 333, 500, 556, 444, 556, 444, 333, 500, 556,
    278, 333, 556, 278, 833, 556, 500, 556, 556, 444, 389, 333, 556, 500, 722, 500, 500, 444, 394,
    220, 394, 520,
];

/// Vertical metrics per family: (ascent, descent) in 1/1000 em.
pub struct BuiltinMetrics {
    pub widths: &'static [u16; 95],
    pub fixed: Option<u16>,
    pub ascent: f64,
    pub descent: f64,
}

/// Metrics for a Standard-14 base font name (subset prefixes stripped by the
/// caller). Oblique/italic variants share the upright tables; Courier is
/// fixed-pitch 600.
pub fn builtin_metrics(base_name: &str) -> Option<BuiltinMetrics> {
    let name = base_name.rsplit('+').next().unwrap_or(base_name);
    let lower = name.to_ascii_lowercase();
    let is_bold = lower.contains("bold");
    if lower.starts_with("courier") {
        return Some(BuiltinMetrics {
            widths: &HELVETICA_WIDTHS, // unused when fixed is set
            fixed: Some(600),
            ascent: 629.0,
            descent: -157.0,
        });
    }
    if lower.starts_with("helvetica") || lower.starts_with("arial") {
        return Some(BuiltinMetrics {
            widths: if is_bold {
                &HELVETICA_BOLD_WIDTHS
            } else {
                &HELVETICA_WIDTHS
            },
            fixed: None,
            ascent: 718.0,
            descent: -207.0,
        });
    }
    if lower.starts_with("times") {
        return Some(BuiltinMetrics {
            widths: if is_bold {
                &TIMES_BOLD_WIDTHS
            } else {
                &TIMES_ROMAN_WIDTHS
            },
            fixed: None,
            ascent: 683.0,
            descent: -217.0,
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winansi_ascii_and_high() {
        let t = base_encoding_table(BaseEncoding::WinAnsi);
        assert_eq!(t[b'H' as usize], Some('H'));
        assert_eq!(t[0x80], Some('\u{20AC}'));
        assert_eq!(t[0x9F], Some('\u{0178}'));
        assert_eq!(t[0x81], None);
    }

    #[test]
    fn glyph_names() {
        assert_eq!(glyph_name_to_char("A"), Some('A'));
        assert_eq!(glyph_name_to_char("space"), Some(' '));
        assert_eq!(glyph_name_to_char("uni4F60"), Some('你'));
        assert_eq!(glyph_name_to_char("u1D400"), Some('\u{1D400}'));
        assert_eq!(glyph_name_to_char("nosuchglyphname"), None);
    }

    #[test]
    fn helvetica_reference_widths() {
        let m = builtin_metrics("Helvetica").unwrap();
        assert_eq!(m.widths[(b'H' - 32) as usize], 722);
        assert_eq!(m.widths[(b'i' - 32) as usize], 222);
        let c = builtin_metrics("Courier-Bold").unwrap();
        assert_eq!(c.fixed, Some(600));
    }
}
