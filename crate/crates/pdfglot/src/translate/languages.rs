//! Language registry: BCP-47-style codes, display names, and the script
//! grouping the renderer uses to pick target fonts.

use std::collections::BTreeMap;

/// Script family of a target language, for font selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Script {
    Latin,
    Cyrillic,
    Greek,
    Cjk,
    Arabic,
    Devanagari,
    Thai,
    Hebrew,
    Ethiopic,
    Bengali,
    Gujarati,
    Kannada,
    Malayalam,
    Tamil,
    Telugu,
    Cherokee,
    Other,
}

/// (code, display name, script)
const LANGUAGES: &[(&str, &str, Script)] = &[
    ("am", "Amharic", Script::Ethiopic),
    ("ar", "Arabic", Script::Arabic),
    ("eu", "Basque", Script::Latin),
    ("bn", "Bengali", Script::Bengali),
    ("en-GB", "English (UK)", Script::Latin),
    ("pt-BR", "Portuguese (Brazil)", Script::Latin),
    ("bg", "Bulgarian", Script::Cyrillic),
    ("ca", "Catalan", Script::Latin),
    ("chr", "Cherokee", Script::Cherokee),
    ("hr", "Croatian", Script::Latin),
    ("cs", "Czech", Script::Latin),
    ("da", "Danish", Script::Latin),
    ("nl", "Dutch", Script::Latin),
    ("en-US", "English (US)", Script::Latin),
    ("et", "Estonian", Script::Latin),
    ("fil", "Filipino", Script::Latin),
    ("fi", "Finnish", Script::Latin),
    ("fr", "French", Script::Latin),
    ("de", "German", Script::Latin),
    ("el", "Greek", Script::Greek),
    ("gu", "Gujarati", Script::Gujarati),
    ("he", "Hebrew", Script::Hebrew),
    ("hi", "Hindi", Script::Devanagari),
    ("hu", "Hungarian", Script::Latin),
    ("is", "Icelandic", Script::Latin),
    ("id", "Indonesian", Script::Latin),
    ("it", "Italian", Script::Latin),
    ("ja", "Japanese", Script::Cjk),
    ("kn", "Kannada", Script::Kannada),
    ("ko", "Korean", Script::Cjk),
    ("lv", "Latvian", Script::Latin),
    ("lt", "Lithuanian", Script::Latin),
    ("ms", "Malay", Script::Latin),
    ("ml", "Malayalam", Script::Malayalam),
    ("mr", "Marathi", Script::Devanagari),
    ("no", "Norwegian", Script::Latin),
    ("pl", "Polish", Script::Latin),
    ("pt-PT", "Portuguese (Portugal)", Script::Latin),
    ("ro", "Romanian", Script::Latin),
    ("ru", "Russian", Script::Cyrillic),
    ("sr", "Serbian", Script::Cyrillic),
    ("zh-CN", "Chinese (Simplified)", Script::Cjk),
    ("sk", "Slovak", Script::Latin),
    ("sl", "Slovenian", Script::Latin),
    ("es", "Spanish", Script::Latin),
    ("sw", "Swahili", Script::Latin),
    ("sv", "Swedish", Script::Latin),
    ("ta", "Tamil", Script::Tamil),
    ("te", "Telugu", Script::Telugu),
    ("th", "Thai", Script::Thai),
    ("zh-TW", "Chinese (Traditional)", Script::Cjk),
    ("tr", "Turkish", Script::Latin),
    ("ur", "Urdu", Script::Arabic),
    ("uk", "Ukrainian", Script::Cyrillic),
    ("vi", "Vietnamese", Script::Latin),
    ("cy", "Welsh", Script::Latin),
    // bare-code aliases accepted on the command line
    ("en", "English", Script::Latin),
    ("pt", "Portuguese", Script::Latin),
    ("zh", "Chinese (Simplified)", Script::Cjk),
];

/// Code -> display-name registry covering every supported language.
#[derive(Debug, Clone)]
pub struct LanguageRegistry {
    map: BTreeMap<&'static str, (&'static str, Script)>,
}

impl LanguageRegistry {
    pub fn new() -> Self {
        Self {
            map: LANGUAGES.iter().map(|&(c, n, s)| (c, (n, s))).collect(),
        }
    }

    pub fn display_name(&self, code: &str) -> Option<&'static str> {
        self.map.get(code).map(|&(n, _)| n)
    }

    /// Display name when known, the raw code otherwise.
    pub fn display_or_code<'a>(&self, code: &'a str) -> &'a str
    where
        'static: 'a,
    {
        self.display_name(code).unwrap_or(code)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.map.contains_key(code)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.map.iter().map(|(&c, &(n, _))| (c, n))
    }
}

impl Default for LanguageRegistry {
    fn default() -> Self {
        Self::new()
    }
}

/// Script family for a language code; unknown codes default to Latin.
pub fn script_for(code: &str) -> Script {
    LanguageRegistry::new()
        .map
        .get(code)
        .map(|&(_, s)| s)
        .unwrap_or(Script::Latin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_least_56_languages() {
        assert!(LanguageRegistry::new().len() >= 56);
    }

    #[test]
    fn lookups() {
        let reg = LanguageRegistry::new();
        assert_eq!(reg.display_name("chr"), Some("Cherokee"));
        assert_eq!(reg.display_name("zh-CN"), Some("Chinese (Simplified)"));
        assert_eq!(reg.display_or_code("xx-unknown"), "xx-unknown");
        assert_eq!(script_for("ja"), Script::Cjk);
        assert_eq!(script_for("ru"), Script::Cyrillic);
        assert_eq!(script_for("he"), Script::Hebrew);
        assert_eq!(script_for("nosuch"), Script::Latin);
    }
}
