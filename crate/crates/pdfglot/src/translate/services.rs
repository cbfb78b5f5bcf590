//! Bundled deterministic test services: identity, dictionary, reverser.

use std::collections::BTreeMap;

use crate::error::{RegistryError, ServiceError};
use crate::segment::PlaceholderMap;
use crate::translate::{
    ServiceConfig, ServiceDescriptor, ServiceKind, ServiceRegistry, TranslateRequest, Translator,
};

/// Returns its input unchanged.
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn translate(&self, req: &TranslateRequest) -> Result<String, ServiceError> {
        Ok(req.text.clone())
    }
}

/// Maps whole words through a fixed lexicon; unmapped words pass through.
pub struct DictionaryTranslator {
    lexicon: BTreeMap<String, String>,
}

impl DictionaryTranslator {
    pub fn new(lexicon: BTreeMap<String, String>) -> Self {
        Self { lexicon }
    }

    /// Lexicon syntax: comma-separated `source=target` pairs.
    pub fn from_spec(spec: &str) -> Self {
        let lexicon = spec
            .split(',')
            .filter_map(|pair| {
                let (k, v) = pair.split_once('=')?;
                Some((k.trim().to_string(), v.trim().to_string()))
            })
            .collect();
        Self::new(lexicon)
    }
}

impl Translator for DictionaryTranslator {
    fn translate(&self, req: &TranslateRequest) -> Result<String, ServiceError> {
        let mut out = String::with_capacity(req.text.len());
        let mut word = String::new();
        let mut flush = |word: &mut String, out: &mut String| {
            if !word.is_empty() {
                match self.lexicon.get(word.as_str()) {
                    Some(mapped) => out.push_str(mapped),
                    None => out.push_str(word),
                }
                word.clear();
            }
        };
        for c in req.text.chars() {
            if c.is_alphanumeric() {
                word.push(c);
            } else {
                flush(&mut word, &mut out);
                out.push(c);
            }
        }
        flush(&mut word, &mut out);
        Ok(out)
    }
}

/// Reverses the non-placeholder characters; placeholder scalars are atomic
/// and keep their positions.
pub struct ReverserTranslator;

impl Translator for ReverserTranslator {
    fn translate(&self, req: &TranslateRequest) -> Result<String, ServiceError> {
        let mut letters: Vec<char> = req
            .text
            .chars()
            .filter(|c| PlaceholderMap::index_of(*c).is_none())
            .collect();
        letters.reverse();
        let mut letters = letters.into_iter();
        Ok(req
            .text
            .chars()
            .map(|c| {
                if PlaceholderMap::index_of(c).is_some() {
                    c
                } else {
                    letters.next().expect("one reversed char per source char")
                }
            })
            .collect())
    }
}

pub(crate) fn register_builtins(reg: &mut ServiceRegistry) -> Result<(), RegistryError> {
    reg.register(
        ServiceDescriptor::new("identity", ServiceKind::Test),
        |_cfg| Ok(Box::new(IdentityTranslator)),
    )?;
    reg.register(
        ServiceDescriptor::new("dictionary", ServiceKind::Test).with_required(&["lexicon"]),
        |cfg: &ServiceConfig| {
            let spec = cfg.get("lexicon").expect("checked by the registry");
            Ok(Box::new(DictionaryTranslator::from_spec(spec)))
        },
    )?;
    reg.register(
        ServiceDescriptor::new("reverser", ServiceKind::Test),
        |_cfg| Ok(Box::new(ReverserTranslator)),
    )?;
    Ok(())
}
