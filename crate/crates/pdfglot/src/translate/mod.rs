//! Translation middleware: the service registry, the one-method plugin
//! contract, prompt templating, the OpenAI-protocol client, retry/rate
//! limiting, and the persistent translation cache.
//!
//! Services receive only textual inputs. Adding a backend means
//! implementing [`Translator::translate`] and registering a factory; the
//! bundled test services and the generic OpenAI-protocol client cover
//! everything the pipeline needs out of the box.

pub mod cache;
pub mod languages;
pub mod openai;
pub mod prompt;
pub mod services;
pub mod stub;

use std::collections::BTreeMap;

use crate::error::{RegistryError, ServiceError};

pub use cache::{cache_key, CacheKey, TranslationCache};
pub use languages::{script_for, LanguageRegistry, Script};
pub use openai::{openai_chat_call, OpenAiConfig, RateLimiter, RetryPolicy};
pub use prompt::{render_prompt, ChatMessage, PromptTemplate};

/// One unit of translation work, as seen by a service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslateRequest {
    /// Masked paragraph text; placeholders must pass through unchanged.
    pub text: String,
    pub lang_in: String,
    pub lang_out: String,
    /// Service-specific options (lexicon path, model override, ...).
    pub options: BTreeMap<String, String>,
}

impl TranslateRequest {
    pub fn new(text: impl Into<String>, lang_in: impl Into<String>, lang_out: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            lang_in: lang_in.into(),
            lang_out: lang_out.into(),
            options: BTreeMap::new(),
        }
    }
}

/// What kind of backend a service is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceKind {
    /// Deterministic bundled backend used by tests and dry runs.
    Test,
    /// A conventional translation API.
    TranslationApi,
    /// A chat-style LLM endpoint.
    LlmChat,
}

/// Registry metadata for a service.
#[derive(Debug, Clone)]
pub struct ServiceDescriptor {
    pub name: String,
    pub kind: ServiceKind,
    /// Config keys that must be present to construct the service.
    pub required_config: Vec<String>,
    /// Service cannot tolerate concurrent `translate` calls; the pipeline
    /// serializes them.
    pub single_flight: bool,
}

impl ServiceDescriptor {
    pub fn new(name: &str, kind: ServiceKind) -> Self {
        Self {
            name: name.to_string(),
            kind,
            required_config: Vec::new(),
            single_flight: false,
        }
    }

    pub fn with_required(mut self, keys: &[&str]) -> Self {
        self.required_config = keys.iter().map(|s| s.to_string()).collect();
        self
    }
}

/// The single method every translation plugin implements.
pub trait Translator: Send + Sync {
    fn translate(&self, req: &TranslateRequest) -> Result<String, ServiceError>;
}

/// Validated configuration passed to service factories.
#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    values: BTreeMap<String, String>,
}

impl ServiceConfig {
    pub fn new(values: BTreeMap<String, String>) -> Self {
        Self { values }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

type ServiceFactory =
    Box<dyn Fn(&ServiceConfig) -> Result<Box<dyn Translator>, RegistryError> + Send + Sync>;

/// Name -> (descriptor, factory) table of constructible services.
pub struct ServiceRegistry {
    entries: BTreeMap<String, (ServiceDescriptor, ServiceFactory)>,
}

impl ServiceRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Registry preloaded with the bundled services: `identity`,
    /// `dictionary`, `reverser`, and the generic `openai-like` client.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        services::register_builtins(&mut reg).expect("builtin names are unique");
        openai::register_openai_like(&mut reg).expect("builtin names are unique");
        reg
    }

    /// Registers a service; the name must be unused.
    pub fn register(
        &mut self,
        desc: ServiceDescriptor,
        factory: impl Fn(&ServiceConfig) -> Result<Box<dyn Translator>, RegistryError>
            + Send
            + Sync
            + 'static,
    ) -> Result<(), RegistryError> {
        if self.entries.contains_key(&desc.name) {
            return Err(RegistryError::DuplicateService(desc.name.clone()));
        }
        self.entries
            .insert(desc.name.clone(), (desc, Box::new(factory)));
        Ok(())
    }

    /// Constructs a service by name with validated config.
    pub fn construct(
        &self,
        name: &str,
        config: &ServiceConfig,
    ) -> Result<Box<dyn Translator>, RegistryError> {
        let (desc, factory) = self
            .entries
            .get(name)
            .ok_or_else(|| RegistryError::UnknownService(name.to_string()))?;
        for key in &desc.required_config {
            if config.get(key).is_none() {
                return Err(RegistryError::MissingConfig {
                    service: name.to_string(),
                    key: key.clone(),
                });
            }
        }
        factory(config)
    }

    pub fn descriptor(&self, name: &str) -> Option<&ServiceDescriptor> {
        self.entries.get(name).map(|(d, _)| d)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

impl Default for ServiceRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::RegistryError;

    #[test]
    fn register_and_construct_identity() {
        let reg = ServiceRegistry::with_builtins();
        let t = reg.construct("identity", &ServiceConfig::default()).unwrap();
        let req = TranslateRequest::new("hola \u{E000}", "en", "es");
        assert_eq!(t.translate(&req).unwrap(), "hola \u{E000}");
    }

    #[test]
    fn duplicate_name_rejected() {
        let mut reg = ServiceRegistry::with_builtins();
        let err = reg
            .register(
                ServiceDescriptor::new("identity", ServiceKind::Test),
                |_| Ok(Box::new(services::IdentityTranslator)),
            )
            .unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateService(n) if n == "identity"));
    }

    #[test]
    fn missing_config_reported_per_key() {
        let reg = ServiceRegistry::with_builtins();
        let err = reg
            .construct("openai-like", &ServiceConfig::default())
            .unwrap_err();
        match err {
            RegistryError::MissingConfig { service, key } => {
                assert_eq!(service, "openai-like");
                assert_eq!(key, "base-url");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_service() {
        let reg = ServiceRegistry::with_builtins();
        assert!(matches!(
            reg.construct("nosuch", &ServiceConfig::default()),
            Err(RegistryError::UnknownService(_))
        ));
    }

    #[test]
    fn names_sorted_and_complete() {
        let reg = ServiceRegistry::with_builtins();
        let names = reg.names();
        assert!(names.contains(&"identity"));
        assert!(names.contains(&"dictionary"));
        assert!(names.contains(&"reverser"));
        assert!(names.contains(&"openai-like"));
    }
}
