//! Content-addressed response cache.
//!
//! One JSON record per key under the cache directory, holding both the
//! request fields and the response. Writes go through a temp file and a
//! rename, so concurrent writers of the same key are harmless: content is
//! deterministic per key.

use std::fs;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::chat::{ChatProvider, ChatRequest, ChatResponse, ProviderError};

/// Everything that distinguishes one provider call from another.
///
/// The run index is part of the key so repeated runs against sampling
/// models stay distinct calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub provider_id: String,
    pub model_id: String,
    pub system_prompt: String,
    pub user_prompt: String,
    pub max_new_tokens: u32,
    pub temperature: Option<f64>,
    pub top_p: Option<f64>,
    pub seed: Option<u64>,
    pub run_index: u32,
}

impl CacheKey {
    pub fn new(provider: &dyn ChatProvider, request: &ChatRequest, run_index: u32) -> Self {
        CacheKey {
            provider_id: provider.provider_id().to_string(),
            model_id: provider.model_id().to_string(),
            system_prompt: request.system_prompt.clone(),
            user_prompt: request.user_prompt.clone(),
            max_new_tokens: request.max_new_tokens,
            temperature: request.temperature,
            top_p: request.top_p,
            seed: request.seed,
            run_index,
        }
    }

    /// Hex digest over the canonical JSON encoding of every field.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("cache key serializes");
        let hash = Sha256::digest(&bytes);
        format!("{hash:x}")
    }
}

/// One cached call: the request fields and the byte-identical response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub response: ChatResponse,
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ResponseCache { dir })
    }

    fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    pub fn get(&self, key: &CacheKey) -> Option<CacheRecord> {
        let path = self.path_for(&key.digest());
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<CacheRecord>(&bytes) {
            Ok(record) => Some(record),
            Err(err) => {
                log::warn!(
                    "discarding unreadable cache record {}: {err}",
                    path.display()
                );
                None
            }
        }
    }

    pub fn put(&self, record: &CacheRecord) -> io::Result<()> {
        let path = self.path_for(&record.key.digest());
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(record)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

/// A provider wrapped with the cache: identical requests hit the backend
/// exactly once and replay byte-identically afterwards.
pub struct CachedChat<'a> {
    provider: &'a dyn ChatProvider,
    cache: &'a ResponseCache,
}

impl<'a> CachedChat<'a> {
    pub fn new(provider: &'a dyn ChatProvider, cache: &'a ResponseCache) -> Self {
        CachedChat { provider, cache }
    }

    /// Returns the response and whether it was served from the cache.
    pub fn chat(
        &self,
        request: &ChatRequest,
        run_index: u32,
    ) -> Result<(ChatResponse, bool), ProviderError> {
        let key = CacheKey::new(self.provider, request, run_index);
        if let Some(record) = self.cache.get(&key) {
            return Ok((record.response, true));
        }
        let response = self.provider.chat(request)?;
        let record = CacheRecord {
            key,
            response: response.clone(),
        };
        if let Err(err) = self.cache.put(&record) {
            log::warn!("failed to persist cache record: {err}");
        }
        Ok((response, false))
    }
}
