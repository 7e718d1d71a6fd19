//! Small shared helpers: digests and the rendering rounding rule.

use sha2::{Digest, Sha256};
use std::io;
use std::path::Path;

/// SHA-256 of a list of labeled parts, length-prefixed so `("ab","c")` and
/// `("a","bc")` hash differently.
pub fn sha256_parts(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_be_bytes());
        hasher.update(part.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// SHA-256 of a file's raw bytes.
pub fn file_digest(path: &Path) -> io::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex::encode(hasher.finalize()))
}

/// Round half away from zero to an integer. The rendering rule for all
/// integer-percent output; statistics stay full precision until render time.
pub fn round_half_away(v: f64) -> i64 {
    if v >= 0.0 {
        (v + 0.5).floor() as i64
    } else {
        -((-v + 0.5).floor() as i64)
    }
}
