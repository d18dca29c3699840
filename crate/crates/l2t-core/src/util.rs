//! Small internal helpers.

use sha2::{Digest, Sha256};

/// Sum after sorting by total order, so the result is bit-identical under
/// any permutation of the inputs.
pub(crate) fn ordered_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Keep a string filesystem-safe, mapping anything outside
/// `[A-Za-z0-9._-]` to `-`.
pub(crate) fn sanitize_component(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// First twelve hex characters of the SHA-256 digest.
pub(crate) fn short_digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    format!("{hash:x}")[..12].to_string()
}
