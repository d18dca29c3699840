//! Cartesian expansion of items against setting kinds.

use crate::types::{L2TSetting, LanguageCode, MCQItem, SettingKind};

const PERSONA_VARIANTS: [u8; 3] = [0, 1, 2];

/// Expand items × kinds × thought languages into the valid settings.
///
/// Combinations that would violate a slot-shape rule, such as a transfer
/// whose thought equals the input, are silently skipped. Kinds without a
/// free thought slot (baseline, consistent) produce one setting per item
/// regardless of the thought list; persona kinds expand over all three
/// instruction variants. Ordering is deterministic: item order, then kind
/// order, then thought-language order, then variant order.
pub fn enumerate_matrix(
    items: &[MCQItem],
    kinds: &[SettingKind],
    thought_langs: &[LanguageCode],
) -> Vec<(MCQItem, L2TSetting)> {
    let mut pairs = Vec::new();
    for item in items {
        let input = item.language();
        for &kind in kinds {
            match kind {
                SettingKind::Baseline => pairs.push((item.clone(), L2TSetting::baseline(input))),
                SettingKind::Consistent => {
                    pairs.push((item.clone(), L2TSetting::consistent(input)))
                }
                SettingKind::Transfer => {
                    for &thought in thought_langs {
                        if let Ok(setting) = L2TSetting::transfer(input, thought) {
                            pairs.push((item.clone(), setting));
                        }
                    }
                }
                SettingKind::Align => {
                    for &thought in thought_langs {
                        if let Ok(setting) = L2TSetting::align(input, thought) {
                            pairs.push((item.clone(), setting));
                        }
                    }
                }
                SettingKind::PersonaConsistent => {
                    for variant in PERSONA_VARIANTS {
                        let setting = L2TSetting::persona_consistent(input, variant)
                            .expect("variant in range");
                        pairs.push((item.clone(), setting));
                    }
                }
                SettingKind::PersonaTransfer => {
                    for &thought in thought_langs {
                        for variant in PERSONA_VARIANTS {
                            if let Ok(setting) =
                                L2TSetting::persona_transfer(input, thought, variant)
                            {
                                pairs.push((item.clone(), setting));
                            }
                        }
                    }
                }
            }
        }
    }
    pairs
}
