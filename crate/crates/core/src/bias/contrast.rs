use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

use super::instance::Instance;
use super::names::source_without_name;
use crate::{Error, Result};

/// Tokens that may differ between members of one contrast group.
pub const PRONOUN_LEXICON: [&str; 10] = [
    "he", "she", "they", "him", "her", "them", "his", "their", "hers", "theirs",
];

const PRONOUN_SLOT: &str = "\u{0}PRON";

/// Minimal-pair group: sentences identical up to their pronouns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContrastGroup {
    pub contrast_key: String,
    pub member_instance_ids: Vec<String>,
}

/// Splits on whitespace; runs of alphanumerics (with inner apostrophes or
/// hyphens) form words, every other character is its own token.
pub fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut word_start: Option<usize> = None;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        let joiner = (c == '\'' || c == '-' || c == '’')
            && word_start.is_some()
            && chars.get(k + 1).is_some_and(|(_, n)| n.is_alphanumeric());
        if c.is_alphanumeric() || joiner {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(s) = word_start.take() {
            tokens.push(&text[s..i]);
        }
        if !c.is_whitespace() {
            tokens.push(&text[i..i + c.len_utf8()]);
        }
    }
    if let Some(s) = word_start {
        tokens.push(&text[s..]);
    }
    tokens
}

fn is_pronoun(token: &str) -> bool {
    let lower = token.to_lowercase();
    PRONOUN_LEXICON.contains(&lower.as_str())
}

/// Deterministic group key of an instance: a digest of its token sequence
/// with every pronoun replaced by a slot. Name-augmented and
/// language-restricted instances get their own key space.
pub fn template_key(instance: &Instance) -> String {
    let base = source_without_name(instance);
    let mut hasher = Sha256::new();
    for token in tokenize(&base) {
        let t = if is_pronoun(token) { PRONOUN_SLOT } else { token };
        hasher.update(t.as_bytes());
        hasher.update([0x1f]);
    }
    let digest = hasher.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    let mut key = format!("cs-{hex}");
    if instance.name_insertion.is_some() {
        key.push_str("+name");
    }
    if let Some(lang) = &instance.target_language {
        key.push('.');
        key.push_str(&lang.to_lowercase());
    }
    key
}

/// Groups instances into maximal minimal-pair sets. Output is sorted by key
/// and member id, so it does not depend on input order.
pub fn build_contrast_sets(instances: &[Instance]) -> Result<Vec<ContrastGroup>> {
    let mut groups: BTreeMap<String, Vec<&Instance>> = BTreeMap::new();
    for inst in instances {
        groups.entry(template_key(inst)).or_default().push(inst);
    }
    groups
        .into_iter()
        .map(|(key, mut members)| {
            members.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
            members.dedup_by(|a, b| a.instance_id == b.instance_id && a == b);
            for pair in members.windows(2) {
                if pair[0].instance_id == pair[1].instance_id {
                    return Err(Error::validation(format!(
                        "instance id `{}` appears twice with different content",
                        pair[0].instance_id
                    )));
                }
            }
            let mut seen = BTreeMap::new();
            for m in &members {
                if let Some(prev) = seen.insert(m.pronoun_gender, &m.instance_id) {
                    return Err(Error::validation(format!(
                        "duplicate {:?}-pronoun instances `{prev}` and `{}` share template {key}",
                        m.pronoun_gender, m.instance_id
                    )));
                }
            }
            Ok(ContrastGroup {
                contrast_key: key,
                member_instance_ids: members.iter().map(|m| m.instance_id.clone()).collect(),
            })
        })
        .collect()
}
