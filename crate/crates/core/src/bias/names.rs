use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use std::collections::BTreeMap;

use super::instance::{BinaryGender, Instance};
use crate::{Error, Result};

/// Where a person name was inserted: `" " + name` starts at byte `offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameInsertion {
    pub name: String,
    pub offset: usize,
}

/// Gendered first names per target language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameTable(BTreeMap<String, BTreeMap<BinaryGender, String>>);

impl Default for NameTable {
    /// Names familiar across the four evaluated target languages.
    fn default() -> Self {
        let rows = [
            ("es", "Carla", "Gabriel"),
            ("fr", "Anne", "Victor"),
            ("uk", "Anna", "Ivan"),
            ("ru", "Anna", "Ivan"),
        ];
        NameTable(
            rows.into_iter()
                .map(|(lang, f, m)| {
                    (
                        lang.to_string(),
                        [(BinaryGender::F, f.to_string()), (BinaryGender::M, m.to_string())].into(),
                    )
                })
                .collect(),
        )
    }
}

impl NameTable {
    pub fn get(&self, language: &str, gender: BinaryGender) -> Option<&str> {
        self.0
            .get(&language.to_lowercase())
            .and_then(|m| m.get(&gender))
            .map(String::as_str)
    }

    pub fn insert(&mut self, language: &str, gender: BinaryGender, name: impl Into<String>) {
        self.0
            .entry(language.to_lowercase())
            .or_default()
            .insert(gender, name.into());
    }
}

/// Inserts the pronoun-matching name for `language` right after the focus
/// noun head, producing a new language-specific instance.
pub fn augment_with_names(instance: &Instance, language: &str, names: &NameTable) -> Result<Instance> {
    if instance.ambiguous {
        return Err(Error::validation(format!(
            "`{}` is ambiguous; no gendered name applies",
            instance.instance_id
        )));
    }
    if instance.name_insertion.is_some() {
        return Err(Error::validation(format!(
            "`{}` already carries a name",
            instance.instance_id
        )));
    }
    let gender = instance.gold_gender.ok_or_else(|| {
        Error::validation(format!("`{}` has no gold gender", instance.instance_id))
    })?;
    let name = names.get(language, gender).ok_or_else(|| {
        Error::validation(format!("no {gender:?} name for language `{language}`"))
    })?;
    let offset = instance.focus_noun.end;
    if instance.source_text.get(offset..).is_none() {
        return Err(Error::validation(format!(
            "`{}`: focus noun span ends outside the text",
            instance.instance_id
        )));
    }
    let mut out = instance.clone();
    out.source_text = format!(
        "{} {}{}",
        &instance.source_text[..offset],
        name,
        &instance.source_text[offset..]
    );
    out.instance_id = format!("{}+name.{}", instance.instance_id, language.to_lowercase());
    out.target_language = Some(language.to_lowercase());
    out.cues.names_present = true;
    // Default M is a Russian-only cue.
    out.default_masculine &= language.eq_ignore_ascii_case("ru");
    out.contrast_key = String::new();
    out.name_insertion = Some(NameInsertion {
        name: name.to_string(),
        offset,
    });
    Ok(out)
}

pub(crate) fn source_without_name(instance: &Instance) -> Cow<'_, str> {
    match &instance.name_insertion {
        Some(ins) => {
            let end = ins.offset + 1 + ins.name.len();
            match (instance.source_text.get(..ins.offset), instance.source_text.get(end..)) {
                (Some(head), Some(tail)) => Cow::Owned(format!("{head}{tail}")),
                _ => Cow::Borrowed(&instance.source_text),
            }
        }
        None => Cow::Borrowed(&instance.source_text),
    }
}

/// Undoes [`augment_with_names`] on the text and cue flags. The id and
/// language restriction are left as they are.
pub fn remove_name(instance: &Instance) -> Instance {
    let mut out = instance.clone();
    if instance.name_insertion.is_some() {
        out.source_text = source_without_name(instance).into_owned();
        out.name_insertion = None;
        out.cues.names_present = false;
    }
    out
}
