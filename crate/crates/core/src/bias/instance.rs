use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use super::names::NameInsertion;
use crate::metrics::GenderLabel;

/// Three-way gender used for pronouns, stereotypes and positional cues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinaryGender {
    M,
    F,
}

impl BinaryGender {
    pub fn label(self) -> GenderLabel {
        match self {
            BinaryGender::M => GenderLabel::Masculine,
            BinaryGender::F => GenderLabel::Feminine,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            BinaryGender::M => BinaryGender::F,
            BinaryGender::F => BinaryGender::M,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            BinaryGender::M => "M",
            BinaryGender::F => "F",
        }
    }
}

/// A role-anchored gender cue: the focus noun is the subject or the object
/// and the cue points to feminine or masculine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoleCue {
    SubjF,
    SubjM,
    ObjF,
    ObjM,
    None,
}

impl RoleCue {
    /// Column label used in effect tables (`S F`, `O M`, ...).
    pub fn level(self) -> &'static str {
        match self {
            RoleCue::SubjF => "S F",
            RoleCue::SubjM => "S M",
            RoleCue::ObjF => "O F",
            RoleCue::ObjM => "O M",
            RoleCue::None => "N",
        }
    }

    fn role(self) -> Option<char> {
        match self {
            RoleCue::SubjF | RoleCue::SubjM => Some('S'),
            RoleCue::ObjF | RoleCue::ObjM => Some('O'),
            RoleCue::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueAnnotations {
    pub recency: Gender,
    pub ic_role: RoleCue,
    pub stereotype_role: RoleCue,
    pub subject: Gender,
    #[serde(default)]
    pub names_present: bool,
}

/// Byte span `[start, end)` of the focus noun (its head is the last token).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusNoun {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// One annotated source sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub instance_id: String,
    pub source_text: String,
    pub focus_noun: FocusNoun,
    pub pronoun_gender: Gender,
    pub stereotype_gender: Gender,
    pub cues: CueAnnotations,
    pub ambiguous: bool,
    #[serde(default)]
    pub contrast_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_gender: Option<BinaryGender>,
    #[serde(default)]
    pub default_masculine: bool,
    /// Restricts the instance to one target language (name-augmented items).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name_insertion: Option<NameInsertion>,
    /// Fields this version does not know about, kept for round-tripping.
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Instance {
    /// Every invariant violation, as human-readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.instance_id.is_empty() {
            out.push("empty instance_id".to_string());
        }
        if self.ambiguous != (self.pronoun_gender == Gender::N) {
            out.push(format!(
                "ambiguous={} but pronoun_gender={:?}",
                self.ambiguous, self.pronoun_gender
            ));
        }
        if self.ambiguous == self.gold_gender.is_some() {
            out.push(if self.ambiguous {
                "ambiguous instance must not carry gold_gender".to_string()
            } else {
                "unambiguous instance requires gold_gender".to_string()
            });
        }
        if let (Some(gold), false) = (self.gold_gender, self.ambiguous) {
            let pronoun = match gold {
                BinaryGender::M => Gender::M,
                BinaryGender::F => Gender::F,
            };
            if pronoun != self.pronoun_gender {
                out.push(format!(
                    "gold_gender {gold:?} disagrees with pronoun_gender {:?}",
                    self.pronoun_gender
                ));
            }
        }
        let FocusNoun { text, start, end } = &self.focus_noun;
        match self.source_text.get(*start..*end) {
            Some(s) if s == text => {}
            Some(s) => out.push(format!(
                "focus_noun span {start}..{end} reads `{s}`, expected `{text}`"
            )),
            None => out.push(format!(
                "focus_noun span {start}..{end} is not within source_text"
            )),
        }
        if self.name_insertion.is_some() != self.cues.names_present {
            out.push("names_present must match name_insertion".to_string());
        }
        if let Some(ins) = &self.name_insertion {
            let expected = format!(" {}", ins.name);
            if self.source_text.get(ins.offset..ins.offset + expected.len()) != Some(expected.as_str()) {
                out.push(format!("inserted name `{}` not found at byte {}", ins.name, ins.offset));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn applies_to(&self, language: &str) -> bool {
        self.target_language
            .as_deref()
            .is_none_or(|l| l.eq_ignore_ascii_case(language))
    }

    /// Source role of the focus noun, read off the stereotype annotation.
    fn focus_role(&self) -> Option<char> {
        self.cues.stereotype_role.role()
    }

    /// Level of `cue` for this instance in `language`. `None` when the cue
    /// does not apply (Default M outside Russian).
    pub fn cue_level(&self, cue: Cue, language: &str) -> Option<String> {
        let level = match cue {
            Cue::Names => {
                if self.cues.names_present {
                    "name"
                } else {
                    "no name"
                }
            }
            Cue::Recency => gender_level(self.cues.recency),
            Cue::ImplicitCausality => self.cues.ic_role.level(),
            Cue::Stereotype => self.cues.stereotype_role.level(),
            Cue::Subject => gender_level(self.cues.subject),
            Cue::Pronoun => match (self.focus_role(), self.pronoun_gender) {
                (None, _) | (_, Gender::N) => "N",
                (Some('S'), Gender::F) => "S F",
                (Some('S'), _) => "S M",
                (_, Gender::F) => "O F",
                _ => "O M",
            },
            Cue::DefaultM => {
                if !language.eq_ignore_ascii_case("ru") {
                    return None;
                }
                match (self.default_masculine, self.focus_role()) {
                    (false, _) => "no default",
                    (true, Some('S')) => "S",
                    (true, Some(_)) => "O",
                    (true, None) => "default",
                }
            }
            Cue::Ambiguity => {
                if self.ambiguous {
                    "ambiguous"
                } else {
                    "unambiguous"
                }
            }
        };
        Some(level.to_string())
    }
}

fn gender_level(g: Gender) -> &'static str {
    match g {
        Gender::F => "F",
        Gender::M => "M",
        Gender::N => "N",
    }
}

/// Bias-cue columns of the effect analysis, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cue {
    Names,
    Recency,
    ImplicitCausality,
    Stereotype,
    Subject,
    Pronoun,
    DefaultM,
    Ambiguity,
}

impl Cue {
    pub const ALL: [Cue; 8] = [
        Cue::Names,
        Cue::Recency,
        Cue::ImplicitCausality,
        Cue::Stereotype,
        Cue::Subject,
        Cue::Pronoun,
        Cue::DefaultM,
        Cue::Ambiguity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Cue::Names => "Names",
            Cue::Recency => "Recency",
            Cue::ImplicitCausality => "Implicit Causality",
            Cue::Stereotype => "Stereotype",
            Cue::Subject => "Subject",
            Cue::Pronoun => "Pronoun",
            Cue::DefaultM => "Default M",
            Cue::Ambiguity => "Ambiguity",
        }
    }

    pub fn from_name(name: &str) -> Option<Cue> {
        let key: String = name.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        Cue::ALL.into_iter().find(|c| {
            c.name().chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase() == key
        }).or(match key.as_str() {
            "ic" => Some(Cue::ImplicitCausality),
            _ => None,
        })
    }

    pub fn default_reference(self) -> &'static str {
        match self {
            Cue::Names => "no name",
            Cue::DefaultM => "no default",
            Cue::Ambiguity => "unambiguous",
            _ => "N",
        }
    }

    /// Display order of the non-reference levels.
    pub fn level_order(self) -> &'static [&'static str] {
        match self {
            Cue::Names => &["name"],
            Cue::Recency | Cue::Subject => &["F", "M"],
            Cue::ImplicitCausality | Cue::Stereotype | Cue::Pronoun => &["S F", "S M", "O F", "O M"],
            Cue::DefaultM => &["S", "O", "default"],
            Cue::Ambiguity => &["ambiguous"],
        }
    }
}

impl fmt::Display for Cue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
