use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A variable name: identifier text plus an optional freshness suffix.
///
/// The concrete spelling of a suffixed name is `text_N` (for example `x_1`).
/// [`Name::parse`] splits such a trailing `_N` back off, so printing and
/// parsing a name is a structural round trip.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    text: Arc<str>,
    suffix: Option<u32>,
}

pub type NameSet = BTreeSet<Name>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty identifier")]
    Empty,
    #[error("invalid identifier `{0}`")]
    Invalid(String),
    #[error("`{0}` is a keyword")]
    Keyword(String),
}

const KEYWORDS: [&str; 2] = ["let", "in"];

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Name {
    /// Parses an identifier, splitting a trailing `_N` (N ≥ 1, no leading
    /// zero) into the suffix.
    pub fn parse(s: &str) -> Result<Name, NameError> {
        let mut chars = s.chars();
        match chars.next() {
            None => return Err(NameError::Empty),
            Some(c) if !is_ident_start(c) => return Err(NameError::Invalid(s.to_string())),
            _ => {}
        }
        if !chars.all(is_ident_continue) {
            return Err(NameError::Invalid(s.to_string()));
        }
        if KEYWORDS.contains(&s) {
            return Err(NameError::Keyword(s.to_string()));
        }
        if let Some(pos) = s.rfind('_') {
            let (head, digits) = (&s[..pos], &s[pos + 1..]);
            let canonical = !digits.is_empty()
                && digits.bytes().all(|b| b.is_ascii_digit())
                && !digits.starts_with('0');
            if canonical && !head.is_empty() && !KEYWORDS.contains(&head) {
                if let Ok(n) = digits.parse::<u32>() {
                    return Ok(Name { text: head.into(), suffix: Some(n) });
                }
            }
        }
        Ok(Name { text: s.into(), suffix: None })
    }

    /// Builds a name from already-validated parts. Panics on invalid text;
    /// meant for literals in code and tests.
    pub fn new(s: &str) -> Name {
        Name::parse(s).unwrap_or_else(|e| panic!("bad name literal {s:?}: {e}"))
    }

    pub fn with_suffix(&self, suffix: Option<u32>) -> Name {
        Name { text: self.text.clone(), suffix }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn suffix(&self) -> Option<u32> {
        self.suffix
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.suffix {
            None => f.write_str(&self.text),
            Some(n) => write!(f, "{}_{}", self.text, n),
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

/// Smallest-suffix fresh name: `base`'s text with no suffix if that is free,
/// otherwise the least `N ≥ 1` such that `text_N ∉ avoid`.
pub fn fresh(avoid: &NameSet, base: &Name) -> Name {
    let plain = base.with_suffix(None);
    if !avoid.contains(&plain) {
        return plain;
    }
    (1..)
        .map(|n| base.with_suffix(Some(n)))
        .find(|n| !avoid.contains(n))
        .expect("suffix space exhausted")
}

/// Fresh name that is also recorded in `avoid`.
pub fn fresh_in(avoid: &mut NameSet, base: &Name) -> Name {
    let n = fresh(avoid, base);
    avoid.insert(n.clone());
    n
}
