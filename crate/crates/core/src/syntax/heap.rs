use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{alpha_eq_with, Expr};
use super::name::{Name, NameSet};
use super::parse::{parse, parse_binding, parse_desugared, ParseError};
use super::print::print;

/// Finite map from names to expressions. Order is kept for printing only.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Heap {
    bindings: Vec<(Name, Expr)>,
}

#[derive(Debug, Error)]
pub enum HeapError {
    #[error("`{0}` is bound twice")]
    Duplicate(Name),
    #[error("line {line}: {source}")]
    Line { line: usize, source: ParseError },
    #[error("binding `{name}`: {source}")]
    Binding { name: String, source: ParseError },
    #[error("bad binding name `{0}`")]
    BadName(String),
    #[error("heap JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl std::fmt::Debug for Heap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&super::print::heap_print(self))
    }
}

impl Heap {
    pub fn new() -> Heap {
        Heap::default()
    }

    pub fn from_bindings(bindings: Vec<(Name, Expr)>) -> Result<Heap, HeapError> {
        let mut seen = NameSet::new();
        for (x, _) in &bindings {
            if !seen.insert(x.clone()) {
                return Err(HeapError::Duplicate(x.clone()));
            }
        }
        Ok(Heap { bindings })
    }

    /// Convenience for literals: `Heap::of(&[("x", "\\a. a")])`. Panics on
    /// parse errors.
    pub fn of(bindings: &[(&str, &str)]) -> Heap {
        let bs = bindings
            .iter()
            .map(|(x, e)| (Name::new(x), parse(e).unwrap_or_else(|err| panic!("{e}: {err}"))))
            .collect();
        Heap::from_bindings(bs).expect("duplicate heap binding in literal")
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Expr)> {
        self.bindings.iter().map(|(x, e)| (x, e))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.bindings.iter().map(|(x, _)| x)
    }

    pub fn domain(&self) -> NameSet {
        self.names().cloned().collect()
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.bindings.iter().any(|(y, _)| y == x)
    }

    pub fn get(&self, x: &Name) -> Option<&Expr> {
        self.bindings.iter().find(|(y, _)| y == x).map(|(_, e)| e)
    }

    /// Binds `x`, replacing an existing binding in place.
    pub fn insert(&mut self, x: Name, e: Expr) {
        match self.bindings.iter_mut().find(|(y, _)| *y == x) {
            Some(slot) => slot.1 = e,
            None => self.bindings.push((x, e)),
        }
    }

    pub fn remove(&mut self, x: &Name) -> Option<Expr> {
        let i = self.bindings.iter().position(|(y, _)| y == x)?;
        Some(self.bindings.remove(i).1)
    }

    /// Union of two heaps with disjoint domains (`Γ, Δ`).
    pub fn concat(&self, other: &Heap) -> Result<Heap, HeapError> {
        let mut bs = self.bindings.clone();
        bs.extend(other.bindings.iter().cloned());
        Heap::from_bindings(bs)
    }

    pub fn without(&self, names: &NameSet) -> Heap {
        Heap {
            bindings: self.bindings.iter().filter(|(x, _)| !names.contains(x)).cloned().collect(),
        }
    }

    pub fn free_vars(&self) -> NameSet {
        let mut out = NameSet::new();
        for (_, e) in &self.bindings {
            out.extend(e.free_vars());
        }
        for (x, _) in &self.bindings {
            out.remove(x);
        }
        out
    }

    /// Every name mentioned anywhere in the heap.
    pub fn all_names(&self) -> NameSet {
        let mut out = self.domain();
        for (_, e) in &self.bindings {
            out.extend(e.all_names());
        }
        out
    }

    /// Same bindings, ignoring order.
    pub fn same_bindings(&self, other: &Heap) -> bool {
        self.len() == other.len() && self.iter().all(|(x, e)| other.get(x) == Some(e))
    }

    pub fn into_bindings(self) -> Vec<(Name, Expr)> {
        self.bindings
    }

    /// Parses the line format: one `name = expr` per line, `#` comments.
    pub fn parse_lines(src: &str, desugar: bool) -> Result<(Heap, Vec<String>), HeapError> {
        let mut bs = Vec::new();
        let mut warnings = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let (x, e, w) = parse_binding(line, desugar)
                .map_err(|source| HeapError::Line { line: i + 1, source })?;
            warnings.extend(w);
            bs.push((x, e));
        }
        Ok((Heap::from_bindings(bs)?, warnings))
    }

    /// Parses `{"bindings": [["x", "<expr>"], ...]}`.
    pub fn parse_json(src: &str, desugar: bool) -> Result<(Heap, Vec<String>), HeapError> {
        let file: HeapFile = serde_json::from_str(src)?;
        let mut bs = Vec::new();
        let mut warnings = Vec::new();
        for (x, text) in file.bindings {
            let name = Name::parse(&x).map_err(|_| HeapError::BadName(x.clone()))?;
            let e = if desugar {
                let (e, w) = parse_desugared(&text)
                    .map_err(|source| HeapError::Binding { name: x.clone(), source })?;
                warnings.extend(w);
                e
            } else {
                parse(&text).map_err(|source| HeapError::Binding { name: x.clone(), source })?
            };
            bs.push((name, e));
        }
        Ok((Heap::from_bindings(bs)?, warnings))
    }

    /// Either format, chosen by a leading `{`.
    pub fn parse_any(src: &str, desugar: bool) -> Result<(Heap, Vec<String>), HeapError> {
        if src.trim_start().starts_with('{') {
            Heap::parse_json(src, desugar)
        } else {
            Heap::parse_lines(src, desugar)
        }
    }

    pub fn to_file(&self) -> HeapFile {
        HeapFile {
            bindings: self.iter().map(|(x, e)| (x.to_string(), print(e))).collect(),
            ordered: None,
        }
    }
}

/// Serialized heap (and, with `ordered`, stack) layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeapFile {
    pub bindings: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordered: Option<bool>,
}

/// An expression in weak head normal form, i.e. a lambda.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SynValue {
    binder: Name,
    body: Expr,
}

impl std::fmt::Debug for SynValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.to_expr())
    }
}

impl SynValue {
    pub fn new(binder: Name, body: Expr) -> SynValue {
        SynValue { binder, body }
    }

    pub fn from_expr(e: &Expr) -> Option<SynValue> {
        match e {
            Expr::Lam(x, b) => Some(SynValue::new(x.clone(), (**b).clone())),
            _ => None,
        }
    }

    pub fn binder(&self) -> &Name {
        &self.binder
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn to_expr(&self) -> Expr {
        Expr::Lam(self.binder.clone(), Box::new(self.body.clone()))
    }
}

/// Free-name correspondence built up while comparing two configurations.
#[derive(Clone, Default)]
struct Renaming {
    fwd: BTreeMap<Name, Name>,
    bwd: BTreeMap<Name, Name>,
}

/// True iff some bijection between the heap-bound names outside `protect`
/// makes the two configurations equal as unordered heaps, up to alpha.
pub fn heap_alpha_eq(c1: (&Heap, &SynValue), c2: (&Heap, &SynValue), protect: &NameSet) -> bool {
    let (h1, v1) = c1;
    let (h2, v2) = c2;
    if h1.len() != h2.len() {
        return false;
    }
    let movable1: NameSet = h1.domain().difference(protect).cloned().collect();
    let movable2: NameSet = h2.domain().difference(protect).cloned().collect();
    if movable1.len() != movable2.len() {
        return false;
    }
    for x in h1.domain().intersection(protect) {
        if !h2.contains(x) {
            return false;
        }
    }

    // Compares two expressions, extending `ren`; newly paired names are queued.
    let compare = |a: &Expr, b: &Expr, ren: &mut Renaming, queue: &mut VecDeque<(Name, Name)>| {
        alpha_eq_with(a, b, &mut |x, y| {
            match (movable1.contains(x), movable2.contains(y)) {
                (false, false) => x == y,
                (true, true) => match (ren.fwd.get(x), ren.bwd.get(y)) {
                    (Some(y2), _) => y2 == y,
                    (None, Some(_)) => false,
                    (None, None) => {
                        ren.fwd.insert(x.clone(), y.clone());
                        ren.bwd.insert(y.clone(), x.clone());
                        queue.push_back((x.clone(), y.clone()));
                        true
                    }
                },
                _ => false,
            }
        })
    };

    fn solve(
        mut ren: Renaming,
        mut queue: VecDeque<(Name, Name)>,
        h1: &Heap,
        h2: &Heap,
        movable1: &NameSet,
        movable2: &NameSet,
        compare: &dyn Fn(&Expr, &Expr, &mut Renaming, &mut VecDeque<(Name, Name)>) -> bool,
    ) -> bool {
        while let Some((x, y)) = queue.pop_front() {
            let (Some(a), Some(b)) = (h1.get(&x), h2.get(&y)) else {
                return false;
            };
            if !compare(a, b, &mut ren, &mut queue) {
                return false;
            }
        }
        let Some(x) = movable1.iter().find(|x| !ren.fwd.contains_key(*x)) else {
            return true;
        };
        for y in movable2.iter().filter(|y| !ren.bwd.contains_key(*y)) {
            let mut r = ren.clone();
            r.fwd.insert(x.clone(), y.clone());
            r.bwd.insert(y.clone(), x.clone());
            let q = VecDeque::from([(x.clone(), y.clone())]);
            if solve(r, q, h1, h2, movable1, movable2, compare) {
                return true;
            }
        }
        false
    }

    let mut ren = Renaming::default();
    let mut queue = VecDeque::new();
    if !compare(&v1.to_expr(), &v2.to_expr(), &mut ren, &mut queue) {
        return false;
    }
    for x in h1.domain().intersection(protect) {
        if !compare(h1.get(x).unwrap(), h2.get(x).unwrap(), &mut ren, &mut queue) {
            return false;
        }
    }
    solve(ren, queue, h1, h2, &movable1, &movable2, &compare)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn val(s: &str) -> SynValue {
        SynValue::from_expr(&parse(s).unwrap()).unwrap()
    }

    fn set(names: &[&str]) -> NameSet {
        names.iter().map(|s| Name::new(s)).collect()
    }

    #[test]
    fn heap_alpha_examples() {
        let id = val(r"\x. x");
        let h1 = Heap::of(&[("i", r"\x. x")]);
        let h2 = Heap::of(&[("j", r"\x. x")]);
        assert!(heap_alpha_eq((&h1, &id), (&h2, &id), &NameSet::new()));
        assert!(heap_alpha_eq((&Heap::new(), &id), (&Heap::new(), &val(r"\y. y")), &NameSet::new()));
        let a = Heap::of(&[("x", r"\a. a")]);
        let b = Heap::of(&[("x", r"\a. a"), ("w", r"\a. a")]);
        assert!(!heap_alpha_eq((&a, &val(r"\a. a")), (&b, &val(r"\a. a")), &set(&["x"])));
    }

    #[test]
    fn protected_names_are_fixed() {
        let id = val(r"\x. x");
        let h1 = Heap::of(&[("i", r"\x. x")]);
        let h2 = Heap::of(&[("j", r"\x. x")]);
        assert!(!heap_alpha_eq((&h1, &id), (&h2, &id), &set(&["i"])));
    }

    #[test]
    fn renaming_must_be_consistent() {
        let h1 = Heap::of(&[("p", r"\a. q"), ("q", r"\b. b")]);
        let h2 = Heap::of(&[("s", r"\b. b"), ("r", r"\a. s")]);
        let v1 = val(r"\z. p");
        assert!(heap_alpha_eq((&h1, &v1), (&h2, &val(r"\z. r")), &NameSet::new()));
        assert!(!heap_alpha_eq((&h1, &v1), (&h2, &val(r"\z. s")), &NameSet::new()));
    }

    #[test]
    fn unreachable_bindings_are_matched_by_search() {
        let h1 = Heap::of(&[("p", r"\a. a"), ("q", r"\a. \b. a")]);
        let h2 = Heap::of(&[("r", r"\a. \b. a"), ("s", r"\c. c")]);
        let v = val(r"\z. z");
        assert!(heap_alpha_eq((&h1, &v), (&h2, &v), &NameSet::new()));
        let h3 = Heap::of(&[("r", r"\a. \b. b"), ("s", r"\c. c")]);
        assert!(!heap_alpha_eq((&h1, &v), (&h3, &v), &NameSet::new()));
    }

    #[test]
    fn line_and_json_formats() {
        let (h, _) = Heap::parse_lines("# heap\nx = \\a. a\n\ny = x # alias\n", false).unwrap();
        assert_eq!(h, Heap::of(&[("x", r"\a. a"), ("y", "x")]));
        let (j, _) = Heap::parse_json(r#"{"bindings": [["x", "\\a. a"], ["y", "x"]]}"#, false).unwrap();
        assert_eq!(j, h);
        assert!(matches!(Heap::parse_lines("x = a\nx = b", false), Err(HeapError::Duplicate(_))));
        assert!(matches!(Heap::parse_lines("x = f (g y)", false), Err(HeapError::Line { line: 1, .. })));
        let json = serde_json::to_string(&h.to_file()).unwrap();
        assert_eq!(Heap::parse_any(&json, false).unwrap().0, h);
    }
}
