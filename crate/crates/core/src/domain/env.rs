use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use super::elem::{convert, lattice_height, leq, lub, DomElem};
use super::DomainError;
use crate::syntax::{Name, NameSet};

/// A semantic environment at a fixed rank. Names that are not stored map to
/// Bot, and Bot is never stored, so structural equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Env {
    rank: u8,
    bindings: BTreeMap<Name, DomElem>,
}

impl Env {
    /// The environment mapping everything to Bot.
    pub fn bot(rank: u8) -> Env {
        Env { rank, bindings: BTreeMap::new() }
    }

    pub fn from_pairs(rank: u8, pairs: impl IntoIterator<Item = (Name, DomElem)>) -> Env {
        let mut env = Env::bot(rank);
        for (x, v) in pairs {
            env.set(x, v);
        }
        env
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn get(&self, x: &Name) -> DomElem {
        self.bindings.get(x).copied().unwrap_or_else(|| DomElem::bot(self.rank))
    }

    /// # Panics
    /// If `v` has a different rank.
    pub fn set(&mut self, x: Name, v: DomElem) {
        assert_eq!(v.rank(), self.rank, "rank mismatch");
        if v.is_bot() {
            self.bindings.remove(&x);
        } else {
            self.bindings.insert(x, v);
        }
    }

    /// Non-Bot bindings in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&Name, DomElem)> {
        self.bindings.iter().map(|(x, v)| (x, *v))
    }

    /// Names not mapped to Bot.
    pub fn dom(&self) -> NameSet {
        self.bindings.keys().cloned().collect()
    }

    pub fn lub(&self, other: &Env) -> Env {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let mut out = self.clone();
        for (x, v) in other.iter() {
            let u = out.get(x);
            out.set(x.clone(), lub(u, v));
        }
        out
    }

    /// Keeps only the names in `s`.
    pub fn restrict(&self, s: &NameSet) -> Env {
        Env {
            rank: self.rank,
            bindings: self.bindings.iter().filter(|(x, _)| s.contains(*x)).map(|(x, v)| (x.clone(), *v)).collect(),
        }
    }

    /// Drops the names in `s`.
    pub fn subtract(&self, s: &NameSet) -> Env {
        Env {
            rank: self.rank,
            bindings: self.bindings.iter().filter(|(x, _)| !s.contains(*x)).map(|(x, v)| (x.clone(), *v)).collect(),
        }
    }

    /// `other` on `s`, `self` elsewhere.
    pub fn update(&self, other: &Env, s: &NameSet) -> Env {
        let mut out = self.subtract(s);
        for (x, v) in other.restrict(s).iter() {
            out.set(x.clone(), v);
        }
        out
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Env) -> bool {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        self.iter().all(|(x, v)| leq(v, other.get(x)))
    }

    /// Agreement on every name `self` does not map to Bot.
    pub fn le(&self, other: &Env) -> bool {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        self.iter().all(|(x, v)| other.get(x) == v)
    }

    /// Moves every binding to another rank by embedding or projection.
    pub fn convert(&self, rank: u8) -> Result<Env, DomainError> {
        let mut out = Env::bot(rank);
        for (x, v) in self.iter() {
            out.set(x.clone(), convert(v, rank)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let bindings: Map<String, Value> =
            self.iter().map(|(x, v)| (x.to_string(), v.to_json())).collect();
        json!({"rank": self.rank, "bindings": bindings})
    }

    pub fn from_json(v: &Value) -> Result<Env, DomainError> {
        let bad = || DomainError::Json(v.to_string());
        let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(bad)?;
        let rank = u8::try_from(rank).map_err(|_| bad())?;
        let mut env = Env::bot(rank);
        if let Some(bs) = v.get("bindings") {
            for (x, e) in bs.as_object().ok_or_else(bad)? {
                let name = Name::parse(x).map_err(|e| DomainError::Json(e.to_string()))?;
                env.set(name, DomElem::from_json(e, rank)?);
            }
        }
        Ok(env)
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {v:?}")?;
        }
        f.write_str("}")
    }
}

/// Least fixed point of `step` by Kleene iteration from the Bot environment.
///
/// Returns the fixed point and the number of `step` calls. Fails if the
/// iteration runs past `height(rank) × |dom_hint| + 1` calls, which can only
/// happen for a non-monotone `step` or one writing outside `dom_hint`.
pub fn lfp_env_counted(
    mut step: impl FnMut(&Env) -> Env,
    rank: u8,
    dom_hint: &NameSet,
) -> Result<(Env, usize), DomainError> {
    let cap = lattice_height(rank) * dom_hint.len() + 1;
    let mut cur = Env::bot(rank);
    for calls in 1..=cap {
        let next = step(&cur);
        if next == cur {
            return Ok((cur, calls));
        }
        cur = next;
    }
    Err(DomainError::NotConverged { calls: cap })
}

pub fn lfp_env(step: impl FnMut(&Env) -> Env, rank: u8, dom_hint: &NameSet) -> Result<Env, DomainError> {
    lfp_env_counted(step, rank, dom_hint).map(|(env, _)| env)
}
