//! Denotations of expressions and heaps over the rank-`r` domain.
//!
//! Functions take their arguments one rank below themselves, so `λ` and
//! application go through the embedding-projection pair. Heaps denote the
//! least fixed point of either `ρ ⊔ ⟪Γ⟫ρ'` ([`HeapVariant::Join`]) or the
//! right-sided update `ρ + ⟪Γ⟫ρ'` ([`HeapVariant::Update`]).

mod program;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{convert, lfp_env, DomElem, DomainError, Env, MAX_RANK};
use crate::syntax::{freshen_binders, Expr, Heap, Name};
use program::{Machine, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeapVariant {
    Join,
    Update,
}

impl fmt::Display for HeapVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeapVariant::Join => "join",
            HeapVariant::Update => "update",
        })
    }
}

fn check_rank(rank: u8, rho: &Env) -> Result<(), DomainError> {
    if rank == 0 || rank > MAX_RANK {
        return Err(DomainError::RankTooLarge { rank, max: MAX_RANK });
    }
    if rho.rank() != rank {
        return Err(DomainError::RankMismatch(rho.rank(), rank));
    }
    Ok(())
}

/// `⟦e⟧ρ` at `rank`.
///
/// Binders of `e` are renamed apart from each other, from the free
/// variables and from `dom ρ` first; denotations do not depend on binder
/// names, and the Let equation needs them fresh.
pub fn den_expr(e: &Expr, rho: &Env, rank: u8, variant: HeapVariant) -> Result<DomElem, DomainError> {
    check_rank(rank, rho)?;
    let mut avoid = rho.dom();
    let e = freshen_binders(e, &mut avoid);
    let mut prog = Program::new();
    let root = prog.compile(&e);
    let mut m = Machine::new(&prog, rank, variant)?;
    m.load(rho);
    m.eval(root)
}

/// `⟦Γ⟧ρ` at `rank`.
pub fn den_heap(heap: &Heap, rho: &Env, rank: u8, variant: HeapVariant) -> Result<Env, DomainError> {
    check_rank(rank, rho)?;
    let mut avoid = rho.dom();
    avoid.extend(heap.domain());
    avoid.extend(heap.free_vars());
    let mut prog = Program::new();
    for x in rho.dom() {
        prog.slot(&x);
    }
    let rhs: Vec<(Name, usize)> = heap
        .iter()
        .map(|(x, e)| {
            prog.slot(x);
            let e = freshen_binders(e, &mut avoid);
            (x.clone(), prog.compile(&e))
        })
        .collect();
    let mut m = Machine::new(&prog, rank, variant)?;
    let dom_gamma = heap.domain();
    let mut hint = rho.dom();
    hint.extend(dom_gamma.iter().cloned());
    let mut failure = None;
    let result = lfp_env(
        |cur| {
            m.load(cur);
            let mut inner = Env::bot(rank);
            for (x, n) in &rhs {
                match m.eval(*n) {
                    Ok(v) => inner.set(x.clone(), v),
                    Err(e) => failure = Some(e),
                }
            }
            match variant {
                HeapVariant::Join => rho.lub(&inner),
                HeapVariant::Update => rho.update(&inner, &dom_gamma),
            }
        },
        rank,
        &hint,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    result
}

/// `⟦Γ⟧ρ ⪯ ⟦Δ⟧ρ'`: `dom Γ ⊆ dom Δ` and both denotations agree on `dom Γ`.
pub fn preceq(
    gamma: &Heap,
    rho: &Env,
    delta: &Heap,
    rho2: &Env,
    rank: u8,
    variant: HeapVariant,
) -> Result<bool, DomainError> {
    if !gamma.domain().is_subset(&delta.domain()) {
        return Ok(false);
    }
    let a = den_heap(gamma, rho, rank, variant)?;
    let b = den_heap(delta, rho2, rank, variant)?;
    Ok(gamma.names().all(|x| a.get(x) == b.get(x)))
}

/// Projects `u` down to rank `m`.
///
/// # Panics
/// If `m` exceeds the rank of `u`.
pub fn observe(u: DomElem, m: u8) -> DomElem {
    assert!(m <= u.rank(), "cannot observe rank {} at {m}", u.rank());
    convert(u, m).expect("projection stays in range")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    NotEqual { witness: String },
    Inconclusive { reason: String },
}

/// Decides an equality between two rank-indexed denotations by looking at
/// their rank-`m` observations at the two largest of `ranks`.
///
/// A side is stable when its observation is the same at both ranks. With a
/// single rank, both sides count as stable.
pub fn den_eq_stable(
    mut lhs_at: impl FnMut(u8) -> Result<DomElem, DomainError>,
    mut rhs_at: impl FnMut(u8) -> Result<DomElem, DomainError>,
    m: u8,
    ranks: &[u8],
) -> Result<Verdict, DomainError> {
    let mut rs: Vec<u8> = ranks.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let top = &rs[rs.len().saturating_sub(2)..];
    assert!(!top.is_empty() && top[0] >= m, "ranks must be at least {m}");
    let mut l = Vec::new();
    let mut r = Vec::new();
    for &k in top {
        l.push(observe(lhs_at(k)?, m));
        r.push(observe(rhs_at(k)?, m));
    }
    let stable = l.windows(2).all(|w| w[0] == w[1]) && r.windows(2).all(|w| w[0] == w[1]);
    let (lh, rh) = (*l.last().unwrap(), *r.last().unwrap());
    Ok(if stable && l == r {
        Verdict::Equal
    } else if stable {
        Verdict::NotEqual { witness: witness(lh, rh) }
    } else {
        Verdict::Inconclusive {
            reason: format!("observations still change between ranks {top:?}: {l:?} vs {r:?}"),
        }
    })
}

fn shape(u: DomElem) -> &'static str {
    if u.is_bot() {
        "Bot"
    } else {
        "Fn"
    }
}

/// Describes where two distinct elements of one rank first differ, as a
/// path of arguments ending in differing shapes.
pub fn witness(a: DomElem, b: DomElem) -> String {
    match (a.entries(), b.entries()) {
        (Some(fa), Some(fb)) => {
            for (k, (x, y)) in fa.iter().zip(&fb).enumerate() {
                if x != y {
                    let arg = if k == 0 { "Bot".to_string() } else { format!("#{k}") };
                    return format!("apply to {arg}: {}", witness(*x, *y));
                }
            }
            "equal".to_string()
        }
        _ => format!("{} vs {}", shape(a), shape(b)),
    }
}

/// Pretty form of an element listing `{argument ↦ result}` index pairs.
pub fn show_table(u: DomElem) -> String {
    match u.entries() {
        None => format!("Bot{}", u.rank()),
        Some(es) => {
            let pairs: Vec<String> = es
                .iter()
                .enumerate()
                .map(|(k, e)| format!("{k} ↦ {}", e.index().expect("enumerated entry")))
                .collect();
            format!("Fn{}{{{}}}", u.rank(), pairs.join(", "))
        }
    }
}
