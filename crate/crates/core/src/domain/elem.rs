use std::fmt;

use serde_json::{json, Value};

use super::kernel::{KERNEL, MAX_ENUM_RANK, MAX_RANK, WIDE};
use super::DomainError;

/// An element of the rank-`r` approximation of `Value = (Value → Value)⊥`.
///
/// Elements up to [`MAX_ENUM_RANK`] are indices into the canonical
/// enumeration; elements of [`MAX_RANK`] are tables over that enumeration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomElem(Repr);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Small { rank: u8, idx: u8 },
    WideBot,
    Wide([u8; WIDE]),
}

impl DomElem {
    /// # Panics
    /// If `rank` exceeds [`MAX_RANK`].
    pub fn bot(rank: u8) -> DomElem {
        assert!(rank <= MAX_RANK, "rank {rank} out of range");
        if rank == MAX_RANK {
            DomElem(Repr::WideBot)
        } else {
            DomElem(Repr::Small { rank, idx: 0 })
        }
    }

    pub fn rank(self) -> u8 {
        match self.0 {
            Repr::Small { rank, .. } => rank,
            _ => MAX_RANK,
        }
    }

    pub fn is_bot(self) -> bool {
        matches!(self.0, Repr::Small { idx: 0, .. } | Repr::WideBot)
    }

    /// Position in the canonical enumeration of its rank.
    pub fn index(self) -> Option<usize> {
        match self.0 {
            Repr::Small { idx, .. } => Some(idx as usize),
            _ => None,
        }
    }

    pub fn from_index(rank: u8, idx: usize) -> Result<DomElem, DomainError> {
        if rank > MAX_ENUM_RANK {
            return Err(DomainError::RankTooLarge { rank, max: MAX_ENUM_RANK });
        }
        if idx >= KERNEL.size(rank) {
            return Err(DomainError::BadIndex { rank, idx });
        }
        Ok(DomElem(Repr::Small { rank, idx: idx as u8 }))
    }

    /// The function table, indexed by the enumeration of `rank - 1`.
    pub fn entries(self) -> Option<Vec<DomElem>> {
        match self.0 {
            Repr::Small { idx: 0, .. } | Repr::WideBot => None,
            Repr::Small { rank, idx } => Some(
                KERNEL.tables[rank as usize][idx as usize]
                    .iter()
                    .map(|&i| DomElem(Repr::Small { rank: rank - 1, idx: i }))
                    .collect(),
            ),
            Repr::Wide(t) => Some(
                t.iter().map(|&i| DomElem(Repr::Small { rank: MAX_ENUM_RANK, idx: i })).collect(),
            ),
        }
    }

    /// Builds a function element from its table; fails if the table is not
    /// monotone or has the wrong shape.
    pub fn from_entries(rank: u8, entries: &[DomElem]) -> Result<DomElem, DomainError> {
        if rank == 0 || rank > MAX_RANK {
            return Err(DomainError::RankTooLarge { rank, max: MAX_RANK });
        }
        let arg_rank = rank - 1;
        if entries.len() != KERNEL.size(arg_rank) {
            return Err(DomainError::TableShape { rank, len: entries.len() });
        }
        let mut idx = Vec::with_capacity(entries.len());
        for e in entries {
            if e.rank() != arg_rank {
                return Err(DomainError::RankMismatch(e.rank(), arg_rank));
            }
            idx.push(e.index().expect("enumerated rank") as u8);
        }
        if rank == MAX_RANK {
            let t: [u8; WIDE] = idx.try_into().expect("width");
            if KERNEL.covers_wide.iter().any(|&(i, j)| !KERNEL.leq(arg_rank, t[i as usize], t[j as usize])) {
                return Err(DomainError::NonMonotone);
            }
            return Ok(DomElem(Repr::Wide(t)));
        }
        match KERNEL.index[rank as usize].get(&idx) {
            Some(&i) => Ok(DomElem(Repr::Small { rank, idx: i })),
            None => Err(DomainError::NonMonotone),
        }
    }

    pub fn to_json(self) -> Value {
        match self.entries() {
            None => json!("bot"),
            Some(es) => json!({
                "rank": self.rank(),
                "fn": es.iter().map(|e| e.index().unwrap()).collect::<Vec<_>>(),
            }),
        }
    }

    /// Parses the JSON form; `rank` is needed because `"bot"` carries none.
    pub fn from_json(v: &Value, rank: u8) -> Result<DomElem, DomainError> {
        if rank > MAX_RANK {
            return Err(DomainError::RankTooLarge { rank, max: MAX_RANK });
        }
        if v.as_str() == Some("bot") {
            return Ok(DomElem::bot(rank));
        }
        let bad = || DomainError::Json(v.to_string());
        let r = v.get("rank").and_then(Value::as_u64).ok_or_else(bad)?;
        if r != rank as u64 {
            return Err(DomainError::RankMismatch(r.min(255) as u8, rank));
        }
        let entries = v
            .get("fn")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|i| {
                let i = i.as_u64().ok_or_else(bad)?;
                DomElem::from_index(rank - 1, i as usize)
            })
            .collect::<Result<Vec<_>, _>>()?;
        DomElem::from_entries(rank, &entries)
    }
}

impl fmt::Debug for DomElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.entries() {
            None => write!(f, "Bot{}", self.rank()),
            Some(es) => {
                write!(f, "Fn{}[", self.rank())?;
                for (k, e) in es.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", e.index().unwrap())?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for DomElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn check_rank(a: DomElem, b: DomElem) {
    assert_eq!(a.rank(), b.rank(), "rank mismatch: {a:?} vs {b:?}");
}

/// All elements of a rank in canonical order: Bot first, then function
/// tables in lexicographic order of their entry indices.
pub fn enumerate(rank: u8) -> Result<Vec<DomElem>, DomainError> {
    if rank > MAX_ENUM_RANK {
        return Err(DomainError::RankTooLarge { rank, max: MAX_ENUM_RANK });
    }
    Ok((0..KERNEL.size(rank)).map(|i| DomElem(Repr::Small { rank, idx: i as u8 })).collect())
}

/// Length of the longest strictly ascending chain at `rank`.
///
/// Exact for enumerated ranks. At [`MAX_RANK`] it is the bound
/// `1 + width × height(rank - 1)`, which is also exact.
pub fn lattice_height(rank: u8) -> usize {
    if rank <= MAX_ENUM_RANK {
        KERNEL.height[rank as usize]
    } else {
        1 + WIDE * KERNEL.height[MAX_ENUM_RANK as usize]
    }
}

/// # Panics
/// On rank mismatch.
pub fn leq(a: DomElem, b: DomElem) -> bool {
    check_rank(a, b);
    match (a.0, b.0) {
        (Repr::Small { rank, idx: i }, Repr::Small { idx: j, .. }) => KERNEL.leq(rank, i, j),
        (Repr::WideBot, _) => true,
        (_, Repr::WideBot) => false,
        (Repr::Wide(s), Repr::Wide(t)) => {
            s.iter().zip(t.iter()).all(|(&x, &y)| KERNEL.leq(MAX_ENUM_RANK, x, y))
        }
        _ => unreachable!(),
    }
}

/// Least upper bound; total because every rank is a finite lattice.
///
/// # Panics
/// On rank mismatch.
pub fn lub(a: DomElem, b: DomElem) -> DomElem {
    check_rank(a, b);
    match (a.0, b.0) {
        (Repr::Small { rank, idx: i }, Repr::Small { idx: j, .. }) => {
            DomElem(Repr::Small { rank, idx: KERNEL.lub(rank, i, j) })
        }
        (Repr::WideBot, _) => b,
        (_, Repr::WideBot) => a,
        (Repr::Wide(s), Repr::Wide(t)) => {
            let mut u = [0u8; WIDE];
            for k in 0..WIDE {
                u[k] = KERNEL.lub(MAX_ENUM_RANK, s[k], t[k]);
            }
            DomElem(Repr::Wide(u))
        }
        _ => unreachable!(),
    }
}

/// Applies a function element of rank `r` to an argument of rank `r - 1`.
///
/// # Panics
/// If the ranks do not fit.
pub fn fn_project_apply(f: DomElem, a: DomElem) -> DomElem {
    assert!(f.rank() >= 1 && a.rank() == f.rank() - 1, "cannot apply {f:?} to {a:?}");
    let ai = a.index().expect("argument of enumerated rank") as u8;
    match f.0 {
        Repr::Small { rank, idx } => {
            DomElem(Repr::Small { rank: rank - 1, idx: KERNEL.apply(rank, idx, ai) })
        }
        Repr::WideBot => DomElem::bot(MAX_ENUM_RANK),
        Repr::Wide(t) => DomElem(Repr::Small { rank: MAX_ENUM_RANK, idx: t[ai as usize] }),
    }
}

/// Tabulates `f` over the enumeration of `rank - 1`.
pub fn fn_make(rank: u8, mut f: impl FnMut(DomElem) -> DomElem) -> Result<DomElem, DomainError> {
    if rank == 0 {
        return Err(DomainError::RankTooLarge { rank, max: MAX_RANK });
    }
    let args = enumerate(rank - 1)?;
    let entries: Vec<DomElem> = args.into_iter().map(&mut f).collect();
    DomElem::from_entries(rank, &entries)
}

/// Embeds into the next rank.
pub fn embed(u: DomElem) -> Result<DomElem, DomainError> {
    match u.0 {
        Repr::Small { rank, idx } if rank < MAX_ENUM_RANK => {
            Ok(DomElem(Repr::Small { rank: rank + 1, idx: KERNEL.embed[rank as usize][idx as usize] }))
        }
        Repr::Small { idx: 0, .. } => Ok(DomElem(Repr::WideBot)),
        Repr::Small { idx, .. } => Ok(DomElem(Repr::Wide(KERNEL.embed_wide[idx as usize]))),
        _ => Err(DomainError::RankTooLarge { rank: MAX_RANK + 1, max: MAX_RANK }),
    }
}

/// Projects to the previous rank.
pub fn project(w: DomElem) -> Result<DomElem, DomainError> {
    match w.0 {
        Repr::Small { rank: 0, .. } => Err(DomainError::NoProjection),
        Repr::Small { rank, idx } => {
            Ok(DomElem(Repr::Small { rank: rank - 1, idx: KERNEL.project[rank as usize - 1][idx as usize] }))
        }
        Repr::WideBot => Ok(DomElem::bot(MAX_ENUM_RANK)),
        Repr::Wide(g) => {
            let below = MAX_ENUM_RANK as usize - 1;
            let t: Vec<u8> = (0..KERNEL.size(MAX_ENUM_RANK - 1))
                .map(|k| KERNEL.project[below][g[KERNEL.embed[below][k] as usize] as usize])
                .collect();
            let idx = KERNEL.index[MAX_ENUM_RANK as usize][&t];
            Ok(DomElem(Repr::Small { rank: MAX_ENUM_RANK, idx }))
        }
    }
}

/// Embeds or projects repeatedly to reach `rank`.
pub fn convert(mut u: DomElem, rank: u8) -> Result<DomElem, DomainError> {
    while u.rank() < rank {
        u = embed(u)?;
    }
    while u.rank() > rank {
        u = project(u)?;
    }
    Ok(u)
}
