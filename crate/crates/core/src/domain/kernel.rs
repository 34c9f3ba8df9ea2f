//! Precomputed tables for the enumerated ranks.

use std::collections::HashMap;
use std::sync::LazyLock;

/// Highest rank whose elements are enumerated and indexed.
pub const MAX_ENUM_RANK: u8 = 3;
/// Highest supported rank. Its elements are tables over the enumerated rank.
pub const MAX_RANK: u8 = 4;
/// Size of the enumerated rank, i.e. the table width at [`MAX_RANK`].
pub(crate) const WIDE: usize = 36;

const LEVELS: usize = MAX_ENUM_RANK as usize + 1;

pub(crate) struct Kernel {
    /// Entry indices of each element; empty for Bot, which is always index 0.
    pub tables: [Vec<Vec<u8>>; LEVELS],
    pub index: [HashMap<Vec<u8>, u8>; LEVELS],
    pub leq: [Vec<bool>; LEVELS],
    pub lub: [Vec<u8>; LEVELS],
    /// `embed[r]` maps rank `r` to rank `r+1`.
    pub embed: [Vec<u8>; LEVELS - 1],
    /// `project[r]` maps rank `r+1` to rank `r`.
    pub project: [Vec<u8>; LEVELS - 1],
    pub height: [usize; LEVELS],
    /// Embedding of the top enumerated rank into tables of the next.
    pub embed_wide: Vec<[u8; WIDE]>,
    /// Covering pairs `(i, j)` of the top enumerated order, enough to check
    /// monotonicity of wide tables.
    pub covers_wide: Vec<(u8, u8)>,
}

impl Kernel {
    pub fn size(&self, rank: u8) -> usize {
        self.tables[rank as usize].len()
    }

    pub fn leq(&self, rank: u8, a: u8, b: u8) -> bool {
        let n = self.size(rank);
        self.leq[rank as usize][a as usize * n + b as usize]
    }

    pub fn lub(&self, rank: u8, a: u8, b: u8) -> u8 {
        let n = self.size(rank);
        self.lub[rank as usize][a as usize * n + b as usize]
    }

    /// Applies element `f` of `rank` to element `a` of `rank - 1`.
    pub fn apply(&self, rank: u8, f: u8, a: u8) -> u8 {
        match f {
            0 => 0,
            _ => self.tables[rank as usize][f as usize][a as usize],
        }
    }
}

pub(crate) static KERNEL: LazyLock<Kernel> = LazyLock::new(build);

fn monotone(entries: &[u8], leq: &[bool], n: usize) -> bool {
    (0..n).all(|i| {
        (0..n).all(|j| !leq[i * n + j] || leq[entries[i] as usize * n + entries[j] as usize])
    })
}

fn build() -> Kernel {
    let mut tables: [Vec<Vec<u8>>; LEVELS] = Default::default();
    let mut index: [HashMap<Vec<u8>, u8>; LEVELS] = Default::default();
    let mut leq: [Vec<bool>; LEVELS] = Default::default();
    let mut lub: [Vec<u8>; LEVELS] = Default::default();

    tables[0] = vec![vec![]];
    leq[0] = vec![true];
    lub[0] = vec![0];
    index[0].insert(vec![], 0);

    for r in 1..LEVELS {
        let m = tables[r - 1].len();
        let mut ts = vec![vec![]];
        // Odometer over entry vectors, first position most significant, so
        // the output is in lexicographic order.
        let mut cur = vec![0u8; m];
        'odometer: loop {
            if monotone(&cur, &leq[r - 1], m) {
                ts.push(cur.clone());
            }
            for k in (0..m).rev() {
                if (cur[k] as usize) + 1 < m {
                    cur[k] += 1;
                    cur[k + 1..].fill(0);
                    continue 'odometer;
                }
            }
            break;
        }
        let n = ts.len();
        assert!(n <= u8::MAX as usize);
        for (i, t) in ts.iter().enumerate().skip(1) {
            index[r].insert(t.clone(), i as u8);
        }
        index[r].insert(vec![], 0);

        let prev_leq = &leq[r - 1];
        let mut l = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                l[i * n + j] = i == 0
                    || (j != 0
                        && (0..m).all(|k| prev_leq[ts[i][k] as usize * m + ts[j][k] as usize]));
            }
        }
        let prev_lub = &lub[r - 1];
        let mut u = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                u[i * n + j] = if i == 0 {
                    j as u8
                } else if j == 0 {
                    i as u8
                } else {
                    let t: Vec<u8> =
                        (0..m).map(|k| prev_lub[ts[i][k] as usize * m + ts[j][k] as usize]).collect();
                    index[r][&t]
                };
            }
        }
        tables[r] = ts;
        leq[r] = l;
        lub[r] = u;
    }

    // Embedding-projection pairs, bottom up.
    let mut embed: [Vec<u8>; LEVELS - 1] = Default::default();
    let mut project: [Vec<u8>; LEVELS - 1] = Default::default();
    embed[0] = vec![0];
    project[0] = vec![0; tables[1].len()];
    for r in 1..LEVELS - 1 {
        // embed: rank r -> r+1, entry k over rank r is embed(f(project k)).
        embed[r] = tables[r]
            .iter()
            .map(|f| {
                if f.is_empty() {
                    return 0;
                }
                let t: Vec<u8> = (0..tables[r].len())
                    .map(|k| embed[r - 1][f[project[r - 1][k] as usize] as usize])
                    .collect();
                index[r + 1][&t]
            })
            .collect();
        // project: rank r+1 -> r, entry k over rank r-1 is project(g(embed k)).
        project[r] = tables[r + 1]
            .iter()
            .map(|g| {
                if g.is_empty() {
                    return 0;
                }
                let t: Vec<u8> = (0..tables[r - 1].len())
                    .map(|k| project[r - 1][g[embed[r - 1][k] as usize] as usize])
                    .collect();
                index[r][&t]
            })
            .collect();
    }

    let top = LEVELS - 1;
    assert_eq!(tables[top].len(), WIDE);
    let embed_wide = tables[top]
        .iter()
        .map(|f| {
            let mut t = [0u8; WIDE];
            if !f.is_empty() {
                for (k, slot) in t.iter_mut().enumerate() {
                    *slot = embed[top - 1][f[project[top - 1][k] as usize] as usize];
                }
            }
            t
        })
        .collect();

    let height = std::array::from_fn(|r| {
        let n = tables[r].len();
        let mut h = vec![0usize; n];
        // The enumeration is a linear extension of the order.
        for j in 0..n {
            for i in 0..j {
                if leq[r][i * n + j] {
                    h[j] = h[j].max(h[i] + 1);
                }
            }
        }
        h.into_iter().max().unwrap_or(0)
    });

    let n = WIDE;
    let lt = |i: usize, j: usize| i != j && leq[top][i * n + j];
    let mut covers_wide = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                covers_wide.push((i as u8, j as u8));
            }
        }
    }

    Kernel { tables, index, leq, lub, embed, project, height, embed_wide, covers_wide }
}
