//! A recorded stream of random choices. Generators draw from it; replaying
//! an edited stream regenerates a (usually smaller) case, which is how
//! failing cases are shrunk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Source {
    rng: Option<ChaCha8Rng>,
    replay: Vec<u32>,
    pos: usize,
    record: Vec<u32>,
}

/// Seed for one case of one property, independent of evaluation order.
pub(crate) fn case_seed(seed: u64, property: &str, index: u64) -> u64 {
    // FNV-1a over the property id, then a splitmix step.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in property.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Source {
    pub fn random(seed: u64) -> Source {
        Source { rng: Some(ChaCha8Rng::seed_from_u64(seed)), replay: Vec::new(), pos: 0, record: Vec::new() }
    }

    /// Replays `choices`, then yields zeros once they run out.
    pub fn replay(choices: Vec<u32>) -> Source {
        Source { rng: None, replay: choices, pos: 0, record: Vec::new() }
    }

    /// Uniform draw from `0..n`; 0 is always the simplest option.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty choice");
        let v = match &mut self.rng {
            Some(rng) => rng.gen_range(0..n as u32),
            None => {
                let v = self.replay.get(self.pos).copied().unwrap_or(0);
                self.pos += 1;
                v.min(n as u32 - 1)
            }
        };
        self.record.push(v);
        v as usize
    }

    /// Index drawn with the given weights.
    pub fn weighted(&mut self, weights: &[usize]) -> usize {
        let total: usize = weights.iter().sum();
        let mut v = self.below(total);
        for (i, &w) in weights.iter().enumerate() {
            if v < w {
                return i;
            }
            v -= w;
        }
        unreachable!()
    }

    /// True with probability `percent`/100. Shrinks toward false.
    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) >= 100 - percent
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }

    pub fn choices(&self) -> &[u32] {
        &self.record
    }
}

/// Candidate edits of a choice sequence, roughly most aggressive first.
pub(crate) fn shrink_candidates(choices: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let n = choices.len();
    for k in [8, 4, 2, 1] {
        if k > n {
            continue;
        }
        for start in (0..=n - k).rev() {
            let mut c = choices.to_vec();
            c.drain(start..start + k);
            out.push(c);
        }
    }
    for i in 0..n {
        if choices[i] > 0 {
            let mut c = choices.to_vec();
            c[i] = 0;
            out.push(c);
            if choices[i] > 1 {
                let mut c = choices.to_vec();
                c[i] /= 2;
                out.push(c);
                let mut c = choices.to_vec();
                c[i] -= 1;
                out.push(c);
            }
        }
    }
    out
}

/// Shortlex order, so every accepted shrink step makes progress.
pub(crate) fn simpler(a: &[u32], b: &[u32]) -> bool {
    (a.len(), a) < (b.len(), b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_reproduces_draws() {
        let mut s = Source::random(7);
        let xs: Vec<usize> = (0..20).map(|i| s.below(i + 1)).collect();
        let mut r = Source::replay(s.choices().to_vec());
        let ys: Vec<usize> = (0..20).map(|i| r.below(i + 1)).collect();
        assert_eq!(xs, ys);
        let mut z = Source::replay(vec![]);
        assert_eq!(z.below(5), 0);
        assert!(!z.chance(50));
    }

    #[test]
    fn replay_clamps_out_of_range() {
        let mut r = Source::replay(vec![9]);
        assert_eq!(r.below(3), 2);
        assert_eq!(r.choices(), &[2]);
    }

    #[test]
    fn case_seeds_differ() {
        assert_ne!(case_seed(1, "a", 0), case_seed(1, "a", 1));
        assert_ne!(case_seed(1, "a", 0), case_seed(1, "b", 0));
        assert_eq!(case_seed(3, "a", 5), case_seed(3, "a", 5));
    }

    #[test]
    fn candidates_are_simpler() {
        let c = vec![3, 0, 5, 1];
        for cand in shrink_candidates(&c) {
            assert!(simpler(&cand, &c));
        }
    }
}
