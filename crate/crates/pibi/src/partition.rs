//! Partitions of `n` parties into blocks of at most `k`.
//!
//! Permutation invariance of the inequalities makes the bounds depend only on
//! the multiset of block sizes, so partitions are stored as nonincreasing
//! size lists and parties are assigned to blocks contiguously.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{PibiError, Result};

/// A multiset of block sizes summing to `n`, every part at most `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    sizes: Vec<usize>,
    n: usize,
    k: usize,
}

impl Partition {
    pub fn new(mut sizes: Vec<usize>, k: usize) -> Result<Self> {
        if sizes.is_empty() {
            return Err(PibiError::InvalidInput("partition must have at least one block".into()));
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        if sizes.iter().any(|&s| s == 0) {
            return Err(PibiError::InvalidInput("partition blocks must be non-empty".into()));
        }
        if sizes[0] > k {
            return Err(PibiError::InvalidInput(format!(
                "partition block of size {} exceeds k = {k}",
                sizes[0]
            )));
        }
        let n = sizes.iter().sum();
        Ok(Partition { sizes, n, k })
    }

    /// Single block containing all `n` parties.
    pub fn single_block(n: usize) -> Self {
        Partition { sizes: vec![n], n, k: n }
    }

    /// All blocks of size one.
    pub fn singletons(n: usize) -> Self {
        Partition { sizes: vec![1; n], n, k: 1 }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Largest dimension `2^(|A|+|A'|)` over block pairs; `2^n` for a single
    /// block. Governs SDP capacity checks.
    pub fn max_pair_exponent(&self) -> usize {
        if self.sizes.len() == 1 {
            self.sizes[0]
        } else {
            self.sizes[0] + self.sizes[1]
        }
    }

    /// Party index ranges per block under the contiguous assignment.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::with_capacity(self.sizes.len());
        let mut start = 0;
        for &s in &self.sizes {
            out.push(start..start + s);
            start += s;
        }
        out
    }

    /// All partitions of `n` with parts at most `k`, descending-lex order.
    pub fn enumerate(n: usize, k: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(remaining: usize, max_part: usize, current: &mut Vec<usize>, k: usize, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition {
                    sizes: current.clone(),
                    n: current.iter().sum(),
                    k,
                });
                return;
            }
            let top = max_part.min(remaining);
            for part in (1..=top).rev() {
                current.push(part);
                rec(remaining - part, part, current, k, out);
                current.pop();
            }
        }
        rec(n, k.min(n), &mut current, k, &mut out);
        out
    }

    /// Near-balanced candidates: as many blocks of size `k` as possible, plus
    /// variants that spread the remainder so no block gets smaller than it
    /// must. Small blocks carry no quantum advantage for the inequalities of
    /// interest, so the optimum sits in this family.
    pub fn balanced_candidates(n: usize, k: usize) -> Vec<Partition> {
        let k = k.min(n);
        if k == 0 {
            return Vec::new();
        }
        let mut set = std::collections::BTreeSet::new();
        if k == n {
            set.insert(vec![n]);
        } else {
            let q = n / k;
            let r = n % k;
            let mut base = vec![k; q];
            if r > 0 {
                base.push(r);
            }
            set.insert(sorted_desc(base));
            // fold the remainder into the last j full blocks, splitting their
            // total as evenly as possible
            for j in 1..=q.min(4) {
                let pool = j * k + (n % k);
                let blocks = j + if n % k > 0 { 1 } else { 0 };
                if blocks == 0 {
                    continue;
                }
                let mut sizes = vec![k; q - j];
                let bq = pool / blocks;
                let br = pool % blocks;
                for t in 0..blocks {
                    sizes.push(bq + if t < br { 1 } else { 0 });
                }
                if sizes.iter().all(|&s| s >= 1 && s <= k) {
                    set.insert(sorted_desc(sizes));
                }
            }
        }
        set.into_iter()
            .rev()
            .map(|sizes| Partition {
                n: sizes.iter().sum(),
                sizes,
                k,
            })
            .collect()
    }
}

fn sorted_desc(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Parse the `Display` form, e.g. `4+3+1`.
impl std::str::FromStr for Partition {
    type Err = PibiError;

    fn from_str(s: &str) -> Result<Self> {
        let sizes: Vec<usize> = s
            .split('+')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| PibiError::Parse(format!("bad partition component {t:?}")))
            })
            .collect::<Result<_>>()?;
        let k = sizes.iter().copied().max().unwrap_or(0);
        Partition::new(sizes, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts() {
        // p(n) with unrestricted parts
        assert_eq!(Partition::enumerate(5, 5).len(), 7);
        assert_eq!(Partition::enumerate(8, 8).len(), 22);
        // restricted: partitions of 8 with parts <= 4
        assert_eq!(Partition::enumerate(8, 4).len(), 15);
        for p in Partition::enumerate(8, 4) {
            assert_eq!(p.sizes().iter().sum::<usize>(), 8);
            assert!(p.sizes().iter().all(|&s| s <= 4 && s >= 1));
        }
    }

    #[test]
    fn balanced_contains_base() {
        let cands = Partition::balanced_candidates(11, 4);
        assert!(cands.iter().any(|p| p.sizes() == [4, 4, 3]));
        for p in &cands {
            assert_eq!(p.n(), 11);
            assert!(p.sizes().iter().all(|&s| s <= 4));
        }
    }

    #[test]
    fn display_parse_round_trip() {
        let p = Partition::new(vec![3, 1, 4], 4).unwrap();
        assert_eq!(p.to_string(), "4+3+1");
        let q: Partition = "4+3+1".parse().unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(vec![], 3).is_err());
        assert!(Partition::new(vec![0, 2], 3).is_err());
        assert!(Partition::new(vec![5], 3).is_err());
    }
}
