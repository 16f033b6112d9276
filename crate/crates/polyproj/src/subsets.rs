//! Ordered subset enumeration shared by the reduction and enumeration
//! routines. Everything here is deterministic: subsets come out sorted by
//! cardinality first, then lexicographically by their (ascending) elements,
//! which is exactly the tie-breaking order the callers promise.

use crate::{Error, Result};

/// All `size`-element index combinations of `0..k`, in lexicographic order.
pub(crate) fn combinations(k: usize, size: usize) -> Vec<Vec<usize>> {
    if size > k {
        return Vec::new();
    }
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..size).collect();
    loop {
        out.push(current.clone());
        // Advance the rightmost position that can still move.
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + k - size {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in i + 1..size {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Every subset of `pool` (which must be sorted ascending), ordered by size
/// and then lexicographically. Fails with [`Error::SubsetBlowup`] when the
/// count would exceed `cap`.
pub(crate) fn ordered_subsets(pool: &[usize], cap: usize) -> Result<Vec<Vec<usize>>> {
    debug_assert!(pool.windows(2).all(|w| w[0] < w[1]));
    if pool.len() >= usize::BITS as usize - 1 || (1usize << pool.len()) > cap {
        return Err(Error::SubsetBlowup);
    }
    let mut out = Vec::with_capacity(1 << pool.len());
    for size in 0..=pool.len() {
        for combo in combinations(pool.len(), size) {
            out.push(combo.into_iter().map(|i| pool[i]).collect());
        }
    }
    Ok(out)
}
