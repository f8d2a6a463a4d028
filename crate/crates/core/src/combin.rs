//! Small combinatorial helpers: binomial coefficients and k-subset
//! enumeration / sampling in lexicographic order.

use crate::error::{Error, Result};
use rand::Rng;
use std::collections::BTreeSet;

/// Exact binomial coefficient. Saturates nothing: callers stay well inside
/// u128 at the graph sizes this crate supports.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Calls `f` with every k-subset of `0..n` in lexicographic order.
pub fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut s: Vec<usize> = (0..k).collect();
    loop {
        f(&s);
        // advance to the next subset in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if s[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        s[i] += 1;
        for j in i + 1..k {
            s[j] = s[j - 1] + 1;
        }
    }
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(n, k, |s| out.push(s.to_vec()));
    out
}

/// Samples `count` distinct k-subsets of `0..n` uniformly without
/// replacement, returned in lexicographic order (so a full-budget sample is
/// exactly the lexicographic enumeration). Errors if `count` exceeds the
/// number of distinct subsets.
pub fn sample_subsets<R: Rng>(
    n: usize,
    k: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    let total = binomial(n, k);
    if (count as u128) > total {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {count} distinct {k}-subsets of {n} elements (only {total} exist)"
        )));
    }
    if count as u128 == total {
        return Ok(all_subsets(n, k));
    }
    // Rejection sampling; the callers draw far fewer subsets than exist, so
    // collisions stay rare. Each draw is a partial Fisher-Yates shuffle.
    let mut chosen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut pool: Vec<usize> = (0..n).collect();
    while chosen.len() < count {
        for i in 0..k {
            let j = rng.gen_range(i..n);
            pool.swap(i, j);
        }
        let mut s = pool[..k].to_vec();
        s.sort_unstable();
        chosen.insert(s);
    }
    Ok(chosen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_matches_pascal_triangle() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(16, 14), 120);
        assert_eq!(binomial(41, 40), 41);
        for n in 1..20 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn subset_enumeration_is_lexicographic_and_complete() {
        let subs = all_subsets(5, 3);
        assert_eq!(subs.len() as u128, binomial(5, 3));
        let mut sorted = subs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(subs, sorted);
        assert_eq!(subs[0], vec![0, 1, 2]);
        assert_eq!(subs.last().unwrap(), &vec![2, 3, 4]);
    }

    #[test]
    fn full_budget_sample_equals_enumeration() {
        let mut rng = rand::thread_rng();
        let sample = sample_subsets(6, 3, 20, &mut rng).unwrap();
        assert_eq!(sample, all_subsets(6, 3));
    }

    #[test]
    fn sampled_subsets_are_distinct_and_sorted() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let sample = sample_subsets(12, 5, 30, &mut rng).unwrap();
        assert_eq!(sample.len(), 30);
        for w in sample.windows(2) {
            assert!(w[0] < w[1]);
        }
        for s in &sample {
            assert!(s.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
