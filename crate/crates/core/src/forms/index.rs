//! Strictly increasing multi-indices and signed reordering.

use std::collections::HashMap;

/// All strictly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorts `idx` and returns the sign of the permutation, or `None` if an
/// index repeats (the alternating component vanishes).
pub fn sort_signed(idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((sign, v))
    }
}

/// Position lookup for the sorted tuples of a fixed `(n, k)`.
#[derive(Clone, Debug)]
pub struct IndexSet {
    pub tuples: Vec<Vec<usize>>,
    pos: HashMap<Vec<usize>, usize>,
}

impl IndexSet {
    pub fn new(n: usize, k: usize) -> Self {
        let tuples = combinations(n, k);
        let pos = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        IndexSet { tuples, pos }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn position(&self, sorted: &[usize]) -> Option<usize> {
        self.pos.get(sorted).copied()
    }

    /// Sign and position of an arbitrary index list.
    pub fn signed_position(&self, idx: &[usize]) -> Option<(i64, usize)> {
        let (sign, sorted) = sort_signed(idx)?;
        Some((sign, self.position(&sorted)?))
    }
}

/// One-based comma-separated label, e.g. `"1,3"`.
pub fn label(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_tuples() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).len(), 0);
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn signs() {
        assert_eq!(sort_signed(&[2, 0, 1]), Some((1, vec![0, 1, 2])));
        assert_eq!(sort_signed(&[1, 0]), Some((-1, vec![0, 1])));
        assert_eq!(sort_signed(&[1, 1]), None);
    }
}
