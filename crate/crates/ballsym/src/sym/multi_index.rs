use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Exponent vector `I = (i_1, .., i_n)`.
///
/// Ordered graded-colexicographically: by total degree, then by the last
/// coordinate where two indices differ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `ε_k`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|I|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&i| i as usize).sum()
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    /// `I!` as a big integer.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().fold(BigUint::one(), |acc, &i| acc * factorial(i as usize))
    }

    /// `I + ε_k`.
    pub fn plus(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v[k] += 1;
        MultiIndex(v)
    }

    /// `I - ε_k`, if `i_k > 0`.
    pub fn minus(&self, k: usize) -> Option<Self> {
        if self.0[k] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[k] -= 1;
        Some(MultiIndex(v))
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All indices of dimension `n` and degree `m`, in graded-colex order.
    pub fn enumerate(n: usize, m: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fill(&mut cur, 0, m, &mut out);
        out.sort();
        out
    }

    /// All indices with `|I| <= max_degree`, in graded-colex order.
    pub fn enumerate_up_to(n: usize, max_degree: usize) -> Vec<MultiIndex> {
        (0..=max_degree).flat_map(|m| Self::enumerate(n, m)).collect()
    }

    /// `t^I` for a point `t`.
    pub fn monomial<S: Clone + num_traits::One + std::ops::Mul<Output = S>>(&self, t: &[S]) -> S {
        let mut acc = S::one();
        for (k, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                acc = acc * t[k].clone();
            }
        }
        acc
    }
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = remaining as u32;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for i in 0..=remaining {
        cur[pos] = i as u32;
        fill(cur, pos + 1, remaining - i, out);
    }
    cur[pos] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Number of indices of dimension `n` and degree `m`.
pub fn count(n: usize, m: usize) -> usize {
    if n == 0 {
        return usize::from(m == 0);
    }
    // C(m + n - 1, n - 1)
    let mut c: u128 = 1;
    for i in 0..(n - 1) as u128 {
        c = c * (m as u128 + 1 + i) / (i + 1);
    }
    c as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graded_colex_order() {
        let e = MultiIndex::enumerate(2, 2);
        let v: Vec<Vec<u32>> = e.iter().map(|i| i.entries().to_vec()).collect();
        assert_eq!(v, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let all = MultiIndex::enumerate_up_to(2, 1);
        let v: Vec<Vec<u32>> = all.iter().map(|i| i.entries().to_vec()).collect();
        assert_eq!(v, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn big_factorials_do_not_overflow() {
        let i = MultiIndex::new(vec![25, 3]);
        assert_eq!(i.factorial(), factorial(25) * BigUint::from(6u32));
        assert_eq!(factorial(21).to_string(), "51090942171709440000");
    }

    proptest! {
        #[test]
        fn enumeration_is_complete_and_sorted(n in 1usize..5, m in 0usize..7) {
            let e = MultiIndex::enumerate(n, m);
            prop_assert_eq!(e.len(), count(n, m));
            prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(e.iter().all(|i| i.degree() == m));
        }
    }
}
