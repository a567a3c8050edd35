//! Exact combinatorial ground truth for the particle processes.
//!
//! Everything here is a pure function of its inputs. The brute-force routines
//! are exponential and guarded; they exist to cross-check the fast paths on
//! small permutations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;
use thiserror::Error;

/// Largest sequence accepted by [`longest_avoiding_bruteforce`].
pub const BRUTEFORCE_MAX_LEN: usize = 20;
/// Largest `n` accepted by [`exact_distribution`].
pub const EXACT_MAX_N: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("not a permutation of 1..={n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },
    #[error("sequence length {len} exceeds the brute-force guard of {max}")]
    TooLong { len: usize, max: usize },
    #[error("n = {n} exceeds the enumeration guard of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
}

/// A bijection on `{1..n}` stored in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self, OracleError> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            let idx = v as usize;
            if idx == 0 || idx > n {
                return Err(OracleError::InvalidPermutation {
                    n,
                    reason: format!("value {v} out of range"),
                });
            }
            if std::mem::replace(&mut seen[idx - 1], true) {
                return Err(OracleError::InvalidPermutation {
                    n,
                    reason: format!("value {v} repeated"),
                });
            }
        }
        Ok(Self(values))
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n as u32).collect())
    }

    /// The decreasing permutation `n (n-1) ... 1`.
    pub fn decreasing(n: usize) -> Self {
        Self((1..=n as u32).rev().collect())
    }

    /// Relative-order pattern of an arbitrary sequence of distinct values.
    pub fn standardize<T: PartialOrd>(seq: &[T]) -> Self {
        let mut order: Vec<usize> = (0..seq.len()).collect();
        order.sort_by(|&a, &b| seq[a].partial_cmp(&seq[b]).expect("incomparable values"));
        let mut values = vec![0u32; seq.len()];
        for (rank, &pos) in order.iter().enumerate() {
            values[pos] = rank as u32 + 1;
        }
        Self(values)
    }

    /// All permutations of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (1..=n as u32).permutations(n).map(Permutation)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Value complement `i -> n + 1 - i`.
    pub fn complemented(&self) -> Self {
        let n = self.0.len() as u32;
        Self(self.0.iter().map(|&v| n + 1 - v).collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() < 10 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.0.iter().join(","))
        }
    }
}

/// Parses either compact one-line notation (`"246513"`, only for n < 10) or a
/// comma/whitespace separated list.
impl FromStr for Permutation {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = |reason: String| OracleError::InvalidPermutation { n: 0, reason };
        let values: Vec<u32> = if s.contains([',', ' ', '\t']) {
            s.split([',', ' ', '\t'])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|e| bad(format!("{t:?}: {e}"))))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| bad(format!("bad digit {c:?}"))))
                .collect::<Result<_, _>>()?
        };
        Permutation::new(values)
    }
}

/// Integer partition `λ1 ≥ λ2 ≥ ... ≥ λl ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Sum of the first `rows` parts; missing parts count as zero.
    pub fn leading_sum(&self, rows: usize) -> usize {
        self.0.iter().take(rows).sum()
    }
}

/// Does some subsequence of `sigma` have the same relative order as `tau`?
pub fn contains_pattern(sigma: &Permutation, tau: &Permutation) -> bool {
    contains_pattern_in(sigma.as_slice(), tau.as_slice())
}

/// Backtracking containment test on raw sequences of distinct values.
pub fn contains_pattern_in(seq: &[u32], tau: &[u32]) -> bool {
    if tau.is_empty() {
        return true;
    }
    if tau.len() > seq.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(tau.len());
    extend_match(seq, tau, 0, &mut chosen)
}

fn extend_match(seq: &[u32], tau: &[u32], start: usize, chosen: &mut Vec<u32>) -> bool {
    let depth = chosen.len();
    if depth == tau.len() {
        return true;
    }
    let needed = tau.len() - depth;
    for i in start..=seq.len() - needed {
        let v = seq[i];
        // order-consistent with every earlier pick
        let consistent = chosen
            .iter()
            .zip(tau)
            .all(|(&c, &t)| (c < v) == (t < tau[depth]));
        if consistent {
            chosen.push(v);
            if extend_match(seq, tau, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Longest increasing subsequence length via patience-sorting pile tops.
pub fn lis_patience(sigma: &Permutation) -> usize {
    lis_of(sigma.as_slice())
}

pub(crate) fn lis_of<T: PartialOrd + Copy>(seq: &[T]) -> usize {
    let mut tops: Vec<T> = Vec::new();
    for &x in seq {
        // leftmost pile whose top exceeds x
        let pile = tops.partition_point(|&t| t < x);
        if pile == tops.len() {
            tops.push(x);
        } else {
            tops[pile] = x;
        }
    }
    tops.len()
}

/// Shape of the insertion tableau under Schensted row insertion.
pub fn rsk_shape(sigma: &Permutation) -> Shape {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &v in sigma.as_slice() {
        let mut x = v;
        let mut r = 0;
        loop {
            if r == rows.len() {
                rows.push(vec![x]);
                break;
            }
            let row = &mut rows[r];
            let pos = row.partition_point(|&y| y < x);
            if pos == row.len() {
                row.push(x);
                break;
            }
            x = std::mem::replace(&mut row[pos], x);
            r += 1;
        }
    }
    Shape(rows.iter().map(Vec::len).collect())
}

/// `λ1 + ... + λ(k-1)`: the longest `k...21`-avoiding subsequence length.
pub fn greene_stat(sigma: &Permutation, k: usize) -> Result<usize, OracleError> {
    if k < 2 {
        return Err(OracleError::InvalidK(k));
    }
    Ok(rsk_shape(sigma).leading_sum(k - 1))
}

/// Maximum length of a subsequence of `sigma` avoiding `tau`, by exhaustive
/// search. Any extension of a subsequence containing `tau` also contains it,
/// so such branches are cut immediately.
pub fn longest_avoiding_bruteforce(
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<usize, OracleError> {
    let n = sigma.len();
    if n > BRUTEFORCE_MAX_LEN {
        return Err(OracleError::TooLong {
            len: n,
            max: BRUTEFORCE_MAX_LEN,
        });
    }
    let mut best = 0;
    let mut current = Vec::with_capacity(n);
    search_avoiding(sigma.as_slice(), tau.as_slice(), 0, &mut current, &mut best);
    Ok(best)
}

fn search_avoiding(seq: &[u32], tau: &[u32], i: usize, current: &mut Vec<u32>, best: &mut usize) {
    if current.len() + (seq.len() - i) <= *best {
        return;
    }
    if i == seq.len() {
        *best = current.len();
        return;
    }
    current.push(seq[i]);
    if !contains_pattern_in(current, tau) {
        search_avoiding(seq, tau, i + 1, current, best);
    }
    current.pop();
    search_avoiding(seq, tau, i + 1, current, best);
}

/// Exact law of a statistic over the uniform distribution on `S_n`, kept as
/// integer counts out of `n!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: usize,
    pub total: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl ExactDistribution {
    pub fn from_values(n: usize, values: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for v in values {
            *counts.entry(v).or_insert(0) += 1;
            total += 1;
        }
        Self { n, total, counts }
    }

    pub fn probability(&self, value: usize) -> Ratio<u64> {
        Ratio::new(self.counts.get(&value).copied().unwrap_or(0), self.total)
    }

    pub fn probabilities(&self) -> BTreeMap<usize, Ratio<u64>> {
        self.counts
            .keys()
            .map(|&v| (v, self.probability(v)))
            .collect()
    }
}

impl fmt::Display for ExactDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self
            .probabilities()
            .iter()
            .map(|(v, p)| format!("{v}: {p}"))
            .join(", ");
        write!(f, "{{{body}}}")
    }
}

/// Exact distribution of [`greene_stat`] over all of `S_n`.
pub fn exact_distribution(n: usize, k: usize) -> Result<ExactDistribution, OracleError> {
    if n > EXACT_MAX_N {
        return Err(OracleError::TooLarge { n, max: EXACT_MAX_N });
    }
    if k < 2 {
        return Err(OracleError::InvalidK(k));
    }
    Ok(ExactDistribution::from_values(
        n,
        Permutation::all(n).map(|s| rsk_shape(&s).leading_sum(k - 1)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// Independent LIS: all subsets, exponential.
    fn lis_by_subsets(seq: &[u32]) -> usize {
        let n = seq.len();
        (0u32..1 << n)
            .filter(|mask| {
                let picked: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| seq[i]).collect();
                picked.windows(2).all(|w| w[0] < w[1])
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn containment_examples() {
        assert!(contains_pattern(&p("246513"), &p("132")));
        assert!(!contains_pattern(&p("246513"), &p("4213")));
        assert!(contains_pattern(&p("246513"), &p("1")));
        assert!(contains_pattern(&p("1"), &p("1")));
        assert!(!contains_pattern(&p("12"), &p("21")));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!("12a".parse::<Permutation>().is_err());
        assert_eq!("3, 1, 2".parse::<Permutation>().unwrap(), p("312"));
    }

    #[test]
    fn lis_examples() {
        assert_eq!(lis_patience(&Permutation::identity(9)), 9);
        assert_eq!(lis_patience(&Permutation::decreasing(9)), 1);
        assert_eq!(lis_by_subsets(p("246513").as_slice()), 3);
        assert_eq!(lis_patience(&p("246513")), 3);
    }

    #[test]
    fn rsk_examples() {
        assert_eq!(rsk_shape(&Permutation::identity(4)).parts(), &[4]);
        assert_eq!(rsk_shape(&p("321")).parts(), &[1, 1, 1]);
        assert_eq!(rsk_shape(&p("312")).parts(), &[2, 1]);
        assert_eq!(rsk_shape(&Permutation::identity(0)).parts(), &[] as &[usize]);
    }

    #[test]
    fn greene_examples() {
        for k in 2..6 {
            assert_eq!(greene_stat(&Permutation::identity(7), k).unwrap(), 7);
        }
        assert_eq!(greene_stat(&p("321"), 3).unwrap(), 2);
        assert_eq!(greene_stat(&p("312"), 3).unwrap(), 3);
        assert_eq!(greene_stat(&p("312"), 1), Err(OracleError::InvalidK(1)));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(longest_avoiding_bruteforce(&p("321"), &p("321")).unwrap(), 2);
        assert_eq!(longest_avoiding_bruteforce(&p("246513"), &p("21")).unwrap(), 3);
        for k in 2..7 {
            let tau = Permutation::decreasing(k);
            assert_eq!(longest_avoiding_bruteforce(&Permutation::identity(6), &tau).unwrap(), 6);
        }
        let long = Permutation::identity(21);
        assert!(matches!(
            longest_avoiding_bruteforce(&long, &p("21")),
            Err(OracleError::TooLong { len: 21, .. })
        ));
    }

    #[test]
    fn bruteforce_at_guard_length() {
        let sigma = Permutation::decreasing(20);
        assert_eq!(longest_avoiding_bruteforce(&sigma, &p("321")).unwrap(), 2);
    }

    #[test]
    fn exact_distribution_examples() {
        let d = exact_distribution(1, 4).unwrap();
        assert_eq!(d.probabilities(), BTreeMap::from([(1, Ratio::new(1, 1))]));
        let d = exact_distribution(2, 2).unwrap();
        assert_eq!(
            d.probabilities(),
            BTreeMap::from([(1, Ratio::new(1, 2)), (2, Ratio::new(1, 2))])
        );
        let d = exact_distribution(3, 3).unwrap();
        assert_eq!(
            d.probabilities(),
            BTreeMap::from([(2, Ratio::new(1, 6)), (3, Ratio::new(5, 6))])
        );
        assert_eq!(d.to_string(), "{2: 1/6, 3: 5/6}");
        assert!(exact_distribution(9, 2).is_err());
    }

    #[test]
    fn greene_matches_bruteforce_exhaustively() {
        for n in 0..=7 {
            for sigma in Permutation::all(n) {
                for k in 2..=4 {
                    let tau = Permutation::decreasing(k);
                    assert_eq!(
                        greene_stat(&sigma, k).unwrap(),
                        longest_avoiding_bruteforce(&sigma, &tau).unwrap(),
                        "sigma = {sigma}, k = {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn lis_matches_subsets_exhaustively() {
        for n in 0..=7 {
            for sigma in Permutation::all(n) {
                assert_eq!(lis_patience(&sigma), lis_by_subsets(sigma.as_slice()));
            }
        }
    }

    #[test]
    fn greene_invariant_under_reverse_complement() {
        for n in 0..=6 {
            for sigma in Permutation::all(n) {
                let rc = sigma.reversed().complemented();
                for k in 2..=4 {
                    assert_eq!(greene_stat(&sigma, k), greene_stat(&rc, k));
                }
            }
        }
    }

    fn arb_permutation(max_len: usize) -> impl Strategy<Value = Permutation> {
        (0..=max_len)
            .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn schensted_first_row_is_lis(sigma in arb_permutation(200)) {
            let shape = rsk_shape(&sigma);
            prop_assert_eq!(shape.parts().first().copied().unwrap_or(0), lis_patience(&sigma));
            prop_assert_eq!(shape.size(), sigma.len());
            prop_assert!(shape.parts().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn erdos_szekeres_bound(v in Just((1..=10u32).collect::<Vec<_>>()).prop_shuffle()) {
            let sigma = Permutation::new(v).unwrap();
            let inc = lis_patience(&sigma);
            let dec = lis_patience(&sigma.reversed());
            prop_assert!(inc * dec >= 10);
            prop_assert!(inc.max(dec) >= 4);
        }

        #[test]
        fn standardize_is_order_isomorphic(v in proptest::collection::hash_set(0u32..10_000, 0..30)) {
            let seq: Vec<u32> = v.into_iter().collect();
            let perm = Permutation::standardize(&seq);
            for i in 0..seq.len() {
                for j in 0..seq.len() {
                    prop_assert_eq!(seq[i] < seq[j], perm.as_slice()[i] < perm.as_slice()[j]);
                }
            }
        }
    }
}
