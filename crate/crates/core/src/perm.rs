//! The symmetric group S_n on 0-based coordinates.
//!
//! Action convention: `(w^σ)_i = w_{σ(i)}`. With `compose(a, b) = a ∘ b`
//! (i ↦ a(b(i))) this is a right action: `w^{a∘b} = (w^a)^b`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::{Echelon, FpVector};

/// Guard on n for anything that enumerates S_n or a full orbit.
pub const MAX_ENUMERATION_DEGREE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation(n));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::NotAPermutation(n));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Ok(Self { images })
    }

    /// The n-cycle 0 → 1 → … → n−1 → 0.
    pub fn long_cycle(n: usize) -> Self {
        Self {
            images: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::NotAPermutation(n));
                }
                touched[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    fn check_degree(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(())
    }

    /// `self ∘ other`: i ↦ self(other(i)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Self { images }
    }

    /// `w^σ` with `(w^σ)_i = w_{σ(i)}`.
    pub fn act(&self, w: &FpVector) -> Result<FpVector> {
        if w.len() != self.degree() {
            return Err(Error::DimensionMismatch {
                left: w.len(),
                right: self.degree(),
            });
        }
        Ok(self.act_unchecked(w))
    }

    pub(crate) fn act_unchecked(&self, w: &FpVector) -> FpVector {
        let e = w.entries();
        FpVector::from_reduced(self.images.iter().map(|&j| e[j]).collect(), w.modulus())
    }

    /// Lehmer-code rank in 0..n!.
    pub fn rank(&self) -> u64 {
        let n = self.degree();
        let mut rank = 0u64;
        let mut used = vec![false; n];
        for (i, &x) in self.images.iter().enumerate() {
            let smaller = (0..x).filter(|&y| !used[y]).count() as u64;
            rank = rank * (n - i) as u64 + smaller;
            used[x] = true;
        }
        rank
    }

    pub fn unrank(n: usize, mut rank: u64) -> Self {
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            let base = (n - i) as u64;
            digits[i] = (rank % base) as usize;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Self { images }
    }

    /// Disjoint cycles of length ≥ 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            images.swap(i, j);
        }
        Self { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Parses cycle notation such as `(0 1)(2 3)` or `()`; the degree must be
/// supplied separately, so this parses into a list of cycles.
pub fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let bad = || Error::InvalidArgument(format!("malformed cycle notation: {s:?}"));
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = inner.find(')').ok_or_else(bad)?;
        let body = &inner[..close];
        let cycle = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        if cycle.len() >= 2 {
            cycles.push(cycle);
        }
        rest = inner[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// A permutation in cycle notation together with its degree, e.g. `4:(0 1)(2 3)`.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (deg, cycles) = s.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!("expected <degree>:<cycles>, got {s:?}"))
        })?;
        let n = deg
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("bad degree in {s:?}")))?;
        Self::from_cycles(n, &parse_cycles(cycles)?)
    }
}

/// {(0 1), (0 1 … n−1)}.
pub fn standard_generators(n: usize) -> Result<Vec<Permutation>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "standard generators need n >= 2, got {n}"
        )));
    }
    Ok(vec![
        Permutation::transposition(n, 0, 1)?,
        Permutation::long_cycle(n),
    ])
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of distinct rearrangements of `entries`: n! / Π m_k!.
pub fn multinomial_count(entries: &[u64]) -> u128 {
    let mut sorted = entries.to_vec();
    sorted.sort_unstable();
    let mut count = factorial(sorted.len());
    for run in sorted.chunk_by(|a, b| a == b) {
        count /= factorial(run.len());
    }
    count
}

/// Lexicographic next permutation in place; returns false after the last one.
pub fn next_permutation<T: Ord>(xs: &mut [T]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Calls `f` on every distinct rearrangement of `entries`, in lexicographic order.
pub fn for_each_rearrangement(entries: &[u64], mut f: impl FnMut(&[u64])) {
    let mut buf = entries.to_vec();
    buf.sort_unstable();
    loop {
        f(&buf);
        if !next_permutation(&mut buf) {
            break;
        }
    }
}

/// The orbit v^{S_n}: all distinct rearrangements of v.
pub fn orbit(v: &FpVector) -> Result<Vec<FpVector>> {
    if v.len() > MAX_ENUMERATION_DEGREE {
        return Err(Error::TooLarge {
            what: "orbit degree n",
            value: v.len() as u128,
            limit: MAX_ENUMERATION_DEGREE as u128,
        });
    }
    let mut out = Vec::with_capacity(multinomial_count(v.entries()) as usize);
    for_each_rearrangement(v.entries(), |r| {
        out.push(FpVector::from_reduced(r.to_vec(), v.modulus()))
    });
    Ok(out)
}

/// Dimension of the F_p-span of the orbit v^{S_n}.
///
/// The span is the S_n-submodule generated by v, so it is computed by closing
/// {v} under the two standard generators instead of enumerating the orbit.
pub fn orbit_span_rank(v: &FpVector) -> usize {
    let n = v.len();
    let mut basis = Echelon::new(v.modulus());
    if !basis.insert(v.entries()) {
        return 0;
    }
    if n < 2 {
        return 1;
    }
    let gens = standard_generators(n).expect("n >= 2");
    let mut pending = vec![v.clone()];
    while let Some(x) = pending.pop() {
        for g in &gens {
            let y = g.act_unchecked(&x);
            if basis.insert(y.entries()) {
                pending.push(y);
            }
        }
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashSet, VecDeque};

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    /// Subgroup closure by breadth-first search over right multiplication.
    fn closure_order(gens: &[Permutation]) -> usize {
        let n = gens[0].degree();
        let id = Permutation::identity(n);
        let mut seen = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in gens {
                let h = g.compose(s).unwrap();
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn rejects_non_bijections() {
        assert_eq!(Permutation::new(vec![0, 0]), Err(Error::NotAPermutation(2)));
        assert_eq!(Permutation::new(vec![0, 2]), Err(Error::NotAPermutation(2)));
    }

    #[test]
    fn compose_examples() {
        let id = Permutation::identity(3);
        let b = perm(&[1, 2, 0]);
        assert_eq!(id.compose(&b).unwrap(), b);
        assert_eq!(b.compose(&b.inverse()).unwrap(), id);

        // (0 1)∘(0 1 2) by table: 0 ↦ 1 ↦ 0, 1 ↦ 2 ↦ 2, 2 ↦ 0 ↦ 1
        let a = perm(&[1, 0, 2]);
        let table: Vec<usize> = (0..3).map(|i| a.images()[b.images()[i]]).collect();
        assert_eq!(table, vec![0, 2, 1]);
        assert_eq!(a.compose(&b).unwrap(), perm(&[0, 2, 1]));

        assert!(a.compose(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn act_examples() {
        let w = FpVector::new(vec![5, 7, 9], 11);
        assert_eq!(Permutation::identity(3).act(&w).unwrap(), w);
        let swap = Permutation::transposition(3, 0, 1).unwrap();
        assert_eq!(swap.act(&w).unwrap(), FpVector::new(vec![7, 5, 9], 11));
        assert!(swap.act(&FpVector::zeros(2, 11)).is_err());
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit(&FpVector::constant(4, 3, 5)).unwrap().len(), 1);

        let v = FpVector::from_signed(&[1, -1, 0], 5);
        let o = orbit(&v).unwrap();
        assert_eq!(o.len(), 6);
        // brute force over all of S_3
        let brute: HashSet<FpVector> = (0..6)
            .map(|r| Permutation::unrank(3, r).act(&v).unwrap())
            .collect();
        assert_eq!(o.iter().cloned().collect::<HashSet<_>>(), brute);

        assert_eq!(orbit(&FpVector::new(vec![1, 1, 3], 5)).unwrap().len(), 3);
        assert!(orbit(&FpVector::zeros(11, 5)).is_err());
    }

    #[test]
    fn standard_generator_examples() {
        let g2 = standard_generators(2).unwrap();
        assert_eq!(g2[0], g2[1]);
        let g3 = standard_generators(3).unwrap();
        assert_eq!(g3, vec![perm(&[1, 0, 2]), perm(&[1, 2, 0])]);
        assert!(standard_generators(1).is_err());
        for n in 2..=6 {
            assert_eq!(
                closure_order(&standard_generators(n).unwrap()) as u128,
                factorial(n)
            );
        }
    }

    #[test]
    fn random_perm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(Permutation::random(1, &mut rng).is_identity());

        let a: Vec<_> = {
            let mut r = ChaCha8Rng::seed_from_u64(99);
            (0..5).map(|_| Permutation::random(8, &mut r)).collect()
        };
        let b: Vec<_> = {
            let mut r = ChaCha8Rng::seed_from_u64(99);
            (0..5).map(|_| Permutation::random(8, &mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn random_perm_is_uniform_on_s3() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 60_000;
        let mut counts = [0usize; 6];
        for _ in 0..draws {
            counts[Permutation::random(3, &mut rng).rank() as usize] += 1;
        }
        let expected = draws as f64 / 6.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9% quantile of chi-square(5)
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn rank_round_trip_is_a_bijection() {
        let ranks: HashSet<u64> = (0..24)
            .inspect(|&r| {
                let p = Permutation::unrank(4, r);
                assert_eq!(p.rank(), r);
            })
            .collect();
        assert_eq!(ranks.len(), 24);
        assert_eq!(Permutation::identity(5).rank(), 0);
    }

    #[test]
    fn cycle_notation() {
        let p: Permutation = "4:(0 1)(2 3)".parse().unwrap();
        assert_eq!(p.images(), &[1, 0, 3, 2]);
        assert_eq!(p.to_string(), "(0 1)(2 3)");
        let c: Permutation = "3:(0 1 2)".parse().unwrap();
        assert_eq!(c, Permutation::long_cycle(3));
        let id: Permutation = "3:()".parse().unwrap();
        assert!(id.is_identity());
        assert_eq!(id.to_string(), "()");
        assert!("3:(0 3)".parse::<Permutation>().is_err());
        assert!("3:(0 1)(1 2)".parse::<Permutation>().is_err());
        assert!("(0 1)".parse::<Permutation>().is_err());
    }

    #[test]
    fn next_permutation_counts_multisets() {
        let mut xs = [1u64, 1, 2, 3, 3];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 30);
        assert_eq!(multinomial_count(&[1, 1, 2, 3, 3]), 30);
    }

    #[test]
    fn orbit_span_rank_matches_full_orbit() {
        for (n, p) in [(2u64, 3u64), (3, 2), (3, 3), (4, 2), (4, 3), (5, 5)] {
            let n = n as usize;
            for k in 0..p.pow(n as u32) {
                let mut e = vec![0; n];
                let mut kk = k;
                for slot in e.iter_mut() {
                    *slot = kk % p;
                    kk /= p;
                }
                let v = FpVector::new(e, p);
                let mut full = Echelon::new(p);
                for x in orbit(&v).unwrap() {
                    full.insert(x.entries());
                }
                assert_eq!(orbit_span_rank(&v), full.rank(), "v = {v}");
            }
        }
        let big = FpVector::from_signed(
            &[1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            61,
        );
        assert_eq!(orbit_span_rank(&big), 19);
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn act_is_a_right_action(
            (a, b, w) in (1usize..8).prop_flat_map(|n| (
                arb_perm(n),
                arb_perm(n),
                proptest::collection::vec(0u64..13, n),
            ))
        ) {
            let w = FpVector::new(w, 13);
            let lhs = a.compose(&b).unwrap().act(&w).unwrap();
            let rhs = b.act(&a.act(&w).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dot_is_compatible_with_the_action(
            (s, x, w) in (1usize..8).prop_flat_map(|n| (
                arb_perm(n),
                proptest::collection::vec(0u64..13, n),
                proptest::collection::vec(0u64..13, n),
            ))
        ) {
            let x = FpVector::new(x, 13);
            let w = FpVector::new(w, 13);
            let lhs = x.dot(&s.act(&w).unwrap()).unwrap();
            let rhs = s.inverse().act(&x).unwrap().dot(&w).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn orbit_is_closed_and_has_multinomial_size(
            (s, v) in (1usize..7).prop_flat_map(|n| (
                arb_perm(n),
                proptest::collection::vec(0u64..3, n),
            ))
        ) {
            let v = FpVector::new(v, 5);
            let o = orbit(&v).unwrap();
            let set: HashSet<FpVector> = o.iter().cloned().collect();
            prop_assert_eq!(set.len(), o.len());
            for x in &o {
                prop_assert!(set.contains(&s.act(x).unwrap()));
            }
            let mut sorted = v.entries().to_vec();
            sorted.sort_unstable();
            let stab: u128 = sorted.chunk_by(|a, b| a == b).map(|r| factorial(r.len())).product();
            prop_assert_eq!(o.len() as u128 * stab, factorial(v.len()));
        }
    }
}
