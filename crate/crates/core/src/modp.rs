//! Arithmetic in F_p, vectors of V = F_p^n and the sum-zero module V_0, and the
//! additive characters e_p(x) = exp(2πi x / p).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible modulus.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A residue modulo a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u64,
    p: u64,
}

impl FpScalar {
    /// Reduces `value` modulo `p`.
    pub fn new(value: u64, p: u64) -> Self {
        Self {
            value: value % p,
            p,
        }
    }

    pub fn from_signed(value: i64, p: u64) -> Self {
        Self {
            value: value.rem_euclid(p as i64) as u64,
            p,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

/// The prime field F_p together with its table of p-th roots of unity.
///
/// Cloning is cheap: the character table is shared.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u64,
    roots: Arc<[Complex64]>,
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let step = std::f64::consts::TAU / p as f64;
        let roots = (0..p)
            .map(|k| Complex64::from_polar(1.0, step * k as f64))
            .collect::<Vec<_>>();
        Ok(Self {
            p,
            roots: roots.into(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// e_p(x) for an arbitrary (unreduced) integer x.
    #[inline]
    pub fn ep(&self, x: u64) -> Complex64 {
        self.roots[(x % self.p) as usize]
    }

    /// e_p(x) for a scalar of this field.
    pub fn ep_eval(&self, x: FpScalar) -> Complex64 {
        debug_assert_eq!(x.p, self.p);
        self.roots[x.value as usize]
    }

    pub fn scalar(&self, value: u64) -> FpScalar {
        FpScalar::new(value, self.p)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Uniform sample from V_0: n−1 free coordinates, the last one closing the sum.
    pub fn sample_v0<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<FpVector> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "sample_v0 needs n >= 2, got {n}"
            )));
        }
        let p = self.p;
        let mut entries = Vec::with_capacity(n);
        let mut sum = 0u64;
        for _ in 0..n - 1 {
            let x = rng.random_range(0..p);
            sum = (sum + x) % p;
            entries.push(x);
        }
        entries.push((p - sum) % p);
        Ok(FpVector { entries, p })
    }
}

/// An element of V = F_p^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVector {
    entries: Vec<u64>,
    p: u64,
}

impl FpVector {
    /// Builds a vector, reducing every entry modulo `p`.
    pub fn new(entries: Vec<u64>, p: u64) -> Self {
        let entries = entries.into_iter().map(|x| x % p).collect();
        Self { entries, p }
    }

    pub fn from_signed(entries: &[i64], p: u64) -> Self {
        let entries = entries
            .iter()
            .map(|&x| x.rem_euclid(p as i64) as u64)
            .collect();
        Self { entries, p }
    }

    pub fn zeros(n: usize, p: u64) -> Self {
        Self {
            entries: vec![0; n],
            p,
        }
    }

    pub fn constant(n: usize, c: u64, p: u64) -> Self {
        Self {
            entries: vec![c % p; n],
            p,
        }
    }

    /// The vector (u, 0, …, 0).
    pub fn support_one(n: usize, u: u64, p: u64) -> Self {
        let mut v = Self::zeros(n, p);
        if n > 0 {
            v.entries[0] = u % p;
        }
        v
    }

    pub(crate) fn from_reduced(entries: Vec<u64>, p: u64) -> Self {
        debug_assert!(entries.iter().all(|&x| x < p));
        Self { entries, p }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().fold(0, |acc, &x| (acc + x) % self.p)
    }

    /// Membership in V_0 = 𝟏^⊥.
    pub fn is_deleted_module(&self) -> bool {
        self.sum() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] == w[1])
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p,
                right: other.p,
            });
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// ⟨v, w⟩ = Σ v_i w_i mod p.
    pub fn dot(&self, other: &Self) -> Result<FpScalar> {
        self.check_compatible(other)?;
        Ok(FpScalar {
            value: dot_raw(&self.entries, &other.entries, self.p),
            p: self.p,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let p = self.p;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(Self { entries, p })
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        Self {
            entries: self.entries.iter().map(|&x| (p - x) % p).collect(),
            p,
        }
    }

    /// Representatives in (−p/2, p/2].
    pub fn centered(&self) -> Vec<i64> {
        self.entries
            .iter()
            .map(|&x| centered_rep(x, self.p))
            .collect()
    }

    /// Σ |ṽ_i| over the centered representatives.
    pub fn centered_l1(&self) -> u64 {
        self.centered().iter().map(|x| x.unsigned_abs()).sum()
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ") mod {}", self.p)
    }
}

/// Representative of `x mod p` in (−p/2, p/2].
pub fn centered_rep(x: u64, p: u64) -> i64 {
    let x = x % p;
    if 2 * x <= p {
        x as i64
    } else {
        x as i64 - p as i64
    }
}

/// Incremental row echelon form over F_p, for span and rank computations.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(p: u64) -> Self {
        Self {
            p,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn inv(&self, a: u64) -> u64 {
        // Fermat: a^(p-2)
        let p = self.p as u128;
        let (mut base, mut exp, mut acc) = (a as u128 % p, self.p - 2, 1u128);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u64
    }

    /// Reduces `row` against the current basis; returns it if nonzero.
    pub fn reduce(&self, row: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut r: Vec<u64> = row.iter().map(|&x| x % p).collect();
        for (pivot, basis) in &self.rows {
            let c = r[*pivot];
            if c != 0 {
                for (x, &b) in r.iter_mut().zip(basis) {
                    *x = (*x + p - ((c as u128 * b as u128) % p as u128) as u64) % p;
                }
            }
        }
        r.iter().any(|&x| x != 0).then_some(r)
    }

    /// Adds `row` to the span; returns true if the rank grew.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let Some(mut r) = self.reduce(row) else {
            return false;
        };
        let p = self.p;
        let pivot = r.iter().position(|&x| x != 0).expect("nonzero row");
        let scale = self.inv(r[pivot]);
        for x in r.iter_mut() {
            *x = ((*x as u128 * scale as u128) % p as u128) as u64;
        }
        // keep the basis fully reduced so `reduce` is a single pass
        for (_, basis) in self.rows.iter_mut() {
            let c = basis[pivot];
            if c != 0 {
                for (x, &b) in basis.iter_mut().zip(&r) {
                    *x = (*x + p - ((c as u128 * b as u128) % p as u128) as u64) % p;
                }
            }
        }
        self.rows.push((pivot, r));
        true
    }
}

#[inline]
pub(crate) fn dot_raw(a: &[u64], b: &[u64], p: u64) -> u64 {
    // entries < 2^31, so each product fits in u64; reduce the running sum in u128
    let mut acc: u128 = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc += (x * y) as u128;
    }
    (acc % p as u128) as u64
}
