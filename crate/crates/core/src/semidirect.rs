//! The group G = V_0 ⋊ S_n, its generating sets X and Y, and Cayley-graph
//! diameters.
//!
//! Multiplication: `(u, σ)(w, τ) = (u + w^{σ⁻¹}, σ∘τ)`, where `w^s` is the
//! right action of [`Permutation::act`]. `σ · w = w^{σ⁻¹}` is then a left
//! action, which is what makes this product associative.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::SwitchCertificate;
use crate::finite_group::GroupLike;
use crate::modp::{centered_rep, FpVector};
use crate::perm::{factorial, orbit_span_rank, standard_generators, Permutation};

/// Default cap on the number of group elements visited by BFS.
pub const DEFAULT_ORDER_CAP: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub vec: FpVector,
    pub perm: Permutation,
}

impl GroupElement {
    pub fn new(vec: FpVector, perm: Permutation) -> Result<Self> {
        if vec.len() != perm.degree() {
            return Err(Error::DimensionMismatch {
                left: vec.len(),
                right: perm.degree(),
            });
        }
        if !vec.is_deleted_module() {
            return Err(Error::NotInDeletedModule);
        }
        Ok(Self { vec, perm })
    }

    pub fn identity(n: usize, p: u64) -> Self {
        Self {
            vec: FpVector::zeros(n, p),
            perm: Permutation::identity(n),
        }
    }

    /// `(v | id)`.
    pub fn translation(vec: FpVector) -> Result<Self> {
        let n = vec.len();
        Self::new(vec, Permutation::identity(n))
    }

    /// `(0 | σ)`.
    pub fn permutation(perm: Permutation, p: u64) -> Self {
        Self {
            vec: FpVector::zeros(perm.degree(), p),
            perm,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.vec.check_compatible(&other.vec)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let moved = self.perm.inverse().act_unchecked(&other.vec);
        Self {
            vec: self.vec.add(&moved).expect("compatible"),
            perm: self.perm.compose_unchecked(&other.perm),
        }
    }

    /// `(u, σ)⁻¹ = (−u^σ, σ⁻¹)`.
    pub fn inverse(&self) -> Self {
        Self {
            vec: self.perm.act_unchecked(&self.vec).neg(),
            perm: self.perm.inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vec.is_zero() && self.perm.is_identity()
    }
}

impl GroupLike for GroupElement {
    fn op(&self, rhs: &Self) -> Self {
        self.mul_unchecked(rhs)
    }

    fn inv(&self) -> Self {
        self.inverse()
    }

    fn identity_like(&self) -> Self {
        Self::identity(self.vec.len(), self.vec.modulus())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.vec, self.perm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorLabel {
    X,
    Y,
    Custom,
}

/// A generating set `{(v | id) : v ∈ vectors} ∪ {(0 | t) : t ∈ perms}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingSet {
    pub n: usize,
    pub p: u64,
    pub vectors: Vec<FpVector>,
    pub perms: Vec<Permutation>,
    pub label: GeneratorLabel,
}

impl GeneratingSet {
    pub fn new(
        n: usize,
        p: u64,
        vectors: Vec<FpVector>,
        perms: Vec<Permutation>,
        label: GeneratorLabel,
    ) -> Result<Self> {
        for v in &vectors {
            if v.len() != n || v.modulus() != p {
                return Err(Error::DimensionMismatch {
                    left: v.len(),
                    right: n,
                });
            }
            if !v.is_deleted_module() {
                return Err(Error::NotInDeletedModule);
            }
        }
        if perms.iter().any(|t| t.degree() != n) {
            return Err(Error::NotAPermutation(n));
        }
        Ok(Self {
            n,
            p,
            vectors,
            perms,
            label,
        })
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.vectors
            .iter()
            .map(|v| GroupElement {
                vec: v.clone(),
                perm: Permutation::identity(self.n),
            })
            .chain(
                self.perms
                    .iter()
                    .map(|t| GroupElement::permutation(t.clone(), self.p)),
            )
            .collect()
    }

    pub fn len(&self) -> usize {
        self.vectors.len() + self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// |G| = p^{n−1} · n!, or `None` on overflow.
    pub fn group_order(&self) -> Option<u128> {
        (self.p as u128)
            .checked_pow(self.n as u32 - 1)?
            .checked_mul(factorial(self.n))
    }
}

/// Y = {(1, −1, 0, …, 0)} ∪ {(0 1), (0 1 … n−1)}.
pub fn build_y(n: usize, p: u64) -> Result<GeneratingSet> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let mut entries = vec![0i64; n];
    entries[0] = 1;
    entries[1] = -1;
    GeneratingSet::new(
        n,
        p,
        vec![FpVector::from_signed(&entries, p)],
        standard_generators(n)?,
        GeneratorLabel::Y,
    )
}

/// X = {v} ∪ T with v taken from a switching certificate.
pub fn build_x(
    n: usize,
    p: u64,
    cert: &SwitchCertificate,
    perms: Vec<Permutation>,
) -> Result<GeneratingSet> {
    let v = &cert.v;
    if v.len() != n || v.modulus() != p {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: n,
        });
    }
    if !v.is_deleted_module() {
        return Err(Error::NotInDeletedModule);
    }
    if orbit_span_rank(v) != n - 1 {
        return Err(Error::NotSpanning);
    }
    GeneratingSet::new(n, p, vec![v.clone()], perms, GeneratorLabel::X)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsReport {
    /// Exact diameter, or the depth of the last completed layer when truncated.
    pub diameter: u64,
    /// Number of elements in completed layers (|⟨gen⟩| when not truncated).
    pub order: u64,
    /// Sizes of BFS layers from the identity; index = distance.
    pub layer_sizes: Vec<u64>,
    pub truncated: bool,
}

trait Visited {
    fn insert(&mut self, g: &GroupElement) -> bool;
}

/// Perfect indexing of G: base-p digits of u_0 … u_{n−2}, times n!, plus the
/// Lehmer rank of σ. The last coordinate is determined by the sum-zero constraint.
struct DenseVisited {
    seen: Vec<bool>,
    n_fact: u64,
}

impl Visited for DenseVisited {
    fn insert(&mut self, g: &GroupElement) -> bool {
        let p = g.vec.modulus();
        let e = g.vec.entries();
        let vec_rank = e[..e.len() - 1]
            .iter()
            .rev()
            .fold(0u64, |acc, &x| acc * p + x);
        let idx = (vec_rank * self.n_fact + g.perm.rank()) as usize;
        !std::mem::replace(&mut self.seen[idx], true)
    }
}

struct HashedVisited(HashSet<GroupElement>);

impl Visited for HashedVisited {
    fn insert(&mut self, g: &GroupElement) -> bool {
        self.0.insert(g.clone())
    }
}

/// Breadth-first search from the identity of Cay(G, gen ∪ gen⁻¹). Cayley
/// graphs are vertex-transitive, so the eccentricity of the identity is the
/// diameter.
pub fn bfs_diameter(gen: &GeneratingSet, order_cap: u64) -> Result<BfsReport> {
    if gen.is_empty() {
        return Err(Error::InvalidArgument("empty generating set".into()));
    }
    let fits = gen
        .group_order()
        .filter(|&o| o <= order_cap as u128 && o <= usize::MAX as u128);
    match fits {
        Some(order) => bfs(
            gen,
            DenseVisited {
                seen: vec![false; order as usize],
                n_fact: factorial(gen.n) as u64,
            },
            order_cap,
        ),
        None => bfs(gen, HashedVisited(HashSet::new()), order_cap),
    }
}

fn bfs(gen: &GeneratingSet, mut visited: impl Visited, order_cap: u64) -> Result<BfsReport> {
    let mut steps = gen.elements();
    let inverses: Vec<GroupElement> = steps.iter().map(GroupElement::inverse).collect();
    steps.extend(inverses);

    let identity = GroupElement::identity(gen.n, gen.p);
    visited.insert(&identity);
    let mut frontier = vec![identity];
    let mut layer_sizes = vec![1u64];
    let mut reached = 1u64;
    let mut truncated = false;

    'layers: loop {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &steps {
                let h = g.mul_unchecked(s);
                if visited.insert(&h) {
                    if reached + next.len() as u64 + 1 > order_cap {
                        truncated = true;
                        break 'layers;
                    }
                    next.push(h);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        reached += next.len() as u64;
        layer_sizes.push(next.len() as u64);
        frontier = next;
    }
    Ok(BfsReport {
        diameter: layer_sizes.len() as u64 - 1,
        order: reached,
        layer_sizes,
        truncated,
    })
}

/// Lower bound ⌊max_{u ∈ V_0} ‖u‖_{ℓ1,centered} / 2⌋ on diam Cay(G, Y).
///
/// Right multiplication by (v | id)^{±1} with v = (1, −1, 0, …) moves two
/// coordinates of the vector part by ±1, changing the centered ℓ1 norm by at
/// most 2; the permutation generators leave the vector part unchanged. The
/// maximum is found by dynamic programming over the residue of the partial sum.
pub fn l1_lower_bound(n: usize, p: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let work = (n as u128) * (p as u128) * (p as u128);
    if work > 4_000_000_000 {
        return Err(Error::TooLarge {
            what: "n·p² for the ℓ1 bound",
            value: work,
            limit: 4_000_000_000,
        });
    }
    let p_us = p as usize;
    let weights: Vec<u64> = (0..p).map(|x| centered_rep(x, p).unsigned_abs()).collect();
    let mut best: Vec<Option<u64>> = vec![None; p_us];
    best[0] = Some(0);
    for _ in 0..n {
        let mut next: Vec<Option<u64>> = vec![None; p_us];
        for (r, b) in best.iter().enumerate() {
            let Some(b) = *b else { continue };
            for (x, &w) in weights.iter().enumerate() {
                let slot = &mut next[(r + x) % p_us];
                *slot = Some(slot.map_or(b + w, |c| c.max(b + w)));
            }
        }
        best = next;
    }
    Ok(best[0].expect("zero vector is always reachable") / 2)
}
