//! Finite groups as explicit multiplication tables.
//!
//! Elements of any concrete group type implementing [`GroupLike`] are
//! enumerated by closure and replaced by indices `0..order`. Subgroups,
//! quotients and Cayley multigraphs are then computed on the table.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::modp::FpVector;
use crate::perm::Permutation;

/// Largest group for which a full multiplication table is built.
pub const MAX_TABLE_ORDER: usize = 4000;

pub trait GroupLike: Clone + Eq + Hash {
    fn op(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;
    /// The identity of the group containing `self`.
    fn identity_like(&self) -> Self;
}

impl GroupLike for Permutation {
    fn op(&self, rhs: &Self) -> Self {
        self.compose_unchecked(rhs)
    }

    fn inv(&self) -> Self {
        self.inverse()
    }

    fn identity_like(&self) -> Self {
        Permutation::identity(self.degree())
    }
}

/// Additive group of F_p^n.
impl GroupLike for FpVector {
    fn op(&self, rhs: &Self) -> Self {
        self.add(rhs).expect("vectors of one group share n and p")
    }

    fn inv(&self) -> Self {
        self.neg()
    }

    fn identity_like(&self) -> Self {
        FpVector::zeros(self.len(), self.modulus())
    }
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
}

/// A concrete group together with its table and element index.
#[derive(Debug, Clone)]
pub struct EnumeratedGroup<E> {
    pub table: GroupTable,
    pub elements: Vec<E>,
    index: HashMap<E, usize>,
}

impl<E: GroupLike> EnumeratedGroup<E> {
    /// The subgroup generated by `gens`, enumerated by breadth-first closure.
    pub fn generated_by(gens: &[E], identity: E) -> Result<Self> {
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for s in gens {
                let h = elements[i].op(s);
                if !index.contains_key(&h) {
                    if elements.len() >= MAX_TABLE_ORDER {
                        return Err(Error::TooLarge {
                            what: "group order",
                            value: elements.len() as u128 + 1,
                            limit: MAX_TABLE_ORDER as u128,
                        });
                    }
                    index.insert(h.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(h);
                }
            }
        }
        Self::from_elements(elements)
    }

    /// Builds the table of a set of elements that is closed under the group law.
    pub fn from_elements(elements: Vec<E>) -> Result<Self> {
        let order = elements.len();
        if order == 0 {
            return Err(Error::InvalidArgument("empty group".into()));
        }
        if order > MAX_TABLE_ORDER {
            return Err(Error::TooLarge {
                what: "group order",
                value: order as u128,
                limit: MAX_TABLE_ORDER as u128,
            });
        }
        let index: HashMap<E, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        if index.len() != order {
            return Err(Error::InvalidArgument("duplicate group elements".into()));
        }
        let identity = *index
            .get(&elements[0].identity_like())
            .ok_or(Error::OutsideGroup)?;
        let mut mul = vec![0u32; order * order];
        for (a, x) in elements.iter().enumerate() {
            for (b, y) in elements.iter().enumerate() {
                mul[a * order + b] = *index.get(&x.op(y)).ok_or(Error::OutsideGroup)? as u32;
            }
        }
        let inv = elements
            .iter()
            .map(|x| {
                index
                    .get(&x.inv())
                    .map(|&i| i as u32)
                    .ok_or(Error::OutsideGroup)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            table: GroupTable {
                order,
                mul,
                inv,
                identity,
            },
            elements,
            index,
        })
    }

    pub fn index_of(&self, e: &E) -> Result<usize> {
        self.index.get(e).copied().ok_or(Error::OutsideGroup)
    }

    pub fn indices_of(&self, es: &[E]) -> Result<Vec<usize>> {
        es.iter().map(|e| self.index_of(e)).collect()
    }
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `h⁻¹ s h`.
    pub fn conjugate(&self, s: usize, h: usize) -> usize {
        self.mul(self.mul(self.inv(h), s), h)
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.order).collect()
    }

    fn check(&self, xs: &[usize]) -> Result<()> {
        if xs.iter().any(|&x| x >= self.order) {
            return Err(Error::OutsideGroup);
        }
        Ok(())
    }

    /// Sorted element list of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Result<Vec<usize>> {
        self.check(gens)?;
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        Ok((0..self.order).filter(|&i| seen[i]).collect())
    }

    pub fn generates(&self, gens: &[usize]) -> Result<bool> {
        Ok(self.closure(gens)?.len() == self.order)
    }

    /// All products s_1 ⋯ s_k with s_i ∈ `set`, deduplicated and sorted.
    pub fn power_set(&self, set: &[usize], k: usize) -> Result<Vec<usize>> {
        self.check(set)?;
        let mut current = vec![self.identity];
        for _ in 0..k {
            let mut next: Vec<usize> = current
                .iter()
                .flat_map(|&a| set.iter().map(move |&s| (a, s)))
                .map(|(a, s)| self.mul(a, s))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        Ok(current)
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> Result<bool> {
        self.check(elems)?;
        let mut member = vec![false; self.order];
        for &e in elems {
            member[e] = true;
        }
        if !member[self.identity] {
            return Ok(false);
        }
        Ok(elems
            .iter()
            .all(|&a| member[self.inv(a)] && elems.iter().all(|&b| member[self.mul(a, b)])))
    }

    pub fn is_normal(&self, elems: &[usize]) -> Result<bool> {
        if !self.is_subgroup(elems)? {
            return Ok(false);
        }
        let mut member = vec![false; self.order];
        for &e in elems {
            member[e] = true;
        }
        Ok((0..self.order).all(|g| elems.iter().all(|&n| member[self.conjugate(n, g)])))
    }

    /// Table of the subgroup on `elems` plus the embedding (subgroup index → index here).
    pub fn subgroup(&self, elems: &[usize]) -> Result<(GroupTable, Vec<usize>)> {
        if !self.is_subgroup(elems)? {
            return Err(Error::InvalidArgument("not a subgroup".into()));
        }
        let mut embed: Vec<usize> = elems.to_vec();
        embed.sort_unstable();
        embed.dedup();
        let mut local = vec![u32::MAX; self.order];
        for (i, &g) in embed.iter().enumerate() {
            local[g] = i as u32;
        }
        let m = embed.len();
        let mut mul = vec![0u32; m * m];
        for (i, &a) in embed.iter().enumerate() {
            for (j, &b) in embed.iter().enumerate() {
                mul[i * m + j] = local[self.mul(a, b)];
            }
        }
        let inv = embed.iter().map(|&a| local[self.inv(a)]).collect();
        let table = GroupTable {
            order: m,
            mul,
            inv,
            identity: local[self.identity] as usize,
        };
        Ok((table, embed))
    }

    /// Restricts `set ∩ subgroup` to local subgroup indices.
    pub fn localize(embed: &[usize], set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set
            .iter()
            .filter_map(|g| embed.binary_search(g).ok())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Quotient by a normal subgroup; returns the quotient table and the coset
    /// index of every element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(GroupTable, Vec<usize>)> {
        if !self.is_normal(normal)? {
            return Err(Error::InvalidArgument("not a normal subgroup".into()));
        }
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &n in normal {
                coset_of[self.mul(g, n)] = c;
            }
        }
        let m = reps.len();
        let mut mul = vec![0u32; m * m];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                mul[i * m + j] = coset_of[self.mul(a, b)] as u32;
            }
        }
        let inv = reps.iter().map(|&a| coset_of[self.inv(a)] as u32).collect();
        let table = GroupTable {
            order: m,
            mul,
            inv,
            identity: coset_of[self.identity],
        };
        Ok((table, coset_of))
    }
}

/// Deduplicated, sorted union of index sets.
pub fn union(sets: &[&[usize]]) -> Vec<usize> {
    let mut out: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
    out.sort_unstable();
    out.dedup();
    out
}
