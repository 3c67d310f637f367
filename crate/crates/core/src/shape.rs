//! Finite abelian p-groups `(Z/p^{n_1})^{m_1} ⊕ … ⊕ (Z/p^{n_k})^{m_k}`.
//!
//! Generators are laid out in grid order: all of block 1 (largest exponent)
//! first, then block 2, and so on. The "flat" index of a generator is its
//! position in that sequence, and every coordinate vector in this crate uses
//! the same order.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{is_prime, Modulus};

/// Default bound on the number of vectors an exhaustive enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// One homocyclic block `(Z/p^exponent)^multiplicity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub exponent: u32,
    pub multiplicity: usize,
}

/// Shape of an abelian p-group in normal form (exponents strictly decreasing).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PGroupShape {
    p: u64,
    blocks: Vec<Block>,
    // exponent of each generator, flat order
    exponents: Vec<u32>,
    block_of: Vec<usize>,
    block_start: Vec<usize>,
}

/// Position of a generator `e_{ij}` in the grid. All indices are 0-based;
/// `Display` prints them 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorId {
    pub block: usize,
    pub position: usize,
    pub flat: usize,
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e_{{{},{}}}", self.position + 1, self.block + 1)
    }
}

/// A group element as its exponent vector; coordinate `s` lies in
/// `[0, p^{n_{block(s)}})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u64>);

/// A coordinate vector with every entry read modulo `p^{n_1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LiftedElement(pub Vec<u64>);

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl LiftedElement {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl PGroupShape {
    /// Validates `p` and the `(exponent, multiplicity)` list.
    pub fn new(p: u64, raw: &[(u32, usize)]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if raw.is_empty() {
            return Err(Error::EmptyShape);
        }
        for (j, &(n, m)) in raw.iter().enumerate() {
            if n == 0 {
                return Err(Error::ZeroExponent);
            }
            if m == 0 {
                return Err(Error::ZeroMultiplicity(j + 1));
            }
            if j > 0 && raw[j - 1].0 <= n {
                return Err(Error::ExponentsNotStrictlyDecreasing(j + 1));
            }
        }
        // the largest modulus bounds every other one
        Modulus::new(p, raw[0].0)?;

        let blocks: Vec<Block> = raw
            .iter()
            .map(|&(exponent, multiplicity)| Block {
                exponent,
                multiplicity,
            })
            .collect();
        let mut exponents = Vec::new();
        let mut block_of = Vec::new();
        let mut block_start = Vec::new();
        for (j, b) in blocks.iter().enumerate() {
            block_start.push(exponents.len());
            for _ in 0..b.multiplicity {
                exponents.push(b.exponent);
                block_of.push(j);
            }
        }
        Ok(PGroupShape {
            p,
            blocks,
            exponents,
            block_of,
            block_start,
        })
    }

    /// Cyclic group `Z/p^n`.
    pub fn cyclic(p: u64, n: u32) -> Result<Self> {
        Self::new(p, &[(n, 1)])
    }

    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn raw_blocks(&self) -> Vec<(u32, usize)> {
        self.blocks
            .iter()
            .map(|b| (b.exponent, b.multiplicity))
            .collect()
    }

    /// Number of generators `m = Σ m_j`.
    #[inline]
    pub fn generator_count(&self) -> usize {
        self.exponents.len()
    }

    /// `n_1`, the largest exponent.
    #[inline]
    pub fn top_exponent(&self) -> u32 {
        self.blocks[0].exponent
    }

    /// `Z/p^{n_1}`, the ring the normalized matrix lives in.
    pub fn top_modulus(&self) -> Modulus {
        Modulus::new(self.p, self.top_exponent()).expect("validated at construction")
    }

    /// `Z/p^{n_j}` for block `j` (0-based).
    pub fn block_modulus(&self, block: usize) -> Modulus {
        Modulus::new(self.p, self.blocks[block].exponent).expect("validated at construction")
    }

    /// Exponent `n` of generator `flat`, so its order is `p^n`.
    #[inline]
    pub fn exponent_of(&self, flat: usize) -> u32 {
        self.exponents[flat]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    #[inline]
    pub fn block_of(&self, flat: usize) -> usize {
        self.block_of[flat]
    }

    /// Flat index range of block `j`.
    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start = self.block_start[block];
        start..start + self.blocks[block].multiplicity
    }

    pub fn generator_order(&self, flat: usize) -> u64 {
        self.p.pow(self.exponents[flat])
    }

    pub fn generator(&self, flat: usize) -> GeneratorId {
        let block = self.block_of[flat];
        GeneratorId {
            block,
            position: flat - self.block_start[block],
            flat,
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> + '_ {
        (0..self.generator_count()).map(|s| self.generator(s))
    }

    /// `|G| = p^{Σ n_j m_j}`, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        let total: u32 = self
            .blocks
            .iter()
            .map(|b| b.exponent * b.multiplicity as u32)
            .sum();
        (self.p as u128).checked_pow(total).unwrap_or(u128::MAX)
    }

    /// `(p^{n_1})^m`, the number of lifted coordinate vectors.
    pub fn lifted_space_size(&self) -> u128 {
        let m = self.generator_count() as u32;
        (self.top_modulus().value() as u128)
            .checked_pow(m)
            .unwrap_or(u128::MAX)
    }

    /// `Σ_s (n_1 - n_s)`: the fiber of `project` has order `p` to this power.
    pub fn fiber_exponent(&self) -> u32 {
        let top = self.top_exponent();
        self.exponents.iter().map(|&n| top - n).sum()
    }

    pub fn fiber_order(&self) -> u128 {
        (self.p as u128)
            .checked_pow(self.fiber_exponent())
            .unwrap_or(u128::MAX)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.generator_count()])
    }

    /// Whether `g` has the right length and every coordinate in range.
    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.generator_count()
            && g.0
                .iter()
                .enumerate()
                .all(|(s, &c)| c < self.generator_order(s))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .enumerate()
                .map(|(s, (&x, &y))| (x + y) % self.generator_order(s))
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .enumerate()
                .map(|(s, &x)| {
                    let q = self.generator_order(s);
                    (q - x) % q
                })
                .collect(),
        )
    }

    /// Canonical lift: the same integers, read modulo `p^{n_1}`.
    pub fn lift(&self, g: &GroupElement) -> LiftedElement {
        LiftedElement(g.0.clone())
    }

    /// Reduces coordinate `s` modulo `p^{n_{block(s)}}`.
    pub fn project(&self, l: &LiftedElement) -> GroupElement {
        GroupElement(
            l.0.iter()
                .enumerate()
                .map(|(s, &c)| c % self.generator_order(s))
                .collect(),
        )
    }

    /// Position of `g` in lexicographic enumeration order.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter()
            .enumerate()
            .fold(0usize, |acc, (s, &c)| {
                acc * self.generator_order(s) as usize + c as usize
            })
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let m = self.generator_count();
        let mut coords = vec![0; m];
        for s in (0..m).rev() {
            let q = self.generator_order(s) as usize;
            coords[s] = (index % q) as u64;
            index /= q;
        }
        GroupElement(coords)
    }

    /// Every element once, lexicographically, starting from the identity.
    pub fn enumerate(&self, cap: u64) -> Result<Elements<'_>> {
        let size = self.order();
        if size > cap as u128 {
            return Err(Error::TooLargeToEnumerate { size, cap });
        }
        Ok(Elements {
            shape: self,
            next: Some(self.identity()),
        })
    }

    /// Subgroup generated by `gens`, sorted in enumeration order.
    pub fn span(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let id = self.identity();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        // BTreeSet order on Vec<u64> is lexicographic, i.e. enumeration order
        seen.into_iter().collect()
    }
}

impl fmt::Display for PGroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, b) in self.blocks.iter().enumerate() {
            if j > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "(Z/{}^{})^{}", self.p, b.exponent, b.multiplicity)?;
        }
        Ok(())
    }
}

/// Lexicographic iterator over a group's elements (last coordinate fastest).
pub struct Elements<'a> {
    shape: &'a PGroupShape,
    next: Option<GroupElement>,
}

impl Iterator for Elements<'_> {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut s = succ.0.len();
        loop {
            if s == 0 {
                // wrapped around
                break;
            }
            s -= 1;
            succ.0[s] += 1;
            if succ.0[s] < self.shape.generator_order(s) {
                self.next = Some(succ);
                break;
            }
            succ.0[s] = 0;
        }
        Some(current)
    }
}

/// All shapes for prime `p` with `Σ n_j m_j <= max_weight` and `n_1 <= max_exponent`.
///
/// These are the partitions of `1..=max_weight` into parts of size at most
/// `max_exponent`, listed by weight and then in reverse lexicographic order.
pub fn shapes_up_to(p: u64, max_weight: u32, max_exponent: u32) -> Result<Vec<PGroupShape>> {
    fn partitions(rest: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            prefix.push(part);
            partitions(rest - part, part, prefix, out);
            prefix.pop();
        }
    }

    let mut shapes = Vec::new();
    for weight in 1..=max_weight {
        let mut parts = Vec::new();
        partitions(weight, max_exponent, &mut Vec::new(), &mut parts);
        for parts in parts {
            let mut raw: Vec<(u32, usize)> = Vec::new();
            for n in parts {
                match raw.last_mut() {
                    Some((e, m)) if *e == n => *m += 1,
                    _ => raw.push((n, 1)),
                }
            }
            shapes.push(PGroupShape::new(p, &raw)?);
        }
    }
    Ok(shapes)
}
