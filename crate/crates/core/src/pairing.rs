//! The commutator pairing of a twisted group algebra in exponent form.
//!
//! For generators `e_u`, `e_v` of orders `p^{n_u}`, `p^{n_v}` the commutator
//! `f(e_u, e_v)` is a root of unity of order dividing `p^{min(n_u, n_v)}`. A
//! [`PairingMatrix`] stores its discrete logarithm with respect to a fixed
//! primitive root of that order. A [`NormalizedMatrix`] rescales every entry
//! so that all of them are exponents of one primitive `p^{n_1}`-th root, which
//! turns the centrality condition into a linear system over `Z/p^{n_1}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::ModMatrix;
use crate::ring::{Modulus, Residue};
use crate::shape::{GeneratorId, LiftedElement, PGroupShape};

/// Antisymmetric, zero-diagonal matrix of commutator exponents.
///
/// Entry `(u, v)` is canonical modulo `p^{min(n_u, n_v)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairingMatrix {
    shape: PGroupShape,
    entries: Vec<Residue>,
}

impl PairingMatrix {
    /// Canonicalizes `raw` and checks the zero diagonal and antisymmetry.
    pub fn new(shape: PGroupShape, raw: &[Vec<i64>]) -> Result<Self> {
        let m = shape.generator_count();
        if raw.len() != m {
            return Err(Error::WrongDimensions {
                expected: m,
                found: format!("{} rows", raw.len()),
            });
        }
        if let Some((i, row)) = raw.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::WrongDimensions {
                expected: m,
                found: format!("row {} with {} entries", i + 1, row.len()),
            });
        }
        let mut entries = Vec::with_capacity(m * m);
        for (u, row) in raw.iter().enumerate() {
            for (v, &x) in row.iter().enumerate() {
                entries.push(entry_modulus(&shape, u, v).residue_signed(x));
            }
        }
        let a = PairingMatrix { shape, entries };
        a.check()?;
        Ok(a)
    }

    fn check(&self) -> Result<()> {
        let m = self.size();
        for u in 0..m {
            if !self.entry(u, u).is_zero() {
                return Err(Error::NonzeroDiagonal(u + 1));
            }
            for v in u + 1..m {
                if self.entry(u, v) != -self.entry(v, u) {
                    return Err(Error::NotAntisymmetric(u + 1, v + 1));
                }
            }
        }
        Ok(())
    }

    /// The trivial pairing (every generator commutes with every other).
    pub fn zero(shape: PGroupShape) -> Self {
        let m = shape.generator_count();
        let entries = (0..m * m)
            .map(|k| entry_modulus(&shape, k / m, k % m).residue(0))
            .collect();
        PairingMatrix { shape, entries }
    }

    /// Uniformly random valid pairing: upper triangle drawn freely, lower
    /// triangle forced by antisymmetry.
    pub fn random<R: Rng + ?Sized>(shape: PGroupShape, rng: &mut R) -> Self {
        let m = shape.generator_count();
        let mut a = Self::zero(shape);
        for u in 0..m {
            for v in u + 1..m {
                let md = entry_modulus(&a.shape, u, v);
                let x = md.residue(rng.gen_range(0..md.value()));
                a.entries[u * m + v] = x;
                a.entries[v * m + u] = -x;
            }
        }
        a
    }

    pub fn shape(&self) -> &PGroupShape {
        &self.shape
    }

    /// Number of generators `m`.
    pub fn size(&self) -> usize {
        self.shape.generator_count()
    }

    pub fn entry(&self, u: usize, v: usize) -> Residue {
        self.entries[u * self.size() + v]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        let m = self.size();
        (0..m)
            .map(|u| (0..m).map(|v| self.entry(u, v).value()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Residue::is_zero)
    }

    /// Diagonal block `A_{jj}` as a matrix over `Z/p^{n_j}`.
    pub fn diagonal_block(&self, block: usize) -> ModMatrix {
        let range = self.shape.block_range(block);
        let md = self.shape.block_modulus(block);
        let start = range.start;
        ModMatrix::from_fn(md, range.len(), range.len(), |i, j| {
            self.entry(start + i, start + j).value()
        })
    }

    /// Scales block `(i, j)` by `p^{n_1 - min(n_i, n_j)}` into `Z/p^{n_1}`.
    pub fn normalize(&self) -> NormalizedMatrix {
        let top = self.shape.top_modulus();
        let m = self.size();
        let matrix = ModMatrix::from_fn(top, m, m, |u, v| {
            self.entry(u, v).value() * scale_factor(&self.shape, u, v)
        });
        NormalizedMatrix {
            shape: self.shape.clone(),
            matrix,
        }
    }
}

/// `p^{min(n_u, n_v)}`, the order of the root of unity `f(e_u, e_v)` lives in.
pub fn entry_modulus(shape: &PGroupShape, u: usize, v: usize) -> Modulus {
    let n = shape.exponent_of(u).min(shape.exponent_of(v));
    Modulus::new(shape.prime(), n).expect("exponent bounded by a valid shape")
}

/// `p^{n_1 - min(n_u, n_v)}`.
pub fn scale_factor(shape: &PGroupShape, u: usize, v: usize) -> u64 {
    let n = shape.exponent_of(u).min(shape.exponent_of(v));
    shape.prime().pow(shape.top_exponent() - n)
}

/// The pairing matrix rescaled to a single matrix over `Z/p^{n_1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalizedMatrix {
    shape: PGroupShape,
    matrix: ModMatrix,
}

impl NormalizedMatrix {
    pub fn shape(&self) -> &PGroupShape {
        &self.shape
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.matrix.to_rows()
    }

    /// Exponent of `ζ` (a primitive `p^{n_1}`-th root) in `f(h, g)`, i.e. row
    /// `h` of the matrix dotted with `g`. Zero means the generator `t_h`
    /// commutes with the monomial `t^g`.
    pub fn commutation_phase(&self, h: GeneratorId, g: &LiftedElement) -> Residue {
        let md = self.matrix.modulus();
        let x = self.matrix.row(h.flat).iter().zip(&g.0).fold(0, |acc, (&a, &c)| {
            md.add(acc, md.mul(a, md.reduce(c)))
        });
        md.residue(x)
    }

    /// Whether `g` commutes with every generator.
    pub fn is_central(&self, g: &LiftedElement) -> bool {
        self.shape
            .generators()
            .all(|h| self.commutation_phase(h, g).is_zero())
    }
}
