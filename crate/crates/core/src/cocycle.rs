//! Explicit 2-cocycles on small abelian p-groups, in exponent form.
//!
//! A table stores `e(σ, τ)` with `φ(σ, τ) = ζ^{e(σ, τ)}` for a primitive
//! `p^{n_1}`-th root of unity `ζ`. Rows and columns follow the group's
//! lexicographic enumeration order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pairing::{scale_factor, PairingMatrix};
use crate::ring::Modulus;
use crate::shape::{GroupElement, PGroupShape};

/// Largest group order for which the `|G|^3` cocycle identity is checked.
pub const DEFAULT_VALIDATION_CAP: u64 = 512;

/// Largest group order for which a dense `|G|^2` table is built.
pub const DEFAULT_TABLE_CAP: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    shape: PGroupShape,
    modulus: Modulus,
    order: usize,
    values: Vec<u64>,
}

impl CocycleTable {
    /// Builds a table from `|G|` rows of `|G|` signed exponents.
    pub fn new(shape: PGroupShape, rows: &[Vec<i64>]) -> Result<Self> {
        let order = checked_order(&shape, DEFAULT_TABLE_CAP)?;
        if rows.len() != order {
            return Err(Error::WrongDimensions {
                expected: order,
                found: format!("{} rows", rows.len()),
            });
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != order) {
            return Err(Error::WrongDimensions {
                expected: order,
                found: format!("row {} with {} entries", i + 1, row.len()),
            });
        }
        let modulus = shape.top_modulus();
        let values = rows
            .iter()
            .flatten()
            .map(|&x| modulus.reduce_signed(x))
            .collect();
        Ok(CocycleTable {
            shape,
            modulus,
            order,
            values,
        })
    }

    /// Tabulates `f` over all pairs of elements.
    pub fn from_fn(
        shape: PGroupShape,
        cap: u64,
        f: impl Fn(&GroupElement, &GroupElement) -> i64,
    ) -> Result<Self> {
        let order = checked_order(&shape, cap)?;
        let modulus = shape.top_modulus();
        let elems: Vec<GroupElement> = (0..order).map(|i| shape.element_at(i)).collect();
        let mut values = Vec::with_capacity(order * order);
        for a in &elems {
            for b in &elems {
                values.push(modulus.reduce_signed(f(a, b)));
            }
        }
        Ok(CocycleTable {
            shape,
            modulus,
            order,
            values,
        })
    }

    /// The bilinear cocycle `e(a, b) = Σ_{u>v} p^{n_1 - min(n_u, n_v)} x_{uv} a_u b_v`,
    /// whose antisymmetrization is exactly `a`.
    pub fn realize(a: &PairingMatrix, cap: u64) -> Result<Self> {
        let shape = a.shape().clone();
        let m = shape.generator_count();
        let modulus = shape.top_modulus();
        let coeffs: Vec<(usize, usize, u64)> = (0..m)
            .flat_map(|u| (0..u).map(move |v| (u, v)))
            .map(|(u, v)| (u, v, a.entry(u, v).value() * scale_factor(&shape, u, v)))
            .filter(|&(_, _, c)| c != 0)
            .collect();
        Self::from_fn(shape, cap, |x, y| {
            coeffs.iter().fold(0u64, |acc, &(u, v, c)| {
                modulus.add(acc, modulus.mul(c, modulus.mul(x.0[u], y.0[v])))
            }) as i64
        })
    }

    pub fn shape(&self) -> &PGroupShape {
        &self.shape
    }

    /// `|G|`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Exponent at element indices `(i, j)`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> u64 {
        self.values[i * self.order + j]
    }

    pub fn value_of(&self, a: &GroupElement, b: &GroupElement) -> u64 {
        self.value(self.shape.index_of(a), self.shape.index_of(b))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.values.chunks(self.order).map(<[u64]>::to_vec).collect()
    }

    /// Checks `e(σ,τ) + e(στ,ρ) = e(τ,ρ) + e(σ,τρ)` on every triple. On
    /// failure reports the lexicographically smallest failing triple.
    pub fn validate(&self, cap: u64) -> Result<()> {
        if self.order as u64 > cap {
            return Err(Error::TooLargeToValidate {
                order: self.order as u64,
                cap,
            });
        }
        let n = self.order;
        let sum = self.addition_table();
        let md = self.modulus;
        let failure = (0..n).into_par_iter().find_map_first(|s| {
            for t in 0..n {
                let st = sum[s * n + t] as usize;
                let lhs_st = self.value(s, t);
                for r in 0..n {
                    let tr = sum[t * n + r] as usize;
                    let lhs = md.add(lhs_st, self.value(st, r));
                    let rhs = md.add(self.value(t, r), self.value(s, tr));
                    if lhs != rhs {
                        return Some((s, t, r));
                    }
                }
            }
            None
        });
        match failure {
            Some((s, t, r)) => Err(Error::NotACocycle(s, t, r)),
            None => Ok(()),
        }
    }

    fn addition_table(&self) -> Vec<u32> {
        let elems: Vec<GroupElement> = (0..self.order).map(|i| self.shape.element_at(i)).collect();
        let mut sum = Vec::with_capacity(self.order * self.order);
        for a in &elems {
            for b in &elems {
                sum.push(self.shape.index_of(&self.shape.add(a, b)) as u32);
            }
        }
        sum
    }

    /// Exponent (base `ζ`) of `f(a, b) = φ(a, b) / φ(b, a)`.
    pub fn commutator_exponent(&self, a: &GroupElement, b: &GroupElement) -> u64 {
        self.modulus
            .sub(self.value_of(a, b), self.value_of(b, a))
    }

    /// Reads off the commutator pairing on generators.
    pub fn derive_pairing(&self) -> Result<PairingMatrix> {
        let shape = &self.shape;
        let m = shape.generator_count();
        let unit = |s: usize| {
            let mut g = shape.identity();
            g.0[s] = 1;
            g
        };
        let mut rows = vec![vec![0i64; m]; m];
        for u in 0..m {
            for v in 0..m {
                let diff = self.commutator_exponent(&unit(u), &unit(v));
                let scale = scale_factor(shape, u, v);
                if diff % scale != 0 {
                    return Err(Error::PairingOrderViolation(u + 1, v + 1));
                }
                rows[u][v] = (diff / scale) as i64;
            }
        }
        PairingMatrix::new(shape.clone(), &rows).map_err(|e| {
            Error::InternalInconsistency(format!("derived pairing is not alternating: {e}"))
        })
    }
}

fn checked_order(shape: &PGroupShape, cap: u64) -> Result<usize> {
    let order = shape.order();
    if order > cap as u128 {
        return Err(Error::TooLargeToValidate {
            order: u64::try_from(order).unwrap_or(u64::MAX),
            cap,
        });
    }
    Ok(order as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z3sq() -> PGroupShape {
        PGroupShape::new(3, &[(1, 2)]).unwrap()
    }

    fn worked() -> PairingMatrix {
        PairingMatrix::new(
            PGroupShape::new(3, &[(2, 2), (1, 2)]).unwrap(),
            &[
                vec![0, 1, 1, 1],
                vec![8, 0, 2, 2],
                vec![2, 1, 0, 1],
                vec![2, 1, 2, 0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn trivial_cocycle() {
        let t = CocycleTable::from_fn(z3sq(), DEFAULT_TABLE_CAP, |_, _| 0).unwrap();
        assert!(t.validate(DEFAULT_VALIDATION_CAP).is_ok());
        assert!(t.derive_pairing().unwrap().is_zero());
        let a = PairingMatrix::zero(z3sq());
        assert!(CocycleTable::realize(&a, DEFAULT_TABLE_CAP)
            .unwrap()
            .values
            .iter()
            .all(|&x| x == 0));
    }

    #[test]
    fn bilinear_example() {
        let t = CocycleTable::from_fn(z3sq(), DEFAULT_TABLE_CAP, |a, b| (a.0[1] * b.0[0]) as i64)
            .unwrap();
        assert!(t.validate(DEFAULT_VALIDATION_CAP).is_ok());
        let a = t.derive_pairing().unwrap();
        assert_eq!(a.to_rows(), vec![vec![0, 2], vec![1, 0]]);
        // the realization of that pairing is the same table
        let back = CocycleTable::realize(&a, DEFAULT_TABLE_CAP).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn perturbed_table_fails() {
        let a = PairingMatrix::new(z3sq(), &[vec![0, 1], vec![2, 0]]).unwrap();
        let mut t = CocycleTable::realize(&a, DEFAULT_TABLE_CAP).unwrap();
        let k = 4 * 9 + 5;
        t.values[k] = (t.values[k] + 1) % 3;
        assert!(matches!(
            t.validate(DEFAULT_VALIDATION_CAP),
            Err(Error::NotACocycle(..))
        ));
    }

    #[test]
    fn first_failure_is_lexicographically_smallest() {
        let mut t = CocycleTable::from_fn(z3sq(), DEFAULT_TABLE_CAP, |_, _| 0).unwrap();
        // perturb e(1, 1); the smallest failing triple involves σ = 0 via e(σ, τρ)
        t.values[9 + 1] = 1;
        let Err(Error::NotACocycle(s, t_, r)) = t.validate(DEFAULT_VALIDATION_CAP) else {
            panic!("expected failure");
        };
        let mut smallest = None;
        'outer: for s in 0..9 {
            for tt in 0..9 {
                for r in 0..9 {
                    let sh = z3sq();
                    let (es, et, er) = (sh.element_at(s), sh.element_at(tt), sh.element_at(r));
                    let st = sh.index_of(&sh.add(&es, &et));
                    let tr = sh.index_of(&sh.add(&et, &er));
                    let lhs = (t.value(s, tt) + t.value(st, r)) % 3;
                    let rhs = (t.value(tt, r) + t.value(s, tr)) % 3;
                    if lhs != rhs {
                        smallest = Some((s, tt, r));
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(Some((s, t_, r)), smallest);
    }

    #[test]
    fn worked_round_trip() {
        let a = worked();
        let t = CocycleTable::realize(&a, DEFAULT_TABLE_CAP).unwrap();
        assert_eq!(t.order(), 729);
        assert_eq!(t.derive_pairing().unwrap(), a);
        assert_eq!(
            t.validate(DEFAULT_VALIDATION_CAP),
            Err(Error::TooLargeToValidate {
                order: 729,
                cap: 512
            })
        );
    }

    #[test]
    fn caps() {
        let big = PGroupShape::new(2, &[(11, 1)]).unwrap();
        assert!(matches!(
            CocycleTable::realize(&PairingMatrix::zero(big), DEFAULT_TABLE_CAP),
            Err(Error::TooLargeToValidate { order: 2048, .. })
        ));
        assert!(matches!(
            CocycleTable::new(z3sq(), &vec![vec![0; 9]; 8]),
            Err(Error::WrongDimensions { expected: 9, .. })
        ));
    }

    #[test]
    fn order_violation_detected() {
        // on Z/9 ⊕ Z/3 the commutator of the two generators must be a cube root of unity
        let shape = PGroupShape::new(3, &[(2, 1), (1, 1)]).unwrap();
        let t = CocycleTable::from_fn(shape, DEFAULT_TABLE_CAP, |a, b| {
            if a.0 == [1, 0] && b.0 == [0, 1] {
                1
            } else {
                0
            }
        })
        .unwrap();
        assert_eq!(t.derive_pairing(), Err(Error::PairingOrderViolation(1, 2)));
    }

    #[test]
    fn coboundary_does_not_change_the_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = PGroupShape::new(2, &[(2, 1), (1, 2)]).unwrap();
        for _ in 0..5 {
            let a = PairingMatrix::random(shape.clone(), &mut rng);
            let base = CocycleTable::realize(&a, DEFAULT_TABLE_CAP).unwrap();
            let h: Vec<i64> = (0..base.order()).map(|_| rng.gen_range(0..4)).collect();
            let sh = shape.clone();
            let twisted = CocycleTable::from_fn(shape.clone(), DEFAULT_TABLE_CAP, |x, y| {
                let (i, j) = (sh.index_of(x), sh.index_of(y));
                let k = sh.index_of(&sh.add(x, y));
                base.value(i, j) as i64 + h[i] + h[j] - h[k]
            })
            .unwrap();
            twisted.validate(DEFAULT_VALIDATION_CAP).unwrap();
            assert_eq!(twisted.derive_pairing().unwrap(), a);
        }
    }

    #[test]
    fn commutator_is_a_bipairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for raw in [vec![(2, 1), (1, 2)], vec![(1, 4)], vec![(3, 1), (1, 1)]] {
            let p = if raw == vec![(1, 4)] { 3 } else { 2 };
            let shape = PGroupShape::new(p, &raw).unwrap();
            assert!(shape.order() <= 81);
            let a = PairingMatrix::random(shape.clone(), &mut rng);
            let t = CocycleTable::realize(&a, DEFAULT_TABLE_CAP).unwrap();
            let md = shape.top_modulus();
            let elems: Vec<_> = shape.enumerate(1000).unwrap().collect();
            for x in &elems {
                for y in &elems {
                    let xy = shape.add(x, y);
                    for z in &elems {
                        assert_eq!(
                            t.commutator_exponent(&xy, z),
                            md.add(t.commutator_exponent(x, z), t.commutator_exponent(y, z))
                        );
                    }
                }
            }
        }
    }
}
