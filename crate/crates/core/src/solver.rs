//! Homogeneous linear systems over the chain ring `Z/p^n`.
//!
//! Every ideal of `Z/p^n` is `(p^v)`, so row and column operations bring any
//! matrix to a diagonal of prime powers. An entry `p^v` on the diagonal
//! contributes `p^v` solutions for its coordinate; a zero column contributes
//! the whole ring.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ModMatrix;
use crate::ring::Modulus;
use crate::shape::LiftedElement;

/// `R·A·C = D` with `D` diagonal, entries `p^{v_1}, …, p^{v_r}` then zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalForm {
    pub diagonal: ModMatrix,
    /// Valuations of the nonzero diagonal entries, ascending.
    pub valuations: Vec<u32>,
    /// Columns of `D` past the last pivot (all zero).
    pub zero_columns: usize,
    pub row_transform: ModMatrix,
    pub col_transform: ModMatrix,
}

/// Solution set of `A·g ≡ 0`, i.e. the set of `g` with every row product zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelDescription {
    pub modulus: Modulus,
    /// `|S|`, saturating at `u128::MAX`.
    pub size: u128,
    /// Spans the solution set.
    pub generators: Vec<LiftedElement>,
    /// Present when the solution set is a product of one subgroup per coordinate.
    pub per_variable: Option<Vec<VariableConstraint>>,
}

/// Coordinate constraint `x ∈ step·Z/p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableConstraint {
    pub step: u64,
    pub modulus: u64,
}

impl VariableConstraint {
    /// Number of admissible values.
    pub fn count(&self) -> u64 {
        self.modulus / self.step
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.count()).map(move |k| k * self.step)
    }
}

impl fmt::Display for VariableConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.count() {
            1 => write!(f, "= 0 (mod {})", self.modulus),
            n if n == self.modulus => write!(f, "free (mod {})", self.modulus),
            n if n <= 9 => {
                let vals: Vec<String> = self.values().map(|v| v.to_string()).collect();
                write!(f, "∈ {{{}}} (mod {})", vals.join(","), self.modulus)
            }
            _ => write!(f, "≡ 0 (mod {}) in Z/{}", self.step, self.modulus),
        }
    }
}

/// Diagonalizes with the deterministic pivot rule: minimum valuation, ties
/// broken by smallest `(row, col)`.
pub fn diagonalize(a: &ModMatrix) -> DiagonalForm {
    diagonalize_with(a, |_| 0)
}

/// Same as [`diagonalize`] but breaks pivot ties uniformly at random.
pub fn diagonalize_randomized<R: Rng + ?Sized>(a: &ModMatrix, rng: &mut R) -> DiagonalForm {
    diagonalize_with(a, |n| rng.gen_range(0..n))
}

/// `choose(n)` picks among `n` minimum-valuation candidates listed in
/// `(row, col)` order.
fn diagonalize_with(a: &ModMatrix, mut choose: impl FnMut(usize) -> usize) -> DiagonalForm {
    let md = a.modulus();
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut r = ModMatrix::identity(md, rows);
    let mut c = ModMatrix::identity(md, cols);
    let mut valuations = Vec::new();

    for k in 0..rows.min(cols) {
        let mut best: Option<u32> = None;
        let mut candidates = Vec::new();
        for i in k..rows {
            for j in k..cols {
                let Some(v) = md.valuation(d.get(i, j)) else {
                    continue;
                };
                match best {
                    Some(b) if v > b => {}
                    Some(b) if v == b => candidates.push((i, j)),
                    _ => {
                        best = Some(v);
                        candidates.clear();
                        candidates.push((i, j));
                    }
                }
            }
        }
        let Some(v) = best else { break };
        let (pi, pj) = candidates[choose(candidates.len())];

        d.swap_rows(k, pi);
        r.swap_rows(k, pi);
        d.swap_cols(k, pj);
        c.swap_cols(k, pj);

        // pivot = p^v·u with u a unit; scale the row so the pivot is exactly p^v
        let pv = md.prime_power(v);
        let unit = d.get(k, k) / pv;
        let inv = md.inverse(unit).expect("pivot cofactor is a unit");
        d.scale_row(k, inv);
        r.scale_row(k, inv);
        debug_assert_eq!(d.get(k, k), pv);

        for i in k + 1..rows {
            let x = d.get(i, k);
            if x != 0 {
                let q = x / pv;
                d.sub_row_multiple(i, k, q);
                r.sub_row_multiple(i, k, q);
            }
        }
        for j in k + 1..cols {
            let x = d.get(k, j);
            if x != 0 {
                let q = x / pv;
                d.sub_col_multiple(j, k, q);
                c.sub_col_multiple(j, k, q);
            }
        }
        valuations.push(v);
    }

    let zero_columns = cols - valuations.len();
    DiagonalForm {
        diagonal: d,
        valuations,
        zero_columns,
        row_transform: r,
        col_transform: c,
    }
}

/// Solution set of `a·g ≡ 0` from the diagonal form.
///
/// In diagonal coordinates `y = C^{-1} g` the solutions are
/// `y_i ∈ p^{n - v_i}·Z/p^n` for pivots and `y_j` free for zero columns, so
/// the generators are the images of those basis vectors under `C`.
pub fn kernel(a: &ModMatrix) -> KernelDescription {
    let form = diagonalize(a);
    kernel_from(a, &form)
}

pub fn kernel_from(a: &ModMatrix, form: &DiagonalForm) -> KernelDescription {
    let md = a.modulus();
    let n = md.exponent();
    let cols = a.cols();
    let p = md.prime() as u128;

    let mut size: u128 = 1;
    let mut diag_gens: Vec<(usize, u64)> = Vec::new();
    for (i, &v) in form.valuations.iter().enumerate() {
        size = size.saturating_mul(p.pow(v));
        if v > 0 {
            diag_gens.push((i, md.prime_power(n - v)));
        }
    }
    for j in form.valuations.len()..cols {
        size = size.saturating_mul(md.value() as u128);
        diag_gens.push((j, 1));
    }

    let generators: Vec<LiftedElement> = diag_gens
        .into_iter()
        .map(|(j, scale)| {
            LiftedElement(
                (0..cols)
                    .map(|i| md.mul(form.col_transform.get(i, j), scale))
                    .collect(),
            )
        })
        .collect();
    for g in &generators {
        assert!(
            a.mul_vec(&g.0).iter().all(|&x| x == 0),
            "kernel generator {g:?} is not annihilated"
        );
    }

    let per_variable = coordinate_box(md, cols, &generators, size);
    KernelDescription {
        modulus: md,
        size,
        generators,
        per_variable,
    }
}

/// The smallest coordinate box containing the span of `gens`, if the span
/// fills it exactly.
fn coordinate_box(
    md: Modulus,
    cols: usize,
    gens: &[LiftedElement],
    size: u128,
) -> Option<Vec<VariableConstraint>> {
    let constraints: Vec<VariableConstraint> = (0..cols)
        .map(|s| {
            let v = gens
                .iter()
                .filter_map(|g| md.valuation(g.0[s]))
                .min()
                .unwrap_or(md.exponent());
            VariableConstraint {
                step: md.prime_power(v),
                modulus: md.value(),
            }
        })
        .collect();
    let box_size = constraints
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.count() as u128));
    (box_size == size).then_some(constraints)
}

/// Counts `g ∈ (Z/p^n)^cols` with `a·g ≡ 0` by visiting every vector.
///
/// The enumeration is split over the first coordinate; each slice walks the
/// remaining coordinates as an odometer and updates `a·g` incrementally (a
/// step at position `s`, including a wrap from `q-1` to `0`, adds column `s`
/// modulo `q`).
pub fn count_solutions_brute(a: &ModMatrix, cap: u64) -> Result<u128> {
    let md = a.modulus();
    let q = md.value();
    let (rows, cols) = (a.rows(), a.cols());
    let size = (q as u128).checked_pow(cols as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::TooLargeToEnumerate { size, cap });
    }
    if cols == 0 {
        return Ok(1);
    }
    let column = |s: usize| -> Vec<u64> { (0..rows).map(|i| a.get(i, s)).collect() };
    let columns: Vec<Vec<u64>> = (0..cols).map(column).collect();

    let count: u128 = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut acc: Vec<u64> = columns[0].iter().map(|&x| md.mul(x, first)).collect();
            let mut digits = vec![0u64; cols];
            let mut hits: u128 = 0;
            loop {
                if acc.iter().all(|&x| x == 0) {
                    hits += 1;
                }
                // odometer over coordinates 1..cols
                let mut s = cols;
                loop {
                    s -= 1;
                    if s == 0 {
                        return hits;
                    }
                    for (x, &c) in acc.iter_mut().zip(&columns[s]) {
                        *x = md.add(*x, c);
                    }
                    digits[s] += 1;
                    if digits[s] < q {
                        break;
                    }
                    digits[s] = 0;
                }
            }
        })
        .sum();
    Ok(count)
}
