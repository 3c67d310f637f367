//! Dense matrices over a single ring `Z/p^n`.

use std::fmt;

use crate::ring::Modulus;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(modulus: Modulus, rows: usize, cols: usize) -> Self {
        ModMatrix {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, size: usize) -> Self {
        let mut m = Self::zeros(modulus, size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from signed rows, reducing every entry.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows(modulus: Modulus, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(modulus, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, modulus.reduce_signed(x));
            }
        }
        m
    }

    pub fn from_fn(
        modulus: Modulus,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut m = Self::zeros(modulus, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, modulus.reduce(f(i, j)));
            }
        }
        m
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        debug_assert!(x < self.modulus.value());
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) == 0))
    }

    /// Whether every column has a single 1 and zeros elsewhere, and likewise every row.
    pub fn is_permutation(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let ok_row = |i: usize| {
            let r = self.row(i);
            r.iter().filter(|&&x| x == 1).count() == 1 && r.iter().all(|&x| x <= 1)
        };
        let ok_col = |j: usize| (0..self.rows).filter(|&i| self.get(i, j) == 1).count() == 1;
        (0..self.rows).all(ok_row) && (0..self.cols).all(ok_col)
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.modulus, other.modulus);
        assert_eq!(self.cols, other.rows);
        let md = self.modulus;
        ModMatrix::from_fn(md, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(0, |acc, k| md.add(acc, md.mul(self.get(i, k), other.get(k, j))))
        })
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let md = self.modulus;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &x)| md.add(acc, md.mul(a, md.reduce(x))))
            })
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] -= factor * row[source]`.
    pub fn sub_row_multiple(&mut self, target: usize, source: usize, factor: u64) {
        let md = self.modulus;
        for j in 0..self.cols {
            let x = md.sub(self.get(target, j), md.mul(factor, self.get(source, j)));
            self.set(target, j, x);
        }
    }

    /// `col[target] -= factor * col[source]`.
    pub fn sub_col_multiple(&mut self, target: usize, source: usize, factor: u64) {
        let md = self.modulus;
        for i in 0..self.rows {
            let x = md.sub(self.get(i, target), md.mul(factor, self.get(i, source)));
            self.set(i, target, x);
        }
    }

    pub fn scale_row(&mut self, i: usize, factor: u64) {
        let md = self.modulus;
        for j in 0..self.cols {
            let x = md.mul(factor, self.get(i, j));
            self.set(i, j, x);
        }
    }

    /// Rank of the matrix reduced modulo `p`, by Gaussian elimination over `F_p`.
    pub fn rank_mod_p(&self) -> usize {
        let field = self.modulus.with_exponent(1).expect("same prime");
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| field.reduce(x)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, pivot);
            let inv = field.inverse(a[rank][col]).expect("nonzero in a field");
            for j in 0..self.cols {
                a[rank][j] = field.mul(a[rank][j], inv);
            }
            for i in 0..self.rows {
                if i != rank && a[i][col] != 0 {
                    let f = a[i][col];
                    for j in 0..self.cols {
                        a[i][j] = field.sub(a[i][j], field.mul(f, a[rank][j]));
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// A square matrix over `Z/p^n` is invertible iff it is invertible mod `p`.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank_mod_p() == self.rows
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .data
            .iter()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x:>width$}")?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
