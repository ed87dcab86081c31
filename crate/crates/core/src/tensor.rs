//! Dense N-dimensional index arrays of [`Expr`].

use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::expr::{guarded, Expr, Rational};
use crate::Result;

macro_rules! usize_of {
    ($x:ident) => {
        usize
    };
}

macro_rules! dense {
    ($name:ident, $rank:literal, $($i:ident),+) => {
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name {
            n: usize,
            data: Vec<Expr>,
        }

        impl $name {
            pub fn zeros(n: usize) -> Self {
                $name { n, data: vec![Expr::zero(); n.pow($rank)] }
            }

            pub fn from_fn(n: usize, mut f: impl FnMut($(usize_of!($i)),+) -> Expr) -> Self {
                let mut data = Vec::with_capacity(n.pow($rank));
                for_each_index!(n, data, f, $($i),+);
                $name { n, data }
            }

            /// Like `from_fn`, entries computed in parallel, in index order.
            pub fn par_from_fn(
                n: usize,
                f: impl Fn($(usize_of!($i)),+) -> Expr + Sync + Send,
            ) -> Self {
                let total = n.pow($rank);
                let data = (0..total)
                    .into_par_iter()
                    .map(|flat| {
                        let idx = unflatten::<$rank>(flat, n);
                        let mut it = idx.into_iter();
                        $(let $i = it.next().unwrap();)+
                        f($($i),+)
                    })
                    .collect();
                $name { n, data }
            }

            pub fn dim(&self) -> usize {
                self.n
            }

            pub fn entries(&self) -> impl Iterator<Item = ([usize; $rank], &Expr)> {
                let n = self.n;
                self.data.iter().enumerate().map(move |(k, e)| (unflatten::<$rank>(k, n), e))
            }

            pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
                $name { n: self.n, data: self.data.iter().map(f).collect() }
            }

            pub fn zip_with(&self, other: &Self, f: impl Fn(&Expr, &Expr) -> Expr) -> Self {
                assert_eq!(self.n, other.n, "dimension mismatch");
                $name {
                    n: self.n,
                    data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
                }
            }

            pub fn is_zero(&self) -> bool {
                self.data.iter().all(Expr::is_zero)
            }

            pub fn scale(&self, c: &Rational) -> Self {
                self.map(|e| e.scale(c))
            }

            pub fn eval_exact(&self, point: &[Rational]) -> Result<Vec<Rational>> {
                self.data.iter().map(|e| e.eval_exact(point)).collect()
            }

            fn offset(&self, idx: [usize; $rank]) -> usize {
                idx.iter().fold(0, |acc, &i| {
                    debug_assert!(i < self.n);
                    acc * self.n + i
                })
            }
        }

        impl Index<[usize; $rank]> for $name {
            type Output = Expr;
            fn index(&self, idx: [usize; $rank]) -> &Expr {
                &self.data[self.offset(idx)]
            }
        }

        impl IndexMut<[usize; $rank]> for $name {
            fn index_mut(&mut self, idx: [usize; $rank]) -> &mut Expr {
                let o = self.offset(idx);
                &mut self.data[o]
            }
        }
    };
}

macro_rules! for_each_index {
    ($n:expr, $data:ident, $f:ident, $a:ident) => {
        for $a in 0..$n { $data.push($f($a)); }
    };
    ($n:expr, $data:ident, $f:ident, $a:ident, $b:ident) => {
        for $a in 0..$n { for $b in 0..$n { $data.push($f($a, $b)); } }
    };
    ($n:expr, $data:ident, $f:ident, $a:ident, $b:ident, $c:ident) => {
        for $a in 0..$n { for $b in 0..$n { for $c in 0..$n { $data.push($f($a, $b, $c)); } } }
    };
    ($n:expr, $data:ident, $f:ident, $a:ident, $b:ident, $c:ident, $d:ident) => {
        for $a in 0..$n { for $b in 0..$n { for $c in 0..$n { for $d in 0..$n {
            $data.push($f($a, $b, $c, $d));
        } } } }
    };
}

fn unflatten<const R: usize>(mut flat: usize, n: usize) -> [usize; R] {
    let mut idx = [0; R];
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    idx
}

dense!(Vector, 1, i);
dense!(Matrix, 2, i, j);
dense!(Tensor3, 3, i, j, k);
dense!(Tensor4, 4, i, j, k, l);

impl Vector {
    pub fn from_vec(data: Vec<Expr>) -> Self {
        Vector { n: data.len(), data }
    }

    pub fn as_slice(&self) -> &[Expr] {
        &self.data
    }
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { Expr::one() } else { Expr::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(crate::Error::Dimension(format!("expected {n}x{n} matrix")));
        }
        Ok(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self[[j, i]].clone())
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, |i, j| (0..n).map(|s| &self[[i, s]] * &other[[s, j]]).sum())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[[i, j]] == self[[j, i]]))
    }

    /// Minor with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> Matrix {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != r) {
            for j in (0..n).filter(|&j| j != c) {
                data.push(self[[i, j]].clone());
            }
        }
        Matrix { n: n - 1, data }
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> Expr {
        match self.n {
            0 => Expr::one(),
            1 => self.data[0].clone(),
            2 => &self[[0, 0]] * &self[[1, 1]] - &self[[0, 1]] * &self[[1, 0]],
            n => (0..n)
                .filter(|&j| !self[[0, j]].is_zero())
                .map(|j| {
                    let t = &self[[0, j]] * &self.minor(0, j).det();
                    if j % 2 == 0 { t } else { -t }
                })
                .sum(),
        }
    }

    /// Exact inverse by adjugate over determinant.
    pub fn inverse(&self) -> Result<Matrix> {
        guarded(|| {
            let det = self.det();
            if det.is_zero() {
                return Err(crate::Error::DegenerateMetric);
            }
            let n = self.n;
            if n == 1 {
                return Ok(Matrix { n, data: vec![det.recip()?] });
            }
            let inv_det = det.recip()?;
            Ok(Matrix::from_fn(n, |i, j| {
                let c = &self.minor(j, i).det() * &inv_det;
                if (i + j) % 2 == 0 { c } else { -c }
            }))
        })
    }
}
