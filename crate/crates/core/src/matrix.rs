//! Small dense matrices of expressions.

use std::fmt;

use crate::expr::{canonicalize, Expr};

/// Entry `(r, c)` of a q×q matrix is the component with upper index `r`
/// and lower index `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

/// Shape errors.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ShapeError {
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("a matrix needs at least one entry")]
    Empty,
    #[error("shape mismatch: {0}")]
    Mismatch(String),
}

impl ExprMatrix {
    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self, ShapeError> {
        let cols = rows.first().map(Vec::len).ok_or(ShapeError::Empty)?;
        if cols == 0 {
            return Err(ShapeError::Empty);
        }
        for (k, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(ShapeError::Ragged { row: k, found: r.len(), expected: cols });
            }
        }
        let n = rows.len();
        Ok(ExprMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Expr) -> Self {
        let data = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| f(r, c)).collect();
        ExprMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix::from_fn(rows, cols, |_, _| Expr::zero())
    }

    pub fn identity(n: usize) -> Self {
        ExprMatrix::scalar(n, &Expr::one())
    }

    /// `e` times the identity.
    pub fn scalar(n: usize, e: &Expr) -> Self {
        ExprMatrix::from_fn(n, n, |r, c| if r == c { e.clone() } else { Expr::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Expr {
        &self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Expr> {
        self.data.iter()
    }

    pub fn row(&self, r: usize) -> &[Expr] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        ExprMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn canonical(&self) -> Self {
        self.map(canonicalize)
    }

    fn same_shape(&self, o: &Self) -> Result<(), ShapeError> {
        if self.rows == o.rows && self.cols == o.cols {
            Ok(())
        } else {
            Err(ShapeError::Mismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, o.rows, o.cols)))
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, ShapeError> {
        self.same_shape(o)?;
        Ok(ExprMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + o.get(r, c)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, ShapeError> {
        self.same_shape(o)?;
        Ok(ExprMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - o.get(r, c)))
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ShapeError> {
        if self.cols != o.rows {
            return Err(ShapeError::Mismatch(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        Ok(ExprMatrix::from_fn(self.rows, o.cols, |r, c| {
            Expr::add_all((0..self.cols).map(|k| self.get(r, k) * o.get(k, c)))
        }))
    }

    pub fn scale(&self, e: &Expr) -> Self {
        self.map(|x| x * e)
    }

    /// `A B - B A`.
    pub fn commutator(&self, o: &Self) -> Result<Self, ShapeError> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Result<Vec<Expr>, ShapeError> {
        if v.len() != self.cols {
            return Err(ShapeError::Mismatch(format!("{} columns, vector of length {}", self.cols, v.len())));
        }
        Ok((0..self.rows).map(|r| Expr::add_all((0..self.cols).map(|k| self.get(r, k) * &v[k]))).collect())
    }

    pub fn trace(&self) -> Expr {
        Expr::add_all((0..self.rows.min(self.cols)).map(|k| self.get(k, k).clone()))
    }

    pub fn transpose(&self) -> Self {
        ExprMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let rows: Vec<Vec<Expr>> = (0..self.rows)
            .filter(|&r| r != skip_r)
            .map(|r| (0..self.cols).filter(|&c| c != skip_c).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let n = rows.len();
        let m = rows.first().map(Vec::len).unwrap_or(0);
        ExprMatrix { rows: n, cols: m, data: rows.into_iter().flatten().collect() }
    }

    /// Determinant by cofactor expansion (the matrices here are tiny).
    pub fn det(&self) -> Result<Expr, ShapeError> {
        if !self.is_square() {
            return Err(ShapeError::Mismatch("determinant of a non-square matrix".into()));
        }
        Ok(match self.rows {
            0 => Expr::one(),
            1 => self.get(0, 0).clone(),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            n => Expr::add_all((0..n).map(|c| {
                let sign = if c % 2 == 0 { Expr::one() } else { Expr::int(-1) };
                sign * self.get(0, c).clone() * self.minor(0, c).det().expect("square minor")
            })),
        })
    }

    /// Transposed cofactor matrix, so that `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Result<Self, ShapeError> {
        if !self.is_square() {
            return Err(ShapeError::Mismatch("adjugate of a non-square matrix".into()));
        }
        if self.rows == 1 {
            return Ok(ExprMatrix::identity(1));
        }
        Ok(ExprMatrix::from_fn(self.rows, self.cols, |r, c| {
            let m = self.minor(c, r).det().expect("square minor");
            if (r + c) % 2 == 0 {
                m
            } else {
                m.neg()
            }
        }))
    }
}

impl fmt::Display for ExprMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: &str) -> Expr {
        Expr::parameter(n)
    }

    #[test]
    fn ragged_rows_rejected() {
        let r = ExprMatrix::from_rows(vec![vec![Expr::zero()], vec![Expr::zero(), Expr::zero()]]);
        assert_eq!(r, Err(ShapeError::Ragged { row: 1, found: 2, expected: 1 }));
    }

    #[test]
    fn adjugate_inverts() {
        let m = ExprMatrix::from_fn(3, 3, |r, c| sym(&format!("a{r}{c}")));
        let det = m.det().unwrap();
        let prod = m.mul(&m.adjugate().unwrap()).unwrap().canonical();
        assert_eq!(prod, ExprMatrix::scalar(3, &det).canonical());
    }

    #[test]
    fn commutator_and_trace() {
        let a = ExprMatrix::from_rows(vec![vec![Expr::zero(), Expr::zero()], vec![sym("p"), Expr::zero()]]).unwrap();
        let b = ExprMatrix::identity(2);
        assert_eq!(a.commutator(&b).unwrap().canonical(), ExprMatrix::zeros(2, 2));
        assert_eq!(a.trace(), Expr::zero());
        assert_eq!(a.transpose().get(0, 1), &sym("p"));
        assert_eq!(a.to_string(), "[[0, 0], [p, 0]]");
    }
}
