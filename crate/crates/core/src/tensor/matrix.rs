use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::expr::{partial, EvalError, ParseError, ScalarExpr, Tape};
use crate::jet::CompiledMatrix;

/// Dense row-major matrix of expressions.
#[derive(Clone, Debug)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ScalarExpr>,
}

impl ExprMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix { rows, cols, data: vec![ScalarExpr::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ScalarExpr::one() } else { ScalarExpr::zero() })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> ScalarExpr>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExprMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<ScalarExpr>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        ExprMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_constants(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| ScalarExpr::constant(m[(i, j)]))
    }

    pub fn column_vector(v: &[ScalarExpr]) -> Self {
        ExprMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Parses a matrix of expression strings.
    pub fn parse(rows: &[Vec<String>], dim: usize) -> Result<Self, (usize, usize, ParseError)> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, s) in row.iter().enumerate() {
                r.push(crate::expr::parse_expr(s, dim).map_err(|e| (i, j, e))?);
            }
            out.push(r);
        }
        Ok(Self::from_rows(out))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect()).collect()
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[ScalarExpr] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<ScalarExpr> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, o: &ExprMatrix) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = ScalarExpr::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &o[(k, j)];
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        })
    }

    pub fn mat_vec(&self, v: &[ScalarExpr]) -> Vec<ScalarExpr> {
        self.matmul(&Self::column_vector(v)).data
    }

    pub fn add(&self, o: &ExprMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&o[(i, j)]))
    }

    pub fn sub(&self, o: &ExprMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&o[(i, j)]))
    }

    pub fn scale(&self, s: &ScalarExpr) -> Self {
        self.map(|e| e.mul(s))
    }

    pub fn scale_f(&self, s: f64) -> Self {
        self.scale(&ScalarExpr::constant(s))
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg())
    }

    pub fn map<F: FnMut(&ScalarExpr) -> ScalarExpr>(&self, mut f: F) -> Self {
        ExprMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| f(e)).collect() }
    }

    pub fn partial(&self, k: usize) -> Self {
        self.map(|e| partial(e, k))
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn from_blocks(a: &ExprMatrix, b: &ExprMatrix, c: &ExprMatrix, d: &ExprMatrix) -> Self {
        let (r1, c1) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r1, j < c1) {
            (true, true) => a[(i, j)].clone(),
            (true, false) => b[(i, j - c1)].clone(),
            (false, true) => c[(i - r1, j)].clone(),
            (false, false) => d[(i - r1, j - c1)].clone(),
        })
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// True when no entry references a coordinate.
    pub fn is_constant(&self) -> bool {
        self.data.iter().all(|e| e.max_var() == 0)
    }

    pub fn max_var(&self) -> usize {
        self.data.iter().map(|e| e.max_var()).max().unwrap_or(0)
    }

    pub fn compile(&self) -> CompiledMatrix {
        CompiledMatrix::new(self.rows, self.cols, &self.data)
    }

    pub fn eval_values(&self, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        let v = Tape::compile(&self.data).eval_values(p)?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &v))
    }

    /// Determinant by cofactor expansion with memoised minors; zero entries are skipped.
    pub fn det(&self) -> ScalarExpr {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        assert!(n <= 16, "symbolic determinant limited to 16x16");
        let mut memo = HashMap::new();
        self.minor_det(full_mask(n), full_mask(n), &mut memo)
    }

    fn minor_det(&self, rmask: u32, cmask: u32, memo: &mut HashMap<(u32, u32), ScalarExpr>) -> ScalarExpr {
        if rmask == 0 {
            return ScalarExpr::one();
        }
        if let Some(e) = memo.get(&(rmask, cmask)) {
            return e.clone();
        }
        let r = rmask.trailing_zeros() as usize;
        let mut acc = ScalarExpr::zero();
        let mut sign = 1.0;
        for c in 0..self.cols {
            if cmask & (1 << c) == 0 {
                continue;
            }
            let a = &self[(r, c)];
            if !a.is_zero() {
                let sub = self.minor_det(rmask & !(1 << r), cmask & !(1 << c), memo);
                if !sub.is_zero() {
                    let term = a.mul(&sub);
                    acc = if sign > 0.0 { acc.add(&term) } else { acc.sub(&term) };
                }
            }
            sign = -sign;
        }
        memo.insert((rmask, cmask), acc.clone());
        acc
    }

    /// Symbolic inverse via the adjugate.
    pub fn inverse(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut memo = HashMap::new();
        let det = self.minor_det(full_mask(n), full_mask(n), &mut memo);
        Self::from_fn(n, n, |i, j| {
            // inverse(i, j) = cofactor(j, i) / det
            let cof = self.minor_det(full_mask(n) & !(1 << j), full_mask(n) & !(1 << i), &mut memo);
            let signed = if (i + j) % 2 == 0 { cof } else { cof.neg() };
            signed.div(&det)
        })
    }
}

fn full_mask(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        (1u32 << n) - 1
    }
}

impl std::ops::Index<(usize, usize)> for ExprMatrix {
    type Output = ScalarExpr;
    fn index(&self, (i, j): (usize, usize)) -> &ScalarExpr {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExprMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ScalarExpr {
        &mut self.data[i * self.cols + j]
    }
}
