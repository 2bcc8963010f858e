//! First-order jets of complex matrices at a point.
//!
//! A `JetMat` carries the value of a matrix-valued field together with its
//! partial derivatives along every coordinate. Products, inverses and sums
//! propagate derivatives by the Leibniz rule, so brackets of composed fields
//! can be evaluated pointwise without building symbolic compositions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::expr::{EvalError, ScalarExpr, Tape};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug)]
pub struct JetMat {
    pub val: CMat,
    pub d: Vec<CMat>,
}

impl JetMat {
    pub fn zeros(r: usize, cdim: usize, n: usize) -> Self {
        JetMat { val: CMat::zeros(r, cdim), d: vec![CMat::zeros(r, cdim); n] }
    }

    pub fn identity(k: usize, n: usize) -> Self {
        Self::constant(CMat::identity(k, k), n)
    }

    pub fn constant(val: CMat, n: usize) -> Self {
        let (r, cdim) = val.shape();
        JetMat { val, d: vec![CMat::zeros(r, cdim); n] }
    }

    pub fn from_real(val: &DMatrix<f64>, d: &[DMatrix<f64>]) -> Self {
        JetMat { val: val.map(c), d: d.iter().map(|m| m.map(c)).collect() }
    }

    /// Column vector with a single 1 at `i`.
    pub fn unit(len: usize, i: usize, n: usize) -> Self {
        let mut v = CMat::zeros(len, 1);
        v[(i, 0)] = c(1.0);
        Self::constant(v, n)
    }

    pub fn nvars(&self) -> usize {
        self.d.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.val.shape()
    }

    pub fn mul(&self, o: &JetMat) -> JetMat {
        let val = &self.val * &o.val;
        let d = self.d.iter().zip(&o.d).map(|(a, b)| a * &o.val + &self.val * b).collect();
        JetMat { val, d }
    }

    pub fn add(&self, o: &JetMat) -> JetMat {
        JetMat { val: &self.val + &o.val, d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &JetMat) -> JetMat {
        JetMat { val: &self.val - &o.val, d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: C64) -> JetMat {
        JetMat { val: &self.val * s, d: self.d.iter().map(|a| a * s).collect() }
    }

    /// Multiplies every entry by a scalar field given as a 1x1 jet.
    pub fn scale_jet(&self, s: &JetMat) -> JetMat {
        let sv = s.val[(0, 0)];
        JetMat {
            val: &self.val * sv,
            d: self.d.iter().zip(&s.d).map(|(a, ds)| a * sv + &self.val * ds[(0, 0)]).collect(),
        }
    }

    pub fn neg(&self) -> JetMat {
        self.scale(c(-1.0))
    }

    pub fn transpose(&self) -> JetMat {
        JetMat { val: self.val.transpose(), d: self.d.iter().map(|a| a.transpose()).collect() }
    }

    pub fn try_inverse(&self) -> Option<JetMat> {
        let inv = self.val.clone().try_inverse()?;
        let d = self.d.iter().map(|a| -(&inv * a * &inv)).collect();
        Some(JetMat { val: inv, d })
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> JetMat {
        JetMat {
            val: self.val.view((r0, c0), (nr, nc)).into_owned(),
            d: self.d.iter().map(|a| a.view((r0, c0), (nr, nc)).into_owned()).collect(),
        }
    }

    pub fn column(&self, j: usize) -> JetMat {
        self.block(0, j, self.val.nrows(), 1)
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &JetMat, b: &JetMat, cc: &JetMat, d: &JetMat) -> JetMat {
        let glue = |a: &CMat, b: &CMat, cc: &CMat, d: &CMat| {
            let (r1, c1) = a.shape();
            let (r2, c2) = d.shape();
            let mut m = CMat::zeros(r1 + r2, c1 + c2);
            m.view_mut((0, 0), (r1, c1)).copy_from(a);
            m.view_mut((0, c1), (r1, c2)).copy_from(b);
            m.view_mut((r1, 0), (r2, c1)).copy_from(cc);
            m.view_mut((r1, c1), (r2, c2)).copy_from(d);
            m
        };
        JetMat {
            val: glue(&a.val, &b.val, &cc.val, &d.val),
            d: (0..a.nvars()).map(|k| glue(&a.d[k], &b.d[k], &cc.d[k], &d.d[k])).collect(),
        }
    }

    /// Stacks two column jets vertically.
    pub fn vstack(top: &JetMat, bottom: &JetMat) -> JetMat {
        let stack = |a: &CMat, b: &CMat| {
            let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
            m.view_mut((0, 0), a.shape()).copy_from(a);
            m.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
            m
        };
        JetMat {
            val: stack(&top.val, &bottom.val),
            d: top.d.iter().zip(&bottom.d).map(|(a, b)| stack(a, b)).collect(),
        }
    }

    /// Directional derivative of the value along the complex vector `v`.
    pub fn derivative_along(&self, v: &CMat) -> CMat {
        let mut out = CMat::zeros(self.val.nrows(), self.val.ncols());
        for (k, dk) in self.d.iter().enumerate() {
            out += dk * v[(k, 0)];
        }
        out
    }
}

/// A matrix of expressions compiled for repeated jet evaluation.
#[derive(Clone, Debug)]
pub struct CompiledMatrix {
    rows: usize,
    cols: usize,
    tape: Tape,
}

impl CompiledMatrix {
    pub fn new(rows: usize, cols: usize, entries: &[ScalarExpr]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        CompiledMatrix { rows, cols, tape: Tape::compile(entries) }
    }

    pub fn eval(&self, p: &[f64]) -> Result<JetMat, EvalError> {
        let n = p.len();
        let mut v = Vec::new();
        let mut g = Vec::new();
        self.tape.eval(p, &mut v, &mut g)?;
        let val = CMat::from_fn(self.rows, self.cols, |i, j| c(v[i * self.cols + j]));
        let d = (0..n)
            .map(|k| CMat::from_fn(self.rows, self.cols, |i, j| c(g[(i * self.cols + j) * n + k])))
            .collect();
        Ok(JetMat { val, d })
    }
}

/// Sup-norm of a complex matrix.
pub fn sup_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
