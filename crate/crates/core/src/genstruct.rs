//! Generalized F-structures `Φ = [[A, ♯π], [♭σ, −ᵗA]]` on the big tangent bundle.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::big::BigSection;
use crate::domain::CoordinateDomain;
use crate::expr::{EvalError, ScalarExpr};
use crate::jet::{c, sup_norm, CMat, CompiledMatrix, JetMat, C64, I};
use crate::point;
use crate::report::{combine, run_sampled, CheckError, CheckReport, PointError, RunOptions};
use crate::tensor::{BivectorField, EndField, ExprMatrix, OneFormField, TwoFormField, VectorField};

/// Relative singular-value cutoff for ranks.
pub const RANK_TOL: f64 = 1e-8;

/// Points sampled when validating constructor preconditions.
pub const PRECHECK_SAMPLES: usize = 32;

/// Tolerance for constructor preconditions.
pub const PRECHECK_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("identity {name} violated: residual {residual:.3e} at {point:?}")]
    Condition { name: String, residual: f64, point: Vec<f64> },
    #[error("restricted form is degenerate at {point:?}")]
    Degenerate { point: Vec<f64> },
    #[error(transparent)]
    Check(#[from] CheckError),
}

#[derive(Clone, Debug)]
pub struct GeneralizedF {
    pub a: EndField,
    pub pi: BivectorField,
    pub sigma: TwoFormField,
    pub domain: CoordinateDomain,
    phi: ExprMatrix,
    compiled: CompiledMatrix,
}

/// Pointwise spectral data of `Φ`.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub pr_e: CMat,
    pub pr_ebar: CMat,
    pub pr_s: CMat,
    pub pr_l: CMat,
    /// Complex rank of `E`.
    pub k: usize,
    pub dim_s: usize,
    /// Negative index of the pairing on `S`.
    pub q: usize,
}

/// `[[A, B], [C, D]]` block assembly for the big-bundle matrix of a triple.
pub fn phi_matrix(a: &EndField, pi: &BivectorField, sigma: &TwoFormField) -> ExprMatrix {
    ExprMatrix::from_blocks(&a.0, &pi.sharp(), &sigma.flat(), &a.0.transpose().neg())
}

impl GeneralizedF {
    pub fn new(a: EndField, pi: BivectorField, sigma: TwoFormField, domain: CoordinateDomain) -> Result<Self, StructError> {
        let m = domain.dim;
        for (name, d) in [("A", a.dim()), ("pi", pi.dim()), ("sigma", sigma.dim())] {
            if d != m {
                return Err(StructError::Shape(format!("{name} has dimension {d}, domain has {m}")));
            }
        }
        let phi = phi_matrix(&a, &pi, &sigma);
        let compiled = phi.compile();
        Ok(GeneralizedF { a, pi, sigma, domain, phi, compiled })
    }

    pub fn zero(domain: CoordinateDomain) -> Self {
        let m = domain.dim;
        Self::new(EndField::zeros(m), BivectorField::zeros(m), TwoFormField::zeros(m), domain).expect("shapes agree")
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.phi
    }

    pub fn phi_at(&self, p: &[f64]) -> Result<JetMat, EvalError> {
        self.compiled.eval(p)
    }

    /// `Φ(X, α) = (AX + ♯πα, ♭σX − ᵗAα)` as expression fields.
    pub fn apply_phi(&self, s: &BigSection) -> BigSection {
        let m = self.dim();
        let apply = |x: &VectorField, a: &OneFormField| {
            let mut col = x.0.clone();
            col.extend(a.0.iter().cloned());
            let out = self.phi.mat_vec(&col);
            (VectorField(out[..m].to_vec()), OneFormField(out[m..].to_vec()))
        };
        let (xr, ar) = apply(&s.x_re, &s.a_re);
        let (xi, ai) = apply(&s.x_im, &s.a_im);
        BigSection::complex(xr, xi, ar, ai)
    }

    /// `Ã = A² + ♯π♭σ`, the tangent block of `Φ²`.
    pub fn tilde_a(&self) -> EndField {
        EndField(self.a.0.matmul(&self.a.0).add(&self.pi.sharp().matmul(&self.sigma.flat())))
    }

    /// `♯π̃ = A♯π − ♯πᵗA` and `♭σ̃ = ♭σA − ᵗA♭σ`; both vanish for a classical square.
    pub fn tilde_pi_sigma(&self) -> (ExprMatrix, ExprMatrix) {
        let a = &self.a.0;
        let sp = self.pi.sharp();
        let fs = self.sigma.flat();
        (a.matmul(&sp).sub(&sp.matmul(&a.transpose())), fs.matmul(a).sub(&a.transpose().matmul(&fs)))
    }

    /// `Π = −A² − ♯π♭σ`, a projector when `Φ` has classical square.
    pub fn square_projector(&self) -> EndField {
        EndField(self.tilde_a().0.neg())
    }

    /// Yano identity `Φ³ + Φ = 0` and g-skewness `ᵗΦJ + JΦ = 0`.
    pub fn check_axioms(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.dim();
        let j = neutral_gram(m) * c(2.0);
        run_sampled("axioms", &self.domain, opts, |p| {
            let phi = self.phi_at(p)?.val;
            let yano = &phi * &phi * &phi + &phi;
            let skew = phi.transpose() * &j + &j * &phi;
            Ok(sup_norm(&yano).max(sup_norm(&skew)))
        })
    }

    pub fn eigen_data(&self, p: &[f64]) -> Result<EigenData, EvalError> {
        Ok(eigen_data_of(&self.phi_at(p)?.val))
    }

    /// Projector algebra residuals together with constancy of `k` and `q`.
    /// Returns the report and the common `(k, q)`.
    pub fn check_projectors(&self, opts: &RunOptions) -> Result<(CheckReport, (usize, usize)), CheckError> {
        let mut ranks: Option<(usize, usize, Vec<f64>)> = None;
        let rep = run_sampled("projectors", &self.domain, opts, |p| {
            let phi = self.phi_at(p)?.val;
            let e = eigen_data_of(&phi);
            match &ranks {
                None => ranks = Some((e.k, e.q, p.to_vec())),
                Some((k, q, p0)) if (*k, *q) != (e.k, e.q) => {
                    return Err(PointError::Fatal(CheckError::Structure(format!(
                        "rank data (k, q) = ({k}, {q}) at {p0:?} but ({}, {}) at {p:?}",
                        e.k, e.q
                    ))))
                }
                _ => {}
            }
            Ok(projector_residual(&phi, &e))
        })?;
        let (k, q, _) = ranks.expect("at least one sample");
        Ok((rep, (k, q)))
    }

    /// Courant–Nijenhuis torsion as expression fields.
    pub fn nijenhuis_torsion(&self, a: &BigSection, b: &BigSection) -> BigSection {
        use crate::big::courant_bracket as br;
        let pa = self.apply_phi(a);
        let pb = self.apply_phi(b);
        br(&pa, &pb)
            .sub(&self.apply_phi(&br(&pa, b)))
            .sub(&self.apply_phi(&br(a, &pb)))
            .add(&self.apply_phi(&self.apply_phi(&br(a, b))))
    }

    /// Concomitant `S_Φ` as expression fields.
    pub fn s_concomitant(&self, a: &BigSection, b: &BigSection) -> BigSection {
        use crate::big::courant_bracket as br;
        let pa = self.apply_phi(a);
        let pb = self.apply_phi(b);
        let ppa = self.apply_phi(&pa);
        let ppb = self.apply_phi(&pb);
        br(&pa, &pb)
            .sub(&br(&ppa, &ppb))
            .add(&self.apply_phi(&br(&pa, &ppb)))
            .add(&self.apply_phi(&br(&ppa, &pb)))
    }

    /// `S_Φ` on all pairs of constant basis sections.
    pub fn check_integrability(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.dim();
        run_sampled("integrability", &self.domain, opts, |p| {
            let phi = self.phi_at(p)?;
            let phi2 = phi.mul(&phi);
            let mut worst: f64 = 0.0;
            for i in 0..2 * m {
                for j in (i + 1)..2 * m {
                    let s = s_concomitant_cols(&phi, &phi2, i, j);
                    worst = worst.max(sup_norm(&s));
                }
            }
            Ok(worst)
        })
    }

    /// `N_Φ(pr_L e_i, pr_S e_j)` over basis sections.
    pub fn check_ls_torsion(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.dim();
        run_sampled("ls-torsion", &self.domain, opts, |p| {
            let phi = self.phi_at(p)?;
            let phi2 = phi.mul(&phi);
            let pr_l = phi2.neg();
            let pr_s = JetMat::identity(2 * m, m).add(&phi2);
            let mut worst: f64 = 0.0;
            for i in 0..2 * m {
                let a = pr_l.column(i);
                let na = sup_norm(&a.val);
                for j in 0..2 * m {
                    let b = pr_s.column(j);
                    let nb = sup_norm(&b.val);
                    if na < 1e-12 || nb < 1e-12 {
                        continue;
                    }
                    let n = nijenhuis_at(&phi, &a, &b);
                    worst = worst.max(sup_norm(&n) / (na * nb));
                }
            }
            Ok(worst)
        })
    }

    /// Residuals of a complementary-frame description of `Φ`: frame lengths,
    /// mutual orthogonality, `ΦZ = 0` and the reconstruction of `Φ²`.
    pub fn check_complementary_frames(
        &self,
        negative: &[BigSection],
        positive: &[BigSection],
        opts: &RunOptions,
    ) -> Result<CheckReport, CheckError> {
        let m = self.dim();
        let neg: Vec<_> = negative.iter().map(|s| s.compile()).collect();
        let pos: Vec<_> = positive.iter().map(|s| s.compile()).collect();
        let gg = neutral_gram(m);
        run_sampled("frames", &self.domain, opts, |p| {
            let phi = self.phi_at(p)?.val;
            let mut frames = Vec::new();
            for s in &neg {
                frames.push((s.eval(p)?.val, -1.0));
            }
            for s in &pos {
                frames.push((s.eval(p)?.val, 1.0));
            }
            let mut worst: f64 = 0.0;
            let mut recon = -CMat::identity(2 * m, 2 * m);
            for (a, (za, sa)) in frames.iter().enumerate() {
                for (b, (zb, _)) in frames.iter().enumerate() {
                    let g = point::pairing(za, zb);
                    let target = if a == b { c(*sa) } else { c(0.0) };
                    worst = worst.max((g - target).norm());
                }
                worst = worst.max(sup_norm(&(&phi * za)));
                recon += (za * (&gg * za).transpose()) * c(*sa);
            }
            worst = worst.max(sup_norm(&(&phi * &phi - recon)));
            Ok(worst)
        })
    }

    /// B-field transform `(X, α) ↦ (X, α + i(X)B)` conjugating `Φ`.
    pub fn b_field(&self, b: &TwoFormField) -> GeneralizedF {
        let m = self.dim();
        let id = ExprMatrix::identity(m);
        let z = ExprMatrix::zeros(m, m);
        let t = ExprMatrix::from_blocks(&id, &z, &b.flat(), &id);
        let tinv = ExprMatrix::from_blocks(&id, &z, &b.flat().neg(), &id);
        let phi = t.matmul(&self.phi).matmul(&tinv);
        let a = EndField(phi.block(0, 0, m, m));
        let pi = BivectorField(phi.block(0, m, m, m).transpose());
        let sigma = TwoFormField(phi.block(m, 0, m, m).transpose());
        GeneralizedF::new(a, pi, sigma, self.domain.clone()).expect("shapes agree")
    }

    /// Classical F-structure `A = F`, `π = σ = 0`, after checking `F³ + F = 0`.
    pub fn from_classical_f(f: EndField, domain: CoordinateDomain) -> Result<Self, StructError> {
        let m = domain.dim;
        let g = GeneralizedF::new(f, BivectorField::zeros(m), TwoFormField::zeros(m), domain)?;
        precheck(&g.domain, "F³+F=0", &g.a.0.compile(), |f| &f.val * &f.val * &f.val + &f.val)?;
        Ok(g)
    }

    /// Skew-classical structure of a pair `(𝒱, σ)` with `σ|𝒱` non-degenerate.
    ///
    /// With `S_ab = σ(v_a, v_b)` and `w_b(X) = σ(v_b, X)` the entries are
    /// `π = −Σ (S⁻¹)^{ab} v_a ∧⊗ v_b` and `σ'(X, Y) = −w(X)ᵀ S⁻¹ w(Y)`.
    pub fn from_v_sigma(vs: &[VectorField], sigma: &TwoFormField, domain: CoordinateDomain) -> Result<Self, StructError> {
        let m = domain.dim;
        let k = vs.len();
        if vs.iter().any(|v| v.dim() != m) || sigma.dim() != m {
            return Err(StructError::Shape("V and sigma must match the domain dimension".into()));
        }
        // columns v_a
        let vmat = ExprMatrix::from_fn(m, k, |i, a| vs[a].0[i].clone());
        let s = vmat.transpose().matmul(&sigma.0).matmul(&vmat);
        check_nondegenerate(&s, &domain)?;
        let sinv = s.inverse();
        let pi = vmat.matmul(&sinv).matmul(&vmat.transpose()).neg();
        // w as k×m: w_b(X) = Σ v_b^i σ_ij X^j
        let w = vmat.transpose().matmul(&sigma.0);
        let sig = w.transpose().matmul(&sinv).matmul(&w).neg();
        GeneralizedF::new(EndField::zeros(m), BivectorField(pi), TwoFormField(sig), domain)
    }

    /// Dual skew-classical structure of a pair `(Σ, π)` with `π|Σ` non-degenerate.
    pub fn from_sigma_pi(forms: &[OneFormField], pi: &BivectorField, domain: CoordinateDomain) -> Result<Self, StructError> {
        let m = domain.dim;
        let k = forms.len();
        if forms.iter().any(|v| v.dim() != m) || pi.dim() != m {
            return Err(StructError::Shape("Sigma and pi must match the domain dimension".into()));
        }
        let smat = ExprMatrix::from_fn(m, k, |i, a| forms[a].0[i].clone());
        let t = smat.transpose().matmul(&pi.0).matmul(&smat);
        check_nondegenerate(&t, &domain)?;
        let tinv = t.inverse();
        let sigma = smat.matmul(&tinv).matmul(&smat.transpose()).neg();
        let w = smat.transpose().matmul(&pi.0);
        let pi2 = w.transpose().matmul(&tinv).matmul(&w).neg();
        GeneralizedF::new(EndField::zeros(m), BivectorField(pi2), TwoFormField(sigma), domain)
    }
}

/// Gram matrix `½[[0, I], [I, 0]]` of the neutral pairing.
pub fn neutral_gram(m: usize) -> CMat {
    let mut g = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        g[(i, m + i)] = c(0.5);
        g[(m + i, i)] = c(0.5);
    }
    g
}

/// Projectors by the polynomial formulas and ranks by singular values.
pub fn eigen_data_of(phi: &CMat) -> EigenData {
    let n2 = phi.nrows();
    let m = n2 / 2;
    let phi2 = phi * phi;
    let id = CMat::identity(n2, n2);
    let pr_e = (&phi2 + phi * I) * c(-0.5);
    let pr_ebar = (&phi2 - phi * I) * c(-0.5);
    let pr_s = &id + &phi2;
    let pr_l = -&phi2;
    let k = rank(&pr_e);
    let q = negative_index(&pr_s, m);
    EigenData { k, dim_s: 2 * (m - k.min(m)), q, pr_e, pr_ebar, pr_s, pr_l }
}

/// Rank of a projector. Nonzero singular values of a projector are at least
/// one, so the relative tolerance is floored at one to ignore rounding noise
/// in a vanishing projector.
pub fn rank(m: &CMat) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max).max(1.0);
    sv.iter().filter(|s| **s > RANK_TOL * top).count()
}

/// Negative inertia of the pairing on the image of a real projector.
fn negative_index(pr_s: &CMat, m: usize) -> usize {
    let re: DMatrix<f64> = pr_s.map(|z| z.re);
    let svd = re.svd(true, false);
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(1.0);
    let u = svd.u.expect("requested U");
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > RANK_TOL * top).collect();
    let basis = DMatrix::from_fn(2 * m, cols.len(), |i, j| u[(i, cols[j])]);
    let g = neutral_gram(m).map(|z| z.re);
    let gram = basis.transpose() * g * &basis;
    if cols.is_empty() {
        return 0;
    }
    let eig = gram.symmetric_eigen().eigenvalues;
    let scale = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    eig.iter().filter(|e| **e < -RANK_TOL * scale).count()
}

fn projector_residual(phi: &CMat, e: &EigenData) -> f64 {
    let n = phi.nrows();
    let id = CMat::identity(n, n);
    [
        sup_norm(&(&e.pr_e * &e.pr_e - &e.pr_e)),
        sup_norm(&(&e.pr_ebar * &e.pr_ebar - &e.pr_ebar)),
        sup_norm(&(&e.pr_s * &e.pr_s - &e.pr_s)),
        sup_norm(&(&e.pr_l * &e.pr_l - &e.pr_l)),
        sup_norm(&(&e.pr_e * &e.pr_s)),
        sup_norm(&(&e.pr_e * &e.pr_ebar)),
        sup_norm(&(&e.pr_e + &e.pr_ebar + &e.pr_s - id)),
        sup_norm(&(&e.pr_l - &e.pr_e - &e.pr_ebar)),
        sup_norm(&(phi * &e.pr_e - &e.pr_e * I)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// `S_Φ(e_i, e_j)` for constant basis sections from jets of `Φ` and `Φ²`.
fn s_concomitant_cols(phi: &JetMat, phi2: &JetMat, i: usize, j: usize) -> CMat {
    let (pa, pb) = (phi.column(i), phi.column(j));
    let (ppa, ppb) = (phi2.column(i), phi2.column(j));
    point::courant(&pa, &pb) - point::courant(&ppa, &ppb)
        + &phi.val * (point::courant(&pa, &ppb) + point::courant(&ppa, &pb))
}

/// `S_Φ(A, B)` from jets of `Φ` and of the two sections.
pub fn s_concomitant_at(phi: &JetMat, a: &JetMat, b: &JetMat) -> CMat {
    let (pa, pb) = (phi.mul(a), phi.mul(b));
    let (ppa, ppb) = (phi.mul(&pa), phi.mul(&pb));
    point::courant(&pa, &pb) - point::courant(&ppa, &ppb)
        + &phi.val * (point::courant(&pa, &ppb) + point::courant(&ppa, &pb))
}

/// `N_Φ(A, B) = [ΦA,ΦB] − Φ[ΦA,B] − Φ[A,ΦB] + Φ²[A,B]` from jets.
pub fn nijenhuis_at(phi: &JetMat, a: &JetMat, b: &JetMat) -> CMat {
    let (pa, pb) = (phi.mul(a), phi.mul(b));
    let p = &phi.val;
    point::courant(&pa, &pb) - p * (point::courant(&pa, b) + point::courant(a, &pb)) + p * p * point::courant(a, b)
}

/// Samples `residual` on a compiled field and fails on the first violation.
pub(crate) fn precheck<F>(domain: &CoordinateDomain, name: &str, field: &CompiledMatrix, residual: F) -> Result<(), StructError>
where
    F: Fn(&JetMat) -> CMat,
{
    let opts = RunOptions { samples: PRECHECK_SAMPLES, tol: PRECHECK_TOL, timing: false, ..Default::default() };
    let rep = run_sampled(name, domain, &opts, |p| Ok(sup_norm(&residual(&field.eval(p)?))))?;
    if !rep.pass {
        return Err(StructError::Condition { name: name.into(), residual: rep.residual, point: rep.point });
    }
    Ok(())
}

fn check_nondegenerate(s: &ExprMatrix, domain: &CoordinateDomain) -> Result<(), StructError> {
    let compiled = s.compile();
    let mut sampler = domain.sampler(0x5eed);
    for _ in 0..PRECHECK_SAMPLES {
        let p = sampler.next_point();
        let v = compiled.eval(&p).map_err(CheckError::from)?.val;
        let sv = v.svd(false, false).singular_values;
        let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if sv.is_empty() || lo < 1e-10 {
            return Err(StructError::Degenerate { point: p });
        }
    }
    Ok(())
}

/// Integrability of a classical F-structure through the single identity
/// `N_F(X,Y) = [F²X,F²Y] − F([X,FY] + [F²X,FY]) + F²([F²X,Y] + [F²X,F²Y] + [X,Y])`
/// on coordinate vector fields.
pub fn check_classical_crf(f: &EndField, domain: &CoordinateDomain, opts: &RunOptions) -> Result<CheckReport, CheckError> {
    let m = domain.dim;
    let compiled = f.0.compile();
    run_sampled("classical-crf", domain, opts, |p| {
        let fj = compiled.eval(p)?;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = JetMat::unit(m, i, m);
                let y = JetMat::unit(m, j, m);
                worst = worst.max(sup_norm(&normal_cr_at(&fj, &x, &y)));
            }
        }
        Ok(worst)
    })
}

/// Residual of the single CRF identity for jets of `F`, `X` and `Y`.
pub fn normal_cr_at(f: &JetMat, x: &JetMat, y: &JetMat) -> CMat {
    use crate::point::lie_bracket as br;
    let f2 = f.mul(f);
    let (fx, fy) = (f.mul(x), f.mul(y));
    let (f2x, f2y) = (f2.mul(x), f2.mul(y));
    let fv = &f.val;
    let f2v = &f2.val;
    let nf = br(&fx, &fy) - fv * (br(&fx, y) + br(x, &fy)) + f2v * br(x, y);
    let rhs = br(&f2x, &f2y) - fv * (br(x, &fy) + br(&f2x, &fy)) + f2v * (br(&f2x, y) + br(&f2x, &f2y) + br(x, y));
    nf - rhs
}

/// Integrability data of a graph structure `{(X, i(X)θ) : X ∈ F}`.
#[derive(Clone, Debug)]
pub struct GraphReport {
    pub isotropy: CheckReport,
    pub foliation: CheckReport,
    pub closed: CheckReport,
}

impl GraphReport {
    pub fn pass(&self) -> bool {
        self.isotropy.pass && self.foliation.pass && self.closed.pass
    }

    pub fn combined(&self) -> CheckReport {
        combine("graph", &[self.isotropy.clone(), self.foliation.clone(), self.closed.clone()])
    }
}

/// Component of `v` outside the column span of `basis`, via least squares.
fn outside_span(basis: &CMat, v: &CMat) -> CMat {
    if basis.ncols() == 0 {
        return v.clone();
    }
    let gram = basis.adjoint() * basis;
    match gram.try_inverse() {
        Some(inv) => v - basis * (inv * (basis.adjoint() * v)),
        None => v.clone(),
    }
}

/// Graph of `♭θ` over the subbundle spanned by `frame`: isotropy, involutivity
/// of the frame and `dθ(X1, X2, ·) = 0`.
pub fn graph_structures(
    frame: &[VectorField],
    theta: &TwoFormField,
    domain: &CoordinateDomain,
    opts: &RunOptions,
) -> Result<GraphReport, CheckError> {
    let m = domain.dim;
    let fc: Vec<CompiledMatrix> = frame.iter().map(|v| ExprMatrix::column_vector(&v.0).compile()).collect();
    let tc = theta.0.compile();
    let jets = |p: &[f64]| -> Result<Vec<JetMat>, EvalError> { fc.iter().map(|c| c.eval(p)).collect() };
    let isotropy = run_sampled("graph-isotropy", domain, opts, |p| {
        let t = tc.eval(p)?.val;
        let fs = jets(p)?;
        let mut worst: f64 = 0.0;
        for a in &fs {
            for b in &fs {
                // g((X, ♭θX), (Y, ♭θY)) = ½(θ(X,Y) + θ(Y,X))
                let g = ((a.val.transpose() * &t * &b.val)[(0, 0)] + (b.val.transpose() * &t * &a.val)[(0, 0)]) * 0.5;
                worst = worst.max(g.norm());
            }
        }
        Ok(worst)
    })?;
    let foliation = run_sampled("graph-foliation", domain, opts, |p| {
        let fs = jets(p)?;
        let basis = CMat::from_fn(m, fs.len(), |i, j| fs[j].val[(i, 0)]);
        let mut worst: f64 = 0.0;
        for a in 0..fs.len() {
            for b in (a + 1)..fs.len() {
                let br = point::lie_bracket(&fs[a], &fs[b]);
                let norm = sup_norm(&fs[a].val) * sup_norm(&fs[b].val);
                worst = worst.max(sup_norm(&outside_span(&basis, &br)) / norm.max(1e-300));
            }
        }
        Ok(worst)
    })?;
    let closed = run_sampled("graph-dtheta", domain, opts, |p| {
        let dt = point::d2(&tc.eval(p)?);
        let fs = jets(p)?;
        let mut worst: f64 = 0.0;
        for a in 0..fs.len() {
            for b in (a + 1)..fs.len() {
                let w = dt.contract2(&fs[a].val, &fs[b].val);
                let norm = sup_norm(&fs[a].val) * sup_norm(&fs[b].val);
                worst = worst.max(sup_norm(&w) / norm.max(1e-300));
            }
        }
        Ok(worst)
    })?;
    Ok(GraphReport { isotropy, foliation, closed })
}

/// `[P,P]^{ijk}` at a point from a jet of `P`.
pub fn schouten_pp_at(p: &JetMat) -> point::Arr3 {
    let n = p.nvars();
    let v = &p.val;
    let term = |i: usize, j: usize, k: usize| {
        let mut s = c(0.0);
        for l in 0..n {
            s += v[(i, l)] * p.d[l][(j, k)];
        }
        s * 2.0
    };
    let mut out = point::Arr3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.set(i, j, k, term(i, j, k) + term(j, k, i) + term(k, i, j));
            }
        }
    }
    out
}

/// `{α, β}_P` at a point from column jets of the forms and a jet of `P`.
pub fn p_bracket_at(a: &JetMat, b: &JetMat, p: &JetMat) -> CMat {
    let pa = p.transpose().mul(a);
    let pb = p.transpose().mul(b);
    let pab = a.transpose().mul(p).mul(b);
    let dpab = CMat::from_fn(a.nvars(), 1, |i, _| pab.d[i][(0, 0)]);
    point::lie1(&pa, b) - point::lie1(&pb, a) - dpab
}

/// Integrability of the graph of `♯P` over `Σ`: closure of `Σ` under the
/// bracket of one-forms and `[P,P](α1, α2, ·) = 0`.
pub fn graph_p_structures(
    forms: &[OneFormField],
    p: &BivectorField,
    domain: &CoordinateDomain,
    opts: &RunOptions,
) -> Result<(CheckReport, CheckReport), CheckError> {
    let m = domain.dim;
    let fc: Vec<CompiledMatrix> = forms.iter().map(|v| ExprMatrix::column_vector(&v.0).compile()).collect();
    let pc = p.0.compile();
    let closure = run_sampled("graph-p-closure", domain, opts, |pt| {
        let pj = pc.eval(pt)?;
        let fs: Vec<JetMat> = fc.iter().map(|c| c.eval(pt)).collect::<Result<_, _>>()?;
        let basis = CMat::from_fn(m, fs.len(), |i, j| fs[j].val[(i, 0)]);
        let mut worst: f64 = 0.0;
        for a in 0..fs.len() {
            for b in (a + 1)..fs.len() {
                let br = p_bracket_at(&fs[a], &fs[b], &pj);
                let norm = sup_norm(&fs[a].val) * sup_norm(&fs[b].val);
                worst = worst.max(sup_norm(&outside_span(&basis, &br)) / norm.max(1e-300));
            }
        }
        Ok(worst)
    })?;
    let schouten = run_sampled("graph-p-schouten", domain, opts, |pt| {
        let s = schouten_pp_at(&pc.eval(pt)?);
        let fs: Vec<JetMat> = fc.iter().map(|c| c.eval(pt)).collect::<Result<_, _>>()?;
        let mut worst: f64 = 0.0;
        for a in 0..fs.len() {
            for b in (a + 1)..fs.len() {
                let norm = sup_norm(&fs[a].val) * sup_norm(&fs[b].val);
                worst = worst.max(sup_norm(&s.contract2(&fs[a].val, &fs[b].val)) / norm.max(1e-300));
            }
        }
        Ok(worst)
    })?;
    Ok((closure, schouten))
}

/// Almost contact data `(P, θ, F, Z_a, ξ^a)` of codimension `h`.
#[derive(Clone, Debug)]
pub struct AlmostContact {
    pub p: BivectorField,
    pub theta: TwoFormField,
    pub f: EndField,
    pub z: Vec<VectorField>,
    pub xi: Vec<OneFormField>,
    pub domain: CoordinateDomain,
}

impl AlmostContact {
    pub fn h(&self) -> usize {
        self.z.len()
    }

    /// Checks every defining identity and names the first one that fails.
    pub fn validate(&self) -> Result<(), StructError> {
        let m = self.domain.dim;
        let h = self.h();
        if self.xi.len() != h {
            return Err(StructError::Shape(format!("{} vector fields Z but {} forms xi", h, self.xi.len())));
        }
        let zm = ExprMatrix::from_fn(m, h, |i, a| self.z[a].0[i].clone());
        let xm = ExprMatrix::from_fn(m, h, |i, a| self.xi[a].0[i].clone());
        let f = &self.f.0;
        let p = &self.p.0;
        let t = &self.theta.0;
        let sharp_flat = self.p.sharp().matmul(&self.theta.flat());
        let square = f.matmul(f).add(&ExprMatrix::identity(m)).add(&sharp_flat).sub(&zm.matmul(&xm.transpose()));
        let checks: Vec<(&str, ExprMatrix)> = vec![
            ("ξ^a(Z_b)=δ^a_b", xm.transpose().matmul(&zm).sub(&ExprMatrix::identity(h))),
            ("P(α∘F,β)=P(α,β∘F)", f.matmul(p).sub(&p.matmul(&f.transpose()))),
            ("θ(FX,Y)=θ(X,FY)", f.transpose().matmul(t).sub(&t.matmul(f))),
            ("F(Z_a)=0", f.matmul(&zm)),
            ("ξ^a∘F=0", f.transpose().matmul(&xm)),
            ("i(Z_a)θ=0", t.transpose().matmul(&zm)),
            ("i(ξ^a)P=0", p.transpose().matmul(&xm)),
            ("F²=−Id−♯P♭θ+Σξ^a⊗Z_a", square),
        ];
        for (name, mat) in checks {
            if mat.nrows() == 0 || mat.ncols() == 0 {
                continue;
            }
            precheck(&self.domain, name, &mat.compile(), |j| j.val.clone())?;
        }
        Ok(())
    }

    /// The structure `A = F, π = P, σ = θ`.
    pub fn to_generalized(&self) -> Result<GeneralizedF, StructError> {
        self.validate()?;
        GeneralizedF::new(self.f.clone(), self.p.clone(), self.theta.clone(), self.domain.clone())
    }

    /// Frames `(Z_a, −ξ^a)` of length −1 and `(Z_a, ξ^a)` of length +1.
    pub fn frames(&self) -> (Vec<BigSection>, Vec<BigSection>) {
        let neg = self
            .z
            .iter()
            .zip(&self.xi)
            .map(|(z, x)| BigSection::real(z.clone(), x.scale(&ScalarExpr::constant(-1.0))))
            .collect();
        let pos = self.z.iter().zip(&self.xi).map(|(z, x)| BigSection::real(z.clone(), x.clone())).collect();
        (neg, pos)
    }

    /// Generalized almost complex structure on the product with `R^h`:
    /// `A' = F`, `π' = P + Σ Z_a∧∂t^a`, `σ' = θ + Σ ξ^a∧dt^a`.
    pub fn lift_to_product(&self) -> GeneralizedF {
        let m = self.domain.dim;
        let h = self.h();
        let n = m + h;
        let embed = |e: &ExprMatrix| ExprMatrix::from_fn(n, n, |i, j| if i < m && j < m { e[(i, j)].clone() } else { ScalarExpr::zero() });
        let a = embed(&self.f.0);
        let mut pi = embed(&self.p.0);
        let mut sigma = embed(&self.theta.0);
        for k in 0..h {
            let t = m + k;
            for i in 0..m {
                let z = &self.z[k].0[i];
                pi[(i, t)] = pi[(i, t)].add(z);
                pi[(t, i)] = pi[(t, i)].sub(z);
                let x = &self.xi[k].0[i];
                sigma[(i, t)] = sigma[(i, t)].add(x);
                sigma[(t, i)] = sigma[(t, i)].sub(x);
            }
        }
        GeneralizedF::new(EndField(a), BivectorField(pi), TwoFormField(sigma), self.domain.with_factors(h))
            .expect("shapes agree")
    }

    /// Normality: integrability of the product lift.
    pub fn check_normality(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let mut rep = self.lift_to_product().check_integrability(opts)?;
        rep.check = "normality".into();
        Ok(rep)
    }
}

/// Pointwise `Φ` value of a structure at `p`, real part only.
pub fn phi_value(phi: &GeneralizedF, p: &[f64]) -> Result<DMatrix<f64>, EvalError> {
    Ok(phi.phi_at(p)?.val.map(|z: C64| z.re))
}
