//! Generalized Riemannian metrics `G ↔ (γ, ψ)`, their compatibility with a
//! generalized F-structure, the quadruple `(γ, ψ, F₊, F₋)` and the CRFK criteria.

use nalgebra::DMatrix;

use crate::big::BigSection;
use crate::domain::CoordinateDomain;
use crate::expr::EvalError;
use crate::genstruct::{check_classical_crf, neutral_gram, normal_cr_at, GeneralizedF, StructError};
use crate::jet::{c, sup_norm, CMat, CompiledMatrix, JetMat, I};
use crate::point;
use crate::report::{combine, run_sampled, CheckError, CheckReport, PointError, RunOptions};
use crate::tensor::{BivectorField, EndField, ExprMatrix, MetricField, OneFormField, TwoFormField, VectorField};

/// Smallest eigenvalue accepted as positive.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Cutoff below which a projected section is treated as zero, relative to
/// the largest column of its projector but never below absolute scale.
pub const SECTION_CUTOFF: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct GeneralizedMetric {
    pub gamma: MetricField,
    pub psi: TwoFormField,
    pub domain: CoordinateDomain,
    gamma_inv: ExprMatrix,
    phi: ExprMatrix,
    sharp: ExprMatrix,
    compiled: CompiledMatrix,
}

impl GeneralizedMetric {
    pub fn new(gamma: MetricField, psi: TwoFormField, domain: CoordinateDomain) -> Result<Self, StructError> {
        let m = domain.dim;
        if gamma.dim() != m || psi.dim() != m {
            return Err(StructError::Shape(format!("metric fields must have dimension {m}")));
        }
        let gamma_inv = gamma.0.inverse();
        // φ = −♯γ♭ψ
        let phi = gamma_inv.matmul(&psi.flat()).neg();
        let beta = gamma.0.matmul(&ExprMatrix::identity(m).sub(&phi.matmul(&phi)));
        let sharp = ExprMatrix::from_blocks(&phi, &gamma_inv, &beta, &phi.transpose());
        let compiled = sharp.compile();
        Ok(GeneralizedMetric { gamma, psi, domain, gamma_inv, phi, sharp, compiled })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn phi(&self) -> EndField {
        EndField(self.phi.clone())
    }

    pub fn gamma_inv(&self) -> &ExprMatrix {
        &self.gamma_inv
    }

    /// `β = γ(Id − φ²)`.
    pub fn beta(&self) -> MetricField {
        let m = self.dim();
        MetricField(self.sharp.block(m, 0, m, m))
    }

    /// Matrix of `♯G = [[φ, ♯γ], [♭β, ᵗφ]]`.
    pub fn sharp_matrix(&self) -> &ExprMatrix {
        &self.sharp
    }

    pub fn sharp_at(&self, p: &[f64]) -> Result<JetMat, EvalError> {
        self.compiled.eval(p)
    }

    pub fn sharp_g(&self, s: &BigSection) -> BigSection {
        let m = self.dim();
        let apply = |x: &VectorField, a: &OneFormField| {
            let mut col = x.0.clone();
            col.extend(a.0.iter().cloned());
            let out = self.sharp.mat_vec(&col);
            (VectorField(out[..m].to_vec()), OneFormField(out[m..].to_vec()))
        };
        let (xr, ar) = apply(&s.x_re, &s.a_re);
        let (xi, ai) = apply(&s.x_im, &s.a_im);
        BigSection::complex(xr, xi, ar, ai)
    }

    /// Matrix of `♭_{ψ±γ}`.
    pub fn flat_pm(&self, sign: f64) -> ExprMatrix {
        self.psi.flat().add(&self.gamma.0.scale_f(sign))
    }

    /// `(X, ♭_{ψ±γ}X)`, a section of `V±`.
    pub fn v_pm_lift(&self, x: &VectorField, sign: f64) -> BigSection {
        BigSection::real(x.clone(), OneFormField(self.flat_pm(sign).mat_vec(&x.0)))
    }

    /// `♯G² = Id`, g-isometry, positivity of `γ`, `β`, `G`, orthogonality of
    /// `V±` and `G = ±2g` there.
    pub fn check_metric_axioms(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.dim();
        let gg = neutral_gram(m);
        let flats = [self.flat_pm(1.0).compile(), self.flat_pm(-1.0).compile()];
        let gamma = self.gamma.0.compile();
        run_sampled("metric-axioms", &self.domain, opts, |p| {
            let s = self.sharp_at(p)?.val;
            let id = CMat::identity(2 * m, 2 * m);
            let mut worst = sup_norm(&(&s * &s - &id));
            worst = worst.max(sup_norm(&(s.transpose() * &gg * &s - &gg)));
            // Gram of G(A,B) = 2g(♯G A, B)
            let big = (s.transpose() * &gg) * c(2.0);
            worst = worst.max(sup_norm(&(&big - big.transpose())));
            let g = gamma.eval(p)?.val;
            let beta = s.view((m, 0), (m, m)).into_owned();
            for mat in [&g, &beta, &big] {
                let re: DMatrix<f64> = mat.map(|z| z.re);
                let sym = (&re + re.transpose()) * 0.5;
                let low = sym.symmetric_eigen().eigenvalues.min();
                if low <= POSITIVITY_TOL {
                    worst = worst.max(1.0f64.max(-low));
                }
            }
            let lifts: Vec<CMat> = flats
                .iter()
                .map(|f| -> Result<CMat, EvalError> {
                    let fl = f.eval(p)?.val;
                    let mut v = CMat::zeros(2 * m, m);
                    v.view_mut((0, 0), (m, m)).copy_from(&CMat::identity(m, m));
                    v.view_mut((m, 0), (m, m)).copy_from(&fl);
                    Ok(v)
                })
                .collect::<Result<_, _>>()?;
            let (vp, vm) = (&lifts[0], &lifts[1]);
            worst = worst.max(sup_norm(&(vp.transpose() * &gg * vm)));
            // G = +2g on V₊ and −2g on V₋, and g = ±γ there
            worst = worst.max(sup_norm(&(vp.transpose() * &big * vp - vp.transpose() * &gg * vp * c(2.0))));
            worst = worst.max(sup_norm(&(vm.transpose() * &big * vm + vm.transpose() * &gg * vm * c(2.0))));
            worst = worst.max(sup_norm(&(vp.transpose() * &gg * vp - &g)));
            worst = worst.max(sup_norm(&(&s * vp - vp)));
            worst = worst.max(sup_norm(&(&s * vm + vm)));
            Ok(worst)
        })
    }

    /// `♯G∘Φ − Φ∘♯G` and, independently, the two tensor conditions on
    /// `(A, π, σ)`. Returns `(commutation, tensor_conditions)`.
    pub fn check_compatibility(&self, phi: &GeneralizedF, opts: &RunOptions) -> Result<(CheckReport, CheckReport), CheckError> {
        let comm = run_sampled("metric-compat", &self.domain, opts, |p| {
            let g = self.sharp_at(p)?.val;
            let f = phi.phi_at(p)?.val;
            Ok(sup_norm(&(&g * &f - &f * &g)))
        })?;
        let (h1, h2) = self.h_conditions(phi);
        let (h1c, h2c) = (h1.compile(), h2.compile());
        let tensor = run_sampled("metric-compat-h", &self.domain, opts, |p| {
            Ok(sup_norm(&h1c.eval(p)?.val).max(sup_norm(&h2c.eval(p)?.val)))
        })?;
        Ok((comm, tensor))
    }

    /// Differences of the two sides of the tensor compatibility conditions,
    /// with `ϖ(X,Y) = π(♭γX, ♭γY)`:
    /// `γ(AX,Y) + γ(X,AY) = ϖ(φX,Y) − ϖ(X,φY)` and
    /// `σ = ϖ − ϖ(φ²·,·) + γ([A,φ]·,·)`.
    pub fn h_conditions(&self, phi: &GeneralizedF) -> (ExprMatrix, ExprMatrix) {
        let g = &self.gamma.0;
        let a = &phi.a.0;
        let f = &self.phi;
        let varpi = g.matmul(&phi.pi.0).matmul(g);
        let h1 = a.transpose().matmul(g).add(&g.matmul(a)).sub(&f.transpose().matmul(&varpi).sub(&varpi.matmul(f)));
        let comm = a.matmul(f).sub(&f.matmul(a));
        let rhs = varpi.sub(&f.matmul(f).transpose().matmul(&varpi)).add(&comm.transpose().matmul(g));
        (h1, phi.sigma.0.sub(&rhs))
    }

    /// `F± = A + ♯π∘♭_{ψ±γ}`.
    pub fn induced_f_pm(&self, phi: &GeneralizedF) -> (EndField, EndField) {
        let sp = phi.pi.sharp();
        (
            EndField(phi.a.0.add(&sp.matmul(&self.flat_pm(1.0)))),
            EndField(phi.a.0.add(&sp.matmul(&self.flat_pm(-1.0)))),
        )
    }

    /// `Φᶜ = ♯G∘Φ`.
    pub fn complementary_structure(&self, phi: &GeneralizedF) -> GeneralizedF {
        let m = self.dim();
        let prod = self.sharp.matmul(phi.matrix());
        GeneralizedF::new(
            EndField(prod.block(0, 0, m, m)),
            BivectorField(prod.block(0, m, m, m).transpose()),
            TwoFormField(prod.block(m, 0, m, m).transpose()),
            self.domain.clone(),
        )
        .expect("shapes agree")
    }

    pub fn quadruple(&self, phi: &GeneralizedF) -> MetricQuadruple {
        let (fp, fm) = self.induced_f_pm(phi);
        MetricQuadruple { gamma: self.gamma.clone(), psi: self.psi.clone(), fp, fm, domain: self.domain.clone() }
    }

    /// Courant closure of the eigenbundles `E±`, `S±` through projector
    /// sections, plus `[S₊, S₋] ⊆ S`.
    pub fn check_bracket_closure(&self, phi: &GeneralizedF, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.dim();
        let n2 = 2 * m;
        run_sampled("crfk-closure", &self.domain, opts, |p| {
            let f = phi.phi_at(p)?;
            let g = self.sharp_at(p)?;
            let id = JetMat::identity(n2, m);
            let f2 = f.mul(&f);
            let pr_e = f2.add(&f.scale(I)).scale(c(-0.5));
            let pr_s = id.add(&f2);
            let pr_p = id.add(&g).scale(c(0.5));
            let pr_m = id.sub(&g).scale(c(0.5));
            let ep = pr_e.mul(&pr_p);
            let em = pr_e.mul(&pr_m);
            let sp = pr_s.mul(&pr_p);
            let sm = pr_s.mul(&pr_m);
            let idv = CMat::identity(n2, n2);
            let cases = [
                (&ep, &ep, &idv - &ep.val),
                (&ep, &sp, &idv - &ep.val - &sp.val),
                (&em, &em, &idv - &em.val),
                (&em, &sm, &idv - &em.val - &sm.val),
                (&sp, &sm, &idv - &pr_s.val),
            ];
            let mut worst: f64 = 0.0;
            for (a, b, comp) in cases.iter() {
                worst = worst.max(closure_residual(a, b, comp));
            }
            Ok(worst)
        })
    }

    /// Runs the closure, Lie and connection formulations and records whether
    /// their verdicts agree.
    pub fn check_crfk(&self, phi: &GeneralizedF, opts: &RunOptions) -> Result<CrfkReport, CheckError> {
        let q = self.quadruple(phi);
        let closure = self.check_bracket_closure(phi, opts)?;
        let lie = q.check_crfk_lie(opts)?;
        let nabla = q.check_crfk_nabla(opts)?;
        Ok(CrfkReport { closure, lie, nabla })
    }
}

/// Worst normalised `(Id − pr_target)[a, b]` over projector columns.
fn closure_residual(a: &JetMat, b: &JetMat, comp: &CMat) -> f64 {
    let n = a.shape().1;
    let cols_a: Vec<(JetMat, f64)> = (0..n).map(|i| a.column(i)).map(|j| { let s = sup_norm(&j.val); (j, s) }).collect();
    let cols_b: Vec<(JetMat, f64)> = (0..n).map(|i| b.column(i)).map(|j| { let s = sup_norm(&j.val); (j, s) }).collect();
    let top_a = cols_a.iter().map(|x| x.1).fold(0.0, f64::max);
    let top_b = cols_b.iter().map(|x| x.1).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (x, nx) in &cols_a {
        if *nx <= SECTION_CUTOFF * top_a.max(1.0) {
            continue;
        }
        for (y, ny) in &cols_b {
            if *ny <= SECTION_CUTOFF * top_b.max(1.0) {
                continue;
            }
            let r = comp * point::courant(x, y);
            worst = worst.max(sup_norm(&r) / (nx * ny));
        }
    }
    worst
}

/// Verdicts of the three CRFK formulations.
#[derive(Clone, Debug)]
pub struct CrfkReport {
    pub closure: CheckReport,
    pub lie: CheckReport,
    pub nabla: CheckReport,
}

impl CrfkReport {
    pub fn agree(&self) -> bool {
        self.closure.pass == self.lie.pass && self.lie.pass == self.nabla.pass
    }

    /// Single report; a disagreement between formulations counts as a failure.
    pub fn combined(&self) -> CheckReport {
        let mut r = combine("crfk", &[self.closure.clone(), self.lie.clone(), self.nabla.clone()]);
        r.pass = r.pass && self.agree();
        r
    }
}

/// `(γ, ψ, F₊, F₋)`.
#[derive(Clone, Debug)]
pub struct MetricQuadruple {
    pub gamma: MetricField,
    pub psi: TwoFormField,
    pub fp: EndField,
    pub fm: EndField,
    pub domain: CoordinateDomain,
}

struct QuadJets {
    gamma: JetMat,
    psi: JetMat,
    f: [JetMat; 2],
}

impl MetricQuadruple {
    pub fn metric(&self) -> Result<GeneralizedMetric, StructError> {
        GeneralizedMetric::new(self.gamma.clone(), self.psi.clone(), self.domain.clone())
    }

    fn compiled(&self) -> [CompiledMatrix; 4] {
        [self.gamma.0.compile(), self.psi.0.compile(), self.fp.0.compile(), self.fm.0.compile()]
    }

    fn jets(c: &[CompiledMatrix; 4], p: &[f64]) -> Result<QuadJets, EvalError> {
        Ok(QuadJets { gamma: c[0].eval(p)?, psi: c[1].eval(p)?, f: [c[2].eval(p)?, c[3].eval(p)?] })
    }

    /// `F±³ + F± = 0` and `γ(F±X, Y) + γ(X, F±Y) = 0`.
    pub fn check_invariants(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let cs = self.compiled();
        run_sampled("quadruple", &self.domain, opts, |p| {
            let j = Self::jets(&cs, p)?;
            let g = &j.gamma.val;
            let mut worst: f64 = 0.0;
            for f in &j.f {
                let f = &f.val;
                worst = worst.max(sup_norm(&(f * f * f + f)));
                worst = worst.max(sup_norm(&(f.transpose() * g + g * f)));
            }
            Ok(worst)
        })
    }

    /// `♯π = ½(F₊−F₋)♯γ`, `A = ½[F₊(Id−♯γ♭ψ) + F₋(Id+♯γ♭ψ)]` and `♭σ` from
    /// `♭σ = ♭γ(Aφ − φA + ♯π♭β)`.
    pub fn reconstruct_phi(&self) -> Result<GeneralizedF, StructError> {
        let m = self.domain.dim;
        let g = self.metric()?;
        let ginv = g.gamma_inv();
        let fp = &self.fp.0;
        let fm = &self.fm.0;
        let sharp_pi = fp.sub(fm).matmul(ginv).scale_f(0.5);
        let sf = ginv.matmul(&self.psi.flat());
        let id = ExprMatrix::identity(m);
        let a = fp.matmul(&id.sub(&sf)).add(&fm.matmul(&id.add(&sf))).scale_f(0.5);
        let phi = &g.phi;
        let beta = g.beta().0;
        let flat_sigma = self.gamma.0.matmul(&a.matmul(phi).sub(&phi.matmul(&a)).add(&sharp_pi.matmul(&beta)));
        GeneralizedF::new(EndField(a), BivectorField(sharp_pi.transpose()), TwoFormField(flat_sigma.transpose()), self.domain.clone())
    }

    /// `induced_f_pm ∘ reconstruct_phi` against the stored `F±`.
    pub fn check_roundtrip(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let phi = self.reconstruct_phi().map_err(|e| CheckError::Structure(e.to_string()))?;
        let g = self.metric().map_err(|e| CheckError::Structure(e.to_string()))?;
        let (fp, fm) = g.induced_f_pm(&phi);
        let diff = [fp.0.sub(&self.fp.0).compile(), fm.0.sub(&self.fm.0).compile()];
        run_sampled("quadruple-roundtrip", &self.domain, opts, |p| {
            Ok(sup_norm(&diff[0].eval(p)?.val).max(sup_norm(&diff[1].eval(p)?.val)))
        })
    }

    fn classical_parts(&self, opts: &RunOptions) -> Result<[CheckReport; 2], CheckError> {
        let mut a = check_classical_crf(&self.fp, &self.domain, opts)?;
        a.check = "classical-crf+".into();
        let mut b = check_classical_crf(&self.fm, &self.domain, opts)?;
        b.check = "classical-crf-".into();
        Ok([a, b])
    }

    /// `γ(F±X, (∇_Z F±)Y) ∓ ½[dψ(F±²X, Y, Z) + dψ(F±X, F±Y, Z)]` on basis
    /// vectors, together with the classical CRF condition for `F±`.
    pub fn check_crfk_nabla(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.domain.dim;
        let cs = self.compiled();
        let main = run_sampled("crfk-nabla", &self.domain, opts, |p| {
            let j = Self::jets(&cs, p)?;
            let chr = point::christoffel(&j.gamma).ok_or_else(|| singular_metric(p))?;
            let dpsi = point::d2(&j.psi);
            let g = &j.gamma.val;
            let mut worst: f64 = 0.0;
            for (s, fj) in [1.0, -1.0].iter().zip(&j.f) {
                let f = &fj.val;
                let f2 = f * f;
                let nab = point::nabla_end(&chr, fj);
                let left = f.transpose() * g;
                for k in 0..m {
                    let lk = &left * &nab[k];
                    let z = unit(m, k);
                    for i in 0..m {
                        for jj in 0..m {
                            let rhs = (dpsi.eval(&col(&f2, i), &unit(m, jj), &z)
                                + dpsi.eval(&col(f, i), &col(f, jj), &z))
                                * (0.5 * s);
                            worst = worst.max((lk[(i, jj)] - rhs).norm());
                        }
                    }
                }
            }
            Ok(worst)
        })?;
        let [a, b] = self.classical_parts(opts)?;
        Ok(combine("crfk-nabla", &[main, a, b]))
    }

    /// `dψ(X,Y,·) ∓ (i(X)L_Yγ − L_X i(Y)γ)` for `X ∈ H±` and `Y ∈ H± ⊕ Q±`,
    /// arguments built from the spectral projector fields of `F±`, together
    /// with the classical CRF condition for `F±`.
    pub fn check_crfk_lie(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.domain.dim;
        let cs = self.compiled();
        let main = run_sampled("crfk-lie", &self.domain, opts, |p| {
            let j = Self::jets(&cs, p)?;
            let dpsi = point::d2(&j.psi);
            let mut worst: f64 = 0.0;
            for (s, fj) in [1.0, -1.0].iter().zip(&j.f) {
                let f2 = fj.mul(fj);
                let pr_h = f2.add(&fj.scale(I)).scale(c(-0.5));
                let pr_q = JetMat::identity(m, m).add(&f2);
                let hs: Vec<JetMat> = (0..m).map(|i| pr_h.column(i)).collect();
                let qs: Vec<JetMat> = (0..m).map(|i| pr_q.column(i)).collect();
                let top_h = hs.iter().map(|x| sup_norm(&x.val)).fold(0.0, f64::max);
                let top_q = qs.iter().map(|x| sup_norm(&x.val)).fold(0.0, f64::max);
                for x in &hs {
                    let nx = sup_norm(&x.val);
                    if nx <= SECTION_CUTOFF * top_h.max(1.0) {
                        continue;
                    }
                    for (y, top) in hs.iter().map(|y| (y, top_h)).chain(qs.iter().map(|y| (y, top_q))) {
                        let ny = sup_norm(&y.val);
                        if ny <= SECTION_CUTOFF * top.max(1.0) {
                            continue;
                        }
                        let r = lie_residual(&j.gamma, &dpsi, x, y, *s);
                        worst = worst.max(sup_norm(&r) / (nx * ny));
                    }
                }
            }
            Ok(worst)
        })?;
        let [a, b] = self.classical_parts(opts)?;
        Ok(combine("crfk-lie", &[main, a, b]))
    }

    /// For `F±² = −Id`: `dψ ∓ dω±(J±·, J±·, J±·)` with `ω±(X,Y) = γ(J±X, Y)`,
    /// plus integrability of `J±`.
    pub fn check_gualtieri_kahler(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.domain.dim;
        let cs = self.compiled();
        let pre = run_sampled("gualtieri-precondition", &self.domain, opts, |p| {
            let j = Self::jets(&cs, p)?;
            let id = CMat::identity(m, m);
            Ok(j.f.iter().map(|f| sup_norm(&(&f.val * &f.val + &id))).fold(0.0, f64::max))
        })?;
        if !pre.pass {
            return Err(CheckError::Precondition {
                check: "gualtieri".into(),
                reason: format!("F±² + Id = {:.3e} at {:?}; the kernel bundle S is not zero", pre.residual, pre.point),
            });
        }
        let main = run_sampled("gualtieri", &self.domain, opts, |p| {
            let j = Self::jets(&cs, p)?;
            let dpsi = point::d2(&j.psi);
            let mut worst: f64 = 0.0;
            for (s, fj) in [1.0, -1.0].iter().zip(&j.f) {
                let omega = fj.transpose().mul(&j.gamma);
                let dw = point::d2(&omega);
                let f = &fj.val;
                for a in 0..m {
                    for b in 0..m {
                        for k in 0..m {
                            let rhs = dw.eval(&col(f, a), &col(f, b), &col(f, k));
                            worst = worst.max((dpsi.get(a, b, k) - rhs * *s).norm());
                        }
                    }
                }
                for a in 0..m {
                    for b in 0..m {
                        let r = normal_cr_at(fj, &JetMat::unit(m, a, m), &JetMat::unit(m, b, m));
                        worst = worst.max(sup_norm(&r));
                    }
                }
            }
            Ok(worst)
        })?;
        Ok(main)
    }

    /// Requires `dψ = 0`; then `γ(F±X, (∇_Z F±)Y) = 0` on basis vectors and
    /// `∇`-parallelism of the kernel distributions `Q±`.
    pub fn check_partial_kahler(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.domain.dim;
        let cs = self.compiled();
        let pre = run_sampled("closed-psi", &self.domain, opts, |p| Ok(point::d2(&cs[1].eval(p)?).max_abs()))?;
        if !pre.pass {
            return Err(CheckError::Precondition {
                check: "partial-kahler".into(),
                reason: format!("dψ = {:.3e} at {:?}", pre.residual, pre.point),
            });
        }
        run_sampled("partial-kahler", &self.domain, opts, |p| {
            let j = Self::jets(&cs, p)?;
            let chr = point::christoffel(&j.gamma).ok_or_else(|| singular_metric(p))?;
            let g = &j.gamma.val;
            let mut worst: f64 = 0.0;
            for fj in &j.f {
                let f = &fj.val;
                let left = f.transpose() * g;
                for nk in point::nabla_end(&chr, fj) {
                    worst = worst.max(sup_norm(&(&left * nk)));
                }
                let pr_q = JetMat::identity(m, m).add(&fj.mul(fj));
                for jj in 0..m {
                    let y = pr_q.column(jj);
                    let ny = sup_norm(&y.val);
                    if ny < SECTION_CUTOFF {
                        continue;
                    }
                    for d in point::nabla_vector(&chr, &y) {
                        worst = worst.max(sup_norm(&(f * d)) / ny);
                    }
                }
            }
            Ok(worst)
        })
    }
}

fn col(f: &CMat, i: usize) -> CMat {
    CMat::from_fn(f.nrows(), 1, |r, _| f[(r, i)])
}

fn unit(m: usize, i: usize) -> CMat {
    let mut v = CMat::zeros(m, 1);
    v[(i, 0)] = c(1.0);
    v
}

fn singular_metric(p: &[f64]) -> PointError {
    PointError::Fatal(CheckError::Structure(format!("metric is singular at {p:?}")))
}

/// Deviation of the `V±` bracket from `([X,Y], ♭_{ψ±γ}[X,Y])`:
/// `dψ(X,Y,·) ± (L_X i(Y)γ − i(X)L_Yγ)`.
pub fn lie_residual(gamma: &JetMat, dpsi: &point::Arr3, x: &JetMat, y: &JetMat, sign: f64) -> CMat {
    let iyg = gamma.mul(y);
    let lyg = point::lie2(y, gamma);
    let ixly = lyg.transpose() * &x.val;
    dpsi.contract2(&x.val, &y.val) + (point::lie1(x, &iyg) - ixly) * c(sign)
}

/// Convenience: structure induced by a classical metric F-structure `(F, γ)`
/// with `ψ = 0`, so that `F₊ = F₋ = F`.
pub fn classical_metric_quadruple(f: EndField, gamma: MetricField, domain: CoordinateDomain) -> MetricQuadruple {
    let m = domain.dim;
    MetricQuadruple { gamma, psi: TwoFormField::zeros(m), fp: f.clone(), fm: f, domain }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, ScalarExpr};

    fn mat(rows: &[&[&str]], n: usize) -> ExprMatrix {
        ExprMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_expr(s, n).unwrap()).collect()).collect())
    }

    fn quick() -> RunOptions {
        RunOptions { samples: 12, timing: false, ..Default::default() }
    }

    #[test]
    fn sharp_g_examples() {
        let d = CoordinateDomain::cube(2, -1.0, 1.0);
        let g = GeneralizedMetric::new(MetricField::euclidean(2), TwoFormField::zeros(2), d).unwrap();
        let s = g.sharp_g(&BigSection::basis(2, 0).add(&BigSection::basis(2, 3)));
        assert_eq!(s.x_re.0[1].as_const(), Some(1.0));
        assert!(s.x_re.0[0].is_zero());
        assert_eq!(s.a_re.0[0].as_const(), Some(1.0));
        assert!(g.check_metric_axioms(&quick()).unwrap().pass);
        let v = g.v_pm_lift(&VectorField::basis(2, 0), 1.0);
        assert_eq!(v.a_re.0[0].as_const(), Some(1.0));
    }

    #[test]
    fn metric_axioms_with_psi() {
        let d = CoordinateDomain::cube(3, -1.0, 1.0);
        let gamma = MetricField(mat(&[&["2 + x1^2", "0.3", "0"], &["0.3", "1", "0"], &["0", "0", "1 + x3^2"]], 3));
        let psi = TwoFormField::from_terms(3, &[(0, 1, parse_expr("x3", 3).unwrap()), (1, 2, parse_expr("0.7", 3).unwrap())]);
        let g = GeneralizedMetric::new(gamma, psi, d).unwrap();
        let r = g.check_metric_axioms(&quick()).unwrap();
        assert!(r.residual < 1e-10, "{r}");
    }

    #[test]
    fn lie_residual_matches_bracket_on_v_pm() {
        let d = CoordinateDomain::cube(3, -1.0, 1.0);
        let gamma = MetricField(mat(&[&["1 + x1^2", "0", "0"], &["0", "2", "x1"], &["0", "x1", "3"]], 3));
        let psi = TwoFormField::from_terms(
            3,
            &[(0, 1, parse_expr("x3*x2", 3).unwrap()), (0, 2, parse_expr("sin(x2)", 3).unwrap())],
        );
        let g = GeneralizedMetric::new(gamma.clone(), psi.clone(), d).unwrap();
        let x = VectorField(vec![parse_expr("x2", 3).unwrap(), parse_expr("x1*x3", 3).unwrap(), ScalarExpr::one()]);
        let y = VectorField(vec![ScalarExpr::zero(), parse_expr("exp(x1)", 3).unwrap(), parse_expr("x2^2", 3).unwrap()]);
        let p = [0.3, -0.4, 0.8];
        for s in [1.0, -1.0] {
            let br = crate::big::courant_bracket(&g.v_pm_lift(&x, s), &g.v_pm_lift(&y, s));
            let xy = crate::tensor::lie_bracket(&x, &y);
            let expect = g.v_pm_lift(&xy, s);
            let dev = br.sub(&expect).jet(&p).unwrap().val;
            let gj = gamma.0.compile().eval(&p).unwrap();
            let dpsi = point::d2(&psi.0.compile().eval(&p).unwrap());
            let xj = ExprMatrix::column_vector(&x.0).compile().eval(&p).unwrap();
            let yj = ExprMatrix::column_vector(&y.0).compile().eval(&p).unwrap();
            let r = lie_residual(&gj, &dpsi, &xj, &yj, s);
            assert!(dev.rows(0, 3).norm() < 1e-12);
            assert!((dev.rows(3, 3) - r).norm() < 1e-10, "sign {s}");
        }
    }

    #[test]
    fn classical_metric_structure() {
        let d = CoordinateDomain::cube(3, -1.0, 1.0);
        let f = EndField(mat(&[&["0", "-1", "0"], &["1", "0", "0"], &["0", "0", "0"]], 3));
        let q = classical_metric_quadruple(f.clone(), MetricField::euclidean(3), d.clone());
        let phi = q.reconstruct_phi().unwrap();
        let p = [0.1, 0.2, 0.3];
        assert!((crate::genstruct::phi_value(&phi, &p).unwrap()
            - crate::genstruct::phi_value(&GeneralizedF::from_classical_f(f, d).unwrap(), &p).unwrap())
        .norm()
            < 1e-14);
        let g = q.metric().unwrap();
        let (a, b) = g.check_compatibility(&phi, &quick()).unwrap();
        assert!(a.pass && b.pass);
        let c = g.complementary_structure(&phi);
        let (fp, fm) = g.induced_f_pm(&c);
        assert!((fp.0.eval_values(&p).unwrap() - q.fp.0.eval_values(&p).unwrap()).norm() < 1e-14);
        assert!((fm.0.eval_values(&p).unwrap() + q.fm.0.eval_values(&p).unwrap()).norm() < 1e-14);
        let crfk = g.check_crfk(&phi, &quick()).unwrap();
        assert!(crfk.agree() && crfk.closure.pass, "{:?}", crfk);
        assert!(q.check_partial_kahler(&quick()).unwrap().pass);
        assert!(matches!(q.check_gualtieri_kahler(&quick()), Err(CheckError::Precondition { .. })));
    }

    fn torus(psi: &str) -> MetricQuadruple {
        let d = CoordinateDomain { dim: 3, box_: vec![[0.0, 1.0]; 3], periodic: vec![true; 3] };
        let fp = EndField(mat(&[&["0", "-1", "0"], &["1", "0", "0"], &["0", "0", "0"]], 3));
        let fm = EndField(mat(&[&["0", "0", "-1"], &["0", "0", "0"], &["1", "0", "0"]], 3));
        let neg = format!("-({psi})");
        let psi = TwoFormField(mat(&[&["0", psi, "0"], &[neg.as_str(), "0", "0"], &["0", "0", "0"]], 3));
        MetricQuadruple { gamma: MetricField::euclidean(3), psi, fp, fm, domain: d }
    }

    #[test]
    fn torus_formulations_agree() {
        for (src, expect) in [("0.5", true), ("sin(6.283185307179586*x3)", false)] {
            let q = torus(src);
            let phi = q.reconstruct_phi().unwrap();
            let g = q.metric().unwrap();
            assert!(q.check_roundtrip(&quick()).unwrap().pass);
            let (a, b) = g.check_compatibility(&phi, &quick()).unwrap();
            assert!(a.pass && b.pass);
            let r = g.check_crfk(&phi, &quick()).unwrap();
            eprintln!("{src}: {} | {} | {}", r.closure, r.lie, r.nabla);
            assert!(r.agree());
            assert_eq!(r.closure.pass, expect);
            let i1 = phi.check_integrability(&quick()).unwrap();
            let i2 = g.complementary_structure(&phi).check_integrability(&quick()).unwrap();
            eprintln!("{i1} {i2}");
        }
    }
}
