//! Named fixture structures with their expected verdicts.

use std::fmt;

use crate::checks::run_check;
use crate::contact::{AlmostContactMetric, SasakiInput};
use crate::domain::CoordinateDomain;
use crate::expr::{parse_expr, ScalarExpr};
use crate::genmetric::{GeneralizedMetric, MetricQuadruple};
use crate::genstruct::{AlmostContact, GeneralizedF};
use crate::io::Definition;
use crate::report::{CheckError, CheckReport, RunOptions};
use crate::tensor::{BivectorField, EndField, ExprMatrix, MetricField, OneFormField, TwoFormField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The check refuses the input (unmet precondition).
    Rejected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Rejected => "rejected",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub definition: Definition,
    pub expected: Vec<(&'static str, Verdict)>,
}

impl Fixture {
    pub fn domain(&self) -> &CoordinateDomain {
        &self.definition.domain
    }

    /// Runs one check and classifies the outcome.
    pub fn run(&self, check: &str, opts: &RunOptions) -> Result<(Verdict, Option<CheckReport>), CheckError> {
        match run_check(&self.definition, check, opts) {
            Ok(r) => Ok((if r.pass { Verdict::Pass } else { Verdict::Fail }, Some(r))),
            Err(CheckError::Precondition { .. }) => Ok((Verdict::Rejected, None)),
            Err(e) => Err(e),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub fixture: &'static str,
    pub check: &'static str,
    pub expected: Verdict,
    pub got: Verdict,
    pub report: Option<CheckReport>,
}

impl Outcome {
    pub fn matches(&self) -> bool {
        self.expected == self.got
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown fixture {0:?}")]
pub struct UnknownFixture(pub String);

const NAMES: &[&str] = &[
    "classical-f-r3",
    "nirenberg-holo",
    "nirenberg-antiholo",
    "skew-vsigma-r4",
    "symplectic-fibration",
    "symplectic-fibration-twisted",
    "contact-r3",
    "contact-r3-nonnormal",
    "cosymplectic-r3",
    "cosymplectic-t3",
    "crfk-torus",
    "crfk-torus-open-psi",
    "crfk-torus-2-1",
    "warped-q-r3",
    "flat-kahler-r2",
    "conformal-kahler-r2",
    "kahler-r4-closed-psi",
    "hermitian-nonkahler-r4",
    "bihermitian-r4",
    "bihermitian-r4-flipped",
    "sasaki-r3",
    "sasaki-r3-basic-psi",
    "sasaki-r3-broken",
    "sasaki-r3-uncompensated",
];

pub fn list() -> Vec<&'static str> {
    NAMES.to_vec()
}

fn e(src: &str, n: usize) -> ScalarExpr {
    parse_expr(src, n).unwrap_or_else(|err| panic!("fixture expression {src:?}: {err}"))
}

fn mat(rows: &[&[&str]]) -> ExprMatrix {
    let n = rows[0].len();
    ExprMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| e(s, n)).collect()).collect())
}

fn vec_of(src: &[&str]) -> Vec<ScalarExpr> {
    src.iter().map(|s| e(s, src.len())).collect()
}

fn two_form(n: usize, terms: &[(usize, usize, &str)]) -> TwoFormField {
    TwoFormField::from_terms(n, &terms.iter().map(|(i, j, s)| (*i, *j, e(s, n))).collect::<Vec<_>>())
}

fn rotation(n: usize, pairs: &[(usize, usize)]) -> EndField {
    // e_a ↦ e_b, e_b ↦ −e_a for each pair (a, b)
    let mut m = ExprMatrix::zeros(n, n);
    for &(a, b) in pairs {
        m[(b, a)] = ScalarExpr::one();
        m[(a, b)] = ScalarExpr::constant(-1.0);
    }
    EndField(m)
}

fn cube(n: usize) -> CoordinateDomain {
    CoordinateDomain::cube(n, -1.0, 1.0)
}

fn torus(n: usize) -> CoordinateDomain {
    CoordinateDomain::new(vec![[0.0, 1.0]; n], vec![true; n]).expect("unit torus")
}

fn def_with_phi(phi: GeneralizedF) -> Definition {
    let mut d = Definition::new(phi.domain.clone());
    d.phi = Some(phi);
    d
}

fn classical(f: EndField, domain: CoordinateDomain, metric: Option<MetricField>) -> Definition {
    let mut d = def_with_phi(GeneralizedF::from_classical_f(f, domain.clone()).expect("fixture is an F-structure"));
    if let Some(g) = metric {
        let m = domain.dim;
        d.metric = Some(GeneralizedMetric::new(g, TwoFormField::zeros(m), domain).expect("metric"));
    }
    d
}

fn quadruple(q: MetricQuadruple) -> Definition {
    let phi = q.reconstruct_phi().expect("quadruple");
    let mut d = def_with_phi(phi);
    d.metric = Some(q.metric().expect("metric"));
    d
}

fn almost_contact(f: EndField, z: VectorField, xi: OneFormField, gamma: MetricField, domain: CoordinateDomain) -> Definition {
    let m = domain.dim;
    let ac = AlmostContact {
        p: BivectorField::zeros(m),
        theta: TwoFormField::zeros(m),
        f,
        z: vec![z],
        xi: vec![xi],
        domain: domain.clone(),
    };
    let mut d = def_with_phi(ac.to_generalized().expect("almost contact"));
    d.almost_contact = Some(ac);
    d.metric = Some(GeneralizedMetric::new(gamma, TwoFormField::zeros(m), domain).expect("metric"));
    d
}

/// Left-invariant contact metric structure on the Heisenberg group,
/// `ξ = dx3 − x2 dx1`, `Z = ∂3`; `sign = −1` gives `(−F, −Z, −ξ)`.
fn heisenberg(sign: f64) -> AlmostContactMetric {
    let s = ScalarExpr::constant(sign);
    AlmostContactMetric::new(
        EndField(mat(&[&["0", "-1", "0"], &["1", "0", "0"], &["0", "-x2", "0"]]).scale(&s)),
        VectorField(vec_of(&["0", "0", "1"])).scale(&s),
        OneFormField(vec_of(&["-x2", "0", "1"])).scale(&s),
        heisenberg_metric(),
        cube(3),
    )
    .expect("Heisenberg contact metric structure")
}

fn heisenberg_metric() -> MetricField {
    MetricField(mat(&[&["1 + x2^2", "0", "-x2"], &["0", "1", "0"], &["-x2", "0", "1"]]))
}

fn sasaki(psi: TwoFormField, kappa: OneFormField) -> Definition {
    let mut d = Definition::new(cube(3));
    d.sasaki = Some(SasakiInput::new(heisenberg(1.0), heisenberg(-1.0), psi, kappa).expect("Sasaki input"));
    d
}

/// Flat torus `T^{2n+h}` with coordinates `(x^1..x^{2n}, y^1..y^h)`, the
/// structures `F₊` of `z^a = x^a + i x^{n+a}` and `F₋` of `w^u = x^u + i y^u`,
/// and a given two-form. Requires `1 ≤ h ≤ 2n`.
pub fn torus_quadruple(n: usize, h: usize, psi: TwoFormField) -> MetricQuadruple {
    assert!(n >= 1 && (1..=2 * n).contains(&h), "need 1 ≤ h ≤ 2n");
    let m = 2 * n + h;
    let fp = rotation(m, &(0..n).map(|a| (a, n + a)).collect::<Vec<_>>());
    let fm = rotation(m, &(0..h).map(|u| (u, 2 * n + u)).collect::<Vec<_>>());
    MetricQuadruple { gamma: MetricField::euclidean(m), psi, fp, fm, domain: torus(m) }
}

/// A closed two-form on the torus mixing constant and periodic coefficients.
pub fn torus_closed_psi(n: usize, h: usize) -> TwoFormField {
    let m = 2 * n + h;
    let y = 2 * n;
    let c1 = "cos(6.283185307179586*x1)".to_string();
    let c2 = format!("0.3*sin(6.283185307179586*x{})", y + 1);
    two_form(m, &[(0, 1, "0.5"), (0, y, &c1), (1, y, &c2)])
}

/// Builds a fixture by name.
pub fn get(name: &str) -> Result<Fixture, UnknownFixture> {
    use Verdict::*;
    let (description, definition, expected): (&'static str, Definition, Vec<(&'static str, Verdict)>) = match name {
        "classical-f-r3" => (
            "rotation F in the (x1,x2)-plane of R^3, Euclidean metric",
            classical(rotation(3, &[(0, 1)]), cube(3), Some(MetricField::euclidean(3))),
            vec![
                ("axioms", Pass),
                ("integrability", Pass),
                ("ls-torsion", Pass),
                ("classical-crf", Pass),
                ("metric-axioms", Pass),
                ("metric-compat", Pass),
                ("quadruple-roundtrip", Pass),
                ("crfk", Pass),
                ("partial-kahler", Pass),
                ("gualtieri", Rejected),
            ],
        ),
        "nirenberg-holo" | "nirenberg-antiholo" => {
            // kernel Q spanned by ∂3 + λ∂z + λ̄∂z̄ with λ = z or z̄
            let holo = name == "nirenberg-holo";
            let col = if holo { ["x2", "-x1"] } else { ["-x2", "-x1"] };
            let f = EndField(mat(&[&["0", "-1", col[0]], &["1", "0", col[1]], &["0", "0", "0"]]));
            let verdict = if holo { Pass } else { Fail };
            (
                if holo { "Nirenberg-integrable CR structure on C x R, λ = z" } else { "same with λ = z̄" },
                classical(f, cube(3), None),
                vec![("axioms", Pass), ("integrability", verdict), ("classical-crf", verdict)],
            )
        }
        "skew-vsigma-r4" => {
            let phi = GeneralizedF::from_v_sigma(
                &[VectorField::basis(4, 0), VectorField::basis(4, 1)],
                &two_form(4, &[(0, 1, "1")]),
                cube(4),
            )
            .expect("nondegenerate");
            (
                "skew classical structure from V = span{∂1,∂2}, σ = dx1∧dx2",
                def_with_phi(phi),
                vec![("axioms", Pass), ("integrability", Pass), ("ls-torsion", Pass)],
            )
        }
        "symplectic-fibration" | "symplectic-fibration-twisted" => {
            // σ = (dx3 − a1dx1 − a2dx2)∧(dx4 − b1dx1 − b2dx2); the horizontal
            // flow preserves the fibre area iff ∂3a_i + ∂4b_i = 0
            let good = name == "symplectic-fibration";
            let (a1, b1) = if good { ("x2*x3", "-x2*x4") } else { ("x3", "0") };
            let th3 = OneFormField(vec_of(&[&format!("-({a1})"), "-x1", "1", "0"]));
            let th4 = OneFormField(vec_of(&[&format!("-({b1})"), "2*x3", "0", "1"]));
            let sigma = crate::tensor::wedge(&th3, &th4);
            let phi = GeneralizedF::from_v_sigma(&[VectorField::basis(4, 2), VectorField::basis(4, 3)], &sigma, cube(4))
                .expect("fibrewise symplectic");
            (
                if good {
                    "vertical V on R^4 with a fibrewise symplectic σ whose horizontal flow preserves it"
                } else {
                    "same with a horizontal flow that expands the fibre area"
                },
                def_with_phi(phi),
                vec![("axioms", Pass), ("integrability", if good { Pass } else { Fail })],
            )
        }
        "contact-r3" => {
            let h = heisenberg(1.0);
            (
                "normal contact metric structure on the Heisenberg group",
                almost_contact(h.f, h.z, h.xi, h.gamma, cube(3)),
                vec![("axioms", Pass), ("frames", Pass), ("normality", Pass), ("cosymplectic", Fail)],
            )
        }
        "contact-r3-nonnormal" => {
            // Fe1 = e^{x3} e2, Fe2 = −e^{−x3} e1: an almost contact structure
            // whose product lift is not integrable
            let f = EndField(mat(&[&["0", "-exp(-x3)", "0"], &["exp(x3)", "0", "0"], &["0", "0", "0"]]));
            let g = MetricField(mat(&[&["exp(x3)", "0", "0"], &["0", "exp(-x3)", "0"], &["0", "0", "1"]]));
            (
                "almost contact structure on R^3 that is not normal",
                almost_contact(f, VectorField::basis(3, 2), OneFormField::basis(3, 2), g, cube(3)),
                vec![("axioms", Pass), ("frames", Pass), ("normality", Fail), ("cosymplectic", Fail)],
            )
        }
        "cosymplectic-r3" | "cosymplectic-t3" => {
            let d = if name == "cosymplectic-r3" { cube(3) } else { torus(3) };
            (
                if name == "cosymplectic-r3" { "Kähler plane times a line" } else { "flat torus as a trivial circle bundle" },
                almost_contact(rotation(3, &[(0, 1)]), VectorField::basis(3, 2), OneFormField::basis(3, 2), MetricField::euclidean(3), d),
                vec![("axioms", Pass), ("frames", Pass), ("normality", Pass), ("cosymplectic", Pass)],
            )
        }
        "crfk-torus" => (
            "flat 3-torus with two partially Kähler reductions and a closed ψ",
            quadruple(torus_quadruple(1, 1, torus_closed_psi(1, 1))),
            vec![
                ("axioms", Pass),
                ("integrability", Pass),
                ("metric-axioms", Pass),
                ("metric-compat", Pass),
                ("quadruple-roundtrip", Pass),
                ("crfk", Pass),
                ("partial-kahler", Pass),
                ("gualtieri", Rejected),
            ],
        ),
        "crfk-torus-open-psi" => (
            "flat 3-torus reductions with a non-closed ψ = sin(2πx3) dx1∧dx2",
            quadruple(torus_quadruple(1, 1, two_form(3, &[(0, 1, "sin(6.283185307179586*x3)")]))),
            vec![
                ("metric-axioms", Pass),
                ("metric-compat", Pass),
                ("quadruple-roundtrip", Pass),
                ("integrability", Fail),
                ("crfk", Fail),
                ("partial-kahler", Rejected),
            ],
        ),
        "crfk-torus-2-1" => (
            "flat 5-torus, n = 2, h = 1, closed ψ",
            quadruple(torus_quadruple(2, 1, torus_closed_psi(2, 1))),
            vec![("metric-compat", Pass), ("crfk", Pass), ("partial-kahler", Pass)],
        ),
        "warped-q-r3" => {
            let g = MetricField(mat(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "exp(2*x1)"]]));
            let f = rotation(3, &[(0, 1)]);
            (
                "F = J ⊕ 0 with a warped kernel direction: Q is not parallel",
                quadruple(MetricQuadruple { gamma: g, psi: TwoFormField::zeros(3), fp: f.clone(), fm: f, domain: cube(3) }),
                vec![("metric-compat", Pass), ("crfk", Fail), ("partial-kahler", Fail)],
            )
        }
        "flat-kahler-r2" => {
            let j = rotation(2, &[(0, 1)]);
            (
                "Euclidean plane with its complex structure",
                quadruple(MetricQuadruple { gamma: MetricField::euclidean(2), psi: TwoFormField::zeros(2), fp: j.clone(), fm: j, domain: cube(2) }),
                vec![("metric-axioms", Pass), ("crfk", Pass), ("gualtieri", Pass), ("partial-kahler", Pass)],
            )
        }
        "conformal-kahler-r2" => {
            let j = rotation(2, &[(0, 1)]);
            let g = MetricField(mat(&[&["1 + x1^2", "0"], &["0", "1 + x1^2"]]));
            (
                "conformally flat plane, Kähler in real dimension two",
                quadruple(MetricQuadruple { gamma: g, psi: TwoFormField::zeros(2), fp: j.clone(), fm: j, domain: cube(2) }),
                vec![("metric-axioms", Pass), ("crfk", Pass), ("gualtieri", Pass)],
            )
        }
        "kahler-r4-closed-psi" => {
            let j = rotation(4, &[(0, 1), (2, 3)]);
            (
                "flat C^2 with ψ = dx1∧dx3",
                quadruple(MetricQuadruple { gamma: MetricField::euclidean(4), psi: two_form(4, &[(0, 2, "1")]), fp: j.clone(), fm: j, domain: cube(4) }),
                vec![("metric-axioms", Pass), ("crfk", Pass), ("gualtieri", Pass), ("partial-kahler", Pass)],
            )
        }
        "hermitian-nonkahler-r4" => {
            let j = rotation(4, &[(0, 1), (2, 3)]);
            let f = "exp(x1)";
            let g = MetricField(mat(&[&[f, "0", "0", "0"], &["0", f, "0", "0"], &["0", "0", f, "0"], &["0", "0", "0", f]]));
            (
                "conformally flat Hermitian C^2 with non-closed Kähler form",
                quadruple(MetricQuadruple { gamma: g, psi: TwoFormField::zeros(4), fp: j.clone(), fm: j, domain: cube(4) }),
                vec![("metric-axioms", Pass), ("crfk", Fail), ("gualtieri", Fail)],
            )
        }
        "bihermitian-r4" | "bihermitian-r4-flipped" => {
            let f = "1 + 0.5*x1";
            let g = MetricField(mat(&[&[f, "0", "0", "0"], &["0", f, "0", "0"], &["0", "0", f, "0"], &["0", "0", "0", f]]));
            let ok = name == "bihermitian-r4";
            let psi = two_form(4, &[(2, 3, if ok { "-0.5*x2" } else { "0.5*x2" })]);
            (
                if ok { "bihermitian pair on R^4 with the torsion form dψ" } else { "same with ψ of the wrong sign" },
                quadruple(MetricQuadruple {
                    gamma: g,
                    psi,
                    fp: rotation(4, &[(0, 1), (2, 3)]),
                    fm: rotation(4, &[(0, 1), (3, 2)]),
                    domain: cube(4),
                }),
                vec![("metric-axioms", Pass), ("crfk", if ok { Pass } else { Fail }), ("gualtieri", if ok { Pass } else { Fail })],
            )
        }
        "sasaki-r3" => (
            "Heisenberg Sasakian pair (F,Z,ξ), (−F,−Z,−ξ) with ψ = κ = 0",
            sasaki(TwoFormField::zeros(3), OneFormField::zeros(3)),
            vec![("sasakian", Pass)],
        ),
        "sasaki-r3-basic-psi" => (
            "Heisenberg Sasakian pair with a basic ψ cancelled by dκ",
            sasaki(two_form(3, &[(0, 1, "1 + x1^2")]), OneFormField(vec_of(&["0", "-(x1 + x1^3/3)", "0"]))),
            vec![("sasakian", Pass)],
        ),
        "sasaki-r3-broken" => (
            "Heisenberg Sasakian pair with ψ = x3 dx1∧dx2, not invariant along Z",
            sasaki(two_form(3, &[(0, 1, "x3")]), OneFormField::zeros(3)),
            vec![("sasakian", Fail)],
        ),
        "sasaki-r3-uncompensated" => (
            "Heisenberg Sasakian pair with a basic ψ and κ = 0",
            sasaki(two_form(3, &[(0, 1, "1 + x1^2")]), OneFormField::zeros(3)),
            vec![("sasakian", Fail)],
        ),
        other => return Err(UnknownFixture(other.to_string())),
    };
    let name = NAMES.iter().find(|n| **n == name).expect("listed");
    let mut definition = definition;
    // rejected checks stay out of the definition so exported files run cleanly
    definition.checks = expected.iter().filter(|(_, v)| *v != Rejected).map(|(c, _)| c.to_string()).collect();
    Ok(Fixture { name, description, definition, expected })
}

/// Runs every expected check of every fixture.
pub fn run_all(opts: &RunOptions) -> Result<Vec<Outcome>, CheckError> {
    let mut out = Vec::new();
    for name in NAMES {
        let fx = get(name).expect("listed fixture");
        for (check, expected) in &fx.expected {
            let (got, report) = fx.run(check, opts)?;
            out.push(Outcome { fixture: fx.name, check, expected: *expected, got, report });
        }
    }
    Ok(out)
}
