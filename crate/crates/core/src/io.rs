//! JSON structure definitions: strict schema, validation with field paths,
//! and export.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::{AlmostContactMetric, SasakiInput};
use crate::domain::CoordinateDomain;
use crate::expr::{parse_expr, ParseError};
use crate::genmetric::GeneralizedMetric;
use crate::genstruct::{AlmostContact, GeneralizedF, StructError};
use crate::report::RunOptions;
use crate::tensor::{BivectorField, EndField, ExprMatrix, MetricField, OneFormField, TwoFormField, VectorField};

type Rows = Vec<Vec<String>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub dim: usize,
    #[serde(rename = "box")]
    pub box_: Vec<[f64; 2]>,
    pub periodic: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    #[serde(rename = "A")]
    pub a: Rows,
    pub pi: Rows,
    pub sigma: Rows,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub gamma: Rows,
    pub psi: Rows,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlmostContactSpec {
    #[serde(rename = "P")]
    pub p: Rows,
    pub theta: Rows,
    #[serde(rename = "F")]
    pub f: Rows,
    /// One vector field per product direction.
    #[serde(rename = "Z")]
    pub z: Rows,
    pub xi: Rows,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ContactRecordSpec {
    #[serde(rename = "F")]
    pub f: Rows,
    #[serde(rename = "Z")]
    pub z: Vec<String>,
    pub xi: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SasakiSpec {
    pub gamma: Rows,
    pub psi: Rows,
    pub kappa: Vec<String>,
    pub plus: ContactRecordSpec,
    pub minus: ContactRecordSpec,
}

/// On-disk definition file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DefinitionFile {
    pub manifold: ManifoldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub almost_contact: Option<AlmostContactSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sasaki: Option<SasakiSpec>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_samples() -> usize {
    RunOptions::default().samples
}
fn default_seed() -> u64 {
    RunOptions::default().seed
}
fn default_tol() -> f64 {
    RunOptions::default().tol
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Expression { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Structure { path: String, source: StructError },
}

fn schema(path: &str, message: impl Into<String>) -> InputError {
    InputError::Schema { path: path.into(), message: message.into() }
}

/// Validated definition ready for checking.
#[derive(Clone, Debug)]
pub struct Definition {
    pub domain: CoordinateDomain,
    pub phi: Option<GeneralizedF>,
    pub b: Option<TwoFormField>,
    pub metric: Option<GeneralizedMetric>,
    pub almost_contact: Option<AlmostContact>,
    pub sasaki: Option<SasakiInput>,
    pub checks: Vec<String>,
    pub options: RunOptions,
}

impl Definition {
    pub fn new(domain: CoordinateDomain) -> Self {
        Definition {
            domain,
            phi: None,
            b: None,
            metric: None,
            almost_contact: None,
            sasaki: None,
            checks: vec![],
            options: RunOptions::default(),
        }
    }

    /// Almost contact metric record when the payload is a plain almost
    /// contact structure of codimension one together with a metric.
    pub fn contact_metric(&self) -> Option<Result<AlmostContactMetric, StructError>> {
        let ac = self.almost_contact.as_ref()?;
        let g = self.metric.as_ref()?;
        if ac.h() != 1 || !ac.p.0.is_structurally_zero() || !ac.theta.0.is_structurally_zero() {
            return None;
        }
        Some(AlmostContactMetric::new(ac.f.clone(), ac.z[0].clone(), ac.xi[0].clone(), g.gamma.clone(), ac.domain.clone()))
    }
}

fn matrix(rows: &Rows, dim: usize, path: &str) -> Result<ExprMatrix, InputError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(schema(path, format!("expected a {dim}x{dim} matrix")));
    }
    ExprMatrix::parse(rows, dim).map_err(|(i, j, e)| InputError::Expression { path: format!("{path}[{i}][{j}]"), source: e })
}

fn vector(v: &[String], dim: usize, path: &str) -> Result<Vec<crate::expr::ScalarExpr>, InputError> {
    if v.len() != dim {
        return Err(schema(path, format!("expected {dim} components, found {}", v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_expr(s, dim).map_err(|e| InputError::Expression { path: format!("{path}[{i}]"), source: e }))
        .collect()
}

/// Antisymmetry up to expression simplification, checked numerically at a
/// few sample points.
fn antisymmetric(m: ExprMatrix, domain: &CoordinateDomain, path: &str) -> Result<ExprMatrix, InputError> {
    symmetry(&m.add(&m.transpose()), domain, path, "antisymmetric")?;
    Ok(m)
}

fn symmetric(m: ExprMatrix, domain: &CoordinateDomain, path: &str) -> Result<ExprMatrix, InputError> {
    symmetry(&m.sub(&m.transpose()), domain, path, "symmetric")?;
    Ok(m)
}

fn symmetry(defect: &ExprMatrix, domain: &CoordinateDomain, path: &str, what: &str) -> Result<(), InputError> {
    let compiled = defect.compile();
    let mut sampler = domain.sampler(0xa5a5);
    for _ in 0..8 {
        let p = sampler.next_point();
        if let Ok(j) = compiled.eval(&p) {
            if crate::jet::sup_norm(&j.val) > 1e-12 {
                return Err(schema(path, format!("matrix is not {what} at {p:?}")));
            }
        }
    }
    Ok(())
}

fn structure(path: &str) -> impl Fn(StructError) -> InputError + '_ {
    move |e| InputError::Structure { path: path.into(), source: e }
}

impl DefinitionFile {
    pub fn from_json(src: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("definition serializes")
    }

    pub fn validate(&self) -> Result<Definition, InputError> {
        let ms = &self.manifold;
        let m = ms.dim;
        if m == 0 {
            return Err(schema("manifold.dim", "must be positive"));
        }
        if ms.box_.len() != m {
            return Err(schema("manifold.box", format!("expected {m} intervals, found {}", ms.box_.len())));
        }
        if ms.periodic.len() != m {
            return Err(schema("manifold.periodic", format!("expected {m} flags, found {}", ms.periodic.len())));
        }
        let domain = CoordinateDomain::new(ms.box_.clone(), ms.periodic.clone())
            .map_err(|e| schema("manifold.box", e.to_string()))?;
        if self.samples == 0 {
            return Err(schema("samples", "must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(schema("tol", "must be positive"));
        }
        let mut def = Definition::new(domain.clone());
        def.checks = self.checks.clone();
        def.options = RunOptions { samples: self.samples, seed: self.seed, tol: self.tol, timing: true };
        if self.fields.is_some() && self.almost_contact.is_some() {
            return Err(schema("fields", "fields and almost_contact are alternative payloads"));
        }
        if let Some(f) = &self.fields {
            let a = matrix(&f.a, m, "fields.A")?;
            let pi = antisymmetric(matrix(&f.pi, m, "fields.pi")?, &domain, "fields.pi")?;
            let sigma = antisymmetric(matrix(&f.sigma, m, "fields.sigma")?, &domain, "fields.sigma")?;
            def.phi = Some(
                GeneralizedF::new(EndField(a), BivectorField(pi), TwoFormField(sigma), domain.clone())
                    .map_err(structure("fields"))?,
            );
            if let Some(b) = &f.b {
                def.b = Some(TwoFormField(antisymmetric(matrix(b, m, "fields.B")?, &domain, "fields.B")?));
            }
        }
        if let Some(g) = &self.metric {
            let gamma = symmetric(matrix(&g.gamma, m, "metric.gamma")?, &domain, "metric.gamma")?;
            let psi = antisymmetric(matrix(&g.psi, m, "metric.psi")?, &domain, "metric.psi")?;
            def.metric = Some(
                GeneralizedMetric::new(MetricField(gamma), TwoFormField(psi), domain.clone()).map_err(structure("metric"))?,
            );
        }
        if let Some(ac) = &self.almost_contact {
            let p = antisymmetric(matrix(&ac.p, m, "almost_contact.P")?, &domain, "almost_contact.P")?;
            let theta = antisymmetric(matrix(&ac.theta, m, "almost_contact.theta")?, &domain, "almost_contact.theta")?;
            let f = matrix(&ac.f, m, "almost_contact.F")?;
            if ac.z.len() != ac.xi.len() {
                return Err(schema("almost_contact.xi", format!("expected {} forms to match Z", ac.z.len())));
            }
            let z = ac
                .z
                .iter()
                .enumerate()
                .map(|(a, v)| vector(v, m, &format!("almost_contact.Z[{a}]")).map(VectorField))
                .collect::<Result<Vec<_>, _>>()?;
            let xi = ac
                .xi
                .iter()
                .enumerate()
                .map(|(a, v)| vector(v, m, &format!("almost_contact.xi[{a}]")).map(OneFormField))
                .collect::<Result<Vec<_>, _>>()?;
            let ac = AlmostContact { p: BivectorField(p), theta: TwoFormField(theta), f: EndField(f), z, xi, domain: domain.clone() };
            def.phi = Some(ac.to_generalized().map_err(structure("almost_contact"))?);
            def.almost_contact = Some(ac);
        }
        if let Some(s) = &self.sasaki {
            let gamma = MetricField(symmetric(matrix(&s.gamma, m, "sasaki.gamma")?, &domain, "sasaki.gamma")?);
            let psi = TwoFormField(antisymmetric(matrix(&s.psi, m, "sasaki.psi")?, &domain, "sasaki.psi")?);
            let kappa = OneFormField(vector(&s.kappa, m, "sasaki.kappa")?);
            let record = |r: &ContactRecordSpec, name: &str| -> Result<AlmostContactMetric, InputError> {
                let path = format!("sasaki.{name}");
                let f = matrix(&r.f, m, &format!("{path}.F"))?;
                let z = vector(&r.z, m, &format!("{path}.Z"))?;
                let xi = vector(&r.xi, m, &format!("{path}.xi"))?;
                AlmostContactMetric::new(EndField(f), VectorField(z), OneFormField(xi), gamma.clone(), domain.clone())
                    .map_err(|e| InputError::Structure { path, source: e })
            };
            let plus = record(&s.plus, "plus")?;
            let minus = record(&s.minus, "minus")?;
            def.sasaki = Some(SasakiInput::new(plus, minus, psi, kappa).map_err(structure("sasaki"))?);
        }
        for (i, c) in self.checks.iter().enumerate() {
            if !crate::checks::CHECK_NAMES.contains(&c.as_str()) {
                return Err(schema(&format!("checks[{i}]"), format!("unknown check {c:?}")));
            }
        }
        Ok(def)
    }
}

/// Reads and validates a definition file.
pub fn load_definition(path: &str) -> Result<Definition, InputError> {
    let src = std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.into(), source: e })?;
    DefinitionFile::from_json(&src)?.validate()
}

fn rows(m: &ExprMatrix) -> Rows {
    m.to_strings()
}

fn strings(v: &[crate::expr::ScalarExpr]) -> Vec<String> {
    v.iter().map(|e| e.to_string()).collect()
}

/// Serializable form of a validated definition.
pub fn export(def: &Definition) -> DefinitionFile {
    let d = &def.domain;
    let fields = if def.almost_contact.is_some() {
        None
    } else {
        def.phi.as_ref().map(|phi| FieldsSpec {
            a: rows(&phi.a.0),
            pi: rows(&phi.pi.0),
            sigma: rows(&phi.sigma.0),
            b: def.b.as_ref().map(|b| rows(&b.0)),
        })
    };
    let record = |r: &AlmostContactMetric| ContactRecordSpec { f: rows(&r.f.0), z: strings(&r.z.0), xi: strings(&r.xi.0) };
    DefinitionFile {
        manifold: ManifoldSpec { dim: d.dim, box_: d.box_.clone(), periodic: d.periodic.clone() },
        fields,
        metric: def.metric.as_ref().map(|g| MetricSpec { gamma: rows(&g.gamma.0), psi: rows(&g.psi.0) }),
        almost_contact: def.almost_contact.as_ref().map(|ac| AlmostContactSpec {
            p: rows(&ac.p.0),
            theta: rows(&ac.theta.0),
            f: rows(&ac.f.0),
            z: ac.z.iter().map(|v| strings(&v.0)).collect(),
            xi: ac.xi.iter().map(|v| strings(&v.0)).collect(),
        }),
        sasaki: def.sasaki.as_ref().map(|s| SasakiSpec {
            gamma: rows(&s.plus.gamma.0),
            psi: rows(&s.psi.0),
            kappa: strings(&s.kappa.0),
            plus: record(&s.plus),
            minus: record(&s.minus),
        }),
        checks: def.checks.clone(),
        samples: def.options.samples,
        seed: def.options.seed,
        tol: def.options.tol,
    }
}
