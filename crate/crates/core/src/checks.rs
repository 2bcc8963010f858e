//! Named checks dispatched on a validated definition.

use crate::genstruct::check_classical_crf;
use crate::io::Definition;
use crate::report::{combine, CheckError, CheckReport, RunOptions};

pub const CHECK_NAMES: &[&str] = &[
    "axioms",
    "integrability",
    "ls-torsion",
    "classical-crf",
    "frames",
    "metric-axioms",
    "metric-compat",
    "quadruple-roundtrip",
    "crfk",
    "gualtieri",
    "partial-kahler",
    "cosymplectic",
    "sasakian",
    "bfield",
    "normality",
];

fn missing(check: &str, what: &str) -> CheckError {
    CheckError::Precondition { check: check.into(), reason: format!("definition has no {what}") }
}

fn renamed(mut r: CheckReport, name: &str) -> CheckReport {
    r.check = name.into();
    r
}

/// Checks that make sense for the payload, used when none are requested.
pub fn default_checks(def: &Definition) -> Vec<String> {
    let mut out: Vec<&str> = vec![];
    if def.phi.is_some() {
        out.extend(["axioms", "integrability"]);
    }
    if def.almost_contact.is_some() {
        out.extend(["frames", "normality"]);
    }
    if def.metric.is_some() && def.phi.is_some() {
        out.extend(["metric-axioms", "metric-compat", "crfk"]);
    }
    if def.b.is_some() {
        out.push("bfield");
    }
    if def.sasaki.is_some() {
        out.push("sasakian");
    }
    out.into_iter().map(String::from).collect()
}

/// Runs one named check; the report carries the requested name.
pub fn run_check(def: &Definition, name: &str, opts: &RunOptions) -> Result<CheckReport, CheckError> {
    dispatch(def, name, opts).map(|r| renamed(r, name))
}

fn dispatch(def: &Definition, name: &str, opts: &RunOptions) -> Result<CheckReport, CheckError> {
    let phi = || def.phi.as_ref().ok_or_else(|| missing(name, "generalized F-structure"));
    let metric = || def.metric.as_ref().ok_or_else(|| missing(name, "metric"));
    let quadruple = || -> Result<_, CheckError> { Ok(metric()?.quadruple(phi()?)) };
    match name {
        "axioms" => phi()?.check_axioms(opts),
        "integrability" => phi()?.check_integrability(opts),
        "ls-torsion" => phi()?.check_ls_torsion(opts),
        "classical-crf" => {
            let p = phi()?;
            if p.pi.0.is_structurally_zero() && p.sigma.0.is_structurally_zero() {
                check_classical_crf(&p.a, &def.domain, opts)
            } else if def.metric.is_some() {
                let q = quadruple()?;
                let a = renamed(check_classical_crf(&q.fp, &def.domain, opts)?, "classical-crf+");
                let b = renamed(check_classical_crf(&q.fm, &def.domain, opts)?, "classical-crf-");
                Ok(combine("classical-crf", &[a, b]))
            } else {
                Err(CheckError::Precondition {
                    check: name.into(),
                    reason: "structure is not classical and no metric is given to induce F±".into(),
                })
            }
        }
        "frames" => {
            let ac = def.almost_contact.as_ref().ok_or_else(|| missing(name, "almost contact payload"))?;
            let (neg, pos) = ac.frames();
            phi()?.check_complementary_frames(&neg, &pos, opts)
        }
        "normality" => {
            let ac = def.almost_contact.as_ref().ok_or_else(|| missing(name, "almost contact payload"))?;
            ac.check_normality(opts)
        }
        "metric-axioms" => metric()?.check_metric_axioms(opts),
        "metric-compat" => {
            let (a, b) = metric()?.check_compatibility(phi()?, opts)?;
            Ok(combine("metric-compat", &[a, b]))
        }
        "quadruple-roundtrip" => quadruple()?.check_roundtrip(opts),
        "crfk" => Ok(metric()?.check_crfk(phi()?, opts)?.combined()),
        "gualtieri" => quadruple()?.check_gualtieri_kahler(opts),
        "partial-kahler" => quadruple()?.check_partial_kahler(opts),
        "cosymplectic" => {
            let acm = def
                .contact_metric()
                .ok_or_else(|| missing(name, "codimension-one almost contact payload with a metric"))?
                .map_err(|e| CheckError::Structure(e.to_string()))?;
            let direct = acm.check_cosymplectic(opts)?;
            let product = acm.check_cosymplectic_product(opts)?;
            Ok(combine("cosymplectic", &[direct, product]))
        }
        "sasakian" => {
            let s = def.sasaki.as_ref().ok_or_else(|| missing(name, "sasaki payload"))?;
            Ok(s.check_generalized_sasakian(opts)?.combined())
        }
        "bfield" => {
            let b = def.b.as_ref().ok_or_else(|| missing(name, "B matrix"))?;
            phi()?.b_field(b).check_integrability(opts)
        }
        other => Err(CheckError::Structure(format!("unknown check {other:?}"))),
    }
}

/// Runs the given checks in order; the first error aborts.
pub fn run_checks(def: &Definition, names: &[String], opts: &RunOptions) -> Result<Vec<CheckReport>, CheckError> {
    names.iter().map(|n| run_check(def, n, opts)).collect()
}
