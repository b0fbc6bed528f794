//! Command runners shared by the `opcheck` binary and the browser demo. Each
//! produces a [`Report`] whose JSON form is deterministic for fixed inputs.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cm_operad::{
    build_cm_truncation, closure_check, is_cm_morphism, mul_set, phi_check, segal_fiber, CMObject, Color, Variant,
};
use crate::envelope::{
    build_envelope, build_fplus_over_fstar, comparison_on_objects, is_fplus_morphism, tuple_label,
    verify_envelope_iso, EnvObject, FPlusObject,
};
use crate::error::{Error, Result};
use crate::fincat::{check_operad_conditions, FStar, FinCategory, OperadCheckOptions, Scope};
use crate::finset::{classify, enumerate_maps, factorize, inert_cube, PointedMap, PointedSet};
use crate::semantics::{build_A, check_algebra, check_cardinality, check_functoriality, check_inert_cube_limit, ModuleData};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when skipped after an earlier failure.
    pub verdict: Option<Verdict>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            name: name.into(),
            verdict: Some(verdict),
        }
    }

    pub fn skipped(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    pub bounds: BTreeMap<String, usize>,
    pub checks: Vec<Check>,
    pub verdict: Status,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &str, variant: Option<Variant>, bounds: &[(&str, usize)], checks: Vec<Check>) -> Self {
        let witness = checks
            .iter()
            .filter_map(|c| c.verdict.as_ref()?.witness().cloned())
            .next();
        Report {
            command: command.into(),
            variant,
            bounds: bounds.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            checks,
            verdict: if witness.is_some() {
                Status::Counterexample
            } else {
                Status::Pass
            },
            witness,
            data: Value::Null,
            wall_time_ms: None,
        }
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Human-readable summary; not a stable format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let bounds: Vec<String> = self.bounds.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = write!(out, "{}", self.command);
        if let Some(v) = self.variant {
            let _ = write!(out, " [{v}]");
        }
        if !bounds.is_empty() {
            let _ = write!(out, " ({})", bounds.join(", "));
        }
        let _ = writeln!(out, ": {}", if self.passed() { "pass" } else { "counterexample" });
        for c in &self.checks {
            let v = match &c.verdict {
                None => "skipped".to_string(),
                Some(Verdict::Pass) => "pass".to_string(),
                Some(Verdict::Fail { witness }) => format!("FAIL {witness}"),
            };
            let _ = writeln!(out, "  {}: {v}", c.name);
        }
        if !self.data.is_null() {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&self.data).expect("json values serialize"));
        }
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(out, "  time: {ms} ms");
        }
        out
    }
}

/// A report together with the category it was computed on, for DOT export.
pub struct Run {
    pub report: Report,
    pub category: Option<Arc<FinCategory>>,
}

impl Run {
    fn bare(report: Report) -> Self {
        Run { report, category: None }
    }
}

fn guard(count: usize, ceiling: usize) -> Result<()> {
    if count > ceiling {
        return Err(Error::Ceiling { count, ceiling });
    }
    Ok(())
}

fn cm_object_count(bound: usize) -> usize {
    (1usize << (bound + 1)) - 1
}

/// Closure under composition, then the three operad conditions.
pub fn cmd_verify_operad(bound: usize, v: Variant, opts: OperadCheckOptions, ceiling: usize) -> Result<Run> {
    if bound < 1 {
        return Err(Error::InvalidBound("--max-size must be at least 1".into()));
    }
    guard(cm_object_count(bound), ceiling)?;
    let mut bounds = vec![("max_size", bound)];
    if opts.scope == Scope::InertOnly {
        bounds.push(("inert_only", 1));
    }
    if opts.up_to_equivalence {
        bounds.push(("up_to_equivalence", 1));
    }
    let closure = closure_check(bound, v)?;
    let names = ["cocartesian inert lifts", "hom decomposition", "segal fibers"];
    if !closure.is_pass() {
        let mut checks = vec![Check::new("closure", closure)];
        checks.extend(names.iter().map(|n| Check::skipped(*n)));
        return Ok(Run::bare(Report::new("verify operad", Some(v), &bounds, checks)));
    }
    let cm = build_cm_truncation(bound, v)?;
    let mut checks = vec![Check::new("closure", closure)];
    for c in check_operad_conditions(&cm.fibered, opts)? {
        checks.push(Check {
            name: c.name.into(),
            verdict: c.verdict,
        });
    }
    let total = Arc::clone(cm.total());
    let data = json!({"objects": total.object_count(), "arrows": total.arrow_count()});
    Ok(Run {
        report: Report::new("verify operad", Some(v), &bounds, checks).with_data(data),
        category: Some(total),
    })
}

pub fn cmd_verify_closure(bound: usize, v: Variant, ceiling: usize) -> Result<Run> {
    guard(cm_object_count(bound), ceiling)?;
    let checks = vec![Check::new("closure", closure_check(bound, v)?)];
    Ok(Run::bare(Report::new("verify closure", Some(v), &[("max_size", bound)], checks)))
}

pub fn cmd_verify_envelope(bound: usize, shape: usize, v: Variant, ceiling: usize) -> Result<Run> {
    let cmp = verify_envelope_iso(bound, shape, v, ceiling)?;
    let data = json!({
        "envelope": {"objects": cmp.envelope_objects, "arrows": cmp.envelope_arrows},
        "fplus": {"objects": cmp.fplus_objects, "arrows": cmp.fplus_arrows},
    });
    let checks = vec![Check::new("comparison isomorphism", cmp.verdict)];
    Ok(Run::bare(
        Report::new("verify envelope", Some(v), &[("max_size", bound), ("shape", shape)], checks).with_data(data),
    ))
}

pub fn cmd_verify_phi(bound: usize, v: Variant, ceiling: usize) -> Result<Run> {
    guard(cm_object_count(bound), ceiling)?;
    let checks = vec![Check::new("phi fully faithful onto |U| <= 1", phi_check(bound, v)?)];
    Ok(Run::bare(Report::new("verify phi", Some(v), &[("max_size", bound)], checks)))
}

pub fn cmd_verify_segal(n: usize, v: Variant, ceiling: usize) -> Result<Run> {
    guard(cm_object_count(n.max(1)), ceiling)?;
    let fiber = segal_fiber(n, v)?;
    let checks = vec![Check::new("segal comparison isomorphism", fiber.verdict())];
    let data = json!({"fiber": {"objects": fiber.fiber.object_count(), "arrows": fiber.fiber.arrow_count()}});
    Ok(Run {
        report: Report::new("verify segal", Some(v), &[("arity", n)], checks).with_data(data),
        category: Some(fiber.fiber),
    })
}

pub fn cmd_mul(inputs: &[Color], output: Color, v: Variant) -> Result<Run> {
    let ms = mul_set(inputs, output, v)?;
    let colors: Vec<String> = inputs.iter().map(|c| c.to_string()).collect();
    let data = json!({
        "inputs": colors,
        "output": output.to_string(),
        "count": ms.len(),
        "morphisms": ms.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
    });
    Ok(Run::bare(
        Report::new("mul", Some(v), &[("arity", inputs.len())], vec![]).with_data(data),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FunctorCheck {
    Functoriality,
    Cardinality,
    Cube,
}

impl std::str::FromStr for FunctorCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "functoriality" => Ok(FunctorCheck::Functoriality),
            "cardinality" => Ok(FunctorCheck::Cardinality),
            "cube" => Ok(FunctorCheck::Cube),
            other => Err(Error::Parse(format!(
                "unknown check `{other}` (expected functoriality, cardinality or cube)"
            ))),
        }
    }
}

/// Algebra laws, then the requested checks on `A_{E,M}` up to `bound`. The
/// cube check covers every `(S, U)` with `1 <= |S°| <= bound`.
pub fn cmd_functor(algebra: &ModuleData, name: &str, bound: usize, which: &[FunctorCheck], ceiling: usize) -> Result<Run> {
    guard(bound + 1, ceiling)?;
    let mut which = which.to_vec();
    which.sort();
    which.dedup();
    let laws = check_algebra(algebra);
    let mut checks = vec![Check::new("algebra laws", laws.clone())];
    let label = |c: FunctorCheck| match c {
        FunctorCheck::Functoriality => "functoriality",
        FunctorCheck::Cardinality => "cardinality",
        FunctorCheck::Cube => "inert cube limits",
    };
    let a = laws.is_pass().then(|| build_A(algebra, bound));
    for &c in &which {
        let Some(a) = &a else {
            checks.push(Check::skipped(label(c)));
            continue;
        };
        let verdict = match c {
            FunctorCheck::Functoriality => check_functoriality(a),
            FunctorCheck::Cardinality => check_cardinality(a),
            FunctorCheck::Cube => {
                let mut v = Verdict::Pass;
                for x in CMObject::all(bound).into_iter().filter(|x| x.base.arity >= 1) {
                    v = check_inert_cube_limit(algebra, &x)?;
                    if !v.is_pass() {
                        break;
                    }
                }
                v
            }
        };
        checks.push(Check::new(label(c), verdict));
    }
    let data = json!({
        "algebra": name,
        "monoid_size": algebra.monoid.len(),
        "module_size": algebra.len(),
        "value_sizes": a.as_ref().map(|a| a.object_values.iter().map(Vec::len).collect::<Vec<_>>()),
    });
    Ok(Run {
        report: Report::new("functor", None, &[("max_size", bound)], checks).with_data(data),
        category: a.map(|a| Arc::clone(a.base.category())),
    })
}

pub fn cmd_maps(source: usize, target: usize) -> Result<Run> {
    let maps: Vec<Value> = enumerate_maps(PointedSet::new(source), PointedSet::new(target))
        .iter()
        .map(|f| {
            let c = classify(f);
            json!({"map": f.to_string(), "inert": c.is_inert, "active": c.is_active})
        })
        .collect();
    let data = json!({"count": maps.len(), "maps": maps});
    Ok(Run::bare(
        Report::new("maps", None, &[("source", source), ("target", target)], vec![]).with_data(data),
    ))
}

pub fn cmd_factorize(f: &PointedMap) -> Result<Run> {
    let (i, a) = factorize(f);
    let c = classify(f);
    let data = json!({
        "map": f.to_string(),
        "inert": c.is_inert,
        "active": c.is_active,
        "inert_part": i.to_string(),
        "active_part": a.to_string(),
    });
    Ok(Run::bare(Report::new("factorize", None, &[], vec![]).with_data(data)))
}

pub fn cmd_cube(arity: usize) -> Result<Run> {
    let cube = inert_cube(PointedSet::new(arity));
    let data = json!({
        "vertices": cube.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "edges": cube
            .non_identity_edges()
            .map(|e| json!({"from": e.from.to_string(), "to": e.to.to_string(), "map": e.map.to_string()}))
            .collect::<Vec<_>>(),
        "commutes": cube.commutes(),
    });
    Ok(Run::bare(Report::new("cube", None, &[("arity", arity)], vec![]).with_data(data)))
}

pub fn cmd_cm_morphism(f: &PointedMap, src: &CMObject, tgt: &CMObject, v: Variant) -> Result<Run> {
    let ok = is_cm_morphism(f, src, tgt, v)?;
    let data = json!({"map": f.to_string(), "source": src.to_string(), "target": tgt.to_string(), "is_morphism": ok});
    Ok(Run::bare(Report::new("cm-morphism", Some(v), &[], vec![]).with_data(data)))
}

pub fn cmd_fplus_morphism(map: &[usize], src: &FPlusObject, tgt: &FPlusObject) -> Result<Run> {
    let ok = is_fplus_morphism(map, src, tgt)?;
    let data = json!({"map": map, "source": src.to_string(), "target": tgt.to_string(), "is_morphism": ok});
    Ok(Run::bare(Report::new("fplus-morphism", None, &[], vec![]).with_data(data)))
}

pub fn cmd_compare(e: &EnvObject) -> Result<Run> {
    let data = json!({"object": e.to_string(), "image": tuple_label(&comparison_on_objects(e))});
    Ok(Run::bare(Report::new("compare", None, &[], vec![]).with_data(data)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryKind {
    FStar,
    Cm,
    FPlus,
    Envelope,
}

impl std::str::FromStr for CategoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fstar" => Ok(CategoryKind::FStar),
            "cm" => Ok(CategoryKind::Cm),
            "fplus" => Ok(CategoryKind::FPlus),
            "envelope" => Ok(CategoryKind::Envelope),
            other => Err(Error::Parse(format!(
                "unknown category `{other}` (expected fstar, cm, fplus or envelope)"
            ))),
        }
    }
}

/// Builds a category (checking the category axioms) for export.
pub fn cmd_build(kind: CategoryKind, bound: usize, shape: usize, v: Variant, ceiling: usize) -> Result<Run> {
    let (name, variant, bounds, total): (_, _, Vec<(&str, usize)>, Arc<FinCategory>) = match kind {
        CategoryKind::FStar => {
            guard(bound + 1, ceiling)?;
            ("fstar", None, vec![("max_size", bound)], Arc::clone(FStar::truncation(bound).category()))
        }
        CategoryKind::Cm => {
            guard(cm_object_count(bound), ceiling)?;
            let cm = build_cm_truncation(bound, v)?;
            ("cm", Some(v), vec![("max_size", bound)], Arc::clone(cm.total()))
        }
        CategoryKind::FPlus => {
            let fp = build_fplus_over_fstar(bound, shape)?;
            guard(fp.objects.len(), ceiling)?;
            ("fplus", None, vec![("max_size", bound), ("shape", shape)], Arc::clone(fp.total()))
        }
        CategoryKind::Envelope => {
            guard(crate::envelope::envelope_objects(bound, shape).len(), ceiling)?;
            let env = build_envelope(bound, shape, v)?;
            ("envelope", Some(v), vec![("max_size", bound), ("shape", shape)], Arc::clone(env.total()))
        }
    };
    let checks = vec![Check::new("category axioms", crate::fincat::check_category(&total))];
    let data = json!({"category": name, "objects": total.object_count(), "arrows": total.arrow_count()});
    Ok(Run {
        report: Report::new("build", variant, &bounds, checks).with_data(data),
        category: Some(total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::DEFAULT_CEILING;

    #[test]
    fn operad_report_shape() {
        let run = cmd_verify_operad(2, Variant::Strengthened, OperadCheckOptions::default(), DEFAULT_CEILING).unwrap();
        assert!(run.report.passed());
        assert_eq!(run.report.checks.len(), 4);
        let lit = cmd_verify_operad(2, Variant::Literal, OperadCheckOptions::default(), DEFAULT_CEILING).unwrap();
        assert_eq!(lit.report.verdict, Status::Counterexample);
        assert!(matches!(lit.report.witness, Some(Witness::NotClosed { .. })));
        assert!(lit.report.checks[1].verdict.is_none());
    }

    #[test]
    fn zero_bound_is_an_input_error() {
        assert!(cmd_verify_operad(0, Variant::Strengthened, OperadCheckOptions::default(), DEFAULT_CEILING).is_err());
    }

    #[test]
    fn ceiling_applies() {
        assert!(matches!(
            cmd_verify_phi(3, Variant::Strengthened, 4),
            Err(Error::Ceiling { count: 15, ceiling: 4 })
        ));
    }

    #[test]
    fn mul_report_counts() {
        let run = cmd_mul(&[Color::A, Color::M], Color::M, Variant::Strengthened).unwrap();
        assert_eq!(run.report.data["count"], 1);
        assert!(run.report.passed());
    }

    #[test]
    fn text_and_json_render() {
        let run = cmd_factorize(&"2->1:0,1".parse().unwrap()).unwrap();
        assert!(run.report.to_text().starts_with("factorize: pass"));
        assert!(run.report.to_json().contains("\"inert_part\": \"2->1:0,1\""));
    }
}
