//! Finite commutative monoids and modules in sets, and the functor
//! `A_{E,M}: F_* -> Set` with `A(<n>) = E^n × M`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cm_operad::canonical_lift;
use crate::cm_operad::CMObject;
use crate::envelope::{odometer, FPlusMorphism, FPlusObject};
use crate::error::{Error, Result};
use crate::fincat::FStar;
use crate::finset::{inert_cube, restriction_map, subcube, PointedMap, PointedSet, Subset, BASEPOINT};
use crate::verdict::{Verdict, Witness};

/// Elements are indices into `elements`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommMonoid {
    pub elements: Vec<String>,
    pub unit: usize,
    pub mult: Vec<Vec<usize>>,
}

impl CommMonoid {
    pub fn new(elements: Vec<String>, unit: usize, mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if unit >= n {
            return Err(Error::MalformedTable("unit is not an element".into()));
        }
        check_table("mult", &mult, n, n)?;
        Ok(CommMonoid { elements, unit, mult })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Left fold in the given order, starting from the unit.
    pub fn fold(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.unit, |acc, x| self.mult[acc][x])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleData {
    pub monoid: CommMonoid,
    pub elements: Vec<String>,
    /// `action[e][m]`
    pub action: Vec<Vec<usize>>,
}

impl ModuleData {
    pub fn new(monoid: CommMonoid, elements: Vec<String>, action: Vec<Vec<usize>>) -> Result<Self> {
        check_table("action", &action, monoid.len(), elements.len())?;
        Ok(ModuleData {
            monoid,
            elements,
            action,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn check_table(name: &str, table: &[Vec<usize>], rows: usize, cols: usize) -> Result<()> {
    if table.len() != rows || table.iter().any(|r| r.len() != cols || r.iter().any(|&x| x >= cols)) {
        return Err(Error::MalformedTable(format!("`{name}` must be a total {rows}×{cols} table")));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct MonoidDoc {
    elems: Vec<String>,
    unit: String,
    mult: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModuleDoc {
    elems: Vec<String>,
    action: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AlgebraDoc {
    monoid: MonoidDoc,
    module: ModuleDoc,
}

fn index_of(labels: &[String]) -> Result<HashMap<&str, usize>> {
    let mut out = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if out.insert(l.as_str(), i).is_some() {
            return Err(Error::MalformedTable(format!("duplicate element `{l}`")));
        }
    }
    Ok(out)
}

fn resolve(table: &[Vec<String>], labels: &HashMap<&str, usize>) -> Result<Vec<Vec<usize>>> {
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    labels
                        .get(x.as_str())
                        .copied()
                        .ok_or_else(|| Error::MalformedTable(format!("unknown element `{x}`")))
                })
                .collect()
        })
        .collect()
}

/// Parses `{monoid: {elems, unit, mult}, module: {elems, action}}`. Table
/// rows are indexed by the first argument (for `action`, the monoid element).
pub fn parse_algebra(json: &str) -> Result<ModuleData> {
    let doc: AlgebraDoc = serde_json::from_str(json)?;
    let e = index_of(&doc.monoid.elems)?;
    let m = index_of(&doc.module.elems)?;
    let unit = *e
        .get(doc.monoid.unit.as_str())
        .ok_or_else(|| Error::MalformedTable(format!("unknown unit `{}`", doc.monoid.unit)))?;
    let monoid = CommMonoid::new(doc.monoid.elems.clone(), unit, resolve(&doc.monoid.mult, &e)?)?;
    let action = resolve(&doc.module.action, &m)?;
    ModuleData::new(monoid, doc.module.elems.clone(), action)
}

pub fn algebra_to_json(m: &ModuleData) -> Result<String> {
    let show = |t: &[Vec<usize>], labels: &[String]| -> Vec<Vec<String>> {
        t.iter()
            .map(|r| r.iter().map(|&x| labels[x].clone()).collect())
            .collect()
    };
    let e = &m.monoid;
    let doc = AlgebraDoc {
        monoid: MonoidDoc {
            elems: e.elements.clone(),
            unit: e.elements[e.unit].clone(),
            mult: show(&e.mult, &e.elements),
        },
        module: ModuleDoc {
            elems: m.elements.clone(),
            action: show(&m.action, &m.elements),
        },
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub const BUNDLED: [(&str, &str); 2] = [
    ("z2_additive", include_str!("../algebras/z2_additive.json")),
    ("max_monoid", include_str!("../algebras/max_monoid.json")),
];

/// A bundled algebra by name, with or without the `.json` suffix.
pub fn bundled_algebra(name: &str) -> Option<ModuleData> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| parse_algebra(json).expect("bundled algebras are well formed"))
}

/// Monoid laws, then module laws, reporting the first violating elements.
pub fn check_algebra(m: &ModuleData) -> Verdict {
    let e = &m.monoid;
    let fail = |law: &str, es: &[usize], ms: &[usize]| {
        let elements = es
            .iter()
            .map(|&x| e.elements[x].clone())
            .chain(ms.iter().map(|&x| m.elements[x].clone()))
            .collect();
        Verdict::fail(Witness::AlgebraLaw {
            law: law.into(),
            elements,
        })
    };
    let n = e.len();
    for a in 0..n {
        if e.mult[e.unit][a] != a || e.mult[a][e.unit] != a {
            return fail("unit", &[a], &[]);
        }
    }
    for a in 0..n {
        for b in 0..n {
            if e.mult[a][b] != e.mult[b][a] {
                return fail("commutativity", &[a, b], &[]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if e.mult[e.mult[a][b]][c] != e.mult[a][e.mult[b][c]] {
                    return fail("associativity", &[a, b, c], &[]);
                }
            }
        }
    }
    for x in 0..m.len() {
        if m.action[e.unit][x] != x {
            return fail("module unit", &[], &[x]);
        }
    }
    for a in 0..n {
        for b in 0..n {
            for x in 0..m.len() {
                if m.action[e.mult[a][b]][x] != m.action[a][m.action[b][x]] {
                    return fail("module associativity", &[a, b], &[x]);
                }
            }
        }
    }
    Verdict::Pass
}

/// `⟨n⟩` as the carrier `{1..n+1}` with the basepoint relabeled `n+1` and
/// marked, so that values read `(e_1, .., e_n, m)`.
pub fn embed_fstar(s: PointedSet) -> FPlusObject {
    FPlusObject {
        size: s.arity + 1,
        marked: Subset::singleton(s.arity + 1),
    }
}

pub fn embed_fstar_map(f: &PointedMap) -> FPlusMorphism {
    let (n, k) = (f.source().arity, f.target().arity);
    let relabel = |t: usize| if t == BASEPOINT { k + 1 } else { t };
    FPlusMorphism {
        source: embed_fstar(f.source()),
        target: embed_fstar(f.target()),
        map: (1..=n).map(|c| relabel(f.apply(c))).chain([k + 1]).collect(),
    }
}

/// An element of `A(x)`: entry `c - 1` is the value at carrier element `c`,
/// an index into `M` if `c` is marked and into `E` otherwise.
pub type Assignment = Vec<usize>;

fn radices(m: &ModuleData, x: &FPlusObject) -> Vec<usize> {
    (1..=x.size)
        .map(|c| if x.marked.contains(c) { m.len() } else { m.monoid.len() })
        .collect()
}

/// All assignments, lexicographic in carrier order.
pub fn eval_object(m: &ModuleData, x: &FPlusObject) -> Vec<Assignment> {
    odometer(&radices(m, x))
        .into_iter()
        .map(|t| t.into_iter().map(|v| v - 1).collect())
        .collect()
}

/// Position of `a` in [`eval_object`].
pub fn assignment_rank(m: &ModuleData, x: &FPlusObject, a: &[usize]) -> usize {
    radices(m, x).iter().zip(a).fold(0, |acc, (&r, &v)| acc * r + v)
}

/// Fold the unmarked components over each target element; a marked target
/// additionally acts on its unique marked preimage.
pub fn eval_morphism(m: &ModuleData, f: &FPlusMorphism, input: &[usize]) -> Assignment {
    let e = &m.monoid;
    (1..=f.target.size)
        .map(|t| {
            let fiber = (1..=f.source.size).filter(|&c| f.map[c - 1] == t);
            let folded = e.fold(fiber.clone().filter(|&c| !f.source.marked.contains(c)).map(|c| input[c - 1]));
            if f.target.marked.contains(t) {
                let carrier = fiber
                    .clone()
                    .find(|&c| f.source.marked.contains(c))
                    .expect("marks biject onto marks");
                m.action[folded][input[carrier - 1]]
            } else {
                folded
            }
        })
        .collect()
}

pub type Evaluator = dyn Fn(&ModuleData, &FPlusMorphism, &[usize]) -> Assignment;

/// `A_{E,M}` on the `F_*` truncation at `bound`; arrow values are tables
/// indexed by assignment rank.
pub struct SemFunctor {
    pub bound: usize,
    pub algebra: ModuleData,
    pub base: FStar,
    pub object_values: Vec<Vec<Assignment>>,
    pub arrow_values: Vec<Vec<usize>>,
}

impl SemFunctor {
    pub fn apply(&self, f: &PointedMap, input: &[usize]) -> Option<&Assignment> {
        let a = self.base.arrow_id(f)?;
        let x = embed_fstar(f.source());
        let out = self.arrow_values[a][assignment_rank(&self.algebra, &x, input)];
        Some(&self.object_values[f.target().arity][out])
    }

    pub fn label(&self, n: usize, a: &[usize]) -> Vec<String> {
        a.iter()
            .enumerate()
            .map(|(i, &v)| {
                if i == n {
                    self.algebra.elements[v].clone()
                } else {
                    self.algebra.monoid.elements[v].clone()
                }
            })
            .collect()
    }
}

#[allow(non_snake_case)]
pub fn build_A(m: &ModuleData, bound: usize) -> SemFunctor {
    build_A_with(m, bound, &eval_morphism)
}

/// [`build_A`] with a replaceable morphism evaluator.
#[allow(non_snake_case)]
pub fn build_A_with(m: &ModuleData, bound: usize, eval: &Evaluator) -> SemFunctor {
    let base = FStar::truncation(bound);
    let object_values: Vec<Vec<Assignment>> = (0..=bound)
        .map(|n| eval_object(m, &embed_fstar(PointedSet::new(n))))
        .collect();
    let arrow_values = base
        .category()
        .arrows()
        .map(|a| {
            let f = embed_fstar_map(base.map(a));
            object_values[f.source.size - 1]
                .iter()
                .map(|x| assignment_rank(m, &f.target, &eval(m, &f, x)))
                .collect()
        })
        .collect();
    SemFunctor {
        bound,
        algebra: m.clone(),
        base,
        object_values,
        arrow_values,
    }
}

/// Identities first, then every composable pair on every input.
pub fn check_functoriality(a: &SemFunctor) -> Verdict {
    let c = a.base.category();
    for n in 0..=a.bound {
        let id = a.base.identity(n);
        if let Some(i) = a.arrow_values[id].iter().enumerate().position(|(i, &j)| i != j) {
            return Verdict::fail(Witness::IdentityPreservation {
                map: a.base.map(id).to_string(),
                input: a.label(n, &a.object_values[n][i]),
            });
        }
    }
    for (f, g) in c.composable_pairs() {
        let Some(h) = c.compose(f, g) else { continue };
        let n = a.base.map(f).source().arity;
        let (tf, tg, th) = (&a.arrow_values[f], &a.arrow_values[g], &a.arrow_values[h]);
        if let Some(i) = (0..tf.len()).find(|&i| tg[tf[i]] != th[i]) {
            return Verdict::fail(Witness::Functoriality {
                first: a.base.map(f).to_string(),
                second: a.base.map(g).to_string(),
                input: a.label(n, &a.object_values[n][i]),
            });
        }
    }
    Verdict::Pass
}

/// `|A(<n>)| = |E|^n · |M|` for every `n` within bound.
pub fn check_cardinality(a: &SemFunctor) -> Verdict {
    for (n, values) in a.object_values.iter().enumerate() {
        let expected = a.algebra.monoid.len().pow(n as u32) * a.algebra.len();
        if values.len() != expected {
            return Verdict::fail(Witness::Cardinality {
                arity: n,
                expected,
                actual: values.len(),
            });
        }
    }
    Verdict::Pass
}

/// The `F+` object of vertex `V` of the inert cube of `(S, U)`: the target of
/// the canonical lift along the restriction to `V`.
fn cube_vertex(x: &CMObject, v: Subset) -> FPlusObject {
    let lift = canonical_lift(x, &restriction_map(x.base.interior_set(), v));
    FPlusObject {
        size: lift.base.arity,
        marked: lift.marked,
    }
}

fn restrict(a: &[usize], r: &PointedMap) -> Assignment {
    let mut out = vec![0; r.target().arity];
    for (c, &val) in a.iter().enumerate() {
        let t = r.apply(c + 1);
        if t != BASEPOINT {
            out[t - 1] = val;
        }
    }
    out
}

/// Compatible families over the punctured subcube `lower ⊆ W ⊊ upper`,
/// enumerated by brute force.
fn punctured_limit(m: &ModuleData, x: &CMObject, vertices: &[Subset], upper: Subset) -> usize {
    let punctured: Vec<Subset> = vertices.iter().copied().filter(|&w| w != upper).collect();
    let values: Vec<Vec<Assignment>> = punctured.iter().map(|&w| eval_object(m, &cube_vertex(x, w))).collect();
    let families = odometer(&values.iter().map(Vec::len).collect::<Vec<_>>());
    families
        .iter()
        .filter(|fam| {
            punctured.iter().enumerate().all(|(i, &w1)| {
                punctured.iter().enumerate().all(|(j, &w2)| {
                    !w2.is_subset_of(w1)
                        || restrict(&values[i][fam[i] - 1], &restriction_map(w1, w2)) == values[j][fam[j] - 1]
                })
            })
        })
        .count()
}

/// The apex of the inert cube of `(S, U)` is the product of its singleton
/// vertices, and the apex of every nontrivial subcube is the limit of the
/// rest of that subcube.
pub fn check_inert_cube_limit(m: &ModuleData, x: &CMObject) -> Result<Verdict> {
    let s = x.base;
    if s.arity == 0 {
        return Err(Error::InvalidBound("the inert cube needs |S°| ≥ 1".into()));
    }
    let cube = inert_cube(s);
    let top = s.interior_set();
    let apex = eval_object(m, &cube_vertex(x, top));
    let singletons: Vec<Subset> = s.interior().map(Subset::singleton).collect();
    let legs: Vec<PointedMap> = singletons.iter().map(|&v| restriction_map(top, v)).collect();
    let product_size: usize = singletons
        .iter()
        .map(|&v| eval_object(m, &cube_vertex(x, v)).len())
        .product();
    let mut images: Vec<Vec<usize>> = apex
        .iter()
        .map(|a| legs.iter().map(|r| restrict(a, r)[0]).collect())
        .collect();
    images.sort();
    images.dedup();
    if apex.len() != product_size || images.len() != product_size {
        return Ok(Verdict::fail(Witness::CubeLimit {
            lower: vec![],
            upper: top.elements(),
            apex_size: apex.len(),
            limit_size: product_size,
            reason: "cone legs to singleton vertices are not a bijection".into(),
        }));
    }
    for upper in Subset::all(s.arity) {
        for lower in Subset::all(s.arity).filter(|l| l.is_subset_of(upper)) {
            if upper.difference(lower).len() < 2 {
                continue;
            }
            let sub = subcube(&cube, lower, upper)?;
            let apex_size = eval_object(m, &cube_vertex(x, upper)).len();
            let limit_size = punctured_limit(m, x, &sub.vertices, upper);
            if apex_size != limit_size {
                return Ok(Verdict::fail(Witness::CubeLimit {
                    lower: lower.elements(),
                    upper: upper.elements(),
                    apex_size,
                    limit_size,
                    reason: "apex differs from the limit of the punctured subcube".into(),
                }));
            }
        }
    }
    Ok(Verdict::Pass)
}
