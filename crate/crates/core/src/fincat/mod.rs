//! Explicit finite categories, functors between them, and brute-force
//! checkers for the category and functor laws.
//!
//! Composition is either a literal table (as imported from JSON) or a rule
//! computed from domain data; the latter keeps large truncations such as
//! `CM` at arity 4 from materializing millions of composable pairs.

mod fibered;
mod io;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::verdict::{Verdict, Witness};

pub use fibered::{
    check_operad_axioms, check_operad_conditions, cocartesian_lift, fiber_category,
    is_cocartesian_edge, lift_inert_cube, segal_comparison, ConditionOutcome, FStar,
    FiberedCategory, LiftedCube, OperadCheckOptions, Scope, SegalComparison,
};
pub use io::{from_json, to_dot, to_json, CategoryDocument};

pub type ObjId = usize;
pub type ArrowId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowData {
    pub source: ObjId,
    pub target: ObjId,
    pub label: String,
}

/// `compose(f, g)` returns `g ∘ f` for `f` followed by `g`.
pub type ComposeRule = dyn Fn(ArrowId, ArrowId) -> Option<ArrowId> + Send + Sync;

#[derive(Clone)]
enum Composition {
    Table(Arc<HashMap<(ArrowId, ArrowId), ArrowId>>),
    Rule(Arc<ComposeRule>),
}

#[derive(Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<ArrowData>,
    identities: Vec<ArrowId>,
    outgoing: Vec<Vec<ArrowId>>,
    incoming: Vec<Vec<ArrowId>>,
    hom: HashMap<(ObjId, ObjId), Vec<ArrowId>>,
    composition: Composition,
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects.len())
            .field("arrows", &self.arrows.len())
            .finish()
    }
}

#[derive(Debug, Default)]
pub struct FinCategoryBuilder {
    objects: Vec<String>,
    arrows: Vec<ArrowData>,
    identities: Vec<Option<ArrowId>>,
}

impl FinCategoryBuilder {
    pub fn add_object(&mut self, label: impl Into<String>) -> ObjId {
        self.objects.push(label.into());
        self.identities.push(None);
        self.objects.len() - 1
    }

    pub fn add_arrow(&mut self, source: ObjId, target: ObjId, label: impl Into<String>) -> ArrowId {
        self.arrows.push(ArrowData {
            source,
            target,
            label: label.into(),
        });
        self.arrows.len() - 1
    }

    pub fn set_identity(&mut self, object: ObjId, arrow: ArrowId) {
        self.identities[object] = Some(arrow);
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn build_with_table(
        self,
        table: HashMap<(ArrowId, ArrowId), ArrowId>,
    ) -> Result<FinCategory> {
        self.finish(Composition::Table(Arc::new(table)))
    }

    pub fn build_with_rule(
        self,
        rule: impl Fn(ArrowId, ArrowId) -> Option<ArrowId> + Send + Sync + 'static,
    ) -> Result<FinCategory> {
        self.finish(Composition::Rule(Arc::new(rule)))
    }

    fn finish(self, composition: Composition) -> Result<FinCategory> {
        let n = self.objects.len();
        for a in &self.arrows {
            if a.source >= n || a.target >= n {
                return Err(Error::MalformedCategory(format!(
                    "arrow `{}` has an endpoint outside the object list",
                    a.label
                )));
            }
        }
        let identities = self
            .identities
            .iter()
            .enumerate()
            .map(|(o, id)| {
                id.filter(|&a| a < self.arrows.len()).ok_or_else(|| {
                    Error::MalformedCategory(format!(
                        "object `{}` has no identity arrow",
                        self.objects[o]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        let mut hom: HashMap<(ObjId, ObjId), Vec<ArrowId>> = HashMap::new();
        for (id, a) in self.arrows.iter().enumerate() {
            outgoing[a.source].push(id);
            incoming[a.target].push(id);
            hom.entry((a.source, a.target)).or_default().push(id);
        }
        Ok(FinCategory {
            objects: self.objects,
            arrows: self.arrows,
            identities,
            outgoing,
            incoming,
            hom,
            composition,
        })
    }
}

impl FinCategory {
    pub fn builder() -> FinCategoryBuilder {
        FinCategoryBuilder::default()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> std::ops::Range<ObjId> {
        0..self.objects.len()
    }

    pub fn arrows(&self) -> std::ops::Range<ArrowId> {
        0..self.arrows.len()
    }

    pub fn object_label(&self, o: ObjId) -> &str {
        &self.objects[o]
    }

    pub fn arrow_label(&self, a: ArrowId) -> &str {
        &self.arrows[a].label
    }

    pub fn arrow(&self, a: ArrowId) -> &ArrowData {
        &self.arrows[a]
    }

    pub fn source(&self, a: ArrowId) -> ObjId {
        self.arrows[a].source
    }

    pub fn target(&self, a: ArrowId) -> ObjId {
        self.arrows[a].target
    }

    pub fn identity(&self, o: ObjId) -> ArrowId {
        self.identities[o]
    }

    pub fn is_identity(&self, a: ArrowId) -> bool {
        self.identities[self.source(a)] == a
    }

    pub fn outgoing(&self, o: ObjId) -> &[ArrowId] {
        &self.outgoing[o]
    }

    pub fn incoming(&self, o: ObjId) -> &[ArrowId] {
        &self.incoming[o]
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[ArrowId] {
        self.hom.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn find_object(&self, label: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn find_arrow(&self, label: &str) -> Option<ArrowId> {
        self.arrows.iter().position(|a| a.label == label)
    }

    /// `g ∘ f`; `None` if the pair is not composable or the composite is missing.
    pub fn compose(&self, f: ArrowId, g: ArrowId) -> Option<ArrowId> {
        if self.target(f) != self.source(g) {
            return None;
        }
        match &self.composition {
            Composition::Table(t) => t.get(&(f, g)).copied(),
            Composition::Rule(r) => r(f, g),
        }
    }

    /// Whether `a` has a two-sided inverse.
    pub fn inverse(&self, a: ArrowId) -> Option<ArrowId> {
        let (x, y) = (self.source(a), self.target(a));
        self.hom(y, x).iter().copied().find(|&b| {
            self.compose(a, b) == Some(self.identity(x)) && self.compose(b, a) == Some(self.identity(y))
        })
    }

    /// Composable pairs `(f, g)` with `f` first, in canonical order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        self.arrows()
            .flat_map(move |f| self.outgoing(self.target(f)).iter().map(move |&g| (f, g)))
    }

    /// The full subcategory on `keep` (in the given order). Returns the
    /// subcategory and, for each of its arrows, the id of the parent arrow.
    pub fn full_subcategory(self: &Arc<Self>, keep: &[ObjId]) -> (FinCategory, Vec<ArrowId>) {
        self.subcategory(keep, |_| true)
    }

    /// The same category with arrow `a` removed. Composites equal to `a`
    /// become missing, so the result is usually not a category any more; it
    /// exists to exercise the checkers on broken inputs.
    pub fn without_arrow(self: &Arc<Self>, a: ArrowId) -> Result<(FinCategory, Vec<ArrowId>)> {
        if self.is_identity(a) {
            return Err(Error::MalformedCategory("cannot delete an identity arrow".into()));
        }
        let keep: Vec<ObjId> = self.objects().collect();
        Ok(self.subcategory(&keep, |b| b != a))
    }

    /// The subcategory on the objects `keep` (in that order) and the arrows
    /// between them accepted by `keep_arrow`. Identities are always kept.
    /// Returns the parent id of every arrow of the result.
    pub fn subcategory(
        self: &Arc<Self>,
        keep: &[ObjId],
        keep_arrow: impl Fn(ArrowId) -> bool,
    ) -> (FinCategory, Vec<ArrowId>) {
        let mut new_obj = vec![usize::MAX; self.object_count()];
        let mut b = FinCategory::builder();
        for &o in keep {
            new_obj[o] = b.add_object(self.object_label(o));
        }
        let mut parent_of = Vec::new();
        let mut new_arrow = vec![usize::MAX; self.arrow_count()];
        for a in self.arrows() {
            let d = self.arrow(a);
            if new_obj[d.source] == usize::MAX
                || new_obj[d.target] == usize::MAX
                || !(keep_arrow(a) || self.is_identity(a))
            {
                continue;
            }
            new_arrow[a] = b.add_arrow(new_obj[d.source], new_obj[d.target], d.label.clone());
            parent_of.push(a);
        }
        for &o in keep {
            b.set_identity(new_obj[o], new_arrow[self.identity(o)]);
        }
        let parent = Arc::clone(self);
        let lookup = parent_of.clone();
        let cat = b
            .build_with_rule(move |f, g| {
                let c = parent.compose(lookup[f], lookup[g])?;
                let id = new_arrow[c];
                (id != usize::MAX).then_some(id)
            })
            .expect("restriction keeps identities");
        (cat, parent_of)
    }

    /// The `n`-fold product `C^n`. Objects and arrows are tuples enumerated
    /// lexicographically with the first coordinate most significant.
    pub fn power(self: &Arc<Self>, n: usize) -> FinCategory {
        let objs = self.object_count();
        let arrs = self.arrow_count();
        let decode = move |mut id: usize, radix: usize| -> Vec<usize> {
            let mut out = vec![0; n];
            for slot in out.iter_mut().rev() {
                *slot = id % radix;
                id /= radix;
            }
            out
        };
        let encode = move |parts: &[usize], radix: usize| parts.iter().fold(0, |acc, &p| acc * radix + p);
        let total_objs = objs.pow(n as u32);
        let total_arrs = arrs.pow(n as u32);
        let mut b = FinCategory::builder();
        for o in 0..total_objs {
            let parts = decode(o, objs);
            let label: Vec<&str> = parts.iter().map(|&p| self.object_label(p)).collect();
            b.add_object(format!("({})", label.join(",")));
        }
        for a in 0..total_arrs {
            let parts = decode(a, arrs);
            let src: Vec<usize> = parts.iter().map(|&p| self.source(p)).collect();
            let tgt: Vec<usize> = parts.iter().map(|&p| self.target(p)).collect();
            let label: Vec<&str> = parts.iter().map(|&p| self.arrow_label(p)).collect();
            b.add_arrow(encode(&src, objs), encode(&tgt, objs), format!("({})", label.join(",")));
        }
        for o in 0..total_objs {
            let ids: Vec<usize> = decode(o, objs).iter().map(|&p| self.identity(p)).collect();
            b.set_identity(o, encode(&ids, arrs));
        }
        let parent = Arc::clone(self);
        b.build_with_rule(move |f, g| {
            let fs = decode(f, arrs);
            let gs = decode(g, arrs);
            let parts = fs
                .iter()
                .zip(&gs)
                .map(|(&x, &y)| parent.compose(x, y))
                .collect::<Option<Vec<_>>>()?;
            Some(encode(&parts, arrs))
        })
        .expect("product has identities")
    }

    /// Materializes the composition on all composable pairs.
    pub fn composition_table(&self) -> Vec<(ArrowId, ArrowId, ArrowId)> {
        self.composable_pairs()
            .filter_map(|(f, g)| self.compose(f, g).map(|c| (f, g, c)))
            .collect()
    }
}

fn arrow_witness_label(c: &FinCategory, a: ArrowId) -> String {
    c.arrow_label(a).to_string()
}

/// Checks identities, totality of composition on composable pairs, unit laws
/// and associativity. The first violation in canonical order is reported.
pub fn check_category(c: &FinCategory) -> Verdict {
    for o in c.objects() {
        let id = c.identity(o);
        if c.source(id) != o || c.target(id) != o {
            return Verdict::fail(Witness::IdentityEndpoints {
                object: c.object_label(o).into(),
                arrow: arrow_witness_label(c, id),
            });
        }
    }
    for (f, g) in c.composable_pairs() {
        match c.compose(f, g) {
            None => {
                return Verdict::fail(Witness::MissingComposite {
                    first: arrow_witness_label(c, f),
                    second: arrow_witness_label(c, g),
                })
            }
            Some(h) if c.source(h) != c.source(f) || c.target(h) != c.target(g) => {
                return Verdict::fail(Witness::CompositeEndpoints {
                    first: arrow_witness_label(c, f),
                    second: arrow_witness_label(c, g),
                    composite: arrow_witness_label(c, h),
                })
            }
            Some(_) => {}
        }
    }
    for f in c.arrows() {
        let (x, y) = (c.source(f), c.target(f));
        if c.compose(c.identity(x), f) != Some(f) {
            return Verdict::fail(Witness::IdentityLaw {
                object: c.object_label(x).into(),
                arrow: arrow_witness_label(c, f),
            });
        }
        if c.compose(f, c.identity(y)) != Some(f) {
            return Verdict::fail(Witness::IdentityLaw {
                object: c.object_label(y).into(),
                arrow: arrow_witness_label(c, f),
            });
        }
    }
    for (f, g) in c.composable_pairs() {
        let gf = c.compose(f, g).expect("checked above");
        for &h in c.outgoing(c.target(g)) {
            let hg = c.compose(g, h).expect("checked above");
            if c.compose(gf, h) != c.compose(f, hg) {
                return Verdict::fail(Witness::NonAssociative {
                    first: arrow_witness_label(c, f),
                    second: arrow_witness_label(c, g),
                    third: arrow_witness_label(c, h),
                });
            }
        }
    }
    Verdict::Pass
}

/// A functor given by explicit object and arrow tables.
#[derive(Clone)]
pub struct FunctorData {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub object_map: Vec<ObjId>,
    pub arrow_map: Vec<ArrowId>,
}

impl fmt::Debug for FunctorData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctorData")
            .field("source", &self.source)
            .field("target", &self.target)
            .finish()
    }
}

impl FunctorData {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        arrow_map: Vec<ArrowId>,
    ) -> Result<Self> {
        if object_map.len() != source.object_count() || arrow_map.len() != source.arrow_count() {
            return Err(Error::MalformedCategory("functor tables do not cover the source".into()));
        }
        if object_map.iter().any(|&o| o >= target.object_count())
            || arrow_map.iter().any(|&a| a >= target.arrow_count())
        {
            return Err(Error::MalformedCategory("functor tables leave the target".into()));
        }
        Ok(FunctorData {
            source,
            target,
            object_map,
            arrow_map,
        })
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        FunctorData {
            object_map: c.objects().collect(),
            arrow_map: c.arrows().collect(),
            source: Arc::clone(&c),
            target: c,
        }
    }
}

pub fn check_functor(f: &FunctorData) -> Verdict {
    let (s, t) = (&f.source, &f.target);
    for a in s.arrows() {
        let image = f.arrow_map[a];
        if t.source(image) != f.object_map[s.source(a)] || t.target(image) != f.object_map[s.target(a)] {
            return Verdict::fail(Witness::FunctorEndpoints {
                arrow: s.arrow_label(a).into(),
            });
        }
    }
    for o in s.objects() {
        if f.arrow_map[s.identity(o)] != t.identity(f.object_map[o]) {
            return Verdict::fail(Witness::FunctorIdentity {
                object: s.object_label(o).into(),
            });
        }
    }
    for (a, b) in s.composable_pairs() {
        let Some(ba) = s.compose(a, b) else { continue };
        if t.compose(f.arrow_map[a], f.arrow_map[b]) != Some(f.arrow_map[ba]) {
            return Verdict::fail(Witness::FunctorComposition {
                first: s.arrow_label(a).into(),
                second: s.arrow_label(b).into(),
            });
        }
    }
    Verdict::Pass
}

/// Pass iff both tables are bijections (so a valid functor is an isomorphism).
pub fn categories_isomorphic(f: &FunctorData) -> Verdict {
    let (s, t) = (&f.source, &f.target);
    let mut obj_pre: Vec<Vec<ObjId>> = vec![Vec::new(); t.object_count()];
    for o in s.objects() {
        obj_pre[f.object_map[o]].push(o);
    }
    for (o, pre) in obj_pre.iter().enumerate() {
        match pre.len() {
            0 => return Verdict::fail(Witness::ObjectNotHit { object: t.object_label(o).into() }),
            1 => {}
            _ => {
                return Verdict::fail(Witness::ObjectDoublyHit {
                    object: t.object_label(o).into(),
                    preimages: pre.iter().map(|&p| s.object_label(p).to_string()).collect(),
                })
            }
        }
    }
    let mut arr_pre: Vec<Vec<ArrowId>> = vec![Vec::new(); t.arrow_count()];
    for a in s.arrows() {
        arr_pre[f.arrow_map[a]].push(a);
    }
    for (a, pre) in arr_pre.iter().enumerate() {
        match pre.len() {
            0 => return Verdict::fail(Witness::ArrowNotHit { arrow: t.arrow_label(a).into() }),
            1 => {}
            _ => {
                return Verdict::fail(Witness::ArrowDoublyHit {
                    arrow: t.arrow_label(a).into(),
                    preimages: pre.iter().map(|&p| s.arrow_label(p).to_string()).collect(),
                })
            }
        }
    }
    Verdict::Pass
}

/// Full faithfulness plus essential surjectivity, by brute force.
pub fn is_equivalence(f: &FunctorData) -> Verdict {
    let (s, t) = (&f.source, &f.target);
    for x in s.objects() {
        for y in s.objects() {
            let src_hom = s.hom(x, y);
            let tgt_hom = t.hom(f.object_map[x], f.object_map[y]);
            let mut images: Vec<ArrowId> = src_hom.iter().map(|&a| f.arrow_map[a]).collect();
            images.sort_unstable();
            images.dedup();
            if images.len() != src_hom.len() || images.len() != tgt_hom.len() {
                return Verdict::fail(Witness::NotFullyFaithful {
                    source: s.object_label(x).into(),
                    target: s.object_label(y).into(),
                    source_hom: src_hom.len(),
                    target_hom: tgt_hom.len(),
                });
            }
        }
    }
    for z in t.objects() {
        let reached = s.objects().any(|x| {
            t.hom(f.object_map[x], z)
                .iter()
                .any(|&a| t.inverse(a).is_some())
        });
        if !reached {
            return Verdict::fail(Witness::NotEssentiallySurjective {
                object: t.object_label(z).into(),
            });
        }
    }
    Verdict::Pass
}
