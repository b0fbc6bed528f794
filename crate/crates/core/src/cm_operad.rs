//! The operad `CM` of commutative algebras with a module, fibered over `F_*`.
//!
//! An object is a pair `(S, U)` with `U ⊆ S°`; a morphism `(S, U) -> (T, V)`
//! is a pointed map `f` with `|U ∩ f⁻¹(v)| = 1` for every `v ∈ V`. The
//! strengthened variant additionally forbids marked elements from landing in
//! `T° \ V`. Both readings are available everywhere through [`Variant`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fincat::{
    categories_isomorphic, check_functor, is_cocartesian_edge, segal_comparison, ArrowId, FStar,
    FiberedCategory, FinCategory, FunctorData, ObjId,
};
use crate::finset::{enumerate_maps, PointedMap, PointedSet, Subset, BASEPOINT};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Literal,
    Strengthened,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Literal, Variant::Strengthened];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Literal => "literal",
            Variant::Strengthened => "strengthened",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Variant::Literal),
            "strengthened" => Ok(Variant::Strengthened),
            other => Err(Error::Parse(format!("unknown variant `{other}`"))),
        }
    }
}

/// A pair `(S, U)` with `U ⊆ S°`. Written `(n|u1,u2,..)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CMObject {
    pub base: PointedSet,
    pub marked: Subset,
}

impl CMObject {
    pub fn new(base: PointedSet, marked: Subset) -> Result<Self> {
        if !marked.is_subset_of(base.interior_set()) {
            return Err(Error::Mismatch(format!("{marked} is not a subset of the interior of {base}")));
        }
        Ok(CMObject { base, marked })
    }

    /// All objects over `<0>, .., <bound>`, by arity then marked bitmask.
    pub fn all(bound: usize) -> Vec<CMObject> {
        (0..=bound)
            .flat_map(|n| {
                Subset::all(n).map(move |u| CMObject {
                    base: PointedSet::new(n),
                    marked: u,
                })
            })
            .collect()
    }

    /// Position in [`CMObject::all`].
    pub fn index(&self) -> usize {
        (1usize << self.base.arity) - 1 + self.marked.0 as usize
    }
}

impl fmt::Display for CMObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.marked.iter().map(|i| i.to_string()).collect();
        write!(f, "({}|{})", self.base.arity, parts.join(","))
    }
}

impl Serialize for CMObject {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for CMObject {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `(n|u1,u2,..)`, got `{s}`"));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (n, marks) = inner.split_once('|').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let mut marked = Subset::EMPTY;
        for m in marks.split(',').map(str::trim).filter(|m| !m.is_empty()) {
            let i: usize = m.parse().map_err(|_| bad())?;
            if i == 0 || i > n {
                return Err(bad());
            }
            marked.insert(i);
        }
        CMObject::new(PointedSet::new(n), marked)
    }
}

/// The two unary colors: `a = (<1>, ∅)` and `m = (<1>, {1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    A,
    M,
}

impl Color {
    pub fn object(self) -> CMObject {
        CMObject {
            base: PointedSet::new(1),
            marked: if self == Color::M { Subset::singleton(1) } else { Subset::EMPTY },
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::A => "a",
            Color::M => "m",
        })
    }
}

impl FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(Color::A),
            "m" => Ok(Color::M),
            other => Err(Error::Parse(format!("unknown color `{other}` (expected `a` or `m`)"))),
        }
    }
}

pub(crate) fn predicate(f: &PointedMap, marked: Subset, target_marked: Subset, v: Variant) -> bool {
    let exactly_one = target_marked
        .iter()
        .all(|t| f.fiber(t).intersection(marked).len() == 1);
    match v {
        Variant::Literal => exactly_one,
        Variant::Strengthened => {
            exactly_one
                && marked.iter().all(|u| {
                    let t = f.apply(u);
                    t == BASEPOINT || target_marked.contains(t)
                })
        }
    }
}

pub fn is_cm_morphism(f: &PointedMap, src: &CMObject, tgt: &CMObject, v: Variant) -> Result<bool> {
    if f.source() != src.base || f.target() != tgt.base {
        return Err(Error::Mismatch(format!("{f} does not run from {} to {}", src.base, tgt.base)));
    }
    Ok(predicate(f, src.marked, tgt.marked, v))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CMMorphism {
    pub underlying: PointedMap,
    pub source: CMObject,
    pub target: CMObject,
    pub variant: Variant,
}

impl CMMorphism {
    pub fn new(underlying: PointedMap, source: CMObject, target: CMObject, variant: Variant) -> Result<Self> {
        if !is_cm_morphism(&underlying, &source, &target, variant)? {
            return Err(Error::Mismatch(format!(
                "{underlying} is not a {variant} morphism {source} -> {target}"
            )));
        }
        Ok(CMMorphism {
            underlying,
            source,
            target,
            variant,
        })
    }
}

impl fmt::Display for CMMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-[{}]->{}", self.source, self.underlying, self.target)
    }
}

/// Target of the canonical lift of an inert `f` from `x`: `(T, f(U) ∩ T°)`.
pub fn canonical_lift(x: &CMObject, f: &PointedMap) -> CMObject {
    CMObject {
        base: f.target(),
        marked: f.image_of(x.marked),
    }
}

/// `CM` truncated at arity `bound`, fibered over `F_*`.
pub struct CmTruncation {
    pub variant: Variant,
    pub bound: usize,
    pub objects: Vec<CMObject>,
    /// Underlying pointed map of every arrow.
    pub maps: Arc<Vec<PointedMap>>,
    pub fibered: FiberedCategory,
}

impl CmTruncation {
    pub fn total(&self) -> &Arc<FinCategory> {
        self.fibered.total()
    }

    pub fn object_id(&self, x: &CMObject) -> Option<ObjId> {
        (x.base.arity <= self.bound).then(|| x.index())
    }

    pub fn morphism(&self, a: ArrowId) -> CMMorphism {
        let t = self.total();
        CMMorphism {
            underlying: self.maps[a].clone(),
            source: self.objects[t.source(a)],
            target: self.objects[t.target(a)],
            variant: self.variant,
        }
    }

    pub fn find_arrow(&self, src: &CMObject, tgt: &CMObject, f: &PointedMap) -> Option<ArrowId> {
        let (x, y) = (self.object_id(src)?, self.object_id(tgt)?);
        self.total().hom(x, y).iter().copied().find(|&a| &self.maps[a] == f)
    }
}

fn arrow_label(src: &CMObject, f: &PointedMap, tgt: &CMObject) -> String {
    format!("{src}-[{f}]->{tgt}")
}

pub fn build_cm_truncation(bound: usize, v: Variant) -> Result<CmTruncation> {
    if bound < 1 {
        return Err(Error::InvalidBound("the CM truncation needs a bound of at least 1".into()));
    }
    let base = Arc::new(FStar::truncation(bound));
    let objects = CMObject::all(bound);
    let mut b = FinCategory::builder();
    for x in &objects {
        b.add_object(x.to_string());
    }
    let mut maps = Vec::new();
    let mut index = HashMap::new();
    for (xi, x) in objects.iter().enumerate() {
        for (yi, y) in objects.iter().enumerate() {
            for f in enumerate_maps(x.base, y.base) {
                if predicate(&f, x.marked, y.marked, v) {
                    let id = b.add_arrow(xi, yi, arrow_label(x, &f, y));
                    if f.is_identity() && xi == yi {
                        b.set_identity(xi, id);
                    }
                    index.insert((xi, yi, f.rank()), id);
                    maps.push(f);
                }
            }
        }
    }
    let maps = Arc::new(maps);
    let arrow_base: Vec<ArrowId> = maps
        .iter()
        .map(|f| base.arrow_id(f).expect("within bound"))
        .collect();
    let arities = objects.iter().map(|x| x.base.arity).collect();

    let rule_maps = Arc::clone(&maps);
    let endpoints: Vec<(ObjId, ObjId)> = {
        let mut e = vec![(0, 0); maps.len()];
        for (&(x, y, _), &id) in &index {
            e[id] = (x, y);
        }
        e
    };
    let total = b.build_with_rule(move |f, g| {
        let h = rule_maps[f].then_unchecked(&rule_maps[g]);
        index.get(&(endpoints[f].0, endpoints[g].1, h.rank())).copied()
    })?;
    let fibered = FiberedCategory::new(Arc::new(total), base, arities, arrow_base)?;
    Ok(CmTruncation {
        variant: v,
        bound,
        objects,
        maps,
        fibered,
    })
}

/// Identities and closure under composition for an arbitrary morphism
/// predicate on the objects of arity at most `bound`.
pub fn closure_check_with(bound: usize, pred: impl Fn(&PointedMap, Subset, Subset) -> bool) -> Verdict {
    let objects = CMObject::all(bound);
    for x in &objects {
        if !pred(&PointedMap::identity(x.base), x.marked, x.marked) {
            return Verdict::fail(Witness::MissingIdentityMorphism { object: x.to_string() });
        }
    }
    let mut outgoing: Vec<Vec<(usize, PointedMap)>> = vec![Vec::new(); objects.len()];
    for (xi, x) in objects.iter().enumerate() {
        for (yi, y) in objects.iter().enumerate() {
            for f in enumerate_maps(x.base, y.base) {
                if pred(&f, x.marked, y.marked) {
                    outgoing[xi].push((yi, f));
                }
            }
        }
    }
    for (xi, x) in objects.iter().enumerate() {
        for (yi, f) in &outgoing[xi] {
            for (zi, g) in &outgoing[*yi] {
                let h = f.then_unchecked(g);
                let z = &objects[*zi];
                if !pred(&h, x.marked, z.marked) {
                    let y = &objects[*yi];
                    return Verdict::fail(Witness::NotClosed {
                        first: arrow_label(x, f, y),
                        second: arrow_label(y, g, z),
                        composite: arrow_label(x, &h, z),
                    });
                }
            }
        }
    }
    Verdict::Pass
}

pub fn closure_check(bound: usize, v: Variant) -> Result<Verdict> {
    if bound < 1 {
        return Err(Error::InvalidBound("closure check needs a bound of at least 1".into()));
    }
    Ok(closure_check_with(bound, |f, u, w| predicate(f, u, w, v)))
}

pub const MAX_MUL_ARITY: usize = 12;

/// Active morphisms from `(<n>, {i : inputs_i = m})` to the output color.
pub fn mul_set(inputs: &[Color], output: Color, v: Variant) -> Result<Vec<CMMorphism>> {
    if inputs.len() > MAX_MUL_ARITY {
        return Err(Error::InvalidBound(format!(
            "multimorphism arity {} exceeds {MAX_MUL_ARITY}",
            inputs.len()
        )));
    }
    let source = CMObject {
        base: PointedSet::new(inputs.len()),
        marked: Subset::from_elements(
            inputs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == Color::M)
                .map(|(i, _)| i + 1),
        ),
    };
    let target = output.object();
    Ok(enumerate_maps(source.base, target.base)
        .into_iter()
        .filter(|f| f.is_active() && predicate(f, source.marked, target.marked, v))
        .map(|f| CMMorphism {
            underlying: f,
            source,
            target,
            variant: v,
        })
        .collect())
}

pub struct SegalFiber {
    pub fiber: Arc<FinCategory>,
    pub comparison: std::result::Result<FunctorData, Witness>,
}

impl SegalFiber {
    /// The comparison is a functor and an isomorphism of categories.
    pub fn verdict(&self) -> Verdict {
        match &self.comparison {
            Err(w) => Verdict::fail(w.clone()),
            Ok(f) => check_functor(f).and_then(|| categories_isomorphic(f)),
        }
    }
}

/// The fiber over `<n>` and its comparison functor to the `n`-fold power of
/// the fiber over `<1>`.
pub fn segal_fiber(n: usize, v: Variant) -> Result<SegalFiber> {
    let cm = build_cm_truncation(n.max(1), v)?;
    Ok(match segal_comparison(&cm.fibered, n) {
        Ok(c) => SegalFiber {
            fiber: c.fiber,
            comparison: Ok(c.functor),
        },
        Err(w) => SegalFiber {
            fiber: Arc::new(crate::fincat::fiber_category(&cm.fibered, n).0),
            comparison: Err(w),
        },
    })
}

/// An object of the category whose objects are pointed maps `j: <1> -> S`,
/// recorded by `j(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FoObject {
    pub target: PointedSet,
    pub point: usize,
}

impl FoObject {
    pub fn new(target: PointedSet, point: usize) -> Result<Self> {
        if point > target.arity {
            return Err(Error::Mismatch(format!("{point} is not an element of {target}")));
        }
        Ok(FoObject { target, point })
    }

    pub fn all(bound: usize) -> Vec<FoObject> {
        (0..=bound)
            .flat_map(|n| (0..=n).map(move |p| FoObject { target: PointedSet::new(n), point: p }))
            .collect()
    }

    /// Maps `f` with `f ∘ j = j'`.
    pub fn hom(&self, other: &FoObject) -> Vec<PointedMap> {
        enumerate_maps(self.target, other.target)
            .into_iter()
            .filter(|f| f.apply(self.point) == other.point)
            .collect()
    }
}

impl fmt::Display for FoObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.point == BASEPOINT {
            write!(f, "{}@*", self.target)
        } else {
            write!(f, "{}@{}", self.target, self.point)
        }
    }
}

pub fn phi_embed(o: &FoObject) -> CMObject {
    CMObject {
        base: o.target,
        marked: if o.point == BASEPOINT {
            Subset::EMPTY
        } else {
            Subset::singleton(o.point)
        },
    }
}

/// Checks that the embedding is injective onto the objects with `|U| ≤ 1`,
/// bijective on every hom-set, and sends marked (inert) edges to cocartesian
/// arrows of canonical lift form.
pub fn phi_check(bound: usize, v: Variant) -> Result<Verdict> {
    let cm = build_cm_truncation(bound, v)?;
    let total = cm.total();
    let fo = FoObject::all(bound);
    let images: Vec<CMObject> = fo.iter().map(phi_embed).collect();

    let mut seen = HashMap::new();
    for (o, x) in fo.iter().zip(&images) {
        if let Some(prev) = seen.insert(*x, *o) {
            return Ok(Verdict::fail(Witness::ObjectDoublyHit {
                object: x.to_string(),
                preimages: vec![prev.to_string(), o.to_string()],
            }));
        }
    }
    if let Some(x) = cm
        .objects
        .iter()
        .find(|x| x.marked.len() <= 1 && !seen.contains_key(*x))
    {
        return Ok(Verdict::fail(Witness::ObjectNotHit { object: x.to_string() }));
    }

    for (a, xa) in fo.iter().zip(&images) {
        for (b, xb) in fo.iter().zip(&images) {
            let left: HashSet<PointedMap> = a.hom(b).into_iter().collect();
            let (ia, ib) = (cm.object_id(xa).expect("in range"), cm.object_id(xb).expect("in range"));
            let right: HashSet<PointedMap> = total.hom(ia, ib).iter().map(|&e| cm.maps[e].clone()).collect();
            if left != right {
                return Ok(Verdict::fail(Witness::HomMismatch {
                    source: xa.to_string(),
                    target: xb.to_string(),
                    base_map: None,
                    left: left.len(),
                    right: right.len(),
                }));
            }
            for f in left.iter().filter(|f| f.is_inert()) {
                let e = cm.find_arrow(xa, xb, f).expect("hom-sets agree");
                if *xb != canonical_lift(xa, f) || !is_cocartesian_edge(&cm.fibered, e) {
                    return Ok(Verdict::fail(Witness::MarkedEdge {
                        arrow: total.arrow_label(e).into(),
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}
