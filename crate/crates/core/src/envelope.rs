//! Finite sets with a marked subset (`F+`), their disjoint-union monoidal
//! structure realized over `F_*`, the envelope of `CM`, and the comparison
//! functor between the two.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::cm_operad::{predicate, CMObject, Variant};
use crate::error::{Error, Result};
use crate::fincat::{
    categories_isomorphic, check_functor, ArrowId, FStar, FiberedCategory, FinCategory, FunctorData, ObjId,
};
use crate::finset::{enumerate_maps, PointedMap, PointedSet, Subset, BASEPOINT};
use crate::verdict::{Verdict, Witness};

pub const DEFAULT_CEILING: usize = 100_000;

/// A finite set `{1..size}` with a marked subset. Written `{1,2|1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FPlusObject {
    pub size: usize,
    pub marked: Subset,
}

impl FPlusObject {
    pub fn new(size: usize, marked: Subset) -> Result<Self> {
        if !marked.is_subset_of(Subset::full(size)) {
            return Err(Error::Mismatch(format!("{marked} is not a subset of a {size}-element carrier")));
        }
        Ok(FPlusObject { size, marked })
    }

    /// Every object with carrier size at most `max`, by size then bitmask.
    pub fn all(max: usize) -> Vec<FPlusObject> {
        (0..=max)
            .flat_map(|k| Subset::all(k).map(move |u| FPlusObject { size: k, marked: u }))
            .collect()
    }

    pub fn disjoint_union(&self, other: &FPlusObject) -> FPlusObject {
        FPlusObject {
            size: self.size + other.size,
            marked: self.marked.union(Subset(other.marked.0 << self.size)),
        }
    }

    pub fn identity(&self) -> FPlusMorphism {
        FPlusMorphism {
            source: *self,
            target: *self,
            map: (1..=self.size).collect(),
        }
    }
}

impl fmt::Display for FPlusObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let carrier: Vec<String> = (1..=self.size).map(|i| i.to_string()).collect();
        let marks: Vec<String> = self.marked.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}|{}}}", carrier.join(","), marks.join(","))
    }
}

impl Serialize for FPlusObject {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for FPlusObject {
    type Err = Error;

    /// Parses `{1,..,k|u1,..}`; the carrier must be exactly `1..k`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `{{1,..,k|u1,..}}`, got `{s}`"));
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(bad)?;
        let (carrier, marks) = inner.split_once('|').ok_or_else(bad)?;
        let parse_list = |l: &str| -> Result<Vec<usize>> {
            l.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse().map_err(|_| bad()))
                .collect()
        };
        let carrier = parse_list(carrier)?;
        if carrier.iter().enumerate().any(|(i, &c)| c != i + 1) {
            return Err(bad());
        }
        let marks = parse_list(marks)?;
        if marks.iter().any(|&m| m == 0 || m > carrier.len()) {
            return Err(bad());
        }
        FPlusObject::new(carrier.len(), Subset::from_elements(marks))
    }
}

/// A map of carriers; `map[c - 1]` is the image of `c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FPlusMorphism {
    pub source: FPlusObject,
    pub target: FPlusObject,
    pub map: Vec<usize>,
}

fn marks_biject(map: &[usize], marked: Subset, target_marked: Subset) -> bool {
    let mut hit = Subset::EMPTY;
    for u in marked.iter() {
        let t = map[u - 1];
        if !target_marked.contains(t) || hit.contains(t) {
            return false;
        }
        hit.insert(t);
    }
    hit == target_marked
}

/// Whether `map` restricts to a bijection from the source marks onto the
/// target marks.
pub fn is_fplus_morphism(map: &[usize], src: &FPlusObject, tgt: &FPlusObject) -> Result<bool> {
    if map.len() != src.size || map.iter().any(|&t| t == 0 || t > tgt.size) {
        return Err(Error::Mismatch(format!("{map:?} is not a map from {src} to {tgt}")));
    }
    Ok(marks_biject(map, src.marked, tgt.marked))
}

impl FPlusMorphism {
    pub fn new(source: FPlusObject, target: FPlusObject, map: Vec<usize>) -> Result<Self> {
        if !is_fplus_morphism(&map, &source, &target)? {
            return Err(Error::Mismatch(format!("{map:?} does not biject {source} onto {target} on marks")));
        }
        Ok(FPlusMorphism { source, target, map })
    }

    pub fn then(&self, g: &FPlusMorphism) -> Result<FPlusMorphism> {
        if self.target != g.source {
            return Err(Error::Mismatch("cannot compose F+ morphisms".into()));
        }
        Ok(FPlusMorphism {
            source: self.source,
            target: g.target,
            map: self.map.iter().map(|&c| g.map[c - 1]).collect(),
        })
    }

    pub fn disjoint_union(&self, other: &FPlusMorphism) -> FPlusMorphism {
        let shift = self.target.size;
        FPlusMorphism {
            source: self.source.disjoint_union(&other.source),
            target: self.target.disjoint_union(&other.target),
            map: self
                .map
                .iter()
                .copied()
                .chain(other.map.iter().map(|&c| c + shift))
                .collect(),
        }
    }

    /// The symmetry `x ⊔ y -> y ⊔ x`.
    pub fn swap(x: &FPlusObject, y: &FPlusObject) -> FPlusMorphism {
        let map = (1..=x.size)
            .map(|c| c + y.size)
            .chain(1..=y.size)
            .collect();
        FPlusMorphism {
            source: x.disjoint_union(y),
            target: y.disjoint_union(x),
            map,
        }
    }

    /// All morphisms `src -> tgt`, lexicographic on the image tuple.
    pub fn enumerate(src: &FPlusObject, tgt: &FPlusObject) -> Vec<FPlusMorphism> {
        odometer(&vec![tgt.size; src.size])
            .into_iter()
            .filter(|m| marks_biject(m, src.marked, tgt.marked))
            .map(|map| FPlusMorphism {
                source: *src,
                target: *tgt,
                map,
            })
            .collect()
    }
}

/// All tuples with `t[i] ∈ 1..=radices[i]`, lexicographic.
pub(crate) fn odometer(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(radices.len())];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=r).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// An arrow of `(F+)^⊔` over `delta: <n> -> <n'>`: for each `t` with
/// `delta(t) != *`, the images of the carrier of `X_t` in `Y_{delta(t)}`.
/// Components over the basepoint are empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TupleMorphism {
    pub delta: PointedMap,
    pub components: Vec<Vec<usize>>,
}

impl TupleMorphism {
    /// For every `t'`, the disjoint union of the components over `t'` is an
    /// `F+` morphism into `Y_{t'}`.
    pub fn is_valid(&self, src: &[FPlusObject], tgt: &[FPlusObject]) -> bool {
        (1..=tgt.len()).all(|tp| {
            let mut hit = Subset::EMPTY;
            for t in self.delta.fiber(tp).iter() {
                for u in src[t - 1].marked.iter() {
                    let c = self.components[t - 1][u - 1];
                    if !tgt[tp - 1].marked.contains(c) || hit.contains(c) {
                        return false;
                    }
                    hit.insert(c);
                }
            }
            hit == tgt[tp - 1].marked
        })
    }

    pub fn then(&self, g: &TupleMorphism) -> TupleMorphism {
        let delta = self.delta.then_unchecked(&g.delta);
        let components = (1..=delta.source().arity)
            .map(|t| {
                let mid = self.delta.apply(t);
                if delta.apply(t) == BASEPOINT {
                    Vec::new()
                } else {
                    self.components[t - 1]
                        .iter()
                        .map(|&c| g.components[mid - 1][c - 1])
                        .collect()
                }
            })
            .collect();
        TupleMorphism { delta, components }
    }

    fn key(&self) -> Vec<usize> {
        let mut k = vec![self.delta.rank()];
        k.extend(self.components.iter().flatten());
        k
    }
}

impl fmt::Display for TupleMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if self.delta.apply(i + 1) == BASEPOINT {
                    "-".to_string()
                } else {
                    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                }
            })
            .collect();
        write!(f, "{}|{}", self.delta, comps.join(";"))
    }
}

pub fn tuple_label(xs: &[FPlusObject]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// `(F+)^⊔` truncated: tuples of length at most `max_shape` whose entries have
/// carrier at most `max_carrier` (and total carrier at most `max_total`).
pub struct FPlusTensor {
    pub objects: Vec<Vec<FPlusObject>>,
    pub arrows: Vec<TupleMorphism>,
    pub fibered: FiberedCategory,
    index: HashMap<Vec<FPlusObject>, ObjId>,
}

impl FPlusTensor {
    pub fn total(&self) -> &Arc<FinCategory> {
        self.fibered.total()
    }

    pub fn object_id(&self, xs: &[FPlusObject]) -> Option<ObjId> {
        self.index.get(xs).copied()
    }
}

pub fn build_fplus_over_fstar(max_carrier: usize, max_shape: usize) -> Result<FPlusTensor> {
    build_fplus_tensor(max_carrier, max_shape, None)
}

pub fn build_fplus_tensor(max_carrier: usize, max_shape: usize, max_total: Option<usize>) -> Result<FPlusTensor> {
    let singles = FPlusObject::all(max_carrier);
    let mut objects: Vec<Vec<FPlusObject>> = Vec::new();
    for n in 0..=max_shape {
        for idx in odometer(&vec![singles.len(); n]) {
            let tuple: Vec<FPlusObject> = idx.iter().map(|&i| singles[i - 1]).collect();
            let total: usize = tuple.iter().map(|x| x.size).sum();
            if max_total.is_none_or(|m| total <= m) {
                objects.push(tuple);
            }
        }
    }
    let base = Arc::new(FStar::truncation(max_shape));
    let mut b = FinCategory::builder();
    let mut index = HashMap::new();
    for (i, x) in objects.iter().enumerate() {
        b.add_object(tuple_label(x));
        index.insert(x.clone(), i);
    }
    let mut arrows = Vec::new();
    let mut arrow_index: HashMap<(ObjId, ObjId, Vec<usize>), ArrowId> = HashMap::new();
    let mut endpoints = Vec::new();
    for (xi, x) in objects.iter().enumerate() {
        for (yi, y) in objects.iter().enumerate() {
            for delta in enumerate_maps(PointedSet::new(x.len()), PointedSet::new(y.len())) {
                let radices: Vec<usize> = (1..=x.len())
                    .flat_map(|t| {
                        let d = delta.apply(t);
                        let r = if d == BASEPOINT { 0 } else { y[d - 1].size };
                        std::iter::repeat_n(r, if d == BASEPOINT { 0 } else { x[t - 1].size })
                    })
                    .collect();
                for flat in odometer(&radices) {
                    let mut it = flat.into_iter();
                    let components = (1..=x.len())
                        .map(|t| {
                            if delta.apply(t) == BASEPOINT {
                                Vec::new()
                            } else {
                                it.by_ref().take(x[t - 1].size).collect()
                            }
                        })
                        .collect();
                    let m = TupleMorphism {
                        delta: delta.clone(),
                        components,
                    };
                    if !m.is_valid(x, y) {
                        continue;
                    }
                    let id = b.add_arrow(xi, yi, format!("{}-[{m}]->{}", tuple_label(x), tuple_label(y)));
                    if xi == yi && delta.is_identity() && m.components.iter().zip(x).all(|(c, o)| *c == o.identity().map) {
                        b.set_identity(xi, id);
                    }
                    arrow_index.insert((xi, yi, m.key()), id);
                    endpoints.push((xi, yi));
                    arrows.push(m);
                }
            }
        }
    }
    let arrow_base = arrows
        .iter()
        .map(|m| base.arrow_id(&m.delta).expect("within bound"))
        .collect();
    let arities = objects.iter().map(Vec::len).collect();
    let rule_arrows = Arc::new(arrows.clone());
    let total = b.build_with_rule(move |f, g| {
        let h = rule_arrows[f].then(&rule_arrows[g]);
        arrow_index.get(&(endpoints[f].0, endpoints[g].1, h.key())).copied()
    })?;
    let fibered = FiberedCategory::new(Arc::new(total), base, arities, arrow_base)?;
    Ok(FPlusTensor {
        objects,
        arrows,
        fibered,
        index,
    })
}

/// `(S, U, f: S° -> T)` with `T = {1..shape}`. Written `(2|1)@2:1,2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvObject {
    pub cm: CMObject,
    pub shape: usize,
    pub assignment: Vec<usize>,
}

impl EnvObject {
    pub fn new(cm: CMObject, shape: usize, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != cm.base.arity || assignment.iter().any(|&t| t == 0 || t > shape) {
            return Err(Error::Mismatch(format!(
                "{assignment:?} is not a total map from {} elements to {shape}",
                cm.base.arity
            )));
        }
        Ok(EnvObject {
            cm,
            shape,
            assignment,
        })
    }

    /// The assignment as an active pointed map `S -> T_+`.
    pub fn active_map(&self) -> PointedMap {
        PointedMap::new(self.cm.base, PointedSet::new(self.shape), self.assignment.clone())
            .expect("validated on construction")
    }

    /// Representative of its relabeling class: the assignment is
    /// non-decreasing, so each fiber is an interval of `S°`.
    pub fn is_canonical(&self) -> bool {
        self.assignment.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn fiber(&self, t: usize) -> Vec<usize> {
        (1..=self.cm.base.arity).filter(|&s| self.assignment[s - 1] == t).collect()
    }
}

impl fmt::Display for EnvObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.assignment.iter().map(|i| i.to_string()).collect();
        write!(f, "{}@{}:{}", self.cm, self.shape, parts.join(","))
    }
}

impl Serialize for EnvObject {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for EnvObject {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `(n|u..)@k:f1,..,fn`, got `{s}`"));
        let (cm, rest) = s.trim().split_once('@').ok_or_else(bad)?;
        let cm: CMObject = cm.parse()?;
        let (shape, assignment) = rest.split_once(':').ok_or_else(bad)?;
        let shape: usize = shape.trim().parse().map_err(|_| bad())?;
        let assignment = assignment
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| bad()))
            .collect::<Result<Vec<usize>>>()?;
        EnvObject::new(cm, shape, assignment)
    }
}

/// `(T, (f⁻¹(t), f⁻¹(t) ∩ U)_{t ∈ T})`, each fiber relabeled in source order.
pub fn comparison_on_objects(e: &EnvObject) -> Vec<FPlusObject> {
    (1..=e.shape)
        .map(|t| {
            let fiber = e.fiber(t);
            FPlusObject {
                size: fiber.len(),
                marked: Subset::from_elements(
                    fiber
                        .iter()
                        .enumerate()
                        .filter(|(_, &s)| e.cm.marked.contains(s))
                        .map(|(i, _)| i + 1),
                ),
            }
        })
        .collect()
}

/// An arrow `(g, delta)` of the envelope: `g` underlies a `CM` morphism and
/// `delta ∘ f = f' ∘ g` as maps in `F_*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EnvMorphism {
    pub cm_map: PointedMap,
    pub shape_map: PointedMap,
}

/// The square `delta ∘ f = f' ∘ g` in `F_*`. An element killed by `g` must
/// therefore have its shape killed by `delta`.
pub fn square_commutes(x: &EnvObject, y: &EnvObject, g: &PointedMap, delta: &PointedMap) -> bool {
    (1..=x.cm.base.arity).all(|s| {
        let via_shape = delta.apply(x.assignment[s - 1]);
        let via_cm = match g.apply(s) {
            BASEPOINT => BASEPOINT,
            s2 => y.assignment[s2 - 1],
        };
        via_shape == via_cm
    })
}

pub struct Envelope {
    pub variant: Variant,
    pub objects: Vec<EnvObject>,
    pub arrows: Vec<EnvMorphism>,
    pub fibered: FiberedCategory,
}

impl Envelope {
    pub fn total(&self) -> &Arc<FinCategory> {
        self.fibered.total()
    }

    pub fn object_id(&self, e: &EnvObject) -> Option<ObjId> {
        self.objects.iter().position(|o| o == e)
    }

    /// Image of an arrow under the comparison: the restriction of `g` to each
    /// fiber union over `t'`. `None` if `g` kills an element whose shape
    /// survives (cannot happen for arrows satisfying the square).
    pub fn comparison_on_arrow(&self, a: ArrowId) -> Option<TupleMorphism> {
        let t = self.total();
        let (x, y) = (&self.objects[t.source(a)], &self.objects[t.target(a)]);
        let EnvMorphism { cm_map, shape_map } = &self.arrows[a];
        let components = (1..=x.shape)
            .map(|tt| {
                let tp = shape_map.apply(tt);
                if tp == BASEPOINT {
                    return Some(Vec::new());
                }
                let target_fiber = y.fiber(tp);
                x.fiber(tt)
                    .iter()
                    .map(|&s| {
                        let s2 = cm_map.apply(s);
                        target_fiber.iter().position(|&u| u == s2).map(|p| p + 1)
                    })
                    .collect::<Option<Vec<usize>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(TupleMorphism {
            delta: shape_map.clone(),
            components,
        })
    }
}

/// Canonical envelope objects with arity at most `max_arity` and shape at
/// most `max_shape`, ordered by shape, arity, marks, then assignment.
pub fn envelope_objects(max_arity: usize, max_shape: usize) -> Vec<EnvObject> {
    let mut out = Vec::new();
    for shape in 0..=max_shape {
        for x in CMObject::all(max_arity) {
            let m = x.base.arity;
            if shape == 0 && m > 0 {
                continue;
            }
            for assignment in odometer(&vec![shape; m]) {
                let e = EnvObject {
                    cm: x,
                    shape,
                    assignment,
                };
                if e.is_canonical() {
                    out.push(e);
                }
            }
        }
    }
    out
}

pub fn build_envelope(max_arity: usize, max_shape: usize, v: Variant) -> Result<Envelope> {
    let objects = envelope_objects(max_arity, max_shape);
    let base = Arc::new(FStar::truncation(max_shape));
    let mut b = FinCategory::builder();
    for e in &objects {
        b.add_object(e.to_string());
    }
    let mut arrows = Vec::new();
    let mut endpoints = Vec::new();
    let mut index: HashMap<(ObjId, ObjId, usize, usize), ArrowId> = HashMap::new();
    for (xi, x) in objects.iter().enumerate() {
        for (yi, y) in objects.iter().enumerate() {
            let cm_maps: Vec<PointedMap> = enumerate_maps(x.cm.base, y.cm.base)
                .into_iter()
                .filter(|g| predicate(g, x.cm.marked, y.cm.marked, v))
                .collect();
            for delta in enumerate_maps(PointedSet::new(x.shape), PointedSet::new(y.shape)) {
                for g in cm_maps.iter().filter(|g| square_commutes(x, y, g, &delta)) {
                    let id = b.add_arrow(xi, yi, format!("{x}-[{g}/{delta}]->{y}"));
                    if xi == yi && g.is_identity() && delta.is_identity() {
                        b.set_identity(xi, id);
                    }
                    index.insert((xi, yi, g.rank(), delta.rank()), id);
                    endpoints.push((xi, yi));
                    arrows.push(EnvMorphism {
                        cm_map: g.clone(),
                        shape_map: delta.clone(),
                    });
                }
            }
        }
    }
    let arrow_base = arrows
        .iter()
        .map(|m| base.arrow_id(&m.shape_map).expect("within bound"))
        .collect();
    let arities = objects.iter().map(|e| e.shape).collect();
    let rule_arrows = Arc::new(arrows.clone());
    let total = b.build_with_rule(move |f, g| {
        let (a, c) = (&rule_arrows[f], &rule_arrows[g]);
        let cm = a.cm_map.then_unchecked(&c.cm_map);
        let shape = a.shape_map.then_unchecked(&c.shape_map);
        index
            .get(&(endpoints[f].0, endpoints[g].1, cm.rank(), shape.rank()))
            .copied()
    })?;
    let fibered = FiberedCategory::new(Arc::new(total), base, arities, arrow_base)?;
    Ok(Envelope {
        variant: v,
        objects,
        arrows,
        fibered,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvelopeComparison {
    pub verdict: Verdict,
    pub envelope_objects: usize,
    pub envelope_arrows: usize,
    pub fplus_objects: usize,
    pub fplus_arrows: usize,
}

/// Compares `Env(CM)` with `(F+)^⊔` at matching bounds: object bijection,
/// hom-set cardinalities over every base arrow, well-definedness and
/// functoriality of the comparison over `F_*`, and finally bijectivity.
pub fn verify_envelope_iso(max_arity: usize, max_shape: usize, v: Variant, ceiling: usize) -> Result<EnvelopeComparison> {
    let planned = envelope_objects(max_arity, max_shape).len();
    if planned > ceiling {
        return Err(Error::Ceiling {
            count: planned,
            ceiling,
        });
    }
    let env = build_envelope(max_arity, max_shape, v)?;
    let fplus = build_fplus_tensor(max_arity, max_shape, Some(max_arity))?;
    let (et, ft) = (env.total(), fplus.total());
    let mut out = EnvelopeComparison {
        verdict: Verdict::Pass,
        envelope_objects: et.object_count(),
        envelope_arrows: et.arrow_count(),
        fplus_objects: ft.object_count(),
        fplus_arrows: ft.arrow_count(),
    };

    let mut object_map = Vec::with_capacity(env.objects.len());
    let mut preimage: HashMap<ObjId, ObjId> = HashMap::new();
    for (xi, x) in env.objects.iter().enumerate() {
        let image = comparison_on_objects(x);
        let Some(yi) = fplus.object_id(&image) else {
            out.verdict = Verdict::fail(Witness::IllDefined {
                arrow: x.to_string(),
                reason: format!("object image {} lies outside the F+ truncation", tuple_label(&image)),
            });
            return Ok(out);
        };
        if let Some(&prev) = preimage.get(&yi) {
            out.verdict = Verdict::fail(Witness::ObjectDoublyHit {
                object: ft.object_label(yi).into(),
                preimages: vec![et.object_label(prev).into(), x.to_string()],
            });
            return Ok(out);
        }
        preimage.insert(yi, xi);
        object_map.push(yi);
    }
    if let Some(y) = ft.objects().find(|y| !preimage.contains_key(y)) {
        out.verdict = Verdict::fail(Witness::ObjectNotHit {
            object: ft.object_label(y).into(),
        });
        return Ok(out);
    }

    let base = env.fibered.base();
    for x in et.objects() {
        for y in et.objects() {
            for &d in base.category().hom(env.fibered.arity(x), env.fibered.arity(y)) {
                let left = env.fibered.arrows_over(x, y, d).len();
                let right = fplus.fibered.arrows_over(object_map[x], object_map[y], d).len();
                if left != right {
                    out.verdict = Verdict::fail(Witness::HomMismatch {
                        source: et.object_label(x).into(),
                        target: et.object_label(y).into(),
                        base_map: Some(base.map(d).to_string()),
                        left,
                        right,
                    });
                    return Ok(out);
                }
            }
        }
    }

    let mut arrow_map = Vec::with_capacity(et.arrow_count());
    for a in et.arrows() {
        let image = env.comparison_on_arrow(a).and_then(|m| {
            let key = (object_map[et.source(a)], object_map[et.target(a)]);
            fplus
                .fibered
                .arrows_over(key.0, key.1, base.arrow_id(&m.delta)?)
                .iter()
                .copied()
                .find(|&b| fplus.arrows[b] == m)
        });
        match image {
            Some(b) => arrow_map.push(b),
            None => {
                out.verdict = Verdict::fail(Witness::IllDefined {
                    arrow: et.arrow_label(a).into(),
                    reason: "restriction to fiber unions is not an F+ morphism".into(),
                });
                return Ok(out);
            }
        }
    }
    let functor = FunctorData::new(Arc::clone(et), Arc::clone(ft), object_map, arrow_map)?;
    if let Some(a) = et
        .arrows()
        .find(|&a| fplus.fibered.base_arrow(functor.arrow_map[a]) != env.fibered.base_arrow(a))
    {
        out.verdict = Verdict::fail(Witness::NotOverBase {
            arrow: et.arrow_label(a).into(),
        });
        return Ok(out);
    }
    out.verdict = check_functor(&functor).and_then(|| categories_isomorphic(&functor));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(s: &str) -> FPlusObject {
        s.parse().unwrap()
    }

    #[test]
    fn fplus_notation() {
        for s in ["{1,2|1}", "{|}", "{1|}", "{1,2,3|1,3}"] {
            assert_eq!(fp(s).to_string(), s);
        }
        assert!("{2|1}".parse::<FPlusObject>().is_err());
        assert!("{1|2}".parse::<FPlusObject>().is_err());
    }

    #[test]
    fn fplus_morphism_examples() {
        assert!(is_fplus_morphism(&[1, 1], &fp("{1,2|1}"), &fp("{1|1}")).unwrap());
        assert!(!is_fplus_morphism(&[1], &fp("{1|1}"), &fp("{1|}")).unwrap());
        assert!(!is_fplus_morphism(&[1, 1], &fp("{1,2|1,2}"), &fp("{1|1}")).unwrap());
        assert!(is_fplus_morphism(&[2], &fp("{1|1}"), &fp("{1|1}")).is_err());
    }

    #[test]
    fn unit_fiber_with_carrier_bound_one() {
        let t = build_fplus_over_fstar(1, 1).unwrap();
        let over_one: Vec<String> = t
            .objects
            .iter()
            .filter(|x| x.len() == 1)
            .map(|x| x[0].to_string())
            .collect();
        assert_eq!(over_one, ["{|}", "{1|}", "{1|1}"]);
        let marked = t.object_id(&[fp("{1|1}")]).unwrap();
        let unmarked = t.object_id(&[fp("{1|}")]).unwrap();
        let id1 = t.fibered.base().identity(1);
        assert!(t.fibered.arrows_over(marked, unmarked, id1).is_empty());
    }

    #[test]
    fn fiber_over_two_is_pairs() {
        let t = build_fplus_over_fstar(1, 2).unwrap();
        assert_eq!(t.objects.iter().filter(|x| x.len() == 2).count(), 9);
    }

    #[test]
    fn arrows_over_fold() {
        let t = build_fplus_over_fstar(2, 2).unwrap();
        let x = t.object_id(&[fp("{1|}"), fp("{1|}")]).unwrap();
        let y = t.object_id(&[fp("{1,2|}")]).unwrap();
        let fold = t.fibered.base().arrow_id(&PointedMap::fold(2)).unwrap();
        assert_eq!(t.fibered.arrows_over(x, y, fold).len(), 4);
    }

    #[test]
    fn comparison_object_examples() {
        let e: EnvObject = "(2|1)@1:1,1".parse().unwrap();
        assert_eq!(comparison_on_objects(&e), vec![fp("{1,2|1}")]);
        let e: EnvObject = "(2|1,2)@2:1,2".parse().unwrap();
        assert_eq!(comparison_on_objects(&e), vec![fp("{1|1}"), fp("{1|1}")]);
        let e: EnvObject = "(0|)@1:".parse().unwrap();
        assert_eq!(comparison_on_objects(&e), vec![fp("{|}")]);
        assert_eq!(e.to_string(), "(0|)@1:");
        assert!("(2|1)@2:1,3".parse::<EnvObject>().is_err());
    }

    #[test]
    fn envelope_at_one() {
        for v in Variant::ALL {
            let env = build_envelope(1, 1, v).unwrap();
            let over_one: Vec<String> = env
                .objects
                .iter()
                .filter(|e| e.shape == 1)
                .map(|e| e.to_string())
                .collect();
            assert_eq!(over_one, ["(0|)@1:", "(1|)@1:1", "(1|1)@1:1"]);
            let marked = env.object_id(&"(1|1)@1:1".parse().unwrap()).unwrap();
            let unmarked = env.object_id(&"(1|)@1:1".parse().unwrap()).unwrap();
            let id1 = env.fibered.base().identity(1);
            let expected = if v == Variant::Literal { 1 } else { 0 };
            assert_eq!(env.fibered.arrows_over(marked, unmarked, id1).len(), expected);
        }
    }

    #[test]
    fn killed_elements_force_killed_shapes() {
        let x: EnvObject = "(1|)@1:1".parse().unwrap();
        let zero = PointedMap::zero(PointedSet::new(1), PointedSet::new(1));
        let id = PointedMap::identity(PointedSet::new(1));
        assert!(square_commutes(&x, &x, &zero, &zero));
        assert!(!square_commutes(&x, &x, &zero, &id));
        assert!(!square_commutes(&x, &x, &id, &zero));
    }

    #[test]
    fn literal_envelope_mismatch_witness() {
        let r = verify_envelope_iso(1, 1, Variant::Literal, DEFAULT_CEILING).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::fail(Witness::HomMismatch {
                source: "(1|1)@1:1".into(),
                target: "(1|)@1:1".into(),
                base_map: Some("1->1:1".into()),
                left: 1,
                right: 0,
            })
        );
    }

    #[test]
    fn small_envelopes_agree() {
        assert_eq!(verify_envelope_iso(0, 0, Variant::Strengthened, DEFAULT_CEILING).unwrap().verdict, Verdict::Pass);
        assert_eq!(verify_envelope_iso(1, 1, Variant::Strengthened, DEFAULT_CEILING).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn ceiling_guard() {
        assert!(matches!(
            verify_envelope_iso(2, 2, Variant::Strengthened, 3),
            Err(Error::Ceiling { .. })
        ));
    }
}
