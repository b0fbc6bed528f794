//! Finite categories fibered over a truncation of `F_*`, with exhaustive
//! cocartesian-edge search and a 1-categorical operad-axiom verifier.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{categories_isomorphic, check_functor, is_equivalence, ArrowId, FinCategory, FunctorData, ObjId};
use crate::error::{Error, Result};
use crate::finset::{enumerate_maps, inert_cube, restriction_map, PointedMap, PointedSet, Subset};
use crate::verdict::{Verdict, Witness};

/// The full subcategory of `F_*` on `<0>, .., <bound>`. Object `n` is `<n>`;
/// arrows are ordered by source, then target, then image tuple.
pub struct FStar {
    bound: usize,
    category: Arc<FinCategory>,
    maps: Arc<Vec<PointedMap>>,
    offsets: Arc<Vec<Vec<usize>>>,
}

impl FStar {
    pub fn truncation(bound: usize) -> Self {
        let mut b = FinCategory::builder();
        for n in 0..=bound {
            b.add_object(PointedSet::new(n).to_string());
        }
        let mut maps = Vec::new();
        let mut offsets = vec![vec![0; bound + 1]; bound + 1];
        for m in 0..=bound {
            for n in 0..=bound {
                offsets[m][n] = maps.len();
                for f in enumerate_maps(PointedSet::new(m), PointedSet::new(n)) {
                    b.add_arrow(m, n, f.to_string());
                    maps.push(f);
                }
            }
        }
        for n in 0..=bound {
            let id = offsets[n][n] + PointedMap::identity(PointedSet::new(n)).rank();
            b.set_identity(n, id);
        }
        let maps = Arc::new(maps);
        let offsets = Arc::new(offsets);
        let (rule_maps, rule_offsets) = (Arc::clone(&maps), Arc::clone(&offsets));
        let category = b
            .build_with_rule(move |f, g| {
                let h = rule_maps[f].then_unchecked(&rule_maps[g]);
                Some(rule_offsets[h.source().arity][h.target().arity] + h.rank())
            })
            .expect("identities assigned");
        FStar {
            bound,
            category: Arc::new(category),
            maps,
            offsets,
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn map(&self, a: ArrowId) -> &PointedMap {
        &self.maps[a]
    }

    pub fn arrow_id(&self, f: &PointedMap) -> Option<ArrowId> {
        let (m, n) = (f.source().arity, f.target().arity);
        (m <= self.bound && n <= self.bound).then(|| self.offsets[m][n] + f.rank())
    }

    pub fn identity(&self, n: usize) -> ArrowId {
        self.category.identity(n)
    }

    pub fn rho(&self, n: usize, i: usize) -> ArrowId {
        self.arrow_id(&PointedMap::rho(n, i)).expect("within bound")
    }
}

/// A finite category with a functor to a truncation of `F_*`.
pub struct FiberedCategory {
    projection: FunctorData,
    base: Arc<FStar>,
    over: HashMap<(ObjId, ObjId, ArrowId), Vec<ArrowId>>,
}

impl FiberedCategory {
    /// `object_arity[x]` is the arity of the image of `x`; `arrow_base[a]` is
    /// the base arrow id of `a` in `base`.
    pub fn new(
        total: Arc<FinCategory>,
        base: Arc<FStar>,
        object_arity: Vec<usize>,
        arrow_base: Vec<ArrowId>,
    ) -> Result<Self> {
        if let Some(x) = object_arity.iter().position(|&n| n > base.bound()) {
            return Err(Error::InvalidBound(format!(
                "object `{}` lies over an arity beyond the base bound {}",
                total.object_label(x),
                base.bound()
            )));
        }
        let projection = FunctorData::new(
            Arc::clone(&total),
            Arc::clone(base.category()),
            object_arity,
            arrow_base,
        )?;
        let mut over: HashMap<(ObjId, ObjId, ArrowId), Vec<ArrowId>> = HashMap::new();
        for a in total.arrows() {
            over.entry((total.source(a), total.target(a), projection.arrow_map[a]))
                .or_default()
                .push(a);
        }
        Ok(FiberedCategory {
            projection,
            base,
            over,
        })
    }

    /// `F_*` truncated at `bound`, fibered over itself by the identity.
    pub fn identity_fibration(bound: usize) -> Self {
        let base = Arc::new(FStar::truncation(bound));
        let total = Arc::clone(base.category());
        let arities = total.objects().collect();
        let arrows = total.arrows().collect();
        FiberedCategory::new(total, base, arities, arrows).expect("identity fibration")
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        &self.projection.source
    }

    pub fn base(&self) -> &FStar {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<FStar> {
        &self.base
    }

    pub fn projection(&self) -> &FunctorData {
        &self.projection
    }

    pub fn arity(&self, x: ObjId) -> usize {
        self.projection.object_map[x]
    }

    pub fn base_arrow(&self, a: ArrowId) -> ArrowId {
        self.projection.arrow_map[a]
    }

    pub fn base_map(&self, a: ArrowId) -> &PointedMap {
        self.base.map(self.base_arrow(a))
    }

    pub fn arrows_over(&self, x: ObjId, y: ObjId, f: ArrowId) -> &[ArrowId] {
        self.over.get(&(x, y, f)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn objects_over(&self, n: usize) -> Vec<ObjId> {
        self.total().objects().filter(|&x| self.arity(x) == n).collect()
    }

    /// The full subcategory on `keep`, still fibered over the same base.
    pub fn restrict_objects(&self, keep: &[ObjId]) -> Result<FiberedCategory> {
        let (sub, parents) = self.total().full_subcategory(keep);
        self.rebuild(sub, keep, parents)
    }

    /// Removes one arrow; see [`FinCategory::without_arrow`].
    pub fn without_arrow(&self, a: ArrowId) -> Result<FiberedCategory> {
        let keep: Vec<ObjId> = self.total().objects().collect();
        let (sub, parents) = self.total().without_arrow(a)?;
        self.rebuild(sub, &keep, parents)
    }

    fn rebuild(&self, sub: FinCategory, keep: &[ObjId], parents: Vec<ArrowId>) -> Result<FiberedCategory> {
        let arities = keep.iter().map(|&x| self.arity(x)).collect();
        let bases = parents.iter().map(|&a| self.base_arrow(a)).collect();
        FiberedCategory::new(Arc::new(sub), Arc::clone(&self.base), arities, bases)
    }
}

/// For a base arrow `f: S -> T`, groups the arrows `g` out of `T` by `g ∘ f`.
fn factorizations(base: &FStar, f: ArrowId) -> HashMap<ArrowId, Vec<ArrowId>> {
    let cat = base.category();
    let mut out: HashMap<ArrowId, Vec<ArrowId>> = HashMap::new();
    for &g in cat.outgoing(cat.target(f)) {
        if let Some(b) = cat.compose(f, g) {
            out.entry(b).or_default().push(g);
        }
    }
    out
}

fn is_cocartesian_with(p: &FiberedCategory, e: ArrowId, facts: &HashMap<ArrowId, Vec<ArrowId>>) -> bool {
    let total = p.total();
    let (x, y) = (total.source(e), total.target(e));
    total.outgoing(x).iter().all(|&h| {
        let z = total.target(h);
        let Some(gs) = facts.get(&p.base_arrow(h)) else {
            return true;
        };
        gs.iter().all(|&g| {
            p.arrows_over(y, z, g)
                .iter()
                .filter(|&&k| total.compose(e, k) == Some(h))
                .count()
                == 1
        })
    })
}

/// Whether `e: x -> y` is cocartesian: every `h: x -> z` and every base
/// factorization `p(h) = g ∘ p(e)` admit exactly one `k: y -> z` over `g`
/// with `k ∘ e = h`. Decided by exhaustive search.
pub fn is_cocartesian_edge(p: &FiberedCategory, e: ArrowId) -> bool {
    let facts = factorizations(p.base(), p.base_arrow(e));
    is_cocartesian_with(p, e, &facts)
}

/// The least arrow out of `x` over the base arrow `f` that is cocartesian.
pub fn cocartesian_lift(p: &FiberedCategory, x: ObjId, f: ArrowId) -> Option<ArrowId> {
    let facts = factorizations(p.base(), f);
    find_lift(p, x, f, &facts)
}

fn find_lift(
    p: &FiberedCategory,
    x: ObjId,
    f: ArrowId,
    facts: &HashMap<ArrowId, Vec<ArrowId>>,
) -> Option<ArrowId> {
    p.total()
        .outgoing(x)
        .iter()
        .copied()
        .filter(|&e| p.base_arrow(e) == f)
        .find(|&e| is_cocartesian_with(p, e, facts))
}

#[derive(Default)]
struct LiftCache {
    facts: HashMap<ArrowId, HashMap<ArrowId, Vec<ArrowId>>>,
    lifts: HashMap<(ObjId, ArrowId), Option<ArrowId>>,
}

impl LiftCache {
    fn lift(&mut self, p: &FiberedCategory, x: ObjId, f: ArrowId) -> Option<ArrowId> {
        if let Some(&l) = self.lifts.get(&(x, f)) {
            return l;
        }
        let facts = self
            .facts
            .entry(f)
            .or_insert_with(|| factorizations(p.base(), f));
        let l = find_lift(p, x, f, facts);
        self.lifts.insert((x, f), l);
        l
    }

    fn lift_or_witness(&mut self, p: &FiberedCategory, x: ObjId, f: ArrowId) -> std::result::Result<ArrowId, Witness> {
        self.lift(p, x, f).ok_or_else(|| Witness::MissingCocartesianLift {
            object: p.total().object_label(x).into(),
            base_map: p.base().map(f).to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Condition (2) over every base map.
    #[default]
    Full,
    /// Condition (2) only over inert base maps.
    InertOnly,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OperadCheckOptions {
    pub scope: Scope,
    /// Accept an equivalence instead of an isomorphism in condition (3).
    pub up_to_equivalence: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionOutcome {
    pub condition: usize,
    pub name: &'static str,
    /// `None` when skipped because an earlier condition failed.
    pub verdict: Option<Verdict>,
}

/// Runs the three operad conditions in order, skipping later ones once a
/// condition fails.
///
/// 1. every object over `S` has a cocartesian lift of every inert `S -> T`;
/// 2. for `X` over `S`, `Y` over `<n>` and `f: S -> <n>`, post-composition with
///    the chosen lifts `Y -> Y_i` over `rho^i` is a bijection from arrows over
///    `f` to tuples of arrows over `rho^i ∘ f`;
/// 3. the fiber over `<n>` is isomorphic to the `n`-fold power of the fiber
///    over `<1>` via those lifts.
pub fn check_operad_conditions(p: &FiberedCategory, opts: OperadCheckOptions) -> Result<Vec<ConditionOutcome>> {
    if p.base().bound() < 1 {
        return Err(Error::InvalidBound("operad checks need a base bound of at least 1".into()));
    }
    let mut cache = LiftCache::default();
    let mut outcomes = Vec::with_capacity(3);
    let first = condition_lifts(p, &mut cache);
    let ok = first.is_pass();
    outcomes.push(ConditionOutcome {
        condition: 1,
        name: "cocartesian inert lifts",
        verdict: Some(first),
    });
    let second = ok.then(|| condition_decomposition(p, &mut cache, opts.scope));
    let ok = ok && second.as_ref().is_some_and(Verdict::is_pass);
    outcomes.push(ConditionOutcome {
        condition: 2,
        name: "hom decomposition",
        verdict: second,
    });
    let third = ok.then(|| condition_segal(p, &mut cache, opts.up_to_equivalence));
    outcomes.push(ConditionOutcome {
        condition: 3,
        name: "segal fibers",
        verdict: third,
    });
    Ok(outcomes)
}

/// The first failing operad condition, or `Pass`.
pub fn check_operad_axioms(p: &FiberedCategory, opts: OperadCheckOptions) -> Result<Verdict> {
    Ok(check_operad_conditions(p, opts)?
        .into_iter()
        .filter_map(|c| c.verdict)
        .find(|v| !v.is_pass())
        .unwrap_or(Verdict::Pass))
}

fn condition_lifts(p: &FiberedCategory, cache: &mut LiftCache) -> Verdict {
    let base = p.base().category();
    for x in p.total().objects() {
        for &f in base.outgoing(p.arity(x)) {
            if !p.base().map(f).is_inert() {
                continue;
            }
            if let Err(w) = cache.lift_or_witness(p, x, f) {
                return Verdict::fail(w);
            }
        }
    }
    Verdict::Pass
}

fn condition_decomposition(p: &FiberedCategory, cache: &mut LiftCache, scope: Scope) -> Verdict {
    let total = p.total();
    let base = p.base();
    for y in total.objects() {
        let n = p.arity(y);
        let mut legs = Vec::with_capacity(n);
        for i in 1..=n {
            let rho = base.rho(n, i);
            match cache.lift_or_witness(p, y, rho) {
                Ok(e) => legs.push((e, total.target(e), rho)),
                Err(w) => return Verdict::fail(w),
            }
        }
        for x in total.objects() {
            for &f in base.category().hom(p.arity(x), n) {
                if scope == Scope::InertOnly && !base.map(f).is_inert() {
                    continue;
                }
                let arrows = p.arrows_over(x, y, f);
                let mut tuples = 1usize;
                for &(_, yi, rho) in &legs {
                    let g = base.category().compose(f, rho).expect("base is a category");
                    tuples *= p.arrows_over(x, yi, g).len();
                }
                let mut images: Vec<Vec<Option<ArrowId>>> = arrows
                    .iter()
                    .map(|&a| legs.iter().map(|&(e, _, _)| total.compose(a, e)).collect())
                    .collect();
                images.sort_unstable();
                images.dedup();
                let well_formed = images.iter().all(|t| t.iter().all(Option::is_some));
                if arrows.len() != tuples || images.len() != arrows.len() || !well_formed {
                    return Verdict::fail(Witness::HomDecomposition {
                        source: total.object_label(x).into(),
                        target: total.object_label(y).into(),
                        base_map: base.map(f).to_string(),
                        arrows: arrows.len(),
                        tuples,
                    });
                }
            }
        }
    }
    Verdict::Pass
}

fn condition_segal(p: &FiberedCategory, cache: &mut LiftCache, up_to_equivalence: bool) -> Verdict {
    for n in 0..=p.base().bound() {
        let verdict = match comparison_with_cache(p, n, cache) {
            Err(w) => Verdict::fail(w),
            Ok(cmp) => check_functor(&cmp.functor).and_then(|| {
                if up_to_equivalence {
                    is_equivalence(&cmp.functor)
                } else {
                    categories_isomorphic(&cmp.functor)
                }
            }),
        };
        if let Verdict::Fail { witness } = verdict {
            return Verdict::fail(Witness::SegalFiber {
                arity: n,
                detail: Box::new(witness),
            });
        }
    }
    Verdict::Pass
}

/// The fiber over `<n>`: objects over `<n>` and arrows over the identity.
/// Also returns the total-category ids of its objects and arrows.
pub fn fiber_category(p: &FiberedCategory, n: usize) -> (FinCategory, Vec<ObjId>, Vec<ArrowId>) {
    let objs = p.objects_over(n);
    let id = p.base().identity(n);
    let (fiber, parents) = p.total().subcategory(&objs, |a| p.base_arrow(a) == id);
    (fiber, objs, parents)
}

pub struct SegalComparison {
    pub fiber: Arc<FinCategory>,
    /// From the fiber over `<n>` to the `n`-fold power of the fiber over `<1>`.
    pub functor: FunctorData,
}

/// Builds the Segal comparison functor over `<n>` from the canonical
/// cocartesian lifts over `rho^1, .., rho^n`.
pub fn segal_comparison(p: &FiberedCategory, n: usize) -> std::result::Result<SegalComparison, Witness> {
    if n > p.base().bound() || p.base().bound() < 1 {
        return Err(Witness::BoundTooSmall { bound: p.base().bound() });
    }
    comparison_with_cache(p, n, &mut LiftCache::default())
}

fn comparison_with_cache(
    p: &FiberedCategory,
    n: usize,
    cache: &mut LiftCache,
) -> std::result::Result<SegalComparison, Witness> {
    let total = p.total();
    let (fiber, objs, arrows) = fiber_category(p, n);
    let (unit_fiber, unit_objs, unit_arrows) = fiber_category(p, 1);
    let unit_fiber = Arc::new(unit_fiber);
    let product = Arc::new(unit_fiber.power(n));
    let unit_obj_index: HashMap<ObjId, usize> = unit_objs.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let unit_arrow_index: HashMap<ArrowId, usize> = unit_arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let unit_id = p.base().identity(1);

    let mut legs: HashMap<ObjId, Vec<ArrowId>> = HashMap::new();
    for &x in &objs {
        let mut row = Vec::with_capacity(n);
        for i in 1..=n {
            row.push(cache.lift_or_witness(p, x, p.base().rho(n, i))?);
        }
        legs.insert(x, row);
    }

    let radix_o = unit_fiber.object_count();
    let radix_a = unit_fiber.arrow_count();
    let object_map = objs
        .iter()
        .map(|x| {
            legs[x]
                .iter()
                .fold(0, |acc, &e| acc * radix_o + unit_obj_index[&total.target(e)])
        })
        .collect();

    let mut arrow_map = Vec::with_capacity(arrows.len());
    for &a in &arrows {
        let (x, y) = (total.source(a), total.target(a));
        let mut code = 0;
        for (i, (&ex, &ey)) in legs[&x].iter().zip(&legs[&y]).enumerate() {
            let want = total.compose(a, ey);
            let candidates: Vec<ArrowId> = p
                .arrows_over(total.target(ex), total.target(ey), unit_id)
                .iter()
                .copied()
                .filter(|&k| want.is_some() && total.compose(ex, k) == want)
                .collect();
            if candidates.len() != 1 {
                return Err(Witness::IllDefined {
                    arrow: total.arrow_label(a).into(),
                    reason: format!(
                        "component {} has {} induced arrows instead of exactly one",
                        i + 1,
                        candidates.len()
                    ),
                });
            }
            code = code * radix_a + unit_arrow_index[&candidates[0]];
        }
        arrow_map.push(code);
    }

    let fiber = Arc::new(fiber);
    let functor = FunctorData::new(Arc::clone(&fiber), product, object_map, arrow_map)
        .expect("tables are total by construction");
    Ok(SegalComparison { fiber, functor })
}

/// Cocartesian lifts of the inert cube below `p(x)`, with the induced edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedCube {
    /// `(V, lift target, lift arrow x -> x_V)`.
    pub vertices: Vec<(Subset, ObjId, ArrowId)>,
    /// `(V, W, induced arrow x_V -> x_W)` for `W ⊆ V`.
    pub edges: Vec<(Subset, Subset, ArrowId)>,
    pub commutes: bool,
}

/// Lifts every vertex of `inert_cube(p(x))` cocartesianly from `x` and fills
/// each edge with the unique induced arrow. `None` if a lift or filler is
/// missing.
pub fn lift_inert_cube(p: &FiberedCategory, x: ObjId) -> Option<LiftedCube> {
    let total = p.total();
    let base = p.base();
    let s = PointedSet::new(p.arity(x));
    let cube = inert_cube(s);
    let full = s.interior_set();
    let mut cache = LiftCache::default();
    let mut vertices = Vec::new();
    let mut lift_of = HashMap::new();
    for &v in &cube.vertices {
        let f = base.arrow_id(&restriction_map(full, v))?;
        let e = cache.lift(p, x, f)?;
        lift_of.insert(v, e);
        vertices.push((v, total.target(e), e));
    }
    let mut edges = Vec::new();
    let mut filler = HashMap::new();
    for edge in &cube.edges {
        let (ev, ew) = (lift_of[&edge.from], lift_of[&edge.to]);
        let g = base.arrow_id(&edge.map)?;
        let fits: Vec<ArrowId> = p
            .arrows_over(total.target(ev), total.target(ew), g)
            .iter()
            .copied()
            .filter(|&k| total.compose(ev, k) == Some(ew))
            .collect();
        if fits.len() != 1 {
            return None;
        }
        filler.insert((edge.from, edge.to), fits[0]);
        edges.push((edge.from, edge.to, fits[0]));
    }
    let commutes = edges.iter().all(|&(v, w, k)| {
        edges
            .iter()
            .filter(|&&(w2, _, _)| w2 == w)
            .all(|&(_, z, l)| total.compose(k, l) == filler.get(&(v, z)).copied())
    });
    Some(LiftedCube {
        vertices,
        edges,
        commutes,
    })
}
