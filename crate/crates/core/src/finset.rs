//! The category `F_*` of finite pointed sets `<n> = {*, 1, .., n}`.
//!
//! Elements are encoded as integers with `0` standing for the basepoint.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const BASEPOINT: usize = 0;

/// The skeletal pointed set `<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PointedSet {
    pub arity: usize,
}

impl PointedSet {
    pub fn new(arity: usize) -> Self {
        PointedSet { arity }
    }

    /// Number of elements including the basepoint.
    pub fn len(&self) -> usize {
        self.arity + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The non-basepoint elements `1..=n`.
    pub fn interior(&self) -> impl Iterator<Item = usize> {
        1..=self.arity
    }

    pub fn interior_set(&self) -> Subset {
        Subset::full(self.arity)
    }
}

impl fmt::Display for PointedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.arity)
    }
}

/// A subset of `{1, .., 32}` stored as a bitmask (bit `i - 1` for element `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= 32, "subsets are limited to 32 elements");
        if n == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << (i - 1))
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elems: I) -> Self {
        Subset(elems.into_iter().fold(0, |acc, i| acc | (1 << (i - 1))))
    }

    pub fn contains(&self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(&self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(&self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(&self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << (i - 1);
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.0;
        (1..=32).filter(move |i| bits & (1 << (i - 1)) != 0)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `{1..n}` in increasing bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..(1u32 << n)).map(Subset)
    }

    /// Position (1-based) of `i` among the elements of `self`.
    pub fn rank_of(&self, i: usize) -> Option<usize> {
        if !self.contains(i) {
            return None;
        }
        Some((self.0 & ((1u32 << (i - 1)) - 1)).count_ones() as usize + 1)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// A basepoint-preserving map `<m> -> <n>`. `images[k - 1]` is the image of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointedMap {
    source: usize,
    target: usize,
    images: Vec<usize>,
}

impl PointedMap {
    pub fn new(source: PointedSet, target: PointedSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.arity {
            return Err(Error::Mismatch(format!(
                "map from {source} needs {} images, got {}",
                source.arity,
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|&&i| i > target.arity) {
            return Err(Error::Mismatch(format!("image {bad} is not an element of {target}")));
        }
        Ok(PointedMap {
            source: source.arity,
            target: target.arity,
            images,
        })
    }

    pub(crate) fn from_parts(source: usize, target: usize, images: Vec<usize>) -> Self {
        debug_assert_eq!(images.len(), source);
        PointedMap {
            source,
            target,
            images,
        }
    }

    pub fn identity(s: PointedSet) -> Self {
        PointedMap::from_parts(s.arity, s.arity, (1..=s.arity).collect())
    }

    /// The map sending everything to the basepoint.
    pub fn zero(s: PointedSet, t: PointedSet) -> Self {
        PointedMap::from_parts(s.arity, t.arity, vec![BASEPOINT; s.arity])
    }

    /// The inert map `<n> -> <1>` with fiber `{i}` over `1`.
    pub fn rho(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n);
        PointedMap::from_parts(n, 1, (1..=n).map(|k| usize::from(k == i)).collect())
    }

    /// The active map `<n> -> <1>` sending every element to `1`.
    pub fn fold(n: usize) -> Self {
        PointedMap::from_parts(n, 1, vec![1; n])
    }

    pub fn source(&self) -> PointedSet {
        PointedSet::new(self.source)
    }

    pub fn target(&self) -> PointedSet {
        PointedSet::new(self.target)
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        if x == BASEPOINT {
            BASEPOINT
        } else {
            self.images[x - 1]
        }
    }

    /// `g ∘ self`, or an error when the endpoints do not match.
    pub fn then(&self, g: &PointedMap) -> Result<PointedMap> {
        if self.target != g.source {
            return Err(Error::Mismatch(format!("cannot compose {self} with {g}")));
        }
        Ok(self.then_unchecked(g))
    }

    pub(crate) fn then_unchecked(&self, g: &PointedMap) -> PointedMap {
        PointedMap::from_parts(
            self.source,
            g.target,
            self.images.iter().map(|&x| g.apply(x)).collect(),
        )
    }

    /// Non-basepoint elements of the source mapping to `t`.
    pub fn fiber(&self, t: usize) -> Subset {
        Subset::from_elements((1..=self.source).filter(|&k| self.images[k - 1] == t))
    }

    /// Elements that survive, i.e. `f^{-1}(T°)`.
    pub fn support(&self) -> Subset {
        Subset::from_elements((1..=self.source).filter(|&k| self.images[k - 1] != BASEPOINT))
    }

    /// `f(A) ∩ T°` for `A ⊆ S°`.
    pub fn image_of(&self, a: Subset) -> Subset {
        Subset::from_elements(a.iter().map(|k| self.images[k - 1]).filter(|&t| t != BASEPOINT))
    }

    pub fn is_inert(&self) -> bool {
        (1..=self.target).all(|t| self.images.iter().filter(|&&x| x == t).count() == 1)
    }

    pub fn is_active(&self) -> bool {
        self.images.iter().all(|&x| x != BASEPOINT)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.images.iter().enumerate().all(|(k, &x)| x == k + 1)
    }

    /// Index of this map in the lexicographic enumeration of `hom(<m>, <n>)`.
    pub fn rank(&self) -> usize {
        self.images
            .iter()
            .fold(0, |acc, &x| acc * (self.target + 1) + x)
    }
}

impl fmt::Display for PointedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|i| i.to_string()).collect();
        write!(f, "{}->{}:{}", self.source, self.target, parts.join(","))
    }
}

impl Serialize for PointedMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for PointedMap {
    type Err = Error;

    /// Parses `"<m>-><n>:i1,..,im"`, with `0` denoting the basepoint.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `<m>-><n>:i1,..,im`, got `{s}`"));
        let (arrow, images) = s.trim().split_once(':').ok_or_else(bad)?;
        let (m, n) = arrow.split_once("->").ok_or_else(bad)?;
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let images: Vec<usize> = if images.trim().is_empty() {
            Vec::new()
        } else {
            images
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        PointedMap::new(PointedSet::new(m), PointedSet::new(n), images)
    }
}

/// All pointed maps `s -> t`, lexicographic on image tuples.
pub fn enumerate_maps(s: PointedSet, t: PointedSet) -> Vec<PointedMap> {
    let base = t.arity + 1;
    let count = base.pow(s.arity as u32);
    (0..count)
        .map(|mut r| {
            let mut images = vec![0; s.arity];
            for slot in images.iter_mut().rev() {
                *slot = r % base;
                r /= base;
            }
            PointedMap::from_parts(s.arity, t.arity, images)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_inert: bool,
    pub is_active: bool,
}

pub fn classify(f: &PointedMap) -> Classification {
    Classification {
        is_inert: f.is_inert(),
        is_active: f.is_active(),
    }
}

/// Inert–active factorization through `(f^{-1}(T°))_+`, whose elements are
/// relabeled `1..k` in increasing order. Returns `(inert, active)`.
pub fn factorize(f: &PointedMap) -> (PointedMap, PointedMap) {
    let survivors = f.support();
    let k = survivors.len();
    let inert = PointedMap::from_parts(
        f.source,
        k,
        (1..=f.source)
            .map(|x| survivors.rank_of(x).unwrap_or(BASEPOINT))
            .collect(),
    );
    let active = PointedMap::from_parts(k, f.target, survivors.iter().map(|x| f.apply(x)).collect());
    (inert, active)
}

/// The inert map `V_+ -> W_+` for `W ⊆ V ⊆ S°`: identity on `W`, killing `V \ W`.
/// Both pointed sets are relabeled in increasing order.
pub fn restriction_map(v: Subset, w: Subset) -> PointedMap {
    debug_assert!(w.is_subset_of(v));
    PointedMap::from_parts(
        v.len(),
        w.len(),
        v.iter().map(|x| w.rank_of(x).unwrap_or(BASEPOINT)).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubeEdge {
    pub from: Subset,
    pub to: Subset,
    pub map: PointedMap,
}

/// Subsets of `S°` ordered by reverse inclusion, each realized as `V_+`, with
/// the inert restriction maps between them (identities included).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubeDiagram {
    pub ambient: PointedSet,
    pub vertices: Vec<Subset>,
    pub edges: Vec<CubeEdge>,
    pub ordered_by_reverse_inclusion: bool,
}

impl CubeDiagram {
    fn on_vertices(ambient: PointedSet, vertices: Vec<Subset>) -> Self {
        let mut edges = Vec::new();
        for &v in &vertices {
            for &w in &vertices {
                if w.is_subset_of(v) {
                    edges.push(CubeEdge {
                        from: v,
                        to: w,
                        map: restriction_map(v, w),
                    });
                }
            }
        }
        CubeDiagram {
            ambient,
            vertices,
            edges,
            ordered_by_reverse_inclusion: true,
        }
    }

    pub fn vertex_object(&self, v: Subset) -> PointedSet {
        PointedSet::new(v.len())
    }

    pub fn non_identity_edges(&self) -> impl Iterator<Item = &CubeEdge> {
        self.edges.iter().filter(|e| e.from != e.to)
    }

    pub fn edge(&self, from: Subset, to: Subset) -> Option<&CubeEdge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    /// The initial vertex (largest subset) under reverse inclusion.
    pub fn apex(&self) -> Subset {
        self.vertices
            .iter()
            .copied()
            .fold(Subset::EMPTY, |acc, v| acc.union(v))
    }

    /// True iff `map(V -> V'') = map(V' -> V'') ∘ map(V -> V')` for every chain.
    pub fn commutes(&self) -> bool {
        self.edges.iter().all(|first| {
            self.edges
                .iter()
                .filter(|second| second.from == first.to)
                .all(|second| match self.edge(first.from, second.to) {
                    Some(direct) => first.map.then_unchecked(&second.map) == direct.map,
                    None => false,
                })
        })
    }
}

pub fn inert_cube(s: PointedSet) -> CubeDiagram {
    CubeDiagram::on_vertices(s, Subset::all(s.arity).collect())
}

/// Restriction of a cube to the vertices `V` with `lower ⊆ V ⊆ upper`.
pub fn subcube(c: &CubeDiagram, lower: Subset, upper: Subset) -> Result<CubeDiagram> {
    if !lower.is_subset_of(upper) {
        return Err(Error::Mismatch(format!("{lower} is not contained in {upper}")));
    }
    if !upper.is_subset_of(c.ambient.interior_set()) {
        return Err(Error::Mismatch(format!(
            "{upper} is not a subset of the interior of {}",
            c.ambient
        )));
    }
    let vertices = c
        .vertices
        .iter()
        .copied()
        .filter(|v| lower.is_subset_of(*v) && v.is_subset_of(upper))
        .collect();
    Ok(CubeDiagram::on_vertices(c.ambient, vertices))
}
