use proptest::prelude::*;

use opcheck::cm_operad::{canonical_lift, is_cm_morphism, CMObject, Variant};
use opcheck::envelope::{comparison_on_objects, is_fplus_morphism, EnvObject, FPlusMorphism, FPlusObject};
use opcheck::finset::{classify, enumerate_maps, factorize, PointedMap, PointedSet, Subset};
use opcheck::semantics::bundled_algebra;

fn pointed_map(m: usize, n: usize) -> impl Strategy<Value = PointedMap> {
    prop::collection::vec(0..=n, m)
        .prop_map(move |images| PointedMap::new(PointedSet::new(m), PointedSet::new(n), images).unwrap())
}

fn composable_triple() -> impl Strategy<Value = (PointedMap, PointedMap, PointedMap)> {
    (0..=4usize, 0..=4usize, 0..=4usize, 0..=4usize)
        .prop_flat_map(|(a, b, c, d)| (pointed_map(a, b), pointed_map(b, c), pointed_map(c, d)))
}

fn cm_object(max: usize) -> impl Strategy<Value = CMObject> {
    (0..=max).prop_flat_map(|n| (0..(1u32 << n)).prop_map(move |u| CMObject::new(PointedSet::new(n), Subset(u)).unwrap()))
}

fn fplus_object(max: usize) -> impl Strategy<Value = FPlusObject> {
    (0..=max).prop_flat_map(|k| (0..(1u32 << k)).prop_map(move |u| FPlusObject::new(k, Subset(u)).unwrap()))
}

/// A random `F+` morphism out of `src`: marks biject onto the target marks
/// by construction, unmarked elements go anywhere.
fn fplus_morphism(max: usize) -> impl Strategy<Value = FPlusMorphism> {
    (fplus_object(max), 1..=max).prop_flat_map(|(src, extra)| {
        let marks = src.marked.elements();
        let size = marks.len() + extra;
        let perm = Just((1..=size).collect::<Vec<usize>>()).prop_shuffle();
        let free = prop::collection::vec(1..=size, src.size);
        (Just(src), perm, free).prop_map(move |(src, perm, free)| {
            let tgt = FPlusObject::new(size, Subset::from_elements(perm[..marks.len()].iter().copied())).unwrap();
            let mut map = free;
            for (i, &u) in marks.iter().enumerate() {
                map[u - 1] = perm[i];
            }
            FPlusMorphism::new(src, tgt, map).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn composition_is_associative((f, g, h) in composable_triple()) {
        let left = f.then(&g).unwrap().then(&h).unwrap();
        let right = f.then(&g.then(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identities_are_units(f in (0..=4usize, 0..=4usize).prop_flat_map(|(m, n)| pointed_map(m, n))) {
        prop_assert_eq!(PointedMap::identity(f.source()).then(&f).unwrap(), f.clone());
        prop_assert_eq!(f.then(&PointedMap::identity(f.target())).unwrap(), f);
    }

    #[test]
    fn factorization_recombines(f in (0..=5usize, 0..=5usize).prop_flat_map(|(m, n)| pointed_map(m, n))) {
        let (i, a) = factorize(&f);
        prop_assert!(classify(&i).is_inert);
        prop_assert!(classify(&a).is_active);
        prop_assert_eq!(i.target().arity, f.support().len());
        prop_assert_eq!(i.then(&a).unwrap(), f);
    }

    #[test]
    fn inert_and_active_maps_are_closed((f, g, _) in composable_triple()) {
        let h = f.then(&g).unwrap();
        if f.is_inert() && g.is_inert() {
            prop_assert!(h.is_inert());
        }
        if f.is_active() && g.is_active() {
            prop_assert!(h.is_active());
        }
    }

    #[test]
    fn map_notation_round_trips(f in (0..=5usize, 0..=5usize).prop_flat_map(|(m, n)| pointed_map(m, n))) {
        let back: PointedMap = f.to_string().parse().unwrap();
        prop_assert_eq!(&back, &f);
        let all = enumerate_maps(f.source(), f.target());
        prop_assert_eq!(&all[f.rank()], &f);
    }

    #[test]
    fn strengthened_predicate_is_closed_beyond_exhaustive_range(
        (f, g, _) in composable_triple(),
        u in any::<u32>(), v in any::<u32>(), w in any::<u32>(),
    ) {
        let obj = |p: PointedSet, bits: u32| CMObject::new(p, Subset(bits & ((1 << p.arity) - 1))).unwrap();
        let (x, y, z) = (obj(f.source(), u), obj(f.target(), v), obj(g.target(), w));
        let s = Variant::Strengthened;
        if is_cm_morphism(&f, &x, &y, s).unwrap() && is_cm_morphism(&g, &y, &z, s).unwrap() {
            prop_assert!(is_cm_morphism(&f.then(&g).unwrap(), &x, &z, s).unwrap());
        }
    }

    #[test]
    fn canonical_lifts_are_morphisms(x in cm_object(5), bits in any::<u32>()) {
        // an inert map killing the elements outside a random subset
        let keep = Subset(bits & ((1 << x.base.arity) - 1));
        let f = opcheck::finset::restriction_map(x.base.interior_set(), keep);
        let y = canonical_lift(&x, &f);
        for v in Variant::ALL {
            prop_assert!(is_cm_morphism(&f, &x, &y, v).unwrap());
        }
        prop_assert_eq!(y.marked.len(), x.marked.intersection(keep).len());
    }

    #[test]
    fn cm_notation_round_trips(x in cm_object(6)) {
        let back: CMObject = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn fplus_notation_round_trips(x in fplus_object(6)) {
        let back: FPlusObject = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn disjoint_union_of_morphisms_is_a_morphism(f in fplus_morphism(3), g in fplus_morphism(3)) {
        let h = f.disjoint_union(&g);
        prop_assert!(is_fplus_morphism(&h.map, &h.source, &h.target).unwrap());
    }

    #[test]
    fn swap_is_natural_and_involutive(f in fplus_morphism(3), g in fplus_morphism(3)) {
        let there = FPlusMorphism::swap(&f.source, &g.source);
        let back = FPlusMorphism::swap(&g.source, &f.source);
        prop_assert_eq!(there.then(&back).unwrap(), f.source.disjoint_union(&g.source).identity());
        let left = f.disjoint_union(&g).then(&FPlusMorphism::swap(&f.target, &g.target)).unwrap();
        let right = there.then(&g.disjoint_union(&f)).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn comparison_preserves_sizes(x in cm_object(4), shape in 1..=3usize, seed in prop::collection::vec(1..=3usize, 4)) {
        let mut alpha: Vec<usize> = seed[..x.base.arity].iter().map(|&t| (t - 1) % shape + 1).collect();
        alpha.sort();
        let e = EnvObject::new(x, shape, alpha).unwrap();
        let image = comparison_on_objects(&e);
        prop_assert_eq!(image.len(), shape);
        prop_assert_eq!(image.iter().map(|o| o.size).sum::<usize>(), x.base.arity);
        prop_assert_eq!(image.iter().map(|o| o.marked.len()).sum::<usize>(), x.marked.len());
        let back: EnvObject = e.to_string().parse().unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn folds_ignore_order(
        (xs, shuffled) in prop::collection::vec(0..2usize, 0..=4).prop_flat_map(|xs| (Just(xs.clone()), Just(xs).prop_shuffle())),
    ) {
        for name in ["z2_additive", "max_monoid"] {
            let e = bundled_algebra(name).unwrap().monoid;
            let left = e.fold(xs.iter().copied());
            let right = xs.iter().rev().fold(e.unit, |acc, &x| e.mult[x][acc]);
            prop_assert_eq!(left, right);
            prop_assert_eq!(left, e.fold(shuffled.iter().copied()));
        }
    }
}
