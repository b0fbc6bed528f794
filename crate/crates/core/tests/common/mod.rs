//! Brute-force reference computations. Nothing here calls into the library's
//! predicates or constructions: maps are plain image vectors (`0` is the
//! basepoint) and marks are bitmasks over `1..=n`.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Every map `{1..m} -> {0..n}`, lexicographic.
pub fn raw_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=n).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn has(mask: u32, i: usize) -> bool {
    i >= 1 && mask & (1 << (i - 1)) != 0
}

pub fn is_inert(f: &[usize], n: usize) -> bool {
    (1..=n).all(|t| f.iter().filter(|&&x| x == t).count() == 1)
}

pub fn is_active(f: &[usize]) -> bool {
    f.iter().all(|&x| x != 0)
}

/// Each marked target has exactly one marked preimage; in the strengthened
/// reading a marked source also never lands on an unmarked element.
pub fn cm_ok(f: &[usize], n: usize, u: u32, v: u32, strengthened: bool) -> bool {
    let exactly_one = (1..=n)
        .filter(|&t| has(v, t))
        .all(|t| (1..=f.len()).filter(|&s| has(u, s) && f[s - 1] == t).count() == 1);
    let no_stray = (1..=f.len()).all(|s| !has(u, s) || f[s - 1] == 0 || has(v, f[s - 1]));
    exactly_one && (!strengthened || no_stray)
}

/// Total number of CM arrows between objects of arity at most `bound`.
pub fn cm_arrow_count(bound: usize, strengthened: bool) -> usize {
    let mut count = 0;
    for m in 0..=bound {
        for n in 0..=bound {
            let maps = raw_maps(m, n);
            for u in 0..(1u32 << m) {
                for v in 0..(1u32 << n) {
                    count += maps.iter().filter(|f| cm_ok(f, n, u, v, strengthened)).count();
                }
            }
        }
    }
    count
}

/// Active maps `<k> -> <1>` from the inputs (bit `i` set for an `m` input)
/// to the output color that satisfy the predicate.
pub fn mul_count(inputs: &[char], output: char, strengthened: bool) -> usize {
    let k = inputs.len();
    let u = inputs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 'm')
        .fold(0u32, |acc, (i, _)| acc | (1 << i));
    let v = if output == 'm' { 1 } else { 0 };
    raw_maps(k, 1)
        .iter()
        .filter(|f| is_active(f) && cm_ok(f, 1, u, v, strengthened))
        .count()
}

pub fn mask_label(mask: u32, n: usize) -> String {
    (1..=n)
        .filter(|&i| has(mask, i))
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn map_label(f: &[usize], n: usize) -> String {
    let parts: Vec<String> = f.iter().map(|x| x.to_string()).collect();
    format!("{}->{}:{}", f.len(), n, parts.join(","))
}

/// An envelope object `(m, U, alpha)` with `alpha` non-decreasing into
/// `1..=shape`.
#[derive(Clone, Debug)]
pub struct RawEnv {
    pub m: usize,
    pub u: u32,
    pub shape: usize,
    pub alpha: Vec<usize>,
}

impl RawEnv {
    pub fn label(&self) -> String {
        let a: Vec<String> = self.alpha.iter().map(|x| x.to_string()).collect();
        format!("({}|{})@{}:{}", self.m, mask_label(self.u, self.m), self.shape, a.join(","))
    }

    /// Per shape element: (fiber size, marks relabeled within the fiber).
    pub fn tuple(&self) -> Vec<(usize, u32)> {
        (1..=self.shape)
            .map(|t| {
                let fiber: Vec<usize> = (1..=self.m).filter(|&s| self.alpha[s - 1] == t).collect();
                let marks = fiber
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| has(self.u, s))
                    .fold(0u32, |acc, (i, _)| acc | (1 << i));
                (fiber.len(), marks)
            })
            .collect()
    }
}

pub fn tuple_label(t: &[(usize, u32)]) -> String {
    let parts: Vec<String> = t
        .iter()
        .map(|&(k, u)| {
            let carrier: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
            format!("{{{}|{}}}", carrier.join(","), mask_label(u, k))
        })
        .collect();
    format!("({})", parts.join(","))
}

pub fn raw_env_objects(max_arity: usize, max_shape: usize) -> Vec<RawEnv> {
    let mut out = Vec::new();
    for shape in 0..=max_shape {
        for m in 0..=max_arity {
            for u in 0..(1u32 << m) {
                for f in raw_maps(m, shape) {
                    if f.iter().all(|&x| x >= 1) && f.windows(2).all(|w| w[0] <= w[1]) {
                        out.push(RawEnv {
                            m,
                            u,
                            shape,
                            alpha: f,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Envelope arrows `x -> y` over `delta`: CM-valid `g` with
/// `delta(alpha(s)) = alpha'(g(s))` (both sides `*` when `g(s) = *`).
pub fn env_hom(x: &RawEnv, y: &RawEnv, delta: &[usize], strengthened: bool) -> usize {
    raw_maps(x.m, y.m)
        .iter()
        .filter(|g| cm_ok(g, y.m, x.u, y.u, strengthened))
        .filter(|g| {
            (1..=x.m).all(|s| {
                let left = delta[x.alpha[s - 1] - 1];
                let right = if g[s - 1] == 0 { 0 } else { y.alpha[g[s - 1] - 1] };
                left == right
            })
        })
        .count()
}

/// Tuple arrows `xs -> ys` over `delta`: for each `t` with `delta(t) != *`
/// a map of carriers into `ys[delta(t)]`, such that over every `t'` the marks
/// of the union biject onto the marks of `ys[t']`.
pub fn fplus_hom(xs: &[(usize, u32)], ys: &[(usize, u32)], delta: &[usize]) -> usize {
    // Flatten the source carriers that survive delta, remembering their target slot.
    let mut slots = Vec::new();
    for (t, &(k, u)) in xs.iter().enumerate() {
        if delta[t] != 0 {
            for c in 1..=k {
                slots.push((delta[t], has(u, c)));
            }
        }
    }
    let mut count = 0;
    let mut choice = vec![1usize; slots.len()];
    if slots.iter().any(|&(tp, _)| ys[tp - 1].0 == 0) {
        return 0;
    }
    loop {
        let ok = (1..=ys.len()).all(|tp| {
            let (k, v) = ys[tp - 1];
            let hits: Vec<usize> = slots
                .iter()
                .zip(&choice)
                .filter(|((t, marked), _)| *t == tp && *marked)
                .map(|(_, &c)| c)
                .collect();
            let mut sorted = hits.clone();
            sorted.sort();
            sorted.dedup();
            sorted.len() == hits.len()
                && hits.iter().all(|&c| has(v, c))
                && (1..=k).filter(|&c| has(v, c)).count() == hits.len()
        });
        if ok {
            count += 1;
        }
        // advance the odometer
        let mut i = slots.len();
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            if choice[i] < ys[slots[i].0 - 1].0 {
                choice[i] += 1;
                break;
            }
            choice[i] = 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomCounts {
    pub envelope: usize,
    pub fplus: usize,
}

/// Both hom-set cardinalities for every `(x, y, delta)`, keyed by labels.
pub fn envelope_hom_table(
    max_arity: usize,
    max_shape: usize,
    strengthened: bool,
) -> BTreeMap<(String, String, String), HomCounts> {
    let objects = raw_env_objects(max_arity, max_shape);
    let mut out = BTreeMap::new();
    for x in &objects {
        for y in &objects {
            for delta in raw_maps(x.shape, y.shape) {
                let counts = HomCounts {
                    envelope: env_hom(x, y, &delta, strengthened),
                    fplus: fplus_hom(&x.tuple(), &y.tuple(), &delta),
                };
                out.insert((x.label(), y.label(), map_label(&delta, y.shape)), counts);
            }
        }
    }
    out
}

/// Morphisms `(S, j) -> (T, j')` of pointed maps out of `<1>`: pointed `f`
/// with `f(j) = j'`.
pub fn fo_hom(m: usize, p: usize, n: usize, q: usize) -> usize {
    raw_maps(m, n)
        .iter()
        .filter(|f| if p == 0 { q == 0 } else { f[p - 1] == q })
        .count()
}

/// CM arrows between the images of `(S, j)` and `(T, j')`.
pub fn phi_hom(m: usize, p: usize, n: usize, q: usize, strengthened: bool) -> usize {
    let u = if p == 0 { 0 } else { 1 << (p - 1) };
    let v = if q == 0 { 0 } else { 1 << (q - 1) };
    raw_maps(m, n).iter().filter(|f| cm_ok(f, n, u, v, strengthened)).count()
}

/// First `(source, target, F° count, CM count)` where the hom-sets differ.
pub fn phi_first_mismatch(bound: usize, strengthened: bool) -> Option<(String, String, usize, usize)> {
    for m in 0..=bound {
        for p in 0..=m {
            for n in 0..=bound {
                for q in 0..=n {
                    let (l, r) = (fo_hom(m, p, n, q), phi_hom(m, p, n, q, strengthened));
                    if l != r {
                        let lab = |k: usize, x: usize| format!("({}|{})", k, if x == 0 { String::new() } else { x.to_string() });
                        return Some((lab(m, p), lab(n, q), l, r));
                    }
                }
            }
        }
    }
    None
}

/// Fold-then-act on raw assignments; tables indexed `[a][b]`.
pub fn fold_act(mult: &[Vec<usize>], unit: usize, action: &[Vec<usize>], es: &[usize], m: Option<usize>) -> usize {
    let e = es.iter().fold(unit, |acc, &x| mult[acc][x]);
    match m {
        Some(x) => action[e][x],
        None => e,
    }
}
