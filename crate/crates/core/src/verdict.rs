//! Pass/fail outcomes with canonical, serializable witnesses.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
}

impl Verdict {
    pub fn fail(witness: Witness) -> Self {
        Verdict::Fail { witness }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail { witness } => Some(witness),
        }
    }

    /// Runs `next` only if `self` passed.
    pub fn and_then(self, next: impl FnOnce() -> Verdict) -> Verdict {
        match self {
            Verdict::Pass => next(),
            fail => fail,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail { witness } => write!(f, "fail: {witness}"),
        }
    }
}

/// Minimal counterexample data. Objects and arrows are referred to by their
/// canonical labels so that witnesses are stable across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    IdentityEndpoints {
        object: String,
        arrow: String,
    },
    IdentityLaw {
        object: String,
        arrow: String,
    },
    MissingComposite {
        first: String,
        second: String,
    },
    CompositeEndpoints {
        first: String,
        second: String,
        composite: String,
    },
    NonAssociative {
        first: String,
        second: String,
        third: String,
    },
    FunctorEndpoints {
        arrow: String,
    },
    FunctorIdentity {
        object: String,
    },
    FunctorComposition {
        first: String,
        second: String,
    },
    ObjectNotHit {
        object: String,
    },
    ObjectDoublyHit {
        object: String,
        preimages: Vec<String>,
    },
    ArrowNotHit {
        arrow: String,
    },
    ArrowDoublyHit {
        arrow: String,
        preimages: Vec<String>,
    },
    NotEssentiallySurjective {
        object: String,
    },
    NotFullyFaithful {
        source: String,
        target: String,
        source_hom: usize,
        target_hom: usize,
    },
    BoundTooSmall {
        bound: usize,
    },
    MissingCocartesianLift {
        object: String,
        base_map: String,
    },
    HomDecomposition {
        source: String,
        target: String,
        base_map: String,
        arrows: usize,
        tuples: usize,
    },
    SegalFiber {
        arity: usize,
        detail: Box<Witness>,
    },
    NotClosed {
        first: String,
        second: String,
        composite: String,
    },
    MissingIdentityMorphism {
        object: String,
    },
    HomMismatch {
        source: String,
        target: String,
        base_map: Option<String>,
        left: usize,
        right: usize,
    },
    IllDefined {
        arrow: String,
        reason: String,
    },
    NotOverBase {
        arrow: String,
    },
    MarkedEdge {
        arrow: String,
    },
    AlgebraLaw {
        law: String,
        elements: Vec<String>,
    },
    Functoriality {
        first: String,
        second: String,
        input: Vec<String>,
    },
    IdentityPreservation {
        map: String,
        input: Vec<String>,
    },
    CubeLimit {
        lower: Vec<usize>,
        upper: Vec<usize>,
        apex_size: usize,
        limit_size: usize,
        reason: String,
    },
    Cardinality {
        arity: usize,
        expected: usize,
        actual: usize,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_string(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{self:?}"),
        }
    }
}
