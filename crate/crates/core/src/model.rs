//! Finite carriers, bijections between them, and groupoid spines.
//!
//! A spine is a linearly ordered list of objects, each carrying a finite set,
//! a relation `R` of ordered object pairs containing every increasing pair,
//! and for each pair in `R` a non-empty list of bijections. The lists must be
//! relatively closed under identity, inverse and composition; see
//! [`validate_spine`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Position of an object in the spine order.
pub type ObjectId = usize;

/// An ordered pair of objects `(source, target)`.
pub type Pair = (ObjectId, ObjectId);

/// A named, non-empty finite set of distinct element labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    id: String,
    elements: Vec<String>,
}

impl FiniteSet {
    pub fn new<I, S>(id: impl Into<String>, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = id.into();
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(Error::InvalidSet {
                id,
                reason: "element list is empty".into(),
            });
        }
        let mut seen = HashSet::new();
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(Error::InvalidSet {
                    id,
                    reason: format!("duplicate element `{e}`"),
                });
            }
        }
        Ok(FiniteSet { id, elements })
    }

    /// The set `{"0", "1", ..., "n-1"}`.
    pub fn range(id: impl Into<String>, n: usize) -> Result<Self> {
        Self::new(id, (0..n).map(|i| i.to_string()))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.elements[index]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// Same elements under a different object label.
    pub fn renamed(&self, id: impl Into<String>) -> FiniteSet {
        FiniteSet {
            id: id.into(),
            elements: self.elements.clone(),
        }
    }
}

/// A bijection between two finite sets, stored by element position.
///
/// `images[x]` is the position in the target set of the image of the source
/// element at position `x`. Two maps are equal exactly when their graphs are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteMap {
    source: String,
    target: String,
    images: Vec<usize>,
}

impl FiniteMap {
    pub fn new(source: impl Into<String>, target: impl Into<String>, images: Vec<usize>) -> Result<Self> {
        let source = source.into();
        let target = target.into();
        if images.is_empty() {
            return Err(Error::NotBijective {
                source_obj: source,
                target_obj: target,
                reason: "empty mapping".into(),
            });
        }
        let mut hit = vec![false; images.len()];
        for (x, &y) in images.iter().enumerate() {
            if y >= images.len() {
                return Err(Error::NotBijective {
                    source_obj: source,
                    target_obj: target,
                    reason: format!("image {y} of position {x} is out of range"),
                });
            }
            if std::mem::replace(&mut hit[y], true) {
                return Err(Error::NotBijective {
                    source_obj: source,
                    target_obj: target,
                    reason: format!("position {y} is hit twice"),
                });
            }
        }
        Ok(FiniteMap {
            source,
            target,
            images,
        })
    }

    pub fn identity(set: &FiniteSet) -> Self {
        FiniteMap {
            source: set.id.clone(),
            target: set.id.clone(),
            images: (0..set.len()).collect(),
        }
    }

    /// Build from a position function `x -> f(x)`.
    pub fn from_fn(source: &FiniteSet, target: &FiniteSet, f: impl Fn(usize) -> usize) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::NotBijective {
                source_obj: source.id.clone(),
                target_obj: target.id.clone(),
                reason: format!("carrier sizes differ ({} vs {})", source.len(), target.len()),
            });
        }
        Self::new(source.id.clone(), target.id.clone(), (0..source.len()).map(f).collect())
    }

    /// Build from label pairs `(x, f(x))`. The pairs must cover the source
    /// exactly once and hit every target element exactly once.
    pub fn from_labels<'a, I>(source: &FiniteSet, target: &FiniteSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let not_bijective = |reason: String| Error::NotBijective {
            source_obj: source.id.clone(),
            target_obj: target.id.clone(),
            reason,
        };
        if source.len() != target.len() {
            return Err(not_bijective(format!(
                "carrier sizes differ ({} vs {})",
                source.len(),
                target.len()
            )));
        }
        let mut images = vec![usize::MAX; source.len()];
        for (x, y) in pairs {
            let xi = source
                .position(x)
                .ok_or_else(|| not_bijective(format!("`{x}` is not in the source set")))?;
            let yi = target
                .position(y)
                .ok_or_else(|| not_bijective(format!("`{y}` is not in the target set")))?;
            if images[xi] != usize::MAX {
                return Err(not_bijective(format!("`{x}` is assigned twice")));
            }
            images[xi] = yi;
        }
        if let Some(x) = images.iter().position(|&y| y == usize::MAX) {
            return Err(not_bijective(format!("`{}` has no image", source.label(x))));
        }
        Self::new(source.id.clone(), target.id.clone(), images)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// `g ∘ self`: first `self`, then `g`.
    pub fn then(&self, g: &FiniteMap) -> Result<FiniteMap> {
        if self.target != g.source || self.len() != g.len() {
            return Err(Error::TargetMismatch {
                f_target: self.target.clone(),
                g_source: g.source.clone(),
            });
        }
        Ok(FiniteMap {
            source: self.source.clone(),
            target: g.target.clone(),
            images: self.images.iter().map(|&y| g.images[y]).collect(),
        })
    }

    pub fn inverse(&self) -> FiniteMap {
        FiniteMap {
            source: self.target.clone(),
            target: self.source.clone(),
            images: invert_images(&self.images),
        }
    }

    /// Same graph under new endpoint labels.
    pub fn relabeled(&self, source: impl Into<String>, target: impl Into<String>) -> FiniteMap {
        FiniteMap {
            source: source.into(),
            target: target.into(),
            images: self.images.clone(),
        }
    }

    /// Canonical textual key of the graph: `x>f(x)` entries sorted by the
    /// source label, joined by `;`.
    pub fn graph_key(&self, source: &FiniteSet, target: &FiniteSet) -> String {
        let mut entries: Vec<(&str, &str)> = self
            .images
            .iter()
            .enumerate()
            .map(|(x, &y)| (source.label(x), target.label(y)))
            .collect();
        entries.sort_unstable();
        entries
            .iter()
            .map(|(x, y)| format!("{x}>{y}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub(crate) fn invert_images(images: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; images.len()];
    for (x, &y) in images.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

pub(crate) fn compose_images(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&y| second[y]).collect()
}

/// `g ∘ f`, the map `x ↦ g(f(x))`.
pub fn compose(f: &FiniteMap, g: &FiniteMap) -> Result<FiniteMap> {
    f.then(g)
}

pub fn invert(f: &FiniteMap) -> FiniteMap {
    f.inverse()
}

/// Objects with carriers, a pair relation, and morphism lists.
///
/// Construction only enforces what is needed to interpret the data (known
/// objects, map sizes matching carriers). The groupoid axioms are checked by
/// [`validate_spine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidSpine {
    sets: Vec<FiniteSet>,
    pairs: BTreeSet<Pair>,
    morphisms: BTreeMap<Pair, Vec<FiniteMap>>,
}

impl GroupoidSpine {
    pub fn new(
        sets: Vec<FiniteSet>,
        pairs: BTreeSet<Pair>,
        morphisms: BTreeMap<Pair, Vec<FiniteMap>>,
    ) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Structural("no objects".into()));
        }
        let mut seen = HashSet::new();
        for s in &sets {
            if !seen.insert(s.id()) {
                return Err(Error::Structural(format!("duplicate object `{}`", s.id())));
            }
        }
        let n = sets.len();
        for &(i, j) in pairs.iter().chain(morphisms.keys()) {
            if i >= n || j >= n {
                return Err(Error::Structural(format!("pair ({i},{j}) refers to a missing object")));
            }
        }
        for (&(i, j), maps) in &morphisms {
            for (idx, f) in maps.iter().enumerate() {
                if f.len() != sets[i].len() || f.len() != sets[j].len() {
                    return Err(Error::Structural(format!(
                        "morphism {idx} of {}|{} has {} points but the carriers have {} and {}",
                        sets[i].id(),
                        sets[j].id(),
                        f.len(),
                        sets[i].len(),
                        sets[j].len()
                    )));
                }
            }
        }
        Ok(GroupoidSpine {
            sets,
            pairs,
            morphisms,
        })
    }

    pub fn object_count(&self) -> usize {
        self.sets.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = &str> {
        self.sets.iter().map(|s| s.id())
    }

    pub fn object_label(&self, object: ObjectId) -> &str {
        self.sets[object].id()
    }

    pub fn object_index(&self, label: &str) -> Option<ObjectId> {
        self.sets.iter().position(|s| s.id() == label)
    }

    pub fn sets(&self) -> &[FiniteSet] {
        &self.sets
    }

    pub fn set(&self, object: ObjectId) -> &FiniteSet {
        &self.sets[object]
    }

    pub fn pairs(&self) -> &BTreeSet<Pair> {
        &self.pairs
    }

    pub fn has_pair(&self, pair: Pair) -> bool {
        self.pairs.contains(&pair)
    }

    /// Morphisms listed for `pair`; empty when none are listed.
    pub fn morphisms(&self, pair: Pair) -> &[FiniteMap] {
        self.morphisms.get(&pair).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn morphism_table(&self) -> &BTreeMap<Pair, Vec<FiniteMap>> {
        &self.morphisms
    }

    /// `"i|j"` using object labels.
    pub fn pair_key(&self, (i, j): Pair) -> String {
        format!("{}|{}", self.sets[i].id(), self.sets[j].id())
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(i, j)| self.pairs.contains(&(j, i)))
    }

    /// Equality of the data with morphism lists compared as sets of graphs.
    pub fn same_graphs(&self, other: &GroupoidSpine) -> bool {
        if self.sets != other.sets || self.pairs != other.pairs {
            return false;
        }
        let keys: BTreeSet<&Pair> = self.morphisms.keys().chain(other.morphisms.keys()).collect();
        keys.into_iter().all(|&p| {
            let a: HashSet<&FiniteMap> = self.morphisms(p).iter().collect();
            let b: HashSet<&FiniteMap> = other.morphisms(p).iter().collect();
            a == b
        })
    }

    pub(crate) fn into_parts(self) -> (Vec<FiniteSet>, BTreeSet<Pair>, BTreeMap<Pair, Vec<FiniteMap>>) {
        (self.sets, self.pairs, self.morphisms)
    }
}

/// One failed spine requirement with a concrete witness.
///
/// Pairs are reported as `(source label, target label)`; map indices refer to
/// positions in the listed morphism sequence of that pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyRelation,
    MissingIncreasingPair {
        pair: (String, String),
    },
    NoMorphisms {
        pair: (String, String),
    },
    UnlistedPair {
        pair: (String, String),
    },
    EndpointMismatch {
        pair: (String, String),
        index: usize,
        source: String,
        target: String,
    },
    DuplicateMorphism {
        pair: (String, String),
        first: usize,
        second: usize,
    },
    /// Axiom 1.
    MissingIdentity {
        object: String,
    },
    /// Axiom 2: the inverse of `pair[index]` is absent from the reverse pair.
    MissingInverse {
        pair: (String, String),
        index: usize,
    },
    /// Axiom 3: `g ∘ f` is absent, with `f = first[first_index]` and
    /// `g = second[second_index]`. `element` is a source point where the
    /// composite differs from every listed morphism of the composite pair.
    ClosureViolation {
        first: (String, String),
        first_index: usize,
        second: (String, String),
        second_index: usize,
        element: String,
    },
}

impl Violation {
    /// Groupoid axiom number, or `None` for structural checks.
    pub fn axiom(&self) -> Option<u8> {
        match self {
            Violation::MissingIdentity { .. } => Some(1),
            Violation::MissingInverse { .. } => Some(2),
            Violation::ClosureViolation { .. } => Some(3),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Violation::EmptyRelation => "EmptyRelation",
            Violation::MissingIncreasingPair { .. } => "MissingIncreasingPair",
            Violation::NoMorphisms { .. } => "NoMorphisms",
            Violation::UnlistedPair { .. } => "UnlistedPair",
            Violation::EndpointMismatch { .. } => "EndpointMismatch",
            Violation::DuplicateMorphism { .. } => "DuplicateMorphism",
            Violation::MissingIdentity { .. } => "MissingIdentity",
            Violation::MissingInverse { .. } => "MissingInverse",
            Violation::ClosureViolation { .. } => "ClosureViolation",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.axiom() {
            Some(n) => format!("axiom {n}"),
            None => "structure".to_string(),
        };
        write!(f, "[{tag}] {}: ", self.kind())?;
        match self {
            Violation::EmptyRelation => write!(f, "the pair relation is empty"),
            Violation::MissingIncreasingPair { pair: (i, j) } => {
                write!(f, "increasing pair {i}|{j} is not in the relation")
            }
            Violation::NoMorphisms { pair: (i, j) } => write!(f, "no morphisms listed for {i}|{j}"),
            Violation::UnlistedPair { pair: (i, j) } => {
                write!(f, "morphisms listed for {i}|{j}, which is not in the relation")
            }
            Violation::EndpointMismatch {
                pair: (i, j),
                index,
                source,
                target,
            } => write!(f, "{i}|{j}[{index}] is declared as a map {source}->{target}"),
            Violation::DuplicateMorphism {
                pair: (i, j),
                first,
                second,
            } => write!(f, "{i}|{j}[{second}] repeats the graph of {i}|{j}[{first}]"),
            Violation::MissingIdentity { object } => {
                write!(f, "identity of {object} is missing from {object}|{object}")
            }
            Violation::MissingInverse { pair: (i, j), index } => {
                write!(f, "inverse of {i}|{j}[{index}] is missing from {j}|{i}")
            }
            Violation::ClosureViolation {
                first: (i, j),
                first_index,
                second: (_, k),
                second_index,
                element,
            } => write!(
                f,
                "g∘f with f={i}|{j}[{first_index}], g={j}|{k}[{second_index}] is missing from {i}|{k} (witness element {element})"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "valid groupoid spine");
        }
        writeln!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Check every groupoid-spine requirement, collecting all violations.
pub fn validate_spine(s: &GroupoidSpine) -> ValidationReport {
    let mut violations = Vec::new();
    let n = s.object_count();
    let label = |(i, j): Pair| (s.object_label(i).to_string(), s.object_label(j).to_string());

    if s.pairs.is_empty() {
        violations.push(Violation::EmptyRelation);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !s.has_pair((i, j)) {
                violations.push(Violation::MissingIncreasingPair { pair: label((i, j)) });
            }
        }
    }
    for &p in &s.pairs {
        if s.morphisms(p).is_empty() {
            violations.push(Violation::NoMorphisms { pair: label(p) });
        }
    }
    for &p in s.morphisms.keys() {
        if !s.has_pair(p) {
            violations.push(Violation::UnlistedPair { pair: label(p) });
        }
    }
    for (&(i, j), maps) in &s.morphisms {
        let mut first_seen: HashMap<&[usize], usize> = HashMap::new();
        for (idx, f) in maps.iter().enumerate() {
            if f.source() != s.object_label(i) || f.target() != s.object_label(j) {
                violations.push(Violation::EndpointMismatch {
                    pair: label((i, j)),
                    index: idx,
                    source: f.source().to_string(),
                    target: f.target().to_string(),
                });
            }
            if let Some(&first) = first_seen.get(f.images()) {
                violations.push(Violation::DuplicateMorphism {
                    pair: label((i, j)),
                    first,
                    second: idx,
                });
            } else {
                first_seen.insert(f.images(), idx);
            }
        }
    }

    // Membership by graph; endpoint labels are checked above.
    let graphs: BTreeMap<Pair, HashSet<&[usize]>> = s
        .morphisms
        .iter()
        .filter(|(p, _)| s.has_pair(**p))
        .map(|(&p, maps)| (p, maps.iter().map(FiniteMap::images).collect()))
        .collect();
    let contains = |p: Pair, images: &[usize]| graphs.get(&p).is_some_and(|g| g.contains(images));

    for i in 0..n {
        if s.has_pair((i, i)) {
            let id: Vec<usize> = (0..s.set(i).len()).collect();
            if !contains((i, i), &id) {
                violations.push(Violation::MissingIdentity {
                    object: s.object_label(i).to_string(),
                });
            }
        }
    }
    for &(i, j) in &s.pairs {
        if !s.has_pair((j, i)) {
            continue;
        }
        for (idx, f) in s.morphisms((i, j)).iter().enumerate() {
            if !contains((j, i), &invert_images(f.images())) {
                violations.push(Violation::MissingInverse {
                    pair: label((i, j)),
                    index: idx,
                });
            }
        }
    }
    for &(i, j) in &s.pairs {
        for k in 0..n {
            if !s.has_pair((j, k)) || !s.has_pair((i, k)) {
                continue;
            }
            for (fi, f) in s.morphisms((i, j)).iter().enumerate() {
                for (gi, g) in s.morphisms((j, k)).iter().enumerate() {
                    let gf = compose_images(f.images(), g.images());
                    if contains((i, k), &gf) {
                        continue;
                    }
                    let element = closure_witness(&gf, s.morphisms((i, k)))
                        .map(|x| s.set(i).label(x).to_string())
                        .unwrap_or_default();
                    violations.push(Violation::ClosureViolation {
                        first: label((i, j)),
                        first_index: fi,
                        second: label((j, k)),
                        second_index: gi,
                        element,
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// A point `x` such that no listed map agrees with `composite` on every point
/// up to and including `x`: the smallest prefix separating it from the list.
fn closure_witness(composite: &[usize], listed: &[FiniteMap]) -> Option<usize> {
    (0..composite.len()).find(|&x| {
        listed
            .iter()
            .all(|h| h.images()[..=x] != composite[..=x])
    })
}
