//! Regularity and the constructive extension of a regular spine to a groupoid.
//!
//! The pipeline is: adjoin inverses on the missing reverse pairs, fill each
//! empty diagonal `Mor(i,i)` with the composites through a witness object,
//! then close every morphism set under composition and inversion. For a
//! regular spine with at least three objects the closure never adds a map to
//! a pair of the input relation, and the result is again regular; both facts
//! are checked on every run.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{compose_images, invert_images, validate_spine, FiniteMap, GroupoidSpine, Pair};

/// Number of violating incidences kept in a [`RegularityReport`].
pub const REPORTED_VIOLATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityViolation {
    pub pair: (String, String),
    pub x: String,
    pub y: String,
    /// Number of listed morphisms sending `x` to `y`.
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegularityReport {
    /// The first [`REPORTED_VIOLATIONS`] violating incidences.
    pub violations: Vec<RegularityViolation>,
    pub total_violations: usize,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.total_violations == 0
    }
}

impl fmt::Display for RegularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_regular() {
            return writeln!(f, "regular");
        }
        writeln!(f, "not regular: {} incidence(s) with count != 1", self.total_violations)?;
        for v in &self.violations {
            writeln!(f, "  {}|{}: {} -> {} hit by {} morphism(s)", v.pair.0, v.pair.1, v.x, v.y, v.count)?;
        }
        Ok(())
    }
}

/// Count, for every pair in the relation and every `(x, y)`, the morphisms
/// sending `x` to `y`.
pub fn check_regularity(s: &GroupoidSpine) -> Result<RegularityReport> {
    let validation = validate_spine(s);
    if !validation.passed() {
        return Err(Error::InvalidSpine(validation));
    }
    Ok(regularity_unchecked(s))
}

fn regularity_unchecked(s: &GroupoidSpine) -> RegularityReport {
    let mut report = RegularityReport::default();
    for &(i, j) in s.pairs() {
        let n = s.set(i).len();
        let mut counts = vec![vec![0usize; n]; n];
        for f in s.morphisms((i, j)) {
            for (x, &y) in f.images().iter().enumerate() {
                counts[x][y] += 1;
            }
        }
        for (x, row) in counts.iter().enumerate() {
            for (y, &count) in row.iter().enumerate() {
                if count == 1 {
                    continue;
                }
                report.total_violations += 1;
                if report.violations.len() < REPORTED_VIOLATIONS {
                    report.violations.push(RegularityViolation {
                        pair: (s.object_label(i).to_string(), s.object_label(j).to_string()),
                        x: s.set(i).label(x).to_string(),
                        y: s.set(j).label(y).to_string(),
                        count,
                    });
                }
            }
        }
    }
    report
}

fn require_regular(s: &GroupoidSpine) -> Result<()> {
    let report = check_regularity(s)?;
    if !report.is_regular() {
        return Err(Error::NotRegular(report));
    }
    Ok(())
}

/// Adjoin every reverse pair `(j, i)` missing from the relation, carrying the
/// inverses of `Mor(i, j)` in the same order. Input pairs are untouched.
pub fn symmetric_closure(s: &GroupoidSpine) -> Result<GroupoidSpine> {
    require_regular(s)?;
    let closed = symmetric_closure_unchecked(s);
    let report = validate_spine(&closed);
    if !report.passed() {
        return Err(Error::TheoremViolation(format!(
            "symmetric closure of a regular spine is not a spine:\n{report}"
        )));
    }
    Ok(closed)
}

fn symmetric_closure_unchecked(s: &GroupoidSpine) -> GroupoidSpine {
    let (sets, mut pairs, mut morphisms) = s.clone().into_parts();
    let missing: Vec<Pair> = pairs
        .iter()
        .map(|&(i, j)| (j, i))
        .filter(|p| !pairs.contains(p))
        .collect();
    for (j, i) in missing {
        let inverses = morphisms[&(i, j)].iter().map(FiniteMap::inverse).collect();
        pairs.insert((j, i));
        morphisms.insert((j, i), inverses);
    }
    GroupoidSpine::new(sets, pairs, morphisms).expect("same objects and carriers")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionResult {
    /// The generated groupoid, with every ordered pair of objects present.
    pub extended: GroupoidSpine,
    /// True iff the closure added nothing to a pair of the input relation.
    pub conservative: bool,
    /// Maps of the closure absent from the input, keyed by input pairs that
    /// received any.
    pub added_morphisms: BTreeMap<Pair, Vec<FiniteMap>>,
    /// Fixpoint rounds; the last round discovers nothing.
    pub iterations: usize,
    /// Whether `extended` is regular.
    pub regular: bool,
}

/// Grow a regular spine to the groupoid generated by its morphisms.
///
/// With three or more objects the outcome is always conservative and regular;
/// anything else is reported as [`Error::TheoremViolation`]. With fewer
/// objects conservativity is reported as found.
pub fn extend_to_groupoid(s: &GroupoidSpine) -> Result<ExtensionResult> {
    require_regular(s)?;
    let result = extend_unchecked(s, Exploration::Fifo);

    let report = validate_spine(&result.extended);
    if !report.passed() {
        return Err(Error::TheoremViolation(format!("groupoid closure is not a spine:\n{report}")));
    }
    if s.object_count() >= 3 {
        if !result.conservative {
            let pairs: Vec<String> = result.added_morphisms.keys().map(|&p| s.pair_key(p)).collect();
            return Err(Error::TheoremViolation(format!(
                "closure of a regular spine with {} objects added morphisms to {}",
                s.object_count(),
                pairs.join(", ")
            )));
        }
        if !result.regular {
            return Err(Error::TheoremViolation(format!(
                "groupoid extension of a regular spine is not regular:\n{}",
                regularity_unchecked(&result.extended)
            )));
        }
    }
    Ok(result)
}

/// Order in which each round's frontier is explored. The fixpoint does not
/// depend on it.
#[derive(Debug, Clone, Copy)]
enum Exploration {
    Fifo,
    #[cfg_attr(not(test), allow(dead_code))]
    Lifo,
    #[cfg_attr(not(test), allow(dead_code))]
    Shuffled(u64),
}

fn extend_unchecked(s: &GroupoidSpine, order: Exploration) -> ExtensionResult {
    let symmetric = symmetric_closure_unchecked(s);
    let n = s.object_count();
    let (sets, _, mut morphisms) = symmetric.into_parts();

    // Diagonal through the least other object.
    for i in 0..n {
        if morphisms.contains_key(&(i, i)) {
            continue;
        }
        let k = if i == 0 { 1 } else { 0 };
        let mut seen = HashSet::new();
        let mut diag = Vec::new();
        for f in &morphisms[&(i, k)] {
            for g in &morphisms[&(k, i)] {
                let gf = compose_images(f.images(), g.images());
                if seen.insert(gf.clone()) {
                    diag.push(FiniteMap::new(sets[i].id(), sets[i].id(), gf).expect("bijection"));
                }
            }
        }
        morphisms.insert((i, i), diag);
    }

    let initial: BTreeMap<Pair, Vec<Vec<usize>>> = morphisms
        .iter()
        .map(|(&p, maps)| (p, maps.iter().map(|f| f.images().to_vec()).collect()))
        .collect();
    let (closed, iterations) = close(n, initial, order);

    let mut added_morphisms = BTreeMap::new();
    let mut table = BTreeMap::new();
    for (p @ (i, j), graphs) in closed {
        let mut maps = morphisms.remove(&p).unwrap_or_default();
        let known: HashSet<Vec<usize>> = maps.iter().map(|f| f.images().to_vec()).collect();
        let mut extra: Vec<Vec<usize>> = graphs.into_iter().filter(|g| !known.contains(g)).collect();
        extra.sort();
        let extra: Vec<FiniteMap> = extra
            .into_iter()
            .map(|g| FiniteMap::new(sets[i].id(), sets[j].id(), g).expect("bijection"))
            .collect();
        // Input pairs keep their lists verbatim, so `extra` is exactly what
        // the closure added there.
        if s.has_pair(p) && !extra.is_empty() {
            added_morphisms.insert(p, extra.clone());
        }
        maps.extend(extra);
        table.insert(p, maps);
    }

    let all_pairs: BTreeSet<Pair> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let extended = GroupoidSpine::new(sets, all_pairs, table).expect("same objects and carriers");
    let regular = regularity_unchecked(&extended).is_regular();
    ExtensionResult {
        conservative: added_morphisms.is_empty(),
        extended,
        added_morphisms,
        iterations,
        regular,
    }
}

/// Worklist closure of per-pair graph sets under inversion and composition.
/// Every pair `(i, j)` of the `n` objects must be present in `initial`.
fn close(
    n: usize,
    initial: BTreeMap<Pair, Vec<Vec<usize>>>,
    order: Exploration,
) -> (BTreeMap<Pair, Vec<Vec<usize>>>, usize) {
    let mut maps: BTreeMap<Pair, Vec<Vec<usize>>> = BTreeMap::new();
    let mut seen: BTreeMap<Pair, HashSet<Vec<usize>>> = BTreeMap::new();
    let mut frontier: Vec<(Pair, usize)> = Vec::new();
    for (p, graphs) in initial {
        let entry = maps.entry(p).or_default();
        let set = seen.entry(p).or_default();
        for g in graphs {
            if set.insert(g.clone()) {
                frontier.push((p, entry.len()));
                entry.push(g);
            }
        }
    }

    let mut insert = |maps: &mut BTreeMap<Pair, Vec<Vec<usize>>>, p: Pair, g: Vec<usize>, next: &mut Vec<(Pair, usize)>| {
        let set = seen.get_mut(&p).expect("all pairs present");
        if set.insert(g.clone()) {
            let list = maps.get_mut(&p).expect("all pairs present");
            next.push((p, list.len()));
            list.push(g);
        }
    };

    let mut rng = match order {
        Exploration::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut rounds = 0;
    loop {
        rounds += 1;
        match order {
            Exploration::Fifo => {}
            Exploration::Lifo => frontier.reverse(),
            Exploration::Shuffled(_) => frontier.shuffle(rng.as_mut().expect("seeded")),
        }
        let mut next = Vec::new();
        for ((i, j), idx) in frontier {
            let f = maps[&(i, j)][idx].clone();
            insert(&mut maps, (j, i), invert_images(&f), &mut next);
            for k in 0..n {
                // g ∘ f for g: j -> k
                let mut m = 0;
                while m < maps[&(j, k)].len() {
                    let gf = compose_images(&f, &maps[&(j, k)][m]);
                    insert(&mut maps, (i, k), gf, &mut next);
                    m += 1;
                }
                // f ∘ h for h: k -> i
                let mut m = 0;
                while m < maps[&(k, i)].len() {
                    let fh = compose_images(&maps[&(k, i)][m], &f);
                    insert(&mut maps, (k, j), fh, &mut next);
                    m += 1;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    (maps, rounds)
}
