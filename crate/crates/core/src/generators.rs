//! Spine instances: regular group actions, the affine configuration over a
//! prime field, Latin-square families, and seeded mutations for negative
//! tests.
//!
//! Every sharply transitive family on at most four points is a coset of a
//! regular permutation group (checked exhaustively in the tests), so
//! [`gen_latin_square_family`] with `want_coset = false` reports
//! [`Error::SearchExhausted`] below order 5 and succeeds from order 5 on.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{cyclic, klein};
use crate::error::{Error, Result};
use crate::extension::check_regularity;
use crate::group::{dedupe_family, GroupTable};
use crate::model::{compose_images, invert_images, validate_spine, FiniteMap, FiniteSet, GroupoidSpine, Pair};

/// Smallest order with a sharply transitive family that is not closed under
/// `(f, g, h) ↦ f ∘ g⁻¹ ∘ h`.
pub const MIN_NON_COSET_ORDER: usize = 5;

/// Largest prime accepted by [`gen_affine_config`].
pub const MAX_AFFINE_PRIME: u64 = 97;

const LATIN_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    GroupAction { group: GroupTable, objects: usize },
    AffineConfig { prime: u64 },
    LatinSquare { order: usize, want_coset: bool },
    /// A group-action spine with one seeded mutation.
    Perturbed { group: GroupTable, objects: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
}

pub fn generate(spec: &GeneratorSpec) -> Result<GroupoidSpine> {
    match &spec.kind {
        GeneratorKind::GroupAction { group, objects } => gen_group_action_spine(group, *objects),
        GeneratorKind::AffineConfig { prime } => gen_affine_config(*prime),
        GeneratorKind::LatinSquare { order, want_coset } => {
            latin_square_spine(&gen_latin_square_family(*order, *want_coset, spec.seed)?)
        }
        GeneratorKind::Perturbed { group, objects } => {
            Ok(perturb_spine(&gen_group_action_spine(group, *objects)?, spec.seed).spine)
        }
    }
}

fn object_sets(carrier: &[String], objects: usize) -> Result<Vec<FiniteSet>> {
    (1..=objects)
        .map(|i| FiniteSet::new(i.to_string(), carrier.iter().cloned()))
        .collect()
}

/// Objects `1..=objects`, each carrying a copy of the group, with the left
/// translations `x ↦ h·x` on every increasing pair. A single object gets the
/// pair `(1, 1)` instead.
pub fn gen_group_action_spine(g: &GroupTable, objects: usize) -> Result<GroupoidSpine> {
    if objects == 0 {
        return Err(Error::OutOfRange("object count must be at least 1".into()));
    }
    let sets = object_sets(g.elements(), objects)?;
    let pairs: BTreeSet<Pair> = if objects == 1 {
        BTreeSet::from([(0, 0)])
    } else {
        (0..objects).flat_map(|i| (i + 1..objects).map(move |j| (i, j))).collect()
    };
    let morphisms = pairs
        .iter()
        .map(|&(i, j)| {
            let maps = (0..g.order())
                .map(|h| FiniteMap::from_fn(&sets[i], &sets[j], |x| g.mul(h, x)))
                .collect::<Result<Vec<_>>>()?;
            Ok(((i, j), maps))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    GroupoidSpine::new(sets, pairs, morphisms)
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Three objects over `F_p`: `Mor(1,2) = {x ↦ x+t}`, `Mor(2,3) = {x ↦ x+u}`
/// and `Mor(1,3) = {x ↦ x+t+u}`.
pub fn gen_affine_config(p: u64) -> Result<GroupoidSpine> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_AFFINE_PRIME {
        return Err(Error::OutOfRange(format!("prime {p} exceeds {MAX_AFFINE_PRIME}")));
    }
    let n = p as usize;
    let field: Vec<String> = (0..n).map(|x| x.to_string()).collect();
    let sets = object_sets(&field, 3)?;
    let shift = |a: &FiniteSet, b: &FiniteSet, c: usize| FiniteMap::from_fn(a, b, |x| (x + c) % n);
    let by_t = (0..n).map(|t| shift(&sets[0], &sets[1], t)).collect::<Result<Vec<_>>>()?;
    let by_u = (0..n).map(|u| shift(&sets[1], &sets[2], u)).collect::<Result<Vec<_>>>()?;
    let mut composites = Vec::with_capacity(n * n);
    for f in &by_t {
        for g in &by_u {
            composites.push(f.then(g)?);
        }
    }
    let by_tu = dedupe_family(&composites)?.representatives;
    let morphisms = BTreeMap::from([((0, 1), by_t), ((1, 2), by_u), ((0, 2), by_tu)]);
    GroupoidSpine::new(sets, BTreeSet::from([(0, 1), (1, 2), (0, 2)]), morphisms)
}

/// Whether `f ∘ g⁻¹ ∘ h` stays in the family for all members `f, g, h`.
pub fn closed_under_xy_inv_z(family: &[FiniteMap]) -> bool {
    let members: HashSet<&[usize]> = family.iter().map(FiniteMap::images).collect();
    family.iter().all(|f| {
        family.iter().all(|g| {
            let g_inv = invert_images(g.images());
            family.iter().all(|h| {
                // h, then g⁻¹, then f
                let composite = compose_images(&compose_images(h.images(), &g_inv), f.images());
                members.contains(composite.as_slice())
            })
        })
    })
}

/// Whether each `(x, y)` is hit by exactly one member.
pub fn is_sharply_transitive(family: &[FiniteMap]) -> bool {
    let Some(n) = family.first().map(FiniteMap::len) else {
        return false;
    };
    let mut counts = vec![vec![0usize; n]; n];
    for f in family {
        if f.len() != n {
            return false;
        }
        for (x, &y) in f.images().iter().enumerate() {
            counts[x][y] += 1;
        }
    }
    counts.iter().flatten().all(|&c| c == 1)
}

fn rows_to_family(rows: &[Vec<usize>]) -> Result<Vec<FiniteMap>> {
    rows.iter().map(|r| FiniteMap::new("1", "2", r.clone())).collect()
}

fn group_rows(g: &GroupTable) -> Vec<Vec<usize>> {
    (0..g.order()).map(|r| (0..g.order()).map(|c| g.mul(r, c)).collect()).collect()
}

/// `order` bijections from object `1` to object `2` (both carrying
/// `0..order`) forming the rows of a Latin square.
///
/// With `want_coset` the rows come from a group table (the Klein group at
/// order 4, the cyclic group otherwise). Without it, a seeded search returns
/// a square whose rows are not closed under `f ∘ g⁻¹ ∘ h`.
pub fn gen_latin_square_family(order: usize, want_coset: bool, seed: u64) -> Result<Vec<FiniteMap>> {
    if !(2..=7).contains(&order) {
        return Err(Error::OutOfRange(format!("Latin square order {order} is outside 2..=7")));
    }
    if want_coset {
        let g = if order == 4 { klein() } else { cyclic(order) };
        return rows_to_family(&group_rows(&g));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if order < MIN_NON_COSET_ORDER {
        let candidates: Vec<Vec<Vec<usize>>> = all_latin_squares(order)
            .into_iter()
            .filter(|sq| !closed_under_xy_inv_z(&rows_to_family(sq).expect("rows are permutations")))
            .collect();
        return match candidates.choose(&mut rng) {
            Some(sq) => rows_to_family(sq),
            None => Err(Error::SearchExhausted(format!(
                "every Latin square of order {order} has a row set closed under f∘g⁻¹∘h"
            ))),
        };
    }
    for _ in 0..LATIN_ATTEMPTS {
        let square = random_latin_square(order, &mut rng);
        let family = rows_to_family(&square)?;
        if !closed_under_xy_inv_z(&family) {
            return Ok(family);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no non-coset row set found in {LATIN_ATTEMPTS} random squares of order {order}"
    )))
}

/// Two objects `1` and `2` with the given family as `Mor(1,2)`.
pub fn latin_square_spine(family: &[FiniteMap]) -> Result<GroupoidSpine> {
    let n = family
        .first()
        .map(FiniteMap::len)
        .ok_or_else(|| Error::Structural("empty family".into()))?;
    let sets = vec![FiniteSet::range("1", n)?, FiniteSet::range("2", n)?];
    let maps = family.iter().map(|f| f.relabeled("1", "2")).collect();
    GroupoidSpine::new(sets, BTreeSet::from([(0, 1)]), BTreeMap::from([((0, 1), maps)]))
}

/// Fill the square cell by cell, trying symbols in random order and
/// backtracking on dead ends.
fn random_latin_square(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    fn fill(cell: usize, n: usize, sq: &mut [Vec<usize>], rng: &mut ChaCha8Rng) -> bool {
        if cell == n * n {
            return true;
        }
        let (r, c) = (cell / n, cell % n);
        let mut symbols: Vec<usize> = (0..n).collect();
        symbols.shuffle(rng);
        for s in symbols {
            if (0..c).any(|k| sq[r][k] == s) || (0..r).any(|k| sq[k][c] == s) {
                continue;
            }
            sq[r][c] = s;
            if fill(cell + 1, n, sq, rng) {
                return true;
            }
        }
        sq[r][c] = usize::MAX;
        false
    }
    let mut sq = vec![vec![usize::MAX; n]; n];
    let ok = fill(0, n, &mut sq, rng);
    debug_assert!(ok, "partial Latin squares filled row by row always complete");
    sq
}

/// Every Latin square of order `n`, by exhaustive backtracking.
pub fn all_latin_squares(n: usize) -> Vec<Vec<Vec<usize>>> {
    latin_squares_from(n, 0)
}

/// Every Latin square of order `n` whose first row is `0, 1, ..., n-1`.
///
/// Permuting columns maps the row set `F` to `F ∘ s`, which preserves closure
/// under `f ∘ g⁻¹ ∘ h`; so these squares cover every closure behaviour.
pub fn normalized_latin_squares(n: usize) -> Vec<Vec<Vec<usize>>> {
    latin_squares_from(n, 1)
}

fn latin_squares_from(n: usize, fixed_rows: usize) -> Vec<Vec<Vec<usize>>> {
    fn fill(cell: usize, n: usize, sq: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if cell == n * n {
            out.push(sq.clone());
            return;
        }
        let (r, c) = (cell / n, cell % n);
        for s in 0..n {
            if (0..c).any(|k| sq[r][k] == s) || (0..r).any(|k| sq[k][c] == s) {
                continue;
            }
            sq[r][c] = s;
            fill(cell + 1, n, sq, out);
        }
        sq[r][c] = usize::MAX;
    }
    let mut sq = vec![vec![usize::MAX; n]; n];
    for row in sq.iter_mut().take(fixed_rows) {
        *row = (0..n).collect();
    }
    let mut out = Vec::new();
    fill(fixed_rows * n, n, &mut sq, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutation {
    DropMorphism { pair: Pair, index: usize },
    SwapImages { pair: Pair, index: usize, x: usize, y: usize },
    /// Drop the inverse of `pair[index]` from the reverse pair; on a diagonal
    /// pair this drops the identity.
    RemoveInverse { pair: Pair, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub spine: GroupoidSpine,
    pub mutation: Mutation,
}

const PERTURB_ATTEMPTS: usize = 64;

/// Apply one seeded mutation. For a valid input the result fails
/// [`validate_spine`] or [`check_regularity`].
pub fn perturb_spine(s: &GroupoidSpine, seed: u64) -> Perturbation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..PERTURB_ATTEMPTS {
        let mutation = pick_mutation(s, &mut rng);
        let spine = apply_mutation(s, &mutation);
        let detected = match check_regularity(&spine) {
            Err(_) => true,
            Ok(report) => !report.is_regular(),
        };
        if detected {
            return Perturbation { spine, mutation };
        }
        last = Some(Perturbation { spine, mutation });
    }
    last.expect("at least one attempt")
}

fn pick_mutation(s: &GroupoidSpine, rng: &mut ChaCha8Rng) -> Mutation {
    let listed: Vec<Pair> = s.pairs().iter().copied().filter(|&p| !s.morphisms(p).is_empty()).collect();
    let drop = |rng: &mut ChaCha8Rng| {
        let pair = *listed.choose(rng).expect("a valid spine lists morphisms");
        Mutation::DropMorphism {
            pair,
            index: rng.gen_range(0..s.morphisms(pair).len()),
        }
    };
    match rng.gen_range(0..3) {
        0 => drop(rng),
        1 => {
            let swappable: Vec<Pair> = listed.iter().copied().filter(|&(i, _)| s.set(i).len() >= 2).collect();
            let Some(&pair) = swappable.choose(rng) else {
                return drop(rng);
            };
            let index = rng.gen_range(0..s.morphisms(pair).len());
            let n = s.set(pair.0).len();
            let x = rng.gen_range(0..n);
            let y = (x + rng.gen_range(1..n)) % n;
            Mutation::SwapImages {
                pair,
                index,
                x: x.min(y),
                y: x.max(y),
            }
        }
        _ => {
            let reversible: Vec<Pair> = listed.iter().copied().filter(|&(i, j)| s.has_pair((j, i))).collect();
            let Some(&pair) = reversible.choose(rng) else {
                return drop(rng);
            };
            let index = if pair.0 == pair.1 {
                s.morphisms(pair).iter().position(FiniteMap::is_identity).unwrap_or(0)
            } else {
                rng.gen_range(0..s.morphisms(pair).len())
            };
            Mutation::RemoveInverse { pair, index }
        }
    }
}

fn apply_mutation(s: &GroupoidSpine, mutation: &Mutation) -> GroupoidSpine {
    let (sets, pairs, mut morphisms) = s.clone().into_parts();
    match *mutation {
        Mutation::DropMorphism { pair, index } => {
            morphisms.get_mut(&pair).expect("listed pair").remove(index);
        }
        Mutation::SwapImages { pair, index, x, y } => {
            let f = &morphisms[&pair][index];
            let mut images = f.images().to_vec();
            images.swap(x, y);
            let swapped = FiniteMap::new(f.source(), f.target(), images).expect("still a bijection");
            morphisms.get_mut(&pair).expect("listed pair")[index] = swapped;
        }
        Mutation::RemoveInverse { pair: (i, j), index } => {
            let inverse = invert_images(morphisms[&(i, j)][index].images());
            let reverse = morphisms.get_mut(&(j, i)).expect("reverse pair");
            match reverse.iter().position(|g| g.images() == inverse.as_slice()) {
                Some(pos) => {
                    reverse.remove(pos);
                }
                // Already missing: the input violates axiom 2, drop the map itself.
                None => {
                    morphisms.get_mut(&(i, j)).expect("listed pair").remove(index);
                }
            }
        }
    }
    GroupoidSpine::new(sets, pairs, morphisms).expect("mutations keep carriers intact")
}

/// Whether a spine passes both validation and the regularity check.
pub fn is_valid_and_regular(s: &GroupoidSpine) -> bool {
    validate_spine(s).passed() && check_regularity(s).is_ok_and(|r| r.is_regular())
}
