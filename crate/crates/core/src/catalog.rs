//! Standard small groups, isomorphism search, and classification.
//!
//! The catalog holds every group of order at most 12, plus these named
//! families up to order 24: cyclic groups, dihedral groups, dicyclic groups,
//! abelian groups, and S4. Groups outside it classify as `unclassified`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::group::GroupTable;

/// Largest order accepted by [`classify_group`].
pub const CLASSIFY_LIMIT: usize = 24;

/// `Z/n` with labels `0..n-1`.
pub fn cyclic(n: usize) -> GroupTable {
    assert!(n >= 1, "cyclic group of order 0");
    let labels = (0..n).map(|i| i.to_string()).collect();
    let product = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    GroupTable::new(labels, product).expect("cyclic group")
}

/// Abelian group `Z/n1 × ... × Z/nk` with labels like `1.0.2`.
pub fn abelian(factors: &[usize]) -> GroupTable {
    assert!(!factors.is_empty() && factors.iter().all(|&n| n >= 1));
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for &n in factors {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let index: BTreeMap<Vec<usize>, usize> = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let product = tuples
        .iter()
        .map(|a| {
            tuples
                .iter()
                .map(|b| {
                    let c: Vec<usize> = a.iter().zip(b).zip(factors).map(|((x, y), n)| (x + y) % n).collect();
                    index[&c]
                })
                .collect()
        })
        .collect();
    let labels = tuples
        .iter()
        .map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("."))
        .collect();
    GroupTable::new(labels, product).expect("abelian group")
}

/// The Klein four-group on `e, a, b, c`.
pub fn klein() -> GroupTable {
    let labels = ["e", "a", "b", "c"].map(String::from).to_vec();
    // Bitwise xor on the positions.
    let product = (0..4).map(|x: usize| (0..4).map(|y: usize| x ^ y).collect()).collect();
    GroupTable::new(labels, product).expect("klein group")
}

/// Dihedral group of order `2n`: rotations `r0..` and reflections `s0..`,
/// where `sk = rᵏs`.
pub fn dihedral(n: usize) -> GroupTable {
    assert!(n >= 1);
    let elem = |refl: bool, k: usize| if refl { n + k } else { k };
    let mut product = vec![vec![0; 2 * n]; 2 * n];
    for (x, row) in product.iter_mut().enumerate() {
        let (xs, a) = (x >= n, x % n);
        for (y, cell) in row.iter_mut().enumerate() {
            let (ys, b) = (y >= n, y % n);
            *cell = match (xs, ys) {
                (false, false) => elem(false, (a + b) % n),
                (false, true) => elem(true, (a + b) % n),
                (true, false) => elem(true, (a + n - b) % n),
                (true, true) => elem(false, (a + n - b) % n),
            };
        }
    }
    let labels = (0..n)
        .map(|k| format!("r{k}"))
        .chain((0..n).map(|k| format!("s{k}")))
        .collect();
    GroupTable::new(labels, product).expect("dihedral group")
}

/// Dicyclic group of order `4n`: `⟨a, x | a²ⁿ = 1, x² = aⁿ, xax⁻¹ = a⁻¹⟩`.
pub fn dicyclic(n: usize) -> GroupTable {
    assert!(n >= 2);
    let m = 2 * n;
    let mut product = vec![vec![0; 2 * m]; 2 * m];
    for (u, row) in product.iter_mut().enumerate() {
        let (ux, p) = (u >= m, u % m);
        for (v, cell) in row.iter_mut().enumerate() {
            let (vx, q) = (v >= m, v % m);
            *cell = match (ux, vx) {
                (false, false) => (p + q) % m,
                (false, true) => m + (p + q) % m,
                (true, false) => m + (p + m - q) % m,
                (true, true) => (p + m - q + n) % m,
            };
        }
    }
    let labels = (0..m)
        .map(|k| format!("a{k}"))
        .chain((0..m).map(|k| format!("a{k}x")))
        .collect();
    GroupTable::new(labels, product).expect("dicyclic group")
}

/// Quaternion group on `1, -1, i, -i, j, -j, k, -k`.
pub fn quaternion() -> GroupTable {
    let labels: Vec<String> = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].map(String::from).to_vec();
    // Unit i,j,k multiplication: (sign, unit) with unit 0=1,1=i,2=j,3=k.
    let unit_mul = |a: usize, b: usize| -> (bool, usize) {
        match (a, b) {
            (0, u) | (u, 0) => (false, u),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let product = (0..8)
        .map(|x: usize| {
            (0..8)
                .map(|y: usize| {
                    let (neg, u) = unit_mul(x / 2, y / 2);
                    let sign = (x % 2) ^ (y % 2) ^ usize::from(neg);
                    2 * u + sign
                })
                .collect()
        })
        .collect();
    GroupTable::new(labels, product).expect("quaternion group")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let free: Vec<usize> = (0..n).filter(|v| !p.contains(v)).collect();
                free.into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn is_even(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn permutation_group(perms: Vec<Vec<usize>>) -> GroupTable {
    let index: BTreeMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    // (στ)(x) = σ(τ(x))
    let product = perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| index[&t.iter().map(|&x| s[x]).collect::<Vec<_>>()])
                .collect()
        })
        .collect();
    let labels = perms
        .iter()
        .map(|p| p.iter().map(|x| x.to_string()).collect::<String>())
        .collect();
    GroupTable::new(labels, product).expect("permutation group")
}

/// Symmetric group on `{0..n-1}` for `1 ≤ n ≤ 4`, labelled in one-line
/// notation (`"102"` swaps 0 and 1).
pub fn symmetric(n: usize) -> Result<GroupTable> {
    if !(1..=4).contains(&n) {
        return Err(Error::OutOfRange(format!("S{n}: only n in 1..=4 is supported")));
    }
    Ok(permutation_group(permutations(n)))
}

pub fn alternating4() -> GroupTable {
    permutation_group(permutations(4).into_iter().filter(|p| is_even(p)).collect())
}

/// Invariant factors `[d1, d2, ...]` with `d_{i+1} | d_i`, largest first.
fn invariant_factor_lists(order: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 1 {
            out.push(acc.clone());
            return;
        }
        for d in (2..=remaining.min(max)).rev() {
            if remaining.is_multiple_of(d) && acc.last().is_none_or(|&last| last.is_multiple_of(d)) {
                acc.push(d);
                rec(remaining / d, d, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(order, order, &mut Vec::new(), &mut out);
    out
}

fn abelian_name(factors: &[usize]) -> String {
    factors.iter().map(|d| format!("C{d}")).collect::<Vec<_>>().join("×")
}

pub struct CatalogEntry {
    pub name: String,
    pub group: GroupTable,
}

/// The fixed catalog, sorted by order.
pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let mut entries = vec![CatalogEntry {
            name: "C1".into(),
            group: cyclic(1),
        }];
        for order in 2..=CLASSIFY_LIMIT {
            for factors in invariant_factor_lists(order) {
                let group = if factors.len() == 1 { cyclic(order) } else { abelian(&factors) };
                entries.push(CatalogEntry {
                    name: abelian_name(&factors),
                    group,
                });
            }
        }
        entries.push(CatalogEntry {
            name: "S3".into(),
            group: symmetric(3).expect("S3"),
        });
        for n in 4..=CLASSIFY_LIMIT / 2 {
            entries.push(CatalogEntry {
                name: format!("D{n}"),
                group: dihedral(n),
            });
        }
        entries.push(CatalogEntry {
            name: "Q8".into(),
            group: quaternion(),
        });
        for n in 3..=CLASSIFY_LIMIT / 4 {
            entries.push(CatalogEntry {
                name: format!("Dic{n}"),
                group: dicyclic(n),
            });
        }
        entries.push(CatalogEntry {
            name: "A4".into(),
            group: alternating4(),
        });
        entries.push(CatalogEntry {
            name: "S4".into(),
            group: symmetric(4).expect("S4"),
        });
        entries.sort_by_key(|e| e.group.order());
        entries
    })
}

/// Catalog entries of order at most `max_order`.
pub fn catalog_up_to(max_order: usize) -> impl Iterator<Item = &'static CatalogEntry> {
    catalog().iter().filter(move |e| e.group.order() <= max_order)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoClass {
    Named(String),
    Unclassified {
        order: usize,
        profile: BTreeMap<usize, usize>,
    },
}

impl IsoClass {
    pub fn name(&self) -> Option<&str> {
        match self {
            IsoClass::Named(n) => Some(n),
            IsoClass::Unclassified { .. } => None,
        }
    }
}

impl fmt::Display for IsoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoClass::Named(n) => f.write_str(n),
            IsoClass::Unclassified { order, profile } => {
                let parts: Vec<String> = profile.iter().map(|(o, c)| format!("{o}:{c}")).collect();
                write!(f, "unclassified(order={order}; element orders {})", parts.join(","))
            }
        }
    }
}

pub fn classify_group(g: &GroupTable) -> Result<IsoClass> {
    if g.order() > CLASSIFY_LIMIT {
        return Err(Error::TooLarge {
            order: g.order(),
            limit: CLASSIFY_LIMIT,
        });
    }
    let profile = g.order_profile();
    for entry in catalog().iter().filter(|e| e.group.order() == g.order()) {
        if entry.group.order_profile() == profile && find_isomorphism(g, &entry.group).is_some() {
            return Ok(IsoClass::Named(entry.name.clone()));
        }
    }
    Ok(IsoClass::Unclassified {
        order: g.order(),
        profile,
    })
}

/// A small generating set: greedily take elements of largest order that are
/// not yet generated.
fn generators(g: &GroupTable) -> Vec<usize> {
    let mut by_order: Vec<usize> = (0..g.order()).collect();
    by_order.sort_by_key(|&a| std::cmp::Reverse(g.element_order(a)));
    let mut gens = Vec::new();
    let mut generated = vec![false; g.order()];
    generated[g.identity()] = true;
    for a in by_order {
        if generated[a] {
            continue;
        }
        gens.push(a);
        generated = subgroup_closure(g, &gens);
    }
    gens
}

fn subgroup_closure(g: &GroupTable, gens: &[usize]) -> Vec<bool> {
    let mut member = vec![false; g.order()];
    member[g.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if !member[y] {
                member[y] = true;
                queue.push_back(y);
            }
        }
    }
    member
}

/// Extend `φ(s_t) = images[t]` to the subgroup generated by `gens`, or fail
/// if no injective homomorphism does that.
fn extend_hom(g: &GroupTable, h: &GroupTable, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut phi = vec![usize::MAX; g.order()];
    let mut used = vec![false; h.order()];
    phi[g.identity()] = h.identity();
    used[h.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&s, &img) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let target = h.mul(phi[x], img);
            if phi[y] == usize::MAX {
                if used[target] {
                    return None;
                }
                phi[y] = target;
                used[target] = true;
                queue.push_back(y);
            } else if phi[y] != target {
                return None;
            }
        }
    }
    Some(phi)
}

/// An isomorphism `g → h` as a position map, found by backtracking over
/// generator images of matching element order.
pub fn find_isomorphism(g: &GroupTable, h: &GroupTable) -> Option<Vec<usize>> {
    if g.order() != h.order() || g.order_profile() != h.order_profile() {
        return None;
    }
    let gens = generators(g);
    let h_orders: Vec<usize> = (0..h.order()).map(|b| h.element_order(b)).collect();
    let mut images = Vec::with_capacity(gens.len());
    backtrack(g, h, &gens, &h_orders, &mut images)
}

fn backtrack(
    g: &GroupTable,
    h: &GroupTable,
    gens: &[usize],
    h_orders: &[usize],
    images: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    let t = images.len();
    if t == gens.len() {
        return extend_hom(g, h, gens, images);
    }
    let want = g.element_order(gens[t]);
    for b in (0..h.order()).filter(|&b| h_orders[b] == want) {
        images.push(b);
        if extend_hom(g, h, &gens[..=t], images).is_some() {
            if let Some(phi) = backtrack(g, h, gens, h_orders, images) {
                return Some(phi);
            }
        }
        images.pop();
    }
    None
}

pub fn is_isomorphic(g: &GroupTable, h: &GroupTable) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Parse a group name: `Zn`/`Cn`, `Sn` (n ≤ 4), `V4`, `Dn`, `Q8`, `A4`.
pub fn named_group(spec: &str) -> Option<Result<GroupTable>> {
    let number = |s: &str| s.parse::<usize>().ok().filter(|&n| n >= 1);
    let group = match spec {
        "V4" => Ok(klein()),
        "Q8" => Ok(quaternion()),
        "A4" => Ok(alternating4()),
        _ => {
            let (head, tail) = spec.split_at(spec.char_indices().nth(1).map_or(spec.len(), |(i, _)| i));
            let n = number(tail)?;
            match head {
                "Z" | "C" => Ok(cyclic(n)),
                "S" => symmetric(n),
                "D" => Ok(dihedral(n)),
                _ => return None,
            }
        }
    };
    Some(group)
}
