//! Coset geometry in a finite power `Gⁿ`.
//!
//! For a non-empty `X ⊆ Gⁿ` the following are equivalent, and
//! [`coset_test`] evaluates each one separately:
//!
//! 1. any two left translates of `X` are equal or disjoint;
//! 2. any two right translates of `X` are equal or disjoint;
//! 3. `X` is a left coset of a subgroup;
//! 4. `X` is a right coset of a subgroup;
//! 5. `X` is closed under `(x, y, z) ↦ x·y⁻¹·z`.
//!
//! The remaining operations apply this to families of sets: equal-or-disjoint
//! partitions, fibers of coordinate projections, and per-member coset checks.
//! Families here are plain finite lists of sets; nothing about them is
//! infinitesimal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::group::GroupTable;

/// A point of `Gⁿ`, one element position per coordinate.
pub type Tuple = Vec<usize>;

/// Sets of tuples, ordered lexicographically by element position.
pub type TupleSet = BTreeSet<Tuple>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbientGroup {
    group: GroupTable,
    power: usize,
}

impl AmbientGroup {
    pub fn new(group: GroupTable, power: usize) -> Result<Self> {
        if power == 0 {
            return Err(Error::OutOfRange("ambient power must be at least 1".into()));
        }
        Ok(AmbientGroup { group, power })
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn size(&self) -> usize {
        self.group.order().pow(self.power as u32)
    }

    pub fn identity(&self) -> Tuple {
        vec![self.group.identity(); self.power]
    }

    pub fn mul(&self, a: &[usize], b: &[usize]) -> Tuple {
        a.iter().zip(b).map(|(&x, &y)| self.group.mul(x, y)).collect()
    }

    pub fn inv(&self, a: &[usize]) -> Tuple {
        a.iter().map(|&x| self.group.inv(x)).collect()
    }

    /// Every tuple of `Gⁿ` in lexicographic order.
    pub fn elements(&self) -> Vec<Tuple> {
        let n = self.group.order();
        let mut out = vec![vec![]];
        for _ in 0..self.power {
            out = out
                .into_iter()
                .flat_map(|t: Tuple| {
                    (0..n).map(move |x| {
                        let mut t = t.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn left_translate(&self, g: &[usize], x: &TupleSet) -> TupleSet {
        x.iter().map(|a| self.mul(g, a)).collect()
    }

    pub fn right_translate(&self, x: &TupleSet, g: &[usize]) -> TupleSet {
        x.iter().map(|a| self.mul(a, g)).collect()
    }

    /// Parse one tuple from labels.
    pub fn tuple(&self, labels: &[&str]) -> Result<Tuple> {
        if labels.len() != self.power {
            return Err(Error::OutOfRange(format!(
                "tuple has {} coordinates, ambient power is {}",
                labels.len(),
                self.power
            )));
        }
        labels.iter().map(|l| self.group.require(l)).collect()
    }

    pub fn format_tuple(&self, t: &[usize]) -> String {
        let parts: Vec<&str> = t.iter().map(|&x| self.group.label(x)).collect();
        if parts.len() == 1 {
            parts[0].to_string()
        } else {
            format!("({})", parts.join(","))
        }
    }

    pub fn format_set(&self, x: &TupleSet) -> String {
        let parts: Vec<String> = x.iter().map(|t| self.format_tuple(t)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn check_member(&self, t: &[usize]) -> Result<()> {
        if t.len() != self.power || t.iter().any(|&x| x >= self.group.order()) {
            return Err(Error::BadTuple(t.to_vec()));
        }
        Ok(())
    }

    fn is_subgroup(&self, h: &TupleSet) -> bool {
        h.contains(&self.identity())
            && h.iter().all(|a| h.contains(&self.inv(a)))
            && h.iter().all(|a| h.iter().all(|b| h.contains(&self.mul(a, b))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosetVerdicts {
    pub left_translates_partition: bool,
    pub right_translates_partition: bool,
    pub left_coset: bool,
    pub right_coset: bool,
    pub xyz_closure: bool,
}

impl CosetVerdicts {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.left_translates_partition,
            self.right_translates_partition,
            self.left_coset,
            self.right_coset,
            self.xyz_closure,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let v = self.as_array();
        v.iter().all(|&b| b == v[0])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetReport {
    pub verdicts: CosetVerdicts,
    /// `H = a⁻¹·X` when `X` is a left coset.
    pub subgroup: Option<TupleSet>,
    /// The least element `a` of `X`, with `X = a·H`, when `X` is a left coset.
    pub translator: Option<Tuple>,
}

impl CosetReport {
    pub fn is_coset(&self) -> bool {
        self.verdicts.left_coset
    }
}

/// Evaluate the five coset conditions independently by brute force.
pub fn coset_test(amb: &AmbientGroup, x: &TupleSet) -> Result<CosetReport> {
    let report = coset_verdicts(amb, x)?;
    if !report.verdicts.all_agree() {
        return Err(Error::TheoremViolation(format!(
            "coset conditions disagree on {}: {:?}",
            amb.format_set(x),
            report.verdicts
        )));
    }
    Ok(report)
}

fn coset_verdicts(amb: &AmbientGroup, x: &TupleSet) -> Result<CosetReport> {
    let Some(a) = x.first().cloned() else {
        return Err(Error::EmptySet);
    };
    for t in x {
        amb.check_member(t)?;
    }
    let everything = amb.elements();

    // gX and hX are equal or disjoint iff X and (g⁻¹h)X are.
    let left_translates_partition = everything.iter().all(|u| {
        let ux = amb.left_translate(u, x);
        ux == *x || ux.is_disjoint(x)
    });
    let right_translates_partition = everything.iter().all(|u| {
        let xu = amb.right_translate(x, u);
        xu == *x || xu.is_disjoint(x)
    });

    // A coset contains each of its elements, so a⁻¹X (resp. Xa⁻¹) must be
    // the subgroup for the least a.
    let a_inv = amb.inv(&a);
    let left_candidate = amb.left_translate(&a_inv, x);
    let left_coset = amb.is_subgroup(&left_candidate);
    let right_coset = amb.is_subgroup(&amb.right_translate(x, &a_inv));

    let xyz_closure = x.iter().all(|p| {
        x.iter().all(|q| {
            let pq = amb.mul(p, &amb.inv(q));
            x.iter().all(|r| x.contains(&amb.mul(&pq, r)))
        })
    });

    let verdicts = CosetVerdicts {
        left_translates_partition,
        right_translates_partition,
        left_coset,
        right_coset,
        xyz_closure,
    };
    Ok(CosetReport {
        verdicts,
        subgroup: left_coset.then_some(left_candidate),
        translator: left_coset.then_some(a),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    pub pass: bool,
    /// Two member indices that overlap without being equal, and a common
    /// element.
    pub witness: Option<(usize, usize, Tuple)>,
}

/// Whether every two members of `family` are equal or disjoint.
pub fn partition_check(family: &[TupleSet]) -> PartitionReport {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i + 1) {
            if a == b {
                continue;
            }
            if let Some(common) = a.intersection(b).next() {
                return PartitionReport {
                    pass: false,
                    witness: Some((i, j, common.clone())),
                };
            }
        }
    }
    PartitionReport {
        pass: true,
        witness: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    /// Non-empty fibers keyed by their projected value.
    pub fibers: BTreeMap<Tuple, TupleSet>,
    /// Whether every fiber is a left coset of one common subgroup.
    pub common: bool,
    /// The common subgroup of `Gⁿ` (fibers are kept as subsets of `Gⁿ`).
    pub subgroup: Option<TupleSet>,
    /// The common subgroup restricted to the coordinates not projected on.
    pub free_part: Option<TupleSet>,
}

/// Project the coset `x` onto the coordinates `proj` and analyse its fibers.
pub fn fiber_coset_structure(amb: &AmbientGroup, x: &TupleSet, proj: &[usize]) -> Result<FiberReport> {
    if proj.iter().any(|&c| c >= amb.power()) {
        return Err(Error::OutOfRange(format!("projection {proj:?} exceeds power {}", amb.power())));
    }
    if !coset_test(amb, x)?.is_coset() {
        return Err(Error::NotACoset);
    }
    let mut fibers: BTreeMap<Tuple, TupleSet> = BTreeMap::new();
    for t in x {
        let key: Tuple = proj.iter().map(|&c| t[c]).collect();
        fibers.entry(key).or_default().insert(t.clone());
    }
    let mut subgroups = BTreeSet::new();
    let mut all_cosets = true;
    for fiber in fibers.values() {
        let report = coset_test(amb, fiber)?;
        match report.subgroup {
            Some(h) => {
                subgroups.insert(h);
            }
            None => all_cosets = false,
        }
    }
    let common = all_cosets && subgroups.len() == 1;
    let subgroup = if common { subgroups.into_iter().next() } else { None };
    let free: Vec<usize> = (0..amb.power()).filter(|c| !proj.contains(c)).collect();
    let free_part = subgroup
        .as_ref()
        .map(|h| h.iter().map(|t| free.iter().map(|&c| t[c]).collect()).collect());
    Ok(FiberReport {
        fibers,
        common,
        subgroup,
        free_part,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberVerdict {
    pub coset: bool,
    pub subgroup: Option<TupleSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearityReport {
    pub members: Vec<MemberVerdict>,
    /// Every member is a left coset.
    pub pass: bool,
    /// Members with the same subgroup are left translates of each other.
    pub shared_subgroups_are_translates: bool,
    /// The subgroup, when all members are cosets of the same one.
    pub common_subgroup: Option<TupleSet>,
}

pub fn family_local_linearity(amb: &AmbientGroup, family: &[TupleSet]) -> Result<LinearityReport> {
    if family.is_empty() {
        return Err(Error::EmptySet);
    }
    let members = family
        .iter()
        .map(|x| {
            let r = coset_test(amb, x)?;
            Ok(MemberVerdict {
                coset: r.is_coset(),
                subgroup: r.subgroup,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = members.iter().all(|m| m.coset);

    let mut by_subgroup: BTreeMap<&TupleSet, Vec<usize>> = BTreeMap::new();
    for (i, m) in members.iter().enumerate() {
        if let Some(h) = &m.subgroup {
            by_subgroup.entry(h).or_default().push(i);
        }
    }
    let everything = amb.elements();
    let shared_subgroups_are_translates = by_subgroup.values().all(|idx| {
        idx.windows(2).all(|w| {
            let (a, b) = (&family[w[0]], &family[w[1]]);
            everything.iter().any(|g| amb.left_translate(g, a) == *b)
        })
    });
    let common_subgroup = if pass && by_subgroup.len() == 1 {
        by_subgroup.keys().next().map(|h| (*h).clone())
    } else {
        None
    };
    Ok(LinearityReport {
        members,
        pass,
        shared_subgroups_are_translates,
        common_subgroup,
    })
}

impl fmt::Display for CosetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.verdicts;
        writeln!(f, "left-translates-partition: {}", v.left_translates_partition)?;
        writeln!(f, "right-translates-partition: {}", v.right_translates_partition)?;
        writeln!(f, "left-coset: {}", v.left_coset)?;
        writeln!(f, "right-coset: {}", v.right_coset)?;
        writeln!(f, "xyz-closure: {}", v.xyz_closure)
    }
}
