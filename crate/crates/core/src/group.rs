//! Finite groups as Cayley tables, regular actions, and the passage from an
//! extended groupoid to the automorphism group of one of its objects.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::extension::ExtensionResult;
use crate::model::{compose_images, FiniteMap, FiniteSet};

/// A finite group over labelled elements.
///
/// Elements are addressed by position; `product[a][b]` is the position of
/// `a·b`. Construction checks every group axiom exhaustively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    elements: Vec<String>,
    identity: usize,
    product: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl GroupTable {
    pub fn new(elements: Vec<String>, product: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::NotAGroup("no elements".into()));
        }
        let mut seen = HashSet::new();
        for e in &elements {
            if !seen.insert(e.as_str()) {
                return Err(Error::NotAGroup(format!("duplicate element `{e}`")));
            }
        }
        if product.len() != n || product.iter().any(|row| row.len() != n) {
            return Err(Error::NotAGroup(format!("product table is not {n}x{n}")));
        }
        if product.iter().flatten().any(|&c| c >= n) {
            return Err(Error::NotAGroup("product table leaves the element set".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if product[product[a][b]][c] != product[a][product[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "({0}{1}){2} != {0}({1}{2})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| product[e][x] == x && product[x][e] == x))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| product[x][y] == identity && product[y][x] == identity)
                .ok_or_else(|| Error::NotAGroup(format!("`{}` has no inverse", elements[x])))?;
            inverse.push(y);
        }
        Ok(GroupTable {
            elements,
            identity,
            product,
            inverse,
        })
    }

    /// Build from a product given on labels. Rows and columns follow `elements`.
    pub fn from_labels(elements: Vec<String>, rows: &[Vec<String>]) -> Result<Self> {
        let index: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
        let product = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        index
                            .get(c.as_str())
                            .copied()
                            .ok_or_else(|| Error::UnknownElement(c.clone()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements, product)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn label(&self, a: usize) -> &str {
        &self.elements[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    pub(crate) fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn identity_label(&self) -> &str {
        &self.elements[self.identity]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.product[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn product_table(&self) -> &[Vec<usize>] {
        &self.product
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.product[x][a];
            k += 1;
        }
        k
    }

    /// Element order → number of elements of that order.
    pub fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut profile = BTreeMap::new();
        for a in 0..self.order() {
            *profile.entry(self.element_order(a)).or_insert(0) += 1;
        }
        profile
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.product[a][b] == self.product[b][a]))
    }

    /// Element positions with the identity first, the rest in table order.
    pub fn display_order(&self) -> Vec<usize> {
        std::iter::once(self.identity)
            .chain((0..self.order()).filter(|&a| a != self.identity))
            .collect()
    }

    /// Row-major Cayley grid with a header row and column, identity first.
    pub fn cayley_grid(&self) -> String {
        let order = self.display_order();
        let width = self.elements.iter().map(|e| e.chars().count()).max().unwrap_or(1).max(1);
        let mut out = String::new();
        let _ = write!(out, "{:>width$} |", "·");
        for &b in &order {
            let _ = write!(out, " {:>width$}", self.elements[b]);
        }
        out.push('\n');
        out.push_str(&"-".repeat(width + 2 + (width + 1) * order.len()));
        out.push('\n');
        for &a in &order {
            let _ = write!(out, "{:>width$} |", self.elements[a]);
            for &b in &order {
                let _ = write!(out, " {:>width$}", self.elements[self.product[a][b]]);
            }
            out.push('\n');
        }
        out
    }
}

/// A group acting on a finite carrier; construction checks that the action
/// is a regular group action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    group: GroupTable,
    carrier: FiniteSet,
    act: Vec<Vec<usize>>,
}

impl GroupAction {
    /// `act[g][x]` is the position of `g·x` in the carrier.
    pub fn new(group: GroupTable, carrier: FiniteSet, act: Vec<Vec<usize>>) -> Result<Self> {
        let n = carrier.len();
        if act.len() != group.order() || act.iter().any(|row| row.len() != n || row.iter().any(|&y| y >= n)) {
            return Err(Error::InvalidAction("action table has the wrong shape".into()));
        }
        let e = group.identity();
        if let Some(x) = (0..n).find(|&x| act[e][x] != x) {
            return Err(Error::InvalidAction(format!("identity moves `{}`", carrier.label(x))));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                for x in 0..n {
                    if act[group.mul(g, h)][x] != act[g][act[h][x]] {
                        return Err(Error::InvalidAction(format!(
                            "({}·{})x != {}({}x) at x = {}",
                            group.label(g),
                            group.label(h),
                            group.label(g),
                            group.label(h),
                            carrier.label(x)
                        )));
                    }
                }
            }
        }
        for x in 0..n {
            let mut hits = vec![0usize; n];
            for row in &act {
                hits[row[x]] += 1;
            }
            if let Some(y) = hits.iter().position(|&c| c != 1) {
                return Err(Error::InvalidAction(format!(
                    "{} group elements send `{}` to `{}`",
                    hits[y],
                    carrier.label(x),
                    carrier.label(y)
                )));
            }
        }
        Ok(GroupAction { group, carrier, act })
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn carrier(&self) -> &FiniteSet {
        &self.carrier
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.act[g][x]
    }
}

/// Representatives of a map family up to graph equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupedFamily {
    /// One map per distinct graph, in first-occurrence order.
    pub representatives: Vec<FiniteMap>,
    /// Input index → representative index.
    pub class_of: Vec<usize>,
}

pub fn dedupe_family(maps: &[FiniteMap]) -> Result<DedupedFamily> {
    let mut representatives: Vec<FiniteMap> = Vec::new();
    let mut class_of = Vec::with_capacity(maps.len());
    let mut index: HashMap<&[usize], usize> = HashMap::new();
    for (i, f) in maps.iter().enumerate() {
        let first = &maps[0];
        if f.source() != first.source() || f.target() != first.target() || f.len() != first.len() {
            return Err(Error::MixedSignature {
                index: i,
                expected: format!("{}->{}", first.source(), first.target()),
                found: format!("{}->{}", f.source(), f.target()),
            });
        }
        let class = *index.entry(f.images()).or_insert_with(|| {
            representatives.push(f.clone());
            representatives.len() - 1
        });
        class_of.push(class);
    }
    Ok(DedupedFamily {
        representatives,
        class_of,
    })
}

/// The automorphism group of `object` in an extended groupoid, with its
/// action on the carrier.
///
/// Elements are labelled by canonical graph keys, identity first and the rest
/// in key order. The product is composition: `g·h = g ∘ h`.
pub fn extract_group(ext: &ExtensionResult, object: &str) -> Result<GroupAction> {
    let spine = &ext.extended;
    let o = spine
        .object_index(object)
        .ok_or_else(|| Error::UnknownObject(object.to_string()))?;
    let carrier = spine.set(o).clone();
    let family = dedupe_family(spine.morphisms((o, o)))?;
    if family.representatives.is_empty() {
        return Err(Error::NotAGroup(format!("no morphisms on {object}|{object}")));
    }
    let mut keyed: Vec<(String, &FiniteMap)> = family
        .representatives
        .iter()
        .map(|f| (f.graph_key(&carrier, &carrier), f))
        .collect();
    keyed.sort_by(|(ka, fa), (kb, fb)| fb.is_identity().cmp(&fa.is_identity()).then_with(|| ka.cmp(kb)));

    let position: HashMap<&[usize], usize> = keyed.iter().enumerate().map(|(i, (_, f))| (f.images(), i)).collect();
    let mut product = Vec::with_capacity(keyed.len());
    for (_, g) in &keyed {
        let mut row = Vec::with_capacity(keyed.len());
        for (_, h) in &keyed {
            let gh = compose_images(h.images(), g.images());
            let c = position.get(gh.as_slice()).ok_or_else(|| {
                Error::NotAGroup(format!("{object}|{object} is not closed under composition"))
            })?;
            row.push(*c);
        }
        product.push(row);
    }
    let act = keyed.iter().map(|(_, f)| f.images().to_vec()).collect();
    let labels = keyed.iter().map(|(k, _)| k.clone()).collect();
    let group = GroupTable::new(labels, product)?;
    GroupAction::new(group, carrier, act)
}

/// Transport the group onto its carrier along `g ↦ g·e`; `e` becomes the
/// identity. Elements keep the carrier order.
pub fn group_on_fiber(ga: &GroupAction, e: &str) -> Result<GroupTable> {
    let carrier = ga.carrier();
    let base = carrier.position(e).ok_or_else(|| Error::UnknownElement(e.to_string()))?;
    let n = carrier.len();
    let mut element_at = vec![usize::MAX; n];
    for g in 0..ga.group().order() {
        element_at[ga.act(g, base)] = g;
    }
    let product = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| ga.act(ga.group().mul(element_at[x], element_at[y]), base))
                .collect()
        })
        .collect();
    GroupTable::new(carrier.elements().to_vec(), product)
}

/// The group on the same elements with product `x·d⁻¹·y`, whose identity is
/// `d` and whose inverse is `x ↦ d·x⁻¹·d`.
pub fn relabel_group(g: &GroupTable, d: &str) -> Result<GroupTable> {
    let d = g.require(d)?;
    let d_inv = g.inv(d);
    let n = g.order();
    let product = (0..n)
        .map(|x| (0..n).map(|y| g.mul(g.mul(x, d_inv), y)).collect())
        .collect();
    GroupTable::new(g.elements().to_vec(), product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic, symmetric};

    fn shift(set: &FiniteSet, n: usize, c: usize) -> FiniteMap {
        FiniteMap::from_fn(set, set, |x| (x + c) % n).unwrap()
    }

    #[test]
    fn group_table_rejects_non_groups() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(GroupTable::new(labels.clone(), vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(GroupTable::new(labels.clone(), vec![vec![0, 1]]).is_err());
        assert!(GroupTable::new(labels, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn dedupe_distinct_maps_keeps_all() {
        let s = FiniteSet::range("X", 3).unwrap();
        let maps: Vec<_> = (0..3).map(|c| shift(&s, 3, c)).collect();
        let d = dedupe_family(&maps).unwrap();
        assert_eq!(d.representatives, maps);
        assert_eq!(d.class_of, vec![0, 1, 2]);
    }

    #[test]
    fn dedupe_even_translations_mod4() {
        let s = FiniteSet::range("X", 4).unwrap();
        let maps: Vec<_> = (0..4).map(|t| shift(&s, 4, (2 * t) % 4)).collect();
        let d = dedupe_family(&maps).unwrap();
        assert_eq!(d.representatives, vec![shift(&s, 4, 0), shift(&s, 4, 2)]);
        assert_eq!(d.class_of, vec![0, 1, 0, 1]);
    }

    #[test]
    fn dedupe_doubled_list_halves() {
        let s = FiniteSet::range("X", 5).unwrap();
        let maps: Vec<_> = (0..5).map(|c| shift(&s, 5, c)).collect();
        let doubled: Vec<_> = maps.iter().chain(maps.iter()).cloned().collect();
        assert_eq!(dedupe_family(&doubled).unwrap().representatives.len(), 5);
    }

    #[test]
    fn dedupe_rejects_mixed_signature() {
        let a = FiniteSet::range("A", 2).unwrap();
        let b = FiniteSet::range("B", 2).unwrap();
        let maps = vec![FiniteMap::identity(&a), FiniteMap::identity(&b)];
        assert!(matches!(dedupe_family(&maps), Err(Error::MixedSignature { index: 1, .. })));
    }

    #[test]
    fn relabel_at_identity_is_unchanged() {
        let g = symmetric(3).unwrap();
        assert_eq!(relabel_group(&g, g.identity_label()).unwrap(), g);
    }

    #[test]
    fn relabel_z6_at_two() {
        let g = cyclic(6);
        let r = relabel_group(&g, "2").unwrap();
        assert_eq!(r.identity_label(), "2");
        let p = r.mul(r.index_of("1").unwrap(), r.index_of("3").unwrap());
        assert_eq!(r.label(p), "2");
        // inverse x ↦ d x⁻¹ d = 4 - x
        for x in 0..6 {
            assert_eq!(r.inv(x), (4 + 6 - x) % 6);
        }
    }

    #[test]
    fn relabel_unknown_element() {
        assert!(matches!(relabel_group(&cyclic(3), "7"), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn action_rejects_non_regular_and_incompatible() {
        let g = cyclic(2);
        let carrier = FiniteSet::range("X", 2).unwrap();
        assert!(GroupAction::new(g.clone(), carrier.clone(), vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(GroupAction::new(g.clone(), carrier.clone(), vec![vec![1, 0], vec![0, 1]]).is_err());
        assert!(GroupAction::new(g, carrier, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn cayley_grid_puts_identity_first() {
        let g = relabel_group(&cyclic(3), "1").unwrap();
        let grid = g.cayley_grid();
        let header = grid.lines().next().unwrap();
        assert_eq!(header, "· | 1 0 2");
        assert_eq!(grid.lines().nth(2).unwrap(), "1 | 1 0 2");
    }
}
