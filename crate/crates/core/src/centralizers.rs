//! Centralizers, the lattice of centralizers, c-dimension and witness sets.
//!
//! Everything here is relative to an ambient subgroup `E` of the parent
//! group: `C_E(A) = { g ∈ E : ga = ag for all a ∈ A }`. The `*_in` variants
//! take the ambient explicitly; the plain variants use the whole group.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::group::{Element, ElementSet, FiniteGroup, Subgroup};

/// Default maximum number of lattice nodes.
pub const DEFAULT_NODE_CAP: usize = 20_000;

/// `C_E(A)` for an arbitrary set of elements `A`.
pub fn centralizer_in<I: IntoIterator<Item = Element>>(ambient: &Subgroup, elems: I) -> Subgroup {
    let g = ambient.group();
    let mut bits = ambient.bits().clone();
    for a in elems {
        bits.intersect_with(&g.commuting_set(a));
    }
    Subgroup::from_closed_bits(g, bits)
}

/// `C_G(A)` in the whole parent group. `centralizer(∅) = G`.
pub fn centralizer(set: &ElementSet) -> Subgroup {
    centralizer_in(&set.group().whole(), set.iter())
}

/// `C_E(H)` for a subgroup; only the generators of `H` need checking.
pub fn centralizer_of_subgroup_in(ambient: &Subgroup, h: &Subgroup) -> Subgroup {
    centralizer_in(ambient, h.generators().iter().copied())
}

/// Scans `elems` in ascending index order and keeps exactly those elements
/// that strictly shrink the running centralizer inside `ambient`. The result
/// has the same centralizer in `ambient` as the whole of `elems`.
pub fn greedy_witness_in<I: IntoIterator<Item = Element>>(ambient: &Subgroup, elems: I) -> Vec<Element> {
    let g = ambient.group();
    let mut sorted: Vec<Element> = elems.into_iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    let mut running = ambient.bits().clone();
    let mut kept = Vec::new();
    for a in sorted {
        let c = g.commuting_set(a);
        if !running.is_subset(&c) {
            running.intersect_with(&c);
            kept.push(a);
        }
    }
    kept
}

/// A subset `A' ⊆ A` with `C_G(A') = C_G(A)`. When `bound` is given (normally
/// `dim(G)`), a larger result is reported as an error; it would indicate a bug.
pub fn greedy_witness(set: &ElementSet, bound: Option<usize>) -> Result<ElementSet> {
    let g = set.group();
    let kept = greedy_witness_in(&g.whole(), set.iter());
    if let Some(bound) = bound {
        if kept.len() > bound {
            return Err(Error::BoundViolated { size: kept.len(), bound });
        }
    }
    Ok(g.element_set(kept))
}

/// The least centralizer of `ambient` containing `h`, i.e. `C_E(C_E(H))`,
/// together with a greedy witness set `A ⊆ C_E(H)` with `C_E(A)` equal to it.
pub fn minimal_centralizer_above_in(ambient: &Subgroup, h: &Subgroup) -> Result<(Subgroup, ElementSet)> {
    let c = centralizer_of_subgroup_in(ambient, h);
    let witness = greedy_witness_in(ambient, c.iter());
    let cc = centralizer_in(ambient, witness.iter().copied());
    if cc != centralizer_of_subgroup_in(ambient, &c) {
        return Err(Error::Invariant("greedy witness does not realize C(C(H))".into()));
    }
    if !h.is_subgroup_of(&cc) {
        return Err(Error::Invariant("H is not contained in C(C(H))".into()));
    }
    Ok((cc, ambient.group().element_set(witness)))
}

pub fn minimal_centralizer_above(h: &Subgroup) -> Result<(Subgroup, ElementSet)> {
    minimal_centralizer_above_in(&h.group().whole(), h)
}

/// The family `{C_E(A) : A ⊆ E}` ordered by inclusion.
#[derive(Debug, Clone)]
pub struct CentralizerLattice {
    ambient: Subgroup,
    nodes: Vec<Subgroup>,
    witnesses: Vec<Vec<Element>>,
    /// `covers[i]` lists the nodes immediately below node `i`.
    covers: Vec<Vec<usize>>,
}

impl CentralizerLattice {
    /// Closes `{C_E(g) : g ∈ E} ∪ {E}` under intersection. Fails once more
    /// than `node_cap` nodes are found.
    pub fn build_in(ambient: &Subgroup, node_cap: usize) -> Result<Self> {
        let g = ambient.group();
        let elems = ambient.to_vec();
        let single: Vec<FixedBitSet> = elems
            .iter()
            .map(|&a| {
                let mut b = g.commuting_set(a);
                b.intersect_with(ambient.bits());
                b
            })
            .collect();

        let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
        let mut bits = vec![ambient.bits().clone()];
        let mut witnesses: Vec<Vec<Element>> = vec![Vec::new()];
        let mut children: Vec<Vec<usize>> = Vec::new();
        index.insert(ambient.bits().clone(), 0);

        let mut next = 0;
        while next < bits.len() {
            let mut kids = Vec::new();
            for (k, c) in single.iter().enumerate() {
                if bits[next].is_subset(c) {
                    continue;
                }
                let mut m = bits[next].clone();
                m.intersect_with(c);
                let id = match index.get(&m) {
                    Some(&id) => id,
                    None => {
                        let id = bits.len();
                        if id >= node_cap {
                            return Err(Error::NodeCapExceeded { cap: node_cap, found: id + 1 });
                        }
                        let mut w = witnesses[next].clone();
                        w.push(elems[k]);
                        index.insert(m.clone(), id);
                        bits.push(m);
                        witnesses.push(w);
                        id
                    }
                };
                kids.push(id);
            }
            kids.sort_unstable();
            kids.dedup();
            children.push(kids);
            next += 1;
        }

        // every cover of N has the form N ∩ C(g); keep the maximal ones
        let covers = children
            .iter()
            .map(|kids| {
                kids.iter()
                    .copied()
                    .filter(|&a| !kids.iter().any(|&b| b != a && bits[a].is_subset(&bits[b])))
                    .collect()
            })
            .collect();
        let nodes = bits.into_iter().map(|b| Subgroup::from_closed_bits(g, b)).collect();
        Ok(CentralizerLattice { ambient: ambient.clone(), nodes, witnesses, covers })
    }

    pub fn build(group: &FiniteGroup, node_cap: usize) -> Result<Self> {
        Self::build_in(&group.whole(), node_cap)
    }

    pub fn ambient(&self) -> &Subgroup {
        &self.ambient
    }

    /// Nodes in discovery order; node 0 is the ambient group.
    pub fn nodes(&self) -> &[Subgroup] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// A set `A` with `C_E(A)` equal to node `i`.
    pub fn witness(&self, i: usize) -> ElementSet {
        self.ambient.group().element_set(self.witnesses[i].iter().copied())
    }

    pub fn covers(&self, i: usize) -> &[usize] {
        &self.covers[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.covers
            .iter()
            .enumerate()
            .flat_map(|(i, cs)| cs.iter().map(move |&j| (i, j)))
    }

    pub fn find(&self, h: &Subgroup) -> Option<usize> {
        self.nodes.iter().position(|n| n == h)
    }

    /// Longest strictly descending chain of centralizers from the top.
    /// The dimension is the number of strict drops, but at least 1, so
    /// abelian and trivial groups have dimension 1.
    pub fn c_dimension(&self) -> ChainReport {
        let n = self.nodes.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.nodes[i].order()));
        let mut dist: Vec<Option<usize>> = vec![None; n];
        let mut pred = vec![usize::MAX; n];
        dist[0] = Some(0);
        for &i in &order {
            let Some(d) = dist[i] else { continue };
            for &j in &self.covers[i] {
                if dist[j].is_none_or(|dj| d + 1 > dj) {
                    dist[j] = Some(d + 1);
                    pred[j] = i;
                }
            }
        }
        let (mut end, drops) = (0..n)
            .filter_map(|i| dist[i].map(|d| (i, d)))
            .max_by_key(|&(i, d)| (d, std::cmp::Reverse(i)))
            .unwrap();
        let mut path = vec![end];
        while end != 0 {
            end = pred[end];
            path.push(end);
        }
        path.reverse();
        let chain: Vec<Subgroup> = path.iter().map(|&i| self.nodes[i].clone()).collect();

        // nested witnesses A_1 ⊆ A_2 ⊆ … with C(A_i) = chain[i]
        let group = self.ambient.group();
        let mut witness_sets = Vec::new();
        let mut acc: Vec<Element> = Vec::new();
        let mut running = self.ambient.bits().clone();
        for node in chain.iter().skip(1) {
            let target = centralizer_of_subgroup_in(&self.ambient, node);
            for a in target.iter() {
                let c = group.commuting_set(a);
                if !running.is_subset(&c) {
                    running.intersect_with(&c);
                    acc.push(a);
                }
            }
            debug_assert_eq!(&running, node.bits());
            witness_sets.push(group.element_set(acc.iter().copied()));
        }
        ChainReport { drops, dimension: drops.max(1), chain, witness_sets }
    }

    /// Graphviz rendering of the cover relation, top to bottom.
    pub fn to_dot(&self) -> String {
        let g = self.ambient.group();
        let mut out = String::from("digraph centralizers {\n    rankdir=TB;\n    node [shape=box];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let w: Vec<String> = self.witnesses[i].iter().map(|&a| g.format_element(a)).collect();
            out.push_str(&format!(
                "    n{i} [label=\"|C| = {}\\nA = {{{}}}\"];\n",
                node.order(),
                w.join(", ")
            ));
        }
        for (i, j) in self.edges() {
            out.push_str(&format!("    n{i} -> n{j};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// True when `node` is contained in every lattice node that contains `h`.
    pub fn is_least_above(&self, h: &Subgroup, node: &Subgroup) -> bool {
        self.nodes
            .iter()
            .filter(|n| h.is_subgroup_of(n))
            .all(|n| node.is_subgroup_of(n))
    }
}

/// A longest chain `E = C(∅) > C(A_1) > … > C(A_d)`.
#[derive(Debug, Clone)]
pub struct ChainReport {
    /// Number of strict drops in the chain.
    pub drops: usize,
    /// c-dimension: `drops`, except that a chain with no drops (abelian
    /// ambient) counts as dimension 1.
    pub dimension: usize,
    pub chain: Vec<Subgroup>,
    /// `witness_sets[i]` realizes `chain[i + 1]`.
    pub witness_sets: Vec<ElementSet>,
}

pub fn c_dimension(lattice: &CentralizerLattice) -> ChainReport {
    lattice.c_dimension()
}

/// `dim(E)` for a subgroup viewed as a group in its own right.
pub fn dimension_in(ambient: &Subgroup, node_cap: usize) -> Result<usize> {
    Ok(CentralizerLattice::build_in(ambient, node_cap)?.c_dimension().dimension)
}

/// Outcome of the three-way split of subgroups relative to the centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BottomChain {
    /// `H ≤ Z(E)`.
    Central,
    /// `H ≤ C_E(A) < E` with `A = C_E(H)` and `Z(E) < C_E(H)`.
    ProperCentralizer { witness: Subgroup, centralizer: Subgroup },
    /// `C_E(H) = Z(E)`; then also `Z(H) = Z(E) ∩ H`.
    CentralizerIsCenter,
}

pub fn bottom_chain_classify_in(ambient: &Subgroup, h: &Subgroup) -> Result<BottomChain> {
    let center = ambient.center();
    if h.is_subgroup_of(&center) {
        return Ok(BottomChain::Central);
    }
    let c = centralizer_of_subgroup_in(ambient, h);
    if center.is_proper_subgroup_of(&c) {
        let cc = centralizer_of_subgroup_in(ambient, &c);
        if !(h.is_subgroup_of(&cc) && cc.is_proper_subgroup_of(ambient)) {
            return Err(Error::Invariant("C(C(H)) is not a proper centralizer above H".into()));
        }
        return Ok(BottomChain::ProperCentralizer { witness: c, centralizer: cc });
    }
    if c != center {
        return Err(Error::Invariant("C(H) is neither above nor equal to the centre".into()));
    }
    if h.center() != center.intersection(h) {
        return Err(Error::Invariant("Z(H) differs from Z(E) ∩ H".into()));
    }
    Ok(BottomChain::CentralizerIsCenter)
}

pub fn bottom_chain_classify(h: &Subgroup) -> Result<BottomChain> {
    bottom_chain_classify_in(&h.group().whole(), h)
}

/// The three alternatives evaluated independently of one another: `H` is
/// central; some proper lattice node contains `H`; `C_E(H) = Z(E)`.
pub fn bottom_chain_predicates(lattice: &CentralizerLattice, h: &Subgroup) -> [bool; 3] {
    let ambient = lattice.ambient();
    let center = ambient.center();
    [
        h.is_subgroup_of(&center),
        lattice
            .nodes()
            .iter()
            .any(|n| n != ambient && h.is_subgroup_of(n)),
        centralizer_of_subgroup_in(ambient, h) == center,
    ]
}
