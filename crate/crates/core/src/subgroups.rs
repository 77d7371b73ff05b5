//! Subgroup enumeration and sampling.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{Element, FiniteGroup, Subgroup};

/// Largest order for which [`all_subgroups`] is intended to be used.
pub const MAX_EXHAUSTIVE_ORDER: usize = 200;

/// Every subgroup of `group`, ordered by size and then by membership.
///
/// Starts from the cyclic subgroups and closes under joins with them; every
/// subgroup is generated by its cyclic subgroups, so the fixpoint is the
/// whole lattice.
pub fn all_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let mut cyclic: Vec<Subgroup> = Vec::new();
    let mut seen: HashSet<Subgroup> = HashSet::new();
    for g in group.elements() {
        let c = group.closure([g]);
        if seen.insert(c.clone()) {
            cyclic.push(c);
        }
    }
    let mut all: Vec<Subgroup> = cyclic.clone();
    let mut frontier = cyclic.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for c in &cyclic {
                if c.is_subgroup_of(h) {
                    continue;
                }
                let j = h.join(c);
                if seen.insert(j.clone()) {
                    next.push(j.clone());
                    all.push(j);
                }
            }
        }
        frontier = next;
    }
    all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.to_vec().cmp(&b.to_vec())));
    all
}

/// Up to `count` distinct subgroups, each the closure of 1 to 3 random
/// elements; the trivial subgroup always comes first. Deterministic in
/// `seed`.
pub fn sample_subgroups(group: &FiniteGroup, count: usize, seed: u64) -> Vec<Subgroup> {
    let mut out = Vec::new();
    if count == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let trivial = group.trivial();
    seen.insert(trivial.clone());
    out.push(trivial);
    let elements: Vec<Element> = group.elements().collect();
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count {
        attempts += 1;
        let k = rng.gen_range(1..=3);
        let seed_elems: Vec<Element> = (0..k).map(|_| *elements.choose(&mut rng).unwrap()).collect();
        let h = group.closure(seed_elems);
        if seen.insert(h.clone()) {
            out.push(h);
        }
    }
    out
}

/// Subgroups to test against: all of them for small groups, a sample
/// otherwise.
pub fn corpus(group: &FiniteGroup, max_exhaustive_order: usize, samples: usize, seed: u64) -> Vec<Subgroup> {
    if group.order() <= max_exhaustive_order {
        all_subgroups(group)
    } else {
        sample_subgroups(group, samples, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    /// Brute force over all subsets of a tiny group.
    fn subsets_that_are_subgroups(g: &FiniteGroup) -> usize {
        let n = g.order();
        (0u32..1 << n)
            .filter(|mask| {
                mask & 1 == 1
                    && (0..n).all(|a| {
                        mask >> a & 1 == 0 || (0..n).all(|b| mask >> b & 1 == 0 || mask >> g.mul(a, b) & 1 == 1)
                    })
            })
            .count()
    }

    #[test]
    fn counts_match_brute_force() {
        for spec in ["symmetric(3)", "dihedral(4)", "quaternion(8)", "product(cyclic(2),cyclic(4))", "cyclic(12)"] {
            let g = catalog::parse_spec(spec).unwrap();
            assert_eq!(all_subgroups(&g).len(), subsets_that_are_subgroups(&g), "{spec}");
        }
    }

    #[test]
    fn known_counts() {
        assert_eq!(all_subgroups(&catalog::symmetric(4).unwrap()).len(), 30);
        assert_eq!(all_subgroups(&catalog::alternating(4).unwrap()).len(), 10);
        assert_eq!(all_subgroups(&catalog::symmetric(5).unwrap()).len(), 156);
    }

    #[test]
    fn sampling() {
        let g = catalog::symmetric(4).unwrap();
        assert!(sample_subgroups(&g, 0, 1).is_empty());
        let a = sample_subgroups(&g, 50, 7);
        let b = sample_subgroups(&g, 50, 7);
        assert_eq!(a, b);
        let gens_a: Vec<Vec<Element>> = a.iter().map(|h| h.generators().to_vec()).collect();
        let gens_b: Vec<Vec<Element>> = b.iter().map(|h| h.generators().to_vec()).collect();
        assert_eq!(gens_a, gens_b);
        assert!(a[0].is_trivial());
        let cyclic = |h: &Subgroup| h.iter().any(|x| g.element_order(x) == h.order());
        assert!(a.iter().any(|h| !h.is_trivial() && cyclic(h)));
        assert!(a.iter().any(|h| !cyclic(h)));
        let distinct: HashSet<_> = a.iter().cloned().collect();
        assert_eq!(distinct.len(), a.len());
    }
}
