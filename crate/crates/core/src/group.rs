//! Finite groups, subgroups and element sets.
//!
//! A [`FiniteGroup`] is a cheap, shareable handle over an immutable
//! multiplication structure on the indices `0..order`. Index `0` is always the
//! identity. Two backends exist: an explicit Cayley table, and a permutation
//! group whose elements are enumerated breadth-first from its generators.
//! Either way the group is canonicalized at construction so that element
//! indices (and hence every downstream trace) are deterministic.
//!
//! [`Subgroup`] and [`ElementSet`] carry a handle to their parent group and a
//! membership bitset of length `order`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Index of a group element in its canonical enumeration.
pub type Element = usize;

/// The identity is always element `0` after canonicalization.
pub const IDENTITY: Element = 0;

/// Default cap on the number of elements a permutation group may enumerate.
pub const DEFAULT_ORDER_CAP: usize = 100_000;

/// Groups up to this order get a materialized multiplication table and
/// per-element centralizer bitsets.
const TABLE_LIMIT: usize = 2048;

/// Cayley tables up to this order are checked for associativity exhaustively;
/// larger ones are sampled.
const EXHAUSTIVE_ASSOCIATIVITY: usize = 256;
const SAMPLED_ASSOCIATIVITY: usize = 200_000;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
pub enum Backend {
    Cayley {
        /// `labels[g]` is the row index of canonical element `g` in the
        /// source table.
        labels: Vec<usize>,
    },
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
        perms: Vec<Vec<u32>>,
        lookup: HashMap<Vec<u32>, u32>,
    },
}

struct Inner {
    id: u64,
    order: usize,
    backend: Backend,
    table: Option<Vec<u32>>,
    inverse: Vec<u32>,
    commuting: Option<Vec<FixedBitSet>>,
}

#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.inner.backend {
            Backend::Cayley { .. } => "cayley",
            Backend::Permutation { .. } => "perm",
        };
        f.debug_struct("FiniteGroup")
            .field("id", &self.inner.id)
            .field("order", &self.inner.order)
            .field("backend", &kind)
            .finish()
    }
}

fn compose(g: &[u32], h: &[u32]) -> Vec<u32> {
    // apply g first, then h
    g.iter().map(|&i| h[i as usize]).collect()
}

fn check_permutation(image: &[usize], degree: usize) -> Result<()> {
    if image.len() != degree {
        return Err(Error::Malformed(format!(
            "permutation {image:?} has length {} but degree is {degree}",
            image.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &i in image {
        if i >= degree || seen[i] {
            return Err(Error::Malformed(format!("{image:?} is not a permutation of 0..{degree}")));
        }
        seen[i] = true;
    }
    Ok(())
}

impl FiniteGroup {
    /// Builds a group from a Cayley table over `0..n`. The table is checked to
    /// be a Latin square with a two-sided identity and to be associative
    /// (exhaustively up to order 256, by sampling above). Elements are
    /// relabelled so that the identity is `0`.
    pub fn from_cayley_table(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Malformed("empty Cayley table".into()));
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("row {r} has length {} (expected {n})", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::Malformed(format!("row {r} contains out-of-range entry {bad}")));
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Malformed("table has no two-sided identity".into()))?;
        for i in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for j in 0..n {
                if std::mem::replace(&mut row[table[i][j]], true) {
                    return Err(Error::Malformed(format!("row {i} repeats an entry")));
                }
                if std::mem::replace(&mut col[table[j][i]], true) {
                    return Err(Error::Malformed(format!("column {i} repeats an entry")));
                }
            }
        }
        let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..SAMPLED_ASSOCIATIVITY {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::NotAssociative(a, b, c));
                }
            }
        }

        // swap the identity into slot 0
        let relabel = |g: usize| {
            if g == e {
                0
            } else if g == 0 {
                e
            } else {
                g
            }
        };
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[a * n + b] = relabel(table[relabel(a)][relabel(b)]) as u32;
            }
        }
        let labels = (0..n).map(relabel).collect();
        Ok(Self::finish(n, Backend::Cayley { labels }, Some(flat)))
    }

    /// Builds a permutation group on `0..degree` from generator image arrays.
    /// Elements are enumerated breadth-first from the identity, multiplying
    /// on the right by each generator in order.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>], order_cap: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Malformed("permutation degree must be positive".into()));
        }
        for g in generators {
            check_permutation(g, degree)?;
        }
        let gens: Vec<Vec<u32>> = generators
            .iter()
            .map(|g| g.iter().map(|&i| i as u32).collect())
            .collect();
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut perms = vec![identity.clone()];
        let mut lookup = HashMap::from([(identity, 0u32)]);
        let mut next = 0;
        while next < perms.len() {
            for s in &gens {
                let p = compose(&perms[next], s);
                if !lookup.contains_key(&p) {
                    if perms.len() >= order_cap {
                        return Err(Error::OrderCapExceeded { cap: order_cap });
                    }
                    lookup.insert(p.clone(), perms.len() as u32);
                    perms.push(p);
                }
            }
            next += 1;
        }
        let n = perms.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut flat = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    flat[a * n + b] = lookup[&compose(&perms[a], &perms[b])];
                }
            }
            flat
        });
        let backend = Backend::Permutation {
            degree,
            generators: generators.to_vec(),
            perms,
            lookup,
        };
        Ok(Self::finish(n, backend, table))
    }

    fn finish(order: usize, backend: Backend, table: Option<Vec<u32>>) -> Self {
        let inverse: Vec<u32> = match (&table, &backend) {
            (Some(t), _) => (0..order)
                .map(|g| (0..order).find(|&h| t[g * order + h] == 0).unwrap() as u32)
                .collect(),
            (None, Backend::Permutation { perms, lookup, .. }) => perms
                .iter()
                .map(|p| {
                    let mut inv = vec![0u32; p.len()];
                    for (i, &j) in p.iter().enumerate() {
                        inv[j as usize] = i as u32;
                    }
                    lookup[&inv]
                })
                .collect(),
            (None, Backend::Cayley { .. }) => unreachable!("Cayley groups always carry a table"),
        };
        let commuting = table.as_ref().map(|t| {
            (0..order)
                .map(|g| {
                    let mut bits = FixedBitSet::with_capacity(order);
                    for h in 0..order {
                        if t[g * order + h] == t[h * order + g] {
                            bits.insert(h);
                        }
                    }
                    bits
                })
                .collect()
        });
        FiniteGroup {
            inner: Arc::new(Inner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                order,
                backend,
                table,
                inverse,
                commuting,
            }),
        }
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn identity(&self) -> Element {
        IDENTITY
    }

    pub fn backend(&self) -> &Backend {
        &self.inner.backend
    }

    /// True when both handles refer to the same constructed group.
    pub fn same_as(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn validate(&self, g: usize) -> Result<Element> {
        if g < self.order() {
            Ok(g)
        } else {
            Err(Error::ElementOutOfRange { index: g, order: self.order() })
        }
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order()
    }

    /// Product `g·h`. Panics if either index is out of range; use
    /// [`FiniteGroup::validate`] on untrusted input.
    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        let n = self.inner.order;
        match &self.inner.table {
            Some(t) => t[g * n + h] as usize,
            None => match &self.inner.backend {
                Backend::Permutation { perms, lookup, .. } => lookup[&compose(&perms[g], &perms[h])] as usize,
                Backend::Cayley { .. } => unreachable!(),
            },
        }
    }

    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        self.inner.inverse[g] as usize
    }

    /// `g^h = h⁻¹·g·h`.
    #[inline]
    pub fn conj(&self, g: Element, h: Element) -> Element {
        self.mul(self.mul(self.inv(h), g), h)
    }

    /// `[g, h] = g⁻¹·h⁻¹·g·h`.
    #[inline]
    pub fn comm(&self, g: Element, h: Element) -> Element {
        self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))
    }

    /// Left-normed iterated commutator `[g₁, g₂, …, gₖ]`.
    pub fn comm_n(&self, elems: &[Element]) -> Element {
        let mut it = elems.iter().copied();
        let first = it.next().unwrap_or(IDENTITY);
        it.fold(first, |acc, g| self.comm(acc, g))
    }

    pub fn checked_mul(&self, g: usize, h: usize) -> Result<Element> {
        Ok(self.mul(self.validate(g)?, self.validate(h)?))
    }

    pub fn checked_comm(&self, g: usize, h: usize) -> Result<Element> {
        Ok(self.comm(self.validate(g)?, self.validate(h)?))
    }

    #[inline]
    pub fn commutes(&self, g: Element, h: Element) -> bool {
        match &self.inner.commuting {
            Some(c) => c[g].contains(h),
            None => self.mul(g, h) == self.mul(h, g),
        }
    }

    pub fn pow(&self, g: Element, mut e: u64) -> Element {
        let (mut acc, mut base) = (IDENTITY, g);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, g: Element) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != IDENTITY {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Bitset of all elements commuting with `g`.
    pub fn commuting_set(&self, g: Element) -> FixedBitSet {
        match &self.inner.commuting {
            Some(c) => c[g].clone(),
            None => {
                let mut bits = FixedBitSet::with_capacity(self.order());
                for h in self.elements() {
                    if self.mul(g, h) == self.mul(h, g) {
                        bits.insert(h);
                    }
                }
                bits
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|g| self.elements().all(|h| self.commutes(g, h)))
    }

    /// Image array of `g` for permutation groups.
    pub fn permutation(&self, g: Element) -> Option<Vec<usize>> {
        match &self.inner.backend {
            Backend::Permutation { perms, .. } => Some(perms[g].iter().map(|&i| i as usize).collect()),
            Backend::Cayley { .. } => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match &self.inner.backend {
            Backend::Permutation { degree, .. } => Some(*degree),
            Backend::Cayley { .. } => None,
        }
    }

    /// Looks up the element with the given image array.
    pub fn element_of_permutation(&self, image: &[usize]) -> Result<Element> {
        match &self.inner.backend {
            Backend::Permutation { degree, lookup, .. } => {
                check_permutation(image, *degree)?;
                let key: Vec<u32> = image.iter().map(|&i| i as u32).collect();
                lookup
                    .get(&key)
                    .map(|&g| g as usize)
                    .ok_or_else(|| Error::Malformed(format!("{image:?} is not an element of the group")))
            }
            Backend::Cayley { .. } => Err(Error::Malformed("group is not a permutation group".into())),
        }
    }

    /// Maps a row index of the source Cayley table to its canonical element.
    pub fn element_of_label(&self, label: usize) -> Result<Element> {
        match &self.inner.backend {
            Backend::Cayley { labels } => labels
                .iter()
                .position(|&l| l == label)
                .ok_or(Error::ElementOutOfRange { index: label, order: self.order() }),
            Backend::Permutation { .. } => Err(Error::Malformed("group is not given by a Cayley table".into())),
        }
    }

    /// Canonical multiplication table.
    pub fn cayley_table(&self) -> Vec<Vec<usize>> {
        self.elements()
            .map(|a| self.elements().map(|b| self.mul(a, b)).collect())
            .collect()
    }

    /// Human-readable element: 1-based cycle notation for permutations,
    /// `#i` for table groups.
    pub fn format_element(&self, g: Element) -> String {
        match &self.inner.backend {
            Backend::Cayley { .. } => format!("#{g}"),
            Backend::Permutation { perms, .. } => {
                let p = &perms[g];
                let mut seen = vec![false; p.len()];
                let mut out = String::new();
                for start in 0..p.len() {
                    if seen[start] || p[start] as usize == start {
                        continue;
                    }
                    let mut cycle = vec![start + 1];
                    seen[start] = true;
                    let mut i = p[start] as usize;
                    while i != start {
                        seen[i] = true;
                        cycle.push(i + 1);
                        i = p[i] as usize;
                    }
                    let body: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
                    out.push_str(&format!("({})", body.join(" ")));
                }
                if out.is_empty() {
                    "()".into()
                } else {
                    out
                }
            }
        }
    }

    pub fn empty_bits(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.order())
    }

    pub fn full_bits(&self) -> FixedBitSet {
        let mut b = self.empty_bits();
        b.insert_range(..);
        b
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup {
        let gens = match &self.inner.backend {
            Backend::Permutation { generators, .. } => {
                let mut gs: Vec<Element> = generators
                    .iter()
                    .map(|g| self.element_of_permutation(g).expect("generator is an element"))
                    .filter(|&g| g != IDENTITY)
                    .collect();
                gs.dedup();
                Some(gs)
            }
            Backend::Cayley { .. } => None,
        };
        Subgroup::new(self.clone(), self.full_bits(), gens)
    }

    pub fn trivial(&self) -> Subgroup {
        let mut bits = self.empty_bits();
        bits.insert(IDENTITY);
        Subgroup::new(self.clone(), bits, Some(Vec::new()))
    }

    pub fn element_set<I: IntoIterator<Item = Element>>(&self, elems: I) -> ElementSet {
        let mut bits = self.empty_bits();
        for g in elems {
            bits.insert(g);
        }
        ElementSet { group: self.clone(), members: bits }
    }

    /// Smallest subgroup containing `seed`. The stored generators are the
    /// seed elements that were not already in the closure of the earlier ones
    /// (scanning in index order).
    pub fn closure<I: IntoIterator<Item = Element>>(&self, seed: I) -> Subgroup {
        let mut seed: Vec<Element> = seed.into_iter().collect();
        seed.sort_unstable();
        seed.dedup();
        let mut members = self.empty_bits();
        members.insert(IDENTITY);
        let mut gens = Vec::new();
        for s in seed {
            if !members.contains(s) {
                gens.push(s);
                members = self.close(members, &gens);
            }
        }
        Subgroup::new(self.clone(), members, Some(gens))
    }

    /// Grows the closed set `start` until it is closed under right
    /// multiplication by every element of `gens`.
    pub(crate) fn close(&self, mut members: FixedBitSet, gens: &[Element]) -> FixedBitSet {
        let mut queue: VecDeque<Element> = members.ones().collect();
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !members.contains(y) {
                    members.insert(y);
                    queue.push_back(y);
                }
            }
        }
        members
    }

    /// Interprets `members` as a subgroup, verifying closure. Generators are
    /// picked greedily in index order.
    pub fn subgroup_from_members(&self, members: FixedBitSet) -> Result<Subgroup> {
        if !members.contains(IDENTITY) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        let mut cur = self.empty_bits();
        cur.insert(IDENTITY);
        let mut gens = Vec::new();
        for s in members.ones() {
            if !cur.contains(s) {
                gens.push(s);
                cur = self.close(cur, &gens);
                if !cur.is_subset(&members) {
                    let escaped = cur.difference(&members).next().unwrap();
                    return Err(Error::NotASubgroup(format!(
                        "closure of the set reaches {} outside it",
                        self.format_element(escaped)
                    )));
                }
            }
        }
        Ok(Subgroup::new(self.clone(), members, Some(gens)))
    }

    pub fn center(&self) -> Subgroup {
        self.whole().center()
    }

    /// Normal closure of a single element in the whole group.
    pub fn normal_closure(&self, g: Element) -> Subgroup {
        self.closure(self.elements().map(|h| self.conj(g, h)))
    }

    /// Conjugate subgroup `A^g`.
    pub fn conjugate(&self, a: &Subgroup, g: Element) -> Subgroup {
        let mut bits = self.empty_bits();
        for x in a.iter() {
            bits.insert(self.conj(x, g));
        }
        let gens = a.generators().iter().map(|&x| self.conj(x, g)).collect();
        Subgroup::new(self.clone(), bits, Some(gens))
    }
}

/// A set of elements of a parent group; not necessarily closed.
#[derive(Clone)]
pub struct ElementSet {
    group: FiniteGroup,
    members: FixedBitSet,
}

impl ElementSet {
    pub fn new(group: &FiniteGroup, members: FixedBitSet) -> Self {
        ElementSet { group: group.clone(), members }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, g: Element) -> bool {
        self.members.contains(g)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn closure(&self) -> Subgroup {
        self.group.closure(self.iter())
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.members == other.members
    }
}

impl Eq for ElementSet {}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl From<&Subgroup> for ElementSet {
    fn from(h: &Subgroup) -> Self {
        ElementSet { group: h.group.clone(), members: h.members.clone() }
    }
}

/// A subgroup of a parent group.
#[derive(Clone)]
pub struct Subgroup {
    group: FiniteGroup,
    members: FixedBitSet,
    size: usize,
    generators: OnceLock<Vec<Element>>,
}

impl Subgroup {
    /// `members` must already be closed.
    pub(crate) fn new(group: FiniteGroup, members: FixedBitSet, gens: Option<Vec<Element>>) -> Self {
        let size = members.count_ones(..);
        let generators = OnceLock::new();
        if let Some(g) = gens {
            let _ = generators.set(g);
        }
        Subgroup { group, members, size, generators }
    }

    /// Closed membership bitset without verification; used where closure
    /// follows from construction (intersections, centralizers).
    pub(crate) fn from_closed_bits(group: &FiniteGroup, members: FixedBitSet) -> Self {
        Subgroup::new(group.clone(), members, None)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.size
    }

    pub fn contains(&self, g: Element) -> bool {
        self.members.contains(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    pub fn is_whole(&self) -> bool {
        self.size == self.group.order()
    }

    /// A generating set; computed greedily in index order when the subgroup
    /// was built from a bitset.
    pub fn generators(&self) -> &[Element] {
        self.generators.get_or_init(|| {
            let g = &self.group;
            let mut cur = g.empty_bits();
            cur.insert(IDENTITY);
            let mut gens = Vec::new();
            for s in self.members.ones() {
                if !cur.contains(s) {
                    gens.push(s);
                    cur = g.close(cur, &gens);
                }
            }
            gens
        })
    }

    pub fn same_parent(&self, other: &Subgroup) -> Result<()> {
        if self.group.same_as(&other.group) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_proper_subgroup_of(&self, other: &Subgroup) -> bool {
        self.size < other.size && self.is_subgroup_of(other)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mut bits = self.members.clone();
        bits.intersect_with(&other.members);
        Subgroup::from_closed_bits(&self.group, bits)
    }

    /// `⟨A, B⟩`.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.generators().to_vec();
        let mut members = self.members.clone();
        for &s in other.generators() {
            if !members.contains(s) {
                gens.push(s);
                members = self.group.close(members, &gens);
            }
        }
        Subgroup::new(self.group.clone(), members, Some(gens))
    }

    /// Joins one extra element.
    pub fn adjoin(&self, g: Element) -> Subgroup {
        if self.contains(g) {
            return self.clone();
        }
        let mut gens = self.generators().to_vec();
        gens.push(g);
        let members = self.group.close(self.members.clone(), &gens);
        Subgroup::new(self.group.clone(), members, Some(gens))
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter().all(|&a| gens.iter().all(|&b| self.group.commutes(a, b)))
    }

    pub fn center(&self) -> Subgroup {
        let g = &self.group;
        let mut bits = self.members.clone();
        for &s in self.generators() {
            bits.intersect_with(&g.commuting_set(s));
        }
        Subgroup::from_closed_bits(g, bits)
    }

    /// `[A, B]`: the subgroup generated by all commutators `[a, b]`.
    pub fn commutator_subgroup(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_parent(other)?;
        Ok(self.commutator_with(other))
    }

    pub(crate) fn commutator_with(&self, other: &Subgroup) -> Subgroup {
        let g = &self.group;
        let mut members = g.empty_bits();
        members.insert(IDENTITY);
        let mut gens = Vec::new();
        for a in self.iter() {
            for b in other.iter() {
                let c = g.comm(a, b);
                if !members.contains(c) {
                    gens.push(c);
                    members = g.close(members, &gens);
                }
            }
        }
        Subgroup::new(g.clone(), members, Some(gens))
    }

    /// `N_K(A)` for an ambient subgroup `K`.
    pub fn normalizer_in(&self, ambient: &Subgroup) -> Subgroup {
        let g = &self.group;
        let gens = self.generators();
        let mut bits = g.empty_bits();
        for x in ambient.iter() {
            if gens.iter().all(|&a| self.contains(g.conj(a, x))) {
                bits.insert(x);
            }
        }
        Subgroup::from_closed_bits(g, bits)
    }

    pub fn normalizer(&self) -> Subgroup {
        self.normalizer_in(&self.group.whole())
    }

    /// True when every element of `by` maps this subgroup onto itself.
    pub fn is_normalized_by(&self, by: &Subgroup) -> bool {
        let g = &self.group;
        let gens = self.generators();
        by.generators()
            .iter()
            .all(|&x| gens.iter().all(|&a| self.contains(g.conj(a, x))))
    }

    pub fn is_normal_in(&self, ambient: &Subgroup) -> bool {
        self.is_normalized_by(ambient)
    }

    pub fn is_normal(&self) -> bool {
        self.is_normalized_by(&self.group.whole())
    }

    /// The set `AB`, returned as a subgroup when it is one (`AB = BA`).
    pub fn product_set(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_parent(other)?;
        let g = &self.group;
        let mut ab = g.empty_bits();
        let mut ba = g.empty_bits();
        for a in self.iter() {
            for b in other.iter() {
                ab.insert(g.mul(a, b));
                ba.insert(g.mul(b, a));
            }
        }
        if ab != ba {
            return Err(Error::NotASubgroup("AB differs from BA".into()));
        }
        let mut gens = self.generators().to_vec();
        gens.extend(other.generators().iter().copied().filter(|s| !self.contains(*s)));
        Ok(Subgroup::new(g.clone(), ab, Some(gens)))
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state)
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size <= 32 {
            write!(f, "Subgroup(order {}, {:?})", self.size, self.to_vec())
        } else {
            write!(f, "Subgroup(order {})", self.size)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], DEFAULT_ORDER_CAP).unwrap()
    }

    fn is_three_cycle(g: &FiniteGroup, x: Element) -> bool {
        g.element_order(x) == 3
    }

    #[test]
    fn s3_enumeration_is_bfs_from_generators() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert_eq!(g.permutation(0).unwrap(), vec![0, 1, 2]);
        assert_eq!(g.permutation(1).unwrap(), vec![1, 0, 2]);
        assert_eq!(g.permutation(2).unwrap(), vec![1, 2, 0]);
    }

    #[test]
    fn commutator_of_transposition_and_three_cycle() {
        let g = s3();
        let t = g.element_of_permutation(&[1, 0, 2]).unwrap();
        let c = g.element_of_permutation(&[1, 2, 0]).unwrap();
        let k = g.comm(t, c);
        // direct product of the image arrays
        let inv = |p: &[usize]| {
            let mut q = vec![0; p.len()];
            for (i, &j) in p.iter().enumerate() {
                q[j] = i;
            }
            q
        };
        let then = |p: &[usize], q: &[usize]| p.iter().map(|&i| q[i]).collect::<Vec<_>>();
        let (tp, cp) = (vec![1, 0, 2], vec![1, 2, 0]);
        let expected = then(&then(&then(&inv(&tp), &inv(&cp)), &tp), &cp);
        assert_eq!(g.permutation(k).unwrap(), expected);
        assert!(is_three_cycle(&g, k));
        assert_eq!(g.comm(t, IDENTITY), IDENTITY);
    }

    #[test]
    fn out_of_range_is_malformed_input() {
        let g = s3();
        assert!(matches!(g.checked_mul(0, 6), Err(Error::ElementOutOfRange { index: 6, .. })));
        assert!(g.checked_comm(7, 0).is_err());
    }

    #[test]
    fn conjugating_a_central_element_is_trivial() {
        let g = FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]], 100).unwrap();
        let z = g.center();
        for c in z.iter() {
            for h in g.elements() {
                assert_eq!(g.conj(c, h), c);
            }
        }
    }

    #[test]
    fn closure_examples() {
        let g = s3();
        assert!(g.closure([]).is_trivial());
        let t = g.element_of_permutation(&[1, 0, 2]).unwrap();
        let c = g.element_of_permutation(&[1, 2, 0]).unwrap();
        assert_eq!(g.closure([t]).order(), 2);
        assert!(g.closure([t, c]).is_whole());
    }

    #[test]
    fn commutator_subgroups() {
        let g = s3();
        let whole = g.whole();
        let derived = whole.commutator_subgroup(&whole).unwrap();
        assert_eq!(derived.order(), 3);
        assert!(derived.iter().all(|x| g.pow(x, 3) == IDENTITY));
        assert!(whole.commutator_subgroup(&g.trivial()).unwrap().is_trivial());

        let other = s3();
        assert!(matches!(whole.commutator_subgroup(&other.whole()), Err(Error::ParentMismatch)));
    }

    #[test]
    fn normalizers_and_normal_closures() {
        let g = s3();
        let t = g.element_of_permutation(&[1, 0, 2]).unwrap();
        assert!(g.trivial().normalizer().is_whole());
        let h = g.closure([t]);
        assert_eq!(h.normalizer(), h);
        assert!(g.normal_closure(t).is_whole());
    }

    #[test]
    fn product_sets() {
        let g = s3();
        let t = g.element_of_permutation(&[1, 0, 2]).unwrap();
        let u = g.element_of_permutation(&[0, 2, 1]).unwrap();
        let c = g.element_of_permutation(&[1, 2, 0]).unwrap();
        let a3 = g.closure([c]);
        assert!(g.closure([t]).product_set(&a3).unwrap().is_whole());
        assert!(matches!(g.closure([t]).product_set(&g.closure([u])), Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn cayley_relabels_identity_to_zero() {
        // Z/3 with identity stored at row 2
        let table = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::from_cayley_table(&table).unwrap();
        assert_eq!(g.mul(1, 0), 1);
        assert_eq!(g.element_of_label(2).unwrap(), 0);
        assert_eq!(g.element_of_label(0).unwrap(), 2);
    }

    #[test]
    fn cayley_rejects_non_associative_tables() {
        // a Latin square with identity 0 that is not a group (order 5 loop)
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_cayley_table(&table), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn order_cap_aborts_enumeration() {
        let gens = [vec![1, 0, 2, 3, 4], vec![1, 2, 3, 4, 0]];
        assert!(matches!(
            FiniteGroup::from_permutations(5, &gens, 100),
            Err(Error::OrderCapExceeded { cap: 100 })
        ));
    }

    #[test]
    fn subgroup_from_members_rejects_non_closed_sets() {
        let g = s3();
        let t = g.element_of_permutation(&[1, 0, 2]).unwrap();
        let u = g.element_of_permutation(&[0, 2, 1]).unwrap();
        let bits = g.element_set([0, t, u]).bits().clone();
        assert!(g.subgroup_from_members(bits).is_err());
    }

    #[test]
    fn format_cycles() {
        let g = s3();
        assert_eq!(g.format_element(0), "()");
        assert_eq!(g.format_element(1), "(1 2)");
        assert_eq!(g.format_element(2), "(1 2 3)");
    }
}
