//! Central series, iterated centralizers, and checkers for the commutator
//! lemmas they satisfy.

use crate::error::{Error, Result};
use crate::group::{Element, Subgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub struct CentralSeries {
    pub kind: SeriesKind,
    /// Lower: `γ_1 = P ≥ γ_2 ≥ …`. Upper: `Z_0 = 1 ≤ Z_1 ≤ …`.
    /// Computed until two consecutive terms agree (the repeat is dropped).
    pub terms: Vec<Subgroup>,
    /// Nilpotence class when the series reaches `1` (lower) or `P` (upper).
    pub class: Option<usize>,
}

/// `γ_1(P) = P`, `γ_{i+1}(P) = [γ_i(P), P]`.
pub fn lower_central_series(p: &Subgroup) -> CentralSeries {
    let mut terms = vec![p.clone()];
    while terms.len() <= p.group().order() {
        let next = terms.last().unwrap().commutator_with(p);
        if &next == terms.last().unwrap() {
            break;
        }
        terms.push(next);
    }
    let class = terms.last().unwrap().is_trivial().then(|| terms.len() - 1);
    CentralSeries { kind: SeriesKind::Lower, terms, class }
}

/// `Z_0(P) = 1`, `Z_{i+1}(P) = { g ∈ P : [g, P] ⊆ Z_i(P) }`.
pub fn upper_central_series(p: &Subgroup) -> CentralSeries {
    let g = p.group();
    let gens = p.generators().to_vec();
    let mut terms = vec![g.trivial()];
    while terms.len() <= g.order() {
        let last = terms.last().unwrap();
        let mut bits = g.empty_bits();
        for x in p.iter() {
            // Z_i is normal in P, so testing the generators of P suffices
            if gens.iter().all(|&s| last.contains(g.comm(x, s))) {
                bits.insert(x);
            }
        }
        if &bits == last.bits() {
            break;
        }
        terms.push(Subgroup::from_closed_bits(g, bits));
    }
    let class = (terms.last().unwrap() == p).then(|| terms.len() - 1);
    CentralSeries { kind: SeriesKind::Upper, terms, class }
}

/// Nilpotence class; cross-checked between the two series.
pub fn nilpotence_class(p: &Subgroup) -> Result<usize> {
    let lower = lower_central_series(p).class;
    let upper = upper_central_series(p).class;
    match (lower, upper) {
        (Some(a), Some(b)) if a == b => Ok(a),
        (None, None) => Err(Error::NotNilpotent),
        _ => Err(Error::Invariant(format!(
            "lower and upper central series disagree on the class ({lower:?} vs {upper:?})"
        ))),
    }
}

pub fn is_nilpotent(p: &Subgroup) -> bool {
    lower_central_series(p).class.is_some()
}

/// `γ_i(P)` (with `γ_i` the stable term once the series has stopped).
pub fn gamma(p: &Subgroup, i: usize) -> Subgroup {
    assert!(i >= 1, "the lower central series starts at γ_1");
    let s = lower_central_series(p);
    s.terms.get(i - 1).unwrap_or_else(|| s.terms.last().unwrap()).clone()
}

/// `Z_j(P)`.
pub fn upper_term(p: &Subgroup, j: usize) -> Subgroup {
    let s = upper_central_series(p);
    s.terms.get(j).unwrap_or_else(|| s.terms.last().unwrap()).clone()
}

/// The iterated centralizers `C_G^0(P) ⊆ C_G^1(P) ⊆ …` of `P` in an ambient
/// subgroup `G`.
#[derive(Debug, Clone)]
pub struct IteratedCentralizerTower {
    pub ambient: Subgroup,
    pub base: Subgroup,
    pub terms: Vec<Subgroup>,
    /// `⋂_{k < terms.len()} N_G(C_G^k(P))`.
    normalizers: Subgroup,
}

impl IteratedCentralizerTower {
    pub fn new(ambient: &Subgroup, base: &Subgroup) -> Result<Self> {
        ambient.same_parent(base)?;
        if !base.is_subgroup_of(ambient) {
            return Err(Error::HypothesisViolated("P must be a subgroup of the ambient group".into()));
        }
        let g = ambient.group();
        Ok(IteratedCentralizerTower {
            ambient: ambient.clone(),
            base: base.clone(),
            terms: vec![g.trivial()],
            normalizers: ambient.clone(),
        })
    }

    /// Computes levels up to `n`, straight from the definition: level `m` is
    /// the set of `x` in the intersection of the normalizers of the lower
    /// terms with `[x, p] ∈ C^{m-1}` for every `p ∈ P`. Each level is checked
    /// to be a subgroup.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        let g = self.ambient.group().clone();
        let base: Vec<Element> = self.base.to_vec();
        while self.terms.len() <= n {
            let prev = self.terms.last().unwrap().clone();
            let norm = prev.normalizer_in(&self.normalizers);
            let mut bits = g.empty_bits();
            for x in norm.iter() {
                if base.iter().all(|&p| prev.contains(g.comm(x, p))) {
                    bits.insert(x);
                }
            }
            let level = self.terms.len();
            let term = g.subgroup_from_members(bits).map_err(|e| {
                Error::Invariant(format!("iterated centralizer at level {level} is not a subgroup: {e}"))
            })?;
            self.normalizers = norm;
            self.terms.push(term);
        }
        Ok(())
    }

    pub fn level(&self, j: usize) -> &Subgroup {
        &self.terms[j]
    }

    pub fn height(&self) -> usize {
        self.terms.len() - 1
    }
}

/// `C_G^0(P), …, C_G^n(P)`.
pub fn iterated_centralizer(ambient: &Subgroup, p: &Subgroup, n: usize) -> Result<IteratedCentralizerTower> {
    let mut t = IteratedCentralizerTower::new(ambient, p)?;
    t.extend_to(n)?;
    Ok(t)
}

/// First pair `(a, b)` with `[a, b] ∉ target`, if any. Since `target` is a
/// subgroup, `None` means `[A, B] ≤ target`.
pub fn commutator_escape(a: &Subgroup, b: &Subgroup, target: &Subgroup) -> Option<(Element, Element)> {
    let g = a.group();
    for x in a.iter() {
        for y in b.iter() {
            if !target.contains(g.comm(x, y)) {
                return Some((x, y));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallReport {
    pub holds: bool,
    /// `(a, b)` with `a ∈ γ_i(P)`, `b ∈ C_G^k(P)` and `[a, b] ∉ C_G^{k-i}(P)`.
    pub counterexample: Option<(Element, Element)>,
}

/// `[γ_i(P), C_G^k(P)] ≤ C_G^{k-i}(P)` for `1 ≤ i ≤ k`.
pub fn hall_lemma_check(ambient: &Subgroup, p: &Subgroup, i: usize, k: usize) -> Result<HallReport> {
    if i == 0 || i > k {
        return Err(Error::HypothesisViolated(format!("need 1 ≤ i ≤ k, got i = {i}, k = {k}")));
    }
    let tower = iterated_centralizer(ambient, p, k)?;
    Ok(hall_from_tower(&tower, &gamma(p, i), i, k))
}

pub(crate) fn hall_from_tower(tower: &IteratedCentralizerTower, gamma_i: &Subgroup, i: usize, k: usize) -> HallReport {
    let counterexample = commutator_escape(gamma_i, tower.level(k), tower.level(k - i));
    HallReport { holds: counterexample.is_none(), counterexample }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreeSubgroupReport {
    /// `[K,L,M] ≤ N` and `[L,M,K] ≤ N`.
    pub premises: bool,
    /// `[M,K,L] ≤ N`.
    pub conclusion: bool,
}

impl ThreeSubgroupReport {
    pub fn holds(&self) -> bool {
        !self.premises || self.conclusion
    }
}

/// Checks the three subgroup implication. `K`, `L`, `M` must normalize `N`.
pub fn three_subgroup_check(k: &Subgroup, l: &Subgroup, m: &Subgroup, n: &Subgroup) -> Result<ThreeSubgroupReport> {
    for (name, s) in [("K", k), ("L", l), ("M", m)] {
        s.same_parent(n)?;
        if !n.is_normalized_by(s) {
            return Err(Error::HypothesisViolated(format!("{name} does not normalize N")));
        }
    }
    let triple = |a: &Subgroup, b: &Subgroup, c: &Subgroup| a.commutator_with(b).commutator_with(c);
    let premises = triple(k, l, m).is_subgroup_of(n) && triple(l, m, k).is_subgroup_of(n);
    let conclusion = triple(m, k, l).is_subgroup_of(n);
    Ok(ThreeSubgroupReport { premises, conclusion })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BryantOutcome {
    HypothesesFail,
    ConclusionHolds,
    /// Hypotheses hold but `C_G^k(X) ≠ C_G^k(P)`.
    Violation,
}

/// For `X ≤ P ≤ G`, `k ≥ 1`: if `C_G^i(X) = C_G^i(P)` for `i < k`,
/// `[γ_k(P), C_G^k(X)] = 1` and `C_G(X) = C_G(P)`, then
/// `C_G^k(X) = C_G^k(P)`.
pub fn bryant_lemma_check(ambient: &Subgroup, x: &Subgroup, p: &Subgroup, k: usize) -> Result<BryantOutcome> {
    if k == 0 {
        return Err(Error::HypothesisViolated("k must be at least 1".into()));
    }
    if !x.is_subgroup_of(p) {
        return Err(Error::HypothesisViolated("X must be a subgroup of P".into()));
    }
    let tx = iterated_centralizer(ambient, x, k)?;
    let tp = iterated_centralizer(ambient, p, k)?;
    Ok(bryant_from_towers(&tx, &tp, &gamma(p, k), k))
}

pub(crate) fn bryant_from_towers(
    tx: &IteratedCentralizerTower,
    tp: &IteratedCentralizerTower,
    gamma_k: &Subgroup,
    k: usize,
) -> BryantOutcome {
    let h1 = (0..k).all(|i| tx.level(i) == tp.level(i));
    let h3 = tx.level(1) == tp.level(1);
    let h2 = h1 && h3 && commutator_escape(gamma_k, tx.level(k), &gamma_k.group().trivial()).is_none();
    if !(h1 && h2 && h3) {
        BryantOutcome::HypothesesFail
    } else if tx.level(k) == tp.level(k) {
        BryantOutcome::ConclusionHolds
    } else {
        BryantOutcome::Violation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestedOutcome {
    HypothesisFails,
    Holds,
    /// `C_B^j(A) ≠ C_C^j(A) ∩ B` at this level.
    Violation { level: usize },
}

/// For `A ≤ B ≤ C` with `C_C^k(A) = C_C^k(C)` for all `k < n`, checks
/// `C_B^j(A) = C_C^j(A) ∩ B` for all `j ≤ n`.
pub fn nested_iterated_check(a: &Subgroup, b: &Subgroup, c: &Subgroup, n: usize) -> Result<NestedOutcome> {
    if !(a.is_subgroup_of(b) && b.is_subgroup_of(c)) {
        return Err(Error::HypothesisViolated("need A ≤ B ≤ C".into()));
    }
    let in_c = iterated_centralizer(c, a, n)?;
    let of_c = iterated_centralizer(c, c, n.saturating_sub(1))?;
    if (0..n).any(|k| in_c.level(k) != of_c.level(k)) {
        return Ok(NestedOutcome::HypothesisFails);
    }
    let in_b = iterated_centralizer(b, a, n)?;
    for j in 0..=n {
        if in_b.level(j) != &in_c.level(j).intersection(b) {
            return Ok(NestedOutcome::Violation { level: j });
        }
    }
    Ok(NestedOutcome::Holds)
}
