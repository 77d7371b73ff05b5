//! Definable envelopes of nilpotent subgroups.
//!
//! Given a nilpotent `H ≤ G` of class `n`, [`build_envelope`] constructs a
//! descending tower `E_1 ≥ E_2 ≥ … ≥ E_n ≥ H` and returns `D = Z_n(E_n)`,
//! a subgroup containing `H`, nilpotent of the same class, and normalized by
//! everything that normalizes `H`. Each `E_k` is cut out by finitely many
//! witness elements, which is what makes `D` first-order definable (see
//! [`crate::formula::envelope_formula`]).
//!
//! `E_1 = C_G(C_G(H))` is the least centralizer containing `H`, with witness
//! set a greedy reduction of `C_G(H)`. `H` is then replaced by `H·Z(E_1)`.
//! For `k ≥ 2`, with `C = C^k_{E_{k-1}}(H)` and witnesses `x_{k,i} ∈ C`
//! satisfying `C_{E_{k-1}}(x_{k,·}) = C_{E_{k-1}}(C)`,
//!
//! ```text
//! E_k(h) = { x ∈ E_{k-1} : [x, h] ∈ Z_{k-1}(E_{k-1}) }
//! E_k    = ⋂_i E_k(x_{k,i})
//! ```

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::centralizers::{centralizer_of_subgroup_in, greedy_witness_in, minimal_centralizer_above_in};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, Subgroup, IDENTITY};
use crate::series::{
    commutator_escape, gamma, iterated_centralizer, lower_central_series, nilpotence_class, upper_term,
};

/// One stage `E_k` of the tower.
#[derive(Debug, Clone)]
pub struct EnvelopeLevel {
    pub level: usize,
    pub subgroup: Subgroup,
    /// `x_{k,1..m_k}`.
    pub witnesses: Vec<Element>,
    /// The set the witnesses were drawn from: `C_G(H)` at level 1,
    /// `C^k_{E_{k-1}}(H)` above.
    pub source: Subgroup,
    /// `Z_{k-1}(E_{k-1})` (trivial at level 1).
    pub previous_center: Subgroup,
}

#[derive(Debug, Clone)]
pub struct EnvelopeTrace {
    pub group: FiniteGroup,
    pub original_h: Subgroup,
    /// `H·Z(E_1)`.
    pub replaced_h: Subgroup,
    pub tower: Vec<EnvelopeLevel>,
    pub envelope: Subgroup,
    pub class: usize,
    /// Witnesses flattened in `(k, i)` order, without padding.
    pub parameter_tuple: Vec<Element>,
}

impl EnvelopeTrace {
    /// Largest number of witnesses used at any level.
    pub fn max_witnesses(&self) -> usize {
        self.tower.iter().map(|l| l.witnesses.len()).max().unwrap_or(0)
    }

    /// The witnesses padded to exactly `d` per level (`d·n` in total). A
    /// short level repeats its last witness, which leaves the intersection
    /// unchanged; a level with no witnesses is padded with the identity,
    /// whose constraint is vacuous.
    pub fn padded_parameters(&self, d: usize) -> Result<Vec<Element>> {
        let mut out = Vec::with_capacity(d * self.class);
        for level in &self.tower {
            let m = level.witnesses.len();
            if m > d {
                return Err(Error::BoundViolated { size: m, bound: d });
            }
            out.extend_from_slice(&level.witnesses);
            let pad = level.witnesses.last().copied().unwrap_or(IDENTITY);
            out.extend(std::iter::repeat_n(pad, d - m));
        }
        Ok(out)
    }
}

fn invariant(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(what.to_string()))
    }
}

/// `E_k(h) = { x ∈ E : [x, h] ∈ Z }`.
fn engel_slice(e: &Subgroup, h: Element, z: &Subgroup) -> Subgroup {
    let g = e.group();
    let mut bits = g.empty_bits();
    for x in e.iter() {
        if z.contains(g.comm(x, h)) {
            bits.insert(x);
        }
    }
    Subgroup::from_closed_bits(g, bits)
}

/// Runs the envelope construction for a nilpotent subgroup `h` of `group`.
///
/// The trivial subgroup (class 0) gets the trivial envelope with an empty
/// tower. Every guarantee of the construction is checked before returning;
/// a failed check is reported as [`Error::Invariant`].
pub fn build_envelope(group: &FiniteGroup, h: &Subgroup) -> Result<EnvelopeTrace> {
    let whole = group.whole();
    whole.same_parent(h)?;
    let class = nilpotence_class(h)?;
    if class == 0 {
        return Ok(EnvelopeTrace {
            group: group.clone(),
            original_h: h.clone(),
            replaced_h: h.clone(),
            tower: Vec::new(),
            envelope: group.trivial(),
            class,
            parameter_tuple: Vec::new(),
        });
    }

    let (e1, a1) = minimal_centralizer_above_in(&whole, h)?;
    let replaced = h.product_set(&e1.center())?;
    invariant(nilpotence_class(&replaced)? == class, "H·Z(E_1) changed the nilpotence class")?;

    let mut tower = vec![EnvelopeLevel {
        level: 1,
        subgroup: e1,
        witnesses: a1.to_vec(),
        source: centralizer_of_subgroup_in(&whole, h),
        previous_center: group.trivial(),
    }];
    for k in 2..=class {
        let prev = &tower.last().unwrap().subgroup;
        let source = iterated_centralizer(prev, &replaced, k)?.level(k).clone();
        let witnesses = greedy_witness_in(prev, source.iter());
        let previous_center = upper_term(prev, k - 1);
        let mut bits = prev.bits().clone();
        for &w in &witnesses {
            bits.intersect_with(engel_slice(prev, w, &previous_center).bits());
        }
        let ek = group
            .subgroup_from_members(bits)
            .map_err(|e| Error::Invariant(format!("E_{k} is not a subgroup: {e}")))?;
        tower.push(EnvelopeLevel { level: k, subgroup: ek, witnesses, source, previous_center });
    }

    let top = &tower.last().unwrap().subgroup;
    let envelope = upper_term(top, class);
    let parameter_tuple = tower.iter().flat_map(|l| l.witnesses.iter().copied()).collect();
    let trace = EnvelopeTrace {
        group: group.clone(),
        original_h: h.clone(),
        replaced_h: replaced,
        tower,
        envelope,
        class,
        parameter_tuple,
    };
    check_trace(&trace)?;
    Ok(trace)
}

/// The runtime assertions made by [`build_envelope`]: the tower is
/// descending, contains `H·Z(E_1)`, each stage is `N_G(H)`-normal and
/// satisfies `C^j_{E_k}(H) = Z_j(E_k)` for `j ≤ k`; and the envelope
/// contains `H`, has the class of `H`, and is `N_G(H)`-normal.
fn check_trace(t: &EnvelopeTrace) -> Result<()> {
    let h = &t.original_h;
    let hr = &t.replaced_h;
    let norm_h = h.normalizer();
    invariant(h.is_subgroup_of(hr), "H is not contained in H·Z(E_1)")?;
    let mut above = t.group.whole();
    for level in &t.tower {
        let e = &level.subgroup;
        let k = level.level;
        invariant(e.is_subgroup_of(&above), &format!("E_{k} is not below E_{}", k - 1))?;
        invariant(hr.is_subgroup_of(e), &format!("E_{k} does not contain H"))?;
        invariant(e.is_normalized_by(&norm_h), &format!("E_{k} is not N_G(H)-normal"))?;
        invariant(
            level.witnesses.iter().all(|&w| level.source.contains(w)),
            &format!("a witness at level {k} lies outside its source set"),
        )?;
        let tower = iterated_centralizer(e, hr, k)?;
        for j in 1..=k {
            invariant(
                tower.level(j) == &upper_term(e, j),
                &format!("C^{j}_(E_{k})(H) differs from Z_{j}(E_{k})"),
            )?;
        }
        above = e.clone();
    }
    let d = &t.envelope;
    invariant(h.is_subgroup_of(d), "H is not contained in the envelope")?;
    invariant(nilpotence_class(d)? == t.class, "the envelope has a different nilpotence class")?;
    invariant(d.is_normalized_by(&norm_h), "the envelope is not N_G(H)-normal")?;
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    /// Number of identities evaluated.
    pub checks: usize,
    /// Names of failed identities with the level and sample they failed at.
    pub failures: Vec<String>,
    /// Whether `N_G(H·Z(E_1)) ≤ N_G(D)` as well (informational).
    pub replaced_normalizes: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Independently re-checks a trace: the tower properties for `H ≤ P ≤ E_k`
/// with `P` ranging over `H`, `E_k` and `samples` random intermediate
/// subgroups per level, the intersection identity
/// `C_P^j(H) = C^j_{E_{k-1}}(H) ∩ P`, the identities
/// `[γ_k(E_k(h)), h] = 1` and `[γ_k(E_k), C^k_{E_{k-1}}(H)] = 1`, and the
/// conclusions about the envelope.
pub fn verify_envelope(t: &EnvelopeTrace, samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::default();
    let g = &t.group;
    let h = &t.original_h;
    let hr = &t.replaced_h;
    let trivial = g.trivial();
    let norm_h = h.normalizer();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    rep.check(h.is_subgroup_of(hr), || "H ≤ H·Z(E_1)".into());
    for (idx, level) in t.tower.iter().enumerate() {
        let k = level.level;
        let e = &level.subgroup;
        let prev = if idx == 0 { g.whole() } else { t.tower[idx - 1].subgroup.clone() };
        rep.check(e.is_subgroup_of(&prev), || format!("E_{k} ≤ E_{}", k - 1));
        rep.check(hr.is_subgroup_of(e), || format!("H ≤ E_{k}"));
        rep.check(norm_h.is_subgroup_of(&e.normalizer()), || format!("E_{k} is N_G(H)-normal"));

        if k == 1 {
            let c = centralizer_of_subgroup_in(e, hr);
            rep.check(c == hr.center() && c == e.center(), || "C_(E_1)(H) = Z(H) = Z(E_1)".into());
        } else {
            let source = iterated_centralizer(&prev, hr, k)?.level(k).clone();
            rep.check(source == level.source, || format!("stored C^{k}_(E_{})(H)", k - 1));
            for &w in &level.witnesses {
                let slice = engel_slice(&prev, w, &level.previous_center);
                rep.check(g.subgroup_from_members(slice.bits().clone()).is_ok(), || {
                    format!("E_{k}({}) is a subgroup", g.format_element(w))
                });
                let gk = gamma(&slice, k);
                rep.check(commutator_escape(&gk, &g.closure([w]), &trivial).is_none(), || {
                    format!("[γ_{k}(E_{k}(h)), h] = 1 for h = {}", g.format_element(w))
                });
            }
            rep.check(commutator_escape(&gamma(e, k), &source, &trivial).is_none(), || {
                format!("[γ_{k}(E_{k}), C^{k}_(E_{})(H)] = 1", k - 1)
            });
            let mut all = prev.bits().clone();
            for x in source.iter() {
                all.intersect_with(engel_slice(&prev, x, &level.previous_center).bits());
            }
            rep.check(&all == e.bits(), || format!("E_{k} is the intersection of all E_{k}(h)"));
        }

        // intermediate subgroups H ≤ P ≤ E_k
        let mut ps = vec![hr.clone(), e.clone()];
        let pool: Vec<Element> = e.iter().collect();
        for _ in 0..samples {
            let count = rng.gen_range(1..=2);
            let extra: Vec<Element> = pool.choose_multiple(&mut rng, count).copied().collect();
            let mut p = hr.clone();
            for x in extra {
                p = p.adjoin(x);
            }
            ps.push(p);
        }
        let zs: Vec<Subgroup> = (0..=k).map(|j| upper_term(e, j)).collect();
        let th = iterated_centralizer(e, hr, k)?;
        for p in &ps {
            let tp = iterated_centralizer(e, p, k)?;
            for j in 1..=k {
                rep.check(th.level(j) == tp.level(j) && tp.level(j) == &zs[j], || {
                    format!("C^{j}_(E_{k})(H) = C^{j}_(E_{k})(P) = Z_{j}(E_{k}) for |P| = {}", p.order())
                });
            }
            if k >= 2 {
                let in_p = iterated_centralizer(p, hr, k)?;
                let in_prev = iterated_centralizer(&prev, hr, k)?;
                for j in 1..=k {
                    rep.check(in_p.level(j) == &in_prev.level(j).intersection(p), || {
                        format!("C_P^{j}(H) = C^{j}_(E_{})(H) ∩ P for |P| = {}", k - 1, p.order())
                    });
                }
            }
        }
    }

    let d = &t.envelope;
    rep.check(h.is_subgroup_of(d), || "H ≤ D".into());
    rep.check(lower_central_series(d).class == Some(t.class), || "class(D) = class(H)".into());
    rep.check(norm_h.is_subgroup_of(&d.normalizer()), || "D is N_G(H)-normal".into());
    rep.replaced_normalizes = hr.normalizer().is_subgroup_of(&d.normalizer());
    Ok(rep)
}

/// Envelope of a normal nilpotent subgroup; the envelope is then normal.
pub fn envelope_of_normal(group: &FiniteGroup, h: &Subgroup) -> Result<EnvelopeTrace> {
    if !h.is_normal() {
        return Err(Error::NotNormal);
    }
    let t = build_envelope(group, h)?;
    invariant(t.envelope.is_normal(), "the envelope of a normal subgroup is not normal")?;
    Ok(t)
}

/// Iterates `c_0 = g`, `c_{i+1} = [c_i, x]` and returns the least `i` with
/// `c_i = 1`, if that happens within `max_steps` steps.
pub fn engel_iterate(group: &FiniteGroup, g: Element, x: Element, max_steps: usize) -> Option<usize> {
    let mut c = g;
    for i in 0..=max_steps {
        if c == IDENTITY {
            return Some(i);
        }
        c = group.comm(c, x);
    }
    None
}

#[derive(Debug, Clone)]
pub struct FittingReport {
    pub fitting: Subgroup,
    /// Product of the `O_p(G)`.
    pub by_op_cores: Subgroup,
    /// Envelope of the `O_p` product.
    pub by_envelope: Subgroup,
    /// Bounded left Engel elements.
    pub by_engel: Subgroup,
    /// Largest number of steps any `[g, x, …, x]` with `x ∈ F(G)` needed.
    pub engel_bound_n: usize,
    pub class: usize,
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            ps.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// `O_p(G)`: elements whose normal closure is a `p`-group.
pub fn p_core(group: &FiniteGroup, p: usize) -> Result<Subgroup> {
    let mut bits = group.empty_bits();
    for x in group.elements() {
        if is_power_of(group.element_order(x), p) && is_power_of(group.normal_closure(x).order(), p) {
            bits.insert(x);
        }
    }
    group.subgroup_from_members(bits)
}

/// Set of `x` such that every `[g, x, …, x]` reaches the identity within
/// `order(G)` steps.
pub fn engel_elements(group: &FiniteGroup) -> (Vec<Element>, usize) {
    let cap = group.order();
    let mut bound = 0;
    let mut out = Vec::new();
    'x: for x in group.elements() {
        let mut worst = 0;
        for g in group.elements() {
            match engel_iterate(group, g, x, cap) {
                Some(s) => worst = worst.max(s),
                None => continue 'x,
            }
        }
        bound = bound.max(worst);
        out.push(x);
    }
    (out, bound)
}

/// Computes the Fitting subgroup three ways and checks that they agree.
pub fn fitting(group: &FiniteGroup) -> Result<FittingReport> {
    let mut by_op_cores = group.trivial();
    for p in prime_divisors(group.order()) {
        by_op_cores = by_op_cores.product_set(&p_core(group, p)?)?;
    }
    let by_envelope = build_envelope(group, &by_op_cores)?.envelope;
    let (engel, engel_bound_n) = engel_elements(group);
    let by_engel = group
        .subgroup_from_members(group.element_set(engel).bits().clone())
        .map_err(|e| Error::Invariant(format!("bounded left Engel elements do not form a subgroup: {e}")))?;
    invariant(by_envelope == by_op_cores, "envelope of F(G) differs from F(G)")?;
    invariant(by_engel == by_op_cores, "Engel elements differ from the product of the O_p")?;
    invariant(by_op_cores.is_normal(), "F(G) is not normal")?;
    let class = nilpotence_class(&by_op_cores)?;
    Ok(FittingReport { fitting: by_op_cores.clone(), by_op_cores, by_envelope, by_engel, engel_bound_n, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn klein_envelope_in_a4() {
        let g = catalog::alternating(4).unwrap();
        let x = g.elements().find(|&x| g.element_order(x) == 2).unwrap();
        let h = g.closure([x]);
        let t = build_envelope(&g, &h).unwrap();
        assert_eq!(t.class, 1);
        assert_eq!(t.envelope.order(), 4);
        assert!(t.envelope.is_normal());
        assert!(h.is_proper_subgroup_of(&t.envelope));
        let rep = verify_envelope(&t, 4, 1).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn center_is_its_own_envelope() {
        for spec in ["dihedral(4)", "quaternion(8)", "unitriangular(3)", "dihedral(6)"] {
            let g = catalog::parse_spec(spec).unwrap();
            let t = build_envelope(&g, &g.center()).unwrap();
            assert_eq!(t.envelope, g.center(), "{spec}");
            assert_eq!(t.tower[0].subgroup, g.center());
        }
    }

    #[test]
    fn d8_factor_of_d8_times_s3() {
        let g = catalog::parse_spec("product(dihedral(4),symmetric(3))").unwrap();
        // (a, b) has index a·6 + b
        let h = g.subgroup_from_members(g.element_set((0..8).map(|a| a * 6)).bits().clone()).unwrap();
        let t = build_envelope(&g, &h).unwrap();
        assert_eq!(t.class, 2);
        assert_eq!(t.envelope, h);
        assert_eq!(t.tower.len(), 2);
        assert!(t.tower.iter().all(|l| l.subgroup == h));
    }

    #[test]
    fn trivial_subgroup_has_trivial_envelope() {
        let g = catalog::symmetric(4).unwrap();
        let t = build_envelope(&g, &g.trivial()).unwrap();
        assert!(t.envelope.is_trivial());
        assert!(t.tower.is_empty());
        assert!(t.padded_parameters(3).unwrap().is_empty());
    }

    #[test]
    fn non_nilpotent_input_is_rejected() {
        let g = catalog::symmetric(3).unwrap();
        assert!(matches!(build_envelope(&g, &g.whole()), Err(Error::NotNilpotent)));
    }

    #[test]
    fn normal_envelopes() {
        let a4 = catalog::alternating(4).unwrap();
        let v = a4.closure(a4.elements().filter(|&x| a4.element_order(x) == 2));
        let t = envelope_of_normal(&a4, &v).unwrap();
        assert_eq!(t.envelope, v);

        let d8 = catalog::dihedral(4).unwrap();
        let r2 = d8.element_of_permutation(&[2, 3, 0, 1]).unwrap();
        let t = envelope_of_normal(&d8, &d8.closure([r2])).unwrap();
        assert_eq!(t.envelope, d8.center());

        let s = a4.closure([a4.elements().find(|&x| a4.element_order(x) == 3).unwrap()]);
        assert!(matches!(envelope_of_normal(&a4, &s), Err(Error::NotNormal)));
    }

    #[test]
    fn engel_iteration() {
        let d8 = catalog::dihedral(4).unwrap();
        for g in d8.elements() {
            assert!(engel_iterate(&d8, g, IDENTITY, 8).unwrap() <= 1);
            for x in d8.elements() {
                assert!(engel_iterate(&d8, g, x, 8).unwrap() <= 2);
            }
            for z in d8.center().iter() {
                assert!(engel_iterate(&d8, g, z, 8).unwrap() <= 1);
            }
        }
        assert_eq!(engel_iterate(&d8, 1, IDENTITY, 8), Some(1));
        let s3 = catalog::symmetric(3).unwrap();
        let t = s3.element_of_permutation(&[1, 0, 2]).unwrap();
        let c = s3.element_of_permutation(&[1, 2, 0]).unwrap();
        assert_eq!(engel_iterate(&s3, c, t, 6), None);
    }

    #[test]
    fn fitting_examples() {
        let s3 = catalog::symmetric(3).unwrap();
        let f = fitting(&s3).unwrap();
        assert_eq!(f.fitting.order(), 3);
        let s4 = catalog::symmetric(4).unwrap();
        let f = fitting(&s4).unwrap();
        assert_eq!(f.fitting.order(), 4);
        assert!(f.fitting.is_abelian());
        let d8 = catalog::dihedral(4).unwrap();
        let f = fitting(&d8).unwrap();
        assert!(f.fitting.is_whole());
        assert_eq!(f.class, 2);
    }

    #[test]
    fn padding_repeats_last_witness() {
        let g = catalog::dihedral(8).unwrap();
        let r = g.element_of_permutation(&[1, 2, 3, 4, 5, 6, 7, 0]).unwrap();
        let t = build_envelope(&g, &g.closure([r])).unwrap();
        let m = t.max_witnesses();
        let padded = t.padded_parameters(m + 2).unwrap();
        assert_eq!(padded.len(), (m + 2) * t.class);
        assert!(t.padded_parameters(m.saturating_sub(1)).is_err() || m == 0);
    }
}
