//! Emitters for the uniform envelope formula and the dimension sentence.
//!
//! The envelope formula mirrors the tower of [`crate::envelope`]:
//!
//! ```text
//! E_1(t)       := ⋀_i  t·p_{0,i} = p_{0,i}·t
//! E_k(t)       := E_{k-1}(t) ∧ ⋀_i ∃v (v = [t, p_{k-1,i}] ∧ Z^{E_{k-1}}_{k-1}(v))
//! Z^E_0(t)     := t = 1
//! Z^E_1(t)     := E(t) ∧ ∀w (¬E(w) ∨ [t, w] = 1)
//! Z^E_j(t)     := E(t) ∧ ∀w (¬E(w) ∨ ∃v (v = [t, w] ∧ Z^E_{j-1}(v)))
//! φ_{d,0}(x)   := x = 1
//! φ_{d,1}(x)   := E_1(x)
//! φ_{d,n}(x)   := Z^{E_n}_n(x)
//! ```
//!
//! Slot `p_{k,i}` is parameter `k·d + i`. Applying a predicate to a compound
//! term always goes through a fresh `∃v (v = t ∧ …)`, so every predicate
//! instance has a single free variable. Bound variables are named after
//! their binding depth, which keeps the output capture-free and identical
//! for identical `(d, n)`.

use super::ast::{Formula, Term};
use crate::envelope::EnvelopeTrace;
use crate::error::{Error, Result};

/// The free variable of emitted formulas.
pub const DISTINGUISHED: &str = "x";

struct Emitter {
    d: usize,
}

impl Emitter {
    fn e(&self, k: usize, t: &str, depth: usize) -> Formula {
        let t_term = Term::var(t);
        if k == 1 {
            return Formula::and_all((0..self.d).map(|i| Formula::commute(t_term.clone(), Term::Param(i))))
                .expect("d ≥ 1");
        }
        let v = format!("v{depth}");
        let slices = (0..self.d).map(|i| {
            let slot = Term::Param((k - 1) * self.d + i);
            Formula::exists(
                &v,
                Formula::and(
                    Formula::eq(Term::var(&v), Term::comm(t_term.clone(), slot)),
                    self.z(k - 1, k - 1, &v, depth + 1),
                ),
            )
        });
        Formula::and(self.e(k - 1, t, depth), Formula::and_all(slices).expect("d ≥ 1"))
    }

    /// `Z_j` of the subgroup defined by `E_k`.
    fn z(&self, k: usize, j: usize, t: &str, depth: usize) -> Formula {
        if j == 0 {
            return Formula::eq(Term::var(t), Term::Identity);
        }
        let w = format!("w{depth}");
        let step = if j == 1 {
            Formula::eq(Term::comm(Term::var(t), Term::var(&w)), Term::Identity)
        } else {
            let v = format!("v{}", depth + 1);
            Formula::exists(
                &v,
                Formula::and(
                    Formula::eq(Term::var(&v), Term::comm(Term::var(t), Term::var(&w))),
                    self.z(k, j - 1, &v, depth + 2),
                ),
            )
        };
        Formula::and(
            self.e(k, t, depth),
            Formula::forall(&w, Formula::implies(self.e(k, &w, depth + 1), step)),
        )
    }
}

/// `φ_{d,n}(x, p_0 … p_{dn-1})`. Depends on `(d, n)` only.
pub fn envelope_formula(d: usize, n: usize) -> Formula {
    assert!(d >= 1, "the envelope formula needs d ≥ 1");
    let em = Emitter { d };
    match n {
        0 => Formula::eq(Term::var(DISTINGUISHED), Term::Identity),
        1 => em.e(1, DISTINGUISHED, 0),
        _ => em.z(n, n, DISTINGUISHED, 0),
    }
}

/// The envelope formula for a trace, with `d` parameters per level. Fails
/// when some level used more than `d` witnesses.
pub fn emit_envelope_formula(trace: &EnvelopeTrace, d: usize) -> Result<Formula> {
    let m = trace.max_witnesses();
    if d == 0 || m > d {
        return Err(Error::BoundViolated { size: m, bound: d });
    }
    Ok(envelope_formula(d, trace.class))
}

/// Sentence true exactly in groups with no strictly descending chain
/// `C(∅) > C(a_1) > C(a_1, a_2) > … > C(a_1, …, a_{d+1})`, i.e. groups of
/// c-dimension at most `d` (for `d ≥ 1`).
pub fn fcd_sentence(d: usize) -> Formula {
    let names: Vec<String> = (1..=d + 1).map(|i| format!("a{i}")).collect();
    let drop = |i: usize| {
        // some z commutes with a_1..a_{i-1} but not with a_i
        let z = format!("z{i}");
        let new = Formula::not(Formula::commute(Term::var(&z), Term::var(&names[i - 1])));
        let body = Formula::and_all(
            names[..i - 1]
                .iter()
                .map(|a| Formula::commute(Term::var(&z), Term::var(a)))
                .chain(std::iter::once(new)),
        )
        .unwrap();
        Formula::exists(&z, body)
    };
    let mut inner: Option<Formula> = None;
    for i in (1..=d + 1).rev() {
        let step = match inner.take() {
            Some(rest) => Formula::and(drop(i), rest),
            None => drop(i),
        };
        inner = Some(Formula::exists(&names[i - 1], step));
    }
    Formula::not(inner.unwrap())
}
