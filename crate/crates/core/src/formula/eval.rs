//! Finite-model evaluation.
//!
//! A formula is compiled to a hash-consed DAG with de Bruijn variable
//! indices (the distinguished `x` is the outermost binder), so syntactically
//! different occurrences of the same predicate share one node. A quantified
//! node whose only free variable is a single index has its truth value
//! memoized per value of that variable; nodes that depend on two or more
//! bound variables are never cached. `∃v (v = t ∧ φ)` and
//! `∀v (¬(v = t) ∨ φ)` with `v` not in `t` bind `v := t` directly.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::ast::{cost_estimate, Formula, Term};
use super::emit::DISTINGUISHED;
use crate::error::{Error, Result};
use crate::group::{Element, ElementSet, FiniteGroup, IDENTITY};

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Warn when `order^depth × size` exceeds this.
    pub budget: u128,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { budget: 1 << 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum TNode {
    Var(u32),
    Param(u32),
    One,
    Mul(u32, u32),
    Inv(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum FNode {
    Eq(u32, u32),
    And(u32, u32),
    Or(u32, u32),
    Not(u32),
    All(u32),
    Ex(u32),
}

#[derive(Default)]
struct Dag {
    terms: Vec<TNode>,
    term_ids: HashMap<TNode, u32>,
    term_mask: Vec<u64>,
    formulas: Vec<FNode>,
    formula_ids: HashMap<FNode, u32>,
    formula_mask: Vec<u64>,
    quantified: Vec<bool>,
}

impl Dag {
    fn term(&mut self, t: &Term, scope: &[&str]) -> Result<u32> {
        let node = match t {
            Term::Var(v) => {
                let pos = scope
                    .iter()
                    .rposition(|s| s == v)
                    .ok_or_else(|| Error::FreeVariable(v.clone()))?;
                let idx = scope.len() - 1 - pos;
                if idx >= 64 {
                    return Err(Error::Malformed("quantifier nesting deeper than 63".into()));
                }
                TNode::Var(idx as u32)
            }
            Term::Param(i) => TNode::Param(*i as u32),
            Term::Identity => TNode::One,
            Term::Mul(a, b) => TNode::Mul(self.term(a, scope)?, self.term(b, scope)?),
            Term::Inv(a) => TNode::Inv(self.term(a, scope)?),
        };
        if let Some(&id) = self.term_ids.get(&node) {
            return Ok(id);
        }
        let mask = match &node {
            TNode::Var(i) => 1u64 << i,
            TNode::Param(_) | TNode::One => 0,
            TNode::Mul(a, b) => self.term_mask[*a as usize] | self.term_mask[*b as usize],
            TNode::Inv(a) => self.term_mask[*a as usize],
        };
        let id = self.terms.len() as u32;
        self.terms.push(node.clone());
        self.term_mask.push(mask);
        self.term_ids.insert(node, id);
        Ok(id)
    }

    fn formula<'a>(&mut self, f: &'a Formula, scope: &mut Vec<&'a str>) -> Result<u32> {
        let node = match f {
            Formula::Eq(a, b) => FNode::Eq(self.term(a, scope)?, self.term(b, scope)?),
            Formula::And(a, b) => FNode::And(self.formula(a, scope)?, self.formula(b, scope)?),
            Formula::Or(a, b) => FNode::Or(self.formula(a, scope)?, self.formula(b, scope)?),
            Formula::Not(a) => FNode::Not(self.formula(a, scope)?),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                scope.push(v);
                let b = self.formula(body, scope);
                scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    FNode::All(b?)
                } else {
                    FNode::Ex(b?)
                }
            }
        };
        if let Some(&id) = self.formula_ids.get(&node) {
            return Ok(id);
        }
        let fm = |i: &u32| self.formula_mask[*i as usize];
        let (mask, quantified) = match &node {
            FNode::Eq(a, b) => (self.term_mask[*a as usize] | self.term_mask[*b as usize], false),
            FNode::And(a, b) | FNode::Or(a, b) => {
                (fm(a) | fm(b), self.quantified[*a as usize] || self.quantified[*b as usize])
            }
            FNode::Not(a) => (fm(a), self.quantified[*a as usize]),
            FNode::All(a) | FNode::Ex(a) => (fm(a) >> 1, true),
        };
        let id = self.formulas.len() as u32;
        self.formulas.push(node.clone());
        self.formula_mask.push(mask);
        self.quantified.push(quantified);
        self.formula_ids.insert(node, id);
        Ok(id)
    }

    /// For `∃v (v = t ∧ φ)` / `∀v (¬(v = t) ∨ φ)` bodies: `(t, φ)`.
    fn one_point(&self, body: u32, universal: bool) -> Option<(u32, u32)> {
        let (eq, rest) = match (&self.formulas[body as usize], universal) {
            (FNode::And(l, r), false) => (*l, *r),
            (FNode::Or(l, r), true) => match &self.formulas[*l as usize] {
                FNode::Not(e) => (*e, *r),
                _ => return None,
            },
            _ => return None,
        };
        let FNode::Eq(a, b) = &self.formulas[eq as usize] else { return None };
        let bound_free = |t: u32| self.term_mask[t as usize] & 1 == 0;
        if self.terms[*a as usize] == TNode::Var(0) && bound_free(*b) {
            Some((*b, rest))
        } else if self.terms[*b as usize] == TNode::Var(0) && bound_free(*a) {
            Some((*a, rest))
        } else {
            None
        }
    }
}

enum Memo {
    None,
    Closed(Option<bool>),
    Unary { var: u32, known: FixedBitSet, value: FixedBitSet },
}

struct Evaluator<'a> {
    dag: &'a Dag,
    group: &'a FiniteGroup,
    params: &'a [Element],
    env: Vec<Element>,
    memo: Vec<Memo>,
}

impl Evaluator<'_> {
    fn lookup(&self, idx: u32) -> Element {
        self.env[self.env.len() - 1 - idx as usize]
    }

    fn term(&self, id: u32) -> Element {
        match &self.dag.terms[id as usize] {
            TNode::Var(i) => self.lookup(*i),
            TNode::Param(i) => self.params[*i as usize],
            TNode::One => IDENTITY,
            TNode::Mul(a, b) => self.group.mul(self.term(*a), self.term(*b)),
            TNode::Inv(a) => self.group.inv(self.term(*a)),
        }
    }

    fn formula(&mut self, id: u32) -> bool {
        match &self.memo[id as usize] {
            Memo::None => self.compute(id),
            Memo::Closed(Some(v)) => *v,
            Memo::Closed(None) => {
                let v = self.compute(id);
                self.memo[id as usize] = Memo::Closed(Some(v));
                v
            }
            Memo::Unary { var, known, value } => {
                let g = self.lookup(*var);
                if known.contains(g) {
                    return value.contains(g);
                }
                let v = self.compute(id);
                if let Memo::Unary { known, value, .. } = &mut self.memo[id as usize] {
                    known.insert(g);
                    value.set(g, v);
                }
                v
            }
        }
    }

    fn compute(&mut self, id: u32) -> bool {
        match self.dag.formulas[id as usize].clone() {
            FNode::Eq(a, b) => self.term(a) == self.term(b),
            FNode::And(a, b) => self.formula(a) && self.formula(b),
            FNode::Or(a, b) => self.formula(a) || self.formula(b),
            FNode::Not(a) => !self.formula(a),
            FNode::Ex(body) | FNode::All(body) => {
                let universal = matches!(self.dag.formulas[id as usize], FNode::All(_));
                if let Some((t, rest)) = self.dag.one_point(body, universal) {
                    // `t` does not mention the new binder, so a placeholder
                    // keeps its indices aligned
                    self.env.push(IDENTITY);
                    let v = self.term(t);
                    *self.env.last_mut().unwrap() = v;
                    let r = self.formula(rest);
                    self.env.pop();
                    return r;
                }
                let mut result = universal;
                for g in self.group.elements() {
                    self.env.push(g);
                    let r = self.formula(body);
                    self.env.pop();
                    if r != universal {
                        result = r;
                        break;
                    }
                }
                result
            }
        }
    }
}

/// `{ g ∈ G : F(g, params) }` where `x` is the free variable.
pub fn evaluate(f: &Formula, group: &FiniteGroup, params: &[Element]) -> Result<ElementSet> {
    evaluate_with(f, group, params, EvalOptions::default())
}

pub fn evaluate_with(f: &Formula, group: &FiniteGroup, params: &[Element], opts: EvalOptions) -> Result<ElementSet> {
    if let Some(v) = f.free_vars().into_iter().find(|v| v != DISTINGUISHED) {
        return Err(Error::FreeVariable(v));
    }
    let expected = f.param_count();
    if params.len() != expected {
        return Err(Error::Arity { expected, got: params.len() });
    }
    for &p in params {
        group.validate(p)?;
    }
    let cost = cost_estimate(f, group.order());
    if cost > opts.budget {
        log::warn!("formula evaluation may be expensive: estimated cost {cost} exceeds budget {}", opts.budget);
    }

    let mut dag = Dag::default();
    let root = dag.formula(f, &mut vec![DISTINGUISHED])?;
    let n = group.order();
    let memo = (0..dag.formulas.len())
        .map(|i| {
            let mask = dag.formula_mask[i];
            if !dag.quantified[i] {
                Memo::None
            } else if mask == 0 {
                Memo::Closed(None)
            } else if mask.count_ones() == 1 {
                Memo::Unary {
                    var: mask.trailing_zeros(),
                    known: FixedBitSet::with_capacity(n),
                    value: FixedBitSet::with_capacity(n),
                }
            } else {
                Memo::None
            }
        })
        .collect();
    let mut ev = Evaluator { dag: &dag, group, params, env: Vec::new(), memo };
    let mut out = group.empty_bits();
    for g in group.elements() {
        ev.env.push(g);
        if ev.formula(root) {
            out.insert(g);
        }
        ev.env.pop();
    }
    Ok(ElementSet::new(group, out))
}

/// Truth of a sentence (a formula without free variables).
pub fn holds(sentence: &Formula, group: &FiniteGroup) -> Result<bool> {
    if let Some(v) = sentence.free_vars().into_iter().next() {
        return Err(Error::FreeVariable(v));
    }
    Ok(evaluate(sentence, group, &[])?.contains(IDENTITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::centralizers::centralizer;
    use crate::formula::parse;

    /// Reference evaluator: plain recursion with named variables, no DAG,
    /// no memoization, no one-point rule.
    fn naive(f: &Formula, g: &FiniteGroup, params: &[Element], env: &mut Vec<(String, Element)>) -> bool {
        fn term(t: &Term, g: &FiniteGroup, params: &[Element], env: &[(String, Element)]) -> Element {
            match t {
                Term::Var(v) => env.iter().rev().find(|e| &e.0 == v).unwrap().1,
                Term::Param(i) => params[*i],
                Term::Identity => IDENTITY,
                Term::Mul(a, b) => g.mul(term(a, g, params, env), term(b, g, params, env)),
                Term::Inv(a) => g.inv(term(a, g, params, env)),
            }
        }
        match f {
            Formula::Eq(a, b) => term(a, g, params, env) == term(b, g, params, env),
            Formula::And(a, b) => naive(a, g, params, env) && naive(b, g, params, env),
            Formula::Or(a, b) => naive(a, g, params, env) || naive(b, g, params, env),
            Formula::Not(a) => !naive(a, g, params, env),
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                let universal = matches!(f, Formula::Forall(..));
                for x in g.elements() {
                    env.push((v.clone(), x));
                    let r = naive(b, g, params, env);
                    env.pop();
                    if r != universal {
                        return r;
                    }
                }
                universal
            }
        }
    }

    fn naive_set(f: &Formula, g: &FiniteGroup, params: &[Element]) -> Vec<Element> {
        g.elements()
            .filter(|&x| naive(f, g, params, &mut vec![("x".into(), x)]))
            .collect()
    }

    #[test]
    fn identity_formula() {
        let g = catalog::symmetric(3).unwrap();
        assert_eq!(evaluate(&parse("x = 1").unwrap(), &g, &[]).unwrap().to_vec(), vec![IDENTITY]);
    }

    #[test]
    fn center_of_s3_is_trivial() {
        let g = catalog::symmetric(3).unwrap();
        let f = parse("A y (x*y = y*x)").unwrap();
        assert_eq!(evaluate(&f, &g, &[]).unwrap().to_vec(), vec![IDENTITY]);
    }

    #[test]
    fn commuting_formula_is_a_centralizer() {
        let g = catalog::dihedral(4).unwrap();
        let f = parse("x*p0 = p0*x").unwrap();
        for p in g.elements() {
            let got = evaluate(&f, &g, &[p]).unwrap();
            assert_eq!(got.bits(), centralizer(&g.element_set([p])).bits());
        }
    }

    #[test]
    fn arity_and_free_variable_errors() {
        let g = catalog::symmetric(3).unwrap();
        assert!(matches!(
            evaluate(&parse("x*p0 = p0*x").unwrap(), &g, &[]),
            Err(Error::Arity { expected: 1, got: 0 })
        ));
        assert!(matches!(evaluate(&parse("x = y").unwrap(), &g, &[]), Err(Error::FreeVariable(_))));
        assert!(evaluate(&parse("x = p0").unwrap(), &g, &[17]).is_err());
    }

    #[test]
    fn agrees_with_naive_evaluation() {
        let g = catalog::dihedral(4).unwrap();
        let cases = [
            "E y (x = y*y)",
            "A y (E z ([x, y] = z*z))",
            "E v (v = [x, p0] & A w (v*w = w*v))",
            "A v (!(v = x*x) | v = 1)",
            "!(E y (x = y & y = p0)) | x = 1",
            "E y (y = x^-1 & y*p0 = p0*y) & E z (z = x)",
        ];
        for src in cases {
            let f = parse(src).unwrap();
            let k = f.param_count();
            for p in 0..g.order() {
                let params: Vec<Element> = vec![p; k];
                assert_eq!(evaluate(&f, &g, &params).unwrap().to_vec(), naive_set(&f, &g, &params), "{src}");
                if k == 0 {
                    break;
                }
            }
        }
    }

    #[test]
    fn sentences() {
        let g = catalog::cyclic(4).unwrap();
        assert!(holds(&parse("A a (A b (a*b = b*a))").unwrap(), &g).unwrap());
        let s = catalog::symmetric(3).unwrap();
        assert!(!holds(&parse("A a (A b (a*b = b*a))").unwrap(), &s).unwrap());
    }
}
