use std::collections::BTreeSet;

/// A term in the language of groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// Parameter slot `p{i}`.
    Param(usize),
    Identity,
    Mul(Box<Term>, Box<Term>),
    Inv(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Term) -> Term {
        Term::Inv(Box::new(a))
    }

    /// `[a, b] = a⁻¹·b⁻¹·a·b`, left-associated.
    pub fn comm(a: Term, b: Term) -> Term {
        Term::mul(
            Term::mul(Term::mul(Term::inv(a.clone()), Term::inv(b.clone())), a),
            b,
        )
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Param(_) | Term::Identity => {}
            Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Inv(a) => a.collect_vars(out),
        }
    }

    fn max_param(&self) -> Option<usize> {
        match self {
            Term::Param(i) => Some(*i),
            Term::Var(_) | Term::Identity => None,
            Term::Mul(a, b) => a.max_param().max(b.max_param()),
            Term::Inv(a) => a.max_param(),
        }
    }

    fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Param(_) | Term::Identity => 1,
            Term::Mul(a, b) => 1 + a.size() + b.size(),
            Term::Inv(a) => 1 + a.size(),
        }
    }
}

/// A first-order formula in the language of groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    /// `a → b`, written `!a | b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn and_all<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// `a·b = b·a`.
    pub fn commute(a: Term, b: Term) -> Formula {
        Formula::eq(Term::mul(a.clone(), b.clone()), Term::mul(b, a))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Number of parameter slots, i.e. one more than the largest slot used.
    pub fn param_count(&self) -> usize {
        self.max_param().map_or(0, |m| m + 1)
    }

    fn max_param(&self) -> Option<usize> {
        match self {
            Formula::Eq(a, b) => a.max_param().max(b.max_param()),
            Formula::And(a, b) | Formula::Or(a, b) => a.max_param().max(b.max_param()),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.max_param(),
        }
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::And(a, b) | Formula::Or(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Not(a) => a.quantifier_depth(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.quantifier_depth(),
        }
    }

    /// Number of AST nodes, terms included.
    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(a, b) => 1 + a.size() + b.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
        }
    }
}

/// `order^depth × size`, saturating.
pub fn cost_estimate(f: &Formula, order: usize) -> u128 {
    (order as u128)
        .saturating_pow(f.quantifier_depth() as u32)
        .saturating_mul(f.size() as u128)
}

pub fn quantifier_depth(f: &Formula) -> usize {
    f.quantifier_depth()
}
