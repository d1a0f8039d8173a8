//! Curry-style simple types: the typability sieve and typable-term counts.
//!
//! Inference walks the term with a context stack holding one type variable
//! per enclosing lambda. Occurrences of the same free index (same value
//! relative to the binders above it) share one variable, so an open term
//! counts as typable iff it is typable in some consistent context. Each
//! application unifies the function type against `argument -> fresh`,
//! with eager substitution and the occurs check; a clash or cycle means
//! the term is untypable, which is a result, not an error.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::counting::{CountTable, FreeBound};
use crate::term::Term;
use crate::unrank::unrank_in;

/// A simple type: a variable or an arrow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Var(u32),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(domain: SimpleType, codomain: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(domain), Box::new(codomain))
    }
}

fn var_name(id: u32) -> String {
    const GREEK: [char; 24] = [
        'α', 'β', 'γ', 'δ', 'ε', 'ζ', 'η', 'θ', 'ι', 'κ', 'λ', 'μ', 'ν', 'ξ', 'ο', 'π',
        'ρ', 'σ', 'τ', 'υ', 'φ', 'χ', 'ψ', 'ω',
    ];
    let letter = GREEK[(id % 24) as usize];
    match id / 24 {
        0 => letter.to_string(),
        generation => format!("{letter}{generation}"),
    }
}

/// Arrows print right-associated: `α → β → γ` is `α → (β → γ)`.
impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Var(v) => f.write_str(&var_name(*v)),
            SimpleType::Arrow(domain, codomain) => {
                match domain.as_ref() {
                    SimpleType::Arrow(..) => write!(f, "({domain})")?,
                    SimpleType::Var(_) => write!(f, "{domain}")?,
                }
                write!(f, " → {codomain}")
            }
        }
    }
}

#[derive(Default)]
struct Unifier {
    bindings: Vec<Option<SimpleType>>,
}

impl Unifier {
    fn fresh(&mut self) -> u32 {
        self.bindings.push(None);
        (self.bindings.len() - 1) as u32
    }

    /// Follows variable bindings at the root only.
    fn shallow(&self, ty: &SimpleType) -> SimpleType {
        let mut cur = ty;
        while let SimpleType::Var(v) = cur {
            match &self.bindings[*v as usize] {
                Some(inner) => cur = inner,
                None => break,
            }
        }
        cur.clone()
    }

    fn occurs(&self, var: u32, ty: &SimpleType) -> bool {
        match ty {
            SimpleType::Var(v) => match &self.bindings[*v as usize] {
                Some(inner) => self.occurs(var, inner),
                None => *v == var,
            },
            SimpleType::Arrow(d, c) => self.occurs(var, d) || self.occurs(var, c),
        }
    }

    fn unify(&mut self, a: &SimpleType, b: &SimpleType) -> bool {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (a, b) {
            (SimpleType::Var(x), SimpleType::Var(y)) if x == y => true,
            (SimpleType::Var(x), t) | (t, SimpleType::Var(x)) => {
                if self.occurs(x, &t) {
                    false
                } else {
                    self.bindings[x as usize] = Some(t);
                    true
                }
            }
            (SimpleType::Arrow(d1, c1), SimpleType::Arrow(d2, c2)) => {
                self.unify(&d1, &d2) && self.unify(&c1, &c2)
            }
        }
    }

    /// Full substitution; terminates because occurs checks keep the
    /// bindings acyclic, and a second application changes nothing.
    fn apply(&self, ty: &SimpleType) -> SimpleType {
        match ty {
            SimpleType::Var(v) => match &self.bindings[*v as usize] {
                Some(inner) => self.apply(inner),
                None => ty.clone(),
            },
            SimpleType::Arrow(d, c) => SimpleType::arrow(self.apply(d), self.apply(c)),
        }
    }
}

struct Inference {
    unifier: Unifier,
    context: Vec<u32>,
    free: HashMap<u64, u32>,
    #[cfg(debug_assertions)]
    constraints: Vec<(SimpleType, SimpleType)>,
}

impl Inference {
    fn walk(&mut self, t: &Term) -> Option<SimpleType> {
        match t {
            Term::Index(i) => {
                let var = if (*i as usize) <= self.context.len() {
                    self.context[self.context.len() - *i as usize]
                } else {
                    // free index; identified by its value below the binders
                    let key = i - self.context.len() as u64;
                    let unifier = &mut self.unifier;
                    *self.free.entry(key).or_insert_with(|| unifier.fresh())
                };
                Some(SimpleType::Var(var))
            }
            Term::Abs(body) => {
                let domain = self.unifier.fresh();
                self.context.push(domain);
                let codomain = self.walk(body);
                self.context.pop();
                Some(SimpleType::arrow(SimpleType::Var(domain), codomain?))
            }
            Term::App(fun, arg) => {
                let fun_ty = self.walk(fun)?;
                let arg_ty = self.walk(arg)?;
                let result = self.unifier.fresh();
                let wanted = SimpleType::arrow(arg_ty, SimpleType::Var(result));
                #[cfg(debug_assertions)]
                self.constraints.push((fun_ty.clone(), wanted.clone()));
                if self.unifier.unify(&fun_ty, &wanted) {
                    Some(SimpleType::Var(result))
                } else {
                    None
                }
            }
        }
    }
}

fn infer_core(t: &Term) -> Option<(Unifier, SimpleType)> {
    let mut inference = Inference {
        unifier: Unifier::default(),
        context: Vec::new(),
        free: HashMap::new(),
        #[cfg(debug_assertions)]
        constraints: Vec::new(),
    };
    let ty = inference.walk(t)?;
    // every recorded constraint must be solved by the final substitution
    #[cfg(debug_assertions)]
    for (a, b) in &inference.constraints {
        debug_assert_eq!(
            inference.unifier.apply(a),
            inference.unifier.apply(b),
            "substitution is not a solution"
        );
    }
    Some((inference.unifier, ty))
}

/// Renumbers type variables in order of first appearance, left to right.
fn canonical(ty: &SimpleType, names: &mut HashMap<u32, u32>) -> SimpleType {
    match ty {
        SimpleType::Var(v) => {
            let next = names.len() as u32;
            SimpleType::Var(*names.entry(*v).or_insert(next))
        }
        SimpleType::Arrow(d, c) => {
            let domain = canonical(d, names);
            let codomain = canonical(c, names);
            SimpleType::arrow(domain, codomain)
        }
    }
}

/// The principal simple type of `t`, with variables named in first-use
/// order, or `None` if the term is untypable.
pub fn infer(t: &Term) -> Option<SimpleType> {
    let (unifier, ty) = infer_core(t)?;
    Some(canonical(&unifier.apply(&ty), &mut HashMap::new()))
}

pub fn is_typable(t: &Term) -> bool {
    infer_core(t).is_some()
}

/// `T(m, n)`: how many terms of size `n` with at most `m` free indices
/// are simply typable, by exhaustive enumeration of the class.
pub fn count_typable(table: &mut CountTable, m: FreeBound, n: u64) -> BigUint {
    let m = m.resolve(n);
    table.materialize(m, n);
    count_typable_in(table, m, n)
}

/// Enumeration core; the table must already cover `(m, n)`.
pub(crate) fn count_typable_in(table: &CountTable, m: u64, n: u64) -> BigUint {
    let total = table.get(m, n);
    let mut typable = 0u64;
    if let Some(total) = total.to_u64() {
        for k in 1..=total {
            if is_typable(&unrank_in(table, m, n, BigUint::from(k))) {
                typable += 1;
            }
        }
        BigUint::from(typable)
    } else {
        // beyond exhaustive reach; kept for completeness
        let mut found = BigUint::zero();
        let mut k = BigUint::from(1u32);
        while k <= *total {
            if is_typable(&unrank_in(table, m, n, k.clone())) {
                found += 1u32;
            }
            k += 1u32;
        }
        found
    }
}
