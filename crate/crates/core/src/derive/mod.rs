//! The support function `pi`, partial derivatives, and derivative closures.
//!
//! Both `pi` and the partial derivatives build their results through the
//! arena's set constructors (`mk_concat`, `mk_shuffle_*`), so the unit rules
//! are applied identically on both sides. The closure of an expression under
//! derivatives by nonempty words therefore coincides with `pi` as a set of
//! hash-consed terms, which the test suites check directly.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lang_oracle::{bounded_language, bounded_language_of_set, OracleConfig, OracleError};
use crate::lang_oracle::{BoundedLang, Word};
use crate::syntax::{Expr, ExprArena, ExprSet, Node, Symbol};

mod count;

pub use count::{pi_count, pi_count_with};

/// Default cap on the number of states explored by [`closure`].
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("derivative closure exceeded the budget of {budget} states")]
    StateBudget { budget: usize },
}

pub(crate) fn pi_rc(arena: &mut ExprArena, e: Expr) -> Rc<ExprSet> {
    if let Some(s) = arena.pi_cache.get(&e) {
        return Rc::clone(s);
    }
    let set = match arena.node(e) {
        Node::Empty | Node::Eps => ExprSet::new(),
        Node::Sym(_) => ExprSet::singleton(arena.eps()),
        Node::Star(a) => {
            let pa = pi_rc(arena, a);
            arena.mk_concat(&pa, e)
        }
        Node::Union(a, b) => {
            let (pa, pb) = (pi_rc(arena, a), pi_rc(arena, b));
            pa.as_ref().clone().union(&pb)
        }
        Node::Concat(a, b) => {
            let pa = pi_rc(arena, a);
            let pb = pi_rc(arena, b);
            arena.mk_concat(&pa, b).union(&pb)
        }
        Node::Shuffle(a, b) => {
            let pa = pi_rc(arena, a);
            let pb = pi_rc(arena, b);
            let mut out = arena.mk_shuffle_sets(&pa, &pb);
            out.extend_from(&arena.mk_shuffle_right(&pa, b));
            out.extend_from(&arena.mk_shuffle_left(a, &pb));
            out
        }
    };
    let rc = Rc::new(set);
    arena.pi_cache.insert(e, Rc::clone(&rc));
    rc
}

/// The support `pi(e)`, computed by structural recursion.
pub fn pi(arena: &mut ExprArena, e: Expr) -> ExprSet {
    pi_rc(arena, e).as_ref().clone()
}

/// `|pi(e)|` without copying the set out of the cache.
pub fn pi_len(arena: &mut ExprArena, e: Expr) -> usize {
    pi_rc(arena, e).len()
}

fn pd_rc(arena: &mut ExprArena, e: Expr, a: Symbol) -> Rc<ExprSet> {
    if let Some(s) = arena.pd_cache.get(&(e, a)) {
        return Rc::clone(s);
    }
    let set = match arena.node(e) {
        Node::Empty | Node::Eps => ExprSet::new(),
        Node::Sym(b) => {
            if a == b {
                ExprSet::singleton(arena.eps())
            } else {
                ExprSet::new()
            }
        }
        Node::Star(inner) => {
            let d = pd_rc(arena, inner, a);
            arena.mk_concat(&d, e)
        }
        Node::Union(x, y) => {
            let (dx, dy) = (pd_rc(arena, x, a), pd_rc(arena, y, a));
            dx.as_ref().clone().union(&dy)
        }
        Node::Concat(x, y) => {
            let dx = pd_rc(arena, x, a);
            let mut out = arena.mk_concat(&dx, y);
            if arena.nullable(x) {
                out.extend_from(&pd_rc(arena, y, a));
            }
            out
        }
        Node::Shuffle(x, y) => {
            let dx = pd_rc(arena, x, a);
            let dy = pd_rc(arena, y, a);
            let mut out = arena.mk_shuffle_right(&dx, y);
            out.extend_from(&arena.mk_shuffle_left(x, &dy));
            out
        }
    };
    let rc = Rc::new(set);
    arena.pd_cache.insert((e, a), Rc::clone(&rc));
    rc
}

/// The partial derivatives of `e` with respect to the letter `a`.
pub fn partial_derivative(arena: &mut ExprArena, e: Expr, a: Symbol) -> ExprSet {
    pd_rc(arena, e, a).as_ref().clone()
}

/// `∂_a(S)`, the union of the members' derivatives.
pub fn derivative_of_set(arena: &mut ExprArena, set: &ExprSet, a: Symbol) -> ExprSet {
    let mut out = ExprSet::new();
    for e in set {
        out.extend_from(&pd_rc(arena, e, a));
    }
    out
}

/// `∂_x(e)`: `{e}` for the empty word, then one letter at a time.
pub fn derivative_by_word(arena: &mut ExprArena, e: Expr, x: &Word) -> ExprSet {
    x.symbols()
        .iter()
        .fold(ExprSet::singleton(e), |acc, &a| derivative_of_set(arena, &acc, a))
}

/// Saturation of an expression under partial derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivClosure {
    pub origin: Expr,
    /// Every derivative by any word, the empty word included.
    pub all: ExprSet,
    /// Every derivative by a nonempty word.
    pub proper: ExprSet,
}

/// Result of a breadth-first exploration: states in discovery order (the
/// origin first) and, per state and letter, the derivative set.
pub(crate) struct Exploration {
    pub order: Vec<Expr>,
    pub index: HashMap<Expr, usize>,
    pub edges: Vec<Vec<Rc<ExprSet>>>,
    pub proper: ExprSet,
}

pub(crate) fn explore(
    arena: &mut ExprArena,
    origin: Expr,
    budget: usize,
) -> Result<Exploration, DeriveError> {
    let symbols: Vec<Symbol> = arena.alphabet().symbols().collect();
    let mut order = vec![origin];
    let mut index = HashMap::from([(origin, 0usize)]);
    let mut edges = Vec::new();
    let mut proper = ExprSet::new();
    let mut queue = VecDeque::from([origin]);
    if budget == 0 {
        return Err(DeriveError::StateBudget { budget });
    }
    while let Some(state) = queue.pop_front() {
        let mut row = Vec::with_capacity(symbols.len());
        for &a in &symbols {
            let targets = pd_rc(arena, state, a);
            for t in targets.iter() {
                proper.insert(t);
                if !index.contains_key(&t) {
                    if order.len() >= budget {
                        return Err(DeriveError::StateBudget { budget });
                    }
                    index.insert(t, order.len());
                    order.push(t);
                    queue.push_back(t);
                }
            }
            row.push(targets);
        }
        edges.push(row);
    }
    Ok(Exploration {
        order,
        index,
        edges,
        proper,
    })
}

/// `∂(e)` and `∂⁺(e)` by breadth-first saturation, bounded by `budget` states.
pub fn closure(arena: &mut ExprArena, e: Expr, budget: usize) -> Result<DerivClosure, DeriveError> {
    let ex = explore(arena, e, budget)?;
    Ok(DerivClosure {
        origin: e,
        all: ex.order.into_iter().collect(),
        proper: ex.proper,
    })
}

/// Upper bound on `|pi(e)|` obtained by assuming every union is disjoint.
pub fn p_upper(arena: &ExprArena, e: Expr) -> BigUint {
    match arena.node(e) {
        Node::Empty | Node::Eps => BigUint::zero(),
        Node::Sym(_) => BigUint::one(),
        Node::Star(a) => p_upper(arena, a),
        Node::Union(a, b) | Node::Concat(a, b) => p_upper(arena, a) + p_upper(arena, b),
        Node::Shuffle(a, b) => {
            let (pa, pb) = (p_upper(arena, a), p_upper(arena, b));
            &pa * &pb + pa + pb
        }
    }
}

/// Checks that `pi(e)` is a support of `e` up to words of length `limit`.
///
/// For every `γ` in `{e} ∪ pi(e)` and every letter `a`, the derivatives
/// `∂_a(γ)` must lie in `pi(e)` (so each right-hand side is a sum of support
/// elements), and the equation
/// `L(γ) = a₁·L(∂_{a₁}γ) ∪ … ∪ a_k·L(∂_{a_k}γ) ∪ ε(γ)`
/// must hold on all words of length at most `limit`.
pub fn check_support(
    arena: &mut ExprArena,
    e: Expr,
    limit: usize,
    cfg: &OracleConfig,
) -> Result<bool, OracleError> {
    let support = pi(arena, e);
    let symbols: Vec<Symbol> = arena.alphabet().symbols().collect();
    let mut rows = Vec::new();
    for gamma in std::iter::once(e).chain(support.iter()) {
        let ders: Vec<ExprSet> = symbols
            .iter()
            .map(|&a| partial_derivative(arena, gamma, a))
            .collect();
        if !ders.iter().all(|d| d.is_subset(&support)) {
            return Ok(false);
        }
        rows.push((gamma, ders));
    }
    for (gamma, ders) in rows {
        let lhs = bounded_language(arena, gamma, limit, cfg)?;
        let mut rhs = if arena.nullable(gamma) {
            BoundedLang::new(limit, [Word::empty()])
        } else {
            BoundedLang::new(limit, [])
        };
        if limit >= 1 {
            for (&a, d) in symbols.iter().zip(&ders) {
                let tail = bounded_language_of_set(arena, d, limit - 1, cfg)?;
                rhs = rhs.union(&tail.prefixed(a));
            }
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
