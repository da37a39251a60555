//! Abstract syntax for regular expressions with shuffle.
//!
//! Expressions live in an [`ExprArena`], which hash-conses every node: two
//! structurally equal expressions built in the same arena always receive the
//! same [`Expr`] handle, so equality and hashing of handles coincide with
//! structural equality. Size, alphabetic width and nullability are cached per
//! node at construction time.
//!
//! The arena is built through `&mut` access and read through `&` access;
//! expressions are never mutated after construction.
//!
//! Concrete syntax (tightest binding first):
//!
//! | token     | meaning                          |
//! |-----------|----------------------------------|
//! | `[a-z][0-9]*` | alphabet symbol              |
//! | `@`       | the empty word ε                 |
//! | `$`       | the empty language ∅ (top level only) |
//! | `*`       | postfix Kleene star              |
//! | `.` / juxtaposition | concatenation          |
//! | `#`       | shuffle                          |
//! | `+`       | union                            |
//!
//! Binary operators are left-associative; parentheses group.

mod parser;
mod printer;

use std::collections::{btree_set, BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

pub use printer::Pretty;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    Lex { pos: usize, ch: char },
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at offset {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("`$` (the empty language) may only appear as the whole expression (offset {pos})")]
    EmptyInside { pos: usize },
    #[error("invalid symbol name `{0}`: expected [a-z][0-9]*")]
    InvalidSymbolName(String),
    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
}

/// An alphabet symbol, identified by its position in the owning [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Self {
        Symbol(i as u32)
    }
}

/// Checks the `[a-z][0-9]*` shape required of symbol names.
pub fn is_valid_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| c.is_ascii_digit())
}

/// An ordered, duplicate-free, non-empty list of symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, SyntaxError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet {
            names: Vec::new(),
            lookup: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if !is_valid_symbol_name(&name) {
                return Err(SyntaxError::InvalidSymbolName(name));
            }
            if out.lookup.contains_key(&name) {
                return Err(SyntaxError::DuplicateSymbol(name));
            }
            out.lookup
                .insert(name.clone(), Symbol::from_index(out.names.len()));
            out.names.push(name);
        }
        if out.names.is_empty() {
            return Err(SyntaxError::EmptyAlphabet);
        }
        Ok(out)
    }

    /// The canonical alphabet of size `k`: `a`, `b`, ... for `k <= 26`,
    /// otherwise `a1`, ..., `ak`.
    ///
    /// # Panics
    /// If `k == 0`.
    pub fn standard(k: usize) -> Self {
        assert!(k > 0, "alphabet size must be positive");
        if k <= 26 {
            Self::new((0..k).map(|i| char::from(b'a' + i as u8).to_string()))
        } else {
            Self::new((1..=k).map(|i| format!("a{i}")))
        }
        .expect("generated names are valid")
    }

    /// Number of symbols (the `k` of the size analysis).
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(Symbol::from_index)
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }
}

/// Handle to a hash-consed expression inside an [`ExprArena`].
///
/// Handles from different arenas must not be mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(u32);

impl Expr {
    pub fn id(self) -> usize {
        self.0 as usize
    }
}

/// One layer of expression structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Empty,
    Eps,
    Sym(Symbol),
    Union(Expr, Expr),
    Concat(Expr, Expr),
    Shuffle(Expr, Expr),
    Star(Expr),
}

#[derive(Debug, Clone)]
struct Entry {
    node: Node,
    size: u64,
    width: u64,
    nullable: bool,
}

/// Hash-consing store for expressions over a fixed alphabet.
#[derive(Debug, Clone)]
pub struct ExprArena {
    alphabet: Alphabet,
    entries: Vec<Entry>,
    table: HashMap<Node, Expr>,
    pub(crate) pi_cache: HashMap<Expr, Rc<ExprSet>>,
    pub(crate) pd_cache: HashMap<(Expr, Symbol), Rc<ExprSet>>,
}

const EMPTY: Expr = Expr(0);
const EPS: Expr = Expr(1);

impl ExprArena {
    pub fn new(alphabet: Alphabet) -> Self {
        let mut arena = ExprArena {
            alphabet,
            entries: Vec::new(),
            table: HashMap::new(),
            pi_cache: HashMap::new(),
            pd_cache: HashMap::new(),
        };
        let empty = arena.intern(Node::Empty);
        let eps = arena.intern(Node::Eps);
        debug_assert_eq!((empty, eps), (EMPTY, EPS));
        arena
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Removes every node interned after the arena held `mark` nodes.
    /// Callers must not hold handles to, or cached sets mentioning, those nodes.
    pub(crate) fn rollback(&mut self, mark: usize) {
        while self.entries.len() > mark {
            let entry = self.entries.pop().expect("nonempty");
            self.table.remove(&entry.node);
        }
    }

    /// Number of distinct nodes interned so far.
    pub fn node_count(&self) -> usize {
        self.entries.len()
    }

    fn intern(&mut self, node: Node) -> Expr {
        if let Some(&e) = self.table.get(&node) {
            return e;
        }
        let (size, width, nullable) = match node {
            Node::Empty => (1, 0, false),
            Node::Eps => (1, 0, true),
            Node::Sym(_) => (1, 1, false),
            Node::Star(a) => (self.size(a) + 1, self.width(a), true),
            Node::Union(a, b) => (
                self.size(a) + self.size(b) + 1,
                self.width(a) + self.width(b),
                self.nullable(a) || self.nullable(b),
            ),
            Node::Concat(a, b) | Node::Shuffle(a, b) => (
                self.size(a) + self.size(b) + 1,
                self.width(a) + self.width(b),
                self.nullable(a) && self.nullable(b),
            ),
        };
        let e = Expr(u32::try_from(self.entries.len()).expect("expression arena overflow"));
        self.entries.push(Entry {
            node,
            size,
            width,
            nullable,
        });
        self.table.insert(node, e);
        e
    }

    fn entry(&self, e: Expr) -> &Entry {
        &self.entries[e.id()]
    }

    pub fn node(&self, e: Expr) -> Node {
        self.entry(e).node
    }

    pub fn empty(&self) -> Expr {
        EMPTY
    }

    pub fn eps(&self) -> Expr {
        EPS
    }

    pub fn is_empty_lang(&self, e: Expr) -> bool {
        e == EMPTY
    }

    pub fn is_eps(&self, e: Expr) -> bool {
        e == EPS
    }

    pub fn sym(&mut self, s: Symbol) -> Expr {
        assert!(s.index() < self.alphabet.len(), "symbol outside alphabet");
        self.intern(Node::Sym(s))
    }

    /// Looks a symbol up by name and interns it.
    pub fn sym_named(&mut self, name: &str) -> Option<Expr> {
        let s = self.alphabet.lookup(name)?;
        Some(self.sym(s))
    }

    fn check_operand(&self, e: Expr) {
        assert!(e != EMPTY, "∅ cannot occur inside a larger expression");
    }

    /// Raw union node; no simplification.
    ///
    /// # Panics
    /// If either operand is ∅.
    pub fn union(&mut self, a: Expr, b: Expr) -> Expr {
        self.check_operand(a);
        self.check_operand(b);
        self.intern(Node::Union(a, b))
    }

    /// Raw concatenation node; no simplification.
    ///
    /// # Panics
    /// If either operand is ∅.
    pub fn concat(&mut self, a: Expr, b: Expr) -> Expr {
        self.check_operand(a);
        self.check_operand(b);
        self.intern(Node::Concat(a, b))
    }

    /// Raw shuffle node; no simplification.
    ///
    /// # Panics
    /// If either operand is ∅.
    pub fn shuffle(&mut self, a: Expr, b: Expr) -> Expr {
        self.check_operand(a);
        self.check_operand(b);
        self.intern(Node::Shuffle(a, b))
    }

    /// Raw star node; no simplification.
    ///
    /// # Panics
    /// If the operand is ∅.
    pub fn star(&mut self, a: Expr) -> Expr {
        self.check_operand(a);
        self.intern(Node::Star(a))
    }

    /// Number of symbols in the expression, parentheses not counted.
    pub fn size(&self, e: Expr) -> u64 {
        self.entry(e).size
    }

    /// Number of alphabet-symbol leaves.
    pub fn width(&self, e: Expr) -> u64 {
        self.entry(e).width
    }

    /// Whether the empty word belongs to the language of `e`.
    pub fn nullable(&self, e: Expr) -> bool {
        self.entry(e).nullable
    }

    /// `αβ` with the unit rules `εβ = β` and `αε = α`.
    pub fn concat_unit(&mut self, a: Expr, b: Expr) -> Expr {
        if a == EPS {
            b
        } else if b == EPS {
            a
        } else {
            self.concat(a, b)
        }
    }

    /// `α ⧢ β` with the unit rules `ε ⧢ β = β` and `α ⧢ ε = α`.
    pub fn shuffle_unit(&mut self, a: Expr, b: Expr) -> Expr {
        if a == EPS {
            b
        } else if b == EPS {
            a
        } else {
            self.shuffle(a, b)
        }
    }

    /// `Sβ`, elementwise with unit collapse; `S∅ = ∅`.
    pub fn mk_concat(&mut self, s: &ExprSet, beta: Expr) -> ExprSet {
        if beta == EMPTY {
            return ExprSet::new();
        }
        s.iter().map(|a| self.concat_unit(a, beta)).collect()
    }

    /// `S ⧢ T`, elementwise with unit collapse.
    pub fn mk_shuffle_sets(&mut self, s: &ExprSet, t: &ExprSet) -> ExprSet {
        let mut out = ExprSet::new();
        for a in s.iter() {
            for b in t.iter() {
                out.insert(self.shuffle_unit(a, b));
            }
        }
        out
    }

    /// `S ⧢ {β}`.
    pub fn mk_shuffle_right(&mut self, s: &ExprSet, beta: Expr) -> ExprSet {
        if beta == EMPTY {
            return ExprSet::new();
        }
        s.iter().map(|a| self.shuffle_unit(a, beta)).collect()
    }

    /// `{α} ⧢ T`.
    pub fn mk_shuffle_left(&mut self, alpha: Expr, t: &ExprSet) -> ExprSet {
        if alpha == EMPTY {
            return ExprSet::new();
        }
        t.iter().map(|b| self.shuffle_unit(alpha, b)).collect()
    }

    /// Parses `text` against this arena's alphabet.
    pub fn parse(&mut self, text: &str) -> Result<Expr, SyntaxError> {
        parser::parse(self, text)
    }

    /// Renders `e` with minimal parentheses; `parse` inverts it.
    pub fn pretty_print(&self, e: Expr) -> String {
        self.display(e).to_string()
    }

    pub fn display(&self, e: Expr) -> Pretty<'_> {
        Pretty::new(self, e)
    }

    /// Whether ∅ occurs anywhere below the root of `e`.
    pub fn has_inner_empty(&self, e: Expr) -> bool {
        match self.node(e) {
            Node::Empty | Node::Eps | Node::Sym(_) => false,
            Node::Star(a) => a == EMPTY || self.has_inner_empty(a),
            Node::Union(a, b) | Node::Concat(a, b) | Node::Shuffle(a, b) => {
                a == EMPTY || b == EMPTY || self.has_inner_empty(a) || self.has_inner_empty(b)
            }
        }
    }

    /// Builds `a1 ⧢ a2 ⧢ ... ⧢ an` (left-nested) from the first `n` symbols.
    ///
    /// # Panics
    /// If `n` is zero or exceeds the alphabet size.
    pub fn shuffle_chain(&mut self, n: usize) -> Expr {
        assert!(n >= 1 && n <= self.alphabet.len());
        let mut e = self.sym(Symbol::from_index(0));
        for i in 1..n {
            let s = self.sym(Symbol::from_index(i));
            e = self.shuffle(e, s);
        }
        e
    }
}

/// A finite, duplicate-free set of expressions from one arena.
///
/// Iteration follows handle order, which is the (deterministic) interning
/// order of the arena.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExprSet(BTreeSet<Expr>);

impl ExprSet {
    pub fn new() -> Self {
        ExprSet(BTreeSet::new())
    }

    pub fn singleton(e: Expr) -> Self {
        ExprSet(BTreeSet::from([e]))
    }

    pub fn insert(&mut self, e: Expr) -> bool {
        self.0.insert(e)
    }

    pub fn contains(&self, e: Expr) -> bool {
        self.0.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Expr> + '_ {
        self.0.iter().copied()
    }

    pub fn extend_from(&mut self, other: &ExprSet) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn union(mut self, other: &ExprSet) -> ExprSet {
        self.extend_from(other);
        self
    }

    pub fn is_subset(&self, other: &ExprSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<Expr> for ExprSet {
    fn from_iter<I: IntoIterator<Item = Expr>>(iter: I) -> Self {
        ExprSet(iter.into_iter().collect())
    }
}

impl Extend<Expr> for ExprSet {
    fn extend<I: IntoIterator<Item = Expr>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for ExprSet {
    type Item = Expr;
    type IntoIter = btree_set::IntoIter<Expr>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a ExprSet {
    type Item = Expr;
    type IntoIter = std::iter::Copied<btree_set::Iter<'a, Expr>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}
