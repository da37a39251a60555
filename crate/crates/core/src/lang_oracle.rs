//! Brute-force language semantics truncated at a maximum word length.
//!
//! Every function here works by explicit enumeration of words, so it is slow
//! but independent of the derivative machinery; the test suites use it as
//! ground truth. Each product, shuffle and star node discards words longer
//! than the limit as soon as they are formed, which keeps the computation
//! finite and exact for `L ∩ Σ^{≤ℓ}`.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{Alphabet, Expr, ExprArena, ExprSet, Node, Symbol, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("length limit {requested} exceeds the oracle cap {cap}")]
    LengthCap { requested: usize, cap: usize },
    #[error("bounded language exceeds {cap} words")]
    TooManyWords { cap: usize },
}

/// Resource limits for the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_len: usize,
    pub max_words: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_len: 12,
            max_words: 1_000_000,
        }
    }
}

impl OracleConfig {
    fn check_len(&self, len: usize) -> Result<(), OracleError> {
        if len > self.max_len {
            Err(OracleError::LengthCap {
                requested: len,
                cap: self.max_len,
            })
        } else {
            Ok(())
        }
    }
}

/// A finite word over an alphabet's symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Parses concatenated symbol tokens, e.g. `a1a2b`. The empty string
    /// and `@` denote the empty word; whitespace is ignored.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Word, SyntaxError> {
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        if text.trim() == "@" {
            return Ok(Word::empty());
        }
        while i < bytes.len() {
            match bytes[i] {
                b' ' | b'\t' => i += 1,
                b'a'..=b'z' => {
                    let start = i;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let name = &text[start..i];
                    let s = alphabet
                        .lookup(name)
                        .ok_or_else(|| SyntaxError::UnknownSymbol {
                            pos: start,
                            name: name.to_string(),
                        })?;
                    out.push(s);
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(SyntaxError::Lex { pos: i, ch });
                }
            }
        }
        Ok(Word(out))
    }

    /// Concatenated symbol names; the empty word renders as the empty string.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        self.0.iter().map(|&s| alphabet.name(s)).collect()
    }

    /// Every word over `alphabet` of length exactly `len`, in lexicographic
    /// order of symbol indices.
    pub fn all_of_length(alphabet: &Alphabet, len: usize) -> Vec<Word> {
        let syms: Vec<Symbol> = alphabet.symbols().collect();
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|w| {
                    syms.iter().map(move |&s| {
                        let mut v = w.0.clone();
                        v.push(s);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }

    /// Every word of length at most `max_len`, shortest first.
    pub fn all_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
        (0..=max_len)
            .flat_map(|n| Word::all_of_length(alphabet, n))
            .collect()
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

/// All interleavings of `x` and `y` that preserve the order within each.
pub fn shuffle_words(x: &Word, y: &Word) -> HashSet<Word> {
    fn go(x: &[Symbol], y: &[Symbol], buf: &mut Vec<Symbol>, out: &mut HashSet<Word>) {
        if x.is_empty() || y.is_empty() {
            let mut w = buf.clone();
            w.extend_from_slice(x);
            w.extend_from_slice(y);
            out.insert(Word(w));
            return;
        }
        buf.push(x[0]);
        go(&x[1..], y, buf, out);
        buf.pop();
        buf.push(y[0]);
        go(x, &y[1..], buf, out);
        buf.pop();
    }
    let mut out = HashSet::new();
    go(&x.0, &y.0, &mut Vec::with_capacity(x.len() + y.len()), &mut out);
    out
}

/// `L ∩ Σ^{≤limit}` for some language `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLang {
    limit: usize,
    words: HashSet<Word>,
}

impl BoundedLang {
    /// Builds a bounded language, dropping words longer than `limit`.
    pub fn new(limit: usize, words: impl IntoIterator<Item = Word>) -> Self {
        BoundedLang {
            limit,
            words: words.into_iter().filter(|w| w.len() <= limit).collect(),
        }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }

    /// Words in shortlex order.
    pub fn sorted(&self) -> Vec<Word> {
        let mut v: Vec<Word> = self.words.iter().cloned().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    /// Restricts to a smaller limit.
    pub fn truncate(&self, limit: usize) -> BoundedLang {
        BoundedLang::new(limit.min(self.limit), self.words.iter().cloned())
    }

    pub fn union(&self, other: &BoundedLang) -> BoundedLang {
        let limit = self.limit.min(other.limit);
        BoundedLang::new(limit, self.words.iter().chain(other.words.iter()).cloned())
    }

    /// Concatenation, truncated at the smaller of the two limits.
    pub fn concat(&self, other: &BoundedLang) -> BoundedLang {
        let limit = self.limit.min(other.limit);
        BoundedLang {
            limit,
            words: concat_sets(&self.words, &other.words, limit),
        }
    }

    /// Language-level shuffle, truncated at the smaller of the two limits.
    pub fn shuffle(&self, other: &BoundedLang) -> BoundedLang {
        let limit = self.limit.min(other.limit);
        BoundedLang {
            limit,
            words: shuffle_sets(&self.words, &other.words, limit),
        }
    }

    /// `a·L`, with the limit raised by one.
    pub fn prefixed(&self, a: Symbol) -> BoundedLang {
        BoundedLang {
            limit: self.limit + 1,
            words: self
                .words
                .iter()
                .map(|w| {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.push(a);
                    v.extend_from_slice(w.symbols());
                    Word(v)
                })
                .collect(),
        }
    }
}

/// `a⁻¹L = { x | ax ∈ L }`, with the limit lowered by one.
pub fn left_quotient(lang: &BoundedLang, a: Symbol) -> BoundedLang {
    BoundedLang {
        limit: lang.limit.saturating_sub(1),
        words: lang
            .words
            .iter()
            .filter(|w| w.first() == Some(a))
            .map(|w| Word(w.0[1..].to_vec()))
            .collect(),
    }
}

fn concat_sets(a: &HashSet<Word>, b: &HashSet<Word>, limit: usize) -> HashSet<Word> {
    let mut out = HashSet::new();
    for x in a {
        for y in b {
            if x.len() + y.len() <= limit {
                out.insert(x.concat(y));
            }
        }
    }
    out
}

fn shuffle_sets(a: &HashSet<Word>, b: &HashSet<Word>, limit: usize) -> HashSet<Word> {
    let mut out = HashSet::new();
    for x in a {
        for y in b {
            if x.len() + y.len() <= limit {
                out.extend(shuffle_words(x, y));
            }
        }
    }
    out
}

struct Evaluator<'a> {
    arena: &'a ExprArena,
    limit: usize,
    cap: usize,
    memo: HashMap<Expr, Rc<HashSet<Word>>>,
}

impl Evaluator<'_> {
    fn guard(&self, set: HashSet<Word>) -> Result<Rc<HashSet<Word>>, OracleError> {
        if set.len() > self.cap {
            Err(OracleError::TooManyWords { cap: self.cap })
        } else {
            Ok(Rc::new(set))
        }
    }

    fn eval(&mut self, e: Expr) -> Result<Rc<HashSet<Word>>, OracleError> {
        if let Some(l) = self.memo.get(&e) {
            return Ok(Rc::clone(l));
        }
        let limit = self.limit;
        let set = match self.arena.node(e) {
            Node::Empty => HashSet::new(),
            Node::Eps => HashSet::from([Word::empty()]),
            Node::Sym(s) => {
                if limit >= 1 {
                    HashSet::from([Word(vec![s])])
                } else {
                    HashSet::new()
                }
            }
            Node::Union(a, b) => {
                let (la, lb) = (self.eval(a)?, self.eval(b)?);
                la.union(&lb).cloned().collect()
            }
            Node::Concat(a, b) => {
                let (la, lb) = (self.eval(a)?, self.eval(b)?);
                concat_sets(&la, &lb, limit)
            }
            Node::Shuffle(a, b) => {
                let (la, lb) = (self.eval(a)?, self.eval(b)?);
                shuffle_sets(&la, &lb, limit)
            }
            Node::Star(a) => {
                let la = self.eval(a)?;
                let step: Vec<&Word> = la.iter().filter(|w| !w.is_empty()).collect();
                let mut result = HashSet::from([Word::empty()]);
                let mut frontier = vec![Word::empty()];
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for x in &frontier {
                        for y in &step {
                            if x.len() + y.len() <= limit {
                                let w = x.concat(y);
                                if result.insert(w.clone()) {
                                    next.push(w);
                                }
                            }
                        }
                    }
                    if result.len() > self.cap {
                        return Err(OracleError::TooManyWords { cap: self.cap });
                    }
                    frontier = next;
                }
                result
            }
        };
        let rc = self.guard(set)?;
        self.memo.insert(e, Rc::clone(&rc));
        Ok(rc)
    }
}

/// `L(e) ∩ Σ^{≤limit}` by structural recursion.
pub fn bounded_language(
    arena: &ExprArena,
    e: Expr,
    limit: usize,
    cfg: &OracleConfig,
) -> Result<BoundedLang, OracleError> {
    bounded_language_of_set(arena, &ExprSet::singleton(e), limit, cfg)
}

/// `L(S) ∩ Σ^{≤limit}` where `L(S)` is the union of the members' languages.
pub fn bounded_language_of_set(
    arena: &ExprArena,
    set: &ExprSet,
    limit: usize,
    cfg: &OracleConfig,
) -> Result<BoundedLang, OracleError> {
    cfg.check_len(limit)?;
    let mut ev = Evaluator {
        arena,
        limit,
        cap: cfg.max_words,
        memo: HashMap::new(),
    };
    let mut words = HashSet::new();
    for e in set {
        words.extend(ev.eval(e)?.iter().cloned());
    }
    Ok(BoundedLang { limit, words })
}

/// Whether `w ∈ L(e)`, decided by enumeration.
pub fn member_bruteforce(
    arena: &ExprArena,
    e: Expr,
    w: &Word,
    cfg: &OracleConfig,
) -> Result<bool, OracleError> {
    Ok(bounded_language(arena, e, w.len(), cfg)?.contains(w))
}
