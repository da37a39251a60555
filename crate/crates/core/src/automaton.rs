//! The partial derivative automaton and operations over ε-free NFAs.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derive::{explore, DeriveError};
use crate::lang_oracle::{bounded_language, BoundedLang, OracleConfig, OracleError, Word};
use crate::syntax::{Alphabet, Expr, ExprArena, Symbol, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("malformed automaton JSON: {0}")]
    Json(String),
    #[error("invalid automaton: {0}")]
    Invalid(String),
}

/// An ε-free NFA whose states are labelled by expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    states: Vec<Expr>,
    initial: Vec<usize>,
    finals: Vec<bool>,
    /// `delta[state][symbol]`, sorted and duplicate-free.
    delta: Vec<Vec<Vec<usize>>>,
}

/// Builds the partial derivative automaton of `e`.
///
/// States are `∂(e)` in breadth-first discovery order, so `e` is state 0 and
/// the only initial state. The transition on `a` from `γ` goes to every
/// member of `∂_a(γ)`; the final states are the nullable ones.
pub fn build_apd(arena: &mut ExprArena, e: Expr, budget: usize) -> Result<Nfa, DeriveError> {
    let ex = explore(arena, e, budget)?;
    let delta = ex
        .edges
        .iter()
        .map(|row| {
            row.iter()
                .map(|targets| {
                    let mut v: Vec<usize> = targets.iter().map(|t| ex.index[&t]).collect();
                    v.sort_unstable();
                    v
                })
                .collect()
        })
        .collect();
    let finals = ex.order.iter().map(|&s| arena.nullable(s)).collect();
    Ok(Nfa {
        alphabet: arena.alphabet().clone(),
        states: ex.order,
        initial: vec![0],
        finals,
        delta,
    })
}

impl Nfa {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().flatten().map(Vec::len).sum()
    }

    pub fn label(&self, s: usize) -> Expr {
        self.states[s]
    }

    pub fn labels(&self) -> &[Expr] {
        &self.states
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals[s]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
    }

    pub fn successors(&self, s: usize, a: Symbol) -> &[usize] {
        &self.delta[s][a.index()]
    }

    /// `δ(X, a)` for a sorted set of states.
    pub fn step(&self, from: &[usize], a: Symbol) -> Vec<usize> {
        let mut next: Vec<usize> = from
            .iter()
            .flat_map(|&s| self.delta[s][a.index()].iter().copied())
            .collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    fn accepts_any(&self, set: &[usize]) -> bool {
        set.iter().any(|&s| self.finals[s])
    }

    /// Whether `w` is accepted starting from the states in `from`.
    pub fn accepts_from(&self, from: &[usize], w: &Word) -> bool {
        let mut cur: Vec<usize> = from.to_vec();
        cur.sort_unstable();
        cur.dedup();
        for &a in w.symbols() {
            if cur.is_empty() {
                return false;
            }
            cur = self.step(&cur, a);
        }
        self.accepts_any(&cur)
    }

    /// Membership by subset propagation from the initial states.
    pub fn accepts(&self, w: &Word) -> bool {
        self.accepts_from(&self.initial, w)
    }

    /// All words of length at most `limit` accepted from `from`.
    pub fn accepted_words(&self, from: &[usize], limit: usize) -> BoundedLang {
        fn go(
            nfa: &Nfa,
            cur: &[usize],
            prefix: &mut Vec<Symbol>,
            limit: usize,
            out: &mut Vec<Word>,
        ) {
            if nfa.accepts_any(cur) {
                out.push(Word::new(prefix.clone()));
            }
            if prefix.len() == limit {
                return;
            }
            for a in nfa.alphabet.symbols() {
                let next = nfa.step(cur, a);
                if !next.is_empty() {
                    prefix.push(a);
                    go(nfa, &next, prefix, limit, out);
                    prefix.pop();
                }
            }
        }
        let mut start = from.to_vec();
        start.sort_unstable();
        start.dedup();
        let mut out = Vec::new();
        go(self, &start, &mut Vec::new(), limit, &mut out);
        BoundedLang::new(limit, out)
    }

    /// Checks that the right language of state `s`, up to length `limit`,
    /// equals the brute-force language of its label.
    pub fn right_language_check(
        &self,
        arena: &ExprArena,
        s: usize,
        limit: usize,
        cfg: &OracleConfig,
    ) -> Result<bool, OracleError> {
        let expected = bounded_language(arena, self.states[s], limit, cfg)?;
        Ok(self.accepted_words(&[s], limit) == expected)
    }

    /// Deterministic JSON serialisation.
    pub fn export_json(&self, arena: &ExprArena) -> String {
        let mut transitions = Vec::new();
        for (from, row) in self.delta.iter().enumerate() {
            for a in self.alphabet.symbols() {
                for &to in &row[a.index()] {
                    transitions.push((from, self.alphabet.name(a).to_string(), to));
                }
            }
        }
        let doc = NfaJson {
            alphabet: self.alphabet.names().to_vec(),
            states: self.states.iter().map(|&e| arena.pretty_print(e)).collect(),
            initial: self.initial.clone(),
            finals: self.finals().collect(),
            transitions,
        };
        serde_json::to_string(&doc).expect("automaton serialisation cannot fail")
    }

    /// Graphviz rendering; final states are drawn as double circles.
    pub fn export_dot(&self, arena: &ExprArena) -> String {
        let mut out = String::from("digraph apd {\n  rankdir=LR;\n");
        for (i, &init) in self.initial.iter().enumerate() {
            let _ = writeln!(out, "  __start{i} [shape=point];");
            let _ = writeln!(out, "  __start{i} -> {init};");
        }
        for (i, &e) in self.states.iter().enumerate() {
            let shape = if self.finals[i] { "doublecircle" } else { "circle" };
            let label = arena.pretty_print(e).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  {i} [label=\"{label}\", shape={shape}];");
        }
        for (from, row) in self.delta.iter().enumerate() {
            for a in self.alphabet.symbols() {
                for &to in &row[a.index()] {
                    let _ = writeln!(
                        out,
                        "  {from} -> {to} [label=\"{}\"];",
                        self.alphabet.name(a)
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Reads an automaton written by [`Nfa::export_json`], re-parsing the
    /// state labels into a fresh arena over the stored alphabet.
    pub fn import_json(text: &str) -> Result<(ExprArena, Nfa), AutomatonError> {
        let doc: NfaJson =
            serde_json::from_str(text).map_err(|e| AutomatonError::Json(e.to_string()))?;
        let alphabet = Alphabet::new(doc.alphabet)?;
        let mut arena = ExprArena::new(alphabet.clone());
        let states = doc
            .states
            .iter()
            .map(|s| arena.parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        let n = states.len();
        let check = |i: usize| {
            if i < n {
                Ok(i)
            } else {
                Err(AutomatonError::Invalid(format!("state index {i} out of range")))
            }
        };
        let initial = doc.initial.into_iter().map(check).collect::<Result<Vec<_>, _>>()?;
        let mut finals = vec![false; n];
        for f in doc.finals {
            finals[check(f)?] = true;
        }
        let mut delta = vec![vec![BTreeSet::new(); alphabet.len()]; n];
        for (from, sym, to) in doc.transitions {
            let a = alphabet
                .lookup(&sym)
                .ok_or_else(|| AutomatonError::Invalid(format!("unknown symbol `{sym}`")))?;
            delta[check(from)?][a.index()].insert(check(to)?);
        }
        let delta = delta
            .into_iter()
            .map(|row| row.into_iter().map(|s| s.into_iter().collect()).collect())
            .collect();
        Ok((
            arena,
            Nfa {
                alphabet,
                states,
                initial,
                finals,
                delta,
            },
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NfaJson {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: Vec<usize>,
    #[serde(rename = "final")]
    finals: Vec<usize>,
    transitions: Vec<(usize, String, usize)>,
}

/// Shortest word of length at most `limit` on which the partial derivative
/// automata of `e1` and `e2` disagree, found by a breadth-first walk of the
/// product of their subset spaces.
pub fn distinguishing_word(
    arena: &mut ExprArena,
    e1: Expr,
    e2: Expr,
    limit: usize,
    budget: usize,
) -> Result<Option<Word>, DeriveError> {
    let a1 = build_apd(arena, e1, budget)?;
    let a2 = build_apd(arena, e2, budget)?;
    let start = (a1.initial.clone(), a2.initial.clone());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::<Symbol>::new())]);
    while let Some(((s1, s2), word)) = queue.pop_front() {
        if a1.accepts_any(&s1) != a2.accepts_any(&s2) {
            return Ok(Some(Word::new(word)));
        }
        if word.len() == limit {
            continue;
        }
        for a in arena.alphabet().symbols() {
            let next = (a1.step(&s1, a), a2.step(&s2, a));
            if next.0.is_empty() && next.1.is_empty() {
                continue;
            }
            if seen.len() >= budget {
                return Err(DeriveError::StateBudget { budget });
            }
            if seen.insert(next.clone()) {
                let mut w = word.clone();
                w.push(a);
                queue.push_back((next, w));
            }
        }
    }
    Ok(None)
}

/// Whether `e1` and `e2` accept the same words of length at most `limit`.
pub fn bounded_equiv(
    arena: &mut ExprArena,
    e1: Expr,
    e2: Expr,
    limit: usize,
    budget: usize,
) -> Result<bool, DeriveError> {
    Ok(distinguishing_word(arena, e1, e2, limit, budget)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::{pi, DEFAULT_STATE_BUDGET};

    fn arena() -> ExprArena {
        ExprArena::new(Alphabet::new(["a", "b", "c", "a1", "a2", "a3"]).unwrap())
    }

    fn apd(ar: &mut ExprArena, text: &str) -> Nfa {
        let e = ar.parse(text).unwrap();
        build_apd(ar, e, DEFAULT_STATE_BUDGET).unwrap()
    }

    fn word(ar: &ExprArena, s: &str) -> Word {
        Word::parse(ar.alphabet(), s).unwrap()
    }

    #[test]
    fn state_counts() {
        let mut ar = arena();
        assert_eq!(apd(&mut ar, "a1 # a2").state_count(), 4);
        let eps = apd(&mut ar, "@");
        assert_eq!(eps.state_count(), 1);
        assert!(eps.is_final(0));
        assert_eq!(eps.transition_count(), 0);

        let star = apd(&mut ar, "(a + b)*");
        assert_eq!(star.state_count(), 1);
        assert!(star.is_final(0));
        let (a, b) = (ar.alphabet().lookup("a").unwrap(), ar.alphabet().lookup("b").unwrap());
        assert_eq!(star.successors(0, a), [0]);
        assert_eq!(star.successors(0, b), [0]);
    }

    #[test]
    fn state_count_is_pi_plus_origin() {
        let mut ar = arena();
        for text in ["(a b)*", "a # b* # c", "(a + b)* a", "((a # b) c)*"] {
            let e = ar.parse(text).unwrap();
            let p = pi(&mut ar, e);
            let n = build_apd(&mut ar, e, DEFAULT_STATE_BUDGET).unwrap().state_count();
            assert_eq!(n, p.len() + usize::from(!p.contains(e)), "{text}");
        }
    }

    #[test]
    fn membership() {
        let mut ar = arena();
        let m = apd(&mut ar, "a # b");
        assert!(m.accepts(&word(&ar, "ba")));
        assert!(m.accepts(&word(&ar, "ab")));
        assert!(!m.accepts(&word(&ar, "aa")));
        assert!(!m.accepts(&word(&ar, "")));

        let m = apd(&mut ar, "a1 # a2 # a3");
        let al = ar.alphabet().clone();
        let three = Alphabet::new(["a1", "a2", "a3"]).unwrap();
        let mut accepted = 0;
        for w3 in Word::all_of_length(&three, 3) {
            let w = Word::parse(&al, &w3.render(&three)).unwrap();
            let mut syms = w.symbols().to_vec();
            syms.sort();
            syms.dedup();
            assert_eq!(m.accepts(&w), syms.len() == 3);
            accepted += usize::from(m.accepts(&w));
        }
        assert_eq!(accepted, 6);
    }

    #[test]
    fn right_languages() {
        let mut ar = arena();
        let cfg = OracleConfig::default();
        for (text, limit) in [("a # b", 4), ("(a b)* # c", 5), ("a", 3)] {
            let m = apd(&mut ar, text);
            for s in 0..m.state_count() {
                assert!(m.right_language_check(&ar, s, limit, &cfg).unwrap(), "{text} state {s}");
            }
        }
    }

    #[test]
    fn equivalence() {
        let mut ar = arena();
        let x = ar.parse("a # b").unwrap();
        let y = ar.parse("a b + b a").unwrap();
        assert!(bounded_equiv(&mut ar, x, y, 6, DEFAULT_STATE_BUDGET).unwrap());
        let y = ar.parse("a b").unwrap();
        assert!(!bounded_equiv(&mut ar, x, y, 2, DEFAULT_STATE_BUDGET).unwrap());
        let x = ar.parse("a (b # c)").unwrap();
        let y = ar.parse("a b # c").unwrap();
        let w = distinguishing_word(&mut ar, x, y, 3, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(w.map(|w| w.render(ar.alphabet())), Some("cab".to_string()));
        assert!(bounded_equiv(&mut ar, x, y, 2, DEFAULT_STATE_BUDGET).unwrap());
    }

    #[test]
    fn json_export() {
        let mut ar = ExprArena::new(Alphabet::new(["a"]).unwrap());
        let m = apd(&mut ar, "@");
        assert_eq!(
            m.export_json(&ar),
            r#"{"alphabet":["a"],"states":["@"],"initial":[0],"final":[0],"transitions":[]}"#
        );
        let m = apd(&mut ar, "a");
        assert_eq!(
            m.export_json(&ar),
            r#"{"alphabet":["a"],"states":["a","@"],"initial":[0],"final":[1],"transitions":[[0,"a",1]]}"#
        );
    }

    #[test]
    fn json_round_trip() {
        let mut ar = arena();
        let m = apd(&mut ar, "(a b)* # c + a1*");
        let text = m.export_json(&ar);
        let (ar2, m2) = Nfa::import_json(&text).unwrap();
        assert_eq!(m2.export_json(&ar2), text);
        assert_eq!(m2.state_count(), m.state_count());
        assert!(Nfa::import_json("{").is_err());
        let bad = text.replace("\"initial\":[0]", "\"initial\":[99]");
        assert!(matches!(Nfa::import_json(&bad), Err(AutomatonError::Invalid(_))));
    }

    #[test]
    fn dot_export() {
        let mut ar = arena();
        let m = apd(&mut ar, "a # b");
        let dot = m.export_dot(&ar);
        assert!(dot.starts_with("digraph apd {"));
        assert!(dot.contains("0 [label=\"a # b\", shape=circle];"));
        assert!(dot.contains("shape=doublecircle"));
        assert!(dot.contains("0 -> 1 [label=\"a\"];"));
    }
}
