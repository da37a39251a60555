//! `|pi(e)|` without materializing large supports.
//!
//! Subterms whose support is provably small are materialized as usual. Above
//! that, cardinalities come from the structure of the recursion: star and
//! concatenation images are injective, and a shuffle image is injective away
//! from pairs containing `ε`. Only overlaps (between the two sides of a union
//! or concatenation, and between collapsed and uncollapsed shuffle pairs) are
//! counted by enumeration, and enumerated elements are interned temporarily
//! and rolled back, so memory stays bounded by the small supports.

use std::collections::HashMap;
use std::rc::Rc;

use super::pi_rc;
use crate::syntax::{Expr, ExprArena, Node};

/// Supports whose upper bound is at most this size are materialized.
pub const DEFAULT_MATERIALIZE_LIMIT: u128 = 1 << 12;

/// `|pi(e)|`; agrees with `pi_len` but runs in memory proportional to the
/// small subterm supports only.
pub fn pi_count(arena: &mut ExprArena, e: Expr) -> u128 {
    pi_count_with(arena, e, DEFAULT_MATERIALIZE_LIMIT)
}

/// [`pi_count`] with an explicit materialization limit.
pub fn pi_count_with(arena: &mut ExprArena, e: Expr, limit: u128) -> u128 {
    let mut c = Counter {
        ar: arena,
        limit,
        upper: HashMap::new(),
        mem: HashMap::new(),
        temp_mem: HashMap::new(),
        count: HashMap::new(),
        stable: 0,
    };
    c.prepare(e);
    c.stable = c.ar.node_count();
    c.count(e)
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

type Sink<'f, 'a> = &'f mut dyn FnMut(&mut Counter<'a>, Expr);

struct Counter<'a> {
    ar: &'a mut ExprArena,
    limit: u128,
    upper: HashMap<Expr, u128>,
    mem: HashMap<(Expr, Expr), bool>,
    /// Membership results for temporary nodes, discarded on rollback.
    temp_mem: HashMap<(Expr, Expr), bool>,
    count: HashMap<Expr, u128>,
    stable: usize,
}

impl<'a> Counter<'a> {
    fn upper(&mut self, e: Expr) -> u128 {
        if let Some(&u) = self.upper.get(&e) {
            return u;
        }
        let u = match self.ar.node(e) {
            Node::Empty | Node::Eps => 0,
            Node::Sym(_) => 1,
            Node::Star(a) => self.upper(a),
            Node::Union(a, b) | Node::Concat(a, b) => self.upper(a).saturating_add(self.upper(b)),
            Node::Shuffle(a, b) => {
                let (ua, ub) = (self.upper(a), self.upper(b));
                (ua + 1).saturating_mul(ub + 1).saturating_sub(1)
            }
        };
        self.upper.insert(e, u);
        u
    }

    fn small(&mut self, e: Expr) -> bool {
        self.upper(e) <= self.limit.max(1)
    }

    /// Materializes every maximal small subterm; nothing is interned
    /// permanently after this.
    fn prepare(&mut self, e: Expr) {
        if self.small(e) {
            pi_rc(self.ar, e);
            return;
        }
        match self.ar.node(e) {
            Node::Empty | Node::Eps | Node::Sym(_) => {}
            Node::Star(a) => self.prepare(a),
            Node::Union(a, b) | Node::Concat(a, b) | Node::Shuffle(a, b) => {
                self.prepare(a);
                self.prepare(b);
            }
        }
    }

    fn rollback(&mut self, mark: usize) {
        if self.ar.node_count() > mark {
            self.ar.rollback(mark);
            self.temp_mem.clear();
        }
    }

    fn materialized(&self, e: Expr) -> Rc<crate::syntax::ExprSet> {
        Rc::clone(&self.ar.pi_cache[&e])
    }

    /// Whether `x` is in `pi(e)`.
    fn mem(&mut self, x: Expr, e: Expr) -> bool {
        if self.small(e) {
            return self.ar.pi_cache[&e].contains(x);
        }
        let stable = x.id() < self.stable;
        let cached = if stable { self.mem.get(&(x, e)) } else { self.temp_mem.get(&(x, e)) };
        if let Some(&m) = cached {
            return m;
        }
        let eps = self.ar.eps();
        let m = match self.ar.node(e) {
            Node::Empty | Node::Eps => false,
            Node::Sym(_) => x == eps,
            Node::Star(a) => self.in_concat_image(x, a, e),
            Node::Union(a, b) => self.mem(x, a) || self.mem(x, b),
            Node::Concat(a, b) => self.in_concat_image(x, a, b) || self.mem(x, b),
            Node::Shuffle(a, b) if a == eps => self.mem(x, b),
            Node::Shuffle(a, b) if b == eps => self.mem(x, a),
            Node::Shuffle(a, b) => {
                if x == eps {
                    self.mem(eps, a) && self.mem(eps, b)
                } else {
                    (self.mem(eps, a) && self.in_closed(x, b))
                        || (self.mem(eps, b) && self.in_closed(x, a))
                        || self.hit_pair(x, a, b)
                }
            }
        };
        if stable {
            self.mem.insert((x, e), m);
        } else {
            self.temp_mem.insert((x, e), m);
        }
        m
    }

    /// Whether `x` is in `pi(a)·b`.
    fn in_concat_image(&mut self, x: Expr, a: Expr, b: Expr) -> bool {
        let eps = self.ar.eps();
        if b == eps {
            return self.mem(x, a);
        }
        if x == b {
            return self.mem(eps, a);
        }
        match self.ar.node(x) {
            Node::Concat(y, z) if z == b && y != eps => self.mem(y, a),
            _ => false,
        }
    }

    /// Whether `x` is in `pi(a) ∪ {a}`.
    fn in_closed(&mut self, x: Expr, a: Expr) -> bool {
        x == a || self.mem(x, a)
    }

    /// Whether the pair `(a, b)` itself occurs in the shuffle recursion.
    fn pair_allowed(&mut self, y: Expr, z: Expr, a: Expr, b: Expr) -> bool {
        !(y == a && z == b) || self.mem(a, a) || self.mem(b, b)
    }

    /// Whether `x` is the shuffle of an allowed pair with no `ε` component.
    fn hit_pair(&mut self, x: Expr, a: Expr, b: Expr) -> bool {
        let eps = self.ar.eps();
        match self.ar.node(x) {
            Node::Shuffle(y, z) if y != eps && z != eps => {
                self.in_closed(y, a) && self.in_closed(z, b) && self.pair_allowed(y, z, a, b)
            }
            _ => false,
        }
    }

    fn count(&mut self, e: Expr) -> u128 {
        if self.small(e) {
            return self.ar.pi_cache[&e].len() as u128;
        }
        if let Some(&c) = self.count.get(&e) {
            return c;
        }
        let eps = self.ar.eps();
        let c = match self.ar.node(e) {
            Node::Empty | Node::Eps | Node::Sym(_) => unreachable!("leaves are small"),
            Node::Star(a) => self.count(a),
            Node::Union(a, b) => {
                let total = self.count(a) + self.count(b);
                let (small, other) = if self.upper(a) <= self.upper(b) { (a, b) } else { (b, a) };
                let mut overlap = 0u128;
                self.enumerate(small, &mut |c, x| {
                    if c.mem(x, other) {
                        overlap += 1;
                    }
                });
                total - overlap
            }
            Node::Concat(a, b) if b == eps => self.count(a),
            Node::Concat(a, b) => {
                let total = self.count(a) + self.count(b);
                let mut overlap = 0u128;
                if self.upper(a) <= self.upper(b) {
                    self.enumerate(a, &mut |c, y| {
                        let mark = c.ar.node_count();
                        let x = c.ar.concat_unit(y, b);
                        if c.mem(x, b) {
                            overlap += 1;
                        }
                        c.rollback(mark);
                    });
                } else {
                    self.enumerate(b, &mut |c, x| {
                        if c.in_concat_image(x, a, b) {
                            overlap += 1;
                        }
                    });
                }
                total - overlap
            }
            Node::Shuffle(a, b) if a == eps => self.count(b),
            Node::Shuffle(a, b) if b == eps => self.count(a),
            Node::Shuffle(a, b) => {
                let (ea, eb) = (self.mem(eps, a), self.mem(eps, b));
                let (sa, sb) = (self.mem(a, a), self.mem(b, b));
                let na = self.count(a) + u128::from(!sa) - u128::from(ea);
                let nb = self.count(b) + u128::from(!sb) - u128::from(eb);
                let mut total = na * nb - u128::from(!sa && !sb);
                if ea && eb {
                    total += 1;
                }
                if ea {
                    total += self.collapsed_right(a, b, nb);
                }
                if eb {
                    total += self.collapsed_left(a, b, na, ea);
                }
                total
            }
        };
        self.count.insert(e, c);
        c
    }

    /// Number of `x` in `pi(b) ∪ {b}`, `x ≠ ε`, not produced by an
    /// uncollapsed pair of `a ⧢ b`; `nb` is the size of that set.
    fn collapsed_right(&mut self, a: Expr, b: Expr, nb: u128) -> u128 {
        let eps = self.ar.eps();
        let mut n = 0u128;
        if self.upper(b) <= self.upper(a) {
            self.enumerate_closed(b, &mut |c, x| {
                if x != eps && !c.hit_pair(x, a, b) {
                    n += 1;
                }
            });
            return n;
        }
        let mut hits = 0u128;
        self.enumerate_closed(a, &mut |c, y| {
            if y == eps {
                return;
            }
            c.enumerate_shuffles_closed(b, Side::Left, y, &mut |c, x| {
                if c.hit_pair(x, a, b) {
                    hits += 1;
                }
            });
        });
        nb - hits
    }

    /// Number of `x` in `pi(a) ∪ {a}`, `x ≠ ε`, not produced by an
    /// uncollapsed pair of `a ⧢ b` nor already collapsed from the right
    /// (which happens when `ea`); `na` is the size of that set.
    fn collapsed_left(&mut self, a: Expr, b: Expr, na: u128, ea: bool) -> u128 {
        let eps = self.ar.eps();
        let mut n = 0u128;
        if self.upper(a) <= self.upper(b) {
            self.enumerate_closed(a, &mut |c, x| {
                if x != eps && !c.hit_pair(x, a, b) && !(ea && c.in_closed(x, b)) {
                    n += 1;
                }
            });
            return n;
        }
        let mut dropped = 0u128;
        self.enumerate_closed(b, &mut |c, z| {
            if z == eps {
                return;
            }
            if ea && c.in_closed(z, a) {
                dropped += 1;
            }
            c.enumerate_shuffles_closed(a, Side::Right, z, &mut |c, x| {
                if c.hit_pair(x, a, b) && !(ea && c.in_closed(x, b)) {
                    dropped += 1;
                }
            });
        });
        na - dropped
    }

    /// Calls `f` once per element of `pi(e) ∪ {e}` of the form `w ⧢ _`
    /// (for `Side::Left`) or `_ ⧢ w` (for `Side::Right`).
    fn enumerate_shuffles_closed(&mut self, e: Expr, side: Side, w: Expr, f: Sink<'_, 'a>) {
        if self.has_child(e, side, w) && !self.mem(e, e) {
            f(self, e);
        }
        self.enumerate_shuffles(e, side, w, f);
    }

    fn has_child(&self, x: Expr, side: Side, w: Expr) -> bool {
        match (self.ar.node(x), side) {
            (Node::Shuffle(y, _), Side::Left) => y == w,
            (Node::Shuffle(_, z), Side::Right) => z == w,
            _ => false,
        }
    }

    /// The elements of `pi(e)` selected as in [`Self::enumerate_shuffles_closed`].
    fn enumerate_shuffles(&mut self, e: Expr, side: Side, w: Expr, f: Sink<'_, 'a>) {
        if self.small(e) {
            for x in self.materialized(e).iter() {
                if self.has_child(x, side, w) {
                    f(self, x);
                }
            }
            return;
        }
        let eps = self.ar.eps();
        match self.ar.node(e) {
            Node::Empty | Node::Eps | Node::Sym(_) => unreachable!("leaves are small"),
            Node::Star(_) => {}
            Node::Union(a, b) => {
                self.enumerate_shuffles(a, side, w, f);
                self.enumerate_shuffles(b, side, w, &mut |c, x| {
                    if !c.mem(x, a) {
                        f(c, x);
                    }
                });
            }
            Node::Concat(a, b) if b == eps => self.enumerate_shuffles(a, side, w, f),
            Node::Concat(a, b) => {
                if self.has_child(b, side, w) && self.mem(eps, a) {
                    f(self, b);
                }
                self.enumerate_shuffles(b, side, w, &mut |c, x| {
                    if !c.in_concat_image(x, a, b) {
                        f(c, x);
                    }
                });
            }
            Node::Shuffle(a, b) if a == eps => self.enumerate_shuffles(b, side, w, f),
            Node::Shuffle(a, b) if b == eps => self.enumerate_shuffles(a, side, w, f),
            Node::Shuffle(a, b) => {
                if w != eps {
                    match side {
                        Side::Left if self.in_closed(w, a) => {
                            self.enumerate_closed(b, &mut |c, z| {
                                if z != eps && c.pair_allowed(w, z, a, b) {
                                    let mark = c.ar.node_count();
                                    let x = c.ar.shuffle(w, z);
                                    f(c, x);
                                    c.rollback(mark);
                                }
                            });
                        }
                        Side::Right if self.in_closed(w, b) => {
                            self.enumerate_closed(a, &mut |c, y| {
                                if y != eps && c.pair_allowed(y, w, a, b) {
                                    let mark = c.ar.node_count();
                                    let x = c.ar.shuffle(y, w);
                                    f(c, x);
                                    c.rollback(mark);
                                }
                            });
                        }
                        _ => {}
                    }
                }
                let (ea, eb) = (self.mem(eps, a), self.mem(eps, b));
                if ea {
                    self.enumerate_shuffles_closed(b, side, w, &mut |c, x| {
                        if !c.hit_pair(x, a, b) {
                            f(c, x);
                        }
                    });
                }
                if eb {
                    self.enumerate_shuffles_closed(a, side, w, &mut |c, x| {
                        if !c.hit_pair(x, a, b) && !(ea && c.in_closed(x, b)) {
                            f(c, x);
                        }
                    });
                }
            }
        }
    }

    /// Calls `f` once per element of `pi(e) ∪ {e}`.
    fn enumerate_closed(&mut self, e: Expr, f: Sink<'_, 'a>) {
        if !self.mem(e, e) {
            f(self, e);
        }
        self.enumerate(e, f);
    }

    /// Calls `f` once per element of `pi(e)`. Elements may be temporary
    /// nodes that are rolled back after `f` returns.
    fn enumerate(&mut self, e: Expr, f: Sink<'_, 'a>) {
        if self.small(e) {
            for x in self.materialized(e).iter() {
                f(self, x);
            }
            return;
        }
        let eps = self.ar.eps();
        match self.ar.node(e) {
            Node::Empty | Node::Eps | Node::Sym(_) => unreachable!("leaves are small"),
            Node::Star(a) => self.enumerate(a, &mut |c, y| {
                let mark = c.ar.node_count();
                let x = c.ar.concat_unit(y, e);
                f(c, x);
                c.rollback(mark);
            }),
            Node::Union(a, b) => {
                self.enumerate(a, f);
                self.enumerate(b, &mut |c, x| {
                    if !c.mem(x, a) {
                        f(c, x);
                    }
                });
            }
            Node::Concat(a, b) if b == eps => self.enumerate(a, f),
            Node::Concat(a, b) => {
                self.enumerate(a, &mut |c, y| {
                    let mark = c.ar.node_count();
                    let x = c.ar.concat_unit(y, b);
                    f(c, x);
                    c.rollback(mark);
                });
                self.enumerate(b, &mut |c, x| {
                    if !c.in_concat_image(x, a, b) {
                        f(c, x);
                    }
                });
            }
            Node::Shuffle(a, b) if a == eps => self.enumerate(b, f),
            Node::Shuffle(a, b) if b == eps => self.enumerate(a, f),
            Node::Shuffle(a, b) => {
                self.enumerate_closed(a, &mut |c, y| {
                    if y == eps {
                        return;
                    }
                    c.enumerate_closed(b, &mut |c, z| {
                        if z != eps && c.pair_allowed(y, z, a, b) {
                            let mark = c.ar.node_count();
                            let x = c.ar.shuffle(y, z);
                            f(c, x);
                            c.rollback(mark);
                        }
                    });
                });
                let (ea, eb) = (self.mem(eps, a), self.mem(eps, b));
                if ea && eb {
                    f(self, eps);
                }
                if ea {
                    self.enumerate_closed(b, &mut |c, x| {
                        if x != eps && !c.hit_pair(x, a, b) {
                            f(c, x);
                        }
                    });
                }
                if eb {
                    self.enumerate_closed(a, &mut |c, x| {
                        if x != eps && !c.hit_pair(x, a, b) && !(ea && c.in_closed(x, b)) {
                            f(c, x);
                        }
                    });
                }
            }
        }
    }
}
