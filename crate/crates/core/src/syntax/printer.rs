use std::fmt;

use super::{Expr, ExprArena, Node};

/// Display adapter printing an expression with minimal parentheses.
pub struct Pretty<'a> {
    arena: &'a ExprArena,
    expr: Expr,
}

impl<'a> Pretty<'a> {
    pub(super) fn new(arena: &'a ExprArena, expr: Expr) -> Self {
        Pretty { arena, expr }
    }
}

// Binding strength; higher binds tighter.
fn level(node: Node) -> u8 {
    match node {
        Node::Union(..) => 0,
        Node::Shuffle(..) => 1,
        Node::Concat(..) => 2,
        Node::Star(_) => 3,
        Node::Empty | Node::Eps | Node::Sym(_) => 4,
    }
}

fn write_expr(
    f: &mut fmt::Formatter<'_>,
    arena: &ExprArena,
    e: Expr,
    parenthesize: bool,
) -> fmt::Result {
    if parenthesize {
        f.write_str("(")?;
    }
    let node = arena.node(e);
    match node {
        Node::Empty => f.write_str("$")?,
        Node::Eps => f.write_str("@")?,
        Node::Sym(s) => f.write_str(arena.alphabet().name(s))?,
        Node::Star(a) => {
            write_expr(f, arena, a, level(arena.node(a)) < 3)?;
            f.write_str("*")?;
        }
        Node::Union(a, b) | Node::Shuffle(a, b) | Node::Concat(a, b) => {
            let op = match node {
                Node::Union(..) => " + ",
                Node::Shuffle(..) => " # ",
                _ => " . ",
            };
            let p = level(node);
            write_expr(f, arena, a, level(arena.node(a)) < p)?;
            f.write_str(op)?;
            write_expr(f, arena, b, level(arena.node(b)) <= p)?;
        }
    }
    if parenthesize {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.arena, self.expr, false)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{Alphabet, ExprArena};

    #[test]
    fn examples() {
        let mut ar = ExprArena::new(Alphabet::standard(3));
        let [a, b] = ["a", "b"].map(|n| ar.sym_named(n).unwrap());
        let e = ar.shuffle(a, b);
        assert_eq!(ar.pretty_print(e), "a # b");
        let u = ar.union(a, b);
        let e = ar.star(u);
        assert_eq!(ar.pretty_print(e), "(a + b)*");
        let e = ar.concat(ar.eps(), a);
        assert_eq!(ar.pretty_print(e), "@ . a");
    }

    #[test]
    fn right_nesting_keeps_parentheses() {
        let mut ar = ExprArena::new(Alphabet::standard(3));
        for text in ["a + (b + c)", "a # (b # c)", "a . (b . c)", "(a # b) . c*", "a**"] {
            let e = ar.parse(text).unwrap();
            let printed = ar.pretty_print(e);
            assert_eq!(printed, text);
            assert_eq!(ar.parse(&printed).unwrap(), e);
        }
        let e = ar.parse("(a + b) + c").unwrap();
        assert_eq!(ar.pretty_print(e), "a + b + c");
    }
}
