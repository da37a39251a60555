use super::{Expr, ExprArena, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Sym(String),
    Eps,
    Empty,
    Shuffle,
    Union,
    Dot,
    Star,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'a'..=b'z' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Sym(text[start..i].to_string())));
                continue;
            }
            b'@' => Tok::Eps,
            b'$' => Tok::Empty,
            b'#' => Tok::Shuffle,
            b'+' => Tok::Union,
            b'.' => Tok::Dot,
            b'*' => Tok::Star,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::Lex { pos: i, ch });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

/// A parsed subterm together with the offset where it started.
#[derive(Clone, Copy)]
struct Item {
    expr: Expr,
    pos: usize,
}

struct Parser<'a> {
    arena: &'a mut ExprArena,
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn operand(&self, item: Item) -> Result<Expr, SyntaxError> {
        if self.arena.is_empty_lang(item.expr) {
            Err(SyntaxError::EmptyInside { pos: item.pos })
        } else {
            Ok(item.expr)
        }
    }

    fn union(&mut self) -> Result<Item, SyntaxError> {
        let mut lhs = self.shuffle()?;
        while self.peek() == Some(&Tok::Union) {
            self.at += 1;
            let rhs = self.shuffle()?;
            let (a, b) = (self.operand(lhs)?, self.operand(rhs)?);
            lhs.expr = self.arena.union(a, b);
        }
        Ok(lhs)
    }

    fn shuffle(&mut self) -> Result<Item, SyntaxError> {
        let mut lhs = self.concat()?;
        while self.peek() == Some(&Tok::Shuffle) {
            self.at += 1;
            let rhs = self.concat()?;
            let (a, b) = (self.operand(lhs)?, self.operand(rhs)?);
            lhs.expr = self.arena.shuffle(a, b);
        }
        Ok(lhs)
    }

    fn concat(&mut self) -> Result<Item, SyntaxError> {
        let mut lhs = self.postfix()?;
        loop {
            match self.peek() {
                Some(Tok::Dot) => self.at += 1,
                Some(Tok::Sym(_) | Tok::Eps | Tok::Empty | Tok::LParen) => {}
                _ => break,
            }
            let rhs = self.postfix()?;
            let (a, b) = (self.operand(lhs)?, self.operand(rhs)?);
            lhs.expr = self.arena.concat(a, b);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Item, SyntaxError> {
        let mut item = self.primary()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            let a = self.operand(item)?;
            item.expr = self.arena.star(a);
        }
        Ok(item)
    }

    fn primary(&mut self) -> Result<Item, SyntaxError> {
        let pos = self.pos();
        let tok = self.peek().cloned();
        let expr = match tok {
            Some(Tok::Sym(name)) => match self.arena.sym_named(&name) {
                Some(e) => e,
                None => return Err(SyntaxError::UnknownSymbol { pos, name }),
            },
            Some(Tok::Eps) => self.arena.eps(),
            Some(Tok::Empty) => self.arena.empty(),
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.union()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(SyntaxError::Syntax {
                        pos: self.pos(),
                        msg: "expected `)`".into(),
                    });
                }
                self.at += 1;
                return Ok(Item {
                    expr: inner.expr,
                    pos: inner.pos,
                });
            }
            Some(other) => {
                return Err(SyntaxError::Syntax {
                    pos,
                    msg: format!("unexpected token {other:?}"),
                })
            }
            None => {
                return Err(SyntaxError::Syntax {
                    pos,
                    msg: "unexpected end of input".into(),
                })
            }
        };
        self.at += 1;
        Ok(Item { expr, pos })
    }
}

pub(super) fn parse(arena: &mut ExprArena, text: &str) -> Result<Expr, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        arena,
        toks,
        at: 0,
        end: text.len(),
    };
    let item = p.union()?;
    if p.at != p.toks.len() {
        return Err(SyntaxError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(item.expr)
}
