//! Untyped surface expressions. Whether an expression is a goal, a term or a
//! certificate is decided later, during elaboration.

use super::lexer::{lex, Pos, Tok, Token};
use super::SyntaxError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Pair,
    Or,
    And,
    Imp,
    LImp,
    Eq,
    Cons,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Ident(String, Pos),
    Var(String, Pos),
    /// Each `_` gets its own number.
    Wild(u32, Pos),
    Int(i64, Pos),
    App(Box<Expr>, Vec<Expr>),
    Lam(String, Box<Expr>, Pos),
    Bin(BinOp, Box<Expr>, Box<Expr>, Pos),
    Bang(Box<Expr>, Pos),
    List(Vec<Expr>, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Ident(_, p)
            | Expr::Var(_, p)
            | Expr::Wild(_, p)
            | Expr::Int(_, p)
            | Expr::Lam(_, _, p)
            | Expr::Bin(_, _, _, p)
            | Expr::Bang(_, p)
            | Expr::List(_, p) => *p,
            Expr::App(h, _) => h.pos(),
        }
    }

    /// Head name and argument count when the expression is `f a1 .. an`.
    pub fn head_ident(&self) -> Option<(&str, usize)> {
        match self {
            Expr::Ident(n, _) => Some((n, 0)),
            Expr::App(h, args) => match &**h {
                Expr::Ident(n, _) => Some((n, args.len())),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Item {
    Ctor(String, usize, Pos),
    Axiom(String, usize, Pos),
    Weights(String, Vec<Expr>, Pos),
    Mode(String, Pos),
    Prop {
        name: String,
        gen: Expr,
        when: Option<Expr>,
        then: Expr,
        pos: Pos,
    },
    Clause {
        head: Expr,
        body: Option<Expr>,
        pos: Pos,
    },
}

pub struct Parser {
    toks: Vec<Token>,
    at: usize,
    wilds: u32,
    end: Pos,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        let toks = lex(src)?;
        let lines = src.lines().count().max(1);
        let end = Pos {
            line: lines,
            col: src.lines().last().map_or(1, |l| l.chars().count() + 1),
        };
        Ok(Parser { toks, at: 0, wilds: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.tok.clone());
        self.at += 1;
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let Pos { line, col } = self.pos();
        Err(SyntaxError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            match self.peek() {
                Some(t) => self.error(format!("expected {what}, found {t:?}")),
                None => self.error(format!("expected {what}, found end of input")),
            }
        }
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.error(format!("unexpected {t:?}")),
        }
    }

    /// Levels, loosest first: `<c>` 0, `;` 1, `,` 2, `=>`/`-o` 3, `!` 4,
    /// `=` 5, `::` 6, application 7.
    pub fn expr(&mut self, level: u8) -> Result<Expr, SyntaxError> {
        match level {
            0 => {
                let mut e = self.expr(1)?;
                while self.peek() == Some(&Tok::Pair) {
                    let pos = self.pos();
                    self.at += 1;
                    let r = self.expr(1)?;
                    e = Expr::Bin(BinOp::Pair, Box::new(e), Box::new(r), pos);
                }
                Ok(e)
            }
            1 | 2 | 6 => {
                let (tok, op) = match level {
                    1 => (Tok::Semi, BinOp::Or),
                    2 => (Tok::Comma, BinOp::And),
                    _ => (Tok::Cons, BinOp::Cons),
                };
                let l = if level == 6 { self.app()? } else { self.expr(level + 1)? };
                if self.peek() == Some(&tok) {
                    let pos = self.pos();
                    self.at += 1;
                    let r = self.expr(level)?;
                    return Ok(Expr::Bin(op, Box::new(l), Box::new(r), pos));
                }
                Ok(l)
            }
            3 => {
                let l = self.expr(4)?;
                let op = match self.peek() {
                    Some(Tok::Imp) => BinOp::Imp,
                    Some(Tok::LImp) => BinOp::LImp,
                    _ => return Ok(l),
                };
                let pos = self.pos();
                self.at += 1;
                let r = self.expr(3)?;
                Ok(Expr::Bin(op, Box::new(l), Box::new(r), pos))
            }
            4 => {
                if self.peek() == Some(&Tok::Bang) {
                    let pos = self.pos();
                    self.at += 1;
                    let g = self.expr(4)?;
                    return Ok(Expr::Bang(Box::new(g), pos));
                }
                self.expr(5)
            }
            _ => {
                let l = self.expr(6)?;
                if self.peek() == Some(&Tok::Eq) {
                    let pos = self.pos();
                    self.at += 1;
                    let r = self.expr(6)?;
                    return Ok(Expr::Bin(BinOp::Eq, Box::new(l), Box::new(r), pos));
                }
                Ok(l)
            }
        }
    }

    fn lambda_ahead(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Var(_))) && self.peek2() == Some(&Tok::Backslash)
    }

    /// `x\ body`; the body extends as far to the right as possible.
    fn lambda(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        let name = match self.bump() {
            Some(Tok::Ident(n) | Tok::Var(n)) => n,
            _ => unreachable!("checked by lambda_ahead"),
        };
        self.at += 1;
        let body = self.expr(0)?;
        Ok(Expr::Lam(name, Box::new(body), pos))
    }

    fn starts_primary(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Var(_) | Tok::Wild | Tok::Int(_) | Tok::LParen | Tok::LBrack)
        )
    }

    fn app(&mut self) -> Result<Expr, SyntaxError> {
        if self.lambda_ahead() {
            return self.lambda();
        }
        let head = self.primary()?;
        let mut args = Vec::new();
        loop {
            if self.lambda_ahead() {
                args.push(self.lambda()?);
                break;
            }
            if !self.starts_primary() {
                break;
            }
            args.push(self.primary()?);
        }
        Ok(if args.is_empty() { head } else { Expr::App(Box::new(head), args) })
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(n)) => Ok(Expr::Ident(n, pos)),
            Some(Tok::Var(n)) => Ok(Expr::Var(n, pos)),
            Some(Tok::Wild) => {
                self.wilds += 1;
                Ok(Expr::Wild(self.wilds, pos))
            }
            Some(Tok::Int(n)) => Ok(Expr::Int(n, pos)),
            Some(Tok::LParen) => {
                if self.peek() == Some(&Tok::Minus) {
                    self.at += 1;
                    let n = match self.bump() {
                        Some(Tok::Int(n)) if n >= 0 => n,
                        _ => {
                            self.at -= 1;
                            return self.error("expected a natural number after `(-`");
                        }
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Int(-n, pos));
                }
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::LBrack) => {
                let mut items = Vec::new();
                if self.peek() == Some(&Tok::RBrack) {
                    self.at += 1;
                    return Ok(Expr::List(items, pos));
                }
                loop {
                    items.push(self.expr(3)?);
                    match self.bump() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::RBrack) => break,
                        _ => {
                            self.at -= 1;
                            return self.error("expected `,` or `]` in list");
                        }
                    }
                }
                Ok(Expr::List(items, pos))
            }
            Some(t) => {
                self.at -= 1;
                self.error(format!("unexpected {t:?}"))
            }
            None => self.error("unexpected end of input"),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(n)) => {
                let n = n.clone();
                self.at += 1;
                Ok(n)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn natural(&mut self, what: &str) -> Result<usize, SyntaxError> {
        match self.peek() {
            Some(Tok::Int(n)) if *n >= 0 => {
                let n = *n as usize;
                self.at += 1;
                Ok(n)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn keyword_ahead(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(n)) if n == kw)
    }

    /// One top-level item, including its terminating period.
    pub fn item(&mut self) -> Result<Item, SyntaxError> {
        let pos = self.pos();
        let next_is_name = matches!(self.peek2(), Some(Tok::Ident(_)));
        if self.keyword_ahead("ctor") && next_is_name {
            self.at += 1;
            let name = self.ident("a constructor name")?;
            let arity = self.natural("an arity")?;
            self.expect(Tok::Dot, "`.`")?;
            return Ok(Item::Ctor(name, arity, pos));
        }
        if self.keyword_ahead("axiom") && next_is_name {
            self.at += 1;
            let name = self.ident("a predicate name")?;
            let arity = self.natural("an arity")?;
            self.expect(Tok::Dot, "`.`")?;
            return Ok(Item::Axiom(name, arity, pos));
        }
        if self.keyword_ahead("weights") && next_is_name {
            self.at += 1;
            let name = self.ident("a predicate name")?;
            let list = match self.primary()? {
                Expr::List(items, _) => items,
                _ => return self.error("expected a weight list `[w1, ..., wn]`"),
            };
            self.expect(Tok::Dot, "`.`")?;
            return Ok(Item::Weights(name, list, pos));
        }
        if self.keyword_ahead("mode") && next_is_name {
            self.at += 1;
            let m = self.ident("horn, hh or linear")?;
            self.expect(Tok::Dot, "`.`")?;
            return Ok(Item::Mode(m, pos));
        }
        if self.keyword_ahead("prop") && next_is_name {
            self.at += 1;
            let name = self.ident("a property name")?;
            self.expect(Tok::Define, "`:=`")?;
            let part = |p: &mut Parser, kw: &str| -> Result<Expr, SyntaxError> {
                if !p.keyword_ahead(kw) {
                    return p.error(format!("expected `{kw}:`"));
                }
                p.at += 1;
                p.expect(Tok::Colon, "`:`")?;
                let g = p.expr(0)?;
                p.expect(Tok::Dot, "`.`")?;
                Ok(g)
            };
            let gen = part(self, "gen")?;
            let when = if self.keyword_ahead("when") {
                Some(part(self, "when")?)
            } else {
                None
            };
            let then = part(self, "then")?;
            return Ok(Item::Prop {
                name,
                gen,
                when,
                then,
                pos,
            });
        }
        let head = self.expr(0)?;
        let body = if self.peek() == Some(&Tok::Neck) {
            self.at += 1;
            Some(self.expr(0)?)
        } else {
            None
        };
        self.expect(Tok::Dot, "`.`")?;
        Ok(Item::Clause { head, body, pos })
    }
}

pub fn parse_items(src: &str) -> Result<Vec<Item>, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while !p.at_end() {
        items.push(p.item()?);
    }
    Ok(items)
}

/// A single expression spanning the whole input.
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(src)?;
    let e = p.expr(0)?;
    p.expect_end()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_period_is_a_syntax_error() {
        assert!(matches!(parse_items("p :- q"), Err(SyntaxError::Syntax { .. })));
    }

    #[test]
    fn lambda_body_extends_right() {
        let e = parse_expr("pi x\\ is_exp x => is_exp (M x)").unwrap();
        let Expr::App(head, args) = e else { panic!() };
        assert!(matches!(*head, Expr::Ident(ref n, _) if n == "pi"));
        assert!(matches!(&args[0], Expr::Lam(x, body, _) if x == "x" && matches!(**body, Expr::Bin(BinOp::Imp, ..))));
    }

    #[test]
    fn precedence_of_connectives() {
        // a, b ; c  ==  (a, b) ; c
        let e = parse_expr("a, b ; c").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Or, ref l, _, _) if matches!(**l, Expr::Bin(BinOp::And, ..))));
        // a => b, c  ==  (a => b), c
        let e = parse_expr("a => b, c").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::And, ref l, _, _) if matches!(**l, Expr::Bin(BinOp::Imp, ..))));
        // X = s z :: nil  ==  X = ((s z) :: nil)
        let e = parse_expr("X = s z :: nil").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Eq, _, ref r, _) if matches!(**r, Expr::Bin(BinOp::Cons, ..))));
        // ! a, b  ==  (! a), b
        let e = parse_expr("! a, b").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::And, ref l, _, _) if matches!(**l, Expr::Bang(..))));
    }

    #[test]
    fn negative_literals_and_pairs() {
        let e = parse_expr("set (- 1)").unwrap();
        assert!(matches!(e, Expr::App(_, ref a) if matches!(a[0], Expr::Int(-1, _))));
        let e = parse_expr("(height 4) <c> (sze 10 _) <c> max _").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Pair, ref l, _, _) if matches!(**l, Expr::Bin(BinOp::Pair, ..))));
    }

    #[test]
    fn items_are_recognized() {
        let items = parse_items(
            "ctor s 1. mode horn. weights isnat [1, 3]. axiom fin 0.\n\
             prop p := gen: nlist X. then: foo X.\n\
             isnat z. isnat (s N) :- isnat N.",
        )
        .unwrap();
        assert_eq!(items.len(), 7);
        assert!(matches!(items[4], Item::Prop { when: None, .. }));
    }
}
