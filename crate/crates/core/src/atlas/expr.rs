//! Boolean expressions over predicate names.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or   := xor (("||" | "|" | "∨" | "or") xor)*
//! xor  := and (("^" | "⊕" | "xor") and)*
//! and  := not (("&&" | "&" | "∧" | "and") not)*
//! not  := ("!" | "¬" | "~" | "not") not | atom
//! atom := NAME | "true" | "false" | "1" | "0" | "(" or ")"
//! ```
//!
//! Names are predicate names, matched case-insensitively.
//!
//! Truth tables use the assignment index `Σ bitⱼ·2ʲ`, where `bitⱼ` is the
//! value of the `j`-th predicate in the list; in index mode, bit `i` of the
//! function index is the output on assignment `i`.

use std::fmt;

use thiserror::Error;

use crate::criteria::Predicate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("unexpected character {ch:?} at byte {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected token {token:?} at byte {pos}")]
    UnexpectedToken { token: String, pos: usize },
    #[error("unknown predicate {0:?}")]
    UnknownPredicate(String),
    #[error("predicate {0} is not part of the tally")]
    NotInTally(Predicate),
    #[error("function index {index} does not fit {k} predicates")]
    IndexRange { index: u64, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BooleanExpr {
    Const(bool),
    Var(Predicate),
    Not(Box<BooleanExpr>),
    And(Box<BooleanExpr>, Box<BooleanExpr>),
    Xor(Box<BooleanExpr>, Box<BooleanExpr>),
    Or(Box<BooleanExpr>, Box<BooleanExpr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Not,
    And,
    Xor,
    Or,
    LParen,
    RParen,
    Ident(String),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, ch)) = it.peek() {
        match ch {
            c if c.is_whitespace() => {
                it.next();
            }
            '!' | '¬' | '~' => {
                it.next();
                out.push((Tok::Not, pos));
            }
            '∧' => {
                it.next();
                out.push((Tok::And, pos));
            }
            '∨' => {
                it.next();
                out.push((Tok::Or, pos));
            }
            '^' | '⊕' => {
                it.next();
                out.push((Tok::Xor, pos));
            }
            '&' | '|' => {
                it.next();
                if it.peek().map(|&(_, c)| c) == Some(ch) {
                    it.next();
                }
                out.push((if ch == '&' { Tok::And } else { Tok::Or }, pos));
            }
            '(' => {
                it.next();
                out.push((Tok::LParen, pos));
            }
            ')' => {
                it.next();
                out.push((Tok::RParen, pos));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, c)) = it.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        word.push(c);
                        it.next();
                    } else {
                        break;
                    }
                }
                let tok = match word.to_ascii_lowercase().as_str() {
                    "not" => Tok::Not,
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "xor" => Tok::Xor,
                    _ => Tok::Ident(word),
                };
                out.push((tok, pos));
            }
            c => return Err(ExprError::UnexpectedChar { ch: c, pos }),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn binary(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<BooleanExpr, ExprError>,
        build: fn(Box<BooleanExpr>, Box<BooleanExpr>) -> BooleanExpr,
    ) -> Result<BooleanExpr, ExprError> {
        let mut lhs = next(self)?;
        while self.eat(&op) {
            let rhs = next(self)?;
            lhs = build(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<BooleanExpr, ExprError> {
        self.binary(Tok::Or, Self::xor, BooleanExpr::Or)
    }

    fn xor(&mut self) -> Result<BooleanExpr, ExprError> {
        self.binary(Tok::Xor, Self::and, BooleanExpr::Xor)
    }

    fn and(&mut self) -> Result<BooleanExpr, ExprError> {
        self.binary(Tok::And, Self::not, BooleanExpr::And)
    }

    fn not(&mut self) -> Result<BooleanExpr, ExprError> {
        if self.eat(&Tok::Not) {
            return Ok(BooleanExpr::Not(Box::new(self.not()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<BooleanExpr, ExprError> {
        let Some((tok, pos)) = self.toks.get(self.at).cloned() else {
            return Err(ExprError::UnexpectedEnd);
        };
        self.at += 1;
        match tok {
            Tok::LParen => {
                let e = self.or()?;
                if !self.eat(&Tok::RParen) {
                    return match self.toks.get(self.at) {
                        Some((t, p)) => Err(ExprError::UnexpectedToken {
                            token: format!("{t:?}"),
                            pos: *p,
                        }),
                        None => Err(ExprError::UnexpectedEnd),
                    };
                }
                Ok(e)
            }
            Tok::Ident(w) => match w.to_ascii_lowercase().as_str() {
                "true" | "1" => Ok(BooleanExpr::Const(true)),
                "false" | "0" => Ok(BooleanExpr::Const(false)),
                _ => w
                    .parse::<Predicate>()
                    .map(BooleanExpr::Var)
                    .map_err(|_| ExprError::UnknownPredicate(w)),
            },
            t => Err(ExprError::UnexpectedToken {
                token: format!("{t:?}"),
                pos,
            }),
        }
    }
}

impl BooleanExpr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser { toks: lex(src)?, at: 0 };
        let e = p.or()?;
        if let Some((t, pos)) = p.toks.get(p.at) {
            return Err(ExprError::UnexpectedToken {
                token: format!("{t:?}"),
                pos: *pos,
            });
        }
        Ok(e)
    }

    /// Distinct predicates referenced, in first-appearance order.
    pub fn leaves(&self) -> Vec<Predicate> {
        fn walk(e: &BooleanExpr, out: &mut Vec<Predicate>) {
            match e {
                BooleanExpr::Const(_) => {}
                BooleanExpr::Var(p) => {
                    if !out.contains(p) {
                        out.push(*p);
                    }
                }
                BooleanExpr::Not(a) => walk(a, out),
                BooleanExpr::And(a, b) | BooleanExpr::Xor(a, b) | BooleanExpr::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn eval(&self, value: &impl Fn(Predicate) -> bool) -> bool {
        match self {
            BooleanExpr::Const(c) => *c,
            BooleanExpr::Var(p) => value(*p),
            BooleanExpr::Not(a) => !a.eval(value),
            BooleanExpr::And(a, b) => a.eval(value) && b.eval(value),
            BooleanExpr::Xor(a, b) => a.eval(value) ^ b.eval(value),
            BooleanExpr::Or(a, b) => a.eval(value) || b.eval(value),
        }
    }

    /// Output on every assignment of `predicates`, indexed by `Σ bitⱼ·2ʲ`.
    pub fn truth_table(&self, predicates: &[Predicate]) -> Result<Vec<bool>, ExprError> {
        if let Some(p) = self.leaves().into_iter().find(|p| !predicates.contains(p)) {
            return Err(ExprError::NotInTally(p));
        }
        Ok((0..1usize << predicates.len())
            .map(|a| {
                self.eval(&|p| {
                    let j = predicates.iter().position(|&x| x == p).expect("leaf checked above");
                    a >> j & 1 == 1
                })
            })
            .collect())
    }

    /// Function index of the truth table; only for up to 6 predicates.
    pub fn function_index(&self, predicates: &[Predicate]) -> Result<u64, ExprError> {
        if predicates.len() > 6 {
            return Err(ExprError::IndexRange { index: 0, k: predicates.len() });
        }
        Ok(self
            .truth_table(predicates)?
            .into_iter()
            .enumerate()
            .fold(0u64, |acc, (i, b)| acc | (u64::from(b) << i)))
    }

    /// Disjunctive normal form of the function with the given index.
    pub fn from_function_index(index: u64, predicates: &[Predicate]) -> Result<Self, ExprError> {
        let k = predicates.len();
        let n = 1usize << k;
        if k > 6 || (n < 64 && index >> n != 0) {
            return Err(ExprError::IndexRange { index, k });
        }
        let mut terms = (0..n).filter(|&a| index >> a & 1 == 1).map(|a| {
            predicates
                .iter()
                .enumerate()
                .map(|(j, &p)| {
                    let v = BooleanExpr::Var(p);
                    if a >> j & 1 == 1 {
                        v
                    } else {
                        BooleanExpr::Not(Box::new(v))
                    }
                })
                .reduce(|a, b| BooleanExpr::And(Box::new(a), Box::new(b)))
                .unwrap_or(BooleanExpr::Const(true))
        });
        let first = terms.next().unwrap_or(BooleanExpr::Const(false));
        Ok(terms.fold(first, |a, b| BooleanExpr::Or(Box::new(a), Box::new(b))))
    }
}

impl fmt::Display for BooleanExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanExpr::Const(c) => write!(f, "{c}"),
            BooleanExpr::Var(p) => write!(f, "{p}"),
            BooleanExpr::Not(a) => write!(f, "!{a}"),
            BooleanExpr::And(a, b) => write!(f, "({a} && {b})"),
            BooleanExpr::Xor(a, b) => write!(f, "({a} ^ {b})"),
            BooleanExpr::Or(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

impl std::str::FromStr for BooleanExpr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
