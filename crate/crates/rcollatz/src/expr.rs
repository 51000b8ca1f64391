//! Integer expressions for command-line inputs such as `2^100000-1`.
//!
//! Grammar: decimal literals, binary `+ - * ^`, and parentheses. `^` binds
//! tightest and is right-associative; the others are left-associative.
//! Evaluation is exact over non-negative integers.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

pub const DEFAULT_EXPONENT_LIMIT: u64 = 1 << 20;

/// Results wider than this many bits are refused.
const MAX_RESULT_BITS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("exponent {exponent} at position {position} exceeds the limit {limit}")]
    ExponentLimit {
        position: usize,
        exponent: BigUint,
        limit: u64,
    },
    #[error("subtraction at position {position} would be negative")]
    Negative { position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Pow,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul => 2,
            BinOp::Pow => 3,
        }
    }

    fn right_assoc(self) -> bool {
        self == BinOp::Pow
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntExpr {
    Literal(BigUint),
    Binary {
        op: BinOp,
        position: usize,
        lhs: Box<IntExpr>,
        rhs: Box<IntExpr>,
    },
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Literal(n) => write!(f, "{n}"),
            IntExpr::Binary { op, lhs, rhs, .. } => write!(f, "({lhs}{}{rhs})", op.symbol()),
        }
    }
}

impl IntExpr {
    pub fn eval(&self) -> Result<BigUint, ExprError> {
        self.eval_with_limit(DEFAULT_EXPONENT_LIMIT)
    }

    pub fn eval_with_limit(&self, exponent_limit: u64) -> Result<BigUint, ExprError> {
        match self {
            IntExpr::Literal(n) => Ok(n.clone()),
            IntExpr::Binary {
                op,
                position,
                lhs,
                rhs,
            } => {
                let a = lhs.eval_with_limit(exponent_limit)?;
                let b = rhs.eval_with_limit(exponent_limit)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => {
                        if b > a {
                            Err(ExprError::Negative {
                                position: *position,
                            })
                        } else {
                            Ok(a - b)
                        }
                    }
                    BinOp::Mul => Ok(a * b),
                    BinOp::Pow => {
                        let too_big = || ExprError::ExponentLimit {
                            position: *position,
                            exponent: b.clone(),
                            limit: exponent_limit,
                        };
                        let e = b
                            .to_u64()
                            .filter(|&e| e <= exponent_limit)
                            .ok_or_else(too_big)?;
                        if a.bits().saturating_sub(1).saturating_mul(e) > MAX_RESULT_BITS {
                            return Err(too_big());
                        }
                        let e = u32::try_from(e).map_err(|_| too_big())?;
                        Ok(a.pow(e))
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Num(BigUint),
    Op(BinOp),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigUint::parse_bytes(&bytes[start..i], 10).expect("ascii digits");
                out.push((start, Token::Num(n)));
                continue;
            }
            b'+' => Token::Op(BinOp::Add),
            b'-' => Token::Op(BinOp::Sub),
            b'*' => Token::Op(BinOp::Mul),
            b'^' => Token::Op(BinOp::Pow),
            b'(' => Token::Open,
            b')' => Token::Close,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    position: i,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |(p, _)| *p)
    }

    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            position: self.here(),
            message: message.to_owned(),
        }
    }

    fn primary(&mut self) -> Result<IntExpr, ExprError> {
        match self.peek().cloned() {
            Some((_, Token::Num(n))) => {
                self.pos += 1;
                Ok(IntExpr::Literal(n))
            }
            Some((_, Token::Open)) => {
                self.pos += 1;
                let inner = self.expr(1)?;
                match self.peek() {
                    Some((_, Token::Close)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.syntax("expected ')'")),
                }
            }
            Some(_) => Err(self.syntax("expected a number or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn expr(&mut self, min_prec: u8) -> Result<IntExpr, ExprError> {
        let mut lhs = self.primary()?;
        while let Some(&(position, Token::Op(op))) = self.peek() {
            if op.precedence() < min_prec {
                break;
            }
            self.pos += 1;
            let next = if op.right_assoc() {
                op.precedence()
            } else {
                op.precedence() + 1
            };
            let rhs = self.expr(next)?;
            lhs = IntExpr::Binary {
                op,
                position,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }
}

pub fn parse_int_expr(text: &str) -> Result<IntExpr, ExprError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr(1)?;
    if p.pos != p.tokens.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and evaluates with the default exponent limit.
pub fn eval_int_expr(text: &str) -> Result<BigUint, ExprError> {
    parse_int_expr(text)?.eval()
}
