//! Parsers for the external input surfaces: polynomial expression strings,
//! germ-definition files, and rational coefficient lists.
//!
//! The polynomial grammar is a small recursive-descent parser:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := rational | ident | '(' expr ')' | '-' factor
//! rational := uint ('/' uint)?
//! ```
//!
//! Identifiers must be declared variables. All parsers return errors instead
//! of panicking, whatever the input.

use crate::germ::{Branch, CurveGerm};
use crate::poly::{Polynomial, Weights};
use crate::{EngineError, Q, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Deserialize;

const MAX_RECURSION: usize = 64;
const MAX_EXPONENT: u32 = 64;

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos];
        self.pos += 1;
        Ok(match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| EngineError::Parse("invalid digits".into()))?;
                if text.len() > 64 {
                    return Err(EngineError::Parse("integer literal too long".into()));
                }
                Tok::Num(text.parse().map_err(|_| EngineError::Parse("bad integer".into()))?)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos - 1;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(
                    std::str::from_utf8(&self.src[start..self.pos])
                        .map_err(|_| EngineError::Parse("invalid identifier".into()))?
                        .to_string(),
                )
            }
            other => {
                return Err(EngineError::Parse(format!(
                    "unexpected character {:?} at byte {}",
                    other as char,
                    self.pos - 1
                )))
            }
        })
    }
}

pub struct PolyParser<'a> {
    lexer: Lexer<'a>,
    lookahead: Tok,
    vars: &'a [String],
}

impl<'a> PolyParser<'a> {
    fn new(src: &'a str, vars: &'a [String]) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let lookahead = lexer.next_tok()?;
        Ok(PolyParser {
            lexer,
            lookahead,
            vars,
        })
    }

    fn bump(&mut self) -> Result<Tok> {
        let t = std::mem::replace(&mut self.lookahead, self.lexer.next_tok()?);
        Ok(t)
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if &self.lookahead == t {
            self.bump()?;
            Ok(())
        } else {
            Err(EngineError::Parse(format!(
                "expected {:?}, found {:?}",
                t, self.lookahead
            )))
        }
    }

    fn expr(&mut self, depth: usize) -> Result<Polynomial> {
        if depth > MAX_RECURSION {
            return Err(EngineError::Parse("expression too deeply nested".into()));
        }
        let mut acc = self.term(depth + 1)?;
        loop {
            match self.lookahead {
                Tok::Plus => {
                    self.bump()?;
                    acc = &acc + &self.term(depth + 1)?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = &acc - &self.term(depth + 1)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<Polynomial> {
        if depth > MAX_RECURSION {
            return Err(EngineError::Parse("expression too deeply nested".into()));
        }
        let mut acc = self.factor(depth + 1)?;
        while self.lookahead == Tok::Star {
            self.bump()?;
            acc = &acc * &self.factor(depth + 1)?;
        }
        Ok(acc)
    }

    fn factor(&mut self, depth: usize) -> Result<Polynomial> {
        if depth > MAX_RECURSION {
            return Err(EngineError::Parse("expression too deeply nested".into()));
        }
        let base = self.atom(depth + 1)?;
        if self.lookahead == Tok::Caret {
            self.bump()?;
            let e = match self.bump()? {
                Tok::Num(n) => n,
                other => {
                    return Err(EngineError::Parse(format!(
                        "expected exponent, found {:?}",
                        other
                    )))
                }
            };
            let e: u32 = e
                .try_into()
                .map_err(|_| EngineError::Parse("exponent out of range".into()))?;
            if e > MAX_EXPONENT {
                return Err(EngineError::Parse(format!(
                    "exponent {} exceeds the cap {}",
                    e, MAX_EXPONENT
                )));
            }
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self, depth: usize) -> Result<Polynomial> {
        if depth > MAX_RECURSION {
            return Err(EngineError::Parse("expression too deeply nested".into()));
        }
        let n = self.vars.len();
        match self.bump()? {
            Tok::Num(num) => {
                // optional denominator
                if self.lookahead == Tok::Slash {
                    self.bump()?;
                    match self.bump()? {
                        Tok::Num(den) if !den.is_zero() => {
                            Ok(Polynomial::constant(n, Q::new(num, den)))
                        }
                        Tok::Num(_) => Err(EngineError::Parse("zero denominator".into())),
                        other => Err(EngineError::Parse(format!(
                            "expected denominator, found {:?}",
                            other
                        ))),
                    }
                } else {
                    Ok(Polynomial::constant(n, Q::from_integer(num)))
                }
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| v == &name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => Err(EngineError::Parse(format!("unknown variable '{}'", name))),
            },
            Tok::Minus => Ok(-&self.factor(depth + 1)?),
            Tok::LParen => {
                let inner = self.expr(depth + 1)?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            other => Err(EngineError::Parse(format!(
                "unexpected token {:?}",
                other
            ))),
        }
    }
}

/// Parse a polynomial expression over the named variables.
pub fn parse_polynomial(src: &str, vars: &[String]) -> Result<Polynomial> {
    if src.len() > 64 * 1024 {
        return Err(EngineError::Parse("expression too long".into()));
    }
    let mut p = PolyParser::new(src, vars)?;
    let poly = p.expr(0)?;
    if p.lookahead != Tok::End {
        return Err(EngineError::Parse(format!(
            "trailing input at token {:?}",
            p.lookahead
        )));
    }
    Ok(poly)
}

/// Parse a single rational like `-3/4` or `7`.
pub fn parse_rational(src: &str) -> Result<Q> {
    let vars: [String; 0] = [];
    let p = parse_polynomial(src, &vars)?;
    if p.num_terms() > 1 {
        return Err(EngineError::Parse("not a constant".into()));
    }
    Ok(p.constant_term())
}

/// Parse a comma-separated list of rationals, e.g. `1,3,0,-1/2`.
pub fn parse_coeff_list(src: &str) -> Result<Vec<Q>> {
    if src.trim().is_empty() {
        return Ok(vec![]);
    }
    src.split(',').map(|s| parse_rational(s.trim())).collect()
}

/// On-disk germ definition.
#[derive(Debug, Deserialize)]
pub struct GermFile {
    pub name: String,
    pub variables: Vec<String>,
    pub weights: Vec<i64>,
    pub equations: Vec<String>,
    /// One entry per branch; each branch lists one polynomial in `t` per
    /// ambient variable.
    pub branches: Vec<Vec<String>>,
}

/// Parse a germ-definition file (JSON) into a load-checked curve germ.
pub fn parse_germ_file(text: &str) -> Result<CurveGerm> {
    if text.len() > 1024 * 1024 {
        return Err(EngineError::Parse("germ file too large".into()));
    }
    let gf: GermFile =
        serde_json::from_str(text).map_err(|e| EngineError::Parse(format!("germ file: {}", e)))?;
    germ_from_file(gf)
}

pub fn germ_from_file(gf: GermFile) -> Result<CurveGerm> {
    let m = gf.variables.len();
    if m == 0 || m > 6 {
        return Err(EngineError::Parse(
            "germ must have between 1 and 6 variables".into(),
        ));
    }
    if gf.weights.len() != m {
        return Err(EngineError::Parse("weights/variables length mismatch".into()));
    }
    let weights = Weights::new(gf.weights.clone())?;
    let equations = gf
        .equations
        .iter()
        .map(|s| parse_polynomial(s, &gf.variables))
        .collect::<Result<Vec<_>>>()?;
    let tvar = vec!["t".to_string()];
    let mut branches = Vec::new();
    for (i, comps) in gf.branches.iter().enumerate() {
        if comps.len() != m {
            return Err(EngineError::Parse(format!(
                "branch {} has {} components, expected {}",
                i + 1,
                comps.len(),
                m
            )));
        }
        let comps = comps
            .iter()
            .map(|s| parse_polynomial(s, &tvar))
            .collect::<Result<Vec<_>>>()?;
        branches.push(Branch::new(format!("B{}", i + 1), comps));
    }
    CurveGerm::new(gf.name, weights, equations, branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};

    fn vars3() -> Vec<String> {
        vec!["x1".into(), "x2".into(), "x3".into()]
    }

    #[test]
    fn parses_defining_equation() {
        let p = parse_polynomial("x1^2 + x2*x3", &vars3()).unwrap();
        let x1 = Polynomial::var(3, 0);
        let x2 = Polynomial::var(3, 1);
        let x3 = Polynomial::var(3, 2);
        assert_eq!(p, &(&x1 * &x1) + &(&x2 * &x3));
    }

    #[test]
    fn parses_rationals_and_unary_minus() {
        let p = parse_polynomial("-3/4*x1 + (2 - 1/2)*x2^2", &vars3()).unwrap();
        assert_eq!(p.coeff(&crate::poly::Monomial(vec![1, 0, 0])), q(-3, 4));
        assert_eq!(p.coeff(&crate::poly::Monomial(vec![0, 2, 0])), q(3, 2));
    }

    #[test]
    fn rejects_unknown_variable_and_junk() {
        assert!(parse_polynomial("y + 1", &vars3()).is_err());
        assert!(parse_polynomial("x1 +", &vars3()).is_err());
        assert!(parse_polynomial("x1 ** x2", &vars3()).is_err());
        assert!(parse_polynomial("1/0", &vars3()).is_err());
        assert!(parse_polynomial("x1^999", &vars3()).is_err());
        assert!(parse_polynomial("(((((", &vars3()).is_err());
    }

    #[test]
    fn coeff_list_roundtrip() {
        assert_eq!(
            parse_coeff_list("1, 3, 0, -1/2").unwrap(),
            vec![qi(1), qi(3), qi(0), q(-1, 2)]
        );
        assert!(parse_coeff_list("1,,2").is_err());
    }

    #[test]
    fn germ_file_roundtrip() {
        let text = r#"{
            "name": "U7",
            "variables": ["x1", "x2", "x3"],
            "weights": [4, 5, 3],
            "equations": ["x1^2 + x2*x3", "x1*x2 + x3^3"],
            "branches": [["0", "t", "0"], ["t^4", "-t^5", "t^3"]]
        }"#;
        let germ = parse_germ_file(text).unwrap();
        assert_eq!(germ.name, "U7");
        assert_eq!(germ.branches.len(), 2);
    }

    #[test]
    fn germ_file_with_bad_branch_fails_load_checks() {
        // a circle is not a curve germ through the origin with these branches
        let text = r#"{
            "name": "bad",
            "variables": ["x1", "x2", "x3"],
            "weights": [1, 1, 1],
            "equations": ["x1^2 + x2^2 - 1"],
            "branches": [["t", "0", "0"]]
        }"#;
        assert!(parse_germ_file(text).is_err());
    }
}
