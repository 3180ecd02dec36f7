//! Text form of homogeneous polynomials: sums of products of rational
//! literals, named variables, and parenthesized subexpressions, with `^`
//! powers and multiplication written explicitly or by juxtaposition.

use std::collections::HashMap;
use std::fmt;

use apolar::Polynomial;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A syntax or name error, with the character offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at offset {})", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' | '.' => {
                let start = i;
                let mut int_digits = String::new();
                let mut frac_digits = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    int_digits.push(chars[i]);
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        frac_digits.push(chars[i]);
                        i += 1;
                    }
                    if frac_digits.is_empty() {
                        return err(start, "a decimal point needs digits after it");
                    }
                }
                let digits = format!("{int_digits}{frac_digits}");
                let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
                let denom = num_traits::pow(BigInt::from(10), frac_digits.len());
                out.push((start, Tok::Num(BigRational::new(numer, denom))));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut name = String::new();
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    name.push(chars[i]);
                    i += 1;
                }
                out.push((start, Tok::Ident(name)));
                continue;
            }
            other => return err(i, format!("unexpected character '{other}'")),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    index: HashMap<String, usize>,
    nvars: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let negate = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(&-BigRational::one());
        }
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.sub(&self.term()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc.mul(&self.factor()?);
            } else if self.eat(&Tok::Slash) {
                let at = self.here();
                match self.peek().cloned() {
                    Some(Tok::Num(q)) => {
                        self.pos += 1;
                        if q.is_zero() {
                            return err(at, "division by zero");
                        }
                        acc = acc.scale(&q.recip());
                    }
                    _ => return err(at, "only numeric denominators are supported"),
                }
            } else if matches!(
                self.peek(),
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen)
            ) {
                // juxtaposition multiplies: 2x, 3(x+y), x y
                acc = acc.mul(&self.factor()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let at = self.here();
            match self.peek().cloned() {
                Some(Tok::Num(q)) if q.is_integer() && !q.is_negative() => {
                    self.pos += 1;
                    let e: u32 = q.to_integer().try_into().map_err(|_| ParseError {
                        position: at,
                        message: "exponent does not fit in 32 bits".into(),
                    })?;
                    Ok(base.pow(e))
                }
                _ => err(at, "expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.nvars, q))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.index.get(&name) {
                    Some(&j) => Ok(Polynomial::variable(self.nvars, j)
                        .expect("index comes from the variable table")),
                    None => err(at, format!("unknown variable '{name}'")),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    err(self.here(), "expected ')'")
                }
            }
            Some(Tok::RParen) => err(at, "unmatched ')'"),
            _ => err(at, "expected a number, a variable, or '('"),
        }
    }
}

/// Parse `input` into a polynomial. The variable order is the order of first
/// appearance, unless `fixed_vars` pins the coordinate list up front (then
/// any other name is an error).
pub fn parse_polynomial(
    input: &str,
    fixed_vars: Option<&[String]>,
) -> Result<(Polynomial, Vec<String>), ParseError> {
    let toks = lex(input)?;
    let vars: Vec<String> = match fixed_vars {
        Some(list) => {
            let mut seen = HashMap::new();
            for (k, name) in list.iter().enumerate() {
                if name.is_empty() {
                    return err(0, "empty variable name");
                }
                if seen.insert(name.clone(), k).is_some() {
                    return err(0, format!("variable '{name}' listed twice"));
                }
            }
            list.to_vec()
        }
        None => {
            let mut ordered = Vec::new();
            for (_, t) in &toks {
                if let Tok::Ident(name) = t {
                    if !ordered.contains(name) {
                        ordered.push(name.clone());
                    }
                }
            }
            ordered
        }
    };
    let index: HashMap<String, usize> = vars
        .iter()
        .enumerate()
        .map(|(j, v)| (v.clone(), j))
        .collect();
    let end = input.chars().count();
    let mut parser = Parser {
        toks,
        pos: 0,
        index,
        nvars: vars.len(),
        end,
    };
    if parser.peek().is_none() {
        return err(0, "empty input");
    }
    let poly = parser.expr()?;
    if parser.peek().is_some() {
        return err(parser.here(), "unexpected trailing input");
    }
    Ok((poly, vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use apolar::MultiIndex;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn coeff(p: &Polynomial, exps: &[u32]) -> BigRational {
        p.coefficient(&MultiIndex(exps.to_vec()))
    }

    #[test]
    fn reads_terms_signs_and_powers() {
        let (p, vars) = parse_polynomial("x^3 - 2*x*y^2 + y^3", None).unwrap();
        assert_eq!(vars, vec!["x", "y"]);
        assert_eq!(coeff(&p, &[3, 0]), q(1, 1));
        assert_eq!(coeff(&p, &[1, 2]), q(-2, 1));
        assert_eq!(coeff(&p, &[0, 3]), q(1, 1));
    }

    #[test]
    fn juxtaposition_multiplies() {
        let (p, _) = parse_polynomial("2x y + 3(x + y)x", None).unwrap();
        assert_eq!(coeff(&p, &[1, 1]), q(5, 1));
        assert_eq!(coeff(&p, &[2, 0]), q(3, 1));
    }

    #[test]
    fn decimals_and_fractions_are_exact() {
        let (p, _) = parse_polynomial("0.5x + 1/3 y - x/6", None).unwrap();
        assert_eq!(coeff(&p, &[1, 0]), q(1, 3));
        assert_eq!(coeff(&p, &[0, 1]), q(1, 3));
    }

    #[test]
    fn expands_parenthesized_powers() {
        let (p, _) = parse_polynomial("(x + y - z)^2", None).unwrap();
        assert_eq!(coeff(&p, &[1, 1, 0]), q(2, 1));
        assert_eq!(coeff(&p, &[1, 0, 1]), q(-2, 1));
        assert_eq!(coeff(&p, &[0, 0, 2]), q(1, 1));
    }

    #[test]
    fn leading_sign_applies_to_the_first_term() {
        let (p, _) = parse_polynomial("-x^2 + y^2", None).unwrap();
        assert_eq!(coeff(&p, &[2, 0]), q(-1, 1));
        assert_eq!(coeff(&p, &[0, 2]), q(1, 1));
    }

    #[test]
    fn fixed_variable_order_wins() {
        let vars = vec!["z".to_string(), "y".to_string(), "x".to_string()];
        let (p, names) = parse_polynomial("x y z", Some(&vars)).unwrap();
        assert_eq!(names, vars);
        assert_eq!(coeff(&p, &[1, 1, 1]), q(1, 1));
    }

    #[test]
    fn unknown_variable_is_an_error_under_fixed_order() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let e = parse_polynomial("x + w", Some(&vars)).unwrap_err();
        assert!(e.message.contains("unknown variable 'w'"));
        assert_eq!(e.position, 4);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_polynomial("x^", None).unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_polynomial("x + + y", None).unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_polynomial("(x + y", None).unwrap_err();
        assert_eq!(e.position, 6);
        let e = parse_polynomial("x^(1/2)", None).unwrap_err();
        assert!(e.message.contains("exponent"));
        // `^` binds tighter than `/`, so x^1/2 is (x^1)/2, not an error.
        let (p, _) = parse_polynomial("x^1/2", None).unwrap();
        assert_eq!(coeff(&p, &[1]), q(1, 2));
    }

    #[test]
    fn rejects_division_by_polynomials() {
        let e = parse_polynomial("x / y", None).unwrap_err();
        assert!(e.message.contains("numeric denominators"));
    }
}
