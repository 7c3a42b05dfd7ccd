//! Text forms accepted for equations.
//!
//! * `3x^1 + 2x^1 = 5`, `x + x + x = 10`, `2*x1^3 + x_2^2 = 50`
//! * compact: `[[3,1],[2,1]] ; 5 ; positive` (domain optional)
//! * JSON: `{"terms":[[3,1],[2,1]],"rhs":5,"domain":"positive"}`
//!
//! Whitespace is ignored everywhere. A bare `x` means exponent 1 and
//! coefficient 1; digits directly after `x` (optionally after `_`) are a
//! variable index and carry no meaning.

use super::{Equation, EquationTemplate, SolutionDomain, Term};
use crate::error::{Error, Result};

/// Parses any accepted form. `domain` applies when the input does not name one.
pub fn parse_equation(input: &str, domain: SolutionDomain) -> Result<Equation> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(err(0, "empty equation"));
    }
    if trimmed.starts_with('{') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    if trimmed.starts_with('[') {
        return parse_compact(trimmed, domain);
    }
    let mut p = Parser::new(input);
    let terms = p.terms()?;
    p.expect('=')?;
    let rhs = p.integer()?;
    p.end()?;
    Ok(Equation::new(terms, rhs, domain))
}

/// Parses a left-hand side without `= n`, or a JSON `{"terms":..,"domain":..}`.
pub fn parse_template(input: &str, domain: SolutionDomain) -> Result<EquationTemplate> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(err(0, "empty equation"));
    }
    if trimmed.starts_with('{') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    if trimmed.starts_with('[') {
        let mut parts = trimmed.split(';');
        let terms: Vec<Term> = serde_json::from_str(parts.next().unwrap_or(""))?;
        let domain = match parts.next() {
            Some(d) if !d.trim().is_empty() => d.parse()?,
            _ => domain,
        };
        return Ok(EquationTemplate::new(terms, domain));
    }
    let mut p = Parser::new(input);
    let terms = p.terms()?;
    p.end()?;
    Ok(EquationTemplate::new(terms, domain))
}

fn parse_compact(input: &str, domain: SolutionDomain) -> Result<Equation> {
    let parts: Vec<&str> = input.split(';').collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(err(0, "compact form is '[[c,k],...] ; n [; domain]'"));
    }
    let terms: Vec<Term> = serde_json::from_str(parts[0].trim())?;
    let rhs_pos = parts[0].len() + 1;
    let rhs = parts[1]
        .trim()
        .parse::<u64>()
        .map_err(|_| err(rhs_pos, "right-hand side must be a non-negative integer"))?;
    let domain = match parts.get(2) {
        Some(d) => d.parse()?,
        None => domain,
    };
    Ok(Equation::new(terms, rhs, domain))
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    idx: usize,
    len: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser {
            chars: src
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            idx: 0,
            len: src.len(),
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.idx).map_or(self.len, |&(p, _)| p)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn bump(&mut self) {
        self.idx += 1;
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(got) if got == c => {
                self.bump();
                Ok(())
            }
            Some(got) => Err(err(self.pos(), format!("expected '{c}', found '{got}'"))),
            None => Err(err(
                self.pos(),
                format!("expected '{c}', found end of input"),
            )),
        }
    }

    fn end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(err(self.pos(), format!("unexpected '{c}'"))),
        }
    }

    fn digits(&mut self) -> Option<String> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        (!s.is_empty()).then_some(s)
    }

    fn integer(&mut self) -> Result<u64> {
        let pos = self.pos();
        let digits = self
            .digits()
            .ok_or_else(|| err(pos, "expected a non-negative integer"))?;
        digits
            .parse()
            .map_err(|_| err(pos, format!("integer '{digits}' out of range")))
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some('+') {
            self.bump();
            terms.push(self.term()?);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let coefficient = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let c = self.integer()?;
            if self.peek() == Some('*') {
                self.bump();
            }
            c
        } else {
            1
        };
        match self.peek() {
            Some('x') | Some('X') => self.bump(),
            Some(c) => {
                return Err(err(
                    self.pos(),
                    format!("expected variable 'x', found '{c}'"),
                ))
            }
            None => return Err(err(self.pos(), "expected variable 'x', found end of input")),
        }
        if self.peek() == Some('_') {
            self.bump();
            let pos = self.pos();
            self.digits()
                .ok_or_else(|| err(pos, "expected variable index after '_'"))?;
        } else {
            self.digits();
        }
        let exponent = if self.peek() == Some('^') {
            self.bump();
            let pos = self.pos();
            let k = self.integer()?;
            u32::try_from(k).map_err(|_| err(pos, "exponent out of range"))?
        } else {
            1
        };
        Ok(Term::new(coefficient, exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SolutionDomain::*;

    #[test]
    fn text_form() {
        let eq = parse_equation("3x^1 + 2x^1 = 5", Positive).unwrap();
        assert_eq!(eq, Equation::from_pairs(&[(3, 1), (2, 1)], 5, Positive));
        let eq = parse_equation("x+x+x+x+x=1", NonNegative).unwrap();
        assert_eq!(eq, Equation::linear_unit(5, 1, NonNegative));
        let eq = parse_equation(" 2*x1^3 + x_2^2 = 50 ", Positive).unwrap();
        assert_eq!(eq, Equation::from_pairs(&[(2, 3), (1, 2)], 50, Positive));
    }

    #[test]
    fn compact_and_json_forms() {
        let eq = parse_equation("[[3,1],[2,1]] ; 5 ; positive", NonNegative).unwrap();
        assert_eq!(eq, Equation::from_pairs(&[(3, 1), (2, 1)], 5, Positive));
        let eq = parse_equation("[[1,2],[1,2]];25", Positive).unwrap();
        assert_eq!(eq.rhs, 25);
        let eq = parse_equation(
            r#"{"terms":[[1,1],[1,1]],"rhs":4,"domain":"nonnegative"}"#,
            Positive,
        )
        .unwrap();
        assert_eq!(eq.domain, NonNegative);
    }

    #[test]
    fn errors_carry_position() {
        match parse_equation("", Positive) {
            Err(Error::Parse { pos: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_equation("3x^2 + y = 4", Positive) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        match parse_equation("x^2 + x^2", Positive) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 9);
                assert!(msg.contains("'='"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_equation("x = 3x", Positive).is_err());
        // whitespace is insignificant, digits included
        assert_eq!(parse_equation("x = 3 4", Positive).unwrap().rhs, 34);
    }

    #[test]
    fn template_form() {
        let t = parse_template("x^2 + x^2 + x^2", Positive).unwrap();
        assert_eq!(t.terms, vec![Term::new(1, 2); 3]);
        let t = parse_template("[[1,1],[1,1]] ; nonneg", Positive).unwrap();
        assert_eq!(t.domain, NonNegative);
        assert!(parse_template("x = 3", Positive).is_err());
    }
}
