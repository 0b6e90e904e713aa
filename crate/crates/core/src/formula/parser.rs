use std::fmt;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Top,
    Bot,
    Common,
    And,
    Or,
    Imp,
    Sub,
    Not,
    CoNot,
    Box(usize),
    Dia(usize),
    TDia(usize),
    TBox(usize),
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(p) => format!("atom `{p}`"),
            Tok::Top => "`T`".into(),
            Tok::Bot => "`F`".into(),
            Tok::Common => "`C`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Sub => "`-<`".into(),
            Tok::Not => "`~`".into(),
            Tok::CoNot => "`-.`".into(),
            Tok::Box(i) => format!("`[]{i}`"),
            Tok::Dia(j) => format!("`<>{j}`"),
            Tok::TDia(i) => format!("`<|{i}`"),
            Tok::TBox(j) => format!("`|>{j}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    // Reads an optional modal index right after a two-character operator.
    let index_at = |mut j: usize| -> Result<(usize, usize), ParseError> {
        let start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == start {
            return Ok((1, j));
        }
        match text[start..j].parse::<usize>() {
            Ok(0) => err(start, "modal indices start at 1"),
            Ok(n) => Ok((n, j)),
            Err(_) => err(start, "modal index out of range"),
        }
    };
    while i < bytes.len() {
        let c = bytes[i];
        let two = bytes.get(i..i + 2);
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match (c, two) {
            (_, Some(b"->")) => {
                i += 2;
                Tok::Imp
            }
            (_, Some(b"-<")) => {
                i += 2;
                Tok::Sub
            }
            (_, Some(b"-.")) => {
                i += 2;
                Tok::CoNot
            }
            (_, Some(b"[]")) => {
                let (n, j) = index_at(i + 2)?;
                i = j;
                Tok::Box(n)
            }
            (_, Some(b"<>")) => {
                let (n, j) = index_at(i + 2)?;
                i = j;
                Tok::Dia(n)
            }
            (_, Some(b"<|")) => {
                let (n, j) = index_at(i + 2)?;
                i = j;
                Tok::TDia(n)
            }
            (_, Some(b"|>")) => {
                let (n, j) = index_at(i + 2)?;
                i = j;
                Tok::TBox(n)
            }
            (b'&', _) => {
                i += 1;
                Tok::And
            }
            (b'|', _) => {
                i += 1;
                Tok::Or
            }
            (b'~', _) => {
                i += 1;
                Tok::Not
            }
            (b'(', _) => {
                i += 1;
                Tok::LParen
            }
            (b')', _) => {
                i += 1;
                Tok::RParen
            }
            (b'a'..=b'z', _) => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let name = text[i..j].to_string();
                i = j;
                Tok::Atom(name)
            }
            (b'T' | b'F' | b'C', _) => {
                if bytes
                    .get(i + 1)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
                {
                    return err(i, "identifiers must start with a lowercase letter");
                }
                i += 1;
                match c {
                    b'T' => Tok::Top,
                    b'F' => Tok::Bot,
                    _ => Tok::Common,
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return err(i, format!("unexpected character `{ch}`"));
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn arrows(&mut self) -> Result<Formula, ParseError> {
        let first = self.disj()?;
        match self.peek() {
            Some(Tok::Imp) => {
                let mut operands = vec![first];
                while self.peek() == Some(&Tok::Imp) {
                    self.bump();
                    operands.push(self.disj()?);
                }
                if self.peek() == Some(&Tok::Sub) {
                    return err(self.offset(), "`->` and `-<` cannot be chained without parentheses");
                }
                let last = operands.pop().expect("chain has operands");
                Ok(operands
                    .into_iter()
                    .rev()
                    .fold(last, |acc, lhs| Formula::imp(lhs, acc)))
            }
            Some(Tok::Sub) => {
                let mut acc = first;
                while self.peek() == Some(&Tok::Sub) {
                    self.bump();
                    acc = Formula::sub(acc, self.disj()?);
                }
                if self.peek() == Some(&Tok::Imp) {
                    return err(self.offset(), "`->` and `-<` cannot be chained without parentheses");
                }
                Ok(acc)
            }
            _ => Ok(first),
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        let Some(tok) = self.bump() else {
            return err(at, "unexpected end of input");
        };
        Ok(match tok {
            Tok::Atom(p) => Formula::Atom(p),
            Tok::Top => Formula::Top,
            Tok::Bot => Formula::Bot,
            Tok::Box(i) => Formula::boxed(i, self.unary()?),
            Tok::Dia(j) => Formula::dia(j, self.unary()?),
            Tok::TDia(i) => Formula::tdia(i, self.unary()?),
            Tok::TBox(j) => Formula::tbox(j, self.unary()?),
            Tok::Common => Formula::common(self.unary()?),
            Tok::Not => Formula::not(self.unary()?),
            Tok::CoNot => Formula::conot(self.unary()?),
            Tok::LParen => {
                let inner = self.arrows()?;
                let close = self.offset();
                match self.bump() {
                    Some(Tok::RParen) => inner,
                    _ => return err(close, "expected `)`"),
                }
            }
            other => return err(at, format!("unexpected {}", other.describe())),
        })
    }
}

pub(super) fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = parser.arrows()?;
    if let Some(tok) = parser.peek() {
        return err(parser.offset(), format!("unexpected {} after formula", tok.describe()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn grammar_cases() {
        assert_eq!(parse("p -> q").unwrap(), Formula::imp(p(), q()));
        assert_eq!(
            parse("[]1 (p & q)").unwrap(),
            Formula::boxed(1, Formula::and(p(), q()))
        );
        assert_eq!(parse("~p").unwrap(), Formula::imp(p(), Formula::Bot));
        assert_eq!(parse("-.p").unwrap(), Formula::sub(Formula::Top, p()));
        assert_eq!(parse("C p").unwrap(), Formula::common(p()));
        assert_eq!(parse("<|2 |>1 T").unwrap(), Formula::tdia(2, Formula::tbox(1, Formula::Top)));
    }

    #[test]
    fn associativity() {
        let r = Formula::atom("r");
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::imp(p(), Formula::imp(q(), r.clone()))
        );
        assert_eq!(
            parse("p -< q -< r").unwrap(),
            Formula::sub(Formula::sub(p(), q()), r.clone())
        );
        assert_eq!(
            parse("p & q | r").unwrap(),
            Formula::or(Formula::and(p(), q()), r)
        );
    }

    #[test]
    fn mixed_arrow_chain_rejected() {
        let e = parse("p -> q -< r").unwrap_err();
        assert_eq!(e.position, 7);
        assert!(parse("p -< q -> r").is_err());
        assert!(parse("(p -> q) -< r").is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("p & ").unwrap_err().position, 4);
        assert_eq!(parse("p $ q").unwrap_err().position, 2);
        assert_eq!(parse("(p").unwrap_err().message, "expected `)`");
        assert!(parse("[]0 p").is_err());
        assert!(parse("Tx").is_err());
        assert!(parse("p q").is_err());
    }
}
