use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::Rational;

/// A position-tagged parse failure; lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(Rational),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Eq,
    At,
    Arrow,
    BiArrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(q) => write!(f, "`{q}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::At => f.write_str("`@`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::BiArrow => f.write_str("`<->`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits one source line (comments already allowed) into tokens.
pub fn tokenize_line(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line, col });
            i += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::Arrow, line, col });
                i += 2;
            } else {
                out.push(Token { tok: Tok::Minus, line, col });
                i += 1;
            }
            continue;
        }
        if c == '<' {
            if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                out.push(Token { tok: Tok::BiArrow, line, col });
                i += 3;
                continue;
            }
            return Err(ParseError::new(line, col, "unexpected `<` (did you mean `<->`?)"));
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            let mut value = if int_part.is_empty() {
                Rational::zero()
            } else {
                Rational::from_integer(int_part.parse::<BigInt>().expect("digits"))
            };
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let frac_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[frac_start..i].iter().collect();
                if !frac.is_empty() {
                    let num: BigInt = frac.parse().expect("digits");
                    let den = num_traits::pow(BigInt::from(10), frac.len());
                    value += Rational::new(num, den);
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let negative = chars.get(j) == Some(&'-');
                if negative || chars.get(j) == Some(&'+') {
                    j += 1;
                }
                let exp_start = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j > exp_start {
                    let e: usize = chars[exp_start..j]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| ParseError::new(line, col, "exponent too large"))?;
                    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), e));
                    value = if negative { value / scale } else { value * scale };
                    i = j;
                }
            }
            if i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                return Err(ParseError::new(line, i + 1, "identifiers must not start with a digit"));
            }
            out.push(Token {
                tok: Tok::Num(value),
                line,
                col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
            continue;
        }
        return Err(ParseError::new(line, col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

/// Cursor over the tokens of one line.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>, line: usize, line_len: usize) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col: line_len + 1,
        }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Position of the next token, or just past the end of the line.
    pub fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.line, self.end_col),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, message)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    pub fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                col,
            }) => {
                let out = (s.clone(), *line, *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }
}

/// Iterates over non-blank, non-comment lines as `(line number, text)`.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let trimmed = l.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, l))
        }
    })
}

/// Parses `name` as a nonnegative machine integer exponent.
pub fn small_natural(q: &Rational) -> Option<u32> {
    if !q.is_integer() || q < &Rational::zero() {
        return None;
    }
    let n = q.to_integer();
    if n > BigInt::from(u32::MAX) {
        return None;
    }
    u32::try_from(n).ok()
}
