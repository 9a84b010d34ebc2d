//! S-expression reader for SMT-LIB text.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ParseError;

/// Deepest list nesting accepted; keeps recursive elaboration bounded.
pub const MAX_NESTING: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Symbol(String),
    Keyword(String),
    Numeral(String),
    Decimal(String),
    /// `#x…` or `#b…` literal, kept verbatim.
    Bits(String),
    Str(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(Atom, Span),
    List(Vec<SExpr>, Span),
}

impl SExpr {
    pub fn span(&self) -> Span {
        match self {
            SExpr::Atom(_, s) | SExpr::List(_, s) => *s,
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(Atom::Symbol(s), _) => f.write_str(&super::print::quote_symbol(s)),
            SExpr::Atom(Atom::Keyword(s), _) => write!(f, ":{s}"),
            SExpr::Atom(Atom::Numeral(s) | Atom::Decimal(s) | Atom::Bits(s), _) => {
                f.write_str(s)
            }
            SExpr::Atom(Atom::Str(s), _) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, mut pred: impl FnMut(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn atom(&mut self, start: Span) -> Result<Atom, ParseError> {
        let err = |msg: &str| ParseError::syntax(start, msg);
        let c = self.peek().expect("caller checked");
        match c {
            '|' => {
                self.bump();
                let mut name = String::new();
                loop {
                    match self.bump() {
                        Some('|') => break,
                        Some('\\') => return Err(err("backslash in quoted symbol")),
                        Some(ch) => name.push(ch),
                        None => return Err(err("unterminated quoted symbol")),
                    }
                }
                Ok(Atom::Symbol(name))
            }
            '"' => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        Some('"') if self.peek() == Some('"') => {
                            self.bump();
                            text.push('"');
                        }
                        Some('"') => break,
                        Some(ch) => text.push(ch),
                        None => return Err(err("unterminated string literal")),
                    }
                }
                Ok(Atom::Str(text))
            }
            ':' => {
                self.bump();
                let name = self.take_while(is_symbol_char);
                if name.is_empty() {
                    return Err(err("empty keyword"));
                }
                Ok(Atom::Keyword(name))
            }
            '#' => {
                self.bump();
                let kind = self.bump();
                let digits = self.take_while(|c| c.is_ascii_hexdigit());
                match kind {
                    Some('x') | Some('b') if !digits.is_empty() => {
                        Ok(Atom::Bits(alloc::format!("#{}{digits}", kind.unwrap_or('x'))))
                    }
                    _ => Err(err("malformed `#` literal")),
                }
            }
            c if c.is_ascii_digit() => {
                let int = self.take_while(|c| c.is_ascii_digit());
                if self.peek() == Some('.') {
                    self.bump();
                    let frac = self.take_while(|c| c.is_ascii_digit());
                    if frac.is_empty() {
                        return Err(err("malformed decimal"));
                    }
                    return Ok(Atom::Decimal(alloc::format!("{int}.{frac}")));
                }
                if self.peek().is_some_and(is_symbol_char) {
                    return Err(err("symbol may not start with a digit"));
                }
                Ok(Atom::Numeral(int))
            }
            c if is_symbol_char(c) => Ok(Atom::Symbol(self.take_while(is_symbol_char))),
            other => Err(err(&alloc::format!("unexpected character {other:?}"))),
        }
    }
}

/// Reads every top-level s-expression of `text`.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut top = Vec::new();
    // Open lists, innermost last.
    let mut stack: Vec<(Vec<SExpr>, Span)> = Vec::new();
    loop {
        lexer.skip_trivia();
        let start = lexer.span();
        let item = match lexer.peek() {
            None => {
                if let Some((_, open)) = stack.last() {
                    return Err(ParseError::syntax(*open, "unclosed `(`"));
                }
                return Ok(top);
            }
            Some('(') => {
                lexer.bump();
                if stack.len() >= MAX_NESTING {
                    return Err(ParseError::syntax(start, "nesting too deep"));
                }
                stack.push((Vec::new(), start));
                continue;
            }
            Some(')') => {
                lexer.bump();
                let Some((items, open)) = stack.pop() else {
                    return Err(ParseError::syntax(start, "unbalanced `)`"));
                };
                SExpr::List(items, open)
            }
            Some(_) => SExpr::Atom(lexer.atom(start)?, start),
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => top.push(item),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn reads_nested_lists_with_positions() {
        let exprs = read_all("; comment\n(assert (= x |odd name|))\n").unwrap();
        assert_eq!(exprs.len(), 1);
        assert_eq!(exprs[0].span(), Span { line: 2, col: 1 });
        let items = exprs[0].list().unwrap();
        assert_eq!(items[0].symbol(), Some("assert"));
        let eq = items[1].list().unwrap();
        assert_eq!(eq[2].symbol(), Some("odd name"));
        assert_eq!(eq[1].span(), Span { line: 2, col: 12 });
    }

    #[test]
    fn literals() {
        let exprs = read_all(r#"(:named 12 1.5 #x1F "a""b")"#).unwrap();
        let items = exprs[0].list().unwrap();
        assert_eq!(items[0], SExpr::Atom(Atom::Keyword("named".into()), items[0].span()));
        assert!(matches!(&items[1], SExpr::Atom(Atom::Numeral(n), _) if n == "12"));
        assert!(matches!(&items[2], SExpr::Atom(Atom::Decimal(n), _) if n == "1.5"));
        assert!(matches!(&items[3], SExpr::Atom(Atom::Bits(n), _) if n == "#x1F"));
        assert!(matches!(&items[4], SExpr::Atom(Atom::Str(s), _) if s == "a\"b"));
    }

    #[test]
    fn errors_carry_position() {
        let err = read_all("(a\n  (b)").unwrap_err();
        assert_eq!(err.to_string(), "1:1: syntax error: unclosed `(`");
        let err = read_all("(a))").unwrap_err();
        assert_eq!(err.to_string(), "1:4: syntax error: unbalanced `)`");
        assert!(read_all("|abc").is_err());
        assert!(read_all("\"abc").is_err());
        assert!(read_all("(a {)").is_err());
    }

    #[test]
    fn nesting_is_capped() {
        let deep = "(".repeat(MAX_NESTING + 1);
        let err = read_all(&deep).unwrap_err();
        assert!(err.to_string().contains("nesting too deep"));
    }

    #[test]
    fn display_round_trips() {
        let text = "(declare-fun |a b| () Bool)";
        let exprs = read_all(text).unwrap();
        assert_eq!(exprs[0].to_string(), text);
    }
}
