//! Text syntax for words and presentations.
//!
//! ```text
//! presentation := '<' [gen {',' gen}] '|' [rel {',' rel}] '>'
//! gen          := ident ['~']
//! rel          := word ['=' word]
//! word         := '1' | term {['*'] term}
//! term         := atom {'^' ['-'] int | '~'}
//! atom         := ident | '1' | '(' word ')' | '[' word ',' word {',' word} ']'
//! ```
//!
//! `l_<name>` expands to `name^-1 * name~` unless `l_<name>` is itself declared.

use crate::error::{Error, Result};
use crate::words::{Alphabet, GenSymbol, Generator, Word};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let mut toks = Vec::new();
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i]
                    .parse()
                    .map_err(|_| Error::Syntax { pos: start, msg: "integer too large".into() })?;
                toks.push((Tok::Int(n), start));
            } else if "<>|,*^~()[]=-".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
            }
        }
        toks.push((Tok::End, src.len()));
        Ok(Lexer { src, toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            let found = match self.peek() {
                Tok::End => "end of input".to_string(),
                _ => format!("`{}`", self.src[self.offset()..].chars().next().unwrap_or(' ')),
            };
            self.err(format!("expected `{c}`, found {found}"))
        }
    }
}

/// How identifiers become words.
enum Resolve<'a> {
    Declared(&'a Alphabet),
    Free,
}

impl Resolve<'_> {
    fn ident(&self, name: &str, barred: bool, pos: usize) -> Result<Word> {
        match self {
            Resolve::Free => {
                let g = Generator::with_bar(name, barred).map_err(|_| Error::Syntax { pos, msg: format!("bad name `{name}`") })?;
                Ok(Word::gen(&g))
            }
            Resolve::Declared(alpha) => {
                let g = Generator::with_bar(name, barred).map_err(|_| Error::Syntax { pos, msg: format!("bad name `{name}`") })?;
                if alpha.contains(&g) {
                    return Ok(Word::gen(&g));
                }
                if let Some(base) = name.strip_prefix("l_") {
                    if !barred {
                        if let Ok(b) = Generator::new(base) {
                            if alpha.contains(&b) && alpha.contains(&b.bar()) {
                                return Ok(Word::ell(&Word::gen(&b)));
                            }
                        }
                    }
                }
                Err(Error::UndeclaredGenerator(g.to_string()))
            }
        }
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    resolve: Resolve<'a>,
}

impl Parser<'_> {
    fn starts_term(&self) -> bool {
        matches!(self.lex.peek(), Tok::Ident(_) | Tok::Int(1) | Tok::Sym('(') | Tok::Sym('['))
    }

    fn word(&mut self) -> Result<Word> {
        if !self.starts_term() {
            return self.lex.err("expected a word");
        }
        let mut acc = self.term()?;
        loop {
            if *self.lex.peek() == Tok::Sym('*') {
                self.lex.bump();
                if !self.starts_term() {
                    return self.lex.err("expected a factor after `*`");
                }
            } else if !self.starts_term() {
                break;
            }
            let t = self.term()?;
            acc = acc.mul(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Word> {
        let mut w = self.atom()?;
        loop {
            match self.lex.peek() {
                Tok::Sym('^') => {
                    self.lex.bump();
                    let neg = if *self.lex.peek() == Tok::Sym('-') {
                        self.lex.bump();
                        true
                    } else {
                        false
                    };
                    let k = match self.lex.bump() {
                        Tok::Int(k) => k as i64,
                        _ => return self.lex.err("expected an integer exponent"),
                    };
                    w = w.pow(if neg { -k } else { k });
                }
                Tok::Sym('~') => {
                    self.lex.bump();
                    w = w.bar();
                }
                _ => return Ok(w),
            }
        }
    }

    fn atom(&mut self) -> Result<Word> {
        let pos = self.lex.offset();
        match self.lex.bump() {
            Tok::Ident(name) => {
                // `a~` binds to the identifier itself so that `a~` names the barred generator
                let barred = if *self.lex.peek() == Tok::Sym('~') {
                    self.lex.bump();
                    true
                } else {
                    false
                };
                self.resolve.ident(&name, barred, pos)
            }
            Tok::Int(1) => Ok(Word::identity()),
            Tok::Sym('(') => {
                let w = self.word()?;
                self.lex.expect(')')?;
                Ok(w)
            }
            Tok::Sym('[') => {
                let mut parts = vec![self.word()?];
                while *self.lex.peek() == Tok::Sym(',') {
                    self.lex.bump();
                    parts.push(self.word()?);
                }
                self.lex.expect(']')?;
                if parts.len() < 2 {
                    return Err(Error::Syntax { pos, msg: "commutator needs at least two entries".into() });
                }
                Word::left_normed(&parts)
            }
            _ => Err(Error::Syntax { pos, msg: "expected a generator, `1`, `(` or `[`".into() }),
        }
    }

    fn relation(&mut self) -> Result<Word> {
        let lhs = self.word()?;
        if *self.lex.peek() == Tok::Sym('=') {
            self.lex.bump();
            let rhs = self.word()?;
            return Ok(lhs.mul(&rhs.inverse()));
        }
        Ok(lhs)
    }

    fn end(&mut self) -> Result<()> {
        if *self.lex.peek() != Tok::End {
            return self.lex.err("trailing input");
        }
        Ok(())
    }
}

/// Parse a word whose letters must belong to `alphabet`.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word> {
    let mut p = Parser { lex: Lexer::new(text)?, resolve: Resolve::Declared(alphabet) };
    let w = p.word()?;
    p.end()?;
    Ok(w)
}

/// Parse a word treating every identifier as a generator.
pub fn parse_word_free(text: &str) -> Result<Word> {
    let mut p = Parser { lex: Lexer::new(text)?, resolve: Resolve::Free };
    let w = p.word()?;
    p.end()?;
    Ok(w)
}

/// Parse `< gens | relators >` into generators and (unreduced-order) relator words.
pub(crate) fn parse_presentation_parts(text: &str) -> Result<(Vec<Generator>, Vec<Word>)> {
    let lex = Lexer::new(text)?;
    let mut gens = Vec::new();
    let mut p = Parser { lex, resolve: Resolve::Free };
    p.lex.expect('<')?;
    if *p.lex.peek() != Tok::Sym('|') {
        loop {
            let pos = p.lex.offset();
            let name = match p.lex.bump() {
                Tok::Ident(n) => n,
                _ => return Err(Error::Syntax { pos, msg: "expected a generator name".into() }),
            };
            let barred = if *p.lex.peek() == Tok::Sym('~') {
                p.lex.bump();
                true
            } else {
                false
            };
            let g = Generator::with_bar(&name, barred).map_err(|e| Error::Syntax { pos, msg: e.to_string() })?;
            if gens.contains(&g) {
                return Err(Error::DuplicateGenerator(g.to_string()));
            }
            gens.push(g);
            if *p.lex.peek() == Tok::Sym(',') {
                p.lex.bump();
            } else {
                break;
            }
        }
    }
    p.lex.expect('|')?;
    let alphabet = Alphabet::new(gens.clone())?;
    // reborrow with the declared alphabet
    let Parser { lex, .. } = p;
    let mut p = Parser { lex, resolve: Resolve::Declared(&alphabet) };
    let mut rels = Vec::new();
    if *p.lex.peek() != Tok::Sym('>') {
        loop {
            rels.push(p.relation()?);
            if *p.lex.peek() == Tok::Sym(',') {
                p.lex.bump();
            } else {
                break;
            }
        }
    }
    p.lex.expect('>')?;
    p.end()?;
    Ok((gens, rels))
}

/// Shorthand for building symbols in tests and examples.
pub fn sym(name: &str, barred: bool, sign: i8) -> GenSymbol {
    GenSymbol::new(Generator::with_bar(name, barred).expect("valid name"), sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab_double() -> Alphabet {
        let a = Generator::new("a").unwrap();
        let b = Generator::new("b").unwrap();
        Alphabet::new([a.clone(), b.clone(), a.bar(), b.bar()]).unwrap()
    }

    #[test]
    fn parses_spec_example() {
        let alpha = ab_double();
        let w = parse_word("[a, a~]^-1 * b", &alpha).unwrap();
        let a = Word::gen(&Generator::new("a").unwrap());
        let expected = Word::commutator(&a, &a.bar()).inverse().mul(&Word::gen(&Generator::new("b").unwrap()));
        assert_eq!(w, expected);
    }

    #[test]
    fn juxtaposition_powers_and_ell() {
        let alpha = ab_double();
        let w = parse_word("a b^2 (a b)^-1", &alpha).unwrap();
        assert_eq!(w.to_string(), "a*b*a^-1");
        let l = parse_word("l_a", &alpha).unwrap();
        assert_eq!(l.to_string(), "a^-1*a~");
        assert!(parse_word("1", &alpha).unwrap().is_identity());
        assert_eq!(parse_word("(a b)~", &alpha).unwrap().to_string(), "a~*b~");
    }

    #[test]
    fn errors_carry_positions() {
        let alpha = ab_double();
        match parse_word("a * ", &alpha) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_word("c", &alpha), Err(Error::UndeclaredGenerator("c".into())));
        match parse_presentation_parts("< a | a^3 ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_word("a ? b", &alpha), Err(Error::Syntax { pos: 2, .. })));
    }

    #[test]
    fn presentation_parts() {
        let (g, r) = parse_presentation_parts("< a,b | a^2, b^2, (a*b)^3 >").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(r.len(), 3);
        assert_eq!(r[2].len(), 6);
        let (_, r) = parse_presentation_parts("<a,b| a^2 = b^2>").unwrap();
        assert_eq!(r[0].to_string(), "a^2*b^-2");
        let (g, r) = parse_presentation_parts("<a|>").unwrap();
        assert_eq!((g.len(), r.len()), (1, 0));
        assert!(matches!(parse_presentation_parts("<a,a|>"), Err(Error::DuplicateGenerator(_))));
    }
}
