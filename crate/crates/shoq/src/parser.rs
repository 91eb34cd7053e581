//! Line-oriented KB text format.
//!
//! ```text
//! rbox r sub s
//! rbox trans s
//! tbox (A and B) sub some r C
//! abox a : atmost 2 r top
//! abox r(a, b)
//! abox a != b
//! ```

use shoq_core::kb::KbError;
use shoq_core::syntax::{ConceptExpr, Formula};
use shoq_core::{ConceptName, Individual, KbBuilder, KnowledgeBase, Role, RoleAxiom};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] KbError),
}

const KEYWORDS: &[&str] = &[
    "rbox", "tbox", "abox", "sub", "equiv", "trans", "top", "bot", "not", "and", "or", "some", "only", "atleast",
    "atmost", "one",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Colon,
    NotEq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::NotEq => "`!=`".into(),
        }
    }
}

struct Line {
    no: usize,
    toks: Vec<(usize, Tok)>,
    end: usize,
    pos: usize,
}

fn lex(no: usize, text: &str) -> Result<Line, ParseError> {
    let err = |col: usize, msg: String| ParseError::Syntax { line: no, col, msg };
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' | ')' | ',' | ':' => {
                toks.push((
                    col,
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        _ => Tok::Colon,
                    },
                ));
                i += 1;
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                toks.push((col, Tok::NotEq));
                i += 2;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<u64>().map_err(|_| err(col, format!("number {s} is too large")))?;
                toks.push((col, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((col, Tok::Word(chars[start..i].iter().collect())));
            }
            c => return Err(err(col, format!("unexpected character `{c}`"))),
        }
    }
    Ok(Line { no, toks, end: chars.len() + 1, pos: 0 })
}

impl Line {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.no, col: self.col(), msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self, what: &str) -> Result<Tok, ParseError> {
        match self.toks.get(self.pos) {
            Some((_, t)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(self.error(format!("expected {what}, found end of line"))),
        }
    }

    fn unexpected(&mut self, what: &str) -> ParseError {
        self.pos = self.pos.saturating_sub(1);
        let found = self.peek().map_or("end of line".into(), Tok::describe);
        self.error(format!("expected {what}, found {found}"))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let what = tok.describe();
        if self.next(&what)? == tok { Ok(()) } else { Err(self.unexpected(&what)) }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let what = format!("`{kw}`");
        match self.next(&what)? {
            Tok::Word(w) if w == kw => Ok(()),
            _ => Err(self.unexpected(&what)),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next(what)? {
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => Ok(w),
            _ => Err(self.unexpected(what)),
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        match self.next("a number")? {
            Tok::Num(n) if n < u32::MAX as u64 => Ok(n as u32),
            Tok::Num(n) => {
                self.pos -= 1;
                Err(self.error(format!("number {n} is too large")))
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => {
                let t = t.describe();
                Err(self.error(format!("unexpected {t} after the end of the statement")))
            }
        }
    }

    fn concept(&mut self) -> Result<ConceptExpr, ParseError> {
        let what = "a concept";
        let tok = self.next(what)?;
        let word = match tok {
            Tok::LParen => {
                let lhs = self.concept()?;
                let op = match self.next("`and` or `or`")? {
                    Tok::Word(w) if w == "and" || w == "or" => w,
                    _ => return Err(self.unexpected("`and` or `or`")),
                };
                let rhs = self.concept()?;
                self.expect(Tok::RParen)?;
                let (lhs, rhs) = (Box::new(lhs), Box::new(rhs));
                return Ok(if op == "and" { ConceptExpr::And(lhs, rhs) } else { ConceptExpr::Or(lhs, rhs) });
            }
            Tok::Word(w) => w,
            _ => return Err(self.unexpected(what)),
        };
        Ok(match word.as_str() {
            "top" => ConceptExpr::Top,
            "bot" => ConceptExpr::Bot,
            "not" => ConceptExpr::Not(Box::new(self.concept()?)),
            "one" => ConceptExpr::Nominal(Individual::new(&self.name("an individual name")?)),
            "some" | "only" => {
                let r = Role::new(&self.name("a role name")?);
                let c = Box::new(self.concept()?);
                if word == "some" { ConceptExpr::Exists(r, c) } else { ConceptExpr::Forall(r, c) }
            }
            "atleast" | "atmost" => {
                let n = self.number()?;
                let r = Role::new(&self.name("a role name")?);
                let c = Box::new(self.concept()?);
                if word == "atleast" { ConceptExpr::AtLeast(n, r, c) } else { ConceptExpr::AtMost(n, r, c) }
            }
            w if KEYWORDS.contains(&w) => return Err(self.unexpected(what)),
            w => ConceptExpr::Name(ConceptName::new(w)),
        })
    }

    fn statement(&mut self, kb: &mut KbBuilder) -> Result<(), ParseError> {
        let section = match self.next("`rbox`, `tbox` or `abox`")? {
            Tok::Word(w) if matches!(w.as_str(), "rbox" | "tbox" | "abox") => w,
            _ => return Err(self.unexpected("`rbox`, `tbox` or `abox`")),
        };
        match section.as_str() {
            "rbox" => {
                if self.peek() == Some(&Tok::Word("trans".into())) {
                    self.pos += 1;
                    let r = self.name("a role name")?;
                    kb.role_axiom(RoleAxiom::Trans(Role::new(&r)));
                } else {
                    let r = self.name("a role name or `trans`")?;
                    self.keyword("sub")?;
                    let s = self.name("a role name")?;
                    kb.role_axiom(RoleAxiom::Sub(Role::new(&r), Role::new(&s)));
                }
            }
            "tbox" => {
                let c = self.concept()?;
                let kind = match self.next("`sub` or `equiv`")? {
                    Tok::Word(w) if w == "sub" || w == "equiv" => w,
                    _ => return Err(self.unexpected("`sub` or `equiv`")),
                };
                let d = self.concept()?;
                if kind == "sub" {
                    kb.subsumption(&c, &d);
                } else {
                    kb.equivalence(&c, &d);
                }
            }
            _ => {
                let first = self.name("an individual or role name")?;
                match self.next("`:`, `(` or `!=`")? {
                    Tok::Colon => {
                        let c = self.concept()?;
                        kb.assertion(Formula::Instance(Individual::new(&first), shoq_core::syntax::nnf(&c)));
                    }
                    Tok::NotEq => {
                        let b = self.name("an individual name")?;
                        kb.assertion(Formula::NotEq(Individual::new(&first), Individual::new(&b)));
                    }
                    Tok::LParen => {
                        let a = self.name("an individual name")?;
                        self.expect(Tok::Comma)?;
                        let b = self.name("an individual name")?;
                        self.expect(Tok::RParen)?;
                        kb.assertion(Formula::RoleAssertion(
                            Role::new(&first),
                            Individual::new(&a),
                            Individual::new(&b),
                        ));
                    }
                    _ => return Err(self.unexpected("`:`, `(` or `!=`")),
                }
            }
        }
        self.finish()
    }
}

/// Parses statements into a builder, without validating.
pub fn parse_into(text: &str, kb: &mut KbBuilder) -> Result<(), ParseError> {
    for (i, raw) in text.lines().enumerate() {
        let mut line = lex(i + 1, raw)?;
        if line.toks.is_empty() {
            continue;
        }
        line.statement(kb)?;
    }
    Ok(())
}

/// Parses and validates a knowledge base.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let mut kb = KbBuilder::new();
    parse_into(text, &mut kb)?;
    Ok(kb.build()?)
}

/// Parses a single concept expression.
pub fn parse_concept(text: &str) -> Result<ConceptExpr, ParseError> {
    let mut line = lex(1, text)?;
    let c = line.concept()?;
    line.finish()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use shoq_core::Concept;

    fn ind(a: &str) -> Individual {
        Individual::new(a)
    }

    #[test]
    fn conjunction_assertion() {
        let kb = parse_kb("abox a : (A and B)").unwrap();
        let f = Formula::Instance(ind("a"), Concept::and(Concept::atomic("A"), Concept::atomic("B")));
        assert_eq!(kb.abox().iter().collect::<Vec<_>>(), [&f]);
    }

    #[test]
    fn role_hierarchy() {
        let kb = parse_kb("rbox r sub s\nrbox trans s\nabox a : top").unwrap();
        let (r, s) = (Role::new("r"), Role::new("s"));
        assert!(kb.rbox().is_sub(&r, &r) && kb.rbox().is_sub(&s, &s) && kb.rbox().is_sub(&r, &s));
        assert!(!kb.rbox().is_sub(&s, &r));
        assert!(kb.rbox().is_transitive(&s) && !kb.rbox().is_transitive(&r));
    }

    #[test]
    fn duplicates_are_idempotent() {
        let once = parse_kb("rbox trans t\nrbox r sub t\nabox a : top").unwrap();
        let twice = parse_kb("rbox trans t\nrbox trans t\nrbox r sub t\nrbox r sub t\nabox a : top").unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn negated_nominal_kept() {
        let kb = parse_kb("abox a : not one b").unwrap();
        assert!(kb.abox().contains(&Formula::Instance(ind("a"), Concept::NegNominal(ind("b")))));
    }

    #[test]
    fn subsumption_is_encoded() {
        let kb = parse_kb("tbox A sub some r B\nabox a : top").unwrap();
        let c = Concept::or(Concept::NegAtomic("A".into()), Concept::exists("r", Concept::atomic("B")));
        assert!(kb.tbox().contains(&c));
    }

    #[test]
    fn other_statements() {
        let kb = parse_kb("# comment\n\nabox r(a, b)   # trailing\nabox a != b\n").unwrap();
        assert!(kb.abox().contains(&Formula::RoleAssertion("r".into(), ind("a"), ind("b"))));
        assert!(kb.abox().contains(&Formula::NotEq(ind("a"), ind("b"))));
        assert_eq!(kb.individuals(), [ind("a"), ind("b")]);
    }

    #[test]
    fn empty_abox_is_augmented() {
        let kb = parse_kb("tbox A sub B\n").unwrap();
        assert!(kb.is_augmented());
        assert_eq!(kb.abox().len(), 1);
    }

    #[test]
    fn non_simple_role_rejected() {
        let err = parse_kb("rbox trans r\nabox a : atleast 1 r A").unwrap_err();
        assert!(err.to_string().contains("non-simple role"), "{err}");
        assert!(parse_kb("rbox trans t\nrbox r sub t\nabox a : atmost 2 r A").is_ok());
    }

    #[test]
    fn error_positions() {
        let cases = [
            ("abox a : (A B)", 1, 13),
            ("abox a : A\nabox b : some r", 2, 16),
            ("tbox A subs B", 1, 8),
            ("abox a ? A", 1, 8),
            ("abox a : A extra", 1, 12),
            ("abox a : atmost 4294967295 r A", 1, 17),
            ("abox and : A", 1, 6),
            ("frob", 1, 1),
        ];
        for (text, line, col) in cases {
            match parse_kb(text) {
                Err(ParseError::Syntax { line: l, col: c, .. }) => assert_eq!((l, c), (line, col), "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
