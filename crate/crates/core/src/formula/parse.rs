//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := iff ;
//! iff     := imp { "<->" imp } ;
//! imp     := or  [ "->" imp ] ;
//! or      := and { "|" and } ;
//! and     := unary { "&" unary } ;
//! unary   := "~" unary | modal | atom | "true" | "false" | "(" formula ")" ;
//! modal   := "[" ident "]" unary | "<" ident ">" unary
//!          | "[Y]" unary | "<Y>" unary
//!          | "[" ident "@" ident "]" unary | "<" ident "@" ident ">" unary ;
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Formula, Signature, FLAT};
use crate::action::ActionModel;
use crate::error::{Error, Result};

/// Named action models visible to the parser.
pub type ActionRegistry = BTreeMap<String, Arc<ActionModel>>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBracket,
    RBracket,
    Lt,
    Gt,
    LParen,
    RParen,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Iff,
    At,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'@' => Tok::At,
            b'>' => Tok::Gt,
            b'<' => {
                if text[i..].starts_with("<->") {
                    i += 2;
                    Tok::Iff
                } else {
                    Tok::Lt
                }
            }
            b'-' => {
                if text[i..].starts_with("->") {
                    i += 1;
                    Tok::Arrow
                } else {
                    return Err(syntax(i, "expected `->`"));
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((start, Tok::Ident(text[i..j].to_string())));
                i = j;
                continue;
            }
            _ if text[i..].starts_with(FLAT) => {
                out.push((start, Tok::Ident(FLAT.to_string())));
                i += FLAT.len();
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, &format!("unexpected character `{ch}`")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

fn syntax(pos: usize, message: &str) -> Error {
    Error::Syntax {
        pos,
        message: message.to_string(),
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
    registry: &'a ActionRegistry,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(at, &format!("expected {what}"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(syntax(at, "expected identifier")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::LBracket) => {
                self.bump();
                self.modal(Tok::RBracket, "`]`", false)
            }
            Some(Tok::Lt) => {
                self.bump();
                self.modal(Tok::Gt, "`>`", true)
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                match name.as_str() {
                    "true" => Ok(Formula::top()),
                    "false" => Ok(Formula::Bottom),
                    _ if self.sig.has_atom(&name) => Ok(Formula::Atom(name)),
                    _ => Err(Error::UnknownAtom(name)),
                }
            }
            _ => Err(syntax(at, "expected a formula")),
        }
    }

    fn modal(&mut self, close: Tok, close_name: &str, diamond: bool) -> Result<Formula> {
        let head = self.ident()?;
        if self.peek_at(0) == Some(&Tok::At) {
            self.bump();
            let event = self.ident()?;
            self.expect(close, close_name)?;
            let action = self
                .registry
                .get(&head)
                .cloned()
                .ok_or_else(|| Error::UnknownAction(head.clone()))?;
            if action.event_index(&event).is_none() {
                return Err(Error::UnknownEvent {
                    action: head,
                    event,
                });
            }
            let body = self.unary()?;
            return Ok(if diamond {
                Formula::update_diamond(action, event, body)
            } else {
                Formula::update(action, event, body)
            });
        }
        self.expect(close, close_name)?;
        let body = self.unary()?;
        if head == "Y" {
            return Ok(if diamond {
                Formula::yesterday_diamond(body)
            } else {
                Formula::yesterday(body)
            });
        }
        if !self.sig.has_agent(&head) {
            return Err(Error::UnknownAgent(head));
        }
        Ok(if diamond {
            Formula::diamond(head, body)
        } else {
            Formula::boxed(head, body)
        })
    }
}

/// Parses `text` against a signature, resolving `Name@event` through `registry`.
pub fn parse(text: &str, sig: &Signature, registry: &ActionRegistry) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        sig,
        registry,
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(f)
}
