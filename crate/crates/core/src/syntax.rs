//! Concrete syntax for Brane terms and the typed meta-syntax.
//!
//! ```text
//! term  := "\" ident ":" type "." term | comp
//! comp  := cell ("o" cell)*
//! cell  := par ("[" term? "]")?
//! par   := seq ("|" seq)*
//! seq   := action ("." seq)? | app
//! app   := atom ("(" term ")")*
//! atom  := "0" | "void" | "$" ident | "(" term ")"
//! action:= ("phago"|"exo"|"coexo") name | ("cophago"|"pino") name "{" term "}"
//! ```
//!
//! A bare action `a` stands for `a . 0` and `m[]` for `m[void]`. Lines may
//! carry `#` comments.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::typing::Type;

/// Membrane action name, drawn from an open universe of identifiers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(ident: &str) -> Result<Name, ParseError> {
        if is_ident(ident) {
            Ok(Name(Arc::from(ident)))
        } else {
            Err(ParseError::Syntax {
                line: 1,
                column: 1,
                message: format!("`{ident}` is not a valid name"),
            })
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    Phago,
    CoPhago,
    Exo,
    CoExo,
    Pino,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Phago,
        ActionKind::CoPhago,
        ActionKind::Exo,
        ActionKind::CoExo,
        ActionKind::Pino,
    ];

    /// `cophago` and `pino` carry a membrane argument.
    pub fn takes_arg(self) -> bool {
        matches!(self, ActionKind::CoPhago | ActionKind::Pino)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            ActionKind::Phago => "phago",
            ActionKind::CoPhago => "cophago",
            ActionKind::Exo => "exo",
            ActionKind::CoExo => "coexo",
            ActionKind::Pino => "pino",
        }
    }

    pub fn from_keyword(word: &str) -> Option<ActionKind> {
        ActionKind::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub kind: ActionKind,
    pub name: Name,
    pub arg: Option<Box<Term>>,
}

impl Action {
    pub fn simple(kind: ActionKind, name: Name) -> Action {
        debug_assert!(!kind.takes_arg());
        Action {
            kind,
            name,
            arg: None,
        }
    }

    pub fn with_arg(kind: ActionKind, name: Name, arg: Term) -> Action {
        debug_assert!(kind.takes_arg());
        Action {
            kind,
            name,
            arg: Some(Box::new(arg)),
        }
    }
}

/// Unified syntax tree for membranes, systems and meta-terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    ZeroMem,
    VoidSys,
    Var(String),
    Prefix(Action, Box<Term>),
    MemPar(Box<Term>, Box<Term>),
    SysComp(Box<Term>, Box<Term>),
    Cell(Box<Term>, Box<Term>),
    Lambda(String, Type, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn prefix(action: Action, cont: Term) -> Term {
        Term::Prefix(action, Box::new(cont))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::MemPar(Box::new(l), Box::new(r))
    }

    pub fn comp(l: Term, r: Term) -> Term {
        Term::SysComp(Box::new(l), Box::new(r))
    }

    pub fn cell(mem: Term, body: Term) -> Term {
        Term::Cell(Box::new(mem), Box::new(body))
    }

    pub fn lambda(var: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Lambda(var.into(), ty, Box::new(body))
    }

    pub fn app(f: Term, arg: Term) -> Term {
        Term::App(Box::new(f), Box::new(arg))
    }

    /// No variables, abstractions or applications anywhere.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::ZeroMem | Term::VoidSys => true,
            Term::Var(_) | Term::Lambda(..) | Term::App(..) => false,
            Term::Prefix(a, c) => a.arg.as_deref().is_none_or(Term::is_ground) && c.is_ground(),
            Term::MemPar(l, r) | Term::SysComp(l, r) | Term::Cell(l, r) => {
                l.is_ground() && r.is_ground()
            }
        }
    }

    /// Number of syntax nodes; an action argument counts towards its prefix.
    pub fn size(&self) -> usize {
        match self {
            Term::ZeroMem | Term::VoidSys | Term::Var(_) => 1,
            Term::Prefix(a, c) => 1 + a.arg.as_deref().map_or(0, Term::size) + c.size(),
            Term::MemPar(l, r) | Term::SysComp(l, r) | Term::Cell(l, r) | Term::App(l, r) => {
                1 + l.size() + r.size()
            }
            Term::Lambda(_, _, b) => 1 + b.size(),
        }
    }

    /// Action names occurring anywhere in the term, in first-seen order.
    pub fn names(&self) -> Vec<Name> {
        fn go(t: &Term, out: &mut Vec<Name>) {
            match t {
                Term::ZeroMem | Term::VoidSys | Term::Var(_) => {}
                Term::Prefix(a, c) => {
                    if !out.contains(&a.name) {
                        out.push(a.name.clone());
                    }
                    if let Some(arg) = &a.arg {
                        go(arg, out);
                    }
                    go(c, out);
                }
                Term::MemPar(l, r) | Term::SysComp(l, r) | Term::Cell(l, r) | Term::App(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Term::Lambda(_, _, b) => go(b, out),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Syntactic sort when it is evident from the head constructor.
    pub(crate) fn evident_type(&self) -> Option<Type> {
        match self {
            Term::ZeroMem | Term::Prefix(..) | Term::MemPar(..) => Some(Type::Mem),
            Term::VoidSys | Term::SysComp(..) | Term::Cell(..) => Some(Type::Sys),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: `{action}` requires a `{{...}}` membrane argument")]
    Arg {
        line: usize,
        column: usize,
        action: String,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. } | ParseError::Arg { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    Dollar,
    Backslash,
    Colon,
    Dot,
    Arrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Bar,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Dollar => f.write_str("`$`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            toks.push((Tok::Ident(ident), pos));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            '0' => Tok::Zero,
            '$' => Tok::Dollar,
            '\\' => Tok::Backslash,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '|' => Tok::Bar,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            other => {
                return Err(ParseError::Syntax {
                    line: pos.line,
                    column: pos.column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        toks.push((tok, pos));
    }
    toks.push((Tok::Eof, Pos { line, column }));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let pos = self.pos();
        Err(ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Backslash {
            return self.lambda();
        }
        self.comp()
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Backslash)?;
        let var = self.ident()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(Tok::Dot)?;
        let body = self.term()?;
        Ok(Term::lambda(var, ty, body))
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::Ident(s) => {
                let t = match s.as_str() {
                    "sys" => Type::Sys,
                    "mem" => Type::Mem,
                    "act" => Type::Act,
                    _ => return self.error(format!("unknown type `{s}`")),
                };
                self.advance();
                t
            }
            other => return self.error(format!("expected a type, found {other}")),
        };
        if *self.peek() == Tok::Arrow {
            self.advance();
            let cod = self.ty()?;
            return Ok(Type::arrow(dom, cod));
        }
        Ok(dom)
    }

    fn comp(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.cell()?;
        while self.is_keyword("o") {
            self.advance();
            let rhs = self.cell()?;
            lhs = Term::comp(lhs, rhs);
        }
        Ok(lhs)
    }

    fn cell(&mut self) -> Result<Term, ParseError> {
        let mem = self.par()?;
        if *self.peek() != Tok::LBrack {
            return Ok(mem);
        }
        self.advance();
        let body = if *self.peek() == Tok::RBrack {
            Term::VoidSys
        } else {
            self.term()?
        };
        self.expect(Tok::RBrack)?;
        Ok(Term::cell(mem, body))
    }

    fn par(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.seq()?;
        while *self.peek() == Tok::Bar {
            self.advance();
            let rhs = self.seq()?;
            lhs = Term::par(lhs, rhs);
        }
        Ok(lhs)
    }

    fn seq(&mut self) -> Result<Term, ParseError> {
        let kind = match self.peek() {
            Tok::Ident(s) => ActionKind::from_keyword(s),
            _ => None,
        };
        let Some(kind) = kind else {
            return self.app();
        };
        let at = self.pos();
        self.advance();
        let name = self.ident()?;
        let name = Name(Arc::from(name.as_str()));
        let action = if kind.takes_arg() {
            if *self.peek() != Tok::LBrace {
                return Err(ParseError::Arg {
                    line: at.line,
                    column: at.column,
                    action: format!("{} {}", kind.keyword(), name),
                });
            }
            self.advance();
            let arg = self.term()?;
            self.expect(Tok::RBrace)?;
            Action::with_arg(kind, name, arg)
        } else {
            if *self.peek() == Tok::LBrace {
                return self.error(format!("`{}` takes no argument", kind.keyword()));
            }
            Action::simple(kind, name)
        };
        let cont = if *self.peek() == Tok::Dot {
            self.advance();
            self.seq()?
        } else {
            Term::ZeroMem
        };
        Ok(Term::prefix(action, cont))
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut head = self.atom()?;
        while *self.peek() == Tok::LParen {
            self.advance();
            let arg = self.term()?;
            self.expect(Tok::RParen)?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Zero => {
                self.advance();
                Ok(Term::ZeroMem)
            }
            Tok::Ident(s) if s == "void" => {
                self.advance();
                Ok(Term::VoidSys)
            }
            Tok::Dollar => {
                self.advance();
                Ok(Term::Var(self.ident()?))
            }
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Backslash => self.lambda(),
            other => self.error(format!("expected a term, found {other}")),
        }
    }
}

/// Parses any term of the meta-syntax.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after term", p.peek()));
    }
    Ok(t)
}

fn parse_sorted(text: &str, want: Type) -> Result<Term, ParseError> {
    let t = parse_term(text)?;
    match t.evident_type() {
        Some(found) if found != want => {
            let (line, column) = first_token_pos(text);
            Err(ParseError::Syntax {
                line,
                column,
                message: format!("expected a {want} term, found a {found} term"),
            })
        }
        _ => Ok(t),
    }
}

fn first_token_pos(text: &str) -> (usize, usize) {
    lex(text)
        .ok()
        .and_then(|t| t.first().map(|(_, p)| (p.line, p.column)))
        .unwrap_or((1, 1))
}

pub fn parse_system(text: &str) -> Result<Term, ParseError> {
    parse_sorted(text, Type::Sys)
}

pub fn parse_membrane(text: &str) -> Result<Term, ParseError> {
    parse_sorted(text, Type::Mem)
}

// Binding strength, loosest first.
const LVL_LAMBDA: u8 = 0;
const LVL_COMP: u8 = 1;
const LVL_CELL: u8 = 2;
const LVL_PAR: u8 = 3;
const LVL_SEQ: u8 = 4;
const LVL_APP: u8 = 5;

fn level(t: &Term) -> u8 {
    match t {
        Term::Lambda(..) => LVL_LAMBDA,
        Term::SysComp(..) => LVL_COMP,
        Term::Cell(..) => LVL_CELL,
        Term::MemPar(..) => LVL_PAR,
        Term::Prefix(..) => LVL_SEQ,
        Term::App(..) => LVL_APP,
        Term::ZeroMem | Term::VoidSys | Term::Var(_) => 6,
    }
}

fn write_at(t: &Term, min: u8, out: &mut String) {
    if level(t) < min {
        out.push('(');
        write_term(t, out);
        out.push(')');
    } else {
        write_term(t, out);
    }
}

fn write_action(a: &Action, out: &mut String) {
    out.push_str(a.kind.keyword());
    out.push(' ');
    out.push_str(a.name.as_str());
    if let Some(arg) = &a.arg {
        out.push('{');
        write_term(arg, out);
        out.push('}');
    }
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::ZeroMem => out.push('0'),
        Term::VoidSys => out.push_str("void"),
        Term::Var(x) => {
            out.push('$');
            out.push_str(x);
        }
        Term::Prefix(a, cont) => {
            write_action(a, out);
            if **cont != Term::ZeroMem {
                out.push('.');
                write_at(cont, LVL_SEQ, out);
            }
        }
        Term::MemPar(l, r) => {
            write_at(l, LVL_PAR, out);
            out.push_str(" | ");
            write_at(r, LVL_SEQ, out);
        }
        Term::SysComp(l, r) => {
            write_at(l, LVL_COMP, out);
            out.push_str(" o ");
            write_at(r, LVL_CELL, out);
        }
        Term::Cell(m, b) => {
            write_at(m, LVL_PAR, out);
            out.push('[');
            write_term(b, out);
            out.push(']');
        }
        Term::Lambda(x, ty, b) => {
            out.push('\\');
            out.push_str(x);
            out.push(':');
            out.push_str(&ty.to_string());
            out.push_str(". ");
            write_term(b, out);
        }
        Term::App(f, a) => {
            write_at(f, LVL_APP, out);
            out.push('(');
            write_term(a, out);
            out.push(')');
        }
    }
}

/// Renders a term in concrete syntax; the output reparses to the same tree.
pub fn render(term: &Term) -> String {
    let mut out = String::new();
    write_term(term, &mut out);
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn pre(kind: ActionKind, name: &str, cont: Term) -> Term {
        Term::prefix(Action::simple(kind, n(name)), cont)
    }

    #[test]
    fn void_and_zero() {
        assert_eq!(parse_system("void").unwrap(), Term::VoidSys);
        assert_eq!(parse_membrane("0").unwrap(), Term::ZeroMem);
    }

    #[test]
    fn cophago_cell() {
        let t = parse_system("cophago n {0} . 0 [ void ]").unwrap();
        let expected = Term::cell(
            Term::prefix(
                Action::with_arg(ActionKind::CoPhago, n("n"), Term::ZeroMem),
                Term::ZeroMem,
            ),
            Term::VoidSys,
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn composition_of_cells() {
        let t = parse_system("phago n [ void ] o exo m [ void ]").unwrap();
        let expected = Term::comp(
            Term::cell(pre(ActionKind::Phago, "n", Term::ZeroMem), Term::VoidSys),
            Term::cell(pre(ActionKind::Exo, "m", Term::ZeroMem), Term::VoidSys),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn prefix_sequence() {
        let t = parse_membrane("phago n . exo m").unwrap();
        assert_eq!(
            t,
            pre(
                ActionKind::Phago,
                "n",
                pre(ActionKind::Exo, "m", Term::ZeroMem)
            )
        );
    }

    #[test]
    fn pino_argument_and_par() {
        let t = parse_membrane("pino n {exo m} | coexo k").unwrap();
        let expected = Term::par(
            Term::prefix(
                Action::with_arg(
                    ActionKind::Pino,
                    n("n"),
                    pre(ActionKind::Exo, "m", Term::ZeroMem),
                ),
                Term::ZeroMem,
            ),
            pre(ActionKind::CoExo, "k", Term::ZeroMem),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn empty_brackets_mean_void() {
        assert_eq!(parse_system("m[]").unwrap_err().position(), (1, 1));
        let t = parse_system("phago m[]").unwrap();
        assert_eq!(
            t,
            Term::cell(pre(ActionKind::Phago, "m", Term::ZeroMem), Term::VoidSys)
        );
    }

    #[test]
    fn render_basics() {
        assert_eq!(render(&Term::VoidSys), "void");
        assert_eq!(render(&Term::cell(Term::ZeroMem, Term::VoidSys)), "0[void]");
    }

    #[test]
    fn missing_argument_is_arg_error() {
        let err = parse_membrane("x | cophago n . 0").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse_membrane("cophago n . 0").unwrap_err();
        assert_eq!(
            err,
            ParseError::Arg {
                line: 1,
                column: 1,
                action: "cophago n".into()
            }
        );
        let err = parse_membrane("exo m |\n  pino k").unwrap_err();
        assert_eq!(err.position(), (2, 3));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_system("phago n [ void ]\n o ]").unwrap_err();
        assert_eq!(err.position(), (2, 4));
        let err = parse_system("0[void] % x").unwrap_err();
        assert_eq!(err.position(), (1, 9));
    }

    #[test]
    fn meta_syntax() {
        let t = parse_term("\\Z:sys -> sys. $Z(0[void])").unwrap();
        assert_eq!(
            t,
            Term::lambda(
                "Z",
                Type::arrow(Type::Sys, Type::Sys),
                Term::app(Term::var("Z"), Term::cell(Term::ZeroMem, Term::VoidSys))
            )
        );
        let t = parse_term("\\X:sys. \\y:mem. ($y | exo n)[$X] o void").unwrap();
        assert_eq!(render(&t), "\\X:sys. \\y:mem. $y | exo n[$X] o void");
        assert_eq!(parse_term(&render(&t)).unwrap(), t);
    }

    #[test]
    fn comments_are_skipped() {
        let t = parse_system("# a cell\nphago n[void] # trailing\n").unwrap();
        assert_eq!(
            t,
            Term::cell(pre(ActionKind::Phago, "n", Term::ZeroMem), Term::VoidSys)
        );
    }

    #[test]
    fn sort_mismatch_is_reported() {
        assert!(parse_system("phago n").is_err());
        assert!(parse_membrane("void").is_err());
    }

    #[test]
    fn render_parenthesizes_nested_structure() {
        let nested = Term::comp(
            Term::cell(Term::ZeroMem, Term::VoidSys),
            Term::comp(Term::VoidSys, Term::VoidSys),
        );
        assert_eq!(render(&nested), "0[void] o (void o void)");
        assert_eq!(parse_term(&render(&nested)).unwrap(), nested);
        let cont = pre(
            ActionKind::Phago,
            "n",
            Term::par(Term::ZeroMem, Term::ZeroMem),
        );
        assert_eq!(render(&cont), "phago n.(0 | 0)");
        assert_eq!(parse_term(&render(&cont)).unwrap(), cont);
    }
}
