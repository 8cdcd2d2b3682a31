//! Recursive-descent parser producing the raw (unresolved) syntax tree.
//!
//! The raw tree keeps every name together with its source position so
//! that resolution can report where a reference went wrong. Paths are
//! kept in textual order here; resolution reverses composites into
//! application order and infers their start vertex.

use crate::kernel::ConvergenceKind;

use super::lexer::{Token, TokenKind};
use super::{ParseError, Position};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Name {
    pub text: String,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawArrow {
    pub name: Name,
    pub source: Name,
    pub target: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawCompose {
    /// `compose g.f = h;` — `h` is `g` after `f`.
    pub g: Name,
    pub f: Name,
    pub h: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawCategory {
    pub name: Name,
    pub objects: Vec<Name>,
    pub arrows: Vec<RawArrow>,
    pub composes: Vec<RawCompose>,
}

/// A path as written: `id(A)`, or names in textual order (`g.f` is
/// `[g, f]`, meaning `f` then `g`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawPath {
    Id(Name),
    Composite(Vec<Name>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawShapeEdge {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub image: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawConvergence {
    pub kind: ConvergenceKind,
    pub apex: Name,
    /// Shape node together with its ambient leg arrow.
    pub legs: Vec<(Name, Name)>,
    pub nodes: Vec<Name>,
    pub edges: Vec<RawShapeEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawSketch {
    pub name: Name,
    pub extends: Option<Name>,
    pub objects: Vec<Name>,
    pub arrows: Vec<RawArrow>,
    pub commutes: Vec<(RawPath, RawPath)>,
    pub convergences: Vec<RawConvergence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawSequent {
    pub name: Name,
    pub x: Name,
    pub a: Name,
    pub b: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawStructure {
    pub name: Name,
    pub sketch: Name,
    pub category: Name,
    pub maps: Vec<(Name, Name)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawDecl {
    Category(RawCategory),
    Sketch(RawSketch),
    Sequent(RawSequent),
    Structure(RawStructure),
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    i: usize,
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, i: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.i]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.i].clone();
        if self.i + 1 < self.tokens.len() {
            self.i += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            position: t.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.kind.to_string(),
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Punct(q) if *q == p)
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Keyword(q) if *q == k)
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        if self.at_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{p}`")]))
        }
    }

    fn expect_keyword(&mut self, k: &'static str) -> Result<(), ParseError> {
        if self.at_keyword(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{k}`")]))
        }
    }

    fn expect_name(&mut self) -> Result<Name, ParseError> {
        match &self.peek().kind {
            TokenKind::Name(n) => {
                let name = Name {
                    text: n.clone(),
                    pos: self.peek().pos,
                };
                self.bump();
                Ok(name)
            }
            _ => Err(self.error(&["a name"])),
        }
    }

    /// Possibly-empty comma-separated name list, ended by the current
    /// delimiter (not consumed).
    fn name_list(&mut self, end: &str) -> Result<Vec<Name>, ParseError> {
        let mut names = Vec::new();
        if self.at_punct(end) {
            return Ok(names);
        }
        names.push(self.expect_name()?);
        while self.at_punct(",") {
            self.bump();
            names.push(self.expect_name()?);
        }
        Ok(names)
    }

    pub fn document(&mut self) -> Result<Vec<RawDecl>, ParseError> {
        let mut decls = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return Ok(decls),
                TokenKind::Keyword("category") => decls.push(RawDecl::Category(self.category()?)),
                TokenKind::Keyword("sketch") => decls.push(RawDecl::Sketch(self.sketch()?)),
                TokenKind::Keyword("sequent") => decls.push(RawDecl::Sequent(self.sequent()?)),
                TokenKind::Keyword("structure") => {
                    decls.push(RawDecl::Structure(self.structure()?))
                }
                _ => {
                    return Err(self.error(&[
                        "`category`",
                        "`sketch`",
                        "`sequent`",
                        "`structure`",
                        "end of input",
                    ]))
                }
            }
        }
    }

    fn objects_line(&mut self) -> Result<Vec<Name>, ParseError> {
        self.expect_keyword("objects")?;
        self.expect_punct(":")?;
        let names = self.name_list(";")?;
        self.expect_punct(";")?;
        Ok(names)
    }

    fn arrow_decl(&mut self) -> Result<RawArrow, ParseError> {
        self.expect_keyword("arrow")?;
        let name = self.expect_name()?;
        self.expect_punct(":")?;
        let source = self.expect_name()?;
        self.expect_punct("->")?;
        let target = self.expect_name()?;
        self.expect_punct(";")?;
        Ok(RawArrow {
            name,
            source,
            target,
        })
    }

    fn category(&mut self) -> Result<RawCategory, ParseError> {
        self.expect_keyword("category")?;
        let name = self.expect_name()?;
        self.expect_punct("{")?;
        let objects = self.objects_line()?;
        let mut arrows = Vec::new();
        while self.at_keyword("arrow") {
            arrows.push(self.arrow_decl()?);
        }
        let mut composes = Vec::new();
        while self.at_keyword("compose") {
            self.bump();
            let g = self.expect_name()?;
            self.expect_punct(".")?;
            let f = self.expect_name()?;
            self.expect_punct("=")?;
            let h = self.expect_name()?;
            self.expect_punct(";")?;
            composes.push(RawCompose { g, f, h });
        }
        self.expect_punct("}")?;
        Ok(RawCategory {
            name,
            objects,
            arrows,
            composes,
        })
    }

    fn path(&mut self) -> Result<RawPath, ParseError> {
        if self.at_keyword("id") {
            self.bump();
            self.expect_punct("(")?;
            let at = self.expect_name()?;
            self.expect_punct(")")?;
            return Ok(RawPath::Id(at));
        }
        match &self.peek().kind {
            TokenKind::Name(_) => {
                let mut names = vec![self.expect_name()?];
                while self.at_punct(".") {
                    self.bump();
                    names.push(self.expect_name()?);
                }
                Ok(RawPath::Composite(names))
            }
            _ => Err(self.error(&["a path (`id(...)` or names joined by `.`)"])),
        }
    }

    fn convergence(&mut self) -> Result<RawConvergence, ParseError> {
        let kind = if self.at_keyword("limit") {
            self.bump();
            ConvergenceKind::Limit
        } else {
            self.expect_keyword("colimit")?;
            ConvergenceKind::Colimit
        };
        let apex = self.expect_name()?;
        self.expect_keyword("with")?;
        self.expect_punct("(")?;
        let mut legs = Vec::new();
        if !self.at_punct(")") {
            loop {
                let node = self.expect_name()?;
                self.expect_punct(":")?;
                let arrow = self.expect_name()?;
                legs.push((node, arrow));
                if self.at_punct(",") {
                    self.bump();
                    continue;
                }
                break;
            }
        }
        self.expect_punct(")")?;
        self.expect_keyword("over")?;
        self.expect_punct("{")?;
        self.expect_keyword("nodes")?;
        self.expect_punct(":")?;
        let nodes = self.name_list(";")?;
        self.expect_punct(";")?;
        let mut edges = Vec::new();
        while self.at_keyword("edge") {
            self.bump();
            let name = self.expect_name()?;
            self.expect_punct(":")?;
            let source = self.expect_name()?;
            self.expect_punct("->")?;
            let target = self.expect_name()?;
            self.expect_punct("|->")?;
            let image = self.expect_name()?;
            self.expect_punct(";")?;
            edges.push(RawShapeEdge {
                name,
                source,
                target,
                image,
            });
        }
        self.expect_punct("}")?;
        self.expect_punct(";")?;
        Ok(RawConvergence {
            kind,
            apex,
            legs,
            nodes,
            edges,
        })
    }

    fn sketch(&mut self) -> Result<RawSketch, ParseError> {
        self.expect_keyword("sketch")?;
        let name = self.expect_name()?;
        let extends = if self.at_keyword("extends") {
            self.bump();
            Some(self.expect_name()?)
        } else {
            None
        };
        self.expect_punct("{")?;
        let objects = self.objects_line()?;
        let mut arrows = Vec::new();
        while self.at_keyword("arrow") {
            arrows.push(self.arrow_decl()?);
        }
        let mut commutes = Vec::new();
        while self.at_keyword("commute") {
            self.bump();
            let lhs = self.path()?;
            self.expect_punct("=")?;
            let rhs = self.path()?;
            self.expect_punct(";")?;
            commutes.push((lhs, rhs));
        }
        let mut convergences = Vec::new();
        while self.at_keyword("limit") || self.at_keyword("colimit") {
            convergences.push(self.convergence()?);
        }
        self.expect_punct("}")?;
        Ok(RawSketch {
            name,
            extends,
            objects,
            arrows,
            commutes,
            convergences,
        })
    }

    fn sequent(&mut self) -> Result<RawSequent, ParseError> {
        self.expect_keyword("sequent")?;
        let name = self.expect_name()?;
        self.expect_punct("=")?;
        let x = self.expect_name()?;
        self.expect_punct("|-")?;
        let a = self.expect_name()?;
        self.expect_punct("|-")?;
        let b = self.expect_name()?;
        self.expect_punct(";")?;
        Ok(RawSequent { name, x, a, b })
    }

    fn structure(&mut self) -> Result<RawStructure, ParseError> {
        self.expect_keyword("structure")?;
        let name = self.expect_name()?;
        self.expect_punct(":")?;
        let sketch = self.expect_name()?;
        self.expect_keyword("in")?;
        let category = self.expect_name()?;
        self.expect_punct("{")?;
        let mut maps = Vec::new();
        while self.at_keyword("map") {
            self.bump();
            let from = self.expect_name()?;
            self.expect_punct("|->")?;
            let to = self.expect_name()?;
            self.expect_punct(";")?;
            maps.push((from, to));
        }
        self.expect_punct("}")?;
        Ok(RawStructure {
            name,
            sketch,
            category,
            maps,
        })
    }
}
