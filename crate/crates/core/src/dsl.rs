//! Feature-detector programs `f : S x A -> {0, 1}`.
//!
//! A program places an attention pointer (at the clicked cell, or at some cell
//! holding a given value) and then checks a [`Condition`] relative to it.

use std::fmt;

use thiserror::Error;

use crate::grid::{coordinate_shift, Action, Cell, GridState, Offset, Pos};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    CellIsValue(Cell),
    Shifted(Offset, Box<Condition>),
    Scanning(Offset, Box<Condition>, Box<Condition>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureProgram {
    AtActionCell(Condition),
    AtCellWithValue(Cell, Condition),
}

impl Condition {
    pub fn cell_is_value(v: Cell) -> Self {
        Condition::CellIsValue(v)
    }

    pub fn shifted(o: Offset, inner: Condition) -> Self {
        Condition::Shifted(o, Box::new(inner))
    }

    pub fn scanning(o: Offset, first: Condition, second: Condition) -> Self {
        Condition::Scanning(o, Box::new(first), Box::new(second))
    }

    /// Evaluates the condition with the attention pointer at `p`.
    pub fn holds(&self, s: &GridState, p: Pos) -> bool {
        match self {
            Condition::CellIsValue(v) => s.value_at(p) == *v,
            Condition::Shifted(o, inner) => inner.holds(s, coordinate_shift(p, *o)),
            Condition::Scanning(o, first, second) => {
                // Once the pointer is far off-grid every outcome is constant.
                let cap = s.height() + s.width() + 2;
                let mut q = p;
                for _ in 0..cap {
                    q = coordinate_shift(q, *o);
                    if first.holds(s, q) {
                        return true;
                    }
                    if second.holds(s, q) {
                        return false;
                    }
                }
                false
            }
        }
    }

    fn size(&self) -> usize {
        match self {
            Condition::CellIsValue(_) => 1,
            Condition::Shifted(_, c) => 1 + c.size(),
            Condition::Scanning(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    fn depth(&self) -> usize {
        match self {
            Condition::CellIsValue(_) => 1,
            Condition::Shifted(_, c) => 1 + c.depth(),
            Condition::Scanning(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub(crate) fn values(&self, out: &mut Vec<Cell>) {
        match self {
            Condition::CellIsValue(v) => out.push(*v),
            Condition::Shifted(_, c) => c.values(out),
            Condition::Scanning(_, a, b) => {
                a.values(out);
                b.values(out);
            }
        }
    }
}

impl FeatureProgram {
    pub fn evaluate(&self, s: &GridState, a: Action) -> bool {
        match self {
            FeatureProgram::AtActionCell(c) => c.holds(s, a.pos()),
            FeatureProgram::AtCellWithValue(..) => self.evaluate_state(s),
        }
    }

    /// Whether the result can differ between actions on the same state.
    pub fn depends_on_action(&self) -> bool {
        matches!(self, FeatureProgram::AtActionCell(_))
    }

    /// Value of an action-independent program; for `AtActionCell` this is
    /// meaningless and returns false.
    pub fn evaluate_state(&self, s: &GridState) -> bool {
        match self {
            FeatureProgram::AtCellWithValue(v, c) => s.find_all(*v).any(|p| c.holds(s, p.pos())),
            FeatureProgram::AtActionCell(_) => false,
        }
    }

    /// Number of DSL method calls in the program.
    pub fn size(&self) -> usize {
        match self {
            FeatureProgram::AtActionCell(c) | FeatureProgram::AtCellWithValue(_, c) => 1 + c.size(),
        }
    }

    /// Parse-tree depth counted in method calls.
    pub fn depth(&self) -> usize {
        match self {
            FeatureProgram::AtActionCell(c) | FeatureProgram::AtCellWithValue(_, c) => {
                1 + c.depth()
            }
        }
    }

    pub fn condition(&self) -> &Condition {
        match self {
            FeatureProgram::AtActionCell(c) | FeatureProgram::AtCellWithValue(_, c) => c,
        }
    }

    /// Every value literal mentioned by the program.
    pub fn values(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        if let FeatureProgram::AtCellWithValue(v, _) = self {
            out.push(*v);
        }
        self.condition().values(&mut out);
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src: text, pos: 0 };
        let prog = p.program()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(prog)
    }
}

/// Number of method calls in a program.
pub fn program_size(f: &FeatureProgram) -> usize {
    f.size()
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::CellIsValue(v) => write!(f, "cell_is_value({v})"),
            Condition::Shifted(o, c) => write!(f, "shifted({o}, {c})"),
            Condition::Scanning(o, a, b) => write!(f, "scanning({o}, {a}, {b})"),
        }
    }
}

impl fmt::Display for FeatureProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureProgram::AtActionCell(c) => write!(f, "at_action_cell({c})"),
            FeatureProgram::AtCellWithValue(v, c) => write!(f, "at_cell_with_value({v}, {c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input; equals the input length at end-of-input.
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        let message = message.into();
        let message = if self.pos >= self.src.len() {
            format!("{message} (at end-of-input)")
        } else {
            message
        };
        ParseError {
            position: self.pos,
            message,
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self) -> Result<&str, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected identifier"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.src[start..self.pos])
    }

    fn int(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let mut len = usize::from(rest.starts_with('-'));
        len += rest[len..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len() - len);
        let text = &rest[..len];
        let v = text
            .parse()
            .map_err(|_| self.error("expected integer"))?;
        self.pos += len;
        Ok(v)
    }

    fn value(&mut self) -> Result<Cell, ParseError> {
        let start = self.pos;
        let name = self.ident()?;
        name.parse().map_err(|m: String| ParseError {
            position: start,
            message: m,
        })
    }

    fn offset(&mut self) -> Result<Offset, ParseError> {
        self.expect("(")?;
        let x = self.int()?;
        self.expect(",")?;
        let y = self.int()?;
        self.expect(")")?;
        Ok(Offset::new(x, y))
    }

    fn program(&mut self) -> Result<FeatureProgram, ParseError> {
        let start = self.pos;
        match self.ident()? {
            "at_action_cell" => {
                self.expect("(")?;
                let c = self.condition()?;
                self.expect(")")?;
                Ok(FeatureProgram::AtActionCell(c))
            }
            "at_cell_with_value" => {
                self.expect("(")?;
                let v = self.value()?;
                self.expect(",")?;
                let c = self.condition()?;
                self.expect(")")?;
                Ok(FeatureProgram::AtCellWithValue(v, c))
            }
            other => Err(ParseError {
                position: start,
                message: format!("unknown program method `{other}`"),
            }),
        }
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.ident()? {
            "cell_is_value" => {
                self.expect("(")?;
                let v = self.value()?;
                self.expect(")")?;
                Ok(Condition::CellIsValue(v))
            }
            "shifted" => {
                self.expect("(")?;
                let o = self.offset()?;
                self.expect(",")?;
                let c = self.condition()?;
                self.expect(")")?;
                Ok(Condition::shifted(o, c))
            }
            "scanning" => {
                self.expect("(")?;
                let o = self.offset()?;
                self.expect(",")?;
                let a = self.condition()?;
                self.expect(",")?;
                let b = self.condition()?;
                self.expect(")")?;
                Ok(Condition::scanning(o, a, b))
            }
            other => Err(ParseError {
                position: start,
                message: format!("unknown condition method `{other}`"),
            }),
        }
    }
}
