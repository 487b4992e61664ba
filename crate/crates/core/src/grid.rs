//! State, action and trajectory data model shared by every game.
//!
//! Coordinates are `(row, col)` with row 0 at the top. Offsets are `(x, y)`
//! screen displacements: positive `x` moves right, positive `y` moves down.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Longest trajectory (and episode) any game allows.
pub const HORIZON: usize = 60;
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("json: {0}")]
    Json(String),
}

impl GridError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        GridError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for GridError {
    fn from(e: serde_json::Error) -> Self {
        GridError::Json(e.to_string())
    }
}

macro_rules! cells {
    ($($variant:ident => $tag:literal, $glyph:literal;)*) => {
        /// Every cell value used by any game, plus the off-grid token.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[repr(u8)]
        pub enum Cell {
            $($variant,)*
        }

        impl Cell {
            pub const ALL: &'static [Cell] = &[$(Cell::$variant,)*];

            pub fn tag(self) -> &'static str {
                match self {
                    $(Cell::$variant => $tag,)*
                }
            }

            /// Single-character rendering used by the ASCII renderer.
            pub fn glyph(self) -> char {
                match self {
                    $(Cell::$variant => $glyph,)*
                }
            }

            pub fn from_glyph(ch: char) -> Option<Cell> {
                match ch {
                    $($glyph => Some(Cell::$variant),)*
                    _ => None,
                }
            }
        }

        impl FromStr for Cell {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($tag => Ok(Cell::$variant),)*
                    other => Err(format!("unknown cell value tag `{other}`")),
                }
            }
        }
    };
}

cells! {
    Empty => "empty", '.';
    Offscreen => "offscreen", '?';
    Token => "token", 'I';
    BlackKing => "black_king", 'k';
    WhiteKing => "white_king", 'K';
    WhiteQueen => "white_queen", 'Q';
    SelectedWhiteKing => "selected_white_king", 'L';
    SelectedWhiteQueen => "selected_white_queen", 'R';
    Agent => "agent", 'A';
    Target => "target", 'T';
    Wall => "wall", '#';
    Drawn => "drawn", 'D';
    UpArrow => "up_arrow", '^';
    DownArrow => "down_arrow", 'v';
    LeftArrow => "left_arrow", '<';
    RightArrow => "right_arrow", '>';
    Parachuter => "parachuter", 'P';
    Fire => "fire", 'F';
    Block => "block", 'B';
    GreenButton => "green_button", 'G';
    Star => "star", '*';
    Fence => "fence", '+';
    Sheep => "sheep", 'S';
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The six games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Game {
    Nim,
    CheckmateTactic,
    Chase,
    StopTheFall,
    ReachForTheStar,
    FenceIn,
}

impl Game {
    pub const ALL: [Game; 6] = [
        Game::Nim,
        Game::CheckmateTactic,
        Game::Chase,
        Game::StopTheFall,
        Game::ReachForTheStar,
        Game::FenceIn,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Game::Nim => "nim",
            Game::CheckmateTactic => "checkmate_tactic",
            Game::Chase => "chase",
            Game::StopTheFall => "stop_the_fall",
            Game::ReachForTheStar => "reach_for_the_star",
            Game::FenceIn => "fence_in",
        }
    }

    /// Values that may appear in a grid of this game (never includes `Offscreen`).
    pub fn vocabulary(self) -> &'static [Cell] {
        use Cell::*;
        match self {
            Game::Nim => &[Empty, Token],
            Game::CheckmateTactic => &[
                Empty,
                BlackKing,
                WhiteKing,
                WhiteQueen,
                SelectedWhiteKing,
                SelectedWhiteQueen,
            ],
            Game::Chase => &[
                Empty, Agent, Target, Wall, Drawn, UpArrow, DownArrow, LeftArrow, RightArrow,
            ],
            Game::StopTheFall => &[Empty, Parachuter, Fire, Block, Drawn, GreenButton],
            Game::ReachForTheStar => &[Empty, Agent, Star, Drawn, LeftArrow, RightArrow],
            Game::FenceIn => &[Empty, Fence, Sheep],
        }
    }

    /// The DSL value set: the vocabulary plus the off-grid token.
    pub fn dsl_values(self) -> Vec<Cell> {
        let mut v = self.vocabulary().to_vec();
        v.push(Cell::Offscreen);
        v
    }

    pub fn allows(self, cell: Cell) -> bool {
        self.vocabulary().contains(&cell)
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Game {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Game::ALL
            .iter()
            .copied()
            .find(|g| g.id() == s)
            .ok_or_else(|| format!("unknown game `{s}`"))
    }
}

/// Horizontal/vertical displacement of the attention pointer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Offset {
    pub x: i32,
    pub y: i32,
}

impl Offset {
    pub const fn new(x: i32, y: i32) -> Self {
        Offset { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }
}

/// A possibly out-of-bounds grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub row: i32,
    pub col: i32,
}

impl Pos {
    pub const fn new(row: i32, col: i32) -> Self {
        Pos { row, col }
    }
}

/// `(row + o.y, col + o.x)`; the result may leave the grid.
pub fn coordinate_shift(p: Pos, o: Offset) -> Pos {
    Pos::new(p.row + o.y, p.col + o.x)
}

/// A click on one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub row: usize,
    pub col: usize,
}

impl Action {
    pub const fn new(row: usize, col: usize) -> Self {
        Action { row, col }
    }

    pub fn pos(self) -> Pos {
        Pos::new(self.row as i32, self.col as i32)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.row, self.col].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [row, col] = <[usize; 2]>::deserialize(d)?;
        Ok(Action { row, col })
    }
}

/// A rectangular grid of cell values, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridState {
    height: usize,
    width: usize,
    cells: Vec<Cell>,
}

impl GridState {
    pub fn new(height: usize, width: usize, cells: Vec<Cell>) -> Result<Self, GridError> {
        check_dim("height", height)?;
        check_dim("width", width)?;
        if cells.len() != height * width {
            return Err(GridError::invalid(
                "cells",
                format!("expected {} cells, found {}", height * width, cells.len()),
            ));
        }
        if let Some(i) = cells.iter().position(|&c| c == Cell::Offscreen) {
            return Err(GridError::invalid(
                format!("cells[{}][{}]", i / width, i % width),
                "offscreen may not be stored in a grid",
            ));
        }
        Ok(GridState {
            height,
            width,
            cells,
        })
    }

    pub fn filled(height: usize, width: usize, value: Cell) -> Result<Self, GridError> {
        GridState::new(height, width, vec![value; height * width])
    }

    pub fn from_rows(rows: &[Vec<Cell>]) -> Result<Self, GridError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(GridError::invalid(
                    format!("cells[{r}]"),
                    format!("row has {} cells, expected {width}", row.len()),
                ));
            }
        }
        GridState::new(height, width, rows.concat())
    }

    /// Builds a grid from one glyph string per row, as printed by `render`.
    pub fn from_glyphs(rows: &[&str]) -> Result<Self, GridError> {
        let mut out = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let mut cells = Vec::with_capacity(row.len());
            for (c, ch) in row.chars().enumerate() {
                let cell = Cell::from_glyph(ch).ok_or_else(|| {
                    GridError::invalid(format!("cells[{r}][{c}]"), format!("unknown glyph `{ch}`"))
                })?;
                cells.push(cell);
            }
            out.push(cells);
        }
        GridState::from_rows(&out)
    }

    /// One glyph string per row.
    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.cells.len() + self.height);
        for row in self.rows() {
            s.extend(row.iter().map(|c| c.glyph()));
            s.push('\n');
        }
        s
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.height && (p.col as usize) < self.width
    }

    pub fn contains(&self, a: Action) -> bool {
        a.row < self.height && a.col < self.width
    }

    /// Cell value at `p`, or `Offscreen` outside the grid.
    #[inline]
    pub fn value_at(&self, p: Pos) -> Cell {
        if self.in_bounds(p) {
            self.cells[p.row as usize * self.width + p.col as usize]
        } else {
            Cell::Offscreen
        }
    }

    /// In-bounds lookup.
    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.width + col]
    }

    pub fn at(&self, a: Action) -> Cell {
        self.get(a.row, a.col)
    }

    /// Panics on `Offscreen` or out-of-bounds writes.
    pub fn set(&mut self, row: usize, col: usize, value: Cell) {
        assert!(value != Cell::Offscreen, "offscreen may not be stored");
        self.cells[row * self.width + col] = value;
    }

    /// Action for a row-major cell index.
    pub fn action_at_index(&self, index: usize) -> Action {
        Action::new(index / self.width, index % self.width)
    }

    pub fn index_of(&self, a: Action) -> usize {
        a.row * self.width + a.col
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        (0..self.cells.len()).map(move |i| self.action_at_index(i))
    }

    /// Row-major positions holding `value`.
    pub fn find_all(&self, value: Cell) -> impl Iterator<Item = Action> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == value)
            .map(move |(i, _)| self.action_at_index(i))
    }

    pub fn find(&self, value: Cell) -> Option<Action> {
        self.find_all(value).next()
    }

    pub fn count(&self, value: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == value).count()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Cell]> {
        self.cells.chunks(self.width)
    }

    pub fn check_game(&self, game: Game, field: &str) -> Result<(), GridError> {
        for (i, &c) in self.cells.iter().enumerate() {
            if !game.allows(c) {
                return Err(GridError::invalid(
                    format!("{field}.cells[{}][{}]", i / self.width, i % self.width),
                    format!("value `{c}` is not in the {game} vocabulary"),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, GridError> {
        let raw: RawGrid = serde_json::from_str(s)?;
        raw.into_grid("")
    }
}

fn check_dim(field: &str, n: usize) -> Result<(), GridError> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(GridError::invalid(
            field,
            format!("{n} outside [{MIN_DIM}, {MAX_DIM}]"),
        ))
    }
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    height: usize,
    width: usize,
    cells: Vec<Vec<String>>,
}

impl RawGrid {
    fn into_grid(self, prefix: &str) -> Result<GridState, GridError> {
        check_dim(&join(prefix, "height"), self.height)?;
        check_dim(&join(prefix, "width"), self.width)?;
        if self.cells.len() != self.height {
            return Err(GridError::invalid(
                join(prefix, "cells"),
                format!("{} rows, height is {}", self.cells.len(), self.height),
            ));
        }
        let mut cells = Vec::with_capacity(self.height * self.width);
        for (r, row) in self.cells.iter().enumerate() {
            if row.len() != self.width {
                return Err(GridError::invalid(
                    join(prefix, &format!("cells[{r}]")),
                    format!("{} cells, width is {}", row.len(), self.width),
                ));
            }
            for (c, tag) in row.iter().enumerate() {
                let field = join(prefix, &format!("cells[{r}][{c}]"));
                let cell: Cell = tag.parse().map_err(|m| GridError::invalid(&field, m))?;
                if cell == Cell::Offscreen {
                    return Err(GridError::invalid(field, "offscreen may not be stored"));
                }
                cells.push(cell);
            }
        }
        GridState::new(self.height, self.width, cells)
    }
}

impl Serialize for GridState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawGrid {
            height: self.height,
            width: self.width,
            cells: self
                .rows()
                .map(|row| row.iter().map(|c| c.tag().to_string()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        RawGrid::deserialize(d)?
            .into_grid("")
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub state: GridState,
    pub action: Action,
}

/// A demonstration `(s_0, a_0, ..., s_{T-1}, a_{T-1}, s_T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub game: Game,
    pub steps: Vec<Step>,
    pub final_state: GridState,
}

#[derive(Serialize, Deserialize)]
struct RawTrajectory {
    game: String,
    steps: Vec<RawStep>,
    final_state: RawGrid,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    state: RawGrid,
    action: Vec<i64>,
}

fn parse_game(tag: &str) -> Result<Game, GridError> {
    tag.parse().map_err(|m| GridError::invalid("game", m))
}

fn parse_action(raw: &[i64], state: &GridState, field: &str) -> Result<Action, GridError> {
    if raw.len() != 2 || raw.iter().any(|&v| v < 0) {
        return Err(GridError::invalid(
            field,
            format!("expected [row, col] of non-negative integers, found {raw:?}"),
        ));
    }
    let a = Action::new(raw[0] as usize, raw[1] as usize);
    if !state.contains(a) {
        return Err(GridError::invalid(
            field,
            format!(
                "({}, {}) outside {}x{} grid",
                a.row,
                a.col,
                state.height(),
                state.width()
            ),
        ));
    }
    Ok(a)
}

impl Trajectory {
    pub fn validate(&self) -> Result<(), GridError> {
        if self.steps.len() > HORIZON {
            return Err(GridError::invalid(
                "steps",
                format!("{} steps exceed horizon {HORIZON}", self.steps.len()),
            ));
        }
        for (i, step) in self.steps.iter().enumerate() {
            step.state
                .check_game(self.game, &format!("steps[{i}].state"))?;
            if !step.state.contains(step.action) {
                return Err(GridError::invalid(
                    format!("steps[{i}].action"),
                    "action outside grid",
                ));
            }
        }
        self.final_state.check_game(self.game, "final_state")
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Demonstrated `(state, action)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&GridState, Action)> {
        self.steps.iter().map(|s| (&s.state, s.action))
    }

    pub fn to_json(&self) -> String {
        let raw = RawTrajectory {
            game: self.game.id().to_string(),
            steps: self
                .steps
                .iter()
                .map(|s| RawStep {
                    state: raw_of(&s.state),
                    action: vec![s.action.row as i64, s.action.col as i64],
                })
                .collect(),
            final_state: raw_of(&self.final_state),
        };
        serde_json::to_string(&raw).expect("trajectory serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, GridError> {
        let raw: RawTrajectory = serde_json::from_str(s)?;
        let game = parse_game(&raw.game)?;
        let mut steps = Vec::with_capacity(raw.steps.len());
        for (i, step) in raw.steps.into_iter().enumerate() {
            let state = step.state.into_grid(&format!("steps[{i}].state"))?;
            let action = parse_action(&step.action, &state, &format!("steps[{i}].action"))?;
            steps.push(Step { state, action });
        }
        let final_state = raw.final_state.into_grid("final_state")?;
        let t = Trajectory {
            game,
            steps,
            final_state,
        };
        t.validate()?;
        Ok(t)
    }
}

fn raw_of(g: &GridState) -> RawGrid {
    RawGrid {
        height: g.height,
        width: g.width,
        cells: g
            .rows()
            .map(|row| row.iter().map(|c| c.tag().to_string()).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// An initial state for one game, tagged with its split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskInstance {
    pub game: Game,
    pub id: String,
    pub split: Split,
    pub initial_state: GridState,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    game: String,
    id: String,
    split: String,
    initial_state: RawGrid,
}

impl TaskInstance {
    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            game: self.game.id().to_string(),
            id: self.id.clone(),
            split: self.split.to_string(),
            initial_state: raw_of(&self.initial_state),
        };
        serde_json::to_string_pretty(&raw).expect("instance serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self, GridError> {
        let raw: RawInstance = serde_json::from_str(s)?;
        let game = parse_game(&raw.game)?;
        let split = raw
            .split
            .parse()
            .map_err(|m| GridError::invalid("split", m))?;
        let initial_state = raw.initial_state.into_grid("initial_state")?;
        initial_state.check_game(game, "initial_state")?;
        Ok(TaskInstance {
            game,
            id: raw.id,
            split,
            initial_state,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty2() -> GridState {
        GridState::filled(2, 2, Cell::Empty).unwrap()
    }

    #[test]
    fn shift_follows_screen_axes() {
        assert_eq!(
            coordinate_shift(Pos::new(2, 3), Offset::new(1, 0)),
            Pos::new(2, 4)
        );
        assert_eq!(
            coordinate_shift(Pos::new(0, 0), Offset::new(0, -1)),
            Pos::new(-1, 0)
        );
        assert_eq!(
            coordinate_shift(Pos::new(5, 5), Offset::new(0, 0)),
            Pos::new(5, 5)
        );
    }

    #[test]
    fn value_at_reads_offscreen_outside() {
        let g = empty2();
        assert_eq!(g.value_at(Pos::new(0, 1)), Cell::Empty);
        assert_eq!(g.value_at(Pos::new(2, 0)), Cell::Offscreen);
        assert_eq!(g.value_at(Pos::new(-1, -1)), Cell::Offscreen);
    }

    #[test]
    fn grid_rejects_bad_dimensions_and_offscreen() {
        assert!(GridState::filled(1, 4, Cell::Empty).is_err());
        assert!(GridState::filled(4, 31, Cell::Empty).is_err());
        assert!(GridState::new(2, 2, vec![Cell::Empty, Cell::Offscreen, Cell::Empty, Cell::Empty]).is_err());
    }

    #[test]
    fn json_action_outside_grid_names_field() {
        let g = empty2();
        let json = format!(
            r#"{{"game":"nim","steps":[{{"state":{},"action":[2,0]}}],"final_state":{}}}"#,
            g.to_json(),
            g.to_json()
        );
        let err = Trajectory::from_json(&json).unwrap_err();
        assert!(err.to_string().contains("steps[0].action"), "{err}");
    }

    #[test]
    fn json_unknown_tag_names_field() {
        let json = r#"{"height":2,"width":2,"cells":[["empty","empty"],["empty","lava"]]}"#;
        let err = GridState::from_json(json).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cells[1][1]") && msg.contains("lava"), "{msg}");
    }

    #[test]
    fn json_rejects_value_outside_game_vocabulary() {
        let g = GridState::filled(2, 2, Cell::Fence).unwrap();
        let inst = TaskInstance {
            game: Game::Nim,
            id: "x".into(),
            split: Split::Train,
            initial_state: g,
        };
        assert!(TaskInstance::from_json(&inst.to_json()).is_err());
    }

    #[test]
    fn grid_json_shape() {
        let g = empty2();
        assert_eq!(
            g.to_json(),
            r#"{"height":2,"width":2,"cells":[["empty","empty"],["empty","empty"]]}"#
        );
    }

    #[test]
    fn instance_round_trip() {
        let mut g = GridState::filled(3, 2, Cell::Empty).unwrap();
        g.set(2, 0, Cell::Token);
        let inst = TaskInstance {
            game: Game::Nim,
            id: "train-00".into(),
            split: Split::Train,
            initial_state: g,
        };
        assert_eq!(TaskInstance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn every_tag_parses_back() {
        for &c in Cell::ALL {
            assert_eq!(c.tag().parse::<Cell>().unwrap(), c);
        }
        for g in Game::ALL {
            assert_eq!(g.id().parse::<Game>().unwrap(), g);
            assert!(!g.vocabulary().contains(&Cell::Offscreen));
        }
    }
}
