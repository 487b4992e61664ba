use rand::seq::SliceRandom;
use rand::Rng;

use lpp_core::grid::{Action, Cell, Game, GridState, Pos};

use crate::{playbook, EnvError, Outcome};

const MOVES: [(i32, i32); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

fn manhattan(a: Pos, b: Pos) -> i32 {
    (a.row - b.row).abs() + (a.col - b.col).abs()
}

fn arrow_dir(c: Cell) -> Option<(i32, i32)> {
    match c {
        Cell::UpArrow => Some((-1, 0)),
        Cell::DownArrow => Some((1, 0)),
        Cell::LeftArrow => Some((0, -1)),
        Cell::RightArrow => Some((0, 1)),
        _ => None,
    }
}

/// Adversary cells reachable in one move that increase its distance from the agent.
pub(crate) fn fleeing_moves(s: &GridState) -> Vec<Pos> {
    let (Some(t), Some(g)) = (s.find(Cell::Target), s.find(Cell::Agent)) else {
        return Vec::new();
    };
    let (t, g) = (t.pos(), g.pos());
    MOVES
        .iter()
        .map(|&(dr, dc)| Pos::new(t.row + dr, t.col + dc))
        .filter(|&p| s.in_bounds(p) && s.value_at(p) == Cell::Empty)
        .filter(|&p| manhattan(p, g) > manhattan(t, g))
        .collect()
}

pub(crate) fn step<R: Rng + ?Sized>(s: &GridState, a: Action, rng: &mut R) -> (GridState, Outcome) {
    let mut next = s.clone();
    let clicked = s.at(a);
    if let Some((dr, dc)) = arrow_dir(clicked) {
        if let Some(g) = s.find(Cell::Agent) {
            let p = Pos::new(g.row as i32 + dr, g.col as i32 + dc);
            if s.in_bounds(p) && matches!(s.value_at(p), Cell::Empty | Cell::Target) {
                let caught = s.value_at(p) == Cell::Target;
                next.set(g.row, g.col, Cell::Empty);
                next.set(p.row as usize, p.col as usize, Cell::Agent);
                if caught {
                    return (next, Outcome::Won);
                }
            }
        }
    } else if clicked == Cell::Empty {
        next.set(a.row, a.col, Cell::Drawn);
    }
    if let (Some(t), Some(&p)) = (next.find(Cell::Target), fleeing_moves(&next).choose(rng)) {
        next.set(t.row, t.col, Cell::Empty);
        next.set(p.row as usize, p.col as usize, Cell::Target);
    }
    (next, Outcome::Ongoing)
}

pub(crate) fn is_goal(s: &GridState) -> bool {
    s.find(Cell::Target).is_none() && s.find(Cell::Agent).is_some()
}

fn blocked(s: &GridState, p: Pos) -> bool {
    !s.in_bounds(p) || matches!(s.value_at(p), Cell::Wall | Cell::Drawn)
}

pub(crate) fn expert(s: &GridState) -> Result<Action, EnvError> {
    let err = |m: &str| playbook(Game::Chase, m);
    let t = s.find(Cell::Target).ok_or_else(|| err("no target"))?.pos();
    let g = s.find(Cell::Agent).ok_or_else(|| err("no agent"))?.pos();
    let wall = |dr: i32, dc: i32| blocked(s, Pos::new(t.row + dr, t.col + dc));
    let arrow = |c: Cell| s.find(c).ok_or_else(|| err("missing arrow key"));
    if s.find(Cell::Drawn).is_none() {
        let vertical = if wall(-1, 0) {
            Some(1)
        } else if wall(1, 0) {
            Some(-1)
        } else {
            None
        };
        return match vertical {
            Some(dr) if wall(0, -1) || wall(0, 1) => {
                let p = Pos::new(t.row + dr, t.col);
                if s.value_at(p) != Cell::Empty {
                    return Err(err("corner exit is not open"));
                }
                Ok(Action::new(p.row as usize, p.col as usize))
            }
            _ => s.find(Cell::Wall).ok_or_else(|| err("no wall to wait on")),
        };
    }
    if g.row != t.row {
        arrow(if t.row < g.row { Cell::UpArrow } else { Cell::DownArrow })
    } else {
        arrow(if t.col < g.col { Cell::LeftArrow } else { Cell::RightArrow })
    }
}
