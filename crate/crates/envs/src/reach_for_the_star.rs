use rand::Rng;

use lpp_core::grid::{Action, Cell, Game, GridState, Pos};

use crate::{playbook, EnvError, Outcome};

pub(crate) const MAX_STAR_HEIGHT: usize = 8;

fn put(s: &mut GridState, p: Pos, v: Cell) {
    s.set(p.row as usize, p.col as usize, v);
}

/// Lets brown blocks and the robot fall until everything rests. Returns true
/// if the robot fell into the star.
fn settle(s: &mut GridState) -> bool {
    loop {
        let mut moved = false;
        for r in (0..s.height() - 1).rev() {
            for c in 0..s.width() {
                let v = s.get(r, c);
                if !matches!(v, Cell::Drawn | Cell::Agent) {
                    continue;
                }
                match s.get(r + 1, c) {
                    Cell::Empty => {}
                    Cell::Star if v == Cell::Agent => {
                        s.set(r, c, Cell::Empty);
                        s.set(r + 1, c, Cell::Agent);
                        return true;
                    }
                    _ => continue,
                }
                s.set(r, c, Cell::Empty);
                s.set(r + 1, c, v);
                moved = true;
            }
        }
        if !moved {
            return false;
        }
    }
}

pub(crate) fn step(s: &GridState, a: Action) -> (GridState, Outcome) {
    let mut next = s.clone();
    let dir = match s.at(a) {
        Cell::Empty => {
            next.set(a.row, a.col, Cell::Drawn);
            let won = settle(&mut next);
            return (next, if won { Outcome::Won } else { Outcome::Ongoing });
        }
        Cell::LeftArrow => -1,
        Cell::RightArrow => 1,
        _ => return (next, Outcome::Ongoing),
    };
    let Some(g) = s.find(Cell::Agent) else {
        return (next, Outcome::Ongoing);
    };
    let g = g.pos();
    let side = Pos::new(g.row, g.col + dir);
    let top = Pos::new(g.row - 1, g.col + dir);
    let dest = match s.value_at(side) {
        Cell::Offscreen => None,
        Cell::Empty | Cell::Star => Some(side),
        _ if matches!(s.value_at(top), Cell::Empty | Cell::Star) => Some(top),
        _ => None,
    };
    let Some(dest) = dest else {
        return (next, Outcome::Ongoing);
    };
    let won = s.value_at(dest) == Cell::Star;
    put(&mut next, g, Cell::Empty);
    put(&mut next, dest, Cell::Agent);
    if won || settle(&mut next) {
        return (next, Outcome::Won);
    }
    (next, Outcome::Ongoing)
}

pub(crate) fn is_goal(s: &GridState) -> bool {
    s.find(Cell::Star).is_none() && s.find(Cell::Agent).is_some()
}

pub(crate) fn expert(s: &GridState) -> Result<Action, EnvError> {
    let err = |m: &str| playbook(Game::ReachForTheStar, m);
    let t = s.find(Cell::Star).ok_or_else(|| err("no star"))?.pos();
    let g = s.find(Cell::Agent).ok_or_else(|| err("no robot"))?.pos();
    let dir = (t.col - g.col).signum();
    if dir == 0 {
        return Err(err("robot is in the star's column"));
    }
    let floor = s.height() as i32 - 1;
    let mut j = 1;
    while t.row + j < floor {
        let p = Pos::new(t.row + j, t.col - dir * j);
        match s.value_at(p) {
            Cell::Empty => return Ok(Action::new(p.row as usize, p.col as usize)),
            Cell::Offscreen => return Err(err("stairs run off the grid")),
            _ => {}
        }
        j += 1;
    }
    s.find(if dir < 0 { Cell::LeftArrow } else { Cell::RightArrow })
        .ok_or_else(|| err("missing arrow key"))
}

pub(crate) fn generate<R: Rng + ?Sized>(rng: &mut R) -> GridState {
    let h = rng.gen_range(2..=MAX_STAR_HEIGHT);
    let right_pad = rng.gen_range(0..=5);
    let gap = rng.gen_range(0..=5);
    let left_pad = rng.gen_range(0..=5);
    let top_pad = rng.gen_range(0..=5);
    let height = top_pad + h + 2;
    let star_col = left_pad + gap + h + 1;
    let width = star_col + 1 + right_pad;
    let mut s = GridState::filled(height, width, Cell::Empty).expect("valid dims");
    for c in 0..width {
        s.set(height - 1, c, Cell::Drawn);
    }
    s.set(height - 1, 0, Cell::LeftArrow);
    s.set(height - 1, 1, Cell::RightArrow);
    s.set(height - 2, left_pad, Cell::Agent);
    s.set(top_pad, star_col, Cell::Star);
    if rng.gen_bool(0.5) {
        let mut m = s.clone();
        for r in 0..height {
            for c in 0..width {
                m.set(r, width - 1 - c, s.get(r, c));
            }
        }
        s = m;
    }
    s
}
