use lpp_core::grid::{Action, Cell, Game, GridState, Pos};

use crate::{playbook, EnvError, Outcome};

fn dynamic(c: Cell) -> bool {
    matches!(c, Cell::Parachuter | Cell::Block)
}

/// Per-cell support flags for dynamic objects; static and empty cells are `true`.
fn supported(s: &GridState) -> Vec<bool> {
    let (h, w) = (s.height(), s.width());
    let mut sup = vec![true; h * w];
    for r in (0..h.saturating_sub(1)).rev() {
        for c in 0..w {
            if dynamic(s.get(r, c)) {
                let below = s.get(r + 1, c);
                sup[r * w + c] = below != Cell::Empty && sup[(r + 1) * w + c];
            }
        }
    }
    sup
}

/// One simultaneous tick; returns whether anything moved.
fn tick(s: &mut GridState) -> bool {
    let w = s.width();
    let sup = supported(s);
    let mut moved = false;
    for r in (0..s.height()).rev() {
        for c in 0..w {
            if dynamic(s.get(r, c)) && !sup[r * w + c] {
                let v = s.get(r, c);
                s.set(r, c, Cell::Empty);
                s.set(r + 1, c, v);
                moved = true;
            }
        }
    }
    moved
}

/// Runs gravity until nothing moves; returns the number of ticks that moved.
pub(crate) fn settle(s: &mut GridState) -> usize {
    let mut ticks = 0;
    while tick(s) {
        ticks += 1;
    }
    ticks
}

pub(crate) fn near_fire(s: &GridState, p: Pos) -> bool {
    [(-1, 0), (1, 0), (0, -1), (0, 1)]
        .iter()
        .any(|&(dr, dc)| s.value_at(Pos::new(p.row + dr, p.col + dc)) == Cell::Fire)
}

pub(crate) fn step(s: &GridState, a: Action) -> (GridState, Outcome) {
    let mut next = s.clone();
    match s.at(a) {
        Cell::Empty => {
            next.set(a.row, a.col, Cell::Drawn);
            (next, Outcome::Ongoing)
        }
        Cell::GreenButton => {
            settle(&mut next);
            let safe = next
                .find(Cell::Parachuter)
                .is_some_and(|p| !near_fire(&next, p.pos()));
            (next, if safe { Outcome::Won } else { Outcome::Lost })
        }
        _ => (next, Outcome::Ongoing),
    }
}

pub(crate) fn is_goal(s: &GridState) -> bool {
    let Some(p) = s.find(Cell::Parachuter) else {
        return false;
    };
    supported(s)[s.index_of(p)] && !near_fire(s, p.pos())
}

pub(crate) fn expert(s: &GridState) -> Result<Action, EnvError> {
    let p = s
        .find(Cell::Parachuter)
        .ok_or_else(|| playbook(Game::StopTheFall, "no parachuter"))?;
    let mut r = p.row;
    while r + 1 < s.height() && s.get(r + 1, p.col) == Cell::Empty {
        r += 1;
    }
    let land = Action::new(r, p.col);
    if near_fire(s, land.pos()) {
        if land == p {
            return Err(playbook(Game::StopTheFall, "parachuter already rests next to fire"));
        }
        return Ok(land);
    }
    s.find(Cell::GreenButton)
        .ok_or_else(|| playbook(Game::StopTheFall, "no green button"))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    /// Sequential bottom-up drop: each dynamic object falls onto whatever is
    /// already settled below it.
    fn drop_sequentially(s: &GridState) -> GridState {
        let mut out = s.clone();
        for c in 0..s.width() {
            for r in (0..s.height()).rev() {
                let v = out.get(r, c);
                if !dynamic(v) {
                    continue;
                }
                let mut to = r;
                while to + 1 < s.height() && out.get(to + 1, c) == Cell::Empty {
                    to += 1;
                }
                out.set(r, c, Cell::Empty);
                out.set(to, c, v);
            }
        }
        out
    }

    fn cell() -> impl Strategy<Value = Cell> {
        prop_oneof![
            6 => Just(Cell::Empty),
            2 => Just(Cell::Block),
            1 => Just(Cell::Drawn),
            1 => Just(Cell::Fire),
            1 => Just(Cell::Parachuter),
        ]
    }

    proptest! {
        #[test]
        fn gravity_settles_like_sequential_drop(
            h in 2usize..10, w in 2usize..8, cells in prop::collection::vec(cell(), 80)
        ) {
            let s = GridState::new(h, w, cells[..h * w].to_vec()).unwrap();
            let mut sim = s.clone();
            let ticks = settle(&mut sim);
            prop_assert!(ticks < h);
            prop_assert_eq!(&sim, &drop_sequentially(&s));
            let mut again = sim.clone();
            prop_assert!(!tick(&mut again));
        }
    }
}
