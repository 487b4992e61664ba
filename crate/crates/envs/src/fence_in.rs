use std::collections::VecDeque;

use lpp_core::grid::{Action, Cell, Game, GridState, Pos};

use crate::{playbook, EnvError, Outcome};

pub(crate) fn step(s: &GridState, a: Action) -> (GridState, Outcome) {
    let mut next = s.clone();
    if s.at(a) == Cell::Empty {
        next.set(a.row, a.col, Cell::Fence);
    }
    let outcome = if is_goal(&next) { Outcome::Won } else { Outcome::Ongoing };
    (next, outcome)
}

/// True if the sheep's open region (4-connected, fences block) avoids the border.
pub(crate) fn is_goal(s: &GridState) -> bool {
    let Some(start) = s.find(Cell::Sheep) else {
        return false;
    };
    let (h, w) = (s.height() as i32, s.width() as i32);
    let mut seen = vec![false; s.num_cells()];
    let mut queue = VecDeque::from([start.pos()]);
    seen[s.index_of(start)] = true;
    while let Some(p) = queue.pop_front() {
        if p.row == 0 || p.col == 0 || p.row == h - 1 || p.col == w - 1 {
            return false;
        }
        for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let q = Pos::new(p.row + dr, p.col + dc);
            let i = (q.row * w + q.col) as usize;
            if s.value_at(q) != Cell::Fence && !seen[i] {
                seen[i] = true;
                queue.push_back(q);
            }
        }
    }
    true
}

pub(crate) fn expert(s: &GridState) -> Result<Action, EnvError> {
    let err = |m: &str| playbook(Game::FenceIn, m);
    let sheep = s.find(Cell::Sheep).ok_or_else(|| err("no sheep"))?;
    let r = sheep.row + 1;
    if r >= s.height() {
        return Err(err("no row below the sheep"));
    }
    let left = (0..sheep.col)
        .rev()
        .find(|&c| s.get(r, c) == Cell::Fence)
        .ok_or_else(|| err("no fence to the left"))?;
    let c = (left + 1..s.width())
        .find(|&c| s.get(r, c) == Cell::Empty)
        .ok_or_else(|| err("row below the sheep is already closed"))?;
    if !(c + 1..s.width()).any(|x| s.get(r, x) == Cell::Fence) {
        return Err(err("no fence to the right"));
    }
    Ok(Action::new(r, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ringed_sheep_is_goal() {
        let s = GridState::from_glyphs(&[".....", ".+++.", ".+S+.", ".+++.", "....."]).unwrap();
        assert!(is_goal(&s));
        let s = GridState::from_glyphs(&[".....", ".+++.", ".+S+.", ".+.+.", "....."]).unwrap();
        assert!(!is_goal(&s));
    }

    #[test]
    fn fence_click_is_noop() {
        let s = GridState::from_glyphs(&[".....", ".+++.", ".+S+.", ".+.+.", "....."]).unwrap();
        let (n, o) = step(&s, Action::new(1, 1));
        assert_eq!(n, s);
        assert_eq!(o, Outcome::Ongoing);
    }

    #[test]
    fn expert_closes_gap_left_to_right() {
        let mut s =
            GridState::from_glyphs(&["+......", ".+++++.", ".+.S..+", ".+...+.", "......."]).unwrap();
        let mut clicks = Vec::new();
        while !is_goal(&s) {
            let a = expert(&s).unwrap();
            clicks.push(a);
            s = step(&s, a).0;
        }
        assert_eq!(clicks, vec![Action::new(3, 2), Action::new(3, 3), Action::new(3, 4)]);
    }
}
