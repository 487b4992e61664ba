use rand::seq::SliceRandom;
use rand::Rng;

use lpp_core::grid::{Action, Cell, Game, GridState, Pos};

use crate::{playbook, EnvError, Outcome};

const LINES: [(i32, i32); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

fn find_any(s: &GridState, values: &[Cell]) -> Option<Pos> {
    values.iter().find_map(|&v| s.find(v)).map(Action::pos)
}

fn queen(s: &GridState) -> Option<Pos> {
    find_any(s, &[Cell::WhiteQueen, Cell::SelectedWhiteQueen])
}

fn white_king(s: &GridState) -> Option<Pos> {
    find_any(s, &[Cell::WhiteKing, Cell::SelectedWhiteKing])
}

fn black_king(s: &GridState) -> Option<Pos> {
    find_any(s, &[Cell::BlackKing])
}

fn at(p: Pos) -> Action {
    Action::new(p.row as usize, p.col as usize)
}

fn chebyshev(a: Pos, b: Pos) -> i32 {
    (a.row - b.row).abs().max((a.col - b.col).abs())
}

/// True if `from` sees `to` along a rank, file or diagonal with every cell
/// strictly between them empty.
fn clear_line(s: &GridState, from: Pos, to: Pos) -> bool {
    let (dr, dc) = (to.row - from.row, to.col - from.col);
    if (dr == 0 && dc == 0) || !(dr == 0 || dc == 0 || dr.abs() == dc.abs()) {
        return false;
    }
    let (sr, sc) = (dr.signum(), dc.signum());
    let mut p = Pos::new(from.row + sr, from.col + sc);
    while p != to {
        if s.value_at(p) != Cell::Empty {
            return false;
        }
        p = Pos::new(p.row + sr, p.col + sc);
    }
    true
}

/// Whether the white queen attacks `target` on this board.
pub fn is_attacked_by_queen(s: &GridState, target: Pos) -> bool {
    queen(s).is_some_and(|q| clear_line(s, q, target))
}

/// Legal black king destinations: adjacent cells that are empty or hold the
/// queen, that the queen would not attack once the king has left its square,
/// and that are not next to the white king. Taking the queen is therefore
/// legal exactly when the white king does not guard it.
pub fn black_king_moves(s: &GridState) -> Vec<Action> {
    let Some(bk) = black_king(s) else {
        return Vec::new();
    };
    let wk = white_king(s);
    let mut without = s.clone();
    without.set(bk.row as usize, bk.col as usize, Cell::Empty);
    LINES
        .iter()
        .map(|&(dr, dc)| Pos::new(bk.row + dr, bk.col + dc))
        .filter(|&p| s.in_bounds(p) && matches!(s.value_at(p), Cell::Empty | Cell::WhiteQueen | Cell::SelectedWhiteQueen))
        .filter(|&p| !is_attacked_by_queen(&without, p))
        .filter(|&p| wk.is_none_or(|k| chebyshev(k, p) > 1))
        .map(at)
        .collect()
}

pub fn is_checkmate(s: &GridState) -> bool {
    match black_king(s) {
        Some(bk) => is_attacked_by_queen(s, bk) && black_king_moves(s).is_empty(),
        None => false,
    }
}

fn legal_white_move(s: &GridState, from: Pos, piece: Cell, to: Pos) -> bool {
    if s.value_at(to) != Cell::Empty {
        return false;
    }
    match piece {
        Cell::SelectedWhiteQueen => clear_line(s, from, to),
        Cell::SelectedWhiteKing => {
            chebyshev(from, to) == 1 && black_king(s).is_none_or(|bk| chebyshev(bk, to) > 1)
        }
        _ => false,
    }
}

fn deselect(s: &mut GridState) {
    for (sel, plain) in [
        (Cell::SelectedWhiteQueen, Cell::WhiteQueen),
        (Cell::SelectedWhiteKing, Cell::WhiteKing),
    ] {
        if let Some(a) = s.find(sel) {
            s.set(a.row, a.col, plain);
        }
    }
}

pub(crate) fn step<R: Rng + ?Sized>(s: &GridState, a: Action, rng: &mut R) -> (GridState, Outcome) {
    let mut next = s.clone();
    match s.at(a) {
        Cell::WhiteQueen | Cell::WhiteKing => {
            let sel = if s.at(a) == Cell::WhiteQueen {
                Cell::SelectedWhiteQueen
            } else {
                Cell::SelectedWhiteKing
            };
            deselect(&mut next);
            next.set(a.row, a.col, sel);
            (next, Outcome::Ongoing)
        }
        Cell::Empty => {
            let Some((from, piece)) = [Cell::SelectedWhiteQueen, Cell::SelectedWhiteKing]
                .into_iter()
                .find_map(|v| s.find(v).map(|p| (p, v)))
            else {
                return (next, Outcome::Ongoing);
            };
            if !legal_white_move(s, from.pos(), piece, a.pos()) {
                return (next, Outcome::Ongoing);
            }
            let plain = if piece == Cell::SelectedWhiteQueen {
                Cell::WhiteQueen
            } else {
                Cell::WhiteKing
            };
            next.set(from.row, from.col, Cell::Empty);
            next.set(a.row, a.col, plain);
            if is_checkmate(&next) {
                return (next, Outcome::Won);
            }
            let mut outcome = Outcome::Ongoing;
            if let (Some(bk), Some(&to)) = (black_king(&next), black_king_moves(&next).choose(rng)) {
                if next.at(to) != Cell::Empty {
                    // the queen is gone and mate is no longer possible
                    outcome = Outcome::Lost;
                }
                next.set(bk.row as usize, bk.col as usize, Cell::Empty);
                next.set(to.row, to.col, Cell::BlackKing);
            }
            (next, outcome)
        }
        _ => (next, Outcome::Ongoing),
    }
}

fn gap(s: &GridState) -> Option<Pos> {
    let (bk, wk) = (black_king(s)?, white_king(s)?);
    let (dr, dc) = (wk.row - bk.row, wk.col - bk.col);
    let aligned = dr == 0 || dc == 0 || dr.abs() == dc.abs();
    if !aligned || chebyshev(bk, wk) != 2 {
        return None;
    }
    Some(Pos::new(bk.row + dr / 2, bk.col + dc / 2))
}

pub(crate) fn expert(s: &GridState) -> Result<Action, EnvError> {
    let Some(q) = queen(s) else {
        return Err(playbook(Game::CheckmateTactic, "no queen on the board"));
    };
    if s.value_at(q) == Cell::WhiteQueen {
        return Ok(at(q));
    }
    let g = gap(s).ok_or_else(|| playbook(Game::CheckmateTactic, "kings are not two apart in a line"))?;
    if !legal_white_move(s, q, Cell::SelectedWhiteQueen, g) {
        return Err(playbook(Game::CheckmateTactic, "queen cannot reach the gap"));
    }
    Ok(at(g))
}

fn rotate(s: &GridState) -> GridState {
    let (h, w) = (s.height(), s.width());
    let mut out = GridState::filled(w, h, Cell::Empty).expect("valid dims");
    for r in 0..h {
        for c in 0..w {
            out.set(c, h - 1 - r, s.get(r, c));
        }
    }
    out
}

pub(crate) fn generate<R: Rng + ?Sized>(rng: &mut R) -> GridState {
    let h = rng.gen_range(5..=20);
    let w = rng.gen_range(5..=20);
    let c = rng.gen_range(1..=w as i32 - 2);
    let mut s = GridState::filled(h, w, Cell::Empty).expect("valid dims");
    let bk = Pos::new(0, c);
    let g = Pos::new(1, c);
    s.set(0, c as usize, Cell::BlackKing);
    s.set(2, c as usize, Cell::WhiteKing);
    let spots: Vec<Pos> = s
        .find_all(Cell::Empty)
        .map(Action::pos)
        .filter(|&p| p != g && chebyshev(p, bk) > 1)
        .filter(|&p| clear_line(&s, p, g) && !clear_line(&s, p, bk))
        .collect();
    let q = *spots.choose(rng).expect("queen placement exists for dims >= 5");
    s.set(q.row as usize, q.col as usize, Cell::WhiteQueen);
    for _ in 0..rng.gen_range(0..4) {
        s = rotate(&s);
    }
    s
}
