use rand::Rng;

use lpp_core::grid::{Action, Cell, Game, GridState};

use crate::{playbook, EnvError, Outcome};

/// Stick count per column, counted from the bottom row up.
pub fn nim_heights(s: &GridState) -> Vec<usize> {
    (0..s.width())
        .map(|c| {
            (0..s.height())
                .rev()
                .take_while(|&r| s.get(r, c) == Cell::Token)
                .count()
        })
        .collect()
}

fn take(s: &mut GridState, a: Action) {
    for r in 0..=a.row {
        s.set(r, a.col, Cell::Empty);
    }
}

/// The opponent's optimal replies: level unequal piles, otherwise every move
/// loses and all of them are returned.
pub fn nim_opponent_moves(s: &GridState) -> Vec<Action> {
    let h = nim_heights(s);
    if h.len() == 2 && h[0] != h[1] {
        let (tall, short) = if h[0] > h[1] { (0, h[1]) } else { (1, h[0]) };
        return vec![Action::new(s.height() - 1 - short, tall)];
    }
    s.find_all(Cell::Token).collect()
}

pub(crate) fn step<R: Rng + ?Sized>(s: &GridState, a: Action, rng: &mut R) -> (GridState, Outcome) {
    let mut next = s.clone();
    if s.at(a) != Cell::Token {
        return (next, Outcome::Ongoing);
    }
    take(&mut next, a);
    if next.count(Cell::Token) == 0 {
        return (next, Outcome::Won);
    }
    let moves = nim_opponent_moves(&next);
    let reply = moves[rng.gen_range(0..moves.len())];
    take(&mut next, reply);
    if next.count(Cell::Token) == 0 {
        return (next, Outcome::Lost);
    }
    (next, Outcome::Ongoing)
}

pub(crate) fn is_goal(s: &GridState) -> bool {
    s.count(Cell::Token) == 0
}

pub(crate) fn expert(s: &GridState) -> Result<Action, EnvError> {
    let h = nim_heights(s);
    if h.len() != 2 || h[0] == h[1] {
        return Err(playbook(Game::Nim, format!("piles {h:?} are level")));
    }
    let (tall, short) = if h[0] > h[1] { (0, h[1]) } else { (1, h[0]) };
    Ok(Action::new(s.height() - 1 - short, tall))
}

pub(crate) fn generate<R: Rng + ?Sized>(rng: &mut R) -> GridState {
    let h = rng.gen_range(2..=20);
    let (a, b) = loop {
        let a = rng.gen_range(1..=h);
        let b = rng.gen_range(1..=h);
        if a != b {
            break (a, b);
        }
    };
    piles(h, a, b)
}

pub(crate) fn piles(height: usize, a: usize, b: usize) -> GridState {
    let mut s = GridState::filled(height, 2, Cell::Empty).expect("valid dims");
    for (c, n) in [a, b].into_iter().enumerate() {
        for r in height - n..height {
            s.set(r, c, Cell::Token);
        }
    }
    s
}
