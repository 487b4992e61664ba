use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lpp_core::grid::{Action, Cell, Game, GridState, Pos};
use lpp_envs::{black_king_moves, is_checkmate, nim_heights, nim_opponent_moves, step, Outcome};

/// Mover wins iff some move reaches a position the next mover loses; taking
/// the last stick wins, so (0, 0) is lost for whoever faces it.
fn mover_wins(a: usize, b: usize, memo: &mut HashMap<(usize, usize), bool>) -> bool {
    if let Some(&w) = memo.get(&(a, b)) {
        return w;
    }
    let w = (0..a).any(|x| !mover_wins(x, b, memo)) || (0..b).any(|y| !mover_wins(a, y, memo));
    memo.insert((a, b), w);
    w
}

fn piles(h: usize, a: usize, b: usize) -> GridState {
    let mut s = GridState::filled(h, 2, Cell::Empty).unwrap();
    for r in h - a..h {
        s.set(r, 0, Cell::Token);
    }
    for r in h - b..h {
        s.set(r, 1, Cell::Token);
    }
    s
}

#[test]
fn level_piles_lose_for_the_mover() {
    let mut memo = HashMap::new();
    for a in 0..=8 {
        for b in 0..=8 {
            assert_eq!(mover_wins(a, b, &mut memo), a != b, "({a}, {b})");
        }
    }
}

#[test]
fn nim_opponent_matches_minimax() {
    let mut memo = HashMap::new();
    for h in 2..=8 {
        for a in 0..=h {
            for b in 0..=h {
                if a + b == 0 {
                    continue;
                }
                let s = piles(h, a, b);
                let replies = nim_opponent_moves(&s);
                assert!(!replies.is_empty());
                let best_exists = mover_wins(a, b, &mut memo);
                for r in &replies {
                    let mut t = s.clone();
                    for row in 0..=r.row {
                        t.set(row, r.col, Cell::Empty);
                    }
                    let hs = nim_heights(&t);
                    let after_wins = mover_wins(hs[0], hs[1], &mut memo);
                    if best_exists {
                        assert!(!after_wins, "h={h} ({a},{b}) reply {r} is not optimal");
                    }
                }
                if !best_exists {
                    assert_eq!(replies.len(), a + b, "every move is equally losing");
                }
            }
        }
    }
}

#[test]
fn nim_step_applies_an_optimal_reply() {
    let mut memo = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for h in 2..=8 {
        for a in 1..=h {
            for b in 1..=h {
                let s = piles(h, a, b);
                for click in s.find_all(Cell::Token).collect::<Vec<_>>() {
                    let (t, outcome) = step(Game::Nim, &s, click, &mut rng);
                    let hs = nim_heights(&t);
                    match outcome {
                        Outcome::Won => assert_eq!(hs, vec![0, 0]),
                        Outcome::Lost => assert_eq!(hs, vec![0, 0]),
                        Outcome::Ongoing => {
                            let mut mid = s.clone();
                            for row in 0..=click.row {
                                mid.set(row, click.col, Cell::Empty);
                            }
                            let m = nim_heights(&mid);
                            if mover_wins(m[0], m[1], &mut memo) {
                                assert!(!mover_wins(hs[0], hs[1], &mut memo));
                            }
                        }
                    }
                }
            }
        }
    }
}

const DIRS: [(i32, i32); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

fn attack_map(s: &GridState, q: Pos) -> Vec<bool> {
    let mut map = vec![false; s.num_cells()];
    for (dr, dc) in DIRS {
        let mut p = Pos::new(q.row + dr, q.col + dc);
        while s.in_bounds(p) {
            map[(p.row as usize) * s.width() + p.col as usize] = true;
            if s.value_at(p) != Cell::Empty {
                break;
            }
            p = Pos::new(p.row + dr, p.col + dc);
        }
    }
    map
}

fn oracle(s: &GridState, bk: Pos, wk: Pos, q: Pos) -> (bool, Vec<Action>) {
    let idx = |p: Pos| (p.row as usize) * s.width() + p.col as usize;
    let check = attack_map(s, q)[idx(bk)];
    let mut without = s.clone();
    without.set(bk.row as usize, bk.col as usize, Cell::Empty);
    let attacked = attack_map(&without, q);
    let mut moves = Vec::new();
    for (dr, dc) in DIRS {
        let p = Pos::new(bk.row + dr, bk.col + dc);
        let open = s.in_bounds(p) && (s.value_at(p) == Cell::Empty || p == q);
        if !open || attacked[idx(p)] {
            continue;
        }
        if (p.row - wk.row).abs() <= 1 && (p.col - wk.col).abs() <= 1 {
            continue;
        }
        moves.push(Action::new(p.row as usize, p.col as usize));
    }
    moves.sort();
    (check && moves.is_empty(), moves)
}

#[test]
fn checkmate_detection_matches_attack_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mates = 0;
    let mut captures = 0;
    let mut positions = 0;
    while positions < 1000 {
        let h = rng.gen_range(3..=8);
        let w = rng.gen_range(3..=8);
        let mut s = GridState::filled(h, w, Cell::Empty).unwrap();
        let cells: Vec<Pos> = (0..h as i32).flat_map(|r| (0..w as i32).map(move |c| Pos::new(r, c))).collect();
        let bk = *cells.choose(&mut rng).unwrap();
        let far: Vec<Pos> = cells
            .iter()
            .copied()
            .filter(|p| (p.row - bk.row).abs() > 1 || (p.col - bk.col).abs() > 1)
            .collect();
        // the centre of a 3x3 board leaves no square for the white king
        let Some(&wk) = far.choose(&mut rng) else { continue };
        let rest: Vec<Pos> = cells.iter().copied().filter(|&p| p != bk && p != wk).collect();
        let q = *rest.choose(&mut rng).unwrap();
        positions += 1;
        let queen = if rng.gen_bool(0.5) { Cell::WhiteQueen } else { Cell::SelectedWhiteQueen };
        s.set(bk.row as usize, bk.col as usize, Cell::BlackKing);
        s.set(wk.row as usize, wk.col as usize, Cell::WhiteKing);
        s.set(q.row as usize, q.col as usize, queen);
        let (mate, moves) = oracle(&s, bk, wk, q);
        let mut got = black_king_moves(&s);
        got.sort();
        assert_eq!(got, moves, "\n{}", s.render());
        assert_eq!(is_checkmate(&s), mate, "\n{}", s.render());
        mates += mate as usize;
        captures += moves.contains(&Action::new(q.row as usize, q.col as usize)) as usize;
    }
    assert!(mates > 0, "sample contained no mates");
    assert!(captures > 0, "sample contained no queen captures");
}
