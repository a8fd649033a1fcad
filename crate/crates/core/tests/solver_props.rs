use modnim_core::game::successors;
use modnim_core::solver::GridMode;
use modnim_core::{Position, Rules, Solver, Status, StatusGrid};
use proptest::prelude::*;

fn pos(h: &[u64]) -> Position {
    Position::new(h.to_vec()).unwrap()
}

fn same_statuses(a: &StatusGrid, b: &StatusGrid) -> Option<Position> {
    a.positions().find(|p| a.status(p) != b.status(p))
}

#[test]
fn residue_shortcut_matches_naive_two_heaps() {
    for m in 1..=8 {
        let s = Solver::new(Rules::new(m).unwrap());
        let fast = s.solve_grid(&[20, 20]).unwrap();
        let slow = s.solve_grid_naive(&[20, 20]).unwrap();
        assert_eq!(same_statuses(&fast, &slow), None, "m={m}");
    }
}

#[test]
fn residue_shortcut_matches_naive_three_heaps() {
    for m in 1..=5 {
        let s = Solver::new(Rules::new(m).unwrap());
        let fast = s.build(&[10, 10, 10], GridMode::ResidueIndex).unwrap();
        let slow = s.build(&[10, 10, 10], GridMode::Naive).unwrap();
        assert_eq!(same_statuses(&fast, &slow), None, "m={m}");
    }
}

#[test]
fn box_size_does_not_change_status() {
    for m in [2, 3, 4, 6] {
        let s = Solver::new(Rules::new(m).unwrap());
        let small = s.solve_grid(&[6, 7, 5]).unwrap();
        let large = s.solve_grid(&[11, 9, 12]).unwrap();
        for p in small.positions() {
            assert_eq!(small.status(&p), large.status(&p), "m={m} {p}");
        }
        let q = pos(&[4, 7, 2]);
        assert_eq!(s.solve(&q, false).unwrap().status, large.status(&q).unwrap());
    }
}

#[test]
fn p_iff_all_successors_n_on_random_cells() {
    // a stride coprime to 15³ = 3375 visits distinct cells
    for m in [3, 4, 6] {
        let s = Solver::new(Rules::new(m).unwrap());
        let grid = s.solve_grid(&[14, 14, 14]).unwrap();
        let cells: Vec<Position> = grid.positions().collect();
        let mut idx = 17usize;
        let mut checked = std::collections::BTreeSet::new();
        while checked.len() < 1000 {
            idx = (idx + 1237) % cells.len();
            let p = &cells[idx];
            if !checked.insert(idx) {
                continue;
            }
            let all_n = successors(s.rules(), p).iter().all(|q| grid.status(q) == Some(Status::N));
            assert_eq!(grid.status(p) == Some(Status::P), all_n, "m={m} {p}");
        }
    }
}

#[test]
fn grid_is_shareable_across_threads() {
    let grid = std::sync::Arc::new(Solver::new(Rules::new(4).unwrap()).solve_grid(&[8, 8, 8]).unwrap());
    let handles: Vec<_> = (0..4)
        .map(|t| {
            let g = grid.clone();
            std::thread::spawn(move || g.positions().filter(|p| p.heaps()[0] == t).filter(|p| g.status(p) == Some(Status::P)).count())
        })
        .collect();
    let total: usize = handles.into_iter().map(|h| h.join().unwrap()).sum();
    let direct = grid.positions().filter(|p| p.heaps()[0] < 4 && grid.status(p) == Some(Status::P)).count();
    assert_eq!(total, direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn status_is_permutation_symmetric(m in 1u64..8, heaps in prop::collection::vec(0u64..8, 3)) {
        let s = Solver::new(Rules::new(m).unwrap());
        let grid = s.solve_grid(&[7, 7, 7]).unwrap();
        let base = grid.status(&pos(&heaps));
        for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let ph: Vec<u64> = perm.iter().map(|&i| heaps[i]).collect();
            prop_assert_eq!(base, grid.status(&pos(&ph)));
        }
    }

    #[test]
    fn optimal_move_lands_on_p(m in 1u64..9, heaps in prop::collection::vec(0u64..9, 2..=3)) {
        let s = Solver::new(Rules::new(m).unwrap());
        let p = pos(&heaps);
        let rec = s.solve(&p, true).unwrap();
        match s.optimal_move(&p).unwrap() {
            None => prop_assert_eq!(rec.status, Status::P),
            Some(mv) => {
                prop_assert_eq!(rec.status, Status::N);
                prop_assert_eq!(Some(&mv), rec.winning_moves.first());
                let next = p.apply(&mv).unwrap();
                prop_assert_eq!(s.solve(&next, false).unwrap().status, Status::P);
                for other in &rec.winning_moves {
                    let t = p.apply(other).unwrap();
                    prop_assert!(t.heap_sum() <= next.heap_sum());
                    prop_assert_eq!(s.solve(&t, false).unwrap().status, Status::P);
                }
            }
        }
    }
}
