//! Exhaustive P/N oracle by backward induction over a dense grid.
//!
//! A position's status depends only on the positions it strictly dominates,
//! since every move removes tokens. Any box containing a position therefore
//! yields its true status, with no edge effects from the box boundary.
//!
//! Cells are filled in row-major order (last heap fastest). Every position a
//! cell dominates has a smaller row-major index, so all dependencies are
//! settled before the cell is visited.

use alloc::vec;
use alloc::vec::Vec;

use crate::game::{self, MoveDelta, Position, Rules};
use crate::Error;

pub const DEFAULT_CELL_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// The previous player wins.
    P,
    /// The next player wins.
    N,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::P => "P",
            Status::N => "N",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveRecord {
    pub position: Position,
    pub status: Status,
    /// Winning moves, most preferred first. Empty for P-positions.
    pub winning_moves: Vec<MoveDelta>,
}

/// How the Type II half of each cell is decided while filling a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// A cell is N by Type II iff a known P-position with a congruent heap
    /// sum is strictly dominated by it.
    ResidueIndex,
    /// Enumerate every successor of every cell.
    Naive,
}

/// Statuses of every position inside `[0, bounds[0]] × … × [0, bounds[h-1]]`.
#[derive(Debug, Clone)]
pub struct StatusGrid {
    rules: Rules,
    bounds: Vec<u64>,
    strides: Vec<usize>,
    cells: usize,
    p_bits: Vec<u64>,
    /// Coordinates of P-cells, flattened, in row-major order.
    p_coords: Vec<u64>,
    /// P-cell ordinals grouped by heap sum mod m.
    p_by_residue: Vec<Vec<u32>>,
}

impl StatusGrid {
    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    fn heaps(&self) -> usize {
        self.bounds.len()
    }

    fn index_of(&self, heaps: &[u64]) -> Option<usize> {
        if heaps.len() != self.heaps() {
            return None;
        }
        let mut idx = 0;
        for ((&h, &b), &s) in heaps.iter().zip(&self.bounds).zip(&self.strides) {
            if h > b {
                return None;
            }
            idx += h as usize * s;
        }
        Some(idx)
    }

    fn bit(&self, idx: usize) -> bool {
        self.p_bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// `None` when `p` lies outside the box or has the wrong heap count.
    pub fn status(&self, p: &Position) -> Option<Status> {
        let idx = self.index_of(p.heaps())?;
        Some(if self.bit(idx) { Status::P } else { Status::N })
    }

    pub fn p_count(&self) -> usize {
        self.p_coords.len() / self.heaps()
    }

    /// P-cells in row-major order.
    pub fn p_positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.p_coords
            .chunks(self.heaps())
            .map(|c| Position::new(c.to_vec()).expect("grid cells are valid positions"))
    }

    /// Every position in the box, in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        let top = Position::new(self.bounds.clone()).expect("bounds fit in u64");
        let mut all = Vec::with_capacity(self.cells);
        game::for_each_dominated(&top, |p| all.push(p.clone()));
        all.into_iter()
    }

    /// P-positions reachable from `p` in one move, most preferred first:
    /// larger heap sum, then lexicographically smaller.
    pub fn winning_targets(&self, p: &Position) -> Vec<Position> {
        if self.index_of(p.heaps()).is_none() {
            return Vec::new();
        }
        let mut out: Vec<Position> = Vec::new();
        // Type I, along each line through p
        let mut probe = p.heaps().to_vec();
        for j in 0..probe.len() {
            let orig = probe[j];
            for v in 0..orig {
                probe[j] = v;
                if self.bit(self.index_of(&probe).expect("inside box")) {
                    out.push(Position::new(probe.clone()).expect("valid"));
                }
            }
            probe[j] = orig;
        }
        // Type II, through the residue index
        let h = self.heaps();
        if let Some(bucket) = self.p_by_residue.get(self.residue_slot(p.heap_sum())) {
            for &ord in bucket {
                let c = &self.p_coords[ord as usize * h..(ord as usize + 1) * h];
                let sum: u64 = c.iter().sum();
                if sum < p.heap_sum() && c.iter().zip(p.heaps()).all(|(a, b)| a <= b) {
                    out.push(Position::new(c.to_vec()).expect("valid"));
                }
            }
        }
        out.sort_by(|a, b| b.heap_sum().cmp(&a.heap_sum()).then_with(|| a.cmp(b)));
        out.dedup();
        out
    }

    /// Winning moves from `p`, most preferred first.
    pub fn winning_moves(&self, p: &Position) -> Vec<MoveDelta> {
        self.winning_targets(p)
            .iter()
            .map(|t| MoveDelta::between(&self.rules, p, t).expect("targets are reachable"))
            .collect()
    }

    fn residue_slot(&self, sum: u64) -> usize {
        (sum % self.rules.m()) as usize
    }
}

/// Builds grids and answers single-position queries under a cell budget.
#[derive(Debug, Clone, Copy)]
pub struct Solver {
    rules: Rules,
    budget: u64,
}

impl Solver {
    pub fn new(rules: Rules) -> Self {
        Solver {
            rules,
            budget: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn with_budget(mut self, cells: u64) -> Self {
        self.budget = cells;
        self
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// P/N status of `p`, solved on the smallest box containing it.
    pub fn solve(&self, p: &Position, with_moves: bool) -> Result<SolveRecord, Error> {
        let grid = self.solve_grid(p.heaps())?;
        let status = grid.status(p).expect("p spans the grid");
        let winning_moves = if with_moves && status == Status::N {
            grid.winning_moves(p)
        } else {
            Vec::new()
        };
        Ok(SolveRecord {
            position: p.clone(),
            status,
            winning_moves,
        })
    }

    /// The preferred winning move, or `None` when `p` is a P-position.
    ///
    /// Preference: the reachable P-position with the greatest heap sum, then
    /// the lexicographically smallest one; the move is labelled Type I when
    /// only one heap changes.
    pub fn optimal_move(&self, p: &Position) -> Result<Option<MoveDelta>, Error> {
        let grid = self.solve_grid(p.heaps())?;
        Ok(grid.winning_moves(p).into_iter().next())
    }

    pub fn solve_grid(&self, bounds: &[u64]) -> Result<StatusGrid, Error> {
        self.build(bounds, GridMode::ResidueIndex)
    }

    pub fn solve_grid_naive(&self, bounds: &[u64]) -> Result<StatusGrid, Error> {
        self.build(bounds, GridMode::Naive)
    }

    pub fn build(&self, bounds: &[u64], mode: GridMode) -> Result<StatusGrid, Error> {
        if bounds.is_empty() {
            return Err(Error::EmptyPosition);
        }
        let cells = bounds
            .iter()
            .try_fold(1u128, |acc, &b| acc.checked_mul(b as u128 + 1))
            .unwrap_or(u128::MAX);
        if cells > self.budget as u128 || cells > u32::MAX as u128 {
            return Err(Error::BudgetExceeded {
                cells,
                budget: self.budget,
            });
        }
        let cells = cells as usize;
        let heaps = bounds.len();
        let mut strides = vec![1usize; heaps];
        for j in (0..heaps - 1).rev() {
            strides[j] = strides[j + 1] * (bounds[j + 1] as usize + 1);
        }
        let max_sum: u64 = bounds.iter().sum();
        let slots = (self.rules.m().min(max_sum + 1)) as usize;
        let mut grid = StatusGrid {
            rules: self.rules,
            bounds: bounds.to_vec(),
            strides,
            cells,
            p_bits: vec![0; cells.div_ceil(64)],
            p_coords: Vec::new(),
            p_by_residue: vec![Vec::new(); slots],
        };
        match mode {
            GridMode::ResidueIndex => fill_by_residue(&mut grid),
            GridMode::Naive => fill_naive(&mut grid),
        }
        Ok(grid)
    }
}

fn mark_p(grid: &mut StatusGrid, idx: usize, coords: &[u64], sum: u64) {
    grid.p_bits[idx / 64] |= 1 << (idx % 64);
    let ord = (grid.p_coords.len() / coords.len()) as u32;
    grid.p_coords.extend_from_slice(coords);
    let slot = grid.residue_slot(sum);
    grid.p_by_residue[slot].push(ord);
}

fn fill_by_residue(grid: &mut StatusGrid) {
    let heaps = grid.heaps();
    // line_p[j] bit at (idx with coordinate j zeroed): the line through the
    // cell along heap j already holds a P-cell below it
    let mut line_p = vec![vec![0u64; grid.cells.div_ceil(64)]; heaps];
    let mut coords = vec![0u64; heaps];
    let mut sum = 0u64;
    for idx in 0..grid.cells {
        let type1 = (0..heaps).any(|j| {
            let proj = idx - coords[j] as usize * grid.strides[j];
            line_p[j][proj / 64] >> (proj % 64) & 1 == 1
        });
        let type2 = !type1 && {
            let slot = grid.residue_slot(sum);
            grid.p_by_residue[slot].iter().any(|&ord| {
                let c = &grid.p_coords[ord as usize * heaps..(ord as usize + 1) * heaps];
                c.iter().zip(&coords).all(|(a, b)| a <= b)
            })
        };
        if !type1 && !type2 {
            for j in 0..heaps {
                let proj = idx - coords[j] as usize * grid.strides[j];
                line_p[j][proj / 64] |= 1 << (proj % 64);
            }
            mark_p(grid, idx, &coords, sum);
        }
        // advance the odometer
        for j in (0..heaps).rev() {
            if coords[j] < grid.bounds[j] {
                coords[j] += 1;
                sum += 1;
                break;
            }
            sum -= coords[j];
            coords[j] = 0;
        }
    }
}

fn fill_naive(grid: &mut StatusGrid) {
    let top = Position::new(grid.bounds.clone()).expect("bounds fit in u64");
    let mut cells = Vec::with_capacity(grid.cells);
    game::for_each_dominated(&top, |p| cells.push(p.clone()));
    for (idx, p) in cells.iter().enumerate() {
        let losing = game::successors(&grid.rules, p)
            .iter()
            .all(|q| !grid.bit(grid.index_of(q.heaps()).expect("successors stay in the box")));
        if losing {
            mark_p(grid, idx, p.heaps(), p.heap_sum());
        }
    }
}
