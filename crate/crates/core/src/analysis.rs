//! Picks the cheapest sound route to a position's status: a closed form when
//! one applies, the exhaustive solver otherwise.

use alloc::vec;
use alloc::vec::Vec;

use crate::closed_form;
use crate::game::{MoveDelta, MoveKind, Position, Rules};
use crate::solver::{SolveRecord, Solver, Status, StatusGrid, DEFAULT_CELL_BUDGET};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Closed form when available, solver otherwise.
    #[default]
    Auto,
    /// Always run the exhaustive solver.
    Oracle,
}

/// Closed forms cover two heaps for any `m`, and any heap count for odd `m`.
pub fn closed_form_applies(rules: &Rules, heaps: usize) -> bool {
    heaps == 2 || rules.is_odd()
}

/// Status of `p` plus winning moves.
///
/// The solver route lists every winning move, best first. A closed-form
/// route lists only the preferred move.
pub fn analyze(rules: &Rules, p: &Position, method: Method, budget: u64) -> Result<SolveRecord, Error> {
    if method == Method::Oracle || !closed_form_applies(rules, p.len()) {
        return Solver::new(*rules).with_budget(budget).solve(p, true);
    }
    let best = closed_form::best_move(rules, p)?;
    Ok(SolveRecord {
        position: p.clone(),
        status: if best.is_some() { Status::N } else { Status::P },
        winning_moves: best.into_iter().collect(),
    })
}

/// Removes one token from the first non-empty heap: the move that leaves
/// the most tokens, used when every move loses.
pub fn stalling_move(p: &Position) -> Option<MoveDelta> {
    let j = p.heaps().iter().position(|&h| h > 0)?;
    let mut removals = vec![0; p.len()];
    removals[j] = 1;
    Some(MoveDelta::new(removals, MoveKind::TypeI))
}

#[derive(Debug, Clone)]
enum Backend {
    ClosedForm,
    Grid(StatusGrid),
}

/// A playing engine for one game. Positions it is asked about must be
/// dominated by the start position, which holds for any position reached
/// in play.
#[derive(Debug, Clone)]
pub struct Engine {
    rules: Rules,
    backend: Backend,
}

impl Engine {
    pub fn new(rules: Rules, start: &Position, budget: u64) -> Result<Self, Error> {
        let backend = if closed_form_applies(&rules, start.len()) {
            Backend::ClosedForm
        } else {
            Backend::Grid(Solver::new(rules).with_budget(budget).solve_grid(start.heaps())?)
        };
        Ok(Engine { rules, backend })
    }

    pub fn with_default_budget(rules: Rules, start: &Position) -> Result<Self, Error> {
        Engine::new(rules, start, DEFAULT_CELL_BUDGET)
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn best_move(&self, p: &Position) -> Result<Option<MoveDelta>, Error> {
        match &self.backend {
            Backend::ClosedForm => closed_form::best_move(&self.rules, p),
            Backend::Grid(grid) => {
                if grid.status(p).is_none() {
                    return Err(Error::LengthMismatch {
                        left: grid.bounds().len(),
                        right: p.len(),
                    });
                }
                Ok(grid.winning_moves(p).into_iter().next())
            }
        }
    }

    pub fn status(&self, p: &Position) -> Result<Status, Error> {
        Ok(if self.best_move(p)?.is_some() {
            Status::N
        } else {
            Status::P
        })
    }

    /// The engine's move: a winning move if one exists, otherwise the
    /// stalling move. `None` only at the terminal position.
    pub fn reply(&self, p: &Position) -> Result<Option<MoveDelta>, Error> {
        Ok(self.best_move(p)?.or_else(|| stalling_move(p)))
    }

    /// Every winning move the engine knows of, best first.
    pub fn winning_moves(&self, p: &Position) -> Result<Vec<MoveDelta>, Error> {
        match &self.backend {
            Backend::Grid(grid) => Ok(grid.winning_moves(p)),
            Backend::ClosedForm => Ok(self.best_move(p)?.into_iter().collect()),
        }
    }
}
