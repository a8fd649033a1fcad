//! Exhaustive formula-versus-oracle checks over bounded boxes.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use modnim_core::closed_form::{self, build_qset_explicit, build_qset_recursive, qset_size};
use modnim_core::game::{self, successors};
use modnim_core::{Error as CoreError, PSet, Position, Rules, Solver, Status, StatusGrid};

/// Outcome of one named check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Not run, e.g. because the oracle grid exceeded the cell budget.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub params: String,
    pub outcome: Outcome,
    /// Flattened coordinates of the offending position(s). Always present on
    /// failure.
    pub counterexample: Option<Vec<u64>>,
    pub elapsed_ms: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

// timing is excluded from equality
impl PartialEq for CheckResult {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.outcome == other.outcome
            && self.counterexample == other.counterexample
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub m: u64,
    pub heaps: usize,
    pub bound: u64,
    /// Number of P-cells the oracle found in the box, when it ran.
    pub p_cells: Option<usize>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn empty(m: u64, heaps: usize, bound: u64) -> Self {
        VerificationReport {
            m,
            heaps,
            bound,
            p_cells: None,
            checks: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.outcome == Outcome::Fail)
    }

    pub fn any_skipped(&self) -> bool {
        self.checks.iter().any(|c| c.outcome == Outcome::Skipped)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("bound {bound} does not cover Q_m, which needs {needed}")]
    BoundTooSmall { bound: u64, needed: u128 },
    #[error("the multi-heap formula needs odd m, got {0}")]
    EvenModulus(u64),
    #[error("heap count must be at least 1")]
    NoHeaps,
}

/// Default box for two-heap verification: `3m`, widened when `Q_m` itself
/// reaches further.
pub fn default_2heap_bound(rules: &Rules) -> u64 {
    (3 * rules.m()).max(qset_size(rules) as u64)
}

/// Default box for odd multi-heap verification.
pub fn default_multiheap_bound(rules: &Rules, heaps: usize) -> u64 {
    if heaps <= 3 {
        2 * rules.m()
    } else {
        rules.m()
    }
}

type Found = Option<Vec<u64>>;

struct Runner {
    checks: Vec<CheckResult>,
}

impl Runner {
    fn run(&mut self, name: &str, params: String, f: impl FnOnce() -> Found) {
        let start = Instant::now();
        let found = f();
        self.checks.push(CheckResult {
            name: name.to_string(),
            params,
            outcome: if found.is_some() { Outcome::Fail } else { Outcome::Pass },
            counterexample: found,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn skip(&mut self, name: &str, params: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            params,
            outcome: Outcome::Skipped,
            counterexample: None,
            elapsed_ms: 0.0,
        });
    }

    fn finish(mut self) -> Vec<CheckResult> {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.checks
    }
}

fn pos(heaps: &[u64]) -> Position {
    Position::new(heaps.to_vec()).expect("bounded coordinates")
}

/// Verifies the closed-form two-heap P-set of `rules` over `[0, bound]²`.
pub fn verify_2heap(rules: &Rules, bound: u64, budget: u64) -> Result<VerificationReport, VerifyError> {
    verify_2heap_with(rules, bound, budget, &build_qset_explicit(rules))
}

/// Like [`verify_2heap`], but checks `candidate` as the claimed P-set.
pub fn verify_2heap_with(
    rules: &Rules,
    bound: u64,
    budget: u64,
    candidate: &PSet,
) -> Result<VerificationReport, VerifyError> {
    let size = qset_size(rules);
    if (bound as u128) < size {
        return Err(VerifyError::BoundTooSmall { bound, needed: size });
    }
    let m = rules.m();
    let members: Vec<(u64, u64)> = candidate.positions().to_vec();
    let member_set: BTreeSet<(u64, u64)> = members.iter().copied().collect();
    let box_params = format!("m={m} box=[0,{bound}]^2");
    let mut run = Runner { checks: Vec::new() };

    run.run("construction-equivalence", format!("m={m}"), || {
        let rec: BTreeSet<_> = build_qset_recursive(rules).positions().iter().copied().collect();
        let exp: BTreeSet<_> = build_qset_explicit(rules).positions().iter().copied().collect();
        rec.symmetric_difference(&exp)
            .chain(rec.symmetric_difference(&member_set))
            .next()
            .map(|&(a, b)| vec![a, b])
    });

    run.run("count", format!("m={m} expected={size}"), || {
        let half_ok = m % 2 == 1 || {
            let half = Rules::new(m / 2).expect("m/2 ≥ 1");
            size == (m / 2) as u128 + 2 * build_qset_recursive(&half).len() as u128
        };
        (members.len() as u128 != size || !half_ok).then(|| vec![members.len() as u64, size as u64])
    });

    run.run("coordinates", format!("m={m} range=[0,{size})"), || {
        let firsts: BTreeSet<u64> = members.iter().map(|p| p.0).collect();
        let seconds: BTreeSet<u64> = members.iter().map(|p| p.1).collect();
        let want: BTreeSet<u64> = (0..size as u64).collect();
        firsts
            .symmetric_difference(&want)
            .chain(seconds.symmetric_difference(&want))
            .next()
            .map(|&x| vec![x])
    });

    run.run("swap-closure", format!("m={m}"), || {
        members
            .iter()
            .find(|(a, b)| !member_set.contains(&(*b, *a)))
            .map(|&(a, b)| vec![a, b])
    });

    run.run("partner", format!("m={m} x<{size}"), || {
        (0..size as u64).find_map(|x| {
            let y = closed_form::partner(rules, x).ok()?;
            let back = closed_form::partner(rules, y).ok();
            (candidate.partner_of(x) != Some(y) || back != Some(x)).then(|| vec![x, y])
        })
    });

    run.run("sum-rigidity", format!("m={m}"), || {
        let mut by_residue: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        members.iter().find_map(|&(a, b)| {
            let first = *by_residue.entry((a + b) % m).or_insert((a, b));
            (first.0 + first.1 != a + b).then(|| vec![first.0, first.1, a, b])
        })
    });

    run.run("sum-domination", format!("m={m}"), || {
        pairs(&members).find_map(|((a, b), (c, d))| {
            (a + b > c + d && !(a >= c && b >= d)).then(|| vec![a, b, c, d])
        })
    });

    run.run("closedness", format!("m={m}"), || {
        pairs(&members).find_map(|((a, b), (c, d))| {
            game::reachable(rules, &pos(&[a, b]), &pos(&[c, d]))
                .unwrap_or(false)
                .then(|| vec![a, b, c, d])
        })
    });

    run.run("reachability", box_params.clone(), || {
        let by_second: BTreeMap<u64, u64> = members.iter().map(|&(a, b)| (b, a)).collect();
        (0..=bound).flat_map(|x| (0..=bound).map(move |y| (x, y))).find_map(|(x, y)| {
            if member_set.contains(&(x, y)) {
                return None;
            }
            let type1 = candidate.partner_of(x).is_some_and(|py| py < y)
                || by_second.get(&y).is_some_and(|&px| px < x);
            let type2 = candidate
                .with_residue((x + y) % m)
                .any(|(c, d)| c <= x && d <= y && c + d < x + y);
            (!type1 && !type2).then(|| vec![x, y])
        })
    });

    let mut p_cells = None;
    match Solver::new(*rules).with_budget(budget).solve_grid(&[bound, bound]) {
        Ok(grid) => {
            p_cells = Some(grid.p_count());
            run.run("oracle-agreement", box_params, || {
                grid.positions().find_map(|p| {
                    let (x, y) = (p.heaps()[0], p.heaps()[1]);
                    let oracle_p = grid.status(&p) == Some(Status::P);
                    (oracle_p != member_set.contains(&(x, y))).then(|| vec![x, y])
                })
            });
        }
        Err(CoreError::BudgetExceeded { .. }) => run.skip("oracle-agreement", box_params),
        Err(e) => unreachable!("two-heap grid construction: {e}"),
    }

    Ok(VerificationReport {
        m,
        heaps: 2,
        bound,
        p_cells,
        checks: run.finish(),
    })
}

fn pairs(members: &[(u64, u64)]) -> impl Iterator<Item = ((u64, u64), (u64, u64))> + '_ {
    members.iter().flat_map(move |&p| members.iter().map(move |&q| (p, q)))
}

/// Compares the odd-m multi-heap formula with the oracle on `[0, bound]^heaps`.
pub fn verify_multiheap_odd(
    rules: &Rules,
    heaps: usize,
    bound: u64,
    budget: u64,
) -> Result<VerificationReport, VerifyError> {
    if !rules.is_odd() {
        return Err(VerifyError::EvenModulus(rules.m()));
    }
    if heaps == 0 {
        return Err(VerifyError::NoHeaps);
    }
    let params = format!("m={} box=[0,{bound}]^{heaps}", rules.m());
    let mut run = Runner { checks: Vec::new() };
    let mut p_cells = None;
    match Solver::new(*rules).with_budget(budget).solve_grid(&vec![bound; heaps]) {
        Ok(grid) => {
            p_cells = Some(grid.p_count());
            run.run("oracle-agreement", params, || {
                grid.positions().find_map(|p| {
                    let formula = closed_form::is_p_multiheap_odd(rules, &p).expect("odd m");
                    (formula != (grid.status(&p) == Some(Status::P))).then(|| p.into_heaps())
                })
            });
        }
        Err(_) => run.skip("oracle-agreement", params),
    }
    Ok(VerificationReport {
        m: rules.m(),
        heaps,
        bound,
        p_cells,
        checks: run.finish(),
    })
}

/// Cells checked against full successor enumeration by
/// [`explore_oracle`]; larger grids are sampled with a fixed stride.
const SELF_CHECK_CELLS: usize = 4096;

/// Oracle-only exploration for cases without a closed form: builds the grid
/// and checks that P-cells are exactly the cells with no P successor.
pub fn explore_oracle(rules: &Rules, heaps: usize, bound: u64, budget: u64) -> Result<VerificationReport, VerifyError> {
    if heaps == 0 {
        return Err(VerifyError::NoHeaps);
    }
    let params = format!("m={} box=[0,{bound}]^{heaps}", rules.m());
    let mut run = Runner { checks: Vec::new() };
    let mut p_cells = None;
    match Solver::new(*rules).with_budget(budget).solve_grid(&vec![bound; heaps]) {
        Ok(grid) => {
            p_cells = Some(grid.p_count());
            run.run("oracle-self-consistency", params, || self_consistency(rules, &grid));
        }
        Err(_) => run.skip("oracle-self-consistency", params),
    }
    Ok(VerificationReport {
        m: rules.m(),
        heaps,
        bound,
        p_cells,
        checks: run.finish(),
    })
}

fn self_consistency(rules: &Rules, grid: &StatusGrid) -> Found {
    let cells: Vec<Position> = grid.positions().collect();
    let step = (cells.len() / SELF_CHECK_CELLS).max(1);
    cells.iter().step_by(step).find_map(|p| {
        let any_p_successor = successors(rules, p)
            .iter()
            .any(|q| grid.status(q) == Some(Status::P));
        let is_p = grid.status(p) == Some(Status::P);
        (is_p == any_p_successor).then(|| p.heaps().to_vec())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use modnim_core::solver::DEFAULT_CELL_BUDGET;

    fn rules(m: u64) -> Rules {
        Rules::new(m).unwrap()
    }

    #[test]
    fn m6_passes_with_nine_p_cells() {
        let rep = verify_2heap(&rules(6), 18, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.p_cells, Some(9));
        assert_eq!(rep.checks.len(), 10);
    }

    #[test]
    fn m12_passes_with_24_p_cells() {
        let rep = verify_2heap(&rules(12), 36, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed());
        assert_eq!(rep.p_cells, Some(24));
    }

    #[test]
    fn m7_p_cells_are_the_diagonal() {
        let r = rules(7);
        let rep = verify_2heap(&r, 21, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed());
        let grid = Solver::new(r).solve_grid(&[21, 21]).unwrap();
        let cells: Vec<Vec<u64>> = grid.p_positions().map(Position::into_heaps).collect();
        assert_eq!(cells, (0..7).map(|i| vec![i, i]).collect::<Vec<_>>());
    }

    #[test]
    fn bound_must_cover_the_set() {
        assert!(matches!(
            verify_2heap(&rules(8), 19, DEFAULT_CELL_BUDGET),
            Err(VerifyError::BoundTooSmall { bound: 19, needed: 20 })
        ));
    }

    #[test]
    fn corrupted_set_fails_with_counterexample() {
        let r = rules(6);
        let bad = build_qset_explicit(&r).replace((3, 4), (3, 5)).unwrap();
        let rep = verify_2heap_with(&r, 18, DEFAULT_CELL_BUDGET, &bad).unwrap();
        assert!(rep.any_failed());
        for c in rep.checks.iter().filter(|c| c.outcome == Outcome::Fail) {
            assert!(c.counterexample.is_some(), "{}", c.name);
        }
        assert_eq!(rep.check("closedness").unwrap().outcome, Outcome::Fail);
        assert_eq!(rep.check("oracle-agreement").unwrap().outcome, Outcome::Fail);
    }

    #[test]
    fn budget_overrun_skips_the_oracle() {
        let rep = verify_2heap(&rules(6), 18, 100).unwrap();
        assert_eq!(rep.check("oracle-agreement").unwrap().outcome, Outcome::Skipped);
        assert!(rep.any_skipped() && !rep.any_failed());
        assert_eq!(rep.p_cells, None);
    }

    #[test]
    fn multiheap_odd_examples() {
        let rep = verify_multiheap_odd(&rules(3), 3, 6, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed());
        let rep = verify_multiheap_odd(&rules(5), 3, 10, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed());
        let rep = verify_multiheap_odd(&rules(1), 3, 4, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed());
        assert_eq!(rep.p_cells, Some(1));
        assert!(matches!(
            verify_multiheap_odd(&rules(6), 3, 6, DEFAULT_CELL_BUDGET),
            Err(VerifyError::EvenModulus(6))
        ));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = verify_2heap(&rules(10), 30, DEFAULT_CELL_BUDGET).unwrap();
        let b = verify_2heap(&rules(10), 30, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_exploration_for_even_three_heaps() {
        let rep = explore_oracle(&rules(6), 3, 8, DEFAULT_CELL_BUDGET).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert!(rep.p_cells.unwrap() > 1);
    }
}
