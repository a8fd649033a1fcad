//! Positions, rules and move legality.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// An ordered sequence of heap sizes.
///
/// Heaps are not normalized: `(3,4)` and `(4,3)` are different positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    heaps: Vec<u64>,
    sum: u64,
}

impl Position {
    pub fn new(heaps: Vec<u64>) -> Result<Self, Error> {
        if heaps.is_empty() {
            return Err(Error::EmptyPosition);
        }
        let sum = heaps
            .iter()
            .try_fold(0u64, |acc, &h| acc.checked_add(h))
            .ok_or(Error::HeapOverflow)?;
        Ok(Position { heaps, sum })
    }

    /// The all-zero position with `len` heaps.
    pub fn zero(len: usize) -> Result<Self, Error> {
        Position::new(vec![0; len])
    }

    pub fn heaps(&self) -> &[u64] {
        &self.heaps
    }

    pub fn len(&self) -> usize {
        self.heaps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of tokens.
    pub fn heap_sum(&self) -> u64 {
        self.sum
    }

    pub fn is_terminal(&self) -> bool {
        self.sum == 0
    }

    pub fn into_heaps(self) -> Vec<u64> {
        self.heaps
    }

    /// `self ⪰ other`: every heap of `self` is at least the matching heap of `other`.
    pub fn dominates(&self, other: &Position) -> Result<bool, Error> {
        same_len(self.len(), other.len())?;
        Ok(self.dominates_unchecked(other))
    }

    /// Domination with `self != other`.
    pub fn strictly_dominates(&self, other: &Position) -> Result<bool, Error> {
        same_len(self.len(), other.len())?;
        Ok(self.sum > other.sum && self.dominates_unchecked(other))
    }

    pub(crate) fn dominates_unchecked(&self, other: &Position) -> bool {
        self.heaps.iter().zip(&other.heaps).all(|(a, b)| a >= b)
    }

    /// Applies a removal vector, returning `None` if it would take more tokens
    /// than a heap holds or the lengths differ.
    pub fn apply(&self, delta: &MoveDelta) -> Option<Position> {
        if delta.removals.len() != self.len() {
            return None;
        }
        let heaps = self
            .heaps
            .iter()
            .zip(&delta.removals)
            .map(|(h, r)| h.checked_sub(*r))
            .collect::<Option<Vec<_>>>()?;
        Some(Position {
            sum: self.sum - delta.total(),
            heaps,
        })
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, h) in self.heaps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        f.write_str(")")
    }
}

fn same_len(left: usize, right: usize) -> Result<(), Error> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

/// The modular base `m = k · 2^n` with `k` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rules {
    m: u64,
    odd_part: u64,
    two_adic: u32,
}

impl Rules {
    pub fn new(m: u64) -> Result<Self, Error> {
        let two_adic = crate::closed_form::nu2(m)?;
        Ok(Rules {
            m,
            odd_part: m >> two_adic,
            two_adic,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `k`, the odd part of `m`.
    pub fn odd_part(&self) -> u64 {
        self.odd_part
    }

    /// `n = ν₂(m)`.
    pub fn two_adic_order(&self) -> u32 {
        self.two_adic
    }

    pub fn is_odd(&self) -> bool {
        self.two_adic == 0
    }

    pub fn residue(&self, sum: u64) -> u64 {
        sum % self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    /// Positive removal from exactly one heap.
    TypeI,
    /// Positive multiple of `m` removed in total, from any heaps.
    TypeII,
}

impl MoveKind {
    pub fn label(self) -> &'static str {
        match self {
            MoveKind::TypeI => "I",
            MoveKind::TypeII => "II",
        }
    }
}

/// Per-heap removal amounts plus the move type they claim to be.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveDelta {
    pub removals: Vec<u64>,
    pub kind: MoveKind,
}

impl MoveDelta {
    pub fn new(removals: Vec<u64>, kind: MoveKind) -> Self {
        MoveDelta { removals, kind }
    }

    /// The move taking `from` to `to`, labelled Type I whenever only one heap
    /// changes. Returns `None` if `to` is not reachable in one legal move.
    pub fn between(rules: &Rules, from: &Position, to: &Position) -> Option<MoveDelta> {
        if from.len() != to.len() || from.sum <= to.sum || !from.dominates_unchecked(to) {
            return None;
        }
        let removals: Vec<u64> = from.heaps.iter().zip(&to.heaps).map(|(a, b)| a - b).collect();
        let touched = removals.iter().filter(|&&r| r > 0).count();
        if touched == 1 {
            Some(MoveDelta::new(removals, MoveKind::TypeI))
        } else if (from.sum - to.sum).is_multiple_of(rules.m) {
            Some(MoveDelta::new(removals, MoveKind::TypeII))
        } else {
            None
        }
    }

    /// Total number of tokens removed. Saturates on overflow.
    pub fn total(&self) -> u64 {
        self.removals.iter().fold(0u64, |acc, r| acc.saturating_add(*r))
    }

    pub fn heaps_touched(&self) -> usize {
        self.removals.iter().filter(|&&r| r > 0).count()
    }
}

/// Why a move was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IllegalMove {
    LengthMismatch { heaps: usize, removals: usize },
    EmptyMove,
    ExceedsHeap { heap: usize },
    /// Type II requires a total that is a positive multiple of `m`.
    NotMultipleOfM,
    /// Type I requires exactly one touched heap.
    NotSingleHeap,
}

impl IllegalMove {
    /// Short rule name shown to players.
    pub fn rule(&self) -> &'static str {
        match self {
            IllegalMove::LengthMismatch { .. } => "wrong number of heaps",
            IllegalMove::EmptyMove => "empty move",
            IllegalMove::ExceedsHeap { .. } => "exceeds heap",
            IllegalMove::NotMultipleOfM => "touches multiple heaps without multiple-of-m total",
            IllegalMove::NotSingleHeap => "type I move must touch a single heap",
        }
    }
}

impl fmt::Display for IllegalMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IllegalMove::LengthMismatch { heaps, removals } => {
                write!(f, "{removals} removals given for {heaps} heaps")
            }
            IllegalMove::ExceedsHeap { heap } => {
                write!(f, "removal from heap {} exceeds its size", heap + 1)
            }
            other => f.write_str(other.rule()),
        }
    }
}

impl core::error::Error for IllegalMove {}

/// Checks a move, naming the violated rule on failure.
pub fn check_move(rules: &Rules, from: &Position, delta: &MoveDelta) -> Result<(), IllegalMove> {
    if delta.removals.len() != from.len() {
        return Err(IllegalMove::LengthMismatch {
            heaps: from.len(),
            removals: delta.removals.len(),
        });
    }
    if let Some(heap) = from
        .heaps
        .iter()
        .zip(&delta.removals)
        .position(|(h, r)| r > h)
    {
        return Err(IllegalMove::ExceedsHeap { heap });
    }
    let total = delta.total();
    if total == 0 {
        return Err(IllegalMove::EmptyMove);
    }
    match delta.kind {
        MoveKind::TypeI if delta.heaps_touched() == 1 => Ok(()),
        MoveKind::TypeI => Err(IllegalMove::NotSingleHeap),
        MoveKind::TypeII if total.is_multiple_of(rules.m) => Ok(()),
        MoveKind::TypeII => Err(IllegalMove::NotMultipleOfM),
    }
}

/// Like [`check_move`] but infers the kind: Type I if one heap is touched,
/// Type II otherwise. Used for player input, where no label is given.
pub fn classify_move(rules: &Rules, from: &Position, removals: Vec<u64>) -> Result<MoveDelta, IllegalMove> {
    let kind = if removals.iter().filter(|&&r| r > 0).count() == 1 {
        MoveKind::TypeI
    } else {
        MoveKind::TypeII
    };
    let delta = MoveDelta::new(removals, kind);
    check_move(rules, from, &delta)?;
    Ok(delta)
}

pub fn is_legal_move(rules: &Rules, from: &Position, delta: &MoveDelta) -> Result<bool, Error> {
    same_len(from.len(), delta.removals.len())?;
    Ok(check_move(rules, from, delta).is_ok())
}

/// A Type II move from `a` to `b` exists iff `a ≻ b` and `|a| ≡ |b| (mod m)`.
pub fn type2_reachable(rules: &Rules, a: &Position, b: &Position) -> Result<bool, Error> {
    Ok(a.strictly_dominates(b)? && (a.sum - b.sum).is_multiple_of(rules.m))
}

/// Whether any legal move leads from `a` to `b`.
pub fn reachable(rules: &Rules, a: &Position, b: &Position) -> Result<bool, Error> {
    same_len(a.len(), b.len())?;
    Ok(MoveDelta::between(rules, a, b).is_some())
}

/// Every position reachable from `p` in one move.
///
/// Walks all strictly dominated positions, so the cost is the product of
/// `(h + 1)` over the heaps.
pub fn successors(rules: &Rules, p: &Position) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    for_each_dominated(p, |q| {
        if MoveDelta::between(rules, p, q).is_some() {
            out.insert(q.clone());
        }
    });
    out
}

/// Calls `f` on every position dominated by `p`, including `p` itself,
/// in lexicographic order.
pub fn for_each_dominated(p: &Position, mut f: impl FnMut(&Position)) {
    let mut cur = Position::zero(p.len()).expect("p has at least one heap");
    loop {
        f(&cur);
        // odometer increment, last heap fastest
        let mut i = p.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur.heaps[i] < p.heaps[i] {
                cur.heaps[i] += 1;
                cur.sum += 1;
                break;
            }
            cur.sum -= cur.heaps[i];
            cur.heaps[i] = 0;
        }
    }
}
