//! Closed-form P-position sets.
//!
//! For two heaps the P-positions of m-Modular Nim are a finite set `Q_m`
//! built from a diagonal *trunk* `{(i,i)}` and *branches* obtained by
//! doubling and shifting `Q_{m/2}`. Unrolling the recursion, with
//! `m = k · 2^n`, every member is
//!
//! ```text
//! (2^i·a + i·m/2 + b,  2^i·a + i·m/2 + 2^i − 1 − b)
//! ```
//!
//! for a level `0 ≤ i ≤ n`, `0 ≤ b < 2^i`, and `0 ≤ a < k·2^(n−i−1)` below
//! the top level or `0 ≤ a < k` on it.
//!
//! For odd `m` and any number of heaps, a position is P exactly when its
//! heap sum is below `2m` and the XOR of its heaps is zero.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::game::{MoveDelta, Position, Rules};
use crate::Error;

/// `ν₂(m)`, the exponent of the largest power of two dividing `m`.
pub fn nu2(m: u64) -> Result<u32, Error> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(m.trailing_zeros())
}

/// `|Q_m| = m · (ν₂(m)/2 + 1)`. Also one past the largest coordinate in `Q_m`.
pub fn qset_size(rules: &Rules) -> u128 {
    let m = rules.m() as u128;
    // m·n is even whenever n > 0
    m + m * rules.two_adic_order() as u128 / 2
}

/// Branch level and parameters of one member of `Q_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelParams {
    pub level: u32,
    pub a: u64,
    pub b: u64,
}

impl LevelParams {
    /// Number of admissible `a` values on `level`.
    pub fn a_count(rules: &Rules, level: u32) -> u64 {
        let n = rules.two_adic_order();
        if level < n {
            rules.odd_part() << (n - level - 1)
        } else {
            rules.odd_part()
        }
    }

    /// Recovers the parameters of the member whose first coordinate is `x`.
    ///
    /// The level is `⌊2x/m⌋` clamped to `ν₂(m)`: the top level covers `m`
    /// consecutive coordinates rather than `m/2`.
    pub fn of_first(rules: &Rules, x: u64) -> Result<Self, Error> {
        let limit = qset_size(rules);
        if x as u128 >= limit {
            return Err(Error::CoordinateOutOfRange {
                x,
                limit: limit.min(u64::MAX as u128) as u64,
            });
        }
        let m = rules.m() as u128;
        let level = ((2 * x as u128) / m).min(rules.two_adic_order() as u128) as u32;
        let offset = x - level_offset(rules, level);
        Ok(LevelParams {
            level,
            a: offset >> level,
            b: offset & ((1u64 << level) - 1),
        })
    }

    pub fn is_valid(&self, rules: &Rules) -> bool {
        self.level <= rules.two_adic_order()
            && self.a < Self::a_count(rules, self.level)
            && self.b < (1u64 << self.level)
    }

    /// The member `(2^i·a + i·m/2 + b, 2^i·a + i·m/2 + 2^i − 1 − b)`.
    pub fn position(&self, rules: &Rules) -> (u64, u64) {
        let base = (self.a << self.level) + level_offset(rules, self.level);
        (base + self.b, base + (1u64 << self.level) - 1 - self.b)
    }

    /// Heap sum shared by every member with these `level` and `a`.
    pub fn group_sum(rules: &Rules, level: u32, a: u64) -> u64 {
        2 * ((a << level) + level_offset(rules, level)) + (1u64 << level) - 1
    }
}

/// `i·m/2`, the first coordinate where level `i` starts.
fn level_offset(rules: &Rules, level: u32) -> u64 {
    // level > 0 implies m even
    (level as u64 * rules.m()) / 2
}

/// The second coordinate paired with first coordinate `x` in `Q_m`.
pub fn partner(rules: &Rules, x: u64) -> Result<u64, Error> {
    let p = LevelParams::of_first(rules, x)?;
    let i = p.level;
    // 2^(i+1)·a + i·m + 2^i − 1 − x
    Ok((p.a << (i + 1)) + 2 * level_offset(rules, i) + (1u64 << i) - 1 - x)
}

/// Membership in `Q_m`, the two-heap P-set.
pub fn is_p_2heap(rules: &Rules, p: &Position) -> Result<bool, Error> {
    let &[x, y] = p.heaps() else {
        return Err(Error::WrongHeapCount {
            expected: 2,
            found: p.len(),
        });
    };
    if x as u128 >= qset_size(rules) {
        return Ok(false);
    }
    Ok(partner(rules, x)? == y)
}

/// P-status for odd `m` and any number of heaps: `|p| < 2m` and zero XOR.
pub fn is_p_multiheap_odd(rules: &Rules, p: &Position) -> Result<bool, Error> {
    if !rules.is_odd() {
        return Err(Error::EvenModulus(rules.m()));
    }
    Ok((p.heap_sum() as u128) < 2 * rules.m() as u128 && nim_sum(p.heaps()) == 0)
}

pub fn nim_sum(heaps: &[u64]) -> u64 {
    heaps.iter().fold(0, |acc, h| acc ^ h)
}

/// A materialized two-heap P-set with lookup indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PSet {
    rules: Rules,
    positions: Vec<(u64, u64)>,
    by_first: BTreeMap<u64, usize>,
    by_residue: BTreeMap<u64, Vec<usize>>,
}

impl PSet {
    /// Sorts `positions` by first coordinate and builds the indices.
    ///
    /// No membership law is enforced beyond distinct first coordinates, so
    /// deliberately corrupted sets can be fed to the verifier.
    pub fn from_pairs(rules: Rules, mut positions: Vec<(u64, u64)>) -> Result<Self, Error> {
        positions.sort_unstable();
        let mut by_first = BTreeMap::new();
        let mut by_residue: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (idx, &(x, y)) in positions.iter().enumerate() {
            if by_first.insert(x, idx).is_some() {
                return Err(Error::DuplicateCoordinate(x));
            }
            let sum = x.checked_add(y).ok_or(Error::HeapOverflow)?;
            by_residue.entry(rules.residue(sum)).or_default().push(idx);
        }
        Ok(PSet {
            rules,
            positions,
            by_first,
            by_residue,
        })
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    /// Members sorted by first coordinate.
    pub fn positions(&self) -> &[(u64, u64)] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, x: u64, y: u64) -> bool {
        self.partner_of(x) == Some(y)
    }

    pub fn partner_of(&self, x: u64) -> Option<u64> {
        self.by_first.get(&x).map(|&i| self.positions[i].1)
    }

    /// Members whose heap sum is congruent to `residue` mod m.
    pub fn with_residue(&self, residue: u64) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.by_residue
            .get(&residue)
            .into_iter()
            .flatten()
            .map(|&i| self.positions[i])
    }

    /// Replaces one member, keeping the indices consistent.
    pub fn replace(&self, old: (u64, u64), new: (u64, u64)) -> Result<Self, Error> {
        let positions = self
            .positions
            .iter()
            .map(|&p| if p == old { new } else { p })
            .collect();
        PSet::from_pairs(self.rules, positions)
    }
}

/// `Q_m` by the trunk/branch recursion on `m/2`.
pub fn build_qset_recursive(rules: &Rules) -> PSet {
    fn members(m: u64) -> Vec<(u64, u64)> {
        if m % 2 == 1 {
            return (0..m).map(|i| (i, i)).collect();
        }
        let half = m / 2;
        let mut out: Vec<(u64, u64)> = (0..half).map(|i| (i, i)).collect();
        for (a, b) in members(half) {
            out.push((2 * a + half + 1, 2 * b + half));
            out.push((2 * a + half, 2 * b + half + 1));
        }
        out
    }
    PSet::from_pairs(*rules, members(rules.m())).expect("Q_m has distinct first coordinates")
}

/// `Q_m` generated level by level from the explicit parametrization.
pub fn build_qset_explicit(rules: &Rules) -> PSet {
    let mut out = Vec::with_capacity(qset_size(rules) as usize);
    for level in 0..=rules.two_adic_order() {
        for a in 0..LevelParams::a_count(rules, level) {
            for b in 0..(1u64 << level) {
                out.push(LevelParams { level, a, b }.position(rules));
            }
        }
    }
    PSet::from_pairs(*rules, out).expect("Q_m has distinct first coordinates")
}

/// The preferred P-position reachable from a two-heap position, or `None` if
/// `p` is itself in `Q_m`.
///
/// Preference: largest heap sum, then lexicographically smallest. Every
/// member with a congruent heap sum has the same sum, so the Type II
/// candidates form one group per level and nothing is materialized.
pub fn best_target_2heap(rules: &Rules, p: &Position) -> Result<Option<Position>, Error> {
    if is_p_2heap(rules, p)? {
        return Ok(None);
    }
    let (x, y) = (p.heaps()[0], p.heaps()[1]);
    let size = qset_size(rules);
    let mut best: Option<(u64, u64)> = None;
    let mut consider = |c: (u64, u64)| {
        best = Some(match best {
            Some(b) if rank(b) >= rank(c) => b,
            _ => c,
        });
    };

    // Type I: keep one heap, shrink the other to its partner
    if (x as u128) < size {
        let py = partner(rules, x)?;
        if py < y {
            consider((x, py));
        }
    }
    if (y as u128) < size {
        let px = partner(rules, y)?;
        if px < x {
            consider((px, y));
        }
    }

    // Type II: for each level, the unique `a` whose group sum is congruent to |p|
    let m = rules.m() as u128;
    let target = p.heap_sum() as u128 % m;
    for level in 0..=rules.two_adic_order() {
        let offset = 2 * level_offset(rules, level) as u128 + (1u128 << level) - 1;
        // 2^(level+1)·a ≡ target − offset (mod m)
        let rhs = (target + m - offset % m) % m;
        let Some(a) = solve_linear_congruence(level + 1, rhs, rules) else {
            continue;
        };
        if a >= LevelParams::a_count(rules, level) {
            continue;
        }
        let sum = LevelParams::group_sum(rules, level, a);
        if sum >= p.heap_sum() {
            continue;
        }
        let base = (a << level) + level_offset(rules, level);
        let top = (1u64 << level) - 1;
        // need base + b ≤ x and base + top − b ≤ y
        let lo = (base + top).saturating_sub(y);
        let hi = top.min(x.saturating_sub(base));
        if base <= x && lo <= hi {
            consider((base + lo, base + top - lo));
        }
    }
    best.map(|(a, b)| Position::new(alloc::vec![a, b])).transpose()
}

/// Ordering key: larger sum first, then lexicographically smaller.
fn rank(c: (u64, u64)) -> (u128, core::cmp::Reverse<(u64, u64)>) {
    (c.0 as u128 + c.1 as u128, core::cmp::Reverse(c))
}

/// Smallest `a ≥ 0` with `2^shift · a ≡ rhs (mod m)`, if any.
fn solve_linear_congruence(shift: u32, rhs: u128, rules: &Rules) -> Option<u64> {
    let m = rules.m() as u128;
    let g_exp = shift.min(rules.two_adic_order());
    let g = 1u128 << g_exp;
    if !rhs.is_multiple_of(g) {
        return None;
    }
    let modulus = m / g;
    if modulus == 1 {
        return Some(0);
    }
    // 2^(shift − g_exp) is invertible modulo the odd number m / g
    let unit = pow_mod(2, (shift - g_exp) as u128, modulus);
    let inv = inverse_mod(unit, modulus)?;
    Some(((rhs / g) % modulus * inv % modulus) as u64)
}

fn pow_mod(mut base: u128, mut exp: u128, modulus: u128) -> u128 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn inverse_mod(a: u128, modulus: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(modulus as i128) as u128)
}

/// Heap counts up to this use the exact lexicographic search for odd-m
/// targets; the bit DP is exponential in the number of heaps.
const LEX_SEARCH_MAX_HEAPS: usize = 8;

/// The preferred P-position reachable from `p` for odd `m`, or `None` if `p`
/// is already P.
///
/// Preference matches [`best_target_2heap`]: largest heap sum, then
/// lexicographically smallest. Above eight heaps the Type II candidate is
/// found by a cheaper descent and may not be the lexicographic minimum.
pub fn best_target_odd(rules: &Rules, p: &Position) -> Result<Option<Position>, Error> {
    if is_p_multiheap_odd(rules, p)? {
        return Ok(None);
    }
    let m = rules.m() as u128;
    let heaps = p.heaps();
    let total = p.heap_sum() as u128;
    let xor = nim_sum(heaps);
    let mut best: Option<Vec<u64>> = None;
    let mut consider = |c: Vec<u64>| {
        let better = match &best {
            None => true,
            Some(b) => {
                let (cs, bs) = (sum128(&c), sum128(b));
                cs > bs || (cs == bs && c < *b)
            }
        };
        if better {
            best = Some(c);
        }
    };

    // Type I: the Nim replies
    for (j, &h) in heaps.iter().enumerate() {
        let t = xor ^ h;
        if t < h && total - ((h - t) as u128) < 2 * m {
            let mut c = heaps.to_vec();
            c[j] = t;
            consider(c);
        }
    }

    // Type II: even sums below 2m congruent to |p|
    let r = total % m;
    for s in [r, r + m] {
        if s >= total || s >= 2 * m || s % 2 == 1 {
            continue;
        }
        let found = if heaps.len() <= LEX_SEARCH_MAX_HEAPS {
            lex_min_xor_zero(heaps, s as u64)
        } else {
            descend_xor_zero(heaps, s as u64)
        };
        if let Some(c) = found {
            consider(c);
        }
    }
    best.map(Position::new).transpose()
}

fn sum128(h: &[u64]) -> u128 {
    h.iter().map(|&x| x as u128).sum()
}

/// Lexicographically smallest `q ≤ upper` with zero XOR and `Σq = sum`.
fn lex_min_xor_zero(upper: &[u64], sum: u64) -> Option<Vec<u64>> {
    if !xor_sum_feasible(upper, 0, sum) {
        return None;
    }
    let mut fixed: Vec<u64> = Vec::with_capacity(upper.len());
    let (mut xor_left, mut sum_left) = (0u64, sum);
    for j in 0..upper.len() {
        let rest = &upper[j + 1..];
        let feasible_below = |cap: u64| {
            let mut bounds = Vec::with_capacity(rest.len() + 1);
            bounds.push(cap);
            bounds.extend_from_slice(rest);
            xor_sum_feasible(&bounds, xor_left, sum_left)
        };
        // smallest cap admitting a solution is the smallest feasible value
        let (mut lo, mut hi) = (0u64, upper[j].min(sum_left));
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if feasible_below(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        fixed.push(lo);
        xor_left ^= lo;
        sum_left -= lo;
    }
    Some(fixed)
}

/// Whether some `q` with `0 ≤ q_j ≤ upper_j`, `⊕q = xor` and `Σq = sum` exists.
///
/// Bit-serial DP from the least significant bit. The state holds the carry
/// of the column sums and, per heap, whether the low bits chosen so far
/// exceed the low bits of its bound.
fn xor_sum_feasible(upper: &[u64], xor: u64, sum: u64) -> bool {
    let h = upper.len();
    if h == 0 {
        return xor == 0 && sum == 0;
    }
    let masks = 1usize << h;
    let full = masks - 1;
    let idx = |carry: usize, gt: usize| carry * masks + gt;
    let mut cur = alloc::vec![false; (h + 1) * masks];
    let mut next = cur.clone();
    cur[idx(0, 0)] = true;
    // above the highest set bit of every input only all-zero columns with
    // no carry remain feasible
    let top = upper.iter().fold(xor | sum, |acc, &u| acc | u.min(sum));
    let width = 64 - top.leading_zeros();
    let ubits_at = |bit: u32| {
        upper
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, u)| acc | ((((*u).min(sum) >> bit) & 1) as usize) << j)
    };
    for bit in 0..width {
        next.iter_mut().for_each(|s| *s = false);
        let ubits = ubits_at(bit);
        let want_parity = ((xor >> bit) & 1) as u32;
        let want_sum = ((sum >> bit) & 1) as usize;
        let mut any = false;
        for carry in 0..=h {
            for gt in 0..masks {
                if !cur[idx(carry, gt)] {
                    continue;
                }
                for v in 0..masks {
                    let ones = v.count_ones();
                    if ones & 1 != want_parity {
                        continue;
                    }
                    let col = ones as usize + carry;
                    if col & 1 != want_sum {
                        continue;
                    }
                    let ngt = ((v & !ubits) | (gt & !(v ^ ubits))) & full;
                    next[idx(col >> 1, ngt)] = true;
                    any = true;
                }
            }
        }
        if !any {
            return false;
        }
        core::mem::swap(&mut cur, &mut next);
    }
    cur[idx(0, 0)]
}

/// A zero-XOR `q ≤ upper` with `Σq = sum`, found by descending from a Nim
/// P-position two tokens at a time.
fn descend_xor_zero(upper: &[u64], sum: u64) -> Option<Vec<u64>> {
    let xor = nim_sum(upper);
    let mut q = upper.to_vec();
    if xor != 0 {
        let j = upper.iter().position(|&h| (h ^ xor) < h)?;
        q[j] ^= xor;
    }
    let mut total = sum128(&q);
    if total < sum as u128 {
        return None;
    }
    while total > sum as u128 {
        // the lowest set bit t appears in at least two heaps; taking one token
        // from each of two such heaps keeps the XOR at zero
        let t = q.iter().filter(|&&h| h > 0).map(|h| h.trailing_zeros()).min()?;
        let mut holders = q.iter().enumerate().filter(|(_, h)| **h > 0 && h.trailing_zeros() == t);
        let (i, _) = holders.next()?;
        let (j, _) = holders.next()?;
        q[i] -= 1;
        q[j] -= 1;
        total -= 2;
    }
    Some(q)
}

/// The move to the preferred P-position under the closed forms that apply
/// to `p`: two heaps for any `m`, or odd `m` with any heap count.
pub fn best_move(rules: &Rules, p: &Position) -> Result<Option<MoveDelta>, Error> {
    let target = if p.len() == 2 {
        best_target_2heap(rules, p)?
    } else {
        best_target_odd(rules, p)?
    };
    Ok(target.map(|t| MoveDelta::between(rules, p, &t).expect("target is reachable")))
}
