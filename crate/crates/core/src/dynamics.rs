//! The synchronous majority-update process and its combinatorial tools.
//!
//! Each day every vertex simultaneously adopts the color held by the
//! majority of its neighbors, keeping its own color on a tie. Writing
//! `I(v)` for the {0,1} red indicator, the update is
//!
//! ```text
//! v is Red tomorrow  <=>  redNbrs(v) - blueNbrs(v) + I(v) > 0
//! ```
//!
//! which encodes the tie rule exactly: a tied Red vertex scores 1 > 0 and
//! stays Red, a tied Blue vertex scores 0 and stays Blue.

use serde::Serialize;
use thiserror::Error;

use crate::bits::{and_count, BitVec};
use crate::graph::Graph;
use crate::rng::SplitMix64;

/// Colorings enumerated before refusing a universal-reduction check.
pub const DEFAULT_REDUCTION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: {required} colorings > budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

/// One of the two camps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Camp {
    Red,
    Blue,
}

/// A two-coloring of the vertices, stored as the packed Red set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    red: BitVec,
}

impl Coloring {
    pub fn all_blue(n: usize) -> Self {
        Coloring {
            red: BitVec::zeros(n),
        }
    }

    pub fn all_red(n: usize) -> Self {
        Coloring {
            red: BitVec::ones(n),
        }
    }

    /// Red camp = the `red_count` lowest-indexed vertices. Vertex labels are
    /// exchangeable under G(n,p), so this placement loses no generality.
    pub fn first_red(n: usize, red_count: usize) -> Self {
        assert!(red_count <= n, "red count {red_count} exceeds n = {n}");
        let mut red = BitVec::zeros(n);
        for v in 0..red_count {
            red.set(v);
        }
        Coloring { red }
    }

    pub fn from_red_bits(red: BitVec) -> Self {
        Coloring { red }
    }

    pub fn from_red_indices(n: usize, indices: &[usize]) -> Self {
        Coloring {
            red: BitVec::from_indices(n, indices),
        }
    }

    /// Each vertex independently Red or Blue with probability 1/2.
    pub fn random_uniform(n: usize, rng: &mut SplitMix64) -> Self {
        let mut red = BitVec::zeros(n);
        red.fill_random(rng);
        Coloring { red }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.red.len()
    }

    #[inline]
    pub fn red(&self) -> &BitVec {
        &self.red
    }

    #[inline]
    pub fn is_red(&self, v: usize) -> bool {
        self.red.get(v)
    }

    pub fn red_count(&self) -> usize {
        self.red.count_ones()
    }

    pub fn blue_count(&self) -> usize {
        self.n() - self.red_count()
    }

    /// The coloring with every vertex's color exchanged.
    pub fn swapped(&self) -> Coloring {
        Coloring {
            red: self.red.complemented(),
        }
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// One camp reached unanimity.
    Unanimous,
    /// The state repeated the state one or two days earlier without
    /// unanimity; the process is periodic from here on.
    CycleDetected { period: u8 },
    /// `max_days` updates were applied without a decision or detected cycle.
    DayCap,
}

/// Day-by-day record of one run. `blue_sizes[t]` is |B_t|, the Blue camp
/// size after `t` synchronous updates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub blue_sizes: Vec<u32>,
    pub winner: Option<Camp>,
    /// First day with unanimity; present iff `winner` is.
    pub last_day: Option<u32>,
    pub termination: Termination,
}

impl Trajectory {
    /// |B_t| for any `t`, extending past the recorded range: a unanimous
    /// state is a fixed point, and a detected cycle repeats with its period.
    /// Returns `None` only beyond a day-cap stop, where the state is unknown.
    pub fn blue_size_at(&self, t: usize) -> Option<u32> {
        if t < self.blue_sizes.len() {
            return Some(self.blue_sizes[t]);
        }
        let last = self.blue_sizes.len() - 1;
        match self.termination {
            Termination::Unanimous => Some(self.blue_sizes[last]),
            Termination::CycleDetected { period: 1 } => Some(self.blue_sizes[last]),
            Termination::CycleDetected { .. } => {
                // Period 2: sizes alternate between the last two entries.
                if (t - last).is_multiple_of(2) {
                    Some(self.blue_sizes[last])
                } else {
                    Some(self.blue_sizes[last - 1])
                }
            }
            Termination::DayCap => None,
        }
    }
}

/// One synchronous update of every vertex. The input coloring is unchanged.
pub fn majority_step(g: &Graph, c: &Coloring) -> Coloring {
    let n = g.n();
    assert_eq!(c.n(), n, "coloring length mismatch");
    let red_words = c.red().words();
    let mut out = BitVec::zeros(n);
    for v in 0..n {
        let red_nbrs = and_count(g.row(v), red_words) as i64;
        // redNbrs - blueNbrs + I(v) = 2*redNbrs - deg + I(v)
        let margin = 2 * red_nbrs - g.degree(v) as i64 + c.is_red(v) as i64;
        if margin > 0 {
            out.set(v);
        }
    }
    Coloring::from_red_bits(out)
}

/// Iterates [`majority_step`] until unanimity, a detected cycle, or the day
/// cap. Unanimity at day 0 (an initially empty camp) is decided immediately.
pub fn run(g: &Graph, c0: &Coloring, max_days: u32) -> Trajectory {
    assert!(max_days >= 1, "max_days must be at least 1");
    let n = g.n() as u32;
    let b0 = c0.blue_count() as u32;
    let mut blue_sizes = vec![b0];
    if let Some(w) = unanimous_winner(b0, n) {
        return Trajectory {
            blue_sizes,
            winner: Some(w),
            last_day: Some(0),
            termination: Termination::Unanimous,
        };
    }

    let mut two_ago: Option<Coloring> = None;
    let mut one_ago = c0.clone();
    for t in 1..=max_days {
        let next = majority_step(g, &one_ago);
        let blue = next.blue_count() as u32;
        blue_sizes.push(blue);
        if let Some(w) = unanimous_winner(blue, n) {
            return Trajectory {
                blue_sizes,
                winner: Some(w),
                last_day: Some(t),
                termination: Termination::Unanimous,
            };
        }
        let period = if next == one_ago {
            Some(1)
        } else if two_ago.as_ref() == Some(&next) {
            Some(2)
        } else {
            None
        };
        if let Some(period) = period {
            return Trajectory {
                blue_sizes,
                winner: None,
                last_day: None,
                termination: Termination::CycleDetected { period },
            };
        }
        two_ago = Some(std::mem::replace(&mut one_ago, next));
    }
    Trajectory {
        blue_sizes,
        winner: None,
        last_day: None,
        termination: Termination::DayCap,
    }
}

fn unanimous_winner(blue: u32, n: u32) -> Option<Camp> {
    if blue == 0 {
        Some(Camp::Red)
    } else if blue == n {
        Some(Camp::Blue)
    } else {
        None
    }
}

/// Sum over `v` in `S` of (red neighbors of v minus blue neighbors of v),
/// computed by the four-sum identity: within-S red and blue pairs counted
/// twice, plus edges from S to the red and blue vertices outside S.
pub fn dif_sum(g: &Graph, c: &Coloring, s: &BitVec) -> i64 {
    let n = g.n();
    assert_eq!(c.n(), n, "coloring length mismatch");
    assert_eq!(s.len(), n, "subset length mismatch");
    let red = c.red();
    let blue = red.complemented();
    let s_red = s.and(red);
    let s_blue = s.and(&blue);
    let red_outside = red.and_not(s);
    let blue_outside = blue.and_not(s);

    let mut total: i64 = 0;
    for v in s.iter_ones() {
        let row = g.row(v);
        if c.is_red(v) {
            total += and_count(row, s_red.words()) as i64;
        } else {
            total -= and_count(row, s_blue.words()) as i64;
        }
        total += and_count(row, red_outside.words()) as i64;
        total -= and_count(row, blue_outside.words()) as i64;
    }
    total
}

/// True iff every member of `S` is Blue after one update from `c`.
pub fn is_bad_set(g: &Graph, c: &Coloring, s: &BitVec) -> bool {
    assert_eq!(s.len(), g.n(), "subset length mismatch");
    let next = majority_step(g, c);
    and_count(s.words(), next.red().words()) == 0
}

/// Exhaustively checks that every coloring whose Blue set has at most `m1`
/// vertices leads to at most `m2` Blue vertices the next day, with the
/// default enumeration budget.
pub fn check_universal_reduction(g: &Graph, m1: u32, m2: u32) -> Result<bool, DynamicsError> {
    check_universal_reduction_with_budget(g, m1, m2, DEFAULT_REDUCTION_BUDGET)
}

/// [`check_universal_reduction`] with an explicit budget on the number of
/// enumerated colorings (sum of C(n,k) for k <= m1). Blue sets are visited
/// in colexicographic order per size, smallest size first, stopping at the
/// first failure.
pub fn check_universal_reduction_with_budget(
    g: &Graph,
    m1: u32,
    m2: u32,
    budget: u64,
) -> Result<bool, DynamicsError> {
    if m1 < m2 {
        return Err(DynamicsError::InvalidParameter(format!(
            "m1 = {m1} must be at least m2 = {m2}"
        )));
    }
    let n = g.n();
    let required = count_subsets_up_to(n, m1 as usize);
    if required > budget as u128 {
        return Err(DynamicsError::BudgetExceeded { required, budget });
    }

    let mut blue_set: Vec<usize> = Vec::new();
    for k in 0..=(m1 as usize).min(n) {
        blue_set.clear();
        blue_set.extend(0..k);
        loop {
            let mut red = BitVec::ones(n);
            for &v in &blue_set {
                red.clear(v);
            }
            let c = Coloring::from_red_bits(red);
            let next = majority_step(g, &c);
            if next.blue_count() > m2 as usize {
                return Ok(false);
            }
            if !next_subset_colex(&mut blue_set, n) {
                break;
            }
        }
    }
    Ok(true)
}

/// Sum of C(n, k) for k = 0..=m, saturating far above any sane budget.
fn count_subsets_up_to(n: usize, m: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=m.min(n) {
        if k > 0 {
            binom = match binom.checked_mul((n - k + 1) as u128) {
                Some(x) => x / k as u128,
                None => return u128::MAX,
            };
        }
        total = total.saturating_add(binom);
    }
    total
}

/// Advances a strictly increasing index set to its colex successor among
/// k-subsets of {0..n}; false when exhausted.
fn next_subset_colex(set: &mut [usize], n: usize) -> bool {
    let k = set.len();
    if k == 0 {
        return false;
    }
    let mut i = 0;
    while i + 1 < k && set[i] + 1 == set[i + 1] {
        i += 1;
    }
    if set[i] + 1 >= n {
        return false;
    }
    set[i] += 1;
    for (j, slot) in set.iter_mut().enumerate().take(i) {
        *slot = j;
    }
    true
}
