//! Seeded generation and storage of G(n,p) graphs.
//!
//! The adjacency matrix is stored as `n` packed bit rows (both triangles, so
//! a row AND with a color mask plus a popcount gives the per-vertex majority
//! kernel in O(n/64)). Generation draws the upper triangle in row-major
//! order from one [`SplitMix64`] stream, then mirrors it into the lower
//! triangle with 64x64 tile transposes: a given seed defines one graph
//! regardless of thread count or call site.

use std::io::{self, Write};

use thiserror::Error;

use crate::bits::{and_count, tail_mask, transpose64, words_for};
use crate::dynamics::Coloring;
use crate::rng::{probability_threshold, Seed, SplitMix64};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// An immutable simple undirected graph with a packed adjacency matrix.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    words_per_row: usize,
    rows: Vec<u64>,
    degrees: Vec<u32>,
    p: f64,
    seed: Seed,
}

/// Draws `G(n, p)`: every unordered pair is an edge independently with
/// probability `p`, deterministically in `seed`.
pub fn gen_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph, GraphError> {
    let mut rng = SplitMix64::from_seed(seed);
    Graph::generate_with(n, p, seed, &mut rng)
}

impl Graph {
    /// Like [`gen_gnp`], but draws from a caller-owned generator so a trial
    /// can keep consuming the same stream afterwards (e.g. for a random
    /// initial coloring). `seed` is stored as metadata only.
    pub fn generate_with(
        n: usize,
        p: f64,
        seed: Seed,
        rng: &mut SplitMix64,
    ) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::InvalidParameter("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidParameter(format!(
                "p must lie in [0, 1], got {p}"
            )));
        }
        let wpr = words_for(n);
        let mut rows = vec![0u64; n * wpr];

        if p >= 1.0 {
            for u in 0..n {
                set_bit_range(&mut rows[u * wpr..(u + 1) * wpr], u + 1, n);
            }
        } else if p == 0.5 {
            // Fair coins: adjacency words drawn directly as uniform machine
            // words, one fresh draw per 64 pairs.
            for u in 0..n {
                fill_random_range(&mut rows[u * wpr..(u + 1) * wpr], u + 1, n, rng);
            }
        } else if p > 0.0 {
            let threshold = probability_threshold(p);
            for u in 0..n {
                let row = &mut rows[u * wpr..(u + 1) * wpr];
                for v in u + 1..n {
                    if rng.next_bool_with_threshold(threshold) {
                        row[v >> 6] |= 1u64 << (v & 63);
                    }
                }
            }
        }

        mirror_lower_triangle(&mut rows, n, wpr);

        let degrees = (0..n)
            .map(|u| {
                rows[u * wpr..(u + 1) * wpr]
                    .iter()
                    .map(|w| w.count_ones())
                    .sum()
            })
            .collect();

        Ok(Graph {
            n,
            words_per_row: wpr,
            rows,
            degrees,
            p,
            seed,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Packed adjacency row of vertex `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        debug_assert!(v < self.n);
        &self.rows[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "vertex id out of range");
        (self.row(u)[v >> 6] >> (v & 63)) & 1 != 0
    }

    /// Degree |Gamma(v)|.
    #[inline]
    pub fn degree(&self, v: usize) -> u32 {
        assert!(v < self.n, "vertex id {v} out of range {}", self.n);
        self.degrees[v]
    }

    /// Number of red neighbors of `v`: popcount(row(v) AND red).
    #[inline]
    pub fn red_neighbor_count(&self, coloring: &Coloring, v: usize) -> u32 {
        assert!(v < self.n, "vertex id {v} out of range {}", self.n);
        assert_eq!(coloring.n(), self.n, "coloring length mismatch");
        and_count(self.row(v), coloring.red().words())
    }

    pub fn edge_count(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum::<u64>() / 2
    }

    /// Debug dump: header `n p master stream`, then one hex-encoded row per
    /// vertex with vertex 0 at the most significant bit. Not a stable format.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "{} {} {} {}",
            self.n, self.p, self.seed.master, self.seed.stream
        )?;
        let ndigits = self.n.div_ceil(4);
        let mut line = String::with_capacity(ndigits);
        for u in 0..self.n {
            line.clear();
            let row = self.row(u);
            for digit in 0..ndigits {
                let mut nibble = 0u32;
                for j in 0..4 {
                    let v = 4 * digit + j;
                    if v < self.n && (row[v >> 6] >> (v & 63)) & 1 != 0 {
                        nibble |= 8 >> j;
                    }
                }
                line.push(char::from_digit(nibble, 16).unwrap());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
impl Graph {
    /// Test-only constructor from an explicit edge list (metadata zeroed).
    pub(crate) fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let wpr = words_for(n);
        let mut rows = vec![0u64; n * wpr];
        for &(u, v) in edges {
            assert!(u < n && v < n && u != v);
            rows[u * wpr + (v >> 6)] |= 1u64 << (v & 63);
            rows[v * wpr + (u >> 6)] |= 1u64 << (u & 63);
        }
        let degrees = (0..n)
            .map(|u| {
                rows[u * wpr..(u + 1) * wpr]
                    .iter()
                    .map(|w| w.count_ones())
                    .sum()
            })
            .collect();
        Graph {
            n,
            words_per_row: wpr,
            rows,
            degrees,
            p: 0.0,
            seed: Seed::new(0, 0),
        }
    }
}

/// Sets bits [start, end) of a packed row.
fn set_bit_range(row: &mut [u64], start: usize, end: usize) {
    let mut pos = start;
    while pos < end {
        let lo = pos & 63;
        let take = (64 - lo).min(end - pos);
        let mask = if take == 64 { !0u64 } else { (1u64 << take) - 1 };
        row[pos >> 6] |= mask << lo;
        pos += take;
    }
}

/// Fills bits [start, end) of a packed row from fresh random words, one draw
/// per (up to 64) bits, in ascending order.
fn fill_random_range(row: &mut [u64], start: usize, end: usize, rng: &mut SplitMix64) {
    let mut pos = start;
    while pos < end {
        let take = 64.min(end - pos);
        let bits = rng.next_u64() & tail_mask(take);
        let lo = pos & 63;
        row[pos >> 6] |= bits << lo;
        if lo != 0 && lo + take > 64 {
            row[(pos >> 6) + 1] |= bits >> (64 - lo);
        }
        pos += take;
    }
}

/// Copies the strict upper triangle onto the strict lower triangle using
/// 64x64 tile transposes.
fn mirror_lower_triangle(rows: &mut [u64], n: usize, wpr: usize) {
    let mut tile = [0u64; 64];
    let mut flipped = [0u64; 64];
    for bi in 0..wpr {
        for bj in bi..wpr {
            for (r, slot) in tile.iter_mut().enumerate() {
                let row = (bi << 6) | r;
                *slot = if row < n { rows[row * wpr + bj] } else { 0 };
            }
            flipped.copy_from_slice(&tile);
            transpose64(&mut flipped);
            if bi == bj {
                for (r, (&orig, &mirror)) in tile.iter().zip(&flipped).enumerate() {
                    let row = (bi << 6) | r;
                    if row < n {
                        rows[row * wpr + bi] = orig | mirror;
                    }
                }
            } else {
                for (r, &mirror) in flipped.iter().enumerate() {
                    let row = (bj << 6) | r;
                    if row < n {
                        rows[row * wpr + bi] = mirror;
                    }
                }
            }
        }
    }
}
