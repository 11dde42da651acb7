//! Bond-dimension profiles that define the open-boundary ensembles.
//!
//! Both the sampler and the replica contraction read their geometry from
//! here, so the two paths always describe the same ensemble.
//!
//! Chain: site 1 is a Haar state on `d ⊗ χ_1`; site `i > 1` is a Haar
//! isometry `χ_{i-1} → d ⊗ χ_i` with `χ_i = min(χ, d^{N-i})`. For
//! `χ = d^r` the last `r` sites are square unitaries, which together act
//! as one Haar unitary on the final block, i.e. the staircase circuit.
//!
//! Square lattice: sites are visited row by row from the bottom, left to
//! right. Each site is a Haar isometry `(left ⊗ down) → (d ⊗ right ⊗ up)`.
//! Output bonds are fixed first by a pass in reverse order; input bonds
//! are then the largest pair `≤ χ` whose product fits in `d·right·up`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

fn pow_sat(d: usize, e: usize) -> usize {
    let mut p: usize = 1;
    for _ in 0..e {
        p = p.saturating_mul(d);
    }
    p
}

/// Bond dimensions `[χ_0 = 1, χ_1, …, χ_{N-1}, χ_N = 1]` used to build an
/// open chain.
pub fn chain_layout(n: usize, d: usize, chi: usize) -> Result<Vec<usize>> {
    if n == 0 || d < 2 || chi == 0 {
        return Err(Error::InvalidParams(format!("bad chain N={n}, d={d}, chi={chi}")));
    }
    if chi > pow_sat(d, n - 1) {
        return Err(Error::Domain(format!(
            "chi={chi} exceeds d^(N-1) for N={n}, d={d}"
        )));
    }
    let mut bonds = vec![1; n + 1];
    for (i, b) in bonds.iter_mut().enumerate().take(n).skip(1) {
        *b = chi.min(pow_sat(d, n - i));
    }
    Ok(bonds)
}

/// Bond profile left after compressing a chain, `min(d^i, χ, d^{N-i})`.
pub fn chain_schmidt_profile(n: usize, d: usize, chi: usize) -> Vec<usize> {
    (0..=n)
        .map(|i| pow_sat(d, i).min(chi).min(pow_sat(d, n - i)))
        .collect()
}

/// Bond dimensions of a `rows x cols` isometric tensor network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeLayout {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
    pub chi: usize,
    // horizontal[r][c]: bond between (r, c) and (r, c + 1)
    horizontal: Vec<Vec<usize>>,
    // vertical[r][c]: bond between (r, c) and (r + 1, c)
    vertical: Vec<Vec<usize>>,
}

/// Leg dimensions of one lattice site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteDims {
    pub left: usize,
    pub down: usize,
    pub right: usize,
    pub up: usize,
}

impl SiteDims {
    pub fn input(&self) -> usize {
        self.left * self.down
    }
}

impl LatticeLayout {
    pub fn new(rows: usize, cols: usize, d: usize, chi: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || d < 2 || chi == 0 {
            return Err(Error::InvalidParams(format!(
                "bad lattice {rows}x{cols}, d={d}, chi={chi}"
            )));
        }
        let mut lay = Self {
            rows,
            cols,
            d,
            chi,
            horizontal: vec![vec![1; cols.saturating_sub(1)]; rows],
            vertical: vec![vec![1; cols]; rows.saturating_sub(1)],
        };
        for r in (0..rows).rev() {
            for c in (0..cols).rev() {
                let s = lay.site(r, c);
                let cap = d.saturating_mul(s.right).saturating_mul(s.up);
                match (c > 0, r > 0) {
                    (false, false) => {}
                    (true, false) => lay.horizontal[r][c - 1] = chi.min(cap),
                    (false, true) => lay.vertical[r - 1][c] = chi.min(cap),
                    (true, true) => {
                        let (down, left) = best_split(chi, cap);
                        lay.vertical[r - 1][c] = down;
                        lay.horizontal[r][c - 1] = left;
                    }
                }
            }
        }
        Ok(lay)
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn site(&self, r: usize, c: usize) -> SiteDims {
        SiteDims {
            left: if c == 0 { 1 } else { self.horizontal[r][c - 1] },
            right: if c + 1 == self.cols { 1 } else { self.horizontal[r][c] },
            down: if r == 0 { 1 } else { self.vertical[r - 1][c] },
            up: if r + 1 == self.rows { 1 } else { self.vertical[r][c] },
        }
    }

    /// Whether the leg exists (is an internal bond) rather than a lattice edge.
    pub fn has_left(&self, c: usize) -> bool {
        c > 0
    }

    pub fn has_right(&self, c: usize) -> bool {
        c + 1 < self.cols
    }

    pub fn has_down(&self, r: usize) -> bool {
        r > 0
    }

    pub fn has_up(&self, r: usize) -> bool {
        r + 1 < self.rows
    }
}

/// Largest `down * left <= cap` with both `<= chi`; ties go to the most
/// balanced pair, then to the larger vertical bond.
fn best_split(chi: usize, cap: usize) -> (usize, usize) {
    let mut best = (1, 1);
    let mut key = (0usize, usize::MAX);
    for down in 1..=chi {
        let left = chi.min(cap / down);
        if left == 0 {
            break;
        }
        let k = (down * left, down.abs_diff(left));
        if k.0 > key.0 || (k.0 == key.0 && (k.1 < key.1 || (k.1 == key.1 && down > best.0))) {
            key = k;
            best = (down, left);
        }
    }
    best
}
