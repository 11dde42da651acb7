//! Combinatorics of the symmetric group `S_k` and the Gram / Weingarten
//! matrices that every replica-averaged network is built from.
//!
//! All `k! x k!` matrices are indexed by [`enumerate_sym`], which lists
//! permutations in lexicographic one-line order. The index of a permutation
//! in that list is its Lehmer rank, see [`Permutation::rank`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest supported replica count.
pub const K_MAX: usize = 6;

/// A permutation of `{1..k}` stored in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // zero-based images
    image: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from one-based one-line notation, e.g. `[2, 3, 1]`.
    pub fn from_one_line(image: &[usize]) -> Result<Self> {
        let k = image.len();
        if k == 0 {
            return Err(Error::InvalidParams("empty permutation".into()));
        }
        let mut seen = vec![false; k];
        for &x in image {
            if x == 0 || x > k || seen[x - 1] {
                return Err(Error::InvalidParams(format!(
                    "{image:?} is not a bijection on 1..={k}"
                )));
            }
            seen[x - 1] = true;
        }
        Ok(Self { image: image.iter().map(|&x| x - 1).collect() })
    }

    pub fn identity(k: usize) -> Self {
        Self { image: (0..k).collect() }
    }

    pub fn k(&self) -> usize {
        self.image.len()
    }

    /// One-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.image.iter().map(|&x| x + 1).collect()
    }

    /// Image of the zero-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.k()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        Self { image: inv }
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.k(), other.k(), "composing permutations of different degree");
        Self { image: other.image.iter().map(|&x| self.image[x]).collect() }
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let k = self.k();
        let mut seen = vec![false; k];
        let mut cycles = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.image[i];
            }
        }
        cycles
    }

    /// Position in the lexicographic enumeration of `S_k`.
    pub fn rank(&self) -> usize {
        let k = self.k();
        let mut rank = 0;
        for i in 0..k {
            let smaller = self.image[i + 1..].iter().filter(|&&x| x < self.image[i]).count();
            rank = rank * (k - i) + smaller;
        }
        rank
    }

    /// Cycle notation with fixed points written out, e.g. `(1 2)(3)`.
    pub fn cycle_notation(&self) -> String {
        let k = self.k();
        let mut seen = vec![false; k];
        let mut out = String::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&format!("{}", i + 1));
                first = false;
                i = self.image[i];
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", x + 1)?;
        }
        f.write_str("]")
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > K_MAX {
        Err(Error::UnsupportedSize { k, max: K_MAX })
    } else {
        Ok(())
    }
}

/// All `k!` permutations of `S_k` in lexicographic one-line order.
pub fn enumerate_sym(k: usize) -> Result<Vec<Permutation>> {
    check_k(k)?;
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = Vec::with_capacity(factorial(k));
    loop {
        out.push(Permutation { image: cur.clone() });
        // next permutation in lexicographic order
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    Ok(out)
}

pub fn cycle_count(sigma: &Permutation) -> usize {
    sigma.cycle_count()
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// `q (q+1) ... (q+k-1)` in exact integer arithmetic, `None` on overflow.
pub fn rising_factorial_u128(q: u64, k: usize) -> Option<u128> {
    (0..k as u64).try_fold(1u128, |acc, j| acc.checked_mul(u128::from(q) + u128::from(j)))
}

/// `S_k` together with the tables every replica contraction needs.
#[derive(Clone, Debug)]
pub struct SymGroup {
    k: usize,
    elements: Vec<Permutation>,
    // cycles[i * n + j] = #(σ_i⁻¹ σ_j)
    cycles_inv: Vec<u8>,
    // cycles[i * n + j] = #(σ_i σ_j)
    cycles_prod: Vec<u8>,
}

impl SymGroup {
    pub fn new(k: usize) -> Result<Self> {
        let elements = enumerate_sym(k)?;
        let n = elements.len();
        let inverses: Vec<Permutation> = elements.iter().map(Permutation::inverse).collect();
        let mut cycles_inv = vec![0u8; n * n];
        let mut cycles_prod = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                cycles_inv[i * n + j] = inverses[i].compose(&elements[j]).cycle_count() as u8;
                cycles_prod[i * n + j] = elements[i].compose(&elements[j]).cycle_count() as u8;
            }
        }
        Ok(Self { k, elements, cycles_inv, cycles_prod })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// `#(σ_i⁻¹ σ_j)`.
    pub fn cycles_between(&self, i: usize, j: usize) -> usize {
        self.cycles_inv[i * self.order() + j] as usize
    }

    /// `#(σ_i σ_j)`, the exponent of `Tr(T_σ T_τ) = q^{#(στ)}`.
    pub fn cycles_of_product(&self, i: usize, j: usize) -> usize {
        self.cycles_prod[i * self.order() + j] as usize
    }

    /// `G_{σπ}(q) = q^{#(σ⁻¹π)}`.
    pub fn gram(&self, q: u64) -> ReplicaMatrix {
        let n = self.order();
        let mut warned = false;
        let pow: Vec<f64> = (0..=self.k)
            .map(|c| match q.checked_pow(c as u32) {
                Some(v) if v < (1u64 << 53) => v as f64,
                _ => {
                    if !warned {
                        log::warn!("Gram entries for q={q}, k={} exceed exact integer range", self.k);
                        warned = true;
                    }
                    libm::pow(q as f64, c as f64)
                }
            })
            .collect();
        let entries = DMatrix::from_fn(n, n, |i, j| pow[self.cycles_between(i, j)]);
        ReplicaMatrix { k: self.k, q, kind: MatrixKind::Gram, entries }
    }

    /// Inverse of the Gram matrix, requires `q >= k`.
    pub fn weingarten(&self, q: u64) -> Result<ReplicaMatrix> {
        if q < self.k as u64 {
            return Err(Error::NonInvertible { k: self.k, q });
        }
        let g = self.gram(q).entries;
        let n = self.order();
        let mut x = g
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::NonInvertible { k: self.k, q })?;
        // two rounds of iterative refinement
        let eye = DMatrix::<f64>::identity(n, n);
        for _ in 0..2 {
            let r = &eye - &g * &x;
            x += &x * r;
        }
        let x = (&x + x.transpose()) * 0.5;
        Ok(ReplicaMatrix { k: self.k, q, kind: MatrixKind::Weingarten, entries: x })
    }

    /// `C_{σσ'}(q) = q^{#(σσ')}`, the coupling of two replica layers
    /// through a shared `q`-dimensional index.
    pub fn layer_coupling(&self, q: u64) -> DMatrix<f64> {
        let n = self.order();
        let qf = q as f64;
        DMatrix::from_fn(n, n, |i, j| libm::pow(qf, self.cycles_of_product(i, j) as f64))
    }
}

/// Which replica object a [`ReplicaMatrix`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Gram,
    Weingarten,
    Transfer,
}

/// A `k! x k!` real matrix over the lexicographic ordering of `S_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaMatrix {
    pub k: usize,
    pub q: u64,
    pub kind: MatrixKind,
    pub entries: DMatrix<f64>,
}

impl ReplicaMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }

    /// Cycle-notation labels for rows and columns, in index order.
    pub fn labels(&self) -> Vec<String> {
        enumerate_sym(self.k)
            .map(|v| v.iter().map(Permutation::cycle_notation).collect())
            .unwrap_or_default()
    }
}

pub fn gram_matrix(k: usize, q: u64) -> Result<ReplicaMatrix> {
    if q == 0 {
        return Err(Error::InvalidParams("q must be positive".into()));
    }
    Ok(SymGroup::new(k)?.gram(q))
}

pub fn weingarten_matrix(k: usize, q: u64) -> Result<ReplicaMatrix> {
    SymGroup::new(k)?.weingarten(q)
}

/// A partition `λ ⊢ k` with non-increasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidParams("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams(format!("{parts:?} is not non-increasing")));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Row lengths `λ_i`, zero-based `i`.
    pub fn row(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Column lengths `λ'_j`, zero-based `j`.
    pub fn column(&self, j: usize) -> usize {
        self.parts.iter().filter(|&&p| p > j).count()
    }

    pub fn conjugate(&self) -> Self {
        Self { parts: (0..self.parts[0]).map(|j| self.column(j)).collect() }
    }

    /// Cells `(row, column)` of the Young diagram, zero-based.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().enumerate().flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
    }

    pub fn hook_length(&self, i: usize, j: usize) -> usize {
        (self.row(i) - j) + (self.column(j) - i) - 1
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// All partitions of `k`, reverse-lexicographic: `(k)` first, `(1^k)` last.
pub fn partitions(k: usize) -> Vec<IntegerPartition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<IntegerPartition>) {
        if rest == 0 {
            out.push(IntegerPartition { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Number of standard Young tableaux of shape `λ`, via the hook formula.
pub fn hook_dimension(lambda: &IntegerPartition) -> u64 {
    let num: u128 = (1..=lambda.k() as u128).product();
    let den: u128 = lambda.cells().map(|(i, j)| lambda.hook_length(i, j) as u128).product();
    (num / den) as u64
}

/// `c_λ(q) = ∏ over cells (q + column - row)`, so `c_(2) = q(q+1)`
/// and `c_(1,1) = q(q-1)`.
pub fn content_polynomial(lambda: &IntegerPartition, q: f64) -> f64 {
    lambda.cells().map(|(i, j)| q + j as f64 - i as f64).product()
}
