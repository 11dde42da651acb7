//! Row-sweep contraction of a rectangular network, shared by the complex
//! amplitude of a lattice state and the real replica network.
//!
//! The boundary vector is indexed `[u_0 … u_{c-1}, h, v_c … v_{cols-1}]`
//! (row-major, last index fastest): finished up-legs of the current row,
//! the open horizontal bond, and the down-legs still waiting for a site.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

/// Absorbs one site. `site` is a row-major `(h_in·v_in) x (u_out·r_out)`
/// matrix, rows `(h, v)` and columns `(u, r)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn zipper_step<T>(
    boundary: &[T],
    prefix: usize,
    h_in: usize,
    v_in: usize,
    suffix: usize,
    site: &[T],
    u_out: usize,
    r_out: usize,
) -> Vec<T>
where
    T: Copy + Default + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    debug_assert_eq!(boundary.len(), prefix * h_in * v_in * suffix);
    debug_assert_eq!(site.len(), h_in * v_in * u_out * r_out);
    let zero = T::default();
    let cols = u_out * r_out;
    let mut out = vec![zero; prefix * cols * suffix];
    for p in 0..prefix {
        for row in 0..h_in * v_in {
            let src = &boundary[(p * h_in * v_in + row) * suffix..][..suffix];
            for col in 0..cols {
                let w = site[row * cols + col];
                if w == zero {
                    continue;
                }
                let dst = &mut out[(p * cols + col) * suffix..][..suffix];
                for (o, &b) in dst.iter_mut().zip(src) {
                    *o = *o + w * b;
                }
            }
        }
    }
    out
}
