//! Lock-free shared state for parallel training.
//!
//! Dictionary entries and their squared-gradient sums are shared by all
//! workers through relaxed atomic loads and stores of the f64 bit patterns.
//! The read-modify-write sequences are not atomic as a whole, so concurrent
//! updates may overwrite each other; those lost updates are the accepted
//! cost of running without locks, and the races stay free of undefined
//! behavior because every access goes through an atomic.
//!
//! Code rows and their accumulators are partitioned by word: the epoch
//! queue hands each word to exactly one worker, so row access is exclusive
//! even though the borrow checker cannot see it.

use std::sync::atomic::{AtomicU64, Ordering};

/// View of a `&mut [f64]` as relaxed-atomic u64 bit patterns.
pub(crate) struct AtomicF64Slice<'a> {
    cells: &'a [AtomicU64],
}

impl<'a> AtomicF64Slice<'a> {
    pub(crate) fn new(data: &'a mut [f64]) -> Self {
        // f64 and AtomicU64 share size and alignment; the exclusive borrow
        // guarantees nobody observes the slice as plain f64 while the view
        // is alive.
        let cells = unsafe {
            std::slice::from_raw_parts(data.as_ptr() as *const AtomicU64, data.len())
        };
        AtomicF64Slice { cells }
    }

    #[inline]
    pub(crate) fn load(&self, i: usize) -> f64 {
        f64::from_bits(self.cells[i].load(Ordering::Relaxed))
    }

    /// Lock-free add via a CAS loop; unlike a load/store pair this never
    /// loses increments, which keeps the AdaGrad accumulators exact.
    #[inline]
    pub(crate) fn add(&self, i: usize, delta: f64) -> f64 {
        let mut current = self.cells[i].load(Ordering::Relaxed);
        loop {
            let next = (f64::from_bits(current) + delta).to_bits();
            match self.cells[i].compare_exchange_weak(
                current,
                next,
                Ordering::Relaxed,
                Ordering::Relaxed,
            ) {
                Ok(_) => return f64::from_bits(next),
                Err(actual) => current = actual,
            }
        }
    }
}

/// Row-major grid handing out `&mut` rows to workers that are known to
/// touch disjoint row indices.
pub(crate) struct RowPartitioned<T> {
    ptr: *mut T,
    row_len: usize,
    rows: usize,
}

unsafe impl<T: Send> Send for RowPartitioned<T> {}
unsafe impl<T: Send> Sync for RowPartitioned<T> {}

impl<T> RowPartitioned<T> {
    pub(crate) fn new(data: &mut [T], row_len: usize) -> Self {
        assert_eq!(data.len() % row_len, 0);
        RowPartitioned {
            ptr: data.as_mut_ptr(),
            row_len,
            rows: data.len() / row_len,
        }
    }

    /// Safety: no two live calls may use the same `row` index.
    #[inline]
    pub(crate) unsafe fn row_mut(&self, row: usize) -> &mut [T] {
        debug_assert!(row < self.rows);
        std::slice::from_raw_parts_mut(self.ptr.add(row * self.row_len), self.row_len)
    }
}
