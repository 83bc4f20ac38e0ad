//! Kernel execution model shared by the sequential and parallel backends.
//!
//! A kernel is a body invoked once per index of a range. Bodies read shared
//! immutable state and write either to their own output slot, to atomic
//! flags, or to ranges reserved through a [`ReservationCounter`]. Every
//! launch ends with a barrier: it returns only after all invocations finish.

use std::cell::UnsafeCell;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub enum Backend {
    #[default]
    Sequential,
    Parallel { workers: NonZeroUsize },
}

impl Backend {
    pub fn parallel(workers: usize) -> Self {
        Backend::Parallel {
            workers: NonZeroUsize::new(workers.max(1)).unwrap(),
        }
    }

    pub fn workers(&self) -> usize {
        match self {
            Backend::Sequential => 1,
            Backend::Parallel { workers } => workers.get(),
        }
    }
}


impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Sequential => write!(f, "seq"),
            Backend::Parallel { workers } => write!(f, "par({workers})"),
        }
    }
}

/// Indices handed out per grab in the parallel backend.
fn chunk_size(len: usize, workers: usize) -> usize {
    (len / (workers * 16)).clamp(64, 1 << 16)
}

/// Runs `body(i)` exactly once for every `i` in `0..len`.
///
/// Errors are collected from all invocations and reported after the barrier;
/// the lowest failing index is reported as the representative error.
pub fn for_each_index<F>(backend: Backend, len: usize, body: F) -> Result<()>
where
    F: Fn(usize) -> Result<()> + Sync,
{
    let mut failures: Vec<(usize, Error)> = Vec::new();
    match backend {
        Backend::Sequential => {
            for i in 0..len {
                if let Err(e) = body(i) {
                    failures.push((i, e));
                }
            }
        }
        Backend::Parallel { workers } => {
            let workers = workers.get();
            let chunk = chunk_size(len, workers);
            let next = AtomicUsize::new(0);
            let sink = Mutex::new(Vec::new());
            std::thread::scope(|s| {
                for _ in 0..workers {
                    s.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let start = next.fetch_add(chunk, Ordering::Relaxed);
                            if start >= len {
                                break;
                            }
                            for i in start..(start + chunk).min(len) {
                                if let Err(e) = body(i) {
                                    local.push((i, e));
                                }
                            }
                        }
                        if !local.is_empty() {
                            sink.lock().unwrap().extend(local);
                        }
                    });
                }
            });
            failures = sink.into_inner().unwrap();
        }
    }
    if failures.is_empty() {
        return Ok(());
    }
    let count = failures.len();
    let (_, first) = failures
        .into_iter()
        .min_by_key(|(i, _)| *i)
        .expect("non-empty");
    if count == 1 {
        Err(first)
    } else {
        Err(Error::Kernel {
            count,
            first: Box::new(first),
        })
    }
}

/// Element-wise map: `out[i] = body(i)`, one invocation per slot.
pub fn fill_indexed<T, F>(backend: Backend, out: &mut [T], body: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    match backend {
        Backend::Sequential => {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = body(i);
            }
        }
        Backend::Parallel { workers } => {
            let per = out.len().div_ceil(workers.get()).max(1);
            std::thread::scope(|s| {
                for (c, part) in out.chunks_mut(per).enumerate() {
                    let body = &body;
                    s.spawn(move || {
                        let base = c * per;
                        for (i, slot) in part.iter_mut().enumerate() {
                            *slot = body(base + i);
                        }
                    });
                }
            });
        }
    }
}

/// Atomic fetch-add counter used to reserve disjoint output ranges.
#[derive(Debug, Default)]
pub struct ReservationCounter(AtomicUsize);

impl ReservationCounter {
    pub fn new(start: usize) -> Self {
        ReservationCounter(AtomicUsize::new(start))
    }

    /// Advances the counter by `n` and returns the value before the addition.
    pub fn reserve(&self, n: usize) -> Result<usize> {
        self.0
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |v| v.checked_add(n))
            .map_err(|_| Error::CounterOverflow)
    }

    /// Like [`reserve`](Self::reserve), but leaves the counter unchanged
    /// and returns `None` when the new value would exceed `limit`.
    pub fn reserve_within(&self, n: usize, limit: usize) -> Result<Option<usize>> {
        let mut overflow = false;
        let r = self.0.fetch_update(Ordering::AcqRel, Ordering::Acquire, |v| {
            let end = v.checked_add(n);
            overflow = end.is_none();
            end.filter(|&e| e <= limit)
        });
        match r {
            Ok(v) => Ok(Some(v)),
            Err(_) if overflow => Err(Error::CounterOverflow),
            Err(_) => Ok(None),
        }
    }

    pub fn value(&self) -> usize {
        self.0.load(Ordering::Acquire)
    }
}

/// Fixed-capacity buffer filled through non-overlapping reservations.
///
/// Each call to [`reserve`](Self::reserve) hands out a fresh range, so the
/// returned mutable slices never alias even when taken from `&self` on
/// several threads at once.
pub struct ReservedBuffer<T> {
    slots: Box<[UnsafeCell<T>]>,
    cursor: ReservationCounter,
}

// Safety: slots are only reachable through ranges handed out once by the
// atomic cursor, so no two threads ever touch the same slot.
unsafe impl<T: Send> Sync for ReservedBuffer<T> {}

impl<T: Copy + Default> ReservedBuffer<T> {
    pub fn with_capacity(capacity: usize) -> Self {
        ReservedBuffer {
            slots: (0..capacity).map(|_| UnsafeCell::new(T::default())).collect(),
            cursor: ReservationCounter::new(0),
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.cursor.value()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reserves `n` consecutive slots and returns their offset and storage.
    #[allow(clippy::mut_from_ref)]
    pub fn reserve(&self, n: usize) -> Result<(usize, &mut [T])> {
        let capacity = self.slots.len();
        let Some(offset) = self.cursor.reserve_within(n, capacity)? else {
            return Err(Error::CapacityExhausted {
                offset: self.cursor.value(),
                requested: n,
                capacity,
            });
        };
        if n == 0 {
            return Ok((offset, &mut []));
        }
        // Safety: [offset, offset + n) was handed out by the cursor exactly once and
        // lies within the allocation; UnsafeCell<T> has the layout of T.
        let slice = unsafe {
            let first = UnsafeCell::raw_get(self.slots.as_ptr().add(offset));
            std::slice::from_raw_parts_mut(first, n)
        };
        Ok((offset, slice))
    }

    pub fn into_vec(self) -> Vec<T> {
        let len = self.len();
        let mut v: Vec<T> = self.slots.into_vec().into_iter().map(UnsafeCell::into_inner).collect();
        v.truncate(len);
        v
    }
}

/// Boolean flags that kernels may set concurrently.
#[derive(Default)]
pub struct AtomicFlags(Vec<AtomicBool>);

impl AtomicFlags {
    pub fn new(len: usize) -> Self {
        AtomicFlags((0..len).map(|_| AtomicBool::new(false)).collect())
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i].load(Ordering::Relaxed)
    }

    #[inline]
    pub fn set(&self, i: usize, value: bool) {
        self.0[i].store(value, Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|f| f.load(Ordering::Relaxed)).count()
    }

    pub fn to_vec(&self) -> Vec<bool> {
        self.0.iter().map(|f| f.load(Ordering::Relaxed)).collect()
    }
}

impl From<Vec<bool>> for AtomicFlags {
    fn from(v: Vec<bool>) -> Self {
        AtomicFlags(v.into_iter().map(AtomicBool::new).collect())
    }
}

impl Clone for AtomicFlags {
    fn clone(&self) -> Self {
        AtomicFlags::from(self.to_vec())
    }
}

impl PartialEq for AtomicFlags {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && (0..self.len()).all(|i| self.get(i) == other.get(i))
    }
}

impl Eq for AtomicFlags {}

impl fmt::Debug for AtomicFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|b| b.load(Ordering::Relaxed))).finish()
    }
}
