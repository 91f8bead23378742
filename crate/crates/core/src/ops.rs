use std::cell::Cell;

/// Counts complex multiply-add operations performed by the numerical kernels.
///
/// A counter is owned by a single trial and threaded through calls by
/// reference; it is deliberately not `Sync`.
#[derive(Debug, Default)]
pub struct OpCounter {
    count: Cell<u64>,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&self, n: u64) {
        self.count.set(self.count.get().saturating_add(n));
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.count.get()
    }

    pub fn reset(&self) {
        self.count.set(0);
    }
}
