//! Scalar-slot bookkeeping for solver scratch buffers.
//!
//! Solvers route every buffer whose size depends on `n` or `m` through a
//! [`MemoryMeter`], so a caller can check the memory footprint of a solve
//! without allocator hooks. Inputs and the returned solution vector are not
//! counted as workspace, with one exception: solvers that build their output
//! in a scratch buffer count it.

/// Peak workspace observed during one solve, in scalar slots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkspaceStats {
    /// Largest number of live scratch scalars at any point.
    pub peak_scalars: usize,
    /// Largest single buffer requested.
    pub largest_buffer: usize,
}

#[derive(Debug, Default)]
pub struct MemoryMeter {
    live: usize,
    stats: WorkspaceStats,
}

impl MemoryMeter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates a zeroed buffer of `len` scalars and records it.
    pub fn alloc<T: Clone>(&mut self, len: usize, fill: T) -> Vec<T> {
        self.record(len);
        vec![fill; len]
    }

    /// Records a buffer allocated elsewhere.
    pub fn record(&mut self, len: usize) {
        self.live += len;
        self.stats.peak_scalars = self.stats.peak_scalars.max(self.live);
        self.stats.largest_buffer = self.stats.largest_buffer.max(len);
    }

    pub fn release(&mut self, len: usize) {
        self.live = self.live.saturating_sub(len);
    }

    pub fn stats(&self) -> WorkspaceStats {
        self.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_peak_not_total() {
        let mut m = MemoryMeter::new();
        let a = m.alloc(10, 0.0f64);
        m.release(a.len());
        let _b = m.alloc(4, 0.0f64);
        let _c = m.alloc(3, 0.0f64);
        assert_eq!(m.stats(), WorkspaceStats { peak_scalars: 10, largest_buffer: 10 });
        m.record(20);
        assert_eq!(m.stats().peak_scalars, 27);
    }
}
