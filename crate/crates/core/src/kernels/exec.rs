use std::ops::Range;

use thiserror::Error;

/// Vectors shorter than this run on the calling thread even when a pool is
/// available. Results do not depend on it.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
const MIN_PARALLEL_LEN: usize = 2048;

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("thread count must be at least 1")]
    ZeroThreads,
    #[error("partition count must be at least 1")]
    ZeroPartitions,
    #[cfg(feature = "parallel")]
    #[error("failed to build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Execution context for the kernels: a thread count and the number of
/// reduction partitions.
///
/// Row-wise kernels give bitwise identical results for any thread count.
/// Reductions split the index range into `partitions` contiguous blocks,
/// accumulate each block left to right and combine the partial results in
/// ascending block order, so they are reproducible for a fixed partition
/// count regardless of threads. `partitions` defaults to the thread count.
///
/// Without the `parallel` feature every kernel runs on the calling thread;
/// the partition count still shapes reductions in the same way.
#[derive(Clone, Debug)]
pub struct Exec {
    threads: usize,
    partitions: usize,
    #[cfg(feature = "parallel")]
    pool: Option<std::sync::Arc<rayon::ThreadPool>>,
}

impl Default for Exec {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Exec {
    pub fn sequential() -> Self {
        Self {
            threads: 1,
            partitions: 1,
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    pub fn new(threads: usize) -> Result<Self, ExecError> {
        if threads == 0 {
            return Err(ExecError::ZeroThreads);
        }
        #[cfg(feature = "parallel")]
        let pool = if threads > 1 {
            let p = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
            Some(std::sync::Arc::new(p))
        } else {
            None
        };
        Ok(Self {
            threads,
            partitions: threads,
            #[cfg(feature = "parallel")]
            pool,
        })
    }

    pub fn with_partitions(mut self, partitions: usize) -> Result<Self, ExecError> {
        if partitions == 0 {
            return Err(ExecError::ZeroPartitions);
        }
        self.partitions = partitions;
        Ok(self)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    /// Block `k` of `n` items split into `parts` contiguous blocks.
    pub(crate) fn block(n: usize, parts: usize, k: usize) -> Range<usize> {
        let size = n.div_ceil(parts.max(1)).max(1);
        (k * size).min(n)..((k + 1) * size).min(n)
    }

    /// Calls `f(offset, chunk)` on contiguous chunks of `out`, one per thread.
    pub(crate) fn for_each_block<E, F>(&self, out: &mut [E], f: F)
    where
        E: Send,
        F: Fn(usize, &mut [E]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = self.pool.as_ref().filter(|_| out.len() >= MIN_PARALLEL_LEN) {
            use rayon::prelude::*;
            let size = out.len().div_ceil(self.threads);
            pool.install(|| out.par_chunks_mut(size).enumerate().for_each(|(k, chunk)| f(k * size, chunk)));
            return;
        }
        f(0, out)
    }

    /// Evaluates `f` on each of the `partitions` blocks of `0..n`, returning
    /// the results in block order.
    pub(crate) fn map_partitions<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(Range<usize>) -> R + Sync + Send,
    {
        let parts = self.partitions;
        #[cfg(feature = "parallel")]
        if let Some(pool) = self.pool.as_ref().filter(|_| n >= MIN_PARALLEL_LEN && parts > 1) {
            use rayon::prelude::*;
            return pool.install(|| (0..parts).into_par_iter().map(|k| f(Self::block(n, parts, k))).collect());
        }
        (0..parts).map(|k| f(Self::block(n, parts, k))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_the_range_in_order() {
        for (n, p) in [(10, 3), (3, 8), (0, 2), (4096, 4)] {
            let blocks: Vec<_> = (0..p).map(|k| Exec::block(n, p, k)).collect();
            assert_eq!(blocks[0].start, 0);
            assert_eq!(blocks[p - 1].end, n);
            assert!(blocks.windows(2).all(|w| w[0].end == w[1].start));
        }
    }

    #[test]
    fn rejects_zero_counts() {
        assert!(Exec::new(0).is_err());
        assert!(Exec::sequential().with_partitions(0).is_err());
        assert_eq!(Exec::new(3).unwrap().partitions(), 3);
    }
}
