//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or when [`Execution::Sequential`] is requested, the same
//! closures run in order on the calling thread. Results are always collected
//! in index order, so both paths produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be distributed over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Applies `f(index, chunk)` to disjoint mutable chunks.
pub fn for_each_chunk_mut<T, F>(exec: Execution, chunks: Vec<&mut [T]>, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        chunks
            .into_par_iter()
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    for (i, c) in chunks.into_iter().enumerate() {
        f(i, c);
    }
}

/// Runs `f` inside a pool limited to `workers` threads (0 = default pool).
pub fn with_workers<R: Send, F: FnOnce() -> R + Send>(workers: usize, f: F) -> R {
    #[cfg(feature = "parallel")]
    if workers > 0 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(f);
        }
    }
    let _ = workers;
    f()
}

/// Number of worker threads that [`Execution::Parallel`] would use.
pub fn available_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let a = map_indexed(Execution::Sequential, 100, |i| i * i);
        let b = map_indexed(Execution::Parallel, 100, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn chunks_are_visited_once() {
        let mut data = vec![0usize; 12];
        let chunks: Vec<&mut [usize]> = data.chunks_mut(5).collect();
        for_each_chunk_mut(Execution::Parallel, chunks, |i, c| {
            for v in c.iter_mut() {
                *v += i + 1;
            }
        });
        assert_eq!(data, vec![1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3]);
    }
}
