//! Execution policy for data-parallel loops.
//!
//! With the `parallel` feature disabled every policy runs sequentially, so
//! callers never need their own `cfg` switches. Reductions split the input
//! into fixed-size chunks and combine chunk sums in index order, which makes
//! results bitwise identical between the two policies.

/// Chunk length used by ordered reductions.
pub const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Applies `f` to each index in `0..n`, keeping the output order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Applies `f` to each item, keeping the output order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// `Σ f(x)` over `data`, summed per chunk and combined in order.
    pub fn sum<F>(self, data: &[f64], f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let chunk_sum = |c: &[f64]| c.iter().map(|&x| f(x)).sum::<f64>();
        #[cfg(feature = "parallel")]
        if self.is_parallel() && data.len() > CHUNK {
            use rayon::prelude::*;
            let parts: Vec<f64> = data.par_chunks(CHUNK).map(chunk_sum).collect();
            return parts.iter().sum();
        }
        data.chunks(CHUNK).map(chunk_sum).sum()
    }

    /// Element-wise sum of fixed-length vectors `f(x)` over `data`, chunked like [`Exec::sum`].
    pub fn sum_vec<const N: usize, F>(self, data: &[f64], f: F) -> [f64; N]
    where
        F: Fn(f64) -> [f64; N] + Sync + Send,
    {
        let add = |mut acc: [f64; N], v: [f64; N]| {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
            acc
        };
        let chunk_sum = |c: &[f64]| c.iter().map(|&x| f(x)).fold([0.0; N], add);
        #[cfg(feature = "parallel")]
        if self.is_parallel() && data.len() > CHUNK {
            use rayon::prelude::*;
            let parts: Vec<[f64; N]> = data.par_chunks(CHUNK).map(chunk_sum).collect();
            return parts.into_iter().fold([0.0; N], add);
        }
        data.chunks(CHUNK).map(chunk_sum).fold([0.0; N], add)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_bitwise() {
        let data: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.37).sin() + 1.5).collect();
        let a = Exec::Sequential.sum(&data, f64::ln);
        let b = Exec::Parallel.sum(&data, f64::ln);
        assert_eq!(a.to_bits(), b.to_bits());
        let va = Exec::Sequential.sum_vec(&data, |x| [x, x * x]);
        let vb = Exec::Parallel.sum_vec(&data, |x| [x, x * x]);
        assert_eq!(va, vb);
        let ma = Exec::Sequential.map_range(100, |i| i * i);
        let mb = Exec::Parallel.map_range(100, |i| i * i);
        assert_eq!(ma, mb);
    }
}
