//! Data-parallel helpers; rayon when the `parallel` feature is on,
//! plain iteration otherwise.

pub fn map_seq<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_par<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    map_seq(items, f)
}

/// `map_par` or `map_seq`; output order always follows `items`.
pub fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], parallel: bool, f: F) -> Vec<R> {
    if parallel {
        map_par(items, f)
    } else {
        map_seq(items, f)
    }
}

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Runs `f` on a pool of `jobs` threads (`0` = rayon default).
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send, F: FnOnce() -> R + Send>(jobs: usize, f: F) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R: Send, F: FnOnce() -> R + Send>(_jobs: usize, f: F) -> R {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_and_seq_agree() {
        let xs: Vec<u64> = (0..200).collect();
        let sq = |x: &u64| x * x;
        assert_eq!(par_map(&xs, true, sq), par_map(&xs, false, sq));
        assert_eq!(with_jobs(2, || map_par(&xs, sq)), map_seq(&xs, sq));
    }
}
