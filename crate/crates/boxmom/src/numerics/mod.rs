//! Small numerical kernels shared across the crate: Gauss–Legendre rules,
//! tridiagonal solves and eigendecompositions, and a plain f64 GEMM used by
//! the 2D evolution transforms.

pub mod gauss;
pub mod gemm;
pub mod tridiag;

use num_complex::Complex64;

/// Imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cesàro (Fejér) mean of the partial sums `s[0..=n]`.
///
/// `s[m]` must already be the m-th partial sum; the mean tames endpoint
/// oscillation of distributional sums.
pub fn fejer_mean(partial_sums: &[Complex64]) -> Complex64 {
    assert!(!partial_sums.is_empty());
    let sum: Complex64 = partial_sums.iter().sum();
    sum / partial_sums.len() as f64
}

/// Maps `f` over `items` on up to `threads` OS threads, returning results in
/// input order so reductions stay deterministic.
pub fn parallel_map<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let n = items.len();
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let work: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let queue = std::sync::Mutex::new(work);
    let slot_refs = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            scope.spawn(|| loop {
                let item = queue.lock().unwrap().pop();
                match item {
                    None => break,
                    Some((idx, value)) => {
                        let result = f(value);
                        slot_refs.lock().unwrap()[idx] = Some(result);
                    }
                }
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

/// Least-squares slope of log2(err) against level index; used to measure
/// convergence orders from a refinement sweep where each level halves the
/// discretization parameters.
pub fn measured_order(errors: &[f64]) -> f64 {
    assert!(errors.len() >= 2);
    let n = errors.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, e) in errors.iter().enumerate() {
        let x = i as f64;
        let y = e.max(1e-300).log2();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    -(n * sxy - sx * sy) / (n * sxx - sx * sx)
}
