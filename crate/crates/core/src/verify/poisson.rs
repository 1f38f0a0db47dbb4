/// `P(N = k)` for `N ~ Poisson(mean)`, computed in log space.
pub fn poisson_pmf(mean: f64, k: usize) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (-mean + k as f64 * mean.ln() - ln_fact).exp()
}

/// Smallest `n` with `P(N > n) < epsilon` for `N ~ Poisson(rate * horizon)`.
///
/// The pmf is summed from the far tail inwards, so small tail masses are
/// not lost to cancellation against 1.
pub fn poisson_step_bound(rate: f64, horizon: f64, epsilon: f64) -> usize {
    let mean = rate * horizon;
    if epsilon >= 1.0 || mean <= 0.0 {
        return 0;
    }
    // far enough that the remaining tail is far below any useful epsilon
    let far = (mean + 40.0 * mean.sqrt() + 60.0 + (-epsilon.ln()).max(0.0) * 2.0).ceil() as usize;
    let mut log_p = Vec::with_capacity(far + 1);
    let mut acc = -mean;
    log_p.push(acc);
    let ln_mean = mean.ln();
    for k in 1..=far {
        acc += ln_mean - (k as f64).ln();
        log_p.push(acc);
    }
    // tail[n] = P(N > n)
    let mut tail = vec![0.0; far + 1];
    for n in (0..far).rev() {
        tail[n] = tail[n + 1] + log_p[n + 1].exp();
    }
    (0..=far).find(|&n| tail[n] < epsilon).unwrap_or(far)
}
