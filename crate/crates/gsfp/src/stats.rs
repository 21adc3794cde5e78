//! Small statistics helpers shared by the identity checks and tests:
//! empirical pmfs, total-variation distance, Monte Carlo means with
//! standard errors, and a two-sample Kolmogorov–Smirnov test.

/// Empirical pmf of integer samples on `0..=k_max`; mass above `k_max`
/// is dropped (the callers compare on a fixed range).
pub fn empirical_pmf(samples: &[u64], k_max: usize) -> Vec<f64> {
    let mut counts = vec![0.0; k_max + 1];
    for &s in samples {
        if s <= k_max as u64 {
            counts[s as usize] += 1.0;
        }
    }
    let n = samples.len() as f64;
    counts.iter_mut().for_each(|c| *c /= n);
    counts
}

/// Total variation distance `0.5 Σ |p_k - q_k|` over the common range.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl McEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
        Self { mean, std_err: (var / n as f64).sqrt(), n }
    }

    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_err
    }
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_n(x) - G_m(x)|`.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|p, q| p.total_cmp(q));
    b.sort_by(|p, q| p.total_cmp(q));
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`
/// (Smirnov): `c(alpha) * sqrt((n+m)/(n m))` with
/// `c(alpha) = sqrt(-ln(alpha/2)/2)`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
