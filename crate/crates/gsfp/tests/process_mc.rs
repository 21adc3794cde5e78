//! Monte Carlo tests of the counting process: sampler law against the
//! analytic state probabilities, the subordination identity, and the
//! independent-increments property.

use gsfp::process::{pmf_oracle, sample, subordination_identity_check};
use gsfp::rng::master;
use gsfp::stats::{empirical_pmf, ks_critical, ks_two_sample, tv_distance};
use gsfp::subordinators::ProcessParams;

#[test]
fn poisson_reduction_in_law() {
    // deterministic clock: the counting process is plain Poisson
    let params = ProcessParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut rng = master(21);
    let draws: Vec<u64> = (0..100_000).map(|_| sample(&params, 1.0, &mut rng).unwrap().value).collect();
    let emp = empirical_pmf(&draws, 12);
    let mut poisson = vec![(-1.0f64).exp(); 13];
    for k in 1..=12 {
        poisson[k] = poisson[k - 1] / k as f64;
    }
    let tv = tv_distance(&emp, &poisson);
    assert!(tv < 0.01, "TV = {tv}");
}

#[test]
fn sampler_matches_analytic_pmf() {
    // space-fractional member, moderate tail
    let params = ProcessParams::new(0.9, 1.0, 1.0, 1.0).unwrap();
    let analytic = pmf_oracle(&params, 1.0, 256).unwrap();
    let mut rng = master(22);
    let draws: Vec<u64> = (0..200_000).map(|_| sample(&params, 1.0, &mut rng).unwrap().value).collect();
    let k_upper = {
        let mut cum = 0.0;
        let mut k = 256;
        for (i, &p) in analytic.probs.iter().enumerate() {
            cum += p;
            if cum >= 0.999 {
                k = i;
                break;
            }
        }
        k
    };
    let emp = empirical_pmf(&draws, k_upper);
    let tv = tv_distance(&emp, &analytic.probs[..=k_upper]);
    assert!(tv < 0.015, "TV = {tv} on k <= {k_upper}");
}

#[test]
fn subordination_identity_small() {
    // quick version of the identity check (the full-size one runs in the
    // acceptance suite)
    let mut rng = master(23);
    let report = subordination_identity_check(0.5, 0.5, 1.0, 1.0, 100_000, 0.03, &mut rng).unwrap();
    assert!(report.pass, "TV = {} on k <= {}", report.tv, report.k_upper);

    // gamma = 1 is a deterministic outer clock: identical processes
    let report = subordination_identity_check(0.5, 1.0, 1.0, 1.0, 100_000, 0.03, &mut rng).unwrap();
    assert!(report.pass, "TV = {}", report.tv);
}

#[test]
fn increments_are_stationary_and_independent() {
    // N over [0, 2t] equals in law the sum of two independent copies over
    // [0, t] (Lévy property of the time-changed process)
    let params = ProcessParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
    let mut rng = master(24);
    let direct: Vec<f64> =
        (0..50_000).map(|_| sample(&params, 2.0, &mut rng).unwrap().value as f64).collect();
    let summed: Vec<f64> = (0..50_000)
        .map(|_| {
            (sample(&params, 1.0, &mut rng).unwrap().value
                + sample(&params, 1.0, &mut rng).unwrap().value) as f64
        })
        .collect();
    let d = ks_two_sample(&direct, &summed);
    assert!(d < ks_critical(50_000, 50_000, 0.01), "KS = {d}");
}
