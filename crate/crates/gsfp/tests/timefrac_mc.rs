//! Monte Carlo tests of the time-fractional machinery: the inverse-clock
//! Laplace functional against its series, and the sampling reductions.

use gsfp::process::sample;
use gsfp::rng::master;
use gsfp::stats::{empirical_pmf, tv_distance, McEstimate};
use gsfp::subordinators::{frak_v_sample, laplace_exponent, ProcessParams};
use gsfp::timefrac::{
    inverse_clock_laplace, inverse_clock_sample, pmf_tf_auto, sample_tf, TimeFracParams,
};

#[test]
fn inverse_clock_laplace_functional_matches_series() {
    // E e^{-mu U_t} against the Mittag-Leffler series, 20k draws
    let q = TimeFracParams::new(0.6, 0.4, 0.5, 0.8).unwrap();
    let mut rng = master(31);
    let t = 1.0;
    let mu = 1.0;
    let xs: Vec<f64> = (0..20_000)
        .map(|_| (-mu * inverse_clock_sample(&q, t, 1e-3, &mut rng).unwrap()).exp())
        .collect();
    let est = McEstimate::from_samples(&xs);
    let closed = inverse_clock_laplace(&q, mu, t, 1e-12).unwrap();
    assert!(est.z_score(closed) < 4.0, "z = {} (mc {}, series {closed})", est.z_score(closed), est.mean);
}

#[test]
fn subordinator_at_inverse_clock_matches_series() {
    // E e^{-mu V(U_t)} = series at phi = laplace_exponent(mu), 20k draws
    let p = ProcessParams::new(0.3, 0.5, 1.0, 1.0).unwrap();
    let q = TimeFracParams::new(0.6, 0.4, 0.5, 0.8).unwrap();
    let mut rng = master(32);
    let (t, mu) = (1.0, 1.0);
    let xs: Vec<f64> = (0..20_000)
        .map(|_| {
            let u = inverse_clock_sample(&q, t, 1e-3, &mut rng).unwrap();
            let v = frak_v_sample(&p, u, &mut rng).unwrap();
            (-mu * v).exp()
        })
        .collect();
    let est = McEstimate::from_samples(&xs);
    let closed = inverse_clock_laplace(&q, laplace_exponent(&p, mu), t, 1e-12).unwrap();
    assert!(est.z_score(closed) < 4.0, "z = {} (mc {}, series {closed})", est.z_score(closed), est.mean);
}

#[test]
fn classical_reduction_of_time_fractional_sampler() {
    // gamma = 0, beta = 1: the time change is the identity and the law
    // collapses to the classical counting process
    let p = ProcessParams::new(0.9, 1.0, 1.0, 1.0).unwrap();
    let q = TimeFracParams::new(0.5, 1.0, 0.0, 1.0).unwrap();
    let mut rng = master(33);
    let a: Vec<u64> =
        (0..50_000).map(|_| sample_tf(&p, &q, 1.0, 1e-3, &mut rng).unwrap().value).collect();
    let b: Vec<u64> = (0..50_000).map(|_| sample(&p, 1.0, &mut rng).unwrap().value).collect();
    let emp_a = empirical_pmf(&a, 64);
    let emp_b = empirical_pmf(&b, 64);
    let tv = tv_distance(&emp_a, &emp_b);
    assert!(tv < 0.02, "TV = {tv}");
}

#[test]
fn time_fractional_sampler_matches_analytic_pmf() {
    // general parameters: empirical law against the series pmf on the
    // bulk of the mass (the acceptance suite runs the full-size version)
    let p = ProcessParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
    let q = TimeFracParams::new(0.6, 0.4, 0.5, 1.0).unwrap();
    let analytic = pmf_tf_auto(&p, &q, 1.0, 128, 1e-10).unwrap();
    let k_upper = {
        let mut cum = 0.0;
        let mut k = 128;
        for (i, &pk) in analytic.probs.iter().enumerate() {
            cum += pk;
            if cum >= 0.995 {
                k = i;
                break;
            }
        }
        k
    };
    let mut rng = master(34);
    let draws: Vec<u64> =
        (0..100_000).map(|_| sample_tf(&p, &q, 1.0, 1e-3, &mut rng).unwrap().value).collect();
    let emp = empirical_pmf(&draws, k_upper);
    let tv = tv_distance(&emp, &analytic.probs[..=k_upper]);
    assert!(tv < 0.02, "TV = {tv} on k <= {k_upper}");
}
