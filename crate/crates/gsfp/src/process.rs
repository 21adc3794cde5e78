//! The generalized space-fractional Poisson counting process: a
//! homogeneous Poisson process of rate `λ` run on the subordinated clock
//! of [`crate::subordinators`], with probability generating function
//! `G(u,t) = exp(-t[(η + λ^ν (1-u)^ν)^δ - η^δ])`.
//!
//! State probabilities come from two independent routes: the analytic
//! double series (outer sum over powers of `λ^ν/η`, inner generalized
//! Wright function) and a Fourier coefficient oracle that inverts the
//! generating function on a circle. The series alternates with terms that
//! can dwarf the result, so it self-reports non-convergence — both when
//! the truncation rule fails and when cancellation would eat the digits
//! the caller asked for — and the oracle is the fallback.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::specfun::{falling_factorial, ln_abs_gamma, wright_psi11_log, Truncation, WrightArgs};
use crate::subordinators::{frak_v_sample, laplace_exponent, stable_sample, ProcessParams};
use crate::sum::{Accumulator, Dd};

/// How a [`Pmf`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfMethod {
    Series,
    Oracle,
    MonteCarlo,
}

impl PmfMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PmfMethod::Series => "series",
            PmfMethod::Oracle => "oracle",
            PmfMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// Truncated state-probability vector `p_0..p_K` with normalization
/// metadata: `est_tail` is the mass beyond `k_max` (the total mass is 1,
/// so it is `1 - Σ probs` for the analytic methods).
#[derive(Debug, Clone)]
pub struct Pmf {
    pub t: f64,
    pub params: ProcessParams,
    pub probs: Vec<f64>,
    pub k_max: usize,
    pub est_tail: f64,
    pub method: PmfMethod,
}

/// One draw of the counting process together with the subordinator value
/// that drove it.
#[derive(Debug, Clone, Copy)]
pub struct CountSample {
    pub t: f64,
    pub value: u64,
    pub clock_value: f64,
}

/// Space part of the exponent: `(η + λ^ν (1-u)^ν)^δ - η^δ`.
pub(crate) fn space_exponent(params: &ProcessParams, u: f64) -> f64 {
    laplace_exponent(params, params.lambda() * (1.0 - u))
}

/// Probability generating function `G(u,t) = Σ_k u^k p_k(t)`.
///
/// `G(1,t) = 1`, `G(u,0) = 1`, and `G` is decreasing in `t` for
/// `u ∈ [0,1)`.
pub fn pgf(params: &ProcessParams, u: f64, t: f64) -> f64 {
    (-t * space_exponent(params, u)).exp()
}

/// `G` at complex `u` via principal-branch powers; well-defined on
/// `|u| < 1` where `Re(1-u) > 0`.
pub(crate) fn pgf_complex(params: &ProcessParams, u: Complex64, t: f64) -> Complex64 {
    let w = (Complex64::new(1.0, 0.0) - u) * params.lambda();
    let inner = w.powf(params.nu()) + params.eta();
    let phi = inner.powf(params.delta()) - params.eta().powf(params.delta());
    (-phi * t).exp()
}

/// Caps the magnitude of individual series terms relative to what `f64`
/// term evaluation (log-gamma based, ~1e-13 relative) can support while
/// keeping the absolute error of the alternating sum near 1e-9.
const MAX_TERM_MAGNITUDE: f64 = 1e4;
/// Outer-sum cap for the state-probability series; divergent parameter
/// regions are detected long before this by the growth guard.
const MAX_OUTER_TERMS: usize = 4000;
/// Consecutive growing terms after which the outer sum is declared
/// divergent.
const MAX_GROWTH_RUN: usize = 48;

fn delta_pmf(params: &ProcessParams, t: f64, k_max: usize, method: PmfMethod) -> Pmf {
    let mut probs = vec![0.0; k_max + 1];
    probs[0] = 1.0;
    Pmf { t, params: *params, probs, k_max, est_tail: 0.0, method }
}

/// State probabilities `p_k(t)`, `k = 0..k_max`, by the analytic double
/// series
/// `p_k = e^{tη^δ} (-1)^k/k! Σ_m Γ(νm+1)/(m! Γ(νm-k+1)) (λ^ν/η)^m ψ(m)`
/// with `ψ(m) = 1ψ1[(1,δ); (1-m,δ) | -η^δ t]`.
///
/// The double series converges absolutely for `λ^ν < η` and for integer
/// `δ`; elsewhere it is divergent or too ill-conditioned for `f64` and
/// this function reports [`Error::NonConvergence`] so callers can fall
/// back to [`pmf_oracle`].
pub fn pmf_series(params: &ProcessParams, t: f64, k_max: usize, tol: f64) -> Result<Pmf> {
    validate_t_tol(t, tol)?;
    if t == 0.0 {
        return Ok(delta_pmf(params, t, k_max, PmfMethod::Series));
    }
    let nu = params.nu();
    let delta = params.delta();
    let eta = params.eta();
    let lambda = params.lambda();
    let eta_d = eta.powf(delta);
    let z = -t * eta_d;
    let ln_ratio = nu * lambda.ln() - eta.ln();
    // the inner Wright values cannot be certified below the f64 noise
    // floor, so their tolerance request bottoms out there
    let inner_tol = (tol * 1e-2).max(1e-13);

    // psi(m) in (ln|psi|, sign) form, cached across k.
    let mut psi: Vec<(f64, f64)> = Vec::new();
    let mut ln_mfact: Vec<f64> = vec![0.0];

    let mut probs = vec![0.0; k_max + 1];
    for (k, slot) in probs.iter_mut().enumerate() {
        let sign_pref = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (ln_kfact, _) = ln_abs_gamma(k as f64 + 1.0);
        let ln_pref = t * eta_d - ln_kfact;

        let mut acc = Dd::ZERO;
        let mut rule = Truncation::new(tol);
        let mut max_mag = 0.0f64;
        let mut growth_run = 0usize;
        let mut prev_mag = f64::INFINITY;
        let mut converged = false;
        for m in 0..MAX_OUTER_TERMS {
            if psi.len() <= m {
                let args =
                    WrightArgs { a: 1.0, a_inc: delta, b: 1.0 - m as f64, b_inc: delta, z };
                psi.push(wright_psi11_log(&args, inner_tol)?);
                if m > 0 {
                    let prev = ln_mfact[m - 1];
                    ln_mfact.push(prev + (m as f64).ln());
                }
            }
            let (psi_ln, psi_sign) = psi[m];
            // Γ(νm+1)/Γ(νm-k+1) as an exact falling-factorial product.
            let ff = falling_factorial(nu, m, k);
            let scale_ln = m as f64 * ln_ratio - ln_mfact[m] + psi_ln + ln_pref;
            if scale_ln > 690.0 {
                return Err(Error::NonConvergence(format!(
                    "state-probability series term overflow at k={k}, m={m}"
                )));
            }
            let term = sign_pref * psi_sign * ff * scale_ln.exp();
            if !term.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "state-probability series produced a non-finite term at k={k}, m={m}"
                )));
            }
            let mag = term.abs();
            max_mag = max_mag.max(mag);
            if mag > 0.0 {
                // structural zeros are skipped by the growth detector
                if mag > prev_mag && m > 8 {
                    growth_run += 1;
                    if growth_run > MAX_GROWTH_RUN {
                        return Err(Error::NonConvergence(format!(
                            "state-probability series diverges at k={k} (terms growing past m={m})"
                        )));
                    }
                } else {
                    growth_run = 0;
                }
                prev_mag = mag;
            }
            acc = acc.add(Dd::from_f64(term));
            if rule.done(term, acc.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(format!(
                "state-probability series at k={k} hit the {MAX_OUTER_TERMS}-term cap"
            )));
        }
        if max_mag > MAX_TERM_MAGNITUDE {
            return Err(Error::NonConvergence(format!(
                "state-probability series at k={k} is too ill-conditioned (peak term {max_mag:.2e})"
            )));
        }
        *slot = accept_prob(acc.to_f64(), |msg| Error::NonConvergence(msg))?;
    }

    let est_tail = tail_mass_of(&probs);
    Ok(Pmf { t, params: *params, probs, k_max, est_tail, method: PmfMethod::Series })
}

/// The space-fractional (`δ = 1`) state probabilities by their own single
/// series `p_k = (-1)^k/k! Σ_r (-λ^α t)^r/r! Γ(αr+1)/Γ(αr+1-k)`.
///
/// `alpha = 1` reduces to the Poisson pmf. The series converges for all
/// parameters; the ill-conditioning gate still applies for large
/// `λ^α t` and `k`.
pub fn pmf_space_fractional(
    alpha: f64,
    lambda: f64,
    t: f64,
    k_max: usize,
    tol: f64,
) -> Result<Pmf> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParam(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParam(format!("lambda must be positive, got {lambda}")));
    }
    validate_t_tol(t, tol)?;
    // Equivalent process parameters (eta is irrelevant at delta = 1).
    let params = ProcessParams::new(alpha, 1.0, 1.0, lambda)?;
    if t == 0.0 {
        return Ok(delta_pmf(&params, t, k_max, PmfMethod::Series));
    }
    let c = lambda.powf(alpha) * t;
    let ln_c = c.ln();

    let mut probs = vec![0.0; k_max + 1];
    for (k, slot) in probs.iter_mut().enumerate() {
        let sign_pref = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (ln_kfact, _) = ln_abs_gamma(k as f64 + 1.0);
        let mut acc = Dd::ZERO;
        let mut rule = Truncation::new(tol);
        let mut max_mag = 0.0f64;
        let mut ln_rfact = 0.0f64;
        let mut converged = false;
        for r in 0..crate::specfun::MAX_SERIES_TERMS {
            let ff = falling_factorial(alpha, r, k);
            let sign_r = if r % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign_pref * sign_r * ff * (r as f64 * ln_c - ln_rfact - ln_kfact).exp();
            if !term.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "space-fractional series produced a non-finite term at k={k}, r={r}"
                )));
            }
            let mag = term.abs();
            max_mag = max_mag.max(mag);
            acc = acc.add(Dd::from_f64(term));
            if rule.done(term, acc.abs()) {
                converged = true;
                break;
            }
            ln_rfact += (r as f64 + 1.0).ln();
        }
        if !converged {
            return Err(Error::NonConvergence(format!(
                "space-fractional series at k={k} hit the term cap"
            )));
        }
        if max_mag > MAX_TERM_MAGNITUDE {
            return Err(Error::NonConvergence(format!(
                "space-fractional series at k={k} is too ill-conditioned (peak term {max_mag:.2e})"
            )));
        }
        *slot = accept_prob(acc.to_f64(), |msg| Error::NonConvergence(msg))?;
    }

    let est_tail = tail_mass_of(&probs);
    Ok(Pmf { t, params, probs, k_max, est_tail, method: PmfMethod::Series })
}

/// Independent oracle: `p_k` as the `k`-th Taylor coefficient of
/// `G(·, t)` at 0, extracted by discrete Fourier inversion on the circle
/// `|u| = ρ`.
///
/// The radius grows towards 1 with `k_max`, keeping the `ρ^{-k}`
/// amplification of rounding noise bounded near `e^6`; the grid size
/// keeps aliasing (`ρ^M`) far below the reported residuals.
pub fn pmf_oracle(params: &ProcessParams, t: f64, k_max: usize) -> Result<Pmf> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParam(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(delta_pmf(params, t, k_max, PmfMethod::Oracle));
    }
    let (probs, max_im) =
        circle_coefficients(|u| pgf_complex(params, u, t), k_max, Error::OracleInstability)?;
    if max_im > 1e-10 {
        return Err(Error::OracleInstability(format!(
            "residual imaginary part {max_im:.3e} above 1e-10"
        )));
    }
    let est_tail = tail_mass_of(&probs);
    Ok(Pmf { t, params: *params, probs, k_max, est_tail, method: PmfMethod::Oracle })
}

/// Attempts the analytic series and falls back to the Fourier oracle on
/// [`Error::NonConvergence`], tagging the result accordingly.
pub fn pmf_auto(params: &ProcessParams, t: f64, k_max: usize, tol: f64) -> Result<Pmf> {
    match pmf_series(params, t, k_max, tol) {
        Ok(pmf) => Ok(pmf),
        Err(Error::NonConvergence(_)) => pmf_oracle(params, t, k_max),
        Err(e) => Err(e),
    }
}

/// Shared Fourier-inversion helper: coefficients of `g` (a generating
/// function with real, nonnegative coefficients summing to at most 1)
/// from values on the circle `|u| = ρ`. Returns the clipped coefficients
/// and the largest residual imaginary part, both in coefficient scale.
pub(crate) fn circle_coefficients<F, E>(
    g: F,
    k_max: usize,
    err: E,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(Complex64) -> Complex64,
    E: Fn(String) -> Error,
{
    let m = (4 * (k_max + 1)).max(256);
    let rho: f64 = (-6.0 / (k_max.max(1) as f64)).exp().max(0.5);
    let vals: Vec<Complex64> = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            g(Complex64::from_polar(rho, theta))
        })
        .collect();
    for (j, v) in vals.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(err(format!("generating function non-finite at grid point {j}")));
        }
    }

    let mut probs = vec![0.0; k_max + 1];
    let mut max_im = 0.0f64;
    let mut rho_out = 1.0f64;
    for (k, slot) in probs.iter_mut().enumerate() {
        let mut re = Accumulator::new();
        let mut im = Accumulator::new();
        for (j, v) in vals.iter().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (j * k % m) as f64 / m as f64;
            let w = Complex64::from_polar(1.0, theta);
            let p = v * w;
            re.add(p.re);
            im.add(p.im);
        }
        let coeff = re.value() / m as f64 / rho_out;
        let resid = (im.value() / m as f64 / rho_out).abs();
        max_im = max_im.max(resid);
        *slot = accept_prob(coeff, &err)?;
        rho_out *= rho;
    }
    Ok((probs, max_im))
}

/// Validates a computed probability: clips rounding-level negatives to 0
/// and rejects anything materially outside `[0, 1]`.
fn accept_prob<E: Fn(String) -> Error>(v: f64, err: E) -> Result<f64> {
    if !v.is_finite() {
        return Err(err("non-finite state probability".to_string()));
    }
    if v < -1e-8 || v > 1.0 + 1e-8 {
        return Err(err(format!("state probability {v:.3e} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Mass beyond the truncation index: `1 - Σ probs` (the analytic total
/// mass is 1).
pub(crate) fn tail_mass_of(probs: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &p in probs {
        acc.add(p);
    }
    1.0 - acc.value()
}

fn validate_t_tol(t: f64, tol: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParam(format!("t must be >= 0 and finite, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

/// One Poisson draw with `u64` output; extreme rates (far beyond any
/// resolvable state index) switch to the normal approximation and
/// saturate.
pub(crate) fn poisson_u64<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    if !rate.is_finite() {
        return u64::MAX;
    }
    if rate < 1e12 {
        let d = rand_distr::Poisson::new(rate).expect("positive finite rate");
        let x: f64 = d.sample(rng);
        x as u64
    } else {
        let z: f64 = rand_distr::StandardNormal.sample(rng);
        (rate + z * rate.sqrt()).max(0.0) as u64
    }
}

/// One draw of the counting process at time `t`: the subordinated clock
/// is drawn first, then a Poisson variate at rate `λ · clock`.
pub fn sample<R: Rng + ?Sized>(
    params: &ProcessParams,
    t: f64,
    rng: &mut R,
) -> Result<CountSample> {
    let clock = frak_v_sample(params, t, rng)?;
    let value = poisson_u64(params.lambda() * clock, rng);
    Ok(CountSample { t, value, clock_value: clock })
}

/// Result of a Monte Carlo total-variation comparison.
#[derive(Debug, Clone)]
pub struct TvReport {
    pub tv: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n_draws: usize,
    /// Upper end of the compared state range (covers 99.9% of the
    /// analytic mass, capped so deep-tail sampling noise cannot dominate).
    pub k_upper: usize,
}

/// Hard cap on the state range of Monte Carlo pmf comparisons; beyond a
/// few hundred states the multinomial noise of the empirical tail
/// outweighs any signal.
pub const TV_RANGE_CAP: usize = 512;

/// Checks the subordination identity: a space-fractional process of index
/// `alpha` on an independent stable clock of index `gamma_exp` equals the
/// space-fractional process of index `alpha * gamma_exp` in law.
///
/// Draws `n_draws` of the left side and compares the empirical pmf with
/// the analytic pmf of the right side by total variation on the range
/// covering 99.9% of the analytic mass (capped at [`TV_RANGE_CAP`]).
pub fn subordination_identity_check<R: Rng + ?Sized>(
    alpha: f64,
    gamma_exp: f64,
    lambda: f64,
    t: f64,
    n_draws: usize,
    threshold: f64,
    rng: &mut R,
) -> Result<TvReport> {
    for (name, v, hi) in [("alpha", alpha, 1.0), ("gamma_exp", gamma_exp, 1.0)] {
        if !(v > 0.0 && v <= hi) {
            return Err(Error::InvalidParam(format!("{name} must lie in (0, 1], got {v}")));
        }
    }
    let product = alpha * gamma_exp;
    if !(product > 0.0 && product < 1.0) {
        return Err(Error::InvalidParam(format!(
            "alpha * gamma_exp must lie in (0, 1), got {product}"
        )));
    }

    // Analytic side: the product-index process (delta = 1, eta arbitrary).
    let target = ProcessParams::new(product, 1.0, 1.0, lambda)?;
    let analytic = pmf_oracle(&target, t, TV_RANGE_CAP)?;
    let k_upper = mass_range(&analytic.probs, 0.999);

    let mut counts = vec![0u64; k_upper + 1];
    for _ in 0..n_draws {
        let outer_clock =
            if gamma_exp == 1.0 { t } else { stable_sample(gamma_exp, t, rng)? };
        let inner_clock = if alpha == 1.0 {
            outer_clock
        } else {
            stable_sample(alpha, outer_clock, rng)?
        };
        let v = poisson_u64(lambda * inner_clock, rng);
        if v <= k_upper as u64 {
            counts[v as usize] += 1;
        }
    }

    let mut tv = 0.0;
    for k in 0..=k_upper {
        let emp = counts[k] as f64 / n_draws as f64;
        tv += (emp - analytic.probs[k]).abs();
    }
    tv *= 0.5;
    Ok(TvReport { tv, threshold, pass: tv < threshold, n_draws, k_upper })
}

/// Smallest index whose cumulative analytic mass reaches `level`
/// (saturating at the slice end).
pub(crate) fn mass_range(probs: &[f64], level: f64) -> usize {
    let mut cum = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        cum += p;
        if cum >= level {
            return k;
        }
    }
    probs.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_pmf(rate: f64, k_max: usize) -> Vec<f64> {
        let mut p = vec![(-rate).exp(); k_max + 1];
        for k in 1..=k_max {
            p[k] = p[k - 1] * rate / k as f64;
        }
        p
    }

    #[test]
    fn pgf_special_values() {
        let p = ProcessParams::new(0.4, 1.7, 0.8, 1.3).unwrap();
        assert_eq!(pgf(&p, 1.0, 3.0), 1.0);
        assert_eq!(pgf(&p, -0.3, 0.0), 1.0);
        // delta = 1 reduces to the space-fractional closed form
        let sf = ProcessParams::new(0.6, 1.0, 2.0, 1.5).unwrap();
        let expect = (-(1.5f64.powf(0.6)) * 2.0 * (1.0 - 0.25f64).powf(0.6)).exp();
        assert!((pgf(&sf, 0.25, 2.0) - expect).abs() < 1e-15);
        // direct evaluation at nu = delta = 1/2, eta = lambda = 1, u = 0
        let half = ProcessParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
        let expect = (-(2.0f64.sqrt() - 1.0)).exp();
        assert!((pgf(&half, 0.0, 1.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn series_poisson_reduction_is_exact() {
        let p = ProcessParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let pmf = pmf_series(&p, 1.0, 20, 1e-13).unwrap();
        let poisson = poisson_pmf(1.0, 20);
        for k in 0..=20 {
            assert!(
                (pmf.probs[k] - poisson[k]).abs() < 1e-12,
                "k={k}: {} vs {}",
                pmf.probs[k],
                poisson[k]
            );
        }
    }

    #[test]
    fn series_p0_matches_pgf_at_zero() {
        // eta = lambda^nu boundary with non-integer delta: the k = 0 row
        // converges conditionally like m^{-1.5}, so only a loose
        // tolerance is honestly reachable before the term cap.
        let p = ProcessParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
        let pmf = pmf_series(&p, 1.0, 0, 2e-5).unwrap();
        assert!((pmf.probs[0] - pgf(&p, 0.0, 1.0)).abs() < 1e-4);
        assert!((pmf.probs[0] - (-(2.0f64.sqrt() - 1.0)).exp()).abs() < 1e-4);
        // a well-conditioned cell pins the same identity tightly
        let p = ProcessParams::new(0.9, 1.0, 1.0, 1.0).unwrap();
        let pmf = pmf_series(&p, 1.0, 0, 1e-12).unwrap();
        assert!((pmf.probs[0] - pgf(&p, 0.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn series_matches_frozen_oracle_values() {
        // nu = 0.9, delta = 1, lambda = 1, t = 1: Taylor coefficients of
        // exp(-(1-u)^0.9), frozen from a 50-digit computation.
        let golden = [
            0.367_879_441_171_442_32,
            0.331_091_497_054_298_09,
            0.165_545_748_527_149_05,
            0.065_666_480_249_102_454,
            0.025_783_750_333_103_464,
            0.011_732_227_198_119_053,
        ];
        let p = ProcessParams::new(0.9, 1.0, 1.0, 1.0).unwrap();
        let series = pmf_series(&p, 1.0, 5, 1e-12).unwrap();
        let oracle = pmf_oracle(&p, 1.0, 5).unwrap();
        for k in 0..=5 {
            assert!((series.probs[k] - golden[k]).abs() < 1e-11, "series k={k}");
            assert!((oracle.probs[k] - golden[k]).abs() < 1e-11, "oracle k={k}");
        }
    }

    #[test]
    fn space_fractional_poisson_limit() {
        let pmf = pmf_space_fractional(1.0, 0.7, 1.4, 15, 1e-14).unwrap();
        let poisson = poisson_pmf(0.98, 15);
        for k in 0..=15 {
            assert!((pmf.probs[k] - poisson[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn space_fractional_goldens() {
        // k = 0 row is e^{-lambda^alpha t}
        let pmf = pmf_space_fractional(0.5, 1.0, 1.0, 2, 1e-13).unwrap();
        assert!((pmf.probs[0] - (-1.0f64).exp()).abs() < 1e-13);
        // coefficient of u in e^{-(1-u)^{1/2}}, frozen from a 30-digit
        // Taylor computation
        assert!((pmf.probs[1] - 0.183_939_720_585_721_161).abs() < 1e-12);
        assert!((pmf.probs[2] - 0.091_969_860_292_860_580).abs() < 1e-12);
    }

    #[test]
    fn space_fractional_agrees_with_general_series_at_delta_one() {
        let alpha = 0.7;
        let sf = pmf_space_fractional(alpha, 1.0, 1.0, 10, 1e-12).unwrap();
        let p = ProcessParams::new(alpha, 1.0, 1.0, 1.0).unwrap();
        let general = pmf_series(&p, 1.0, 10, 1e-12).unwrap();
        for k in 0..=10 {
            assert!((sf.probs[k] - general.probs[k]).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn oracle_normalizes_on_heavy_tail_example() {
        // nu = 0.5, delta = 2, eta = 0.5: polynomial tail; the partial sum
        // to k = 200 reaches ~0.98 and est_tail carries the rest.
        let p = ProcessParams::new(0.5, 2.0, 0.5, 1.0).unwrap();
        let pmf = pmf_oracle(&p, 0.5, 200).unwrap();
        let total: f64 = pmf.probs.iter().sum();
        // frozen from a 60-digit circle inversion
        assert!((total - 0.980_042_410_382_84).abs() < 1e-9, "total {total}");
        assert!((total + pmf.est_tail - 1.0).abs() < 1e-9);
    }

    #[test]
    fn auto_falls_back_to_oracle_when_series_diverges() {
        // eta < lambda^nu with non-integer delta: the double series is a
        // divergent rearrangement and must refuse
        let p = ProcessParams::new(0.5, 1.5, 0.5, 1.0).unwrap();
        assert!(matches!(pmf_series(&p, 1.0, 8, 1e-10), Err(Error::NonConvergence(_))));
        let auto = pmf_auto(&p, 1.0, 8, 1e-10).unwrap();
        assert_eq!(auto.method, PmfMethod::Oracle);
        let total: f64 = auto.probs.iter().sum();
        assert!((total + auto.est_tail - 1.0).abs() < 1e-9);
    }

    #[test]
    fn series_converges_for_dominating_eta() {
        // eta > lambda^nu: absolute convergence of the double series even
        // for non-integer delta; must agree with the oracle
        let p = ProcessParams::new(0.5, 0.7, 2.5, 1.0).unwrap();
        let series = pmf_series(&p, 1.0, 10, 1e-11).unwrap();
        let oracle = pmf_oracle(&p, 1.0, 10).unwrap();
        for k in 0..=10 {
            assert!(
                (series.probs[k] - oracle.probs[k]).abs() < 1e-9,
                "k={k}: {} vs {}",
                series.probs[k],
                oracle.probs[k]
            );
        }
    }

    #[test]
    fn sample_at_time_zero_is_zero() {
        let p = ProcessParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
        let mut rng = crate::rng::master(1);
        let s = sample(&p, 0.0, &mut rng).unwrap();
        assert_eq!(s.value, 0);
        assert_eq!(s.clock_value, 0.0);
    }

    #[test]
    fn pmf_at_time_zero_is_delta() {
        let p = ProcessParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
        for pmf in [
            pmf_series(&p, 0.0, 4, 1e-10).unwrap(),
            pmf_oracle(&p, 0.0, 4).unwrap(),
            pmf_space_fractional(0.5, 1.0, 0.0, 4, 1e-10).unwrap(),
        ] {
            assert_eq!(pmf.probs[0], 1.0);
            assert!(pmf.probs[1..].iter().all(|&x| x == 0.0));
        }
    }
}
