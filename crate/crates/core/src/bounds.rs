//! Closed-form tracking-error predictions.
//!
//! Everything here is a pure function of a [`ConstantsBundle`] and the method
//! parameters (h, K, K', gamma): the series contraction factor, the
//! discretization constant, the per-step contraction and expansion rates, the
//! asymptotic gradient-tracking error in both step-size regimes, and the
//! quadratic error-recursion coefficients governing the Newton variants.

use crate::error::{Error, Result};
use crate::objective::{ConstantsBundle, ConstantsProvenance};

/// Step-size regime of the gradient-variant asymptote.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Holds whenever the correction contracts (rho < 1); keeps the O(h)
    /// worst-case drift term.
    AnyH,
    /// Sharper form requiring rho * sigma < 1.
    SmallH,
}

/// All derived constants and bound values for one parameterization.
///
/// Asymptote fields hold infinity when the corresponding convergence
/// condition fails; the boolean flags state which conditions hold. The
/// `*_approx` values belong to the backward-difference variants and carry the
/// extra time-derivative approximation error; the alpha-primed coefficients
/// are their Newton counterparts.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub constants: ConstantsBundle,
    pub h: f64,
    pub k: usize,
    pub k_prime: usize,
    pub gamma: f64,

    /// Series contraction factor (L/2)/(m + L/2).
    pub varrho: f64,
    /// Norm bound of the truncated inverse, (m + L/2)/(m(m + ell/2)).
    pub big_h: f64,
    /// Discretization constant C0^2 C1/2m^3 + C0 C2/m^2 + C3/2m.
    pub delta: f64,
    /// (C0/m) varrho^{K+1}.
    pub gamma_k: f64,
    /// (C0/m) varrho^{K'+1}.
    pub gamma_k_prime: f64,
    /// Correction contraction max{|1 - gamma m|, |1 - gamma(L+M)|}.
    pub rho: f64,
    /// Per-step expansion 1 + h[C0 C1/m^2 + C2/m].
    pub sigma: f64,
    /// Prediction error h Gamma(varrho,K) + h^2 Delta.
    pub phi: f64,
    /// phi plus the backward-difference penalty h^2 C3 H / 2.
    pub phi_prime: f64,

    pub rho_converges: bool,
    pub rho_sigma_converges: bool,
    pub asymptote_any_h: f64,
    pub asymptote_any_h_approx: f64,
    pub asymptote_small_h: f64,
    pub asymptote_small_h_approx: f64,

    pub alpha2: f64,
    pub alpha1: f64,
    pub alpha0: f64,
    pub alpha1_prime: f64,
    pub alpha0_prime: f64,
    /// Some tau in (1 - gamma, 1) satisfies alpha1 < tau.
    pub tau_feasible: bool,
    /// Supremum of the Newton attraction radius, (1 - alpha1)/alpha2.
    pub attraction_radius: f64,
}

/// Gamma(varrho, K) = (C0/m) varrho^{K+1}, built by repeated multiplication
/// so that Gamma(varrho, K+1) is exactly varrho * Gamma(varrho, K).
pub fn series_tail_bound(c0: f64, m: f64, varrho: f64, k: usize) -> f64 {
    let mut g = (c0 / m) * varrho;
    for _ in 0..k {
        g *= varrho;
    }
    g
}

fn power_tail(varrho: f64, k: usize) -> f64 {
    let mut e = varrho;
    for _ in 0..k {
        e *= varrho;
    }
    e
}

/// Evaluates every derived constant and bound for the given parameters.
pub fn compute_constants(
    c: &ConstantsBundle,
    h: f64,
    k: usize,
    k_prime: usize,
    gamma: f64,
) -> Result<BoundReport> {
    c.validate()?;
    if !(h > 0.0) {
        return Err(Error::Config(format!("sampling period must be positive, got {h}")));
    }
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
    }
    let (m, big_m, ell, big_l) = (c.m, c.big_m, c.ell, c.big_l);
    let varrho = (big_l / 2.0) / (m + big_l / 2.0);
    let big_h = (m + big_l / 2.0) / (m * (m + ell / 2.0));
    let delta = c.c0 * c.c0 * c.c1 / (2.0 * m.powi(3)) + c.c0 * c.c2 / (m * m) + c.c3 / (2.0 * m);
    let gamma_k = series_tail_bound(c.c0, m, varrho, k);
    let gamma_k_prime = series_tail_bound(c.c0, m, varrho, k_prime);
    let rho = (1.0 - gamma * m).abs().max((1.0 - gamma * (big_l + big_m)).abs());
    let sigma = 1.0 + h * (c.c0 * c.c1 / (m * m) + c.c2 / m);
    let phi = h * gamma_k + h * h * delta;
    let phi_prime = phi + h * h * c.c3 * big_h / 2.0;

    let rho_converges = rho < 1.0;
    let rho_sigma_converges = rho * sigma < 1.0;
    let any_h = |pred_err: f64| {
        if rho_converges {
            rho * (2.0 * h * c.c0 / m + pred_err) / (1.0 - rho)
        } else {
            f64::INFINITY
        }
    };
    let small_h = |pred_err: f64| {
        if rho_sigma_converges {
            rho * pred_err / (1.0 - rho * sigma)
        } else {
            f64::INFINITY
        }
    };

    // The Hessian-approximation gap gamma(L+M) varrho^{K'+1}/m enters the
    // alpha coefficients as (L+M)/C0 * Gamma(varrho,K'), written with C0
    // cancelled so a time-invariant objective (C0 = 0) stays well defined.
    let linear_gap = gamma * (big_l + big_m) * power_tail(varrho, k_prime) / m + 1.0 - gamma;
    let alpha2 = gamma * c.c1 / (2.0 * m) * sigma * sigma;
    let alpha1 = sigma * (gamma * c.c1 / m * phi + linear_gap);
    let alpha0 = phi * (gamma * c.c1 / (2.0 * m) * phi + linear_gap);
    let alpha1_prime = sigma * (gamma * c.c1 / m * phi_prime + linear_gap);
    let alpha0_prime = phi_prime * (gamma * c.c1 / (2.0 * m) * phi_prime + linear_gap);
    let tau_feasible = alpha1 < 1.0;
    let attraction_radius = if alpha1 >= 1.0 {
        0.0
    } else if alpha2 == 0.0 {
        f64::INFINITY
    } else {
        (1.0 - alpha1) / alpha2
    };

    Ok(BoundReport {
        constants: *c,
        h,
        k,
        k_prime,
        gamma,
        varrho,
        big_h,
        delta,
        gamma_k,
        gamma_k_prime,
        rho,
        sigma,
        phi,
        phi_prime,
        rho_converges,
        rho_sigma_converges,
        asymptote_any_h: any_h(phi),
        asymptote_any_h_approx: any_h(phi_prime),
        asymptote_small_h: small_h(phi),
        asymptote_small_h_approx: small_h(phi_prime),
        alpha2,
        alpha1,
        alpha0,
        alpha1_prime,
        alpha0_prime,
        tau_feasible,
        attraction_radius,
    })
}

/// Asymptotic tracking error of the gradient-correction variants.
/// `approximate_td` selects the backward-difference form with its extra
/// (1 + mH) factor on the C3 term.
pub fn gradient_error_bound(
    report: &BoundReport,
    regime: Regime,
    approximate_td: bool,
) -> Result<f64> {
    match regime {
        Regime::SmallH => {
            if !report.rho_sigma_converges {
                return Err(Error::Config(format!(
                    "small-h regime needs rho*sigma < 1, got {}",
                    report.rho * report.sigma
                )));
            }
            Ok(if approximate_td {
                report.asymptote_small_h_approx
            } else {
                report.asymptote_small_h
            })
        }
        Regime::AnyH => {
            if !report.rho_converges {
                return Err(Error::Config(format!(
                    "tracking needs rho < 1, got {}; pick gamma < 2/(L+M)",
                    report.rho
                )));
            }
            Ok(if approximate_td { report.asymptote_any_h_approx } else { report.asymptote_any_h })
        }
    }
}

/// Outcome of testing a Newton contraction rate tau against the alpha
/// recursion: whether errors within the radius contract at rate tau and stay
/// inside it, the radius itself, and the error plateau alpha0/(1 - tau).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonFeasibility {
    pub feasible: bool,
    pub attraction_radius: f64,
    pub plateau: f64,
}

/// Checks alpha1 < tau and tau R + alpha0 <= R for R = (tau - alpha1)/alpha2,
/// with the primed coefficients when `approximate_td` is set. Requires
/// 1 - gamma < tau < 1.
pub fn newton_feasibility(
    report: &BoundReport,
    tau: f64,
    approximate_td: bool,
) -> Result<NewtonFeasibility> {
    if !(tau > 1.0 - report.gamma && tau < 1.0) {
        return Err(Error::Config(format!(
            "tau must lie in (1 - gamma, 1) = ({}, 1), got {tau}",
            1.0 - report.gamma
        )));
    }
    let (a1, a0) = if approximate_td {
        (report.alpha1_prime, report.alpha0_prime)
    } else {
        (report.alpha1, report.alpha0)
    };
    let a2 = report.alpha2;
    if a1 >= tau {
        return Ok(NewtonFeasibility {
            feasible: false,
            attraction_radius: 0.0,
            plateau: a0 / (1.0 - tau),
        });
    }
    let radius = if a2 == 0.0 { f64::INFINITY } else { (tau - a1) / a2 };
    let stays_inside = tau * radius + a0 <= radius;
    Ok(NewtonFeasibility {
        feasible: stays_inside,
        attraction_radius: radius,
        plateau: a0 / (1.0 - tau),
    })
}

/// Per-sample movement of the optimal trajectory: C0 h / m.
pub fn solution_drift_bound(c: &ConstantsBundle, h: f64) -> f64 {
    c.c0 * h / c.m
}

impl BoundReport {
    /// Flat key-value rendering for run summaries.
    pub fn to_kv_block(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: f64| s.push_str(&format!("{k} = {v:.12e}\n"));
        kv("m", self.constants.m);
        kv("M", self.constants.big_m);
        kv("ell", self.constants.ell);
        kv("L", self.constants.big_l);
        kv("C0", self.constants.c0);
        kv("C1", self.constants.c1);
        kv("C2", self.constants.c2);
        kv("C3", self.constants.c3);
        kv("h", self.h);
        kv("K", self.k as f64);
        kv("Kprime", self.k_prime as f64);
        kv("gamma", self.gamma);
        kv("varrho", self.varrho);
        kv("H", self.big_h);
        kv("Delta", self.delta);
        kv("Gamma_K", self.gamma_k);
        kv("Gamma_Kprime", self.gamma_k_prime);
        kv("rho", self.rho);
        kv("sigma", self.sigma);
        kv("phi", self.phi);
        kv("phi_prime", self.phi_prime);
        kv("asymptote_any_h", self.asymptote_any_h);
        kv("asymptote_any_h_approx", self.asymptote_any_h_approx);
        kv("asymptote_small_h", self.asymptote_small_h);
        kv("asymptote_small_h_approx", self.asymptote_small_h_approx);
        kv("alpha2", self.alpha2);
        kv("alpha1", self.alpha1);
        kv("alpha0", self.alpha0);
        kv("alpha1_prime", self.alpha1_prime);
        kv("alpha0_prime", self.alpha0_prime);
        kv("attraction_radius", self.attraction_radius);
        s.push_str(&format!(
            "constants_provenance = {}\n",
            match self.constants.provenance {
                ConstantsProvenance::Sampled => "sampled",
                ConstantsProvenance::Analytic => "analytic",
            }
        ));
        s.push_str(&format!("rho_converges = {}\n", self.rho_converges));
        s.push_str(&format!("rho_sigma_converges = {}\n", self.rho_sigma_converges));
        s.push_str(&format!("tau_feasible = {}\n", self.tau_feasible));
        s
    }
}
