//! Communication budgeting: how many rounds fit in one sampling interval
//! and how each method should spend them.

use crate::algorithms::Variant;
use crate::error::{Error, Result};

/// Parameters chosen for a method under a per-interval round budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetAllocation {
    pub variant: Variant,
    /// Rounds that fit in one interval: floor(r h / t_bar).
    pub budget: u64,
    pub k: usize,
    pub k_prime: usize,
    pub n_c: usize,
    pub n_ec: usize,
    /// Whether the variant can operate at all within this budget. Running
    /// methods need one round per correction; predictive methods need at
    /// least one prediction round and one correction round.
    pub feasible: bool,
}

/// Splits a sampling interval h into communication rounds of duration t_bar,
/// reserving fraction r of the interval for communication, and assigns the
/// rounds to the given method. Gradient methods spend every round on
/// corrections (or on prediction hops plus one correction); Newton methods
/// spend them on solver hops inside a single correction.
pub fn budget_allocation(t_bar: f64, r: f64, h: f64, variant: Variant) -> Result<BudgetAllocation> {
    if !(t_bar > 0.0) || !t_bar.is_finite() {
        return Err(Error::Config(format!("round duration must be positive, got {t_bar}")));
    }
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::Config(format!(
            "communication fraction must lie in (0, 0.5], got {r}"
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Config(format!("sampling interval must be positive, got {h}")));
    }
    // Tiny slack so exact ratios like 0.5 * 1.0 / 0.1 = 5 are not floored
    // down by one ulp of rounding.
    let b = ((r * h / t_bar) + 1e-9).floor() as u64;
    let bu = b as usize;
    let (k, k_prime, n_c, n_ec, feasible) = match variant {
        Variant::RunningGradient => (0, 0, bu, bu, b >= 1),
        Variant::RunningNewton => (bu.saturating_sub(1), bu.saturating_sub(1), 1, 1, b >= 2),
        Variant::DpcG | Variant::DapcG => (bu.saturating_sub(1), 0, bu, 0, b >= 2),
        Variant::DpcN | Variant::DapcN => {
            (bu.saturating_sub(1), bu.saturating_sub(1), 1, 0, b >= 2)
        }
    };
    Ok(BudgetAllocation { variant, budget: b, k, k_prime, n_c, n_ec, feasible })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_percent_rounds_half_reserved() {
        // h = 1, rounds of 0.1, half the interval for communication: 5 rounds.
        let rg = budget_allocation(0.1, 0.5, 1.0, Variant::RunningGradient).unwrap();
        assert_eq!((rg.budget, rg.n_c, rg.n_ec, rg.feasible), (5, 5, 5, true));

        let rn = budget_allocation(0.1, 0.5, 1.0, Variant::RunningNewton).unwrap();
        assert_eq!((rn.k, rn.k_prime, rn.n_c, rn.n_ec, rn.feasible), (4, 4, 1, 1, true));

        let pg = budget_allocation(0.1, 0.5, 1.0, Variant::DpcG).unwrap();
        assert_eq!((pg.k, pg.n_c, pg.feasible), (4, 5, true));

        let pn = budget_allocation(0.1, 0.5, 1.0, Variant::DpcN).unwrap();
        assert_eq!((pn.k, pn.k_prime, pn.n_c, pn.feasible), (4, 4, 1, true));
    }

    #[test]
    fn fast_sampling_leaves_one_round() {
        // h = 1/5: a single round fits, so only the running gradient method
        // can act; everything else needs at least two rounds per interval.
        for v in Variant::ALL {
            let a = budget_allocation(0.1, 0.5, 0.2, v).unwrap();
            assert_eq!(a.budget, 1, "{v}");
            assert_eq!(a.feasible, v == Variant::RunningGradient, "{v}");
        }
        let rg = budget_allocation(0.1, 0.5, 0.2, Variant::RunningGradient).unwrap();
        assert_eq!((rg.n_c, rg.n_ec), (1, 1));
    }

    #[test]
    fn exact_ratio_is_not_floored_down() {
        // r h / t_bar lands exactly on an integer; floating point must not
        // drop it to b - 1.
        let a = budget_allocation(0.1, 0.5, 1.0, Variant::DpcG).unwrap();
        assert_eq!(a.budget, 5);
        let b = budget_allocation(0.3, 0.3, 3.0, Variant::DpcG).unwrap();
        assert_eq!(b.budget, 3);
    }

    #[test]
    fn zero_budget_everything_infeasible() {
        for v in Variant::ALL {
            let a = budget_allocation(0.1, 0.25, 0.2, v).unwrap();
            assert_eq!(a.budget, 0, "{v}");
            assert!(!a.feasible, "{v}");
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(budget_allocation(0.0, 0.5, 1.0, Variant::DpcG).is_err());
        assert!(budget_allocation(0.1, 0.0, 1.0, Variant::DpcG).is_err());
        assert!(budget_allocation(0.1, 0.6, 1.0, Variant::DpcG).is_err());
        assert!(budget_allocation(0.1, 0.5, 0.0, Variant::DpcG).is_err());
    }

    #[test]
    fn dapc_variants_allocate_like_their_exact_counterparts() {
        let g = budget_allocation(0.1, 0.5, 1.0, Variant::DapcG).unwrap();
        let ge = budget_allocation(0.1, 0.5, 1.0, Variant::DpcG).unwrap();
        assert_eq!((g.k, g.n_c, g.feasible), (ge.k, ge.n_c, ge.feasible));
        let n = budget_allocation(0.1, 0.5, 1.0, Variant::DapcN).unwrap();
        let ne = budget_allocation(0.1, 0.5, 1.0, Variant::DpcN).unwrap();
        assert_eq!((n.k, n.k_prime, n.feasible), (ne.k, ne.k_prime, ne.feasible));
    }
}
