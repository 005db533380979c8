//! Sampling-interval sweeps and the log-log rate fit used to read off the
//! tracking order of a method.

use crate::algorithms::{run, MethodConfig, MethodState};
use crate::bench::record::default_k_bar;
use crate::bench::reference::{optimal_trajectory, reference_tolerance};
use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::ObjectiveOracle;

/// One sweep point: the method run at sampling interval `h` over the common
/// horizon, reduced to its worst post-warm-up tracking error.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub variant: crate::algorithms::Variant,
    pub h: f64,
    pub k: usize,
    pub k_prime: usize,
    pub gamma: f64,
    pub steps: usize,
    pub asymptotic_err: f64,
}

fn validate_grid(hs: &[f64]) -> Result<()> {
    if hs.len() < 4 {
        return Err(Error::Config(format!(
            "rate fits need at least 4 sampling intervals, got {}",
            hs.len()
        )));
    }
    if hs.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(Error::Config("sampling intervals must be positive and finite".into()));
    }
    let (min, max) = hs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &h| (lo.min(h), hi.max(h)));
    if max / min < 10.0 {
        return Err(Error::Config(format!(
            "sampling intervals must span at least a decade, got {min}..{max}"
        )));
    }
    Ok(())
}

/// Runs `base` at each sampling interval in `hs` over the fixed horizon,
/// starting from `y0` at t = 0, and scores each run by its asymptotic error
/// against the exact minimizer trajectory. All other parameters of `base`
/// (truncations, step sizes, correction counts) are held fixed.
pub fn sweep_h<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    y0: &BlockVector,
    base: &MethodConfig,
    hs: &[f64],
    horizon: f64,
) -> Result<Vec<SweepCell>> {
    validate_grid(hs)?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    let tol = reference_tolerance(graph.n(), graph.p());
    let mut cells = Vec::with_capacity(hs.len());
    for &h in hs {
        let steps = (horizon / h).round() as usize;
        if steps < 2 {
            return Err(Error::Config(format!(
                "horizon {horizon} covers fewer than 2 samples at h = {h}"
            )));
        }
        let mut config = base.clone();
        config.h = h;
        let (trajectory, _) = run(MethodState::initial(y0.clone(), 0.0), oracle, graph, &config, steps)?;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
        let reference = optimal_trajectory(oracle, graph, &times, tol)?;
        let k_bar = default_k_bar(steps);
        let err = trajectory[k_bar + 1..]
            .iter()
            .zip(&reference[k_bar + 1..])
            .map(|(y, opt)| (y - opt).norm())
            .fold(0.0f64, f64::max);
        cells.push(SweepCell {
            variant: config.variant,
            h,
            k: config.k,
            k_prime: config.k_prime,
            gamma: config.gamma,
            steps,
            asymptotic_err: err,
        });
    }
    Ok(cells)
}

/// Least-squares slope of ln(err) against ln(h). For err = c h^q this
/// recovers q up to rounding. Points with zero error are rejected since the
/// log is undefined there (they mean the method tracked exactly).
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Config(format!("slope fit needs at least 2 points, got {}", points.len())));
    }
    if points.iter().any(|&(h, e)| !(h > 0.0) || !(e > 0.0)) {
        return Err(Error::Config("slope fit needs strictly positive h and err".into()));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        points.iter().map(|&(h, e)| (h.ln(), e.ln())).unzip();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("slope fit needs at least two distinct h values".into()));
    }
    Ok(sxy / sxx)
}

/// CSV rendering of a sweep, one row per cell.
pub fn sweep_to_csv(cells: &[SweepCell]) -> String {
    let mut s = String::from("variant,h,K,Kprime,gamma,asymptotic_err\n");
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{},{:e}\n",
            c.variant, c.h, c.k, c.k_prime, c.gamma, c.asymptotic_err
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Variant;
    use crate::objective::SyntheticQuadratic;

    #[test]
    fn slope_fit_is_exact_on_power_laws() {
        let hs = [0.4, 0.2, 0.1, 0.05, 0.025].map(|h| (h, 3.7 * h * h));
        assert!((fit_loglog_slope(&hs).unwrap() - 2.0).abs() < 1e-12);
        let lin = [0.4, 0.2, 0.1, 0.05].map(|h| (h, 0.2 * h));
        assert!((fit_loglog_slope(&lin).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slope_fit_rejects_degenerate_inputs() {
        assert!(fit_loglog_slope(&[(0.1, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(0.1, 1.0), (0.1, 2.0)]).is_err());
        assert!(fit_loglog_slope(&[(0.1, 0.0), (0.2, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(-0.1, 1.0), (0.2, 1.0)]).is_err());
    }

    #[test]
    fn grid_validation() {
        let graph = NetworkGraph::new(2, 1, vec![(0, 1)]).unwrap();
        let oracle = SyntheticQuadratic::random(graph.clone(), 1, 0.3, 0.5);
        let y0 = BlockVector::zeros(2, 1);
        let base = MethodConfig::new(Variant::RunningGradient, 0.1, 0, 0, 0.3);
        let too_few = sweep_h(&oracle, &graph, &y0, &base, &[0.4, 0.2, 0.04], 8.0);
        assert!(too_few.is_err());
        let too_narrow = sweep_h(&oracle, &graph, &y0, &base, &[0.4, 0.3, 0.2, 0.1], 8.0);
        assert!(too_narrow.is_err());
        let bad_h = sweep_h(&oracle, &graph, &y0, &base, &[0.4, 0.2, 0.1, 0.0], 8.0);
        assert!(bad_h.is_err());
    }

    #[test]
    fn running_gradient_error_shrinks_with_h() {
        // First-order method: halving h should shrink the plateau roughly in
        // half, certainly monotonically on a well-conditioned instance.
        let graph = NetworkGraph::new(3, 1, vec![(0, 1), (1, 2)]).unwrap();
        let oracle = SyntheticQuadratic::random(graph.clone(), 5, 0.2, 0.6);
        let y0 = BlockVector::zeros(3, 1);
        let mut base = MethodConfig::new(Variant::RunningGradient, 0.1, 0, 0, 0.25);
        base.n_ec = 1;
        let hs = [0.4, 0.2, 0.1, 0.04];
        let cells = sweep_h(&oracle, &graph, &y0, &base, &hs, 12.0).unwrap();
        assert_eq!(cells.len(), 4);
        for w in cells.windows(2) {
            assert!(
                w[1].asymptotic_err < w[0].asymptotic_err,
                "plateau should fall with h: {} vs {}",
                w[0].asymptotic_err,
                w[1].asymptotic_err
            );
        }
        let slope = fit_loglog_slope(
            &cells.iter().map(|c| (c.h, c.asymptotic_err)).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(slope > 0.6 && slope < 1.4, "slope {slope}");
    }

    #[test]
    fn csv_rows_match_cells() {
        let cells = vec![SweepCell {
            variant: Variant::DpcG,
            h: 0.25,
            k: 3,
            k_prime: 0,
            gamma: 0.5,
            steps: 40,
            asymptotic_err: 0.125,
        }];
        let csv = sweep_to_csv(&cells);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "variant,h,K,Kprime,gamma,asymptotic_err");
        assert_eq!(lines[1], "DPC-G,0.25,3,0,0.5,1.25e-1");
    }
}
