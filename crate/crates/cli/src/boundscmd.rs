//! `bounds`: closed-form error predictions for the configured method,
//! printed and written as a flat key-value block.

use crate::config::{build_problem, method_config, Settings};
use crate::output::write_atomic;
use crate::CliError;
use dpc_core::bounds::{compute_constants, newton_feasibility, solution_drift_bound};

pub fn execute(settings: &Settings) -> Result<(), CliError> {
    let problem = build_problem(settings)?;
    let config = method_config(settings, &problem.constants)?;
    let report =
        compute_constants(&problem.constants, config.h, config.k, config.k_prime, config.gamma)?;

    let mut text = report.to_kv_block();
    text.push_str(&format!(
        "solution_drift = {:e}\n",
        solution_drift_bound(&problem.constants, config.h)
    ));
    // Newton recursion check at the configured (or midpoint) rate.
    let tau =
        settings.file.bounds.tau.unwrap_or_else(|| 1.0 - config.gamma / 2.0);
    if tau > 1.0 - config.gamma && tau < 1.0 {
        let feas = newton_feasibility(&report, tau, config.variant.backward_difference())?;
        text.push_str(&format!("tau = {tau:e}\n"));
        text.push_str(&format!("newton_feasible = {}\n", feas.feasible));
        text.push_str(&format!("newton_radius = {:e}\n", feas.attraction_radius));
        text.push_str(&format!("newton_plateau = {:e}\n", feas.plateau));
    } else {
        return Err(CliError::Config(format!(
            "bounds.tau must lie in (1 - gamma, 1) = ({}, 1), got {tau}",
            1.0 - config.gamma
        )));
    }

    print!("{text}");
    let path = settings.out.join("bounds.txt");
    write_atomic(&path, &text)?;
    println!("bounds: wrote {}", path.display());
    Ok(())
}
