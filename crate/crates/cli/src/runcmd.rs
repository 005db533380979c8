//! `run`: one decentralized trajectory against the reference optimum,
//! recorded to CSV with a bound-annotated summary.

use crate::config::{build_problem, method_config, steps_and_t0, Settings};
use crate::output::write_atomic;
use crate::CliError;
use dpc_core::bench::{
    asymptotic_error, default_k_bar, optimal_trajectory, reference_tolerance, RunRecord,
};
use dpc_core::block::BlockVector;
use dpc_core::bounds::compute_constants;
use dpc_core::netsim::run_decentralized;

pub fn execute(settings: &Settings) -> Result<(), CliError> {
    let problem = build_problem(settings)?;
    let config = method_config(settings, &problem.constants)?;
    let (steps, t0) = steps_and_t0(settings);
    if steps == 0 {
        return Err(CliError::Config("method.steps must be at least 1".into()));
    }
    let (graph, oracle) = (&problem.graph, problem.oracle.as_ref());

    let y0 = BlockVector::zeros(graph.n(), graph.p());
    let sim = run_decentralized(&config, oracle, graph, &y0, steps)?;
    let times: Vec<f64> = (0..=steps).map(|k| t0 + k as f64 * config.h).collect();
    let tol = reference_tolerance(graph.n(), graph.p());
    let reference = optimal_trajectory(oracle, graph, &times, tol)?;
    let record = RunRecord::from_sim(&config, settings.seed, t0, &sim, &reference, false)?;

    let k_bar = default_k_bar(steps);
    let plateau = asymptotic_error(&record, k_bar)?;
    let report =
        compute_constants(&problem.constants, config.h, config.k, config.k_prime, config.gamma)?;

    let mut summary = String::new();
    let kv = |s: &mut String, k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
    kv(&mut summary, "command", "run".into());
    kv(&mut summary, "family", problem.family.clone());
    kv(&mut summary, "scale", format!("{:?}", settings.scale).to_lowercase());
    kv(&mut summary, "seed", settings.seed.to_string());
    kv(&mut summary, "variant", config.variant.name().into());
    kv(&mut summary, "h", format!("{:e}", config.h));
    kv(&mut summary, "K", config.k.to_string());
    kv(&mut summary, "Kprime", config.k_prime.to_string());
    kv(&mut summary, "gamma", format!("{:e}", config.gamma));
    kv(&mut summary, "n_C", config.n_c.to_string());
    kv(&mut summary, "n_EC", config.n_ec.to_string());
    kv(&mut summary, "steps", steps.to_string());
    kv(&mut summary, "t0", format!("{t0:e}"));
    kv(&mut summary, "k_bar", k_bar.to_string());
    kv(&mut summary, "asymptotic_err", format!("{plateau:e}"));
    kv(&mut summary, "final_err", format!("{:e}", record.err[steps]));
    kv(&mut summary, "total_rounds", sim.ledger.total_rounds().to_string());
    kv(&mut summary, "scalars_per_node", sim.ledger.scalars_per_node.to_string());
    kv(&mut summary, "messages", sim.ledger.messages.to_string());
    summary.push_str("\n[bounds]\n");
    summary.push_str(&report.to_kv_block());

    let csv_path = settings.out.join("run.csv");
    let summary_path = settings.out.join("run_summary.txt");
    write_atomic(&csv_path, &record.to_csv())?;
    write_atomic(&summary_path, &summary)?;
    println!("run: wrote {} and {}", csv_path.display(), summary_path.display());
    Ok(())
}
