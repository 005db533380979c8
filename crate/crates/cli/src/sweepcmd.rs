//! `sweep`: asymptotic tracking error across sampling periods for each
//! requested variant, with per-variant CSVs, log-log slope fits, and a bound
//! block at the median period. Cells for different variants may run on
//! worker threads; files are written atomically after all cells finish.

use crate::config::{build_problem, default_gamma, Settings};
use crate::output::write_atomic;
use crate::CliError;
use dpc_core::algorithms::{MethodConfig, Variant};
use dpc_core::bench::{fit_loglog_slope, sweep_h, sweep_to_csv, SweepCell};
use dpc_core::block::BlockVector;
use dpc_core::bounds::compute_constants;
use dpc_core::error::Result as CoreResult;
use rayon::prelude::*;

pub fn execute(settings: &Settings) -> Result<(), CliError> {
    let problem = build_problem(settings)?;
    let section = &settings.file.sweep;
    let hs = section.hs.clone().unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05, 0.04]);
    // Long enough that the slowest variant's transient clears the plateau
    // window even at the largest default step.
    let horizon = section.horizon.unwrap_or(60.0);
    let k = section.k.unwrap_or(8);
    let k_prime = section.k_prime.unwrap_or(8);
    let names = section
        .variants
        .clone()
        .unwrap_or_else(|| vec!["RG".into(), "DPC-G".into(), "DPC-N".into()]);
    if names.is_empty() {
        return Err(CliError::Config("sweep.variants must not be empty".into()));
    }

    let mut bases = Vec::with_capacity(names.len());
    for name in &names {
        let variant: Variant = name.parse()?;
        let gamma = settings
            .file
            .method
            .gamma
            .unwrap_or_else(|| default_gamma(variant, &problem.constants));
        let mut base = MethodConfig::new(
            variant,
            hs[0],
            if variant.predicts() { k } else { 0 },
            if variant.newton_correction() { k_prime } else { 0 },
            gamma,
        );
        if variant.is_running() {
            base.n_ec = 1;
        }
        base.validate()?;
        bases.push(base);
    }

    let (graph, oracle) = (&problem.graph, problem.oracle.as_ref());
    let y0 = BlockVector::zeros(graph.n(), graph.p());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
    let results: Vec<CoreResult<Vec<SweepCell>>> = pool.install(|| {
        bases
            .par_iter()
            .map(|base| sweep_h(oracle, graph, &y0, base, &hs, horizon))
            .collect()
    });

    let mut summary = String::new();
    summary.push_str("command = sweep\n");
    summary.push_str(&format!("family = {}\n", problem.family));
    summary.push_str(&format!("scale = {:?}\n", settings.scale).to_lowercase());
    summary.push_str(&format!("seed = {}\n", settings.seed));
    summary.push_str(&format!("horizon = {horizon:e}\n"));
    let hs_text: Vec<String> = hs.iter().map(|h| format!("{h:e}")).collect();
    summary.push_str(&format!("hs = {}\n\n", hs_text.join(" ")));

    let mut slope_lines = String::new();
    let mut bound_blocks = String::new();
    for (base, cells) in bases.iter().zip(results) {
        let cells = cells?;
        let name = base.variant.name();
        let file = settings
            .out
            .join(format!("sweep_{}.csv", name.to_lowercase()));
        write_atomic(&file, &sweep_to_csv(&cells))?;
        println!("sweep: wrote {}", file.display());

        let points: Vec<(f64, f64)> =
            cells.iter().map(|c| (c.h, c.asymptotic_err)).collect();
        let slope = fit_loglog_slope(&points)?;
        slope_lines.push_str(&format!("slope {name} = {slope:e}\n"));
        for cell in &cells {
            slope_lines.push_str(&format!(
                "asymptote {name} h={:e} = {:e}\n",
                cell.h, cell.asymptotic_err
            ));
        }

        let h_med = hs[hs.len() / 2];
        let report =
            compute_constants(&problem.constants, h_med, base.k, base.k_prime, base.gamma)?;
        bound_blocks.push_str(&format!("\n[bounds {name} h={h_med:e}]\n"));
        bound_blocks.push_str(&report.to_kv_block());
    }
    summary.push_str(&slope_lines);
    summary.push_str(&bound_blocks);

    let summary_path = settings.out.join("sweep_summary.txt");
    write_atomic(&summary_path, &summary)?;
    println!("sweep: wrote {}", summary_path.display());
    Ok(())
}
