//! `budget`: per-variant parameter allocation under a communication budget,
//! printed and written as CSV.

use crate::config::Settings;
use crate::output::write_atomic;
use crate::CliError;
use dpc_core::algorithms::Variant;
use dpc_core::bench::budget_allocation;

pub fn execute(settings: &Settings) -> Result<(), CliError> {
    let section = &settings.file.budget;
    let t_bar = section.t_bar.unwrap_or(0.1);
    let r = section.r.unwrap_or(0.5);
    let hs = section.hs.clone().unwrap_or_else(|| vec![1.0, 0.2]);

    let mut csv = String::from("h,variant,budget,K,Kprime,n_C,n_EC,feasible\n");
    for &h in &hs {
        for variant in Variant::ALL {
            let a = budget_allocation(t_bar, r, h, variant)?;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                h,
                variant.name(),
                a.budget,
                a.k,
                a.k_prime,
                a.n_c,
                a.n_ec,
                a.feasible
            ));
            println!(
                "budget h={h} {}: rounds={} K={} Kprime={} n_C={} n_EC={} feasible={}",
                variant.name(),
                a.budget,
                a.k,
                a.k_prime,
                a.n_c,
                a.n_ec,
                a.feasible
            );
        }
    }
    let path = settings.out.join("budget.csv");
    write_atomic(&path, &csv)?;
    println!("budget: wrote {}", path.display());
    Ok(())
}
