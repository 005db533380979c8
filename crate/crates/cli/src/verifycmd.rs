//! `verify`: the self-check suites (derivative oracles, series truncation,
//! prediction bound, centralized/decentralized equivalence, communication
//! accounting), one status line per suite. The hidden --inject flag
//! deliberately corrupts one suite's reference to prove the checks can fail.

use crate::config::Settings;
use crate::CliError;
use dpc_core::verify::{all_passed, run_suites, Fault};

pub fn execute(settings: &Settings, inject: &str) -> Result<(), CliError> {
    let fault: Fault = inject.parse()?;
    let suites = run_suites(settings.seed, fault)?;
    for s in &suites {
        if s.passed {
            println!("suite={} status=pass", s.name);
        } else {
            println!("suite={} status=fail detail={:?}", s.name, s.detail);
        }
    }
    if all_passed(&suites) {
        Ok(())
    } else {
        let failed: Vec<&str> =
            suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
        Err(CliError::Verification(format!("suites failed: {}", failed.join(", "))))
    }
}
