//! Atomic artifact writes: content lands under its final name only
//! complete, via a same-directory temp file and rename.

use crate::CliError;
use std::path::Path;

pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::Config(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    std::fs::write(tmp, content)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(tmp, path)
        .map_err(|e| CliError::Config(format!("cannot move {} into place: {e}", tmp.display())))
}
