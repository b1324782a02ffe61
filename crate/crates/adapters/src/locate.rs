//! Finds sibling binaries of the running executable, walking up from the
//! executable's directory so it works from both `target/<profile>` and
//! `target/<profile>/deps`.

use std::path::PathBuf;

use crate::AdapterError;

pub fn locate_bin(name: &str) -> Result<PathBuf, AdapterError> {
    if let Some(path) = std::env::var_os(format!(
        "LUMOS_BIN_{}",
        name.to_uppercase().replace('-', "_")
    )) {
        return Ok(PathBuf::from(path));
    }
    let exe = std::env::current_exe()?;
    for dir in exe.ancestors().skip(1) {
        let candidate = dir.join(name);
        if candidate.is_file() {
            return Ok(candidate);
        }
    }
    Err(AdapterError::MissingBinary(name.to_string()))
}
