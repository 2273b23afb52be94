//! Output plumbing: profile emission in either format, to a file or stdout.

use std::io::Write;

use cohsim_core::circuit::CoherenceProfile;
use cohsim_core::report;

use crate::{Failure, Format};

pub fn emit_profile(
    profile: &CoherenceProfile,
    format: Format,
    output: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let text = match format {
        Format::Csv => report::profile_to_csv(profile),
        Format::Json => report::profile_to_json(profile),
    };
    write_text(&text, output)
}

pub fn write_text(text: &str, output: Option<&std::path::Path>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Diagnostics(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Simulation(format!("stdout: {e}")))
        }
    }
}
