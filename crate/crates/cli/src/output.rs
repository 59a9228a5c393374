use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Opens `path` for writing, or stdout for `-`.
pub fn sink(path: &Path) -> anyhow::Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(io::stdout())));
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(Box::new(BufWriter::new(f)))
}

/// Hex SHA-256 of the compact JSON form of `params`.
pub fn config_hash(params: &Value) -> String {
    let digest = Sha256::digest(params.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The leading `#` line of every CSV.
pub fn metadata(params: &Value, derived: Option<&Value>) -> String {
    let mut line = format!(
        "# vortex {} config_sha256={} params={}",
        env!("CARGO_PKG_VERSION"),
        config_hash(params),
        params
    );
    if let Some(d) = derived {
        line.push_str(&format!(" derived={d}"));
    }
    line
}

pub fn write_metadata(
    w: &mut dyn Write,
    params: &Value,
    derived: Option<&Value>,
) -> io::Result<()> {
    writeln!(w, "{}", metadata(params, derived))
}
