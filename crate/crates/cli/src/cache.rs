//! Content-addressed spectrum cache. Each entry is one file: a header line
//! with the sha256 of the payload, then the spectrum as JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use conic_heat::{ProfileFamily, Spectrum, SOLVER_VERSION};
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError};

const MAGIC: &str = "conic-heat-spectrum v1 sha256=";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Key over everything the spectrum depends on.
pub fn spectrum_key(profile: &ProfileFamily, lambda_max: f64, tol: f64) -> String {
    let profile = serde_json::to_string(profile).expect("profile serializes");
    sha256_hex(
        format!(
            "{SOLVER_VERSION}\n{profile}\n{:016x}\n{:016x}",
            lambda_max.to_bits(),
            tol.to_bits()
        )
        .as_bytes(),
    )
}

pub enum Lookup {
    Hit(Spectrum),
    Miss,
    /// The file exists but fails its checksum or does not parse.
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.spectrum"))
    }

    pub fn load(&self, key: &str) -> Lookup {
        let path = self.path(key);
        let Ok(text) = std::fs::read_to_string(&path) else {
            return Lookup::Miss;
        };
        match decode(&text) {
            Ok(s) => Lookup::Hit(s),
            Err(why) => Lookup::Corrupt(format!("{}: {why}", path.display())),
        }
    }

    /// Writes through a temporary file in the cache directory and renames it
    /// into place.
    pub fn store(&self, key: &str, spectrum: &Spectrum) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| io_error("cannot create cache", &self.dir, e))?;
        atomic_write(&self.path(key), encode(spectrum).as_bytes())
    }
}

fn encode(spectrum: &Spectrum) -> String {
    let payload = serde_json::to_string(spectrum).expect("spectrum serializes");
    format!("{MAGIC}{}\n{payload}", sha256_hex(payload.as_bytes()))
}

fn decode(text: &str) -> Result<Spectrum, String> {
    let (header, payload) = text.split_once('\n').ok_or("missing header")?;
    let sum = header.strip_prefix(MAGIC).ok_or("unknown header")?;
    if sum != sha256_hex(payload.as_bytes()) {
        return Err("checksum mismatch".into());
    }
    serde_json::from_str(payload).map_err(|e| e.to_string())
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error("cannot write", path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error("cannot write", path, e))?;
    tmp.persist(path).map_err(|e| io_error("cannot write", path, e.error))?;
    Ok(())
}
