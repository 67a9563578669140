use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use nfext::scenario::ScenarioConfig;

/// Round-trip formatting for CSV payloads.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Csv {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Csv {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { path, out })
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> io::Result<PathBuf> {
        self.out.flush()?;
        Ok(self.path)
    }
}

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

pub fn write_manifest(
    dir: &Path,
    command: &str,
    cfg: &ScenarioConfig,
    outputs: &[PathBuf],
    wall: Duration,
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join("manifest.txt"))?);
    writeln!(out, "command = {command}")?;
    writeln!(out, "version = {}", version_string())?;
    writeln!(out, "wall_time_s = {:.6}", wall.as_secs_f64())?;
    for p in outputs {
        writeln!(out, "output = {}", p.display())?;
    }
    writeln!(out, "\n# configuration")?;
    write!(out, "{}", cfg.to_text())?;
    out.flush()
}
