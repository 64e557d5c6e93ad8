//! Run manifests: a JSON record of what a command did, with what settings,
//! how long each phase took, and which files it wrote.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakMemory {
    pub bytes: u64,
    /// `VmHWM` when the kernel reports it, otherwise `estimate`.
    pub source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub arguments: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub timings: Vec<Phase>,
    pub peak_memory: PeakMemory,
    pub artifacts: Vec<PathBuf>,
    /// Command-specific facts, such as instrumentation counters.
    pub extra: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            config,
            seed,
            timings: Vec::new(),
            peak_memory: PeakMemory { bytes: 0, source: "estimate" },
            artifacts: Vec::new(),
            extra: serde_json::Value::Null,
        }
    }

    /// Runs `f`, recording its wall-clock time under `name`.
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Phase {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn seconds(&self, name: &str) -> Option<f64> {
        self.timings.iter().find(|p| p.name == name).map(|p| p.seconds)
    }

    pub fn artifact(&mut self, path: &Path) {
        self.artifacts.push(path.to_path_buf());
    }

    /// Fills in peak memory and writes the manifest as pretty JSON.
    /// `estimate_bytes` is used when the kernel does not report a peak.
    pub fn write(&mut self, path: &Path, estimate_bytes: u64) -> anyhow::Result<()> {
        self.peak_memory = match peak_resident_bytes() {
            Some(bytes) => PeakMemory { bytes, source: "VmHWM" },
            None => PeakMemory {
                bytes: estimate_bytes,
                source: "estimate",
            },
        };
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        log::info!("manifest written to {}", path.display());
        Ok(())
    }
}

fn peak_resident_bytes() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
