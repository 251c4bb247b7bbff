use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::experiment::ensure_dir;
use super::{AtStage, ExperimentConfig, RunnerError, Stage};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Modelling choices that do not come from measured values.
const NOTES: &[&str] = &[
    "geometry.f and geometry.d_F are modelling defaults, not measured values; they keep every translated image on the grid",
    "source.max_angle default keeps all image translations within half the grid and inside the crystal-grid Nyquist band",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// What a run produced. The manifest file itself is not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub dir: PathBuf,
    /// `ok` or the diagnostic of the failing stage.
    pub status: String,
    pub config_echo: String,
    pub artifacts: Vec<ArtifactEntry>,
    pub timing: Vec<(String, f64)>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# chaotic-imaging run manifest\n");
        let _ = writeln!(s, "status={}", self.status);
        s.push_str("\n[config]\n");
        s.push_str(&self.config_echo);
        s.push_str("\n[notes]\n");
        for n in NOTES {
            let _ = writeln!(s, "{n}");
        }
        s.push_str("\n[timing]\n");
        let _ = writeln!(s, "workers={}", rayon::current_num_threads());
        for (k, v) in &self.timing {
            let _ = writeln!(s, "{k}={v:.6}");
        }
        s.push_str("\n[artifacts]\n# sha256 bytes path\n");
        for a in &self.artifacts {
            let _ = writeln!(s, "{} {} {}", a.sha256, a.bytes, a.path);
        }
        s
    }

    pub fn artifact(&self, path: &str) -> Option<&ArtifactEntry> {
        self.artifacts.iter().find(|a| a.path == path)
    }
}

pub(super) struct ArtifactWriter {
    manifest: RunManifest,
}

impl ArtifactWriter {
    pub(super) fn create(dir: &Path, cfg: &ExperimentConfig) -> Result<Self, RunnerError> {
        ensure_dir(dir)?;
        Ok(Self {
            manifest: RunManifest {
                dir: dir.to_path_buf(),
                status: "running".into(),
                config_echo: cfg.echo(),
                artifacts: Vec::new(),
                timing: Vec::new(),
            },
        })
    }

    pub(super) fn path(&self, rel: &str) -> PathBuf {
        self.manifest.dir.join(rel)
    }

    /// Hashes a file already written under the output directory.
    pub(super) fn record(&mut self, rel: &str) -> Result<(), RunnerError> {
        if rel == MANIFEST_FILE || self.manifest.artifact(rel).is_some() {
            return Err(RunnerError::sanity(Stage::Output, format!("artifact {rel} written twice")));
        }
        let bytes = std::fs::read(self.path(rel)).at(Stage::Output)?;
        let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        self.manifest.artifacts.push(ArtifactEntry { path: rel.into(), bytes: bytes.len() as u64, sha256 });
        Ok(())
    }

    pub(super) fn write_text(&mut self, rel: &str, text: &str) -> Result<(), RunnerError> {
        std::fs::write(self.path(rel), text).at(Stage::Output)?;
        self.record(rel)
    }

    pub(super) fn timing(&mut self, key: &str, seconds: f64) {
        self.manifest.timing.push((key.into(), seconds));
    }

    fn write_manifest(&self) -> Result<(), RunnerError> {
        std::fs::write(self.path(MANIFEST_FILE), self.manifest.to_text()).at(Stage::Output)
    }

    /// Records the failure in the manifest and hands the error back.
    pub(super) fn fail(mut self, err: RunnerError) -> RunnerError {
        self.manifest.status = format!("failed: {err}");
        let _ = self.write_manifest();
        err
    }

    pub(super) fn finish(mut self) -> Result<RunManifest, RunnerError> {
        self.manifest.status = "ok".into();
        self.write_manifest()?;
        Ok(self.manifest)
    }
}
