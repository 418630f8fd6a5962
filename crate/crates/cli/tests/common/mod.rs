#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use nvqpt::pipeline::PublishedData;
use nvqpt::qpt::AffineMap;
use nvqpt_cli::files::RecordFile;

pub const FOLD_ALPHA: f64 = 0.4;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn nvqpt(args: &[&str]) -> Run {
    nvqpt_env(args, &[])
}

pub fn nvqpt_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nvqpt"));
    cmd.args(args).env_remove(nvqpt_cli::commands::TOLERANCES_ENV);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn published() -> PublishedData {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/published.toml")).unwrap();
    PublishedData::from_toml_str(&text).unwrap()
}

/// The two fixture records: (file name, record) built from the printed
/// experimental and reconstructed affine maps.
pub fn expected_fixture_records() -> Vec<(&'static str, RecordFile)> {
    let data = published();
    let times: Vec<f64> = data.process.iter().map(|p| p.time_ns).collect();
    let experimental: Vec<AffineMap> = data.process.iter().map(|p| p.experimental_affine().unwrap()).collect();
    let reconstructed: Vec<AffineMap> = data.process.iter().map(|p| p.reconstructed_affine().unwrap()).collect();
    vec![
        (
            "published_experimental.json",
            RecordFile::from_affine_maps(&times, &experimental, FOLD_ALPHA, "printed experimental process matrices"),
        ),
        (
            "published_reconstructed.json",
            RecordFile::from_affine_maps(&times, &reconstructed, FOLD_ALPHA, "printed reconstructed process matrices"),
        ),
    ]
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
