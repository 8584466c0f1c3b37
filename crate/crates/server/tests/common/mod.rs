//! Servers and clients for the service tests.
#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::Arc;

use evograd::predict::Predictor;
use evograd::store::{read_csv_file, DatasetStore};
use evograd_server::{router, AppState};

pub fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

pub const SUE: &str = "Although they ran at about the same speed, Sue beat Sally because _ had such a good start.";
pub const SPRINTED: &str = "Although they sprinted at about the same speed, Sue beat Sally because _ had such a good start.";
pub const SPRINTED_ALTHOUGH: &str =
    "Although they sprinted at about the same speed, Sue beat Sally although _ had such a good start.";

/// A data directory holding the twelve corpus seeds.
pub fn seeded_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let seeds = read_csv_file(core_fixture("corpus.csv")).unwrap();
    DatasetStore::create(dir.path(), &seeds, None).unwrap();
    dir
}

/// Serves the store in `dir` on an ephemeral port from a background thread
/// and returns the base URL.
pub fn spawn_in_process(dir: &Path, extra: Vec<Arc<dyn Predictor>>, token: Option<&str>) -> String {
    let store = DatasetStore::open(dir).unwrap();
    let state = Arc::new(AppState::new(store, extra, token.map(str::to_string)));
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            axum::serve(listener, router(state)).await.unwrap();
        });
    });
    format!("http://{addr}")
}

/// The `evograd serve` binary; killed on drop.
pub struct BinServer {
    child: Child,
    pub base: String,
}

impl BinServer {
    pub fn start(dir: &Path, token: &str) -> Self {
        let mut child = Command::new(env!("CARGO_BIN_EXE_evograd"))
            .args(["serve", "--bind", "127.0.0.1:0", "--admin-token", token, "--data-dir"])
            .arg(dir)
            .env_remove("EVOGRAD_MODEL_ENDPOINT")
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        let addr: SocketAddr = line
            .trim()
            .strip_prefix("listening on http://")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .parse()
            .unwrap();
        Self { child, base: format!("http://{addr}") }
    }

    /// SIGKILL, no chance to flush anything.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for BinServer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn evograd(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_evograd")).args(args).output().unwrap()
}
