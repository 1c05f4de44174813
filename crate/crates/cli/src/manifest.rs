//! Run manifests, content digests, and atomic artifact writes.
//!
//! Every command serializes its fully resolved parameters (inputs,
//! settings, derived seeds) into a manifest, hashes that JSON with
//! SHA-256, and stamps the digest into every artifact it writes — as a
//! `manifest sha256=…` comment in delimited files and as a field in JSON
//! files. Artifacts of one run therefore cross-reference each other, and
//! a rerun with an unchanged manifest can be checked for byte identity.
//! No artifact carries a timestamp; only measured wall times vary
//! between identical runs.
//!
//! Writes go through a temporary sibling file plus rename so a crash or
//! an interrupt never leaves a half-written artifact behind.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Hex SHA-256 of the compact JSON encoding of a manifest. Field order
/// follows the struct declaration, so the digest is deterministic.
pub fn manifest_digest<T: Serialize>(manifest: &T) -> Result<String, Failure> {
    let bytes = serde_json::to_vec(manifest)
        .map_err(|e| Failure::Io(format!("encoding manifest: {e}")))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

/// Hex SHA-256 of a file's bytes, for recording input files in manifests.
pub fn sha256_file(path: &Path) -> Result<String, Failure> {
    let mut file = fs::File::open(path).map_err(|e| io_failure(path, &e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let read = file.read(&mut buf).map_err(|e| io_failure(path, &e))?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    Ok(hex(&hasher.finalize()))
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// The comment line stamped into delimited artifacts.
pub fn digest_comment(digest: &str) -> String {
    format!("manifest sha256={digest}")
}

/// Writes `manifest.json` into `dir`: the digest alongside the manifest
/// itself, pretty-printed.
pub fn write_manifest<T: Serialize>(dir: &Path, manifest: &T) -> Result<String, Failure> {
    let digest = manifest_digest(manifest)?;
    let doc = serde_json::json!({
        "sha256": digest,
        "manifest": manifest,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc)
        .map_err(|e| Failure::Io(format!("encoding manifest: {e}")))?;
    bytes.push(b'\n');
    atomic_write(&dir.join("manifest.json"), &bytes)?;
    Ok(digest)
}

/// Writes bytes to `path` atomically: to a temporary sibling first, then
/// a rename into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_failure(path, &e))?;
    std::io::Write::write_all(&mut tmp, bytes).map_err(|e| io_failure(path, &e))?;
    tmp.persist(path)
        .map_err(|e| io_failure(path, &e.error))?;
    Ok(())
}

/// Creates `dir` (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, &e))
}

/// An IO failure annotated with the path it concerns.
pub fn io_failure(path: &Path, err: &dyn std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {err}", path.display()))
}
