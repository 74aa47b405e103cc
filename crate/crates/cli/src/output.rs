//! All-or-nothing artifact writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Contents for one destination; `None` means standard output.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes every file artifact through a temporary sibling and renames them
/// only once all writes succeeded. Anything written is removed on failure.
/// Standard-output artifacts are printed after the files are in place.
pub fn emit(artifacts: &[Artifact]) -> std::io::Result<()> {
    let files: Vec<(&Path, &str)> = artifacts
        .iter()
        .filter_map(|a| a.path.as_deref().map(|p| (p, a.contents.as_str())))
        .collect();
    let mut staged: Vec<PathBuf> = Vec::new();
    let staging = files.iter().try_for_each(|(path, contents)| {
        let tmp = temp_path(path);
        staged.push(tmp.clone());
        fs::write(&tmp, contents)
    });
    if let Err(e) = staging {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
        return Err(e);
    }
    let mut placed: Vec<&Path> = Vec::new();
    for ((path, _), tmp) in files.iter().zip(&staged) {
        if let Err(e) = fs::rename(tmp, path) {
            for p in &placed {
                let _ = fs::remove_file(p);
            }
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e);
        }
        placed.push(path);
    }
    let mut stdout = std::io::stdout().lock();
    for a in artifacts.iter().filter(|a| a.path.is_none()) {
        stdout.write_all(a.contents.as_bytes())?;
    }
    stdout.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        emit(&[
            Artifact {
                path: Some(a.clone()),
                contents: "x\n".into(),
            },
            Artifact {
                path: Some(b.clone()),
                contents: "y\n".into(),
            },
        ])
        .unwrap();
        assert_eq!(fs::read_to_string(a).unwrap(), "x\n");
        assert_eq!(fs::read_to_string(b).unwrap(), "y\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }

    #[test]
    fn failed_write_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("missing").join("b.csv");
        let err = emit(&[
            Artifact {
                path: Some(a.clone()),
                contents: "x\n".into(),
            },
            Artifact {
                path: Some(b),
                contents: "y\n".into(),
            },
        ]);
        assert!(err.is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
