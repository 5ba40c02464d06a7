use std::io::Write;
use std::path::{Path, PathBuf};

use gks_core::{GroupManager, MemberCredential, SchemeError};
use tempfile::NamedTempFile;

use crate::error::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes through a temporary file in the target directory and renames it
/// into place. The temporary file is created 0600; public files are widened
/// to 0644 before the rename.
pub fn write_atomic(path: &Path, bytes: &[u8], secret: bool) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = NamedTempFile::new_in(&dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    #[cfg(unix)]
    if !secret {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io_err(path))?;
    }
    #[cfg(not(unix))]
    let _ = secret;
    tmp.persist(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(io_err(path))
}

fn parse_err(path: &Path) -> impl FnOnce(SchemeError) -> CliError + '_ {
    move |source| CliError::Parse { path: path.to_path_buf(), source }
}

pub fn load_manager(path: &Path) -> Result<GroupManager, CliError> {
    GroupManager::decode(&read(path)?).map_err(parse_err(path))
}

pub fn load_credential(path: &Path) -> Result<MemberCredential, CliError> {
    MemberCredential::decode(&read(path)?).map_err(parse_err(path))
}

pub fn save_manager(path: &Path, gm: &GroupManager) -> Result<(), CliError> {
    write_atomic(path, &gm.encode(), true)
}

pub fn save_credential(path: &Path, c: &MemberCredential) -> Result<(), CliError> {
    write_atomic(path, &c.encode(), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[cfg(unix)]
    #[test]
    fn secret_files_are_private() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let secret = dir.path().join("s");
        let public = dir.path().join("p");
        write_atomic(&secret, b"x", true).unwrap();
        write_atomic(&public, b"y", false).unwrap();
        assert_eq!(std::fs::metadata(&secret).unwrap().permissions().mode() & 0o777, 0o600);
        assert_eq!(std::fs::metadata(&public).unwrap().permissions().mode() & 0o777, 0o644);
        write_atomic(&secret, b"z", true).unwrap();
        assert_eq!(std::fs::read(&secret).unwrap(), b"z");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
    }
}
