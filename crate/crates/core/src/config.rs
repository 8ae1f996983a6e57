//! Run configuration: built-in defaults overridden by a key=value config
//! file, then LINNI_* environment variables, then command-line flags.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Local error target for every integrator invocation.
    pub tolerance: f64,
    /// |u| cap marking finite-interval blow-up of an IVP.
    pub overflow_cap: f64,
    pub outdir: PathBuf,
    pub overwrite: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: 1e-10,
            overflow_cap: 1e12,
            outdir: PathBuf::from("out"),
            overwrite: false,
        }
    }
}

impl RunConfig {
    /// Apply one key=value pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "tolerance" => {
                self.tolerance = value
                    .parse()
                    .map_err(|e| Error::Parse(format!("tolerance: {e}")))?
            }
            "overflow_cap" => {
                self.overflow_cap = value
                    .parse()
                    .map_err(|e| Error::Parse(format!("overflow_cap: {e}")))?
            }
            "outdir" => self.outdir = PathBuf::from(value),
            "overwrite" => {
                self.overwrite = value
                    .parse()
                    .map_err(|e| Error::Parse(format!("overwrite: {e}")))?
            }
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Parse a line-oriented config file (`key=value`, `#` comments).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{line}`")))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Apply LINNI_TOLERANCE, LINNI_OUTDIR, LINNI_OVERFLOW_CAP.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var("LINNI_TOLERANCE") {
            self.set("tolerance", &v)?;
        }
        if let Ok(v) = std::env::var("LINNI_OUTDIR") {
            self.set("outdir", &v)?;
        }
        if let Ok(v) = std::env::var("LINNI_OVERFLOW_CAP") {
            self.set("overflow_cap", &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if !(self.overflow_cap > 0.0) {
            return Err(Error::InvalidParameter(
                "overflow cap must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Create the output directory and probe that it is writable.
    pub fn ensure_outdir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.outdir)?;
        let probe = self.outdir.join(".write_probe~");
        std::fs::write(&probe, b"ok")?;
        std::fs::remove_file(&probe)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let dir = std::env::temp_dir().join("linni_config_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.txt");
        std::fs::write(&path, "# comment\ntolerance=1e-8\noverwrite=true\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.tolerance, 1e-8);
        assert!(cfg.overwrite);
        cfg.set("tolerance", "1e-9").unwrap();
        assert_eq!(cfg.tolerance, 1e-9);
        assert!(cfg.set("bogus", "1").is_err());
        cfg.validate().unwrap();
        std::fs::remove_dir_all(&dir).ok();
    }
}
