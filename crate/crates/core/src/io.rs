//! File formats: profile CSV (`r,u,du`), key=value metadata blocks, and
//! atomic writes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bvp::ShootingResult;
use crate::error::{Error, Result};
use crate::greenmass::{GreenProfile, MassResult};
use crate::problem::{Profile, RadialProblem};

/// 17 significant digits: lossless round trip for 64-bit floats.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact form for file names (integral radii print without a decimal).
pub fn format_float_compact(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Write via a temporary file in the same directory plus rename.
pub fn write_atomic(path: &Path, contents: &str, overwrite: bool) -> Result<()> {
    if path.exists() && !overwrite {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::AlreadyExists,
            format!("{} exists (enable overwrite to replace)", path.display()),
        )));
    }
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Profile CSV with header `r,u,du`, one row per grid node.
pub fn profile_to_csv(profile: &Profile) -> String {
    let mut out = String::from("r,u,du\n");
    for node in profile.nodes() {
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(node.r),
            format_float(node.u),
            format_float(node.du)
        ));
    }
    out
}

pub fn profile_from_csv(problem: RadialProblem, text: &str) -> Result<Profile> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut derivs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if k == 0 {
            if line != "r,u,du" {
                return Err(Error::Parse(format!("expected header `r,u,du`, got `{line}`")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("bad profile row: {line}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{s}: {e}")))
        };
        grid.push(parse(fields[0])?);
        values.push(parse(fields[1])?);
        derivs.push(parse(fields[2])?);
    }
    Profile::from_samples(problem, &grid, &values, &derivs)
}

/// key=value metadata block for a shooting result.
pub fn shooting_meta(result: &ShootingResult) -> String {
    let problem = result.profile.problem();
    format!(
        "N={}\nR={}\np={}\nmu={}\na={}\nresidual={}\nconverged={}\n",
        problem.dimension(),
        format_float(problem.radius()),
        format_float(problem.exponent()),
        format_float(problem.potential()),
        format_float(result.center_value),
        format_float(result.boundary_slope),
        result.converged
    )
}

pub fn parse_meta(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{line}`")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta")
}

/// Write the profile CSV plus its sidecar `.meta` block.
pub fn save_shooting(result: &ShootingResult, csv_path: &Path, overwrite: bool) -> Result<()> {
    write_atomic(csv_path, &profile_to_csv(&result.profile), overwrite)?;
    write_atomic(&meta_path(csv_path), &shooting_meta(result), overwrite)?;
    Ok(())
}

/// Load a profile whose problem parameters live in the sidecar `.meta`.
pub fn load_profile(csv_path: &Path) -> Result<Profile> {
    let meta_text = std::fs::read_to_string(meta_path(csv_path)).map_err(|e| {
        Error::Parse(format!(
            "missing metadata sidecar {}: {e}",
            meta_path(csv_path).display()
        ))
    })?;
    let meta = parse_meta(&meta_text)?;
    let get = |key: &str| -> Result<f64> {
        meta.get(key)
            .ok_or_else(|| Error::Parse(format!("metadata key `{key}` missing")))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("metadata key `{key}`: {e}")))
    };
    let n = get("N")? as u32;
    let problem =
        RadialProblem::with_potential(n, get("R")?, get("p")?, get("mu").unwrap_or(1.0))?;
    let text = std::fs::read_to_string(csv_path)?;
    profile_from_csv(problem, &text)
}

/// Green's function CSV with header `r,G`.
pub fn green_to_csv(green: &GreenProfile) -> String {
    let mut out = String::from("r,G\n");
    for (r, g) in green.grid().zip(green.values()) {
        out.push_str(&format!("{},{}\n", format_float(r), format_float(g)));
    }
    out
}

pub fn mass_block(mass: &MassResult) -> String {
    format!(
        "N={}\nR={}\nH={}\nextrapolation_error={}\n",
        mass.n,
        format_float(mass.radius),
        format_float(mass.mass),
        format_float(mass.extrapolation_error)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp;
    use crate::radial_ode;

    #[test]
    fn profile_csv_round_trip() {
        let problem = RadialProblem::new(4, 1.0, 3.0).unwrap();
        let profile = radial_ode::integrate(&problem, 0.8, 1.0, 1e-10).unwrap();
        let csv = profile_to_csv(&profile);
        assert!(csv.starts_with("r,u,du\n"));
        let back = profile_from_csv(problem, &csv).unwrap();
        assert_eq!(back.len(), profile.len());
        for (a, b) in profile.nodes().iter().zip(back.nodes().iter()) {
            assert_eq!(a.r, b.r);
            assert_eq!(a.u, b.u);
            assert_eq!(a.du, b.du);
        }
    }

    #[test]
    fn shooting_files_round_trip() {
        let dir = std::env::temp_dir().join("linni_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let problem = RadialProblem::new(4, 1.0, 3.0).unwrap();
        let sr = bvp::solve_neumann(&problem, 0.9, 1.1).unwrap();
        let path = dir.join("solution.csv");
        save_shooting(&sr, &path, true).unwrap();
        let loaded = load_profile(&path).unwrap();
        assert_eq!(loaded.problem().dimension(), 4);
        assert!((loaded.value_at(0.5) - sr.profile.value_at(0.5)).abs() < 1e-14);
        // no-overwrite policy
        assert!(save_shooting(&sr, &path, false).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn float_formatting_is_lossless() {
        for x in [1.0 / 3.0, 1.1996786402577338, -2.5e-11, 6.02e23] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
