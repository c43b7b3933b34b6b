use std::path::{Path, PathBuf};
use std::str::FromStr;

use manhattan::thermo::Tolerances;
use manhattan::{Error, Result};

/// `lo:hi:count` sampling of an interval, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("grid `{s}` is not of the form lo:hi:count"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid `{s}`: {e}"));
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("grid `{s}`: {e}"))?;
        Ok(Grid {
            lo: num(lo)?,
            hi: num(hi)?,
            count,
        })
    }
}

/// Validated settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub fixture: PathBuf,
    pub base: String,
    pub target: String,
    pub horizon: usize,
    pub cone_radius: Option<usize>,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub automaton: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.cone_radius.unwrap_or(1);
        if k == 0 {
            return Err(Error::Invalid("cone radius must be at least 1".into()));
        }
        if self.horizon < k + 2 {
            return Err(Error::Invalid(format!(
                "horizon {} must be at least cone radius + 2 = {}",
                self.horizon,
                k + 2
            )));
        }
        if self.grid.count < 2 {
            return Err(Error::Invalid("grid count must be at least 2".into()));
        }
        if !(self.grid.lo < self.grid.hi) {
            return Err(Error::Invalid(format!(
                "grid needs lo < hi, got {}:{}",
                self.grid.lo, self.grid.hi
            )));
        }
        if !(self.tolerances.perron > 0.0) {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn default_fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// A fixture argument is a path if one exists, otherwise a name looked up
/// as `<name>.fix` in `MANHATTAN_FIXTURE_DIR` or the bundled fixtures.
pub fn resolve_fixture(arg: &str) -> Result<PathBuf> {
    let direct = Path::new(arg);
    if direct.is_file() {
        return Ok(direct.to_path_buf());
    }
    let dir = std::env::var_os("MANHATTAN_FIXTURE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(default_fixture_dir);
    let file = if arg.ends_with(".fix") {
        dir.join(arg)
    } else {
        dir.join(format!("{arg}.fix"))
    };
    if file.is_file() {
        Ok(file)
    } else {
        Err(Error::Invalid(format!(
            "fixture `{arg}` not found (looked in {})",
            dir.display()
        )))
    }
}
