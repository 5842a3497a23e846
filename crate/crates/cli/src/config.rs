//! Settings merged from a `key = value` file and command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use preproj::quiver::QuiverType;
use preproj::tables::Reading;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaSource {
    Synthetic,
    Engine,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub quiver_type: Option<QuiverType>,
    pub max_degree: usize,
    pub period: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub index_bound: i64,
    pub shift_bound: i64,
    pub coxeter: Option<i64>,
    pub meta: MetaSource,
    pub reading: Reading,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            quiver_type: None,
            max_degree: 8,
            period: 1,
            format: Format::Text,
            out: None,
            threads: 1,
            index_bound: 2,
            shift_bound: 2,
            coxeter: None,
            meta: MetaSource::Synthetic,
            reading: Reading::Printed,
        }
    }
}

/// Raw overrides, as read from flags or a file.
pub type Overrides = BTreeMap<String, String>;

pub fn read_file(path: &Path) -> Result<Overrides, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_file(&text)
}

pub fn parse_file(text: &str) -> Result<Overrides, String> {
    let mut out = Overrides::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

impl Config {
    /// Applies `file` and then `flags`; later sources win.
    pub fn resolve(file: &Overrides, flags: &Overrides) -> Result<Self, String> {
        let mut c = Config::default();
        for src in [file, flags] {
            for (k, v) in src {
                c.set(k, v)?;
            }
        }
        Ok(c)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |what: &str| format!("invalid {key} `{value}`: {what}");
        let int = |min: i64| -> Result<i64, String> {
            let n: i64 = value.parse().map_err(|_| bad("expected an integer"))?;
            if n < min {
                return Err(bad(&format!("must be at least {min}")));
            }
            Ok(n)
        };
        match key {
            "type" => self.quiver_type = Some(value.parse().map_err(|e| format!("{e}"))?),
            "max-degree" => self.max_degree = int(2)? as usize,
            "period" => self.period = int(0)? as usize,
            "threads" => self.threads = int(1)? as usize,
            "index-bound" => self.index_bound = int(0)?,
            "shift-bound" => self.shift_bound = int(0)?,
            "coxeter" => self.coxeter = Some(int(3)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "text" => Format::Text,
                    "json" => Format::Json,
                    _ => return Err(bad("expected text or json")),
                }
            }
            "meta" => {
                self.meta = match value {
                    "synthetic" => MetaSource::Synthetic,
                    "engine" => MetaSource::Engine,
                    _ => return Err(bad("expected synthetic or engine")),
                }
            }
            "reading" => {
                self.reading = match value {
                    "printed" => Reading::Printed,
                    "corrected" => Reading::Corrected,
                    _ => return Err(bad("expected printed or corrected")),
                }
            }
            _ => return Err(format!("unknown setting `{key}`")),
        }
        Ok(())
    }

    pub fn require_type(&self) -> Result<QuiverType, String> {
        self.quiver_type.ok_or_else(|| "a quiver type is required (--type)".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(pairs: &[(&str, &str)]) -> Overrides {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_win_over_file() {
        let file = parse_file("type = A3\nmax_degree = 6 # comment\n\nthreads=4").unwrap();
        let c = Config::resolve(&file, &o(&[("max-degree", "5")])).unwrap();
        assert_eq!(c.quiver_type.unwrap().to_string(), "A3");
        assert_eq!(c.max_degree, 5);
        assert_eq!(c.threads, 4);
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(Config::resolve(&o(&[("max-degree", "1")]), &o(&[])).is_err());
        assert!(Config::resolve(&o(&[("index-bound", "-1")]), &o(&[])).is_err());
        assert!(Config::resolve(&o(&[("format", "xml")]), &o(&[])).is_err());
        assert!(Config::resolve(&o(&[("colour", "red")]), &o(&[])).is_err());
        assert!(parse_file("no equals sign").is_err());
    }
}
