use std::path::{Path, PathBuf};
use std::str::FromStr;

use rug::Integer;
use serde::Deserialize;
use symval_core::error::{Error, Result};
use symval_core::satake::BadPrimeMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub precision_bits: u32,
    pub coefficient_budget: usize,
    pub bad_prime_mode: BadPrimeMode,
    pub height_cap: Integer,
    pub output_format: OutputFormat,
    pub parallelism: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision_bits: 192,
            coefficient_budget: 100_000,
            bad_prime_mode: BadPrimeMode::Partial,
            height_cap: symval_core::verify::default_height_cap(),
            output_format: OutputFormat::Text,
            parallelism: 1,
        }
    }
}

/// Keys a config file may set; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    precision_bits: Option<u32>,
    coefficient_budget: Option<usize>,
    bad_prime_mode: Option<String>,
    height_cap: Option<HeightCap>,
    output_format: Option<OutputFormat>,
    parallelism: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum HeightCap {
    Int(i64),
    Text(String),
}

/// Command-line values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub precision_bits: Option<u32>,
    pub coefficient_budget: Option<usize>,
    pub bad_prime_mode: Option<String>,
    pub height_cap: Option<String>,
    pub output_format: Option<OutputFormat>,
    pub parallelism: Option<usize>,
}

/// Accepts "1000", "10^30" and "1e30".
pub fn parse_height_cap(text: &str) -> Result<Integer> {
    use rug::ops::Pow;
    let t = text.trim();
    let bad = || Error::Configuration(format!("height cap {text:?} is not a positive integer"));
    let int = |s: &str| Integer::from_str(s.trim()).map_err(|_| bad());
    let value = if let Some((b, e)) = t.split_once('^') {
        let exp: u32 = e.trim().parse().map_err(|_| bad())?;
        int(b)?.pow(exp)
    } else if let Some((m, e)) = t.split_once(['e', 'E']) {
        let exp: u32 = e.trim().parse().map_err(|_| bad())?;
        int(m)? * Integer::from(10).pow(exp)
    } else {
        int(t)?
    };
    if value <= 0 {
        return Err(bad());
    }
    Ok(value)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn apply_file(cfg: &mut Config, text: &str, origin: &Path) -> Result<()> {
    let file: FileConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        Error::Configuration(format!("{}: line {line}: {}", origin.display(), e.message()))
    })?;
    if let Some(v) = file.precision_bits {
        cfg.precision_bits = v;
    }
    if let Some(v) = file.coefficient_budget {
        cfg.coefficient_budget = v;
    }
    if let Some(v) = file.bad_prime_mode {
        cfg.bad_prime_mode = v.parse()?;
    }
    if let Some(v) = file.height_cap {
        cfg.height_cap = match v {
            HeightCap::Int(n) => parse_height_cap(&n.to_string())?,
            HeightCap::Text(s) => parse_height_cap(&s)?,
        };
    }
    if let Some(v) = file.output_format {
        cfg.output_format = v;
    }
    if let Some(v) = file.parallelism {
        cfg.parallelism = v;
    }
    Ok(())
}

fn validate(cfg: &Config) -> Result<()> {
    if cfg.precision_bits < 64 {
        return Err(Error::Configuration(format!(
            "precision_bits must be at least 64, got {}",
            cfg.precision_bits
        )));
    }
    if cfg.coefficient_budget < 16 {
        return Err(Error::Configuration(format!(
            "coefficient_budget must be at least 16, got {}",
            cfg.coefficient_budget
        )));
    }
    if cfg.parallelism == 0 {
        return Err(Error::Configuration("parallelism must be at least 1".into()));
    }
    Ok(())
}

/// Defaults, then the file (explicit path, else $SYMVAL_CONFIG), then flags.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<Config> {
    let mut cfg = Config::default();
    let path: Option<PathBuf> = path
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("SYMVAL_CONFIG").map(PathBuf::from));
    if let Some(p) = path {
        // an absent file means defaults
        if p.exists() {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| Error::Configuration(format!("{}: {e}", p.display())))?;
            apply_file(&mut cfg, &text, &p)?;
        }
    }
    if let Some(v) = overrides.precision_bits {
        cfg.precision_bits = v;
    }
    if let Some(v) = overrides.coefficient_budget {
        cfg.coefficient_budget = v;
    }
    if let Some(v) = &overrides.bad_prime_mode {
        cfg.bad_prime_mode = v.parse()?;
    }
    if let Some(v) = &overrides.height_cap {
        cfg.height_cap = parse_height_cap(v)?;
    }
    if let Some(v) = overrides.output_format {
        cfg.output_format = v;
    }
    if let Some(v) = overrides.parallelism {
        cfg.parallelism = v;
    }
    validate(&cfg)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_text(text: &str, o: &Overrides) -> Result<Config> {
        let dir = std::env::temp_dir().join(format!("symval-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(format!("{}.toml", text.len()));
        std::fs::write(&p, text).unwrap();
        load_config(Some(&p), o)
    }

    #[test]
    fn defaults_when_absent() {
        let cfg = load_config(Some(Path::new("/nonexistent/symval.toml")), &Overrides::default()).unwrap();
        assert_eq!(cfg, Config::default());
    }

    #[test]
    fn flags_win() {
        let o = Overrides {
            precision_bits: Some(150),
            ..Default::default()
        };
        let cfg = from_text("precision_bits = 300\n", &o).unwrap();
        assert_eq!(cfg.precision_bits, 150);
        let cfg = from_text("precision_bits = 300\n", &Overrides::default()).unwrap();
        assert_eq!(cfg.precision_bits, 300);
    }

    #[test]
    fn rejects_low_precision() {
        assert!(from_text("precision_bits = 32\n", &Overrides::default()).is_err());
    }

    #[test]
    fn malformed_reports_line() {
        let err = from_text("precision_bits = 200\nheight_cap = [\n", &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("line 2") || err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn height_caps() {
        assert_eq!(parse_height_cap("10^3").unwrap(), 1000);
        assert_eq!(parse_height_cap("1e3").unwrap(), 1000);
        assert_eq!(parse_height_cap("77").unwrap(), 77);
        assert!(parse_height_cap("-4").is_err());
    }
}
