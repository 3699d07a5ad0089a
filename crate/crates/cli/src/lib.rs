//! Harness behind the `dimcurse` binary: experiment configuration, the
//! algorithm registry, and one function per subcommand. Every command
//! returns a [`Report`]; [`emit`] renders it as CSV or JSON and writes it
//! (plus a manifest) to a file, or prints it.

use std::fmt;
use std::path::{Path, PathBuf};

use dimcurse::algorithms::{ConstantHalf, DiagonalBisection, LatticeMean, RandomMean};
use dimcurse::{AdaptiveCubature, Point, Query, RandomStream, Transcript};
use serde::Serialize;

pub mod commands;
pub mod verify;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "DIMCURSE_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("consistency gate failed: {0}")]
    Gate(String),
    #[error(transparent)]
    Core(#[from] dimcurse::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// 2 for bad input, 3 for a failed consistency gate, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use dimcurse::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Gate(_) => 3,
            HarnessError::Core(
                E::Domain { .. }
                | E::DimensionMismatch { .. }
                | E::BudgetExceeded { .. }
                | E::InvalidArgument(_),
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    #[value(alias = "mon")]
    Monotone,
    #[value(alias = "con")]
    Convex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One adversary experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub class: Class,
    pub d: usize,
    pub budget: usize,
    pub eps: Option<f64>,
    pub seed: u64,
    pub mc_samples: usize,
    pub out: Option<PathBuf>,
    pub algorithm: String,
    /// Query points for the `fixed` algorithm.
    pub points: Vec<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(config_err("d must be at least 1"));
        }
        if let Some(eps) = self.eps {
            check_eps(eps)?;
        }
        if self.mc_samples == 0 {
            return Err(config_err("mc-samples must be at least 1"));
        }
        if !ALGORITHMS.contains(&self.algorithm.as_str()) {
            return Err(config_err(format!(
                "unknown algorithm '{}' (known: {})",
                self.algorithm,
                ALGORITHMS.join(", ")
            )));
        }
        Ok(())
    }
}

pub fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(config_err(format!("eps must lie in (0, 1/2), got {eps}")))
    }
}

/// Registered algorithm ids.
pub const ALGORITHMS: [&str; 5] = ["const-half", "lattice", "random", "bisection", "fixed"];

/// Queries a given list of points in order and returns the mean value.
#[derive(Debug, Clone)]
pub struct FixedPoints {
    d: usize,
    points: Vec<Vec<f64>>,
}

impl FixedPoints {
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Self {
        Self { d, points }
    }
}

impl AdaptiveCubature<f64> for FixedPoints {
    fn dim(&self) -> usize {
        self.d
    }
    fn next_query(&mut self, t: &Transcript) -> Query<f64> {
        match self.points.get(t.n()) {
            Some(p) => Query::Sample(p.clone()),
            None => Query::Finish,
        }
    }
    fn finalize(&self, t: &Transcript) -> f64 {
        if t.is_empty() {
            0.5
        } else {
            t.values().sum::<f64>() / t.n() as f64
        }
    }
}

/// Builds a registered algorithm. The harness sees it only through
/// [`AdaptiveCubature`].
pub fn make_algorithm(cfg: &ExperimentConfig) -> Result<Box<dyn AdaptiveCubature<f64>>> {
    let (d, n) = (cfg.d, cfg.budget);
    Ok(match cfg.algorithm.as_str() {
        "const-half" => Box::new(ConstantHalf::new(d)),
        "lattice" => Box::new(LatticeMean::new(d, n)),
        "random" => Box::new(RandomMean::new(
            d,
            n,
            &RandomStream::new(cfg.seed).substream("algorithm"),
        )),
        "bisection" => Box::new(DiagonalBisection::new(d, n)),
        "fixed" => {
            if let Some(p) = cfg.points.iter().find(|p| p.len() != d) {
                return Err(config_err(format!(
                    "fixed point {p:?} does not have {d} coordinates"
                )));
            }
            Box::new(FixedPoints::new(d, cfg.points.clone()))
        }
        other => return Err(config_err(format!("unknown algorithm '{other}'"))),
    })
}

/// Parses `"0.1,0.2;0.5,0.5"` into points.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let coords = p
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| config_err(format!("bad coordinate '{c}': {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Point::new(coords.clone()).map_err(|e| config_err(e.to_string()))?;
            Ok(coords)
        })
        .collect()
}

/// Rendered output of a command.
#[derive(Debug, Clone)]
pub struct Report {
    /// Used for the default file name.
    pub name: &'static str,
    pub format: Format,
    pub body: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.body)
    }
}

/// Header row plus one record per row, `\n`-terminated.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn render<T: Serialize>(
    name: &'static str,
    format: Format,
    rows: &[T],
) -> Result<Report> {
    let body = match format {
        Format::Csv => to_csv(rows)?,
        Format::Json => to_json(rows)?,
    };
    Ok(Report { name, format, body })
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    args: Vec<String>,
    config: &'a C,
    seed: Option<u64>,
    output: String,
    versions: Versions,
}

#[derive(Serialize)]
struct Versions {
    dimcurse: &'static str,
    #[serde(rename = "dimcurse-cli")]
    cli: &'static str,
}

/// Where a report goes: `--out`, else `$DIMCURSE_OUT_DIR/<name>.<ext>`,
/// else standard output (`None`).
pub fn resolve_output(out: Option<&Path>, report: &Report) -> Option<PathBuf> {
    if let Some(p) = out {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(|dir| {
            PathBuf::from(dir).join(format!("{}.{}", report.name, report.format.extension()))
        })
}

/// Manifest path for an output file: `<file>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes the report and its manifest, or prints the report.
pub fn emit<C: Serialize>(
    report: &Report,
    out: Option<&Path>,
    config: &C,
    seed: Option<u64>,
) -> Result<()> {
    let Some(path) = resolve_output(out, report) else {
        print!("{}", report.body);
        return Ok(());
    };
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, &report.body)?;
    let manifest = Manifest {
        command: report.name,
        args: std::env::args().skip(1).collect(),
        config,
        seed,
        output: path.display().to_string(),
        versions: Versions {
            dimcurse: dimcurse::VERSION,
            cli: env!("CARGO_PKG_VERSION"),
        },
    };
    std::fs::write(manifest_path(&path), to_json(&manifest)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_header() {
        #[derive(Serialize)]
        struct Row {
            a: u32,
            b: f64,
        }
        let s = to_csv(&[Row { a: 1, b: 0.5 }, Row { a: 2, b: 1e-3 }]).unwrap();
        assert_eq!(s, "a,b\n1,0.5\n2,0.001\n");
    }

    #[test]
    fn points_parse_and_validate() {
        assert_eq!(parse_points("0;1").unwrap(), vec![vec![0.0], vec![1.0]]);
        assert_eq!(parse_points("0.5,0.25").unwrap(), vec![vec![0.5, 0.25]]);
        assert!(parse_points("1.5").is_err());
        assert!(parse_points("x").is_err());
        assert!(parse_points("").unwrap().is_empty());
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.csv.manifest.json")
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Gate("x".into()).exit_code(), 3);
        assert_eq!(
            HarnessError::Core(dimcurse::Error::BudgetExceeded {
                budget: 1,
                attempted: 2
            })
            .exit_code(),
            2
        );
        assert_eq!(
            HarnessError::Core(dimcurse::Error::Inconsistent("x".into())).exit_code(),
            1
        );
    }
}
