//! Run configuration: JSON file merged under command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use bandlab::{BandForm, BandSpec, FieldElement, FieldSpec, Fq, Poly, PolyRing};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

pub const DEFAULT_Q: u64 = 3;
pub const DEFAULT_BAND: &str = "0,1";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Budget(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<bandlab::Error> for CliError {
    fn from(e: bandlab::Error) -> Self {
        match e {
            bandlab::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

/// Values loaded from `--config`, looked up by long flag name.
#[derive(Debug, Default)]
pub struct FileConfig(Map<String, Value>);

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(FileConfig(map)),
            Ok(_) => Err(config_err("config file must hold a JSON object")),
            Err(e) => Err(config_err(format!("config file is not valid JSON: {e}"))),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> CliResult<Option<T>> {
        self.0
            .get(key)
            .map(|v| serde_json::from_value(v.clone()).map_err(|e| config_err(format!("config key {key:?}: {e}"))))
            .transpose()
    }

    /// The flag value if given, else the file value.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.pick(flag, key)?
            .ok_or_else(|| config_err(format!("missing required parameter --{key}")))
    }
}

/// Global flags as given on the command line.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct GlobalArgs {
    /// Field order q = p^e (odd).
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Field characteristic.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Extension degree.
    #[arg(long, global = true)]
    pub e: Option<u32>,
    /// Monic irreducible modulus over F_p, e.g. "t^2 + 1".
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Band coefficients c_0,...,c_m; tuples "(a,b)" for extension fields.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub band: Option<String>,
    /// Linear digit forms, "n:l_0,...,l_n;n':..."
    #[arg(long, global = true)]
    pub linear: Option<String>,
    /// Cap on elementary field operations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Fully resolved global configuration.
pub struct RunConfig {
    pub field: FieldSpec,
    pub ring: PolyRing,
    pub band: BandSpec,
    /// Whether a band was given rather than defaulted.
    pub band_given: bool,
    pub budget: u64,
    pub jobs: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub file: FileConfig,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> CliResult<Self> {
        let file = FileConfig::load(args.config.as_deref())?;
        let field = resolve_field(args, &file)?;
        let ring = PolyRing::new(Fq::new(field)?);
        let field = ring.field().spec().clone();
        let band_given = args.band.is_some() || file.raw("band").is_some();
        let band = match (&args.band, file.raw("band")) {
            (Some(s), _) => parse_band(&ring, s)?,
            (None, Some(Value::Object(_))) => {
                BandSpec::from_json(ring.field(), file.raw("band").unwrap())?
            }
            (None, Some(Value::String(s))) => parse_band(&ring, s)?,
            (None, Some(v)) => return Err(config_err(format!("config key \"band\": unsupported value {v}"))),
            (None, None) => parse_band(&ring, DEFAULT_BAND)?,
        };
        let linear: Option<String> = file.pick(args.linear.clone(), "linear")?;
        let band = match linear {
            Some(l) => BandSpec::new(band.c().to_vec(), parse_linear(&ring, &l)?)?,
            None => band,
        };
        let format = match args.format {
            Some(f) => f,
            None => match file.get::<String>("format")?.as_deref() {
                None | Some("jsonl") => Format::Jsonl,
                Some("csv") => Format::Csv,
                Some(other) => return Err(config_err(format!("unknown format {other:?}"))),
            },
        };
        Ok(RunConfig {
            budget: file.pick(args.budget, "budget")?.unwrap_or(bandlab::budget::DEFAULT_BUDGET),
            jobs: file.pick(args.jobs, "jobs")?.unwrap_or(0),
            seed: file.pick(args.seed, "seed")?.unwrap_or(0),
            out: file.pick(args.out.clone(), "out")?,
            format,
            band_given,
            field,
            ring,
            band,
            file,
        })
    }

    pub fn fq(&self) -> &Fq {
        self.ring.field()
    }

    pub fn form(&self) -> BandForm {
        BandForm::new(self.ring.clone(), self.band.clone())
    }

    pub fn poly(&self, s: &str) -> CliResult<Poly> {
        Ok(self.ring.parse(s)?)
    }

    pub fn element(&self, s: &str) -> CliResult<FieldElement> {
        parse_element(&self.ring, s)
    }

    pub fn format_poly(&self, f: &Poly) -> String {
        self.ring.format(f)
    }

    /// The configuration echoed into every record. Thread count is left out
    /// so that output does not depend on it.
    pub fn echo(&self, command: &str, params: Value) -> Value {
        json!({
            "command": command,
            "field": self.field,
            "band": self.band.to_json(self.fq()),
            "budget": self.budget,
            "seed": self.seed,
            "params": params,
        })
    }
}

fn resolve_field(args: &GlobalArgs, file: &FileConfig) -> CliResult<FieldSpec> {
    let q: Option<u64> = file.pick(args.q, "q")?;
    let p: Option<u32> = file.pick(args.p, "p")?;
    let e: Option<u32> = file.pick(args.e, "e")?;
    let modulus: Option<String> = file.pick(args.modulus.clone(), "modulus")?;
    let (p, e_from_q) = match (q, p) {
        (Some(q), p) => {
            let (qp, qe) = prime_power(q).ok_or_else(|| config_err(format!("q = {q} is not a prime power")))?;
            if p.is_some_and(|p| p != qp) {
                return Err(config_err(format!("--p {} disagrees with --q {q}", p.unwrap())));
            }
            (qp, Some(qe))
        }
        (None, Some(p)) => (p, None),
        (None, None) => (DEFAULT_Q as u32, None),
    };
    let e = match (e, e_from_q) {
        (Some(e), Some(qe)) if e != qe => return Err(config_err(format!("--e {e} disagrees with q = {p}^{qe}"))),
        (Some(e), _) => e,
        (None, Some(qe)) => qe,
        (None, None) => 1,
    };
    match modulus {
        None => Ok(FieldSpec::new(p, e)?),
        Some(m) => {
            let base = PolyRing::new(Fq::prime(p)?);
            let f = base.parse(&m)?;
            if f.degree() != Some(e as usize) || !f.is_monic() {
                return Err(config_err(format!("modulus {m:?} must be monic of degree {e}")));
            }
            let coeffs = f.coeffs().iter().map(|c| c.index()).collect();
            Ok(FieldSpec { p, e, modulus: coeffs })
        }
    }
}

fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((u32::try_from(p).ok()?, e))
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

pub fn parse_element(ring: &PolyRing, s: &str) -> CliResult<FieldElement> {
    let f = ring.parse(s)?;
    match f.degree() {
        None => Ok(ring.field().zero()),
        Some(0) => Ok(f.coeff(0)),
        Some(_) => Err(config_err(format!("{s:?} is not a field element"))),
    }
}

pub fn parse_band(ring: &PolyRing, s: &str) -> CliResult<BandSpec> {
    let c = split_top_level(s, ',')
        .into_iter()
        .map(|x| parse_element(ring, x))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(BandSpec::quadratic(c)?)
}

pub fn parse_linear(ring: &PolyRing, s: &str) -> CliResult<BTreeMap<usize, Vec<FieldElement>>> {
    let mut out = BTreeMap::new();
    for part in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let (n, coeffs) = part
            .split_once(':')
            .ok_or_else(|| config_err(format!("linear form {part:?} must look like n:l_0,...,l_n")))?;
        let n: usize = n.trim().parse().map_err(|_| config_err(format!("bad degree in {part:?}")))?;
        let lam = split_top_level(coeffs, ',')
            .into_iter()
            .map(|x| parse_element(ring, x))
            .collect::<CliResult<Vec<_>>>()?;
        out.insert(n, lam);
    }
    Ok(out)
}
