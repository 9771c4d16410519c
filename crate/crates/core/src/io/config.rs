//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::monitor::MonitorConfig;
use crate::solver::{Dealias, Integrator, SolverConfig};

/// Initial velocity of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitKind {
    Zero,
    TaylorGreen,
    Abc,
    /// Seeded band-limited random field (see `init.*` keys).
    Random,
}

impl std::str::FromStr for InitKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zero" => Ok(Self::Zero),
            "taylor_green" => Ok(Self::TaylorGreen),
            "abc" => Ok(Self::Abc),
            "random" => Ok(Self::Random),
            _ => Err(format!("unknown init.kind `{s}` (expected zero, taylor_green, abc or random)")),
        }
    }
}

impl std::fmt::Display for InitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Zero => "zero",
            Self::TaylorGreen => "taylor_green",
            Self::Abc => "abc",
            Self::Random => "random",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub solver: SolverConfig,
    pub monitor: MonitorConfig,
    pub init: InitKind,
    pub seed: u64,
    pub amplitude: f64,
    pub band: (usize, usize),
    pub slope: f64,
    pub output_dir: PathBuf,
    /// Every how many monitored snapshots a field file is written (0: none).
    pub snapshot_every: u64,
}

/// Every accepted key with its default (`None` for required keys).
pub const KEYS: [(&str, Option<&str>); 21] = [
    ("grid.n", None),
    ("solver.nu", None),
    ("solver.dt", None),
    ("solver.t_end", None),
    ("solver.integrator", Some("ETDRK4")),
    ("solver.dealias", Some("three_halves_pad")),
    ("monitor.p", Some("5")),
    ("monitor.r", Some("1.8")),
    ("monitor.theta", Some("0.03")),
    ("monitor.e", Some("0 0 1")),
    ("monitor.cadence", Some("1")),
    ("init.kind", None),
    ("init.seed", Some("0")),
    ("init.amplitude", Some("1")),
    ("init.kmin", Some("1")),
    ("init.kmax", Some("0")),
    ("init.slope", Some("-1.6666666666666667")),
    ("output.dir", None),
    ("output.snapshot_every", Some("1")),
    ("config.version", Some("1")),
    ("solver.form", Some("divergence")),
];

struct Entry {
    value: String,
    line: usize,
}

impl RunConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Parses `text`; `path` only labels error messages. Relative
    /// `output.dir` values are resolved against the directory of `path`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Config { path: path.to_path_buf(), line, message };
        let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
            let key = key.trim();
            let Some(&(known, _)) = KEYS.iter().find(|(k, _)| *k == key) else {
                return Err(err(line, format!("unknown key `{key}`")));
            };
            if entries.contains_key(known) {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
            entries.insert(known, Entry { value: value.trim().to_string(), line });
        }
        let get = |key: &str| -> Result<(String, usize)> {
            match entries.get(key) {
                Some(e) => Ok((e.value.clone(), e.line)),
                None => {
                    let default = KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| *d);
                    default
                        .map(|d| (d.to_string(), 0))
                        .ok_or_else(|| err(0, format!("missing required key `{key}`")))
                }
            }
        };
        fn parse_as<T: std::str::FromStr>(
            get: &dyn Fn(&str) -> Result<(String, usize)>,
            err: &dyn Fn(usize, String) -> Error,
            key: &str,
        ) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            let (v, line) = get(key)?;
            v.parse::<T>().map_err(|e| err(line, format!("{key}: cannot parse `{v}`: {e}")))
        }
        let num = |key: &str| parse_as::<f64>(&get, &err, key);
        let int = |key: &str| parse_as::<u64>(&get, &err, key);
        let line_of = |key: &str| entries.get(key).map_or(0, |e| e.line);
        let at = |key: &'static str, r: Result<()>| r.map_err(|e| err(line_of(key), e.to_string()));

        let version = int("config.version")?;
        if version != 1 {
            return Err(err(line_of("config.version"), format!("unsupported config.version {version}")));
        }
        let n = int("grid.n")? as usize;
        at("grid.n", crate::spectral::Grid::cubic(n).map(|_| ()))?;

        let mut solver = SolverConfig {
            nu: num("solver.nu")?,
            dt: num("solver.dt")?,
            t_end: num("solver.t_end")?,
            integrator: parse_as::<Integrator>(&get, &err, "solver.integrator")?,
            dealias: parse_as::<Dealias>(&get, &err, "solver.dealias")?,
            form: match get("solver.form")?.0.as_str() {
                "divergence" => crate::solver::NonlinearForm::Divergence,
                "rotational" => crate::solver::NonlinearForm::Rotational,
                other => {
                    return Err(err(line_of("solver.form"), format!("unknown solver.form `{other}` (expected divergence or rotational)")))
                }
            },
            monitor_every: 1,
            disable_nonlinearity: false,
        };

        let (e_text, e_line) = get("monitor.e")?;
        let e: Vec<f64> = e_text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|x| err(e_line, format!("monitor.e: cannot parse `{s}`: {x}"))))
            .collect::<Result<_>>()?;
        let e: [f64; 3] = e
            .try_into()
            .map_err(|v: Vec<f64>| err(e_line, format!("monitor.e needs three reals, found {}", v.len())))?;
        let monitor = MonitorConfig {
            p: num("monitor.p")?,
            r: num("monitor.r")?,
            theta: num("monitor.theta")?,
            e,
            cadence: int("monitor.cadence")?,
        };
        monitor.validate().map_err(|e| {
            let key = match &e {
                Error::OutOfRange { name: "r", .. } => "monitor.r",
                Error::OutOfRange { name: "theta", .. } => "monitor.theta",
                Error::OutOfRange { name: "cadence", .. } => "monitor.cadence",
                Error::OutOfRange { name: "p", .. } => "monitor.p",
                _ => "monitor.e",
            };
            err(line_of(key), e.to_string())
        })?;
        solver.monitor_every = monitor.cadence;
        at("solver.dt", solver.validate())?;

        let init = parse_as::<InitKind>(&get, &err, "init.kind")?;
        let kmax = match int("init.kmax")? as usize {
            0 => (n / 8).max(1),
            k => k,
        };
        let band = (int("init.kmin")? as usize, kmax);
        let limit = n / 2 - 1;
        if init == InitKind::Random && !(band.0 >= 1 && band.0 <= band.1 && band.1 <= limit) {
            return Err(err(line_of("init.kmax"), format!("init band {band:?} must satisfy 1 <= kmin <= kmax <= {limit}")));
        }
        let amplitude = num("init.amplitude")?;
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(err(line_of("init.amplitude"), format!("init.amplitude = {amplitude} must be finite and non-negative")));
        }

        let mut output_dir = PathBuf::from(get("output.dir")?.0);
        if output_dir.is_relative() {
            if let Some(parent) = path.parent() {
                output_dir = parent.join(output_dir);
            }
        }
        Ok(Self {
            n,
            solver,
            monitor,
            init,
            seed: int("init.seed")?,
            amplitude,
            band,
            slope: num("init.slope")?,
            output_dir,
            snapshot_every: int("output.snapshot_every")?,
        })
    }

    /// Canonical `key = value` text of this configuration (every key).
    pub fn to_text(&self) -> String {
        let e = self.monitor.e;
        let form = match self.solver.form {
            crate::solver::NonlinearForm::Divergence => "divergence",
            crate::solver::NonlinearForm::Rotational => "rotational",
        };
        let lines = [
            ("config.version", "1".to_string()),
            ("grid.n", self.n.to_string()),
            ("solver.nu", format!("{:?}", self.solver.nu)),
            ("solver.dt", format!("{:?}", self.solver.dt)),
            ("solver.t_end", format!("{:?}", self.solver.t_end)),
            ("solver.integrator", self.solver.integrator.to_string()),
            ("solver.dealias", self.solver.dealias.to_string()),
            ("solver.form", form.to_string()),
            ("monitor.p", format!("{:?}", self.monitor.p)),
            ("monitor.r", format!("{:?}", self.monitor.r)),
            ("monitor.theta", format!("{:?}", self.monitor.theta)),
            ("monitor.e", format!("{:?} {:?} {:?}", e[0], e[1], e[2])),
            ("monitor.cadence", self.monitor.cadence.to_string()),
            ("init.kind", self.init.to_string()),
            ("init.seed", self.seed.to_string()),
            ("init.amplitude", format!("{:?}", self.amplitude)),
            ("init.kmin", self.band.0.to_string()),
            ("init.kmax", self.band.1.to_string()),
            ("init.slope", format!("{:?}", self.slope)),
            ("output.dir", self.output_dir.display().to_string()),
            ("output.snapshot_every", self.snapshot_every.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "grid.n = 16\nsolver.nu = 0.1\nsolver.dt = 0.01\nsolver.t_end = 0.05\ninit.kind = random\noutput.dir = out\n";

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::parse(BASE, Path::new("/tmp/run.cfg")).unwrap();
        assert_eq!(c.n, 16);
        assert_eq!(c.monitor.e, [0.0, 0.0, 1.0]);
        assert_eq!(c.band, (1, 2));
        assert_eq!(c.output_dir, PathBuf::from("/tmp/out"));
        let again = RunConfig::parse(&c.to_text(), Path::new("/tmp/x.cfg")).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = format!("{BASE}# comment\nmonitor.pp = 5\n");
        let e = RunConfig::parse(&text, Path::new("a.cfg")).unwrap_err().to_string();
        assert!(e.starts_with("a.cfg:8:") && e.contains("unknown key"), "{e}");
        let text = format!("{BASE}monitor.p = 4\n");
        let e = RunConfig::parse(&text, Path::new("a.cfg")).unwrap_err().to_string();
        assert!(e.starts_with("a.cfg:7:") && e.contains("]4, 2r/(2-r)["), "{e}");
        let text = BASE.replace("grid.n = 16\n", "");
        assert!(RunConfig::parse(&text, Path::new("a.cfg")).unwrap_err().to_string().contains("grid.n"));
        let text = format!("{BASE}solver.nu = 1\n");
        assert!(RunConfig::parse(&text, Path::new("a.cfg")).unwrap_err().to_string().contains("duplicate"));
        let text = format!("{BASE}monitor.e = 0 1\n");
        assert!(RunConfig::parse(&text, Path::new("a.cfg")).is_err());
    }
}
