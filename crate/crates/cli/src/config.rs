use std::path::{Path, PathBuf};

use bscount::efimov::{MomentumMap, ScanOptions, SeparableModel};
use bscount::radial::{OuterBoundary, PotentialSpec, RadialGrid, Scheme, ShapeKind};
use bscount::sample::DEFAULT_SEED;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Twobody,
    Kernelcheck,
    IterbsDemo,
    Efimov,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Twobody => "twobody",
            Command::Kernelcheck => "kernelcheck",
            Command::IterbsDemo => "iterbs-demo",
            Command::Efimov => "efimov",
        }
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// One run, read from a TOML document with dotted keys such as
/// `potential.kind = "yukawa"`. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Stem of the output files; defaults to the command name.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub potential: Option<PotentialSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub iterbs: IterbsSection,
    #[serde(default)]
    pub model: ModelSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Instances per BS suite.
    pub instances: usize,
    pub iterbs_instances: usize,
    pub lemma_instances: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    /// Suites to run, in output order.
    pub suites: Vec<Suite>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    BsEquality,
    BsInequality,
    IterbsInvariance,
    HsBound,
    HsExtremal,
    Domination,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::BsEquality,
        Suite::BsInequality,
        Suite::IterbsInvariance,
        Suite::HsBound,
        Suite::HsExtremal,
        Suite::Domination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::BsEquality => "bs_equality",
            Suite::BsInequality => "bs_inequality",
            Suite::IterbsInvariance => "iterbs_invariance",
            Suite::HsBound => "hs_bound",
            Suite::HsExtremal => "hs_extremal",
            Suite::Domination => "domination",
        }
    }
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            instances: 500,
            iterbs_instances: 200,
            lemma_instances: 200,
            min_dim: 2,
            max_dim: 20,
            suites: Suite::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Yukawa,
    Exponential,
    Gaussian,
    SquareWell,
    Table,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSection {
    pub kind: KindName,
    pub strength: f64,
    #[serde(default = "one")]
    pub range: f64,
    /// Two-column `(x, shape)` text file for `kind = "table"`, relative to
    /// the config file.
    #[serde(default)]
    pub table: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub kind: KindName,
    pub strength: f64,
    #[serde(default = "one")]
    pub range: f64,
    #[serde(default)]
    pub table: Option<PathBuf>,
    #[serde(default)]
    pub repulsive: Option<TermSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    UniformFd2,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterName {
    Dirichlet,
    ZeroEnergyMatched,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub r_max: f64,
    pub n: usize,
    pub scheme: SchemeName,
    pub outer: OuterName,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            r_max: 20.0,
            n: 800,
            scheme: SchemeName::UniformFd2,
            outer: OuterName::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub ells: Vec<u32>,
    pub epsilons: Vec<f64>,
    /// Also locate the critical coupling of the shape at each `ℓ`.
    pub critical: bool,
    pub critical_tol: f64,
    /// Also compare the bound-state total with the Rollnik bound.
    pub schwinger: bool,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            ells: vec![0],
            epsilons: vec![1e-3, 1e-2, 1e-1],
            critical: false,
            critical_tol: 1e-4,
            schwinger: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub gammas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub radii: Vec<f64>,
}

fn decades(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    bscount::radial::log_spaced(lo, hi, n)
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            gammas: vec![0.0, 0.1, 0.2],
            epsilons: decades(1e-3, 10.0, 10),
            radii: decades(0.05, 20.0, 10),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterbsSection {
    pub dim: usize,
    pub steps: usize,
}

impl Default for IterbsSection {
    fn default() -> Self {
        Self { dim: 12, steps: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapName {
    LogUniform,
    Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub beta: f64,
    /// `λ/λ_u`.
    pub lambda_ratio: f64,
    pub p_max: f64,
    pub n_p: usize,
    pub n_x: usize,
    pub map: MapName,
    /// Lower end of the log-uniform map, in units of `β`.
    pub p_min: f64,
    /// Parameter of the rational map.
    pub c: f64,
    pub e_floor: f64,
    pub e_ceiling: f64,
    pub points_per_decade: usize,
    pub rel_tol: f64,
    /// Repeat the scan with `p_max` doubled.
    pub cutoff_check: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        let scan = ScanOptions::default();
        Self {
            beta: 1.0,
            lambda_ratio: 1.0,
            p_max: 50.0,
            n_p: 256,
            n_x: 32,
            map: MapName::LogUniform,
            p_min: 1e-11,
            c: 3.0,
            e_floor: scan.e_floor,
            e_ceiling: scan.e_ceiling,
            points_per_decade: scan.points_per_decade,
            rel_tol: scan.rel_tol,
            cutoff_check: true,
        }
    }
}

/// Parse failure with a 1-based position in the source.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.chars().count(), |i| before[i + 1..].chars().count())
        + 1;
    (line, column)
}

/// Locates `key` on its own line as `key =` or `key.`, for semantic errors.
fn key_position(src: &str, key: &str) -> (usize, usize) {
    for (i, line) in src.lines().enumerate() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix(key) {
            let rest = rest.trim_start();
            if rest.starts_with('=') || rest.starts_with('.') {
                return (i + 1, line.len() - t.len() + 1);
            }
        }
    }
    (1, 1)
}

pub fn parse_config(src: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(src, s.start));
        ConfigError {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    cfg.validate().map_err(|(key, message)| {
        let (line, column) = key_position(src, key);
        ConfigError { line, column, message }
    })?;
    Ok(cfg)
}

type Invalid = (&'static str, String);

impl RunConfig {
    pub fn output_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.command.name().to_string())
    }

    fn validate(&self) -> Result<(), Invalid> {
        let lib = |key: &'static str| move |e: bscount::Error| (key, e.to_string());
        match self.command {
            Command::Verify => {
                let v = &self.verify;
                if v.min_dim < 2 || v.max_dim < v.min_dim {
                    return Err((
                        "verify",
                        format!("need 2 ≤ min_dim ≤ max_dim, got {}..{}", v.min_dim, v.max_dim),
                    ));
                }
            }
            Command::Twobody => {
                if self.potential.is_none() {
                    return Err(("command", "twobody needs a potential section".into()));
                }
                if self.scan.ells.is_empty() {
                    return Err(("scan", "scan.ells is empty".into()));
                }
                if self.scan.epsilons.iter().any(|e| !(*e > 0.0)) {
                    return Err(("scan", "scan.epsilons must be positive".into()));
                }
                if self.grid.scheme != SchemeName::UniformFd2 {
                    return Err(("grid", "twobody counts need grid.scheme = \"uniform_fd2\"".into()));
                }
                self.radial_grid(0).map_err(lib("grid"))?;
            }
            Command::Kernelcheck => {
                let k = &self.kernel;
                if k.gammas.is_empty() || k.epsilons.is_empty() || k.radii.is_empty() {
                    return Err(("kernel", "gammas, epsilons and radii must be nonempty".into()));
                }
            }
            Command::IterbsDemo => {
                if self.iterbs.dim < 4 || self.iterbs.steps == 0 || self.iterbs.steps > self.iterbs.dim / 2 {
                    return Err(("iterbs", "need dim ≥ 4 and 1 ≤ steps ≤ dim/2".into()));
                }
            }
            Command::Efimov => {
                self.separable_model().map_err(lib("model"))?;
                let m = &self.model;
                if !(m.e_floor < m.e_ceiling && m.e_ceiling < 0.0) {
                    return Err(("model", "need model.e_floor < model.e_ceiling < 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Attractive and repulsive terms; `base` resolves table paths.
    pub fn potential_spec(&self, base: &Path) -> Result<PotentialSpec, String> {
        let p = self.potential.as_ref().ok_or("missing potential section")?;
        let kind = shape_kind(p.kind, p.table.as_deref(), base)?;
        let mut spec = PotentialSpec::new(kind, p.strength, p.range).map_err(|e| e.to_string())?;
        if let Some(r) = &p.repulsive {
            let kind = shape_kind(r.kind, r.table.as_deref(), base)?;
            spec = spec
                .with_repulsion(kind, r.strength, r.range)
                .map_err(|e| e.to_string())?;
        }
        Ok(spec)
    }

    pub fn radial_grid(&self, ell: u32) -> bscount::Result<RadialGrid> {
        let g = &self.grid;
        Ok(RadialGrid::new(ell, g.r_max, g.n)?
            .with_scheme(match g.scheme {
                SchemeName::UniformFd2 => Scheme::UniformFd2,
                SchemeName::GaussLegendre => Scheme::GaussLegendre,
            })
            .with_outer(match g.outer {
                OuterName::Dirichlet => OuterBoundary::Dirichlet,
                OuterName::ZeroEnergyMatched => OuterBoundary::ZeroEnergyMatched,
            }))
    }

    pub fn separable_model(&self) -> bscount::Result<SeparableModel> {
        let m = &self.model;
        let base = SeparableModel::at_unitarity(m.beta, m.p_max, m.n_p)?;
        let mut model = base.with_lambda(m.lambda_ratio * base.lambda).with_map(match m.map {
            MapName::LogUniform => MomentumMap::LogUniform {
                p_min: m.p_min * m.beta,
            },
            MapName::Rational => MomentumMap::Rational { c: m.c },
        });
        model.n_x = m.n_x;
        model.validate()?;
        Ok(model)
    }

    pub fn scan_options(&self) -> ScanOptions {
        let m = &self.model;
        ScanOptions {
            e_floor: m.e_floor,
            e_ceiling: m.e_ceiling,
            points_per_decade: m.points_per_decade,
            rel_tol: m.rel_tol,
        }
    }
}

fn shape_kind(kind: KindName, table: Option<&Path>, base: &Path) -> Result<ShapeKind, String> {
    Ok(match kind {
        KindName::Yukawa => ShapeKind::Yukawa,
        KindName::Exponential => ShapeKind::Exponential,
        KindName::Gaussian => ShapeKind::Gaussian,
        KindName::SquareWell => ShapeKind::SquareWell,
        KindName::Table => {
            let path = base.join(table.ok_or("kind = \"table\" needs a table path")?);
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            ShapeKind::Table(parse_table(&text).map_err(|e| format!("{}: {e}", path.display()))?)
        }
    })
}

/// Two whitespace-separated columns per line; `#` starts a comment.
pub fn parse_table(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1));
        match cols.as_slice() {
            [x, y] => rows.push((parse(x)?, parse(y)?)),
            _ => return Err(format!("line {}: expected two columns", i + 1)),
        }
    }
    if rows.len() < 2 {
        return Err("a table needs at least two rows".into());
    }
    if rows.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err("abscissae must increase".into());
    }
    Ok(rows)
}
