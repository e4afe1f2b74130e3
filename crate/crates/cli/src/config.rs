//! Sectioned key–value configuration: parsing, defaults, and the
//! scenario/solver/boundary compatibility rules.
//!
//! The format is line-oriented: `[section]` headers, `key = value` pairs,
//! `#` comments. Values are scalars (`1e-4`, `true`, `periodic`) or numeric
//! arrays (`[256, 256]`). Unknown sections or keys are rejected by name.

use std::collections::BTreeMap;
use std::fmt;

use madelung_core::{Boundary, Grid, PhysicalParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    FreeGaussian,
    HarmonicGround,
    HarmonicCoherent,
    BoxEigenstate,
    PlaneWave,
    Vortex2d,
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "free_gaussian" => Self::FreeGaussian,
            "harmonic_ground" => Self::HarmonicGround,
            "harmonic_coherent" => Self::HarmonicCoherent,
            "box_eigenstate" => Self::BoxEigenstate,
            "plane_wave" => Self::PlaneWave,
            "vortex_2d" => Self::Vortex2d,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FreeGaussian => "free_gaussian",
            Self::HarmonicGround => "harmonic_ground",
            Self::HarmonicCoherent => "harmonic_coherent",
            Self::BoxEigenstate => "box_eigenstate",
            Self::PlaneWave => "plane_wave",
            Self::Vortex2d => "vortex_2d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    SchrodingerSplit,
    SchrodingerCn,
    Madelung,
    Omega,
}

impl Solver {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "schrodinger_split" => Self::SchrodingerSplit,
            "schrodinger_cn" => Self::SchrodingerCn,
            "madelung" => Self::Madelung,
            "omega" => Self::Omega,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SchrodingerSplit => "schrodinger_split",
            Self::SchrodingerCn => "schrodinger_cn",
            Self::Madelung => "madelung",
            Self::Omega => "omega",
        }
    }
}

/// Optional kinetics block: a configured run also samples a monad ensemble
/// from the final state and runs the consistency checks on it.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticsConfig {
    pub count: usize,
    pub seed: u64,
    pub tau: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub solver: Solver,
    pub dim: usize,
    pub points: Vec<usize>,
    pub length: Vec<f64>,
    pub boundary: Boundary,
    pub hbar: f64,
    pub mass: f64,
    pub n_monads: f64,
    pub omega: f64,
    pub sigma0: f64,
    pub k_wave: f64,
    pub winding: i64,
    pub level: u32,
    pub x0: f64,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub kinetics: Option<KineticsConfig>,
    pub out_dir: String,
    pub csv: bool,
    pub fields: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    /// Per-scenario defaults (grid sizes chosen so the state fills the
    /// domain without its density dropping toward the spectral noise floor).
    pub fn defaults(scenario: Scenario) -> Self {
        let mut c = ScenarioConfig {
            scenario,
            solver: Solver::SchrodingerSplit,
            dim: 1,
            points: vec![512],
            length: vec![12.0],
            boundary: Boundary::Periodic,
            hbar: 1.0,
            mass: 1.0,
            n_monads: 1.0,
            omega: 1.0,
            sigma0: 1.0,
            k_wave: 2.0,
            winding: 1,
            level: 1,
            x0: 0.5,
            dt: 1e-4,
            t_end: 0.5,
            record_stride: 500,
            kinetics: None,
            out_dir: "out".into(),
            csv: true,
            fields: false,
        };
        match scenario {
            Scenario::FreeGaussian => {}
            Scenario::HarmonicGround => {
                c.length = vec![10.0];
                c.dt = 5e-5;
                c.t_end = 2.0 * std::f64::consts::PI;
                c.record_stride = 10_000;
            }
            Scenario::HarmonicCoherent => {
                c.length = vec![8.0];
                c.dt = 4e-5;
                c.record_stride = 2500;
            }
            Scenario::BoxEigenstate => {
                c.solver = Solver::SchrodingerCn;
                c.boundary = Boundary::Box;
                c.length = vec![1.0];
                c.t_end = 0.1;
                c.record_stride = 100;
            }
            Scenario::PlaneWave => {
                c.points = vec![256];
                c.length = vec![2.0 * std::f64::consts::PI];
            }
            Scenario::Vortex2d => {
                c.dim = 2;
                c.points = vec![256, 256];
                c.length = vec![12.0, 12.0];
                c.dt = 1e-3;
                c.t_end = 0.2;
                c.record_stride = 50;
            }
        }
        c
    }

    pub fn params(&self) -> Result<PhysicalParams, ConfigError> {
        let p = PhysicalParams::new(self.hbar, self.mass, self.n_monads)
            .map_err(|e| ConfigError(e.to_string()))?;
        p.with_omega(self.omega).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.dim, &self.points, &self.length, self.boundary)
            .map_err(|e| ConfigError(e.to_string()))
    }

    /// Scenario/solver/grid compatibility matrix.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError(msg));
        if self.dim != 1 && self.dim != 2 {
            return fail(format!("grid.dim must be 1 or 2 (got {})", self.dim));
        }
        if self.points.len() != self.dim || self.length.len() != self.dim {
            return fail(format!(
                "grid.points/length must have {} entries for dim = {}",
                self.dim, self.dim
            ));
        }
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) {
            return fail(format!("evolution needs dt > 0 and t_end >= 0 (got {}, {})", self.dt, self.t_end));
        }
        if self.record_stride == 0 {
            return fail("evolution.record_stride must be >= 1".into());
        }
        match self.scenario {
            Scenario::Vortex2d => {
                if self.dim != 2 {
                    return fail("vortex_2d requires grid.dim = 2".into());
                }
                if !(0..=4).contains(&self.winding) {
                    return fail(format!("vortex winding must be 0..=4 (got {})", self.winding));
                }
                if matches!(self.solver, Solver::Madelung | Solver::Omega) {
                    return fail(
                        "vortex_2d carries a phase singularity; the hydrodynamic solvers \
                         need a single-valued unwrapped action (use schrodinger_split)"
                            .into(),
                    );
                }
            }
            Scenario::BoxEigenstate => {
                if self.solver != Solver::SchrodingerCn {
                    return fail("box_eigenstate requires solver = schrodinger_cn".into());
                }
                if self.boundary != Boundary::Box {
                    return fail("box_eigenstate requires boundary = box".into());
                }
                if self.level == 0 {
                    return fail("box_eigenstate level must be >= 1".into());
                }
            }
            Scenario::PlaneWave => {
                let mode = self.k_wave * self.length[0] / (2.0 * std::f64::consts::PI);
                if (mode - mode.round()).abs() > 1e-9 {
                    return fail(format!(
                        "plane_wave k_wave = {} is not a lattice mode of length {} \
                         (k·L/2π = {mode} must be an integer)",
                        self.k_wave, self.length[0]
                    ));
                }
            }
            _ => {
                if self.dim != 1 {
                    return fail(format!("{} requires grid.dim = 1", self.scenario.name()));
                }
            }
        }
        match self.solver {
            Solver::SchrodingerSplit | Solver::Madelung | Solver::Omega => {
                if self.boundary != Boundary::Periodic {
                    return fail(format!(
                        "solver {} needs a periodic grid (use schrodinger_cn on box grids)",
                        self.solver.name()
                    ));
                }
            }
            Solver::SchrodingerCn => {}
        }
        if matches!(self.solver, Solver::Madelung | Solver::Omega) {
            let dx = (0..self.dim)
                .map(|a| self.length[a] / self.points[a] as f64)
                .fold(f64::INFINITY, f64::min);
            let limit = madelung_core::madelung::CFL_COEFF * dx * dx * self.mass / self.hbar;
            if self.dt > limit {
                return fail(format!(
                    "dt = {} exceeds the explicit stability limit {limit:.3e} for this grid",
                    self.dt
                ));
            }
        }
        if let Some(k) = &self.kinetics {
            if k.count < madelung_core::kinetics::MIN_COUNT {
                return fail(format!(
                    "kinetics.count must be >= {} (got {})",
                    madelung_core::kinetics::MIN_COUNT,
                    k.count
                ));
            }
            if k.bins < 16 {
                return fail(format!("kinetics.bins must be >= 16 (got {})", k.bins));
            }
            if !(k.tau > 0.0) {
                return fail(format!("kinetics.tau must be > 0 (got {})", k.tau));
            }
        }
        Ok(())
    }

    /// Canonical text form (also the config echo embedded in reports).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("[scenario]\n");
        s.push_str(&format!("name = {}\n", self.scenario.name()));
        s.push_str(&format!("solver = {}\n", self.solver.name()));
        s.push_str("\n[grid]\n");
        s.push_str(&format!("dim = {}\n", self.dim));
        s.push_str(&format!("points = {}\n", fmt_usize_array(&self.points)));
        s.push_str(&format!("length = {}\n", fmt_f64_array(&self.length)));
        s.push_str(&format!(
            "boundary = {}\n",
            match self.boundary {
                Boundary::Periodic => "periodic",
                Boundary::Box => "box",
            }
        ));
        s.push_str("\n[params]\n");
        s.push_str(&format!("hbar = {}\n", self.hbar));
        s.push_str(&format!("mass = {}\n", self.mass));
        s.push_str(&format!("n_monads = {}\n", self.n_monads));
        s.push_str(&format!("omega = {}\n", self.omega));
        s.push_str(&format!("sigma0 = {}\n", self.sigma0));
        s.push_str(&format!("k_wave = {}\n", self.k_wave));
        s.push_str(&format!("winding = {}\n", self.winding));
        s.push_str(&format!("level = {}\n", self.level));
        s.push_str(&format!("x0 = {}\n", self.x0));
        s.push_str("\n[evolution]\n");
        s.push_str(&format!("dt = {}\n", self.dt));
        s.push_str(&format!("t_end = {}\n", self.t_end));
        s.push_str(&format!("record_stride = {}\n", self.record_stride));
        if let Some(k) = &self.kinetics {
            s.push_str("\n[kinetics]\n");
            s.push_str(&format!("count = {}\n", k.count));
            s.push_str(&format!("seed = {}\n", k.seed));
            s.push_str(&format!("tau = {}\n", k.tau));
            s.push_str(&format!("bins = {}\n", k.bins));
        }
        s.push_str("\n[output]\n");
        s.push_str(&format!("dir = {}\n", self.out_dir));
        s.push_str(&format!("csv = {}\n", self.csv));
        s.push_str(&format!("fields = {}\n", self.fields));
        s
    }
}

fn fmt_usize_array(v: &[usize]) -> String {
    if v.len() == 1 {
        format!("{}", v[0])
    } else {
        format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
    }
}

fn fmt_f64_array(v: &[f64]) -> String {
    if v.len() == 1 {
        format!("{}", v[0])
    } else {
        format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
    }
}

/// Raw sectioned key–value scan: (section, key) -> value text.
fn scan(text: &str) -> Result<BTreeMap<(String, String), String>, ConfigError> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "line {}: expected `key = value`, got {raw:?}",
                lineno + 1
            )));
        };
        if section.is_empty() {
            return Err(ConfigError(format!(
                "line {}: key {:?} appears before any [section]",
                lineno + 1,
                key.trim()
            )));
        }
        let prev = out.insert(
            (section.clone(), key.trim().to_string()),
            value.trim().to_string(),
        );
        if prev.is_some() {
            return Err(ConfigError(format!(
                "duplicate key {:?} in section [{}]",
                key.trim(),
                section
            )));
        }
    }
    Ok(out)
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError(format!("[{section}] {key}: expected a number, got {v:?}")))
}

fn parse_usize(section: &str, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>()
        .map_err(|_| ConfigError(format!("[{section}] {key}: expected a non-negative integer, got {v:?}")))
}

fn parse_bool(section: &str, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError(format!("[{section}] {key}: expected true or false, got {v:?}"))),
    }
}

fn parse_usize_array(section: &str, key: &str, v: &str) -> Result<Vec<usize>, ConfigError> {
    if let Some(inner) = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        inner
            .split(',')
            .map(|s| parse_usize(section, key, s.trim()))
            .collect()
    } else {
        Ok(vec![parse_usize(section, key, v)?])
    }
}

fn parse_f64_array(section: &str, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    if let Some(inner) = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        inner.split(',').map(|s| parse_f64(section, key, s.trim())).collect()
    } else {
        Ok(vec![parse_f64(section, key, v)?])
    }
}

/// Parse a config text: the scenario name selects the defaults table, every
/// other key overrides one field, and unknown keys are rejected by name.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let map = scan(text)?;
    let scenario_name = map
        .get(&("scenario".to_string(), "name".to_string()))
        .ok_or_else(|| ConfigError("missing required key [scenario] name".into()))?;
    let scenario = Scenario::parse(scenario_name).ok_or_else(|| {
        ConfigError(format!(
            "[scenario] name: unknown scenario {scenario_name:?} (expected one of \
             free_gaussian, harmonic_ground, harmonic_coherent, box_eigenstate, \
             plane_wave, vortex_2d)"
        ))
    })?;
    let mut c = ScenarioConfig::defaults(scenario);
    let mut grid_explicit = false;

    for ((section, key), value) in &map {
        match (section.as_str(), key.as_str()) {
            ("scenario", "name") => {}
            ("scenario", "solver") => {
                c.solver = Solver::parse(value).ok_or_else(|| {
                    ConfigError(format!(
                        "[scenario] solver: unknown solver {value:?} (expected one of \
                         schrodinger_split, schrodinger_cn, madelung, omega)"
                    ))
                })?;
            }
            ("grid", "dim") => c.dim = parse_usize(section, key, value)?,
            ("grid", "points") => {
                c.points = parse_usize_array(section, key, value)?;
                grid_explicit = true;
            }
            ("grid", "length") => {
                c.length = parse_f64_array(section, key, value)?;
                grid_explicit = true;
            }
            ("grid", "boundary") => {
                c.boundary = match value.as_str() {
                    "periodic" => Boundary::Periodic,
                    "box" => Boundary::Box,
                    _ => {
                        return Err(ConfigError(format!(
                            "[grid] boundary: expected periodic or box, got {value:?}"
                        )))
                    }
                };
            }
            ("params", "hbar") => c.hbar = parse_f64(section, key, value)?,
            ("params", "mass") => c.mass = parse_f64(section, key, value)?,
            ("params", "n_monads") => c.n_monads = parse_f64(section, key, value)?,
            ("params", "omega") => c.omega = parse_f64(section, key, value)?,
            ("params", "sigma0") => c.sigma0 = parse_f64(section, key, value)?,
            ("params", "k_wave") => c.k_wave = parse_f64(section, key, value)?,
            ("params", "winding") => {
                c.winding = value.parse::<i64>().map_err(|_| {
                    ConfigError(format!("[params] winding: expected an integer, got {value:?}"))
                })?;
            }
            ("params", "level") => {
                c.level = value.parse::<u32>().map_err(|_| {
                    ConfigError(format!("[params] level: expected a positive integer, got {value:?}"))
                })?;
            }
            ("params", "x0") => c.x0 = parse_f64(section, key, value)?,
            ("evolution", "dt") => c.dt = parse_f64(section, key, value)?,
            ("evolution", "t_end") => c.t_end = parse_f64(section, key, value)?,
            ("evolution", "record_stride") => c.record_stride = parse_usize(section, key, value)?,
            ("kinetics", _) => {} // handled as a block below
            ("output", "dir") => c.out_dir = value.clone(),
            ("output", "csv") => c.csv = parse_bool(section, key, value)?,
            ("output", "fields") => c.fields = parse_bool(section, key, value)?,
            _ => {
                return Err(ConfigError(format!("unknown key {key:?} in section [{section}]")));
            }
        }
    }

    // the kinetics block is all-or-nothing with defaults inside
    let kin_keys: Vec<&str> = map
        .keys()
        .filter(|(s, _)| s == "kinetics")
        .map(|(_, k)| k.as_str())
        .collect();
    if !kin_keys.is_empty() {
        let mut kin = KineticsConfig { count: 100_000, seed: 1, tau: 0.5, bins: 50 };
        for key in kin_keys {
            let value = &map[&("kinetics".to_string(), key.to_string())];
            match key {
                "count" => kin.count = parse_usize("kinetics", key, value)?,
                "seed" => {
                    kin.seed = value.parse::<u64>().map_err(|_| {
                        ConfigError(format!("[kinetics] seed: expected an integer, got {value:?}"))
                    })?;
                }
                "tau" => kin.tau = parse_f64("kinetics", key, value)?,
                "bins" => kin.bins = parse_usize("kinetics", key, value)?,
                _ => {
                    return Err(ConfigError(format!("unknown key {key:?} in section [kinetics]")));
                }
            }
        }
        c.kinetics = Some(kin);
    }

    // an explicit 2-D dim with scalar defaults needs expanded arrays
    if c.dim == 2 && !grid_explicit && c.points.len() == 1 {
        c.points = vec![c.points[0], c.points[0]];
        c.length = vec![c.length[0], c.length[0]];
    }

    c.validate()?;
    Ok(c)
}
