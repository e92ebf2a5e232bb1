//! Run configurations.
//!
//! One `section.key = value` assignment per line; `#` starts a comment.
//! Lists are comma separated. Every error names the offending line.
//!
//! ```text
//! model.m = 20
//! model.nu = 0.5
//! model.growth = affine      # affine | rational | zero
//! model.g0 = 1
//! model.p_M = 1
//! grid.geometry = cartesian  # cartesian | radial
//! grid.x_min = -1
//! grid.x_max = 1
//! grid.n_cells = 200
//! initial.preset = two-bump
//! initial.height = 0.6
//! stepping.dt = auto
//! stepping.t_end = 0.2
//! stepping.snapshot_times = 0.05, 0.1, 0.2
//! output.formats = csv, svg
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::barriers::{BarrierKind, PairSpec};
use crate::diagnostics::LemmaId;
use crate::error::{Error, Result};
use crate::grid::{Geometry, Grid};
use crate::model::{GrowthLaw, ModelParams};
use crate::pme::{Scheme, StepControl, TimeStep};
use crate::presets::Preset;

const SECTIONS: [&str; 8] = ["model", "grid", "initial", "stepping", "output", "converge", "barrier", "lemma"];

fn known_key(section: &str, key: &str) -> bool {
    let keys: &[&str] = match section {
        "model" => &["m", "nu", "growth", "g0", "p_M", "M0", "rho_L"],
        "grid" => &["geometry", "dim", "x_min", "x_max", "r_max", "n_cells"],
        // preset parameters are checked against the chosen preset
        "initial" => return true,
        "stepping" => &["dt", "t_end", "snapshot_times", "snapshots", "scheme"],
        "output" => &["directory", "formats", "width", "height", "title"],
        "converge" => &["m_values"],
        "barrier" => &[
            "kind", "m", "a0", "tolerance", "fraction", "dim", "radius", "speed", "t_end", "samples",
            "rho_far", "decay", "outer_width", "n_inner", "n_outer", "dt",
        ],
        "lemma" => &["checks", "n_trials"],
        _ => &[],
    };
    keys.contains(&key)
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw assignments keyed by `(section, key)`.
#[derive(Debug, Default)]
struct Entries {
    map: BTreeMap<(String, String), Entry>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (lhs, rhs) = body
                .split_once('=')
                .ok_or_else(|| Error::config(line, format!("expected `section.key = value`, got `{body}`")))?;
            let (section, key) = lhs
                .trim()
                .split_once('.')
                .ok_or_else(|| Error::config(line, format!("key `{}` has no section", lhs.trim())))?;
            let (section, key, value) = (section.trim(), key.trim(), rhs.trim());
            if !SECTIONS.contains(&section) {
                return Err(Error::config(line, format!("unknown section: {section}")));
            }
            if key.is_empty() || !known_key(section, key) {
                return Err(Error::config(line, format!("unknown key: {section}.{key}")));
            }
            if value.is_empty() {
                return Err(Error::config(line, format!("{section}.{key} has no value")));
            }
            let entry = Entry {
                value: value.to_string(),
                line,
            };
            if let Some(prev) = map.insert((section.to_string(), key.to_string()), entry) {
                return Err(Error::config(
                    line,
                    format!("duplicate key {section}.{key} (first set on line {})", prev.line),
                ));
            }
        }
        Ok(Entries { map })
    }

    fn has_section(&self, section: &str) -> bool {
        self.map.keys().any(|(s, _)| s == section)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.map.get(&(section.to_string(), key.to_string()))
    }

    /// First line of a section, for errors about the section as a whole.
    fn section_line(&self, section: &str) -> Option<usize> {
        self.map
            .iter()
            .filter(|((s, _), _)| s == section)
            .map(|(_, e)| e.line)
            .min()
    }

    fn in_section<'a>(&'a self, section: &'a str) -> impl Iterator<Item = (&'a str, &'a Entry)> + 'a {
        self.map
            .iter()
            .filter(move |((s, _), _)| s == section)
            .map(|((_, k), e)| (k.as_str(), e))
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        self.get(section, key).map_or(Ok(default), parse_f64)
    }

    fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse()
                .map_err(|_| Error::config(e.line, format!("expected a nonnegative integer, got `{}`", e.value))),
        }
    }

    fn str_or<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).map_or(default, |e| e.value.as_str())
    }

    fn line_or(&self, section: &str, key: &str) -> usize {
        self.get(section, key)
            .map(|e| e.line)
            .or_else(|| self.section_line(section))
            .unwrap_or(0)
    }
}

fn parse_f64(e: &Entry) -> Result<f64> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(e.line, format!("expected a finite number, got `{}`", e.value)))
}

fn parse_list(e: &Entry) -> Result<Vec<f64>> {
    e.value
        .split(',')
        .map(|s| {
            parse_f64(&Entry {
                value: s.trim().to_string(),
                line: e.line,
            })
        })
        .collect()
}

/// Attaches a line number to a validation error from another module.
fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        Error::InvalidParameter(m) | Error::InvalidData(m) => Error::config(line, m),
        other => Error::config(line, other.to_string()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Preset(Preset),
    /// CSV file whose `rho` column holds one value per cell.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub csv: bool,
    pub svg: bool,
    pub width: u32,
    pub height: u32,
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConfig {
    pub pair: PairSpec,
    pub kind: BarrierKind,
    pub m: f64,
    /// `None` selects the constant automatically.
    pub a0: Option<f64>,
    pub tolerance: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaConfig {
    pub checks: Vec<LemmaId>,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: Grid,
    pub initial: InitialData,
    pub stepping: StepControl,
    pub output: OutputConfig,
    pub m_values: Vec<f64>,
    pub barrier: BarrierConfig,
    pub lemma: LemmaConfig,
}

pub const ALL_LEMMAS: [LemmaId; 6] = [
    LemmaId::PressureBound,
    LemmaId::NucleationTiming,
    LemmaId::ShrinkSpeed,
    LemmaId::ExpansionBound,
    LemmaId::InitialMotion,
    LemmaId::Comparison,
];

/// Parses and validates a configuration. Relative CSV paths are resolved
/// against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<RunConfig> {
    let e = Entries::parse(text)?;
    if !e.has_section("model") {
        return Err(Error::config_global("missing section: model"));
    }
    let model = parse_model(&e)?;
    let grid = parse_grid(&e)?;
    let initial = parse_initial(&e, base, model.nu)?;
    let stepping = parse_stepping(&e, model.m)?;
    let output = parse_output(&e)?;
    let m_values = match e.get("converge", "m_values") {
        None => vec![10.0, 20.0, 40.0, 80.0],
        Some(entry) => {
            let v = parse_list(entry)?;
            if v.len() < 2 || v.windows(2).any(|w| w[1] <= w[0]) || v[0] <= 1.0 {
                return Err(Error::config(entry.line, "m_values must be increasing, above 1, at least two"));
            }
            v
        }
    };
    let barrier = parse_barrier(&e, &model)?;
    let lemma = parse_lemma(&e)?;
    Ok(RunConfig {
        model,
        grid,
        initial,
        stepping,
        output,
        m_values,
        barrier,
        lemma,
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_in(text, Path::new("."))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Error::config_global(format!("cannot read {}: {err}", path.display())))?;
    parse_config_in(&text, path.parent().unwrap_or(Path::new(".")))
}

fn parse_model(e: &Entries) -> Result<ModelParams> {
    let required = |key: &str| {
        e.get("model", key)
            .ok_or_else(|| Error::config(e.section_line("model").unwrap_or(0), format!("missing key: model.{key}")))
            .and_then(parse_f64)
    };
    let m = required("m")?;
    if m <= 1.0 {
        return Err(Error::config(e.line_or("model", "m"), format!("m must be > 1, got {m}")));
    }
    let nu = required("nu")?;
    if nu <= 0.0 {
        return Err(Error::config(e.line_or("model", "nu"), "nu must be > 0 (ν=0 case not treated)"));
    }
    let g0 = e.f64_or("model", "g0", 1.0)?;
    let p_max = e.f64_or("model", "p_M", 1.0)?;
    let growth = match e.str_or("model", "growth", "affine") {
        "affine" => at_line(e.line_or("model", "g0"), GrowthLaw::affine(g0, p_max))?,
        "rational" => at_line(e.line_or("model", "g0"), GrowthLaw::rational(g0, p_max))?,
        "zero" => GrowthLaw::Zero,
        other => {
            return Err(Error::config(
                e.line_or("model", "growth"),
                format!("unknown growth law `{other}` (expected affine, rational or zero)"),
            ))
        }
    };
    let rho_l = e.f64_or("model", "rho_L", 0.0)?;
    if !(0.0..1.0).contains(&rho_l) {
        return Err(Error::config(e.line_or("model", "rho_L"), format!("rho_L must lie in [0, 1), got {rho_l}")));
    }
    let m0 = e.f64_or("model", "M0", p_max)?;
    at_line(e.line_or("model", "M0"), ModelParams::new(m, nu, growth, rho_l, m0))
}

fn parse_grid(e: &Entries) -> Result<Grid> {
    let n = e.usize_or("grid", "n_cells", 200)?;
    let line = e.line_or("grid", "n_cells");
    match e.str_or("grid", "geometry", "cartesian") {
        "cartesian" => {
            for key in ["dim", "r_max"] {
                if let Some(entry) = e.get("grid", key) {
                    return Err(Error::config(entry.line, format!("grid.{key} applies to radial grids only")));
                }
            }
            let a = e.f64_or("grid", "x_min", -1.0)?;
            let b = e.f64_or("grid", "x_max", 1.0)?;
            at_line(line, Grid::new(Geometry::Cartesian, a, b, n))
        }
        "radial" => {
            for key in ["x_min", "x_max"] {
                if let Some(entry) = e.get("grid", key) {
                    return Err(Error::config(entry.line, format!("grid.{key} applies to cartesian grids only")));
                }
            }
            let dim = e.usize_or("grid", "dim", 2)?;
            let r = e.f64_or("grid", "r_max", 1.0)?;
            at_line(line, Grid::new(Geometry::Radial { dim: dim as u32 }, 0.0, r, n))
        }
        other => Err(Error::config(
            e.line_or("grid", "geometry"),
            format!("unknown geometry `{other}` (expected cartesian or radial)"),
        )),
    }
}

fn parse_initial(e: &Entries, base: &Path, nu: f64) -> Result<InitialData> {
    if let Some(entry) = e.get("initial", "csv") {
        if let Some((k, other)) = e.in_section("initial").find(|(k, _)| *k != "csv") {
            return Err(Error::config(other.line, format!("initial.{k} cannot be combined with initial.csv")));
        }
        let path = base.join(&entry.value);
        if !path.is_file() {
            return Err(Error::config(entry.line, format!("file not found: {}", path.display())));
        }
        return Ok(InitialData::Csv(path));
    }
    let name = e.str_or("initial", "preset", "vacuum");
    let mut preset = at_line(e.line_or("initial", "preset"), Preset::by_name(name))?;
    for (key, entry) in e.in_section("initial") {
        if key == "preset" {
            continue;
        }
        let value = parse_f64(entry)?;
        preset
            .set(key, value)
            .map_err(|_| Error::config(entry.line, format!("unknown key: initial.{key} (preset {name})")))?;
    }
    // catches out-of-range preset parameters
    at_line(
        e.line_or("initial", "preset"),
        preset.density(Grid::cartesian(0.0, 1.0, 1)?, nu),
    )?;
    Ok(InitialData::Preset(preset))
}

fn parse_stepping(e: &Entries, m: f64) -> Result<StepControl> {
    let dt = match e.get("stepping", "dt") {
        None => TimeStep::Auto,
        Some(entry) if entry.value == "auto" => TimeStep::Auto,
        Some(entry) => TimeStep::Fixed(parse_f64(entry)?),
    };
    let scheme = match e.str_or("stepping", "scheme", "auto") {
        "auto" => Scheme::default_for(m),
        "explicit" => Scheme::Explicit,
        "implicit" => Scheme::Implicit,
        other => {
            return Err(Error::config(
                e.line_or("stepping", "scheme"),
                format!("unknown scheme `{other}` (expected auto, explicit or implicit)"),
            ))
        }
    };
    let t_end = e.f64_or("stepping", "t_end", 0.1)?;
    let line = e.line_or("stepping", "t_end");
    if let (Some(a), Some(b)) = (e.get("stepping", "snapshot_times"), e.get("stepping", "snapshots")) {
        return Err(Error::config(
            a.line.max(b.line),
            "stepping.snapshot_times and stepping.snapshots are exclusive",
        ));
    }
    if let Some(entry) = e.get("stepping", "snapshot_times") {
        return at_line(entry.line, StepControl::new(dt, t_end, parse_list(entry)?, scheme));
    }
    let count = e.usize_or("stepping", "snapshots", 4)?;
    at_line(line, StepControl::uniform(dt, t_end, count, scheme))
}

fn parse_output(e: &Entries) -> Result<OutputConfig> {
    let (mut csv, mut svg) = (true, false);
    if let Some(entry) = e.get("output", "formats") {
        csv = false;
        for f in entry.value.split(',').map(str::trim) {
            match f {
                "csv" => csv = true,
                "svg" => svg = true,
                other => return Err(Error::config(entry.line, format!("unknown format `{other}` (expected csv, svg)"))),
            }
        }
    }
    let width = e.usize_or("output", "width", 640)?;
    let height = e.usize_or("output", "height", 400)?;
    if width < 100 || height < 100 {
        return Err(Error::config(e.line_or("output", "width"), "plot width and height must be >= 100"));
    }
    Ok(OutputConfig {
        directory: PathBuf::from(e.str_or("output", "directory", "out")),
        csv,
        svg,
        width: width as u32,
        height: height as u32,
        title: e.get("output", "title").map(|t| t.value.clone()),
    })
}

fn parse_barrier(e: &Entries, model: &ModelParams) -> Result<BarrierConfig> {
    let d = PairSpec::standard();
    let f = |key: &str, default: f64| e.f64_or("barrier", key, default);
    let u = |key: &str, default: usize| e.usize_or("barrier", key, default);
    let pair = PairSpec {
        dim: u("dim", d.dim as usize)? as u32,
        nu: model.nu,
        growth: model.growth,
        a0: f("radius", d.a0)?,
        speed: f("speed", d.speed)?,
        t_end: f("t_end", d.t_end)?,
        samples: u("samples", d.samples)?,
        rho_far: f("rho_far", d.rho_far)?,
        decay: f("decay", d.decay)?,
        outer_width: f("outer_width", d.outer_width)?,
        n_inner: u("n_inner", d.n_inner)?,
        n_outer: u("n_outer", d.n_outer)?,
        dt: f("dt", d.dt)?,
    };
    if e.has_section("barrier") {
        at_line(e.section_line("barrier").unwrap_or(0), pair.validate())?;
    }
    let kind = match e.str_or("barrier", "kind", "sub") {
        "sub" => BarrierKind::Sub,
        "super" => BarrierKind::Super,
        other => {
            return Err(Error::config(
                e.line_or("barrier", "kind"),
                format!("unknown barrier kind `{other}` (expected sub or super)"),
            ))
        }
    };
    let a0 = match e.get("barrier", "a0") {
        None => None,
        Some(entry) if entry.value == "auto" => None,
        Some(entry) => {
            let v = parse_f64(entry)?;
            if v < 0.0 {
                return Err(Error::config(entry.line, "barrier.a0 must be >= 0"));
            }
            Some(v)
        }
    };
    let m = f("m", 100.0)?;
    if m <= 1.0 {
        return Err(Error::config(e.line_or("barrier", "m"), "barrier.m must be > 1"));
    }
    let fraction = f("fraction", 0.99)?;
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::config(e.line_or("barrier", "fraction"), "barrier.fraction must lie in [0, 1]"));
    }
    Ok(BarrierConfig {
        pair,
        kind,
        m,
        a0,
        tolerance: f("tolerance", 1e-8)?,
        fraction,
    })
}

fn parse_lemma(e: &Entries) -> Result<LemmaConfig> {
    let checks = match e.get("lemma", "checks") {
        None => ALL_LEMMAS.to_vec(),
        Some(entry) if entry.value == "all" => ALL_LEMMAS.to_vec(),
        Some(entry) => entry
            .value
            .split(',')
            .map(str::trim)
            .map(|name| {
                ALL_LEMMAS
                    .iter()
                    .copied()
                    .find(|l| l.as_str() == name)
                    .ok_or_else(|| Error::config(entry.line, format!("unknown check `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let n_trials = e.usize_or("lemma", "n_trials", 20)?;
    if n_trials == 0 {
        return Err(Error::config(e.line_or("lemma", "n_trials"), "lemma.n_trials must be >= 1"));
    }
    Ok(LemmaConfig { checks, n_trials })
}
