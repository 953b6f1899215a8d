//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Keys are applied in order,
//! so later lines (and command-line overrides) win. [`RunConfig::serialize`]
//! writes every key in a fixed order, which makes `serialize(parse(text))`
//! idempotent.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fluxvol::tables::TableId;
use fluxvol::volume::NodeLayout;
use fluxvol::{AnyField, AxisymParams, GridSpec, HelicalParams, Method, MethodOptions, Region, Tolerances};

/// A bad key or value; the message always names the key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Axisym,
    Helical,
}

/// What the printed relative error is measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// `4π²Ψ` of the axisymmetric field.
    Exact,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub field: FieldKind,
    pub axisym: AxisymParams,
    pub helical: HelicalParams,
    pub methods: Vec<Method>,
    pub region: Option<Region>,
    /// Inner label; the region anchor when unset.
    pub psi1: Option<f64>,
    pub psi2: Option<f64>,
    /// Alternative to `psi1`/`psi2`: the label of the surface through the
    /// section point `(y, 0)`. Setting one form clears the other.
    pub y1: Option<f64>,
    pub y2: Option<f64>,
    /// Explicit surfaces for `diagnostics`.
    pub levels: Vec<f64>,
    /// Ladder intervals.
    pub n: usize,
    pub separatrix_clip: Option<f64>,
    pub grid_x: Option<[f64; 2]>,
    pub grid_y: Option<[f64; 2]>,
    pub grid_counts: [usize; 2],
    pub grid_layout: NodeLayout,
    pub options: MethodOptions,
    pub table: TableId,
    pub reference: Option<Reference>,
    /// Fill the runtime column of table output (breaks byte-identical runs).
    pub timings: bool,
    /// Exit with status 2 on any numerical failure.
    pub strict: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub meta: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: FieldKind::Helical,
            axisym: AxisymParams::default(),
            helical: HelicalParams::standard(),
            methods: vec![Method::Thm3p],
            region: None,
            psi1: None,
            psi2: None,
            y1: None,
            y2: None,
            levels: Vec::new(),
            n: 20,
            separatrix_clip: None,
            grid_x: None,
            grid_y: None,
            grid_counts: [300, 300],
            grid_layout: NodeLayout::Centred,
            options: MethodOptions::default(),
            table: TableId::Table1,
            reference: None,
            timings: false,
            strict: false,
            seed: 0,
            out: None,
            meta: None,
        }
    }
}

pub const KEYS: [&str; 40] = [
    "field",
    "axisym.c",
    "axisym.r0",
    "helical.w1",
    "helical.w2",
    "helical.b0",
    "helical.big_r0",
    "helical.m",
    "helical.n",
    "helical.eps",
    "helical.zeta",
    "helical.f",
    "method",
    "region",
    "psi",
    "psi1",
    "psi2",
    "y1",
    "y2",
    "levels",
    "n",
    "separatrix_clip",
    "grid.x",
    "grid.y",
    "grid.counts",
    "grid.layout",
    "tol.rel",
    "tol.abs",
    "tol.max_step",
    "q",
    "n_avg",
    "n_g",
    "unit_density",
    "table",
    "reference",
    "timings",
    "strict",
    "seed",
    "out",
    "meta",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| ConfigError::new(key, format!("cannot parse {v:?}: {e}")))
}

fn real(key: &str, v: &str) -> Result<f64> {
    let x: f64 = num(key, v)?;
    if !x.is_finite() {
        return Err(ConfigError::new(key, format!("{v:?} is not finite")));
    }
    Ok(x)
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| num(key, s)).collect()
}

fn reals(key: &str, v: &str) -> Result<Vec<f64>> {
    let xs: Vec<f64> = list(key, v)?;
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(ConfigError::new(key, format!("{x} is not finite")));
    }
    Ok(xs)
}

fn pair<T: FromStr + Copy>(key: &str, v: &str) -> Result<[T; 2]>
where
    T::Err: fmt::Display,
{
    match list::<T>(key, v)?.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(ConfigError::new(
            key,
            format!("expected two comma-separated values, got {v:?}"),
        )),
    }
}

fn real_pair(key: &str, v: &str) -> Result<[f64; 2]> {
    let p: [f64; 2] = pair(key, v)?;
    if !(p[0].is_finite() && p[1].is_finite() && p[0] < p[1]) {
        return Err(ConfigError::new(key, format!("expected lo,hi with lo < hi, got {v:?}")));
    }
    Ok(p)
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(ConfigError::new(key, format!("expected true or false, got {v:?}"))),
    }
}

fn optional<T>(v: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    let t = v.trim();
    if t.is_empty() || t == "none" {
        Ok(None)
    } else {
        f(t).map(Some)
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(line, format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set_pair(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::new(kv, "expected `key=value`"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "field" => {
                self.field = match v.to_ascii_lowercase().as_str() {
                    "axisym" => FieldKind::Axisym,
                    "helical" => FieldKind::Helical,
                    _ => return Err(ConfigError::new(key, format!("unknown field {v:?} (axisym, helical)"))),
                }
            }
            "axisym.c" => self.axisym.c = real(key, v)?,
            "axisym.r0" => self.axisym.r0 = real(key, v)?,
            "helical.w1" => self.helical.w1 = real(key, v)?,
            "helical.w2" => self.helical.w2 = real(key, v)?,
            "helical.b0" => self.helical.b0 = real(key, v)?,
            "helical.big_r0" => self.helical.big_r0 = real(key, v)?,
            "helical.m" => self.helical.m = num(key, v)?,
            "helical.n" => self.helical.n = num(key, v)?,
            "helical.eps" => self.helical.eps = real(key, v)?,
            "helical.zeta" => self.helical.zeta = real(key, v)?,
            "helical.f" => self.helical.f = reals(key, v)?,
            "method" => {
                let m: Vec<Method> = v
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|e| ConfigError::new(key, format!("{e}"))))
                    .collect::<Result<_>>()?;
                self.methods = m;
            }
            "region" => self.region = optional(v, |s| s.parse().map_err(|e| ConfigError::new(key, format!("{e}"))))?,
            "psi" | "psi2" => {
                self.psi2 = optional(v, |s| real(key, s))?;
                if self.psi2.is_some() {
                    self.y2 = None;
                }
            }
            "psi1" => {
                self.psi1 = optional(v, |s| real(key, s))?;
                if self.psi1.is_some() {
                    self.y1 = None;
                }
            }
            "y1" => {
                self.y1 = optional(v, |s| real(key, s))?;
                if self.y1.is_some() {
                    self.psi1 = None;
                }
            }
            "y2" => {
                self.y2 = optional(v, |s| real(key, s))?;
                if self.y2.is_some() {
                    self.psi2 = None;
                }
            }
            "levels" => self.levels = reals(key, v)?,
            "n" => self.n = num(key, v)?,
            "separatrix_clip" => self.separatrix_clip = optional(v, |s| real(key, s))?,
            "grid.x" => self.grid_x = optional(v, |s| real_pair(key, s))?,
            "grid.y" => self.grid_y = optional(v, |s| real_pair(key, s))?,
            "grid.counts" => self.grid_counts = pair(key, v)?,
            "grid.layout" => {
                self.grid_layout = match v.to_ascii_lowercase().as_str() {
                    "centred" | "centered" => NodeLayout::Centred,
                    "inclusive" => NodeLayout::Inclusive,
                    _ => {
                        return Err(ConfigError::new(
                            key,
                            format!("unknown layout {v:?} (centred, inclusive)"),
                        ))
                    }
                }
            }
            "tol.rel" => self.options.tol.rel = real(key, v)?,
            "tol.abs" => self.options.tol.abs = real(key, v)?,
            "tol.max_step" => self.options.tol.max_step = real(key, v)?,
            "q" => self.options.q = num(key, v)?,
            "n_avg" => self.options.n_avg = num(key, v)?,
            "n_g" => self.options.n_g = num(key, v)?,
            "unit_density" => self.options.unit_density = boolean(key, v)?,
            "table" => self.table = v.parse().map_err(|e| ConfigError::new(key, format!("{e}")))?,
            "reference" => {
                self.reference = optional(v, |s| {
                    if s.eq_ignore_ascii_case("exact") {
                        Ok(Reference::Exact)
                    } else {
                        real(key, s).map(Reference::Value)
                    }
                })?
            }
            "timings" => self.timings = boolean(key, v)?,
            "strict" => self.strict = boolean(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "out" => self.out = optional(v, |s| Ok(PathBuf::from(s)))?,
            "meta" => self.meta = optional(v, |s| Ok(PathBuf::from(s)))?,
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    /// Every key in canonical order; parameters of the unused field model
    /// are left out.
    pub fn serialize(&self) -> String {
        let mut kv: Vec<(&str, String)> = Vec::new();
        match self.field {
            FieldKind::Axisym => {
                kv.push(("field", "axisym".into()));
                kv.push(("axisym.c", self.axisym.c.to_string()));
                kv.push(("axisym.r0", self.axisym.r0.to_string()));
            }
            FieldKind::Helical => {
                let h = &self.helical;
                kv.push(("field", "helical".into()));
                kv.push(("helical.w1", h.w1.to_string()));
                kv.push(("helical.w2", h.w2.to_string()));
                kv.push(("helical.b0", h.b0.to_string()));
                kv.push(("helical.big_r0", h.big_r0.to_string()));
                kv.push(("helical.m", h.m.to_string()));
                kv.push(("helical.n", h.n.to_string()));
                kv.push(("helical.eps", h.eps.to_string()));
                kv.push(("helical.zeta", h.zeta.to_string()));
                kv.push(("helical.f", join(&h.f)));
            }
        }
        let opt = |x: Option<f64>| x.map_or("none".to_string(), |v| v.to_string());
        let opt_pair = |x: Option<[f64; 2]>| x.map_or("none".to_string(), |p| join(&p));
        kv.push(("method", join(&self.methods)));
        kv.push(("region", self.region.map_or("none".into(), |r| r.to_string())));
        kv.push(("psi1", opt(self.psi1)));
        kv.push(("psi2", opt(self.psi2)));
        kv.push(("y1", opt(self.y1)));
        kv.push(("y2", opt(self.y2)));
        kv.push(("levels", join(&self.levels)));
        kv.push(("n", self.n.to_string()));
        kv.push(("separatrix_clip", opt(self.separatrix_clip)));
        kv.push(("grid.x", opt_pair(self.grid_x)));
        kv.push(("grid.y", opt_pair(self.grid_y)));
        kv.push(("grid.counts", join(&self.grid_counts)));
        kv.push((
            "grid.layout",
            match self.grid_layout {
                NodeLayout::Centred => "centred",
                NodeLayout::Inclusive => "inclusive",
            }
            .into(),
        ));
        let o = &self.options;
        kv.push(("tol.rel", o.tol.rel.to_string()));
        kv.push(("tol.abs", o.tol.abs.to_string()));
        kv.push(("tol.max_step", o.tol.max_step.to_string()));
        kv.push(("q", o.q.to_string()));
        kv.push(("n_avg", o.n_avg.to_string()));
        kv.push(("n_g", o.n_g.to_string()));
        kv.push(("unit_density", o.unit_density.to_string()));
        kv.push(("table", self.table.to_string()));
        kv.push((
            "reference",
            match self.reference {
                None => "none".into(),
                Some(Reference::Exact) => "exact".into(),
                Some(Reference::Value(v)) => v.to_string(),
            },
        ));
        kv.push(("timings", self.timings.to_string()));
        kv.push(("strict", self.strict.to_string()));
        kv.push(("seed", self.seed.to_string()));
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("none".into(), |p| p.display().to_string());
        kv.push(("out", path(&self.out)));
        kv.push(("meta", path(&self.meta)));
        kv.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// The field model selected by `field`, validated.
    pub fn any_field(&self) -> Result<AnyField> {
        let f = match self.field {
            FieldKind::Axisym => AnyField::Axisym(self.axisym.clone()),
            FieldKind::Helical => AnyField::Helical(self.helical.clone()),
        };
        f.build()
            .map_err(|e| ConfigError::new(self.field_key(), e.to_string()))?;
        Ok(f)
    }

    fn field_key(&self) -> &'static str {
        match self.field {
            FieldKind::Axisym => "axisym.*",
            FieldKind::Helical => "helical.*",
        }
    }

    /// Range checks shared by all commands.
    pub fn validate(&self) -> Result<()> {
        self.any_field()?;
        if self.methods.is_empty() {
            return Err(ConfigError::new("method", "no method given"));
        }
        if self.n < 2 {
            return Err(ConfigError::new(
                "n",
                format!("need at least 2 ladder intervals, got {}", self.n),
            ));
        }
        let o = &self.options;
        if o.q < 1 {
            return Err(ConfigError::new("q", "must be at least 1"));
        }
        if o.n_avg < 1 {
            return Err(ConfigError::new("n_avg", "must be at least 1"));
        }
        if o.n_g < 3 {
            return Err(ConfigError::new("n_g", "need at least 3 nodes per level set"));
        }
        for (k, v) in [
            ("tol.rel", o.tol.rel),
            ("tol.abs", o.tol.abs),
            ("tol.max_step", o.tol.max_step),
        ] {
            if !(v > 0.0) {
                return Err(ConfigError::new(k, format!("must be positive, got {v}")));
            }
        }
        if let Some(d) = self.separatrix_clip {
            if !(d > 0.0) {
                return Err(ConfigError::new(
                    "separatrix_clip",
                    format!("must be positive, got {d}"),
                ));
            }
        }
        if self.grid_counts.iter().any(|&n| n < 2) {
            return Err(ConfigError::new("grid.counts", "need at least 2 nodes per side"));
        }
        if self.field == FieldKind::Axisym {
            if matches!(self.region, Some(Region::Island | Region::Outer)) {
                return Err(ConfigError::new(
                    "region",
                    "the axisymmetric field has only the inner region",
                ));
            }
        } else if self.reference == Some(Reference::Exact) {
            return Err(ConfigError::new("reference", "`exact` needs the axisymmetric field"));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.options.tol
    }

    /// The grid rectangle: configured bounds, or a default box per field
    /// and region.
    pub fn grid_spec(&self, region: Region) -> Result<GridSpec> {
        let (dx, dy) = match (self.field, region) {
            (FieldKind::Axisym, _) => ([0.1, 1.9], [-0.9, 0.9]),
            (FieldKind::Helical, Region::Inner) => ([-0.335, 0.335], [-0.47, 0.47]),
            (FieldKind::Helical, _) => ([-0.9, 0.9], [-0.8, 0.8]),
        };
        let g = GridSpec::from_bounds(self.grid_x.unwrap_or(dx), self.grid_y.unwrap_or(dy), self.grid_counts)
            .map_err(|e| ConfigError::new("grid.counts", e.to_string()))?;
        Ok(g.with_layout(self.grid_layout))
    }
}
