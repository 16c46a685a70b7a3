//! Run configuration: TOML file, command-line overrides, and resolution of
//! case-dependent defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rdlab::entire::BoundaryMode;
use rdlab::evolve::SpatialScheme;
use rdlab::reaction::{classify, compute_constants, CaseTag, ReactionTerm, StabilityConstants};
use rdlab::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reaction: Option<String>,
    /// Optional case override; must agree with the classification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub grid: GridConfig,
    pub horizon: HorizonConfig,
    pub experiment: ExperimentConfig,
    pub constants: Constants,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_halfwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// `dirichlet_envelope` or `neumann`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    /// `compact` or `central`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HorizonConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// front, sandwich, constant, diverging or lower-bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_widths: Option<Vec<f64>>,
    /// forward, reflected or both.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
    /// far-above, all-above, far-below, all-below or all.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    /// β₁ or β₂.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Start time of the sandwich run on the entire solution's clock.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    /// Front speed for monostable terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    /// u3, u10, u01 or u11.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// front, bump:h,L or constant:v.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
}

/// Calibrated or measured constants. Present values are used as given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m7: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m8: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m9: Option<f64>,
    /// Amplitude of the annihilating subsolution shift.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_dual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_tilde: Option<f64>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl Constants {
    /// Fills the unset fields of `self` from `other`.
    pub fn fill_from(&mut self, other: &Constants) {
        macro_rules! fill {
            ($($f:ident),+) => { $( if self.$f.is_none() { self.$f = other.$f; } )+ };
        }
        fill!(m7, m8, m9, m_dual, b, b_bar, b_tilde);
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(&mut self, over: &RunConfig) {
        overlay!(self, over, reaction, case, seed);
        overlay!(self.grid, over.grid, domain_halfwidth, dx, dt, boundary, scheme);
        overlay!(self.horizon, over.horizon, n_list, t_end);
        overlay!(
            self.experiment,
            over.experiment,
            kind,
            delta,
            deltas,
            seeds,
            half_widths,
            orientation,
            pattern,
            margin,
            half_width,
            start,
            span,
            speed,
            variant,
            init
        );
        overlay!(self.constants, over.constants, m7, m8, m9, m_dual, b, b_bar, b_tilde);
    }
}

/// Which default grid a command starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Front,
    Evolve,
    Entire,
    Stability,
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub f: ReactionTerm,
    /// None for a balanced term (fronts and evolution only).
    pub case: Option<CaseTag>,
    pub sc: StabilityConstants,
    pub seed: u64,
    pub halfwidth: f64,
    pub dx: f64,
    pub dt: Option<f64>,
    pub boundary: BoundaryMode,
    pub scheme: SpatialScheme,
    pub n_list: Vec<f64>,
    pub t_end: f64,
    /// The configuration with every default written in.
    pub config: RunConfig,
}

pub fn case_name(c: Option<CaseTag>) -> &'static str {
    match c {
        Some(CaseTag::C1) => "C1",
        Some(CaseTag::C2) => "C2",
        Some(CaseTag::C3) => "C3",
        Some(CaseTag::C4) => "C4",
        Some(CaseTag::Monostable) => "monostable",
        None => "balanced",
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Checks every field against the module preconditions and writes the
/// case-dependent defaults into the configuration.
pub fn resolve(cfg: &RunConfig, purpose: Purpose) -> Result<Resolved> {
    let spec = cfg
        .reaction
        .as_deref()
        .ok_or_else(|| Error::Config("missing reaction (e.g. --reaction cubic:0.3)".into()))?;
    let f = ReactionTerm::from_spec(spec).map_err(|e| Error::Config(format!("reaction '{spec}': {e}")))?;
    let case = match classify(&f) {
        Ok(c) => Some(c),
        // fronts and plain evolution make sense for a balanced term
        Err(Error::Balanced { .. }) if matches!(purpose, Purpose::Front | Purpose::Evolve) => None,
        Err(e) => return Err(Error::Config(format!("reaction '{spec}': {e}"))),
    };
    if let Some(want) = cfg.case.as_deref() {
        if !want.eq_ignore_ascii_case(case_name(case)) {
            return Err(Error::Config(format!(
                "case {want} does not match reaction {spec}, which is classified {}",
                case_name(case)
            )));
        }
    }
    let sc = compute_constants(&f).map_err(|e| Error::Config(e.to_string()))?;
    let (hw0, t0, n0): (f64, f64, Vec<f64>) = match (purpose, case.unwrap_or(CaseTag::C1)) {
        (Purpose::Entire, CaseTag::C3 | CaseTag::C4) => (40.0, 60.0, vec![20.0, 30.0, 40.0]),
        (Purpose::Entire, CaseTag::Monostable) => (110.0, 5.0, vec![10.0, 20.0, 30.0]),
        (Purpose::Entire, _) => (40.0, 60.0, vec![10.0, 20.0, 30.0]),
        (Purpose::Stability, CaseTag::Monostable) => (110.0, 20.0, vec![10.0, 20.0, 30.0]),
        (Purpose::Stability, CaseTag::C3 | CaseTag::C4) => (40.0, 45.0, vec![20.0, 30.0, 40.0]),
        (Purpose::Stability, _) => (40.0, 45.0, vec![10.0, 20.0, 30.0]),
        (Purpose::Front | Purpose::Evolve, _) => (40.0, 20.0, vec![10.0, 20.0, 30.0]),
    };
    let halfwidth = positive("domain_halfwidth", cfg.grid.domain_halfwidth.unwrap_or(hw0))?;
    let dx = positive("dx", cfg.grid.dx.unwrap_or(0.05))?;
    if dx > halfwidth / 4.0 {
        return Err(Error::Config(format!("dx = {dx} is too coarse for half-width {halfwidth}")));
    }
    let dt = cfg.grid.dt.map(|v| positive("dt", v)).transpose()?;
    let boundary = match cfg.grid.boundary.as_deref().unwrap_or("dirichlet_envelope") {
        "dirichlet_envelope" => BoundaryMode::DirichletEnvelope,
        "neumann" => BoundaryMode::Neumann,
        other => return Err(Error::Config(format!("unknown boundary '{other}' (dirichlet_envelope | neumann)"))),
    };
    let scheme = match cfg.grid.scheme.as_deref().unwrap_or("compact") {
        "compact" => SpatialScheme::Compact,
        "central" => SpatialScheme::Central,
        other => return Err(Error::Config(format!("unknown scheme '{other}' (compact | central)"))),
    };
    let t_end = positive("t_end", cfg.horizon.t_end.unwrap_or(t0))?;
    let n_list = cfg.horizon.n_list.clone().unwrap_or(n0);
    if n_list.is_empty() || n_list.iter().any(|&n| !(n > 0.0)) || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("n_list must be positive and strictly increasing, got {n_list:?}")));
    }
    // the sandwich amplitude is bounded by θ; other perturbations only by the state range
    let sandwich = cfg.experiment.kind.as_deref() == Some("sandwich");
    for &d in cfg.experiment.delta.iter().chain(cfg.experiment.deltas.iter().flatten()) {
        check_delta(d, &sc, sandwich)?;
    }
    let seed = cfg.seed.unwrap_or(0);

    let mut config = cfg.clone();
    config.case = Some(case_name(case).to_string());
    config.seed = Some(seed);
    config.grid.domain_halfwidth = Some(halfwidth);
    config.grid.dx = Some(dx);
    config.grid.boundary = Some(match boundary {
        BoundaryMode::DirichletEnvelope => "dirichlet_envelope".into(),
        BoundaryMode::Neumann => "neumann".into(),
    });
    config.grid.scheme = Some(match scheme {
        SpatialScheme::Compact => "compact".into(),
        SpatialScheme::Central => "central".into(),
    });
    config.horizon.t_end = Some(t_end);
    config.horizon.n_list = Some(n_list.clone());
    Ok(Resolved { f, case, sc, seed, halfwidth, dx, dt, boundary, scheme, n_list, t_end, config })
}

fn check_delta(d: f64, sc: &StabilityConstants, sandwich: bool) -> Result<()> {
    if sandwich && !(d >= 0.0 && d <= sc.theta) {
        return Err(Error::Config(format!("delta = {d} must lie in [0, θ = {}]", sc.theta)));
    }
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Config(format!("delta = {d} must lie in [0, 1]")));
    }
    Ok(())
}
