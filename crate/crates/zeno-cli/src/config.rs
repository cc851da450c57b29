//! Scenario files.
//!
//! A scenario is a TOML document. Every section and key is optional; missing
//! values take the hydrogen 2p-1s defaults.
//!
//! ```toml
//! [atom]
//! omega_eg = 1.55e16
//! d_ge = 6.31e-30
//!
//! [model]
//! kind = "exact-ap"
//!
//! [time]
//! t_min = 1e-20
//! t_max = 1e-8
//! points = 400
//! scale = "log"
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use zeno_core::units::reduced_decay_rate;
use zeno_core::{AtomTransition, CombSpec, CouplingKind, OffshellSpec, PhysicalConstants, Spacing};

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub atom: AtomSection,
    pub model: ModelSection,
    pub comb: CombSection,
    pub offshell: OffshellSection,
    pub time: TimeSection,
    pub run: RunSection,
    pub constants: ConstantsSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSection {
    pub omega_eg: f64,
    pub d_ge: f64,
    /// Bohr radius override; sets the form-factor cutoff `ω_X = 3c/(2a₀)`.
    pub a0: Option<f64>,
    #[serde(alias = "Z")]
    pub z: u32,
}

impl Default for AtomSection {
    fn default() -> Self {
        let h = AtomTransition::hydrogen_2p_1s();
        Self {
            omega_eg: h.omega_eg,
            d_ge: h.d_ge,
            a0: None,
            z: h.z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub kind: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            kind: CouplingKind::ExactAp.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombSection {
    pub n_comb: usize,
    pub delta_omega_in_gamma: f64,
    /// Comb centre in units of `ω_eg`.
    pub center: f64,
}

impl Default for CombSection {
    fn default() -> Self {
        Self {
            n_comb: CombSpec::DEFAULT_MODES,
            delta_omega_in_gamma: CombSpec::DEFAULT_WIDTH_IN_GAMMA,
            center: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OffshellSection {
    pub n_offshell: usize,
    /// "log" or "linear".
    pub spacing: String,
    pub k_max_factor: f64,
    pub include_below_comb: bool,
    pub n_below: usize,
}

impl Default for OffshellSection {
    fn default() -> Self {
        let d = OffshellSpec::default();
        Self {
            n_offshell: d.n_offshell,
            spacing: "log".into(),
            k_max_factor: d.k_max_factor,
            include_below_comb: d.include_below_comb,
            n_below: d.n_below,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    /// Seconds.
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// "log" or "linear".
    pub scale: String,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            t_min: 1e-20,
            t_max: 1e-8,
            points: 400,
            scale: "log".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ww,
    Integral,
    Hybrid,
    Comb,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ww" => Self::Ww,
            "integral" => Self::Integral,
            "hybrid" => Self::Hybrid,
            "comb" => Self::Comb,
            other => bail!("run.method: unknown method '{other}' (expected ww, integral, hybrid or comb)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub method: String,
    pub out: Option<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            method: "hybrid".into(),
            out: None,
        }
    }
}

/// Overrides of the SI constants, mainly for sensitivity tests.
#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsSection {
    pub hbar: Option<f64>,
    pub c: Option<f64>,
    pub epsilon0: Option<f64>,
    pub e_charge: Option<f64>,
}

/// A validated scenario in the types of `zeno-core`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub atom: AtomTransition,
    pub consts: PhysicalConstants,
    pub kind: CouplingKind,
    pub comb: CombSpec,
    pub offshell: OffshellSpec,
    /// Sample times in seconds.
    pub times: Vec<f64>,
    pub method: Method,
    pub out: Option<String>,
}

impl Scenario {
    /// `Γ/ω_eg`.
    pub fn gamma(&self) -> f64 {
        reduced_decay_rate(&self.atom, &self.consts)
    }

    pub fn reduced_times(&self) -> Vec<f64> {
        self.times.iter().map(|&t| self.atom.reduce_time(t)).collect()
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid scenario")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let mut consts = PhysicalConstants::default();
        let c = &self.constants;
        for (slot, v) in [
            (&mut consts.hbar, c.hbar),
            (&mut consts.c, c.c),
            (&mut consts.epsilon0, c.epsilon0),
            (&mut consts.e_charge, c.e_charge),
            (&mut consts.a0, self.atom.a0),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        consts.validate().context("constants")?;
        let atom = AtomTransition::new(self.atom.omega_eg, self.atom.d_ge, self.atom.z).context("atom")?;
        let kind: CouplingKind = self
            .model
            .kind
            .parse()
            .map_err(|e| anyhow::anyhow!("model.kind: {e}"))?;

        let gamma = reduced_decay_rate(&atom, &consts);
        let comb = CombSpec {
            n_comb: self.comb.n_comb,
            delta_omega: self.comb.delta_omega_in_gamma * gamma,
            center: self.comb.center,
        };
        comb.validate().context("comb")?;

        let spacing = match self.offshell.spacing.as_str() {
            "log" | "logarithmic" => Spacing::Logarithmic,
            "linear" => Spacing::Linear,
            other => bail!("offshell.spacing: unknown spacing '{other}' (expected log or linear)"),
        };
        let offshell = OffshellSpec {
            n_offshell: self.offshell.n_offshell,
            k_max_factor: self.offshell.k_max_factor,
            spacing,
            include_below_comb: self.offshell.include_below_comb,
            n_below: self.offshell.n_below,
        };
        offshell.validate().context("offshell")?;

        let scale = match self.time.scale.as_str() {
            "log" => TimeScale::Log,
            "linear" => TimeScale::Linear,
            other => bail!("time.scale: unknown scale '{other}' (expected log or linear)"),
        };
        let times = time_grid(self.time.t_min, self.time.t_max, self.time.points, scale)?;

        Ok(Scenario {
            atom,
            consts,
            kind,
            comb,
            offshell,
            times,
            method: Method::parse(&self.run.method)?,
            out: self.run.out.clone(),
        })
    }
}

/// Sample times from `t_min` to `t_max` inclusive.
pub fn time_grid(t_min: f64, t_max: f64, points: usize, scale: TimeScale) -> Result<Vec<f64>> {
    if points < 2 {
        bail!("time.points: need at least 2, got {points}");
    }
    if !(t_max > t_min) || !t_max.is_finite() {
        bail!("time.t_max: must exceed t_min ({t_min}), got {t_max}");
    }
    let last = points - 1;
    Ok(match scale {
        TimeScale::Log => {
            if !(t_min > 0.0) {
                bail!("time.t_min: must be positive on a log scale, got {t_min}");
            }
            let ratio = (t_max / t_min).ln();
            (0..points)
                .map(|k| match k {
                    0 => t_min,
                    k if k == last => t_max,
                    k => t_min * (ratio * k as f64 / last as f64).exp(),
                })
                .collect()
        }
        TimeScale::Linear => {
            if !(t_min >= 0.0) {
                bail!("time.t_min: must be nonnegative, got {t_min}");
            }
            (0..points)
                .map(|k| match k {
                    k if k == last => t_max,
                    k => t_min + (t_max - t_min) * k as f64 / last as f64,
                })
                .collect()
        }
    })
}
