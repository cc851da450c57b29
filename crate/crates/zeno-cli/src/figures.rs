//! Figure recipes. Each writes `<id>.csv` and a gnuplot script `<id>.gp`
//! that plots it.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use zeno_core::reference::{ww_mode_probability, ww_saturation, ww_survival, IntegralRange, RangeKind};
use zeno_core::spectral::{diagonalize, mode_occupation};
use zeno_core::{ArrowheadHamiltonian, CombSpec, CouplingKind, Execution, OffshellSpec};

use crate::commands;
use crate::config::{time_grid, Method, Scenario, TimeScale};
use crate::csv::{Cell, Table};

pub const FIGURE_IDS: [&str; 13] = [
    "active-modes",
    "alpha-fermi",
    "alpha-fit",
    "fairly",
    "very",
    "wwvssc",
    "final",
    "ex",
    "apds",
    "apd",
    "truezeno",
    "endlichgamma",
    "ultra",
];

const POINTS: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: &'static str,
    pub table: Table,
    pub plot: PlotSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub log_x: bool,
    pub log_y: bool,
    pub ylabel: &'static str,
    /// Columns plotted against the first, 0-based.
    pub columns: Vec<usize>,
    /// Clip plotted values to [0, 1].
    pub clip: bool,
}

impl Figure {
    pub fn script(&self) -> String {
        let p = &self.plot;
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set terminal pngcairo size 1000,650");
        let _ = writeln!(s, "set output '{}.png'", self.id);
        let _ = writeln!(s, "set xlabel 't (s)'");
        let _ = writeln!(s, "set ylabel '{}'", p.ylabel);
        let _ = writeln!(s, "set key outside right");
        if p.log_x {
            let _ = writeln!(s, "set logscale x");
            let _ = writeln!(s, "set format x '10^{{%L}}'");
        }
        if p.log_y {
            let _ = writeln!(s, "set logscale y");
        }
        let _ = writeln!(s, "clip(y) = y < 0 ? 0 : (y > 1 ? 1 : y)");
        let plots: Vec<String> = p
            .columns
            .iter()
            .map(|&c| {
                let y = if p.clip {
                    format!("(clip(${}))", c + 1)
                } else {
                    format!("{}", c + 1)
                };
                format!(
                    "'{}.csv' using 1:{} with lines title '{}'",
                    self.id,
                    y,
                    self.table.header[c].replace('_', " ")
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        self.table.write(Some(&dir.join(format!("{}.csv", self.id))))?;
        let script = dir.join(format!("{}.gp", self.id));
        std::fs::write(&script, self.script()).with_context(|| format!("writing {}", script.display()))
    }
}

fn with_times(base: &Scenario, t_min: f64, t_max: f64, scale: TimeScale) -> Result<Scenario> {
    let mut s = base.clone();
    s.times = time_grid(t_min, t_max, POINTS, scale)?;
    Ok(s)
}

fn lifetime(s: &Scenario) -> f64 {
    1.0 / (s.gamma() * s.atom.omega_eg)
}

fn survival_plot(columns: Vec<usize>) -> PlotSpec {
    PlotSpec {
        log_x: true,
        log_y: false,
        ylabel: "survival probability",
        columns,
        clip: true,
    }
}

fn t_col(s: &Scenario) -> (String, Vec<Cell>) {
    ("t_seconds".into(), s.times.iter().map(|&t| Cell::Num(t)).collect())
}

fn col(name: impl Into<String>, v: &[f64]) -> (String, Vec<Cell>) {
    (name.into(), v.iter().map(|&x| Cell::Num(x)).collect())
}

/// Builds figure `id` from the base scenario. Recipes fix the time grid and,
/// where the figure is about them, the model and comb; everything else comes
/// from `base`.
pub fn build(id: &str, base: &Scenario, exec: Execution) -> Result<Figure> {
    let id: &'static str = FIGURE_IDS
        .iter()
        .find(|&&f| f == id)
        .copied()
        .with_context(|| format!("unknown figure '{id}' (expected one of {})", FIGURE_IDS.join(", ")))?;
    let base = base.clone();
    let life = lifetime(&base);
    match id {
        "active-modes" => active_modes(&with_times(&base, 1e-13, 5.0 * life, TimeScale::Log)?, exec),
        "alpha-fermi" => alpha_fermi(&with_times(&base, 0.0, 5.0 * life, TimeScale::Linear)?, exec),
        "alpha-fit" => alpha_fit(&with_times(&base, 0.0, 12.0 * life, TimeScale::Linear)?, exec),
        "fairly" => single_mode(id, &with_times(&base, 0.0, 5.0 * life, TimeScale::Linear)?, 100, exec),
        "very" => single_mode(id, &with_times(&base, 0.0, 5.0 * life, TimeScale::Linear)?, 50, exec),
        "wwvssc" => {
            let mut s = with_times(&base, 1e-20, 1e-8, TimeScale::Log)?;
            s.kind = CouplingKind::DipoleEx;
            wwvssc(&s, exec)
        }
        "final" | "ex" | "apds" | "apd" | "truezeno" | "endlichgamma" => {
            let (kind, t0, t1) = match id {
                "final" => (CouplingKind::DipoleEx, 1e-20, 1e-8),
                "ex" => (CouplingKind::ExactEx, 1e-20, 1e-8),
                "apds" => (CouplingKind::DipoleAp, 1e-20, 1e-14),
                "apd" => (CouplingKind::DipoleAp, 1e-14, 1e-8),
                "truezeno" => (CouplingKind::ExactAp, 1e-20, 1e-14),
                _ => (CouplingKind::ExactAp, 1e-14, 1e-8),
            };
            let mut s = with_times(&base, t0, t1, TimeScale::Log)?;
            s.kind = kind;
            let table = commands::survival(&s, Method::Hybrid, exec)?;
            Ok(Figure {
                id,
                table,
                plot: survival_plot(vec![1, 2, 3]),
            })
        }
        "ultra" => {
            let mut s = with_times(&base, 1e-21, 1e-8, TimeScale::Log)?;
            s.kind = CouplingKind::ExactEx;
            ultra(&s, exec)
        }
        _ => bail!("figure '{id}' has no recipe"),
    }
}

fn active_modes(s: &Scenario, exec: Execution) -> Result<Figure> {
    const MODES: [usize; 9] = [1, 10, 25, 40, 50, 60, 75, 90, 100];
    let l = commands::ladder(s, &OffshellSpec::none())?;
    let d = diagonalize(&ArrowheadHamiltonian::assemble(&l)?)?;
    let times = s.reduced_times();
    let mut cols = vec![t_col(s)];
    for m in MODES {
        cols.push(col(format!("occupation_{m}"), &mode_occupation(&d, m - 1, &times, exec)?));
    }
    Ok(Figure {
        id: "active-modes",
        table: Table::from_columns(cols)?,
        plot: PlotSpec {
            log_x: true,
            log_y: true,
            ylabel: "mode occupation",
            columns: (1..=MODES.len()).collect(),
            clip: false,
        },
    })
}

fn alpha_fermi(s: &Scenario, exec: Execution) -> Result<Figure> {
    const WIDTHS: [f64; 5] = [0.25, 1.0, 2.0, 4.0, 16.0];
    let mut cols = vec![t_col(s)];
    for w in WIDTHS {
        let mut v = s.clone();
        v.comb = CombSpec::with_width(CombSpec::DEFAULT_MODES, w, s.gamma());
        cols.push(col(format!("survival_width_{w}gamma"), &commands::comb_survival(&v, exec)?));
    }
    cols.push(col("survival_ww", &ww_survival(s.gamma(), &s.reduced_times())));
    Ok(Figure {
        id: "alpha-fermi",
        table: Table::from_columns(cols)?,
        plot: PlotSpec {
            log_x: false,
            ..survival_plot((1..=WIDTHS.len() + 1).collect())
        },
    })
}

fn alpha_fit(s: &Scenario, exec: Execution) -> Result<Figure> {
    let mut cols = vec![t_col(s)];
    for n in [20, 40, 100] {
        let mut v = s.clone();
        v.comb = CombSpec::with_width(n, CombSpec::DEFAULT_WIDTH_IN_GAMMA, s.gamma());
        cols.push(col(format!("survival_n{n}"), &commands::comb_survival(&v, exec)?));
    }
    cols.push(col("survival_ww", &ww_survival(s.gamma(), &s.reduced_times())));
    Ok(Figure {
        id: "alpha-fit",
        table: Table::from_columns(cols)?,
        plot: PlotSpec {
            log_x: false,
            ..survival_plot(vec![1, 2, 3, 4])
        },
    })
}

/// Occupation of comb mode `mode` (1-based) against its Wigner-Weisskopf curve.
fn single_mode(id: &'static str, s: &Scenario, mode: usize, exec: Execution) -> Result<Figure> {
    let l = commands::ladder(s, &OffshellSpec::none())?;
    let h = ArrowheadHamiltonian::assemble(&l)?;
    let d = diagonalize(&h)?;
    let times = s.reduced_times();
    let (g, det) = (h.couplings[mode - 1], h.detunings[mode - 1]);
    let occ = mode_occupation(&d, mode - 1, &times, exec)?;
    let ww = ww_mode_probability(g, det, s.gamma(), &times);
    let sat = vec![ww_saturation(g, det, s.gamma()); times.len()];
    Ok(Figure {
        id,
        table: Table::from_columns(vec![
            t_col(s),
            col(format!("occupation_{mode}"), &occ),
            col("ww_mode_probability", &ww),
            col("ww_saturation", &sat),
        ])?,
        plot: PlotSpec {
            log_x: false,
            log_y: false,
            ylabel: "mode occupation",
            columns: vec![1, 2, 3],
            clip: false,
        },
    })
}

fn wwvssc(s: &Scenario, exec: Execution) -> Result<Figure> {
    let r = commands::integral_sweep(s, &IntegralRange::full(), exec)?;
    let integral: Vec<f64> = r.iter().map(|d| 1.0 - d.raw).collect();
    Ok(Figure {
        id: "wwvssc",
        table: Table::from_columns(vec![
            t_col(s),
            col("survival_ww", &ww_survival(s.gamma(), &s.reduced_times())),
            col("survival_integral", &integral),
            ("nonphysical".into(), r.iter().map(|d| Cell::Flag(d.nonphysical())).collect()),
        ])?,
        plot: survival_plot(vec![1, 2]),
    })
}

fn ultra(s: &Scenario, exec: Execution) -> Result<Figure> {
    let width = s.comb.delta_omega / s.gamma();
    let parts = [
        ("onshell", IntegralRange::window(RangeKind::OnshellOnly, s.gamma(), width)),
        ("offshell", IntegralRange::window(RangeKind::OffshellOnly, s.gamma(), width)),
        ("full", IntegralRange::full()),
    ];
    let mut cols = vec![t_col(s)];
    let mut flags = Vec::new();
    for (name, range) in parts {
        let r = commands::integral_sweep(s, &range, exec)?;
        cols.push(col(name, &r.iter().map(|d| 1.0 - d.raw).collect::<Vec<_>>()));
        flags = r.iter().map(|d| Cell::Flag(d.nonphysical())).collect();
    }
    cols.push(("nonphysical".into(), flags));
    Ok(Figure {
        id: "ultra",
        table: Table::from_columns(cols)?,
        plot: survival_plot(vec![1, 2, 3]),
    })
}

