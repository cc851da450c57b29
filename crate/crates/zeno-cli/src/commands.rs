//! Tables behind the `constants`, `discretize`, `evolve` and `survival`
//! subcommands.

use anyhow::{Context, Result};
use zeno_core::offshell::perturbed_survival;
use zeno_core::reference::{sinc_decay, ww_survival, IntegralRange, SincDecay, SWEEP_REL_TOL};
use zeno_core::spectral::{diagonalize, evolve};
use zeno_core::units::{derive_cutoffs, standard_model, zeno_time};
use zeno_core::{ArrowheadHamiltonian, CouplingModel, Execution, HybridModel, ModeLadder, OffshellSpec, ReducedModel};

use crate::config::{Method, Scenario};
use crate::csv::{Cell, Table};

pub fn model(s: &Scenario) -> CouplingModel {
    standard_model(s.kind, &s.atom, &s.consts)
}

pub fn reduced_model(s: &Scenario) -> Result<ReducedModel> {
    ReducedModel::new(&model(s), &s.atom, &s.consts).context("coupling model")
}

pub fn ladder(s: &Scenario, offshell: &OffshellSpec) -> Result<ModeLadder> {
    ModeLadder::for_atom(&model(s), &s.atom, &s.consts, &s.comb, offshell).context("mode discretization")
}

fn time_column(s: &Scenario) -> (String, Vec<Cell>) {
    ("t_seconds".into(), s.times.iter().map(|&t| Cell::Num(t)).collect())
}

fn num_column(name: impl Into<String>, values: &[f64]) -> (String, Vec<Cell>) {
    (name.into(), values.iter().map(|&v| Cell::Num(v)).collect())
}

pub fn constants(s: &Scenario) -> Result<Table> {
    let scales = derive_cutoffs(&s.atom, &s.consts);
    let tau_z = zeno_time(&model(s), &s.atom, &s.consts).context("Zeno time")?;
    let mut t = Table::new(["quantity", "value", "unit"]);
    let rows: [(&'static str, f64, &'static str); 11] = [
        ("omega_eg", s.atom.omega_eg, "rad/s"),
        ("inv_omega_eg", 1.0 / s.atom.omega_eg, "s"),
        ("gamma", scales.gamma, "1/s"),
        ("lifetime", scales.tau_e, "s"),
        ("k_c", scales.k_c, "1/m"),
        ("omega_c", scales.omega_c, "rad/s"),
        ("inv_omega_c", 1.0 / scales.omega_c, "s"),
        ("omega_x", scales.omega_x, "rad/s"),
        ("tau_x", scales.tau_x, "s"),
        ("tau_zeno", tau_z, "s"),
        ("tau_x_over_tau_zeno", scales.tau_x / tau_z, "1"),
    ];
    for (name, value, unit) in rows {
        t.push(vec![Cell::Text(name), Cell::Num(value), Cell::Text(unit)])?;
    }
    Ok(t)
}

/// Slice edges as wavenumbers (1/m), effective frequency and coupling in rad/s.
pub fn discretize(s: &Scenario) -> Result<Table> {
    let l = ladder(s, &s.offshell)?;
    let to_k = s.atom.omega_eg / s.consts.c;
    let mut t = Table::new(["k_lo", "k_hi", "omega_eff", "g_eff", "region"]);
    for m in &l.modes {
        t.push(vec![
            Cell::Num(m.slice.lo * to_k),
            Cell::Num(m.slice.hi * to_k),
            Cell::Num(m.omega * s.atom.omega_eg),
            Cell::Num(m.g * s.atom.omega_eg),
            Cell::Text(m.region.name()),
        ])?;
    }
    Ok(t)
}

/// Exact comb evolution with every mode occupation. Modes are numbered from
/// 1 in ascending frequency.
pub fn evolve_comb(s: &Scenario, exec: Execution) -> Result<Table> {
    let l = ladder(s, &OffshellSpec::none())?;
    let d = diagonalize(&ArrowheadHamiltonian::assemble(&l)?)?;
    let curve = evolve(&d, &s.reduced_times(), true, exec)?;
    let occ = curve.occupations.expect("requested");
    let mut cols = vec![time_column(s), num_column("survival", &curve.survival)];
    for lambda in 0..d.n_modes() {
        let values: Vec<f64> = occ.iter().map(|row| row[lambda]).collect();
        cols.push(num_column(format!("occupation_{}", lambda + 1), &values));
    }
    Table::from_columns(cols)
}

pub fn comb_survival(s: &Scenario, exec: Execution) -> Result<Vec<f64>> {
    let l = ladder(s, &OffshellSpec::none())?;
    let d = diagonalize(&ArrowheadHamiltonian::assemble(&l)?)?;
    Ok(evolve(&d, &s.reduced_times(), false, exec)?.survival)
}

pub fn integral_sweep(s: &Scenario, range: &IntegralRange, exec: Execution) -> Result<Vec<SincDecay>> {
    let m = reduced_model(s)?;
    let gamma = s.gamma();
    exec.try_map(&s.reduced_times(), |&t| sinc_decay(&m, gamma, t, range, SWEEP_REL_TOL))
        .context("decay integral")
}

pub fn hybrid_survival(s: &Scenario, exec: Execution) -> Result<Vec<f64>> {
    let h = HybridModel::from_ladder(&ladder(s, &s.offshell)?)?;
    Ok(perturbed_survival(&h, &s.reduced_times(), exec))
}

pub fn survival(s: &Scenario, method: Method, exec: Execution) -> Result<Table> {
    let ww = ww_survival(s.gamma(), &s.reduced_times());
    let cols = match method {
        Method::Ww => vec![time_column(s), num_column("survival", &ww)],
        Method::Comb => vec![time_column(s), num_column("survival", &comb_survival(s, exec)?)],
        Method::Integral => {
            let r = integral_sweep(s, &IntegralRange::full(), exec)?;
            let raw: Vec<f64> = r.iter().map(|d| d.raw).collect();
            let surv: Vec<f64> = raw.iter().map(|p| 1.0 - p).collect();
            vec![
                time_column(s),
                num_column("survival", &surv),
                num_column("decay_probability", &raw),
                ("nonphysical".into(), r.iter().map(|d| Cell::Flag(d.nonphysical())).collect()),
            ]
        }
        Method::Hybrid => {
            let r = integral_sweep(s, &IntegralRange::full(), exec)?;
            let integral: Vec<f64> = r.iter().map(|d| 1.0 - d.raw).collect();
            vec![
                time_column(s),
                num_column("survival_hybrid", &hybrid_survival(s, exec)?),
                num_column("survival_ww", &ww),
                num_column("survival_integral", &integral),
            ]
        }
    };
    Table::from_columns(cols)
}
