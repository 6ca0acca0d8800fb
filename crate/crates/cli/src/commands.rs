//! Evaluation of each command into a table of named columns.

use rayon::prelude::*;
use serde_json::{json, Value};

use cvtri::beamsplitter::{duan_bs1, opo_pipeline, propagate_static, AokiNetwork, InputTriple, AOKI_AXES};
use cvtri::criteria::{full_report, CriterionReport};
use cvtri::intracavity::{self, CavityParams};
use cvtri::opo::{self, Branch, OpoParams};
use cvtri::positivep::{run_ensemble, SimConfig};
use cvtri::undepleted;
use cvtri::Error;

use crate::config::RunConfig;
use crate::params::CommandKind;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(&'static str),
}

impl Cell {
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => (*s).to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Criterion report per row, for the JSON output.
    pub reports: Vec<Option<CriterionReport>>,
    /// Extra `# key: value` header lines.
    pub notes: Vec<(String, String)>,
    /// Summary object for the JSON output.
    pub summary: Option<Value>,
    /// Set when the run finished but its numerics are not trustworthy.
    pub failure: Option<String>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), ..Default::default() }
    }

    fn push(&mut self, row: Vec<Cell>, report: Option<CriterionReport>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.reports.push(report);
    }
}

type Row = (Vec<Cell>, Option<CriterionReport>);

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn core(e: Error) -> CliError {
    CliError::from(e)
}

/// Runs the command on the current rayon pool.
pub fn evaluate(cfg: &RunConfig) -> Result<Table, CliError> {
    match cfg.command {
        CommandKind::BsClosed => bs_closed(cfg),
        CommandKind::BsSpectral => bs_spectral(cfg),
        CommandKind::Opo => opo_cmd(cfg),
        CommandKind::Undepleted => undepleted_cmd(cfg),
        CommandKind::PositiveP => positive_p(cfg),
        CommandKind::Intracavity => intracavity_cmd(cfg),
    }
}

/// Parameter sets along the sweep, in sweep order.
fn points(cfg: &RunConfig) -> Vec<RunConfig> {
    let (axis, values) = cfg.sweep_values();
    values
        .into_iter()
        .map(|v| {
            let mut c = cfg.clone();
            c.params.insert(axis.clone(), v);
            c
        })
        .collect()
}

fn collect(columns: &[&'static str], rows: Vec<Result<Vec<Row>, CliError>>) -> Result<Table, CliError> {
    let mut t = Table::new(columns);
    for chunk in rows {
        for (row, report) in chunk? {
            t.push(row, report);
        }
    }
    Ok(t)
}

fn report_cells(r: &CriterionReport) -> Vec<Cell> {
    vec![
        num(r.v12),
        num(r.v13),
        num(r.v23),
        num(r.worst_epr_one_mode()),
        num(r.worst_epr_two_mode()),
        Cell::Bool(r.tripartite_confirmed.vlf),
    ]
}

const REPORT_COLUMNS: [&str; 6] = ["v12", "v13", "v23", "epr_one", "epr_two", "vlf_tripartite"];

fn nan_report_cells() -> Vec<Cell> {
    let mut v = vec![num(f64::NAN); 5];
    v.push(Cell::Bool(false));
    v
}

fn bs_closed(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut cols = vec!["r", "mu", "nu"];
    cols.extend(REPORT_COLUMNS);
    cols.push("duan_bs1");
    let rows = points(cfg)
        .par_iter()
        .map(|c| {
            let (r, mu, nu) = (c.param("r"), c.param("mu"), c.param("nu"));
            let inputs = InputTriple::aoki(r).map_err(core)?;
            let net = AokiNetwork::new(mu, nu).map_err(core)?;
            let report = full_report(&propagate_static(&inputs, &net).map_err(core)?).map_err(core)?;
            let mut row = vec![num(r), num(mu), num(nu)];
            row.extend(report_cells(&report));
            row.push(num(duan_bs1(&inputs, mu).map_err(core)?));
            Ok(vec![(row, Some(report))])
        })
        .collect();
    collect(&cols, rows)
}

fn opo_params(c: &RunConfig) -> Result<OpoParams, CliError> {
    OpoParams::new(c.param("gamma-a"), c.param("gamma-b"), c.param("kappa"), 0.0)
        .and_then(|p| p.at_pump_ratio(c.param("pump-ratio")))
        .map_err(core)
}

fn omegas(cfg: &RunConfig) -> Vec<f64> {
    cfg.omega_grid.expect("spectral command has a grid").values()
}

fn bs_spectral(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut cols = vec!["pump_ratio", "branch", "omega", "near_threshold", "s_x", "s_y"];
    cols.extend(REPORT_COLUMNS);
    let grid = omegas(cfg);
    let rows = points(cfg)
        .par_iter()
        .map(|c| {
            let p = opo_params(c)?;
            let ratio = c.param("pump-ratio");
            let branch = Branch::for_ratio(ratio);
            let net = AokiNetwork::new(c.param("mu"), c.param("nu")).map_err(core)?;
            grid.iter()
                .map(|&w| {
                    let head = |sx: f64, sy: f64| {
                        vec![num(ratio), Cell::Text(branch.name()), num(w), Cell::Bool(p.near_threshold()), num(sx), num(sy)]
                    };
                    let evaluated = opo::spectrum(&p, w, branch).and_then(|s| {
                        let t = opo_pipeline(&p, branch, &net, &[w], AOKI_AXES)?;
                        Ok((s, full_report(&t[0].table)?))
                    });
                    match evaluated {
                        Ok((s, report)) => {
                            let mut row = head(s.s_x, s.s_y);
                            row.extend(report_cells(&report));
                            Ok((row, Some(report)))
                        }
                        Err(_) if p.near_threshold() => {
                            let mut row = head(f64::NAN, f64::NAN);
                            row.extend(nan_report_cells());
                            Ok((row, None))
                        }
                        Err(e) => Err(core(e)),
                    }
                })
                .collect()
        })
        .collect();
    collect(&cols, rows)
}

fn opo_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let cols = ["pump_ratio", "branch", "omega", "near_threshold", "s_x", "s_y"];
    let grid = omegas(cfg);
    let rows = points(cfg)
        .par_iter()
        .map(|c| {
            let p = opo_params(c)?;
            let ratio = c.param("pump-ratio");
            let branch = Branch::for_ratio(ratio);
            grid.iter()
                .map(|&w| {
                    let s = opo::spectrum(&p, w, branch).map_err(core)?;
                    let row = vec![
                        num(ratio),
                        Cell::Text(branch.name()),
                        num(w),
                        Cell::Bool(s.near_threshold),
                        num(s.s_x),
                        num(s.s_y),
                    ];
                    Ok((row, None))
                })
                .collect()
        })
        .collect();
    collect(&cols, rows)
}

fn undepleted_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut cols = vec!["tau", "a", "b", "c", "d"];
    cols.extend(REPORT_COLUMNS);
    cols.extend(["v3_closed", "identity_norm", "identity_cross"]);
    let rows = points(cfg)
        .par_iter()
        .map(|c| {
            let tau = c.param("tau");
            let p = undepleted::abcd(tau).map_err(core)?;
            let report = full_report(&undepleted::moment_table(tau).map_err(core)?).map_err(core)?;
            let mut row = vec![num(tau), num(p.a), num(p.b), num(p.c), num(p.d)];
            row.extend(report_cells(&report));
            row.extend([
                num(undepleted::v3_closed(tau).map_err(core)?),
                num(p.identity_norm()),
                num(p.identity_cross()),
            ]);
            Ok(vec![(row, Some(report))])
        })
        .collect();
    collect(&cols, rows)
}

fn count(c: &RunConfig, key: &'static str) -> Result<usize, CliError> {
    let v = c.param(key);
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(CliError::Config(format!("`{key}` must be a positive integer, got {v}")))
    }
}

pub fn sim_config(c: &RunConfig) -> Result<SimConfig, CliError> {
    Ok(SimConfig {
        chi: c.param("chi"),
        beta0: c.param("beta0"),
        alpha0: c.param("alpha0"),
        n_traj: count(c, "traj")?,
        dt: c.param("dt"),
        zeta_max: c.param("zeta-max"),
        seed: c.seed,
        batch_count: count(c, "batches")?,
        output_intervals: count(c, "intervals")?,
        noise: true,
        divergence_factor: c.param("divergence-factor"),
    })
}

const PP_COLUMNS: [&str; 28] = [
    "zeta",
    "v3",
    "v3_stderr",
    "v12",
    "v12_stderr",
    "v13",
    "v13_stderr",
    "v23",
    "v23_stderr",
    "epr_one",
    "epr_one_stderr",
    "epr_two",
    "epr_two_stderr",
    "epr_gap",
    "epr_gap_stderr",
    "v3_undepleted",
    "conj_gap_re_1",
    "conj_gap_re_1_stderr",
    "conj_gap_im_1",
    "conj_gap_im_1_stderr",
    "conj_gap_re_2",
    "conj_gap_re_2_stderr",
    "conj_gap_im_2",
    "conj_gap_im_2_stderr",
    "conj_gap_re_3",
    "conj_gap_re_3_stderr",
    "conj_gap_im_3",
    "conj_gap_im_3_stderr",
];

fn positive_p(cfg: &RunConfig) -> Result<Table, CliError> {
    let sim = sim_config(cfg)?;
    let res = run_ensemble(&sim).map_err(core)?;
    let mut t = Table::new(&PP_COLUMNS);
    for p in &res.points {
        let mut row = vec![num(p.zeta)];
        for e in [p.v3, p.v12, p.v13, p.v23, p.epr_one, p.epr_two, p.epr_gap] {
            row.extend([num(e.value), num(e.stderr)]);
        }
        row.push(num(undepleted::v3_closed(p.zeta).map_err(core)?));
        for mode in &p.conjugacy_gap {
            for e in mode {
                row.extend([num(e.value), num(e.stderr)]);
            }
        }
        t.push(row, None);
    }
    t.notes = vec![
        ("accepted".into(), res.accepted.to_string()),
        ("diverged".into(), res.diverged.to_string()),
        ("divergence_fraction".into(), res.divergence_fraction.to_string()),
        ("divergence_flagged".into(), res.divergence_flagged.to_string()),
    ];
    t.summary = Some(json!({
        "accepted": res.accepted,
        "diverged": res.diverged,
        "divergence_fraction": res.divergence_fraction,
        "divergence_flagged": res.divergence_flagged,
    }));
    if res.divergence_flagged {
        t.failure = Some(format!("{} of {} trajectories diverged", res.diverged, sim.n_traj));
    }
    Ok(t)
}

fn intracavity_cmd(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut cols = vec!["pump_ratio", "epsilon", "branch", "omega", "near_threshold"];
    cols.extend(REPORT_COLUMNS);
    cols.push("s0_closed");
    let grid = omegas(cfg);
    let rows = points(cfg)
        .par_iter()
        .map(|c| {
            let p = CavityParams::new(c.param("gamma"), c.param("kappa"), c.param("chi"), 0.0)
                .and_then(|p| p.at_pump_ratio(c.param("pump-ratio")))
                .map_err(core)?;
            let branch = intracavity::steady_state(&p).branch;
            let closed = intracavity::zero_freq_closed_form(&p);
            let near = p.near_threshold();
            grid.iter()
                .map(|&w| {
                    let mut row =
                        vec![num(c.param("pump-ratio")), num(p.epsilon), Cell::Text(branch.name()), num(w), Cell::Bool(near)];
                    let evaluated = intracavity::spectrum_matrix(&p, w).and_then(|s| full_report(&s.table));
                    let report = match evaluated {
                        Ok(r) => {
                            row.extend(report_cells(&r));
                            Some(r)
                        }
                        Err(_) if near => {
                            row.extend(nan_report_cells());
                            None
                        }
                        Err(e) => return Err(core(e)),
                    };
                    row.push(num(closed));
                    Ok((row, report))
                })
                .collect()
        })
        .collect();
    collect(&cols, rows)
}
