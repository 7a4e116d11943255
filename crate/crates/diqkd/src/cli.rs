//! Command-line front end: key-rate evaluation, figure-data emission,
//! region tables, Monte Carlo runs and parameter sweeps.
//!
//! Every numeric flag can also come from a JSON config file
//! (`--config`), keyed by the flag names with underscores; explicit
//! flags win on conflict. Exit codes: 0 success, 1 I/O failure,
//! 2 usage, 3 domain violation, 4 numerical-integrity failure,
//! 5 undefined estimate.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args as ClapArgs, Parser, Subcommand};
use serde::Deserialize;

use crate::attack::{
    band_gamma_lower, band_gamma_upper, chsh_band_regions, collective_chsh, collective_qber,
    sequential_chsh_tilde, sequential_optimal_chsh, simultaneous_nonlocality_window, theta_star,
};
use crate::error::{Error, Result};
use crate::figures::{figure_dataset, FigureId};
use crate::keyrate::{
    bell_diagonal_holevo, collective_key_rate, sequential_collective_key_rate,
    sequential_individual_key_rate, sequential_qber, AttackModel, KeyRateReport,
};
use crate::output::{format_value, write_tables, Column, Table};
use crate::sim::{
    analytic_prediction, eve_guess_accuracy, run_simulation, write_records, Attack,
    SimulationConfig,
};

#[derive(Parser)]
#[command(
    name = "diqkd",
    version,
    about = "Key rates and Bell-violation geometry of a device-independent QKD protocol \
             under collective and sequential eavesdropping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one key-rate bound and its intermediate quantities.
    Keyrate(KeyrateArgs),
    /// Emit the figure datasets as CSV plus a manifest.
    Figure(FigureArgs),
    /// Tabulate attack-region sharpness bounds.
    Region(RegionArgs),
    /// Run the seeded round-by-round protocol simulation.
    Simulate(SimulateArgs),
    /// Sweep one parameter and tabulate derived quantities.
    Sweep(SweepArgs),
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Keyrate(args) => cmd_keyrate(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Region(args) => cmd_region(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_overlay<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let body = std::fs::read_to_string(path)?;
    serde_json::from_str(&body)
        .map_err(|e| Error::Usage(format!("config file {}: {e}", path.display())))
}

fn parse_format(format: Option<&str>, default_json: bool) -> Result<bool> {
    match format {
        None => Ok(default_json),
        Some("json") => Ok(true),
        Some("csv") => Ok(false),
        Some(other) => Err(Error::Usage(format!(
            "unknown format {other:?} (expected csv or json)"
        ))),
    }
}

fn require(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Usage(format!("missing required parameter --{flag}")))
}

fn print_table_csv(table: &Table) {
    print!("{}", table.to_csv_string());
}

fn table_json(table: &Table) -> serde_json::Value {
    serde_json::json!({
        "name": table.name(),
        "columns": table.columns(),
        "rows": table.rows(),
    })
}

fn emit_table(
    table: Table,
    json: bool,
    out: Option<&Path>,
    command: &str,
    parameters: serde_json::Value,
) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(&table_json(&table))?);
    } else {
        print_table_csv(&table);
    }
    if let Some(dir) = out {
        write_tables(dir, command, parameters, &[table], false)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// keyrate
// ---------------------------------------------------------------------------

#[derive(ClapArgs, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct KeyrateArgs {
    /// collective, sequential-individual or sequential-collective
    #[arg(long)]
    model: Option<String>,
    /// Collective noise amplitude; implies the family's (S, Q) pair
    #[arg(long, conflicts_with_all = ["chsh", "qber"])]
    alpha: Option<f64>,
    /// CHSH value for the collective bound (with --qber)
    #[arg(long)]
    chsh: Option<f64>,
    /// Error rate: observed Q (collective) or key-device Q (sequential)
    #[arg(long)]
    qber: Option<f64>,
    /// Eve's z-setting bias (sequential models)
    #[arg(long)]
    q: Option<f64>,
    /// Eve's x-setting sharpness (sequential models)
    #[arg(long)]
    gamma: Option<f64>,
    /// csv (default) or json
    #[arg(long)]
    format: Option<String>,
    /// Also write the row and a manifest under this directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file supplying any of the above, flags win
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl KeyrateArgs {
    fn overlay(mut self, file: KeyrateArgs) -> Self {
        self.model = self.model.or(file.model);
        self.alpha = self.alpha.or(file.alpha);
        self.chsh = self.chsh.or(file.chsh);
        self.qber = self.qber.or(file.qber);
        self.q = self.q.or(file.q);
        self.gamma = self.gamma.or(file.gamma);
        self.format = self.format.or(file.format);
        self.out = self.out.or(file.out);
        self
    }
}

fn keyrate_table(model: AttackModel, inputs: &[(&str, f64)], report: &KeyRateReport) -> Table {
    let mut columns: Vec<Column> = inputs
        .iter()
        .map(|(name, _)| Column::new(name, "dimensionless", "input parameter"))
        .collect();
    columns.extend([
        Column::new("chsh", "dimensionless", "CHSH value of the modeled state"),
        Column::new("qber", "probability", "error rate entering the bound"),
        Column::new("holevo", "bits", "Eve's Holevo bound (NaN when the model has none)"),
        Column::new("key_rate", "bits/round", "raw lower bound, may be negative"),
        Column::new("key_rate_floored", "bits/round", "max(key_rate, 0)"),
    ]);
    let mut table = Table::new(&format!("keyrate_{model}"), columns);
    let mut row: Vec<f64> = inputs.iter().map(|(_, v)| *v).collect();
    row.extend([
        report.chsh,
        report.qber,
        report.holevo.unwrap_or(f64::NAN),
        report.rate,
        report.rate_floored,
    ]);
    table.push_row(row);
    table
}

fn cmd_keyrate(mut args: KeyrateArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.overlay(load_overlay(&path)?);
    }
    let model = match args.model.as_deref() {
        Some("collective") => AttackModel::Collective,
        Some("sequential-individual") => AttackModel::SequentialIndividual,
        Some("sequential-collective") => AttackModel::SequentialCollective,
        Some(other) => {
            return Err(Error::Usage(format!(
                "unknown model {other:?} (expected collective, sequential-individual \
                 or sequential-collective)"
            )))
        }
        None => return Err(Error::Usage("missing required parameter --model".into())),
    };
    let json = parse_format(args.format.as_deref(), false)?;
    let (inputs, report) = match model {
        AttackModel::Collective => {
            let (chsh, qber, inputs) = if let Some(alpha) = args.alpha {
                (
                    collective_chsh(alpha)?,
                    collective_qber(alpha)?,
                    vec![("alpha", alpha)],
                )
            } else {
                let chsh = require(args.chsh, "chsh (or --alpha)")?;
                let qber = require(args.qber, "qber (or --alpha)")?;
                (chsh, qber, vec![])
            };
            (inputs, collective_key_rate(qber, chsh)?)
        }
        AttackModel::SequentialIndividual | AttackModel::SequentialCollective => {
            let q = require(args.q, "q")?;
            let gamma = require(args.gamma, "gamma")?;
            let base = args.qber.unwrap_or(0.0);
            let report = if model == AttackModel::SequentialIndividual {
                sequential_individual_key_rate(q, gamma, base)?
            } else {
                sequential_collective_key_rate(q, gamma, base)?
            };
            (vec![("q", q), ("gamma", gamma), ("base_qber", base)], report)
        }
    };
    let table = keyrate_table(model, &inputs, &report);
    let params = serde_json::json!({
        "model": model.as_str(),
        "inputs": inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<std::collections::BTreeMap<_, _>>(),
    });
    emit_table(table, json, args.out.as_deref(), "keyrate", params)
}

// ---------------------------------------------------------------------------
// figure
// ---------------------------------------------------------------------------

#[derive(ClapArgs, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct FigureArgs {
    /// fig1, fig3, fig4, fig5 or all
    id: Option<String>,
    /// Points per curve (and per polygon edge quarter)
    #[arg(long)]
    resolution: Option<usize>,
    /// Output directory (default: figures)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the generation time in the manifest
    #[arg(long)]
    stamp: bool,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl FigureArgs {
    fn overlay(mut self, file: FigureArgs) -> Self {
        self.id = self.id.or(file.id);
        self.resolution = self.resolution.or(file.resolution);
        self.out = self.out.or(file.out);
        self.stamp = self.stamp || file.stamp;
        self
    }
}

fn cmd_figure(mut args: FigureArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.overlay(load_overlay(&path)?);
    }
    let id = args.id.as_deref().unwrap_or("all");
    let ids: Vec<FigureId> = if id == "all" {
        FigureId::ALL.to_vec()
    } else {
        vec![id.parse()?]
    };
    let resolution = args.resolution.unwrap_or(200);
    let out = args.out.unwrap_or_else(|| PathBuf::from("figures"));
    let mut tables = Vec::new();
    for figure in &ids {
        tables.extend(figure_dataset(*figure, resolution)?);
    }
    let params = serde_json::json!({
        "figures": ids.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        "resolution": resolution,
    });
    let written = write_tables(&out, "figure", params, &tables, args.stamp)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// region
// ---------------------------------------------------------------------------

#[derive(ClapArgs, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RegionArgs {
    /// band (CHSH benchmark band) or nonlocality (simultaneous
    /// Alice-Eve and Alice-Bob violation)
    #[arg(long)]
    family: Option<String>,
    /// Single bias value; omit for a grid
    #[arg(long)]
    q: Option<f64>,
    /// Settings angle (nonlocality family)
    #[arg(long)]
    theta: Option<f64>,
    /// Grid rows when --q is omitted
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl RegionArgs {
    fn overlay(mut self, file: RegionArgs) -> Self {
        self.family = self.family.or(file.family);
        self.q = self.q.or(file.q);
        self.theta = self.theta.or(file.theta);
        self.resolution = self.resolution.or(file.resolution);
        self.format = self.format.or(file.format);
        self.out = self.out.or(file.out);
        self
    }
}

fn q_grid(single: Option<f64>, lo: f64, hi: f64, rows: usize) -> Vec<f64> {
    match single {
        Some(q) => vec![q],
        None => (0..rows)
            .map(|i| lo + (hi - lo) * i as f64 / (rows - 1) as f64)
            .collect(),
    }
}

fn cmd_region(mut args: RegionArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.overlay(load_overlay(&path)?);
    }
    let json = parse_format(args.format.as_deref(), false)?;
    let rows = args.resolution.unwrap_or(25).max(2);
    let family = args.family.as_deref().unwrap_or("band");
    let (table, params) = match family {
        "band" => {
            let (stage1, stage2) = chsh_band_regions();
            let mut table = Table::new(
                "band_region",
                vec![
                    Column::new("q", "probability", "Eve's z-setting bias"),
                    Column::new(
                        "stage",
                        "dimensionless",
                        "1: both band targets bind; 2: only the lower target; NaN: empty",
                    ),
                    Column::new(
                        "gamma_lower",
                        "dimensionless",
                        "sharpness putting the optimal CHSH on the band's upper target (0 in stage 2)",
                    ),
                    Column::new(
                        "gamma_upper",
                        "dimensionless",
                        "sharpness putting the optimal CHSH on the band's lower target",
                    ),
                    Column::new("empty", "flag", "1 when no sharpness qualifies at this bias"),
                ],
            );
            for q in q_grid(args.q, 0.5, 0.70, rows) {
                let w1 = stage1.gamma_window(q)?;
                let (stage, window) = if !w1.is_empty() {
                    (1.0, w1)
                } else {
                    let w2 = stage2.gamma_window(q)?;
                    if !w2.is_empty() {
                        (2.0, w2)
                    } else {
                        (f64::NAN, w2)
                    }
                };
                let empty = stage.is_nan();
                table.push_row(vec![
                    q,
                    stage,
                    if empty { f64::NAN } else { window.lower },
                    if empty { f64::NAN } else { window.upper },
                    f64::from(u8::from(empty)),
                ]);
            }
            (table, serde_json::json!({ "family": "band", "q": args.q }))
        }
        "nonlocality" => {
            let theta = require(args.theta, "theta")?;
            let mut table = Table::new(
                "nonlocality_region",
                vec![
                    Column::new("q", "probability", "Eve's z-setting bias"),
                    Column::new(
                        "gamma_lower",
                        "dimensionless",
                        "least sharpness giving Eve a violation: q tan(theta/2) / (1-q)",
                    ),
                    Column::new(
                        "gamma_upper",
                        "dimensionless",
                        "greatest sharpness keeping Bob nonlocal at the same settings",
                    ),
                    Column::new("empty", "flag", "1 when the bounds cross"),
                ],
            );
            for q in q_grid(args.q, 0.5, 0.95, rows) {
                let w = simultaneous_nonlocality_window(theta, q)?;
                table.push_row(vec![
                    q,
                    w.lower,
                    w.upper,
                    f64::from(u8::from(w.is_empty())),
                ]);
            }
            (
                table,
                serde_json::json!({ "family": "nonlocality", "theta": theta, "q": args.q }),
            )
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown region family {other:?} (expected band or nonlocality)"
            )))
        }
    };
    emit_table(table, json, args.out.as_deref(), "region", params)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(ClapArgs, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct SimulateArgs {
    /// none, collective or sequential
    #[arg(long)]
    attack: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Eve's x-setting sharpness
    #[arg(long)]
    gamma: Option<f64>,
    /// Eve's z-setting sharpness (default 1: sharp key interception)
    #[arg(long)]
    gamma1: Option<f64>,
    /// Alice's settings angle (default: the post-attack optimum)
    #[arg(long)]
    theta: Option<f64>,
    /// Key-device error rate Q realized by classical randomization
    #[arg(long)]
    qber: Option<f64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Probability that a round is publicly disclosed
    #[arg(long = "spot-fraction")]
    spot_fraction: Option<f64>,
    /// Write the full record stream to this file
    #[arg(long = "export-records")]
    export_records: Option<PathBuf>,
    /// json (default) or csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl SimulateArgs {
    fn overlay(mut self, file: SimulateArgs) -> Self {
        self.attack = self.attack.or(file.attack);
        self.alpha = self.alpha.or(file.alpha);
        self.q = self.q.or(file.q);
        self.gamma = self.gamma.or(file.gamma);
        self.gamma1 = self.gamma1.or(file.gamma1);
        self.theta = self.theta.or(file.theta);
        self.qber = self.qber.or(file.qber);
        self.rounds = self.rounds.or(file.rounds);
        self.seed = self.seed.or(file.seed);
        self.spot_fraction = self.spot_fraction.or(file.spot_fraction);
        self.export_records = self.export_records.or(file.export_records);
        self.format = self.format.or(file.format);
        self
    }
}

fn cmd_simulate(mut args: SimulateArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.overlay(load_overlay(&path)?);
    }
    let json = parse_format(args.format.as_deref(), true)?;
    let attack = match args.attack.as_deref() {
        None | Some("none") => Attack::None,
        Some("collective") => Attack::Collective {
            alpha: require(args.alpha, "alpha")?,
        },
        Some("sequential") => {
            let q = require(args.q, "q")?;
            let gamma = require(args.gamma, "gamma")?;
            let theta = match args.theta {
                Some(t) => t,
                None => theta_star(q, gamma)?,
            };
            Attack::Sequential {
                q,
                gamma1: args.gamma1.unwrap_or(1.0),
                gamma2: gamma,
                theta,
            }
        }
        Some(other) => {
            return Err(Error::Usage(format!(
                "unknown attack {other:?} (expected none, collective or sequential)"
            )))
        }
    };
    let mut config = SimulationConfig::for_attack(
        attack,
        args.rounds.unwrap_or(100_000),
        args.seed.unwrap_or(1),
    )?;
    if let Some(f) = args.spot_fraction {
        config.spot_check_fraction = f;
    }
    if let Some(qber) = args.qber {
        config.key_qber = qber;
    }
    config.validate()?;

    let prediction = analytic_prediction(&config)?;
    let (records, report) = run_simulation(&config)?;
    let guess = if attack.is_sequential() {
        Some(eve_guess_accuracy(&records)?)
    } else {
        None
    };
    if let Some(path) = &args.export_records {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_records(&records, &mut file)?;
    }
    let z_chsh = (report.chsh_estimate - prediction.chsh) / report.chsh_standard_error;
    let z_qber = (report.qber_estimate - prediction.qber) / report.qber_standard_error;
    if json {
        let body = serde_json::json!({
            "attack": attack,
            "rounds": config.rounds,
            "seed": config.seed,
            "spot_check_fraction": config.spot_check_fraction,
            "key_qber": config.key_qber,
            "estimates": report,
            "analytic": prediction,
            "z_scores": { "chsh": z_chsh, "qber": z_qber },
            "eve_guess_accuracy": guess,
        });
        println!("{}", serde_json::to_string_pretty(&body)?);
    } else {
        let header = [
            "chsh_estimate",
            "chsh_standard_error",
            "qber_estimate",
            "qber_standard_error",
            "sifted_key_length",
            "raw_key_mismatches",
            "analytic_chsh",
            "analytic_qber",
            "z_chsh",
            "z_qber",
            "eve_guess_accuracy",
        ];
        println!("{}", header.join(","));
        let row = [
            report.chsh_estimate,
            report.chsh_standard_error,
            report.qber_estimate,
            report.qber_standard_error,
            report.sifted_key_length as f64,
            report.raw_key_mismatches as f64,
            prediction.chsh,
            prediction.qber,
            z_chsh,
            z_qber,
            guess.unwrap_or(f64::NAN),
        ];
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        println!("{}", cells.join(","));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum SweepVar {
    Alpha,
    Q,
    Gamma,
    Theta,
}

impl SweepVar {
    fn name(self) -> &'static str {
        match self {
            SweepVar::Alpha => "alpha",
            SweepVar::Q => "q",
            SweepVar::Gamma => "gamma",
            SweepVar::Theta => "theta",
        }
    }

    fn default_range(self) -> (f64, f64) {
        match self {
            SweepVar::Alpha => (0.0, 0.2625),
            SweepVar::Q => (0.5, 0.6856),
            SweepVar::Gamma => (0.0, 0.8),
            SweepVar::Theta => (0.05, 0.75),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SweepOutput {
    Chsh,
    Qber,
    RateCollective,
    RateIndividual,
    RateMemory,
    Holevo,
    Regions,
}

impl SweepOutput {
    fn parse(token: &str) -> Result<Self> {
        Ok(match token {
            "chsh" => SweepOutput::Chsh,
            "qber" => SweepOutput::Qber,
            "r_c" => SweepOutput::RateCollective,
            "r_s" => SweepOutput::RateIndividual,
            "r_cs" => SweepOutput::RateMemory,
            "holevo" => SweepOutput::Holevo,
            "regions" => SweepOutput::Regions,
            other => {
                return Err(Error::Usage(format!(
                    "unknown output {other:?} (expected chsh, qber, r_c, r_s, r_cs, \
                     holevo or regions)"
                )))
            }
        })
    }

    fn applicable(self, var: SweepVar) -> bool {
        match self {
            SweepOutput::Chsh | SweepOutput::Qber => true,
            SweepOutput::RateCollective => var == SweepVar::Alpha,
            SweepOutput::RateIndividual | SweepOutput::RateMemory | SweepOutput::Holevo => {
                var == SweepVar::Q || var == SweepVar::Gamma
            }
            SweepOutput::Regions => var == SweepVar::Q,
        }
    }

    fn columns(self) -> Vec<Column> {
        match self {
            SweepOutput::Chsh => vec![Column::new(
                "chsh",
                "dimensionless",
                "CHSH value (collective family, post-attack optimum, or the value at theta)",
            )],
            SweepOutput::Qber => vec![Column::new(
                "qber",
                "probability",
                "error rate (collective Q or modified Q^S)",
            )],
            SweepOutput::RateCollective => vec![Column::new(
                "key_rate_collective",
                "bits/round",
                "r_C = 1 - H(Q) - H((1 + sqrt((S/2)^2 - 1)) / 2)",
            )],
            SweepOutput::RateIndividual => vec![Column::new(
                "key_rate_individual",
                "bits/round",
                "r_S = 1 - H(Q^S) - q (1 - H(Q))",
            )],
            SweepOutput::RateMemory => vec![Column::new(
                "key_rate_memory",
                "bits/round",
                "r_CS = 1 - H(Q^S) - chi",
            )],
            SweepOutput::Holevo => vec![Column::new(
                "holevo",
                "bits",
                "chi of the intercepted Bell-diagonal family",
            )],
            SweepOutput::Regions => vec![
                Column::new(
                    "band_gamma_lower",
                    "dimensionless",
                    "closed form for the band's upper target (NaN beyond reach)",
                ),
                Column::new(
                    "band_gamma_upper",
                    "dimensionless",
                    "closed form for the band's lower target (NaN beyond reach)",
                ),
            ],
        }
    }
}

#[derive(ClapArgs, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct SweepArgs {
    /// alpha, q, gamma or theta
    #[arg(long)]
    variable: Option<String>,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Fixed bias (gamma and theta sweeps)
    #[arg(long)]
    q: Option<f64>,
    /// Fixed sharpness (q and theta sweeps)
    #[arg(long)]
    gamma: Option<f64>,
    /// Key-device error rate entering Q^S and the rates
    #[arg(long)]
    qber: Option<f64>,
    /// Comma-separated subset of chsh,qber,r_c,r_s,r_cs,holevo,regions
    #[arg(long)]
    outputs: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl SweepArgs {
    fn overlay(mut self, file: SweepArgs) -> Self {
        self.variable = self.variable.or(file.variable);
        self.lo = self.lo.or(file.lo);
        self.hi = self.hi.or(file.hi);
        self.steps = self.steps.or(file.steps);
        self.q = self.q.or(file.q);
        self.gamma = self.gamma.or(file.gamma);
        self.qber = self.qber.or(file.qber);
        self.outputs = self.outputs.or(file.outputs);
        self.format = self.format.or(file.format);
        self.out = self.out.or(file.out);
        self
    }
}

fn cmd_sweep(mut args: SweepArgs) -> Result<()> {
    if let Some(path) = args.config.take() {
        args = args.overlay(load_overlay(&path)?);
    }
    let json = parse_format(args.format.as_deref(), false)?;
    let var = match args.variable.as_deref() {
        Some("alpha") => SweepVar::Alpha,
        Some("q") => SweepVar::Q,
        Some("gamma") => SweepVar::Gamma,
        Some("theta") => SweepVar::Theta,
        Some(other) => {
            return Err(Error::Usage(format!(
                "unknown variable {other:?} (expected alpha, q, gamma or theta)"
            )))
        }
        None => return Err(Error::Usage("missing required parameter --variable".into())),
    };
    let (default_lo, default_hi) = var.default_range();
    let lo = args.lo.unwrap_or(default_lo);
    let hi = args.hi.unwrap_or(default_hi);
    let steps = args.steps.unwrap_or(50);
    // partial_cmp keeps NaN bounds out along with inverted ranges.
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || steps < 2 {
        return Err(Error::Usage(format!(
            "sweep needs lo < hi and at least 2 steps (got {lo}..{hi} in {steps})"
        )));
    }
    let outputs: Vec<SweepOutput> = match args.outputs.as_deref() {
        Some(list) => list
            .split(',')
            .map(|t| SweepOutput::parse(t.trim()))
            .collect::<Result<_>>()?,
        None => {
            let all = [
                SweepOutput::Chsh,
                SweepOutput::Qber,
                SweepOutput::RateCollective,
                SweepOutput::RateIndividual,
                SweepOutput::RateMemory,
                SweepOutput::Holevo,
                SweepOutput::Regions,
            ];
            all.into_iter().filter(|o| o.applicable(var)).collect()
        }
    };
    for output in &outputs {
        if !output.applicable(var) {
            return Err(Error::Usage(format!(
                "output {:?} does not apply to a {} sweep",
                output.columns()[0].name,
                var.name()
            )));
        }
    }
    let base = args.qber.unwrap_or(0.0);
    let fixed_q = args.q;
    let fixed_gamma = args.gamma;
    let need = |value: Option<f64>, flag: &str| {
        value.ok_or_else(|| {
            Error::Usage(format!("a {} sweep needs --{flag}", var.name()))
        })
    };

    let mut columns = vec![Column::new(var.name(), "dimensionless", "sweep variable")];
    for output in &outputs {
        columns.extend(output.columns());
    }
    let mut table = Table::new(&format!("sweep_{}", var.name()), columns);

    use rayon::prelude::*;
    let points: Vec<f64> = (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect();
    let rows: Result<Vec<Vec<f64>>> = points
        .par_iter()
        .map(|&x| -> Result<Vec<f64>> {
            let mut row = vec![x];
            for output in &outputs {
                match (var, output) {
                    (SweepVar::Alpha, SweepOutput::Chsh) => row.push(collective_chsh(x)?),
                    (SweepVar::Alpha, SweepOutput::Qber) => row.push(collective_qber(x)?),
                    (SweepVar::Alpha, SweepOutput::RateCollective) => {
                        row.push(collective_key_rate(collective_qber(x)?, collective_chsh(x)?)?.rate)
                    }
                    (SweepVar::Q, SweepOutput::Chsh) => {
                        row.push(sequential_optimal_chsh(x, need(fixed_gamma, "gamma")?)?)
                    }
                    (SweepVar::Q, SweepOutput::Qber) => {
                        row.push(sequential_qber(x, need(fixed_gamma, "gamma")?, base)?)
                    }
                    (SweepVar::Q, SweepOutput::RateIndividual) => row.push(
                        sequential_individual_key_rate(x, need(fixed_gamma, "gamma")?, base)?.rate,
                    ),
                    (SweepVar::Q, SweepOutput::RateMemory) => row.push(
                        sequential_collective_key_rate(x, need(fixed_gamma, "gamma")?, base)?.rate,
                    ),
                    (SweepVar::Q, SweepOutput::Holevo) => row.push(bell_diagonal_holevo(
                        &crate::attack::bell_spectrum(x, need(fixed_gamma, "gamma")?)?,
                    )?),
                    (SweepVar::Q, SweepOutput::Regions) => {
                        row.push(band_gamma_lower(x).unwrap_or(f64::NAN));
                        row.push(band_gamma_upper(x).unwrap_or(f64::NAN));
                    }
                    (SweepVar::Gamma, SweepOutput::Chsh) => {
                        row.push(sequential_optimal_chsh(need(fixed_q, "q")?, x)?)
                    }
                    (SweepVar::Gamma, SweepOutput::Qber) => {
                        row.push(sequential_qber(need(fixed_q, "q")?, x, base)?)
                    }
                    (SweepVar::Gamma, SweepOutput::RateIndividual) => row.push(
                        sequential_individual_key_rate(need(fixed_q, "q")?, x, base)?.rate,
                    ),
                    (SweepVar::Gamma, SweepOutput::RateMemory) => row.push(
                        sequential_collective_key_rate(need(fixed_q, "q")?, x, base)?.rate,
                    ),
                    (SweepVar::Gamma, SweepOutput::Holevo) => row.push(bell_diagonal_holevo(
                        &crate::attack::bell_spectrum(need(fixed_q, "q")?, x)?,
                    )?),
                    (SweepVar::Theta, SweepOutput::Chsh) => row.push(sequential_chsh_tilde(
                        need(fixed_q, "q")?,
                        need(fixed_gamma, "gamma")?,
                        x,
                    )?),
                    (SweepVar::Theta, SweepOutput::Qber) => {
                        row.push(sequential_qber(need(fixed_q, "q")?, need(fixed_gamma, "gamma")?, base)?)
                    }
                    _ => unreachable!("applicability checked above"),
                }
            }
            Ok(row)
        })
        .collect();
    for row in rows? {
        table.push_row(row);
    }
    let params = serde_json::json!({
        "variable": var.name(),
        "lo": lo,
        "hi": hi,
        "steps": steps,
        "q": fixed_q,
        "gamma": fixed_gamma,
        "qber": base,
    });
    emit_table(table, json, args.out.as_deref(), "sweep", params)
}
