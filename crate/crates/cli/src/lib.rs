//! Command-line front end: configuration, subcommand dispatch and output.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2 numerical
//! failure. Errors go to standard error as `error: ...`.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::error::ErrorKind;
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use thiserror::Error;

use magnonic_core::oracle::{hysteresis_sweep, validate_point, BranchCheck};
use magnonic_core::stability::analyze_all_branches;
use magnonic_core::sweep::{
    contrast_map, evaluate, fluctuation_cut, order_parameter_cut, phase_diagram, GridPoint,
    SignPair, Workers,
};
use magnonic_core::{critical_xi, omega_1, omega_2, KerrSign};

pub use config::Config;
use output::{Cell, Format, Table};

/// Agreement thresholds reported in the `agree` column of `oracle`.
pub const ORACLE_RHO_TOL: f64 = 1e-5;
pub const ORACLE_COVARIANCE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{tag}: {0}", tag = .0.tag())]
    Numerical(#[from] magnonic_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use magnonic_core::Error as E;
        match self {
            CliError::Numerical(E::InvalidParams(_) | E::InvalidSweep(_)) => 1,
            CliError::Numerical(_) => 2,
            CliError::Config(_) | CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            other => other.to_string(),
        }
    }
}

const SUBCOMMANDS: &[(&str, &str)] = &[
    ("branches", "the three steady-state branches at one point"),
    ("thresholds", "critical ratio and both critical drives"),
    ("phase-diagram", "phase label over the drive/ratio grid"),
    ("cut", "order parameter for both Kerr signs along the drive"),
    ("contrast", "contrast ratio over the drive/ratio grid"),
    ("fluctuations", "magnon-number fluctuations for both Kerr signs along the drive"),
    ("oracle", "brute-force validation grid"),
    ("hysteresis", "up- and down-sweep of the drive following the attractor"),
];

pub fn command() -> Command {
    let mut cmd = Command::new("magnonic")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Phases, nonreciprocity and fluctuations of a parametrically driven cavity-magnon system")
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .global(true)
                .help("key = value configuration file; flags override it"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .short('o')
                .value_name("FILE")
                .global(true)
                .help("write output here instead of stdout"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_parser(["csv", "json"])
                .default_value("csv")
                .global(true),
        )
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .short('j')
                .env("MAGNONIC_JOBS")
                .value_parser(value_parser!(usize))
                .global(true)
                .help("worker threads; 0 or unset uses every core"),
        )
        .arg(
            Arg::new("dump-config")
                .long("dump-config")
                .action(ArgAction::SetTrue)
                .global(true)
                .help("print the effective configuration and exit"),
        );
    for &(key, help) in Config::KEYS {
        let mut arg = Arg::new(key)
            .long(key)
            .value_name("VALUE")
            .allow_hyphen_values(true)
            .global(true)
            .help(help)
            .help_heading("Configuration");
        arg = match key {
            "delta_m_over_delta_a" => arg.alias("ratio"),
            "kerr_sign" => arg.alias("kerr"),
            _ => arg,
        };
        cmd = cmd.arg(arg);
    }
    for &(name, about) in SUBCOMMANDS {
        cmd = cmd.subcommand(Command::new(name).about(about));
    }
    cmd
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    // clap's rendering already starts with "error:"
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&matches, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn effective_matches(matches: &ArgMatches) -> &ArgMatches {
    matches.subcommand().map_or(matches, |(_, sub)| sub)
}

pub fn load_config(matches: &ArgMatches) -> Result<Config, CliError> {
    let m = effective_matches(matches);
    let mut cfg = Config::default();
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
        cfg.apply_text(&text)?;
    }
    for &(key, _) in Config::KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            cfg.set(key, v)?;
        }
    }
    cfg.normalized()
}

fn execute(matches: &ArgMatches, stdout: &mut dyn Write) -> Result<(), CliError> {
    let m = effective_matches(matches);
    let cfg = load_config(matches)?;
    let format: Format = m
        .get_one::<String>("format")
        .map_or(Ok(Format::Csv), |s| s.parse())
        .map_err(CliError::Config)?;
    let workers = Workers(m.get_one::<usize>("jobs").copied().unwrap_or(0));

    let mut file;
    let out: &mut dyn Write = match m.get_one::<String>("out") {
        Some(path) => {
            file = BufWriter::new(
                File::create(path).map_err(|e| CliError::Config(format!("cannot create {path}: {e}")))?,
            );
            &mut file
        }
        None => stdout,
    };

    if m.get_flag("dump-config") {
        out.write_all(cfg.dump().as_bytes())?;
        out.flush()?;
        return Ok(());
    }
    let Some((name, _)) = matches.subcommand() else {
        return Err(CliError::Config(
            "missing subcommand (see --help)".into(),
        ));
    };
    cfg.params().validate()?;
    let table = match name {
        "branches" => branches(&cfg)?,
        "thresholds" => thresholds(&cfg)?,
        "phase-diagram" => phase_table(&cfg, workers)?,
        "cut" => cut_table(&cfg, workers)?,
        "contrast" => contrast_table(&cfg, workers)?,
        "fluctuations" => fluctuation_table(&cfg, workers)?,
        "oracle" => oracle_table(&cfg, workers)?,
        "hysteresis" => hysteresis_table(&cfg)?,
        other => unreachable!("unknown subcommand {other}"),
    };
    table.write(format, out)?;
    out.flush()?;
    Ok(())
}

fn sign_cell(sign: KerrSign) -> Cell {
    Cell::Text(sign.symbol().to_string())
}

fn tag_cell(e: &magnonic_core::Error) -> Cell {
    Cell::Text(e.tag().to_string())
}

pub fn branches(cfg: &Config) -> Result<Table, CliError> {
    let p = cfg.params();
    let mut t = Table::new(&[
        "omega", "ratio", "kerr", "branch", "admissible", "magnon_occ", "photon_occ", "rho",
        "m_re", "m_im", "a_re", "a_im", "stable", "max_re",
    ]);
    for b in analyze_all_branches(&p)? {
        let s = &b.solution;
        t.push(vec![
            p.omega_drive.into(),
            p.detuning_ratio().into(),
            sign_cell(p.kerr_sign),
            s.label.name().into(),
            s.admissible.into(),
            s.magnon_occ.into(),
            s.photon_occ.into(),
            p.scaled_occupation(s.magnon_occ).into(),
            s.m_amplitude.map(|z| z.re).into(),
            s.m_amplitude.map(|z| z.im).into(),
            s.a_amplitude.map(|z| z.re).into(),
            s.a_amplitude.map(|z| z.im).into(),
            b.is_stable().into(),
            b.max_real_part().into(),
        ]);
    }
    Ok(t)
}

pub fn thresholds(cfg: &Config) -> Result<Table, CliError> {
    let p = cfg.params();
    let mut t = Table::new(&["ratio", "xi", "omega_1", "omega_2"]);
    t.push(vec![
        p.detuning_ratio().into(),
        critical_xi(&p).into(),
        omega_1(&p).into(),
        omega_2(&p)?.into(),
    ]);
    Ok(t)
}

pub fn phase_table(cfg: &Config, workers: Workers) -> Result<Table, CliError> {
    let sign = cfg.kerr_sign;
    let grid = phase_diagram(&cfg.grid(), sign, workers)?;
    let mut t = Table::new(&["omega", "ratio", "kerr", "phase", "marginal"]);
    for p in &grid.points {
        let (phase, marginal) = match &p.value {
            Ok(s) => (s.label.name().into(), s.marginal.into()),
            Err(e) => (tag_cell(e), Cell::Empty),
        };
        t.push(vec![p.omega.into(), p.ratio.into(), sign_cell(sign), phase, marginal]);
    }
    Ok(t)
}

fn pair_rows<T>(
    t: &mut Table,
    points: &[GridPoint<SignPair<T>>],
    cells: impl Fn(&SignPair<T>) -> Vec<Cell>,
) {
    for p in points {
        let mut row = vec![p.omega.into(), p.ratio.into()];
        match &p.value {
            Ok(v) => row.extend(cells(v)),
            Err(e) => {
                let n = t.columns.len() - 2;
                row.extend((0..n).map(|_| tag_cell(e)));
            }
        }
        t.push(row);
    }
}

pub fn cut_table(cfg: &Config, workers: Workers) -> Result<Table, CliError> {
    let grid = order_parameter_cut(&cfg.cut(), workers)?;
    let mut t = Table::new(&[
        "omega", "ratio", "rho_pos", "rho_neg", "phase_pos", "phase_neg", "marginal",
    ]);
    pair_rows(&mut t, &grid.points, |v| {
        vec![
            v.pos.rho.into(),
            v.neg.rho.into(),
            v.pos.phase.name().into(),
            v.neg.phase.name().into(),
            (v.pos.marginal || v.neg.marginal).into(),
        ]
    });
    Ok(t)
}

pub fn contrast_table(cfg: &Config, workers: Workers) -> Result<Table, CliError> {
    let grid = contrast_map(&cfg.grid(), workers)?;
    let mut t = Table::new(&[
        "omega", "ratio", "rho_pos", "rho_neg", "contrast", "phase_pos", "phase_neg", "marginal",
    ]);
    for p in &grid.points {
        let mut row: Vec<Cell> = vec![p.omega.into(), p.ratio.into()];
        match &p.value {
            Ok(c) => row.extend([
                c.rho_pos.into(),
                c.rho_neg.into(),
                c.contrast.into(),
                c.phase_pos.name().into(),
                c.phase_neg.name().into(),
                c.marginal.into(),
            ]),
            Err(e) => row.extend((0..6).map(|_| tag_cell(e))),
        }
        t.push(row);
    }
    Ok(t)
}

pub fn fluctuation_table(cfg: &Config, workers: Workers) -> Result<Table, CliError> {
    let grid = fluctuation_cut(&cfg.cut(), workers)?;
    let mut t = Table::new(&[
        "omega", "ratio", "lg_pos", "lg_neg", "n_pos", "n_neg", "phase_pos", "phase_neg",
        "residual",
    ]);
    pair_rows(&mut t, &grid.points, |v| {
        vec![
            v.pos.log_fluct().into(),
            v.neg.log_fluct().into(),
            v.pos.magnon_fluct.into(),
            v.neg.magnon_fluct.into(),
            v.pos.phase.name().into(),
            v.neg.phase.name().into(),
            v.pos.residual.max(v.neg.residual).into(),
        ]
    });
    Ok(t)
}

/// Whether one branch check meets the oracle tolerances.
pub fn oracle_agrees(c: &BranchCheck) -> bool {
    c.stability_agrees()
        && c.rho_diff().is_none_or(|d| d < ORACLE_RHO_TOL)
        && c.lyapunov_diff.is_none_or(|d| d < ORACLE_COVARIANCE_TOL)
}

pub fn oracle_table(cfg: &Config, workers: Workers) -> Result<Table, CliError> {
    let settings = cfg.validation();
    let grid = evaluate(&cfg.oracle_grid(), workers, |p| {
        Ok(SignPair {
            pos: validate_point(&p.with_kerr_sign(KerrSign::Positive), &settings),
            neg: validate_point(&p.with_kerr_sign(KerrSign::Negative), &settings),
        })
    })?;
    let mut t = Table::new(&[
        "omega", "ratio", "kerr", "branch", "admissible", "stable", "max_re", "probe_grew",
        "rho_formula", "rho_oracle", "rho_diff", "lyapunov_diff", "agree",
    ]);
    for p in &grid.points {
        let pair = p.value.as_ref().expect("per-sign errors are kept inside the pair");
        for (sign, checks) in [(KerrSign::Positive, &pair.pos), (KerrSign::Negative, &pair.neg)] {
            let head = || -> Vec<Cell> { vec![p.omega.into(), p.ratio.into(), sign_cell(sign)] };
            match checks {
                Ok(checks) => {
                    for c in checks {
                        let mut row = head();
                        row.extend([
                            c.label.name().into(),
                            c.admissible.into(),
                            c.stable.into(),
                            c.max_re.into(),
                            c.probe_grew.into(),
                            c.rho_formula.into(),
                            c.rho_oracle.into(),
                            c.rho_diff().into(),
                            c.lyapunov_diff.into(),
                            oracle_agrees(c).into(),
                        ]);
                        t.push(row);
                    }
                }
                Err(e) => {
                    let mut row = head();
                    row.push(tag_cell(e));
                    row.extend((0..9).map(|_| Cell::Empty));
                    t.push(row);
                }
            }
        }
    }
    Ok(t)
}

pub fn hysteresis_table(cfg: &Config) -> Result<Table, CliError> {
    let p = cfg.params();
    let settings = cfg.hysteresis();
    let up = cfg.hysteresis_omegas();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    let mut t = Table::new(&["direction", "omega", "ratio", "kerr", "rho", "converged", "diverged"]);
    for (dir, omegas) in [("up", up), ("down", down)] {
        for r in hysteresis_sweep(&p, &omegas, &settings)? {
            t.push(vec![
                dir.into(),
                r.omega.into(),
                p.detuning_ratio().into(),
                sign_cell(p.kerr_sign),
                r.rho.into(),
                r.converged.into(),
                r.diverged.into(),
            ]);
        }
    }
    Ok(t)
}
