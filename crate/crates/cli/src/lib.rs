//! `cvcat`: figure-data generators for the cubic-phase cat-state gate.

pub mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use cvcat::analysis::{
    default_inverse_s_values, inverse_s_from_db_range, run_sweep, write_sweep_csv, SweepOutput, SweepSpec,
    SweepVariable,
};
use cvcat::gate::apply_gate;
use cvcat::phase_space::{build_support_region, wigner_log_negativity, wigner_transform, PhaseBounds};
use cvcat::states::{
    cat_params_from_gate, make_cubic_phase_state, make_ideal_cat, make_squeezed_vacuum, GateParams, Grid,
    WaveFunction,
};
use cvcat::verify::run_verification;
use cvcat::{Error, Result};

use config::{defaults, parse_reals, Format, Kind, Options, Variable};

pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_CONVERGENCE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "cvcat", version, about = "Conditional cat states from a measurement-induced cubic phase gate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a squeezed, cubic phase, ideal cat, or gate output wavefunction
    State(Run),
    /// Run the gate on a vacuum target and write the conditional output
    Gate(Run),
    /// Write the Wigner function of a state as a CSV matrix
    Wigner(Run),
    /// Infidelity, probability and efficiency against 1/s
    SweepInfidelity(Run),
    /// Outcome probability density against 1/s or y_m
    SweepProbability(Run),
    /// Sheared support region of the ancilla on the phase plane
    SupportRegion(Run),
    /// Closed form against quadrature over the standard grid
    Verify(Run),
}

#[derive(clap::Args, Debug)]
struct Run {
    #[command(flatten)]
    options: Options,
    /// Flat JSON config; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the effective config as JSON to this path
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    version: &'static str,
    command: &'a str,
    config: &'a Options,
    data: T,
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cvcat: {e}");
            match e {
                Error::Convergence { .. } => EXIT_CONVERGENCE,
                _ => EXIT_DOMAIN,
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var("CVCAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Domain(format!("CVCAT_THREADS must be a positive integer, got '{text}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Numerical(e.to_string()))
}

fn execute(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let (name, run, kind) = match cli.command {
        Command::State(r) => ("state", r, Kind::Cubic),
        Command::Gate(r) => ("gate", r, Kind::Gate),
        Command::Wigner(r) => ("wigner", r, Kind::Gate),
        Command::SweepInfidelity(r) => ("sweep-infidelity", r, Kind::Gate),
        Command::SweepProbability(r) => ("sweep-probability", r, Kind::Gate),
        Command::SupportRegion(r) => ("support-region", r, Kind::Squeezed),
        Command::Verify(r) => ("verify", r, Kind::Gate),
    };
    let file = match &run.config {
        Some(path) => Options::load(path)?,
        None => Options::default(),
    };
    let opts = run.options.over(file).over(defaults(kind));
    if let Some(path) = &run.dump_config {
        let text = serde_json::to_string_pretty(&opts).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
    }
    match name {
        "state" => state(&opts, name),
        "gate" => gate(&opts, name),
        "wigner" => wigner(&opts, name),
        "sweep-infidelity" => sweep(&opts, name, false),
        "sweep-probability" => sweep(&opts, name, true),
        "support-region" => support_region(&opts, name),
        _ => verify(&opts, name),
    }
}

fn sink(opts: &Options) -> Result<Box<dyn Write>> {
    Ok(match &opts.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: Serialize>(opts: &Options, command: &str, data: T) -> Result<()> {
    let doc = Document { version: env!("CARGO_PKG_VERSION"), command, config: opts, data };
    let mut out = sink(opts)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn params(opts: &Options) -> Result<GateParams> {
    GateParams::from_db(opts.gamma(), opts.db(), opts.ym())
}

fn input_grid(opts: &Options) -> Result<Grid> {
    Grid::new(opts.x_min.unwrap_or(-12.0), opts.x_max.unwrap_or(12.0), opts.points.unwrap_or(2048))
}

fn build_state(opts: &Options) -> Result<(WaveFunction, Option<f64>)> {
    let grid = input_grid(opts)?;
    let p = params(opts)?;
    match opts.kind.unwrap_or(Kind::Gate) {
        Kind::Squeezed => Ok((make_squeezed_vacuum(p.s, grid)?, None)),
        Kind::Cubic => Ok((make_cubic_phase_state(p.gamma, p.s, grid)?, None)),
        Kind::Cat => Ok((make_ideal_cat(&cat_params_from_gate(&p)?, grid)?, None)),
        Kind::Gate => {
            let vacuum = make_squeezed_vacuum(1.0, grid)?;
            let out = apply_gate(&vacuum, &p)?;
            Ok((out.state, Some(out.probability_density)))
        }
    }
}

fn write_state(opts: &Options, command: &str, state: &WaveFunction, probability: Option<f64>) -> Result<()> {
    if opts.format() == Format::Json {
        #[derive(Serialize)]
        struct StateData {
            probability_density: Option<f64>,
            state: cvcat::states::WaveFunctionRecord,
        }
        return write_json(opts, command, StateData { probability_density: probability, state: state.to_record() });
    }
    let mut out = sink(opts)?;
    writeln!(out, "x,re,im,density")?;
    for (x, a) in state.grid().nodes().zip(state.amplitudes()) {
        writeln!(out, "{x:e},{:e},{:e},{:e}", a.re, a.im, a.norm_sqr())?;
    }
    out.flush()?;
    Ok(())
}

fn state(opts: &Options, command: &str) -> Result<u8> {
    let (state, probability) = build_state(opts)?;
    write_state(opts, command, &state, probability)?;
    Ok(0)
}

fn gate(opts: &Options, command: &str) -> Result<u8> {
    let opts = Options { kind: Some(Kind::Gate), ..opts.clone() };
    let (state, probability) = build_state(&opts)?;
    if let Some(p) = probability {
        eprintln!("probability density P(y_m) = {p:e}");
    }
    write_state(&opts, command, &state, probability)?;
    Ok(0)
}

fn wigner(opts: &Options, command: &str) -> Result<u8> {
    let (state, _) = build_state(opts)?;
    let bounds = match &opts.window {
        Some(text) => {
            let v = parse_reals(text, 4, "--window")?;
            PhaseBounds::new(v[0], v[1], v[2], v[3])?
        }
        None => PhaseBounds::covering(&state, 0.5)?,
    };
    let n_x = opts.n_x.unwrap_or(256);
    let n_p = opts.n_p.unwrap_or(256);
    let w = wigner_transform(&state, bounds, n_x, n_p)?;
    eprintln!(
        "Wigner min {:e}, mass {:.6}, log negativity {:.6}",
        w.min_value(),
        w.total_mass(),
        wigner_log_negativity(&w)
    );
    if opts.format() == Format::Json {
        #[derive(Serialize)]
        struct WignerData<'a> {
            log_negativity: f64,
            total_mass: f64,
            purity: f64,
            grid: &'a cvcat::phase_space::WignerGrid,
        }
        let data = WignerData {
            log_negativity: wigner_log_negativity(&w),
            total_mass: w.total_mass(),
            purity: w.purity(),
            grid: &w,
        };
        write_json(opts, command, data)?;
    } else {
        let mut out = sink(opts)?;
        w.write_csv(&mut out)?;
        out.flush()?;
    }
    Ok(0)
}

fn sweep_values(opts: &Options, variable: Variable) -> Result<Vec<f64>> {
    match variable {
        Variable::InverseS => match &opts.db_range {
            Some(text) => {
                let r = parse_reals(text, 2, "--db-range")?;
                inverse_s_from_db_range(r[0], r[1], opts.samples.unwrap_or(60))
            }
            None => match opts.samples {
                Some(n) => cvcat::analysis::log_spaced(1.0, 10.0, n),
                None => Ok(default_inverse_s_values()),
            },
        },
        Variable::Ym => {
            let r = parse_reals(opts.ym_range.as_deref().unwrap_or("-40:40"), 2, "--ym-range")?;
            let n = opts.samples.unwrap_or(1601);
            if n < 2 || r[1] <= r[0] {
                return Err(Error::Domain(format!("invalid y_m range {}:{} with {n} samples", r[0], r[1])));
            }
            Ok((0..n)
                .map(|k| if k + 1 == n { r[1] } else { r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64 })
                .collect())
        }
    }
}

fn sweep(opts: &Options, command: &str, probability_only: bool) -> Result<u8> {
    let variable = if probability_only { opts.variable.unwrap_or(Variable::InverseS) } else { Variable::InverseS };
    let values = sweep_values(opts, variable)?;
    let fixed = params(opts)?;
    let mut outputs = if probability_only {
        vec![SweepOutput::Probability]
    } else {
        vec![SweepOutput::Infidelity, SweepOutput::Probability, SweepOutput::Efficiency]
    };
    if opts.wln == Some(true) {
        outputs.push(SweepOutput::Wln);
    }
    let mut spec = SweepSpec::new(
        match variable {
            Variable::InverseS => SweepVariable::InverseS,
            Variable::Ym => SweepVariable::YM,
        },
        values,
        fixed,
        opts.gamma_rule.unwrap_or(config::GammaRuleArg::Fixed).into(),
    )
    .with_outputs(outputs);
    spec.input_grid = input_grid(opts)?;
    spec.optimize_cat = opts.optimize_cat == Some(true);
    let rows = run_sweep(&spec)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the error column", rows.len());
    }
    if opts.format() == Format::Json {
        #[derive(Serialize)]
        struct SweepData<'a> {
            spec: &'a SweepSpec,
            rows: &'a [cvcat::analysis::SweepRow],
        }
        write_json(opts, command, SweepData { spec: &spec, rows: &rows })?;
    } else {
        let mut out = sink(opts)?;
        write_sweep_csv(&rows, &mut out)?;
        out.flush()?;
    }
    Ok(0)
}

fn support_region(opts: &Options, command: &str) -> Result<u8> {
    let p = params(opts)?;
    let region = build_support_region(
        p.s,
        p.gamma,
        opts.sigma_level.unwrap_or(2.0),
        opts.n_boundary.unwrap_or(256),
    )?;
    if opts.format() == Format::Json {
        #[derive(Serialize)]
        struct RegionData<'a> {
            area: f64,
            intersections_at_ym: Vec<(f64, f64)>,
            region: &'a cvcat::phase_space::SupportRegion,
        }
        let data = RegionData {
            area: region.area(),
            intersections_at_ym: region.horizontal_intersections(p.y_m),
            region: &region,
        };
        write_json(opts, command, data)?;
    } else {
        let mut out = sink(opts)?;
        region.write_csv(&mut out)?;
        out.flush()?;
    }
    Ok(0)
}

fn verify(opts: &Options, command: &str) -> Result<u8> {
    let report = run_verification()?;
    println!(
        "max relative deviation {:e} over {} points (tolerance {:e}); {} failures",
        report.max_deviation,
        report.points.len(),
        report.tolerance,
        report.failures
    );
    if let Some(worst) = report.worst() {
        println!(
            "worst point: gamma={} dB={} y_m={} x-y_m={}",
            worst.gamma, worst.db, worst.y_m, worst.delta
        );
    }
    if opts.out.is_some() {
        if opts.format() == Format::Json {
            write_json(opts, command, &report)?;
        } else {
            let mut out = sink(opts)?;
            report.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(if report.passed() { 0 } else { EXIT_DOMAIN })
}
