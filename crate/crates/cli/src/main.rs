//! `jamlab`: mean-field limits, samplers and Monte Carlo runs from the
//! command line. Every output is plain CSV (with a header row) or JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jamlab::crg::sample_crg_with_households;
use jamlab::explore::explore_trace;
use jamlab::io::{
    fmt_num, round_sig, summary_json, write_edge_list, write_households_csv, write_positions_csv,
    write_replications_csv, write_summary_csv, write_trace_csv,
};
use jamlab::mc::{clt_check, run_replications_binned, Binning, ModelSpec};
use jamlab::meanfield::{jamming_fraction, jamming_large_c, variance, DEFAULT_TOL};
use jamlab::rgg::sample_rgg;
use jamlab::rng::derive_seed;
use jamlab::special::{alpha_d, AlphaTable, MAX_DIM};
use jamlab::{Error, Params, RngStream};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "jamlab",
    version,
    about = "Random sequential adsorption on geometric and clustered random graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clustering level alpha_d matching RGG(c, d), for d = 1..dmax.
    Alpha {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_DIM as i64))]
        dmax: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Mean-field jamming fraction J*, optionally with V* and 1/(1 + alpha c).
    Jam {
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        clustering: Clustering,
        /// Also compute the CLT variance V*.
        #[arg(long)]
        var: bool,
        /// Also report the large-density approximation 1/(1 + alpha c).
        #[arg(long)]
        asymptotic: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Replicated RSA runs; writes a summary and one row per replication.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        run: RunArgs,
        /// Number of histogram bins (default: Freedman-Diaconis).
        #[arg(long)]
        bins: Option<usize>,
        /// Also compare with the Gaussian limit (crg and explore only).
        #[arg(long)]
        clt: bool,
        #[command(flatten)]
        out: Output,
    },
    /// J* and simulated mean over an evenly spaced range of c.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0)]
        cmin: f64,
        #[arg(long, default_value_t = 30.0)]
        cmax: f64,
        #[arg(long, default_value_t = 31, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Sample one graph and write its edge list plus positions or households.
    Graph {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        c: f64,
        #[arg(long, env = "JAMLAB_SEED", default_value_t = 0)]
        seed: u64,
        /// Output prefix: writes PREFIX.edges and PREFIX_positions.csv or
        /// PREFIX_households.csv.
        #[arg(long)]
        output: PathBuf,
    },
    /// One exploration-chain trajectory (t, X, Y).
    Trace {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        clustering: Clustering,
        #[arg(long, env = "JAMLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Rgg,
    Crg,
    Explore,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct Clustering {
    /// Household clustering level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Dimension; sets alpha = alpha_d when --alpha is absent.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    clustering: Clustering,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100)]
    reps: u64,
    #[arg(long, env = "JAMLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Lib(e.into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Numerical(_) => 3,
                Error::Io(_) | Error::Json(_) => 1,
                _ => 2,
            })
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Alpha { dmax, out } => cmd_alpha(dmax as usize, &out),
        Command::Jam {
            c,
            clustering,
            var,
            asymptotic,
            tol,
            out,
        } => cmd_jam(c, &clustering, var, asymptotic, tol, &out),
        Command::Simulate {
            model,
            c,
            run,
            bins,
            clt,
            out,
        } => cmd_simulate(&model, c, &run, bins, clt, &out),
        Command::Sweep {
            model,
            cmin,
            cmax,
            steps,
            run,
            tol,
            out,
        } => cmd_sweep(&model, cmin, cmax, steps as usize, &run, tol, &out),
        Command::Graph { model, c, seed, output } => cmd_graph(&model, c, seed, &output),
        Command::Trace {
            n,
            c,
            clustering,
            seed,
            output,
        } => cmd_trace(n, c, &clustering, seed, output.as_deref()),
    }
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `path` with `suffix` appended to its file stem and extension `ext`.
fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// Resolves alpha from --alpha / --dim; with both, warns if they disagree.
fn resolve_alpha(clustering: &Clustering, required: bool) -> CliResult<Option<f64>> {
    let from_dim = clustering.dim.map(alpha_d).transpose()?;
    match (clustering.alpha, from_dim) {
        (Some(a), Some(ad)) => {
            if (a - ad).abs() > 1e-6 {
                eprintln!(
                    "warning: --alpha {a} differs from alpha_{} = {}; using --alpha",
                    clustering.dim.unwrap_or_default(),
                    fmt_num(ad)
                );
            }
            Ok(Some(a))
        }
        (Some(a), None) => Ok(Some(a)),
        (None, Some(ad)) => Ok(Some(ad)),
        (None, None) if required => Err(Failure::Usage("one of --alpha or --dim is required".into())),
        (None, None) => Ok(None),
    }
}

/// Parameters and model for --model; rgg needs --dim and takes alpha = alpha_d
/// for the mean-field reference unless --alpha overrides it.
fn model_spec(model: &ModelArgs, c: f64) -> CliResult<ModelSpec> {
    let alpha = resolve_alpha(&model.clustering, true)?.unwrap_or_default();
    Ok(match model.model {
        Model::Rgg => {
            let d = model
                .clustering
                .dim
                .ok_or_else(|| Failure::Usage("--model rgg requires --dim".into()))?;
            ModelSpec::RggGreedy(Params::new(model.n, c, alpha, d)?)
        }
        Model::Crg => ModelSpec::CrgGreedy(Params::new(model.n, c, alpha, model.clustering.dim.unwrap_or(1))?),
        Model::Explore => ModelSpec::Explore(Params::new(model.n, c, alpha, model.clustering.dim.unwrap_or(1))?),
    })
}

fn cmd_alpha(dmax: usize, out: &Output) -> CliResult {
    let table = AlphaTable::compute(dmax)?;
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            writeln!(w, "d,alpha_d")?;
            for (d, a) in &table.rows {
                writeln!(w, "{d},{}", fmt_num(*a))?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = table
                .rows
                .iter()
                .map(|&(d, a)| json!({"d": d, "alpha_d": round_sig(a)}))
                .collect();
            writeln!(w, "{}", serde_json::to_string_pretty(&rows).map_err(Error::from)?)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_jam(c: f64, clustering: &Clustering, var: bool, asymptotic: bool, tol: f64, out: &Output) -> CliResult {
    let alpha = resolve_alpha(clustering, true)?.unwrap_or_default();
    let params = Params::mean_field(c, alpha)?;
    let mut fields = vec![
        ("c", c),
        ("alpha", alpha),
        ("tol", tol),
        ("jstar", jamming_fraction(&params, tol)?),
    ];
    if var {
        fields.push(("vstar", variance(&params, tol)?.vstar));
    }
    if asymptotic {
        fields.push(("jstar_large_c", jamming_large_c(&params)));
    }
    write_record(&fields, out)
}

/// A single record as a one-row CSV or a flat JSON object.
fn write_record(fields: &[(&str, f64)], out: &Output) -> CliResult {
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let values: Vec<String> = fields.iter().map(|(_, v)| fmt_num(*v)).collect();
            writeln!(w, "{}", keys.join(","))?;
            writeln!(w, "{}", values.join(","))?;
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(k, v)| (k.to_string(), json!(round_sig(*v))))
                .collect();
            writeln!(w, "{}", serde_json::to_string_pretty(&map).map_err(Error::from)?)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_simulate(model: &ModelArgs, c: f64, run: &RunArgs, bins: Option<usize>, clt: bool, out: &Output) -> CliResult {
    let spec = model_spec(model, c)?;
    let binning = bins.map_or(Binning::FreedmanDiaconis, Binning::Count);
    let summary = run_replications_binned(&spec, run.reps, run.seed, run.jobs, binning)?;
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => write_summary_csv(&mut w, &summary)?,
        Format::Json => writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&summary_json(&summary)).map_err(Error::from)?
        )?,
    }
    w.flush()?;
    if let Some(path) = &out.output {
        let mut reps = BufWriter::new(File::create(sibling(path, "_reps", "csv"))?);
        write_replications_csv(&mut reps, &summary)?;
        reps.flush()?;
    }
    if clt {
        if model.model == Model::Rgg {
            return Err(Failure::Usage("--clt applies to the clustered model only".into()));
        }
        let params = spec.params();
        let limit = Params::mean_field(params.c, params.alpha)?;
        let jstar = jamming_fraction(&limit, DEFAULT_TOL)?;
        let vstar = variance(&limit, DEFAULT_TOL)?.vstar;
        let report = clt_check(&summary, params, jstar, vstar);
        let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
        match &out.output {
            Some(path) => std::fs::write(sibling(path, "_clt", "json"), text + "\n")?,
            None => eprintln!("{text}"),
        }
    }
    Ok(())
}

fn cmd_sweep(
    model: &ModelArgs,
    cmin: f64,
    cmax: f64,
    steps: usize,
    run: &RunArgs,
    tol: f64,
    out: &Output,
) -> CliResult {
    if !(cmin >= 0.0 && cmax >= cmin) {
        return Err(Failure::Usage(format!("need 0 <= cmin <= cmax, got {cmin}, {cmax}")));
    }
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let c = if steps == 1 {
            cmin
        } else {
            cmin + (cmax - cmin) * k as f64 / (steps - 1) as f64
        };
        let spec = model_spec(model, c)?;
        let params = spec.params();
        let jstar = jamming_fraction(&Params::mean_field(c, params.alpha)?, tol)?;
        let summary = run_replications_binned(
            &spec,
            run.reps,
            derive_seed(run.seed, k as u64),
            run.jobs,
            Binning::Count(1),
        )?;
        rows.push([c, jstar, summary.mean, summary.stderr]);
    }
    let keys = ["c", "jstar", "sim_mean", "sim_stderr"];
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            writeln!(w, "{}", keys.join(","))?;
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            let records: Vec<_> = rows
                .iter()
                .map(|row| {
                    keys.iter()
                        .zip(row)
                        .map(|(k, &v)| (k.to_string(), json!(round_sig(v))))
                        .collect::<serde_json::Map<_, _>>()
                })
                .collect();
            writeln!(w, "{}", serde_json::to_string_pretty(&records).map_err(Error::from)?)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_graph(model: &ModelArgs, c: f64, seed: u64, output: &Path) -> CliResult {
    let spec = model_spec(model, c)?;
    let mut rng = RngStream::new(seed, 0);
    let mut edges = BufWriter::new(File::create(sibling(output, "", "edges"))?);
    match spec {
        ModelSpec::RggGreedy(p) => {
            let g = sample_rgg(&p, &mut rng)?;
            write_edge_list(&mut edges, &g)?;
            if let Some(pos) = g.positions() {
                let mut w = BufWriter::new(File::create(sibling(output, "_positions", "csv"))?);
                write_positions_csv(&mut w, pos)?;
                w.flush()?;
            }
        }
        ModelSpec::CrgGreedy(p) | ModelSpec::Explore(p) => {
            let (g, households) = sample_crg_with_households(&p, &mut rng)?;
            write_edge_list(&mut edges, &g)?;
            let mut w = BufWriter::new(File::create(sibling(output, "_households", "csv"))?);
            write_households_csv(&mut w, &households)?;
            w.flush()?;
        }
    }
    edges.flush()?;
    Ok(())
}

fn cmd_trace(n: usize, c: f64, clustering: &Clustering, seed: u64, output: Option<&Path>) -> CliResult {
    let alpha = resolve_alpha(clustering, true)?.unwrap_or_default();
    let params = Params::new(n, c, alpha, clustering.dim.unwrap_or(1))?;
    let (_, trace) = explore_trace(&params, &mut RngStream::new(seed, 0))?;
    let mut w = sink(output)?;
    write_trace_csv(&mut w, &trace)?;
    w.flush()?;
    Ok(())
}
