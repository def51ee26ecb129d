//! Command-line entry point wiring the library layers together.
//!
//! Subcommands: `simulate`, `graph check|dsep|show`, `estimate`,
//! `experiment run`, `app run`. Primary payloads go to stdout (JSON, CSV, or
//! graph text), diagnostics to stderr, and every successful run writes a
//! `run_manifest.json` describing the resolved configuration, seeds, and
//! outputs. Exit codes: 0 success, 1 runtime or data error, 2 usage error.

mod manifest;

use crate::dataset::{
    load_csv, run_application, ApplicationConfig, CovariateOptions, DuplicatePolicy, LoadOptions,
    MarketSchema, SpecKind, SplitRule,
};
use crate::estimation::{
    catalogue, civ3_check, civ_estimate_with, overlap_analysis, CivOptions, EstimateResult,
    ValidityMatrix,
};
use crate::experiments::{
    emit_figure_assets, run_experiment, ExperimentConfig, ExperimentName, Preset,
};
use crate::graph::{
    builtin_graph, check_civ_graphical, d_separated, parse_node_ref, parse_rolled_graph,
    render_rolled_graph, witness_path, BuiltinModel, NodeId, NodeSet, RolledTimeGraph,
    WindowPolicy,
};
use crate::scm::{
    build_model, paper_defaults, set_param, simulate, ModelKind, SimulationConfig,
    TimeSeriesDataset,
};
use clap::{Args, Parser, Subcommand};
use manifest::ManifestWriter;
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "civts",
    version,
    about = "Conditional IV estimators on causal time graphs: graphical checks, \
             market simulation, estimation, and simulation studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Cap worker threads for parallel experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one market trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Graph-level queries on rolled time graphs.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Run estimators on a CSV with W/P/D columns.
    Estimate(EstimateArgs),
    /// Run a simulation study.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
    /// The application pipeline on a market CSV.
    App {
        #[command(subcommand)]
        cmd: AppCmd,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Model kind: model1|model2|model3 (aliases I/II/III) or a special case.
    #[arg(long, default_value = "model1")]
    model: ModelKind,
    /// Sample length in hours.
    #[arg(long = "T", default_value_t = 43_800)]
    t_len: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 2_000)]
    burn_in: usize,
    /// Keep the latent demand parts as columns (model2 only).
    #[arg(long)]
    keep_latent: bool,
    /// Parameter override, repeatable: --param beta_d1=0.5
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// JSON file with parameter overrides (object of key: number).
    #[arg(long)]
    params_file: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Decide the graphical validity criteria of an estimator on a model.
    Check {
        #[arg(long, default_value = "model1")]
        model: BuiltinModel,
        /// Estimator label (1..8, with or without '#').
        #[arg(long)]
        estimator: String,
        /// Lag depth L for "up to L lags" estimators.
        #[arg(long, default_value_t = 2)]
        lag_depth: u32,
        /// Fixed base window length (default: automatic).
        #[arg(long)]
        window: Option<usize>,
    },
    /// d-separation query on an unrolled window of a rolled graph.
    Dsep {
        /// Graph text file (see `graph show` for the format).
        #[arg(long, conflicts_with = "model")]
        graph: Option<PathBuf>,
        /// Or a built-in model name.
        #[arg(long)]
        model: Option<BuiltinModel>,
        /// Comma-separated node refs like "W@0,W@-1".
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Conditioning set; empty when omitted.
        #[arg(long, default_value = "")]
        given: String,
        /// Window length (default: 3 * (max lag + graph lag) + 3).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Print a graph in the text format.
    Show {
        #[arg(long, conflicts_with = "model")]
        graph: Option<PathBuf>,
        #[arg(long)]
        model: Option<BuiltinModel>,
    },
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV with columns W, P, D (simulation output format).
    #[arg(long)]
    data: PathBuf,
    /// One estimator label, or a comma-separated batch like "1,2,8".
    #[arg(long, default_value = "#2")]
    estimator: String,
    /// Lag depth L.
    #[arg(long = "L", default_value_t = 5)]
    lag_depth: u32,
    /// Estimate on log price / log demand (drops non-positive prices).
    #[arg(long)]
    loglog: bool,
    /// JSON array of column names to add to the conditioning set.
    #[arg(long)]
    covariates: Option<PathBuf>,
    #[arg(long)]
    hac_bandwidth: Option<usize>,
    /// Rank-condition tolerance (scaled); default 3/sqrt(n).
    #[arg(long)]
    civ3_tol: Option<f64>,
    /// Output directory for the batch CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run a named experiment and write its figure assets.
    Run {
        /// validity_panel | bias_heatmap | observed_ar | indicators
        #[arg(long)]
        name: ExperimentName,
        #[arg(long, default_value = "desk")]
        preset: Preset,
        #[arg(long, default_value = "model1")]
        model: ModelKind,
        #[arg(long)]
        out: PathBuf,
        /// JSON config file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long = "T")]
        t_len: Option<usize>,
        #[arg(long)]
        grid_size: Option<usize>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        estimator: Option<String>,
        #[arg(long)]
        lag_depth: Option<u32>,
        /// Comma-separated sizes in years for the indicator study.
        #[arg(long)]
        sizes_years: Option<String>,
        /// Parameter override, repeatable: --param beta_d1=0.9
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

#[derive(Subcommand)]
enum AppCmd {
    /// Covariate-adjusted estimator battery on a market CSV.
    Run {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "linear")]
        spec: SpecKind,
        #[arg(long = "L", default_value_t = 50)]
        lag_depth: u32,
        #[arg(long, default_value = "all")]
        split: SplitRule,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated estimator labels (default: the full catalogue).
        #[arg(long)]
        estimators: Option<String>,
        #[arg(long)]
        hac_bandwidth: Option<usize>,
        /// Drop duplicated timestamps instead of rejecting the file.
        #[arg(long)]
        drop_duplicate_stamps: bool,
        /// Keep only rows at or after this timestamp (YYYY-MM-DD HH:MM:SS).
        #[arg(long)]
        from: Option<String>,
        /// Keep only rows before this timestamp.
        #[arg(long)]
        to: Option<String>,
    },
}

/// Parse and run; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout (exit 0) and usage errors
            // on stderr (exit 2).
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let run = || -> Result<(), CliError> {
        match cli.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| CliError(e.to_string()))?;
                pool.install(|| run_command(cli.command))
            }
            None => run_command(cli.command),
        }
    };
    match run() {
        Ok(()) => 0,
        Err(e) => {
            let payload = json!({"error": {"message": e.0}});
            eprintln!("{payload}");
            1
        }
    }
}

struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn parse_labels(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| {
            if p.starts_with('#') {
                p.to_string()
            } else {
                format!("#{p}")
            }
        })
        .collect()
}

fn run_command(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Graph { cmd } => match cmd {
            GraphCmd::Check { model, estimator, lag_depth, window } => {
                cmd_graph_check(model, &estimator, lag_depth, window)
            }
            GraphCmd::Dsep { graph, model, a, b, given, window } => {
                cmd_graph_dsep(graph, model, &a, &b, &given, window)
            }
            GraphCmd::Show { graph, model } => cmd_graph_show(graph, model),
        },
        Command::Estimate(args) => cmd_estimate(args),
        Command::Experiment { cmd } => match cmd {
            ExperimentCmd::Run {
                name,
                preset,
                model,
                out,
                config,
                seed,
                replicates,
                t_len,
                grid_size,
                draws,
                estimator,
                lag_depth,
                sizes_years,
                params,
            } => cmd_experiment_run(ExperimentRunArgs {
                name,
                preset,
                model,
                out,
                config,
                seed,
                replicates,
                t_len,
                grid_size,
                draws,
                estimator,
                lag_depth,
                sizes_years,
                params,
            }),
        },
        Command::App { cmd } => match cmd {
            AppCmd::Run {
                data,
                spec,
                lag_depth,
                split,
                out,
                estimators,
                hac_bandwidth,
                drop_duplicate_stamps,
                from,
                to,
            } => cmd_app_run(
                data,
                spec,
                lag_depth,
                split,
                out,
                estimators,
                hac_bandwidth,
                drop_duplicate_stamps,
                from,
                to,
            ),
        },
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let seed = args.seed.unwrap_or_else(|| rand::random::<u64>());
    let mut params = paper_defaults(args.model);
    if let Some(path) = &args.params_file {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError("parameter file must be a JSON object".into()))?;
        for (k, v) in obj {
            let rendered = match v {
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                other => other.to_string(),
            };
            set_param(&mut params, k, rendered.trim_matches('"'))?;
        }
    }
    for kv in &args.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError(format!("expected KEY=VALUE, got `{kv}`")))?;
        set_param(&mut params, k.trim(), v.trim())?;
    }
    let (spec, _) = build_model(args.model, params.clone())?;
    let mut cfg = SimulationConfig::new(args.t_len, seed);
    cfg.burn_in = args.burn_in;
    cfg.keep_latent = args.keep_latent;
    let result = simulate(&spec, &cfg)?;

    let mut outputs = Vec::new();
    match &args.out {
        Some(path) => {
            result.data.write_csv(path)?;
            outputs.push(path.display().to_string());
            println!(
                "{}",
                json!({
                    "rows": result.data.len(),
                    "columns": result.data.names(),
                    "seed": seed,
                    "out": path.display().to_string(),
                })
            );
        }
        None => {
            // Stream the CSV itself as the primary payload.
            let tmp = std::env::temp_dir().join(format!("civts_sim_{seed}.csv"));
            result.data.write_csv(&tmp)?;
            print!("{}", std::fs::read_to_string(&tmp)?);
            let _ = std::fs::remove_file(&tmp);
        }
    }
    ManifestWriter::new("simulate", args.out.as_deref())
        .config(json!({
            "model": args.model.to_string(),
            "t_len": args.t_len,
            "burn_in": args.burn_in,
            "keep_latent": args.keep_latent,
            "params": params,
        }))
        .seeds(vec![seed])
        .outputs(outputs)
        .write(start.elapsed())?;
    Ok(())
}

fn verdict_json(v: &crate::graph::CivVerdict) -> serde_json::Value {
    json!({
        "civ1": v.civ1,
        "civ2": v.civ2,
        "valid": v.valid(),
        "witness_path": v.witness_path.as_ref().map(|p| p.render()),
        "witness_descendant": v.witness_descendant.as_ref().map(|n| n.render()),
        "window": v.window,
    })
}

fn cmd_graph_check(
    model: BuiltinModel,
    estimator: &str,
    lag_depth: u32,
    window: Option<usize>,
) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let g = builtin_graph(model);
    let label = if estimator.starts_with('#') {
        estimator.to_string()
    } else {
        format!("#{estimator}")
    };
    let spec = catalogue(&label, lag_depth)?;
    let policy = window.map(WindowPolicy::Fixed).unwrap_or(WindowPolicy::Auto);
    let verdict = check_civ_graphical(&g, &spec, policy)?;
    println!(
        "{}",
        json!({
            "model": model.to_string(),
            "estimator": label,
            "lag_depth": lag_depth,
            "verdict": verdict_json(&verdict),
        })
    );
    ManifestWriter::new("graph check", None)
        .config(json!({
            "model": model.to_string(),
            "estimator": label,
            "lag_depth": lag_depth,
            "window": window,
        }))
        .write(start.elapsed())?;
    Ok(())
}

fn load_graph_arg(
    graph: Option<PathBuf>,
    model: Option<BuiltinModel>,
) -> Result<RolledTimeGraph, CliError> {
    match (graph, model) {
        (Some(path), _) => Ok(parse_rolled_graph(&std::fs::read_to_string(path)?)?),
        (None, Some(m)) => Ok(builtin_graph(m)),
        (None, None) => Err(CliError("pass either --graph FILE or --model NAME".into())),
    }
}

fn parse_ref_set(
    g: &RolledTimeGraph,
    anchor: usize,
    refs: &str,
) -> Result<NodeSet, CliError> {
    let mut out = NodeSet::new();
    for part in refs.split(',').map(|p| p.trim()).filter(|p| !p.is_empty()) {
        let (name, lag) = parse_node_ref(part)?;
        let comp = g.component_index(&name)?;
        if (lag as usize) > anchor {
            return Err(CliError(format!("lag {lag} exceeds the window anchor {anchor}")));
        }
        out.insert(NodeId::new(anchor - lag as usize, comp));
    }
    Ok(out)
}

fn cmd_graph_dsep(
    graph: Option<PathBuf>,
    model: Option<BuiltinModel>,
    a: &str,
    b: &str,
    given: &str,
    window: Option<usize>,
) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let g = load_graph_arg(graph, model)?;
    let mut max_query_lag = 0u32;
    for refs in [a, b, given] {
        for part in refs.split(',').map(|p| p.trim()).filter(|p| !p.is_empty()) {
            let (_, lag) = parse_node_ref(part)?;
            max_query_lag = max_query_lag.max(lag);
        }
    }
    let w = window
        .unwrap_or_else(|| 3 * (max_query_lag as usize + g.max_lag() as usize) + 3);
    let anchor = (w - 1) / 2;
    let unrolled = g.unroll(w)?.marginalize_to_observed()?;
    let a_set = parse_ref_set(&g, anchor, a)?;
    let b_set = parse_ref_set(&g, anchor, b)?;
    let s_set = parse_ref_set(&g, anchor, given)?;
    let separated = d_separated(&unrolled, &a_set, &b_set, &s_set)?;
    let witness = if separated {
        None
    } else {
        witness_path(&unrolled, &a_set, &b_set, &s_set)?.map(|wit| {
            wit.render_with(|n| {
                format!(
                    "{}@{}",
                    unrolled.components()[n.comp].name,
                    n.t as i64 - anchor as i64
                )
            })
        })
    };
    println!(
        "{}",
        json!({
            "separated": separated,
            "witness": witness,
            "window": w,
        })
    );
    ManifestWriter::new("graph dsep", None)
        .config(json!({"a": a, "b": b, "given": given, "window": w}))
        .write(start.elapsed())?;
    Ok(())
}

fn cmd_graph_show(graph: Option<PathBuf>, model: Option<BuiltinModel>) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let g = load_graph_arg(graph, model)?;
    print!("{}", render_rolled_graph(&g));
    ManifestWriter::new("graph show", None)
        .config(json!({}))
        .write(start.elapsed())?;
    Ok(())
}

fn estimate_json(est: &EstimateResult) -> serde_json::Value {
    serde_json::to_value(est).unwrap_or_default()
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let raw = TimeSeriesDataset::read_csv(&args.data)?;
    let (ds, masked) = if args.loglog {
        crate::estimation::loglog_transform(&raw)?
    } else {
        (raw, 0)
    };
    let covariates: Vec<(String, Vec<f64>)> = match &args.covariates {
        None => Vec::new(),
        Some(path) => {
            let names: Vec<String> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            names
                .into_iter()
                .map(|n| Ok((n.clone(), ds.column(&n)?.to_vec())))
                .collect::<Result<_, CliError>>()?
        }
    };
    let opts = CivOptions { hac_bandwidth: args.hac_bandwidth, covariates };

    let labels = parse_labels(&args.estimator);
    let mut outputs = Vec::new();
    if labels.len() == 1 {
        let spec = catalogue(&labels[0], args.lag_depth)?;
        let est = civ_estimate_with(&ds, &spec, &opts)?;
        let civ3 = civ3_check(&ds, &spec, args.civ3_tol)?;
        println!(
            "{}",
            json!({
                "estimate": estimate_json(&est),
                "civ3": serde_json::to_value(&civ3)?,
                "loglog": args.loglog,
                "masked_price_rows": masked,
            })
        );
    } else {
        let mut results = Vec::new();
        for label in &labels {
            let spec = catalogue(label, args.lag_depth)?;
            results.push(civ_estimate_with(&ds, &spec, &opts)?);
        }
        let validity = ValidityMatrix::from_builtin_graphs(args.lag_depth.clamp(2, 5))?;
        let overlap = overlap_analysis(&results, &validity)?;
        println!(
            "{}",
            json!({
                "overlap": serde_json::to_value(&overlap)?,
                "estimates": results.iter().map(estimate_json).collect::<Vec<_>>(),
                "loglog": args.loglog,
            })
        );
        if let Some(dir) = &args.out {
            std::fs::create_dir_all(dir)?;
            let mut csv = String::from("estimator,beta,se,ci_lo,ci_hi,n_used\n");
            for est in &results {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    est.label, est.beta_hat[0], est.se[0], est.ci[0].0, est.ci[0].1, est.n_used
                ));
            }
            let path = dir.join("estimates.csv");
            std::fs::write(&path, csv)?;
            outputs.push(path.display().to_string());
        }
    }
    ManifestWriter::new("estimate", args.out.as_deref())
        .config(json!({
            "data": args.data.display().to_string(),
            "estimators": labels,
            "lag_depth": args.lag_depth,
            "loglog": args.loglog,
            "hac_bandwidth": args.hac_bandwidth,
        }))
        .outputs(outputs)
        .write(start.elapsed())?;
    Ok(())
}

struct ExperimentRunArgs {
    name: ExperimentName,
    preset: Preset,
    model: ModelKind,
    out: PathBuf,
    config: Option<PathBuf>,
    seed: Option<u64>,
    replicates: Option<usize>,
    t_len: Option<usize>,
    grid_size: Option<usize>,
    draws: Option<usize>,
    estimator: Option<String>,
    lag_depth: Option<u32>,
    sizes_years: Option<String>,
    params: Vec<String>,
}

fn cmd_experiment_run(args: ExperimentRunArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    // Precedence: flags > config file > preset.
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str::<ExperimentConfig>(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::preset(args.name, args.preset, args.model),
    };
    cfg.name = args.name;
    if args.config.is_none() {
        cfg.model = args.model;
    }
    if let Some(s) = args.seed {
        cfg.seed_base = s;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(t) = args.t_len {
        cfg.t_len = t;
    }
    if let Some(g) = args.grid_size {
        cfg.grid_size = g;
    }
    if let Some(d) = args.draws {
        cfg.draws = d;
    }
    if let Some(e) = &args.estimator {
        cfg.estimator = Some(if e.starts_with('#') { e.clone() } else { format!("#{e}") });
    }
    if let Some(l) = args.lag_depth {
        cfg.lag_depth = l;
    }
    if let Some(sizes) = &args.sizes_years {
        cfg.sizes_years = sizes
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError(format!("bad --sizes-years: {e}")))?;
    }
    for kv in &args.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.param_overrides.push((k.trim().to_string(), v.trim().to_string()));
    }

    let output = run_experiment(&cfg)?;
    let name = cfg.name.to_string();
    let paths = emit_figure_assets(&output.table, output.style, &output.meta, &args.out, &name)?;
    let outputs: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    println!(
        "{}",
        json!({
            "experiment": name,
            "rows": output.table.rows.len(),
            "outputs": outputs,
        })
    );
    ManifestWriter::new("experiment run", Some(args.out.as_path()))
        .config(serde_json::to_value(&cfg)?)
        .seeds(vec![cfg.seed_base])
        .outputs(outputs)
        .write(start.elapsed())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_app_run(
    data: PathBuf,
    spec: SpecKind,
    lag_depth: u32,
    split: SplitRule,
    out: PathBuf,
    estimators: Option<String>,
    hac_bandwidth: Option<usize>,
    drop_duplicate_stamps: bool,
    from: Option<String>,
    to: Option<String>,
) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let parse_stamp = |s: &str| {
        chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S")
            .map_err(|e| CliError(format!("bad timestamp `{s}`: {e}")))
    };
    let date_range = match (from, to) {
        (None, None) => None,
        (f, t) => {
            let lo = f.as_deref().map(parse_stamp).transpose()?.unwrap_or(
                chrono::NaiveDate::from_ymd_opt(1970, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap(),
            );
            let hi = t.as_deref().map(parse_stamp).transpose()?.unwrap_or(
                chrono::NaiveDate::from_ymd_opt(9999, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap(),
            );
            Some((lo, hi))
        }
    };
    let load_opts = LoadOptions {
        on_duplicate: if drop_duplicate_stamps {
            DuplicatePolicy::DropAndCount
        } else {
            DuplicatePolicy::Error
        },
        date_range,
    };
    let report = load_csv(&data, &MarketSchema::default(), &load_opts)?;
    if report.dropped_duplicates > 0 || report.gap_hours > 0 {
        eprintln!(
            "ingest: dropped {} duplicate stamp(s), {} gap hour(s)",
            report.dropped_duplicates, report.gap_hours
        );
    }

    let app_cfg = ApplicationConfig {
        estimators: estimators
            .as_deref()
            .map(parse_labels)
            .unwrap_or_else(|| ApplicationConfig::default().estimators),
        lag_depth,
        spec_kind: spec,
        split,
        hac_bandwidth,
        covariates: Some(CovariateOptions::default().with_available_continuous(&report.dataset)),
    };
    let app = run_application(&report.dataset, &app_cfg)?;

    std::fs::create_dir_all(&out)?;
    let csv_path = out.join("estimates.csv");
    std::fs::write(&csv_path, app.table.to_csv())?;
    let overlap_path = out.join("overlap.json");
    std::fs::write(&overlap_path, serde_json::to_string_pretty(&app.overlap)?)?;
    let svg_path = out.join("panel.svg");
    std::fs::write(
        &svg_path,
        crate::experiments::render_figure(&app.table, crate::experiments::FigureStyle::EstimatePanel),
    )?;
    let meta_path = out.join("run.meta.json");
    std::fs::write(
        &meta_path,
        serde_json::to_string_pretty(&json!({
            "split": app.split_label,
            "first_stage": app.first_stage,
            "rows_after_split": app.rows_after_split,
            "masked_price_rows": app.masked_price_rows,
        }))?,
    )?;
    let outputs = vec![
        csv_path.display().to_string(),
        overlap_path.display().to_string(),
        svg_path.display().to_string(),
    ];
    println!(
        "{}",
        json!({
            "split": app.split_label,
            "rows_after_split": app.rows_after_split,
            "first_stage": app.first_stage,
            "rejections": app.overlap.rejections,
            "outputs": outputs,
        })
    );
    ManifestWriter::new("app run", Some(out.as_path()))
        .config(json!({
            "data": data.display().to_string(),
            "spec": format!("{spec:?}"),
            "lag_depth": lag_depth,
            "split": format!("{split:?}"),
            "hac_bandwidth": hac_bandwidth,
        }))
        .outputs(outputs)
        .write(start.elapsed())?;
    Ok(())
}
