//! `mugl`: generate synthetic graphs and signals, learn graphs, score them,
//! and run seeded benchmark sweeps.

mod config;
mod exit;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mugl_core::datagen::is_connected;
use mugl_core::eval::{binarize, score_edges, EdgeMetrics};
use mugl_core::io::{
    read_edge_list, read_signals_file, to_json_pretty, write_edge_list, write_signals, write_summary_csv,
};
use mugl_core::{
    gen_graph, gen_signals, learn, run_experiment, Experiment, GraphSpec, ModelConfig, ModelPreset, SignalSpec,
    SolveReport, Termination,
};
use serde::Serialize;

use config::{load, resolve, EvalConfig, GenerateConfig, LearnConfig};
use exit::Failure;

#[derive(Parser)]
#[command(name = "mugl", version, about = "Graph learning under moment uncertainty", after_help = exit::HELP)]
struct Cli {
    /// JSON configuration for the command
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed (generate) or master seed (bench) in the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for bench
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Only print errors
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write graph.edges, signals.csv and provenance.json
    Generate,
    /// Learn a graph from a signals CSV; writes learned.edges and report.json
    Learn {
        /// Signals CSV (overrides the config)
        #[arg(long)]
        signals: Option<PathBuf>,
    },
    /// Score a predicted edge list against a true one
    Eval {
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        pred: Option<PathBuf>,
        /// Also append the record to this CSV file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a seeded experiment; writes summary.csv and summary.json
    Bench,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Generate => cmd_generate(cli),
        Command::Learn { signals } => cmd_learn(cli, signals.as_deref()),
        Command::Eval { truth, pred, csv } => cmd_eval(cli, truth.as_deref(), pred.as_deref(), csv.as_deref()),
        Command::Bench => cmd_bench(cli),
    }
}

fn require_config(cli: &Cli) -> Result<&Path, Failure> {
    cli.config
        .as_deref()
        .ok_or_else(|| Failure::config("this command needs --config <path>"))
}

fn out_dir(cli: &Cli) -> Result<&Path, Failure> {
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", cli.out.display())))?;
    Ok(&cli.out)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn info(cli: &Cli, msg: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

#[derive(Serialize)]
struct GenerateProvenance<'a> {
    command: &'static str,
    version: &'static str,
    config: &'a GenerateConfig,
    nodes: usize,
    edges: usize,
    connected: bool,
}

fn cmd_generate(cli: &Cli) -> Result<u8, Failure> {
    let (mut cfg, _) = load::<GenerateConfig>(require_config(cli)?)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let spec = GraphSpec {
        family: cfg.family,
        m: cfg.m,
        seed: cfg.seed,
    };
    let graph = gen_graph(&spec).map_err(|e| Failure::from_core("graph", e))?;
    let signals = gen_signals(
        &graph.laplacian,
        &SignalSpec {
            n: cfg.signals.n,
            epsilon: cfg.signals.epsilon,
            mu_star: cfg.signals.mu_star.clone(),
            seed: cfg.seed,
        },
    )
    .map_err(|e| Failure::from_core("signals", e))?;

    let out = out_dir(cli)?;
    let edges = graph.laplacian.weights();
    write_edge_list(&out.join("graph.edges"), &edges).map_err(|e| Failure::from_core("graph.edges", e))?;
    let mut buf = Vec::new();
    write_signals(&mut buf, &signals).map_err(|e| Failure::from_core("signals.csv", e))?;
    std::fs::write(out.join("signals.csv"), buf).map_err(|e| Failure::io(format!("signals.csv: {e}")))?;
    let connected = is_connected(&graph.laplacian);
    let prov = GenerateProvenance {
        command: "generate",
        version: mugl_core::VERSION,
        config: &cfg,
        nodes: cfg.m,
        edges: graph.laplacian.edge_count(),
        connected,
    };
    write_text(&out.join("provenance.json"), &json(&prov)?)?;
    info(
        cli,
        format!(
            "generated {} graph: {} nodes, {} edges{}, {} samples",
            cfg.family.name(),
            cfg.m,
            prov.edges,
            if connected { "" } else { " (disconnected)" },
            cfg.signals.n
        ),
    );
    Ok(exit::OK)
}

#[derive(Serialize)]
struct LearnReport<'a> {
    command: &'static str,
    version: &'static str,
    signals: String,
    samples: usize,
    preset: &'a ModelPreset,
    model: &'a ModelConfig,
    edges: usize,
    solve: &'a SolveReport,
}

fn cmd_learn(cli: &Cli, signals_flag: Option<&Path>) -> Result<u8, Failure> {
    let (cfg, base) = load::<LearnConfig>(require_config(cli)?)?;
    let signals_path = match (signals_flag, &cfg.signals) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => resolve(&base, p),
        (None, None) => return Err(Failure::config("no signals path: set \"signals\" or pass --signals")),
    };
    if !signals_path.exists() {
        return Err(Failure::io(format!("signals file {} not found", signals_path.display())));
    }
    let x = read_signals_file(&signals_path).map_err(|e| Failure::from_core(&signals_path.display().to_string(), e))?;
    let preset = cfg.preset.materialized();
    let learned = learn(&preset, &x).map_err(|e| Failure::from_core("learn", e))?;

    let out = out_dir(cli)?;
    let w = learned.report.weights();
    write_edge_list(&out.join("learned.edges"), &w).map_err(|e| Failure::from_core("learned.edges", e))?;
    let report = LearnReport {
        command: "learn",
        version: mugl_core::VERSION,
        signals: signals_path.display().to_string(),
        samples: x.samples(),
        preset: &preset,
        model: &learned.config,
        edges: learned.laplacian.edge_count(),
        solve: &learned.report,
    };
    write_text(&out.join("report.json"), &json(&report)?)?;
    let r = &learned.report;
    info(
        cli,
        format!(
            "{}: {:?} after {} iterations, objective {:.6e}, {} edges",
            preset.label(),
            r.termination,
            r.iters,
            r.final_objective(),
            report.edges
        ),
    );
    Ok(match r.termination {
        Termination::StepTol | Termination::KktTol => exit::OK,
        Termination::MaxIters => {
            eprintln!("warning: stopped at max_iters ({}); result written", r.iters);
            exit::MAX_ITERS
        }
        Termination::NonsmoothAbort => {
            eprintln!("error: solver reached a nonsmooth point; partial result written");
            exit::SOLVER
        }
    })
}

fn cmd_eval(cli: &Cli, truth: Option<&Path>, pred: Option<&Path>, csv: Option<&Path>) -> Result<u8, Failure> {
    let (cfg, base) = match &cli.config {
        Some(p) => load::<EvalConfig>(p)?,
        None => (EvalConfig::default(), PathBuf::new()),
    };
    if !(0.0..1.0).contains(&cfg.threshold) {
        return Err(Failure::config(format!("threshold must lie in [0, 1), got {}", cfg.threshold)));
    }
    let pick = |flag: Option<&Path>, key: &Option<PathBuf>, name: &str| -> Result<PathBuf, Failure> {
        match (flag, key) {
            (Some(p), _) => Ok(p.to_path_buf()),
            (None, Some(p)) => Ok(resolve(&base, p)),
            (None, None) => Err(Failure::config(format!("no {name} path: set \"{name}\" or pass --{name}"))),
        }
    };
    let truth_path = pick(truth, &cfg.truth, "truth")?;
    let pred_path = pick(pred, &cfg.pred, "pred")?;
    let read = |p: &Path| {
        if !p.exists() {
            return Err(Failure::io(format!("{} not found", p.display())));
        }
        read_edge_list(p).map_err(|e| Failure::from_core(&p.display().to_string(), e))
    };
    let t = read(&truth_path)?;
    let p = read(&pred_path)?;
    if t.nodes() != p.nodes() {
        return Err(Failure::new(
            exit::NODE_MISMATCH,
            format!("truth has {} nodes, prediction has {}", t.nodes(), p.nodes()),
        ));
    }
    let truth_edges: Vec<bool> = t.as_slice().iter().map(|&w| w > 0.0).collect();
    let pred_edges = binarize(p.as_slice(), cfg.threshold);
    let m = score_edges(&pred_edges, &truth_edges, cfg.threshold).map_err(|e| Failure::from_core("eval", e))?;
    let record = m;
    println!("{}", serde_json::to_string(&record).map_err(|e| Failure::io(e.to_string()))?);
    let csv_path = csv.map(Path::to_path_buf).or_else(|| cfg.csv.as_ref().map(|p| resolve(&base, p)));
    if let Some(path) = csv_path {
        write_eval_csv(&path, &record)?;
    }
    Ok(exit::OK)
}

fn write_eval_csv(path: &Path, r: &EdgeMetrics) -> Result<(), Failure> {
    let fresh = !path.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Failure::io(format!("cannot open {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
    use std::io::Write;
    if fresh {
        writeln!(w, "precision,recall,f_measure,nmi,tp,fp,fn,tn,threshold,degenerate").map_err(io)?;
    }
    writeln!(
        w,
        "{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{:.16e},{}",
        r.precision, r.recall, r.f_measure, r.nmi, r.tp, r.fp, r.fn_, r.tn, r.threshold, r.degenerate
    )
    .map_err(io)?;
    w.flush().map_err(io)
}

fn cmd_bench(cli: &Cli) -> Result<u8, Failure> {
    let (mut exp, _) = load::<Experiment>(require_config(cli)?)?;
    if let Some(seed) = cli.seed {
        exp.master_seed = seed;
    }
    if cli.threads == 0 {
        return Err(Failure::config("--threads must be at least 1"));
    }
    let summary = run_experiment(&exp, cli.threads).map_err(|e| Failure::from_core("bench", e))?;
    let out = out_dir(cli)?;
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &summary).map_err(|e| Failure::from_core("summary.csv", e))?;
    std::fs::write(out.join("summary.csv"), &buf).map_err(|e| Failure::io(format!("summary.csv: {e}")))?;
    write_text(&out.join("summary.json"), &json(&summary)?)?;
    for r in &summary.records {
        for o in &r.outcomes {
            if let Some(err) = &o.error {
                eprintln!("warning: seed {} ({}) {}: {err}", r.index, r.seed, o.label);
            }
        }
    }
    if !cli.quiet {
        for s in summary.metrics.iter().filter(|s| s.metric == "f_measure" || s.metric == "nmi") {
            eprintln!(
                "{:<12} {:<10} {:.4} +/- {:.2}% ({} seeds)",
                s.model, s.metric, s.mean, s.normalized_std_percent, s.n_seeds
            );
        }
    }
    if summary.all_failed() {
        return Err(Failure::new(exit::ALL_FAILED, "every seed failed; see summary.json"));
    }
    Ok(exit::OK)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    to_json_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::io(e.to_string()))
}
