use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use entromag::cover::{volume_entropy_sequence, walk_counts_from, BallMagnitudeFn};
use entromag::features::{feature_table, run_experiment, ExperimentConfig, FeatureConfig};
use entromag::flow::{
    parallel_compose, principal_solutions, series_compose, tropical_magnitude,
    tropical_similarity_matrix_with, validate_flow, UnitConvention,
};
use entromag::graph::{
    erdos_renyi, largest_weak_component, load_digraph, write_edge_list, Digraph, Format,
};
use entromag::metric::magnitude_function;
use entromag::report;
use entromag::spectral::{char_poly, spectral_radius, zeta_denominator};

#[derive(Parser)]
#[command(
    name = "entromag",
    version,
    about = "Entropy and magnitude invariants of digraphs"
)]
struct Cli {
    /// Worker threads for parallel computations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Input {
    /// Graph file: edge list, DOT subset, or Flare JSON.
    file: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<GraphFormat>,
    /// Remove self-loops before computing.
    #[arg(long)]
    strip_loops: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edges,
    Dot,
    Flare,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Series,
    Parallel,
}

#[derive(Subcommand)]
enum Command {
    /// Check the flow-graph conditions and report source, target, entry and exit.
    ValidateFlow {
        #[command(flatten)]
        input: Input,
    },
    /// Spectral radius, topological entropy, characteristic and zeta polynomials.
    Entropy {
        #[command(flatten)]
        input: Input,
    },
    /// Series or parallel composition of flow graphs; writes an edge list.
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "series")]
        mode: Mode,
        #[arg(long, value_enum)]
        format: Option<GraphFormat>,
    },
    /// Max-plus similarity matrix, principal solutions and magnitude of a flow graph.
    FlowMagnitude {
        #[command(flatten)]
        input: Input,
        /// Give identity hom-objects entropy 0 instead of -inf.
        #[arg(long)]
        unit_zero: bool,
    },
    /// Ball of the universal cover: counts, magnitude and volume-entropy sequence.
    CoverBall {
        #[command(flatten)]
        input: Input,
        /// Basepoint label.
        #[arg(long)]
        base: String,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
        t: f64,
        /// Use balls in the reversed digraph.
        #[arg(long)]
        reverse: bool,
        /// Also compute s_L for L = 1..=LMAX.
        #[arg(long, value_name = "LMAX")]
        sequence: Option<usize>,
        /// `csv` prints the (L, s_L) sequence only.
        #[arg(long, value_enum, default_value = "json")]
        output: Output,
    },
    /// Magnitude function of the hop-distance metric at the given scales.
    MetricMagnitude {
        #[command(flatten)]
        input: Input,
        /// Comma-separated scales.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        t: Vec<f64>,
        /// Include weighting and coweighting vectors.
        #[arg(long)]
        weights: bool,
        #[arg(long, value_enum, default_value = "csv")]
        output: Output,
    },
    /// Per-vertex feature table of the largest weak component.
    Features {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "csv")]
        output: Output,
    },
    /// Subgraph-pair correlation experiment from a TOML or JSON config.
    Correlate {
        #[arg(long)]
        config: PathBuf,
        /// Also write the long-format (trial, feature, coefficient) CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Seeded G(n, q) digraph as an edge list.
    GenEr {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long)]
        seed: u64,
    },
}

/// Exit 1: the input is well-formed but violates a precondition.
#[derive(Debug)]
struct Domain(anyhow::Error);

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Domain {}

fn domain(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(Domain(e.into()))
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> anyhow::Result<()> {
    if ok {
        Ok(())
    } else {
        Err(domain(anyhow!(msg())))
    }
}

fn format_of(path: &Path, f: Option<GraphFormat>) -> Format {
    match f {
        Some(GraphFormat::Edges) => Format::EdgeList,
        Some(GraphFormat::Dot) => Format::Dot,
        Some(GraphFormat::Flare) => Format::FlareJson,
        None => Format::from_path(path),
    }
}

fn read_graph(path: &Path, format: Option<GraphFormat>) -> anyhow::Result<Digraph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let loaded = load_digraph(BufReader::new(file), format_of(path, format))
        .with_context(|| format!("cannot read {}", path.display()))?;
    if loaded.duplicates > 0 {
        eprintln!("note: collapsed {} duplicate edge(s)", loaded.duplicates);
    }
    Ok(loaded.graph)
}

fn load(input: &Input) -> anyhow::Result<Digraph> {
    let g = read_graph(&input.file, input.format)?;
    Ok(if input.strip_loops {
        g.without_loops()
    } else {
        g
    })
}

fn emit(v: &Value) -> anyhow::Result<()> {
    io::stdout()
        .lock()
        .write_all(report::to_json_string(v).as_bytes())?;
    Ok(())
}

fn flow_json(f: &entromag::flow::FlowGraph) -> Value {
    let g = f.graph();
    let pair = |(a, b): (usize, usize)| json!([g.label(a), g.label(b)]);
    json!({
        "valid": true,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "source": g.label(f.source()),
        "target": g.label(f.target()),
        "entry": pair(f.entry_edge()),
        "exit": pair(f.exit_edge()),
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        require(n > 0, || "--threads must be positive".into())?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::ValidateFlow { input } => {
            let g = load(&input)?;
            let f = validate_flow(&g).map_err(domain)?;
            emit(&flow_json(&f))
        }
        Command::Entropy { input } => {
            let g = load(&input)?;
            let rho = spectral_radius::<f64>(&g).map_err(domain)?;
            let h = if rho == 0.0 {
                f64::NEG_INFINITY
            } else {
                rho.ln()
            };
            let mut out = json!({
                "n": g.vertex_count(),
                "rho": report::number(rho),
                "h": report::number(h),
            });
            match (char_poly(&g), zeta_denominator(&g)) {
                (Ok(c), Ok(z)) => {
                    out["charpoly"] = c.to_json();
                    out["zeta_denominator"] = z.to_json();
                }
                (Err(e), _) | (_, Err(e)) => {
                    out["charpoly"] = Value::Null;
                    out["zeta_denominator"] = Value::Null;
                    out["note"] = Value::from(e.to_string());
                }
            }
            emit(&out)
        }
        Command::Compose {
            files,
            mode,
            format,
        } => {
            let flows = files
                .iter()
                .map(|p| validate_flow(&read_graph(p, format)?).map_err(domain))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let f = match mode {
                Mode::Series => series_compose(&flows),
                Mode::Parallel => parallel_compose(&flows),
            }
            .map_err(domain)?;
            let mut out = BufWriter::new(io::stdout().lock());
            write_edge_list(f.graph(), &mut out)?;
            out.flush()?;
            Ok(())
        }
        Command::FlowMagnitude { input, unit_zero } => {
            let g = load(&input)?;
            let f = validate_flow(&g).map_err(domain)?;
            let unit = if unit_zero {
                UnitConvention::Zero
            } else {
                UnitConvention::NegInfinity
            };
            let z = tropical_similarity_matrix_with::<f64>(&f, unit).map_err(domain)?;
            let p = principal_solutions(&z);
            emit(&report::tropical(&f, &z, &p, tropical_magnitude(&z)))
        }
        Command::CoverBall {
            input,
            base,
            radius,
            t,
            reverse,
            sequence,
            output,
        } => {
            require(t >= 0.0, || format!("--t must be nonnegative, got {t}"))?;
            let g = load(&input)?;
            let loops = g.loop_vertices();
            require(loops.is_empty(), || {
                let names: Vec<_> = loops.iter().map(|&v| g.label(v)).collect();
                format!("digraph has loops at {names:?}; pass --strip-loops to remove them")
            })?;
            let v0 = g
                .find_label(&base)
                .ok_or_else(|| domain(anyhow!("no vertex labelled {base:?}")))?;
            let g = if reverse { g.reverse() } else { g };
            let seq = match sequence {
                Some(lmax) => Some(volume_entropy_sequence(&g, v0, t, lmax).map_err(domain)?),
                None => None,
            };
            if output == Output::Csv {
                let seq = seq.ok_or_else(|| domain(anyhow!("--output csv needs --sequence")))?;
                let mut out = BufWriter::new(io::stdout().lock());
                writeln!(out, "L,s_L")?;
                for (l, s) in seq.iter().enumerate() {
                    writeln!(out, "{},{}", l + 1, report::format_number(*s))?;
                }
                out.flush()?;
                return Ok(());
            }
            let per_depth = walk_counts_from(&g, v0, radius);
            let mut total = per_depth[0].clone();
            let mut cumulative = vec![report::big(&total)];
            for c in &per_depth[1..] {
                total += c;
                cumulative.push(report::big(&total));
            }
            let f = BallMagnitudeFn {
                vertex_count: total,
            };
            let mut out = json!({
                "base": base,
                "radius": radius,
                "direction": if reverse { "reverse" } else { "forward" },
                "t": report::number(t),
                "counts": cumulative,
                "per_depth": per_depth.iter().map(report::big).collect::<Vec<_>>(),
                "vertex_count": report::big(&f.vertex_count),
                "magnitude": report::number(f.value(t)),
                "log_magnitude": report::number(f.ln_value(t)),
            });
            if let Some(seq) = seq {
                out["sequence"] = seq
                    .iter()
                    .enumerate()
                    .map(|(l, s)| json!({"L": l + 1, "s_L": report::number(*s)}))
                    .collect();
            }
            emit(&out)
        }
        Command::MetricMagnitude {
            input,
            t,
            weights,
            output,
        } => {
            for &x in &t {
                require(x >= 0.0, || format!("scales must be nonnegative, got {x}"))?;
            }
            let g = load(&input)?;
            let points = magnitude_function(&g, &t).map_err(domain)?;
            if output == Output::Csv {
                let mut out = BufWriter::new(io::stdout().lock());
                report::write_magnitude_csv(&points, g.labels(), weights, &mut out)?;
                out.flush()?;
                return Ok(());
            }
            emit(&json!({
                "vertices": g.labels(),
                "points": report::magnitude_points(&points, weights),
            }))
        }
        Command::Features { input, output } => {
            let g = load(&input)?;
            let lwc = largest_weak_component(&g);
            if lwc.vertex_count() < g.vertex_count() {
                eprintln!(
                    "note: using the largest weak component ({} of {} vertices)",
                    lwc.vertex_count(),
                    g.vertex_count()
                );
            }
            let table = feature_table::<f64>(&lwc, &FeatureConfig::default());
            for (name, why) in &table.absent {
                eprintln!("note: column {name} omitted: {why}");
            }
            match output {
                Output::Csv => {
                    let mut out = BufWriter::new(io::stdout().lock());
                    report::write_feature_table_csv(&table, &mut out)?;
                    out.flush()?;
                    Ok(())
                }
                Output::Json => emit(&report::feature_table_json(&table)),
            }
        }
        Command::Correlate { config, csv, seed } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read {}", config.display()))?;
            let mut cfg: ExperimentConfig = match config.extension().and_then(|e| e.to_str()) {
                Some("json") => serde_json::from_str(&text)
                    .with_context(|| format!("invalid config {}", config.display()))?,
                _ => toml::from_str(&text)
                    .with_context(|| format!("invalid config {}", config.display()))?,
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if cfg.threads.is_none() {
                cfg.threads = cli.threads;
            }
            cfg.validate().map_err(domain)?;
            let r = run_experiment(&cfg)?;
            if let Some(path) = csv {
                let file = File::create(&path)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                report::write_correlation_csv(&r, BufWriter::new(file))?;
            }
            emit(&report::correlation_json(&r))
        }
        Command::GenEr { n, q, seed } => {
            require(n > 0, || "--n must be positive".into())?;
            require((0.0..=1.0).contains(&q), || {
                format!("--q must lie in [0, 1], got {q}")
            })?;
            let g = erdos_renyi(n, q, seed);
            let mut out = BufWriter::new(io::stdout().lock());
            write_edge_list(&g, &mut out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Domain>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
