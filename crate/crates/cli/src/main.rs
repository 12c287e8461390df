mod config;
mod sweep_file;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ddanneal::analysis::{arctan_fit, collapse_fit, gs_change_probability, summarize, DisorderKind, SweepRunner};
use ddanneal::dynamics::{final_fidelity, propagate_observed, pulse_positions, Protocol};
use ddanneal::ising::{brute_force_ground_states, encode_couplings_only, IsingModel, ModelDocument};
use ddanneal::magic::{coupling_matrix, normal_modes, IonChainSpec, DEFAULT_SENSITIVITY, YB171_MASS};
use ddanneal::problems::{
    build_cutting_stock, build_mot, build_preset, fixture_info, printed_fixture, CutStockSpec, DemandEncoding,
    MotSpec, FIXTURE_NAMES,
};
use serde::Serialize;
use serde_json::json;

use config::{load_problem, resolve, set, ExperimentConfig, NoiseKind};

#[derive(Parser)]
#[command(name = "ddanneal", version, about = "Quantum annealing under field noise with dynamical decoupling")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML experiment config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an Ising model from a problem description.
    Build(BuildArgs),
    /// Run one annealing sweep and report the final fidelity.
    Anneal(AnnealArgs),
    /// Fidelity over a grid of noise amplitudes and pulse counts.
    Sweep(SweepArgs),
    /// Probability that disorder changes the ground state.
    Stability(StabilityArgs),
    /// Scaling collapse of a sweep CSV.
    Collapse(CollapseArgs),
    /// Coupling matrix of an ion chain in a magnetic gradient.
    Magic(MagicArgs),
    /// List the benchmark matrices or print one.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// A preset (mot5, mot9, cut5, cut6), `mot` or `cutstock`.
    problem: String,
    /// JSON or TOML spec file for `mot` / `cutstock`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Penalty weight λ.
    #[arg(long = "lambda")]
    lambda: Option<f64>,
    /// mot: number of free frames.
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long, default_value_t = 2)]
    tracks: usize,
    #[arg(long, default_value_t = 2)]
    detections: usize,
    /// mot: diagonal objective weights, one per free variable.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Vec<f64>,
    /// mot: binary assignment of the fixed first frame.
    #[arg(long, value_delimiter = ',')]
    fixed: Vec<u8>,
    /// cutstock: bar length.
    #[arg(long = "L")]
    bar_length: Option<u64>,
    /// cutstock: piece lengths.
    #[arg(long, value_delimiter = ',')]
    pieces: Vec<u64>,
    /// cutstock: demand per piece type (default 1 each).
    #[arg(long, value_delimiter = ',')]
    demands: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    bars: usize,
    /// cutstock: one slack register per piece type instead of unit pieces.
    #[arg(long)]
    aggregated: bool,
}

#[derive(Args)]
struct RunFlags {
    /// Preset name or model JSON file.
    #[arg(long)]
    problem: Option<String>,
    /// Sweep duration in units of 1/J.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Transverse field in units of J.
    #[arg(long)]
    hx: Option<f64>,
    #[arg(long, value_parser = parse_protocol)]
    protocol: Option<Protocol>,
    /// Coupling scale in Hz.
    #[arg(long = "j-hz")]
    j_hz: Option<f64>,
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
    /// Lorentzian half-width γ in Hz for the two-peak spectrum.
    #[arg(long)]
    gamma: Option<f64>,
    /// Independent noise per qubit instead of one shared trace.
    #[arg(long)]
    uncorrelated: bool,
}

#[derive(Args)]
struct AnnealArgs {
    #[command(flatten)]
    run: RunFlags,
    #[arg(long)]
    pulses: Option<usize>,
    /// Noise amplitude (standard deviation) in Hz.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Record the fidelity every this many steps.
    #[arg(long)]
    trace_every: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunFlags,
    #[arg(long, value_delimiter = ',')]
    amplitudes: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pulses: Option<Vec<usize>>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Continue a partially written output file.
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long, default_value = "mot5")]
    problem: String,
    #[arg(long, default_value = "local-correlated")]
    kind: DisorderKind,
    /// Disorder strengths in units of J.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Fit `a·arctan(b(x − c)) + d` to the points with σ at or above this value.
    #[arg(long)]
    fit_above: Option<f64>,
}

#[derive(Args)]
struct CollapseArgs {
    #[arg(long)]
    input: PathBuf,
    /// Exponent c, or `auto` to search for it.
    #[arg(long, default_value = "auto")]
    c: String,
}

#[derive(Args)]
struct MagicArgs {
    #[arg(long, default_value_t = 5)]
    ions: usize,
    #[arg(long = "trap-freq-hz", default_value_t = 130e3)]
    trap_freq_hz: f64,
    /// Magnetic field gradient in T/m.
    #[arg(long, default_value_t = 19.0)]
    gradient: f64,
    /// dω/dB in rad/(s·T).
    #[arg(long, default_value_t = DEFAULT_SENSITIVITY)]
    sensitivity: f64,
}

#[derive(Args)]
struct FixturesArgs {
    name: Option<String>,
}

fn parse_protocol(s: &str) -> std::result::Result<Protocol, String> {
    serde_json::from_value(json!(s)).map_err(|_| {
        "expected couplings-only, local-fields-with-sign-flips or coupling-modulation".to_string()
    })
}

/// Writes `text` to `out`, or to standard output.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn model_document(model: &IsingModel, provenance: serde_json::Value) -> ModelDocument {
    let mut doc = ModelDocument::from(model);
    doc.provenance = Some(provenance);
    doc
}

fn read_spec<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "toml") {
        Ok(toml::from_str(&text)?)
    } else {
        Ok(serde_json::from_str(&text)?)
    }
}

const CHAIN: [&str; 4] = [
    "fold constraints into the objective with penalty λ",
    "substitute x = (1 + s)/2",
    "replace local fields by couplings to an ancilla spin at index 0",
    "divide by the largest |J|",
];

fn cmd_build(cli: &Cli, args: &BuildArgs) -> Result<()> {
    let (model, provenance) = match args.problem.as_str() {
        name if FIXTURE_NAMES.contains(&name) => {
            if args.lambda.is_some() {
                bail!("presets carry their own λ; use `mot` or `cutstock` with --spec to change it");
            }
            let info = fixture_info(name)?;
            (
                build_preset(name)?,
                json!({"source": "preset", "preset": name, "lambda": info.penalty, "chain": CHAIN}),
            )
        }
        "mot" => {
            let mut spec: MotSpec = match &args.spec {
                Some(path) => read_spec(path)?,
                None => MotSpec {
                    tracks: args.tracks,
                    detections_per_frame: args.detections,
                    free_frames: args.frames.context("--frames is required without --spec")?,
                    fixed_assignment: args.fixed.clone(),
                    objective_weights: args.weights.clone(),
                    links: Vec::new(),
                    offdiag_rescale: 1.0,
                    max_frame_gap: 2,
                    penalty: 1.0,
                },
            };
            if let Some(l) = args.lambda {
                spec.penalty = l;
            }
            let qubo = build_mot(&spec)?;
            let model = encode_couplings_only(&qubo)?;
            (model, json!({"source": "mot", "spec": spec, "lambda": spec.penalty, "chain": CHAIN}))
        }
        "cutstock" => {
            let mut spec: CutStockSpec = match &args.spec {
                Some(path) => read_spec(path)?,
                None => CutStockSpec {
                    bar_length: args.bar_length.context("--L is required without --spec")?,
                    demands: if args.demands.is_empty() {
                        vec![1; args.pieces.len()]
                    } else {
                        args.demands.clone()
                    },
                    piece_lengths: args.pieces.clone(),
                    n_bars: args.bars,
                    penalty: 1.0,
                    demand_encoding: if args.aggregated {
                        DemandEncoding::AggregatedSlack
                    } else {
                        DemandEncoding::UnitPieces
                    },
                },
            };
            if let Some(l) = args.lambda {
                spec.penalty = l;
            }
            let built = build_cutting_stock(&spec)?;
            let labels = std::iter::once("ancilla".to_string()).chain(built.labels()).collect();
            let model = encode_couplings_only(&built.qubo)?.with_labels(labels)?;
            (model, json!({"source": "cutstock", "spec": spec, "lambda": spec.penalty, "chain": CHAIN}))
        }
        other => bail!("unknown problem `{other}`; expected a preset, `mot` or `cutstock`"),
    };
    emit(cli.out.as_deref(), &pretty(&model_document(&model, provenance))?)
}

/// Applies the shared run flags on top of the config file.
fn apply_run_flags(config: &mut ExperimentConfig, cli: &Cli, run: &RunFlags) {
    set(&mut config.problem, run.problem.clone());
    set(&mut config.anneal.duration, run.duration);
    set(&mut config.anneal.steps, run.steps);
    set(&mut config.anneal.hx, run.hx);
    set(&mut config.anneal.protocol, run.protocol);
    set(&mut config.anneal.j_hz, run.j_hz);
    set(&mut config.noise.kind, run.noise);
    set(&mut config.noise.gamma, run.gamma);
    if run.uncorrelated {
        config.noise.correlated = Some(false);
    }
    set(&mut config.ensemble.master_seed, cli.seed);
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        builder = builder.num_threads(w);
    }
    Ok(builder.build()?)
}

fn cmd_anneal(cli: &Cli, args: &AnnealArgs) -> Result<()> {
    let mut config = ExperimentConfig::load(cli.config.as_deref())?;
    apply_run_flags(&mut config, cli, &args.run);
    if let Some(p) = args.pulses {
        config.dd.pulse_counts = Some(vec![p]);
    }
    if let Some(a) = args.amplitude {
        config.noise.amplitudes_hz = Some(vec![a]);
    }
    if config.noise.kind.is_some_and(|k| k != NoiseKind::None) && config.noise.amplitudes_hz.is_none() {
        bail!("--amplitude is required with noise");
    }
    config.ensemble.n_realizations = Some(1);
    let (resolved, model) = resolve(&config)?;
    if resolved.amplitudes_hz.len() != 1 || resolved.pulse_counts.len() != 1 {
        bail!("anneal runs a single amplitude and pulse count; use `sweep` for grids");
    }
    let (amplitude, pulses) = (resolved.amplitudes_hz[0], resolved.pulse_counts[0]);
    let anneal = &resolved.anneal;
    let n = model.n_spins();

    let start = Instant::now();
    let targets = brute_force_ground_states(&model)?.indices;
    let schedule = pulse_positions(pulses, anneal.n_steps)?;
    let trace = resolved
        .noise
        .trace(amplitude, resolved.j_hz, anneal, n, resolved.correlated, resolved.master_seed)?;
    let every = args.trace_every.unwrap_or(0);
    let mut fidelity_trace = Vec::new();
    let mut next_pulse = 0;
    let mut frame = 0usize;
    let all = (1usize << n) - 1;
    let state = propagate_observed(&model, anneal, trace.as_ref(), &schedule, |step, state| {
        while next_pulse < schedule.len() && schedule.pulses()[next_pulse].step <= step {
            frame ^= schedule.pulses()[next_pulse].mask & all;
            next_pulse += 1;
        }
        if every > 0 && step % every == 0 {
            let f: f64 = targets.iter().map(|&t| state.probability(t ^ frame)).sum();
            fidelity_trace.push((step, f));
        }
    })?;
    let fidelity = final_fidelity(&state, &targets, &schedule)?;
    let wall = start.elapsed().as_secs_f64();

    println!("{fidelity:.10}");
    if let Some(path) = &cli.out {
        let record = json!({
            "config": resolved,
            "seed": resolved.master_seed,
            "model_hash": model_hash(&model)?,
            "pulse_count": pulses,
            "spectrum": resolved.noise,
            "amplitude_hz": amplitude,
            "fidelity": fidelity,
            "fidelity_trace": if every > 0 { Some(fidelity_trace) } else { None },
            "wall_time_s": wall,
        });
        emit(Some(path), &pretty(&record)?)?;
    }
    Ok(())
}

/// FNV-1a over the model's JSON form: a short stable identifier for run records.
fn model_hash(model: &IsingModel) -> Result<String> {
    let text = serde_json::to_string(&ModelDocument::from(model))?;
    let hash = text
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    Ok(format!("{hash:016x}"))
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let mut config = ExperimentConfig::load(cli.config.as_deref())?;
    apply_run_flags(&mut config, cli, &args.run);
    set(&mut config.noise.amplitudes_hz, args.amplitudes.clone());
    set(&mut config.dd.pulse_counts, args.pulses.clone());
    set(&mut config.ensemble.n_realizations, args.realizations);
    set(&mut config.output.path, cli.out.clone());
    let Some(path) = config.output.path.clone() else {
        bail!("sweep needs an output file (--out or output.path)");
    };
    let (resolved, model) = resolve(&config)?;
    let spec = resolved.sweep_spec();
    let pool = thread_pool(cli.workers)?;
    let computed = pool.install(|| -> Result<usize> {
        let runner = SweepRunner::new(&model, &spec)?;
        sweep_file::run_sweep(&runner, &resolved, &path, args.resume)
    })?;
    let rows = sweep_file::read_rows(&path)?;
    eprintln!("{computed} new rows, {} total in {}", rows.len(), path.display());
    for g in summarize(&rows)? {
        eprintln!(
            "amplitude {:>7} Hz  pulses {:>5}  median {:.4}  IQR [{:.4}, {:.4}]",
            g.amplitude_hz, g.pulses, g.stats.median, g.stats.q1, g.stats.q3
        );
    }
    Ok(())
}

fn cmd_stability(cli: &Cli, args: &StabilityArgs) -> Result<()> {
    let problem = load_problem(&args.problem)?;
    let sigmas = args
        .sigmas
        .clone()
        .unwrap_or_else(|| (1..=30).map(|k| k as f64 / 10.0).collect());
    let seed = cli.seed.unwrap_or(config::DEFAULT_SEED);
    let pool = thread_pool(cli.workers)?;
    let points = pool.install(|| gs_change_probability(&problem.model, args.kind, &sigmas, args.samples, seed))?;
    let fit = match args.fit_above {
        Some(x0) => {
            let (xs, ys): (Vec<f64>, Vec<f64>) = points
                .iter()
                .filter(|p| p.sigma >= x0)
                .map(|p| (p.sigma, p.probability))
                .unzip();
            Some(arctan_fit(&xs, &ys)?)
        }
        None => None,
    };
    let mut text = String::new();
    let run = json!({
        "problem": args.problem,
        "kind": args.kind,
        "samples": args.samples,
        "sigmas": sigmas,
        "fit_above": args.fit_above,
    });
    text += &format!("# config: {run}\n# seed: {seed}\n");
    if let Some(f) = &fit {
        text += &format!("# arctan fit: {}\n", serde_json::to_string(f)?);
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for p in &points {
        writer.serialize(p)?;
    }
    text += &String::from_utf8(writer.into_inner()?)?;
    emit(cli.out.as_deref(), &text)
}

fn cmd_collapse(cli: &Cli, args: &CollapseArgs) -> Result<()> {
    let rows = sweep_file::read_rows(&args.input)?;
    let c = match args.c.as_str() {
        "auto" => None,
        v => Some(v.parse::<f64>().with_context(|| format!("--c expects `auto` or a number, got `{v}`"))?),
    };
    let fit = collapse_fit(&rows, c)?;
    let report = json!({
        "input": args.input,
        "c": args.c,
        "fit": fit,
    });
    eprintln!(
        "exponent {:.4}, collapse residual {:.4}, unrescaled {:.4}",
        fit.exponent, fit.collapse_residual, fit.unrescaled_residual
    );
    emit(cli.out.as_deref(), &pretty(&report)?)
}

fn cmd_magic(cli: &Cli, args: &MagicArgs) -> Result<()> {
    let mut spec = IonChainSpec::ytterbium(args.ions, args.trap_freq_hz, args.gradient);
    spec.sensitivity = vec![args.sensitivity];
    let model = coupling_matrix(&spec)?;
    let modes = normal_modes(&spec)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let provenance = json!({
        "source": "magic",
        "ions": args.ions,
        "ion_mass_kg": YB171_MASS,
        "trap_freq_hz": args.trap_freq_hz,
        "gradient_t_per_m": args.gradient,
        "sensitivity_rad_per_s_t": args.sensitivity,
        "units": "J/2π in Hz",
        "max_abs_coupling_hz": model.max_abs_coupling(),
        "mode_frequencies_hz": modes.frequencies.iter().map(|w| w / two_pi).collect::<Vec<_>>(),
    });
    eprintln!("max |J| = {:.3} Hz", model.max_abs_coupling());
    emit(cli.out.as_deref(), &pretty(&model_document(&model, provenance))?)
}

fn cmd_fixtures(cli: &Cli, args: &FixturesArgs) -> Result<()> {
    match &args.name {
        Some(name) => {
            let info = fixture_info(name)?;
            let model = printed_fixture(name)?;
            emit(cli.out.as_deref(), &pretty(&model_document(&model, json!({"source": "fixture", "info": info})))?)
        }
        None => {
            let mut text = String::from("name,n_spins,penalty,hx,duration,j_hz,description\n");
            for name in FIXTURE_NAMES {
                let info = fixture_info(name)?;
                let n = printed_fixture(name)?.n_spins();
                text += &format!(
                    "{},{n},{},{},{},{},\"{}\"\n",
                    info.name, info.penalty, info.hx, info.duration, info.j_hz, info.description
                );
            }
            emit(cli.out.as_deref(), &text)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => cmd_build(&cli, a),
        Command::Anneal(a) => cmd_anneal(&cli, a),
        Command::Sweep(a) => cmd_sweep(&cli, a),
        Command::Stability(a) => cmd_stability(&cli, a),
        Command::Collapse(a) => cmd_collapse(&cli, a),
        Command::Magic(a) => cmd_magic(&cli, a),
        Command::Fixtures(a) => cmd_fixtures(&cli, a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
