mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gradssh::closedform::{classify_point, Case, DEFAULT_CLASSIFY_TOL};
use gradssh::dynamics::{default_steps, edge_mass, evolve, evolve_until_converged, End, FunnelResult, StateVector};
use gradssh::ep::{classify_at, order_estimate, scan_for_eps, EpRecord, OrderEstimate, OrderFitOptions, ScanConfig};
use gradssh::spectral::{eigensystem, normalized_discriminant};
use gradssh::sweep::{sweep_1d, sweep_2d, winding_number, write_csv, write_json, AxisRange, ExportFormat};
use gradssh::{build_hamiltonian, eigenvalues, Axis, ChainParams};
use num_complex::Complex64;
use serde::Serialize;

use config::{pick, switch, Config};
use output::{header, json, num, records_csv, table, with_writer};

#[derive(Parser)]
#[command(name = "gradssh", version, about = "Spectra, exceptional points and dynamics of graded nonreciprocal SSH chains")]
struct Cli {
    /// JSON file supplying values for any long flag (same names, kebab-case);
    /// flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues (and optionally eigenvectors) at one parameter point.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Sheet-tracked spectra along g, or on a (g, a) plane when a-steps is set.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Scan one axis for spectral degeneracies and classify them.
    #[command(allow_negative_numbers = true)]
    FindEps(FindEpsArgs),
    /// Classify every eigenvalue cluster at one parameter point.
    #[command(allow_negative_numbers = true)]
    Classify(ClassifyArgs),
    /// Fit the splitting exponent of the cluster at one parameter point.
    #[command(allow_negative_numbers = true)]
    Order(OrderArgs),
    /// Time evolution under exp(-iHt).
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// Winding number of the reciprocal chain (g = a = 0).
    #[command(allow_negative_numbers = true)]
    Winding(WindingArgs),
}

#[derive(Args)]
struct ChainArgs {
    /// Intracell hopping (odd links, including both end links).
    #[arg(long)]
    v: Option<f64>,
    /// Intercell hopping (even links).
    #[arg(long)]
    w: Option<f64>,
    /// Nonreciprocity [default: 0].
    #[arg(long)]
    g: Option<f64>,
    /// Hopping gradient per link [default: 0].
    #[arg(long)]
    a: Option<f64>,
    /// Number of sites [default: 4].
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format [default: json].
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file [default: standard output].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RangeArgs {
    /// [default: -2]
    #[arg(long)]
    g_min: Option<f64>,
    /// [default: 2]
    #[arg(long)]
    g_max: Option<f64>,
    /// [default: 401]
    #[arg(long)]
    g_steps: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    a_min: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    a_max: Option<f64>,
    /// Number of a values; turns a sweep into a plane sweep.
    #[arg(long)]
    a_steps: Option<usize>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Include unit right and left eigenvectors.
    #[arg(long)]
    vectors: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    range: RangeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FindEpsArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    range: RangeArgs,
    /// Scanned parameter, g or a [default: g].
    #[arg(long)]
    axis: Option<String>,
    /// Parameter perturbed in the order fit [default: g].
    #[arg(long)]
    order_axis: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Parameter perturbed in the order fit [default: g].
    #[arg(long)]
    order_axis: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OrderArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Perturbed parameter, g or a [default: g].
    #[arg(long)]
    axis: Option<String>,
    /// [default: 1e-9]
    #[arg(long)]
    eps_min: Option<f64>,
    /// [default: 1e-3]
    #[arg(long)]
    eps_max: Option<f64>,
    /// Number of log-spaced perturbations [default: 13].
    #[arg(long)]
    points: Option<usize>,
    /// Real part of the energy whose cluster is followed.
    #[arg(long)]
    target_re: Option<f64>,
    /// Imaginary part of the energy whose cluster is followed.
    #[arg(long)]
    target_im: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Total time (required unless --until-converged).
    #[arg(long)]
    t_total: Option<f64>,
    /// Number of steps [default: enough for ||H|| dt <= 0.5].
    #[arg(long)]
    steps: Option<usize>,
    /// Step for --until-converged [default: 0.5 / ||H||].
    #[arg(long)]
    dt: Option<f64>,
    /// Rescale the state to unit norm after every step.
    #[arg(long)]
    renormalize: bool,
    /// Run renormalised until the edge mass stops changing (cap 10^4 steps).
    #[arg(long)]
    until_converged: bool,
    /// Initial state: `uniform` or `site:K` (1-indexed) [default: uniform].
    #[arg(long)]
    init: Option<String>,
    /// Number of end sites counted by the edge mass [default: 2].
    #[arg(long)]
    edge_k: Option<usize>,
    /// End used by --until-converged, left or right [default: left].
    #[arg(long)]
    side: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WindingArgs {
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    /// Number of k samples [default: 256].
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn chain_params(c: &ChainArgs, cfg: &Config) -> Result<ChainParams> {
    let v = pick(c.v, cfg.v).ok_or_else(|| anyhow!("missing --v"))?;
    let w = pick(c.w, cfg.w).ok_or_else(|| anyhow!("missing --w"))?;
    let g = pick(c.g, cfg.g).unwrap_or(0.0);
    let a = pick(c.a, cfg.a).unwrap_or(0.0);
    let n = pick(c.n, cfg.n).unwrap_or(4);
    Ok(ChainParams::new(v, w, g, a, n)?)
}

fn output_target(o: &OutputArgs, cfg: &Config) -> Result<(ExportFormat, Option<PathBuf>)> {
    let format = match (o.format, &cfg.format) {
        (Some(Format::Csv), _) => ExportFormat::Csv,
        (Some(Format::Json), _) => ExportFormat::Json,
        (None, Some(s)) => s.parse()?,
        (None, None) => ExportFormat::Json,
    };
    Ok((format, o.out.clone().or_else(|| cfg.out.clone())))
}

fn axis_arg(flag: &Option<String>, file: &Option<String>) -> Result<Axis> {
    match flag.as_ref().or(file.as_ref()) {
        Some(s) => Ok(s.parse()?),
        None => Ok(Axis::G),
    }
}

struct Ranges {
    g: (f64, f64, usize),
    a: (f64, f64, usize),
    plane: bool,
}

fn ranges(r: &RangeArgs, cfg: &Config) -> Ranges {
    let a_steps = pick(r.a_steps, cfg.a_steps);
    Ranges {
        g: (
            pick(r.g_min, cfg.g_min).unwrap_or(-2.0),
            pick(r.g_max, cfg.g_max).unwrap_or(2.0),
            pick(r.g_steps, cfg.g_steps).unwrap_or(401),
        ),
        a: (
            pick(r.a_min, cfg.a_min).unwrap_or(0.0),
            pick(r.a_max, cfg.a_max).unwrap_or(1.0),
            a_steps.unwrap_or(101),
        ),
        plane: a_steps.is_some(),
    }
}

#[derive(Serialize)]
struct SpectrumOut {
    params: ChainParams,
    eigenvalues: Vec<Complex64>,
    normalized_discriminant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<Case>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right_vectors: Option<Vec<Vec<Complex64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left_vectors: Option<Vec<Vec<Complex64>>>,
}

fn spectrum(args: &SpectrumArgs, cfg: &Config) -> Result<()> {
    let p = chain_params(&args.chain, cfg)?;
    let h = build_hamiltonian(&p)?;
    let spec = if switch(args.vectors, cfg.vectors) {
        eigensystem(&h)?
    } else {
        eigenvalues(&h)?
    };
    let out = SpectrumOut {
        params: p,
        eigenvalues: spec.eigenvalues,
        normalized_discriminant: normalized_discriminant(&h),
        case: if p.n == 4 { Some(classify_point(&p, DEFAULT_CLASSIFY_TOL)?) } else { None },
        right_vectors: spec.right_vectors,
        left_vectors: spec.left_vectors,
    };
    let (format, path) = output_target(&args.output, cfg)?;
    with_writer(path.as_deref(), |w| match format {
        ExportFormat::Json => json(w, &out),
        ExportFormat::Csv => {
            let rows: Vec<Vec<String>> = out
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, z)| vec![(i + 1).to_string(), num(z.re), num(z.im)])
                .collect();
            table(w, &header(&["index", "re_e", "im_e"]), &rows)
        }
    })
}

fn sweep(args: &SweepArgs, cfg: &Config) -> Result<()> {
    let p = chain_params(&args.chain, cfg)?;
    let r = ranges(&args.range, cfg);
    let grid = if r.plane {
        sweep_2d(&p, r.g, r.a)?
    } else {
        sweep_1d(&p, &AxisRange::new(Axis::G, r.g.0, r.g.1, r.g.2)?)?
    };
    let (format, path) = output_target(&args.output, cfg)?;
    with_writer(path.as_deref(), |w| {
        match format {
            ExportFormat::Json => write_json(&grid, w)?,
            ExportFormat::Csv => write_csv(&grid, w)?,
        }
        Ok(())
    })
}

fn emit_records(records: &[EpRecord], out: &OutputArgs, cfg: &Config) -> Result<()> {
    let (format, path) = output_target(out, cfg)?;
    with_writer(path.as_deref(), |w| match format {
        ExportFormat::Json => json(w, &records),
        ExportFormat::Csv => records_csv(w, records),
    })
}

fn find_eps(args: &FindEpsArgs, cfg: &Config) -> Result<()> {
    let p = chain_params(&args.chain, cfg)?;
    let axis = axis_arg(&args.axis, &cfg.axis)?;
    let r = ranges(&args.range, cfg);
    let (min, max, steps) = match axis {
        Axis::G => r.g,
        Axis::A => r.a,
    };
    let mut scan = ScanConfig::new(axis, min, max, steps)?;
    scan.order_axis = axis_arg(&args.order_axis, &cfg.order_axis)?;
    let records = scan_for_eps(&p, &scan)?;
    emit_records(&records, &args.output, cfg)
}

fn classify(args: &ClassifyArgs, cfg: &Config) -> Result<()> {
    let p = chain_params(&args.chain, cfg)?;
    let records = classify_at(&p, axis_arg(&args.order_axis, &cfg.order_axis)?)?;
    emit_records(&records, &args.output, cfg)
}

#[derive(Serialize)]
struct OrderOut {
    params: ChainParams,
    axis: Axis,
    eps_min: f64,
    eps_max: f64,
    #[serde(flatten)]
    estimate: OrderEstimate,
}

fn order(args: &OrderArgs, cfg: &Config) -> Result<()> {
    let p = chain_params(&args.chain, cfg)?;
    let axis = axis_arg(&args.axis, &cfg.axis)?;
    let defaults = OrderFitOptions::default();
    let mut opts = OrderFitOptions {
        eps_min: pick(args.eps_min, cfg.eps_min).unwrap_or(defaults.eps_min),
        eps_max: pick(args.eps_max, cfg.eps_max).unwrap_or(defaults.eps_max),
        points: pick(args.points, cfg.points).unwrap_or(defaults.points),
        ..defaults
    };
    let re = pick(args.target_re, cfg.target_re);
    let im = pick(args.target_im, cfg.target_im);
    if re.is_some() || im.is_some() {
        opts.target = Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)));
    }
    let est = order_estimate(&p, axis, &opts)?;
    let out = OrderOut { params: p, axis, eps_min: opts.eps_min, eps_max: opts.eps_max, estimate: est };
    let (format, path) = output_target(&args.output, cfg)?;
    with_writer(path.as_deref(), |w| match format {
        ExportFormat::Json => json(w, &out),
        ExportFormat::Csv => table(
            w,
            &header(&["exponent", "order", "points"]),
            &[vec![num(est.exponent), est.order.to_string(), est.points.to_string()]],
        ),
    })
}

fn initial_state(spec: Option<&str>, n: usize) -> Result<StateVector> {
    match spec.unwrap_or("uniform") {
        "uniform" => Ok(StateVector::uniform(n)?),
        s => {
            let site = s
                .strip_prefix("site:")
                .ok_or_else(|| anyhow!("unknown initial state {s:?}; use `uniform` or `site:K`"))?
                .parse::<usize>()
                .with_context(|| format!("bad site in {s:?}"))?;
            Ok(StateVector::delta(n, site)?)
        }
    }
}

#[derive(Serialize)]
struct Frame {
    step: usize,
    t: f64,
    norm: f64,
    edge_left: f64,
    edge_right: f64,
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize)]
struct EvolveOut {
    params: ChainParams,
    dt: f64,
    renormalize: bool,
    edge_k: usize,
    frames: Vec<Frame>,
}

#[derive(Serialize)]
struct FunnelOut {
    params: ChainParams,
    edge_k: usize,
    side: End,
    #[serde(flatten)]
    result: FunnelResult,
    edge_left: f64,
    edge_right: f64,
}

fn probabilities(s: &StateVector) -> Vec<String> {
    let total = s.norm().powi(2);
    s.amplitudes.iter().map(|z| num(z.norm_sqr() / total)).collect()
}

fn evolve_cmd(args: &EvolveArgs, cfg: &Config) -> Result<()> {
    let p = chain_params(&args.chain, cfg)?;
    let psi0 = initial_state(args.init.as_deref().or(cfg.init.as_deref()), p.n)?;
    let k = pick(args.edge_k, cfg.edge_k).unwrap_or(2).min(p.n);
    let prob_cols: Vec<String> = (1..=p.n).map(|i| format!("p_{i}")).collect();
    let (format, path) = output_target(&args.output, cfg)?;

    if switch(args.until_converged, cfg.until_converged) {
        let side: End = match args.side.as_ref().or(cfg.side.as_ref()) {
            Some(s) => s.parse()?,
            None => End::Left,
        };
        let r = evolve_until_converged(&p, &psi0, k, side, pick(args.dt, cfg.dt))?;
        let out = FunnelOut {
            params: p,
            edge_k: k,
            side,
            edge_left: edge_mass(&r.state, k, End::Left)?,
            edge_right: edge_mass(&r.state, k, End::Right)?,
            result: r,
        };
        return with_writer(path.as_deref(), |w| match format {
            ExportFormat::Json => json(w, &out),
            ExportFormat::Csv => {
                let mut h = header(&["steps", "t", "dt", "converged", "edge_mass", "edge_left", "edge_right"]);
                h.extend(prob_cols.iter().cloned());
                let mut row = vec![
                    out.result.steps.to_string(),
                    num(out.result.time),
                    num(out.result.dt),
                    out.result.converged.to_string(),
                    num(out.result.edge_mass),
                    num(out.edge_left),
                    num(out.edge_right),
                ];
                row.extend(probabilities(&out.result.state));
                table(w, &h, &[row])
            }
        });
    }

    let t_total = pick(args.t_total, cfg.t_total).ok_or_else(|| anyhow!("missing --t-total"))?;
    let steps = match pick(args.steps, cfg.steps) {
        Some(s) => s,
        None => default_steps(&p, t_total)?,
    };
    let renormalize = switch(args.renormalize, cfg.renormalize);
    let traj = evolve(&p, &psi0, t_total, steps, renormalize)?;
    let dt = t_total / steps as f64;
    let frames = traj
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(Frame {
                step: i,
                t: dt * i as f64,
                norm: s.norm(),
                edge_left: edge_mass(&s, k, End::Left)?,
                edge_right: edge_mass(&s, k, End::Right)?,
                amplitudes: s.amplitudes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = EvolveOut { params: p, dt, renormalize, edge_k: k, frames };
    with_writer(path.as_deref(), |w| match format {
        ExportFormat::Json => json(w, &out),
        ExportFormat::Csv => {
            let mut h = header(&["step", "t", "norm", "edge_left", "edge_right"]);
            h.extend(prob_cols.iter().cloned());
            let rows: Vec<Vec<String>> = out
                .frames
                .iter()
                .map(|f| {
                    let total: f64 = f.amplitudes.iter().map(|z| z.norm_sqr()).sum();
                    let mut row = vec![f.step.to_string(), num(f.t), num(f.norm), num(f.edge_left), num(f.edge_right)];
                    row.extend(f.amplitudes.iter().map(|z| num(z.norm_sqr() / total)));
                    row
                })
                .collect();
            table(w, &h, &rows)
        }
    })
}

fn winding(args: &WindingArgs, cfg: &Config) -> Result<()> {
    let v = pick(args.v, cfg.v).ok_or_else(|| anyhow!("missing --v"))?;
    let w_hop = pick(args.w, cfg.w).ok_or_else(|| anyhow!("missing --w"))?;
    let samples = pick(args.samples, cfg.samples).unwrap_or(256);
    let r = winding_number(v, w_hop, samples)?;
    let (format, path) = output_target(&args.output, cfg)?;
    with_writer(path.as_deref(), |w| match format {
        ExportFormat::Json => json(w, &r),
        ExportFormat::Csv => table(
            w,
            &header(&["winding", "samples", "closure_defect", "total_angle", "note"]),
            &[vec![
                r.winding.to_string(),
                r.samples.to_string(),
                num(r.closure_defect),
                num(r.total_angle),
                r.note.clone(),
            ]],
        ),
    })
}

fn run(cli: Cli) -> Result<()> {
    let name = match &cli.command {
        Command::Spectrum(_) => "spectrum",
        Command::Sweep(_) => "sweep",
        Command::FindEps(_) => "find-eps",
        Command::Classify(_) => "classify",
        Command::Order(_) => "order",
        Command::Evolve(_) => "evolve",
        Command::Winding(_) => "winding",
    };
    let cfg = Config::load(cli.config.as_deref(), name)?;
    match &cli.command {
        Command::Spectrum(a) => spectrum(a, &cfg),
        Command::Sweep(a) => sweep(a, &cfg),
        Command::FindEps(a) => find_eps(a, &cfg),
        Command::Classify(a) => classify(a, &cfg),
        Command::Order(a) => order(a, &cfg),
        Command::Evolve(a) => evolve_cmd(a, &cfg),
        Command::Winding(a) => winding(a, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gradssh: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
