use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use pulsed_cli::config::Config;
use pulsed_cli::scan::{
    polymer_table, portrait_table, run_continuum, run_orbit, run_polymer_profile, run_portrait, ContinuumRequest,
    Initial, Manifestation, PolymerParams, ScanSpec, Units,
};
use pulsed_cli::table::{gnuplot_script, Format, Table};
use pulsed_cli::verify::{run_verify, Suite, VerifyOptions, DEFAULT_SEED};
use pulsed_cli::{with_workers, worker_count, CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
use pulsed_core::polymer::AngleConvention;

#[derive(Parser)]
#[command(name = "pulsed", version, about = "Scans and checks for pulsed harmonic systems")]
#[command(after_help = "Worker threads: set PULSED_WORKERS (default: available parallelism).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy portrait: E_n for n = 1..N at every xi of a scan.
    Portrait(PortraitArgs),
    /// Single trajectory at one xi.
    Orbit(OrbitArgs),
    /// Width profile of a directed line crossing attracting or repelling planes.
    Polymer(PolymerArgs),
    /// Averaged-spring limit: shape, width and energies of a real packet.
    Continuum(ContinuumArgs),
    /// Run the invariant checks and report residuals.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Run file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
    /// Destination file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a gnuplot script for the CSV output.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

const OUTPUT_KEYS: &[&str] = &["format", "output", "gnuplot"];

#[derive(Args)]
struct ParticleArgs {
    /// classical, quantum, moebius or offcenter.
    #[arg(long)]
    manifestation: Option<Manifestation>,
    /// Iterations N.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d0_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d0_im: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    /// Pulse period tau.
    #[arg(long)]
    period: Option<f64>,
}

const PARTICLE_KEYS: &[&str] = &[
    "manifestation",
    "iterations",
    "x0",
    "p0",
    "eta_re",
    "eta_im",
    "d0_re",
    "d0_im",
    "hbar",
    "mass",
    "period",
];

#[derive(Args)]
struct PortraitArgs {
    #[command(flatten)]
    out: OutputArgs,
    #[command(flatten)]
    particle: ParticleArgs,
    /// Preset for figure 1 (classical) through 5 (quantum, varying eta).
    #[arg(long)]
    figure: Option<u8>,
    #[arg(long, allow_hyphen_values = true)]
    xi_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xi_max: Option<f64>,
    #[arg(long)]
    xi_step: Option<f64>,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    out: OutputArgs,
    #[command(flatten)]
    particle: ParticleArgs,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<f64>,
}

#[derive(Args)]
struct PolymerArgs {
    #[command(flatten)]
    out: OutputArgs,
    /// Dimensionless coupling 2 nu d g.
    #[arg(long, allow_hyphen_values = true)]
    g_tilde: Option<f64>,
    /// (l / a)^2.
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Plane spacing d.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    /// Initial transverse scale.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    planes: Option<usize>,
}

#[derive(Args)]
struct ContinuumArgs {
    #[command(flatten)]
    out: OutputArgs,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    /// Initial width.
    #[arg(long)]
    l0: Option<f64>,
    /// Sets hbar = m = kappa = 1 and picks l0 so that omega / omega_s = ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Final time (default: two periods of the averaged spring).
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// all, classical, quantum, polymer or continuum.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Binding-angle relation for the polymer formulas: half (1 + g/2) or full (1 + g).
    #[arg(long, default_value = "half")]
    convention: Convention,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy)]
enum ReportFormat {
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown report format {other:?} (text, json)")),
        }
    }
}

#[derive(Clone, Copy)]
struct Convention(AngleConvention);

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" => Ok(Self(AngleConvention::HalfCoupling)),
            "full" => Ok(Self(AngleConvention::FullCoupling)),
            other => Err(format!("unknown convention {other:?} (half, full)")),
        }
    }
}

/// Flag, else config entry, else nothing.
struct Layer {
    cfg: Config,
}

impl Layer {
    fn load(path: Option<&Path>, allowed: &[&[&str]]) -> Result<Self, CliError> {
        let cfg = match path {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let keys: Vec<&str> = allowed.iter().flat_map(|k| k.iter().copied()).collect();
        cfg.restrict(&keys)?;
        Ok(Self { cfg })
    }

    fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => Ok(self.cfg.get(key)?),
        }
    }
}

struct Sink {
    format: Format,
    output: Option<PathBuf>,
    gnuplot: Option<PathBuf>,
}

impl Sink {
    fn resolve(args: &OutputArgs, layer: &Layer) -> Result<Self, CliError> {
        let sink = Self {
            format: layer.pick(args.format, "format")?.unwrap_or(Format::Csv),
            output: layer.pick(args.output.clone(), "output")?,
            gnuplot: layer.pick(args.gnuplot.clone(), "gnuplot")?,
        };
        if sink.gnuplot.is_some() && (sink.output.is_none() || sink.format != Format::Csv) {
            return Err(CliError::Usage("--gnuplot needs CSV output written to a file".into()));
        }
        Ok(sink)
    }

    fn emit(&self, table: &Table, x: usize, y: usize, points: bool) -> Result<(), CliError> {
        write_text(self.output.as_deref(), &table.render(self.format))?;
        if let (Some(script), Some(data)) = (&self.gnuplot, &self.output) {
            write_text(Some(script), &gnuplot_script(table, data, x, y, points))?;
        }
        Ok(())
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let result = match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // the reader went away, e.g. `pulsed ... | head`
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
    };
    result.map_err(|source| CliError::Io {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    })
}

/// Parameter block for the figure presets: (manifestation, x0/p0 or eta).
fn figure_preset(figure: u8) -> Result<(Manifestation, Initial), CliError> {
    let packet = |re, im| {
        Ok((
            Manifestation::Quantum,
            Initial::Packet {
                eta: Complex64::new(re, im),
            },
        ))
    };
    match figure {
        1 => Ok((Manifestation::Classical, Initial::Particle { x0: 1.0, p0: 0.5 })),
        2 => packet(1.0, -0.5),
        3 => packet(1.0, 0.0),
        4 => packet(1.0, 0.5),
        5 => packet(1.0, 1.0),
        other => Err(CliError::Usage(format!("figure must be 1 to 5, got {other}"))),
    }
}

fn resolve_particle(
    args: &ParticleArgs,
    layer: &Layer,
    preset: Option<(Manifestation, Initial)>,
) -> Result<(Manifestation, Initial, Units, usize), CliError> {
    let manifestation = layer
        .pick(args.manifestation, "manifestation")?
        .or(preset.map(|p| p.0))
        .ok_or_else(|| CliError::Usage("choose --manifestation or --figure".into()))?;
    let base = preset.filter(|p| p.0 == manifestation || p.0 == Manifestation::Quantum).map(|p| p.1);
    let (px, pp, pe) = match base {
        Some(Initial::Particle { x0, p0 }) => (Some(x0), Some(p0), None),
        Some(Initial::Packet { eta }) => (None, None, Some(eta)),
        _ => (None, None, None),
    };
    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| CliError::Usage(format!("{manifestation} needs --{what}")))
    };
    let eta = |layer: &Layer| -> Result<Complex64, CliError> {
        let re = layer.pick(args.eta_re, "eta_re")?.or(pe.map(|e| e.re));
        let im = layer.pick(args.eta_im, "eta_im")?.or(pe.map(|e| e.im)).unwrap_or(0.0);
        Ok(Complex64::new(need(re, "eta-re")?, im))
    };
    let initial = match manifestation {
        Manifestation::Classical => Initial::Particle {
            x0: need(layer.pick(args.x0, "x0")?.or(px), "x0")?,
            p0: need(layer.pick(args.p0, "p0")?.or(pp), "p0")?,
        },
        Manifestation::Quantum | Manifestation::Moebius => Initial::Packet { eta: eta(layer)? },
        Manifestation::OffCenter => Initial::Displaced {
            eta: eta(layer)?,
            d0: Complex64::new(
                need(layer.pick(args.d0_re, "d0_re")?, "d0-re")?,
                layer.pick(args.d0_im, "d0_im")?.unwrap_or(0.0),
            ),
        },
        Manifestation::Continuum | Manifestation::Polymer => {
            return Err(CliError::Usage(format!("use the {manifestation} subcommand")))
        }
    };
    let units = Units {
        hbar: layer.pick(args.hbar, "hbar")?.unwrap_or(1.0),
        mass: layer.pick(args.mass, "mass")?.unwrap_or(1.0),
        period: layer.pick(args.period, "period")?.unwrap_or(1.0),
    };
    let iterations = layer.pick(args.iterations, "iterations")?.unwrap_or(20);
    Ok((manifestation, initial, units, iterations))
}

fn portrait(args: PortraitArgs) -> Result<i32, CliError> {
    let layer = Layer::load(
        args.out.config.as_deref(),
        &[OUTPUT_KEYS, PARTICLE_KEYS, &["figure", "xi_min", "xi_max", "xi_step"]],
    )?;
    let sink = Sink::resolve(&args.out, &layer)?;
    let preset = layer.pick(args.figure, "figure")?.map(figure_preset).transpose()?;
    let (manifestation, initial, units, n_iterations) = resolve_particle(&args.particle, &layer, preset)?;
    let spec = ScanSpec {
        manifestation,
        xi_min: layer.pick(args.xi_min, "xi_min")?.unwrap_or(0.01),
        xi_max: layer.pick(args.xi_max, "xi_max")?.unwrap_or(2.0),
        xi_step: layer.pick(args.xi_step, "xi_step")?.unwrap_or(0.01),
        n_iterations,
        initial,
        units,
    };
    let rows = with_workers(worker_count()?, || run_portrait(&spec))??;
    sink.emit(&portrait_table(&rows), 1, 3, true)?;
    Ok(EXIT_OK)
}

fn orbit(args: OrbitArgs) -> Result<i32, CliError> {
    let layer = Layer::load(args.out.config.as_deref(), &[OUTPUT_KEYS, PARTICLE_KEYS, &["xi"]])?;
    let sink = Sink::resolve(&args.out, &layer)?;
    let (manifestation, initial, units, n_iterations) = resolve_particle(&args.particle, &layer, None)?;
    let xi = layer
        .pick(args.xi, "xi")?
        .ok_or_else(|| CliError::Usage("orbit needs --xi".into()))?;
    let spec = ScanSpec {
        manifestation,
        xi_min: xi,
        xi_max: xi,
        xi_step: 1.0,
        n_iterations,
        initial,
        units,
    };
    let table = run_orbit(&spec, xi)?;
    let y = table.columns.len();
    sink.emit(&table, 1, y, false)?;
    Ok(EXIT_OK)
}

fn polymer(args: PolymerArgs) -> Result<i32, CliError> {
    let layer = Layer::load(
        args.out.config.as_deref(),
        &[OUTPUT_KEYS, &["g_tilde", "chi", "nu", "spacing", "g", "a", "planes"]],
    )?;
    let sink = Sink::resolve(&args.out, &layer)?;
    let dimensionless = (layer.pick(args.g_tilde, "g_tilde")?, layer.pick(args.chi, "chi")?);
    let physical = [
        layer.pick(args.nu, "nu")?,
        layer.pick(args.spacing, "spacing")?,
        layer.pick(args.g, "g")?,
        layer.pick(args.a, "a")?,
    ];
    let params = match (dimensionless, physical) {
        ((Some(g_tilde), Some(chi)), [None, None, None, None]) => PolymerParams::Dimensionless { g_tilde, chi },
        ((None, None), [Some(nu), Some(spacing), Some(g), Some(a)]) => PolymerParams::Physical { nu, spacing, g, a },
        _ => {
            return Err(CliError::Usage(
                "polymer needs --g-tilde and --chi, or all of --nu --spacing --g --a".into(),
            ))
        }
    };
    let planes = layer.pick(args.planes, "planes")?.unwrap_or(100);
    let run = run_polymer_profile(&params, planes)?;
    sink.emit(&polymer_table(&run), 1, 2, false)?;
    Ok(EXIT_OK)
}

fn continuum(args: ContinuumArgs) -> Result<i32, CliError> {
    let layer = Layer::load(
        args.out.config.as_deref(),
        &[OUTPUT_KEYS, &["kappa", "mass", "hbar", "l0", "ratio", "t_max", "samples"]],
    )?;
    let sink = Sink::resolve(&args.out, &layer)?;
    let explicit = [
        layer.pick(args.kappa, "kappa")?,
        layer.pick(args.mass, "mass")?,
        layer.pick(args.hbar, "hbar")?,
        layer.pick(args.l0, "l0")?,
    ];
    let (kappa, mass, hbar, l0) = match layer.pick(args.ratio, "ratio")? {
        Some(_) if explicit.iter().any(Option::is_some) => {
            return Err(CliError::Usage("--ratio replaces --kappa --mass --hbar --l0".into()))
        }
        Some(r) if r > 0.0 => (1.0, 1.0, 1.0, 1.0 / r.sqrt()),
        Some(r) => return Err(CliError::Usage(format!("ratio must be positive, got {r}"))),
        None => (
            explicit[0].unwrap_or(1.0),
            explicit[1].unwrap_or(1.0),
            explicit[2].unwrap_or(1.0),
            explicit[3].unwrap_or(1.0),
        ),
    };
    let period = std::f64::consts::PI / (kappa / mass).sqrt();
    let req = ContinuumRequest {
        kappa,
        mass,
        hbar,
        l0,
        t_max: layer.pick(args.t_max, "t_max")?.unwrap_or(2.0 * period),
        samples: layer.pick(args.samples, "samples")?.unwrap_or(101),
    };
    let table = with_workers(worker_count()?, || run_continuum(&req))??;
    sink.emit(&table, 1, 4, false)?;
    Ok(EXIT_OK)
}

fn verify(args: VerifyArgs) -> Result<i32, CliError> {
    let options = VerifyOptions {
        suite: args.suite,
        convention: args.convention.0,
        seed: args.seed,
    };
    let report = with_workers(worker_count()?, || run_verify(&options))?;
    let text = match args.format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => report.to_json(),
    };
    write_text(args.output.as_deref(), &text)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Portrait(a) => portrait(a),
        Command::Orbit(a) => orbit(a),
        Command::Polymer(a) => polymer(a),
        Command::Continuum(a) => continuum(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("pulsed: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
