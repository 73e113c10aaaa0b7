use clap::{Args, Parser, Subcommand};
use invariant_burgers::exact::coefficients;
use invariant_burgers::harness::{
    self, apply_settings, benchmark_initial, convergence_study, frame_comparison,
    grid_spacing_profile, parse_settings, FrameRow, EXACT_TOL,
};
use invariant_burgers::symmetry::{
    certify, ConstantVelocityGrid, DiscreteRelation, FixedGridFtcs, Generator, GroupElement, InvariantScheme,
    LagrangianGrid, StationaryGrid,
};
use invariant_burgers::{run, Error, GridSlice, InterpKind, SchemeConfig, SchemeKind};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const OUT_DIR_VAR: &str = "BURGERS_OUT_DIR";

#[derive(Parser)]
#[command(name = "burgers", version, about = "Periodic viscous Burgers: invariant vs classical schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scheme and write its trajectory and error
    Run(Opts),
    /// Error and observed order over N = 4, 8, …, up to --n (default 512)
    Convergence(Opts),
    /// Compare a run with its Galilean-boosted twin (default --eps3 1)
    Frames(Opts),
    /// Final-time grid spacing
    Spacing(Opts),
    /// Sample the exact solution on a uniform grid at --t-final
    Exact(Opts),
    /// Stencil-level invariance defects over seeded random stencils
    Certify(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Scheme; `convergence` and `frames` run all four compared schemes when omitted
    #[arg(long)]
    scheme: Option<SchemeKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_final: Option<f64>,
    /// C in dt = C h²
    #[arg(long, allow_negative_numbers = true)]
    dt_factor: Option<f64>,
    /// Monitor parameter of the adaptive grid
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Galilean boost applied to the initial data
    #[arg(long, allow_negative_numbers = true)]
    eps3: Option<f64>,
    #[arg(long)]
    interp: Option<InterpKind>,
    /// Output directory (falls back to $BURGERS_OUT_DIR, then `.`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep every k-th step in the trajectory (0 keeps first and last only)
    #[arg(long, default_value_t = 0)]
    snapshot_every: usize,
    /// Seed for the random stencils of `certify`
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Flat key = value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Scheme(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Scheme(e)
    }
}

type CliResult<T> = Result<T, CliError>;

impl Opts {
    fn config(&self) -> CliResult<SchemeConfig> {
        let mut cfg = SchemeConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            apply_settings(&mut cfg, &parse_settings(&text)?)?;
        }
        if let Some(s) = self.scheme {
            cfg.scheme = s;
        }
        if let Some(n) = self.n {
            cfg.n_points = n;
        }
        if let Some(nu) = self.nu {
            cfg.nu = nu;
        }
        if let Some(t) = self.t_final {
            cfg.t_final = t;
        }
        if let Some(c) = self.dt_factor {
            cfg.dt_factor = c;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(e) = self.eps3 {
            cfg.frame_velocity = e;
        }
        if let Some(k) = self.interp {
            cfg.interp = k;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Schemes named on the command line or in the file, else the compared four.
    fn schemes(&self, cfg: &SchemeConfig, file_has_scheme: bool) -> Vec<SchemeKind> {
        if self.scheme.is_some() || file_has_scheme {
            vec![cfg.scheme]
        } else {
            SchemeKind::COMPARED.to_vec()
        }
    }

    fn file_has_scheme(&self) -> bool {
        self.config
            .as_ref()
            .and_then(|p| fs::read_to_string(p).ok())
            .and_then(|t| parse_settings(&t).ok())
            .is_some_and(|m| m.contains_key("scheme"))
    }

    fn out_dir(&self) -> CliResult<PathBuf> {
        let dir = self
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        Ok(dir)
    }
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> CliResult<()> {
    let path = dir.join(name);
    let io = |e| CliError::Io(path.clone(), e);
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    body(&mut w).and_then(|_| w.flush()).map_err(io)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_run(opts: &Opts) -> CliResult<()> {
    let cfg = opts.config()?;
    let dir = opts.out_dir()?;
    let traj = run(&cfg, &benchmark_initial, opts.snapshot_every)?;
    let coeffs = coefficients(cfg.nu, EXACT_TOL)?;
    let report = harness::linf_error(&traj, &coeffs)?;
    write_file(&dir, "trajectory.csv", |w| harness::write_trajectory_csv(w, &traj))?;
    write_file(&dir, "errors.csv", |w| harness::write_error_csv(w, std::slice::from_ref(&report)))?;
    println!("{} N={} linf={:e}", cfg.scheme, cfg.n_points, report.linf);
    Ok(())
}

fn cmd_convergence(opts: &Opts) -> CliResult<()> {
    let cfg = opts.config()?;
    let dir = opts.out_dir()?;
    let n_max = opts.n.unwrap_or(512);
    let ns: Vec<usize> = (2..).map(|k| 1usize << k).take_while(|&n| n <= n_max).collect();
    let mut tables = Vec::new();
    for scheme in opts.schemes(&cfg, opts.file_has_scheme()) {
        let template = SchemeConfig { scheme, ..cfg.clone() };
        tables.push((scheme, convergence_study(&template, &ns)?));
    }
    write_file(&dir, "convergence.csv", |w| harness::write_convergence_csv(w, &tables))
}

fn cmd_frames(opts: &Opts) -> CliResult<()> {
    let mut cfg = opts.config()?;
    let dir = opts.out_dir()?;
    let eps3 = opts.eps3.unwrap_or(1.0);
    // the boost is the comparison parameter here, not a property of the base run
    cfg.frame_velocity = 0.0;
    let mut rows = Vec::new();
    for scheme in opts.schemes(&cfg, opts.file_has_scheme()) {
        let config = SchemeConfig { scheme, ..cfg.clone() };
        let discrepancy = frame_comparison(&config, eps3)?;
        rows.push(FrameRow { scheme, n: cfg.n_points, eps3, discrepancy });
    }
    write_file(&dir, "frames.csv", |w| harness::write_frames_csv(w, &rows))
}

fn cmd_spacing(opts: &Opts) -> CliResult<()> {
    let cfg = opts.config()?;
    let dir = opts.out_dir()?;
    let traj = run(&cfg, &benchmark_initial, 0)?;
    let profile = grid_spacing_profile(&traj);
    write_file(&dir, "spacing.csv", |w| harness::write_spacing_csv(w, &profile))
}

fn cmd_exact(opts: &Opts) -> CliResult<()> {
    let cfg = opts.config()?;
    let dir = opts.out_dir()?;
    let coeffs = coefficients(cfg.nu, EXACT_TOL)?;
    let grid = GridSlice::uniform(cfg.n_points, cfg.domain_start, cfg.domain_length, cfg.t_final)?;
    let u = coeffs.evaluate_many(cfg.t_final, grid.x())?;
    write_file(&dir, "exact.csv", |w| {
        writeln!(w, "t,x,u")?;
        for (x, u) in grid.x().iter().zip(&u) {
            writeln!(w, "{},{x},{u}", cfg.t_final)?;
        }
        Ok(())
    })
}

fn cmd_certify(opts: &Opts) -> CliResult<()> {
    let cfg = opts.config()?;
    let dir = opts.out_dir()?;
    const SAMPLES: usize = 1000;
    let eps = opts.eps3.unwrap_or(0.5);
    let relations: Vec<(&str, Box<dyn DiscreteRelation>)> = vec![
        ("invariant", Box::new(InvariantScheme { nu: cfg.nu })),
        ("ftcs", Box::new(FixedGridFtcs { nu: cfg.nu })),
        ("stationary", Box::new(StationaryGrid)),
        ("constant-velocity", Box::new(ConstantVelocityGrid)),
        ("lagrangian", Box::new(LagrangianGrid)),
    ];
    let mut rows = Vec::new();
    for (name, relation) in &relations {
        for generator in Generator::PERIODIC_SUBGROUP {
            let g = GroupElement::new(generator, eps).with_c_extension();
            // scaling maps solutions to solutions only up to a factor
            let on_solutions = generator == Generator::Scaling;
            let r = certify(relation.as_ref(), &g, opts.seed, SAMPLES, on_solutions)?;
            rows.push((name.to_string(), generator, r));
        }
    }
    write_file(&dir, "certificates.csv", |w| {
        writeln!(w, "relation,generator,epsilon,samples,max_defect,max_relative")?;
        for (name, generator, r) in &rows {
            writeln!(w, "{name},{generator:?},{eps},{},{},{}", r.samples, r.max_defect, r.max_relative)?;
        }
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(o) => cmd_run(o),
        Command::Convergence(o) => cmd_convergence(o),
        Command::Frames(o) => cmd_frames(o),
        Command::Spacing(o) => cmd_spacing(o),
        Command::Exact(o) => cmd_exact(o),
        Command::Certify(o) => cmd_certify(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Scheme(e)) => {
            eprintln!("error,{},{}", e.code(), e);
            ExitCode::from(2)
        }
        Err(CliError::Io(path, e)) => {
            eprintln!("error,io,{}: {e}", path.display());
            ExitCode::from(3)
        }
    }
}
