//! Command-line front end: instance generation, solving, condition
//! checking, and the two experiment studies.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use shapefit::conditions::{
    check_highd_conditions_with_grid, check_threed_conditions_with_grid,
    DEFAULT_WELL_DIST_GRID,
};
use shapefit::error::Error;
use shapefit::geometry::relative_error;
use shapefit::graph::Graph;
use shapefit::io;
use shapefit::rng::RNG_ALGORITHM_ID;
use shapefit::solver::{solve_shapefit, LinearSolve, SolverConfig};
use shapefit::synth::{corrupt_observations, sample_gaussian_locations, CorruptionConfig};

use shapefit_cli::experiment::{
    run_noise_sweep, run_phase_grid, ExperimentConfig, ExperimentMode,
};

const USAGE: &str = "\
shapefit — location recovery from pairwise direction observations

USAGE:
  shapefit generate --n N [--d D] [--p P] [--q Q] [--sigma S] [--seed SEED] --out FILE
  shapefit solve --input FILE [--out FILE] [--rho F] [--tol-primal F] [--tol-dual F]
                 [--max-iters N] [--linear-solve auto|direct|cg] [--cg-tol F] [--no-adapt-rho]
  shapefit check --input FILE --theorem highd|3d --p P [--beta-target F] [--grid K] [--out FILE]
  shapefit experiment phase-grid  [--config FILE] [--n-values LIST] [--q-values LIST]
                 [--sigma F] [--p F] [--d N] [--trials N] [--seed N] [--out DIR] [--jobs N]
  shapefit experiment noise-sweep [--config FILE] [--sigma-values LIST] [--n N] [--q F]
                 [--p F] [--d N] [--trials N] [--seed N] [--out DIR] [--jobs N]

Exit codes: 0 success, 2 usage or validation error, 3 infeasible input, 4 I/O error.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                Error::InfeasibleInput(_) => 3,
                Error::Io(_) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

struct Flags {
    values: HashMap<String, String>,
    switches: Vec<String>,
}

impl Flags {
    fn parse(args: &[String], switch_names: &[&str]) -> Result<Flags, Error> {
        let mut values = HashMap::new();
        let mut switches = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            let name = arg
                .strip_prefix("--")
                .ok_or_else(|| Error::InvalidInput(format!("unexpected argument {arg:?}")))?;
            if switch_names.contains(&name) {
                switches.push(name.to_string());
                continue;
            }
            let value = it
                .next()
                .ok_or_else(|| Error::InvalidInput(format!("flag --{name} needs a value")))?;
            if values.insert(name.to_string(), value.clone()).is_some() {
                return Err(Error::InvalidInput(format!("flag --{name} given twice")));
            }
        }
        Ok(Flags { values, switches })
    }

    fn has_switch(&self, name: &str) -> bool {
        self.switches.iter().any(|s| s == name)
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(|s| s.as_str())
    }

    fn required(&self, name: &str) -> Result<&str, Error> {
        self.get(name)
            .ok_or_else(|| Error::InvalidInput(format!("missing required flag --{name}")))
    }

    fn parse_num<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, Error> {
        match self.get(name) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::InvalidInput(format!("flag --{name}: bad value {s:?}"))),
        }
    }

    fn num_or<T: std::str::FromStr + Copy>(&self, name: &str, default: T) -> Result<T, Error> {
        Ok(self.parse_num(name)?.unwrap_or(default))
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidInput(format!("bad {what} entry {tok:?}")))
        })
        .collect()
}

fn dispatch(args: &[String]) -> Result<(), Error> {
    let Some(cmd) = args.first() else {
        eprint!("{USAGE}");
        return Err(Error::InvalidInput("no subcommand".into()));
    };
    match cmd.as_str() {
        "generate" => cmd_generate(&args[1..]),
        "solve" => cmd_solve(&args[1..]),
        "check" => cmd_check(&args[1..]),
        "experiment" => cmd_experiment(&args[1..]),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            Ok(())
        }
        other => {
            eprint!("{USAGE}");
            Err(Error::InvalidInput(format!("unknown subcommand {other:?}")))
        }
    }
}

fn cmd_generate(args: &[String]) -> Result<(), Error> {
    let flags = Flags::parse(args, &[])?;
    let n: usize = flags
        .required("n")?
        .parse()
        .map_err(|_| Error::InvalidInput("flag --n: not an integer".into()))?;
    let d: usize = flags.num_or("d", 3)?;
    let p: f64 = flags.num_or("p", 0.5)?;
    let q: f64 = flags.num_or("q", 0.0)?;
    let sigma: f64 = flags.num_or("sigma", 0.0)?;
    let seed: u64 = flags.num_or("seed", 1)?;
    let out = PathBuf::from(flags.required("out")?);

    let t0 = sample_gaussian_locations(n, d, shapefit::rng::mix_seed(&[seed, 1]))?;
    let g = shapefit::graph::sample_erdos_renyi(n, p, shapefit::rng::mix_seed(&[seed, 2]))?;
    let obs = corrupt_observations(
        &t0,
        &g,
        &CorruptionConfig {
            q,
            sigma,
            seed: shapefit::rng::mix_seed(&[seed, 3]),
        },
    )?;
    io::write_instance(&out, Some(&t0), &obs)?;
    let bad = obs.bad_edges().map(|b| b.len()).unwrap_or(0);
    println!(
        "generated n={n} d={d} edges={} bad={bad} seed={seed} rng={RNG_ALGORITHM_ID} -> {}",
        obs.len(),
        out.display()
    );
    Ok(())
}

fn solver_config_from_flags(flags: &Flags) -> Result<SolverConfig, Error> {
    let mut cfg = SolverConfig::default();
    cfg.rho = flags.num_or("rho", cfg.rho)?;
    cfg.tol_primal = flags.num_or("tol-primal", cfg.tol_primal)?;
    cfg.tol_dual = flags.num_or("tol-dual", cfg.tol_dual)?;
    cfg.max_iters = flags.num_or("max-iters", cfg.max_iters)?;
    if flags.has_switch("no-adapt-rho") {
        cfg.adapt_rho = false;
    }
    if let Some(s) = flags.get("linear-solve") {
        cfg.linear_solve = match s {
            "auto" => LinearSolve::Auto,
            "direct" | "direct-factorization" => LinearSolve::DirectFactorization,
            "cg" | "conjugate-gradient" => LinearSolve::ConjugateGradient,
            other => {
                return Err(Error::InvalidInput(format!(
                    "flag --linear-solve: unknown method {other:?}"
                )))
            }
        };
    }
    cfg.cg_tol = flags.num_or("cg-tol", cfg.cg_tol)?;
    Ok(cfg)
}

fn cmd_solve(args: &[String]) -> Result<(), Error> {
    let flags = Flags::parse(args, &["no-adapt-rho"])?;
    let input = PathBuf::from(flags.required("input")?);
    let cfg = solver_config_from_flags(&flags)?;
    let instance = io::read_instance(&input)?;

    let result = solve_shapefit(&instance.observations, &cfg)?;
    let json = serde_json::to_string_pretty(&result)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;

    println!(
        "status={:?} objective={:.6e} iterations={}",
        result.status, result.objective, result.iterations
    );
    if let Some(t0) = &instance.locations {
        let err = relative_error(&result.locations, t0)?;
        println!("relative_error={err:.6e}");
    }

    match flags.get("out") {
        Some(out) => {
            let out = PathBuf::from(out);
            std::fs::write(&out, json + "\n")?;
            // Companion location block in the interchange format.
            let loc_path = companion_path(&out, "locations.txt");
            let empty = shapefit::types::ObservationSet::new(
                result.locations.n(),
                result.locations.dim(),
                vec![],
                None,
            )?;
            io::write_instance(&loc_path, Some(&result.locations), &empty)?;
            println!("wrote {} and {}", out.display(), loc_path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn cmd_check(args: &[String]) -> Result<(), Error> {
    let flags = Flags::parse(args, &[])?;
    let input = PathBuf::from(flags.required("input")?);
    let theorem = flags.required("theorem")?.to_string();
    let p: f64 = flags
        .required("p")?
        .parse()
        .map_err(|_| Error::InvalidInput("flag --p: bad value".into()))?;
    let grid: usize = flags.num_or("grid", DEFAULT_WELL_DIST_GRID)?;

    let instance = io::read_instance(&input)?;
    let t0 = instance.locations.as_ref().ok_or_else(|| {
        Error::InvalidInput("condition checks need ground-truth locations in the instance".into())
    })?;
    if instance.observations.labels().is_none() {
        return Err(Error::InvalidInput(
            "condition checks need good/bad labels in the instance".into(),
        ));
    }
    let edges: Vec<(usize, usize)> = instance.observations.iter().map(|o| (o.i, o.j)).collect();
    let g = Graph::new(instance.observations.n(), edges)?;
    let e_b = instance.observations.bad_edges().unwrap_or_default();

    let report = match theorem.as_str() {
        "highd" => check_highd_conditions_with_grid(t0, &g, &e_b, p, grid)?,
        "3d" => {
            let beta_target: f64 = flags.num_or("beta-target", 0.25)?;
            check_threed_conditions_with_grid(t0, &g, &e_b, p, beta_target, grid)?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "flag --theorem: expected highd or 3d, got {other:?}"
            )))
        }
    };

    println!("{report}");
    if let Some(out) = flags.get("out") {
        let out = PathBuf::from(out);
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
        std::fs::write(&out, json + "\n")?;
        let txt_path = companion_path(&out, "txt");
        std::fs::write(&txt_path, format!("{report}\n"))?;
        println!("wrote {} and {}", out.display(), txt_path.display());
    }
    Ok(())
}

fn cmd_experiment(args: &[String]) -> Result<(), Error> {
    let Some(mode_arg) = args.first() else {
        return Err(Error::InvalidInput(
            "experiment needs a mode: phase-grid or noise-sweep".into(),
        ));
    };
    let mode = match mode_arg.as_str() {
        "phase-grid" => ExperimentMode::PhaseGrid,
        "noise-sweep" => ExperimentMode::NoiseSweep,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown experiment mode {other:?}"
            )))
        }
    };
    let flags = Flags::parse(&args[1..], &[])?;

    let mut cfg = match flags.get("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            // Accept either a bare config or the resolved wrapper emitted in
            // config.json.
            match serde_json::from_str::<ExperimentConfig>(&text) {
                Ok(c) => c,
                Err(_) => serde_json::from_str::<
                    shapefit_cli::experiment::ResolvedExperiment,
                >(&text)
                .map(|r| r.config)
                .map_err(|e| Error::InvalidInput(format!("bad config file: {e}")))?,
            }
        }
        None => match mode {
            ExperimentMode::PhaseGrid => ExperimentConfig::default(),
            ExperimentMode::NoiseSweep => ExperimentConfig::noise_sweep_default(),
        },
    };
    cfg.mode = mode;

    if let Some(s) = flags.get("n-values") {
        cfg.n_values = parse_list(s, "n")?;
    }
    if let Some(s) = flags.get("q-values") {
        cfg.q_values = parse_list(s, "q")?;
    }
    if let Some(s) = flags.get("sigma-values") {
        cfg.sigma_values = parse_list(s, "sigma")?;
    }
    if let Some(n) = flags.parse_num::<usize>("n")? {
        cfg.n_values = vec![n];
    }
    if let Some(q) = flags.parse_num::<f64>("q")? {
        cfg.q_values = vec![q];
    }
    cfg.sigma = flags.num_or("sigma", cfg.sigma)?;
    cfg.p = flags.num_or("p", cfg.p)?;
    cfg.d = flags.num_or("d", cfg.d)?;
    cfg.trials = flags.num_or("trials", cfg.trials)?;
    cfg.base_seed = flags.num_or("seed", cfg.base_seed)?;
    if let Some(out) = flags.get("out") {
        cfg.out_dir = PathBuf::from(out);
    }
    cfg.solver.rho = flags.parse_num("rho")?.or(cfg.solver.rho);
    cfg.solver.tol_primal = flags.parse_num("tol-primal")?.or(cfg.solver.tol_primal);
    cfg.solver.tol_dual = flags.parse_num("tol-dual")?.or(cfg.solver.tol_dual);
    cfg.solver.max_iters = flags.parse_num("max-iters")?.or(cfg.solver.max_iters);

    let jobs: usize = match flags.parse_num::<usize>("jobs")? {
        Some(j) => j,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };

    let out = match mode {
        ExperimentMode::PhaseGrid => run_phase_grid(&cfg, jobs)?,
        ExperimentMode::NoiseSweep => run_noise_sweep(&cfg, jobs)?,
    };
    let solved = out
        .rows
        .iter()
        .filter(|r| r.relative_error.is_some())
        .count();
    println!(
        "{} cells solved={} failed={} -> {}, {}, {}",
        out.rows.len(),
        solved,
        out.rows.len() - solved,
        out.csv_path.display(),
        out.svg_path.display(),
        out.config_path.display()
    );
    Ok(())
}
