use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dgswe::driver::{convergence_harness, parse_config, run, step_sweep};
use dgswe::{Error, Result};

/// Shallow water equations on the cubed sphere with a discontinuous Galerkin
/// spectral element method.
#[derive(Parser, Debug)]
#[command(name = "dgswe", version)]
struct Cli {
    /// Config file with `key = value` lines; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// linear-geostrophic, tc2, tc5, tc6 or galewsky.
    #[arg(long)]
    testcase: Option<String>,
    /// Elements per panel edge.
    #[arg(long)]
    n: Option<usize>,
    /// Polynomial order.
    #[arg(long)]
    order: Option<usize>,
    /// conserving or dissipative.
    #[arg(long)]
    flux: Option<String>,
    #[arg(long, conflicts_with = "dt")]
    cfl: Option<f64>,
    /// Fixed time step (s).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, conflicts_with = "t_end")]
    days: Option<f64>,
    /// Run length (s).
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot interval (simulated s).
    #[arg(long)]
    snapshot_every: Option<f64>,
    /// Budget interval (simulated s).
    #[arg(long)]
    budget_every: Option<f64>,
    /// Linearise about the mean depth (`--linear false` forces nonlinear).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    linear: Option<bool>,
    /// Add the Galewsky perturbation (`--perturbed false` to omit it).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    perturbed: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep instead of a single run: `n=3,5,10` or `dt=50,40,30`.
    #[arg(long)]
    sweep: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut put = |k: &str, val: Option<String>| {
            if let Some(val) = val {
                v.push((k.to_string(), val));
            }
        };
        put("testcase", self.testcase.clone());
        put("n", self.n.map(|x| x.to_string()));
        put("order", self.order.map(|x| x.to_string()));
        put("flux", self.flux.clone());
        put("cfl", self.cfl.map(|x| x.to_string()));
        put("dt", self.dt.map(|x| x.to_string()));
        put("days", self.days.map(|x| x.to_string()));
        put("t_end", self.t_end.map(|x| x.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("snapshot_every", self.snapshot_every.map(|x| x.to_string()));
        put("budget_every", self.budget_every.map(|x| x.to_string()));
        put("linear", self.linear.map(|x| x.to_string()));
        put("perturbed", self.perturbed.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        v
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Config(format!("invalid sweep value `{x}`"))))
        .collect()
}

fn execute(cli: &Cli) -> Result<()> {
    let text = match &cli.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => None,
    };
    let manifest = parse_config(text.as_deref(), &cli.overrides())?;
    match cli.sweep.as_deref().map(|s| s.split_once('=')) {
        None => {
            let s = run(&manifest)?;
            println!(
                "{}: {} steps to t = {:.6e} s in {:.2} s; energy drift {:.3e}, mass drift {:.3e}",
                manifest.testcase, s.steps, s.t, s.wall_clock, s.last.energy_drift, s.last.mass_drift
            );
            println!("output in {}", manifest.out.display());
        }
        Some(Some(("n", list))) => {
            let table = convergence_harness(&manifest, &parse_list(list)?)?;
            print!("{}", table.to_text());
        }
        Some(Some(("dt", list))) => {
            for row in step_sweep(&manifest, &parse_list(list)?)? {
                println!("dt = {:>8} s  energy error {:.4e}", row.dt, row.energy_error);
            }
        }
        Some(_) => return Err(Error::Config("--sweep expects `n=...` or `dt=...`".into())),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
