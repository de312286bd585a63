//! Run manifests, run orchestration and output files.
//!
//! A manifest is plain UTF-8 text with one `key = value` per line and `#`
//! comments:
//!
//! ```text
//! testcase = tc2
//! n = 5
//! order = 3
//! flux = dissipative
//! days = 5
//! ```
//!
//! Recognised keys: `testcase` (required), `n`, `order`, `flux`
//! (`conserving` | `dissipative`), `cfl` or `dt` (s), `days` or `t_end` (s),
//! `out`, `snapshot_every` and `budget_every` (simulated seconds), `linear`,
//! `perturbed`, `seed`. Later layers (command-line flags) override earlier
//! ones (the file); setting `dt` in a later layer drops an earlier `cfl` and
//! vice versa, likewise for `days` and `t_end`.
//!
//! A run directory receives `manifest.txt` (the resolved manifest, itself a
//! valid config file), `budgets.csv`, `snapshot_NNNN.txt` files and
//! `summary.txt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::diagnostics::{budgets, l2_error, least_squares_order, convergence_order, BudgetRecord, CSV_HEADER};
use crate::error::{Error, Result};
use crate::geometry::{build_mesh, Mesh};
use crate::operators::integral;
use crate::swe::{EquationMode, FluxConfig, PhysConfig, ShallowWater, State};
use crate::testcases::{self, lon_lat, Setup, TestCase, DAY};
use crate::timestepping::{integrate, Cadence, Observer, TimeControls};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxMode {
    Conserving,
    Dissipative,
}

impl FluxMode {
    pub fn config(self) -> FluxConfig {
        match self {
            FluxMode::Conserving => FluxConfig::conserving(),
            FluxMode::Dissipative => FluxConfig::dissipative(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FluxMode::Conserving => "conserving",
            FluxMode::Dissipative => "dissipative",
        }
    }
}

impl FromStr for FluxMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conserving" | "centered" | "centred" => Ok(FluxMode::Conserving),
            "dissipative" | "dissipating" | "rusanov" => Ok(FluxMode::Dissipative),
            other => Err(Error::Config(format!("unknown flux `{other}` (expected conserving or dissipative)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    Cfl(f64),
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub testcase: TestCase,
    pub n: usize,
    pub order: usize,
    pub flux: FluxMode,
    pub step: StepControl,
    /// Simulated duration (s).
    pub t_end: f64,
    pub out: PathBuf,
    pub snapshot_every: Option<f64>,
    pub budget_every: f64,
    pub linear: bool,
    pub perturbed: bool,
    pub seed: u64,
}

const KEYS: [&str; 14] = [
    "testcase",
    "n",
    "order",
    "flux",
    "cfl",
    "dt",
    "days",
    "t_end",
    "out",
    "snapshot_every",
    "budget_every",
    "linear",
    "perturbed",
    "seed",
];

/// Mutually exclusive key pairs; a later layer setting one clears the other.
const EXCLUSIVE: [(&str, &str); 2] = [("cfl", "dt"), ("days", "t_end")];

/// Parses `key = value` text into a map, rejecting unknown keys and
/// contradictory pairs within the same text.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1)))?;
        let key = k.trim().replace('-', "_");
        insert_checked(&mut map, &key, v.trim())?;
    }
    check_exclusive(&map)?;
    Ok(map)
}

fn insert_checked(map: &mut BTreeMap<String, String>, key: &str, value: &str) -> Result<()> {
    if !KEYS.contains(&key) {
        return Err(Error::Config(format!("unknown key `{key}`")));
    }
    if map.insert(key.to_string(), value.to_string()).is_some() {
        return Err(Error::Config(format!("key `{key}` given twice")));
    }
    Ok(())
}

fn check_exclusive(map: &BTreeMap<String, String>) -> Result<()> {
    for (a, b) in EXCLUSIVE {
        if map.contains_key(a) && map.contains_key(b) {
            return Err(Error::Config(format!("`{a}` and `{b}` are mutually exclusive")));
        }
    }
    Ok(())
}

/// Builds a manifest from optional config-file text and flag overrides.
pub fn parse_config(file: Option<&str>, overrides: &[(String, String)]) -> Result<RunManifest> {
    let mut map = match file {
        Some(text) => parse_key_values(text)?,
        None => BTreeMap::new(),
    };
    let mut layer = BTreeMap::new();
    for (k, v) in overrides {
        insert_checked(&mut layer, &k.replace('-', "_"), v)?;
    }
    check_exclusive(&layer)?;
    for (k, v) in layer {
        for (a, b) in EXCLUSIVE {
            if k == a {
                map.remove(b);
            } else if k == b {
                map.remove(a);
            }
        }
        map.insert(k, v);
    }
    manifest_from_map(&map)
}

fn parse_value<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
        })
        .transpose()
}

fn parse_bool(map: &BTreeMap<String, String>, key: &str) -> Result<Option<bool>> {
    map.get(key)
        .map(|v| match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" | "on" => Ok(true),
            "false" | "no" | "0" | "off" => Ok(false),
            _ => Err(Error::Config(format!("invalid boolean `{v}` for `{key}`"))),
        })
        .transpose()
}

fn manifest_from_map(map: &BTreeMap<String, String>) -> Result<RunManifest> {
    check_exclusive(map)?;
    let testcase: TestCase = map
        .get("testcase")
        .ok_or_else(|| Error::Config("missing required key `testcase`".into()))?
        .parse()?;
    let (dn, dm) = testcase.default_resolution();
    let n = parse_value(map, "n")?.unwrap_or(dn);
    let order = parse_value(map, "order")?.unwrap_or(dm);
    let flux = parse_value(map, "flux")?.unwrap_or(FluxMode::Dissipative);
    let step = match (parse_value::<f64>(map, "cfl")?, parse_value::<f64>(map, "dt")?) {
        (_, Some(dt)) => StepControl::Fixed(dt),
        (Some(c), None) => StepControl::Cfl(c),
        (None, None) => StepControl::Cfl(0.8),
    };
    let t_end = match (parse_value::<f64>(map, "days")?, parse_value::<f64>(map, "t_end")?) {
        (Some(d), _) => d * DAY,
        (None, Some(t)) => t,
        (None, None) => testcase.default_t_end(),
    };
    let out = map.get("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(format!("run-{}", testcase.name())));
    let snapshot_every = parse_value(map, "snapshot_every")?;
    let budget_every = parse_value(map, "budget_every")?.unwrap_or(t_end / 100.0);
    let manifest = RunManifest {
        testcase,
        n,
        order,
        flux,
        step,
        t_end,
        out,
        snapshot_every,
        budget_every,
        linear: parse_bool(map, "linear")?.unwrap_or(testcase.is_linear()),
        perturbed: parse_bool(map, "perturbed")?.unwrap_or(true),
        seed: parse_value(map, "seed")?.unwrap_or(0),
    };
    manifest.validate()?;
    Ok(manifest)
}

impl RunManifest {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.order < 1 {
            return Err(Error::Config(format!("n and order must be at least 1 (got n = {}, order = {})", self.n, self.order)));
        }
        match self.step {
            StepControl::Cfl(c) if !(c > 0.0 && c.is_finite()) => return Err(Error::Config(format!("cfl must be positive, got {c}"))),
            StepControl::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => return Err(Error::Config(format!("dt must be positive, got {dt}"))),
            _ => {}
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("run length must be non-negative, got {} s", self.t_end)));
        }
        if let Some(s) = self.snapshot_every {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("snapshot_every must be positive, got {s}")));
            }
        }
        if self.t_end > 0.0 && !(self.budget_every > 0.0 && self.budget_every.is_finite()) {
            return Err(Error::Config(format!("budget_every must be positive, got {}", self.budget_every)));
        }
        Ok(())
    }

    /// Canonical `key = value` text; parsing it yields the same manifest.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("write to string");
        kv("testcase", self.testcase.name().into());
        kv("n", self.n.to_string());
        kv("order", self.order.to_string());
        kv("flux", self.flux.name().into());
        match self.step {
            StepControl::Cfl(c) => kv("cfl", format!("{c:?}")),
            StepControl::Fixed(dt) => kv("dt", format!("{dt:?}")),
        }
        kv("t_end", format!("{:?}", self.t_end));
        kv("out", self.out.display().to_string());
        if let Some(se) = self.snapshot_every {
            kv("snapshot_every", format!("{se:?}"));
        }
        kv("budget_every", format!("{:?}", self.budget_every));
        kv("linear", self.linear.to_string());
        kv("perturbed", self.perturbed.to_string());
        kv("seed", self.seed.to_string());
        s
    }

    pub fn time_controls(&self) -> TimeControls {
        let base = match self.step {
            StepControl::Cfl(c) => TimeControls::adaptive(c, self.t_end),
            StepControl::Fixed(dt) => TimeControls::fixed(dt, self.t_end),
        };
        let cadence = if self.budget_every > 0.0 { Cadence::Time(self.budget_every) } else { Cadence::Ends };
        base.with_cadence(cadence)
    }

    pub fn mesh(&self) -> Result<Mesh> {
        build_mesh(self.n, self.order, self.testcase.radius())
    }
}

/// Switches a setup between the nonlinear and linearised equations. The
/// linearisation is about the mean depth; going back adds it again.
pub fn with_mode(setup: Setup, linear: bool, mesh: &Mesh) -> Result<Setup> {
    let Setup { mut state, mut phys } = setup;
    match (phys.mode, linear) {
        (EquationMode::Nonlinear, true) => {
            let h = integral(&state.d, mesh)? / mesh.area();
            state.d = state.d.map(|d| d - h);
            phys.mode = EquationMode::Linear { mean_depth: h };
            phys.topography = None;
        }
        (EquationMode::Linear { mean_depth }, false) => {
            state.d = state.d.map(|d| d + mean_depth);
            phys.mode = EquationMode::Nonlinear;
        }
        _ => {}
    }
    Ok(Setup { state, phys })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes one snapshot: a comment line with the time, a header, then one row
/// per node with `element i j lon lat D u v w omega`.
pub fn write_snapshot(path: &Path, t: f64, state: &State, omega: &crate::field::ScalarField, mesh: &Mesh) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let np = mesh.nodes_per_side();
    let mut body = format!("# t = {t:.16e}\nelement i j lon lat D u v w omega\n");
    for e in 0..mesh.num_elements() {
        for k in 0..mesh.nodes_per_element() {
            let (lon, lat) = lon_lat(&mesh.node(e, k).x);
            let u = state.u.get(e, k);
            writeln!(
                body,
                "{e} {} {} {lon:.16e} {lat:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                k % np,
                k / np,
                state.d.get(e, k),
                u[0],
                u[1],
                u[2],
                omega.get(e, k)
            )
            .expect("write to string");
        }
    }
    w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Streams budgets to CSV and writes snapshots at their cadence.
struct RunRecorder<'a, 'm> {
    model: &'a ShallowWater<'m>,
    dir: PathBuf,
    csv: BufWriter<File>,
    csv_path: PathBuf,
    first: Option<BudgetRecord>,
    last: Option<BudgetRecord>,
    snapshot_every: Option<f64>,
    next_snapshot: f64,
    snapshots: usize,
}

impl Observer for RunRecorder<'_, '_> {
    fn observe(&mut self, t: f64, _step: usize, state: &State) -> Result<()> {
        let rec = budgets(self.model, state, t)?;
        let rec = match &self.first {
            Some(f) => rec.relative_to(f),
            None => {
                self.first = Some(rec);
                rec
            }
        };
        writeln!(self.csv, "{}", rec.csv_row())
            .and_then(|_| self.csv.flush())
            .map_err(|e| Error::io(&self.csv_path, e))?;
        self.last = Some(rec);
        if let Some(every) = self.snapshot_every {
            if t >= self.next_snapshot * (1.0 - 1e-12) {
                let omega = self.model.vorticity(state)?;
                let path = self.dir.join(format!("snapshot_{:04}.txt", self.snapshots));
                write_snapshot(&path, t, state, &omega, self.model.mesh)?;
                self.snapshots += 1;
                while self.next_snapshot <= t * (1.0 + 1e-12) {
                    self.next_snapshot += every;
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a completed run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub steps: usize,
    pub t: f64,
    pub wall_clock: f64,
    pub first: BudgetRecord,
    pub last: BudgetRecord,
    pub snapshots: usize,
    pub final_state: State,
}

/// Runs `manifest`, writing all artifacts into its output directory. A
/// flagged-state abort still leaves the manifest, partial budgets and a
/// summary describing the failure.
pub fn run(manifest: &RunManifest) -> Result<RunSummary> {
    manifest.validate()?;
    let dir = manifest.out.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_file(&dir.join("manifest.txt"), &manifest.to_text())?;

    let start = Instant::now();
    let mesh = manifest.mesh()?;
    let setup = with_mode(testcases::initialize(manifest.testcase, &mesh, manifest.perturbed)?, manifest.linear, &mesh)?;
    let model = ShallowWater::new(&mesh, setup.phys, manifest.flux.config())?;

    let csv_path = dir.join("budgets.csv");
    let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut csv = BufWriter::new(file);
    writeln!(csv, "{CSV_HEADER}").map_err(|e| Error::io(&csv_path, e))?;
    let mut rec = RunRecorder {
        model: &model,
        dir: dir.clone(),
        csv,
        csv_path,
        first: None,
        last: None,
        snapshot_every: manifest.snapshot_every,
        next_snapshot: 0.0,
        snapshots: 0,
    };
    let outcome = integrate(&model, setup.state, &manifest.time_controls(), &mut [&mut rec]);
    let wall = start.elapsed().as_secs_f64();

    let mut summary = String::new();
    writeln!(summary, "testcase = {}", manifest.testcase).ok();
    writeln!(summary, "mesh = 6x{}x{}, order {}", manifest.n, manifest.n, manifest.order).ok();
    writeln!(summary, "flux = {}", manifest.flux.name()).ok();
    writeln!(summary, "wall_clock_s = {wall:.3}").ok();
    match outcome {
        Ok(out) => {
            let (first, last) = (rec.first.expect("initial observation"), rec.last.expect("final observation"));
            writeln!(summary, "status = ok").ok();
            writeln!(summary, "steps = {}", out.steps).ok();
            writeln!(summary, "t_final = {:.16e}", out.t).ok();
            writeln!(summary, "mass_drift = {:.6e}", last.mass_drift).ok();
            writeln!(summary, "vorticity_drift = {:.6e}", last.vorticity_drift).ok();
            writeln!(summary, "energy_drift = {:.6e}", last.energy_drift).ok();
            writeln!(summary, "enstrophy_drift = {:.6e}", last.enstrophy_drift).ok();
            writeln!(summary, "snapshots = {}", rec.snapshots).ok();
            write_file(&dir.join("summary.txt"), &summary)?;
            Ok(RunSummary {
                steps: out.steps,
                t: out.t,
                wall_clock: wall,
                first,
                last,
                snapshots: rec.snapshots,
                final_state: out.state,
            })
        }
        Err(e) => {
            writeln!(summary, "status = aborted").ok();
            writeln!(summary, "error = {e}").ok();
            write_file(&dir.join("summary.txt"), &summary)?;
            Err(e)
        }
    }
}

/// One row of a resolution sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub err_d: f64,
    pub err_u: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders_d(&self) -> Vec<f64> {
        convergence_order(&self.rows.iter().map(|r| (r.h, r.err_d)).collect::<Vec<_>>())
    }

    pub fn orders_u(&self) -> Vec<f64> {
        convergence_order(&self.rows.iter().map(|r| (r.h, r.err_u)).collect::<Vec<_>>())
    }

    /// Least-squares orders `(D, u)`, when at least two rows exist.
    pub fn fitted_orders(&self) -> Option<(f64, f64)> {
        (self.rows.len() >= 2).then(|| {
            (
                least_squares_order(&self.rows.iter().map(|r| (r.h, r.err_d)).collect::<Vec<_>>()),
                least_squares_order(&self.rows.iter().map(|r| (r.h, r.err_u)).collect::<Vec<_>>()),
            )
        })
    }

    /// CSV with interval orders; the first row has empty order cells, and a
    /// single-row table has no order columns at all.
    pub fn to_csv(&self) -> String {
        let with_orders = self.rows.len() >= 2;
        let mut s = String::from(if with_orders { "n,h,err_D,err_u,order_D,order_u\n" } else { "n,h,err_D,err_u\n" });
        let (od, ou) = (self.orders_d(), self.orders_u());
        for (i, r) in self.rows.iter().enumerate() {
            write!(s, "{},{:.16e},{:.16e},{:.16e}", r.n, r.h, r.err_d, r.err_u).ok();
            if with_orders {
                if i == 0 {
                    s.push_str(",,");
                } else {
                    write!(s, ",{:.4},{:.4}", od[i - 1], ou[i - 1]).ok();
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let with_orders = self.rows.len() >= 2;
        if with_orders {
            writeln!(s, "{:>5} {:>12} {:>12} {:>8} {:>8}", "n", "err_D", "err_u", "ord_D", "ord_u").ok();
        } else {
            writeln!(s, "{:>5} {:>12} {:>12}", "n", "err_D", "err_u").ok();
        }
        let (od, ou) = (self.orders_d(), self.orders_u());
        for (i, r) in self.rows.iter().enumerate() {
            write!(s, "{:>5} {:>12.4e} {:>12.4e}", r.n, r.err_d, r.err_u).ok();
            if with_orders && i > 0 {
                write!(s, " {:>8.3} {:>8.3}", od[i - 1], ou[i - 1]).ok();
            }
            s.push('\n');
        }
        if let Some((d, u)) = self.fitted_orders() {
            writeln!(s, "least-squares order: D {d:.3}, u {u:.3}").ok();
        }
        s
    }
}

/// Runs `base` at each resolution (into `out/n{n}`) and tabulates the
/// normalised L² error against the reference solution. The table is written
/// to `out/convergence.csv` and `out/convergence.txt` after every sub-run,
/// so a failure leaves the partial table behind.
pub fn convergence_harness(base: &RunManifest, resolutions: &[usize]) -> Result<ConvergenceTable> {
    let mut table = ConvergenceTable::default();
    fs::create_dir_all(&base.out).map_err(|e| Error::io(&base.out, e))?;
    for &n in resolutions {
        let m = RunManifest {
            n,
            out: base.out.join(format!("n{n}")),
            ..base.clone()
        };
        let summary = run(&m)?;
        let mesh = m.mesh()?;
        let reference = testcases::reference_solution(m.testcase, &mesh, summary.t)?
            .ok_or_else(|| Error::Config(format!("test case {} has no reference solution", m.testcase)))?;
        let reference = with_mode(
            Setup {
                state: reference,
                phys: PhysConfig::nonlinear(1.0, crate::field::ScalarField::zeros(&mesh)),
            },
            false,
            &mesh,
        )?
        .state;
        let reference = if m.linear && !m.testcase.is_linear() {
            let h = integral(&reference.d, &mesh)? / mesh.area();
            State::new(reference.u.clone(), reference.d.map(|d| d - h))
        } else {
            reference
        };
        let err = l2_error(&summary.final_state, &reference, &mesh)?;
        table.rows.push(ConvergenceRow {
            n,
            h: 1.0 / n as f64,
            err_d: err.d,
            err_u: err.u,
        });
        write_file(&base.out.join("convergence.csv"), &table.to_csv())?;
        write_file(&base.out.join("convergence.txt"), &table.to_text())?;
    }
    Ok(table)
}

/// One row of a time-step sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSweepRow {
    pub dt: f64,
    pub energy_error: f64,
}

/// Runs `base` with each fixed step (into `out/dt{dt}`) and tabulates the
/// final relative energy error, written to `out/dt_sweep.csv`.
pub fn step_sweep(base: &RunManifest, steps: &[f64]) -> Result<Vec<StepSweepRow>> {
    let mut rows = Vec::new();
    fs::create_dir_all(&base.out).map_err(|e| Error::io(&base.out, e))?;
    for &dt in steps {
        let m = RunManifest {
            step: StepControl::Fixed(dt),
            out: base.out.join(format!("dt{dt}")),
            ..base.clone()
        };
        let summary = run(&m)?;
        rows.push(StepSweepRow {
            dt,
            energy_error: summary.last.energy_drift.abs(),
        });
        let series: Vec<(f64, f64)> = rows.iter().map(|r| (r.dt, r.energy_error)).collect();
        let orders = convergence_order(&series);
        let mut csv = String::from("dt,energy_error,order\n");
        for (i, r) in rows.iter().enumerate() {
            let o = if i == 0 { String::new() } else { format!("{:.4}", orders[i - 1]) };
            writeln!(csv, "{:?},{:.16e},{o}", r.dt, r.energy_error).ok();
        }
        write_file(&base.out.join("dt_sweep.csv"), &csv)?;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn minimal_manifest() {
        let m = parse_config(Some("testcase = tc2\nn = 5\norder = 3\nflux = dissipative\ndays = 5\n"), &[]).unwrap();
        assert_eq!(m.testcase, TestCase::Williamson2);
        assert_eq!((m.n, m.order), (5, 3));
        assert_eq!(m.flux, FluxMode::Dissipative);
        assert_eq!(m.t_end, 5.0 * DAY);
        assert_eq!(m.step, StepControl::Cfl(0.8));
    }

    #[test]
    fn conserving_means_zero_penalties() {
        let m = parse_config(Some("testcase = galewsky\nflux = conserving"), &[]).unwrap();
        assert_eq!(m.flux.config(), FluxConfig::conserving());
        assert_eq!(m.flux.config().beta, 0.0);
    }

    #[test]
    fn rejections() {
        assert!(parse_config(Some("testcase = tc2\ncfl = 0.5\ndt = 10"), &[]).is_err());
        assert!(parse_config(Some("testcase = tc2\ncolour = red"), &[]).is_err());
        assert!(parse_config(Some("n = 4"), &[]).is_err());
        assert!(parse_config(Some("testcase = tc2\nn = four"), &[]).is_err());
        assert!(parse_config(Some("testcase = tc2\nn = 3\nn = 4"), &[]).is_err());
        assert!(parse_config(None, &kv(&[("testcase", "tc2"), ("cfl", "0.3"), ("dt", "1")])).is_err());
        assert!(parse_config(Some("testcase = tc7"), &[]).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = "testcase = tc2 # comment\ncfl = 0.5\ndays = 2\n";
        let m = parse_config(Some(file), &kv(&[("dt", "30"), ("n", "7"), ("t-end", "100")])).unwrap();
        assert_eq!(m.step, StepControl::Fixed(30.0));
        assert_eq!(m.n, 7);
        assert_eq!(m.t_end, 100.0);
    }

    #[test]
    fn manifest_text_round_trips() {
        let m = parse_config(
            Some("testcase = galewsky\nn = 4\ndt = 50\ndays = 0.5\nsnapshot_every = 3600\nperturbed = false\nseed = 9\nout = /tmp/x"),
            &[],
        )
        .unwrap();
        let again = parse_config(Some(&m.to_text()), &[]).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn table_formats() {
        let mut t = ConvergenceTable::default();
        t.rows.push(ConvergenceRow { n: 2, h: 0.5, err_d: 1.0, err_u: 1.0 });
        assert!(!t.to_csv().contains("order"));
        assert!(t.fitted_orders().is_none());
        t.rows.push(ConvergenceRow { n: 4, h: 0.25, err_d: 0.125, err_u: 0.125 });
        assert!((t.orders_d()[0] - 3.0).abs() < 1e-12);
        assert!(t.to_csv().lines().nth(2).unwrap().ends_with("3.0000,3.0000"));
    }
}
