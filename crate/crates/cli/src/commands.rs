use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use spinorbit::benchdsl::load;
use spinorbit::chsh::{combine_s, estimate_e, nchv_max_s, sample_counts, ChshSettings, RngSeed, Simulation, SweepRow};
use spinorbit::elements::{orientation_field, symmetry_angle, symmetry_order, QPlateSpec};
use spinorbit::experiment::Experiment;
use spinorbit::parallel::Execution;

use crate::args::{ChshArgs, Command, FieldArgs, Mode, NchvArgs, PlateArgs, RunArgs, SweepArgs};
use crate::error::CliError;
use crate::manifest::{flag, num, RunManifest};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Chsh(a) => chsh(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Nchv(a) => nchv(&a),
        Command::Field(a) => field(&a),
        Command::Run(a) => run(&a),
    }
}

/// Argument vector that replays a run independent of the environment.
struct Replay(Vec<String>);

impl Replay {
    fn new(command: &str) -> Self {
        Replay(vec!["spinorbit".into(), command.into()])
    }

    fn flag(mut self, name: &str, value: impl std::fmt::Display) -> Self {
        self.0.push(flag(name, value));
        self
    }

    fn number(self, name: &str, x: f64) -> Self {
        self.flag(name, num(x))
    }

    fn switch(mut self, name: &str, on: bool) -> Self {
        if on {
            self.0.push(format!("--{name}"));
        }
        self
    }

    fn plate(self, p: &PlateArgs) -> Self {
        self.number("q", p.q)
            .number("alpha0", p.alpha0)
            .flag("scheme", p.scheme.name())
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn simulation(p: &PlateArgs, sequential: bool) -> Result<Simulation, CliError> {
    let experiment = Experiment::new(QPlateSpec::new(p.q, p.alpha0)?)?;
    Ok(Simulation::new(experiment)
        .with_scheme(p.scheme.into())
        .with_execution(execution(sequential)))
}

fn plate_json(p: &PlateArgs) -> Value {
    json!({ "q": p.q, "alpha0": p.alpha0, "scheme": p.scheme.name() })
}

/// A closed stdout (e.g. piped into `head`) is not an error.
fn print_json(value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>")(e)),
        _ => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

fn chsh(a: &ChshArgs) -> Result<(), CliError> {
    let settings = ChshSettings::new(a.chi_a, a.chi_a_prime, a.chi_b, a.chi_b_prime)?;
    let sim = simulation(&a.plate, a.sequential)?;
    let mut replay = Replay::new("chsh")
        .number("chi-a", a.chi_a)
        .number("chi-a-prime", a.chi_a_prime)
        .number("chi-b", a.chi_b)
        .number("chi-b-prime", a.chi_b_prime)
        .plate(&a.plate);
    let mut parameters = json!({ "settings": settings, "plate": plate_json(&a.plate) });

    let mut exact = [0.0; 4];
    for (slot, (x, y)) in exact.iter_mut().zip(settings.pairs()) {
        *slot = sim.correlation(x, y)?;
    }
    let s_exact = combine_s(exact);

    let report = match a.mode {
        Mode::Exact => {
            replay = replay.flag("mode", "exact");
            parameters["mode"] = json!("exact");
            let correlations: Vec<Value> = settings
                .pairs()
                .iter()
                .zip(exact)
                .map(|(&(x, y), e)| json!({ "chi_a": x, "chi_b": y, "e": e }))
                .collect();
            let manifest = RunManifest::new("chsh", parameters, replay.0, None);
            json!({ "mode": "exact", "correlations": correlations, "s": s_exact, "manifest": manifest })
        }
        Mode::Montecarlo => {
            let shots = a
                .shots
                .ok_or_else(|| CliError::Usage("montecarlo mode requires --shots".into()))?;
            let seed = a.seed.seed;
            replay = replay
                .flag("mode", "montecarlo")
                .flag("shots", shots)
                .flag("seed", seed)
                .switch("sequential", a.sequential);
            parameters["mode"] = json!("montecarlo");
            parameters["shots"] = json!(shots);
            let mc = sim.monte_carlo(&settings, shots, RngSeed::new(seed))?;
            let correlations: Vec<Value> = settings
                .pairs()
                .iter()
                .enumerate()
                .map(|(k, &(x, y))| {
                    json!({
                        "chi_a": x,
                        "chi_b": y,
                        "e": mc.correlations[k],
                        "e_exact": exact[k],
                        "counts": mc.counts[k],
                    })
                })
                .collect();
            let manifest = RunManifest::new("chsh", parameters, replay.0, Some(seed));
            json!({
                "mode": "montecarlo",
                "correlations": correlations,
                "s": mc.s_est,
                "standard_error": mc.standard_error,
                "s_exact": mc.s_exact,
                "shots_per_setting": mc.shots_per_setting,
                "manifest": manifest,
            })
        }
    };
    print_json(&report)
}

/// Exact-only CSVs omit the count and estimate columns.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    let sampled = rows.first().is_some_and(|r| r.counts.is_some());
    if sampled {
        writeln!(
            w,
            "chi_A_rad,chi_B_rad,p_pp,p_pm,p_mp,p_mm,n_pp,n_pm,n_mp,n_mm,e_exact,e_est"
        )?;
    } else {
        writeln!(w, "chi_A_rad,chi_B_rad,p_pp,p_pm,p_mp,p_mm,e_exact")?;
    }
    for r in rows {
        let [pp, pm, mp, mm] = r.probabilities.as_array();
        write!(
            w,
            "{:.16e},{:.16e},{pp:.16e},{pm:.16e},{mp:.16e},{mm:.16e},",
            r.chi_a, r.chi_b
        )?;
        match (&r.counts, r.e_estimated) {
            (Some(c), Some(e_est)) => {
                let [n_pp, n_pm, n_mp, n_mm] = c.as_array();
                writeln!(w, "{n_pp},{n_pm},{n_mp},{n_mm},{:.16e},{e_est:.16e}", r.e_exact)?;
            }
            _ => writeln!(w, "{:.16e}", r.e_exact)?,
        }
    }
    w.flush()
}

fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    let sim = simulation(&a.plate, a.sequential)?;
    let seed = a.seed.seed;
    let rows = sim.sweep(a.chi_b, &a.grid.values(), a.shots, RngSeed::new(seed))?;
    write_sweep_csv(&rows, create(&a.out)?).map_err(CliError::io(&a.out))?;

    let g = a.grid;
    let grid_spec = format!(
        "{}:{}:{}{}",
        num(g.start),
        num(g.stop),
        g.points,
        if g.closed { ":closed" } else { "" }
    );
    let replay = Replay::new("sweep")
        .number("chi-b", a.chi_b)
        .flag("grid", &grid_spec)
        .flag("shots", a.shots)
        .flag("seed", seed)
        .plate(&a.plate)
        .flag("out", a.out.display())
        .switch("sequential", a.sequential);
    let parameters = json!({
        "chi_b": a.chi_b,
        "grid": g,
        "shots": a.shots,
        "plate": plate_json(&a.plate),
        "out": a.out,
    });
    let circles: Vec<Value> = rows
        .iter()
        .filter(|r| r.circle)
        .map(|r| json!({ "row": r.index, "chi_a": r.chi_a, "chi_b": r.chi_b, "e_exact": r.e_exact, "e_est": r.e_estimated }))
        .collect();
    let manifest = RunManifest::new("sweep", parameters, replay.0, (a.shots > 0).then_some(seed))
        .with("circle_settings", Value::Array(circles));
    let manifest_path = manifest.write_beside(&a.out)?;
    print_json(&json!({ "csv": a.out, "manifest": manifest_path, "rows": rows.len() }))
}

fn nchv(a: &NchvArgs) -> Result<(), CliError> {
    let settings = ChshSettings::new(a.chi_a, a.chi_a_prime, a.chi_b, a.chi_b_prime)?;
    let bound = nchv_max_s(&settings);
    let quantum_s = Simulation::default().exact_s(&settings)?;
    let seed = a.seed.seed;
    let mut replay = Replay::new("nchv")
        .number("chi-a", a.chi_a)
        .number("chi-a-prime", a.chi_a_prime)
        .number("chi-b", a.chi_b)
        .number("chi-b-prime", a.chi_b_prime);
    let mut report = json!({
        "settings": settings,
        "classical_max": bound.max_s,
        "classical_min": bound.min_s,
        "assignment": bound.argmax,
        "enumerated": bound.enumerated,
        "quantum_s": quantum_s,
        "gap": quantum_s - bound.max_s,
    });
    let mut used_seed = None;
    if a.random > 0 {
        replay = replay.flag("random", a.random).flag("seed", seed);
        used_seed = Some(seed);
        let mut rng = RngSeed::new(seed).rng();
        let maxima: Vec<f64> = (0..a.random)
            .map(|_| nchv_max_s(&ChshSettings::random(&mut rng)).max_s)
            .collect();
        report["random"] = json!({
            "count": a.random,
            "classical_max_lowest": maxima.iter().copied().fold(f64::INFINITY, f64::min),
            "classical_max_highest": maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let parameters = json!({ "settings": settings, "random": a.random });
    report["manifest"] = json!(RunManifest::new("nchv", parameters, replay.0, used_seed));
    print_json(&report)
}

fn field(a: &FieldArgs) -> Result<(), CliError> {
    let spec = QPlateSpec::new(a.q, a.alpha0)?;
    let f = orientation_field(&spec, a.n_r, a.n_phi)?;
    let mut w = create(&a.out)?;
    f.write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(CliError::io(&a.out))?;

    let replay = Replay::new("field")
        .number("q", a.q)
        .number("alpha0", a.alpha0)
        .flag("n-r", a.n_r)
        .flag("n-phi", a.n_phi)
        .flag("out", a.out.display());
    let parameters = json!({ "q": a.q, "alpha0": a.alpha0, "n_r": a.n_r, "n_phi": a.n_phi, "out": a.out });
    let symmetry = symmetry_order(&spec);
    let manifest = RunManifest::new("field", parameters, replay.0, None)
        .with("symmetry_order", json!(symmetry))
        .with("symmetry_angle_rad", json!(symmetry_angle(&spec)));
    let manifest_path = manifest.write_beside(&a.out)?;
    print_json(&json!({
        "csv": a.out,
        "manifest": manifest_path,
        "rows": a.n_r * a.n_phi,
        "symmetry_order": symmetry,
    }))
}

fn run(a: &RunArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.bench).map_err(CliError::io(&a.bench))?;
    let path = a.bench.display();
    let bench = load(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    for w in bench.warnings() {
        eprintln!("warning: {path}: line {}: {}", w.line, w.message);
    }
    let scheme = a.scheme.map_or(bench.scheme(), Into::into);
    let p = bench.probabilities_with(a.chi_a, a.chi_b, scheme)?;

    let mut replay = Replay::new("run").number("chi-a", a.chi_a).number("chi-b", a.chi_b);
    if let Some(s) = a.scheme {
        replay = replay.flag("scheme", s.name());
    }
    let mut report = json!({
        "bench": a.bench,
        "chi_a": a.chi_a,
        "chi_b": a.chi_b,
        "order": bench.order(),
        "m_max": bench.m_max(),
        "scheme": scheme,
        "herald_probability": bench.heralded().herald_probability,
        "probabilities": p,
        "e_exact": p.expectation(),
        "warnings": bench.warnings(),
    });
    let mut used_seed = None;
    if let Some(shots) = a.shots {
        let seed = a.seed.seed;
        replay = replay.flag("shots", shots).flag("seed", seed);
        used_seed = Some(seed);
        let counts = sample_counts(&p, shots, RngSeed::new(seed))?;
        report["counts"] = json!(counts);
        report["e_estimated"] = json!(estimate_e(&counts)?);
    }
    replay.0.push(a.bench.display().to_string());
    let parameters = json!({
        "bench": a.bench,
        "chi_a": a.chi_a,
        "chi_b": a.chi_b,
        "shots": a.shots,
        "scheme": scheme,
    });
    report["manifest"] = json!(RunManifest::new("run", parameters, replay.0, used_seed));
    print_json(&report)
}
