//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinorbit::benchdsl::{load, parse, serialize, BenchAst, Keyword, Side, Stage, Value};
use spinorbit::chsh::{chsh_monte_carlo, chsh_s, nchv_max_s, ChshSettings, RngSeed, Simulation, CIRCLE_SETTINGS};
use spinorbit::elements::{
    bs_op, dove_arms_op, dove_pair_op, mirror_op, pbs_op, qplate_op, transmission_matrix, waveplate_op, QPlateSpec,
    WaveplateKind,
};
use spinorbit::experiment::{
    analyzer_op, herald, interferometer_detect, joint_probabilities, prepare_hybrid, AnalyzerSettings, Experiment,
};
use spinorbit::qstate::{bipartite_basis, photon_basis, BipartiteState, PhotonState, Spin, SpinState};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(|L,−2⟩ + |R,+2⟩)/√2`, written out directly.
fn spin_orbit_state(m_max: u32) -> PhotonState {
    let s = c(FRAC_1_SQRT_2);
    PhotonState::from_pairs(photon_basis(m_max), [((Spin::L, -2), s), ((Spin::R, 2), s)]).unwrap()
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

fn exact_chsh() -> Outcome {
    let st = ChshSettings::optimal();
    let proj = Simulation::default().exact_s(&st).map_err(|e| e.to_string())?;
    let chain = Simulation::default()
        .with_scheme(spinorbit::experiment::AnalyzerScheme::Interferometer)
        .exact_s(&st)
        .map_err(|e| e.to_string())?;
    let target = 2.0 * SQRT_2;
    let dev = (proj - target).abs().max((chain - target).abs());
    check(
        dev <= 1e-12,
        format!("S = {proj:.16} (interferometer {chain:.16}), |S - 2√2| = {dev:.1e}"),
    )
}

fn sine_law() -> Outcome {
    let bob = spin_orbit_state(2);
    let g = grid(32, -PI, PI);
    let mut worst: f64 = 0.0;
    for &a in &g {
        for &b in &g {
            let p = joint_probabilities(&bob, &AnalyzerSettings::new(a, b)).map_err(|e| e.to_string())?;
            worst = worst.max((p.expectation() - (a + b).sin()).abs());
        }
    }
    check(
        worst <= 1e-12,
        format!("32x32 grid, max |E - sin(χA+χB)| = {worst:.1e}"),
    )
}

fn qplate_mapping_and_unitarity() -> Outcome {
    let q = qplate_op(&QPlateSpec::unit(), 4);
    let l0 = q
        .apply(&PhotonState::basis_label(Spin::L, 0, 4).unwrap())
        .map_err(|e| e.to_string())?;
    let r0 = q
        .apply(&PhotonState::basis_label(Spin::R, 0, 4).unwrap())
        .map_err(|e| e.to_string())?;
    let exact = l0 == PhotonState::basis_label(Spin::R, 2, 4).unwrap()
        && r0 == PhotonState::basis_label(Spin::L, -2, 4).unwrap();

    let m_max = 6;
    let mut worst: f64 = 0.0;
    for (two_q, a0) in [(2, 0.0), (-3, 0.4), (1, 2.0), (4, -1.0)] {
        let spec = QPlateSpec::from_two_q(two_q, a0).unwrap();
        let op = qplate_op(&spec, m_max);
        worst = worst.max(op.op().unitarity_defect_on(&op.retained_columns()));
        for phi in grid(8, 0.0, 2.0 * PI) {
            worst = worst.max(transmission_matrix(&spec, phi).unitarity_defect());
        }
    }
    for theta in grid(12, -PI, PI) {
        worst = worst.max(waveplate_op(WaveplateKind::Quarter, theta).unitarity_defect());
        worst = worst.max(waveplate_op(WaveplateKind::Half, theta).unitarity_defect());
        worst = worst.max(dove_pair_op(theta, m_max).unitarity_defect());
        worst = worst.max(dove_arms_op(theta, m_max).unitarity_defect());
        worst = worst.max(
            analyzer_op(theta, 0.5 * theta, m_max)
                .map_err(|e| e.to_string())?
                .unitarity_defect(),
        );
    }
    worst = worst.max(pbs_op(m_max).unitarity_defect());
    worst = worst.max(bs_op(m_max).unitarity_defect());
    worst = worst.max(mirror_op(m_max).unitarity_defect());
    check(
        exact && worst <= 1e-12,
        format!("|L,0>→|R,+2> and |R,0>→|L,−2> exact: {exact}; max unitarity defect {worst:.1e}"),
    )
}

fn preparation() -> Outcome {
    let hybrid = prepare_hybrid(&QPlateSpec::unit(), 2).map_err(|e| e.to_string())?;
    let s = c(FRAC_1_SQRT_2);
    let mut want = BipartiteState::zero(bipartite_basis(2));
    want.set((Spin::L, (Spin::L, -2)), s).unwrap();
    want.set((Spin::R, (Spin::R, 2)), s).unwrap();
    let amp_dev = hybrid.max_abs_diff(&want);
    let out = herald(&hybrid, &SpinState::h()).map_err(|e| e.to_string())?;
    let state_dev = out.state.max_abs_diff(&spin_orbit_state(2));
    let p_dev = (out.herald_probability - 0.5).abs();
    check(
        amp_dev <= 1e-15 && state_dev <= 1e-15 && p_dev <= 1e-12,
        format!(
            "hybrid amplitude deviation {amp_dev:.1e}; heralded state deviation {state_dev:.1e}; herald probability {:.6}",
            out.herald_probability
        ),
    )
}

fn pipeline_equivalence() -> Outcome {
    let bob = spin_orbit_state(4);
    let mut worst: f64 = 0.0;
    for alpha in grid(16, -FRAC_PI_2, FRAC_PI_2) {
        for beta in grid(16, -PI, PI) {
            let s = AnalyzerSettings::from_rotations(alpha, beta, 2).map_err(|e| e.to_string())?;
            let shortcut = joint_probabilities(&bob, &s).map_err(|e| e.to_string())?;
            let chain = interferometer_detect(&bob, alpha, beta).map_err(|e| e.to_string())?;
            worst = worst.max(chain.max_abs_diff(&shortcut));
        }
    }
    check(
        worst <= 1e-10,
        format!("16x16 (α, β) grid, max detector deviation {worst:.1e}"),
    )
}

fn nchv_bound() -> Outcome {
    let opt = nchv_max_s(&ChshSettings::optimal());
    let quantum = chsh_s(&ChshSettings::optimal(), |a, b| (a + b).sin());
    let gap = quantum - opt.max_s;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut all_two = opt.max_s == 2.0 && opt.min_s == -2.0 && opt.enumerated == 16;
    for _ in 0..100 {
        let mut x = || rng.random_range(-PI..PI);
        let st = ChshSettings::new(x(), x(), x(), x()).unwrap();
        let b = nchv_max_s(&st);
        all_two &= b.max_s == 2.0 && b.min_s == -2.0 && b.enumerated == 16;
    }
    let gap_dev = (gap - (2.0 * SQRT_2 - 2.0)).abs();
    check(
        all_two && gap_dev <= 1e-12,
        format!("max |S| = 2 at optimal + 100 random settings: {all_two}; gap {gap:.12} (dev {gap_dev:.1e})"),
    )
}

fn monte_carlo() -> Outcome {
    let st = ChshSettings::optimal();
    let start = Instant::now();
    let a = chsh_monte_carlo(&st, 1_000_000, RngSeed::new(42)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let b = chsh_monte_carlo(&st, 1_000_000, RngSeed::new(42)).map_err(|e| e.to_string())?;
    let dev = (a.s_est - 2.0 * SQRT_2).abs();
    let within = dev <= 5.0 * a.standard_error;
    let se_ok = (a.standard_error - 0.0014).abs() < 0.0002;
    let same = a.counts == b.counts && a.s_est.to_bits() == b.s_est.to_bits();
    check(
        within && se_ok && same && elapsed < 5.0,
        format!(
            "S_est = {:.5}, SE = {:.5}, |S_est - 2√2| = {dev:.5} ({:.2} SE); reproducible: {same}; {elapsed:.2} s",
            a.s_est,
            a.standard_error,
            dev / a.standard_error
        ),
    )
}

fn count_sweep() -> Outcome {
    let sim = Simulation::default();
    let shots = 200_000u64;
    let g = grid(64, -PI, PI);
    let mut worst_exact: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    let mut worst_period: f64 = 0.0;
    let mut circles = 0;
    for (k, chi_b) in [FRAC_PI_4, -FRAC_PI_4].into_iter().enumerate() {
        let rows = sim
            .sweep(
                chi_b,
                &g,
                shots,
                RngSeed {
                    seed: 3,
                    stream: 1000 * k as u64,
                },
            )
            .map_err(|e| e.to_string())?;
        for r in &rows {
            let sin = (r.chi_a + chi_b).sin();
            let want = [
                (1.0 + sin) / 4.0,
                (1.0 - sin) / 4.0,
                (1.0 - sin) / 4.0,
                (1.0 + sin) / 4.0,
            ];
            for ((p, n), w) in r
                .probabilities
                .as_array()
                .iter()
                .zip(r.counts.unwrap().as_array())
                .zip(want)
            {
                worst_exact = worst_exact.max((p - w).abs());
                let sigma = (w * (1.0 - w) / shots as f64).sqrt().max(1e-300);
                worst_sigma = worst_sigma.max((n as f64 / shots as f64 - w).abs() / sigma);
            }
            let shifted = sim
                .probabilities(r.chi_a + 2.0 * PI, chi_b)
                .map_err(|e| e.to_string())?;
            worst_period = worst_period.max(shifted.max_abs_diff(&r.probabilities));
            circles += usize::from(r.circle);
        }
    }
    let mut worst_circle: f64 = 0.0;
    for (a, b) in CIRCLE_SETTINGS {
        let e = sim.correlation(a, b).map_err(|e| e.to_string())?;
        worst_circle = worst_circle.max((e.abs() - FRAC_1_SQRT_2).abs());
    }
    check(
        worst_exact <= 1e-12 && worst_sigma <= 5.0 && worst_period <= 1e-12 && worst_circle <= 1e-12 && circles == 4,
        format!(
            "χB = ±π/4, 64 points: max |p - (1±sin)/4| = {worst_exact:.1e}, counts within {worst_sigma:.2}σ, \
             2π-periodicity dev {worst_period:.1e}, circle |E| dev {worst_circle:.1e}, {circles} circle rows"
        ),
    )
}

fn zero_oam_null() -> Outcome {
    let mut worst: f64 = 0.0;
    let inputs = [
        PhotonState::basis_label(Spin::L, 0, 2).unwrap(),
        PhotonState::basis_label(Spin::R, 0, 2).unwrap(),
        spinorbit::qstate::tensor(&SpinState::h(), &spinorbit::qstate::OamState::mode(0, 2).unwrap()),
    ];
    for bob in &inputs {
        for beta in grid(4, -PI, PI) {
            let base = interferometer_detect(bob, 0.0, beta).map_err(|e| e.to_string())?;
            for alpha in grid(32, -PI, PI) {
                let d = interferometer_detect(bob, alpha, beta).map_err(|e| e.to_string())?;
                worst = worst.max(d.max_abs_diff(&base));
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("m = 0 inputs, 32 Dove angles: max detector change {worst:.1e}"),
    )
}

fn random_bench(rng: &mut ChaCha8Rng) -> BenchAst {
    let mut stages = vec![Stage::new(Keyword::Source)];
    if rng.random_bool(0.5) {
        stages[0] = Stage::new(Keyword::Source).with("m_max", Value::Number(f64::from(rng.random_range(0..10u32))));
    }
    let sides = [Side::Alice, Side::Bob, Side::Both];
    let herald_at = rng.random_range(0..6usize);
    for k in 0..rng.random_range(1..8usize) {
        if k == herald_at {
            let basis = ["H", "V", "L", "R", "D", "A"][rng.random_range(0..6)];
            stages.push(Stage::new(Keyword::Herald).with("basis", Value::Ident(basis.into())));
            continue;
        }
        let angle = Value::Number(rng.random_range(-10.0..10.0));
        let st = match rng.random_range(0..5) {
            0 => Stage::new(Keyword::Filter),
            1 => Stage::new(Keyword::QPlate)
                .with("q", Value::Number(f64::from(rng.random_range(-6..7i32)) / 2.0))
                .with("alpha0", angle),
            2 => Stage::new(Keyword::Qwp).with("angle", angle),
            3 => Stage::new(Keyword::Hwp).with("angle", angle),
            _ => Stage::new(Keyword::Analyzer).with(
                "scheme",
                Value::Ident(["projector", "interferometer"][rng.random_range(0..2)].into()),
            ),
        };
        stages.push(st.on(sides[rng.random_range(0..3)]));
    }
    BenchAst { stages }
}

fn dsl_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut round_trips = 0;
    for _ in 0..50 {
        let ast = random_bench(&mut rng);
        let back = parse(&serialize(&ast)).map_err(|e| e.to_string())?;
        round_trips += usize::from(back.structurally_eq(&ast));
    }
    let bench = load(include_str!("../examples/fig2.bench")).map_err(|e| e.to_string())?;
    let g = grid(32, -PI, PI);
    let mut worst: f64 = 0.0;
    for &a in &g {
        for &b in &g {
            let e = bench.probabilities(a, b).map_err(|e| e.to_string())?.expectation();
            worst = worst.max((e - (a + b).sin()).abs());
        }
    }
    let direct = Experiment::new(QPlateSpec::unit()).map_err(|e| e.to_string())?;
    let state_dev = bench.heralded().state.max_abs_diff(&direct.heralded().state);
    check(
        round_trips == 50 && worst <= 1e-12 && state_dev <= 1e-15,
        format!(
            "{round_trips}/50 round trips; fig2.bench ({:?}) max |E - sin| = {worst:.1e}, state dev {state_dev:.1e}",
            bench.scheme()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact CHSH value", exact_chsh),
        ("correlation sine law", sine_law),
        ("q-plate mapping and element unitarity", qplate_mapping_and_unitarity),
        ("state preparation and herald", preparation),
        ("interferometer vs projector equivalence", pipeline_equivalence),
        ("noncontextual bound", nchv_bound),
        ("Monte-Carlo consistency", monte_carlo),
        ("count sweep curves", count_sweep),
        ("zero-OAM null test", zero_oam_null),
        ("bench DSL round trip and full stack", dsl_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
