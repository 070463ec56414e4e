//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::error::Error;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fluidclock_cli::{run, Command, RunOptions};
use fluidclock_core::madelung::{cross_term_relation, momentum_fields, momentum_identity_residual, HydroOptions};
use fluidclock_core::ops::integrate_values;
use fluidclock_core::propagator::{observables, Propagator};
use fluidclock_core::subquantum::{
    characteristic_frequency, clock_ladder, coarse_time_study, compare_histogram, drift_field, init_ensemble,
    step_ensemble, Binning, CoarseTimeConfig,
};
use fluidclock_core::variational::{
    action_integral, continuity_residual, fluctuation_balance, ladder_order, schroedinger_residual, BalanceReport,
};
use fluidclock_core::{
    evolve, make_potential, states, Backend, Complex64, ComplexField, EvolveConfig, Grid, GridSpec, Method,
    PhysicalConstants, Potential, PotentialSpec, Trajectory, Wavefunction,
};

type Outcome = Result<(bool, String), Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Outcome);

fn units() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn grid1(extent: f64, points: usize) -> Grid {
    Grid::new(&GridSpec::new_1d(extent, points)).unwrap()
}

fn harmonic(g: &Grid) -> Potential {
    make_potential(&PotentialSpec::Harmonic { omega: 1.0 }, g, &units()).unwrap()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

struct Bench {
    name: &'static str,
    wf: Wavefunction,
    v: Potential,
    dt: f64,
}

/// The five smooth benchmark states plus the oscillator coherent state.
fn benchmarks() -> Vec<Bench> {
    let c = units();
    let wide = grid1(40.0, 512);
    let ring = grid1(2.0 * PI, 128);
    let trap = grid1(20.0, 512);
    let coh = grid1(24.0, 256);
    let two = states::superposition(&[
        (Complex64::new(1.0, 0.0), states::gaussian(&wide, &c, &[-3.0], 1.0, &[1.0]).unwrap()),
        (Complex64::new(0.0, 1.0), states::gaussian(&wide, &c, &[3.0], 1.0, &[-1.0]).unwrap()),
    ])
    .unwrap();
    vec![
        Bench {
            name: "plane wave",
            wf: states::plane_wave(&ring, &c, &[2.0]).unwrap(),
            v: Potential::free(&ring),
            dt: 2.5e-4,
        },
        Bench {
            name: "rest gaussian",
            wf: states::gaussian(&wide, &c, &[0.0], 1.0, &[]).unwrap(),
            v: Potential::free(&wide),
            dt: 5e-4,
        },
        Bench {
            name: "boosted gaussian",
            wf: states::gaussian(&wide, &c, &[0.0], 1.5, &[1.0]).unwrap(),
            v: Potential::free(&wide),
            dt: 5e-4,
        },
        Bench { name: "ho ground", wf: states::ho_ground(&trap, &c, 1.0).unwrap(), v: harmonic(&trap), dt: 1e-3 },
        Bench { name: "two gaussians", wf: two, v: Potential::free(&wide), dt: 2.5e-4 },
        Bench {
            name: "ho coherent",
            wf: states::ho_coherent(&coh, &c, 1.0, &[2.0]).unwrap(),
            v: harmonic(&coh),
            dt: 1.25e-4,
        },
    ]
}

fn zero_point_energy() -> Outcome {
    let g = grid1(20.0, 512);
    let wf = states::ho_ground(&g, &units(), 1.0)?;
    let v = harmonic(&g);
    let obs = observables(&wf, &v, Backend::Spectral)?;
    let e_rel = (obs.energy - 0.5).abs() / 0.5;
    let mom = momentum_fields(&wf, &HydroOptions::default())?;
    let p = wf.density();
    let osm: Vec<f64> = (0..g.len())
        .map(|k| {
            let u = mom.osmotic.component(0)[k];
            if u.is_nan() {
                0.0
            } else {
                p.values()[k] * u * u / 2.0
            }
        })
        .collect();
    let pv: Vec<f64> = p.values().iter().zip(v.values.values()).map(|(a, b)| a * b).collect();
    let split = integrate_values(&g, &osm) + integrate_values(&g, &pv);
    let conv = mom.convective.component(0).iter().filter(|x| !x.is_nan()).fold(0.0f64, |a, b| a.max(b.abs()));
    Ok((
        e_rel <= 1e-9 && (split - 0.5).abs() <= 1e-8,
        format!("<E> rel err {e_rel:.2e}, osmotic + potential = {split:.15} (|p_conv| max {conv:.1e})"),
    ))
}

fn de_broglie_limit() -> Outcome {
    let g = grid1(2.0 * PI, 128);
    let wf = states::plane_wave(&g, &units(), &[2.0])?;
    let mom = momentum_fields(&wf, &HydroOptions::default())?;
    let osm = mom.osmotic.component(0).iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let p = observables(&wf, &Potential::free(&g), Backend::Spectral)?.mean_p[0];
    Ok((osm <= 1e-12 && (p - 2.0).abs() <= 1e-12, format!("max |p_osm| = {osm:.1e}, <p> - 2 = {:.1e}", p - 2.0)))
}

fn madelung_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for b in benchmarks().into_iter().filter(|b| b.name != "ho coherent") {
        let r = momentum_identity_residual(&b.wf, &HydroOptions::default())?.max_residual;
        worst = worst.max(r);
        parts.push(format!("{} {r:.1e}", b.name));
    }
    Ok((worst < 1e-8, parts.join(", ")))
}

fn moving_gaussian(dt: f64, horizon: f64) -> Result<Trajectory, Box<dyn Error>> {
    let g = grid1(40.0, 512);
    let wf = states::gaussian(&g, &units(), &[0.0], 1.0, &[2.0])?;
    Ok(evolve(&wf, &Potential::free(&g), &EvolveConfig::new(dt, (horizon / dt).round() as usize, Method::SplitStep))?)
}

fn continuity() -> Outcome {
    let opts = HydroOptions::default();
    let mut reports: Vec<(f64, BalanceReport)> = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        reports.push((dt, continuity_residual(&moving_gaussian(dt, 0.2)?, &opts)?));
    }
    let refs: Vec<(f64, &BalanceReport)> = reports.iter().map(|(d, r)| (*d, r)).collect();
    let order = ladder_order(&refs)?.order;
    let g = grid1(20.0, 512);
    let wf = states::ho_ground(&g, &units(), 1.0)?;
    let traj = evolve(&wf, &harmonic(&g), &EvolveConfig::new(1e-3, 200, Method::SplitStep))?;
    let stationary = continuity_residual(&traj, &opts)?.linf_residual;
    Ok((
        (1.9..=2.1).contains(&order) && stationary < 1e-8,
        format!("moving gaussian order {order:.4}, stationary L-inf {stationary:.1e}"),
    ))
}

fn trajectories() -> Result<Vec<(String, Trajectory)>, Box<dyn Error>> {
    let mut out = Vec::new();
    for b in benchmarks() {
        out.push((b.name.to_string(), evolve(&b.wf, &b.v, &EvolveConfig::new(b.dt, 200, Method::SplitStep))?));
    }
    let g = grid1(24.0, 256);
    let wf = states::ho_coherent(&g, &units(), 1.0, &[2.0])?;
    out.push((
        "ho coherent (CN)".into(),
        evolve(&wf, &harmonic(&g), &EvolveConfig::new(1e-3, 300, Method::CrankNicolson))?,
    ));
    out.push(("moving gaussian".into(), moving_gaussian(1e-3, 0.2)?));
    Ok(out)
}

fn fluctuation() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (_, traj) in trajectories()? {
        let r = fluctuation_balance(&traj, &HydroOptions::with_backend(traj.backend()))?;
        worst = worst.max(r.agreement);
        n += 1;
    }
    Ok((worst < 1e-10, format!("worst agreement {worst:.1e} over {n} trajectories")))
}

fn action() -> Outcome {
    let mut worst = 0.0f64;
    for (_, traj) in trajectories()? {
        let a = action_integral(&traj, &HydroOptions::with_backend(traj.backend()))?;
        worst = worst.max(a.rel_difference);
    }
    let g = grid1(20.0, 512);
    let wf = states::ho_ground(&g, &units(), 1.0)?;
    let period = (2.0 * PI / 1e-3).round() as usize;
    let traj = evolve(&wf, &harmonic(&g), &EvolveConfig::new(1e-3, period, Method::SplitStep))?;
    let a = action_integral(&traj, &HydroOptions::default())?;
    worst = worst.max(a.rel_difference);
    Ok((
        worst < 1e-8 && a.a_classical.abs() <= 1e-6 && a.a_psi.abs() <= 1e-6,
        format!(
            "worst rel difference {worst:.1e}; ground state over one period A_c = {:.1e}, A_psi = {:.1e}",
            a.a_classical, a.a_psi
        ),
    ))
}

fn schroedinger() -> Outcome {
    let g = grid1(20.0, 256);
    let v = harmonic(&g);
    let wf = states::ho_coherent(&g, &units(), 1.0, &[2.0])?;
    let mut reports = Vec::new();
    for dt in [4e-2, 2e-2, 1e-2, 5e-3] {
        let traj = evolve(&wf, &v, &EvolveConfig::new(dt, (1.0 / dt).round() as usize, Method::SplitStep))?;
        reports.push((dt, schroedinger_residual(&traj, Backend::Spectral)?));
    }
    let refs: Vec<(f64, &BalanceReport)> = reports.iter().map(|(d, r)| (*d, r)).collect();
    let order = ladder_order(&refs)?.order;

    let dt = 2.5e-3;
    let clean = evolve(&wf, &v, &EvolveConfig::new(dt, 40, Method::SplitStep))?;
    let baseline = schroedinger_residual(&clean, Backend::Spectral)?;
    let mut snaps = clean.snapshots.clone();
    let bad = 20;
    let s = &snaps[bad];
    let scaled = ComplexField::new(g, s.values().iter().map(|z| z * 1.01).collect())?;
    snaps[bad] = Wavefunction::new_unchecked(scaled, *s.constants(), s.time());
    let corrupted =
        schroedinger_residual(&Trajectory::from_snapshots(snaps, dt, Method::SplitStep, v)?, Backend::Spectral)?;
    let spike = corrupted.snapshot_l2[bad - 1] / baseline.snapshot_l2[bad - 1];
    Ok((
        (1.9..=2.1).contains(&order) && spike > 100.0,
        format!("coherent-state order {order:.4}, fault spike {spike:.0}x"),
    ))
}

fn cross_term() -> Outcome {
    let mut worst = 0.0f64;
    let mut small = Vec::new();
    let mut ok = true;
    for b in benchmarks() {
        let r = cross_term_relation(&b.wf, &HydroOptions::default())?;
        worst = worst.max(r.relation_residual);
        if b.name == "plane wave" || b.name == "ho coherent" {
            let m = r.cross_term.abs().max(r.mean_energy_fluctuation.abs());
            ok &= m < 1e-9;
            small.push(format!("{} {m:.1e}", b.name));
        }
    }
    Ok((ok && worst < 1e-8, format!("worst relation residual {worst:.1e}; magnitudes {}", small.join(", "))))
}

fn born_rule() -> Outcome {
    let c = units();
    // coherent state over two periods
    let g = grid1(20.0, 256);
    let v = harmonic(&g);
    let wf = states::ho_coherent(&g, &c, 1.0, &[2.0])?;
    let dt = 1e-2;
    let mut psi = Propagator::new(&wf, &v, dt, Method::SplitStep)?;
    let mut ens = init_ensemble(&wf.density(), 200_000, 9, 0.0)?;
    let steps = (4.0 * PI / dt).round() as usize;
    let mut peak = 0.0f64;
    let mut coherent_tv = 0.0;
    for step in 1..=steps {
        let drift = drift_field(&psi.wavefunction(), &HydroOptions::default())?;
        step_ensemble(&mut ens, &drift, dt, c.hbar, c.mass)?;
        psi.step()?;
        if step % 100 == 0 || step == steps {
            coherent_tv = compare_histogram(&ens, &psi.wavefunction().density(), 64, Binning::Full)?.total_variation;
            peak = peak.max(coherent_tv);
        }
    }

    // double slit through the command line, y marginal at the screen time
    let dir = tempfile::tempdir()?;
    let mut opts = RunOptions::new(Command::Walkers, scenario("double_slit.json"));
    opts.out = Some(dir.path().to_path_buf());
    let s = run(&opts)?;
    let w = &s.sections["walkers"];
    let slit_tv = w["final_tv"].as_f64().ok_or("missing final_tv")?;
    let slit_peak = w["max_tv"].as_f64().ok_or("missing max_tv")?;

    // stationary oscillator ensemble
    let g = grid1(20.0, 512);
    let wf = states::ho_ground(&g, &c, 1.0)?;
    let drift = drift_field(&wf, &HydroOptions::default())?;
    let mut ens = init_ensemble(&wf.density(), 50_000, 5, 0.0)?;
    for _ in 0..4000 {
        step_ensemble(&mut ens, &drift, 1e-3, c.hbar, c.mass)?;
    }
    let x = ens.coordinates(0);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
    let var_rel = (var - 0.5).abs() / 0.5;

    Ok((
        coherent_tv < 0.03 && slit_tv < 0.03 && var_rel < 0.03,
        format!(
            "coherent TV {coherent_tv:.4} (peak {peak:.4}), double slit y-marginal TV {slit_tv:.4} (peak {slit_peak:.4}), \
             OU variance {var:.4} ({:.1}% off)",
            100.0 * var_rel
        ),
    ))
}

fn fluid_clock() -> Outcome {
    let g = grid1(24.0, 256);
    let wf = states::ho_coherent(&g, &units(), 1.0, &[2.0])?;
    let v = harmonic(&g);
    let mut ok = true;
    let mut parts = Vec::new();
    for method in [Method::SplitStep, Method::CrankNicolson] {
        let clock = characteristic_frequency(&wf, &v, method.backend())?;
        let mut cfg = CoarseTimeConfig::new(clock_ladder(clock.delta_t, 6, &[2.0]), method);
        cfg.total_time = Some(4.0 * clock.delta_t);
        let opts = HydroOptions::with_backend(method.backend());
        let r = coarse_time_study(&wf, &v, &cfg, &opts)?;
        let order = r.fitted_order.unwrap_or(f64::NAN);
        let coarse = r
            .rows
            .iter()
            .filter(|row| row.dt_omega >= 2.0 * (1.0 - 1e-12))
            .map(|row| row.terminal_error)
            .fold(f64::NAN, f64::min);
        ok &= (1.9..=2.1).contains(&order) && coarse > 0.1;
        parts.push(format!("{} order {order:.3}, error at dt*omega = 2: {coarse:.3}", method.name()));
    }
    Ok((ok, parts.join("; ")))
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let mut opts = RunOptions::new(Command::All, scenario("coherent_clock.json"));
        opts.out = Some(dir.path().join(tag));
        run(&opts)?;
        outputs.push(read_dir(&dir.path().join(tag)));
    }
    let same = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].values().map(Vec::len).sum();
    Ok((same, format!("{} files, {bytes} bytes compared", outputs[0].len())))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("zero-point energy", zero_point_energy),
        ("de Broglie limit", de_broglie_limit),
        ("Madelung identity", madelung_identity),
        ("continuity", continuity),
        ("fluctuation balance", fluctuation),
        ("action equality", action),
        ("Schrödinger residual", schroedinger),
        ("cross-term identity", cross_term),
        ("Born-rule equivariance", born_rule),
        ("fluid-clock coarse-graining", fluid_clock),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} {:>2} {name}: {detail} [{secs:.1} s]", if passed { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
