//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero when any of them fails.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tunnelwell::exact::{convergence_scan, splitting_exact, splitting_with_extent, GridExtent, DEFAULT_M, DEFAULT_N};
use tunnelwell::potential::{characterize, quartic_resonance_boundary, Side, Strictness};
use tunnelwell::semiclassical::{
    herring_amplitude, prefactor_c, symmetric_amplitude, tunneling_amplitude, tunneling_amplitude_with, SymmetricWell,
};
use tunnelwell::twolevel::{constant_probability, transfer_time, zeno_probability, ZenoSchedule};
use tunnelwell::{Error, Potential};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn quartic_closed(v0: f64) -> f64 {
    4.0 * (2.0 / PI).sqrt() * v0.sqrt() * (-16.0 * v0 / 3.0).exp()
}

fn parabolic_closed(v0: f64) -> f64 {
    (2.0 * v0 / PI).sqrt() * (-2.0 * v0).exp()
}

fn prefactor_of(p: &Potential) -> Result<f64, Error> {
    let g = characterize(p)?;
    prefactor_c(&SymmetricWell::new(p, &g, Side::Right)?)
}

fn quartic_prefactor() -> Outcome {
    let start = Instant::now();
    let c = prefactor_of(&Potential::quartic(2.0, 0.0).unwrap()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let err = (c - 2f64.ln()).abs();
    check(
        err <= 1e-6 && secs < 1.0,
        format!("C = {c:.9}, |C - ln 2| = {err:.2e}, {secs:.3} s"),
    )
}

fn parabolic_prefactor() -> Outcome {
    let start = Instant::now();
    let c = prefactor_of(&Potential::parabolic(2.0, 0.0).unwrap()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    check(c.abs() <= 1e-8 && secs < 1.0, format!("C = {c:.2e}, {secs:.3} s"))
}

fn closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for v0 in [1.0, 2.0, 4.0] {
        let q = tunneling_amplitude(&Potential::quartic(v0, 0.0).unwrap()).map_err(|e| e.to_string())?;
        let p = tunneling_amplitude(&Potential::parabolic(v0, 0.0).unwrap()).map_err(|e| e.to_string())?;
        worst = worst
            .max(rel(q.nu, quartic_closed(v0)))
            .max(rel(p.nu, parabolic_closed(v0)));
    }
    check(worst <= 1e-6, format!("worst relative deviation {worst:.2e}"))
}

fn symmetric_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [
        Potential::quartic(2.0, 0.0).unwrap(),
        Potential::parabolic(2.0, 0.0).unwrap(),
    ] {
        let r = tunneling_amplitude(&p).map_err(|e| e.to_string())?;
        let g = characterize(&p).map_err(|e| e.to_string())?;
        let sym = symmetric_amplitude(&SymmetricWell::new(&p, &g, Side::Left).unwrap()).map_err(|e| e.to_string())?;
        if r.a != 1.0 || r.nu_l != r.nu_r {
            return Err(format!("A = {}, nu_L = {}, nu_R = {}", r.a, r.nu_l, r.nu_r));
        }
        worst = worst.max(rel(r.nu, sym));
    }
    check(
        worst <= 1e-12,
        format!("A = 1, nu_L = nu_R, worst relative deviation {worst:.2e}"),
    )
}

fn random_potential(rng: &mut ChaCha8Rng) -> Potential {
    match rng.gen_range(0..3) {
        0 => Potential::quartic(rng.gen_range(1.0..4.0), rng.gen_range(0.0..0.1)).unwrap(),
        1 => Potential::parabolic(rng.gen_range(0.8..4.0), rng.gen_range(-0.5..0.5)).unwrap(),
        _ => {
            let v0: f64 = rng.gen_range(1.5..4.0);
            let b = HashMap::from([
                ("V0".to_string(), v0),
                ("a".to_string(), (8.0 * v0).sqrt()),
                ("b".to_string(), rng.gen_range(-0.08..0.08)),
            ]);
            let w = 4.0 * (8.0 * v0).sqrt();
            Potential::custom("V0*(((x/a)^2-1)^2 - 1 - b*x/a)", b, (-w, w)).unwrap()
        }
    }
}

fn herring_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e11);
    let (mut done, mut worst) = (0, 0.0f64);
    let mut attempts = 0;
    while done < 50 {
        attempts += 1;
        if attempts > 500 {
            return Err(format!("only {done} admissible potentials in {attempts} draws"));
        }
        let p = random_potential(&mut rng);
        let t = match tunneling_amplitude(&p) {
            Ok(r) => r.nu,
            Err(Error::ResonanceRegime { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let h = herring_amplitude(&p).map_err(|e| e.to_string())?;
        worst = worst.max(rel(h, t));
        done += 1;
    }
    check(
        worst <= 1e-8,
        format!("{done} potentials, worst relative deviation {worst:.2e}"),
    )
}

fn exact_agreement(eta: f64, v0s: &[f64], budget: f64) -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, f64::NAN);
    for &v0 in v0s {
        let p = Potential::parabolic(v0, eta).unwrap();
        let ex = splitting_exact(&p, DEFAULT_N, DEFAULT_M).map_err(|e| e.to_string())?;
        let sc = tunneling_amplitude_with(&p, Strictness::Lenient).map_err(|e| e.to_string())?;
        let d = rel(sc.omega_rabi, ex.splitting);
        if d > worst.0 {
            worst = (d, v0);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst.0 <= budget && secs < 60.0,
        format!(
            "worst relative difference {:.3}% at V0 = {:.1}, {secs:.2} s",
            100.0 * worst.0,
            worst.1
        ),
    )
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

fn symmetric_exact() -> Outcome {
    exact_agreement(0.0, &steps(0.4, 3.0, 0.2), 0.02)
}

fn hardened_exact() -> Outcome {
    exact_agreement(-0.5, &steps(0.8, 3.0, 0.2), 0.03)
}

fn resonance_boundaries() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (v0, expected) in [(4.0, 0.12), (2.0, 0.25), (1.0, 0.50)] {
        let b = quartic_resonance_boundary(v0).map_err(|e| e.to_string())?;
        ok &= (b - expected).abs() <= 0.02;
        parts.push(format!("V0 = {v0}: {b:.4} (target {expected})"));
    }
    check(ok, parts.join(", "))
}

fn parabolic_ratio() -> Outcome {
    let nu = |eta| tunneling_amplitude(&Potential::parabolic(2.0, eta).unwrap()).map(|r| r.nu);
    let ratio = nu(0.2).map_err(|e| e.to_string())? / nu(0.0).map_err(|e| e.to_string())?;
    check((ratio - 0.642).abs() <= 0.001, format!("ratio = {ratio:.5}"))
}

fn quartic_ratio(v0: f64, eta: f64) -> Result<f64, String> {
    let nu = |eta| tunneling_amplitude(&Potential::quartic(v0, eta).unwrap()).map(|r| r.nu);
    Ok(nu(eta).map_err(|e| e.to_string())? / nu(0.0).map_err(|e| e.to_string())?)
}

fn quartic_monotonicity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for v0 in [1.0, 2.0, 4.0] {
        let bound = quartic_resonance_boundary(v0).map_err(|e| e.to_string())?;
        let samples = 400;
        let mut prev = 1.0;
        let mut first_rise = None;
        for k in 1..samples {
            let eta = bound * k as f64 / samples as f64;
            let r = quartic_ratio(v0, eta)?;
            if r >= prev && first_rise.is_none() {
                first_rise = Some(eta);
            }
            prev = r;
        }
        let small: Vec<f64> = (1..=10).map(|k| 0.005 * k as f64).collect();
        let dev: Vec<f64> = small
            .iter()
            .map(|&e| quartic_ratio(v0, e).map(|r| 1.0 - r))
            .collect::<Result<_, _>>()?;
        let c =
            small.iter().zip(&dev).map(|(e, d)| d * e * e).sum::<f64>() / small.iter().map(|e| e.powi(4)).sum::<f64>();
        let fit = small
            .iter()
            .zip(&dev)
            .map(|(e, d)| rel(*d, c * e * e))
            .fold(0.0, f64::max);
        let mono = first_rise.is_none();
        ok &= mono && fit <= 0.1;
        parts.push(match first_rise {
            None => format!(
                "V0 = {v0}: decreasing on (0, {bound:.4}), c = {c:.3}, fit {:.1}%",
                100.0 * fit
            ),
            Some(e) => format!("V0 = {v0}: rises at eta = {e:.4}, c = {c:.3}, fit {:.1}%", 100.0 * fit),
        });
    }
    check(ok, parts.join("; "))
}

fn delta_eps_slope() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for v0 in [1.0, 2.0, 4.0] {
        let eta = 0.01;
        let r = tunneling_amplitude(&Potential::quartic(v0, eta).unwrap()).map_err(|e| e.to_string())?;
        let slope = r.delta_eps.abs() / eta;
        let target = 2.0 * v0 + 0.375;
        let d = rel(slope, target);
        ok &= d <= 0.02;
        parts.push(format!("V0 = {v0}: {slope:.4} vs {target} ({:.1}%)", 100.0 * d));
    }
    check(ok, parts.join(", "))
}

fn harmonic_oracle() -> Outcome {
    let p = Potential::custom("0.5*x^2", HashMap::new(), (-60.0, 60.0)).unwrap();
    let extent = GridExtent::single_well(0.0, 1.0);
    let r = splitting_with_extent(&p, extent, DEFAULT_N, DEFAULT_M).map_err(|e| e.to_string())?;
    let (d0, d1) = ((r.e0 - 0.5).abs(), (r.e1 - 1.5).abs());
    let rows = convergence_scan(&p, extent, &[50, 100, 200, 400], &[DEFAULT_M]).map_err(|e| e.to_string())?;
    let errs: Vec<f64> = rows.iter().map(|h| (h.splitting() - 1.0).abs()).collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = d0 <= 1e-4 && d1 <= 1e-4 && ratios.iter().all(|q| (3.5..=4.5).contains(q));
    check(
        ok,
        format!(
            "|E0 - 0.5| = {d0:.1e}, |E1 - 1.5| = {d1:.1e}, error ratios {}",
            ratios.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn zeno_bound() -> Outcome {
    let nu0 = tunneling_amplitude(&Potential::quartic(2.0, 0.0).unwrap())
        .map_err(|e| e.to_string())?
        .nu;
    let s = ZenoSchedule::reference(nu0).map_err(|e| e.to_string())?;
    let big_t = transfer_time(nu0);
    let flat = ZenoSchedule::new(nu0, nu0, s.t0, s.t1, big_t).map_err(|e| e.to_string())?;
    let (mut below, mut inexact, mut min_gap) = (0, 0, f64::INFINITY);
    for i in 1..=1000 {
        let t = big_t * i as f64 / 1000.0;
        let z = zeno_probability(&s, t).map_err(|e| e.to_string())?;
        let c = constant_probability(nu0, t).map_err(|e| e.to_string())?;
        let cos2 = (nu0 * t).cos().powi(2);
        if z < c {
            below += 1;
        }
        if c != cos2 || zeno_probability(&flat, t).map_err(|e| e.to_string())? != cos2 {
            inexact += 1;
        }
        min_gap = min_gap.min(z - c);
    }
    check(
        below == 0 && inexact == 0,
        format!("{below} samples below the constant curve, {inexact} inexact, min gap {min_gap:.3e}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = r#"{
        "potential": {"kind": "quartic", "v0": 2.0, "eta": 0.1},
        "command": {
            "sweep": {"eta": {"min": 0.0, "max": 0.3, "step": 0.01}, "v0": [1.0, 2.0, 4.0]},
            "exact_compare": {"v0": {"min": 1.0, "max": 2.0, "step": 0.5}},
            "zeno": {"samples": 200}
        }
    }"#;
    let path = dir.path().join("config.json");
    fs::write(&path, cfg).map_err(|e| e.to_string())?;
    let commands = ["characterize", "amplitude", "sweep", "exact-compare", "zeno"];
    for cmd in commands {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let prefix = dir.path().join(format!("run{run}/{cmd}"));
            let out = Command::new(env!("CARGO_BIN_EXE_tunnelwell"))
                .args([cmd, "--plot", "--config"])
                .arg(&path)
                .arg("--out")
                .arg(&prefix)
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{cmd}: exit {:?}", out.status.code()));
            }
            let mut files: Vec<_> = fs::read_dir(prefix.parent().unwrap())
                .map_err(|e| e.to_string())?
                .filter_map(|e| e.ok())
                .filter(|e| e.file_name().to_string_lossy().starts_with(cmd))
                .map(|e| (e.file_name(), fs::read(e.path()).unwrap()))
                .collect();
            files.sort();
            outputs.push(files);
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            return Err(format!("{cmd}: outputs differ between runs"));
        }
    }
    check(
        true,
        format!("{} commands byte-identical across two runs", commands.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("quartic prefactor equals ln 2", quartic_prefactor),
        ("parabolic prefactor vanishes", parabolic_prefactor),
        ("symmetric amplitudes match closed forms", closed_forms),
        ("symmetric reduction", symmetric_reduction),
        ("herring and barrier-integral amplitudes agree", herring_equivalence),
        ("symmetric parabolic against exact splitting", symmetric_exact),
        ("hardened parabolic against exact splitting", hardened_exact),
        ("quartic resonance boundaries", resonance_boundaries),
        ("parabolic amplitude ratio at eta = 0.2", parabolic_ratio),
        ("quartic amplitude decreases with asymmetry", quartic_monotonicity),
        ("level offset slope", delta_eps_slope),
        ("harmonic oracle for the exact solver", harmonic_oracle),
        ("piecewise schedule slows transfer", zeno_bound),
        ("cli determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("criterion {:>2}: PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
