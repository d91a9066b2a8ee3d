//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints a PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use giant_atom::correlations::{
    default_axis, linspace, phase_sweep, ratio_sweep, regime_sequence, Engine, Regime,
};
use giant_atom::oracle::{
    check_contour_identity, check_direction_symmetry, check_identity_suite, check_smallatom_reduction,
    check_smallatom_weight, check_unitarity, contour_grid, contour_parameter_sets, OracleReport, ParamSampler,
};
use giant_atom::params::{lifetime, SystemParams, UnitSystem};
use giant_atom::pulse::GaussianPulse;
use giant_atom::quadrature::QuadSpec;
use giant_atom::scattering::Channel;
use giant_atom::twophoton::ChannelPair;

const SEED: u64 = 20240917;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn from_report(r: &OracleReport) -> Outcome {
    outcome(
        r.passed,
        format!(
            "max_rel={:.2e} tol={:.0e} samples={}{}",
            r.max_rel_deviation,
            r.tolerance,
            r.samples,
            if r.note.is_empty() { String::new() } else { format!(" ({})", r.note) }
        ),
    )
}

fn within(elapsed: Duration, limit_s: f64, mut o: Outcome) -> Outcome {
    let s = elapsed.as_secs_f64();
    o.detail.push_str(&format!(" time={s:.2}s/{limit_s}s"));
    if s >= limit_s {
        o.passed = false;
    }
    o
}

/// Γ1 = Γ2 = 5 MHz, φ0 = π/2, resonant, pulse width 100 ns.
fn fig3_params() -> SystemParams {
    let u = UnitSystem::new(100.0).unwrap();
    SystemParams::from_decay_rates(u.rate_from_mhz(5.0), u.rate_from_mhz(5.0), 0.0, 0.0, PI / 2.0, 0.0)
        .unwrap()
        .at_resonance()
}

fn draws() -> Vec<(SystemParams, f64)> {
    ParamSampler::new(SEED).draws(10_000)
}

fn c1_unitarity() -> Outcome {
    let samples = draws();
    let start = Instant::now();
    let rep = check_unitarity(&samples);
    within(start.elapsed(), 2.0, from_report(&rep))
}

fn c2_direction_symmetry() -> Outcome {
    let samples = draws();
    let asymmetric = samples.iter().filter(|(p, _)| (p.g1() - p.g2()).norm() > 1e-3).count();
    let mut o = from_report(&check_direction_symmetry(&samples));
    o.detail.push_str(&format!(" asymmetric_draws={asymmetric}"));
    o.passed &= asymmetric > samples.len() / 2;
    o
}

fn c3_small_atom() -> Outcome {
    let mut sampler = ParamSampler::new(SEED ^ 3);
    let (mut amp, mut weight) = (0.0f64, 0.0f64);
    let mut ok = true;
    for _ in 0..100 {
        let p = sampler.params_at(0.0);
        let ks: Vec<f64> = (0..10).map(|_| sampler.frequency(&p)).collect();
        let r = check_smallatom_reduction(&p, &ks);
        amp = amp.max(r.max_rel_deviation);
        ok &= r.passed && r.max_rel_deviation < 1e-13;
        let tuples: Vec<[f64; 4]> = (0..10)
            .map(|_| {
                let (p1, p2, k1) = (sampler.frequency(&p), sampler.frequency(&p), sampler.frequency(&p));
                [p1, p2, k1, p1 + p2 - k1]
            })
            .collect();
        let w = check_smallatom_weight(&p, &tuples);
        weight = weight.max(w.max_rel_deviation);
        ok &= w.passed && w.max_rel_deviation < 1e-12;
    }
    outcome(ok, format!("amplitudes={amp:.2e}/1e-13 weight={weight:.2e}/1e-12"))
}

fn c4_contour() -> Outcome {
    let mut sampler = ParamSampler::new(SEED ^ 4);
    let start = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    let sets = contour_parameter_sets(&mut sampler);
    for p in &sets {
        let (omegas, dts) = contour_grid(p, 20);
        let r = check_contour_identity(p, &omegas, &dts);
        ok &= r.passed && r.samples == 400 && r.max_rel_deviation < 1e-6;
        worst = worst.max(r.max_rel_deviation);
        if !r.note.is_empty() {
            notes.push(r.note);
        }
    }
    let detail = format!("sets={} max_rel={worst:.2e}/1e-6 {}", sets.len(), notes.join("; "));
    within(start.elapsed(), 60.0, outcome(ok, detail))
}

fn c5_identities() -> Outcome {
    let mut sampler = ParamSampler::new(SEED ^ 5);
    let samples: Vec<(SystemParams, f64, f64)> = (0..1000)
        .map(|_| {
            let p = sampler.params();
            let (q, k) = (sampler.frequency(&p), sampler.frequency(&p));
            (p, q, k)
        })
        .collect();
    let r = check_identity_suite(&samples);
    let mut o = from_report(&r);
    o.passed &= r.max_rel_deviation < 1e-12;
    o
}

fn c6_factorization() -> Outcome {
    let params = fig3_params();
    let pulse = GaussianPulse::unit();
    let spec = QuadSpec::default()
        .with_abs_tol(1e-13)
        .with_rel_tol(1e-10)
        .with_max_subdivisions(20_000);
    let run = || -> giant_atom::Result<(f64, f64)> {
        let engine = Engine::new(params, pulse, spec)?;
        let kappa = engine.calibrate_kappa(ChannelPair::TT)?;
        let tau = lifetime(&params)?;
        let t1 = pulse.center_time() - 4.0 * pulse.width();
        let t2 = t1 + 20.0 * tau;
        let prod = kappa.value * engine.psi1(Channel::Transmit, t1)? * engine.psi1(Channel::Transmit, t2)?;
        let dev = (engine.psi2(ChannelPair::TT, t1, t2)? - prod).norm() / prod.norm();
        Ok(((kappa.value - SQRT_2).norm(), dev))
    };
    match run() {
        Ok((dk, dev)) => outcome(
            dk < 1e-3 && dev < 1e-3,
            format!("|kappa-sqrt2|={dk:.2e}/1e-3 dev(20 lifetimes)={dev:.2e}/1e-3"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c7_coherent() -> Outcome {
    // bare decay 1 per pulse width, decoupled at φ0 = π
    let g = (1.0 / (4.0 * PI)).sqrt();
    let params = SystemParams::symmetric(g, PI, 0.0).unwrap();
    let pulse = GaussianPulse::unit();
    let axis = default_axis(&pulse);
    let run = || -> giant_atom::Result<(f64, f64)> {
        let engine = Engine::new(params, pulse, QuadSpec::default())?;
        let grid = engine.compute_grid(ChannelPair::TT, &axis, &axis, None)?;
        let max_c2 = grid.c2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_ii = grid.intensity_product.iter().fold(0.0f64, |m, v| m.max(*v));
        let mut dev = 0.0f64;
        let mut peak = 0.0f64;
        for &t in &axis {
            let f = pulse.temporal_profile(t);
            dev = dev.max((engine.psi1(Channel::Transmit, t)? - f).norm());
            peak = peak.max(f.norm());
        }
        Ok((max_c2 / max_ii, dev / peak))
    };
    match run() {
        Ok((c, p)) => outcome(
            c < 1e-12 && p < 1e-8,
            format!("max|c2|/max(I*I)={c:.2e}/1e-12 psi1 vs profile={p:.2e}/1e-8 grid=201^2"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c8_fig3() -> Outcome {
    let pulse = GaussianPulse::unit();
    let axis = default_axis(&pulse);
    let start = Instant::now();
    let res = Engine::new(fig3_params(), pulse, QuadSpec::default())
        .and_then(|e| e.compute_grid(ChannelPair::TT, &axis, &axis, None));
    let elapsed = start.elapsed();
    let o = match res {
        Ok(grid) => {
            let trace = grid.diagonal().unwrap();
            let eps = 1e-3 * trace.max_c2().abs().max(trace.min_c2().abs());
            let signs = trace.lobe_signs(eps);
            outcome(
                signs == [-1, 1, -1] && grid.masked_count() == 0,
                format!("lobes={signs:?} masked={} grid={}^2", grid.masked_count(), axis.len()),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    };
    within(elapsed, 300.0, o)
}

fn c9_fig4() -> Outcome {
    let pulse = GaussianPulse::unit();
    let axis = default_axis(&pulse);
    match ratio_sweep(&fig3_params(), &pulse, &[0.3, 1.0, 3.0], ChannelPair::TT, &axis, &QuadSpec::default()) {
        Ok(points) => {
            let peaks: Vec<f64> = points.iter().map(|p| p.trace.max_c2()).collect();
            let increasing = peaks.windows(2).all(|w| w[1] > w[0]);
            let shown: Vec<String> = peaks.iter().map(|v| format!("{v:.4e}")).collect();
            let last = &points[2].trace;
            let suppression = last.min_c2().abs() / last.max_c2();
            outcome(
                increasing && suppression < 0.05,
                format!("peaks=[{}] |min|/max at ratio 3={suppression:.3e}/0.05", shown.join(", ")),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c10_fig5() -> Outcome {
    let pulse = GaussianPulse::unit();
    let phis = linspace(0.0, TAU, 73);
    let dts = linspace(-2.0, 2.0, 81);
    let map = match phase_sweep(&fig3_params(), &pulse, 3.0, &phis, -0.5, &dts, ChannelPair::TT, &QuadSpec::default()) {
        Ok(m) => m,
        Err(e) => return outcome(false, e.to_string()),
    };
    let n = phis.len();
    let scale = map.c2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let at_pi = map.diagonal[n / 2];
    let asym = (0..n)
        .map(|i| (map.diagonal[i] - map.diagonal[n - 1 - i]).abs())
        .fold(0.0f64, f64::max);
    let inner = &map.diagonal[1..n - 1];
    let eps = 0.01 * inner.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seq = regime_sequence(inner, eps);
    use Regime::*;
    let expected = [Bunching, Antibunching, Coherent, Antibunching, Bunching];
    outcome(
        (phis[n / 2] - PI).abs() < 1e-15 && at_pi.abs() < 1e-12 * scale && asym < 1e-9 && seq == expected,
        format!(
            "c2(pi)/scale={:.2e}/1e-12 asymmetry={asym:.2e}/1e-9 regimes={seq:?}",
            at_pi.abs() / scale
        ),
    )
}

fn c11_reflection() -> Outcome {
    let pulse = GaussianPulse::unit();
    let axis = default_axis(&pulse);
    // the ratio-1 point is the Fig. 3 configuration
    let ratios = [0.1, 0.5, 1.0, 2.0, 3.0];
    match ratio_sweep(&fig3_params(), &pulse, &ratios, ChannelPair::RR, &axis, &QuadSpec::default()) {
        Ok(points) => {
            let worst = points.iter().map(|p| p.trace.max_c2()).fold(f64::NEG_INFINITY, f64::max);
            let deepest = points.iter().map(|p| p.trace.min_c2()).fold(f64::INFINITY, f64::min);
            outcome(
                worst <= 1e-10,
                format!("ratios={ratios:?} max diag c2={worst:.2e}/1e-10 min={deepest:.3e}"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_giant-atom");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let config = dirs[0].path().join("fig3.toml");
    let recipe = Command::new(bin).args(["recipes", "show", "fig3"]).output().unwrap();
    std::fs::write(&config, &recipe.stdout).unwrap();
    for d in &dirs {
        let out = d.path().join("out");
        let status = Command::new(bin)
            .arg("run")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, String::from_utf8_lossy(&status.stderr).into_owned());
        }
    }
    let csvs = |p: &Path| -> Vec<(String, Vec<u8>)> {
        let mut v: Vec<_> = std::fs::read_dir(p)
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
            .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
            .collect();
        v.sort();
        v
    };
    let a = csvs(&dirs[0].path().join("out"));
    let b = csvs(&dirs[1].path().join("out"));
    let bytes: usize = a.iter().map(|(_, d)| d.len()).sum();
    outcome(
        !a.is_empty() && a == b,
        format!("files={} bytes={bytes} identical={}", a.len(), a == b),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("unitarity", c1_unitarity),
        ("direction symmetry", c2_direction_symmetry),
        ("small-atom reduction", c3_small_atom),
        ("contour identity", c4_contour),
        ("algebraic identities", c5_identities),
        ("factorization limit", c6_factorization),
        ("coherent point", c7_coherent),
        ("bunching/antibunching dynamics", c8_fig3),
        ("bunching grows with width", c9_fig4),
        ("phase control", c10_fig5),
        ("reflection antibunching", c11_reflection),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        println!(
            "{} {:>2} {:<32} {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
