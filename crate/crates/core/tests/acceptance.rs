// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use adiabat::evolve::{build_aeo, coefficients, error_norm, propagate_deo_with, Stepper};
use adiabat::linalg::Mat2;
use adiabat::model::{HamiltonianSpec, TimeGrid};
use adiabat::qaa::{
    bar_bounds_trace, dyson_first_order, first_kind_overlap, interaction_hamiltonian,
    interaction_unitary, second_kind_magnitude, xx_integral_trace,
};
use adiabat::rotating::{analytic_interaction_unitary, dr_report, RotatingParams};
use adiabat::scaling::{max_adiabatic_error, sweep_error_vs_t, theorem2_min_time, StepPolicy};
use adiabat::spectral::{build_frame, hellmann_feynman_residual, EigenFrame, DEFAULT_GAP_MIN};
use adiabat::evolve::UnitaryTrace;

use common::{even_steps, lz, random_linear, rng};

type Outcome = Result<String, String>;

const ROTATING: [(f64, f64); 3] = [(1.0, 0.01), (1.0, 0.1), (2.0, 0.3)];

struct RotatingRun {
    p: RotatingParams,
    frame: EigenFrame,
    ud: UnitaryTrace,
    ua: UnitaryTrace,
}

fn rotating_run(w0: f64, w: f64) -> RotatingRun {
    let p = RotatingParams::new(w0, w).unwrap();
    let t_final = 50.0 / w0;
    let dt = 1e-3 / w0.max(p.omega_bar());
    let grid = TimeGrid::new_even(t_final, even_steps(t_final, dt)).unwrap();
    let spec = HamiltonianSpec::rotating(w0, w).unwrap();
    let frame = build_frame(&spec, &grid).unwrap();
    let ud = propagate_deo_with(&spec, &grid, Stepper::Magnus4).unwrap();
    let ua = build_aeo(&frame).unwrap();
    RotatingRun { p, frame, ud, ua }
}

fn criterion1(runs: &[RotatingRun]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in runs {
        for k in 0..r.frame.len() {
            let t = r.frame.grid().point(k);
            let num = interaction_unitary(&r.ud, &r.ua, &r.frame, k).unwrap();
            worst = worst.max(num.max_abs_diff(&analytic_interaction_unitary(&r.p, t)));
        }
    }
    let msg = format!("max |numeric - closed form| = {worst:.3e} (tol 1e-6)");
    if worst <= 1e-6 { Ok(msg) } else { Err(msg) }
}

fn criterion2(runs: &[RotatingRun]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in runs {
        let mag = second_kind_magnitude(&r.ud, &r.frame, 1).unwrap();
        for (k, m) in mag.iter().enumerate() {
            let t = r.frame.grid().point(k);
            let want = dr_report(&r.p, t).second_kind_deviation;
            worst = worst.max(((1.0 - m * m) - want).abs());
        }
    }
    let msg = format!("max |(1 - mag^2) - closed form| = {worst:.3e} (tol 1e-8)");
    if worst <= 1e-8 { Ok(msg) } else { Err(msg) }
}

fn criterion3() -> Outcome {
    let (w0, w) = (1.0, 0.05);
    let p = RotatingParams::new(w0, w).unwrap();
    let t_final = PI * (p.omega_bar() + w0) / (w * w);
    let grid = TimeGrid::new_even(t_final, even_steps(t_final, 1e-2)).unwrap();
    let spec = HamiltonianSpec::rotating(w0, w).unwrap();
    let frame = build_frame(&spec, &grid).unwrap();
    let ud = propagate_deo_with(&spec, &grid, Stepper::Magnus4).map_err(|e| e.to_string())?;
    let ua = build_aeo(&frame).unwrap();
    let k = grid.steps();
    let ovl = first_kind_overlap(&ud, &ua, &frame, 1).unwrap()[k];
    let mag = second_kind_magnitude(&ud, &frame, 1).unwrap()[k];
    let oracle = analytic_interaction_unitary(&p, t_final)[(0, 0)];
    let dev = (ovl - oracle).norm().max((mag - oracle.norm()).abs());
    let msg = format!(
        "t = {t_final:.4}: mag = {mag:.6} (oracle {:.6}), Re ovl = {:.6} (oracle {:.6}), deviation {dev:.2e}",
        oracle.norm(),
        ovl.re,
        oracle.re
    );
    let ok = mag >= 0.998
        && ovl.re <= -0.99
        && oracle.norm() >= 0.998
        && oracle.re <= -0.99
        && dev <= 5e-3;
    if ok { Ok(msg) } else { Err(msg) }
}

/// Worst `|c₁(t) − c₁(0)| − (Ā + B̄ + C̄)` over the grid, with `ψ₀ = |1₀⟩`.
fn dominance_excess(spec: &HamiltonianSpec, grid: &TimeGrid) -> f64 {
    let frame = build_frame(spec, grid).unwrap();
    let ud = propagate_deo_with(spec, grid, Stepper::Magnus4).unwrap();
    let psi0 = frame.eigenvector(1, 0).unwrap();
    let c = coefficients(&ud, &frame, &psi0).unwrap();
    let c1 = c.level(1).unwrap();
    bar_bounds_trace(&frame)
        .iter()
        .zip(c1)
        .map(|(b, c)| (c - c1[0]).norm() - b.sum())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion4(runs: &[RotatingRun]) -> Outcome {
    let mut excess = f64::NEG_INFINITY;
    let mut closed_form: f64 = 0.0;
    for r in runs {
        let (w0, w) = (r.p.omega0(), r.p.omega());
        let spec = HamiltonianSpec::rotating(w0, w).unwrap();
        excess = excess.max(dominance_excess(&spec, r.frame.grid()));
        for (k, b) in bar_bounds_trace(&r.frame).iter().enumerate() {
            let t = r.frame.grid().point(k);
            closed_form = closed_form.max((b.sum() - dr_report(&r.p, t).dr6_bound).abs());
        }
    }
    let mut g = rng(4);
    for _ in 0..5 {
        let spec = random_linear(&mut g, 1.0, 0.3, 20.0);
        let grid = TimeGrid::new_even(20.0, 4000).unwrap();
        excess = excess.max(dominance_excess(&spec, &grid));
    }
    let msg = format!(
        "max excess over bound = {excess:.3e} (tol 1e-6), rotating closed-form mismatch = {closed_form:.3e} (tol 1e-6)"
    );
    if excess <= 1e-6 && closed_form <= 1e-6 { Ok(msg) } else { Err(msg) }
}

fn criterion5() -> Outcome {
    let mut g = rng(5);
    let families = [
        ("LZ", lz(1.0)),
        ("random A", random_linear(&mut g, 1.0, 0.5, 1.0)),
        ("random B", random_linear(&mut g, 1.0, 0.5, 1.0)),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, spec) in &families {
        for delta in [0.1, 0.03, 0.01] {
            let report = theorem2_min_time(spec, delta).map_err(|e| e.to_string())?;
            let t = report.t_min;
            let run = spec.scaled(t).unwrap();
            // Keep the grid near 4e5 points for the longest runs.
            let policy = StepPolicy {
                dt: (t / 4e5).max(1e-2),
                ..StepPolicy::default()
            };
            let frame0 = build_frame(&run, &TimeGrid::new_even(t, 2).unwrap()).unwrap();
            let mut worst: f64 = 0.0;
            for m in [1, 2] {
                let psi0 = frame0.eigenvector(m, 0).unwrap();
                let err = max_adiabatic_error(&run, t, &psi0, &policy, DEFAULT_GAP_MIN)
                    .map_err(|e| e.to_string())?;
                worst = worst.max(err);
            }
            ok &= worst <= delta;
            lines.push(format!("{name} delta={delta}: tMin={t:.1} err={worst:.2e}"));
        }
    }
    let msg = lines.join("; ");
    if ok { Ok(msg) } else { Err(msg) }
}

fn criterion6() -> Outcome {
    let spec = lz(1.0);
    let t_list = [10.0, 20.0, 40.0, 80.0, 160.0];
    let coeff = theorem2_min_time(&spec, 1.0).unwrap().error_coeff;
    let frame0 = build_frame(&spec, &TimeGrid::new_even(1.0, 2).unwrap()).unwrap();
    let mut ok = true;
    let mut lines = vec![format!("C = {coeff:.4}")];
    for (name, psi0) in [
        ("|1>", frame0.eigenvector(1, 0).unwrap()),
        ("|2>", frame0.eigenvector(2, 0).unwrap()),
        ("mix", (frame0.eigenvector(1, 0).unwrap() + frame0.eigenvector(2, 0).unwrap()).normalized()),
    ] {
        let rows = sweep_error_vs_t(&spec, &t_list, &psi0, &StepPolicy::default(), DEFAULT_GAP_MIN)
            .map_err(|e| e.to_string())?;
        let scaled: Vec<f64> = rows.iter().map(|r| r.max_error * r.total_time).collect();
        let worst = scaled.iter().copied().fold(0.0, f64::max);
        ok &= worst <= coeff * (1.0 + 1e-3);
        ok &= rows[4].max_error < rows[0].max_error;
        lines.push(format!(
            "{name}: max err*T = {worst:.4}, err(10) = {:.3e}, err(160) = {:.3e}",
            rows[0].max_error, rows[4].max_error
        ));
    }
    let msg = lines.join("; ");
    if ok { Ok(msg) } else { Err(msg) }
}

fn criterion7(runs: &[RotatingRun]) -> Outcome {
    let mut g = rng(7);
    let mut unitarity: f64 = 0.0;
    for r in runs {
        unitarity = unitarity.max(r.ud.unitarity_defect()).max(r.ua.unitarity_defect());
    }

    let mut mm: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let mut dyson: f64 = 0.0;
    for _ in 0..100 {
        use rand::Rng;
        let t = g.gen_range(1.0..30.0);
        let spec = random_linear(&mut g, 1.0, 0.2, t);
        let grid = TimeGrid::new_even(t, 400).unwrap();
        let frame = build_frame(&spec, &grid).unwrap();
        let ud = propagate_deo_with(&spec, &grid, Stepper::Magnus4).unwrap();
        let ua = build_aeo(&frame).unwrap();
        unitarity = unitarity.max(ud.unitarity_defect()).max(ua.unitarity_defect());
        let psi0 = common::random_ket(&mut g);
        let e = error_norm(&ud, &ua, &frame, &psi0).unwrap();
        for (a, b) in e.direct.iter().zip(&e.from_coefficients) {
            mm = mm.max((a - b).abs());
        }
        let xx = xx_integral_trace(&frame, 1, 2).unwrap();
        for k in 0..grid.len() {
            herm = herm.max(interaction_hamiltonian(&frame, k).unwrap().hermitian_defect());
        }
        for k in [0, grid.steps() / 3, grid.steps()] {
            let d: Mat2 = dyson_first_order(&frame, k).unwrap();
            dyson = dyson.max((d[(0, 1)].norm() - xx[k].norm()).abs());
        }
    }

    let mut hf: f64 = 0.0;
    for spec in [lz(10.0), random_linear(&mut g, 1.0, 0.3, 10.0)] {
        let frame = build_frame(&spec, &TimeGrid::new_even(10.0, 2000).unwrap()).unwrap();
        hf = hf.max(hellmann_feynman_residual(&frame, &spec).unwrap());
    }

    let ok = unitarity <= 1e-10 && mm <= 1e-9 && hf <= 1e-5 && herm <= 1e-10 && dyson <= 1e-12;
    let msg = format!(
        "unitarity {unitarity:.2e}, two-formula {mm:.2e}, HF {hf:.2e}, H~ hermiticity {herm:.2e}, dyson vs xx {dyson:.2e}"
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn criterion8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_adiabat");
    let config = |out: &str| {
        format!(
            r#"{{
  "hamiltonian": {{ "family": "linear_interp",
                   "h0": [[[-1,0],[0,0]],[[0,0],[1,0]]],
                   "h1": [[[0,0],[1,0]],[[1,0],[0,0]]] }},
  "schedule": {{ "kind": "scaled", "T": 20.0, "steps": 2000 }},
  "initial_state": "eigenstate:2",
  "output": "{out}"
}}"#
        )
    };
    let commands: [(&str, &[&str]); 4] = [
        ("simulate", &[]),
        ("diagnose", &[]),
        ("bound", &["--delta", "0.1"]),
        ("sweep", &["--T", "10,20"]),
    ];
    let mut checked = Vec::new();
    for (cmd, extra) in commands {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{cmd}-{rep}.csv"));
            let cfg = dir.path().join(format!("{cmd}-{rep}.json"));
            std::fs::write(&cfg, config(&out.display().to_string())).map_err(|e| e.to_string())?;
            let status = Command::new(bin)
                .arg(cmd)
                .arg("--config")
                .arg(&cfg)
                .args(extra)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "{cmd} failed: {}",
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            outputs.push((std::fs::read(&out).map_err(|e| e.to_string())?, status.stdout));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{cmd}: outputs differ between runs"));
        }
        checked.push(format!("{cmd} ({} bytes)", outputs[0].0.len()));
    }
    Ok(format!("byte-identical: {}", checked.join(", ")))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let runs: Vec<RotatingRun> = ROTATING.iter().map(|&(w0, w)| rotating_run(w0, w)).collect();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 closed-form equivalence", criterion1(&runs)),
        ("2 second-kind identity", criterion2(&runs)),
        ("3 two-kinds separation", criterion3()),
        ("4 bound dominance", criterion4(&runs)),
        ("5 minimal-time soundness", criterion5()),
        ("6 1/T envelope", criterion6()),
        ("7 structural invariants", criterion7(&runs)),
        ("8 CLI determinism", criterion8()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
