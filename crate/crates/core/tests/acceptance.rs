//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use helix_sturm::config::preset_config;
use helix_sturm::output::scan_csv;
use helix_sturm::{
    lowest_eigenpairs, scan_density, scan_spectrum, solve_bound_states, EigenRequest, Parameter,
    PhysicalParams, PotentialModel, ProblemSpec, RadialGrid, RunConfig, ScanAxis, ScanOptions,
    TridiagonalOperator,
};

const C1_TOL: f64 = 1e-12;
const C1_LIMIT: Duration = Duration::from_millis(1);
const C2_REL_TOL: f64 = 1e-5;
const C2_ORDER: (f64, f64) = (1.9, 2.1);
const C2_LIMIT: Duration = Duration::from_secs(1);
const C3_TOL: f64 = 1e-4;
const C3_LIMIT: Duration = Duration::from_secs(5);
const C4_TOL: f64 = 1e-4;
const C4_LIMIT: Duration = Duration::from_secs(5);
const C5_REL_TOL: f64 = 1e-3;
const C5_LIMIT: Duration = Duration::from_secs(10);
const C6_TOL: f64 = 1e-6;
const C6_LIMIT: Duration = Duration::from_secs(30);
const C7_LIMIT: Duration = Duration::from_secs(300);
/// Two independent solves of the same level agree to this relative width.
const LADDER_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let res = f();
    let dt = t.elapsed();
    let res = res.map_err(|e| format!("{e} ({dt:.2?})"))?;
    if dt > limit {
        return Err(format!("{res}; took {dt:.2?}, limit {limit:?}"));
    }
    Ok(format!("{res} ({dt:.2?})"))
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn criterion_1() -> Outcome {
    timed(C1_LIMIT, || {
        let t = TridiagonalOperator::from_bands(vec![2.0; 3], vec![-1.0; 2]).map_err(e)?;
        let pairs = lowest_eigenpairs(&t, &EigenRequest::new(3)).map_err(e)?;
        let exact = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        let err = pairs
            .iter()
            .zip(exact)
            .map(|(p, x)| (p.lambda - x).abs())
            .fold(0.0, f64::max);
        ensure(err < C1_TOL, format!("max error {err:e}"))?;
        Ok(format!("max error {err:.1e}"))
    })
}

/// `-f''` on `[0, 1]` with `N` intervals, assembled on the interior nodes.
fn box_levels(n: usize) -> Result<Vec<f64>, String> {
    let h = 1.0 / n as f64;
    let t = TridiagonalOperator::from_bands(vec![2.0 / (h * h); n - 1], vec![-1.0 / (h * h); n - 2])
        .map_err(e)?;
    Ok(lowest_eigenpairs(&t, &EigenRequest::new(3))
        .map_err(e)?
        .into_iter()
        .map(|p| p.lambda)
        .collect())
}

fn criterion_2() -> Outcome {
    timed(C2_LIMIT, || {
        let l500 = box_levels(500)?;
        let l1000 = box_levels(1000)?;
        let l2000 = box_levels(2000)?;
        let mut worst = 0.0f64;
        let mut orders = Vec::new();
        for n in 0..3 {
            let exact = ((n + 1) as f64 * PI).powi(2);
            worst = worst.max(((l1000[n] - exact) / exact).abs());
            orders.push(((l500[n] - l1000[n]) / (l1000[n] - l2000[n])).abs().log2());
        }
        ensure(worst < C2_REL_TOL, format!("relative error {worst:e}"))?;
        ensure(
            orders.iter().all(|p| (C2_ORDER.0..=C2_ORDER.1).contains(p)),
            format!("orders {orders:.4?}"),
        )?;
        Ok(format!("rel error {worst:.2e}, orders {orders:.4?}"))
    })
}

fn criterion_3() -> Outcome {
    let oracle = common::airy_first_root();
    timed(C3_LIMIT, || {
        let g = RadialGrid::new(1e-6, 40.0, 8000).map_err(e)?;
        let s = solve_bound_states(&ProblemSpec::with_u(|r| r, g, 1)).map_err(e)?;
        let err = (s.lambdas[0] - oracle).abs();
        ensure(err < C3_TOL, format!("λ₁ {} vs {oracle}", s.lambdas[0]))?;
        Ok(format!("λ₁ = {:.9} (oracle {oracle:.9})", s.lambdas[0]))
    })
}

fn criterion_4() -> Outcome {
    timed(C4_LIMIT, || {
        let g = RadialGrid::new(1e-6, 12.0, 6000).map_err(e)?;
        let s = solve_bound_states(&ProblemSpec::with_u(|r| r * r, g, 3)).map_err(e)?;
        let err = s
            .lambdas
            .iter()
            .zip([3.0, 7.0, 11.0])
            .map(|(l, x)| (l - x).abs())
            .fold(0.0, f64::max);
        ensure(err < C4_TOL, format!("λ {:?}", s.lambdas))?;
        Ok(format!("max error {err:.2e}"))
    })
}

fn criterion_5() -> Outcome {
    let exact = common::kratzer_lambda(0, 1.0, 1.0, 1);
    timed(C5_LIMIT, || {
        let params = PhysicalParams {
            e: 0.0,
            k: 0.0,
            ..PhysicalParams::default()
        };
        let model = PotentialModel::Kratzer {
            range: 1.0,
            depth: 1.0,
        };
        let g = RadialGrid::new(1e-4, 60.0, 12000).map_err(e)?;
        let s = solve_bound_states(&ProblemSpec::new(params, 1, model, g, 1)).map_err(e)?;
        let rel = ((s.lambdas[0] - exact) / exact).abs();
        ensure(rel < C5_REL_TOL, format!("λ₀ {} vs {exact}", s.lambdas[0]))?;
        Ok(format!("λ₀ = {:.6} (closed form {exact:.6}), rel {rel:.1e}", s.lambdas[0]))
    })
}

fn criterion_6() -> Outcome {
    use Parameter::*;
    let gauge = [Omega, B0, PhiB];
    let cases = [
        (PotentialModel::Free, vec![]),
        (
            PotentialModel::Cornell {
                coulomb: 1.0,
                linear: 0.02,
            },
            vec![CornellA, CornellB],
        ),
        (
            PotentialModel::Kratzer {
                range: 1.0,
                depth: 1.0,
            },
            vec![KratzerA, KratzerD],
        ),
        (
            PotentialModel::MorseSmall {
                depth: 1.0,
                stiffness: 0.3,
                r0: 5.0,
            },
            vec![MorseD, MorseA, MorseR0],
        ),
    ];
    timed(C6_LIMIT, || {
        let params = PhysicalParams {
            b0: 0.5,
            phi_b: 0.5,
            ..PhysicalParams::default()
        };
        let g = RadialGrid::new(1e-3, 20.0, 2000).map_err(e)?;
        let mut checked = 0;
        let mut worst = 0.0f64;
        for (model, own) in cases {
            let spec = ProblemSpec::new(params, 1, model, g, 1);
            let base = solve_bound_states(&spec).map_err(e)?;
            let scale = base.lambdas[0].abs().max(1.0);
            for param in gauge.iter().chain(&own).copied() {
                let p0 = param.get(&spec.params, spec.m, &model).ok_or("parameter")?;
                let lam = |h: f64| -> Result<f64, String> {
                    let s = spec.with_parameter(param, p0 + h).map_err(e)?;
                    Ok(solve_bound_states(&s).map_err(e)?.lambdas[0])
                };
                let h = 1e-2 * p0.abs().max(1.0);
                let d = |h: f64| -> Result<f64, String> { Ok((lam(h)? - lam(-h)?) / (2.0 * h)) };
                let fd = (4.0 * d(h / 2.0)? - d(h)?) / 3.0;
                let hf = base.dlambda_dparam(0, param).ok_or("no derivative")?;
                let gap = (fd - hf).abs() / scale;
                worst = worst.max(gap);
                ensure(
                    gap < C6_TOL,
                    format!("{} {param}: fd {fd} vs {hf}", model.name()),
                )?;
                checked += 1;
            }
        }
        Ok(format!("{checked} derivatives, worst scaled gap {worst:.1e}"))
    })
}

fn preset_spec(name: &str) -> Result<(RunConfig, ProblemSpec), String> {
    let cfg = preset_config(name).map_err(e)?;
    let spec = cfg.problem_spec().map_err(e)?;
    Ok((cfg, spec))
}

fn trend_scan(
    name: &str,
    parameter: Parameter,
    values: Vec<f64>,
) -> Result<helix_sturm::ScanResult, String> {
    let (cfg, spec) = preset_spec(name)?;
    let axis = ScanAxis::new(parameter, values).map_err(e)?;
    let res = scan_spectrum(&spec, &axis, &cfg.sectors(), cfg.levels, &ScanOptions::default())
        .map_err(e)?;
    ensure(res.failures.is_empty(), format!("{name}: {:?}", res.failures))?;
    Ok(res)
}

fn monotone(res: &helix_sturm::ScanResult, increasing: bool) -> Result<(), String> {
    for m in res.m_values() {
        for n in 0..res.levels {
            let b = res.branch(m, n);
            let ok = b.windows(2).all(|w| {
                if increasing {
                    w[1].1 > w[0].1
                } else {
                    w[1].1 < w[0].1
                }
            });
            ensure(ok, format!("branch m={m} n_r={n}: {b:?}"))?;
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    timed(C7_LIMIT, || {
        let mut failed = Vec::new();
        let mut record = |label: &str, r: Result<String, String>| match r {
            Ok(_) => {}
            Err(msg) => failed.push(format!("{label}: {msg}")),
        };

        record(
            "fig7",
            trend_scan(
                "fig7",
                Parameter::CornellB,
                vec![0.0, 0.02, 0.04, 0.06, 0.08],
            )
            .and_then(|r| monotone(&r, true))
            .map(|_| String::new()),
        );

        record(
            "fig9",
            trend_scan("fig9", Parameter::KratzerA, vec![0.4, 0.8, 1.2, 1.6, 2.0]).and_then(|r| {
                let b: Vec<f64> = r.branch(0, 0).into_iter().map(|p| p.1).collect();
                let (imin, _) = b
                    .iter()
                    .enumerate()
                    .min_by(|x, y| x.1.total_cmp(y.1))
                    .ok_or("empty branch")?;
                ensure(
                    imin > 0 && imin + 1 < b.len(),
                    format!("E_0(m=0) has no interior minimum: {b:.6?}"),
                )?;
                Ok(String::new())
            }),
        );

        record(
            "fig10",
            trend_scan(
                "fig10",
                Parameter::KratzerD,
                vec![0.5, 0.875, 1.25, 1.625, 2.0],
            )
            .and_then(|r| monotone(&r, false))
            .map(|_| String::new()),
        );

        record("fig2/3 ladders", ladder_check());

        for name in ["fig4", "fig8", "fig11", "fig15"] {
            record(name, node_check(name));
        }

        if failed.is_empty() {
            Ok("fig7, fig9, fig10, fig2/3 ladders, fig4/8/11/15 nodes".into())
        } else {
            Err(failed.join("; "))
        }
    })
}

fn ladder_check() -> Outcome {
    let (_, base) = preset_spec("fig2")?;
    let ladder = |spec: &ProblemSpec, m: i32| -> Result<Vec<f64>, String> {
        let mut s = spec.clone();
        s.m = m;
        Ok(solve_bound_states(&s).map_err(e)?.energies)
    };
    let gap = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
            .fold(0.0, f64::max)
    };
    for omega in [0.5, 1.0, 2.0] {
        let spec = base.with_parameter(Parameter::Omega, omega).map_err(e)?;
        let coupled = gap(&ladder(&spec, 1)?, &ladder(&spec, -1)?);
        ensure(
            coupled > LADDER_TOL,
            format!("ω={omega}: m=±1 coincide ({coupled:e})"),
        )?;
        let mut off = spec.clone();
        off.params.e = 0.0;
        off.params.k = 0.0;
        let decoupled = gap(&ladder(&off, 1)?, &ladder(&off, -1)?);
        ensure(
            decoupled <= LADDER_TOL,
            format!("ω={omega}, e=k=0: m=±1 differ by {decoupled:e}"),
        )?;
    }
    Ok(String::new())
}

fn node_check(name: &str) -> Outcome {
    let (cfg, spec) = preset_spec(name)?;
    let d = cfg.density.as_ref().ok_or("preset without a density table")?;
    let res = scan_density(&spec, &d.omegas, &d.n_r, None).map_err(e)?;
    ensure(res.failures.is_empty(), format!("{:?}", res.failures))?;
    ensure(
        res.curves.len() == d.omegas.len() * d.n_r.len(),
        "missing curves".into(),
    )?;
    for c in &res.curves {
        ensure(
            c.nodes == c.n_r,
            format!("ω={} n_r={} has {} nodes", c.omega, c.n_r, c.nodes),
        )?;
    }
    Ok(String::new())
}

fn criterion_8() -> Outcome {
    let mut failed = Vec::new();
    let mut total = 0;
    for name in ["fig2", "fig7"] {
        let (cfg, spec) = preset_spec(name)?;
        let axis = cfg.scan.clone().ok_or("preset without a scan table")?;
        let options = ScanOptions {
            workers: None,
            convergence: Some(cfg.convergence.settings()),
        };
        let res = scan_spectrum(&spec, &axis, &cfg.sectors(), cfg.levels, &options).map_err(e)?;
        total += res.rows.len();
        let mut bad: Vec<(i32, usize)> = res
            .rows
            .iter()
            .filter(|r| r.converged != Some(true))
            .map(|r| (r.m, r.n_r))
            .collect();
        let count = bad.len();
        bad.sort_unstable();
        bad.dedup();
        if count > 0 {
            failed.push(format!(
                "{name}: {count}/{} rows unconverged, (m, n_r) in {bad:?}",
                res.rows.len()
            ));
        }
    }
    if failed.is_empty() {
        Ok(format!("{total} rows converged at tol_rel 1e-6"))
    } else {
        Err(failed.join("; "))
    }
}

fn criterion_9() -> Outcome {
    let (cfg, spec) = preset_spec("fig5")?;
    let axis = cfg.scan.clone().ok_or("preset without a scan table")?;
    let run = |w: usize| -> Result<String, String> {
        let options = ScanOptions {
            workers: Some(w),
            convergence: None,
        };
        let res = scan_spectrum(&spec, &axis, &cfg.sectors(), cfg.levels, &options).map_err(e)?;
        Ok(scan_csv(&res))
    };
    let bodies = [run(1)?, run(1)?, run(4)?, run(4)?];
    ensure(
        bodies.iter().all(|b| *b == bodies[0]),
        "scan CSV bodies differ".into(),
    )?;
    Ok(format!(
        "{} rows identical across runs and workers {{1, 4}}",
        bodies[0].lines().count() - 1
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("discrete Laplacian 3x3", criterion_1),
        ("particle in a box", criterion_2),
        ("Airy linear well", criterion_3),
        ("half-line oscillator", criterion_4),
        ("Kratzer closed form", criterion_5),
        ("Hellmann-Feynman", criterion_6),
        ("figure trends", criterion_7),
        ("convergence protocol", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
