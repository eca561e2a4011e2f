//! Acceptance criteria, one printed PASS/FAIL line per check.
//!
//! Runs without the libtest harness so every line is printed whether or not
//! it passes; the process exits non-zero if any check fails.

use std::process::{Command as Process, ExitCode};
use std::time::Instant;

use esdlab_core::channels::{
    apply_channel, composite_kraus, damp, qubit_kraus, qutrit_kraus, KrausSet,
};
use esdlab_core::config::RunConfig;
use esdlab_core::dynamics::{
    classify, critical_x, death_point, regime_boundaries, CriticalX, Outcome, StageSchedule,
};
use esdlab_core::measures::negativity;
use esdlab_core::qla::{
    hermitian_eigenvalues, kron, partial_transpose, partial_transpose_matrix, realign, trace_norm,
    ComplexMatrix, DensityMatrix, Dims, Subsystem,
};
use esdlab_core::report::{execute, Cell, Command};
use esdlab_core::{DecayModel, Family, FlipOp, LocalUnitary, StateFamily, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;

struct Suite {
    passed: usize,
    failed: Vec<String>,
}

impl Suite {
    fn run(&mut self, id: &str, name: &str, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => {
                self.passed += 1;
                println!("PASS [{id}] {name}: {detail} ({secs:.1}s)");
            }
            Err(detail) => {
                self.failed.push(id.to_string());
                println!("FAIL [{id}] {name}: {detail} ({secs:.1}s)");
            }
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Check {
    let msg = format!("{label} = {got:.6}, expected {want} +/- {tol}");
    if (got - want).abs() <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reference(family: Family, op: (FlipOp, FlipOp)) -> StageSchedule {
    StageSchedule::reference(family).with_op(LocalUnitary::new(op.0, op.1))
}

fn uninterrupted_death(family: Family, want: f64) -> Check {
    let d = death_point(&StageSchedule::reference(family), &Tolerances::default())
        .map_err(err)?
        .p_prime
        .ok_or("negativity never vanishes")?;
    within("death p", d, want, 5e-4)
}

fn critical(family: Family, want: f64) -> Check {
    let model = DecayModel::default_for(family.dims());
    match critical_x(family, &model, &Tolerances::default()).map_err(err)? {
        CriticalX::Boundary(x) => within("critical x", x, want, 1e-3),
        other => Err(format!("no boundary inside the family range: {other:?}")),
    }
}

/// `delay_end = None` stands for "no hastening anywhere".
fn regimes(family: Family, op: (FlipOp, FlipOp), avoid_end: f64, delay_end: Option<f64>) -> Check {
    let b = regime_boundaries(&reference(family, op), 0.01, &Tolerances::default()).map_err(err)?;
    let a = b.avoid_end.ok_or("no avoidance interval")?;
    let mut detail = within("avoid_end", a, avoid_end, 2e-3);
    match delay_end {
        Some(want) => {
            let d = b.delay_end.ok_or("no delay interval")?;
            let second = within("delay_end", d, want, 2e-3);
            detail = match (detail, second) {
                (Ok(x), Ok(y)) => Ok(format!("{x}; {y}")),
                (Ok(x) | Err(x), Ok(y) | Err(y)) => Err(format!("{x}; {y}")),
            };
        }
        None => {
            let tail = if b.hasten_occurs {
                Err("hastening found".to_string())
            } else {
                Ok("no hastening".to_string())
            };
            detail = match (detail, tail) {
                (Ok(x), Ok(y)) => Ok(format!("{x}; {y}")),
                (Ok(x) | Err(x), Ok(y) | Err(y)) => Err(format!("{x}; {y}")),
            };
        }
    }
    detail
}

fn all_outcome(template: &StageSchedule, p_n_values: &[f64], want: Outcome) -> Check {
    let tol = Tolerances::default();
    let mut bad = Vec::new();
    for &p_n in p_n_values {
        let v = classify(&template.at(p_n), &tol).map_err(err)?;
        if v.outcome != want {
            bad.push(format!("{p_n:.2}:{}", v.outcome.letter()));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{} samples all {}",
            p_n_values.len(),
            want.letter()
        ))
    } else {
        let shown: Vec<_> = bad.iter().take(6).cloned().collect();
        Err(format!(
            "{} of {} samples differ, e.g. {}",
            bad.len(),
            p_n_values.len(),
            shown.join(" ")
        ))
    }
}

/// `k * 0.01` for `k >= 1` strictly below `end`.
fn open_grid(end: f64) -> Vec<f64> {
    (1..)
        .map(|k| k as f64 * 0.01)
        .take_while(|&p| p < end - 1e-12)
        .collect()
}

fn hasten_only(family: Family, op: (FlipOp, FlipOp), end: f64) -> Check {
    all_outcome(&reference(family, op), &open_grid(end), Outcome::Hasten)
}

/// The smaller eigenvalue of the coupled 2x2 block of the partially
/// transposed, damped state-I, written out element by element.
fn oracle_n(x: f64, p: f64) -> f64 {
    let (p1, p2) = (0.8 * p, 0.6 * p);
    let half_x = x / 2.0;
    let rest = (1.0 - 2.0 * x) / 2.0;
    // |00><00| gains from every populated level that can decay to it.
    let ground = half_x + rest * p + half_x * p1 + half_x * p * p1 + rest * p2 + half_x * p * p2;
    let top = half_x * (1.0 - p) * (1.0 - p2);
    let coherence = rest * ((1.0 - p) * (1.0 - p2)).sqrt();
    let mean = 0.5 * (ground + top);
    mean - (0.25 * (ground - top).powi(2) + coherence * coherence).sqrt()
}

fn oracle_equivalence() -> Check {
    let model = DecayModel::qubit_qutrit();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for x in [0.21, 0.25, 0.30] {
        let rho =
            esdlab_core::states::build_state(&StateFamily::new(Family::StateI, x).map_err(err)?)
                .map_err(err)?;
        for k in 0..100 {
            let p = k as f64 * 0.01;
            let n = oracle_n(x, p);
            let neg = negativity(&damp(&rho, p, &model).map_err(err)?).map_err(err)?;
            let lib = esdlab_core::states::closed_form_n(x, p, &model).map_err(err)?;
            if (lib - n).abs() > 1e-12 {
                return Err(format!(
                    "library closed form {lib} differs from oracle {n} at x={x}, p={p}"
                ));
            }
            let sign_ok = if n < -1e-12 {
                neg > 1e-12
            } else if n > 1e-12 {
                neg <= 1e-12
            } else {
                true
            };
            if !sign_ok {
                return Err(format!(
                    "sign disagreement at x={x}, p={p}: N={n:e}, negativity={neg:e}"
                ));
            }
            worst = worst.max((neg - (-n).max(0.0)).abs());
            count += 1;
        }
    }
    if worst <= 1e-9 {
        Ok(format!(
            "{count} points, max |negativity - max(0,-N)| = {worst:.2e}"
        ))
    } else {
        Err(format!("max deviation {worst:e} over {count} points"))
    }
}

const TABLE1: [(&str, &str, &str); 9] = [
    ("X(x)F01", "A, D, and H", "A, D, and H"),
    ("X(x)F02", "only H", "only H"),
    ("X(x)F102", "A, D, and H", "A, D, and H"),
    ("X(x)F201", "only H", "only H"),
    ("X(x)I", "only H", "A, D, and H"),
    ("I(x)F01", "only A and D", "only A and D"),
    ("I(x)F02", "only H", "A, D, and H"),
    ("I(x)F102", "only A and D", "only A and D"),
    ("I(x)F201", "only H", "A, D, and H"),
];

fn table1() -> Check {
    let table = execute(Command::Table1, &RunConfig::for_family(Family::StateI)).map_err(err)?;
    let text = |c: &Cell| match c {
        Cell::Text(s) => s.clone(),
        other => format!("{other:?}"),
    };
    let mut mismatches = Vec::new();
    for (row, (op, s1, s2)) in table.rows.iter().zip(TABLE1) {
        let got = (text(&row[0]), text(&row[1]), text(&row[2]));
        if got != (op.to_string(), s1.to_string(), s2.to_string()) {
            mismatches.push(format!("{got:?}"));
        }
    }
    if table.rows.len() != 9 {
        mismatches.push(format!("{} rows", table.rows.len()));
    }
    if mismatches.is_empty() {
        Ok("18 of 18 cells match".into())
    } else {
        Err(mismatches.join("; "))
    }
}

// Random inputs for the property checks.

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn density(d: Dims) -> impl Strategy<Value = DensityMatrix> {
    let n = d.total();
    complex_vec(n * n).prop_filter_map("degenerate draw", move |g| {
        let g = ComplexMatrix::new(n, n, g).ok()?;
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        (tr > 1e-3).then(|| DensityMatrix::new(d, m.scale(Complex64::new(1.0 / tr, 0.0))).unwrap())
    })
}

fn any_density() -> impl Strategy<Value = DensityMatrix> {
    prop_oneof![Just(Dims::QUBIT_QUTRIT), Just(Dims::QUTRIT_QUTRIT)].prop_flat_map(density)
}

fn normalized(v: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (norm > 1e-3).then(|| v.into_iter().map(|z| z / norm).collect())
}

fn unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_vec(n * n).prop_filter_map("rank-deficient draw", move |raw| {
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..n {
            let mut v: Vec<Complex64> = (0..n).map(|i| raw[i * n + j]).collect();
            for c in &cols {
                let overlap: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= overlap * ci;
                }
            }
            cols.push(normalized(v)?);
        }
        Some(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
    })
}

const CASES: u32 = 256;

fn property<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map(|()| format!("{CASES} cases"))
        .map_err(|e| match e {
            proptest::test_runner::TestError::Fail(why, _) => format!("counterexample: {why}"),
            other => other.to_string(),
        })
}

fn branch_channel(q: f64, q1: f64, q2: f64) -> KrausSet {
    let a = qubit_kraus(q).unwrap();
    let b = qutrit_kraus(q1, q2).unwrap();
    let ops = a
        .operators()
        .iter()
        .flat_map(|x| b.operators().iter().map(move |y| kron(x, y)))
        .collect();
    KrausSet::new(ops, Some(Dims::QUBIT_QUTRIT)).unwrap()
}

fn cli(args: &[String]) -> Result<Vec<u8>, String> {
    let out = Process::new(env!("CARGO_BIN_EXE_esdlab"))
        .args(args)
        .output()
        .map_err(err)?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn cli_config() -> impl Strategy<Value = Vec<String>> {
    let family = prop_oneof![
        Just(Family::StateI),
        Just(Family::StateII),
        Just(Family::TwoQutrit)
    ];
    (
        family,
        0.0..1.0f64,
        0usize..5,
        0usize..5,
        0.0..0.9f64,
        0usize..3,
        any::<bool>(),
    )
        .prop_map(|(family, t, ia, ib, pn, cmd, json)| {
            let (lo, hi) = family.range();
            let x = lo + (hi - lo) * (0.02 + 0.96 * t);
            let op_a = if family == Family::TwoQutrit {
                FlipOp::QUTRIT_OPS[ia]
            } else {
                FlipOp::QUBIT_OPS[ia % 2]
            };
            let command = ["evolve", "boundary", "surface"][cmd];
            let mut args = vec![
                command.to_string(),
                "--family".into(),
                family.name().into(),
                "--x".into(),
                format!("{x}"),
                "--op-a".into(),
                op_a.name().into(),
                "--op-b".into(),
                FlipOp::QUTRIT_OPS[ib].name().into(),
                "--pn".into(),
                format!("{pn}"),
                "--format".into(),
                if json { "json" } else { "csv" }.into(),
            ];
            if command == "surface" {
                args.extend(["--grid".into(), "6".into()]);
            }
            args
        })
}

fn cli_determinism() -> Check {
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let fixed: Vec<Vec<String>> = [
        "scan --family state-i --op-a X --op-b F01",
        "scan --family state-ii --op-a I --op-b F201 --format json",
        "surface --family two-qutrit --grid 21",
    ]
    .iter()
    .map(|s| s.split(' ').map(String::from).collect())
    .collect();
    for args in &fixed {
        let runs: Vec<Vec<u8>> = ["1", "2", "4"]
            .iter()
            .map(|w| {
                let mut a = args.clone();
                a.extend(["--workers".into(), w.to_string()]);
                cli(&a)
            })
            .collect::<Result<_, _>>()?;
        if runs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!(
                "{} output differs across worker counts",
                args.join(" ")
            ));
        }
    }
    runner
        .run(&cli_config(), |args| {
            let mut one = args.clone();
            one.extend(["--workers".into(), "1".into()]);
            let mut four = args.clone();
            four.extend(["--workers".into(), "4".into()]);
            let (a, b) = (cli(&one), cli(&four));
            prop_assert_eq!(&a, &b, "{:?}", args);
            prop_assert!(a.is_ok(), "{:?}", a);
            Ok(())
        })
        .map(|()| "3 fixed runs x 3 worker counts + 200 random configs, byte-identical".to_string())
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let mut s = Suite {
        passed: 0,
        failed: Vec::new(),
    };
    use FlipOp::*;

    s.run("1a", "state-i uninterrupted death", || {
        uninterrupted_death(Family::StateI, 0.6168)
    });
    s.run("1b", "state-ii uninterrupted death", || {
        uninterrupted_death(Family::StateII, 0.8452)
    });
    s.run("1c", "two-qutrit uninterrupted negativity death", || {
        uninterrupted_death(Family::TwoQutrit, 0.7596)
    });

    s.run("2a", "state-i asymptotic/sudden boundary in x", || {
        critical(Family::StateI, 0.20)
    });
    s.run("2b", "two-qutrit asymptotic/sudden boundary in x", || {
        critical(Family::TwoQutrit, 0.2281)
    });
    s.run("2c", "state-ii dies for every sampled x", || {
        let tol = Tolerances::default();
        let xs: Vec<f64> = std::iter::once(1.0 / 3.0 + 1e-4)
            .chain((34..=50).map(|k| k as f64 / 100.0))
            .collect();
        for &x in &xs {
            let st = StageSchedule::new(
                StateFamily::new(Family::StateII, x).map_err(err)?,
                DecayModel::qubit_qutrit(),
                LocalUnitary::IDENTITY,
                0.0,
            )
            .map_err(err)?;
            if death_point(&st, &tol).map_err(err)?.p_prime.is_none() {
                return Err(format!("no death at x={x}"));
            }
        }
        Ok(format!("{} values of x all die", xs.len()))
    });

    s.run("3a", "state-i X(x)F01 regimes", || {
        regimes(Family::StateI, (X, F01), 0.0615, Some(0.1641))
    });
    s.run("3b", "state-i I(x)F01 regimes", || {
        regimes(Family::StateI, (I, F01), 0.2941, None)
    });
    s.run("3c", "state-ii X(x)F01 regimes", || {
        regimes(Family::StateII, (X, F01), 0.3586, Some(0.4177))
    });
    s.run("3d", "state-ii X(x)I regimes", || {
        regimes(Family::StateII, (X, I), 0.2309, Some(0.2964))
    });
    s.run("3e", "state-ii I(x)F01 regimes", || {
        regimes(Family::StateII, (I, F01), 0.7143, None)
    });
    s.run("3f", "state-ii I(x)F02 regimes", || {
        regimes(Family::StateII, (I, F02), 0.2032, Some(0.2693))
    });
    s.run("3g", "state-ii I(x)F201 regimes", || {
        regimes(Family::StateII, (I, F201), 0.2059, Some(0.2676))
    });
    s.run("3h", "two-qutrit F01(x)I regimes", || {
        regimes(Family::TwoQutrit, (F01, I), 0.2306, None)
    });
    s.run("3i", "two-qutrit F01(x)F01 avoids over [0, 0.7596]", || {
        let samples: Vec<f64> = (0..=75).map(|k| k as f64 * 0.01).collect();
        all_outcome(
            &reference(Family::TwoQutrit, (F01, F01)),
            &samples,
            Outcome::Avoid,
        )
    });

    s.run("4", "summary table of flip outcomes", table1);
    s.run(
        "5",
        "closed-form oracle against the full pipeline",
        oracle_equivalence,
    );

    s.run("6a", "Kraus completeness", || {
        let dims = prop_oneof![Just(Dims::QUBIT_QUTRIT), Just(Dims::QUTRIT_QUTRIT)];
        property(
            (dims, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64),
            |(d, p, a, b)| {
                let model = DecayModel::new(1.0, a, b).unwrap();
                let r = composite_kraus(d, p, &model)
                    .unwrap()
                    .completeness_residual();
                prop_assert!(r <= 1e-12, "residual {}", r);
                Ok(())
            },
        )
    });
    s.run(
        "6b",
        "damped states stay unit-trace, Hermitian, positive",
        || {
            property((any_density(), 0.0..=1.0f64), |(rho, p)| {
                let out = damp(&rho, p, &DecayModel::default_for(rho.dims())).unwrap();
                let m = out.matrix();
                prop_assert!((m.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
                prop_assert!(m.hermiticity_deviation() <= 1e-12);
                prop_assert!(hermitian_eigenvalues(m).unwrap().min() >= -1e-12);
                Ok(())
            })
        },
    );
    s.run("6c", "negativity invariant under local unitaries", || {
        property(
            (density(Dims::QUBIT_QUTRIT), unitary(2), unitary(3)),
            |(rho, ua, ub)| {
                let moved = kron(&ua, &ub).conjugate(rho.matrix()).unwrap();
                let moved = DensityMatrix::new(Dims::QUBIT_QUTRIT, moved).unwrap();
                let gap = (negativity(&moved).unwrap() - negativity(&rho).unwrap()).abs();
                prop_assert!(gap <= 1e-10, "gap {}", gap);
                Ok(())
            },
        )
    });
    s.run("6d", "partial transpose is an involution", || {
        property((any_density(), any::<bool>()), |(rho, on_b)| {
            let side = if on_b { Subsystem::B } else { Subsystem::A };
            let twice = partial_transpose_matrix(&partial_transpose(&rho, side), rho.dims(), side);
            prop_assert_eq!(&twice, rho.matrix());
            Ok(())
        })
    });
    s.run(
        "6e",
        "realigned pure product states have trace norm 1",
        || {
            let dims = prop_oneof![Just(Dims::QUBIT_QUTRIT), Just(Dims::QUTRIT_QUTRIT)];
            let draws = (dims, complex_vec(3), complex_vec(3)).prop_filter_map(
                "zero vector",
                |(d, a, b)| {
                    Some((
                        d,
                        normalized(a[..d.a].to_vec())?,
                        normalized(b[..d.b].to_vec())?,
                    ))
                },
            );
            property(draws, |(d, a, b)| {
                let psi: Vec<Complex64> = a
                    .iter()
                    .flat_map(|x| b.iter().map(move |y| x * y))
                    .collect();
                let rho = DensityMatrix::from_pure(d, &psi).unwrap();
                let t = trace_norm(&realign(&rho)).unwrap();
                prop_assert!((t - 1.0).abs() <= 1e-12, "trace norm {}", t);
                Ok(())
            })
        },
    );
    s.run("6f", "two-stage damping composes on a 5x5 grid", || {
        property(density(Dims::QUBIT_QUTRIT), |rho| {
            let model = DecayModel::qubit_qutrit();
            let grid = [0.0, 0.2, 0.45, 0.7, 0.95];
            let join = |x: f64, y: f64| 1.0 - (1.0 - x) * (1.0 - y);
            for &p in &grid {
                for &q in &grid {
                    let two = damp(&damp(&rho, p, &model).unwrap(), q, &model).unwrap();
                    let ((p1, p2), (q1, q2)) =
                        (model.qutrit_probabilities(p), model.qutrit_probabilities(q));
                    let one = apply_channel(
                        &rho,
                        &branch_channel(join(p, q), join(p1, q1), join(p2, q2)),
                    )
                    .unwrap();
                    let gap = two.matrix().max_abs_diff(one.matrix());
                    prop_assert!(gap <= 1e-10, "p={} p'={} gap {}", p, q, gap);
                }
            }
            Ok(())
        })
    });
    s.run(
        "6g",
        "CLI output identical across worker counts",
        cli_determinism,
    );

    for (id, family, op, end) in [
        ("7a", Family::StateI, (X, F02), 0.6168),
        ("7b", Family::StateI, (X, F201), 0.6168),
        ("7c", Family::StateI, (X, I), 0.6168),
        ("7d", Family::StateI, (I, F02), 0.6168),
        ("7e", Family::StateI, (I, F201), 0.6168),
        ("7f", Family::StateII, (X, F02), 0.8452),
        ("7g", Family::StateII, (X, F201), 0.8452),
    ] {
        let name = format!(
            "{family} {}(x){} hastens at every p_n in (0, {end})",
            op.0, op.1
        );
        s.run(id, &name, || hasten_only(family, op, end));
    }

    println!(
        "\nacceptance: {} passed, {} failed{}",
        s.passed,
        s.failed.len(),
        if s.failed.is_empty() {
            String::new()
        } else {
            format!(" ({})", s.failed.join(", "))
        }
    );
    if s.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
