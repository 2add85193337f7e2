//! Solves exported models with HiGHS through its Python bindings. Skipped
//! when `highspy` is not importable.

use std::path::PathBuf;
use std::process::Command;

use peakslot::exact::solve_exact;
use peakslot::generate::{generate, GenParams};
use peakslot::lp::export_lp;
use peakslot::model::{Scenario, Schedule};

const SOLVE: &str = r#"
import sys, highspy
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.readModel(sys.argv[1])
h.run()
status = h.getModelStatus()
print(h.modelStatusToString(status))
print(h.getInfo().objective_function_value)
"#;

fn have_highs() -> bool {
    Command::new("python3")
        .args(["-c", "import highspy"])
        .output()
        .is_ok_and(|o| o.status.success())
}

fn solve_lp(text: &str, tag: &str) -> (String, f64) {
    let path: PathBuf = std::env::temp_dir().join(format!("peakslot-{}-{tag}.lp", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let out = Command::new("python3").args(["-c", SOLVE]).arg(&path).output().unwrap();
    let _ = std::fs::remove_file(&path);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    let status = lines.next().unwrap().to_string();
    let obj = lines.next().unwrap().trim().parse().unwrap();
    (status, obj)
}

/// Pins every start variable of `schedule` to 1.
fn with_fixed_starts(lp: &str, schedule: &Schedule) -> String {
    let mut fixes = String::new();
    for (i, row) in schedule.starts.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            fixes.push_str(&format!(" x_{}_{}_{} = 1\n", i + 1, j + 1, t));
        }
    }
    lp.replacen("Bounds\n", &format!("Bounds\n{fixes}"), 1)
}

fn instances() -> Vec<Scenario> {
    (0..20)
        .map(|k| {
            generate(&GenParams {
                period: 8,
                ..GenParams::table_one(2 + k % 2, 1 + k / 10, k as u64)
            })
            .unwrap()
        })
        .collect()
}

#[test]
fn optimum_matches_exact_solver() {
    if !have_highs() {
        eprintln!("skipped: highspy not available");
        return;
    }
    for (k, s) in instances().iter().enumerate() {
        let exact = solve_exact(s, None).unwrap();
        let (status, obj) = solve_lp(&export_lp(s), &format!("opt{k}"));
        assert_eq!(status, "Optimal", "instance {k}");
        assert!((obj - exact.peak).abs() <= 1e-6, "instance {k}: {obj} vs {}", exact.peak);
    }
}

#[test]
fn fixed_schedules_are_feasible_exactly_when_valid() {
    if !have_highs() {
        eprintln!("skipped: highspy not available");
        return;
    }
    for (k, s) in instances().iter().take(6).enumerate() {
        let exact = solve_exact(s, None).unwrap();
        let lp = export_lp(s);
        let (status, obj) = solve_lp(&with_fixed_starts(&lp, &exact.schedule), &format!("fix{k}"));
        assert_eq!(status, "Optimal");
        assert!((obj - exact.peak).abs() <= 1e-6);

        // push the last task of robot 1 past the end of the period
        let mut bad = exact.schedule.clone();
        *bad.starts[0].last_mut().unwrap() = s.period() as i64;
        assert!(!s.is_valid(&bad));
        let (status, _) = solve_lp(&with_fixed_starts(&lp, &bad), &format!("bad{k}"));
        assert_eq!(status, "Infeasible");
    }
}
