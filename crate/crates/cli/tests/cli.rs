use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hcontour_core::{write_pgm, BinaryImage, GrayImage};
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcontour"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_image(dir: &Path, name: &str, w: usize, h: usize, white: impl Fn(usize, usize) -> bool) {
    let img = BinaryImage::from_fn(w, h, white).unwrap();
    fs::write(dir.join(name), write_pgm(&img)).unwrap();
}

fn rect_fixture(dir: &Path) {
    write_image(dir, "rect.pgm", 40, 20, |x, y| {
        (5..=30).contains(&x) && (3..=15).contains(&y)
    });
}

#[test]
fn detect_direct_on_solid_rectangle() {
    let tmp = TempDir::new().unwrap();
    rect_fixture(tmp.path());
    let out = run(
        tmp.path(),
        &[
            "detect",
            "--algo",
            "direct",
            "--input",
            "rect.pgm",
            "--bin-threshold",
            "127",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["algorithm"], "direct");
    assert_eq!(doc["closed"], true);
    let pts = doc["points"].as_array().unwrap();
    assert_eq!(
        pts[0..2],
        [serde_json::json!([5, 3]), serde_json::json!([5, 4])],
    );
    let xs: std::collections::BTreeSet<i64> = pts.iter().map(|p| p[0].as_i64().unwrap()).collect();
    assert_eq!(xs.into_iter().collect::<Vec<_>>(), vec![5, 30]);
    assert_eq!(
        doc["params"],
        serde_json::json!({"bin_threshold": 127, "threshold_mode": "fixed", "run_limit": 20, "min_width": 10})
    );
}

#[test]
fn detect_golden_json() {
    let tmp = TempDir::new().unwrap();
    write_image(tmp.path(), "sq.pgm", 8, 8, |x, y| {
        (2..=4).contains(&x) && (4..=5).contains(&y)
    });
    let out = run(
        tmp.path(),
        &["detect", "--input", "sq.pgm", "--core", "1", "--step", "1"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "{\"algorithm\":\"sliding\",\"points\":[[2,4],[3,4],[4,4],[4,5],[3,5],[2,5]],\"closed\":true,\
         \"params\":{\"bin_threshold\":0,\"threshold_mode\":\"otsu\",\"core\":1,\"step\":1,\"fill_threshold\":40}}\n"
    );
}

#[test]
fn detect_sliding_on_black_image_reports_no_contour() {
    let tmp = TempDir::new().unwrap();
    write_image(tmp.path(), "black.pgm", 12, 9, |_, _| false);
    let out = run(
        tmp.path(),
        &["detect", "--algo", "sliding", "--input", "black.pgm"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("no contours found"),
        "{}",
        stderr(&out)
    );
    let out = run(
        tmp.path(),
        &["detect", "--algo", "direct", "--input", "black.pgm"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn wide_step_warns_but_runs() {
    let tmp = TempDir::new().unwrap();
    rect_fixture(tmp.path());
    let out = run(
        tmp.path(),
        &[
            "detect", "--algo", "sliding", "--step", "20", "--core", "8", "--input", "rect.pgm",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stderr(&out).contains("step exceeds 2*core"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn irrelevant_flags_are_warned_about() {
    let tmp = TempDir::new().unwrap();
    rect_fixture(tmp.path());
    let out = run(
        tmp.path(),
        &[
            "detect", "--algo", "direct", "--core", "4", "--input", "rect.pgm",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("--core"), "{}", stderr(&out));
}

#[test]
fn bad_inputs_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.pgm"), b"P5\n4 4\n255\nxx").unwrap();
    for args in [
        &["detect", "--input", "bad.pgm"][..],
        &["detect", "--input", "missing.pgm"],
        &["detect", "--input", "bad.pgm", "--core", "0"],
        &["detect", "--input", "bad.pgm", "--bin-threshold", "300"],
        &["eval", "--json", "missing.json", "--input", "bad.pgm"],
    ] {
        let out = run(tmp.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&out).is_empty());
    }
    let out = run(tmp.path(), &["detect", "--input", "bad.pgm"]);
    assert!(stderr(&out).contains("at byte 13"), "{}", stderr(&out));
}

#[test]
fn overlay_embeds_or_links_the_image() {
    let tmp = TempDir::new().unwrap();
    rect_fixture(tmp.path());
    let out = run(
        tmp.path(),
        &[
            "detect",
            "--input",
            "rect.pgm",
            "--json",
            "c.json",
            "--overlay",
            "a.svg",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(tmp.path().join("a.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("base64,") && svg.contains("Z\""));
    run(
        tmp.path(),
        &[
            "detect",
            "--input",
            "rect.pgm",
            "--json",
            "c.json",
            "--overlay",
            "b.svg",
            "--overlay-href",
            "rect.pgm",
        ],
    );
    let svg = fs::read_to_string(tmp.path().join("b.svg")).unwrap();
    assert!(svg.contains("href=\"rect.pgm\""));
}

#[test]
fn synth_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    for name in ["a", "b"] {
        let out = run(
            tmp.path(),
            &[
                "synth",
                "--shape",
                "rect",
                "--specks",
                "10",
                "--seed",
                "3",
                "--output",
                &format!("{name}.pgm"),
                "--mask",
                &format!("{name}_m.pgm"),
            ],
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let read = |f: &str| fs::read(tmp.path().join(f)).unwrap();
    assert_eq!(read("a.pgm"), read("b.pgm"));
    assert_eq!(read("a_m.pgm"), read("b_m.pgm"));
}

fn white_components_outside(img: &GrayImage, mask: &GrayImage) -> Vec<usize> {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut sizes = Vec::new();
    for start in 0..w * h {
        if seen[start] || img.data()[start] <= 127 || mask.data()[start] != 0 {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut n = 0;
        while let Some(i) = stack.pop() {
            n += 1;
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if !seen[j] && img.data()[j] > 127 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        sizes.push(n);
    }
    sizes
}

#[test]
fn synth_specks_and_concavity() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["synth", "--shape", "c-shape", "--specks", "50"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let img = hcontour_core::read_pgm(&fs::read(tmp.path().join("synth.pgm")).unwrap()).unwrap();
    let mask =
        hcontour_core::read_pgm(&fs::read(tmp.path().join("synth_mask.pgm")).unwrap()).unwrap();
    let sizes = white_components_outside(&img, &mask);
    assert_eq!(sizes, vec![1; 50]);
    let split_row = (0..mask.height()).any(|y| {
        let row = mask.row(y);
        let first = row.iter().position(|&v| v == 255);
        let last = row.iter().rposition(|&v| v == 255);
        matches!((first, last), (Some(a), Some(b)) if row[a..=b].contains(&0))
    });
    assert!(split_row);
}

#[test]
fn synth_rejects_invalid_polygons() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("bow.json"),
        "[[10,10],[100,100],[100,10],[10,100]]",
    )
    .unwrap();
    fs::write(tmp.path().join("out.json"), "[[10,10],[1000,10],[10,100]]").unwrap();
    for shape in ["bow.json", "out.json", "nope"] {
        let out = run(tmp.path(), &["synth", "--shape", shape]);
        assert_eq!(out.status.code(), Some(2), "{shape}");
    }
    fs::write(
        tmp.path().join("tri.json"),
        "{\"points\": [[10,10],[200,20],[50,150]]}",
    )
    .unwrap();
    let out = run(tmp.path(), &["synth", "--shape", "tri.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn eval_prints_four_decimals() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path();
    write_image(p, "full.pgm", 10, 10, |_, _| true);
    let cases = [
        ("[[0,0],[9,0],[9,9],[0,9]]", "1.0000\n"),
        ("[[0,0],[4,0],[4,9],[0,9]]", "0.5000\n"),
        ("[]", "0.0000\n"),
    ];
    for (points, expected) in cases {
        fs::write(p.join("c.json"), points).unwrap();
        let out = run(p, &["eval", "--json", "c.json", "--input", "full.pgm"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert_eq!(stdout(&out), expected, "{points}");
    }
    // Truth polygon written by synth scores exactly 1.
    run(p, &["synth", "--shape", "c-shape", "--json", "truth.json"]);
    let out = run(
        p,
        &["eval", "--json", "truth.json", "--input", "synth_mask.pgm"],
    );
    assert_eq!(stdout(&out), "1.0000\n");
}

#[test]
fn eval_of_degenerate_contour_against_black_truth() {
    let tmp = TempDir::new().unwrap();
    write_image(tmp.path(), "black.pgm", 6, 6, |_, _| false);
    fs::write(tmp.path().join("e.json"), "[]").unwrap();
    let out = run(
        tmp.path(),
        &["eval", "--json", "e.json", "--input", "black.pgm"],
    );
    assert_eq!(stdout(&out), "1.0000\n");
}

#[test]
fn bench_covers_cases_and_feeds_eval() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path();
    let out = run(
        p,
        &[
            "bench",
            "--size",
            "200x150",
            "--pitch",
            "12",
            "--specks",
            "10",
            "--out-dir",
            "b",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = fs::read_to_string(p.join("b/summary.txt")).unwrap();
    assert_eq!(stdout(&out), summary);
    assert!(summary.contains("rect-s0-k8") && summary.contains("c-shape-s10-k16"));
    assert_eq!(summary.lines().count(), 1 + 8);

    let report: Value =
        serde_json::from_str(&fs::read_to_string(p.join("b/c-shape-s0-k8.json")).unwrap()).unwrap();
    assert!(report["sliding"]["iou"].as_f64().unwrap() > report["direct"]["iou"].as_f64().unwrap());
    assert!(report["params"].is_object());

    let out = run(
        p,
        &[
            "eval",
            "--json",
            "b/c-shape-s0-k8_sliding.json",
            "--input",
            "b/c-shape-s0-k8_mask.pgm",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let reported = report["sliding"]["iou"].as_f64().unwrap();
    let evaluated: f64 = stdout(&out).trim().parse().unwrap();
    assert!(
        (reported - evaluated).abs() < 1e-4,
        "{reported} vs {evaluated}"
    );
}

#[test]
fn bench_rejects_unknown_case() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["bench", "--cases", "rect,star", "--out-dir", "b"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("star"));
}
