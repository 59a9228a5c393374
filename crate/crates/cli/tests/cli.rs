use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn vortex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortex"))
        .args(args)
        .env_remove("VORTEX_LOG")
        .output()
        .expect("binary runs")
}

fn preset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name)
        .display()
        .to_string()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Metadata line, header and numeric rows of a CSV written by the binary.
fn read_csv(p: &Path) -> (String, Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap().to_string();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|x| x.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (meta, header, rows)
}

fn meta_field(meta: &str, key: &str) -> Value {
    let start = meta.find(&format!(" {key}=")).unwrap() + key.len() + 2;
    let rest = &meta[start..];
    let mut de = serde_json::Deserializer::from_str(rest).into_iter::<Value>();
    de.next().unwrap().unwrap()
}

#[test]
fn o_preset_rotates_rigidly_for_one_period() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "o.csv");
    let u_e = 1.0 / (3.0 * PI);
    let period = 2.0 * PI / u_e;
    ok(&vortex(&[
        "simulate",
        "--config",
        &preset("o_alpha.json"),
        "--t-end",
        &period.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let (meta, header, rows) = read_csv(&out);
    assert!(meta.starts_with("# vortex "));
    assert_eq!(
        header.join(","),
        "t,x0,y0,x1,y1,x2,y2,x3,y3,H,mu,nu_re,nu_im"
    );
    let first = &rows[0];
    for row in &rows {
        let (c, s) = ((u_e * row[0]).cos(), (u_e * row[0]).sin());
        for k in 0..4 {
            let (x, y) = (first[1 + 2 * k], first[2 + 2 * k]);
            assert!((row[1 + 2 * k] - (c * x - s * y)).abs() < 1e-7);
            assert!((row[2 + 2 * k] - (s * x + c * y)).abs() < 1e-7);
        }
    }
    let last = rows.last().unwrap();
    assert!((last[0] - period).abs() < 1e-12);
    for k in 1..9 {
        assert!(
            (last[k] - first[k]).abs() < 1e-7,
            "{} vs {}",
            last[k],
            first[k]
        );
    }
}

#[test]
fn collision_exits_with_runtime_code() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "c.csv");
    let r = vortex(&[
        "simulate",
        "--config",
        &preset("collide.json"),
        "--t-end",
        "60",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("collision"));
}

#[test]
fn configuration_problems_exit_with_usage_code() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.json");
    let r = vortex(&[
        "simulate",
        "--config",
        missing.to_str().unwrap(),
        "--t-end",
        "1",
    ]);
    assert_eq!(r.status.code(), Some(1));

    let bad = path(&dir, "bad.json");
    fs::write(
        &bad,
        r#"{"gamma": 1.0, "n_sat": 3, "positions": [[0, 0], [1, 0]]}"#,
    )
    .unwrap();
    let r = vortex(&[
        "simulate",
        "--config",
        bad.to_str().unwrap(),
        "--t-end",
        "1",
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("positions"));

    let twin = path(&dir, "twin.json");
    fs::write(
        &twin,
        r#"{"gamma": 1.0, "n_sat": 1, "positions": [[0.5, 0], [0.5, 0]]}"#,
    )
    .unwrap();
    let r = vortex(&[
        "simulate",
        "--config",
        twin.to_str().unwrap(),
        "--t-end",
        "1",
    ]);
    assert_eq!(r.status.code(), Some(1));

    assert_eq!(vortex(&["simulate"]).status.code(), Some(1));
    assert_eq!(vortex(&["nonsense"]).status.code(), Some(1));
    assert_eq!(vortex(&["req", "-f", "O"]).status.code(), Some(1));
    assert_eq!(vortex(&["--help"]).status.code(), Some(0));
}

#[test]
fn y_equilibrium_carries_the_radial_ratio() {
    let r = vortex(&["req", "--family", "Y", "--alpha", "1", "--gamma", "1"]);
    ok(&r);
    let spec: Value = serde_json::from_slice(&r.stdout).unwrap();
    let v1 = &spec["v"]["v1"];
    let v2 = &spec["v"]["v2"];
    let (a, b) = (v1[0].as_f64().unwrap(), v1[1].as_f64().unwrap());
    let (c, d) = (v2[0].as_f64().unwrap(), v2[1].as_f64().unwrap());
    // v₂/v₁ as a complex quotient
    let den = a * a + b * b;
    let (re, im) = ((c * a + d * b) / den, (d * a - c * b) / den);
    assert!(
        (re - 0.4354205447).abs() < 1e-9 && im.abs() < 1e-9,
        "{re} {im}"
    );
    assert_eq!(spec["family"], "Y");
}

#[test]
fn unknown_family_is_a_usage_error() {
    let r = vortex(&["req", "--family", "X"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("family"));
    assert_eq!(
        vortex(&["linearize", "--family", "Z"]).status.code(),
        Some(1)
    );
}

#[test]
fn o_spectrum_has_the_zero_pair_and_the_rotation_pair() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "lin.json");
    ok(&vortex(&[
        "linearize",
        "--family",
        "O",
        "--out",
        out.to_str().unwrap(),
    ]));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let u_e = doc["spec"]["u_e"].as_f64().unwrap();
    assert!((u_e - 1.0 / (3.0 * PI)).abs() < 1e-15);
    let eig: Vec<(f64, f64)> = doc["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_f64().unwrap(), e[1].as_f64().unwrap()))
        .collect();
    assert_eq!(eig.len(), 8);
    let zeros = eig.iter().filter(|e| e.0.hypot(e.1) < 1e-8).count();
    assert_eq!(zeros, 2);
    for sign in [1.0, -1.0] {
        assert!(eig
            .iter()
            .any(|e| e.0.abs() < 1e-8 && (e.1 - sign * u_e).abs() < 1e-8));
    }
}

#[test]
fn poincare_export_reproduces_the_rotation_number() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.csv");
    ok(&vortex(&[
        "poincare",
        "--alpha",
        "2",
        "--u",
        "0.075",
        "--iters",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]));
    let (meta, header, rows) = read_csv(&out);
    assert_eq!(header.join(","), "iter,q,p,H");
    assert_eq!(rows.len(), 200);
    let derived = meta_field(&meta, "derived");
    let cq = derived["center"][0].as_f64().unwrap();
    let cp = derived["center"][1].as_f64().unwrap();
    let mut turn = 0.0;
    for pair in rows.windows(2) {
        let a = (pair[0][2] - cp).atan2(pair[0][1] - cq);
        let b = (pair[1][2] - cp).atan2(pair[1][1] - cq);
        let mut d = b - a;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        turn += d;
    }
    let rho = turn / (199.0 * 2.0 * PI);
    let reported = derived["rotation_number"].as_f64().unwrap();
    assert!((rho - reported).abs() < 1e-12, "{rho} vs {reported}");
    assert!(rho < 0.0);
    let h0 = rows[0][3];
    assert!(rows.iter().all(|r| (r[3] - h0).abs() < 1e-6));
}

#[test]
fn level_grid_flags_the_six_collision_states() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "l.csv");
    ok(&vortex(&[
        "levels",
        "--grid",
        "151",
        "--out",
        out.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&out).unwrap();
    let cells: Vec<(f64, f64, bool)> = text
        .lines()
        .skip(2)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2] == "sing")
        })
        .collect();
    assert_eq!(cells.len(), 151 * 151);
    // group flagged cells by their nearest sixth root of unity
    let mut hits = [0usize; 6];
    for &(x, y, flagged) in &cells {
        if !flagged {
            continue;
        }
        let k = (y.atan2(x) / (PI / 3.0)).round().rem_euclid(6.0) as usize;
        let (rx, ry) = ((k as f64 * PI / 3.0).cos(), (k as f64 * PI / 3.0).sin());
        assert!((x - rx).hypot(y - ry) < 0.2, "stray flag at {x}, {y}");
        hits[k] += 1;
    }
    assert!(hits.iter().all(|&h| h > 0), "{hits:?}");
    let derived = meta_field(text.lines().next().unwrap(), "derived");
    assert_eq!(derived["collision_loci"], 6);
}

#[test]
fn reduce_then_reconstruct_recovers_the_trajectory() {
    let dir = TempDir::new().unwrap();
    let (amb, red, back) = (
        path(&dir, "a.csv"),
        path(&dir, "r.csv"),
        path(&dir, "b.csv"),
    );
    let config = preset("generic.json");
    for (cmd, out) in [("simulate", &amb), ("reduce", &red)] {
        ok(&vortex(&[
            cmd,
            "--config",
            &config,
            "--t-end",
            "20",
            "--out",
            out.to_str().unwrap(),
        ]));
    }
    ok(&vortex(&[
        "reconstruct",
        "--config",
        &config,
        "--reduced",
        red.to_str().unwrap(),
        "--out",
        back.to_str().unwrap(),
    ]));
    let (_, rh, reduced) = read_csv(&red);
    assert_eq!(rh[..4].join(","), "t,u0,u1_re,u1_im");
    let (_, _, a) = read_csv(&amb);
    let (_, _, b) = read_csv(&back);
    assert_eq!(a.len(), b.len());
    assert_eq!(a.len(), reduced.len());
    let err = a
        .iter()
        .zip(&b)
        .flat_map(|(r, s)| r[..9].iter().zip(&s[..9]).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn output_is_deterministic_and_hashed() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, t: &str| {
        let out = path(&dir, name);
        ok(&vortex(&[
            "simulate",
            "--config",
            &preset("generic.json"),
            "--t-end",
            t,
            "--out",
            out.to_str().unwrap(),
        ]));
        fs::read(out).unwrap()
    };
    let (a, b, c) = (run("a.csv", "5"), run("b.csv", "5"), run("c.csv", "6"));
    assert_eq!(a, b);
    let meta = |bytes: &[u8]| {
        String::from_utf8_lossy(bytes)
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    let (ma, mc) = (meta(&a), meta(&c));
    assert!(ma.contains(&format!("vortex {}", env!("CARGO_PKG_VERSION"))));
    let hash = |m: &str| m.split("config_sha256=").nth(1).unwrap()[..64].to_string();
    assert_ne!(hash(&ma), hash(&mc));
    let params = meta_field(&ma, "params");
    let digest: String = Sha256::digest(params.to_string().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert_eq!(hash(&ma), digest);
    assert_eq!(params["t_end"], 5.0);
    assert_eq!(params["config"]["n_sat"], 3);
}

#[test]
fn crawl_reports_measured_and_predicted_drift() {
    let r = vortex(&["crawl", "--eps", "1e-3"]);
    ok(&r);
    let text = String::from_utf8(r.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "measured_re,measured_im,predicted_re,predicted_im,relative_error"
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let m_e = 8.0 * PI / 3.0;
    assert!((row[2] - 1e-3 / m_e).abs() < 1e-15);
    assert!(row[4] < 0.05, "{}", row[4]);
}

#[test]
fn log_level_comes_from_the_environment() {
    let run = |level: &str| {
        Command::new(env!("CARGO_BIN_EXE_vortex"))
            .args(["req", "--family", "O"])
            .env("VORTEX_LOG", level)
            .output()
            .unwrap()
    };
    let info = run("info");
    ok(&info);
    assert!(String::from_utf8_lossy(&info.stderr).contains("INFO"));
    let quiet = run("error");
    ok(&quiet);
    assert!(quiet.stderr.is_empty());
    assert_eq!(run("trace").status.code(), Some(1));
}
