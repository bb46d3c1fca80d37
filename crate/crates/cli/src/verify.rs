//! Oracle cross-checks behind `hypchroma verify`.

use crate::{CmdResult, Suite};
use hypchroma::formulas::{
    collar_geometry, convexity_threshold, ideal_clique_distance, solve_t, truncated_clique_distance,
};
use hypchroma::kernel::{dist, DevelopedChain, Gluing};
use hypchroma::rotation::{face_report, verify_ringel_youngs, RotationSystem};
use hypchroma::surfaces::{
    build_ideal_surface, build_triangle_surface, build_truncated_surface, certify_clique,
    CertificateStatus, GluedSurface, TriangleMode,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct Check {
    check: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, check: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.0.push(Check {
            check: check.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn close(&mut self, check: String, got: f64, want: f64, tol: f64) {
        let pass = (got - want).abs() <= tol;
        self.record(
            check,
            pass,
            format!("got {got}, want {want}, tolerance {tol}"),
        );
    }

    fn result<T>(&mut self, check: String, r: hypchroma::error::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(check, false, e.to_string());
                None
            }
        }
    }
}

fn default_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

pub(crate) fn run(suite: Suite, data_dir: Option<&Path>) -> CmdResult {
    let mut checks = Checks::default();
    let data = data_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(default_data_dir);
    let (name, run_formulas, run_surfaces, run_rotations) = match suite {
        Suite::Formulas => ("formulas", true, false, false),
        Suite::Surfaces => ("surfaces", false, true, false),
        Suite::Rotations => ("rotations", false, false, true),
        Suite::All => ("all", true, true, true),
    };
    if run_formulas {
        formulas(&mut checks);
    }
    if run_surfaces {
        surfaces(&mut checks, &data);
    }
    if run_rotations {
        rotations(&mut checks, &data);
    }
    let failures: Vec<&Check> = checks.0.iter().filter(|c| !c.pass).collect();
    let summary = serde_json::json!({
        "suite": name,
        "passed": checks.0.len() - failures.len(),
        "failed": failures.len(),
        "failures": failures,
        "checks": checks.0,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(anyhow::anyhow!("{} of {} checks failed", failures.len(), checks.0.len()).into())
    }
}

/// Distance between the centers of polygon 0 and its neighbor across side 0.
fn developed_center_distance(s: &GluedSurface) -> hypchroma::error::Result<f64> {
    let mut chain = DevelopedChain::start(0);
    chain.extend(s, 0)?;
    let here = s.geometry(0).center;
    let there = chain.place(1, &s.geometry(chain.last()).center);
    Ok(dist(&here, &there))
}

fn formulas(c: &mut Checks) {
    for n in [3, 4, 5, 7, 12] {
        let name = format!("ideal d_{n} vs developed centers");
        let Some(s) = c.result(name.clone(), build_ideal_surface(n, None)) else {
            continue;
        };
        let Some(got) = c.result(name.clone(), developed_center_distance(&s)) else {
            continue;
        };
        let Some(want) = c.result(name.clone(), ideal_clique_distance(n)) else {
            continue;
        };
        c.close(name, got, want, 1e-9);
        let g = s.geometry(0);
        let inradius = dist(&g.center, &g.sides[0].midpoint);
        c.close(
            format!("ideal d_{n} vs doubled inradius"),
            2.0 * inradius,
            want,
            1e-9,
        );
        for t in [1e-3, 0.5, 1.0] {
            let name = format!("truncated d_{n}(t = {t}) vs developed centers");
            let Some(s) = c.result(name.clone(), build_truncated_surface(n, t, None)) else {
                continue;
            };
            let Some(got) = c.result(name.clone(), developed_center_distance(&s)) else {
                continue;
            };
            let Some(want) = c.result(name.clone(), truncated_clique_distance(n, t)) else {
                continue;
            };
            c.close(name, got, want, 1e-9);
            let name = format!("solve_t inverts d_{n}(t = {t})");
            if let Some(back) = c.result(name.clone(), solve_t(n, want)) {
                c.close(name, back, t, 1e-9 * t.max(1.0));
            }
        }
    }
    c.close(
        "d_3 = ln 3".into(),
        ideal_clique_distance(3).unwrap_or(f64::NAN),
        3f64.ln(),
        1e-12,
    );
    let name = "collar margin at the convexity threshold, short geodesic".to_string();
    if let Some(g) = c.result(name.clone(), collar_geometry(1e-6, convexity_threshold())) {
        c.close(name, g.margin, 2f64.ln() / 2.0, 1e-4);
    }
}

fn certified(c: &mut Checks, name: String, s: hypchroma::error::Result<GluedSurface>) {
    let Some(s) = c.result(name.clone(), s) else {
        return;
    };
    let cert = certify_clique(&s, 4);
    c.record(
        name,
        cert.status == CertificateStatus::Certified && cert.edge_error < 1e-9,
        format!(
            "{:?}, margin {:?}, edge error {:e}",
            cert.status, cert.margin, cert.edge_error
        ),
    );
}

fn surfaces(c: &mut Checks, data: &Path) {
    for n in [3, 4, 5, 7] {
        certified(
            c,
            format!("ideal N = {n} clique certificate"),
            build_ideal_surface(n, None),
        );
    }
    for t in [0.1, 1.0] {
        certified(
            c,
            format!("truncated N = 5, t = {t} clique certificate"),
            build_truncated_surface(5, t, None),
        );
    }
    if let Some(rs) = load(c, data, "k12.rot") {
        certified(
            c,
            "K12 equilateral surface clique certificate".into(),
            build_triangle_surface(&rs, TriangleMode::Equilateral),
        );
        certified(
            c,
            "K12 one-holed block clique certificate".into(),
            build_triangle_surface(&rs, TriangleMode::holed_default()),
        );
    }
}

fn load(c: &mut Checks, data: &Path, file: &str) -> Option<RotationSystem> {
    let path = data.join(file);
    let parsed = std::fs::read_to_string(&path)
        .map_err(|e| e.to_string())
        .and_then(|text| RotationSystem::parse(&text).map_err(|e| e.to_string()));
    match parsed {
        Ok(rs) => Some(rs),
        Err(e) => {
            c.record(format!("load {}", path.display()), false, e);
            None
        }
    }
}

fn rotations(c: &mut Checks, data: &Path) {
    // (file, n, faces, genus)
    for (file, n, faces, genus) in [
        ("k4.rot", 4, 4, 0),
        ("k7.rot", 7, 14, 1),
        ("k12.rot", 12, 44, 6),
    ] {
        let Some(rs) = load(c, data, file) else {
            continue;
        };
        match face_report(&rs) {
            Ok(r) => c.record(
                format!("{file} faces and genus"),
                r.f == faces && r.genus == genus && r.triangular,
                format!(
                    "{} faces, genus {}, triangular {}; want {faces} faces, genus {genus}, triangular",
                    r.f, r.genus, r.triangular
                ),
            ),
            Err(e) => c.record(format!("{file} faces and genus"), false, e.to_string()),
        }
        match verify_ringel_youngs(&rs, n) {
            Ok(ok) => c.record(
                format!("{file} realizes the minimal genus of K_{n}"),
                ok,
                if ok {
                    "genus matches".to_string()
                } else {
                    "genus mismatch".to_string()
                },
            ),
            Err(e) => c.record(
                format!("{file} realizes the minimal genus of K_{n}"),
                false,
                e.to_string(),
            ),
        }
    }
}
