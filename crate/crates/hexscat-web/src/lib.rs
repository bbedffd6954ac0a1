//! Browser bindings for three small views of the library: the dispersion
//! `p(ξ)` on the torus, decay of free-resolvent entries along `z = 1 + iN`,
//! and the continued phases against their large-`N` forms.
//!
//! Every entry point returns JSON text; the page parses it and draws on a canvas.
//! The `*_json` functions carry the work and are usable off the browser; the
//! exported bindings only turn their errors into JavaScript exceptions.

use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use hexscat::continuation::{asymptotic_prediction, check_theta, deviation, zeta, Branch};
use hexscat::lattice::{dist, Dist};
use hexscat::real::lift;
use hexscat::resolvent::{loglog_slope, r0_auto};
use hexscat::spectral::spectrum_grid;
use hexscat::Site;

#[derive(Serialize)]
struct Heatmap {
    grid: usize,
    /// Row-major `p` values, `ξ₁` along rows, both axes over `[-π, π)`.
    p: Vec<f64>,
    min: f64,
    argmin: (f64, f64),
}

type Out = Result<String, String>;

fn msg(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `p(ξ)` on a `grid × grid` sampling of the torus.
pub fn spectrum_heatmap_json(grid: usize) -> Out {
    if !(16..=512).contains(&grid) {
        return Err("grid must lie in [16, 512]".into());
    }
    let samples = spectrum_grid(grid);
    let best = samples.iter().min_by(|a, b| a.p.total_cmp(&b.p)).expect("nonempty grid");
    let out = Heatmap { grid, p: samples.iter().map(|s| s.p).collect(), min: best.p, argmin: (best.xi1, best.xi2) };
    serde_json::to_string(&out).map_err(msg)
}

#[derive(Serialize)]
struct DecayEntry {
    entry: String,
    /// `log₁₀ |R₀(1+iN)_{ij}(n − m)|`, or `null` where the entry vanishes.
    log10: Vec<Option<f64>>,
    slope: Option<f64>,
    target: f64,
}

#[derive(Serialize)]
struct Decay {
    n: Vec<f64>,
    d: i64,
    d12: i64,
    d21: i64,
    entries: Vec<DecayEntry>,
}

/// Free-resolvent entries between sites `n` and `m` for `N` log-spaced in `[10, 10³]`.
pub fn resolvent_decay_json(n1: i32, n2: i32, m1: i32, m2: i32) -> Out {
    let diff = Site::new(n1 as i64, n2 as i64) - Site::new(m1 as i64, m2 as i64);
    if diff.linf() > 8 {
        return Err("keep |n − m|∞ ≤ 8".into());
    }
    let ns: Vec<f64> = (0..=16).map(|k| 10f64 * 10f64.powf(k as f64 / 8.0)).collect();
    let mut vals = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
    for &n in &ns {
        let b = r0_auto(Complex64::new(1.0, n), diff).map_err(msg)?;
        for (i, row) in vals.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                v.push(b[i][j].norm());
            }
        }
    }
    let mut entries = Vec::new();
    for (i, j) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
        let v = &vals[i - 1][j - 1];
        let d = dist(Dist::for_block(i, j), diff) as f64;
        let target = if i == j { -(2.0 * d + 1.0) } else { -(2.0 * d + 2.0) };
        entries.push(DecayEntry {
            entry: format!("{i}{j}"),
            log10: v.iter().map(|&x| (x > 0.0).then(|| x.log10())).collect(),
            slope: loglog_slope(&ns, v),
            target,
        });
    }
    let out = Decay { n: ns, d: dist(Dist::D, diff), d12: dist(Dist::D12, diff), d21: dist(Dist::D21, diff), entries };
    serde_json::to_string(&out).map_err(msg)
}

#[derive(Serialize)]
struct PhaseTrack {
    n: Vec<f64>,
    /// Per `N`: `[Re ζ₁, Im ζ₁, Re ζ₂, Im ζ₂]`.
    zeta: Vec<[f64; 4]>,
    prediction: Vec<[f64; 4]>,
    /// `|ζ − prediction|` per component, real parts modulo 2π.
    deviation: Vec<[f64; 4]>,
}

/// Continued phases at `z = 1 + iN`, `N` log-spaced in `[10, 10⁴]`.
pub fn zeta_asymptotics_json(theta: f64, positive: bool) -> Out {
    check_theta(theta).map_err(msg)?;
    let branch = if positive { Branch::Positive } else { Branch::Negative };
    let ns: Vec<f64> = (0..=24).map(|k| 10f64 * 10f64.powf(k as f64 / 8.0)).collect();
    let mut out = PhaseTrack { n: ns.clone(), zeta: Vec::new(), prediction: Vec::new(), deviation: Vec::new() };
    for &n in &ns {
        let z = lift::<f64>(Complex64::new(1.0, n));
        let a = zeta(&z, &theta, branch).map_err(msg)?.angles();
        let p = asymptotic_prediction(n, theta, branch).map_err(msg)?;
        let d = deviation::<f64>(n, theta, branch).map_err(msg)?;
        out.zeta.push([a[0].re, a[0].im, a[1].re, a[1].im]);
        out.prediction.push([p.re1, p.im1, p.re2, p.im2]);
        out.deviation.push(d.map(f64::abs));
    }
    serde_json::to_string(&out).map_err(msg)
}

#[wasm_bindgen]
pub fn spectrum_heatmap(grid: usize) -> Result<String, JsError> {
    spectrum_heatmap_json(grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn resolvent_decay(n1: i32, n2: i32, m1: i32, m2: i32) -> Result<String, JsError> {
    resolvent_decay_json(n1, n2, m1, m2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn zeta_asymptotics(theta: f64, positive: bool) -> Result<String, JsError> {
    zeta_asymptotics_json(theta, positive).map_err(|e| JsError::new(&e))
}
