//! `hypack`: batch driver for packings, growth tables, bunched-ball search
//! and the bump-surface demo. Exit codes: 0 pass, 1 verification failure,
//! 2 invalid configuration, 3 search schedule exhausted.

mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, Format, Opts};
use hypack::flat_graph::flat_graph_example;
use hypack::maps::map_by_label;
use hypack::packing::{
    generate_centers, growth_table, verify_packing_with_tolerance, write_growth_csv, PackingSpec,
    DEFAULT_CAP,
};
use hypack::search::{certify_configuration, default_net, find_bunched_configuration, SearchParams};
use hypack::{HypError, DEFAULT_TOL};

const SCHEMA: u32 = 1;

enum Failure {
    Verification,
    Invalid(String),
    Exhausted,
    Io(String),
}

impl From<HypError> for Failure {
    fn from(e: HypError) -> Self {
        match e {
            HypError::ScheduleExhausted { .. } => Failure::Exhausted,
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HYPACK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.command {
        Command::Pack(o) => o.resolve().map_err(Failure::Invalid).and_then(|o| cmd_pack(&o)),
        Command::Growth(o) => o.resolve().map_err(Failure::Invalid).and_then(|o| cmd_growth(&o)),
        Command::Search(o) => o.resolve().map_err(Failure::Invalid).and_then(|o| cmd_search(&o)),
        Command::DemoFlat(o) => o.resolve().map_err(Failure::Invalid).and_then(|o| cmd_demo_flat(&o)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Exhausted) => ExitCode::from(3),
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn require<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Invalid(format!("--{name} is required")))
}

/// Writes to `--out` through a temporary file in the same directory, or to
/// stdout.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match out {
        None => std::io::stdout().write_all(bytes).map_err(io),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    emit(out, text.as_bytes())
}

fn cmd_pack(o: &Opts) -> Result<(), Failure> {
    let c = require(o.c, "C")?;
    let big_r = require(o.big_r, "R")?;
    let m = o.m.unwrap_or(2);
    let cap = o.cap.unwrap_or(DEFAULT_CAP);
    let tol = o.tolerance.unwrap_or(DEFAULT_TOL);
    let spec = PackingSpec::standard(c, big_r, m)?;
    let fam = generate_centers(&spec, cap)?;
    let report = verify_packing_with_tolerance(&fam, tol);
    match o.format.unwrap_or(Format::Json) {
        Format::Json => {
            let centers: Vec<Vec<f64>> = fam.centers.iter().map(|p| p.polar_row()).collect();
            emit_json(
                o.out.as_deref(),
                &json!({
                    "schema": SCHEMA,
                    "params": {"C": c, "R": big_r, "m": m, "cap": cap, "tolerance": tol},
                    "alpha": fam.alpha,
                    "family_size": fam.full_count,
                    "indices": fam.indices,
                    "centers_polar": centers,
                    "report": report,
                }),
            )?;
        }
        Format::Csv => {
            let mut text = String::from("index,r");
            for i in 1..=m {
                text.push_str(&format!(",u{i}"));
            }
            text.push('\n');
            for (j, p) in fam.indices.iter().zip(&fam.centers) {
                let row: Vec<String> = p.polar_row().iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("{j},{}\n", row.join(",")));
            }
            emit(o.out.as_deref(), text.as_bytes())?;
        }
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_growth(o: &Opts) -> Result<(), Failure> {
    let c = require(o.c, "C")?;
    let from = require(o.r_from, "R-from")?;
    let to = require(o.r_to, "R-to")?;
    let mut values = Vec::new();
    let mut i = 0u32;
    while from + f64::from(i) <= to + 1e-9 {
        values.push(from + f64::from(i));
        i += 1;
    }
    let rows = growth_table(c, &values)?;
    match o.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_growth_csv(&rows, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            emit(o.out.as_deref(), &buf)
        }
        Format::Json => emit_json(
            o.out.as_deref(),
            &json!({"schema": SCHEMA, "params": {"C": c, "R_from": from, "R_to": to}, "rows": rows}),
        ),
    }
}

fn cmd_search(o: &Opts) -> Result<(), Failure> {
    let m = o.m.unwrap_or(2);
    let f = map_by_label(o.map.as_deref().unwrap_or("poincare"), m)?;
    let r = o.r.unwrap_or(1.0);
    let eps = o.eps.unwrap_or(0.5);
    let k = o.k.unwrap_or(2);
    let cap = o.cap.unwrap_or(DEFAULT_CAP);
    let seed = o.seed.unwrap_or(0);
    let samples = o.samples.unwrap_or(1000);
    let mut params = SearchParams::new(r, eps, k, o.hausdorff, cap, seed)?;
    if let Some(schedule) = &o.r_schedule {
        params = params.with_schedule(schedule.clone())?;
    } else if let Some(r_max) = o.r_max {
        let kept: Vec<f64> = params.r_schedule.iter().copied().filter(|&x| x <= r_max).collect();
        params = params.with_schedule(kept)?;
    }
    let net = default_net(&f, r, eps)?;
    let header = json!({
        "map": f.label, "m": m, "r": r, "eps": eps, "k": k, "C": params.c,
        "R_schedule": params.r_schedule, "cap": cap, "seed": seed, "samples": samples,
        "hausdorff": o.hausdorff, "L": f.lipschitz, "net_size": net.len(), "net_delta": net.delta,
    });
    let found = match find_bunched_configuration(&f, &params, Some(&net)) {
        Ok(found) => found,
        Err(HypError::ScheduleExhausted { largest_fiber, trace }) => {
            emit_json(
                o.out.as_deref(),
                &json!({
                    "schema": SCHEMA, "params": header, "error": "schedule_exhausted",
                    "largest_fiber": largest_fiber, "trace": trace,
                }),
            )?;
            return Err(Failure::Exhausted);
        }
        Err(e) => return Err(e.into()),
    };
    let cert = certify_configuration(&f, &found.config, &net, samples, seed, o.hausdorff)?;
    let cfg = &found.config;
    emit_json(
        o.out.as_deref(),
        &json!({
            "schema": SCHEMA,
            "params": header,
            "R_used": cfg.r_used,
            "centers_polar": cfg.centers_polar(),
            "member_indices": cfg.member_indices,
            "pairwise_manifold_min": cfg.pairwise_manifold_min,
            "pairwise_image_max": cfg.pairwise_image_max,
            "hausdorff_max": cert.hausdorff.measured,
            "pass": {"i": cert.separation.pass, "ii": cert.set_distance.pass, "iii": cert.hausdorff.pass},
            "certificate": cert,
            "trace": found.trace,
        }),
    )?;
    if cert.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_demo_flat(o: &Opts) -> Result<(), Failure> {
    let k_max = o.k.unwrap_or(8);
    let k_max = u32::try_from(k_max).map_err(|_| Failure::Invalid("--k is too large".into()))?;
    let report = flat_graph_example(k_max);
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "k": r.k, "extrinsic": r.extrinsic, "intrinsic_lo": r.intrinsic_lo,
                "intrinsic_hi": r.intrinsic_hi, "ratio": r.intrinsic_lo / r.extrinsic,
            })
        })
        .collect();
    match o.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(
            o.out.as_deref(),
            &json!({
                "schema": SCHEMA, "K": k_max, "rows": rows,
                "mesh_cells": report.mesh_cells, "meets_ridge_bound": report.meets_ridge_bound,
            }),
        ),
        Format::Csv => {
            let mut text = String::from("k,extrinsic,intrinsic_lo,intrinsic_hi,ratio\n");
            for r in &report.rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.k, r.extrinsic, r.intrinsic_lo, r.intrinsic_hi, r.intrinsic_lo / r.extrinsic
                ));
            }
            emit(o.out.as_deref(), text.as_bytes())
        }
    }
}
