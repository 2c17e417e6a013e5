use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::anyhow;
use areahol_core::gamma::{gamma_mul, GammaJson, GammaRElement, SurfaceWord};
use areahol_core::lattice::{
    curvature_at_basepoint, shrinking_loop_curvature, solve_sector, verify_area_property,
    FieldJson, FlowReport, GaugeField, SectorSetup, ShrinkRow, StepPolicy,
};
use areahol_core::mesh::{
    enclosed_area, mesh_from_spec, random_homotopic_pair, MeshLoop, MeshLoopJson,
};
use areahol_core::rep::enumerate_sphere_classes;
use areahol_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::io::{read_json, write_atomic, write_json};
use crate::{ClassifyArgs, Failure, Global, PlotArgs, SolveArgs, VerifyArgs, WordArgs};

type Outcome = Result<(), Failure>;

fn print_json<T: Serialize>(value: &T) -> Outcome {
    println!(
        "{}",
        serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.into()))?
    );
    Ok(())
}

/// Field snapshot as written by `solve`: the field plus the seed that produced it.
#[derive(Serialize, Deserialize)]
struct FieldFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(flatten)]
    field: FieldJson,
}

fn report_path(out: &Path) -> PathBuf {
    out.with_extension("report.json")
}

pub fn solve(global: &Global, args: &SolveArgs) -> Outcome {
    if args.n == 0 {
        return Err(Failure::Usage(anyhow!("--n must be at least 1")));
    }
    let mesh = mesh_from_spec(&args.mesh).map_err(|e| Failure::Usage(e.into()))?;
    let out = global
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("field.json"));
    let report_out = args.report.clone().unwrap_or_else(|| report_path(&out));
    let setup = SectorSetup {
        mesh: Arc::new(mesh),
        n: args.n,
        flux: args.flux,
        perturbation: args.perturb,
        seed: global.seed,
    };
    let policy = StepPolicy {
        initial_step: args.step,
        ..StepPolicy::default()
    };
    let tol = global.tol.unwrap_or(1e-9);
    match solve_sector(&setup, &policy, tol, args.max_iter, global.trace) {
        Ok((field, report)) => {
            write_json(
                &out,
                &FieldFile {
                    seed: Some(global.seed),
                    field: field.to_json(),
                },
            )
            .map_err(Failure::Io)?;
            write_json(&report_out, &report).map_err(Failure::Io)?;
            if global.json {
                print_json(&report)
            } else {
                println!(
                    "converged after {} iterations: action {:.12}, gradient norm {:.3e}, seed {}",
                    report.iterations, report.final_action, report.final_gradient_norm, global.seed
                );
                println!(
                    "field written to {}, report to {}",
                    out.display(),
                    report_out.display()
                );
                Ok(())
            }
        }
        Err(Error::NotConverged(report)) => {
            write_json(&report_out, &*report).map_err(Failure::Io)?;
            Err(Failure::NotConverged(format!(
                "no convergence after {} iterations (gradient norm {:.3e}); report written to {}",
                report.iterations,
                report.final_gradient_norm,
                report_out.display()
            )))
        }
        Err(e @ Error::BranchCut { .. }) => Err(Failure::NotConverged(e.to_string())),
        Err(e) => Err(Failure::Usage(e.into())),
    }
}

#[derive(Deserialize)]
struct LoopPair {
    loop1: MeshLoopJson,
    loop2: MeshLoopJson,
}

#[derive(Serialize)]
struct VerifyRow {
    pair: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifyOutput {
    seed: u64,
    tol: f64,
    lambda_face: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    perturb: Option<f64>,
    rows: Vec<VerifyRow>,
    max_residual: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    shrink: Option<Vec<ShrinkRow>>,
}

fn verify_pair(
    field: &GaugeField,
    l1: &MeshLoop,
    l2: &MeshLoop,
    lambda: &areahol_core::SkewHermitian,
) -> Result<(f64, f64), Error> {
    let delta = enclosed_area(field.mesh(), &l1.mul(&l2.reverse())?)?.value;
    Ok((delta, verify_area_property(field, l1, l2, lambda)?))
}

pub fn verify(global: &Global, args: &VerifyArgs) -> Outcome {
    let file: FieldFile = read_json(&args.field).map_err(Failure::Io)?;
    let mut field = GaugeField::from_json(&file.field).map_err(|e| Failure::Io(e.into()))?;
    let mesh = field.mesh_arc().clone();
    if args.lambda_from_face >= mesh.num_faces() {
        return Err(Failure::Usage(anyhow!(
            "face {} does not exist ({} faces)",
            args.lambda_from_face,
            mesh.num_faces()
        )));
    }
    let lambda = curvature_at_basepoint(&field, args.lambda_from_face)
        .map_err(|e| Failure::Verification(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
    if let Some(eps) = args.perturb {
        field = field.perturbed(&mut rng, eps);
    }
    let pairs: Vec<(MeshLoop, MeshLoop)> = match &args.pairs {
        Some(path) => {
            let raw: Vec<LoopPair> = read_json(path).map_err(Failure::Io)?;
            raw.iter()
                .map(|p| {
                    Ok((
                        MeshLoop::from_json(&p.loop1)?,
                        MeshLoop::from_json(&p.loop2)?,
                    ))
                })
                .collect::<Result<_, Error>>()
                .map_err(|e| Failure::Usage(e.into()))?
        }
        None => (0..args.random)
            .map(|_| random_homotopic_pair(&mesh, &mut rng, args.loop_len))
            .collect(),
    };
    let tol = global.tol.unwrap_or(1e-6);
    let mut rows = Vec::with_capacity(pairs.len());
    let mut max_residual: f64 = 0.0;
    let mut flagged = false;
    for (i, (l1, l2)) in pairs.iter().enumerate() {
        match verify_pair(&field, l1, l2, &lambda) {
            Ok((delta, residual)) => {
                max_residual = max_residual.max(residual);
                rows.push(VerifyRow {
                    pair: i,
                    delta_area: Some(delta),
                    residual: Some(residual),
                    error: None,
                });
            }
            Err(e) => {
                flagged = true;
                rows.push(VerifyRow {
                    pair: i,
                    delta_area: None,
                    residual: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let shrink = match &args.shrink {
        Some(blocks) => {
            Some(shrinking_loop_curvature(&field, blocks).map_err(|e| Failure::Usage(e.into()))?)
        }
        None => None,
    };
    let passed = !flagged && max_residual < tol;
    let output = VerifyOutput {
        seed: global.seed,
        tol,
        lambda_face: args.lambda_from_face,
        perturb: args.perturb,
        rows,
        max_residual,
        passed,
        shrink,
    };
    if let Some(out) = &global.out {
        write_json(out, &output).map_err(Failure::Io)?;
    }
    if global.json {
        print_json(&output)?;
    } else {
        println!("{:>5}  {:>14}  {:>12}", "pair", "delta_area", "residual");
        for row in &output.rows {
            match (&row.delta_area, &row.residual, &row.error) {
                (Some(d), Some(r), _) => println!("{:>5}  {:>14.9}  {:>12.3e}", row.pair, d, r),
                (_, _, Some(e)) => println!("{:>5}  FLAGGED: {e}", row.pair),
                _ => {}
            }
        }
        if let Some(table) = &output.shrink {
            println!("{:>5}  {:>12}  {:>12}", "block", "area", "residual");
            for r in table {
                println!("{:>5}  {:>12.6}  {:>12.3e}", r.block, r.area, r.residual);
            }
        }
        println!(
            "max residual {:.3e} (tol {tol:e}): {}",
            output.max_residual,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "max residual {:.3e} against tol {tol:e}{}",
            output.max_residual,
            if flagged { ", some pairs flagged" } else { "" }
        )))
    }
}

#[derive(Serialize)]
struct ClassRow {
    weights: Vec<i64>,
    action: f64,
    flat: bool,
    geodesic: String,
}

fn geodesic(weights: &[i64]) -> String {
    let entries: Vec<String> = weights.iter().map(|k| format!("e^(2πi·{k}t)")).collect();
    format!("t ↦ diag({})", entries.join(", "))
}

pub fn classify(global: &Global, args: &ClassifyArgs) -> Outcome {
    if args.n == 0 {
        return Err(Failure::Usage(anyhow!("--n must be at least 1")));
    }
    let rows: Vec<ClassRow> = enumerate_sphere_classes(args.n, args.kmax)
        .into_iter()
        .map(|w| ClassRow {
            action: w.action(),
            flat: w.is_flat(),
            geodesic: geodesic(w.weights()),
            weights: w.into(),
        })
        .collect();
    if let Some(out) = &global.out {
        write_json(out, &rows).map_err(Failure::Io)?;
    }
    if global.json {
        return print_json(&rows);
    }
    for r in &rows {
        let weights: Vec<String> = r.weights.iter().map(i64::to_string).collect();
        println!(
            "({})  action {:.6} = 4π²·{}  {}{}",
            weights.join(", "),
            r.action,
            (r.action / (4.0 * PI * PI)).round(),
            r.geodesic,
            if r.flat { "  [flat]" } else { "" }
        );
    }
    println!("{} classes", rows.len());
    Ok(())
}

#[derive(Serialize)]
struct WordOutput {
    genus: usize,
    inputs: Vec<GammaJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<GammaJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relator: Option<GammaJson>,
}

pub fn word(global: &Global, args: &WordArgs) -> Outcome {
    let count = args.words.len().max(args.t.len()).max(1);
    let inputs: Vec<GammaRElement> = (0..count)
        .map(|i| {
            let w = args.words.get(i).map_or("", String::as_str);
            let t = args.t.get(i).copied().unwrap_or(0.0);
            GammaRElement::parse(args.genus, w, t)
        })
        .collect::<Result<_, Error>>()
        .map_err(|e| Failure::Usage(e.into()))?;
    let product = if inputs.len() > 1 {
        let mut acc = inputs[0].clone();
        for x in &inputs[1..] {
            acc = gamma_mul(&acc, x).map_err(|e| Failure::Usage(e.into()))?;
        }
        Some(acc)
    } else {
        None
    };
    let relator = args
        .check_relator
        .then(|| {
            GammaRElement::new(
                args.genus,
                SurfaceWord::relator(args.genus).letters().to_vec(),
                0.0,
            )
        })
        .transpose()
        .map_err(|e| Failure::Usage(e.into()))?;
    let output = WordOutput {
        genus: args.genus,
        inputs: inputs.iter().map(GammaRElement::to_json).collect(),
        product: product.as_ref().map(GammaRElement::to_json),
        relator: relator.as_ref().map(GammaRElement::to_json),
    };
    if let Some(out) = &global.out {
        write_json(out, &output).map_err(Failure::Io)?;
    }
    if global.json {
        print_json(&output)?;
    } else {
        for x in &inputs {
            println!("{x}");
        }
        if let Some(p) = &product {
            println!("product: {p}");
        }
        if let Some(r) = &relator {
            println!("relator: {r}");
        }
    }
    match &relator {
        // Genus 0 has no relator; its central coordinate lives modulo 1.
        Some(r) if args.genus > 0 && !(r.word().is_empty() && (r.t() - 1.0).abs() < 1e-12) => Err(
            Failure::Verification(format!("relator normalized to {r}, expected (empty, t=1)")),
        ),
        _ => Ok(()),
    }
}

fn flow_csv(report: &FlowReport) -> String {
    let mut csv = String::from("iteration,action,gradient_norm\n");
    for s in report.step_history.iter().flatten() {
        let _ = writeln!(csv, "{},{},{}", s.iteration, s.action, s.gradient_norm);
    }
    csv
}

fn shrink_csv(rows: &[ShrinkRow]) -> String {
    let mut csv = String::from("block,area,residual\n");
    for r in rows {
        let _ = writeln!(csv, "{},{},{}", r.block, r.area, r.residual);
    }
    csv
}

pub fn plot_data(global: &Global, args: &PlotArgs) -> Outcome {
    let value: serde_json::Value = read_json(&args.input).map_err(Failure::Io)?;
    let csv = if value.get("iterations").is_some() {
        flow_csv(&serde_json::from_value(value).map_err(|e| Failure::Io(e.into()))?)
    } else if let Some(shrink) = value.get("shrink") {
        shrink_csv(
            &serde_json::from_value::<Vec<ShrinkRow>>(shrink.clone())
                .map_err(|e| Failure::Io(e.into()))?,
        )
    } else if value.is_array() {
        shrink_csv(
            &serde_json::from_value::<Vec<ShrinkRow>>(value).map_err(|e| Failure::Io(e.into()))?,
        )
    } else {
        return Err(Failure::Io(anyhow!(
            "{} holds neither a flow report nor a shrinking-loop table",
            args.input.display()
        )));
    };
    match &global.out {
        Some(out) => write_atomic(out, csv.as_bytes()).map_err(Failure::Io),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}
