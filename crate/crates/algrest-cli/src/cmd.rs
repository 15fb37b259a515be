//! Command implementations. Each returns the process exit code on success;
//! engine errors map to the exit-code contract (1 mismatch, 2 input error,
//! 3 bound exhaustion).

use crate::{engine_err_code, Format, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};
use algrest::catalog::{self, load_family, parse_family, VariantCond};
use algrest::classify::{reduce, Family};
use algrest::parse::{parse_coeff_list, parse_germ_file};
use algrest::report::{
    invariant_report, markdown_table, verify_family, verify_family_shipped, FamilyContext, Report,
};
use algrest::restriction::build_space;
use algrest::EngineError;
use anyhow::{anyhow, Result};

pub fn classify_error(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<EngineError>() {
        Some(engine) => engine_err_code(engine),
        None => EXIT_INPUT,
    }
}

fn basis_results(space: &algrest::restriction::RestrictionSpace) -> serde_json::Value {
    let full: Vec<_> = space
        .basis
        .iter()
        .map(|b| {
            serde_json::json!({
                "name": b.name,
                "form": b.form.to_string(),
                "quasi_degree": b.delta,
                "closed": b.closed,
            })
        })
        .collect();
    serde_json::json!({
        "full_dim": space.full_dim(),
        "closed_dim": space.closed_dim(),
        "full_degrees": space.degrees(),
        "closed_degrees": space.closed_degrees(),
        "basis": full,
    })
}

pub fn basis(germ: &str, degree_bound: i64, format: Format) -> Result<u8> {
    let space = match parse_family(germ) {
        Some(Family::U7) => algrest::restriction::build_space_with_basis(
            &catalog::u7_germ()?,
            degree_bound,
            catalog::u7_basis(),
        )?,
        Some(Family::U8) => algrest::restriction::build_space_with_basis(
            &catalog::u8_germ()?,
            degree_bound,
            catalog::u8_basis(),
        )?,
        Some(Family::U9) => algrest::restriction::build_space_with_basis(
            &catalog::u9_germ()?,
            degree_bound,
            catalog::u9_basis(),
        )?,
        None => {
            let text = std::fs::read_to_string(germ)
                .map_err(|e| anyhow!(EngineError::Parse(format!("{}: {}", germ, e))))?;
            let g = parse_germ_file(&text)?;
            build_space(&g, degree_bound)?
        }
    };
    let results = basis_results(&space);
    match format {
        Format::Json => {
            let mut report = Report::new("basis", results);
            report.degree_bound = degree_bound;
            println!("{}", report.to_json());
        }
        Format::Md => {
            let rows: Vec<Vec<String>> = space
                .basis
                .iter()
                .map(|b| {
                    vec![
                        b.name.clone(),
                        b.form.to_string(),
                        b.delta.to_string(),
                        if b.closed { "yes" } else { "no" }.to_string(),
                    ]
                })
                .collect();
            println!(
                "{}",
                markdown_table(&["element", "form", "quasi-degree", "closed"], &rows)
            );
        }
    }
    Ok(EXIT_OK)
}

fn action_results(rec: &catalog::FamilyRecord) -> serde_json::Value {
    let vars = ["x1", "x2", "x3"];
    let closed: Vec<String> = rec
        .space
        .closed_indices()
        .iter()
        .map(|&i| rec.space.basis[i].name.clone())
        .collect();
    let mut images = serde_json::Map::new();
    for (i, f) in rec.action.fields.iter().enumerate() {
        let mat = &rec.action.mats[i];
        let cols: Vec<Vec<String>> = (0..mat.cols)
            .map(|j| (0..mat.rows).map(|r| mat.at(r, j).to_string()).collect())
            .collect();
        images.insert(f.name(&vars), serde_json::json!(cols));
    }
    serde_json::json!({
        "family": rec.family.name(),
        "closed_basis": closed,
        "images": images,
    })
}

pub fn action_table(germ: &str, format: Format) -> Result<u8> {
    let families: Vec<Family> = if germ.eq_ignore_ascii_case("all") {
        vec![Family::U7, Family::U8, Family::U9]
    } else {
        vec![parse_family(germ)
            .ok_or_else(|| anyhow!(EngineError::Parse(format!("unknown family {}", germ))))?]
    };
    let mut all = Vec::new();
    for f in families {
        let rec = load_family(f)?;
        match format {
            Format::Json => all.push(action_results(&rec)),
            Format::Md => {
                let vars = ["x1", "x2", "x3"];
                let closed: Vec<String> = rec
                    .space
                    .closed_indices()
                    .iter()
                    .map(|&i| rec.space.basis[i].name.clone())
                    .collect();
                let mut headers = vec!["field".to_string()];
                headers.extend(closed.iter().cloned());
                let header_refs: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
                let mut rows = Vec::new();
                for (i, fld) in rec.action.fields.iter().enumerate() {
                    let mat = &rec.action.mats[i];
                    let mut row = vec![fld.name(&vars)];
                    for j in 0..mat.cols {
                        let mut parts = Vec::new();
                        for r in 0..mat.rows {
                            let v = mat.at(r, j).to_string();
                            if v != "0" {
                                parts.push(format!("{}*{}", v, closed[r]));
                            }
                        }
                        row.push(if parts.is_empty() {
                            "0".into()
                        } else {
                            parts.join(" + ")
                        });
                    }
                    rows.push(row);
                }
                println!("### {}\n", rec.family.name());
                println!("{}", markdown_table(&header_refs, &rows));
            }
        }
    }
    if format == Format::Json {
        let report = Report::new("action-table", serde_json::json!(all));
        println!("{}", report.to_json());
    }
    Ok(EXIT_OK)
}

pub fn classify(germ: &str, coeffs: &str, format: Format) -> Result<u8> {
    let family = parse_family(germ)
        .ok_or_else(|| anyhow!(EngineError::Parse(format!("unknown family {}", germ))))?;
    let rec = load_family(family)?;
    let c = parse_coeff_list(coeffs)?;
    let expected = rec.space.closed_dim();
    if c.len() != expected {
        return Err(anyhow!(EngineError::CoefficientCount {
            expected,
            got: c.len(),
        }));
    }
    let (label, normal_form, trace) = reduce(&rec.action, family, &c)?;
    let class = rec.classes.iter().find(|k| k.label == label.label);
    let mut notes = vec!["canonicalization: artifact-defined (lexicographic over the scaling orbit)".to_string()];
    if label.sign == 0 {
        notes.push("zero restriction: the germ is contained in a smooth Lagrangian submanifold".into());
    }
    let results = serde_json::json!({
        "family": family.name(),
        "class": label.label,
        "display": class.map(|k| k.display.clone()),
        "sign": label.sign,
        "moduli": label.moduli.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "normal_form": normal_form.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "trace": trace.steps.iter().map(|s| s.description.clone()).collect::<Vec<_>>(),
    });
    match format {
        Format::Json => {
            let mut report = Report::new("classify", results);
            report.notes = notes;
            println!("{}", report.to_json());
        }
        Format::Md => {
            println!("class: {}", label.label);
            println!(
                "normal form coordinates: [{}]",
                normal_form
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            for n in notes {
                println!("note: {}", n);
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn invariants(
    germ: &str,
    class_label: &str,
    moduli: Option<&str>,
    seed: u64,
    ceiling: usize,
    format: Format,
) -> Result<u8> {
    let family = parse_family(germ)
        .ok_or_else(|| anyhow!(EngineError::Parse(format!("unknown family {}", germ))))?;
    let rec = load_family(family)?;
    let class = rec
        .classes
        .iter()
        .find(|k| k.label == class_label)
        .ok_or_else(|| {
            anyhow!(EngineError::Parse(format!(
                "unknown class label '{}' for {}",
                class_label,
                family.name()
            )))
        })?;
    let moduli = match moduli {
        Some(text) => {
            let m = parse_coeff_list(text)?;
            if m.len() != class.moduli_count {
                return Err(anyhow!(EngineError::CoefficientCount {
                    expected: class.moduli_count,
                    got: m.len(),
                }));
            }
            m
        }
        None => {
            let mut rng = algrest::seeded_rng(seed);
            class.draw_moduli(&mut rng, &VariantCond::Always)
        }
    };
    let ctx = FamilyContext::new(&rec)?;
    let report = invariant_report(&ctx, class, &moduli, ceiling)?;
    match format {
        Format::Json => {
            let mut envelope = Report::new("invariants", serde_json::to_value(&report)?);
            envelope.seed = Some(seed);
            envelope
                .notes
                .push("ind2 is computed for every family; the U8 tables do not list it".into());
            println!("{}", envelope.to_json());
        }
        Format::Md => {
            let mut rows = vec![
                vec!["cod".to_string(), report.cod.to_string()],
                vec!["musym".to_string(), report.musym.to_string()],
                vec!["ind".to_string(), report.ind.clone()],
                vec!["ind2".to_string(), report.ind2.clone()],
                vec!["Lt".to_string(), report.lt.clone()],
            ];
            if let Some(v) = &report.l2 {
                rows.push(vec!["L2".to_string(), v.clone()]);
            }
            if let Some(v) = &report.l12 {
                rows.push(vec!["L12".to_string(), v.clone()]);
            }
            if let Some(v) = &report.l3 {
                rows.push(vec!["L3".to_string(), v.clone()]);
            }
            println!("### {} {}\n", family.name(), report.class);
            println!("{}", markdown_table(&["invariant", "value"], &rows));
        }
    }
    Ok(EXIT_OK)
}

pub fn verify(family: &str, seed: u64, golden_path: Option<&str>, format: Format) -> Result<u8> {
    let families: Vec<Family> = if family.eq_ignore_ascii_case("all") {
        vec![Family::U7, Family::U8, Family::U9]
    } else {
        vec![parse_family(family)
            .ok_or_else(|| anyhow!(EngineError::Parse(format!("unknown family {}", family))))?]
    };
    let mut all_cells = Vec::new();
    for f in families {
        let rec = load_family(f)?;
        let ctx = FamilyContext::new(&rec)?;
        let cells = match golden_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow!(EngineError::Parse(format!("{}: {}", path, e))))?;
                let golden = algrest::catalog::parse_golden(&text)?;
                if golden.family != f.name() {
                    return Err(anyhow!(EngineError::Parse(format!(
                        "golden file is for {}, requested {}",
                        golden.family,
                        f.name()
                    ))));
                }
                verify_family(&ctx, &golden, seed, algrest::invariants::DEFAULT_LT_CEILING)?
            }
            None => verify_family_shipped(&ctx, seed)?,
        };
        all_cells.extend(cells);
    }
    let failures: Vec<_> = all_cells.iter().filter(|c| !c.ok).collect();
    match format {
        Format::Json => {
            let mut report = Report::new(
                "verify",
                serde_json::json!({
                    "cells": all_cells.len(),
                    "failures": failures.len(),
                    "failed_cells": failures,
                }),
            );
            report.seed = Some(seed);
            println!("{}", report.to_json());
        }
        Format::Md => {
            for c in &all_cells {
                if !c.ok {
                    println!(
                        "FAIL {}: expected {}, got {}",
                        c.cell, c.expected, c.got
                    );
                }
            }
            println!(
                "{} cells checked, {} failures",
                all_cells.len(),
                failures.len()
            );
        }
    }
    Ok(if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}
