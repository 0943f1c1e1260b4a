use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use pgnl::corpus::{parse_corpus, CONFIRMED_TERNARY};
use pgnl::escalator::{
    build_tree, depth2_table, expected_depth2_table, scan as run_scan, ClassSpec, Param, RowStatus,
    ScanOptions, ScanReport, ScanRow,
};
use pgnl::interval::Interval;
use pgnl::lattice::{beta, cuspidal_residual, lattice_from_sum};
use pgnl::oracle::stabilized_lattice_density;
use pgnl::polygonal::truant_of_set;
use pgnl::{Exec, PolygonalSum, TruantResult};

use crate::cache::ValueCache;
use crate::error::CliError;
use crate::{Format, ScanArgs, TreeArgs};

pub struct Context {
    pub format: Option<Format>,
    pub exec: Exec,
    pub cache: ValueCache,
}

impl Context {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

type CmdResult = Result<(), CliError>;

fn parse_sum(s: &str) -> Result<PolygonalSum, CliError> {
    Ok(s.parse::<PolygonalSum>()?)
}

fn print_json(v: &impl Serialize) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn truant_json(t: TruantResult) -> Value {
    match t {
        TruantResult::Truant(v) => json!({ "truant": v }),
        TruantResult::CandidateUniversal { checked_up_to } => {
            json!({ "candidate_universal_up_to": checked_up_to })
        }
    }
}

fn status_label(t: TruantResult) -> &'static str {
    if t.is_candidate_universal() {
        "candidate_universal"
    } else {
        "truant"
    }
}

pub fn truant(ctx: &Context, sum: &str, cap: u64) -> CmdResult {
    let sum = parse_sum(sum)?;
    if cap == 0 {
        return Err(pgnl::Error::Domain("cap must be >= 1".into()).into());
    }
    let t = truant_of_set(&ctx.cache.represented_set(&sum, cap)?, cap);
    ctx.cache.flush()?;
    match ctx.format_or(Format::Json) {
        Format::Json => print_json(&truant_json(t)),
        Format::Text => {
            println!("{sum}: {t}");
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["sum", "truant", "status"])?;
            let v = t.value().map(|v| v.to_string()).unwrap_or_default();
            w.write_record([sum.to_string(), v, status_label(t).to_string()])?;
            w.flush()?;
            Ok(())
        }
    }
}

pub fn tree(ctx: &Context, a: &TreeArgs) -> CmdResult {
    let mut spec = ClassSpec::with_min_polygon(a.lcm_bound, a.min_polygon, a.cap)?;
    if let Some(d) = a.depth_limit {
        spec = spec.depth_limited(d);
    }
    let tree = build_tree(&spec, ctx.exec, a.budget)?;
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, &tree.dump())?;
        w.flush()?;
    }
    let r = &tree.report;
    match ctx.format_or(Format::Json) {
        Format::Json => print_json(&json!({
            "lcm_bound": spec.lcm_bound,
            "min_polygon": spec.min_polygon,
            "cap": spec.cap,
            "depth_limit": spec.depth_limit,
            "truants": r.truants,
            "gamma": r.gamma,
            "complete": r.complete,
            "node_count": r.node_count,
            "candidate_leaves": r.candidate_leaves,
            "truncated": r.truncated,
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["depth", "sum", "truant", "status"])?;
            for n in &tree.nodes {
                let v = n.truant.value().map(|v| v.to_string()).unwrap_or_default();
                w.write_record([n.depth.to_string(), n.sum.to_string(), v, status_label(n.truant).into()])?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Text => {
            let ts: Vec<String> = r.truants.iter().map(u64::to_string).collect();
            println!("truants: {{{}}}", ts.join(", "));
            match r.gamma {
                Some(g) => println!("gamma: {g}"),
                None => println!("gamma: none"),
            }
            println!(
                "nodes: {} ({} candidate universal leaves, {} cut by depth limit)",
                r.node_count, r.candidate_leaves, r.truncated
            );
            println!("complete: {}", r.complete);
            Ok(())
        }
    }
}

fn param_str(p: Param) -> String {
    p.to_string()
}

pub fn table2(ctx: &Context, cap: u64, inject_fault: bool) -> CmdResult {
    let mut table = depth2_table(cap)?;
    if inject_fault {
        table.cells[0].truant += 1;
    }
    let expected = expected_depth2_table();
    let diff = table.diff(&expected);
    let summary = format!(
        "{} finite cells + {} tail cells",
        table.finite_cells(),
        table.tail_cells()
    );
    match ctx.format_or(Format::Text) {
        Format::Text => {
            for (cell, exp) in &diff {
                println!(
                    "DIFF a2={} m1={} m2={}: computed {}, expected {}",
                    cell.a2,
                    cell.m1,
                    cell.m2,
                    cell.truant,
                    exp.map_or("missing".into(), |v| v.to_string())
                );
            }
            if diff.is_empty() {
                println!("MATCH ({summary})");
            } else {
                println!("MISMATCH ({} of {summary})", diff.len());
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["a2", "m1", "m2", "truant", "expected"])?;
            for c in &table.cells {
                let exp = expected.get(c.a2, c.m1, c.m2).map(|v| v.to_string()).unwrap_or_default();
                w.write_record([c.a2.to_string(), param_str(c.m1), param_str(c.m2), c.truant.to_string(), exp])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let cells: Vec<Value> = table
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "a2": c.a2,
                        "m1": param_str(c.m1),
                        "m2": param_str(c.m2),
                        "truant": c.truant,
                        "expected": expected.get(c.a2, c.m1, c.m2),
                    })
                })
                .collect();
            print_json(&json!({
                "cap": cap,
                "match": diff.is_empty(),
                "finite_cells": table.finite_cells(),
                "tail_cells": table.tail_cells(),
                "mismatches": diff.len(),
                "cells": cells,
            }))?;
        }
    }
    if diff.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} table cells differ from the reference", diff.len())))
    }
}

fn rat_parts(q: &BigRational) -> (String, String) {
    (q.numer().to_string(), q.denom().to_string())
}

pub fn density(ctx: &Context, sum: &str, n: u64, p: u64, explain: bool, check: bool) -> CmdResult {
    let sum = parse_sum(sum)?;
    let lat = lattice_from_sum(&sum)?;
    let target = lat.target(n);
    let dv = beta(&sum, n, p)?;
    let oracle = if check {
        Some(stabilized_lattice_density(&lat, &target, p)?.density)
    } else {
        None
    };
    let (num, den) = rat_parts(&dv.value);
    match ctx.format_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "sum": sum.to_string(),
                "n": n,
                "p": p,
                "target": target.to_string(),
                "beta": dv.value.to_string(),
                "beta_num": num,
                "beta_den": den,
            });
            if explain {
                v["assembled_terms"] = serde_json::to_value(&dv.assembled_terms)?;
            }
            if let Some(o) = &oracle {
                v["oracle"] = json!(o.to_string());
                v["oracle_match"] = json!(*o == dv.value);
            }
            print_json(&v)?;
        }
        Format::Text | Format::Csv => {
            println!("beta_{p}({target}) = {}", dv.value);
            if explain {
                for t in &dv.assembled_terms {
                    println!("  t={} {:?} sign={} p^{} -> {}", t.t, t.kind, t.sign, t.exponent, t.contribution);
                }
            }
            if let Some(o) = &oracle {
                println!("oracle: {o}");
            }
        }
    }
    match oracle {
        Some(o) if o != dv.value => Err(CliError::Mismatch(format!(
            "closed form {} differs from congruence count {o}",
            dv.value
        ))),
        _ => Ok(()),
    }
}

fn interval_pair(i: &Interval) -> Value {
    let (lo, hi) = i.to_f64_outward();
    json!([lo, hi])
}

pub fn eisenstein(ctx: &Context, sum: &str, n: u64, cutoff: u64) -> CmdResult {
    let sum = parse_sum(sum)?;
    let res = cuspidal_residual(&sum, n, cutoff)?;
    let e = &res.eisenstein;
    match ctx.format_or(Format::Json) {
        Format::Json => {
            let bad: Vec<Value> = e
                .bad_primes
                .iter()
                .map(|f| {
                    let (num, den) = rat_parts(&f.beta);
                    json!({ "p": f.p, "beta_num": num, "beta_den": den })
                })
                .collect();
            print_json(&json!({
                "sum": sum.to_string(),
                "n": n,
                "target": e.target.to_string(),
                "cutoff": cutoff,
                "lambda": e.lambda,
                "mu": e.mu,
                "rho": e.rho,
                "bad_primes": bad,
                "prefactor": interval_pair(&e.prefactor),
                "eisenstein": interval_pair(&e.eisenstein),
                "rF": res.r_f,
                "cuspidal": interval_pair(&res.cuspidal),
            }))
        }
        Format::Text | Format::Csv => {
            println!("lambda={} mu={} rho={} target={}", e.lambda, e.mu, e.rho, e.target);
            for f in &e.bad_primes {
                println!("beta_{} = {}", f.p, f.beta);
            }
            println!("prefactor in {}", e.prefactor);
            println!("eisenstein in {}", e.eisenstein);
            println!("r_F({n}) = {}", res.r_f);
            println!("cuspidal in {}", res.cuspidal);
            Ok(())
        }
    }
}

fn scan_header(depth: usize) -> Vec<String> {
    let mut h = Vec::new();
    for i in 1..=depth {
        h.push(format!("a{i}"));
        h.push(format!("m{i}"));
    }
    h.push("truant".into());
    h.push("status".into());
    h
}

fn row_record(row: &ScanRow, depth: usize) -> Vec<String> {
    let mut rec = Vec::with_capacity(2 * depth + 2);
    for i in 0..depth {
        match row.terms.get(i) {
            Some((a, m)) => {
                rec.push(a.to_string());
                rec.push(m.to_string());
            }
            None => {
                rec.push(String::new());
                rec.push(String::new());
            }
        }
    }
    rec.push(match row.status {
        RowStatus::Truant(t) => t.to_string(),
        _ => String::new(),
    });
    rec.push(row.status.label().into());
    rec
}

fn parse_row(rec: &csv::StringRecord, depth: usize) -> Result<ScanRow, CliError> {
    let bad = || CliError::Usage(format!("unrecognized scan row: {rec:?}"));
    if rec.len() != 2 * depth + 2 {
        return Err(bad());
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let mut terms = Vec::new();
    for i in 0..depth {
        if rec[2 * i].is_empty() {
            break;
        }
        terms.push((num(&rec[2 * i])?, num(&rec[2 * i + 1])?));
    }
    let status = match &rec[2 * depth + 1] {
        "truant" => RowStatus::Truant(num(&rec[2 * depth])?),
        "candidate_universal" => RowStatus::CandidateUniversal,
        "parent-universal" => RowStatus::ParentUniversal,
        _ => return Err(bad()),
    };
    Ok(ScanRow { terms, status })
}

/// Reads the complete rows of a partial scan file, truncates a torn final
/// line, and returns the rows for re-absorption into the report.
fn recover_partial(path: &Path, depth: usize) -> Result<(Vec<ScanRow>, bool), CliError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((Vec::new(), false)),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut complete = 0u64;
    let mut lines = Vec::new();
    let mut buf = String::new();
    loop {
        buf.clear();
        let k = reader.read_line(&mut buf)?;
        if k == 0 || !buf.ends_with('\n') {
            break;
        }
        complete += k as u64;
        lines.push(buf.trim_end().to_string());
    }
    OpenOptions::new().write(true).open(path)?.set_len(complete)?;
    let Some((header, body)) = lines.split_first() else { return Ok((Vec::new(), false)) };
    if *header != scan_header(depth).join(",") {
        return Err(CliError::Usage(format!(
            "{} is not a depth-{depth} scan file",
            path.display()
        )));
    }
    let mut rows = Vec::with_capacity(body.len());
    for line in body {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
        let rec = r.records().next().ok_or_else(|| CliError::Usage("empty scan row".into()))??;
        rows.push(parse_row(&rec, depth)?);
    }
    Ok((rows, true))
}

fn report_json(r: &ScanReport, args: &ScanArgs, with_nodes: bool) -> Value {
    let mut v = json!({
        "depth": args.depth,
        "bounds": args.bounds,
        "cap": args.cap,
        "rows": r.rows,
        "max_finite_truant": r.max_finite_truant,
        "max_truant_node": r.max_truant_node.as_ref().map(|s| s.to_string()),
        "candidate_universal_count": r.candidate_universal_nodes.len(),
        "parent_universal": r.parent_universal,
    });
    if with_nodes {
        v["candidate_universal_nodes"] =
            r.candidate_universal_nodes.iter().map(|s| s.to_string()).collect();
    }
    v
}

pub fn scan(ctx: &Context, args: &ScanArgs) -> CmdResult {
    let depth = args.depth as usize;
    if args.bounds.len() != depth {
        return Err(CliError::Usage(format!(
            "--bounds needs {depth} values for depth {depth}, got {}",
            args.bounds.len()
        )));
    }
    let mut report = ScanReport::default();
    let mut opts = ScanOptions::new(args.bounds.clone(), args.cap);
    opts.exec = ctx.exec;
    opts.budget = args.budget;

    let (sink, write_header): (Box<dyn Write>, bool) = if let Some(path) = &args.resume {
        let (done, has_header) = recover_partial(path, depth)?;
        for row in &done {
            report.absorb(row);
        }
        opts.skip_rows = done.len() as u64;
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.seek(SeekFrom::End(0))?;
        (Box::new(f), !has_header)
    } else if let Some(path) = &args.out {
        (Box::new(File::create(path)?), true)
    } else if ctx.format == Some(Format::Json) {
        (Box::new(io::sink()), false)
    } else {
        (Box::new(io::stdout().lock()), true)
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    if write_header {
        w.write_record(scan_header(depth))?;
    }
    let result = run_scan(&opts, |row| {
        w.write_record(row_record(row, depth)).map_err(|e| io::Error::other(e.to_string()))?;
        Ok(())
    });
    w.flush()?;
    let fresh = result?;
    report.rows += fresh.rows;
    report.parent_universal += fresh.parent_universal;
    report.candidate_universal_nodes.extend(fresh.candidate_universal_nodes);
    if fresh.max_finite_truant > report.max_finite_truant {
        report.max_finite_truant = fresh.max_finite_truant;
        report.max_truant_node = fresh.max_truant_node;
    }
    if ctx.format == Some(Format::Json) {
        print_json(&report_json(&report, args, true))
    } else {
        eprintln!("{}", serde_json::to_string(&report_json(&report, args, false))?);
        Ok(())
    }
}

pub fn verify_corpus(ctx: &Context, cap: u64, corpus: Option<&Path>) -> CmdResult {
    let text = match corpus {
        Some(p) => fs::read_to_string(p)?,
        None => CONFIRMED_TERNARY.to_string(),
    };
    let sums = parse_corpus(&text)?;
    if cap == 0 {
        return Err(pgnl::Error::Domain("cap must be >= 1".into()).into());
    }
    let mut failures = Vec::new();
    for s in &sums {
        if let TruantResult::Truant(g) = truant_of_set(&ctx.cache.represented_set(s, cap)?, cap) {
            failures.push((s, g));
        }
    }
    ctx.cache.flush()?;
    let passed = sums.len() - failures.len();
    match ctx.format_or(Format::Text) {
        Format::Json => print_json(&json!({
            "cap": cap,
            "total": sums.len(),
            "passed": passed,
            "failures": failures.iter().map(|(s, g)| json!({ "sum": s.to_string(), "first_gap": g })).collect::<Vec<_>>(),
        }))?,
        Format::Text | Format::Csv => {
            for (s, g) in &failures {
                println!("FAIL {s}: first gap {g}");
            }
            println!("{passed}/{} pass (cap {cap})", sums.len());
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} of {} sums have a gap below {cap}", failures.len(), sums.len())))
    }
}
