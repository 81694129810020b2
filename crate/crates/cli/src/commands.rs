use std::fmt::Write as _;
use std::io::Read as _;
use std::path::Path;

use anyhow::{bail, Context};
use num_bigint::BigInt;
use serde_json::{json, Value};

use octamoment::bijection::{forest_degree, pretty, theta_forward, theta_inverse, to_dot, validate_forest, PermutedForest};
use octamoment::closed_forms::{complex_expansion, real_expansion, real_expansion_strict, DiscrepancyEntry, OracleBounds};
use octamoment::exact::{factorial, odd_double_factorial};
use octamoment::group::{class_connection_table, double_coset_table, CLASS_MAX_N, COSET_MAX_N};
use octamoment::moments::{mc_moment_complex, mc_moment_real, moment_complex_exact, moment_real_exact, MatrixSpec, MCReport};
use octamoment::oracle::{l_table_bounded, lp_from_l, partitioned_tallies, PARTITIONED_MAX_N};
use octamoment::partition::partitions_of;
use octamoment::symfun::MonomialExpansion;
use octamoment::verify::{run_suite, Suite, SuiteReport};
use octamoment::{ExactRational, Partition, PartitionedHypermap};

use crate::{Field, Format, Kind, Status};

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &impl serde::Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Csv => {
                let mut s = self.header.join(",") + "\n";
                for row in &self.rows {
                    s += &(row.join(",") + "\n");
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(h, v)| (h.to_string(), json_cell(h, v)))
                            .collect::<serde_json::Map<_, _>>();
                        Value::Object(obj)
                    })
                    .collect();
                json_text(&rows)?
            }
            Format::Pretty => {
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|k| {
                        self.rows
                            .iter()
                            .map(|r| r[k].len())
                            .chain([self.header[k].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: Vec<&str>| -> String {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                        + "\n"
                };
                let mut s = line(self.header.clone());
                for row in &self.rows {
                    s += &line(row.iter().map(String::as_str).collect());
                }
                s
            }
        })
    }
}

/// Counts stay strings in JSON so large values survive.
fn json_cell(header: &str, v: &str) -> Value {
    match header {
        "r" => v.parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::from(v)),
        _ => Value::from(v),
    }
}

fn part(p: &Partition, format: Format) -> String {
    match format {
        Format::Json => p.to_string(),
        _ => p.to_exponent_string(),
    }
}

pub fn coeffs(n: u32, kind: Kind, format: Format, bound: usize, output: Option<&Path>) -> anyhow::Result<Status> {
    let nn = n as usize;
    let l = l_table_bounded(nn, bound)?;
    let bn = BigInt::from(2).pow(n) * factorial(n as u64);
    let parts = partitions_of(n);

    // Cross-checks against independent computations where they are cheap.
    let mut problems = Vec::new();
    if BigInt::from(l.total()) != odd_double_factorial(n as u64) {
        problems.push(format!("pairing total {} is not (2n-1)!!", l.total()));
    }
    if matches!(kind, Kind::C | Kind::All) && nn <= CLASS_MAX_N {
        for ((lam, mu), c) in class_connection_table(nn)? {
            if l.get(&lam, &mu, 0) != c {
                problems.push(format!("c[{lam}|{mu}]: pairings {} vs class algebra {c}", l.get(&lam, &mu, 0)));
            }
        }
    }
    if matches!(kind, Kind::B | Kind::All) && nn <= COSET_MAX_N {
        for ((lam, mu), b) in double_coset_table(nn)? {
            if &bn * l.summed(&lam, &mu) != BigInt::from(b) {
                problems.push(format!("b[{lam}|{mu}]: pairings vs double cosets {b}"));
            }
        }
    }
    let lp = lp_from_l(&l);
    if kind == Kind::Lp && nn <= PARTITIONED_MAX_N {
        let direct = partitioned_tallies(nn, PARTITIONED_MAX_N)?;
        if direct.by_class != lp {
            problems.push("LP from refinements differs from partitioned enumeration".into());
        }
    }
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("cross-check failed: {p}");
        }
        return Ok(Status::Failed);
    }

    let p = |x: &Partition| part(x, format);
    let mut rows = Vec::new();
    let header = match kind {
        Kind::B | Kind::C => {
            for lam in &parts {
                for mu in &parts {
                    let v = if kind == Kind::B {
                        (&bn * l.summed(lam, mu)).to_string()
                    } else {
                        l.get(lam, mu, 0).to_string()
                    };
                    rows.push(vec![p(lam), p(mu), v]);
                }
            }
            vec!["lambda", "mu", if kind == Kind::B { "b" } else { "c" }]
        }
        Kind::L | Kind::Lp => {
            let table = if kind == Kind::L { &l } else { &lp };
            for lam in &parts {
                for mu in &parts {
                    for r in 0..=nn / 2 {
                        rows.push(vec![p(lam), p(mu), r.to_string(), table.get(lam, mu, r).to_string()]);
                    }
                }
            }
            vec!["lambda", "mu", "r", if kind == Kind::L { "L" } else { "LP" }]
        }
        Kind::All => {
            for lam in &parts {
                for mu in &parts {
                    for r in 0..=nn / 2 {
                        let v = l.get(lam, mu, r);
                        let c = if r == 0 { v } else { 0 };
                        rows.push(vec![
                            p(lam),
                            p(mu),
                            r.to_string(),
                            v.to_string(),
                            (&bn * v).to_string(),
                            c.to_string(),
                        ]);
                    }
                }
            }
            vec!["lambda", "mu", "r", "L", "b", "c"]
        }
    };
    emit(&Table { header, rows }.render(format)?, output)?;
    Ok(Status::Ok)
}

fn expansion_text(e: &MonomialExpansion, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => json_text(&e.records())?,
        Format::Csv => {
            let mut s = String::from("lambda,mu,coeff\n");
            for (l, m, c) in e.terms() {
                let _ = writeln!(s, "{},{},{c}", l.to_exponent_string(), m.to_exponent_string());
            }
            s
        }
        Format::Pretty => {
            let mut s = String::new();
            for (l, m, c) in e.terms() {
                let _ = writeln!(s, "m{}(X) m{}(Y)  {}", l.to_exponent_string(), m.to_exponent_string(), short(c));
            }
            s
        }
    })
}

/// Integers without the `/1`, for human-readable output.
fn short(v: &ExactRational) -> String {
    v.to_integer().map_or_else(|| v.to_string(), |i| i.to_string())
}

fn discrepancy_text(report: &[DiscrepancyEntry]) -> String {
    let mut s = String::new();
    for e in report {
        let value = match (&e.oracle_value, &e.group_residual) {
            (Some(v), _) => format!("oracle {}", short(v)),
            (None, Some(g)) => format!("group residual {}", short(g)),
            _ => "no oracle value".into(),
        };
        let _ = writeln!(
            s,
            "n={} lambda={} mu={} r={} A={}  {}  {value}",
            e.n,
            e.lambda.to_exponent_string(),
            e.mu.to_exponent_string(),
            e.r,
            e.a,
            e.formula_status
        );
    }
    s
}

pub fn expansion(
    n: u32,
    field: Field,
    strict: bool,
    format: Format,
    bounds: OracleBounds,
    output: Option<&Path>,
) -> anyhow::Result<Status> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    let (e, report) = match field {
        Field::Complex => (complex_expansion(n), Vec::new()),
        Field::Real if strict => match real_expansion_strict(n) {
            Ok(e) => (e, Vec::new()),
            Err(flagged) => {
                let text = match format {
                    Format::Json => json_text(&json!({ "n": n, "field": "real", "flagged": flagged }))?,
                    _ => format!("{} flagged strata; formula values are not defined there\n", flagged.len())
                        + &discrepancy_text(&flagged),
                };
                emit(&text, output)?;
                return Ok(Status::Degenerate);
            }
        },
        Field::Real => {
            let r = real_expansion(n, bounds)?;
            (r.expansion, r.report)
        }
    };
    let field_name = if field == Field::Real { "real" } else { "complex" };
    let text = match format {
        Format::Json => json_text(&json!({
            "n": n,
            "field": field_name,
            "terms": e.records(),
            "discrepancies": report,
        }))?,
        Format::Csv => expansion_text(&e, format)?,
        Format::Pretty => {
            let mut s = expansion_text(&e, format)?;
            if !report.is_empty() {
                let _ = writeln!(s, "\n{} flagged strata filled from the oracle:", report.len());
                s += &discrepancy_text(&report);
            }
            s
        }
    };
    emit(&text, output)?;
    Ok(Status::Ok)
}

fn suite_text(rep: &SuiteReport, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => json_text(rep)?,
        _ => {
            let mut s = String::new();
            for c in &rep.checks {
                let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for note in &rep.notes {
                let _ = writeln!(s, "note: {note}");
            }
            if !rep.flagged.is_empty() {
                let _ = writeln!(s, "{} flagged strata:", rep.flagged.len());
                s += &discrepancy_text(&rep.flagged);
            }
            let _ = writeln!(s, "{}", rep.summary());
            s
        }
    })
}

pub fn verify(suite: &str, n_max: Option<u32>, format: Format, output: Option<&Path>) -> anyhow::Result<Status> {
    let suite: Suite = suite.parse()?;
    let rep = run_suite(suite, n_max.unwrap_or(suite.max_n()))?;
    emit(&suite_text(&rep, format)?, output)?;
    Ok(if rep.passed() { Status::Ok } else { Status::Failed })
}

pub fn bijection(input: &Path, dot: Option<&Path>, format: Format, output: Option<&Path>) -> anyhow::Result<Status> {
    let text = read_input(input)?;
    let value: Value = serde_json::from_str(&text).context("input is not JSON")?;
    let (forest, hypermap, direction) = if value.get("vertices").is_some() {
        let f: PermutedForest = serde_json::from_value(value).context("not a forest")?;
        let violations = validate_forest(&f);
        if !violations.is_empty() {
            let text = match format {
                Format::Json => json_text(&json!({ "valid": false, "violations": violations }))?,
                _ => format!("invalid forest:\n{}\n", violations.join("\n")),
            };
            emit(&text, output)?;
            return Ok(Status::Failed);
        }
        let h = theta_inverse(&f)?;
        (f, h, "inverse")
    } else if value.get("f3").is_some() {
        let h: PartitionedHypermap = serde_json::from_value(value).context("not a partitioned hypermap")?;
        (theta_forward(&h)?, h, "forward")
    } else {
        bail!("input has neither `vertices` (forest) nor `f3` (hypermap)");
    };
    let degree = forest_degree(&forest);
    if let Some(p) = dot {
        std::fs::write(p, to_dot(&forest)).with_context(|| format!("writing {}", p.display()))?;
    }
    let text = match format {
        Format::Json => {
            let body = if direction == "inverse" {
                json!({ "degree": degree, "hypermap": hypermap, "notation": hypermap.pretty() })
            } else {
                json!({ "degree": degree, "forest": forest })
            };
            json_text(&body)?
        }
        _ => {
            let mut s = format!("A = {degree}\n");
            if direction == "inverse" {
                s += &hypermap.pretty();
                s.push('\n');
            } else {
                s += &pretty(&forest);
            }
            s
        }
    };
    emit(&text, output)?;
    Ok(Status::Ok)
}

pub fn matrix(path: Option<&Path>, eigs: Option<&str>, dim: usize) -> anyhow::Result<MatrixSpec> {
    if let Some(p) = path {
        return serde_json::from_str(&read_input(p)?).context("matrix JSON must be {dim, eigs} or {dim, entries}");
    }
    if let Some(list) = eigs {
        let values = list
            .split(',')
            .map(|t| t.trim().parse::<ExactRational>())
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(MatrixSpec::diagonal(values));
    }
    Ok(MatrixSpec::identity(dim))
}

pub fn mc(
    n: u32,
    field: Field,
    x: &MatrixSpec,
    y: &MatrixSpec,
    samples: u64,
    seed: u64,
    output: Option<&Path>,
) -> anyhow::Result<Status> {
    let (est, exact) = match field {
        Field::Real => (mc_moment_real(n, x, y, samples, seed)?, moment_real_exact(n, x, y).ok()),
        Field::Complex => (mc_moment_complex(n, x, y, samples, seed)?, moment_complex_exact(n, x, y).ok()),
    };
    emit(&json_text(&MCReport::new(&est, exact))?, output)?;
    Ok(Status::Ok)
}

pub fn report(n_max: u32, format: Format, output: Option<&Path>) -> anyhow::Result<Status> {
    let mut all = Vec::new();
    for n in 1..=n_max {
        all.extend(real_expansion(n, OracleBounds::default())?.report);
    }
    let text = match format {
        Format::Json => json_text(&all)?,
        _ => format!("{} flagged strata for n <= {n_max}\n", all.len()) + &discrepancy_text(&all),
    };
    emit(&text, output)?;
    Ok(Status::Ok)
}
