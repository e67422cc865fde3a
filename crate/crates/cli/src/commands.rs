use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use fracfib::analysis::{
    check_two_generated, element_order, fingerprint, regular_rep, AnalysisError, Fingerprint,
};
use fracfib::certificates::{
    check_certificate, gen_commutator_cert, gen_square_cert, Certificate,
};
use fracfib::enumerator::{
    enumerate, low_index_subgroups_with, subgroup_abelianization, CosetTable, EnumOutcome, Strategy,
};
use fracfib::invariants::{abelianization, circulant_resultant};
use fracfib::presentations::{build_fractional, FibParams, Presentation};
use fracfib::sequences::{
    ab_order_formula, check_corollary_36a, coeff_table, sweep_power_divisibility, sweep_monotonicity,
    sweep_parity, sweep_two_adic, v_terms, PowerDivisibilityBounds,
};
use fracfib::words::FreeWord;
use fracfib::Exec;
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::group::{parse_word, GroupDesc};
use crate::report::{elapsed_ms, run_jobs, Item, Job, RunReport, Status};

/// Integers as JSON numbers when they fit, as decimal strings otherwise.
pub fn big_json<T: Into<BigInt>>(x: T) -> Value {
    let x: BigInt = x.into();
    match i64::try_from(&x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn finish(command: String, start: Instant, items: Vec<Item>) -> RunReport {
    RunReport {
        command,
        items,
        wall_ms: elapsed_ms(start),
    }
}

fn fib_inputs(n: usize, k: i64, l: i64, omega: u64) -> Value {
    json!({ "n": n, "k": k, "l": l, "omega": omega })
}

/// `|F^{k/l}(n;omega)^ab|` by Smith normal form and, for `omega = 0`, by
/// the closed formula and the circulant resultant. Fails on disagreement or
/// on a mismatch with `expected`.
pub fn ab_item(n: usize, k: i64, l: i64, omega: u64, expected: Option<u64>) -> Item {
    let inputs = fib_inputs(n, k, l, omega);
    let name = format!("ab F^{k}/{l}({n};{omega})");
    let p = match FibParams::normalized(n, k, l, omega).and_then(|p| Ok((p, build_fractional(&p)?))) {
        Ok(p) => p,
        Err(e) => return Item::error(name, inputs, e),
    };
    let (params, pres) = p;
    let ab = abelianization(&pres);
    let snf = ab.order();
    let mut computed = json!({
        "invariants": ab.to_string(),
        "snf": snf.clone().map_or(json!("infinite"), big_json),
    });
    let mut agree = true;
    if omega == 0 {
        let Ok(n32) = u32::try_from(n) else {
            return Item::error(name, inputs, "n too large");
        };
        let formula = ab_order_formula(n32, params.k as u64, params.l as u64);
        let formula = match formula {
            Ok(f) => BigInt::from(f),
            Err(e) => return Item::error(name, inputs, e),
        };
        let circulant = circulant_resultant(n, params.k, params.l).magnitude().clone();
        agree = snf.as_ref() == Some(&formula) && BigInt::from(circulant.clone()) == formula;
        computed["formula"] = big_json(formula);
        computed["circulant"] = big_json(circulant);
    }
    computed["agree"] = json!(agree);
    let mut item = Item::new(name, inputs, computed, Status::from_bool(agree));
    if let Some(e) = expected {
        let matches = snf.is_some_and(|o| o == BigInt::from(e));
        item.expected = Some(json!(e));
        item.status = Status::from_bool(agree && matches);
    }
    item
}

pub fn cmd_ab(n: usize, k: i64, l: i64, omega: u64) -> RunReport {
    let start = Instant::now();
    let item = ab_item(n, k, l, omega, None);
    finish(format!("ab {n} {k} {l} --omega {omega}"), start, vec![item])
}

/// `V_1 .. V_n`, each checked against the coefficient table.
pub fn cmd_vseq(n: u32, k: u64, l: u64) -> Result<RunReport> {
    let start = Instant::now();
    let terms = v_terms(n, k, l)?;
    let mut items = Vec::with_capacity(terms.len());
    for (i, v) in terms.into_iter().enumerate() {
        let j = i as u32 + 1;
        let by_table = coeff_table(j)?.evaluate(k, l);
        items.push(Item::expect(
            format!("V_{j}^{{{k}/{l}}}"),
            json!({ "n": j, "k": k, "l": l }),
            big_json(by_table),
            big_json(v),
        ));
    }
    Ok(finish(format!("vseq {n} {k} {l}"), start, items))
}

/// Index of `<subgroup>`, inconclusive on overflow.
pub fn order_item(
    name: String,
    inputs: Value,
    p: &Presentation,
    subgroup: &[FreeWord],
    max_cosets: usize,
    strategy: Strategy,
    expected: Option<usize>,
) -> (Item, Option<CosetTable>) {
    let outcome = match enumerate(p, subgroup, max_cosets, strategy) {
        Ok(o) => o,
        Err(e) => return (Item::error(name, inputs, e), None),
    };
    match outcome {
        EnumOutcome::Complete(t) => {
            let computed = json!(t.num_cosets());
            let item = match expected {
                Some(e) => Item::expect(name, inputs, json!(e), computed),
                None => Item::new(name, inputs, computed, Status::Pass),
            };
            (item, Some(t))
        }
        EnumOutcome::Overflow { max_cosets } => {
            let mut item = Item::new(
                name,
                inputs,
                json!({ "overflow": max_cosets }),
                Status::Inconclusive,
            );
            item.expected = expected.map(|e| json!(e));
            (item, None)
        }
    }
}

pub fn cmd_enumerate(
    desc: &GroupDesc,
    subgroup: &[String],
    max_cosets: usize,
    strategy: Strategy,
    emit: Option<&Path>,
) -> Result<RunReport> {
    let start = Instant::now();
    let p = desc.presentation()?;
    let words = subgroup
        .iter()
        .map(|w| parse_word(&p, w))
        .collect::<Result<Vec<_>>>()?;
    let inputs = json!({
        "group": desc.to_string(),
        "subgroup": subgroup,
        "max_cosets": max_cosets,
        "strategy": format!("{strategy:?}").to_lowercase(),
    });
    let (item, table) = order_item(
        format!("index in {desc}"),
        inputs,
        &p,
        &words,
        max_cosets,
        strategy,
        None,
    );
    if let (Some(path), Some(t)) = (emit, &table) {
        write_json(path, &t.to_json())?;
    }
    Ok(finish(format!("enumerate {desc}"), start, vec![item]))
}

fn fingerprint_json(f: &Fingerprint) -> Value {
    json!({
        "order": f.order,
        "ab": f.ab.to_string(),
        "derived_order": f.derived_order,
        "center_order": f.center_order,
        "involution_count": f.involution_count,
        "is_perfect": f.is_perfect,
        "is_abelian": f.is_abelian(),
    })
}

fn analysis_status(e: &AnalysisError) -> Status {
    match e {
        AnalysisError::TooLarge { .. } => Status::Inconclusive,
        _ => Status::Fail,
    }
}

pub fn cmd_analyze(desc: &GroupDesc, max_cosets: usize, strategy: Strategy) -> Result<RunReport> {
    let start = Instant::now();
    let p = desc.presentation()?;
    let group = json!({ "group": desc.to_string() });
    let command = format!("analyze {desc}");
    let (order, table) = order_item(
        format!("order of {desc}"),
        group.clone(),
        &p,
        &[],
        max_cosets,
        strategy,
        None,
    );
    let mut items = vec![order];
    let Some(table) = table else {
        return Ok(finish(command, start, items));
    };
    let g = match regular_rep(&table) {
        Ok(g) => g,
        Err(e) => {
            let status = analysis_status(&e);
            let mut item = Item::error("fingerprint", group, e);
            item.status = status;
            items.push(item);
            return Ok(finish(command, start, items));
        }
    };
    let f = fingerprint(&g, &p);
    items.push(Item::new("fingerprint", group.clone(), fingerprint_json(&f), Status::Pass));
    items.push(Item::new(
        "generated by x_0, x_1",
        group.clone(),
        json!(check_two_generated(&g)),
        Status::Pass,
    ));
    if let Some(w) = desc.torsion_word() {
        let inputs = json!({ "group": desc.to_string(), "word": w.to_string() });
        items.push(match element_order(&g, &w) {
            Ok(o) => Item::new("order of w(n,k)", inputs, json!(o), Status::Pass),
            Err(e) => Item::error("order of w(n,k)", inputs, e),
        });
    }
    Ok(finish(command, start, items))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    Square,
    Commutator,
}

impl std::str::FromStr for CertKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "square" => Ok(CertKind::Square),
            "commutator" => Ok(CertKind::Commutator),
            _ => Err(format!("unknown certificate kind `{s}` (square, commutator)")),
        }
    }
}

fn certificate_item(name: String, inputs: Value, c: &Certificate) -> Item {
    let report = check_certificate(c);
    let computed = json!({
        "valid": report.valid,
        "moves": c.moves.len(),
        "start": c.start.to_string(),
        "residue": report.residue.to_string(),
        "failed_move": report.failed_move,
        "error": report.error,
    });
    Item::expect(name, inputs, json!({ "valid": true }), json!({ "valid": report.valid }))
        .with_computed(computed)
}

pub fn generate_certificate(kind: CertKind, n: usize, k: i64, l: i64) -> Result<Certificate> {
    Ok(match kind {
        CertKind::Square => gen_square_cert(n, k, l)?,
        CertKind::Commutator => gen_commutator_cert(n, k, l)?,
    })
}

pub fn cmd_certify(
    n: usize,
    k: i64,
    l: i64,
    kind: CertKind,
    emit: Option<&Path>,
) -> Result<RunReport> {
    let start = Instant::now();
    let which = match kind {
        CertKind::Square => "square",
        CertKind::Commutator => "commutator",
    };
    let c = generate_certificate(kind, n, k, l)?;
    if let Some(path) = emit {
        write_json(path, &serde_json::to_value(&c)?)?;
    }
    let inputs = json!({ "n": n, "k": k, "l": l, "which": which });
    let item = certificate_item(format!("{which} certificate ({n},{k},{l})"), inputs, &c);
    Ok(finish(format!("certify {n} {k} {l} --which {which}"), start, vec![item]))
}

/// Checks a certificate read from a JSON file.
pub fn cmd_check_certificate(path: &Path) -> Result<RunReport> {
    let start = Instant::now();
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let c: Certificate =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let inputs = json!({ "file": path.display().to_string(), "family": c.family });
    let item = certificate_item(format!("certificate {}", path.display()), inputs, &c);
    Ok(finish(format!("certify --check {}", path.display()), start, vec![item]))
}

pub fn low_index_items(p: &Presentation, label: &str, max_index: usize, exec: Exec) -> Vec<Item> {
    low_index_subgroups_with(p, max_index, exec)
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let inputs = json!({ "group": label, "max_index": max_index, "class": i });
            match subgroup_abelianization(p, t) {
                Ok(ab) => Item::new(
                    format!("class {i}"),
                    inputs,
                    json!({
                        "index": t.num_cosets(),
                        "subgroup_ab": ab.to_string(),
                        "free_rank": ab.free_rank,
                    }),
                    Status::Pass,
                ),
                Err(e) => Item::error(format!("class {i}"), inputs, e),
            }
        })
        .collect()
}

pub fn cmd_low_index(desc: &GroupDesc, max_index: usize, exec: Exec) -> Result<RunReport> {
    let start = Instant::now();
    let p = desc.presentation()?;
    let items = low_index_items(&p, &desc.to_string(), max_index, exec);
    Ok(finish(format!("low-index {desc} --max-index {max_index}"), start, items))
}

pub const SWEEPS: [&str; 7] = [
    "monotonicity",
    "two-adic",
    "parity",
    "divides-2l-power",
    "no-divisibility",
    "ab-routes",
    "certificates",
];

/// Bounds for a sweep; `None` selects the sweep's default.
#[derive(Debug, Clone, Copy, Default)]
pub struct SweepBounds {
    pub max_n: Option<u32>,
    pub max_kl: Option<u64>,
}

fn triples(v: &[(u32, u64, u64)]) -> Value {
    json!(v.iter().map(|&(n, k, l)| [n as u64, k, l]).collect::<Vec<_>>())
}

fn violations_item(name: &str, inputs: Value, violations: &[(u32, u64, u64)]) -> Item {
    Item::expect(name, inputs, json!([]), triples(violations))
}

/// Triples `(n, k, l)` where the three abelianisation routes disagree.
pub fn ab_route_disagreements(max_n: u32, max_kl: u64, exec: Exec) -> Vec<(u32, u64, u64)> {
    let cases: Vec<(u32, u64, u64)> = (2..=max_n)
        .flat_map(|n| (1..=max_kl).flat_map(move |k| (1..=max_kl).map(move |l| (n, k, l))))
        .collect();
    fracfib::exec::map(exec, cases, |(n, k, l)| {
        let item = ab_item(n as usize, k as i64, l as i64, 0, None);
        (item.status != Status::Pass).then_some((n, k, l))
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn certificate_failures(max_n: u32, max_kl: u64, exec: Exec) -> Vec<(u32, u64, u64)> {
    let cases: Vec<(u32, u64, u64)> = (3..=max_n)
        .step_by(2)
        .flat_map(|n| (1..=max_kl).flat_map(move |k| (1..=max_kl).map(move |l| (n, k, l))))
        .collect();
    fracfib::exec::map(exec, cases, |(n, k, l)| {
        let ok = [CertKind::Square, CertKind::Commutator].into_iter().all(|kind| {
            generate_certificate(kind, n as usize, k as i64, l as i64)
                .is_ok_and(|c| check_certificate(&c).valid)
        });
        (!ok).then_some((n, k, l))
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn sweep_item(name: &str, bounds: SweepBounds, exec: Exec) -> Result<Item> {
    let n = |d: u32| bounds.max_n.unwrap_or(d);
    let kl = |d: u64| bounds.max_kl.unwrap_or(d);
    Ok(match name {
        "monotonicity" => {
            let (mn, mk) = (n(24), kl(6));
            let v = sweep_monotonicity(mn, mk, exec);
            violations_item(name, json!({ "max_n": mn, "max_kl": mk }), &v)
        }
        "two-adic" => {
            let (mn, mk, ml) = (n(15), kl(12), bounds.max_kl.unwrap_or(9));
            let v = sweep_two_adic(mn, mk, ml, exec);
            violations_item(name, json!({ "max_n": mn, "max_k": mk, "max_l": ml }), &v)
        }
        "parity" => {
            let (mn, mk) = (n(24), kl(8));
            let v = sweep_parity(mn, mk, exec);
            violations_item(name, json!({ "max_n": mn, "max_kl": mk }), &v)
        }
        "divides-2l-power" => {
            let (mn, mk) = (n(15), kl(8));
            let found = check_corollary_36a(mn, mk, exec);
            Item::expect(
                name,
                json!({ "max_n": mn, "max_kl": mk }),
                triples(&[(3, 1, 1)]),
                triples(&found),
            )
        }
        "no-divisibility" => {
            let d = PowerDivisibilityBounds::default();
            let b = PowerDivisibilityBounds {
                max_n: n(d.max_n),
                max_k: kl(d.max_k),
                max_l: bounds.max_kl.unwrap_or(d.max_l),
            };
            let s = sweep_power_divisibility(b, exec);
            let inputs = json!({ "max_n": b.max_n, "max_k": b.max_k, "max_l": b.max_l });
            Item::expect(
                name,
                inputs,
                json!({ "counterexamples": [] }),
                json!({ "counterexamples": triples(&s.counterexamples) }),
            )
            .with_computed(json!({
                "checked": s.checked,
                "counterexamples": triples(&s.counterexamples),
            }))
        }
        "ab-routes" => {
            let (mn, mk) = (n(12), kl(6));
            let v = ab_route_disagreements(mn, mk, exec);
            violations_item(name, json!({ "max_n": mn, "max_kl": mk }), &v)
        }
        "certificates" => {
            let (mn, mk) = (n(15), kl(5));
            let v = certificate_failures(mn, mk, exec);
            violations_item(name, json!({ "max_n": mn, "max_kl": mk }), &v)
        }
        other => bail!("unknown sweep `{other}`; choose from {} or all", SWEEPS.join(", ")),
    })
}

pub fn cmd_sweep(which: &str, bounds: SweepBounds, exec: Exec) -> Result<RunReport> {
    let start = Instant::now();
    let names: Vec<&str> = if which == "all" {
        SWEEPS.to_vec()
    } else {
        vec![which]
    };
    let mut items = Vec::with_capacity(names.len());
    for name in names {
        let t = Instant::now();
        let mut item = sweep_item(name, bounds, exec)?;
        item.elapsed_ms = elapsed_ms(t);
        items.push(item);
    }
    Ok(finish(format!("sweep {which}"), start, items))
}

pub fn run(command: String, exec: Exec, jobs: Vec<Job>) -> RunReport {
    let start = Instant::now();
    let items = run_jobs(exec, jobs);
    finish(command, start, items)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
