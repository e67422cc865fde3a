//! The `reproduce-paper` report: every published value this toolkit can
//! re-derive, each as one item.

use fracfib::analysis::{
    ab_order, check_two_generated, consistent_with_psl2_11, fingerprint, match_q8_times_zp,
    regular_rep, Fingerprint,
};
use fracfib::certificates::check_certificate;
use fracfib::enumerator::{enumerate, quotient_order, EnumOutcome, Strategy};
use fracfib::invariants::abelianization;
use fracfib::presentations::{build_fractional, normalize_params, FibParams, Presentation};
use fracfib::sequences::{
    ab_order_formula, check_corollary_36a, coeff_table, predicate_v_even, sl2_power, v2, v_n,
    SequenceError,
};
use fracfib::words::cyclic_product;
use fracfib::Exec;
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use crate::commands::{ab_item, big_json, generate_certificate, low_index_items, run, CertKind};
use crate::report::{Item, Job, RunReport, Status};

/// `V_n^{k/l}` as used by the report's sequence items.
pub type VHook = fn(u32, u64, u64) -> Result<BigUint, SequenceError>;

/// Replaceable computations, so tests can check the report catches faults.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub v_n: VHook,
}

impl Default for Hooks {
    fn default() -> Self {
        Hooks {
            v_n: |n, k, l| v_n(n, k, l).map(|v| v.value),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub max_cosets: usize,
    /// Keep only items whose name contains this text.
    pub only: Option<String>,
    pub exec: Exec,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            max_cosets: fracfib::enumerator::DEFAULT_MAX_COSETS,
            only: None,
            exec: Exec::default(),
        }
    }
}

fn fib(n: usize, k: i64, l: i64, omega: u64) -> Presentation {
    build_fractional(&FibParams::new(n, k, l, omega).expect("valid parameters")).expect("builds")
}

fn label(n: usize, k: i64, l: i64, omega: u64) -> String {
    if omega == 0 {
        format!("F^{k}/{l}({n})")
    } else {
        format!("F^{k}/{l}({n};{omega})")
    }
}

/// Fingerprint of a finite group, or the item to report instead.
fn finite_group(name: &str, inputs: &Value, p: &Presentation, max_cosets: usize) -> Result<Fingerprint, Item> {
    let outcome = enumerate(p, &[], max_cosets, Strategy::Hlt).map_err(|e| Item::error(name, inputs.clone(), e))?;
    let table = match outcome {
        EnumOutcome::Complete(t) => t,
        EnumOutcome::Overflow { max_cosets } => {
            return Err(Item::new(
                name,
                inputs.clone(),
                json!({ "overflow": max_cosets }),
                Status::Inconclusive,
            ))
        }
    };
    let g = regular_rep(&table).map_err(|e| Item::error(name, inputs.clone(), e))?;
    Ok(fingerprint(&g, p))
}

/// A group-order item whose computed value projects the fingerprint with `view`.
fn group_job(
    n: usize,
    k: i64,
    l: i64,
    omega: u64,
    expected: Value,
    max_cosets: usize,
    view: fn(&Fingerprint) -> Value,
) -> (String, Job) {
    let name = format!("|{}|", label(n, k, l, omega));
    let job_name = name.clone();
    let job: Job = Box::new(move || {
        let inputs = json!({ "n": n, "k": k, "l": l, "omega": omega });
        match finite_group(&job_name, &inputs, &fib(n, k, l, omega), max_cosets) {
            Ok(f) => Item::expect(job_name, inputs, expected, view(&f)),
            Err(item) => item.with_expected(expected),
        }
    });
    (name, job)
}

fn order_and_abelian(f: &Fingerprint) -> Value {
    json!({ "order": f.order, "abelian": f.is_abelian() })
}

fn order_only(f: &Fingerprint) -> Value {
    json!({ "order": f.order })
}

fn item_job(name: impl Into<String>, f: impl FnOnce(String) -> Item + Send + 'static) -> (String, Job) {
    let name = name.into();
    let n2 = name.clone();
    (name, Box::new(move || f(n2)))
}

fn v_item(hooks: Hooks, name: String, n: u32, k: u64, l: u64, expected: u64) -> Item {
    let inputs = json!({ "n": n, "k": k, "l": l });
    match (hooks.v_n)(n, k, l) {
        Ok(v) => Item::expect(name, inputs, json!(expected), big_json(v)),
        Err(e) => Item::error(name, inputs, e),
    }
}

fn jobs(hooks: Hooks, max_cosets: usize) -> Vec<(String, Job)> {
    let mc = max_cosets;
    let mut out: Vec<(String, Job)> = Vec::new();

    // Words and presentations.
    out.push(item_job("w(3,1)", |name| {
        Item::expect(name, json!({ "n": 3, "k": 1 }), json!("x0 x1 x2"), json!(cyclic_product(3, 1).to_string()))
    }));
    out.push(item_job("normalize(-2,3)", |name| {
        let computed = normalize_params(-2, 3).map_or_else(|e| json!(e.to_string()), |(k, l)| json!([k, l]));
        Item::expect(name, json!({ "k": -2, "l": 3 }), json!([2, 3]), computed)
    }));
    out.push(item_job("relators of F^1/1(3)", |name| {
        let p = fib(3, 1, 1, 0);
        let rels: Vec<String> = p.relators().iter().map(|r| r.to_string()).collect();
        Item::expect(
            name,
            json!({ "n": 3, "k": 1, "l": 1 }),
            json!(["x0 x1 x2^-1", "x1 x2 x0^-1", "x2 x0 x1^-1"]),
            json!(rels),
        )
    }));
    out.push(item_job("relation matrix of F^2/3(5)", |name| {
        let (n, k, l) = (5usize, 2i64, 3i64);
        let m = fib(n, k, l, 0).relation_matrix();
        let expected: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut row = vec![0; n];
                row[i] += l;
                row[(i + 1) % n] += k;
                row[(i + 2) % n] -= l;
                row
            })
            .collect();
        let computed: Vec<Vec<Value>> = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(big_json).collect())
            .collect();
        Item::expect(name, json!({ "n": n, "k": k, "l": l }), json!(expected), json!(computed))
    }));

    // Abelianisations.
    for (n, k, l, expected) in [(3, 1, 2, "Z_13"), (2, 1, 1, "1"), (3, 2, 3, "Z_62")] {
        out.push(item_job(format!("{}^ab", label(n, k, l, 0)), move |name| {
            let ab = abelianization(&fib(n, k, l, 0));
            Item::expect(name, json!({ "n": n, "k": k, "l": l }), json!(expected), json!(ab.to_string()))
        }));
    }
    for (n, k, l, expected) in [(3, 1, 2, 13), (9, 3, 1, 46764), (2, 1, 1, 1)] {
        out.push(item_job(format!("ab routes {}", label(n, k, l, 0)), move |name| {
            let mut item = ab_item(n, k, l, 0, Some(expected));
            item.name = name;
            item
        }));
    }

    // The sequence V.
    for (n, k, l, expected) in [(1, 7, 3, 7), (9, 3, 1, 46764), (5, 1, 2, 101), (5, 1, 1, 11), (7, 1, 1, 29)] {
        out.push(item_job(format!("V_{n}^{k}/{l}"), move |name| v_item(hooks, name, n, k, l, expected)));
    }
    for (n, k, l, expected) in [(5u32, 1u64, 1u64, 11u64), (7, 1, 1, 29), (2, 1, 1, 1)] {
        out.push(item_job(format!("ab formula ({n},{k},{l})"), move |name| {
            let inputs = json!({ "n": n, "k": k, "l": l });
            match ab_order_formula(n, k, l) {
                Ok(v) => Item::expect(name, inputs, json!(expected), big_json(v)),
                Err(e) => Item::error(name, inputs, e),
            }
        }));
    }
    for (n, expected) in [(1u32, vec![1]), (3, vec![1, 3])] {
        out.push(item_job(format!("coefficients a_{n},r"), move |name| {
            let computed = coeff_table(n).map_or_else(
                |e| json!(e.to_string()),
                |t| json!(t.coeffs.into_iter().map(big_json).collect::<Vec<_>>()),
            );
            Item::expect(name, json!({ "n": n }), json!(expected), computed)
        }));
    }
    out.push(item_job("V_3 as a polynomial", |name| {
        // k^3 + 3 k l^2 at a few points.
        let points = [(1u64, 1u64), (2, 3), (5, 7)];
        let computed: Vec<Value> = points
            .iter()
            .map(|&(k, l)| big_json(coeff_table(3).expect("n = 3").evaluate(k, l)))
            .collect();
        let expected: Vec<u64> = points.iter().map(|&(k, l)| k * k * k + 3 * k * l * l).collect();
        Item::expect(name, json!({ "points": points }), json!(expected), json!(computed))
    }));
    out.push(item_job("v2(46764)", |name| {
        Item::expect(name, json!({ "x": 46764 }), json!(2), json!(v2(&BigUint::from(46764u32))))
    }));
    out.push(item_job("V_5^1/1 even", |name| {
        Item::expect(name, json!({ "n": 5, "k": 1, "l": 1 }), json!(false), json!(predicate_v_even(5, 1, 1)))
    }));
    out.push(item_job("V_n divides (2l)^n, odd n <= 15, coprime k,l <= 8", |name| {
        let found: Vec<[u64; 3]> = check_corollary_36a(15, 8, Exec::Sequential)
            .into_iter()
            .map(|(n, k, l)| [n as u64, k, l])
            .collect();
        Item::expect(name, json!({ "max_n": 15, "max_kl": 8 }), json!([[3, 1, 1]]), json!(found))
    }));
    out.push(item_job("2x2 power j=1", |name| {
        let (a, d, b, c) = (BigInt::from(5), BigInt::from(3), BigInt::from(7), BigInt::from(2));
        let computed = sl2_power(&a, &d, &b, &c, 1).map_or_else(
            |e| json!(e.to_string()),
            |s| json!([big_json(s.s), big_json(s.t), big_json(s.r)]),
        );
        Item::expect(name, json!({ "a": 5, "d": 3, "b": 7, "c": 2, "j": 1 }), json!([5, 3, 1]), computed)
    }));

    // Finite groups.
    out.push(group_job(3, 1, 1, 0, json!({ "order": 8, "q8": true }), mc, |f| {
        json!({ "order": f.order, "q8": match_q8_times_zp(f, 1) })
    }));
    out.push(group_job(3, 1, 1, 4, json!({ "order": 8, "q8": true }), mc, |f| {
        json!({ "order": f.order, "q8": match_q8_times_zp(f, 1) })
    }));
    out.push(group_job(3, 2, 1, 0, json!({ "order": 112, "q8": false }), mc, |f| {
        json!({ "order": f.order, "q8": match_q8_times_zp(f, 1) })
    }));
    out.push(group_job(3, 3, 1, 0, json!({ "order": 3528 }), mc, order_only));
    for (n, k, l, order) in [(3, 1, 3, 3584), (3, 1, 4, 392), (3, 3, 2, 504)] {
        out.push(group_job(n, k, l, 0, json!({ "order": order, "abelian": false }), mc, order_and_abelian));
    }
    for (n, k, l, order) in [(5, 1, 1, 11), (7, 1, 1, 29), (3, 1, 2, 13), (3, 2, 3, 62)] {
        out.push(group_job(n, k, l, 0, json!({ "order": order, "abelian": true }), mc, order_and_abelian));
    }
    out.push(group_job(3, 1, 3, 7, json!({ "order": 56, "abelian": false }), mc, order_and_abelian));
    out.push(group_job(3, 3, 1, 36, json!({ "order": 3528, "abelian": false }), mc, order_and_abelian));
    out.push(group_job(
        3,
        3,
        1,
        6,
        json!({ "order": 12, "abelian": true, "ab_order": 12, "ab": "Z_2 + Z_6" }),
        mc,
        |f| json!({ "order": f.order, "abelian": f.is_abelian(), "ab_order": ab_order(f), "ab": f.ab.to_string() }),
    ));
    out.push(group_job(
        5,
        1,
        3,
        6,
        json!({ "order": 660, "perfect": true, "center_order": 1, "psl2_11_fingerprint": true }),
        mc,
        |f| {
            json!({
                "order": f.order,
                "perfect": f.is_perfect,
                "center_order": f.center_order,
                "psl2_11_fingerprint": consistent_with_psl2_11(f),
            })
        },
    ));
    for (n, k, l) in [(3, 2, 1), (3, 1, 2)] {
        out.push(item_job(format!("{} generated by x_0, x_1", label(n, k, l, 0)), move |name| {
            let inputs = json!({ "n": n, "k": k, "l": l });
            let t = match enumerate(&fib(n, k, l, 0), &[], mc, Strategy::Hlt) {
                Ok(EnumOutcome::Complete(t)) => t,
                Ok(EnumOutcome::Overflow { max_cosets }) => {
                    return Item::new(name, inputs, json!({ "overflow": max_cosets }), Status::Inconclusive)
                        .with_expected(json!(true))
                }
                Err(e) => return Item::error(name, inputs, e),
            };
            match regular_rep(&t) {
                Ok(g) => Item::expect(name, inputs, json!(true), json!(check_two_generated(&g))),
                Err(e) => Item::error(name, inputs, e),
            }
        }));
    }
    out.push(item_job("F^1/2(5) / <<w(5,1)>>", move |name| {
        let inputs = json!({ "n": 5, "k": 1, "l": 2, "word": "x0 x1 x2 x3 x4" });
        match quotient_order(&fib(5, 1, 2, 0), &[cyclic_product(5, 1)], mc) {
            Ok(EnumOutcome::Complete(t)) => Item::expect(name, inputs, json!(101), json!(t.num_cosets())),
            Ok(EnumOutcome::Overflow { max_cosets }) => {
                Item::new(name, inputs, json!({ "overflow": max_cosets }), Status::Inconclusive)
                    .with_expected(json!(101))
            }
            Err(e) => Item::error(name, inputs, e),
        }
    }));

    // Index-5 subgroups with infinite abelianisation.
    for n in [5usize, 7] {
        out.push(item_job(format!("index-5 subgroup of F^2/3({n};6) with infinite ab"), move |name| {
            let p = fib(n, 2, 3, 6);
            let classes = low_index_items(&p, &label(n, 2, 3, 6), 5, Exec::Sequential);
            let hits = classes
                .iter()
                .filter(|i| i.computed["index"] == json!(5) && i.computed["free_rank"].as_u64() >= Some(1))
                .count();
            Item::expect(
                name,
                json!({ "n": n, "k": 2, "l": 3, "omega": 6, "max_index": 5 }),
                json!(true),
                json!(hits > 0),
            )
            .with_computed(json!({ "found": hits > 0, "classes_with_infinite_ab": hits }))
        }));
    }

    // Certificates.
    out.push(item_job("w(9,1)^2 = 1 certificate", |name| {
        let inputs = json!({ "n": 9, "k": 1, "l": 1, "which": "square" });
        match generate_certificate(CertKind::Square, 9, 1, 1) {
            Ok(c) => Item::expect(name, inputs, json!(true), json!(check_certificate(&c).valid)),
            Err(e) => Item::error(name, inputs, e),
        }
    }));
    out
}

/// Names of every item, in report order.
pub fn item_names() -> Vec<String> {
    jobs(Hooks::default(), 0).into_iter().map(|(n, _)| n).collect()
}

pub fn cmd_reproduce_paper(opts: &ReproduceOptions, hooks: Hooks) -> RunReport {
    let selected: Vec<Job> = jobs(hooks, opts.max_cosets)
        .into_iter()
        .filter(|(name, _)| opts.only.as_ref().is_none_or(|o| name.contains(o.as_str())))
        .map(|(_, job)| job)
        .collect();
    let mut command = "reproduce-paper".to_string();
    if let Some(o) = &opts.only {
        command.push_str(&format!(" --only {o:?}"));
    }
    run(command, opts.exec, selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names = item_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn sequence_items_pass() {
        let opts = ReproduceOptions {
            only: Some("V_".into()),
            ..Default::default()
        };
        let r = cmd_reproduce_paper(&opts, Hooks::default());
        assert!(r.items.len() >= 5);
        assert_eq!(r.exit_code(), 0, "{}", r.to_table());
    }

    #[test]
    fn off_by_one_is_caught() {
        fn shifted(n: u32, k: u64, l: u64) -> Result<BigUint, SequenceError> {
            v_n(n + 1, k, l).map(|v| v.value)
        }
        let opts = ReproduceOptions {
            only: Some("V_".into()),
            ..Default::default()
        };
        let r = cmd_reproduce_paper(&opts, Hooks { v_n: shifted });
        let v9 = r.items.iter().find(|i| i.name == "V_9^3/1").unwrap();
        assert_eq!(v9.status, Status::Fail);
        assert_eq!(r.exit_code(), 1);
    }
}
