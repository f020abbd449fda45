//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every criterion is an exact
//! combinatorial fact, so there are no numeric tolerances; the two timed
//! criteria have fixed budgets below.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use spinekit::catalog::{catalog_up_to, classify_group, cyclic, find_isomorphism, symmetric};
use spinekit::cli::run;
use spinekit::coset::{coset_test, partition_check, AmbientGroup, TupleSet};
use spinekit::document::{parse_document_unvalidated, serialize_document};
use spinekit::extension::{check_regularity, extend_to_groupoid, symmetric_closure};
use spinekit::generators::{
    gen_affine_config, gen_group_action_spine, gen_latin_square_family, is_sharply_transitive,
    latin_square_spine, perturb_spine,
};
use spinekit::group::{extract_group, group_on_fiber, relabel_group, GroupTable};
use spinekit::model::{validate_spine, FiniteMap, GroupoidSpine};

const AC1_BUDGET: Duration = Duration::from_secs(10);
const AC3_BUDGET: Duration = Duration::from_secs(5);
const PERTURBATION_COUNT: u64 = 100;
const AFFINE_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// A bijection `phi` with `phi(ab) = phi(a)phi(b)`, checked directly.
fn is_isomorphism(g: &GroupTable, h: &GroupTable, phi: &[usize]) -> bool {
    let image: BTreeSet<usize> = phi.iter().copied().collect();
    phi.len() == g.order()
        && g.order() == h.order()
        && image.len() == h.order()
        && (0..g.order()).all(|a| (0..g.order()).all(|b| phi[g.mul(a, b)] == h.mul(phi[a], phi[b])))
}

fn isomorphic(g: &GroupTable, h: &GroupTable) -> bool {
    find_isomorphism(g, h).is_some_and(|phi| is_isomorphism(g, h, &phi))
}

/// The spines of the extension sweep: every catalog group of order at most
/// 10, also presented with a non-identity element as identity, on 3 to 5
/// objects.
fn sweep() -> Vec<(String, GroupTable, usize)> {
    let mut out = Vec::new();
    for entry in catalog_up_to(10) {
        let mut presentations = vec![(entry.name.clone(), entry.group.clone())];
        if entry.group.order() > 1 {
            let d = entry.group.label(entry.group.order() - 1).to_string();
            let relabeled = relabel_group(&entry.group, &d).expect("relabel");
            presentations.push((format!("{} (identity {d})", entry.name), relabeled));
        }
        for (name, g) in presentations {
            for objects in 3..=5 {
                out.push((name.clone(), g.clone(), objects));
            }
        }
    }
    out
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let cases = sweep();
    ensure(cases.len() >= 60, || format!("only {} spines in the sweep", cases.len()))?;
    for (name, g, objects) in &cases {
        let tag = || format!("{name} on {objects} objects");
        let spine = gen_group_action_spine(g, *objects).map_err(|e| format!("{}: {e}", tag()))?;
        let ext = extend_to_groupoid(&spine).map_err(|e| format!("{}: {e}", tag()))?;
        ensure(ext.conservative, || format!("{}: not conservative", tag()))?;
        ensure(validate_spine(&ext.extended).passed(), || format!("{}: extension invalid", tag()))?;
        let regular = check_regularity(&ext.extended).map_err(|e| format!("{}: {e}", tag()))?;
        ensure(regular.is_regular(), || format!("{}: extension not regular", tag()))?;
        for object in ext.extended.objects() {
            let action = extract_group(&ext, object).map_err(|e| format!("{}: {e}", tag()))?;
            ensure(isomorphic(action.group(), g), || {
                format!("{}: group at object {object} is not isomorphic", tag())
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < AC1_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{} spines, {:.2}s", cases.len(), elapsed.as_secs_f64()))
}

fn graph_set(maps: &[FiniteMap]) -> BTreeSet<Vec<usize>> {
    maps.iter().map(|f| f.images().to_vec()).collect()
}

fn ac2() -> Outcome {
    let cases = sweep();
    let mut pairs_checked = 0;
    for (name, g, objects) in &cases {
        let spine = gen_group_action_spine(g, *objects).map_err(|e| e.to_string())?;
        let sym = symmetric_closure(&spine).map_err(|e| format!("{name}: {e}"))?;
        ensure(sym.is_symmetric(), || format!("{name}: closure is not symmetric"))?;
        let ext = extend_to_groupoid(&sym).map_err(|e| format!("{name}: {e}"))?;
        for &pair in sym.pairs() {
            if pair.0 == pair.1 {
                continue;
            }
            ensure(graph_set(sym.morphisms(pair)) == graph_set(ext.extended.morphisms(pair)), || {
                format!("{name} on {objects} objects: closure changed {}", sym.pair_key(pair))
            })?;
            pairs_checked += 1;
        }
    }
    Ok(format!("{} spines, {pairs_checked} symmetric pairs unchanged", cases.len()))
}

/// All left cosets of all subgroups, by brute force over subsets.
fn all_cosets(g: &GroupTable) -> BTreeSet<TupleSet> {
    let n = g.order();
    let mut cosets = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let h: Vec<usize> = (0..n).filter(|&a| mask >> a & 1 == 1).collect();
        let closed = h.iter().all(|&a| h.iter().all(|&b| mask >> g.mul(a, b) & 1 == 1));
        if !closed {
            continue;
        }
        for a in 0..n {
            cosets.insert(h.iter().map(|&x| vec![g.mul(a, x)]).collect());
        }
    }
    cosets
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (name, g) in [("Z6", cyclic(6)), ("S3", symmetric(3).expect("S3"))] {
        let oracle = all_cosets(&g);
        let amb = AmbientGroup::new(g.clone(), 1).map_err(|e| e.to_string())?;
        let n = g.order();
        let mut cosets = 0;
        for mask in 1u32..(1 << n) {
            let x: TupleSet = (0..n).filter(|&a| mask >> a & 1 == 1).map(|a| vec![a]).collect();
            let report = coset_test(&amb, &x).map_err(|e| format!("{name} {}: {e}", amb.format_set(&x)))?;
            ensure(report.verdicts.all_agree(), || {
                format!("{name} {}: verdicts {:?}", amb.format_set(&x), report.verdicts.as_array())
            })?;
            ensure(report.is_coset() == oracle.contains(&x), || {
                format!("{name} {}: disagrees with brute force", amb.format_set(&x))
            })?;
            let translates: Vec<TupleSet> = (0..n).map(|u| amb.right_translate(&x, &[u])).collect();
            ensure(partition_check(&translates).pass == report.verdicts.left_coset, || {
                format!("{name} {}: partition verdict differs", amb.format_set(&x))
            })?;
            cosets += usize::from(report.is_coset());
        }
        summary.push(format!("{name}: {} subsets, {cosets} cosets", (1u32 << n) - 1));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < AC3_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{}, {:.2}s", summary.join("; "), elapsed.as_secs_f64()))
}

fn ac4() -> Outcome {
    for p in AFFINE_PRIMES {
        let spine = gen_affine_config(p).map_err(|e| format!("p={p}: {e}"))?;
        let ext = extend_to_groupoid(&spine).map_err(|e| format!("p={p}: {e}"))?;
        for object in ext.extended.objects() {
            let action = extract_group(&ext, object).map_err(|e| format!("p={p}: {e}"))?;
            let class = classify_group(action.group()).map_err(|e| format!("p={p}: {e}"))?;
            ensure(class.name() == Some(format!("C{p}").as_str()), || {
                format!("p={p}, object {object}: classified as {class}")
            })?;
            for e in action.carrier().elements() {
                let fiber = group_on_fiber(&action, e).map_err(|err| format!("p={p}: {err}"))?;
                ensure(fiber.identity_label() == e, || {
                    format!("p={p}, object {object}: fiber group at {e} has identity {}", fiber.identity_label())
                })?;
            }
        }
    }
    Ok(format!("primes {AFFINE_PRIMES:?} recovered as cyclic groups"))
}

fn associative(g: &GroupTable) -> bool {
    let n = g.order();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)))))
}

fn ac5() -> Outcome {
    let mut checked = 0;
    for entry in catalog_up_to(12) {
        let g = &entry.group;
        for d in g.elements() {
            let h = relabel_group(g, d).map_err(|e| format!("{} d={d}: {e}", entry.name))?;
            ensure(h.identity_label() == d, || format!("{} d={d}: identity {}", entry.name, h.identity_label()))?;
            ensure(associative(&h), || format!("{} d={d}: not associative", entry.name))?;
            ensure(isomorphic(g, &h), || format!("{} d={d}: not isomorphic", entry.name))?;
            checked += 1;
        }
        let at_identity = relabel_group(g, g.identity_label()).map_err(|e| e.to_string())?;
        ensure(&at_identity == g, || format!("{}: relabel at the identity changed the table", entry.name))?;
    }
    Ok(format!("{checked} (group, d) pairs"))
}

fn ac6() -> Outcome {
    let family = gen_latin_square_family(5, false, 0).map_err(|e| e.to_string())?;
    ensure(is_sharply_transitive(&family), || "non-coset family is not sharply transitive".into())?;
    let ext = extend_to_groupoid(&latin_square_spine(&family).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(!ext.conservative, || "non-coset Latin square extended conservatively".into())?;
    let added = ext.added_morphisms.get(&(0, 1)).map_or(0, Vec::len);

    let coset_family = gen_latin_square_family(5, true, 0).map_err(|e| e.to_string())?;
    let ext = extend_to_groupoid(&latin_square_spine(&coset_family).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(ext.conservative, || "group-based Latin square was not conservative".into())?;
    Ok(format!("order 5: non-coset family gains {added} morphisms on 1|2, group rows gain none"))
}

fn perturbation_bases() -> Vec<GroupoidSpine> {
    let mut bases = Vec::new();
    for entry in catalog_up_to(6) {
        for objects in 1..=4 {
            bases.push(gen_group_action_spine(&entry.group, objects).expect("base spine"));
        }
    }
    bases
}

fn check_perturbations() -> Result<(), String> {
    let bases = perturbation_bases();
    for seed in 0..PERTURBATION_COUNT {
        let base = &bases[seed as usize % bases.len()];
        let p = perturb_spine(base, seed);
        let validation = validate_spine(&p.spine);
        if !validation.passed() {
            ensure(!validation.violations.is_empty(), || "empty failing report".into())?;
            continue;
        }
        let regularity = check_regularity(&p.spine).map_err(|e| e.to_string())?;
        ensure(!regularity.is_regular() && !regularity.violations.is_empty(), || {
            format!("seed {seed}: mutation {:?} left a valid regular spine", p.mutation)
        })?;
    }
    Ok(())
}

fn check_exit_codes() -> Result<usize, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).map_err(|e| e.to_string());

    let good = gen_group_action_spine(&cyclic(3), 3).map_err(|e| e.to_string())?;
    write("good.json", &serialize_document(&good, None))?;
    let broken = perturb_spine(&good, 1).spine;
    write("broken.json", &serialize_document(&broken, None))?;
    // Every bijection of a 3-set: a valid spine that passes through each
    // (x, y) twice.
    let all: Vec<FiniteMap> = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]]
        .iter()
        .map(|im| FiniteMap::new("1", "2", im.to_vec()).expect("bijection"))
        .collect();
    let doubled = latin_square_spine(&all).map_err(|e| e.to_string())?;
    write("doubled.json", &serialize_document(&doubled, None))?;
    write("malformed.json", "{\"format_version\": 1, \"objects\": [")?;
    write("extra.json", &serialize_document(&good, None).replacen('{', "{\"colour\": 1,", 1))?;

    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["validate".into(), path("good.json")], 0),
        (vec!["validate".into(), path("broken.json")], 1),
        (vec!["validate".into(), path("malformed.json")], 2),
        (vec!["validate".into(), path("extra.json")], 2),
        (vec!["validate".into(), path("missing.json")], 2),
        (vec!["regularity".into(), path("good.json")], 0),
        (vec!["regularity".into(), path("doubled.json")], 1),
        (vec!["extend".into(), path("good.json"), "--out".into(), path("ext.json")], 0),
        (vec!["extend".into(), path("doubled.json")], 1),
        (vec!["extract".into(), path("good.json"), "--object".into(), "2".into()], 0),
        (vec!["extract".into(), path("good.json"), "--object".into(), "9".into()], 2),
        (
            vec!["extract".into(), path("good.json"), "--object".into(), "1".into(), "--identity".into(), "2".into()],
            0,
        ),
        (vec!["coset".into(), "Z6".into(), "--set".into(), "1,3,5".into()], 0),
        (vec!["coset".into(), "Z6".into(), "--set".into(), "0,1".into()], 1),
        (vec!["coset".into(), "Z6".into(), "--set".into(), "0,7".into()], 2),
        (vec!["partition".into(), "S3".into(), "--sets".into(), "012,102".into(), "021".into()], 0),
        (vec!["partition".into(), "Z6".into(), "--sets".into(), "0,1".into(), "1,2".into()], 1),
        (vec!["gen".into(), "--kind".into(), "affine-config".into(), "--prime".into(), "7".into()], 0),
        (vec!["gen".into(), "--kind".into(), "affine-config".into(), "--prime".into(), "8".into()], 2),
        (vec!["relabel".into(), "D4".into(), "--d".into(), "s1".into()], 0),
        (vec!["relabel".into(), "Z6".into(), "--d".into(), "x".into()], 2),
        (vec!["frobnicate".into()], 2),
    ];
    for (args, expected) in &cases {
        let out = run(std::iter::once("spinekit".to_string()).chain(args.iter().cloned()));
        ensure(out.code == *expected, || {
            format!("`{}` exited {} (expected {expected}): {}", args.join(" "), out.code, out.stderr.trim())
        })?;
    }
    Ok(cases.len())
}

fn check_round_trips() -> Result<usize, String> {
    let mut spines = Vec::new();
    for entry in catalog_up_to(12) {
        for objects in 1..=4 {
            spines.push(gen_group_action_spine(&entry.group, objects).map_err(|e| e.to_string())?);
        }
    }
    for p in AFFINE_PRIMES {
        spines.push(gen_affine_config(p).map_err(|e| e.to_string())?);
    }
    for order in 2..=7 {
        for (want, seeds) in [(true, 0..1), (false, 0..3)] {
            if !want && order < 5 {
                continue;
            }
            for seed in seeds {
                let family = gen_latin_square_family(order, want, seed).map_err(|e| e.to_string())?;
                spines.push(latin_square_spine(&family).map_err(|e| e.to_string())?);
            }
        }
    }
    let bases = perturbation_bases();
    for seed in 0..20 {
        spines.push(perturb_spine(&bases[seed as usize % bases.len()], seed).spine);
    }
    for (n, spine) in spines.iter().enumerate() {
        let meta = serde_json::json!({"case": n});
        let text = serialize_document(spine, Some(meta));
        let (back, back_meta) = parse_document_unvalidated(text.as_bytes()).map_err(|e| format!("case {n}: {e}"))?;
        ensure(&back == spine, || format!("case {n}: spine changed"))?;
        ensure(serialize_document(&back, back_meta) == text, || format!("case {n}: bytes changed"))?;
    }
    Ok(spines.len())
}

fn ac7() -> Outcome {
    check_perturbations()?;
    let cli_cases = check_exit_codes()?;
    let documents = check_round_trips()?;
    Ok(format!(
        "{PERTURBATION_COUNT} mutants rejected, {cli_cases} CLI exit codes, {documents} byte-exact round trips"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("AC1", "extension sweep", ac1),
        ("AC2", "symmetric spines close conservatively", ac2),
        ("AC3", "five-way coset equivalence", ac3),
        ("AC4", "affine pipeline recovery", ac4),
        ("AC5", "relabel soundness", ac5),
        ("AC6", "two-object Latin square case", ac6),
        ("AC7", "negative paths, exit codes, round trips", ac7),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
