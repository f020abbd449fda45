//! Command-line front end. [`run`] returns the exit code and both output
//! streams so the binary stays a thin wrapper and tests can drive it in
//! process.
//!
//! Exit codes: 0 for success, 1 when a mathematical check fails (invalid
//! spine, non-regular spine, not a coset, overlapping partition), 2 for
//! unusable input (bad arguments, unreadable or malformed files, unknown
//! labels).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::catalog::{classify_group, named_group, CLASSIFY_LIMIT};
use crate::coset::{coset_test, partition_check, AmbientGroup, TupleSet};
use crate::document::{parse_document, parse_document_unvalidated, parse_group, serialize_document, DocumentError};
use crate::error::Error;
use crate::extension::{check_regularity, extend_to_groupoid};
use crate::generators::{generate, perturb_spine, gen_group_action_spine, GeneratorKind, GeneratorSpec};
use crate::group::{extract_group, group_on_fiber, relabel_group, GroupTable};
use crate::model::validate_spine;

#[derive(Debug, Parser)]
#[command(name = "spinekit", version, about = "Groupoid spines, their extensions and vertex groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the groupoid-spine axioms and list every violation.
    Validate { file: PathBuf },
    /// Check that each pair has exactly one morphism through every (x, y).
    Regularity { file: PathBuf },
    /// Extend a regular spine to a groupoid.
    Extend {
        file: PathBuf,
        /// Write the extended groupoid here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the group of an object of the extended groupoid.
    Extract {
        file: PathBuf,
        #[arg(long)]
        object: String,
        /// Transport the group onto the object's carrier with this identity.
        #[arg(long)]
        identity: Option<String>,
    },
    /// Run the five coset tests on a subset of G^power.
    Coset {
        /// Group name (Z6, S3, V4, D4, Q8, A4, ...) or a group table file.
        group: String,
        /// Comma-separated elements; tuple coordinates are separated by `:`.
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Check that subsets of G^power are pairwise equal or disjoint.
    Partition {
        group: String,
        #[arg(long, num_args = 1.., required = true)]
        sets: Vec<String>,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Generate a spine document.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value = "Z5")]
        group: String,
        #[arg(long, default_value_t = 3)]
        objects: usize,
        #[arg(long, default_value_t = 5)]
        prime: u64,
        #[arg(long, default_value_t = 5)]
        order: usize,
        /// Ask for a Latin-square family that is not a coset.
        #[arg(long)]
        non_coset: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print G with identity d: x*y = x d^-1 y.
    Relabel {
        group: String,
        #[arg(long)]
        d: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    GroupAction,
    AffineConfig,
    LatinSquare,
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: stderr.into(),
        }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(2, text)
            } else {
                Outcome::ok(text)
            };
        }
    };
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Regularity { file } => regularity(&file),
        Command::Extend { file, out } => extend(&file, out.as_deref()),
        Command::Extract { file, object, identity } => extract(&file, &object, identity.as_deref()),
        Command::Coset { group, set, power } => coset(&group, &set, power),
        Command::Partition { group, sets, power } => partition(&group, &sets, power),
        Command::Gen {
            kind,
            group,
            objects,
            prime,
            order,
            non_coset,
            seed,
            out,
        } => gen(kind, &group, objects, prime, order, non_coset, seed, out.as_deref()),
        Command::Relabel { group, d } => relabel(&group, &d),
    }
}

/// Exit code for a library error: 1 for failed mathematical checks, 2 for
/// bad input.
fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSpine(_)
        | Error::NotRegular(_)
        | Error::TheoremViolation(_)
        | Error::NotACoset
        | Error::NotAGroup(_)
        | Error::InvalidAction(_) => 1,
        _ => 2,
    }
}

fn from_error(e: Error) -> Outcome {
    let code = error_code(&e);
    let mut text = e.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Outcome::fail(code, format!("error: {text}"))
}

fn from_document_error(path: &Path, e: DocumentError) -> Outcome {
    let code = match e {
        DocumentError::Validation(_) => 1,
        _ => 2,
    };
    let mut text = format!("{}: {e}", path.display());
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Outcome::fail(code, text)
}

fn read(path: &Path) -> Result<Vec<u8>, Outcome> {
    fs::read(path).map_err(|e| Outcome::fail(2, format!("{}: {e}\n", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Outcome> {
    fs::write(path, text).map_err(|e| Outcome::fail(2, format!("{}: {e}\n", path.display())))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(outcome) => return outcome,
        }
    };
}

fn load_spine(path: &Path) -> Result<crate::model::GroupoidSpine, Outcome> {
    let bytes = read(path)?;
    parse_document(&bytes).map_err(|e| from_document_error(path, e))
}

fn validate(path: &Path) -> Outcome {
    let bytes = tri!(read(path));
    let (spine, _) = tri!(parse_document_unvalidated(&bytes).map_err(|e| from_document_error(path, e)));
    let report = validate_spine(&spine);
    Outcome {
        code: if report.passed() { 0 } else { 1 },
        stdout: report.to_string(),
        stderr: String::new(),
    }
}

fn regularity(path: &Path) -> Outcome {
    let spine = tri!(load_spine(path));
    match check_regularity(&spine) {
        Ok(report) => Outcome {
            code: if report.is_regular() { 0 } else { 1 },
            stdout: report.to_string(),
            stderr: String::new(),
        },
        Err(e) => from_error(e),
    }
}

fn extend(path: &Path, out: Option<&Path>) -> Outcome {
    let spine = tri!(load_spine(path));
    let ext = match extend_to_groupoid(&spine) {
        Ok(ext) => ext,
        Err(e) => return from_error(e),
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "objects: {}", spine.object_count());
    let _ = writeln!(summary, "iterations: {}", ext.iterations);
    let _ = writeln!(summary, "conservative: {}", ext.conservative);
    let _ = writeln!(summary, "regular: {}", ext.regular);
    for (&pair, maps) in &ext.added_morphisms {
        let _ = writeln!(summary, "added to {}: {}", spine.pair_key(pair), maps.len());
    }
    let doc = serialize_document(&ext.extended, Some(json!({"derived_from": path.display().to_string()})));
    match out {
        Some(out) => {
            tri!(write_file(out, &doc));
            Outcome::ok(summary)
        }
        None => Outcome {
            code: 0,
            stdout: doc,
            stderr: summary,
        },
    }
}

fn class_line(g: &GroupTable) -> String {
    if g.order() > CLASSIFY_LIMIT {
        return format!("class: not classified (order above {CLASSIFY_LIMIT})\n");
    }
    match classify_group(g) {
        Ok(class) => format!("class: {class}\n"),
        Err(e) => format!("class: {e}\n"),
    }
}

/// The same table with short names `g0` (identity), `g1`, ... in display
/// order, and the legend mapping them back.
fn aliased(g: &GroupTable) -> (GroupTable, String) {
    let mut names = vec![String::new(); g.order()];
    let mut legend = String::new();
    for (n, a) in g.display_order().into_iter().enumerate() {
        names[a] = format!("g{n}");
        let _ = writeln!(legend, "  g{n} = {}", g.label(a));
    }
    let table = GroupTable::new(names, g.product_table().to_vec()).expect("renaming keeps a group a group");
    (table, legend)
}

fn extract(path: &Path, object: &str, identity: Option<&str>) -> Outcome {
    let spine = tri!(load_spine(path));
    let action = match extend_to_groupoid(&spine).and_then(|ext| extract_group(&ext, object)) {
        Ok(action) => action,
        Err(e) => return from_error(e),
    };
    let mut out = String::new();
    let _ = writeln!(out, "object: {object}");
    let _ = writeln!(out, "order: {}", action.group().order());
    out.push_str(&class_line(action.group()));
    match identity {
        Some(e) => {
            let table = match group_on_fiber(&action, e) {
                Ok(t) => t,
                Err(e) => return from_error(e),
            };
            let _ = writeln!(out, "identity: {e}");
            out.push_str(&table.cayley_grid());
        }
        None => {
            let (table, legend) = aliased(action.group());
            out.push_str("elements:\n");
            out.push_str(&legend);
            out.push_str(&table.cayley_grid());
        }
    }
    Outcome::ok(out)
}

fn load_group(spec: &str) -> Result<GroupTable, Outcome> {
    if let Some(group) = named_group(spec) {
        return group.map_err(from_error);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Outcome::fail(
            2,
            format!("`{spec}` is neither a group name (Zn, Sn, Dn, V4, Q8, A4) nor a file\n"),
        ));
    }
    let bytes = read(path)?;
    parse_group(&bytes).map_err(|e| from_document_error(path, e))
}

fn parse_set(amb: &AmbientGroup, text: &str) -> Result<TupleSet, Outcome> {
    let mut set = TupleSet::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let coords: Vec<&str> = item.split(':').map(str::trim).collect();
        set.insert(amb.tuple(&coords).map_err(from_error)?);
    }
    Ok(set)
}

fn coset(group: &str, set: &str, power: usize) -> Outcome {
    let g = tri!(load_group(group));
    let amb = match AmbientGroup::new(g, power) {
        Ok(a) => a,
        Err(e) => return from_error(e),
    };
    let x = tri!(parse_set(&amb, set));
    let report = match coset_test(&amb, &x) {
        Ok(r) => r,
        Err(e) => return from_error(e),
    };
    let mut out = report.to_string();
    if let (Some(h), Some(a)) = (&report.subgroup, &report.translator) {
        let _ = writeln!(out, "subgroup: {}", amb.format_set(h));
        let _ = writeln!(out, "translator: {}", amb.format_tuple(a));
    }
    let _ = writeln!(out, "coset: {}", report.is_coset());
    Outcome {
        code: if report.is_coset() { 0 } else { 1 },
        stdout: out,
        stderr: String::new(),
    }
}

fn partition(group: &str, sets: &[String], power: usize) -> Outcome {
    let g = tri!(load_group(group));
    let amb = match AmbientGroup::new(g, power) {
        Ok(a) => a,
        Err(e) => return from_error(e),
    };
    let family = tri!(sets.iter().map(|s| parse_set(&amb, s)).collect::<Result<Vec<_>, _>>());
    let report = partition_check(&family);
    let mut out = format!("partition: {}\n", report.pass);
    if let Some((a, b, t)) = &report.witness {
        let _ = writeln!(out, "sets {a} and {b} share {}", amb.format_tuple(t));
    }
    Outcome {
        code: if report.pass { 0 } else { 1 },
        stdout: out,
        stderr: String::new(),
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    kind: Kind,
    group: &str,
    objects: usize,
    prime: u64,
    order: usize,
    non_coset: bool,
    seed: u64,
    out: Option<&Path>,
) -> Outcome {
    let (spec, meta) = match kind {
        Kind::GroupAction | Kind::Perturbed => {
            let g = tri!(load_group(group));
            let generator = if matches!(kind, Kind::GroupAction) { "group-action" } else { "perturbed" };
            let meta = json!({"generator": generator, "group": group, "objects": objects, "seed": seed});
            let kind = if matches!(kind, Kind::GroupAction) {
                GeneratorKind::GroupAction { group: g, objects }
            } else {
                GeneratorKind::Perturbed { group: g, objects }
            };
            (GeneratorSpec { kind, seed }, meta)
        }
        Kind::AffineConfig => (
            GeneratorSpec {
                kind: GeneratorKind::AffineConfig { prime },
                seed,
            },
            json!({"generator": "affine-config", "prime": prime}),
        ),
        Kind::LatinSquare => (
            GeneratorSpec {
                kind: GeneratorKind::LatinSquare {
                    order,
                    want_coset: !non_coset,
                },
                seed,
            },
            json!({"generator": "latin-square", "order": order, "coset": !non_coset, "seed": seed}),
        ),
    };
    let mut meta = meta;
    if let GeneratorKind::Perturbed { group, objects } = &spec.kind {
        // Record which mutation was applied.
        if let Ok(base) = gen_group_action_spine(group, *objects) {
            let mutation = perturb_spine(&base, seed).mutation;
            meta["mutation"] = json!(format!("{mutation:?}"));
        }
    }
    let spine = match generate(&spec) {
        Ok(s) => s,
        Err(e) => return from_error(e),
    };
    let doc = serialize_document(&spine, Some(meta));
    match out {
        Some(path) => {
            tri!(write_file(path, &doc));
            Outcome::ok(format!("wrote {}\n", path.display()))
        }
        None => Outcome::ok(doc),
    }
}

fn relabel(group: &str, d: &str) -> Outcome {
    let g = tri!(load_group(group));
    let table = match relabel_group(&g, d) {
        Ok(t) => t,
        Err(e) => return from_error(e),
    };
    let mut out = format!("identity: {}\n", table.identity_label());
    out.push_str(&class_line(&table));
    out.push_str(&table.cayley_grid());
    Outcome::ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_exits_zero() {
        let out = run(["spinekit", "--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("validate"));
    }

    #[test]
    fn unknown_subcommand_exits_two() {
        let out = run(["spinekit", "frobnicate"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("Usage"));
    }

    #[test]
    fn coset_in_z6() {
        let out = run(["spinekit", "coset", "Z6", "--set", "1,3,5"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("subgroup: {0, 2, 4}"));
        let out = run(["spinekit", "coset", "Z6", "--set", "0,1"]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("coset: false"));
    }

    #[test]
    fn tuples_use_colons() {
        let out = run(["spinekit", "coset", "Z2", "--power", "2", "--set", "0:0,1:1"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let out = run(["spinekit", "coset", "Z2", "--power", "2", "--set", "0:0,1"]);
        assert_eq!(out.code, 2);
    }

    #[test]
    fn relabel_moves_identity() {
        let out = run(["spinekit", "relabel", "Z6", "--d", "2"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.starts_with("identity: 2\nclass: C6\n"));
    }

    #[test]
    fn partition_reports_overlap() {
        let out = run(["spinekit", "partition", "Z6", "--sets", "0,3", "1,4", "2,5"]);
        assert_eq!(out.code, 0);
        let out = run(["spinekit", "partition", "Z6", "--sets", "0,3", "3,4"]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("share 3"));
    }
}
