//! JSON interchange for spines and group tables.
//!
//! A spine document is one UTF-8 JSON object:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "objects": ["1", "2"],
//!   "sets": {"1": ["0", "1"], "2": ["0", "1"]},
//!   "pairs": [["1", "2"]],
//!   "morphisms": {"1|2": [{"0": "0", "1": "1"}, {"0": "1", "1": "0"}]},
//!   "meta": {"generator": "..."}
//! }
//! ```
//!
//! The order of `objects` is the object order. Object labels may not contain
//! `|`. `meta` is optional and free-form. Any other top-level key is an error.
//! Serialization is deterministic, so documents round-trip byte for byte.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::group::GroupTable;
use crate::model::{validate_spine, FiniteMap, FiniteSet, GroupoidSpine, ValidationReport};

pub const FORMAT_VERSION: u64 = 1;

const TOP_LEVEL_KEYS: [&str; 6] = ["format_version", "objects", "sets", "pairs", "morphisms", "meta"];

/// The serialized form of a spine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpineDocument {
    pub format_version: u64,
    pub objects: Vec<String>,
    pub sets: BTreeMap<String, Vec<String>>,
    pub pairs: Vec<(String, String)>,
    pub morphisms: BTreeMap<String, Vec<BTreeMap<String, String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl SpineDocument {
    pub fn from_spine(spine: &GroupoidSpine, meta: Option<Value>) -> Self {
        let objects = spine.objects().map(String::from).collect();
        let sets = spine
            .sets()
            .iter()
            .map(|s| (s.id().to_string(), s.elements().to_vec()))
            .collect();
        let pairs = spine
            .pairs()
            .iter()
            .map(|&(i, j)| (spine.object_label(i).to_string(), spine.object_label(j).to_string()))
            .collect();
        let morphisms = spine
            .morphism_table()
            .iter()
            .map(|(&(i, j), maps)| {
                let (src, tgt) = (spine.set(i), spine.set(j));
                let listed = maps
                    .iter()
                    .map(|f| {
                        f.images()
                            .iter()
                            .enumerate()
                            .map(|(x, &y)| (src.label(x).to_string(), tgt.label(y).to_string()))
                            .collect()
                    })
                    .collect();
                (spine.pair_key((i, j)), listed)
            })
            .collect();
        SpineDocument {
            format_version: FORMAT_VERSION,
            objects,
            sets,
            pairs,
            morphisms,
            meta,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents serialize");
        text.push('\n');
        text
    }
}

pub fn serialize_document(spine: &GroupoidSpine, meta: Option<Value>) -> String {
    SpineDocument::from_spine(spine, meta).to_json()
}

#[derive(Debug, Clone, PartialEq)]
pub enum DocumentError {
    Syntax { line: usize, column: usize, message: String },
    Schema { path: String, message: String },
    Validation(ValidationReport),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Syntax { line, column, message } => {
                write!(f, "syntax error at line {line}, column {column}: {message}")
            }
            DocumentError::Schema { path, message } => write!(f, "schema error at {path}: {message}"),
            DocumentError::Validation(report) => write!(f, "validation error: {report}"),
        }
    }
}

impl std::error::Error for DocumentError {}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_json(text: &[u8]) -> Result<Value, DocumentError> {
    let text = std::str::from_utf8(text).map_err(|e| DocumentError::Syntax {
        line: 0,
        column: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn string_array(value: &Value, path: &str) -> Result<Vec<String>, DocumentError> {
    let items = value.as_array().ok_or_else(|| schema(path, "expected an array of strings"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(String::from)
                .ok_or_else(|| schema(format!("{path}[{i}]"), "expected a string"))
        })
        .collect()
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, DocumentError> {
    value.as_object().ok_or_else(|| schema(path, "expected an object"))
}

/// Parse a document into a spine without checking the groupoid axioms.
pub fn parse_document_unvalidated(text: &[u8]) -> Result<(GroupoidSpine, Option<Value>), DocumentError> {
    let root = parse_json(text)?;
    let top = object(&root, "$")?;
    for key in top.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            return Err(schema(key.as_str(), format!("unknown top-level key `{key}`")));
        }
    }
    let field = |key: &str| top.get(key).ok_or_else(|| schema(key, format!("missing required key `{key}`")));

    match field("format_version")?.as_u64() {
        Some(FORMAT_VERSION) => {}
        _ => return Err(schema("format_version", format!("expected {FORMAT_VERSION}"))),
    }

    let objects = string_array(field("objects")?, "objects")?;
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, label) in objects.iter().enumerate() {
        if label.is_empty() || label.contains('|') {
            return Err(schema(format!("objects[{i}]"), "object labels must be non-empty and exclude `|`"));
        }
        if index.insert(label, i).is_some() {
            return Err(schema(format!("objects[{i}]"), format!("duplicate object `{label}`")));
        }
    }

    let set_values = object(field("sets")?, "sets")?;
    for key in set_values.keys() {
        if !index.contains_key(key.as_str()) {
            return Err(schema(format!("sets.{key:?}"), format!("`{key}` is not a listed object")));
        }
    }
    let sets = objects
        .iter()
        .map(|label| {
            let path = format!("sets.{label:?}");
            let value = set_values
                .get(label)
                .ok_or_else(|| schema(&path, format!("no set for object `{label}`")))?;
            FiniteSet::new(label.clone(), string_array(value, &path)?).map_err(|e| schema(&path, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let pair_items = field("pairs")?
        .as_array()
        .ok_or_else(|| schema("pairs", "expected an array of label pairs"))?;
    let mut pairs = BTreeSet::new();
    for (n, item) in pair_items.iter().enumerate() {
        let path = format!("pairs[{n}]");
        let labels = string_array(item, &path)?;
        let [a, b] = labels.as_slice() else {
            return Err(schema(path, "expected exactly two labels"));
        };
        let lookup = |l: &str| index.get(l).copied().ok_or_else(|| schema(&path, format!("unknown object `{l}`")));
        if !pairs.insert((lookup(a)?, lookup(b)?)) {
            return Err(schema(path, "duplicate pair"));
        }
    }

    let mut morphisms = BTreeMap::new();
    for (key, value) in object(field("morphisms")?, "morphisms")? {
        let path = format!("morphisms.{key:?}");
        let (a, b) = key
            .split_once('|')
            .ok_or_else(|| schema(&path, "pair keys have the form \"i|j\""))?;
        let lookup = |l: &str| index.get(l).copied().ok_or_else(|| schema(&path, format!("unknown object `{l}`")));
        let (i, j) = (lookup(a)?, lookup(b)?);
        let items = value.as_array().ok_or_else(|| schema(&path, "expected an array of mappings"))?;
        let maps = items
            .iter()
            .enumerate()
            .map(|(m, item)| {
                let map_path = format!("{path}[{m}]");
                let entries = object(item, &map_path)?;
                let mut pairs = Vec::with_capacity(entries.len());
                for (x, y) in entries {
                    let y = y
                        .as_str()
                        .ok_or_else(|| schema(format!("{map_path}.{x:?}"), "expected an element label"))?;
                    pairs.push((x.as_str(), y));
                }
                FiniteMap::from_labels(&sets[i], &sets[j], pairs).map_err(|e| schema(&map_path, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        morphisms.insert((i, j), maps);
    }

    let meta = top.get("meta").cloned();
    let spine = GroupoidSpine::new(sets, pairs, morphisms).map_err(|e| schema("$", e.to_string()))?;
    Ok((spine, meta))
}

/// Parse and validate a spine document.
pub fn parse_document(text: &[u8]) -> Result<GroupoidSpine, DocumentError> {
    parse_document_with_meta(text).map(|(spine, _)| spine)
}

pub fn parse_document_with_meta(text: &[u8]) -> Result<(GroupoidSpine, Option<Value>), DocumentError> {
    let (spine, meta) = parse_document_unvalidated(text)?;
    let report = validate_spine(&spine);
    if !report.passed() {
        return Err(DocumentError::Validation(report));
    }
    Ok((spine, meta))
}

/// Group table file: `{"elements": [...], "product": [[...], ...]}` with
/// rows and columns in element order, entries as labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDocument {
    pub elements: Vec<String>,
    pub product: Vec<Vec<String>>,
}

pub fn serialize_group(g: &GroupTable) -> String {
    let doc = GroupDocument {
        elements: g.elements().to_vec(),
        product: (0..g.order())
            .map(|a| (0..g.order()).map(|b| g.label(g.mul(a, b)).to_string()).collect())
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("group documents serialize");
    text.push('\n');
    text
}

pub fn parse_group(text: &[u8]) -> Result<GroupTable, DocumentError> {
    let root = parse_json(text)?;
    let top = object(&root, "$")?;
    for key in top.keys() {
        if key != "elements" && key != "product" {
            return Err(schema(key.as_str(), format!("unknown top-level key `{key}`")));
        }
    }
    let elements = string_array(
        top.get("elements").ok_or_else(|| schema("elements", "missing required key `elements`"))?,
        "elements",
    )?;
    let rows = top
        .get("product")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("product", "expected an array of rows"))?
        .iter()
        .enumerate()
        .map(|(r, row)| string_array(row, &format!("product[{r}]")))
        .collect::<Result<Vec<_>, _>>()?;
    GroupTable::from_labels(elements, &rows).map_err(|e| schema("product", e.to_string()))
}
