use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::FinCategory;
use crate::error::{Error, Result};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowEntry {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Versioned JSON form of a [`FinCategory`]. `comp` lists `[f, g, g∘f]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDocument {
    pub version: u32,
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowEntry>,
    pub comp: Vec<[String; 3]>,
    pub ids: BTreeMap<String, String>,
}

impl CategoryDocument {
    pub fn from_category(c: &FinCategory) -> Self {
        CategoryDocument {
            version: DOCUMENT_VERSION,
            objects: c.objects().map(|o| c.object_label(o).to_string()).collect(),
            arrows: c
                .arrows()
                .map(|a| ArrowEntry {
                    id: c.arrow_label(a).into(),
                    src: c.object_label(c.source(a)).into(),
                    tgt: c.object_label(c.target(a)).into(),
                })
                .collect(),
            comp: c
                .composition_table()
                .into_iter()
                .map(|(f, g, h)| [f, g, h].map(|a| c.arrow_label(a).to_string()))
                .collect(),
            ids: c
                .objects()
                .map(|o| (c.object_label(o).to_string(), c.arrow_label(c.identity(o)).to_string()))
                .collect(),
        }
    }

    pub fn into_category(self) -> Result<FinCategory> {
        if self.version != DOCUMENT_VERSION {
            return Err(Error::MalformedCategory(format!(
                "unsupported document version {}",
                self.version
            )));
        }
        let mut b = FinCategory::builder();
        let mut objects = HashMap::new();
        for label in &self.objects {
            if objects.insert(label.clone(), b.add_object(label.clone())).is_some() {
                return Err(Error::MalformedCategory(format!("duplicate object `{label}`")));
            }
        }
        let lookup_obj = |l: &str| {
            objects
                .get(l)
                .copied()
                .ok_or_else(|| Error::MalformedCategory(format!("unknown object `{l}`")))
        };
        let mut arrows = HashMap::new();
        for a in &self.arrows {
            let id = b.add_arrow(lookup_obj(&a.src)?, lookup_obj(&a.tgt)?, a.id.clone());
            if arrows.insert(a.id.clone(), id).is_some() {
                return Err(Error::MalformedCategory(format!("duplicate arrow `{}`", a.id)));
            }
        }
        let lookup_arrow = |l: &str| {
            arrows
                .get(l)
                .copied()
                .ok_or_else(|| Error::MalformedCategory(format!("unknown arrow `{l}`")))
        };
        for (o, a) in &self.ids {
            b.set_identity(lookup_obj(o)?, lookup_arrow(a)?);
        }
        let mut table = HashMap::new();
        let mut seen = HashSet::new();
        for [f, g, h] in &self.comp {
            let key = (lookup_arrow(f)?, lookup_arrow(g)?);
            if !seen.insert(key) {
                return Err(Error::MalformedCategory(format!("duplicate composite for ({f}, {g})")));
            }
            table.insert(key, lookup_arrow(h)?);
        }
        b.build_with_table(table)
    }
}

pub fn to_json(c: &FinCategory) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CategoryDocument::from_category(c))?)
}

pub fn from_json(s: &str) -> Result<FinCategory> {
    serde_json::from_str::<CategoryDocument>(s)?.into_category()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph of the non-identity arrows.
pub fn to_dot(c: &FinCategory, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    for o in c.objects() {
        let _ = writeln!(out, "  n{o} [label={}];", quote(c.object_label(o)));
    }
    for a in c.arrows().filter(|&a| !c.is_identity(a)) {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label={}];",
            c.source(a),
            c.target(a),
            quote(c.arrow_label(a))
        );
    }
    out.push_str("}\n");
    out
}
