//! Finite-dimensional algebras given by explicit structure tables, and their
//! JSON ingestion format:
//!
//! ```json
//! { "basis": ["e", "f"],
//!   "novikov": [[{"e": "1"}, {}], [{"f": "1"}, {}]],
//!   "lie":     [[{}, {}], [{}, {}]] }
//! ```
//!
//! Entry `[i][j]` is the product of basis vectors `i` and `j`, written as a
//! map from basis name to a coefficient in scalar text syntax. A missing
//! `novikov` or `lie` table means the zero product.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;

use crate::basis::{BasisIndex, Element};
use crate::error::{Error, Result};
use crate::gd::{GdStructure, StructureRules};
use crate::scalar::Scalar;
use crate::window::{IndexKind, Window};

#[derive(Debug, Clone)]
pub struct Table {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
    novikov: Vec<Vec<Element>>,
    lie: Vec<Vec<Element>>,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    basis: Vec<String>,
    #[serde(default)]
    novikov: Option<Vec<Vec<BTreeMap<String, Scalar>>>>,
    #[serde(default)]
    lie: Option<Vec<Vec<BTreeMap<String, Scalar>>>>,
    #[serde(default)]
    name: Option<String>,
}

impl Table {
    /// Builds a table from product entries given as `(name, coefficient)` lists.
    pub fn new(
        label: impl Into<String>,
        names: Vec<String>,
        novikov: Vec<Vec<Element>>,
        lie: Vec<Vec<Element>>,
    ) -> Result<Self> {
        let n = names.len();
        let mut lookup = HashMap::new();
        for (k, name) in names.iter().enumerate() {
            if BasisIndex::Sym(name.clone()).to_string().parse::<BasisIndex>() != Ok(BasisIndex::Sym(name.clone())) {
                return Err(Error::Invalid(format!("basis name {name:?} is not a plain identifier")));
            }
            if lookup.insert(name.clone(), k).is_some() {
                return Err(Error::Invalid(format!("duplicate basis name {name:?}")));
            }
        }
        for (what, t) in [("novikov", &novikov), ("lie", &lie)] {
            if t.len() != n || t.iter().any(|row| row.len() != n) {
                return Err(Error::Invalid(format!("{what} table must be {n}x{n}")));
            }
            for e in t.iter().flatten() {
                for idx in e.support() {
                    match idx {
                        BasisIndex::Sym(s) if lookup.contains_key(s) => {}
                        other => return Err(Error::Invalid(format!("{what} table mentions unknown basis {other}"))),
                    }
                }
            }
        }
        Ok(Table { names, lookup, novikov, lie, label: label.into() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("table JSON: {e}")))?;
        let n = doc.basis.len();
        let convert = |t: Option<Vec<Vec<BTreeMap<String, Scalar>>>>| -> Vec<Vec<Element>> {
            match t {
                None => vec![vec![Element::zero(); n]; n],
                Some(rows) => rows
                    .into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|m| m.into_iter().map(|(k, c)| (BasisIndex::Sym(k), c)).collect())
                            .collect()
                    })
                    .collect(),
            }
        };
        let novikov = convert(doc.novikov);
        let lie = convert(doc.lie);
        Table::new(doc.name.unwrap_or_else(|| "table".into()), doc.basis, novikov, lie)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn window(&self) -> Window {
        Window::new(self.names.iter().cloned().map(BasisIndex::Sym).collect()).expect("names are distinct")
    }

    /// Same basis and bracket with the Novikov product set to zero.
    pub fn with_trivial_novikov(mut self) -> Self {
        let n = self.names.len();
        self.novikov = vec![vec![Element::zero(); n]; n];
        self.label = format!("Cur({})", self.label);
        self
    }

    pub fn into_gd(self) -> GdStructure {
        GdStructure::new(self)
    }

    fn pos(&self, idx: &BasisIndex) -> usize {
        match idx {
            BasisIndex::Sym(s) => self.lookup[s],
            other => panic!("table algebra given non-table index {other}"),
        }
    }
}

impl StructureRules for Table {
    fn index_kind(&self) -> IndexKind {
        IndexKind::Sym { names: self.names.clone() }
    }

    fn is_valid(&self, idx: &BasisIndex) -> bool {
        matches!(idx, BasisIndex::Sym(s) if self.lookup.contains_key(s))
    }

    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        self.novikov[self.pos(a)][self.pos(b)].clone()
    }

    fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        self.lie[self.pos(a)][self.pos(b)].clone()
    }

    fn description(&self) -> String {
        self.label.clone()
    }
}

/// Convenience for building table entries: `sym("e")`.
pub fn sym(name: &str) -> Element {
    Element::basis(BasisIndex::Sym(name.to_string()))
}

/// `Σ c·name` from `(name, coefficient)` pairs.
pub fn sym_terms(terms: &[(&str, Scalar)]) -> Element {
    terms.iter().map(|(n, c)| (BasisIndex::Sym(n.to_string()), c.clone())).collect()
}
