//! JSON model files: the presheaf format plus an `interp` section keyed by
//! symbol instance.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::algebra::{FiniteAlgebra, ModelError};
use crate::presheaf::{Elem, PresheafError, PresheafFile, TruncatedPresheaf};
use crate::theory::{SymbolId, UniformSignature};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpEntry {
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub presheaf: PresheafFile,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub interp: BTreeMap<String, Vec<InterpEntry>>,
}

impl ModelFile {
    pub fn from_presheaf(x: &TruncatedPresheaf) -> Self {
        ModelFile {
            presheaf: PresheafFile::from_presheaf(x),
            interp: BTreeMap::new(),
        }
    }

    pub fn from_algebra(a: &FiniteAlgebra) -> Self {
        let x = a.carrier();
        let mut interp = BTreeMap::new();
        for i in a.interps() {
            let entries: Vec<InterpEntry> = i
                .sorted_entries()
                .into_iter()
                .map(|(args, v)| InterpEntry {
                    args: args
                        .iter()
                        .zip(&i.op.arg_sorts)
                        .map(|(&e, s)| x.label(s, e).unwrap().to_string())
                        .collect(),
                    value: x.label(&i.op.result_sort, v).unwrap().to_string(),
                })
                .collect();
            interp.insert(i.op.id.to_string(), entries);
        }
        ModelFile {
            presheaf: PresheafFile::from_presheaf(x),
            interp,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Presheaf(PresheafError::Format(e.to_string())))
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_presheaf(&self) -> Result<TruncatedPresheaf, ModelError> {
        Ok(self.presheaf.to_presheaf()?)
    }

    pub fn to_algebra(&self, sig: &UniformSignature) -> Result<FiniteAlgebra, ModelError> {
        let x = self.to_presheaf()?;
        let mut tables: BTreeMap<SymbolId, HashMap<Vec<Elem>, Elem>> = BTreeMap::new();
        for (key, entries) in &self.interp {
            let id: SymbolId = key.parse().map_err(|_| ModelError::UnknownSymbol(key.clone()))?;
            let op = sig
                .symbol(&id)
                .filter(|op| op.index.is_subset(x.universe()))
                .ok_or_else(|| ModelError::UnknownSymbol(key.clone()))?;
            let mut table = HashMap::new();
            for entry in entries {
                if entry.args.len() != op.arity() {
                    return Err(ModelError::BadTable {
                        symbol: key.clone(),
                        message: format!("entry with {} arguments", entry.args.len()),
                    });
                }
                let find = |s, l: &str| {
                    x.find(s, l).ok_or_else(|| {
                        ModelError::Presheaf(PresheafError::NotInCarrier {
                            sort: s.clone(),
                            element: l.to_string(),
                        })
                    })
                };
                let args = entry
                    .args
                    .iter()
                    .zip(&op.arg_sorts)
                    .map(|(l, s)| find(s, l))
                    .collect::<Result<Vec<_>, _>>()?;
                let v = find(&op.result_sort, &entry.value)?;
                if table.insert(args, v).is_some() {
                    return Err(ModelError::BadTable {
                        symbol: key.clone(),
                        message: "repeated argument tuple".into(),
                    });
                }
            }
            tables.insert(id, table);
        }
        FiniteAlgebra::new(x, sig.clone(), tables)
    }
}
