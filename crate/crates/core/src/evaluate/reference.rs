use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois_rs::CodeParams;

const REFERENCE_JSON: &str = include_str!("../../data/reference_tables.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: usize,
}

impl ReferenceCode {
    pub fn params(&self) -> Result<CodeParams> {
        CodeParams::new(self.n, self.k, self.d, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRowI {
    pub code: String,
    pub signs: u64,
    pub bits: usize,
    pub nu: usize,
    pub mu: usize,
    pub d_o: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCell {
    pub code: String,
    pub pe: f64,
    pub value: f64,
    /// Decimal places the value was published with.
    pub decimals: u32,
    pub source: String,
    #[serde(default)]
    pub highlighted: bool,
    #[serde(default)]
    pub floor: bool,
}

/// Published values of the five reproduced tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTables {
    pub codes: Vec<ReferenceCode>,
    pub pe: Vec<f64>,
    pub table_i: Vec<ReferenceRowI>,
    pub table_ii: Vec<ReferenceCell>,
    pub table_iii: Vec<ReferenceCell>,
    pub table_iv: Vec<ReferenceCell>,
    pub table_v: Vec<ReferenceCell>,
}

impl ReferenceTables {
    pub fn get() -> &'static ReferenceTables {
        static TABLES: OnceLock<ReferenceTables> = OnceLock::new();
        TABLES.get_or_init(|| serde_json::from_str(REFERENCE_JSON).expect("bundled reference tables parse"))
    }

    pub fn code(&self, name: &str) -> Result<CodeParams> {
        self.codes
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InvalidCode(format!("no reference code named {name}")))?
            .params()
    }

    pub fn cell<'a>(cells: &'a [ReferenceCell], code: &str, pe: f64) -> Option<&'a ReferenceCell> {
        cells.iter().find(|c| c.code == code && c.pe == pe)
    }
}
