use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::symbol_error_pmf;
use crate::error::{Error, Result};
use crate::pipeline::SolvedInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    /// Symbol-error distribution per code and channel.
    Fig4,
    /// Equilibrium detection rule.
    Fig5,
    /// Relaxed attacker strategy over the columns of `Lambda`.
    Fig6,
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig4" | "4" => Ok(FigureId::Fig4),
            "fig5" | "5" => Ok(FigureId::Fig5),
            "fig6" | "6" => Ok(FigureId::Fig6),
            _ => Err(Error::InvalidCode(format!("unknown figure {s}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub code: String,
    pub pe: f64,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub figure: FigureId,
    pub rows: Vec<FigureRow>,
}

/// Columnar data for one figure, one group of rows per solved instance.
pub fn figure_data(which: FigureId, solved: &[SolvedInstance]) -> FigureData {
    let mut rows = Vec::new();
    for s in solved {
        let code = s.instance.code.to_string();
        let values: Vec<f64> = match which {
            FigureId::Fig4 => symbol_error_pmf(&s.instance.code, &s.channel),
            FigureId::Fig5 => s.equilibrium.pi_star.clone(),
            FigureId::Fig6 => s.equilibrium.beta_star.clone(),
        };
        rows.extend(values.into_iter().enumerate().map(|(index, value)| FigureRow { code: code.clone(), pe: s.instance.p_e, index, value }));
    }
    FigureData { figure: which, rows }
}
