//! JSON payloads shared by the CLI and the HTTP service.

use modnim_core::{MoveDelta, MoveKind, PSet, SolveRecord};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveJson {
    pub removals: Vec<u64>,
    /// `"I"` or `"II"`.
    pub kind: String,
}

impl From<&MoveDelta> for MoveJson {
    fn from(mv: &MoveDelta) -> Self {
        MoveJson {
            removals: mv.removals.clone(),
            kind: mv.kind.label().to_string(),
        }
    }
}

impl MoveJson {
    pub fn to_delta(&self) -> Option<MoveDelta> {
        let kind = match self.kind.as_str() {
            "I" => MoveKind::TypeI,
            "II" => MoveKind::TypeII,
            _ => return None,
        };
        Some(MoveDelta::new(self.removals.clone(), kind))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveJson {
    /// `"P"` or `"N"`.
    pub status: String,
    pub winning_moves: Vec<MoveJson>,
}

impl From<&SolveRecord> for SolveJson {
    fn from(rec: &SolveRecord) -> Self {
        SolveJson {
            status: rec.status.label().to_string(),
            winning_moves: rec.winning_moves.iter().map(MoveJson::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PPositionsJson {
    pub m: u64,
    pub positions: Vec<[u64; 2]>,
}

impl From<&PSet> for PPositionsJson {
    fn from(set: &PSet) -> Self {
        PPositionsJson {
            m: set.rules().m(),
            positions: set.positions().iter().map(|&(x, y)| [x, y]).collect(),
        }
    }
}

/// `x,y` rows under an `x,y` header.
pub fn ppositions_csv(set: &PSet) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y"]).expect("in-memory write");
    for (x, y) in set.positions() {
        w.write_record([x.to_string(), y.to_string()]).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
