//! JSON formats for priors and mechanisms. Rationals are `"p/q"` strings on
//! output; numbers, decimals and fractions are accepted on input.

use num_traits::Zero;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{AuctionError, Result};
use crate::mech::{AllocationMatrix, Mechanism};
use crate::priors::{JointPrior, ValueGrid};
use crate::rational::{format_q, RawNumber, Q};

/// Schema tag written into every JSON document.
pub const SCHEMA: &str = "corr-auction/v1";

/// One sparse mass entry: the mass followed by the 0-based grid index.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub mass: Q,
    pub index: Vec<usize>,
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.index.len() + 1))?;
        seq.serialize_element(&format_q(&self.mass))?;
        for i in &self.index {
            seq.serialize_element(i)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<RawNumber>::deserialize(d)?;
        let mut it = raw.into_iter();
        let mass = it
            .next()
            .ok_or_else(|| de::Error::custom("empty pmf entry"))?
            .into_q()
            .map_err(de::Error::custom)?;
        let index = it
            .map(|r| match r {
                RawNumber::Int(i) if i >= 0 => Ok(i as usize),
                other => Err(de::Error::custom(format!("bad grid index {other:?}"))),
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(Entry { mass, index })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfDoc {
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Entry>>,
    /// Row-major masses for every grid point.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_q_vec")]
    pub dense: Option<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorDoc {
    #[serde(default = "schema")]
    pub schema: String,
    pub bidders: usize,
    #[serde(with = "q_matrix")]
    pub values: Vec<Vec<Q>>,
    pub pmf: PmfDoc,
}

fn schema() -> String {
    SCHEMA.to_string()
}

mod opt_q_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &Option<Vec<Q>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match xs {
            Some(v) => crate::rational::serde_q_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Q>>, D::Error> {
        let raw = Option::<Vec<RawNumber>>::deserialize(d)?;
        raw.map(|v| v.into_iter().map(|r| r.into_q().map_err(de::Error::custom)).collect())
            .transpose()
    }
}

mod q_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(rows: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(format_q).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let raw = Vec::<Vec<RawNumber>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_iter().map(|x| x.into_q().map_err(de::Error::custom)).collect())
            .collect()
    }
}

mod opt_q_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(rows: &[Vec<Option<Q>>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<Vec<Option<String>>> =
            rows.iter().map(|r| r.iter().map(|x| x.as_ref().map(format_q)).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Option<Q>>>, D::Error> {
        let raw = Vec::<Vec<Option<RawNumber>>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| x.map(|x| x.into_q().map_err(de::Error::custom)).transpose())
                    .collect()
            })
            .collect()
    }
}

impl PriorDoc {
    /// Sparse document listing the nonzero masses.
    pub fn from_prior(prior: &JointPrior) -> Self {
        let layout = prior.layout();
        let entries = prior
            .masses()
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(f, m)| Entry {
                mass: m.clone(),
                index: layout.unflatten(f),
            })
            .collect();
        PriorDoc {
            schema: schema(),
            bidders: prior.bidders(),
            values: prior.grid().all_levels().to_vec(),
            pmf: PmfDoc {
                shape: prior.shape().to_vec(),
                entries: Some(entries),
                dense: None,
            },
        }
    }

    pub fn to_prior(&self) -> Result<JointPrior> {
        if self.values.len() != self.bidders {
            return Err(AuctionError::InvalidPrior(format!(
                "{} bidders but {} value lists",
                self.bidders,
                self.values.len()
            )));
        }
        let grid = ValueGrid::new(self.values.clone())?;
        if grid.shape() != self.pmf.shape {
            return Err(AuctionError::ShapeMismatch {
                expected: grid.shape(),
                found: self.pmf.shape.clone(),
            });
        }
        match (&self.pmf.entries, &self.pmf.dense) {
            (Some(entries), None) => {
                let layout = crate::priors::Layout::new(&self.pmf.shape);
                let mut seen = vec![false; layout.len()];
                for e in entries {
                    let f = layout.flat(&e.index)?;
                    if std::mem::replace(&mut seen[f], true) {
                        return Err(AuctionError::InvalidPrior(format!("duplicate entry at {:?}", e.index)));
                    }
                }
                JointPrior::from_entries(grid, entries.iter().map(|e| (e.index.clone(), e.mass.clone())))
            }
            (None, Some(dense)) => JointPrior::new(grid, dense.clone()),
            _ => Err(AuctionError::InvalidPrior("pmf needs exactly one of `entries` or `dense`".into())),
        }
    }
}

pub fn prior_from_json(text: &str) -> Result<JointPrior> {
    let doc: PriorDoc = serde_json::from_str(text).map_err(|e| AuctionError::Parse(e.to_string()))?;
    doc.to_prior()
}

pub fn prior_to_json(prior: &JointPrior) -> String {
    to_json(&PriorDoc::from_prior(prior))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismDoc {
    #[serde(default = "schema")]
    pub schema: String,
    #[serde(with = "q_matrix")]
    pub values: Vec<Vec<Q>>,
    pub shape: Vec<usize>,
    /// Row-major winners: 0 for nobody, `b + 1` for bidder `b`.
    pub allocation: Vec<u8>,
    /// Per bidder, per line along their axis: lowest winning value, or null.
    #[serde(with = "opt_q_matrix")]
    pub thresholds: Vec<Vec<Option<Q>>>,
    /// Per bidder, row-major payments.
    #[serde(with = "q_matrix")]
    pub payments: Vec<Vec<Q>>,
}

impl MechanismDoc {
    pub fn from_mechanism(mech: &Mechanism) -> Self {
        MechanismDoc {
            schema: schema(),
            values: mech.grid.all_levels().to_vec(),
            shape: mech.allocation.shape().to_vec(),
            allocation: mech.allocation.winners().to_vec(),
            thresholds: mech.thresholds.clone(),
            payments: mech.payments.clone(),
        }
    }

    /// Rebuilds the mechanism as written, without recomputing payments.
    pub fn to_mechanism(&self) -> Result<Mechanism> {
        let grid = ValueGrid::new(self.values.clone())?;
        if grid.shape() != self.shape {
            return Err(AuctionError::ShapeMismatch {
                expected: grid.shape(),
                found: self.shape.clone(),
            });
        }
        let allocation = AllocationMatrix::new(&self.shape, self.allocation.clone())?;
        let n = grid.bidders();
        let len = allocation.layout().len();
        if self.payments.len() != n || self.payments.iter().any(|p| p.len() != len) {
            return Err(AuctionError::InvalidParameter("payments must list every point for every bidder".into()));
        }
        if self.thresholds.len() != n
            || (0..n).any(|b| self.thresholds[b].len() != allocation.layout().line_starts(b).len())
        {
            return Err(AuctionError::InvalidParameter("thresholds must list every line for every bidder".into()));
        }
        Ok(Mechanism {
            grid,
            allocation,
            thresholds: self.thresholds.clone(),
            payments: self.payments.clone(),
        })
    }
}

pub fn mechanism_from_json(text: &str) -> Result<Mechanism> {
    let doc: MechanismDoc = serde_json::from_str(text).map_err(|e| AuctionError::Parse(e.to_string()))?;
    doc.to_mechanism()
}

pub fn mechanism_to_json(mech: &Mechanism) -> String {
    to_json(&MechanismDoc::from_mechanism(mech))
}

/// Pretty JSON with a trailing newline; field order is fixed by the types.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mech::thresholds_and_payments;
    use crate::rational::{q, qi};

    const UNIFORM: &str = r#"{"bidders": 2, "values": [[1, 2], ["1", "2"]],
        "pmf": {"shape": [2, 2], "entries": [["1/4", 0, 0], ["1/4", 0, 1], [0.25, 1, 0], ["0.25", 1, 1]]}}"#;

    #[test]
    fn parses_sparse_and_dense() {
        let p = prior_from_json(UNIFORM).unwrap();
        assert_eq!(p.masses(), &[q(1, 4), q(1, 4), q(1, 4), q(1, 4)]);
        let dense = r#"{"bidders":2,"values":[[1,2],[1,2]],"pmf":{"shape":[2,2],"dense":["1/2",0,0,"1/2"]}}"#;
        let d = prior_from_json(dense).unwrap();
        assert_eq!(d.mass(&[1, 1]).unwrap(), &q(1, 2));
    }

    #[test]
    fn prior_round_trip() {
        let p = prior_from_json(UNIFORM).unwrap();
        let text = prior_to_json(&p);
        assert!(text.contains("\"schema\": \"corr-auction/v1\""));
        assert_eq!(prior_from_json(&text).unwrap(), p);
    }

    #[test]
    fn rejects_bad_priors() {
        let dup = r#"{"bidders":1,"values":[[1]],"pmf":{"shape":[1],"entries":[["1",0],["1",0]]}}"#;
        assert!(prior_from_json(dup).is_err());
        let shape = r#"{"bidders":1,"values":[[1,2]],"pmf":{"shape":[3],"entries":[["1",0]]}}"#;
        assert!(prior_from_json(shape).is_err());
        let both = r#"{"bidders":1,"values":[[1]],"pmf":{"shape":[1]}}"#;
        assert!(prior_from_json(both).is_err());
        assert!(prior_from_json("{").is_err());
    }

    #[test]
    fn mechanism_round_trip() {
        let grid = ValueGrid::integer(2, 2);
        let alloc = AllocationMatrix::new(&[2, 2], vec![0, 2, 1, 1]).unwrap();
        let mech = thresholds_and_payments(&alloc, &grid).unwrap();
        let text = mechanism_to_json(&mech);
        assert!(text.contains("null"));
        let back = mechanism_from_json(&text).unwrap();
        assert_eq!(back, mech);
        assert_eq!(back.payment(0, 2), &qi(2));
    }
}
