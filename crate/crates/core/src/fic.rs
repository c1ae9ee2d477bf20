//! Full irreducibility criterion for train track maps.
//!
//! A PNP-free train track map with a Perron-Frobenius transition matrix and connected
//! local Whitehead graphs represents an ageometric fully irreducible outer automorphism.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::ltt::{ltt_of_map, LttStructure};
use crate::map::GraphMap;
use crate::matrix::{is_pf, transition_matrix};
use crate::pff::{factor_pff, PffDecomposition};
use crate::pnp::{pnp_search, PnpVerdict, SearchCertificate, SearchOptions};
use crate::train_track::{is_train_track, TtWitness};
use crate::whitehead::{directional_surplus, is_fully_singular, whitehead_data};

/// The condition that failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FicFailure {
    NotTrainTrack {
        witness: TtWitness,
    },
    NotPf,
    DisconnectedLocalWhitehead {
        vertex: String,
    },
    NielsenPath {
        rho1: String,
        rho2: String,
        stage: usize,
    },
}

/// Invariants of a certified map.
#[derive(Clone, Debug)]
pub struct FicReport {
    pub decomposition: PffDecomposition,
    pub certificate: SearchCertificate,
    pub structure: LttStructure,
    pub rank: i64,
    pub index_sum: HalfInt,
    pub index_list: Vec<HalfInt>,
    pub index_deficit: HalfInt,
    pub directional_surplus: usize,
    pub fully_singular: bool,
    /// `i = 3/2 - r` and no component of IW has a cut vertex.
    pub lone_axis: bool,
}

#[derive(Clone, Debug)]
pub enum FicVerdict {
    Certified(Box<FicReport>),
    Failed(FicFailure),
    Inconclusive { reason: String },
}

impl FicVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            FicVerdict::Certified(_) => "certified",
            FicVerdict::Failed(_) => "failed",
            FicVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, FicVerdict::Certified(_))
    }

    pub fn to_json(&self, g: &GraphMap) -> serde_json::Value {
        let mut v =
            json!({ "schema": "traintrack.fic/1", "map": g.to_dsl(), "verdict": self.kind() });
        match self {
            FicVerdict::Certified(r) => {
                v["decomposition"] = json!(r.decomposition.to_dsl());
                v["rank"] = json!(r.rank);
                v["index_sum"] = json!(r.index_sum);
                v["index_list"] = json!(r.index_list);
                v["index_deficit"] = json!(r.index_deficit);
                v["directional_surplus"] = json!(r.directional_surplus);
                v["fully_singular"] = json!(r.fully_singular);
                v["lone_axis"] = json!(r.lone_axis);
                v["ltt"] = r.structure.to_json();
                v["pnp_certificate"] = r.certificate.to_json(r.decomposition.start());
            }
            FicVerdict::Failed(f) => v["failure"] = serde_json::to_value(f).expect("serializable"),
            FicVerdict::Inconclusive { reason } => v["reason"] = json!(reason),
        }
        v
    }
}

/// Run the criterion. Without a decomposition one is found by greedy factoring.
pub fn fic_certify(
    g: &GraphMap,
    d: Option<&PffDecomposition>,
    opts: SearchOptions,
) -> Result<FicVerdict> {
    g.require_self_map()?;
    let tt = is_train_track(g)?;
    if let Some(witness) = tt.witness {
        return Ok(FicVerdict::Failed(FicFailure::NotTrainTrack { witness }));
    }
    if !is_pf(&transition_matrix(g)) {
        return Ok(FicVerdict::Failed(FicFailure::NotPf));
    }
    let wh = whitehead_data(g)?;
    if let Some(lw) = wh.local.iter().find(|lw| !lw.graph.is_connected()) {
        let vertex = g.domain().vertex_name(lw.vertex).to_string();
        return Ok(FicVerdict::Failed(FicFailure::DisconnectedLocalWhitehead {
            vertex,
        }));
    }
    let owned;
    let d = match d {
        Some(d) => {
            if d.compose() != g {
                return Err(Error::InvalidDecomposition(
                    "decomposition does not compose to the map".into(),
                ));
            }
            d
        }
        None => match factor_pff(g) {
            Ok(x) => {
                owned = x;
                &owned
            }
            Err(Error::NotPffFactorable(why)) => {
                return Ok(FicVerdict::Inconclusive {
                    reason: format!("no pff decomposition for the PNP search: {why}"),
                })
            }
            Err(e) => return Err(e),
        },
    };
    let (free, certificate) = match pnp_search(d, opts)? {
        PnpVerdict::NoPnp { free, certificate } => (free, certificate),
        PnpVerdict::CandidateFound {
            rho1, rho2, stage, ..
        } => {
            let gr = d.start();
            return Ok(FicVerdict::Failed(FicFailure::NielsenPath {
                rho1: gr.path_name(&rho1),
                rho2: gr.path_name(&rho2),
                stage,
            }));
        }
        PnpVerdict::Inconclusive { reason, .. } => return Ok(FicVerdict::Inconclusive { reason }),
    };
    let structure = ltt_of_map(g, &free)?;
    let iw = &wh.ideal;
    let lone_axis = wh.index_sum == HalfInt::from_twice(3 - 2 * wh.rank)
        && iw
            .components()
            .iter()
            .all(|c| !iw.induced(c).has_cut_vertex());
    let index_list = iw
        .components()
        .iter()
        .map(|c| HalfInt::from_twice(2 - c.len() as i64))
        .collect();
    Ok(FicVerdict::Certified(Box::new(FicReport {
        decomposition: d.clone(),
        certificate,
        structure,
        rank: wh.rank,
        index_sum: wh.index_sum,
        index_list,
        index_deficit: wh.index_deficit,
        directional_surplus: directional_surplus(g)?,
        fully_singular: is_fully_singular(g)?,
        lone_axis,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain_g, map_fibonacci, map_g, map_s};
    use crate::map::parse_map;

    fn report(v: FicVerdict) -> FicReport {
        match v {
            FicVerdict::Certified(r) => *r,
            other => panic!("{}", other.kind()),
        }
    }

    #[test]
    fn s_is_certified() {
        let r = report(fic_certify(&map_s(), None, SearchOptions::default()).unwrap());
        assert_eq!(r.index_sum, HalfInt::from_int(-1));
        assert_eq!(r.index_deficit, HalfInt::from_int(1));
        assert_eq!(r.directional_surplus, 2);
        assert!(r.fully_singular);
        assert!(!r.lone_axis);
        assert_eq!(
            r.decomposition.to_dsl(),
            "fold a over b; fold c over a; fold b over c; fold B over C"
        );
    }

    #[test]
    fn g_is_certified() {
        let d = chain_g();
        let r = report(fic_certify(&map_g(), Some(&d), SearchOptions::default()).unwrap());
        assert_eq!(r.index_deficit.twice(), r.directional_surplus as i64);
        assert!(r.index_sum < HalfInt::from_int(0) && r.index_sum > HalfInt::from_int(1 - r.rank));
    }

    #[test]
    fn failures() {
        let reducible = parse_map("a->ab;b->b;c->cab", None).unwrap();
        assert!(matches!(
            fic_certify(&reducible, None, SearchOptions::default()).unwrap(),
            FicVerdict::Failed(FicFailure::NotPf)
        ));
        let folding = parse_map("a->ab;b->A", None).unwrap();
        assert!(matches!(
            fic_certify(&folding, None, SearchOptions::default()).unwrap(),
            FicVerdict::Failed(FicFailure::NotTrainTrack { .. })
        ));
        assert!(matches!(
            fic_certify(&map_fibonacci(), None, SearchOptions::default()).unwrap(),
            FicVerdict::Failed(FicFailure::NielsenPath { .. })
        ));
    }
}
