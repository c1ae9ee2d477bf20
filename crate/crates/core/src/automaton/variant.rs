//! Automaton flavors: which ideal Whitehead graphs they accept and which structures become vertices.

use super::IwgSpec;
use crate::error::{Error, Result};
use crate::ltt::LttStructure;

pub trait AutomatonVariant: Send + Sync {
    fn name(&self) -> &'static str;

    /// Reject ideal Whitehead graphs the variant is not defined for.
    fn check_spec(&self, spec: &IwgSpec) -> Result<()>;

    /// Variant-specific vertex conditions, on top of validity, birecurrence and the IW match.
    fn accepts(&self, ltt: &LttStructure) -> bool;

    /// Whether certified loops represent lone axis automorphisms.
    fn certifies_lone_axis(&self) -> bool {
        false
    }
}

fn component_sizes_ok(spec: &IwgSpec) -> Result<()> {
    for c in spec.graph.components() {
        if c.len() < 3 {
            return Err(Error::Automaton(format!(
                "component with {} vertices; at least 3 are required",
                c.len()
            )));
        }
    }
    Ok(())
}

/// One red vertex, index `3/2 - r`, cut-vertex-free ideal Whitehead graph.
pub struct LoneAxis;

impl AutomatonVariant for LoneAxis {
    fn name(&self) -> &'static str {
        "lone-axis"
    }

    fn check_spec(&self, spec: &IwgSpec) -> Result<()> {
        component_sizes_ok(spec)?;
        let n = spec.graph.num_vertices() as i64;
        if n != 2 * spec.rank - 1 {
            return Err(Error::Automaton(format!(
                "{n} vertices; a lone axis graph has 2r - 1 = {}",
                2 * spec.rank - 1
            )));
        }
        let g = &spec.graph;
        if g.components().iter().any(|c| g.induced(c).has_cut_vertex()) {
            return Err(Error::Automaton("a component has a cut vertex".into()));
        }
        Ok(())
    }

    fn accepts(&self, ltt: &LttStructure) -> bool {
        ltt.validate_lone_axis().is_empty()
    }

    fn certifies_lone_axis(&self) -> bool {
        true
    }
}

/// Every carrier vertex has at least three purple directions.
pub struct FullySingular;

impl AutomatonVariant for FullySingular {
    fn name(&self) -> &'static str {
        "fully-singular"
    }

    fn check_spec(&self, spec: &IwgSpec) -> Result<()> {
        component_sizes_ok(spec)?;
        let r = spec.rank;
        let c = spec.graph.components().len() as i64;
        let n = spec.graph.num_vertices() as i64;
        if c < 1 || c > 2 * r - 1 {
            return Err(Error::Automaton(format!(
                "{c} components; between 1 and 2r - 1 are allowed"
            )));
        }
        // The stated lower bound 2r - 1 excludes graphs of certified maps (a 4-cycle at rank 3),
        // so only the bounds implied by three periodic directions per vertex are enforced.
        if n < 3 || n > 6 * r - 5 {
            return Err(Error::Automaton(format!(
                "{n} vertices; between 3 and 6r - 5 are allowed"
            )));
        }
        Ok(())
    }

    fn accepts(&self, ltt: &LttStructure) -> bool {
        let g = ltt.carrier();
        (0..g.num_vertices()).all(|v| {
            g.directions_at(v)
                .iter()
                .filter(|&&d| ltt.color(d) == crate::ltt::Color::Purple)
                .count()
                >= 3
        })
    }
}

pub fn variants() -> Vec<Box<dyn AutomatonVariant>> {
    vec![Box::new(LoneAxis), Box::new(FullySingular)]
}

pub fn variant(name: &str) -> Option<Box<dyn AutomatonVariant>> {
    variants().into_iter().find(|v| v.name() == name)
}
