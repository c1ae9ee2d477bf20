//! Loading maps, chains and JSON documents from flags and files.

use std::path::Path;

use traintrack::pff::{parse_chain, PffDecomposition};
use traintrack::{parse_map, Error, Graph, GraphMap};

use crate::{ChainInput, MapInput, EXIT_FAILED, EXIT_USAGE};

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::InvalidGraph(_)
            | Error::InvalidMap(_)
            | Error::InvalidFold(_)
            | Error::InvalidDecomposition(_)
            | Error::InvalidCertificate(_)
            | Error::InvalidLtt(_)
            | Error::Automaton(_) => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(p: &Path) -> CliResult<String> {
    std::fs::read_to_string(p)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", p.display())))
}

pub fn read_json(p: &Path) -> CliResult<serde_json::Value> {
    serde_json::from_str(&read_text(p)?)
        .map_err(|e| CliError::usage(format!("{} is not JSON: {e}", p.display())))
}

pub fn load_graph(p: &Path) -> CliResult<Graph> {
    Ok(Graph::from_json(&read_json(p)?)?)
}

fn text_or_file(
    inline: &Option<String>,
    file: &Option<std::path::PathBuf>,
    what: &str,
) -> CliResult<Option<String>> {
    match (inline, file) {
        (Some(_), Some(_)) => Err(CliError::usage(format!(
            "give the {what} inline or as a file, not both"
        ))),
        (Some(t), None) => Ok(Some(t.clone())),
        (None, Some(p)) => Ok(Some(read_text(p)?.trim().to_string())),
        (None, None) => Ok(None),
    }
}

pub fn load_map(m: &MapInput) -> CliResult<Option<GraphMap>> {
    let Some(text) = text_or_file(&m.map, &m.map_file, "map")? else {
        return Ok(None);
    };
    let carrier = m.graph.as_deref().map(load_graph).transpose()?;
    Ok(Some(parse_map(&text, carrier.as_ref())?))
}

/// The rose on the edge letters appearing in a chain, in alphabetical order.
fn rose_of_chain(text: &str) -> CliResult<Graph> {
    let mut names: Vec<String> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty() && !matches!(*w, "fold" | "over" | "perm"))
        .map(str::to_lowercase)
        .collect();
    names.sort();
    names.dedup();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(Graph::rose(&refs)?)
}

pub fn load_chain(c: &ChainInput, carrier: Option<&Graph>) -> CliResult<Option<PffDecomposition>> {
    let Some(text) = text_or_file(&c.chain, &c.chain_file, "chain")? else {
        return Ok(None);
    };
    let g = match carrier {
        Some(g) => g.clone(),
        None => rose_of_chain(&text)?,
    };
    Ok(Some(parse_chain(&text, &g)?))
}

/// A map from `--map` or `--chain` (or both, which must agree).
pub fn map_and_chain(
    m: &MapInput,
    c: &ChainInput,
) -> CliResult<(GraphMap, Option<PffDecomposition>)> {
    let map = load_map(m)?;
    let carrier = match (&map, &m.graph) {
        (Some(g), _) => Some(g.domain().clone()),
        (None, Some(p)) => Some(load_graph(p)?),
        (None, None) => None,
    };
    let chain = load_chain(c, carrier.as_ref())?;
    match (map, chain) {
        (Some(g), Some(d)) => {
            if d.compose() != &g {
                return Err(CliError::usage(format!(
                    "the chain composes to {}, not to the map",
                    d.compose().to_dsl()
                )));
            }
            Ok((g, Some(d)))
        }
        (Some(g), None) => Ok((g, None)),
        (None, Some(d)) => Ok((d.compose().clone(), Some(d))),
        (None, None) => Err(CliError::usage(
            "a map (--map or --map-file) or a chain (--chain or --chain-file) is required",
        )),
    }
}

pub fn require_map(m: &MapInput) -> CliResult<GraphMap> {
    load_map(m)?.ok_or_else(|| CliError::usage("a map is required (--map or --map-file)"))
}
