//! Reading back the text form of an interpretation.
//!
//! ```text
//! domain: 3
//! individual a = d0
//! concept A = {d1, d2}
//! role r = {(d0, d1), (d0, d2)}
//! ```

use shoq_core::model::{Element, Interpretation};
use shoq_core::{ConceptName, Individual, Role};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ModelTextError {
    pub line: usize,
    pub msg: String,
}

fn element(tok: &str) -> Option<Element> {
    tok.trim().strip_prefix('d')?.parse().ok()
}

fn braced(s: &str) -> Option<&str> {
    s.trim().strip_prefix('{')?.strip_suffix('}')
}

pub fn parse_model(text: &str) -> Result<Interpretation, ModelTextError> {
    let mut i = Interpretation::default();
    let mut seen_domain = false;
    for (no, line) in text.lines().enumerate() {
        let err = |msg: &str| ModelTextError { line: no + 1, msg: msg.into() };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(n) = line.strip_prefix("domain:") {
            i.domain = n.trim().parse().map_err(|_| err("bad domain size"))?;
            seen_domain = true;
            continue;
        }
        let (kind, rest) = line.split_once(' ').ok_or_else(|| err("expected `kind name = value`"))?;
        let (name, value) = rest.split_once('=').ok_or_else(|| err("expected `=`"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(err("missing name"));
        }
        match kind {
            "individual" => {
                let x = element(value).ok_or_else(|| err("expected an element dN"))?;
                i.individuals.insert(Individual::new(name), x);
            }
            "concept" => {
                let body = braced(value).ok_or_else(|| err("expected `{...}`"))?;
                let ext = body
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| element(t).ok_or_else(|| err("expected an element dN")))
                    .collect::<Result<_, _>>()?;
                i.concepts.insert(ConceptName::new(name), ext);
            }
            "role" => {
                let body = braced(value).ok_or_else(|| err("expected `{...}`"))?;
                let mut rel = std::collections::BTreeSet::new();
                let mut rest = body.trim();
                while !rest.is_empty() {
                    let open = rest.strip_prefix('(').ok_or_else(|| err("expected `(`"))?;
                    let (pair, tail) = open.split_once(')').ok_or_else(|| err("expected `)`"))?;
                    let (x, y) = pair.split_once(',').ok_or_else(|| err("expected a pair"))?;
                    let (x, y) = (element(x), element(y));
                    rel.insert((x.ok_or_else(|| err("bad element"))?, y.ok_or_else(|| err("bad element"))?));
                    rest = tail.trim_start().trim_start_matches(',').trim_start();
                }
                i.roles.insert(Role::new(name), rel);
            }
            _ => return Err(err("expected `individual`, `concept` or `role`")),
        }
    }
    if !seen_domain {
        return Err(ModelTextError { line: 0, msg: "missing `domain:` line".into() });
    }
    Ok(i)
}
