use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Arc, CrossingId, Endpoint, LinkDiagram, LinkError, Sign, Slot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonCrossing {
    pub id: u32,
    /// `"+"` or `"-"`.
    pub sign: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonArc {
    pub id: u32,
    pub from: (u32, String),
    pub to: (u32, String),
}

/// On-disk diagram. `homfly`, when present, is an expected polynomial in
/// machine form and is ignored by [`LinkDiagram::from_json_str`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub crossings: Vec<JsonCrossing>,
    pub arcs: Vec<JsonArc>,
    #[serde(default)]
    pub zero_components: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homfly: Option<Value>,
}

impl DiagramFile {
    pub fn from_diagram(d: &LinkDiagram) -> Self {
        let ep = |e: Endpoint| (e.crossing.0, e.slot.name().to_string());
        DiagramFile {
            crossings: d
                .crossings()
                .map(|c| JsonCrossing {
                    id: c.0,
                    sign: match d.signs()[c.index()] {
                        Sign::Positive => "+".into(),
                        Sign::Negative => "-".into(),
                    },
                })
                .collect(),
            arcs: d
                .arcs()
                .iter()
                .enumerate()
                .map(|(i, a)| JsonArc { id: i as u32, from: ep(a.from), to: ep(a.to) })
                .collect(),
            zero_components: d.zero_components(),
            homfly: None,
        }
    }

    pub fn to_diagram(&self) -> Result<LinkDiagram, LinkError> {
        let bad = |m: String| LinkError::InvalidWiring(m);
        let n = self.crossings.len();
        let mut signs: Vec<Option<Sign>> = vec![None; n];
        for c in &self.crossings {
            let cell = signs.get_mut(c.id as usize).ok_or_else(|| bad(format!("crossing id {} out of range", c.id)))?;
            if cell.is_some() {
                return Err(bad(format!("duplicate crossing id {}", c.id)));
            }
            *cell = Some(match c.sign.as_str() {
                "+" => Sign::Positive,
                "-" => Sign::Negative,
                s => return Err(LinkError::MalformedSyntax(format!("unknown sign {s:?}"))),
            });
        }
        let m = self.arcs.len();
        let mut arcs: Vec<Option<Arc>> = vec![None; m];
        let ep = |(c, s): &(u32, String)| -> Result<Endpoint, LinkError> {
            let slot = Slot::from_name(s).ok_or_else(|| LinkError::MalformedSyntax(format!("unknown slot {s:?}")))?;
            Ok(Endpoint { crossing: CrossingId(*c), slot })
        };
        for a in &self.arcs {
            let cell = arcs.get_mut(a.id as usize).ok_or_else(|| bad(format!("arc id {} out of range", a.id)))?;
            if cell.is_some() {
                return Err(bad(format!("duplicate arc id {}", a.id)));
            }
            *cell = Some(Arc { from: ep(&a.from)?, to: ep(&a.to)? });
        }
        LinkDiagram::new(
            signs.into_iter().map(|s| s.expect("all ids seen")).collect(),
            arcs.into_iter().map(|a| a.expect("all ids seen")).collect(),
            self.zero_components,
        )
    }

    pub fn parse(text: &str) -> Result<Self, LinkError> {
        serde_json::from_str(text).map_err(|e| LinkError::MalformedSyntax(e.to_string()))
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram json serializes")
    }
}

impl LinkDiagram {
    pub fn from_json_str(text: &str) -> Result<LinkDiagram, LinkError> {
        DiagramFile::parse(text)?.to_diagram()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&DiagramFile::from_diagram(self)).expect("diagram json serializes")
    }
}
