//! On-disk JSON layout of annotation and prediction files.
//!
//! ```json
//! {
//!   "dataset": "Patents",
//!   "pages": [{
//!     "page_id": "patents-0001", "width": 1240, "height": 1754,
//!     "molecules": [{"id": "m1", "bbox": [10, 20, 110, 140], "molfile": "..."}],
//!     "reactions": [{
//!       "reactants": [{"ref": "m1"}],
//!       "conditions": [{"kind": "text", "bbox": [120, 40, 200, 60]}],
//!       "products": [{"ref": "m2"}]
//!     }]
//!   }]
//! }
//! ```
//!
//! Prediction files use the same envelope; molecules carry `score` and a
//! `structure` of `{"format": "molfile" | "smiles", "value": "..."}` instead
//! of `molfile`, `id` is optional, and reactions may carry a `score`.
//! Boxes are `[x1, y1, x2, y2]` in page pixels.

use serde::{Deserialize, Serialize};

use crate::reaction::EntityKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRaw<P> {
    pub dataset: String,
    pub pages: Vec<P>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtPageRaw {
    pub page_id: String,
    pub width: f64,
    pub height: f64,
    pub molecules: Vec<GtMoleculeRaw>,
    #[serde(default)]
    pub reactions: Vec<ReactionRaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtMoleculeRaw {
    pub id: String,
    pub bbox: [f64; 4],
    pub molfile: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredPageRaw {
    pub page_id: String,
    pub width: f64,
    pub height: f64,
    pub molecules: Vec<PredMoleculeRaw>,
    #[serde(default)]
    pub reactions: Vec<ReactionRaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredMoleculeRaw {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub bbox: [f64; 4],
    pub score: f64,
    pub structure: StructureRaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureFormat {
    Molfile,
    Smiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureRaw {
    pub format: StructureFormat,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionRaw {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    pub reactants: Vec<EntityRaw>,
    #[serde(default)]
    pub conditions: Vec<EntityRaw>,
    pub products: Vec<EntityRaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntityRaw {
    Ref(RefRaw),
    Inline(InlineRaw),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefRaw {
    #[serde(rename = "ref")]
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineRaw {
    pub kind: EntityKind,
    pub bbox: [f64; 4],
}
