use serde::{Deserialize, Serialize};

use super::IsingModel;
use crate::error::{Error, Result};

/// On-disk form of an [`IsingModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub n_spins: usize,
    pub couplings: Vec<(usize, usize, f64)>,
    pub fields: Vec<f64>,
    pub offset: f64,
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl From<&IsingModel> for ModelDocument {
    fn from(model: &IsingModel) -> Self {
        Self {
            n_spins: model.n_spins(),
            couplings: model.couplings().collect(),
            fields: model.fields().to_vec(),
            offset: model.offset(),
            scale: model.scale(),
            labels: model.labels().to_vec(),
            provenance: None,
        }
    }
}

impl TryFrom<&ModelDocument> for IsingModel {
    type Error = Error;

    fn try_from(doc: &ModelDocument) -> Result<Self> {
        let mut model = IsingModel::new(doc.n_spins);
        for &(i, j, v) in &doc.couplings {
            if i >= doc.n_spins || j >= doc.n_spins || i == j {
                return Err(Error::Dimension(format!(
                    "coupling ({i}, {j}) invalid for {} spins",
                    doc.n_spins
                )));
            }
            model.set_coupling(i, j, v);
        }
        model.set_fields(doc.fields.clone())?;
        model.set_offset(doc.offset);
        model.set_scale(doc.scale);
        model.with_labels(doc.labels.clone())
    }
}

impl IsingModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        IsingModel::try_from(&doc)
    }
}
