//! Versioned model serialization with integrity checking.
//!
//! The on-disk form is a JSON envelope `{schema_version, checksum, model}`
//! where `checksum` is the SHA-256 of the exact model payload bytes. JSON
//! prints floats in shortest round-trip form, so a load reproduces weights
//! bit for bit. The version gate runs before the checksum so a future format
//! fails with "unsupported version", not "corrupted".

use super::{ClassifierError, LinearModel};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

/// Current model file format version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    schema_version: u32,
    checksum: String,
    model: &'a RawValue,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    schema_version: u32,
    checksum: String,
    model: Box<RawValue>,
}

fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Serialize a model into its checksummed envelope.
pub fn save_model(model: &LinearModel) -> Result<Vec<u8>, ClassifierError> {
    let payload =
        serde_json::to_string(model).map_err(|e| ClassifierError::InvalidModel(e.to_string()))?;
    let checksum = hex(&Sha256::digest(payload.as_bytes()));
    let raw =
        RawValue::from_string(payload).map_err(|e| ClassifierError::InvalidModel(e.to_string()))?;
    let envelope = EnvelopeOut { schema_version: SCHEMA_VERSION, checksum, model: &raw };
    serde_json::to_vec(&envelope).map_err(|e| ClassifierError::InvalidModel(e.to_string()))
}

/// Parse a model envelope, verifying version, checksum, and the model
/// invariants. Nothing partial ever escapes: every failure path returns
/// before a model value is built.
pub fn load_model(bytes: &[u8]) -> Result<LinearModel, ClassifierError> {
    let envelope: EnvelopeIn = serde_json::from_slice(bytes)
        .map_err(|e| ClassifierError::Corrupted(format!("unreadable envelope: {e}")))?;
    if envelope.schema_version != SCHEMA_VERSION {
        return Err(ClassifierError::UnsupportedVersion {
            got: envelope.schema_version,
            supported: SCHEMA_VERSION,
        });
    }
    let payload = envelope.model.get();
    let checksum = hex(&Sha256::digest(payload.as_bytes()));
    if checksum != envelope.checksum {
        return Err(ClassifierError::Corrupted("checksum mismatch".into()));
    }
    let model: LinearModel = serde_json::from_str(payload)
        .map_err(|e| ClassifierError::Corrupted(format!("unreadable model payload: {e}")))?;
    // Loaded files go through the same validation as freshly trained models.
    LinearModel::from_parts(
        model.task(),
        model.kind(),
        model.classes().to_vec(),
        model.weights().to_vec(),
        model.bias().to_vec(),
        model.features().clone(),
        model.tokenizer().clone(),
        model.calibration().to_vec(),
    )
}
