//! Tensor container: a raw little-endian f64 payload plus a JSON sidecar.
//!
//! `save_tensor("z.f64", ..)` writes the payload to `z.f64` and the header to
//! `z.f64.json`. The header carries the dimensions, a SHA-256 of the payload,
//! the format version and, for routed tensors, the configuration and routing
//! plan (which gives the provenance of every pseudochannel).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::routing::{RomanConfig, RoutingPlan};

pub const TENSOR_FORMAT_VERSION: u32 = 1;
const FORMAT_NAME: &str = "roman-tensor";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorHeader {
    pub format: String,
    pub version: u32,
    pub crate_version: String,
    /// Row-major dimensions, e.g. `[N, C', L_base]`.
    pub dims: Vec<usize>,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RomanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<RoutingPlan>,
}

impl TensorHeader {
    pub fn new(dims: Vec<usize>) -> Self {
        Self {
            format: FORMAT_NAME.to_string(),
            version: TENSOR_FORMAT_VERSION,
            crate_version: crate::VERSION.to_string(),
            dims,
            sha256: String::new(),
            config: None,
            plan: None,
        }
    }

    pub fn with_routing(mut self, config: RomanConfig, plan: RoutingPlan) -> Self {
        self.config = Some(config);
        self.plan = Some(plan);
        self
    }

    pub fn element_count(&self) -> usize {
        self.dims.iter().product()
    }
}

pub fn sidecar_path(payload: &Path) -> PathBuf {
    let mut name = payload.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_tensor(path: impl AsRef<Path>, mut header: TensorHeader, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    if header.element_count() != values.len() {
        return Err(Error::shape(
            format!("{} values for dims {:?}", header.element_count(), header.dims),
            values.len(),
        ));
    }
    let mut payload = Vec::with_capacity(values.len() * 8);
    for v in values {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    header.format = FORMAT_NAME.to_string();
    header.version = TENSOR_FORMAT_VERSION;
    header.sha256 = digest_hex(&payload);
    fs::write(path, &payload)?;
    fs::write(sidecar_path(path), serde_json::to_vec_pretty(&header)?)?;
    Ok(())
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<(TensorHeader, Vec<f64>)> {
    let path = path.as_ref();
    let header: TensorHeader = serde_json::from_slice(&fs::read(sidecar_path(path))?)?;
    if header.format != FORMAT_NAME || header.version != TENSOR_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: TENSOR_FORMAT_VERSION,
            found: header.version,
        });
    }
    let payload = fs::read(path)?;
    if payload.len() != header.element_count() * 8 {
        return Err(Error::ChecksumMismatch(format!(
            "payload has {} bytes, dims {:?} need {}",
            payload.len(),
            header.dims,
            header.element_count() * 8
        )));
    }
    let digest = digest_hex(&payload);
    if digest != header.sha256 {
        return Err(Error::ChecksumMismatch(format!(
            "payload sha256 {digest} does not match header {}",
            header.sha256
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    Ok((header, values))
}
