//! JSON input files.
//!
//! A file describes a fusion frame by spanning vectors and weights, and may
//! carry local frames and a dual section. Real entries are plain numbers,
//! complex entries are `[re, im]` pairs.
//!
//! ```json
//! {
//!   "field": "real",
//!   "dimension": 3,
//!   "subspaces": [{ "spanning_vectors": [[0, 1, 0], [0, 0, 1]] }],
//!   "weights": [1.0]
//! }
//! ```
//!
//! Dual `q_blocks[j][i]` is the ambient `d × d` matrix (row-major, `null` for
//! zero) of the map `W_i → V_j`; only its action on `W_i` matters.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::duality::BlockOp;
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::fusion::FusionFrame;
use crate::linalg::{span, Field, Mat, C64, RANK_TOL};
use crate::systems::FusionFrameSystem;

/// Tolerance for local frame vectors lying in their subspace.
pub const CONTAINMENT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([a, b]) => C64::new(a, b),
        }
    }

    fn from_value(z: C64, field: Field) -> Self {
        match field {
            Field::Real => Scalar::Real(z.re),
            Field::Complex if z.im == 0.0 => Scalar::Real(z.re),
            Field::Complex => Scalar::Complex([z.re, z.im]),
        }
    }
}

pub type VectorSpec = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub spanning_vectors: Vec<VectorSpec>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspaces: Option<Vec<SubspaceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_blocks: Option<Vec<Vec<Option<Vec<VectorSpec>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_frames: Option<Vec<Vec<VectorSpec>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub field: Field,
    pub dimension: usize,
    pub subspaces: Vec<SubspaceSpec>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_frames: Option<Vec<Vec<VectorSpec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualSpec>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl InputSpec {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: InputSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("input specs always serialize")
    }

    /// Describes a fusion frame by its orthonormal bases.
    pub fn from_fusion_frame(ff: &FusionFrame, field: Field) -> Self {
        Self {
            name: None,
            field,
            dimension: ff.ambient_dim(),
            subspaces: ff.subspaces().iter().map(|s| subspace_spec(s.basis(), field)).collect(),
            weights: ff.weights().to_vec(),
            local_frames: None,
            dual: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if self.subspaces.is_empty() {
            return Err(invalid("at least one subspace is required"));
        }
        let m = self.subspaces.len();
        self.check_subspaces("subspaces", &self.subspaces)?;
        check_weights("weights", &self.weights, m)?;
        if let Some(frames) = &self.local_frames {
            self.check_frames("local_frames", frames, m)?;
        }
        if let Some(dual) = &self.dual {
            let mv = dual.subspaces.as_ref().map_or(m, Vec::len);
            if let Some(subs) = &dual.subspaces {
                self.check_subspaces("dual.subspaces", subs)?;
            }
            if let Some(w) = &dual.weights {
                check_weights("dual.weights", w, mv)?;
            }
            if let Some(frames) = &dual.local_frames {
                if self.local_frames.is_none() {
                    return Err(invalid("dual.local_frames requires local_frames"));
                }
                self.check_frames("dual.local_frames", frames, mv)?;
            }
            if let Some(q) = &dual.q_blocks {
                if dual.subspaces.is_none() {
                    return Err(invalid("dual.q_blocks requires dual.subspaces"));
                }
                if q.len() != mv {
                    return Err(invalid(format!(
                        "dual.q_blocks has {} block rows, expected {mv}",
                        q.len()
                    )));
                }
                for (j, row) in q.iter().enumerate() {
                    if row.len() != m {
                        return Err(invalid(format!(
                            "dual.q_blocks[{j}] has {} blocks, expected {m}",
                            row.len()
                        )));
                    }
                    for (i, block) in row.iter().enumerate() {
                        if let Some(rows) = block {
                            let at = format!("dual.q_blocks[{j}][{i}]");
                            if rows.len() != d {
                                return Err(invalid(format!("{at} has {} rows, expected {d}", rows.len())));
                            }
                            for r in rows {
                                self.check_vector(&at, r)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_vector(&self, at: &str, v: &[Scalar]) -> Result<()> {
        if v.len() != self.dimension {
            return Err(invalid(format!(
                "{at}: vector of length {}, expected {}",
                v.len(),
                self.dimension
            )));
        }
        for s in v {
            let z = s.value();
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(invalid(format!("{at}: non-finite entry")));
            }
            if self.field == Field::Real && z.im != 0.0 {
                return Err(invalid(format!("{at}: complex entry in a real input")));
            }
        }
        Ok(())
    }

    fn check_subspaces(&self, at: &str, subs: &[SubspaceSpec]) -> Result<()> {
        for (i, s) in subs.iter().enumerate() {
            for v in &s.spanning_vectors {
                self.check_vector(&format!("{at}[{i}]"), v)?;
            }
        }
        Ok(())
    }

    fn check_frames(&self, at: &str, frames: &[Vec<VectorSpec>], m: usize) -> Result<()> {
        if frames.len() != m {
            return Err(invalid(format!("{at} has {} frames, expected {m}", frames.len())));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.is_empty() {
                return Err(invalid(format!("{at}[{i}] is empty")));
            }
            for v in f {
                self.check_vector(&format!("{at}[{i}]"), v)?;
            }
        }
        Ok(())
    }

    fn columns(&self, vectors: &[VectorSpec]) -> Mat {
        Mat::from_fn(self.dimension, vectors.len(), |r, c| vectors[c][r].value())
    }

    fn fusion_frame_of(&self, subs: &[SubspaceSpec], weights: Vec<f64>) -> Result<FusionFrame> {
        let subspaces = subs
            .iter()
            .map(|s| span(&self.columns(&s.spanning_vectors), RANK_TOL))
            .collect();
        FusionFrame::with_ambient_dim(self.dimension, subspaces, weights)
    }

    pub fn fusion_frame(&self) -> Result<FusionFrame> {
        self.fusion_frame_of(&self.subspaces, self.weights.clone())
    }

    fn frames(&self, frames: &[Vec<VectorSpec>]) -> Vec<Frame> {
        frames
            .iter()
            .map(|f| Frame::from_matrix(self.dimension, self.columns(f)))
            .collect()
    }

    /// The fusion frame system, when local frames are given.
    pub fn system(&self) -> Result<Option<FusionFrameSystem>> {
        let Some(frames) = &self.local_frames else {
            return Ok(None);
        };
        FusionFrameSystem::new(self.fusion_frame()?, self.frames(frames), CONTAINMENT_TOL).map(Some)
    }

    /// Dual weights, when given.
    pub fn dual_weights(&self) -> Option<&[f64]> {
        self.dual.as_ref().and_then(|d| d.weights.as_deref())
    }

    /// The dual fusion frame: explicit subspaces, or spans of the dual local frames.
    pub fn dual_fusion_frame(&self) -> Result<Option<FusionFrame>> {
        let Some(dual) = &self.dual else {
            return Ok(None);
        };
        let count = dual
            .subspaces
            .as_ref()
            .map(Vec::len)
            .or(dual.local_frames.as_ref().map(Vec::len));
        let Some(count) = count else {
            return Ok(None);
        };
        let weights = dual.weights.clone().unwrap_or_else(|| vec![1.0; count]);
        if let Some(subs) = &dual.subspaces {
            return self.fusion_frame_of(subs, weights).map(Some);
        }
        let frames = dual.local_frames.as_ref().expect("count came from local frames");
        let subspaces = self
            .frames(frames)
            .iter()
            .map(|g| span(g.vectors(), RANK_TOL))
            .collect();
        FusionFrame::with_ambient_dim(self.dimension, subspaces, weights).map(Some)
    }

    /// The dual fusion frame system, when dual local frames are given.
    pub fn dual_system(&self) -> Result<Option<FusionFrameSystem>> {
        let Some(frames) = self.dual.as_ref().and_then(|d| d.local_frames.as_ref()) else {
            return Ok(None);
        };
        let ff = self
            .dual_fusion_frame()?
            .expect("dual local frames define a dual fusion frame");
        FusionFrameSystem::new(ff, self.frames(frames), CONTAINMENT_TOL).map(Some)
    }

    /// `Q` in block coordinates, `Q_{ji} = C_j^* Q̂_{ji} B_i`.
    pub fn dual_q(&self, w: &FusionFrame, v: &FusionFrame) -> Result<Option<BlockOp>> {
        let Some(blocks) = self.dual.as_ref().and_then(|d| d.q_blocks.as_ref()) else {
            return Ok(None);
        };
        let mut q = BlockOp::zeros(&v.dims(), &w.dims());
        for (j, row) in blocks.iter().enumerate() {
            for (i, block) in row.iter().enumerate() {
                if let Some(rows) = block {
                    let amb = Mat::from_fn(self.dimension, self.dimension, |r, c| rows[r][c].value());
                    let coords = v.subspace(j).basis().adjoint() * amb * w.subspace(i).basis();
                    q.set_block(j, i, &coords)?;
                }
            }
        }
        Ok(Some(q))
    }
}

fn check_weights(at: &str, weights: &[f64], m: usize) -> Result<()> {
    if weights.len() != m {
        return Err(invalid(format!("{at} has {} entries, expected {m}", weights.len())));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(invalid(format!("{at}[{i}] = {w} is not a positive number")));
    }
    Ok(())
}

fn subspace_spec(basis: &Mat, field: Field) -> SubspaceSpec {
    SubspaceSpec {
        spanning_vectors: basis
            .column_iter()
            .map(|c| c.iter().map(|&z| Scalar::from_value(z, field)).collect())
            .collect(),
    }
}
