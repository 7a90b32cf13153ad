//! Detection-stream model: clips, frames, detections, and tracks.
//!
//! A clip is the unit of processing: an ordered sequence of frames, each
//! carrying zero or more detections. Detections are axis-aligned boxes in
//! image coordinates (y grows downward) with a raw detector score, a class
//! label, an average optical flow in math convention (y grows upward), and
//! a hue in degrees.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Axis-aligned box in image coordinates: x1 < x2, y1 < y2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox(pub [f64; 4]);

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        BBox([x1, y1, x2, y2])
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    pub fn y1(&self) -> f64 {
        self.0[1]
    }
    pub fn x2(&self) -> f64 {
        self.0[2]
    }
    pub fn y2(&self) -> f64 {
        self.0[3]
    }

    /// Center point (image coordinates).
    pub fn center(&self) -> (f64, f64) {
        ((self.0[0] + self.0[2]) / 2.0, (self.0[1] + self.0[3]) / 2.0)
    }

    /// Intersection-over-union with another box.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix1 = self.x1().max(other.x1());
        let iy1 = self.y1().max(other.y1());
        let ix2 = self.x2().min(other.x2());
        let iy2 = self.y2().min(other.y2());
        let iw = (ix2 - ix1).max(0.0);
        let ih = (iy2 - iy1).max(0.0);
        let inter = iw * ih;
        let a = (self.x2() - self.x1()) * (self.y2() - self.y1());
        let b = (other.x2() - other.x1()) * (other.y2() - other.y1());
        let union = a + b - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    #[serde(rename = "box")]
    pub bbox: BBox,
    /// Raw detector strength; mapped through a sigmoid by the engine.
    pub score: f64,
    pub class: String,
    /// Average optical flow inside the box, math convention (y up).
    pub flow: [f64; 2],
    /// Hue in degrees, [0, 360).
    pub hue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frame {
    /// 1-based frame index; consecutive within a clip.
    pub index: u32,
    pub detections: Vec<Detection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clip {
    pub id: String,
    pub frame_rate: f64,
    pub frames: Vec<Frame>,
}

/// One detection index per frame of a clip (0-based into `frame.detections`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Track {
    pub clip_id: String,
    pub indices: Vec<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ClipError {
    #[error("clip JSON parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("clip `{id}` is invalid:\n{}", violations.join("\n"))]
    Invalid {
        id: String,
        violations: Vec<String>,
    },
    #[error("track has {track_len} entries but clip `{id}` has {frames} frames")]
    TrackLength {
        id: String,
        track_len: usize,
        frames: usize,
    },
    #[error("track index {index} out of range in frame {frame} of clip `{id}`")]
    TrackIndex {
        id: String,
        frame: u32,
        index: usize,
    },
}

impl Clip {
    /// Parse and fully validate a clip document.
    pub fn from_json(text: &str) -> Result<Clip, ClipError> {
        let clip: Clip = serde_json::from_str(text).map_err(|e| ClipError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        clip.validate()?;
        Ok(clip)
    }

    /// Serialize; `from_json(to_json(c))` reproduces `c` exactly because
    /// floats are emitted with round-trip precision.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("clip serialization cannot fail")
    }

    /// Check every structural invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<(), ClipError> {
        let mut violations = Vec::new();
        if self.id.is_empty() {
            violations.push("id must be nonempty".to_string());
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            violations.push(format!("frame_rate must be positive, got {}", self.frame_rate));
        }
        if self.frames.is_empty() {
            violations.push("clip must contain at least one frame".to_string());
        }
        for (i, frame) in self.frames.iter().enumerate() {
            let expect = i as u32 + 1;
            if frame.index != expect {
                violations.push(format!(
                    "frame {} has index {}, expected {} (indices are 1-based and consecutive)",
                    i, frame.index, expect
                ));
            }
            for (j, det) in frame.detections.iter().enumerate() {
                let at = format!("frame {} detection {}", expect, j);
                let b = &det.bbox.0;
                if !b.iter().all(|v| v.is_finite()) {
                    violations.push(format!("{at}: box coordinates must be finite"));
                } else {
                    if b[0] >= b[2] {
                        violations.push(format!("{at}: box needs x1 < x2, got {} .. {}", b[0], b[2]));
                    }
                    if b[1] >= b[3] {
                        violations.push(format!("{at}: box needs y1 < y2, got {} .. {}", b[1], b[3]));
                    }
                }
                if !det.score.is_finite() {
                    violations.push(format!("{at}: score must be finite"));
                }
                if !(det.flow[0].is_finite() && det.flow[1].is_finite()) {
                    violations.push(format!("{at}: flow must be finite"));
                }
                if !(det.hue.is_finite() && (0.0..360.0).contains(&det.hue)) {
                    violations.push(format!("{at}: hue must lie in [0, 360), got {}", det.hue));
                }
                if det.class.is_empty() {
                    violations.push(format!("{at}: class must be nonempty"));
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ClipError::Invalid {
                id: self.id.clone(),
                violations,
            })
        }
    }

    /// Keep the `k` highest-scoring detections per frame. Order among the
    /// kept detections is the original order; score ties keep the earlier
    /// detection.
    pub fn prune_top_k(&self, k: usize) -> Clip {
        let mut out = self.clone();
        for frame in &mut out.frames {
            let keep = top_k_indices(&frame.detections, k);
            if keep.len() < frame.detections.len() {
                frame.detections = keep.iter().map(|&i| frame.detections[i].clone()).collect();
            }
        }
        out
    }

    /// Resolve a track to its per-frame boxes.
    pub fn track_boxes(&self, track: &Track) -> Result<Vec<BBox>, ClipError> {
        if track.indices.len() != self.frames.len() {
            return Err(ClipError::TrackLength {
                id: self.id.clone(),
                track_len: track.indices.len(),
                frames: self.frames.len(),
            });
        }
        let mut boxes = Vec::with_capacity(self.frames.len());
        for (frame, &idx) in self.frames.iter().zip(&track.indices) {
            let det = frame.detections.get(idx).ok_or(ClipError::TrackIndex {
                id: self.id.clone(),
                frame: frame.index,
                index: idx,
            })?;
            boxes.push(det.bbox);
        }
        Ok(boxes)
    }
}

/// Indices of the `k` highest-scoring detections, in their original order.
/// Score ties keep the earlier detection. Returns all indices when the frame
/// has at most `k` detections.
pub fn top_k_indices(detections: &[Detection], k: usize) -> Vec<usize> {
    if detections.len() <= k {
        return (0..detections.len()).collect();
    }
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&a, &b| {
        detections[b]
            .score
            .partial_cmp(&detections[a].score)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut keep = order[..k].to_vec();
    keep.sort_unstable();
    keep
}
