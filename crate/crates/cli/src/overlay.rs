//! Per-frame SVG overlays for decoded sentence tracks.
//!
//! One vector drawing per frame: every detection as a faint outline, the
//! decoded participant boxes stroked in their role color with a label.
//! SVG keeps the artifact free of image codecs and easy to eyeball in a
//! browser.

use std::path::Path;

use anyhow::Result;

use sentrack_core::clip::Clip;
use sentrack_core::lattice::SentenceTrackResult;
use sentrack_core::lexicon::Role;

use crate::io;

/// Stroke color per role: agent red, patient blue, source violet, goal
/// turquoise, referent green.
pub fn role_color(role: Role) -> &'static str {
    match role {
        Role::Agent => "#d62728",
        Role::Patient => "#1f77b4",
        Role::Source => "#9467bd",
        Role::Goal => "#17becf",
        Role::Referent => "#2ca02c",
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write one `frame_NNNN.svg` per frame under `dir`; returns the number
/// of files written. Participant boxes come from the decoded tracks, so
/// an unsatisfiable result draws detections only.
pub fn write_overlays(dir: &Path, clip: &Clip, result: &SentenceTrackResult) -> Result<usize> {
    let mut width = 640.0f64;
    let mut height = 480.0f64;
    for frame in &clip.frames {
        for det in &frame.detections {
            width = width.max(det.bbox.x2() + 16.0);
            height = height.max(det.bbox.y2() + 16.0);
        }
    }
    for (t, frame) in clip.frames.iter().enumerate() {
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
             viewBox=\"0 0 {width:.0} {height:.0}\">\n"
        ));
        svg.push_str(&format!(
            "  <title>{} — frame {}</title>\n",
            xml_escape(&result.sentence),
            frame.index
        ));
        svg.push_str(&format!(
            "  <rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#fafafa\"/>\n"
        ));
        for det in &frame.detections {
            svg.push_str(&format!(
                "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
                 fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
                det.bbox.x1(),
                det.bbox.y1(),
                det.bbox.x2() - det.bbox.x1(),
                det.bbox.y2() - det.bbox.y1(),
            ));
        }
        for pt in &result.tracks {
            let idx = pt.track.indices[t];
            let b = &frame.detections[idx].bbox;
            let color = role_color(pt.role);
            svg.push_str(&format!(
                "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
                 fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
                b.x1(),
                b.y1(),
                b.x2() - b.x1(),
                b.y2() - b.y1(),
            ));
            svg.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" \
                 font-size=\"13\" fill=\"{color}\">{}</text>\n",
                b.x1(),
                (b.y1() - 4.0).max(12.0),
                pt.role.name(),
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"8\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"#555555\">frame {}</text>\n",
            height - 8.0,
            frame.index
        ));
        svg.push_str("</svg>\n");
        io::write_text(&dir.join(format!("frame_{:04}.svg", frame.index)), &svg)?;
    }
    Ok(clip.frames.len())
}
