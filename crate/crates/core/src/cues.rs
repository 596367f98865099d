//! Embedded-visualization cue track: short-lived overlays bound to replays
//! and aggregate maps shown during analysis shots.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cine::{CameraTimeline, EntityRef, ReplaySpan, Span, Target};
use crate::court::CourtPoint;
use crate::error::{Error, Result};
use crate::ingest::EventKind;
use crate::metrics::EventRecord;
use crate::projection::Pixel;
use crate::scoring::{PlayerId, PointLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CueConfig {
    pub trail_window_s: f64,
    pub outline_s: f64,
    pub text_s: f64,
    pub heatmap_cell_m: f64,
    /// Where floating text hovers.
    pub text_anchor: CourtPoint,
}

impl Default for CueConfig {
    fn default() -> Self {
        Self {
            trail_window_s: 0.8,
            outline_s: 0.6,
            text_s: 2.0,
            heatmap_cell_m: 0.5,
            text_anchor: CourtPoint::new(0.0, 0.0, 3.0),
        }
    }
}

impl CueConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("trail_window_s", self.trail_window_s),
            ("outline_s", self.outline_s),
            ("text_s", self.text_s),
            ("heatmap_cell_m", self.heatmap_cell_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("cues.{name} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Player position histogram over the court and its run-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub cell_size_m: f64,
    /// Corner of cell (0, 0); cells grow toward +x (columns) and +y (rows).
    pub origin: CourtPoint,
    pub cols: usize,
    pub rows: usize,
    /// Row-major, normalized to sum 1.
    pub weights: Vec<f64>,
}

/// Grid extent: 18 m × 36 m, enough for players well behind the baselines.
const HEATMAP_ORIGIN: CourtPoint = CourtPoint::new(-9.0, -18.0, 0.0);
const HEATMAP_EXTENT_M: (f64, f64) = (18.0, 36.0);

impl HeatmapGrid {
    /// Bins planar samples; samples off the grid are dropped. `None` when no
    /// sample lands on the grid.
    pub fn from_samples(samples: &[CourtPoint], cell_size_m: f64) -> Option<HeatmapGrid> {
        let cols = (HEATMAP_EXTENT_M.0 / cell_size_m).ceil() as usize;
        let rows = (HEATMAP_EXTENT_M.1 / cell_size_m).ceil() as usize;
        let mut counts = vec![0u64; cols * rows];
        let mut total = 0u64;
        for p in samples {
            let c = ((p.x - HEATMAP_ORIGIN.x) / cell_size_m).floor();
            let r = ((p.y - HEATMAP_ORIGIN.y) / cell_size_m).floor();
            if c >= 0.0 && r >= 0.0 && (c as usize) < cols && (r as usize) < rows {
                counts[r as usize * cols + c as usize] += 1;
                total += 1;
            }
        }
        (total > 0).then(|| HeatmapGrid {
            cell_size_m,
            origin: HEATMAP_ORIGIN,
            cols,
            rows,
            weights: counts.iter().map(|&n| n as f64 / total as f64).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum CueContent {
    TrajectoryTrail { window_s: f64 },
    HighlightOutline { event: EventKind, event_t: f64 },
    JointAngle { player: PlayerId, joint: String, degrees: f64 },
    ServeDirection { polyline: Vec<CourtPoint> },
    FloatingText { text: String },
    ShotCount { count: u32 },
    StaticTrajectoryMap { polylines: Vec<Vec<CourtPoint>> },
    PositionHeatmap(HeatmapGrid),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VizCue {
    pub t_start: f64,
    pub t_end: f64,
    pub point_index: usize,
    pub anchor: Target,
    #[serde(flatten)]
    pub content: CueContent,
}

/// Joint triples: the angle at the middle joint between its two neighbours.
const SKELETON: [(&str, &str, &str); 4] = [
    ("elbow", "shoulder", "wrist"),
    ("knee", "hip", "ankle"),
    ("shoulder", "elbow", "hip"),
    ("hip", "shoulder", "knee"),
];

/// Interior angle at `joint` in degrees. Side prefixes (`left_`, `right_`)
/// carry over to the neighbouring joints.
pub fn joint_angle(joints: &BTreeMap<String, Pixel>, joint: &str) -> Result<f64> {
    let (side, base) = match joint.split_once('_') {
        Some((s @ ("left" | "right"), b)) => (format!("{s}_"), b),
        _ => (String::new(), joint),
    };
    let (_, a, b) = SKELETON
        .iter()
        .find(|(j, _, _)| *j == base)
        .ok_or_else(|| Error::DataUnavailable(format!("no adjacency known for joint {joint}")))?;
    let get = |name: &str| {
        joints
            .get(name)
            .copied()
            .ok_or_else(|| Error::DataUnavailable(format!("joint {name} missing")))
    };
    let c = get(joint)?;
    let pa = get(&format!("{side}{a}"))?;
    let pb = get(&format!("{side}{b}"))?;
    let (ux, uy) = (pa.u - c.u, pa.v - c.v);
    let (vx, vy) = (pb.u - c.u, pb.v - c.v);
    let nu = ux.hypot(uy);
    let nv = vx.hypot(vy);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::DataUnavailable(format!("degenerate segment at joint {joint}")));
    }
    let cos = ((ux * vx + uy * vy) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}

/// Pose of the contacting player at a contact, when tracked.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactPose {
    pub t: f64,
    pub player: PlayerId,
    pub joints: BTreeMap<String, Pixel>,
}

/// Inputs for one point's dynamic cues.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCues<'a> {
    pub index: usize,
    pub labels_before: &'a BTreeSet<PointLabel>,
    /// This point's event records in time order.
    pub records: &'a [EventRecord],
    pub poses: &'a [ContactPose],
    pub in_play: Span,
    pub out_of_play: Span,
}

const ELBOWS: [&str; 3] = ["right_elbow", "left_elbow", "elbow"];

fn clip(a: f64, b: f64, r: &ReplaySpan) -> Option<(f64, f64)> {
    let (a, b) = (a.max(r.t_start), b.min(r.t_end));
    (b > a).then_some((a, b))
}

/// Replay overlays plus floating score-context text for one point.
pub fn generate_dynamic_cues(point: &PointCues, timeline: &CameraTimeline, cfg: &CueConfig) -> Vec<VizCue> {
    let mut out = Vec::new();
    let replay = timeline.replays.iter().find(|r| r.point_index == point.index);
    let cue = |t_start, t_end, anchor, content| VizCue {
        t_start,
        t_end,
        point_index: point.index,
        anchor,
        content,
    };

    let intro = match replay {
        Some(r) => Span::new(r.t_start, r.t_end),
        None if !point.out_of_play.is_empty() => point.out_of_play,
        None => point.in_play,
    };
    if !intro.is_empty() {
        for label in point.labels_before {
            out.push(cue(
                intro.start,
                (intro.start + cfg.text_s).min(intro.end),
                Target::Point(cfg.text_anchor),
                CueContent::FloatingText {
                    text: label.text().to_string(),
                },
            ));
        }
    }

    let Some(r) = replay else { return out };
    out.push(cue(
        r.t_start,
        r.t_end,
        Target::Entity(EntityRef::Ball),
        CueContent::TrajectoryTrail {
            window_s: cfg.trail_window_s,
        },
    ));
    let shown: Vec<(&EventRecord, f64)> = point
        .records
        .iter()
        .filter_map(|rec| timeline.presentation_time(r, rec.t).map(|p| (rec, p)))
        .collect();
    let half = cfg.outline_s / 2.0;
    for (rec, p) in &shown {
        if !matches!(rec.kind, EventKind::Bounce | EventKind::Contact) {
            continue;
        }
        if let Some((a, b)) = clip(p - half, p + half, r) {
            out.push(cue(
                a,
                b,
                Target::Point(rec.position),
                CueContent::HighlightOutline {
                    event: rec.kind,
                    event_t: rec.t,
                },
            ));
        }
    }

    let contacts: Vec<&(&EventRecord, f64)> = shown.iter().filter(|(rec, _)| rec.kind == EventKind::Contact).collect();
    if let Some((serve, p)) = contacts.first() {
        let first_contact = point.records.iter().find(|rec| rec.kind == EventKind::Contact);
        let landing = shown
            .iter()
            .find(|(rec, _)| rec.kind == EventKind::Bounce && rec.t > serve.t);
        if let (Some(first), Some((bounce, pb))) = (first_contact, landing) {
            if first.t == serve.t {
                let flat = |q: &CourtPoint| CourtPoint::planar(q.x, q.y);
                if let Some((a, b)) = clip(*p, pb + cfg.outline_s, r) {
                    out.push(cue(
                        a,
                        b,
                        Target::Point(flat(&serve.position)),
                        CueContent::ServeDirection {
                            polyline: vec![flat(&serve.position), flat(&bounce.position)],
                        },
                    ));
                }
            }
        }
    }

    let before_replay = point
        .records
        .iter()
        .filter(|rec| rec.kind == EventKind::Contact && rec.t < r.source_start)
        .count() as u32;
    for (i, (rec, p)) in contacts.iter().enumerate() {
        let end = contacts.get(i + 1).map_or(r.t_end, |(_, q)| *q);
        if let Some((a, b)) = clip(*p, end, r) {
            out.push(cue(
                a,
                b,
                Target::Entity(rec.player_id.map_or(EntityRef::Ball, EntityRef::player)),
                CueContent::ShotCount {
                    count: before_replay + i as u32 + 1,
                },
            ));
        }
        let Some(player) = rec.player_id else { continue };
        let Some(pose) = point.poses.iter().find(|q| q.t == rec.t && q.player == player) else {
            continue;
        };
        let angle = ELBOWS
            .iter()
            .find_map(|j| joint_angle(&pose.joints, j).ok().map(|d| (*j, d)));
        if let (Some((joint, degrees)), Some((a, b))) = (angle, clip(p - half, p + half, r)) {
            out.push(cue(
                a,
                b,
                Target::Entity(EntityRef::player(player)),
                CueContent::JointAngle {
                    player,
                    joint: joint.to_string(),
                    degrees,
                },
            ));
        }
    }
    out
}

/// Aggregate trajectory map and position heatmap shown over `display`.
/// Trajectory polylines run contact → following bounces, one per shot.
pub fn generate_static_cues(
    records: &[EventRecord],
    player_samples: &[CourtPoint],
    display: Span,
    point_index: usize,
    cfg: &CueConfig,
) -> Vec<VizCue> {
    let mut out = Vec::new();
    if display.is_empty() {
        return out;
    }
    let mut polylines: Vec<Vec<CourtPoint>> = Vec::new();
    let mut last_point = None;
    for rec in records {
        let flat = CourtPoint::planar(rec.position.x, rec.position.y);
        let new_point = last_point != Some(rec.point_index);
        last_point = Some(rec.point_index);
        match rec.kind {
            EventKind::Contact => polylines.push(vec![flat]),
            _ if new_point || polylines.is_empty() => polylines.push(vec![flat]),
            _ => polylines.last_mut().expect("non-empty").push(flat),
        }
    }
    let court_centre = Target::Point(CourtPoint::default());
    if !polylines.is_empty() {
        out.push(VizCue {
            t_start: display.start,
            t_end: display.end,
            point_index,
            anchor: court_centre,
            content: CueContent::StaticTrajectoryMap { polylines },
        });
    }
    if let Some(grid) = HeatmapGrid::from_samples(player_samples, cfg.heatmap_cell_m) {
        out.push(VizCue {
            t_start: display.start,
            t_end: display.end,
            point_index,
            anchor: court_centre,
            content: CueContent::PositionHeatmap(grid),
        });
    }
    out
}
