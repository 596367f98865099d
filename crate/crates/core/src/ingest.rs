//! Clip file parsing, validation and court-space projection.
//!
//! A clip is one UTF-8 JSON document with top-level keys `header`,
//! `frames`, `events` and `keyframe_annotations`. Pixel points are `[u, v]`
//! arrays, absent samples are `null`, frame indices are 0-based and
//! timestamps are derived as `index / fps`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::court::{reference_keypoints, CourtPoint};
use crate::error::{Error, Result};
use crate::kinematics::SpinType;
use crate::projection::{Calibration, Correspondence, Pixel};
use crate::scoring::{PlayerId, ScoreState};

fn default_fps() -> f64 {
    25.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Winner,
    ForcedError,
    UnforcedError,
    Ace,
    DoubleFault,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub winner: PlayerId,
    pub how: OutcomeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipHeader {
    pub clip_id: String,
    #[serde(default = "default_fps")]
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    pub court_keypoints_px: Vec<Option<Pixel>>,
    pub score_before: ScoreState,
    pub point_outcome: PointOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSample {
    pub id: PlayerId,
    pub foot_px: Option<Pixel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joints_px: Option<BTreeMap<String, Pixel>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSample {
    pub index: u32,
    #[serde(skip)]
    pub t: f64,
    pub ball_px: Option<Pixel>,
    #[serde(default)]
    pub players: Vec<PlayerSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Bounce,
    Contact,
    NetCord,
    PointStart,
    PointEnd,
}

impl EventKind {
    /// Kinds that anchor a ball keyframe.
    pub fn is_ball_event(self) -> bool {
        matches!(self, EventKind::Bounce | EventKind::Contact | EventKind::NetCord)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventAnnotation {
    pub frame: u32,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player_id: Option<PlayerId>,
    /// Outcome of the point, on `point_end` events of multi-point clips.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub how: Option<OutcomeKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyframeAnnotation {
    pub frame: u32,
    #[serde(default)]
    pub height_m: Option<f64>,
    #[serde(default)]
    pub spin: Option<SpinType>,
}

/// Raw document layout; [`Clip`] is the validated form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipDocument {
    pub header: ClipHeader,
    pub frames: Vec<FrameSample>,
    #[serde(default)]
    pub events: Vec<EventAnnotation>,
    #[serde(default)]
    pub keyframe_annotations: Vec<KeyframeAnnotation>,
}

/// One in-play point inside a clip, by inclusive frame range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpan {
    pub index: usize,
    pub start_frame: u32,
    pub end_frame: u32,
    pub outcome: PointOutcome,
}

/// A parsed and fully validated clip.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    pub header: ClipHeader,
    pub frames: Vec<FrameSample>,
    pub events: Vec<EventAnnotation>,
    pub keyframe_annotations: Vec<KeyframeAnnotation>,
    points: Vec<PointSpan>,
}

pub fn parse_clip(document: &str) -> Result<Clip> {
    let doc: ClipDocument = serde_json::from_str(document).map_err(Error::from_json)?;
    Clip::from_document(doc)
}

impl Clip {
    pub fn from_document(doc: ClipDocument) -> Result<Clip> {
        let ClipDocument {
            header,
            mut frames,
            mut events,
            keyframe_annotations,
        } = doc;
        validate_header(&header)?;

        if frames.is_empty() {
            return Err(Error::validation("frames must not be empty"));
        }
        for w in frames.windows(2) {
            if w[1].index != w[0].index + 1 {
                return Err(Error::validation("frames not consecutive"));
            }
        }
        for f in frames.iter_mut() {
            f.t = f64::from(f.index) / header.fps;
            if let Some(b) = f.ball_px {
                if !b.is_finite() {
                    return Err(Error::validation(format!("frames[{}].ball_px not finite", f.index)));
                }
            }
            let mut seen = BTreeSet::new();
            for p in &f.players {
                if !seen.insert(p.id) {
                    return Err(Error::validation(format!("frames[{}].players duplicate id {}", f.index, p.id)));
                }
                let joints_ok = p
                    .joints_px
                    .as_ref()
                    .is_none_or(|j| j.values().all(Pixel::is_finite));
                if !p.foot_px.is_none_or(|q| q.is_finite()) || !joints_ok {
                    return Err(Error::validation(format!("frames[{}].players not finite", f.index)));
                }
            }
        }
        let first = frames[0].index;
        let last = frames[frames.len() - 1].index;
        let in_range = |f: u32| f >= first && f <= last;

        events.sort_by_key(|e| (e.frame, event_order(e.kind)));
        for e in &events {
            if !in_range(e.frame) {
                return Err(Error::validation(format!("events frame {} outside clip range", e.frame)));
            }
            if e.kind == EventKind::Contact && e.player_id.is_none() {
                return Err(Error::validation(format!("events contact at frame {} lacks player_id", e.frame)));
            }
        }

        let mut kf_frames = BTreeSet::new();
        for k in &keyframe_annotations {
            if !in_range(k.frame) {
                return Err(Error::validation(format!(
                    "keyframe_annotations frame {} outside clip range",
                    k.frame
                )));
            }
            if let Some(h) = k.height_m {
                if !(h.is_finite() && h >= 0.0) {
                    return Err(Error::validation(format!("keyframe_annotations[{}].height_m must be ≥ 0", k.frame)));
                }
            }
            if !kf_frames.insert(k.frame) {
                return Err(Error::validation(format!("keyframe_annotations duplicate frame {}", k.frame)));
            }
        }
        for e in events.iter().filter(|e| e.kind == EventKind::Contact) {
            let ann = keyframe_annotations.iter().find(|k| k.frame == e.frame);
            match ann {
                Some(k) if k.spin.is_some() && k.height_m.is_some() => {}
                _ => {
                    return Err(Error::validation(format!(
                        "keyframe_annotations: contact at frame {} needs height_m and spin",
                        e.frame
                    )))
                }
            }
        }

        let points = point_spans(&header, &events, first, last)?;
        Ok(Clip {
            header,
            frames,
            events,
            keyframe_annotations,
            points,
        })
    }

    pub fn to_document(&self) -> ClipDocument {
        ClipDocument {
            header: self.header.clone(),
            frames: self.frames.clone(),
            events: self.events.clone(),
            keyframe_annotations: self.keyframe_annotations.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("clip serializes")
    }

    pub fn fps(&self) -> f64 {
        self.header.fps
    }

    pub fn first_index(&self) -> u32 {
        self.frames[0].index
    }

    pub fn last_index(&self) -> u32 {
        self.frames[self.frames.len() - 1].index
    }

    pub fn time_of(&self, frame: u32) -> f64 {
        f64::from(frame) / self.header.fps
    }

    /// Position of `frame` in [`Clip::frames`].
    pub fn offset_of(&self, frame: u32) -> usize {
        (frame - self.first_index()) as usize
    }

    pub fn span(&self) -> (f64, f64) {
        (self.time_of(self.first_index()), self.time_of(self.last_index()))
    }

    pub fn points(&self) -> &[PointSpan] {
        &self.points
    }

    pub fn keyframe_annotation(&self, frame: u32) -> Option<&KeyframeAnnotation> {
        self.keyframe_annotations.iter().find(|k| k.frame == frame)
    }

    pub fn correspondences(&self) -> Vec<Correspondence> {
        self.header
            .court_keypoints_px
            .iter()
            .zip(reference_keypoints())
            .filter_map(|(px, w)| px.map(|p| Correspondence::new(p, w)))
            .collect()
    }

    pub fn calibrate(&self, max_median_px: f64) -> Result<Calibration> {
        let pairs = self.correspondences();
        if pairs.len() < 4 {
            return Err(Error::Calibration {
                reason: format!("{} court keypoints present, need at least 4", pairs.len()),
                report: None,
            });
        }
        Calibration::from_pairs(&pairs, max_median_px)
    }
}

fn event_order(kind: EventKind) -> u8 {
    match kind {
        EventKind::PointEnd => 0,
        EventKind::PointStart => 1,
        _ => 2,
    }
}

fn validate_header(h: &ClipHeader) -> Result<()> {
    if !(h.fps.is_finite() && h.fps > 0.0) {
        return Err(Error::validation("header.fps must be > 0"));
    }
    if h.width == 0 || h.height == 0 {
        return Err(Error::validation("header.width and header.height must be > 0"));
    }
    if h.court_keypoints_px.len() != 14 {
        return Err(Error::validation(format!(
            "header.court_keypoints_px length must be 14, got {}",
            h.court_keypoints_px.len()
        )));
    }
    for (i, p) in h.court_keypoints_px.iter().enumerate() {
        if let Some(p) = p {
            let inside = p.is_finite()
                && (0.0..=f64::from(h.width)).contains(&p.u)
                && (0.0..=f64::from(h.height)).contains(&p.v);
            if !inside {
                return Err(Error::validation(format!(
                    "header.court_keypoints_px[{i}] outside the frame resolution"
                )));
            }
        }
    }
    h.score_before
        .validate()
        .map_err(|e| Error::validation(format!("header.score_before: {e}")))?;
    Ok(())
}

fn point_spans(header: &ClipHeader, events: &[EventAnnotation], first: u32, last: u32) -> Result<Vec<PointSpan>> {
    let markers: Vec<&EventAnnotation> = events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::PointStart | EventKind::PointEnd))
        .collect();
    if markers.is_empty() {
        return Ok(vec![PointSpan {
            index: 0,
            start_frame: first,
            end_frame: last,
            outcome: header.point_outcome,
        }]);
    }
    let mut spans = Vec::new();
    let mut open: Option<u32> = None;
    for m in &markers {
        match (m.kind, open) {
            (EventKind::PointStart, None) => open = Some(m.frame),
            (EventKind::PointEnd, Some(start)) => {
                if m.frame <= start {
                    return Err(Error::validation("events: point_end must follow point_start"));
                }
                spans.push((start, m.frame, m.player_id, m.how));
                open = None;
            }
            (EventKind::PointStart, Some(_)) => {
                return Err(Error::validation("events: point_start before previous point_end"))
            }
            _ => return Err(Error::validation("events: point_end without point_start")),
        }
    }
    if open.is_some() {
        return Err(Error::validation("events: point_start without point_end"));
    }
    let n = spans.len();
    let mut out = Vec::with_capacity(n);
    for (i, (s, e, winner, how)) in spans.into_iter().enumerate() {
        let outcome = match (winner, how) {
            (Some(winner), Some(how)) => PointOutcome { winner, how },
            _ if i + 1 == n => header.point_outcome,
            _ => {
                return Err(Error::validation(format!(
                    "events: point_end of point {i} needs player_id and how"
                )))
            }
        };
        out.push(PointSpan {
            index: i,
            start_frame: s,
            end_frame: e,
            outcome,
        });
    }
    for e in events.iter().filter(|e| e.kind.is_ball_event()) {
        if !out.iter().any(|p| e.frame >= p.start_frame && e.frame <= p.end_frame) {
            return Err(Error::validation(format!("events frame {} lies outside every point", e.frame)));
        }
    }
    Ok(out)
}

/// Planar court-space tracks: one entry per clip frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CourtTracks {
    pub first_index: u32,
    pub fps: f64,
    pub ball: Vec<Option<CourtPoint>>,
    pub players: BTreeMap<PlayerId, Vec<Option<CourtPoint>>>,
    pub events: Vec<EventAnnotation>,
    pub keyframe_annotations: Vec<KeyframeAnnotation>,
}

/// Maps every present ball and foot sample through the image → court
/// homography. Absent samples stay absent.
pub fn to_court_space(clip: &Clip, max_median_px: f64) -> Result<(Calibration, CourtTracks)> {
    let calib = clip.calibrate(max_median_px)?;
    let n = clip.frames.len();
    let mut ball = Vec::with_capacity(n);
    let mut players: BTreeMap<PlayerId, Vec<Option<CourtPoint>>> = BTreeMap::new();
    for id in clip
        .frames
        .iter()
        .flat_map(|f| f.players.iter().map(|p| p.id))
        .collect::<BTreeSet<_>>()
    {
        players.insert(id, vec![None; n]);
    }
    for (i, f) in clip.frames.iter().enumerate() {
        ball.push(f.ball_px.map(|p| calib.to_court(p)).transpose()?);
        for p in &f.players {
            if let Some(px) = p.foot_px {
                players.get_mut(&p.id).expect("id collected")[i] = Some(calib.to_court(px)?);
            }
        }
    }
    Ok((
        calib,
        CourtTracks {
            first_index: clip.first_index(),
            fps: clip.fps(),
            ball,
            players,
            events: clip.events.clone(),
            keyframe_annotations: clip.keyframe_annotations.clone(),
        },
    ))
}
