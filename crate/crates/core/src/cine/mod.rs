//! Camera planning: point categories, shot grammar and the compiled camera
//! timeline.

mod rig;
mod timeline;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::court::{CourtPoint, SERVICE_LINE_Y_M};
use crate::error::{Error, Result};
use crate::ingest::{EventKind, OutcomeKind, PointOutcome};
use crate::scoring::{PlayerId, PointLabel};

pub use rig::{AnchorPose, CinematographyConfig, FieldOfView, FollowOffset, RigTable};
pub use timeline::{
    compile_camera_timeline, evaluate_camera_pose, plan_time_warp, presentation_length, smooth_step, CameraKeyframe,
    CameraPose, CameraTimeline, Easing, LookAt, Orbit, ReplaySpan, SceneQuery, WarpWindow,
};

/// Narrative category of a point, in replay priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCategory {
    Action,
    Tactic,
    Emotion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotSize {
    Wide,
    Medium,
    CloseUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Baseline,
    Sideline,
    Corner,
    BirdsEye,
    NetCam,
    FollowCam,
    CourtLevel,
    JudgeView,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CameraMotion {
    Static,
    Dolly,
    Truck,
    Pedestal,
    Tracking,
    Arc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityRef {
    Ball,
    P1,
    P2,
}

impl EntityRef {
    pub fn player(p: PlayerId) -> Self {
        match p {
            PlayerId::P1 => EntityRef::P1,
            PlayerId::P2 => EntityRef::P2,
        }
    }

    pub fn player_id(self) -> Option<PlayerId> {
        match self {
            EntityRef::Ball => None,
            EntityRef::P1 => Some(PlayerId::P1),
            EntityRef::P2 => Some(PlayerId::P2),
        }
    }

    /// Height above an entity's tracked position that cameras aim at.
    pub fn aim_height(self) -> f64 {
        match self {
            EntityRef::Ball => 0.0,
            EntityRef::P1 | EntityRef::P2 => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Entity(EntityRef),
    Point(CourtPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotRole {
    Live,
    Replay,
    Analysis,
    Reaction,
    Atmosphere,
    Filler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotSpec {
    pub size: ShotSize,
    pub anchor: Anchor,
    pub motion: CameraMotion,
    pub duration: f64,
    pub target: Target,
    /// Signed travel in metres for Dolly/Truck/Pedestal, sweep in degrees
    /// for Arc; unused otherwise. An upper bound: compilation may shrink it
    /// to respect the speed caps within the shot.
    pub amplitude: f64,
    pub role: ShotRole,
}

impl ShotSpec {
    pub fn is_moving(&self) -> bool {
        self.motion != CameraMotion::Static
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Planning(format!("shot duration must be > 0, got {}", self.duration)));
        }
        if self.motion == CameraMotion::Tracking && !matches!(self.target, Target::Entity(_)) {
            return Err(Error::Planning("tracking shots need an entity target".into()));
        }
        if self.anchor == Anchor::FollowCam && !matches!(self.target, Target::Entity(EntityRef::P1 | EntityRef::P2)) {
            return Err(Error::Planning("follow-cam shots need a player target".into()));
        }
        Ok(())
    }
}

/// A shot placed on the presentation time line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannedShot {
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_index: Option<usize>,
    pub spec: ShotSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub start: f64,
    pub end: f64,
}

impl Span {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> f64 {
        (self.end - self.start).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= 0.0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// Everything the planner needs to know about one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub index: usize,
    pub outcome: Option<PointOutcome>,
    /// Number of contacts (the rally length in shots).
    pub shots: usize,
    pub net_approach: bool,
    pub labels_before: BTreeSet<PointLabel>,
    pub decided_game: bool,
    pub decided_set: bool,
    pub in_play: Span,
    pub out_of_play: Span,
    /// Span covered by the reconstructed ball trajectory.
    pub ball_span: Option<Span>,
    /// Ball events (bounce, contact, net cord) in clip time.
    pub events: Vec<(f64, EventKind)>,
    /// Where analysis shots look: the centroid of the point's bounces.
    pub focus: CourtPoint,
}

/// A contact inside the service boxes counts as a net approach.
pub fn is_net_approach(contact: &CourtPoint) -> bool {
    contact.y.abs() <= SERVICE_LINE_Y_M
}

pub fn classify_point_category(point: &PointSummary, cfg: &CinematographyConfig) -> Result<Vec<EventCategory>> {
    let outcome = point
        .outcome
        .ok_or_else(|| Error::validation(format!("point {} has no outcome", point.index)))?;
    let mut cats = Vec::new();
    if matches!(outcome.how, OutcomeKind::Winner | OutcomeKind::Ace) || point.net_approach {
        cats.push(EventCategory::Action);
    }
    if point.shots >= cfg.tactic_min_shots || outcome.how == OutcomeKind::ForcedError {
        cats.push(EventCategory::Tactic);
    }
    if !point.labels_before.is_empty() || point.decided_game || point.decided_set || cats.is_empty() {
        cats.push(EventCategory::Emotion);
    }
    Ok(cats)
}

/// The replay of one point: which clip span is replayed, where it sits on
/// the presentation time line, and its slow-motion windows (clip time).
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayPlan {
    pub point_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub source: Span,
    pub windows: Vec<WarpWindow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointPlan {
    pub categories: Vec<EventCategory>,
    pub shots: Vec<PlannedShot>,
    pub replay: Option<ReplayPlan>,
}

impl PointPlan {
    pub fn motion_count(&self) -> usize {
        self.shots.iter().filter(|s| s.spec.is_moving()).count()
    }
}

/// Lays shots out back to back over `span`. A shot with no desired
/// duration fills what is left; slivers shorter than `min` are absorbed
/// by the preceding shot.
fn lay_out(span: Span, wanted: &[(ShotSpec, Option<f64>)], min: f64, point: usize) -> Vec<PlannedShot> {
    let mut out: Vec<PlannedShot> = Vec::new();
    let mut cursor = span.start;
    for (spec, want) in wanted {
        let remaining = span.end - cursor;
        if remaining <= 0.0 {
            break;
        }
        if remaining < min && !out.is_empty() {
            break;
        }
        let mut d = want.unwrap_or(remaining).min(remaining);
        if remaining - d < min {
            d = remaining;
        }
        let t_end = if d >= remaining { span.end } else { cursor + d };
        out.push(PlannedShot {
            t_start: cursor,
            t_end,
            point_index: Some(point),
            spec: ShotSpec {
                duration: t_end - cursor,
                ..*spec
            },
        });
        cursor = t_end;
    }
    if let Some(last) = out.last_mut() {
        last.t_end = span.end;
        last.spec.duration = last.t_end - last.t_start;
    }
    out
}

/// Plans the live shot and the out-of-play coverage of one point.
pub fn plan_point_shots(
    point: &PointSummary,
    categories: &[EventCategory],
    winner: PlayerId,
    cfg: &CinematographyConfig,
) -> Result<PointPlan> {
    let Some(&top) = categories.iter().min() else {
        return Err(Error::Planning(format!("point {} has no category", point.index)));
    };
    let rig = &cfg.rig;
    let fixed = |size, anchor, role, look: CourtPoint| ShotSpec {
        size,
        anchor,
        motion: CameraMotion::Static,
        duration: 1.0,
        target: Target::Point(look),
        amplitude: 0.0,
        role,
    };
    let mut shots = Vec::new();
    if !point.in_play.is_empty() {
        shots.push(PlannedShot {
            t_start: point.in_play.start,
            t_end: point.in_play.end,
            point_index: Some(point.index),
            spec: ShotSpec {
                duration: point.in_play.len(),
                ..fixed(ShotSize::Medium, Anchor::Baseline, ShotRole::Live, rig.baseline.look_at)
            },
        });
    }
    let out = point.out_of_play;
    if out.is_empty() {
        return Ok(PointPlan {
            categories: categories.to_vec(),
            shots,
            replay: None,
        });
    }

    let reaction = ShotSpec {
        size: ShotSize::CloseUp,
        anchor: Anchor::FollowCam,
        motion: CameraMotion::Tracking,
        duration: cfg.reaction_s,
        target: Target::Entity(EntityRef::player(winner)),
        amplitude: 0.0,
        role: ShotRole::Reaction,
    };
    let with_emotion = categories.contains(&EventCategory::Emotion);
    let mut replay = None;
    let mut wanted: Vec<(ShotSpec, Option<f64>)> = Vec::new();
    match top {
        EventCategory::Action | EventCategory::Tactic => {
            let source = match point.ball_span {
                Some(b) => Span::new(
                    (b.start - cfg.replay_lead_s).max(point.in_play.start),
                    (b.end + cfg.replay_tail_s).min(point.in_play.end),
                ),
                None => point.in_play,
            };
            let windows = plan_time_warp(
                &point.events,
                source,
                cfg.slow_motion_extent_s,
                cfg.slow_motion_factor,
            );
            let length = presentation_length(source, &windows);
            let shown = length.min(out.len());
            replay = Some(ReplayPlan {
                point_index: point.index,
                t_start: out.start,
                t_end: if shown >= out.len() { out.end } else { out.start + shown },
                source,
                windows,
            });
            if top == EventCategory::Action {
                let anchor = if point.net_approach { Anchor::NetCam } else { Anchor::Corner };
                let look = rig.pose(anchor).expect("fixed anchor").look_at;
                wanted.push((fixed(ShotSize::Medium, anchor, ShotRole::Replay, look), Some(shown)));
                if with_emotion && out.len() - shown >= cfg.min_shot_s {
                    wanted.push((reaction, None));
                }
            } else {
                let arc = ShotSpec {
                    motion: CameraMotion::Arc,
                    target: Target::Point(point.focus),
                    amplitude: cfg.arc_deg,
                    ..fixed(ShotSize::Wide, Anchor::BirdsEye, ShotRole::Replay, point.focus)
                };
                wanted.push((arc, Some(shown)));
                let analysis = fixed(ShotSize::Wide, Anchor::BirdsEye, ShotRole::Analysis, rig.birds_eye.look_at);
                if with_emotion {
                    wanted.push((analysis, Some(cfg.analysis_hold_s)));
                    wanted.push((reaction, None));
                } else {
                    wanted.push((analysis, None));
                }
            }
        }
        EventCategory::Emotion => {
            wanted.push((reaction, Some(cfg.reaction_s)));
            let pull_back = ShotSpec {
                motion: CameraMotion::Dolly,
                amplitude: -cfg.dolly_distance_m,
                ..fixed(ShotSize::Wide, Anchor::Baseline, ShotRole::Atmosphere, rig.baseline.look_at)
            };
            wanted.push((pull_back, None));
        }
    }
    shots.extend(lay_out(out, &wanted, cfg.min_shot_s, point.index));
    let plan = PointPlan {
        categories: categories.to_vec(),
        shots,
        replay,
    };
    if plan.motion_count() > cfg.max_motions_per_point {
        return Err(Error::Planning(format!(
            "point {} plans {} camera motions, limit {}",
            point.index,
            plan.motion_count(),
            cfg.max_motions_per_point
        )));
    }
    Ok(plan)
}
