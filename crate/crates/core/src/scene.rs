//! The reconstruction pipeline and its export document.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cine::{
    classify_point_category, compile_camera_timeline, is_net_approach, plan_point_shots, Anchor, CameraMotion,
    CameraTimeline, EntityRef, EventCategory, PlannedShot, PointSummary, ReplayPlan, SceneQuery, ShotRole, ShotSize,
    ShotSpec, Span, Target,
};
use crate::config::PipelineConfig;
use crate::court::{reference_keypoints, CourtModel, CourtPoint};
use crate::cues::{generate_dynamic_cues, generate_static_cues, ContactPose, PointCues, VizCue};
use crate::error::{Error, Result};
use crate::ingest::{to_court_space, Clip, EventAnnotation, EventKind, PointOutcome, PointSpan};
use crate::kinematics::{assemble_ball_trajectory, BallKeyframe, BallTrajectory3D, KeyframeKind};
use crate::metrics::{
    build_score_timeline, compute_zone_metrics, log_zone_events, EventRecord, MetricsWindow, PointEvent, ScoreEntry,
    ZoneMetrics,
};
use crate::projection::{Calibration, Homography, ReprojectionReport};
use crate::refine::{fill_gaps_knn, smooth_moving_average, stabilize_resolution, validate_ball_planar};
use crate::scoring::PlayerId;

pub const FORMAT_VERSION: u32 = 1;

/// How the broadcast view was calibrated against the court.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub keypoints: Vec<CourtPoint>,
    pub world_to_image: Homography,
    pub reprojection: ReprojectionReport,
}

impl CalibrationSummary {
    fn new(calib: &Calibration) -> Self {
        Self {
            keypoints: reference_keypoints().to_vec(),
            world_to_image: calib.world_to_image,
            reprojection: calib.report.clone(),
        }
    }
}

/// Entity positions sampled on one shared time base `times`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityTracks {
    pub sample_rate_hz: f64,
    pub times: Vec<f64>,
    pub ball: Vec<Option<CourtPoint>>,
    pub players: BTreeMap<PlayerId, Vec<Option<CourtPoint>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePoint {
    pub index: usize,
    pub in_play: Span,
    pub out_of_play: Span,
    pub outcome: PointOutcome,
    pub categories: Vec<EventCategory>,
    pub shots: usize,
    pub net_approach: bool,
    pub trajectory: Option<BallTrajectory3D>,
}

/// The exported scene: everything a renderer needs, in clip time unless a
/// field says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTimeline {
    pub format_version: u32,
    pub clip_id: String,
    pub fps: f64,
    pub span: Span,
    pub court: CourtModel,
    pub calibration: CalibrationSummary,
    pub tracks: EntityTracks,
    pub points: Vec<ScenePoint>,
    pub events: Vec<EventRecord>,
    pub score_timeline: Vec<ScoreEntry>,
    /// Per point, the match and current-game windows.
    pub metrics: Vec<ZoneMetrics>,
    pub shots: Vec<PlannedShot>,
    pub camera: CameraTimeline,
    pub cues: Vec<VizCue>,
    pub warnings: Vec<String>,
}

impl SceneTimeline {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from_json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scene serializes")
    }

    pub fn trajectory(&self, point_index: usize) -> Option<&BallTrajectory3D> {
        self.points.get(point_index)?.trajectory.as_ref()
    }

    /// Player position at `t`, linearly interpolated between samples.
    pub fn player_position(&self, id: PlayerId, t: f64) -> Option<CourtPoint> {
        let series = self.tracks.players.get(&id)?;
        interpolate(series, *self.tracks.times.first()?, self.tracks.sample_rate_hz, t)
    }

    pub fn ball_position(&self, t: f64) -> Option<CourtPoint> {
        ball_at(self.points.iter().filter_map(|p| p.trajectory.as_ref()), t)
    }

    pub fn metrics_for(&self, window: MetricsWindow, point_index: usize) -> Option<&ZoneMetrics> {
        self.metrics
            .iter()
            .find(|m| m.window == window && m.point_index == point_index)
    }
}

impl SceneQuery for SceneTimeline {
    fn entity_position(&self, entity: EntityRef, t: f64) -> Option<CourtPoint> {
        match entity.player_id() {
            Some(id) => self.player_position(id, t),
            None => self.ball_position(t),
        }
    }
}

fn ball_at<'a>(mut trajectories: impl Iterator<Item = &'a BallTrajectory3D>, t: f64) -> Option<CourtPoint> {
    trajectories.find_map(|tr| tr.position_at(t))
}

/// Value of a uniformly sampled series at `t`; times within 1e-6 samples of a
/// grid point return that sample exactly.
fn interpolate(series: &[Option<CourtPoint>], t0: f64, rate: f64, t: f64) -> Option<CourtPoint> {
    let n = series.len();
    let u = (t - t0) * rate;
    let r = u.round();
    if (u - r).abs() <= 1e-6 {
        return if r < 0.0 || r as usize >= n { None } else { series[r as usize] };
    }
    if u < 0.0 || u > (n - 1) as f64 {
        return None;
    }
    let i = u.floor() as usize;
    Some(series[i]?.lerp(&series[i + 1]?, u - i as f64))
}

/// Frame-rate tracks used while the scene is being assembled.
struct FrameTracks<'a> {
    t0: f64,
    fps: f64,
    players: &'a BTreeMap<PlayerId, Vec<Option<CourtPoint>>>,
    trajectories: &'a [Option<BallTrajectory3D>],
}

impl SceneQuery for FrameTracks<'_> {
    fn entity_position(&self, entity: EntityRef, t: f64) -> Option<CourtPoint> {
        match entity.player_id() {
            Some(id) => interpolate(self.players.get(&id)?, self.t0, self.fps, t),
            None => ball_at(self.trajectories.iter().flatten(), t),
        }
    }
}

/// Inclusive frame-offset ranges refined independently: every point and
/// every stretch between points.
fn refinement_segments(points: &[PointSpan], first: u32, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut cursor = 0usize;
    for p in points {
        let (s, e) = ((p.start_frame - first) as usize, (p.end_frame - first) as usize);
        if s > cursor {
            out.push((cursor, s - 1));
        }
        out.push((s, e));
        cursor = e + 1;
    }
    if cursor < n {
        out.push((cursor, n - 1));
    }
    out
}

fn refine_player(
    series: &[Option<CourtPoint>],
    segments: &[(usize, usize)],
    calib: &Calibration,
    cfg: &PipelineConfig,
) -> Result<Vec<Option<CourtPoint>>> {
    let r = &cfg.refinement;
    let mut out = vec![None; series.len()];
    for &(a, b) in segments {
        let part = &series[a..=b];
        let present = part.iter().filter(|p| p.is_some()).count();
        if present == 0 {
            continue;
        }
        let filled = fill_gaps_knn(part, r.knn_k.min(present))?;
        let smooth = smooth_moving_average(&filled, r.ma_window)?;
        let stable = stabilize_resolution(&smooth, calib, r.stabilization_deadband_px)?;
        for (slot, p) in out[a..=b].iter_mut().zip(stable) {
            *slot = Some(p);
        }
    }
    Ok(out)
}

/// Refined ball keyframes of one point, or `None` when the point has fewer
/// than two keyframes or no ball samples.
fn ball_keyframes(
    clip: &Clip,
    point: &PointSpan,
    ball: &[Option<CourtPoint>],
    players: &BTreeMap<PlayerId, Vec<Option<CourtPoint>>>,
    cfg: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Result<Option<Vec<BallKeyframe>>> {
    let inside = |f: u32| f >= point.start_frame && f <= point.end_frame;
    let events: Vec<EventAnnotation> = clip
        .events
        .iter()
        .filter(|e| e.kind.is_ball_event() && inside(e.frame))
        .copied()
        .collect();
    let mut kinds: BTreeMap<u32, (KeyframeKind, Option<PlayerId>)> = BTreeMap::new();
    for e in &events {
        let kind = match e.kind {
            EventKind::Contact => KeyframeKind::Contact,
            EventKind::Bounce => KeyframeKind::Bounce,
            _ => KeyframeKind::NetCord,
        };
        let rank = |k: KeyframeKind| match k {
            KeyframeKind::Contact => 0,
            KeyframeKind::Bounce => 1,
            _ => 2,
        };
        let slot = kinds.entry(e.frame).or_insert((kind, e.player_id));
        if rank(kind) < rank(slot.0) {
            *slot = (kind, e.player_id);
        }
    }
    for k in clip.keyframe_annotations.iter().filter(|k| inside(k.frame)) {
        kinds.entry(k.frame).or_insert((KeyframeKind::Annotated, None));
    }
    if kinds.len() < 2 {
        if !events.is_empty() {
            warnings.push(format!("point {}: fewer than 2 ball keyframes, no trajectory", point.index));
        }
        return Ok(None);
    }
    let first = clip.first_index();
    let (a, b) = (*kinds.keys().next().expect("non-empty"), *kinds.keys().last().expect("non-empty"));
    let (oa, ob) = ((a - first) as usize, (b - first) as usize);
    let part = &ball[oa..=ob];
    let present = part.iter().filter(|p| p.is_some()).count();
    if present == 0 {
        warnings.push(format!("point {}: no ball samples, no trajectory", point.index));
        return Ok(None);
    }
    let r = &cfg.refinement;
    let k = r.knn_k.min(present);
    let filled = fill_gaps_knn(part, k)?;
    let feet: BTreeMap<PlayerId, Vec<CourtPoint>> = players
        .iter()
        .filter_map(|(id, s)| s[oa..=ob].iter().copied().collect::<Option<Vec<_>>>().map(|v| (*id, v)))
        .collect();
    let checked = validate_ball_planar(&filled, a, &events, &feet, r.outlier_threshold_m, k)?;
    let mut smooth = smooth_moving_average(&checked, r.ma_window)?;
    for e in events.iter().filter(|e| e.kind == EventKind::Contact) {
        let i = (e.frame - a) as usize;
        smooth[i] = checked[i];
    }

    let mut out = Vec::with_capacity(kinds.len());
    for (frame, (kind, player_id)) in kinds {
        let ann = clip.keyframe_annotation(frame);
        out.push(BallKeyframe {
            t: clip.time_of(frame),
            kind,
            planar: smooth[(frame - a) as usize],
            height: ann.and_then(|k| k.height_m),
            spin: ann.and_then(|k| k.spin),
            player_id,
        });
    }
    Ok(Some(out))
}

/// Sample instants `t0 + n / rate` up to `t1`.
fn sample_times(t0: f64, t1: f64, rate: f64) -> Vec<f64> {
    let count = ((t1 - t0) * rate + 1e-9).floor() as usize + 1;
    (0..count).map(|n| t0 + n as f64 / rate).collect()
}

/// Runs the full pipeline on a validated clip.
pub fn reconstruct(clip: &Clip, cfg: &PipelineConfig) -> Result<SceneTimeline> {
    cfg.validate()?;
    let (calib, tracks) = to_court_space(clip, cfg.calibration.max_median_reprojection_px)?;
    let first = clip.first_index();
    let fps = clip.fps();
    let (t0, t1) = clip.span();
    let span = Span::new(t0, t1);
    let n = clip.frames.len();
    let spans = clip.points();
    let mut warnings = Vec::new();

    let segments = refinement_segments(spans, first, n);
    let mut players = BTreeMap::new();
    for (id, series) in &tracks.players {
        players.insert(*id, refine_player(series, &segments, &calib, cfg)?);
    }

    let mut trajectories = Vec::with_capacity(spans.len());
    for p in spans {
        let traj = match ball_keyframes(clip, p, &tracks.ball, &players, cfg, &mut warnings)? {
            Some(kfs) => Some(assemble_ball_trajectory(&kfs)?),
            None => None,
        };
        trajectories.push(traj);
    }

    let mut initial = clip.header.score_before;
    initial.format = cfg.scoring;
    initial
        .validate()
        .map_err(|e| Error::validation(format!("header.score_before: {e}")))?;
    let winners: Vec<PlayerId> = spans.iter().map(|p| p.outcome.winner).collect();
    let score_timeline = build_score_timeline(&initial, &winners)?;

    let mut events = Vec::new();
    let mut per_point_records = Vec::with_capacity(spans.len());
    for (p, traj) in spans.iter().zip(&trajectories) {
        let point_events: Vec<PointEvent> = clip
            .events
            .iter()
            .filter(|e| e.kind.is_ball_event() && e.frame >= p.start_frame && e.frame <= p.end_frame)
            .map(|e| PointEvent {
                t: clip.time_of(e.frame),
                kind: e.kind,
                player_id: e.player_id,
            })
            .collect();
        let records = match traj {
            Some(tr) => log_zone_events(p.index, Some(tr), &point_events)?,
            None => Vec::new(),
        };
        events.extend(records.iter().copied());
        per_point_records.push(records);
    }

    let mut metrics = Vec::with_capacity(2 * spans.len());
    for p in spans {
        for w in [MetricsWindow::MatchStart, MetricsWindow::CurrentGame] {
            metrics.push(compute_zone_metrics(&events, &score_timeline, w, p.index));
        }
    }

    let mut summaries = Vec::with_capacity(spans.len());
    for (i, p) in spans.iter().enumerate() {
        let records = &per_point_records[i];
        let entry = &score_timeline[i];
        let in_play = Span::new(clip.time_of(p.start_frame), clip.time_of(p.end_frame));
        let out_end = spans.get(i + 1).map_or(t1, |q| clip.time_of(q.start_frame));
        let bounces: Vec<CourtPoint> = records
            .iter()
            .filter(|r| r.kind == EventKind::Bounce)
            .map(|r| CourtPoint::planar(r.position.x, r.position.y))
            .collect();
        let focus = if bounces.is_empty() {
            CourtPoint::default()
        } else {
            let s = bounces.iter().fold(CourtPoint::default(), |acc, b| acc + *b);
            let n = bounces.len() as f64;
            CourtPoint::planar(s.x / n, s.y / n)
        };
        summaries.push(PointSummary {
            index: p.index,
            outcome: Some(p.outcome),
            shots: records.iter().filter(|r| r.kind == EventKind::Contact).count(),
            net_approach: records
                .iter()
                .any(|r| r.kind == EventKind::Contact && is_net_approach(&r.position)),
            labels_before: entry.labels_before.clone(),
            decided_game: entry.decided_game,
            decided_set: entry.decided_set,
            in_play,
            out_of_play: Span::new(clip.time_of(p.end_frame), out_end),
            ball_span: trajectories[i].as_ref().map(|t| Span::new(t.start(), t.end())),
            events: records.iter().map(|r| (r.t, r.kind)).collect(),
            focus,
        });
    }

    let cine = &cfg.cinematography;
    let mut shots = Vec::new();
    let first_play = summaries.first().map_or(t1, |s| s.in_play.start);
    if first_play > t0 {
        shots.push(PlannedShot {
            t_start: t0,
            t_end: first_play,
            point_index: None,
            spec: ShotSpec {
                size: ShotSize::Medium,
                anchor: Anchor::Baseline,
                motion: CameraMotion::Static,
                duration: first_play - t0,
                target: Target::Point(cine.rig.baseline.look_at),
                amplitude: 0.0,
                role: ShotRole::Filler,
            },
        });
    }
    let mut replays: Vec<ReplayPlan> = Vec::new();
    let mut categories = Vec::with_capacity(spans.len());
    for s in &summaries {
        let cats = classify_point_category(s, cine)?;
        let winner = s.outcome.expect("every point has an outcome").winner;
        let plan = plan_point_shots(s, &cats, winner, cine)?;
        shots.extend(plan.shots);
        replays.extend(plan.replay);
        categories.push(cats);
    }

    let query = FrameTracks {
        t0,
        fps,
        players: &players,
        trajectories: &trajectories,
    };
    let camera = compile_camera_timeline(&mut shots, &replays, span, &query, cine)?;

    let mut cues = Vec::new();
    for (i, s) in summaries.iter().enumerate() {
        let poses: Vec<ContactPose> = clip
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Contact && e.frame >= spans[i].start_frame && e.frame <= spans[i].end_frame)
            .filter_map(|e| {
                let id = e.player_id?;
                let frame = &clip.frames[clip.offset_of(e.frame)];
                let joints = frame.players.iter().find(|p| p.id == id)?.joints_px.clone()?;
                Some(ContactPose {
                    t: clip.time_of(e.frame),
                    player: id,
                    joints,
                })
            })
            .collect();
        cues.extend(generate_dynamic_cues(
            &PointCues {
                index: s.index,
                labels_before: &s.labels_before,
                records: &per_point_records[i],
                poses: &poses,
                in_play: s.in_play,
                out_of_play: s.out_of_play,
            },
            &camera,
            &cfg.cues,
        ));
        if categories[i].iter().min() == Some(&EventCategory::Tactic) {
            let display = shots
                .iter()
                .filter(|p| p.point_index == Some(s.index))
                .find(|p| p.spec.role == ShotRole::Analysis)
                .or_else(|| {
                    shots
                        .iter()
                        .find(|p| p.point_index == Some(s.index) && p.spec.role == ShotRole::Replay)
                })
                .map(|p| Span::new(p.t_start, p.t_end));
            if let Some(display) = display {
                let history: Vec<EventRecord> = events.iter().filter(|r| r.point_index <= s.index).copied().collect();
                let mut samples = Vec::new();
                for q in &spans[..=i] {
                    let (a, b) = ((q.start_frame - first) as usize, (q.end_frame - first) as usize);
                    for series in players.values() {
                        samples.extend(series[a..=b].iter().flatten().copied());
                    }
                }
                cues.extend(generate_static_cues(&history, &samples, display, s.index, &cfg.cues));
            }
        }
    }

    let rate = cfg.export.sample_rate_hz;
    let times = sample_times(t0, t1, rate);
    let ball = times.iter().map(|&t| ball_at(trajectories.iter().flatten(), t)).collect();
    let sampled_players = players
        .iter()
        .map(|(id, series)| (*id, times.iter().map(|&t| interpolate(series, t0, fps, t)).collect()))
        .collect();

    for tr in trajectories.iter().flatten() {
        warnings.extend(tr.warnings.iter().cloned());
    }

    let points = spans
        .iter()
        .zip(summaries)
        .zip(categories)
        .zip(trajectories)
        .map(|(((p, s), cats), trajectory)| ScenePoint {
            index: p.index,
            in_play: s.in_play,
            out_of_play: s.out_of_play,
            outcome: p.outcome,
            categories: cats,
            shots: s.shots,
            net_approach: s.net_approach,
            trajectory,
        })
        .collect();

    Ok(SceneTimeline {
        format_version: FORMAT_VERSION,
        clip_id: clip.header.clip_id.clone(),
        fps,
        span,
        court: CourtModel::default(),
        calibration: CalibrationSummary::new(&calib),
        tracks: EntityTracks {
            sample_rate_hz: rate,
            times,
            ball,
            players: sampled_players,
        },
        points,
        events,
        score_timeline,
        metrics,
        shots,
        camera,
        cues,
        warnings,
    })
}

/// Checks that every camera and cue reference resolves against the scene.
pub fn check_references(scene: &SceneTimeline) -> Result<()> {
    let n = scene.points.len();
    let players: BTreeSet<PlayerId> = scene.tracks.players.keys().copied().collect();
    let entity_ok = |e: EntityRef| e.player_id().is_none_or(|p| players.contains(&p));
    for r in &scene.camera.replays {
        if r.point_index >= n {
            return Err(Error::validation(format!("replay references point {}", r.point_index)));
        }
    }
    for k in &scene.camera.keyframes {
        if let crate::cine::LookAt::Entity { entity, .. } = k.look_at {
            if !entity_ok(entity) {
                return Err(Error::validation(format!("camera keyframe at t={} references {entity:?}", k.t)));
            }
        }
    }
    for c in &scene.cues {
        if c.point_index >= n {
            return Err(Error::validation(format!("cue references point {}", c.point_index)));
        }
        if let Target::Entity(e) = c.anchor {
            if !entity_ok(e) {
                return Err(Error::validation(format!("cue at t={} references {e:?}", c.t_start)));
            }
        }
    }
    for s in &scene.shots {
        if s.point_index.is_some_and(|p| p >= n) {
            return Err(Error::validation(format!("shot at t={} references a missing point", s.t_start)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{project_clip, round_trip_report, simulate_rally, SimConfig};

    fn oracle(seed: u64, points: usize) -> (Clip, crate::sim::GroundTruthRally) {
        let sim = SimConfig {
            seed,
            points,
            ..SimConfig::default()
        };
        let truth = simulate_rally(&sim).unwrap();
        let (doc, truth) = project_clip(&truth, &sim).unwrap();
        (Clip::from_document(doc).unwrap(), truth)
    }

    #[test]
    fn interpolate_snaps_and_blends() {
        let s = [Some(CourtPoint::planar(0.0, 0.0)), Some(CourtPoint::planar(2.0, 4.0)), None];
        assert_eq!(interpolate(&s, 1.0, 2.0, 1.5), s[1]);
        assert_eq!(interpolate(&s, 1.0, 2.0, 1.25), Some(CourtPoint::planar(1.0, 2.0)));
        assert_eq!(interpolate(&s, 1.0, 2.0, 1.75), None);
        assert_eq!(interpolate(&s, 1.0, 2.0, 0.5), None);
        assert_eq!(interpolate(&s, 1.0, 2.0, 2.5), None);
    }

    #[test]
    fn segments_tile_the_clip() {
        let o = PointOutcome {
            winner: PlayerId::P1,
            how: crate::ingest::OutcomeKind::Ace,
        };
        let p = |index, s, e| PointSpan {
            index,
            start_frame: s,
            end_frame: e,
            outcome: o,
        };
        let segs = refinement_segments(&[p(0, 12, 20), p(1, 30, 40)], 10, 45);
        assert_eq!(segs, vec![(0, 1), (2, 10), (11, 19), (20, 30), (31, 44)]);
    }

    #[test]
    fn noiseless_round_trip_is_exact() {
        let (clip, truth) = oracle(4, 3);
        let scene = reconstruct(&clip, &PipelineConfig::default()).unwrap();
        let r = round_trip_report(&truth, &scene).unwrap();
        assert!(r.ball_rmse_m <= 1e-6, "{r:?}");
        assert!(r.player_rmse_m <= 1e-6, "{r:?}");
        check_references(&scene).unwrap();
    }

    #[test]
    fn truth_against_itself_is_zero() {
        let (clip, truth) = oracle(9, 2);
        let mut scene = reconstruct(&clip, &PipelineConfig::default()).unwrap();
        for (sp, tp) in scene.points.iter_mut().zip(&truth.points) {
            sp.trajectory = Some(truth.trajectory(tp).unwrap());
        }
        let r = round_trip_report(&truth, &scene).unwrap();
        assert_eq!(r.ball_rmse_m, 0.0);
        assert_eq!(r.ball_max_m, 0.0);
    }

    #[test]
    fn document_round_trips() {
        let (clip, _) = oracle(2, 3);
        let scene = reconstruct(&clip, &PipelineConfig::default()).unwrap();
        let text = scene.to_json();
        let back = SceneTimeline::from_json(&text).unwrap();
        assert_eq!(back, scene);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn tracks_share_one_time_base() {
        let (clip, _) = oracle(5, 2);
        let scene = reconstruct(&clip, &PipelineConfig::default()).unwrap();
        let n = scene.tracks.times.len();
        assert_eq!(scene.tracks.ball.len(), n);
        assert!(scene.tracks.players.values().all(|s| s.len() == n));
        assert_eq!(scene.tracks.times[0], scene.span.start);
        assert!(scene.tracks.times[n - 1] <= scene.span.end + 1e-9);
        assert_eq!(scene.metrics.len(), 2 * scene.points.len());
    }

    #[test]
    fn span_mismatch_rejected() {
        let (clip, mut truth) = oracle(6, 1);
        let scene = reconstruct(&clip, &PipelineConfig::default()).unwrap();
        truth.last_frame += 5;
        assert!(matches!(round_trip_report(&truth, &scene), Err(Error::Validation(_))));
    }
}
