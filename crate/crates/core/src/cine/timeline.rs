use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::court::CourtPoint;
use crate::error::{Error, Result};
use crate::ingest::EventKind;

use super::{
    Anchor, CameraMotion, CinematographyConfig, EntityRef, PlannedShot, ReplayPlan, ShotSpec, Span, Target,
};

/// A playback-rate window: scene time advances at `factor` × real time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpWindow {
    pub t_start: f64,
    pub t_end: f64,
    pub factor: f64,
}

/// One slow-motion window per contact and bounce inside `span`, `±extent`
/// around the event and clipped to the span; overlapping windows merge.
pub fn plan_time_warp(events: &[(f64, EventKind)], span: Span, extent: f64, factor: f64) -> Vec<WarpWindow> {
    let mut raw: Vec<(f64, f64)> = events
        .iter()
        .filter(|(t, k)| matches!(k, EventKind::Contact | EventKind::Bounce) && span.contains(*t))
        .map(|&(t, _)| ((t - extent).max(span.start), (t + extent).min(span.end)))
        .filter(|(a, b)| b > a)
        .collect();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<WarpWindow> = Vec::new();
    for (a, b) in raw {
        match out.last_mut() {
            Some(w) if a <= w.t_end => w.t_end = w.t_end.max(b),
            _ => out.push(WarpWindow {
                t_start: a,
                t_end: b,
                factor,
            }),
        }
    }
    out
}

/// Presentation time needed to play `source` with the given slow-motion
/// windows (in source time).
pub fn presentation_length(source: Span, windows: &[WarpWindow]) -> f64 {
    source.len() + windows.iter().map(|w| (w.t_end - w.t_start) * (1.0 / w.factor - 1.0)).sum::<f64>()
}

/// `s(u) = 3u² − 2u³`; its peak slope is 1.5× the average.
pub fn smooth_step(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Easing {
    /// Pose holds until the next keyframe, which is a cut.
    Hold,
    /// Eased interpolation towards the next keyframe.
    SmoothStep,
}

/// Circular path about a vertical axis through `center`, used for the
/// segment that starts at the keyframe carrying it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub center: CourtPoint,
    pub sweep_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LookAt {
    Point(CourtPoint),
    /// Aim at an entity; `fallback` is used where the entity has no sample.
    Entity { entity: EntityRef, fallback: CourtPoint },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraKeyframe {
    pub t: f64,
    pub position: CourtPoint,
    pub look_at: LookAt,
    pub fov_deg: f64,
    pub easing: Easing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<Orbit>,
}

/// A replay on the presentation time line, showing clip time
/// `[source_start, source_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplaySpan {
    pub point_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub source_start: f64,
    pub source_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraTimeline {
    pub t_start: f64,
    pub t_end: f64,
    pub keyframes: Vec<CameraKeyframe>,
    /// Slow-motion windows in presentation time, all inside replays.
    pub time_warp: Vec<WarpWindow>,
    pub replays: Vec<ReplaySpan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub position: CourtPoint,
    pub look_at: CourtPoint,
    pub fov_deg: f64,
}

impl CameraPose {
    pub fn view_direction(&self) -> CourtPoint {
        (self.look_at - self.position).normalized()
    }
}

/// Entity positions in scene (clip) time.
pub trait SceneQuery {
    fn entity_position(&self, entity: EntityRef, t: f64) -> Option<CourtPoint>;
}

impl<F: Fn(EntityRef, f64) -> Option<CourtPoint>> SceneQuery for F {
    fn entity_position(&self, entity: EntityRef, t: f64) -> Option<CourtPoint> {
        self(entity, t)
    }
}

fn rotate_z(v: CourtPoint, angle: f64) -> CourtPoint {
    let (s, c) = angle.sin_cos();
    CourtPoint::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

fn orbit_position(start: CourtPoint, orbit: &Orbit, fraction: f64) -> CourtPoint {
    orbit.center + rotate_z(start - orbit.center, orbit.sweep_deg.to_radians() * fraction)
}

impl CameraTimeline {
    pub fn replay_at(&self, t: f64) -> Option<&ReplaySpan> {
        self.replays.iter().find(|r| t >= r.t_start && t <= r.t_end)
    }

    fn windows_in<'a>(&'a self, r: &'a ReplaySpan) -> impl Iterator<Item = &'a WarpWindow> + 'a {
        self.time_warp
            .iter()
            .filter(move |w| w.t_start >= r.t_start && w.t_end <= r.t_end)
    }

    /// Playback rate at presentation time `t`.
    pub fn warp_factor(&self, t: f64) -> f64 {
        self.time_warp
            .iter()
            .find(|w| t >= w.t_start && t < w.t_end)
            .map_or(1.0, |w| w.factor)
    }

    /// Clip time shown at presentation time `t`. Outside replays the two
    /// coincide; inside, the replay's source runs at the warped rate.
    pub fn scene_time(&self, t: f64) -> f64 {
        let Some(r) = self.replay_at(t) else { return t };
        replay_scene_time(r, self.windows_in(r), t)
    }

    /// Presentation time at which replay `r` shows clip time `source_t`.
    pub fn presentation_time(&self, r: &ReplaySpan, source_t: f64) -> Option<f64> {
        if !(source_t >= r.source_start && source_t <= r.source_end) {
            return None;
        }
        let mut s = r.source_start;
        let mut cursor = r.t_start;
        for w in self.windows_in(r) {
            let gap = w.t_start - cursor;
            if source_t <= s + gap {
                return Some(cursor + (source_t - s));
            }
            s += gap;
            let span = (w.t_end - w.t_start) * w.factor;
            if source_t <= s + span {
                return Some(w.t_start + (source_t - s) / w.factor);
            }
            s += span;
            cursor = w.t_end;
        }
        Some((cursor + (source_t - s)).min(r.t_end))
    }

    fn resolve(&self, look: &LookAt, t: f64, scene: &dyn SceneQuery) -> CourtPoint {
        match *look {
            LookAt::Point(p) => p,
            LookAt::Entity { entity, fallback } => scene
                .entity_position(entity, self.scene_time(t))
                .map_or(fallback, |p| p + CourtPoint::new(0.0, 0.0, entity.aim_height())),
        }
    }
}

fn replay_scene_time<'a>(r: &ReplaySpan, windows: impl Iterator<Item = &'a WarpWindow>, t: f64) -> f64 {
    let mut s = r.source_start;
    let mut cursor = r.t_start;
    for w in windows {
        if t <= w.t_start {
            break;
        }
        s += w.t_start - cursor;
        let end = t.min(w.t_end);
        s += (end - w.t_start) * w.factor;
        cursor = end;
        if t <= w.t_end {
            return s;
        }
    }
    s + (t - cursor)
}

/// Camera pose at presentation time `t`.
pub fn evaluate_camera_pose(tl: &CameraTimeline, t: f64, scene: &dyn SceneQuery) -> Result<CameraPose> {
    if !(t >= tl.t_start && t <= tl.t_end) {
        return Err(Error::Range {
            t,
            start: tl.t_start,
            end: tl.t_end,
        });
    }
    let kfs = &tl.keyframes;
    let i = kfs.partition_point(|k| k.t <= t).saturating_sub(1);
    let k = &kfs[i];
    let hold = || CameraPose {
        position: k.position,
        look_at: tl.resolve(&k.look_at, t, scene),
        fov_deg: k.fov_deg,
    };
    if k.easing == Easing::Hold || i + 1 == kfs.len() || t == k.t {
        return Ok(hold());
    }
    let next = &kfs[i + 1];
    let s = smooth_step((t - k.t) / (next.t - k.t));
    let position = match &k.orbit {
        Some(o) => orbit_position(k.position, o, s),
        None => k.position.lerp(&next.position, s),
    };
    let look_at = match (k.orbit, k.look_at, next.look_at) {
        (Some(o), _, _) => o.center,
        (None, LookAt::Point(a), LookAt::Point(b)) => a.lerp(&b, s),
        (None, look, _) => tl.resolve(&look, t, scene),
    };
    Ok(CameraPose {
        position,
        look_at,
        fov_deg: k.fov_deg + (next.fov_deg - k.fov_deg) * s,
    })
}

/// Places a replay on the presentation time line and converts its source
/// windows to presentation windows.
fn place_replay(plan: &ReplayPlan) -> (ReplaySpan, Vec<WarpWindow>) {
    let mut windows = Vec::new();
    let mut cursor = plan.t_start;
    let mut s = plan.source.start;
    for w in &plan.windows {
        let a = cursor + (w.t_start - s);
        let b = a + (w.t_end - w.t_start) / w.factor;
        cursor = b;
        s = w.t_end;
        let (a, b) = (a.min(plan.t_end), b.min(plan.t_end));
        if b > a {
            windows.push(WarpWindow {
                t_start: a,
                t_end: b,
                factor: w.factor,
            });
        }
    }
    let mut span = ReplaySpan {
        point_index: plan.point_index,
        t_start: plan.t_start,
        t_end: plan.t_end,
        source_start: plan.source.start,
        source_end: plan.source.end,
    };
    span.source_end = replay_scene_time(&span, windows.iter(), span.t_end).min(plan.source.end);
    (span, windows)
}

struct Realizer<'a> {
    cfg: &'a CinematographyConfig,
    scene: &'a dyn SceneQuery,
    timeline: CameraTimeline,
}

impl Realizer<'_> {
    fn base_pose(&self, spec: &ShotSpec, t: f64) -> Result<(CourtPoint, LookAt)> {
        let rig = &self.cfg.rig;
        if spec.anchor == Anchor::FollowCam {
            let Target::Entity(entity) = spec.target else {
                return Err(Error::Config("follow-cam needs an entity target".into()));
            };
            let at = self.timeline.scene_time(t);
            return Ok(match self.scene.entity_position(entity, at) {
                Some(p) => {
                    let away = if p.y > 0.0 { 1.0 } else { -1.0 };
                    let position = CourtPoint::new(p.x, p.y + away * rig.follow_cam.behind_m, rig.follow_cam.height_m);
                    let fallback = p + CourtPoint::new(0.0, 0.0, entity.aim_height());
                    (position, LookAt::Entity { entity, fallback })
                }
                None => (
                    rig.corner.position,
                    LookAt::Entity {
                        entity,
                        fallback: rig.corner.look_at,
                    },
                ),
            });
        }
        let pose = rig
            .pose(spec.anchor)
            .ok_or_else(|| Error::Config(format!("anchor {:?} not in rig table", spec.anchor)))?;
        let look = match spec.target {
            Target::Point(p) => LookAt::Point(p),
            Target::Entity(entity) => LookAt::Entity {
                entity,
                fallback: pose.look_at,
            },
        };
        Ok((pose.position, look))
    }

    /// Keyframes for one shot. A move runs for at least the nominal motion
    /// duration, long enough that its SmoothStep peak speed respects the
    /// caps, and its amplitude shrinks if the shot is too short for that.
    /// Peak angular rate (°/s) of the view direction from a fixed `position`
    /// following `entity` over the shot, sampled every millisecond.
    fn follow_rate_dps(&self, shot: &PlannedShot, position: CourtPoint, entity: EntityRef, fallback: CourtPoint) -> f64 {
        let dt = 1e-3;
        let n = ((shot.t_end - shot.t_start) / dt).ceil() as usize;
        let look = LookAt::Entity { entity, fallback };
        let dir = |t: f64| (self.timeline.resolve(&look, t, self.scene) - position).normalized();
        let mut prev = dir(shot.t_start);
        let mut peak = 0.0f64;
        for k in 1..=n {
            let t = (shot.t_start + k as f64 * dt).min(shot.t_end);
            let d = dir(t);
            peak = peak.max(prev.dot(&d).clamp(-1.0, 1.0).acos().to_degrees() / dt);
            prev = d;
        }
        peak
    }

    /// Keyframes for one shot. A shot that follows an entity whose motion
    /// would turn the view faster than the angular cap is demoted in place
    /// to a static framing of the entity's starting position.
    fn realize(&self, shot: &mut PlannedShot) -> Result<Vec<CameraKeyframe>> {
        let cfg = self.cfg;
        let (position, mut look_at) = self.base_pose(&shot.spec, shot.t_start)?;
        if let LookAt::Entity { entity, fallback } = look_at {
            let start = self.timeline.resolve(&look_at, shot.t_start, self.scene);
            // headroom for sampling between the 1 ms probes
            if self.follow_rate_dps(shot, position, entity, fallback) > 0.9 * cfg.max_angular_speed_dps {
                look_at = LookAt::Point(start);
                shot.spec.target = Target::Point(start);
                if shot.spec.motion == CameraMotion::Tracking {
                    shot.spec.motion = CameraMotion::Static;
                }
            }
        }
        let spec = &shot.spec;
        let fov_deg = cfg.fov_deg.of(spec.size);
        let start = CameraKeyframe {
            t: shot.t_start,
            position,
            look_at,
            fov_deg,
            easing: Easing::Hold,
            orbit: None,
        };
        let available = shot.t_end - shot.t_start - cfg.motion_settle_s;
        let look_point = match look_at {
            LookAt::Point(p) => p,
            LookAt::Entity { fallback, .. } => fallback,
        };
        // (peak speed, amplitude) → (duration, amplitude that fits)
        let fit = |cap: f64, amplitude: f64| -> Option<(f64, f64)> {
            if amplitude == 0.0 || available < 0.2 {
                return None;
            }
            let need = 1.5 * amplitude.abs() / cap;
            if need <= available {
                Some((cfg.motion_duration_s.max(need).min(available), amplitude))
            } else {
                Some((available, amplitude.signum() * cap * available / 1.5))
            }
        };
        let shift = |axis: CourtPoint, cap: f64, amplitude: f64, moves_look: bool| {
            let Some((dur, d)) = fit(cap, amplitude) else {
                return vec![start];
            };
            let delta = axis.scale(d);
            let end_look = match look_at {
                LookAt::Point(p) if moves_look => LookAt::Point(p + delta),
                other => other,
            };
            vec![
                CameraKeyframe {
                    easing: Easing::SmoothStep,
                    ..start
                },
                CameraKeyframe {
                    t: shot.t_start + dur,
                    position: position + delta,
                    look_at: end_look,
                    ..start
                },
            ]
        };
        let forward = (look_point - position).normalized();
        Ok(match spec.motion {
            CameraMotion::Static | CameraMotion::Tracking => vec![start],
            CameraMotion::Dolly => {
                // never push through the subject
                let reach = (look_point.distance(&position) - 1.0).max(0.0);
                shift(forward, cfg.max_linear_speed_mps, spec.amplitude.min(reach), false)
            }
            CameraMotion::Truck => {
                let right = forward.cross(&CourtPoint::new(0.0, 0.0, 1.0));
                let right = if right.norm() < 1e-9 {
                    CourtPoint::new(1.0, 0.0, 0.0)
                } else {
                    right.normalized()
                };
                shift(right, cfg.max_linear_speed_mps, spec.amplitude, true)
            }
            CameraMotion::Pedestal => {
                let floor = 0.5 - position.z;
                shift(
                    CourtPoint::new(0.0, 0.0, 1.0),
                    cfg.max_pedestal_speed_mps.min(cfg.max_linear_speed_mps),
                    spec.amplitude.max(floor),
                    true,
                )
            }
            CameraMotion::Arc => {
                let center = look_point;
                let radius = CourtPoint::planar(position.x - center.x, position.y - center.y).norm();
                if radius < 1e-6 {
                    return Ok(vec![CameraKeyframe {
                        look_at: LookAt::Point(center),
                        ..start
                    }]);
                }
                let omega = cfg.max_angular_speed_dps.min((cfg.max_linear_speed_mps / radius).to_degrees());
                match fit(omega, spec.amplitude) {
                    None => vec![CameraKeyframe {
                        look_at: LookAt::Point(center),
                        ..start
                    }],
                    Some((dur, sweep)) => {
                        let orbit = Orbit {
                            center,
                            sweep_deg: sweep,
                        };
                        vec![
                            CameraKeyframe {
                                look_at: LookAt::Point(center),
                                easing: Easing::SmoothStep,
                                orbit: Some(orbit),
                                ..start
                            },
                            CameraKeyframe {
                                t: shot.t_start + dur,
                                position: orbit_position(position, &orbit, 1.0),
                                look_at: LookAt::Point(center),
                                ..start
                            },
                        ]
                    }
                }
            }
        })
    }
}

/// Realizes contiguous planned shots covering `span` as camera keyframes.
/// Cuts are hard: each shot's first keyframe replaces the previous pose.
pub fn compile_camera_timeline(
    shots: &mut [PlannedShot],
    replays: &[ReplayPlan],
    span: Span,
    scene: &dyn SceneQuery,
    cfg: &CinematographyConfig,
) -> Result<CameraTimeline> {
    let first = shots
        .first()
        .ok_or_else(|| Error::Planning("no shots to compile".into()))?;
    if first.t_start != span.start || shots[shots.len() - 1].t_end != span.end {
        return Err(Error::Planning("shots do not cover the clip span".into()));
    }
    for w in shots.windows(2) {
        if w[0].t_end != w[1].t_start {
            return Err(Error::Planning(format!("gap or overlap between shots at t={}", w[0].t_end)));
        }
    }
    let mut motions: BTreeMap<usize, usize> = BTreeMap::new();
    for s in shots.iter() {
        s.spec.validate()?;
        if !(s.t_end > s.t_start) {
            return Err(Error::Planning(format!("empty shot at t={}", s.t_start)));
        }
        if let (Some(p), true) = (s.point_index, s.spec.is_moving()) {
            let n = motions.entry(p).or_default();
            *n += 1;
            if *n > cfg.max_motions_per_point {
                return Err(Error::Planning(format!("point {p} exceeds the camera motion budget")));
            }
        }
    }

    let mut time_warp = Vec::new();
    let mut placed = Vec::new();
    for r in replays {
        let (span, windows) = place_replay(r);
        placed.push(span);
        time_warp.extend(windows);
    }
    time_warp.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));

    let mut realizer = Realizer {
        cfg,
        scene,
        timeline: CameraTimeline {
            t_start: span.start,
            t_end: span.end,
            keyframes: Vec::new(),
            time_warp,
            replays: placed,
        },
    };
    let mut keyframes = Vec::new();
    for s in shots.iter_mut() {
        keyframes.extend(realizer.realize(s)?);
    }
    if let Some(last) = keyframes.last().copied() {
        if last.t < span.end {
            keyframes.push(CameraKeyframe {
                t: span.end,
                easing: Easing::Hold,
                orbit: None,
                ..last
            });
        }
    }
    realizer.timeline.keyframes = keyframes;
    Ok(realizer.timeline)
}

#[cfg(test)]
mod tests {
    use super::super::{ShotRole, ShotSize};
    use super::*;

    fn no_scene(_: EntityRef, _: f64) -> Option<CourtPoint> {
        None
    }

    fn shot(t0: f64, t1: f64, anchor: Anchor, motion: CameraMotion, target: Target, amplitude: f64) -> PlannedShot {
        PlannedShot {
            t_start: t0,
            t_end: t1,
            point_index: Some(0),
            spec: ShotSpec {
                size: ShotSize::Wide,
                anchor,
                motion,
                duration: t1 - t0,
                target,
                amplitude,
                role: ShotRole::Filler,
            },
        }
    }

    fn compile(shots: &[PlannedShot], cfg: &CinematographyConfig) -> CameraTimeline {
        let span = Span::new(shots[0].t_start, shots[shots.len() - 1].t_end);
        compile_camera_timeline(&mut shots.to_vec(), &[], span, &no_scene, cfg).unwrap()
    }

    #[test]
    fn static_shot_holds() {
        let cfg = CinematographyConfig::default();
        let look = Target::Point(cfg.rig.baseline.look_at);
        let tl = compile(&[shot(0.0, 5.0, Anchor::Baseline, CameraMotion::Static, look, 0.0)], &cfg);
        assert_eq!(tl.keyframes.len(), 2);
        for t in [0.0, 1.3, 5.0] {
            let p = evaluate_camera_pose(&tl, t, &no_scene).unwrap();
            assert_eq!(p.position, cfg.rig.baseline.position);
        }
        assert!(matches!(evaluate_camera_pose(&tl, 5.1, &no_scene), Err(Error::Range { .. })));
    }

    #[test]
    fn dolly_is_stretched_to_the_cap() {
        let mut cfg = CinematographyConfig::default();
        cfg.motion_settle_s = 0.0;
        let look = Target::Point(cfg.rig.corner.look_at);
        let tl = compile(&[shot(0.0, 4.0, Anchor::Corner, CameraMotion::Dolly, look, 3.0)], &cfg);
        assert!((tl.keyframes[1].t - 2.25).abs() < 1e-12);
        assert!((tl.keyframes[1].position.distance(&tl.keyframes[0].position) - 3.0).abs() < 1e-12);
        let mid = evaluate_camera_pose(&tl, 1.125, &no_scene).unwrap();
        let half = tl.keyframes[0].position.lerp(&tl.keyframes[1].position, 0.5);
        assert!(mid.position.distance(&half) < 1e-12);
    }

    #[test]
    fn arc_stays_pinned() {
        let mut cfg = CinematographyConfig::default();
        cfg.motion_duration_s = 2.0;
        cfg.motion_settle_s = 0.0;
        let target = CourtPoint::new(0.0, -12.0, 0.0);
        // 4 m radius: 30° at 15°/s peak needs 3 s
        cfg.rig.corner.position = CourtPoint::new(0.0, -16.0, 3.0);
        let tl = compile(
            &[shot(0.0, 6.0, Anchor::Corner, CameraMotion::Arc, Target::Point(target), 30.0)],
            &cfg,
        );
        assert!((tl.keyframes[1].t - 3.0).abs() < 1e-12);
        for i in 0..=600 {
            let p = evaluate_camera_pose(&tl, i as f64 / 100.0, &no_scene).unwrap();
            assert!(p.look_at.distance(&target) <= 1e-9);
        }
    }

    #[test]
    fn fast_subject_demotes_tracking() {
        let cfg = CinematographyConfig::default();
        let track = |speed: f64| {
            let scene = move |e: EntityRef, t: f64| (e == EntityRef::P1).then(|| CourtPoint::planar(speed * t, -12.0));
            let mut shots = vec![shot(0.0, 4.0, Anchor::FollowCam, CameraMotion::Tracking, Target::Entity(EntityRef::P1), 0.0)];
            let tl = compile_camera_timeline(&mut shots, &[], Span::new(0.0, 4.0), &scene, &cfg).unwrap();
            (shots.remove(0).spec, tl)
        };
        // 2.5 m behind: 0.2 m/s sweeps under 5°/s
        let (spec, tl) = track(0.2);
        assert_eq!(spec.motion, CameraMotion::Tracking);
        let p = evaluate_camera_pose(&tl, 3.0, &|_: EntityRef, t: f64| Some(CourtPoint::planar(0.2 * t, -12.0))).unwrap();
        assert!((p.look_at.x - 0.6).abs() < 1e-12);
        let (spec, tl) = track(3.0);
        assert_eq!(spec.motion, CameraMotion::Static);
        assert_eq!(spec.target, Target::Point(CourtPoint::new(0.0, -12.0, 1.0)));
        assert!(tl.keyframes.iter().all(|k| k.look_at == LookAt::Point(CourtPoint::new(0.0, -12.0, 1.0))));
    }

    #[test]
    fn bounce_window() {
        let span = Span::new(0.0, 10.0);
        let w = plan_time_warp(&[(3.0, EventKind::Bounce)], span, 0.3, 0.5);
        assert_eq!(w.len(), 1);
        assert!((w[0].t_start - 2.7).abs() < 1e-12 && (w[0].t_end - 3.3).abs() < 1e-12);
        assert_eq!(w[0].factor, 0.5);
        let w = plan_time_warp(&[(3.0, EventKind::Contact), (3.4, EventKind::Bounce)], span, 0.3, 0.5);
        assert_eq!(w.len(), 1);
        assert!((w[0].t_start - 2.7).abs() < 1e-12 && (w[0].t_end - 3.7).abs() < 1e-12);
        assert!(plan_time_warp(&[], span, 0.3, 0.5).is_empty());
        let w = plan_time_warp(&[(0.1, EventKind::Contact)], span, 0.3, 0.5);
        assert_eq!(w[0].t_start, 0.0);
    }

    #[test]
    fn replay_maps_source_time() {
        let cfg = CinematographyConfig::default();
        let source = Span::new(1.0, 5.0);
        let windows = plan_time_warp(&[(3.0, EventKind::Bounce)], source, 0.3, 0.5);
        let length = presentation_length(source, &windows);
        assert!((length - 4.6).abs() < 1e-12);
        let plan = ReplayPlan {
            point_index: 0,
            t_start: 10.0,
            t_end: 10.0 + length,
            source,
            windows,
        };
        let look = Target::Point(cfg.rig.corner.look_at);
        let shots = [
            shot(0.0, 10.0, Anchor::Baseline, CameraMotion::Static, look, 0.0),
            shot(10.0, 20.0, Anchor::Corner, CameraMotion::Static, look, 0.0),
        ];
        let tl = compile_camera_timeline(&mut shots.to_vec(), &[plan], Span::new(0.0, 20.0), &no_scene, &cfg).unwrap();
        let r = tl.replays[0];
        assert!((r.source_end - 5.0).abs() < 1e-12);
        let w = tl.time_warp[0];
        assert!((w.t_start - 11.7).abs() < 1e-12 && (w.t_end - 12.9).abs() < 1e-12);
        assert!((tl.scene_time(11.7) - 2.7).abs() < 1e-12);
        assert!((tl.scene_time(12.3) - 3.0).abs() < 1e-12);
        assert!((tl.scene_time(14.6) - 5.0).abs() < 1e-12);
        assert_eq!(tl.scene_time(15.0), 15.0);
        assert!((tl.presentation_time(&r, 3.0).unwrap() - 12.3).abs() < 1e-12);
        assert_eq!(tl.warp_factor(12.0), 0.5);
        assert_eq!(tl.warp_factor(13.0), 1.0);
    }

    #[test]
    fn cut_replaces_pose_and_motion_budget_enforced() {
        let cfg = CinematographyConfig::default();
        let look = Target::Point(CourtPoint::default());
        let shots = [
            shot(0.0, 3.0, Anchor::Baseline, CameraMotion::Static, look, 0.0),
            shot(3.0, 6.0, Anchor::Sideline, CameraMotion::Static, look, 0.0),
        ];
        let tl = compile(&shots, &cfg);
        let before = evaluate_camera_pose(&tl, 2.999, &no_scene).unwrap();
        let after = evaluate_camera_pose(&tl, 3.0, &no_scene).unwrap();
        assert_eq!(before.position, cfg.rig.baseline.position);
        assert_eq!(after.position, cfg.rig.sideline.position);

        let moving: Vec<_> = (0..3)
            .map(|i| shot(i as f64 * 4.0, (i + 1) as f64 * 4.0, Anchor::Corner, CameraMotion::Truck, look, 1.0))
            .collect();
        let err = compile_camera_timeline(&mut moving.to_vec(), &[], Span::new(0.0, 12.0), &no_scene, &cfg).unwrap_err();
        assert!(matches!(err, Error::Planning(_)));
    }

    #[test]
    fn sweep_respects_caps() {
        let cfg = CinematographyConfig::default();
        let look = Target::Point(CourtPoint::new(0.0, 2.0, 0.0));
        let shots = [
            shot(0.0, 4.0, Anchor::Corner, CameraMotion::Truck, look, 5.0),
            shot(4.0, 9.0, Anchor::BirdsEye, CameraMotion::Arc, look, 40.0),
            shot(9.0, 12.0, Anchor::Baseline, CameraMotion::Pedestal, look, 4.0),
        ];
        let mut shots = shots.to_vec();
        for (i, s) in shots.iter_mut().enumerate() {
            s.point_index = Some(i);
        }
        let tl = compile(&shots, &cfg);
        let dt = 1.0 / 120.0;
        let cut_times: Vec<f64> = shots.iter().map(|s| s.t_start).collect();
        let mut t = 0.0;
        while t + dt <= 12.0 {
            if !cut_times.iter().any(|&c| c > t && c <= t + dt) {
                let a = evaluate_camera_pose(&tl, t, &no_scene).unwrap();
                let b = evaluate_camera_pose(&tl, t + dt, &no_scene).unwrap();
                assert!(a.position.distance(&b.position) <= 2.0 * dt + 1e-9);
                let dz = (a.position.z - b.position.z).abs();
                assert!(dz <= 1.0 * dt + 1e-9);
                let ang = a.view_direction().dot(&b.view_direction()).clamp(-1.0, 1.0).acos().to_degrees();
                assert!(ang <= 15.0 * dt + 1e-9, "angular step {ang} at t={t}");
            }
            t += dt;
        }
    }
}
