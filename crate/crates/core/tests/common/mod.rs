//! Shared fixtures: an independent tennis scoring oracle and oracle-clip
//! helpers.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rallyforge::cine::{evaluate_camera_pose, CameraMotion, CameraPose, CinematographyConfig, SceneQuery, Target};
use rallyforge::config::PipelineConfig;
use rallyforge::court::CourtPoint;
use rallyforge::cues::CueContent;
use rallyforge::ingest::Clip;
use rallyforge::scene::{reconstruct, SceneTimeline};
use rallyforge::scoring::{point_context_labels, FinalSetRule, GamePoints, MatchFormat, PlayerId, PointLabel, ScoreState};
use rallyforge::sim::{project_clip, simulate_rally, GroundTruthRally, SimConfig};

/// Brute-force scoring rules kept as raw counters. The server is derived
/// from the number of games played instead of being toggled.
#[derive(Debug, Clone, Copy)]
pub struct RulesOracle {
    pub best_of: u32,
    pub final_tiebreak_at: u32,
    pub first_server: usize,
    pub sets: [u32; 2],
    pub games: [u32; 2],
    pub points: [u32; 2],
    pub games_played: u32,
    pub winner: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Decided {
    pub game: bool,
    pub set: bool,
    pub matched: bool,
}

impl RulesOracle {
    pub fn new(first_server: PlayerId, best_of: u32, final_rule: FinalSetRule) -> Self {
        Self {
            best_of,
            final_tiebreak_at: match final_rule {
                FinalSetRule::TiebreakAt6 => 6,
                FinalSetRule::TiebreakAt12 => 12,
            },
            first_server: first_server.index(),
            sets: [0; 2],
            games: [0; 2],
            points: [0; 2],
            games_played: 0,
            winner: None,
        }
    }

    fn sets_to_win(&self) -> u32 {
        (self.best_of + 1) / 2
    }

    fn tiebreak_at(&self) -> u32 {
        if self.sets[0] + self.sets[1] == self.best_of - 1 {
            self.final_tiebreak_at
        } else {
            6
        }
    }

    pub fn in_tiebreak(&self) -> bool {
        let t = self.tiebreak_at();
        self.games == [t, t]
    }

    /// Server of the next point.
    pub fn server(&self) -> usize {
        let game_server = (self.first_server + self.games_played as usize) % 2;
        if self.in_tiebreak() {
            // one point, then alternate every two
            let k = self.points[0] + self.points[1];
            if ((k + 1) / 2) % 2 == 0 {
                game_server
            } else {
                1 - game_server
            }
        } else {
            game_server
        }
    }

    pub fn play(&mut self, w: usize) -> Decided {
        assert!(self.winner.is_none());
        let l = 1 - w;
        let mut d = Decided::default();
        self.points[w] += 1;
        let target = if self.in_tiebreak() { 7 } else { 4 };
        if self.points[w] >= target && self.points[w] >= self.points[l] + 2 {
            d.game = true;
            let was_tiebreak = self.in_tiebreak();
            self.points = [0; 2];
            self.games[w] += 1;
            self.games_played += 1;
            let set_won = was_tiebreak || (self.games[w] >= 6 && self.games[w] >= self.games[l] + 2);
            if set_won {
                d.set = true;
                self.sets[w] += 1;
                self.games = [0; 2];
                if self.sets[w] == self.sets_to_win() {
                    d.matched = true;
                    self.winner = Some(w);
                }
            }
        }
        d
    }

    pub fn to_state(&self) -> ScoreState {
        let tiebreak = self.in_tiebreak() && self.winner.is_none();
        let points = if tiebreak {
            [GamePoints::Love; 2]
        } else {
            let (a, b) = (self.points[0], self.points[1]);
            let plain = |n: u32| match n {
                0 => GamePoints::Love,
                1 => GamePoints::Fifteen,
                2 => GamePoints::Thirty,
                _ => GamePoints::Forty,
            };
            if a >= 3 && b >= 3 {
                match a.cmp(&b) {
                    std::cmp::Ordering::Equal => [GamePoints::Forty; 2],
                    std::cmp::Ordering::Greater => [GamePoints::Advantage, GamePoints::Forty],
                    std::cmp::Ordering::Less => [GamePoints::Forty, GamePoints::Advantage],
                }
            } else {
                [plain(a), plain(b)]
            }
        };
        let id = |i: usize| if i == 0 { PlayerId::P1 } else { PlayerId::P2 };
        ScoreState {
            sets: [self.sets[0] as u8, self.sets[1] as u8],
            games: [self.games[0] as u8, self.games[1] as u8],
            points,
            tiebreak: tiebreak.then(|| [self.points[0] as u16, self.points[1] as u16]),
            server: id(self.server()),
            winner: self.winner.map(id),
            format: MatchFormat {
                best_of: self.best_of as u8,
                final_set_rule: if self.final_tiebreak_at == 12 {
                    FinalSetRule::TiebreakAt12
                } else {
                    FinalSetRule::TiebreakAt6
                },
            },
        }
    }

    /// Labels by trying both outcomes of the next point.
    pub fn labels(&self) -> BTreeSet<PointLabel> {
        let mut out = BTreeSet::new();
        if self.winner.is_some() {
            return out;
        }
        let receiver = 1 - self.server();
        for w in 0..2 {
            let d = self.clone().play(w);
            if d.game {
                out.insert(PointLabel::GamePoint);
                if w == receiver {
                    out.insert(PointLabel::BreakPoint);
                }
            }
            if d.set {
                out.insert(PointLabel::SetPoint);
            }
            if d.matched {
                out.insert(PointLabel::MatchPoint);
            }
        }
        out
    }
}

pub fn sim_config(seed: u64, points: usize) -> SimConfig {
    SimConfig {
        seed,
        points,
        ..SimConfig::default()
    }
}

/// Simulated clip, its truth, and the reconstructed scene.
pub fn oracle_scene(sim: &SimConfig) -> (Clip, GroundTruthRally, SceneTimeline) {
    let rally = simulate_rally(sim).expect("simulate");
    let (doc, truth) = project_clip(&rally, sim).expect("project");
    let clip = Clip::from_document(doc).expect("valid clip");
    let scene = reconstruct(&clip, &PipelineConfig::default()).expect("reconstruct");
    (clip, truth, scene)
}

/// Measured camera behaviour of one scene plus every property violation.
#[derive(Debug, Default)]
pub struct CameraCheck {
    pub pose_samples: usize,
    pub max_linear_mps: f64,
    pub max_angular_dps: f64,
    pub max_motions: usize,
    pub max_target_angle_deg: f64,
    pub violations: Vec<String>,
}

fn angle_deg(a: CourtPoint, b: CourtPoint) -> f64 {
    let c = (a.dot(&b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
    c.acos().to_degrees()
}

pub fn check_camera(scene: &SceneTimeline, cfg: &CinematographyConfig) -> CameraCheck {
    let tl = &scene.camera;
    let mut out = CameraCheck::default();
    let (t0, t1) = (tl.t_start, tl.t_end);

    // totality at 1 ms
    let steps = ((t1 - t0) * 1000.0).floor() as usize;
    for k in 0..=steps {
        let t = (t0 + k as f64 / 1000.0).min(t1);
        match evaluate_camera_pose(tl, t, scene) {
            Ok(p) if p.position.is_finite() && p.look_at.is_finite() && p.fov_deg.is_finite() => {}
            Ok(_) => out.violations.push(format!("non-finite pose at t={t}")),
            Err(e) => out.violations.push(format!("no pose at t={t}: {e}")),
        }
        out.pose_samples += 1;
    }
    if evaluate_camera_pose(tl, t1, scene).is_err() {
        out.violations.push("no pose at span end".into());
    }

    // speed caps at 120 Hz, within shots only (cuts are instantaneous)
    let dt = 1.0 / 120.0;
    for shot in &scene.shots {
        let n = ((shot.t_end - shot.t_start) / dt).floor() as usize;
        let mut prev: Option<(f64, CameraPose)> = None;
        for k in 0..=n {
            let t = shot.t_start + k as f64 * dt;
            if t >= shot.t_end {
                break;
            }
            let pose = evaluate_camera_pose(tl, t, scene).expect("total");
            if let Some((pt, pp)) = prev {
                let h = t - pt;
                let v = pose.position.distance(&pp.position) / h;
                let w = angle_deg(pose.view_direction(), pp.view_direction()) / h;
                out.max_linear_mps = out.max_linear_mps.max(v);
                out.max_angular_dps = out.max_angular_dps.max(w);
                if v > cfg.max_linear_speed_mps + 1e-9 {
                    out.violations.push(format!("linear speed {v} m/s at t={t}"));
                }
                if w > cfg.max_angular_speed_dps + 1e-6 {
                    out.violations.push(format!("angular rate {w} deg/s at t={t}"));
                }
            }
            if matches!(shot.spec.motion, CameraMotion::Arc | CameraMotion::Tracking) {
                let target = match shot.spec.target {
                    Target::Point(p) => Some(p),
                    Target::Entity(e) => scene
                        .entity_position(e, tl.scene_time(t))
                        .map(|p| p + CourtPoint::new(0.0, 0.0, e.aim_height())),
                };
                if let Some(target) = target {
                    let a = angle_deg(pose.view_direction(), target - pose.position);
                    out.max_target_angle_deg = out.max_target_angle_deg.max(a);
                    if a > 0.5 {
                        out.violations.push(format!("target off-centre by {a} deg at t={t}"));
                    }
                }
            }
            prev = Some((t, pose));
        }
    }

    // motion budget
    let mut per_point: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &scene.shots {
        if let Some(p) = s.point_index {
            *per_point.entry(p).or_default() += usize::from(s.spec.motion != CameraMotion::Static);
        }
    }
    out.max_motions = per_point.values().copied().max().unwrap_or(0);
    if out.max_motions > cfg.max_motions_per_point {
        out.violations.push(format!("{} motions in one point", out.max_motions));
    }

    // live coverage is the baseline anchor, bit for bit
    let base = cfg.rig.baseline;
    for p in &scene.points {
        let steps = ((p.in_play.end - p.in_play.start) * 1000.0).floor() as usize;
        for k in 0..steps {
            let t = p.in_play.start + k as f64 / 1000.0;
            let pose = evaluate_camera_pose(tl, t, scene).expect("total");
            if pose.position != base.position || pose.look_at != base.look_at {
                out.violations.push(format!("in-play pose differs from baseline at t={t}"));
                break;
            }
        }
    }

    // warp factors and window placement
    for w in &tl.time_warp {
        if w.factor != cfg.slow_motion_factor {
            out.violations.push(format!("window factor {}", w.factor));
        }
        if !tl.replays.iter().any(|r| w.t_start >= r.t_start && w.t_end <= r.t_end) {
            out.violations.push(format!("window [{}, {}] outside replays", w.t_start, w.t_end));
        }
    }
    for k in 0..=steps {
        let t = (t0 + k as f64 / 1000.0).min(t1);
        let inside = tl.time_warp.iter().any(|w| t >= w.t_start && t < w.t_end);
        let f = tl.warp_factor(t);
        let want = if inside { cfg.slow_motion_factor } else { 1.0 };
        if f != want {
            out.violations.push(format!("warp factor {f} at t={t}, expected {want}"));
            break;
        }
    }
    out
}

/// Every cue-invariant violation in a scene.
pub fn check_cues(scene: &SceneTimeline) -> Vec<String> {
    let mut bad = Vec::new();
    let tl = &scene.camera;
    for c in &scene.cues {
        if !(c.t_start >= scene.span.start && c.t_end <= scene.span.end && c.t_start <= c.t_end) {
            bad.push(format!("cue {:?} [{}, {}] outside clip", c.content, c.t_start, c.t_end));
        }
        let replay_bound = matches!(
            c.content,
            CueContent::TrajectoryTrail { .. }
                | CueContent::HighlightOutline { .. }
                | CueContent::JointAngle { .. }
                | CueContent::ServeDirection { .. }
                | CueContent::ShotCount { .. }
        );
        if replay_bound
            && !tl
                .replays
                .iter()
                .any(|r| r.point_index == c.point_index && c.t_start >= r.t_start && c.t_end <= r.t_end)
        {
            bad.push(format!("replay cue {:?} outside its replay", c.content));
        }
        if let CueContent::PositionHeatmap(g) = &c.content {
            let sum: f64 = g.weights.iter().sum();
            if g.weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
                bad.push(format!("heatmap weights sum to {sum}"));
            }
        }
    }
    for (i, entry) in scene.score_timeline.iter().enumerate() {
        let expected: BTreeSet<String> = point_context_labels(&entry.before)
            .into_iter()
            .map(|l| l.text().to_string())
            .collect();
        let shown: BTreeSet<String> = scene
            .cues
            .iter()
            .filter(|c| c.point_index == i)
            .filter_map(|c| match &c.content {
                CueContent::FloatingText { text } => Some(text.clone()),
                _ => None,
            })
            .collect();
        if expected != shown {
            bad.push(format!("point {i}: floating text {shown:?}, labels {expected:?}"));
        }
        let counts: Vec<u32> = scene
            .cues
            .iter()
            .filter(|c| c.point_index == i)
            .filter_map(|c| match c.content {
                CueContent::ShotCount { count } => Some(count),
                _ => None,
            })
            .collect();
        if counts.windows(2).any(|w| w[1] <= w[0]) || counts.first().is_some_and(|&c| c == 0) {
            bad.push(format!("point {i}: shot counts {counts:?}"));
        }
    }
    bad
}
