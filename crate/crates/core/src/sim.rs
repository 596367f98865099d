//! Synthetic match oracle: ground-truth rallies built from the same kinematic
//! model the reconstructor solves, projected into the clip format.
//!
//! Randomness comes from PCG-64 (`rand_pcg::Pcg64`, 128-bit LCG with XSL-RR
//! output); every point draws from its own stream of the seed.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use rand::RngExt;
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::court::{
    reference_keypoints, CourtPoint, DOUBLES_HALF_WIDTH_M, HALF_LENGTH_M, NET_CORD_HEIGHT_M, SERVICE_LINE_Y_M,
    SINGLES_HALF_WIDTH_M,
};
use crate::error::{Error, Result};
use crate::ingest::{
    ClipDocument, ClipHeader, EventAnnotation, EventKind, FrameSample, KeyframeAnnotation, OutcomeKind, PlayerSample,
    PointOutcome,
};
use crate::kinematics::{assemble_ball_trajectory, BallKeyframe, BallTrajectory3D, KeyframeKind, SpinType};
use crate::projection::{Homography, Pixel};
use crate::scene::SceneTimeline;
use crate::scoring::{advance_score, GamePoints, MatchFormat, PlayerId, ScoreState};

/// Pinhole broadcast camera looking at the court.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraModel {
    pub position: CourtPoint,
    pub look_at: CourtPoint,
    pub focal_px: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            position: CourtPoint::new(0.0, -30.0, 14.0),
            look_at: CourtPoint::new(0.0, 0.5, 0.0),
            focal_px: 1400.0,
        }
    }
}

impl CameraModel {
    /// Court plane → image homography for a `width`×`height` frame.
    pub fn homography(&self, width: u32, height: u32) -> Result<Homography> {
        let c = Vector3::new(self.position.x, self.position.y, self.position.z);
        let forward = Vector3::new(self.look_at.x, self.look_at.y, self.look_at.z) - c;
        let right = forward.cross(&Vector3::z());
        if right.norm() < 1e-9 || forward.norm() < 1e-9 {
            return Err(Error::Config("simulator.camera must not look straight down".into()));
        }
        let forward = forward.normalize();
        let right = right.normalize();
        let down = forward.cross(&right);
        let r = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
        let t = -(r * c);
        let f = self.focal_px;
        let k = Matrix3::new(
            f,
            0.0,
            f64::from(width) / 2.0,
            0.0,
            f,
            f64::from(height) / 2.0,
            0.0,
            0.0,
            1.0,
        );
        let rt = Matrix3::from_columns(&[r.column(0).into_owned(), r.column(1).into_owned(), t]);
        Homography::new(k * rt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub seed: u64,
    pub points: usize,
    pub pixel_noise_sigma_px: f64,
    pub dropout_rate: f64,
    pub quantize_pixels: bool,
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    pub camera: CameraModel,
    pub format: MatchFormat,
    /// Emits a synthetic arm skeleton for the hitter at each contact frame.
    pub joints: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            points: 3,
            pixel_noise_sigma_px: 0.0,
            dropout_rate: 0.0,
            quantize_pixels: false,
            fps: 25.0,
            width: 1920,
            height: 1080,
            camera: CameraModel::default(),
            format: MatchFormat::default(),
            joints: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points < 1 {
            return Err(Error::Config("points must be ≥ 1".into()));
        }
        if !(self.pixel_noise_sigma_px.is_finite() && self.pixel_noise_sigma_px >= 0.0) {
            return Err(Error::Config("simulator.pixel_noise_sigma_px must be ≥ 0".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config("simulator.dropout_rate must be in [0, 1)".into()));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::Config("simulator.fps must be > 0".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("simulator resolution must be > 0".into()));
        }
        if !(self.camera.focal_px.is_finite() && self.camera.focal_px > 0.0) {
            return Err(Error::Config("simulator.camera.focal_px must be > 0".into()));
        }
        self.format.validate()?;
        self.camera.homography(self.width, self.height)?;
        Ok(())
    }
}

/// A generated ball keyframe at an exact frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthKeyframe {
    pub frame: u32,
    pub kind: KeyframeKind,
    pub planar: CourtPoint,
    pub height: f64,
    pub spin: Option<SpinType>,
    pub player_id: Option<PlayerId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthPoint {
    pub index: usize,
    pub start_frame: u32,
    pub end_frame: u32,
    pub outcome: PointOutcome,
    pub score_before: ScoreState,
    /// Player spots, held from `start_frame` until the next point starts.
    pub players: BTreeMap<PlayerId, CourtPoint>,
    pub keyframes: Vec<TruthKeyframe>,
    /// Launch velocity of each vertical segment as the generator computed it.
    pub launch_velocities: Vec<f64>,
}

/// Ground truth for a whole simulated clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRally {
    pub clip_id: String,
    pub fps: f64,
    pub first_frame: u32,
    pub last_frame: u32,
    pub camera: Homography,
    pub score_before: ScoreState,
    pub score_after: ScoreState,
    pub points: Vec<TruthPoint>,
}

impl GroundTruthRally {
    pub fn time_of(&self, frame: u32) -> f64 {
        f64::from(frame) / self.fps
    }

    pub fn ball_keyframes(&self, point: &TruthPoint) -> Vec<BallKeyframe> {
        point
            .keyframes
            .iter()
            .map(|k| BallKeyframe {
                t: self.time_of(k.frame),
                kind: k.kind,
                planar: k.planar,
                height: Some(k.height),
                spin: k.spin,
                player_id: k.player_id,
            })
            .collect()
    }

    pub fn trajectory(&self, point: &TruthPoint) -> Result<BallTrajectory3D> {
        assemble_ball_trajectory(&self.ball_keyframes(point))
    }

    /// Where `id` stands at `frame`.
    pub fn player_at(&self, id: PlayerId, frame: u32) -> Option<CourtPoint> {
        let p = self
            .points
            .iter()
            .rev()
            .find(|p| p.start_frame <= frame)
            .or(self.points.first())?;
        p.players.get(&id).copied()
    }
}

const PRE_ROLL_FRAMES: u32 = 12;
const MARKER_MARGIN_FRAMES: u32 = 10;
const MIN_GAP_FRAMES: u32 = 3;

fn rng_for(seed: u64, stream: u64) -> Pcg64 {
    Pcg64::new(
        (u128::from(seed) << 64) | 0xcafe_f00d_d15e_a5e5,
        u128::from(stream) << 1,
    )
}

/// Launch velocity for a height profile through `h0` → `h1` in `t` seconds,
/// written as mean vertical speed minus the half-interval gravity term.
fn generator_v0(h0: f64, h1: f64, t: f64, a: f64) -> f64 {
    (h1 - h0) / t - a * t / 2.0
}

fn pick<T: Copy>(rng: &mut Pcg64, items: &[(T, f64)]) -> T {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut r = rng.random_range(0.0..total);
    for &(item, w) in items {
        if r < w {
            return item;
        }
        r -= w;
    }
    items[items.len() - 1].0
}

fn side_sign(id: PlayerId) -> f64 {
    // p1 holds the near end for the whole clip
    match id {
        PlayerId::P1 => -1.0,
        PlayerId::P2 => 1.0,
    }
}

fn serving_deuce_court(s: &ScoreState) -> bool {
    let played = match s.tiebreak {
        Some(tb) => u32::from(tb[0]) + u32::from(tb[1]),
        None => {
            let v = |p: GamePoints| match p {
                GamePoints::Love => 0,
                GamePoints::Fifteen => 1,
                GamePoints::Thirty => 2,
                GamePoints::Forty => 3,
                GamePoints::Advantage => 4,
            };
            v(s.points[0]) + v(s.points[1])
        }
    };
    played % 2 == 0
}

struct Rally {
    players: BTreeMap<PlayerId, CourtPoint>,
    keyframes: Vec<TruthKeyframe>,
    outcome: PointOutcome,
}

fn generate_point(rng: &mut Pcg64, score: &ScoreState, first_contact: u32, fps: f64) -> Rally {
    let server = score.server;
    let receiver = server.other();
    let ss = side_sign(server);
    let deuce = serving_deuce_court(score);
    // a server's right is +x at the near end and −x at the far end
    let right = -ss;
    let lateral = if deuce { right } else { -right };
    let s = CourtPoint::new(
        lateral * rng.random_range(0.3..1.0),
        ss * (HALF_LENGTH_M + rng.random_range(0.2..0.6)),
        0.0,
    );

    // serve target in the diagonal box, banded by direction preference
    let band = SINGLES_HALF_WIDTH_M / 3.0;
    let (lo, hi) = pick(rng, &[((0.15, band - 0.1), 0.4), ((band + 0.1, 2.0 * band - 0.1), 0.2), ((2.0 * band + 0.1, 3.9), 0.4)]);
    let target = CourtPoint::new(
        -lateral * rng.random_range(lo..hi),
        -ss * rng.random_range(3.0..5.5),
        0.0,
    );
    let ry = -ss * rng.random_range(12.2..13.5);
    let lambda = (ry - s.y) / (target.y - s.y);
    // receivers stay inside the sidelines so every rally bounce on the line
    // between the two players lands in court
    let rx = (s.x + lambda * (target.x - s.x)).clamp(-4.0, 4.0);
    let r = CourtPoint::new(rx, ry, 0.0);

    let mut players = BTreeMap::new();
    players.insert(server, s);
    players.insert(receiver, r);

    let shots: usize = rng.random_range(1..=15);
    let how = if shots == 1 {
        OutcomeKind::Ace
    } else {
        pick(rng, &[(OutcomeKind::Winner, 0.4), (OutcomeKind::ForcedError, 0.3), (OutcomeKind::UnforcedError, 0.3)])
    };

    let mut kfs = Vec::new();
    let mut frame = first_contact;
    let mut hitter = server;
    for shot in 0..shots {
        let h = players[&hitter];
        let o = players[&hitter.other()];
        let serve = shot == 0;
        let (height, spin) = if serve {
            (rng.random_range(2.5..3.0), SpinType::Topspin)
        } else {
            let spin = pick(rng, &[(SpinType::Topspin, 0.7), (SpinType::Backspin, 0.3)]);
            (rng.random_range(0.5..1.3), spin)
        };
        kfs.push(TruthKeyframe {
            frame,
            kind: KeyframeKind::Contact,
            planar: h,
            height,
            spin: Some(spin),
            player_id: Some(hitter),
        });
        let speed = if serve {
            rng.random_range(28.0..40.0)
        } else {
            rng.random_range(15.0..28.0)
        };
        let last = shot + 1 == shots;
        if last {
            let os = side_sign(hitter.other());
            let b = match how {
                OutcomeKind::Ace => CourtPoint::new(
                    -lateral * rng.random_range(0.15..3.9),
                    os * rng.random_range(2.0..SERVICE_LINE_Y_M - 0.3),
                    0.0,
                ),
                OutcomeKind::Winner => CourtPoint::new(
                    rng.random_range(-3.9..3.9),
                    os * rng.random_range(2.0..HALF_LENGTH_M - 0.4),
                    0.0,
                ),
                _ => {
                    if rng.random_bool(0.5) {
                        let x = rng.random_range(SINGLES_HALF_WIDTH_M + 0.2..DOUBLES_HALF_WIDTH_M + 0.8);
                        let x = if rng.random_bool(0.5) { x } else { -x };
                        CourtPoint::new(x, os * rng.random_range(3.0..11.0), 0.0)
                    } else {
                        CourtPoint::new(
                            rng.random_range(-4.0..4.0),
                            os * rng.random_range(HALF_LENGTH_M + 0.2..HALF_LENGTH_M + 1.5),
                            0.0,
                        )
                    }
                }
            };
            let n = ((h.distance(&b) / speed * fps).round() as u32).max(MIN_GAP_FRAMES);
            frame += n;
            kfs.push(TruthKeyframe {
                frame,
                kind: KeyframeKind::Bounce,
                planar: b,
                height: 0.0,
                spin: None,
                player_id: None,
            });
            break;
        }
        // bounce lies on the straight path to the other player so planar
        // velocity is unchanged across it
        let n = ((h.distance(&o) / speed * fps).round() as u32).max(4 * MIN_GAP_FRAMES);
        let depth = if serve {
            rng.random_range(3.0..5.5)
        } else {
            let (lo, hi) = pick(rng, &[((3.0, 5.5), 0.2), ((5.5, 8.5), 0.35), ((8.5, 11.3), 0.45)]);
            rng.random_range(lo..hi)
        };
        let frac = (side_sign(hitter.other()) * depth - h.y) / (o.y - h.y);
        let k = ((frac * f64::from(n)).round() as u32).clamp(MIN_GAP_FRAMES, n - MIN_GAP_FRAMES);
        let at = |k: u32| h.lerp(&o, f64::from(k) / f64::from(n));
        let net_frac = -h.y / (o.y - h.y);
        let k_net = (net_frac * f64::from(n)).round() as u32;
        if rng.random_bool(0.15) && k_net >= MIN_GAP_FRAMES && k >= k_net + MIN_GAP_FRAMES {
            kfs.push(TruthKeyframe {
                frame: frame + k_net,
                kind: KeyframeKind::NetCord,
                planar: at(k_net),
                height: NET_CORD_HEIGHT_M,
                spin: None,
                player_id: None,
            });
        }
        kfs.push(TruthKeyframe {
            frame: frame + k,
            kind: KeyframeKind::Bounce,
            planar: at(k),
            height: 0.0,
            spin: None,
            player_id: None,
        });
        frame += n;
        hitter = hitter.other();
    }

    let last_hitter = kfs
        .iter()
        .rev()
        .find_map(|k| k.player_id)
        .expect("every rally has a contact");
    let winner = match how {
        OutcomeKind::Ace | OutcomeKind::Winner => last_hitter,
        _ => last_hitter.other(),
    };
    Rally {
        players,
        keyframes: kfs,
        outcome: PointOutcome { winner, how },
    }
}

/// Generates `cfg.points` consecutive points of a fresh match.
pub fn simulate_rally(cfg: &SimConfig) -> Result<GroundTruthRally> {
    cfg.validate()?;
    let camera = cfg.camera.homography(cfg.width, cfg.height)?;
    let before = ScoreState::new(PlayerId::P1, cfg.format);
    let mut score = before;
    let mut points = Vec::with_capacity(cfg.points);
    let mut start = PRE_ROLL_FRAMES;
    for index in 0..cfg.points {
        let mut rng = rng_for(cfg.seed, index as u64);
        let rally = generate_point(&mut rng, &score, start + MARKER_MARGIN_FRAMES, cfg.fps);
        let mut launch_velocities = Vec::new();
        let mut spin = SpinType::Topspin;
        for w in rally.keyframes.windows(2) {
            if let Some(s) = w[0].spin {
                spin = s;
            }
            let t = f64::from(w[1].frame - w[0].frame) / cfg.fps;
            launch_velocities.push(generator_v0(w[0].height, w[1].height, t, spin.acceleration()));
        }
        let end = rally.keyframes.last().expect("non-empty").frame + MARKER_MARGIN_FRAMES;
        points.push(TruthPoint {
            index,
            start_frame: start,
            end_frame: end,
            outcome: rally.outcome,
            score_before: score,
            players: rally.players,
            keyframes: rally.keyframes,
            launch_velocities,
        });
        score = advance_score(&score, rally.outcome.winner)?;
        if score.winner.is_some() && index + 1 < cfg.points {
            return Err(Error::Config(format!("match finished after {} points", index + 1)));
        }
        let gap_s = rng.random_range(8.0..14.0);
        start = end + (gap_s * cfg.fps).round() as u32;
    }
    Ok(GroundTruthRally {
        clip_id: format!("sim-{}", cfg.seed),
        fps: cfg.fps,
        first_frame: 0,
        last_frame: start - 1,
        camera,
        score_before: before,
        score_after: score,
        points,
    })
}

/// Renders `rally` into a clip document with the configured pixel noise,
/// dropout and quantization. Returns the clip and its ground truth.
pub fn project_clip(rally: &GroundTruthRally, cfg: &SimConfig) -> Result<(ClipDocument, GroundTruthRally)> {
    cfg.validate()?;
    let h = rally.camera;
    let mut rng = rng_for(cfg.seed, 1 << 32);
    let noise = Normal::new(0.0, cfg.pixel_noise_sigma_px).map_err(|e| Error::Config(e.to_string()))?;
    let quantize = |v: f64| if cfg.quantize_pixels { v.round() } else { v };
    let project = |p: CourtPoint| -> Result<Pixel> {
        let (u, v) = h.apply(p.x, p.y)?;
        Ok(Pixel::new(u, v))
    };
    let observe = |p: CourtPoint, rng: &mut Pcg64| -> Result<Option<Pixel>> {
        let px = project(p)?;
        let u = px.u + noise.sample(rng);
        let v = px.v + noise.sample(rng);
        if rng.random_bool(cfg.dropout_rate) {
            return Ok(None);
        }
        Ok(Some(Pixel::new(quantize(u), quantize(v))))
    };

    let mut keypoints = Vec::with_capacity(14);
    for k in reference_keypoints() {
        let px = project(k)?;
        let px = Pixel::new(quantize(px.u), quantize(px.v));
        let inside = (0.0..=f64::from(cfg.width)).contains(&px.u) && (0.0..=f64::from(cfg.height)).contains(&px.v);
        keypoints.push(inside.then_some(px));
    }

    let trajectories = rally
        .points
        .iter()
        .map(|p| rally.trajectory(p))
        .collect::<Result<Vec<_>>>()?;
    let contacts: BTreeMap<u32, PlayerId> = rally
        .points
        .iter()
        .flat_map(|p| p.keyframes.iter())
        .filter_map(|k| (k.kind == KeyframeKind::Contact).then(|| (k.frame, k.player_id.expect("contact"))))
        .collect();

    let mut frames = Vec::new();
    for index in rally.first_frame..=rally.last_frame {
        let t = rally.time_of(index);
        let ball = rally
            .points
            .iter()
            .zip(&trajectories)
            .find(|(p, _)| {
                let (a, b) = (p.keyframes[0].frame, p.keyframes[p.keyframes.len() - 1].frame);
                index >= a && index <= b
            })
            .and_then(|(_, tr)| tr.position_at(t));
        let ball_px = match ball {
            Some(b) => observe(CourtPoint::new(b.x, b.y, 0.0), &mut rng)?,
            None => None,
        };
        let mut players = Vec::new();
        for id in [PlayerId::P1, PlayerId::P2] {
            let Some(spot) = rally.player_at(id, index) else {
                continue;
            };
            let foot_px = observe(spot, &mut rng)?;
            let joints_px = match (cfg.joints && contacts.get(&index) == Some(&id), foot_px) {
                (true, Some(f)) => Some(arm_skeleton(f, &mut rng)),
                _ => None,
            };
            players.push(PlayerSample { id, foot_px, joints_px });
        }
        frames.push(FrameSample {
            index,
            t,
            ball_px,
            players,
        });
    }

    let mut events = Vec::new();
    let mut annotations = Vec::new();
    for p in &rally.points {
        events.push(EventAnnotation {
            frame: p.start_frame,
            kind: EventKind::PointStart,
            player_id: None,
            how: None,
        });
        for k in &p.keyframes {
            let kind = match k.kind {
                KeyframeKind::Contact => EventKind::Contact,
                KeyframeKind::Bounce => EventKind::Bounce,
                KeyframeKind::NetCord => EventKind::NetCord,
                KeyframeKind::Annotated => {
                    annotations.push(KeyframeAnnotation {
                        frame: k.frame,
                        height_m: Some(k.height),
                        spin: k.spin,
                    });
                    continue;
                }
            };
            events.push(EventAnnotation {
                frame: k.frame,
                kind,
                player_id: k.player_id,
                how: None,
            });
            if kind == EventKind::Contact {
                annotations.push(KeyframeAnnotation {
                    frame: k.frame,
                    height_m: Some(k.height),
                    spin: k.spin,
                });
            }
        }
        events.push(EventAnnotation {
            frame: p.end_frame,
            kind: EventKind::PointEnd,
            player_id: Some(p.outcome.winner),
            how: Some(p.outcome.how),
        });
    }

    let last = rally.points.last().ok_or_else(|| Error::validation("rally has no points"))?;
    let doc = ClipDocument {
        header: ClipHeader {
            clip_id: rally.clip_id.clone(),
            fps: rally.fps,
            width: cfg.width,
            height: cfg.height,
            court_keypoints_px: keypoints,
            score_before: rally.score_before,
            point_outcome: last.outcome,
        },
        frames,
        events,
        keyframe_annotations: annotations,
    };
    Ok((doc, rally.clone()))
}

/// Shoulder–elbow–wrist chain drawn above the foot pixel.
fn arm_skeleton(foot: Pixel, rng: &mut Pcg64) -> BTreeMap<String, Pixel> {
    let shoulder = Pixel::new(foot.u, foot.v - 60.0);
    let a: f64 = rng.random_range(-1.2..0.4);
    let elbow = Pixel::new(shoulder.u + 18.0 * a.cos(), shoulder.v + 18.0 * a.sin());
    let b = a + rng.random_range(-1.5..-0.2);
    let wrist = Pixel::new(elbow.u + 16.0 * b.cos(), elbow.v + 16.0 * b.sin());
    [("right_shoulder", shoulder), ("right_elbow", elbow), ("right_wrist", wrist)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// Per-axis root-mean-square errors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisErrors {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub ball_rmse_m: f64,
    pub ball_max_m: f64,
    pub player_rmse_m: f64,
    pub player_max_m: f64,
    pub ball_per_axis: AxisErrors,
    pub player_per_axis: AxisErrors,
    pub ball_samples: usize,
    pub player_samples: usize,
}

#[derive(Default)]
struct Accum {
    n: usize,
    sq: [f64; 3],
    max: f64,
}

impl Accum {
    fn add(&mut self, truth: CourtPoint, got: CourtPoint) {
        let d = [got.x - truth.x, got.y - truth.y, got.z - truth.z];
        for (s, v) in self.sq.iter_mut().zip(d) {
            *s += v * v;
        }
        self.max = self.max.max(truth.distance(&got));
        self.n += 1;
    }

    fn rmse(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.sq.iter().sum::<f64>() / self.n as f64).sqrt()
    }

    fn axes(&self) -> AxisErrors {
        if self.n == 0 {
            return AxisErrors::default();
        }
        let n = self.n as f64;
        AxisErrors {
            x: (self.sq[0] / n).sqrt(),
            y: (self.sq[1] / n).sqrt(),
            z: (self.sq[2] / n).sqrt(),
        }
    }
}

/// Compares `scene` with the truth at every truth frame: the ball over each
/// point's keyframe range, the players over the whole clip.
pub fn round_trip_report(truth: &GroundTruthRally, scene: &SceneTimeline) -> Result<RoundTripReport> {
    let (t0, t1) = (truth.time_of(truth.first_frame), truth.time_of(truth.last_frame));
    if (scene.span.start - t0).abs() > 1e-9 || (scene.span.end - t1).abs() > 1e-9 {
        return Err(Error::validation(format!(
            "span mismatch: truth [{t0}, {t1}] vs scene [{}, {}]",
            scene.span.start, scene.span.end
        )));
    }
    if scene.points.len() != truth.points.len() {
        return Err(Error::validation(format!(
            "point count mismatch: truth {} vs scene {}",
            truth.points.len(),
            scene.points.len()
        )));
    }
    let mut ball = Accum::default();
    for p in &truth.points {
        let tr = truth.trajectory(p)?;
        let got = scene
            .trajectory(p.index)
            .ok_or_else(|| Error::validation(format!("scene lacks a trajectory for point {}", p.index)))?;
        let (a, b) = (p.keyframes[0].frame, p.keyframes[p.keyframes.len() - 1].frame);
        for f in a..=b {
            let t = truth.time_of(f);
            let want = tr.position_at(t).expect("inside truth span");
            let have = got
                .position_at(t)
                .ok_or_else(|| Error::validation(format!("scene trajectory misses t={t}")))?;
            ball.add(want, have);
        }
    }
    let mut players = Accum::default();
    for f in truth.first_frame..=truth.last_frame {
        let t = truth.time_of(f);
        for id in [PlayerId::P1, PlayerId::P2] {
            if let Some(want) = truth.player_at(id, f) {
                let have = scene
                    .player_position(id, t)
                    .ok_or_else(|| Error::validation(format!("scene lacks {id} at t={t}")))?;
                players.add(want, have);
            }
        }
    }
    Ok(RoundTripReport {
        ball_rmse_m: ball.rmse(),
        ball_max_m: ball.max,
        player_rmse_m: players.rmse(),
        player_max_m: players.max,
        ball_per_axis: ball.axes(),
        player_per_axis: players.axes(),
        ball_samples: ball.n,
        player_samples: players.n,
    })
}
