use serde::{Deserialize, Serialize};

use crate::court::CourtPoint;
use crate::error::{Error, Result};

use super::{Anchor, ShotSize};

/// A fixed camera placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPose {
    pub position: CourtPoint,
    pub look_at: CourtPoint,
}

impl AnchorPose {
    const fn new(position: [f64; 3], look_at: [f64; 3]) -> Self {
        Self {
            position: CourtPoint::new(position[0], position[1], position[2]),
            look_at: CourtPoint::new(look_at[0], look_at[1], look_at[2]),
        }
    }
}

/// Offset of the follow camera from its player: `behind_m` further from the
/// net than the player, at `height_m` above the ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowOffset {
    pub behind_m: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RigTable {
    pub baseline: AnchorPose,
    pub sideline: AnchorPose,
    pub corner: AnchorPose,
    pub birds_eye: AnchorPose,
    pub net_cam: AnchorPose,
    pub court_level: AnchorPose,
    pub judge_view: AnchorPose,
    pub follow_cam: FollowOffset,
}

impl Default for RigTable {
    fn default() -> Self {
        Self {
            baseline: AnchorPose::new([0.0, -18.0, 6.0], [0.0, 3.0, 1.0]),
            sideline: AnchorPose::new([12.0, 0.0, 4.0], [0.0, 0.0, 1.0]),
            corner: AnchorPose::new([9.0, -14.0, 5.0], [0.0, 0.0, 1.0]),
            // tilted slightly off vertical so the view direction and the
            // orbit axis never coincide
            birds_eye: AnchorPose::new([0.0, -16.0, 25.0], [0.0, 0.0, 0.0]),
            net_cam: AnchorPose::new([2.5, 0.6, 1.1], [0.0, -8.0, 1.0]),
            court_level: AnchorPose::new([0.0, -13.0, 0.8], [0.0, 3.0, 1.0]),
            judge_view: AnchorPose::new([8.0, 0.0, 3.0], [0.0, 0.0, 1.0]),
            follow_cam: FollowOffset {
                behind_m: 2.5,
                height_m: 1.8,
            },
        }
    }
}

impl RigTable {
    /// Fixed pose of `anchor`; the follow camera has none.
    pub fn pose(&self, anchor: Anchor) -> Option<AnchorPose> {
        Some(match anchor {
            Anchor::Baseline => self.baseline,
            Anchor::Sideline => self.sideline,
            Anchor::Corner => self.corner,
            Anchor::BirdsEye => self.birds_eye,
            Anchor::NetCam => self.net_cam,
            Anchor::CourtLevel => self.court_level,
            Anchor::JudgeView => self.judge_view,
            Anchor::FollowCam => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("baseline", self.baseline),
            ("sideline", self.sideline),
            ("corner", self.corner),
            ("birds_eye", self.birds_eye),
            ("net_cam", self.net_cam),
            ("court_level", self.court_level),
            ("judge_view", self.judge_view),
        ];
        for (name, p) in named {
            if !(p.position.is_finite() && p.look_at.is_finite()) || p.position.z <= 0.0 {
                return Err(Error::Config(format!(
                    "cinematography.rig.{name}: position must be finite with z > 0"
                )));
            }
            if p.position.distance(&p.look_at) < 1e-6 {
                return Err(Error::Config(format!("cinematography.rig.{name}: look_at equals position")));
            }
        }
        let f = self.follow_cam;
        if !(f.behind_m.is_finite() && f.height_m.is_finite() && f.height_m > 0.0) {
            return Err(Error::Config("cinematography.rig.follow_cam: height must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldOfView {
    pub wide: f64,
    pub medium: f64,
    pub close_up: f64,
}

impl Default for FieldOfView {
    fn default() -> Self {
        Self {
            wide: 70.0,
            medium: 50.0,
            close_up: 30.0,
        }
    }
}

impl FieldOfView {
    pub fn of(&self, size: ShotSize) -> f64 {
        match size {
            ShotSize::Wide => self.wide,
            ShotSize::Medium => self.medium,
            ShotSize::CloseUp => self.close_up,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CinematographyConfig {
    pub rig: RigTable,
    pub fov_deg: FieldOfView,
    pub max_linear_speed_mps: f64,
    pub max_angular_speed_dps: f64,
    pub max_pedestal_speed_mps: f64,
    pub max_motions_per_point: usize,
    pub slow_motion_factor: f64,
    pub slow_motion_extent_s: f64,
    /// Replay source starts this long before the first ball keyframe.
    pub replay_lead_s: f64,
    /// Replay source ends this long after the last ball keyframe.
    pub replay_tail_s: f64,
    pub reaction_s: f64,
    pub analysis_hold_s: f64,
    /// Shots shorter than this are not planned.
    pub min_shot_s: f64,
    pub dolly_distance_m: f64,
    pub arc_deg: f64,
    /// Nominal duration of a camera move before speed caps stretch it.
    pub motion_duration_s: f64,
    /// Still time kept at the end of a moving shot.
    pub motion_settle_s: f64,
    pub tactic_min_shots: usize,
}

impl Default for CinematographyConfig {
    fn default() -> Self {
        Self {
            rig: RigTable::default(),
            fov_deg: FieldOfView::default(),
            max_linear_speed_mps: 2.0,
            max_angular_speed_dps: 15.0,
            max_pedestal_speed_mps: 1.0,
            max_motions_per_point: 2,
            slow_motion_factor: 0.5,
            slow_motion_extent_s: 0.3,
            replay_lead_s: 0.2,
            replay_tail_s: 0.3,
            reaction_s: 3.0,
            analysis_hold_s: 4.0,
            min_shot_s: 1.0,
            dolly_distance_m: 3.0,
            arc_deg: 30.0,
            motion_duration_s: 2.0,
            motion_settle_s: 0.25,
            tactic_min_shots: 9,
        }
    }
}

impl CinematographyConfig {
    pub fn validate(&self) -> Result<()> {
        self.rig.validate()?;
        let positive = [
            ("max_linear_speed_mps", self.max_linear_speed_mps),
            ("max_angular_speed_dps", self.max_angular_speed_dps),
            ("max_pedestal_speed_mps", self.max_pedestal_speed_mps),
            ("slow_motion_extent_s", self.slow_motion_extent_s),
            ("reaction_s", self.reaction_s),
            ("analysis_hold_s", self.analysis_hold_s),
            ("min_shot_s", self.min_shot_s),
            ("motion_duration_s", self.motion_duration_s),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("cinematography.{name} must be > 0")));
            }
        }
        let non_negative = [
            ("replay_lead_s", self.replay_lead_s),
            ("replay_tail_s", self.replay_tail_s),
            ("dolly_distance_m", self.dolly_distance_m),
            ("arc_deg", self.arc_deg),
            ("motion_settle_s", self.motion_settle_s),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("cinematography.{name} must be ≥ 0")));
            }
        }
        if !(self.slow_motion_factor > 0.0 && self.slow_motion_factor <= 1.0) {
            return Err(Error::Config("cinematography.slow_motion_factor must be in (0, 1]".into()));
        }
        for (name, v) in [
            ("wide", self.fov_deg.wide),
            ("medium", self.fov_deg.medium),
            ("close_up", self.fov_deg.close_up),
        ] {
            if !(20.0..=110.0).contains(&v) {
                return Err(Error::Config(format!("cinematography.fov_deg.{name} must be in [20, 110]")));
            }
        }
        Ok(())
    }
}
