//! Ball height between keyframes and assembly of the 3-D trajectory.

use serde::{Deserialize, Serialize};

use crate::court::{CourtPoint, NET_CORD_HEIGHT_M};
use crate::error::{Error, Result};
use crate::refine::{reconstruct_planar, PlanarSegment};
use crate::scoring::PlayerId;

/// Spin class of a stroke; heavier backspin lift is modelled as a stronger
/// effective downward acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinType {
    Topspin,
    Backspin,
}

impl SpinType {
    /// Effective vertical acceleration in m/s².
    pub fn acceleration(self) -> f64 {
        match self {
            SpinType::Topspin => -9.81,
            SpinType::Backspin => -10.81,
        }
    }
}

/// Constant-acceleration height profile between two keyframes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalSegment {
    pub duration: f64,
    pub h0: f64,
    pub h1: f64,
    pub accel: f64,
    pub v0: f64,
}

impl VerticalSegment {
    /// Height `tau` seconds into the segment; the end keyframe is exact.
    pub fn height(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return self.h0;
        }
        if tau >= self.duration {
            return self.h1;
        }
        self.h0 + self.v0 * tau + 0.5 * self.accel * tau * tau
    }

    /// Lowest height over the segment (endpoints or the interior extremum).
    pub fn min_height(&self) -> f64 {
        let mut m = self.h0.min(self.h1);
        if self.accel > 0.0 {
            let tau = -self.v0 / self.accel;
            if tau > 0.0 && tau < self.duration {
                m = m.min(self.height(tau));
            }
        }
        m
    }
}

/// Solves `h1 = h0 + v0·t + ½·a·t²` for the launch velocity.
pub fn solve_vertical_segment(h0: f64, h1: f64, duration: f64, spin: SpinType) -> Result<VerticalSegment> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::validation(format!("segment duration must be > 0, got {duration}")));
    }
    if !(h0.is_finite() && h1.is_finite() && h0 >= 0.0 && h1 >= 0.0) {
        return Err(Error::validation("segment heights must be finite and ≥ 0"));
    }
    let a = spin.acceleration();
    let v0 = (h1 - h0 - 0.5 * a * duration * duration) / duration;
    Ok(VerticalSegment {
        duration,
        h0,
        h1,
        accel: a,
        v0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyframeKind {
    Contact,
    Bounce,
    NetCord,
    Annotated,
}

/// A ball state the trajectory must pass through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallKeyframe {
    pub t: f64,
    pub kind: KeyframeKind,
    pub planar: CourtPoint,
    /// Required for contacts and annotated keyframes; bounces sit on the
    /// ground and net-cord touches at cord height.
    #[serde(default)]
    pub height: Option<f64>,
    #[serde(default)]
    pub spin: Option<SpinType>,
    #[serde(default)]
    pub player_id: Option<PlayerId>,
}

impl BallKeyframe {
    pub fn resolved_height(&self) -> Result<f64> {
        match self.kind {
            KeyframeKind::Bounce => Ok(0.0),
            KeyframeKind::NetCord => Ok(NET_CORD_HEIGHT_M),
            _ => self
                .height
                .ok_or_else(|| Error::validation(format!("keyframe at t={} lacks a height", self.t))),
        }
    }
}

/// One point's piecewise planar + vertical ball trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallTrajectory3D {
    pub keyframes: Vec<BallKeyframe>,
    pub planar: Vec<PlanarSegment>,
    pub vertical: Vec<VerticalSegment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Builds the trajectory through `keyframes` (strictly increasing in time).
/// Each segment uses the spin of the most recent contact.
pub fn assemble_ball_trajectory(keyframes: &[BallKeyframe]) -> Result<BallTrajectory3D> {
    if keyframes.len() < 2 {
        return Err(Error::validation("trajectory needs at least 2 keyframes"));
    }
    let planar_kfs: Vec<(f64, CourtPoint)> = keyframes
        .iter()
        .map(|k| (k.t, CourtPoint::planar(k.planar.x, k.planar.y)))
        .collect();
    let planar = reconstruct_planar(&planar_kfs)?;

    let mut spin = None;
    let mut vertical = Vec::with_capacity(planar.len());
    let mut warnings = Vec::new();
    for w in keyframes.windows(2) {
        if w[0].kind == KeyframeKind::Contact {
            spin = Some(
                w[0].spin
                    .ok_or_else(|| Error::validation(format!("contact at t={} lacks spin", w[0].t)))?,
            );
        }
        let spin = spin
            .or(w[0].spin)
            .ok_or_else(|| Error::validation(format!("no spin known for segment starting at t={}", w[0].t)))?;
        let seg = solve_vertical_segment(w[0].resolved_height()?, w[1].resolved_height()?, w[1].t - w[0].t, spin)?;
        if seg.min_height() < 0.0 {
            warnings.push(format!(
                "physical inconsistency: height below ground in segment starting at t={}; clamped to 0",
                w[0].t
            ));
        }
        vertical.push(seg);
    }
    Ok(BallTrajectory3D {
        keyframes: keyframes.to_vec(),
        planar,
        vertical,
        warnings,
    })
}

impl BallTrajectory3D {
    pub fn start(&self) -> f64 {
        self.keyframes[0].t
    }

    pub fn end(&self) -> f64 {
        self.keyframes[self.keyframes.len() - 1].t
    }

    /// 3-D position at `t`, or `None` outside the trajectory span.
    pub fn position_at(&self, t: f64) -> Option<CourtPoint> {
        if !(t >= self.start() && t <= self.end()) {
            return None;
        }
        let i = self
            .planar
            .partition_point(|s| s.t1 < t)
            .min(self.planar.len() - 1);
        let p = self.planar[i].at(t);
        let h = self.vertical[i].height(t - self.planar[i].t0).max(0.0);
        Some(CourtPoint::new(p.x, p.y, h))
    }
}

/// Samples at `t_start + n / rate` up to the trajectory end.
pub fn sample_trajectory(traj: &BallTrajectory3D, rate_hz: f64) -> Result<Vec<(f64, CourtPoint)>> {
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::Config(format!("sample rate must be > 0, got {rate_hz}")));
    }
    let (t0, t1) = (traj.start(), traj.end());
    let mut out = Vec::new();
    for n in 0u64.. {
        let t = t0 + n as f64 / rate_hz;
        if t > t1 + 1e-9 {
            break;
        }
        let t = t.min(t1);
        out.push((t, traj.position_at(t).expect("inside span")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kf(t: f64, kind: KeyframeKind, x: f64, y: f64, h: Option<f64>, spin: Option<SpinType>) -> BallKeyframe {
        BallKeyframe {
            t,
            kind,
            planar: CourtPoint::planar(x, y),
            height: h,
            spin,
            player_id: None,
        }
    }

    #[test]
    fn level_topspin() {
        let s = solve_vertical_segment(1.0, 1.0, 1.0, SpinType::Topspin).unwrap();
        assert!((s.v0 - 4.905).abs() < 1e-12);
    }

    #[test]
    fn free_fall() {
        let s = solve_vertical_segment(1.0, 0.0, 0.4515, SpinType::Topspin).unwrap();
        assert!(s.v0.abs() < 1e-3);
    }

    #[test]
    fn backspin_drop() {
        let s = solve_vertical_segment(0.9, 0.0, 0.5, SpinType::Backspin).unwrap();
        assert!((s.v0 - 0.9025).abs() < 1e-12);
        assert!(solve_vertical_segment(0.9, 0.0, 0.0, SpinType::Backspin).is_err());
        assert!(solve_vertical_segment(-0.1, 0.0, 1.0, SpinType::Backspin).is_err());
    }

    #[test]
    fn trajectory_needs_two_keyframes_and_spin() {
        assert!(assemble_ball_trajectory(&[]).is_err());
        let no_spin = [
            kf(0.0, KeyframeKind::Annotated, 0.0, 0.0, Some(1.0), None),
            kf(1.0, KeyframeKind::Bounce, 0.0, 5.0, None, None),
        ];
        assert!(assemble_ball_trajectory(&no_spin).is_err());
    }

    #[test]
    fn serve_bounce_return() {
        let kfs = [
            kf(0.0, KeyframeKind::Contact, 0.5, -12.0, Some(2.6), Some(SpinType::Topspin)),
            kf(0.6, KeyframeKind::Bounce, -1.0, 5.0, None, None),
            kf(1.2, KeyframeKind::Contact, -1.5, 12.0, Some(1.0), Some(SpinType::Backspin)),
            kf(2.0, KeyframeKind::Bounce, 0.0, -8.0, None, None),
        ];
        let traj = assemble_ball_trajectory(&kfs).unwrap();
        assert_eq!(traj.vertical[1].accel, -9.81);
        assert_eq!(traj.vertical[2].accel, -10.81);
        for k in &kfs {
            let p = traj.position_at(k.t).unwrap();
            assert_eq!((p.x, p.y), (k.planar.x, k.planar.y));
            assert_eq!(p.z, k.resolved_height().unwrap());
        }
        assert!(traj.position_at(2.1).is_none());
        assert!(traj.warnings.is_empty());
    }

    proptest! {
        #[test]
        fn segment_hits_both_ends(h0 in 0.0f64..5.0, h1 in 0.0f64..5.0, t in 0.05f64..3.0, back in any::<bool>()) {
            let spin = if back { SpinType::Backspin } else { SpinType::Topspin };
            let s = solve_vertical_segment(h0, h1, t, spin).unwrap();
            let closed = h0 + s.v0 * t + 0.5 * s.accel * t * t;
            prop_assert!((closed - h1).abs() <= 1e-9);
            prop_assert_eq!(s.height(0.0), h0);
        }

        #[test]
        fn doubling_rate_supersamples(n in 2usize..6, rate in 10.0f64..120.0) {
            let kfs: Vec<BallKeyframe> = (0..n).map(|i| {
                let kind = if i % 2 == 0 { KeyframeKind::Contact } else { KeyframeKind::Bounce };
                kf(i as f64 * 0.7, kind, i as f64, (-1f64).powi(i as i32) * 8.0, Some(1.0), Some(SpinType::Topspin))
            }).collect();
            let traj = assemble_ball_trajectory(&kfs).unwrap();
            let coarse = sample_trajectory(&traj, rate).unwrap();
            let fine = sample_trajectory(&traj, 2.0 * rate).unwrap();
            for (i, (t, p)) in coarse.iter().enumerate() {
                let (tf, pf) = fine[2 * i];
                prop_assert!((t - tf).abs() <= 1e-12);
                prop_assert!(p.distance(&pf) <= 1e-9);
            }
            for k in &kfs {
                let p = traj.position_at(k.t).unwrap();
                prop_assert!((p.z - k.resolved_height().unwrap()).abs() <= 1e-9);
            }
        }
    }
}
