//! Track refinement: temporal gap filling, smoothing, resolution-aware
//! stabilization and the two-stage ball position check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::court::CourtPoint;
use crate::error::{Error, Result};
use crate::ingest::{EventAnnotation, EventKind};
use crate::projection::Calibration;
use crate::scoring::PlayerId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefinementConfig {
    pub knn_k: usize,
    pub ma_window: usize,
    pub stabilization_deadband_px: f64,
    pub outlier_threshold_m: f64,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            knn_k: 5,
            ma_window: 5,
            stabilization_deadband_px: 1.0,
            outlier_threshold_m: 3.0,
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<()> {
        if self.knn_k == 0 {
            return Err(Error::Config("refinement.knn_k must be ≥ 1".into()));
        }
        if self.ma_window == 0 || self.ma_window % 2 == 0 {
            return Err(Error::Config("refinement.ma_window must be odd".into()));
        }
        if !(self.stabilization_deadband_px.is_finite() && self.stabilization_deadband_px >= 0.0) {
            return Err(Error::Config("refinement.stabilization_deadband_px must be ≥ 0".into()));
        }
        if !(self.outlier_threshold_m.is_finite() && self.outlier_threshold_m > 0.0) {
            return Err(Error::Config("refinement.outlier_threshold_m must be > 0".into()));
        }
        Ok(())
    }
}

/// Indices of the `k` present samples nearest to `i` in frame distance;
/// equal distances prefer the earlier frame.
fn nearest_present(present: &[usize], i: usize, k: usize) -> Vec<usize> {
    let split = present.partition_point(|&j| j < i);
    let (mut l, mut r) = (split, split);
    let mut out = Vec::with_capacity(k);
    while out.len() < k && (l > 0 || r < present.len()) {
        let take_left = match (l > 0, r < present.len()) {
            (true, true) => i - present[l - 1] <= present[r] - i,
            (left, _) => left,
        };
        if take_left {
            l -= 1;
            out.push(present[l]);
        } else {
            out.push(present[r]);
            r += 1;
        }
    }
    out
}

/// Fills every absent sample with the unweighted mean of the `k` temporally
/// nearest present samples. Present samples are returned unchanged.
pub fn fill_gaps_knn(series: &[Option<CourtPoint>], k: usize) -> Result<Vec<CourtPoint>> {
    if k == 0 {
        return Err(Error::Config("knn k must be ≥ 1".into()));
    }
    let present: Vec<usize> = series
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|_| i))
        .collect();
    if present.len() < k {
        return Err(Error::InsufficientData {
            needed: k,
            got: present.len(),
        });
    }
    Ok(series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.unwrap_or_else(|| {
                let nn = nearest_present(&present, i, k);
                let sum = nn.iter().fold(CourtPoint::default(), |acc, &j| {
                    acc + series[j].expect("present index")
                });
                sum.scale(1.0 / nn.len() as f64)
            })
        })
        .collect())
}

/// Centered moving average; near the ends the window shrinks symmetrically
/// so it stays centered.
pub fn smooth_moving_average(series: &[CourtPoint], window: usize) -> Result<Vec<CourtPoint>> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::Config(format!("moving-average window must be odd, got {window}")));
    }
    let half = window / 2;
    let n = series.len();
    Ok((0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            if h == 0 {
                return series[i];
            }
            // mean of offsets from the centre sample keeps constants exact
            let c = series[i];
            let sum = series[i - h..=i + h]
                .iter()
                .fold(CourtPoint::default(), |acc, p| acc + (*p - c));
            c + sum.scale(1.0 / (2 * h + 1) as f64)
        })
        .collect())
}

/// Suppresses sub-resolution jitter: a sample is replaced by the last
/// emitted position when it moved less than the court-space footprint of
/// `deadband_px` pixels there.
pub fn stabilize_resolution(series: &[CourtPoint], calib: &Calibration, deadband_px: f64) -> Result<Vec<CourtPoint>> {
    if !(deadband_px.is_finite() && deadband_px >= 0.0) {
        return Err(Error::Config("stabilization deadband must be ≥ 0".into()));
    }
    let mut out = Vec::with_capacity(series.len());
    let Some(&first) = series.first() else {
        return Ok(out);
    };
    let mut held = first;
    out.push(first);
    for p in &series[1..] {
        if deadband_px > 0.0 && p.planar_distance(&held) < calib.footprint_m(&held, deadband_px)? {
            out.push(held);
        } else {
            held = *p;
            out.push(*p);
        }
    }
    Ok(out)
}

/// Two-stage ball check over one gap-filled point span starting at clip
/// frame `first_frame`.
///
/// Stage 1 interpolates between consecutive anchors (bounces at the ball
/// position, contacts at the hitter's foot) and re-fills samples whose
/// longitudinal (y) distance from that path exceeds `threshold_m`. Stage 2
/// pins the ball to the hitter's foot position at each contact frame.
pub fn validate_ball_planar(
    ball: &[CourtPoint],
    first_frame: u32,
    events: &[EventAnnotation],
    players: &BTreeMap<PlayerId, Vec<CourtPoint>>,
    threshold_m: f64,
    k: usize,
) -> Result<Vec<CourtPoint>> {
    let n = ball.len();
    let offset = |frame: u32| -> Option<usize> {
        frame
            .checked_sub(first_frame)
            .map(|o| o as usize)
            .filter(|&o| o < n)
    };
    let mut anchors: Vec<(usize, CourtPoint)> = Vec::new();
    let mut contacts: Vec<(usize, CourtPoint)> = Vec::new();
    for e in events {
        let Some(i) = offset(e.frame) else { continue };
        match e.kind {
            EventKind::Bounce => anchors.push((i, ball[i])),
            EventKind::Contact => {
                let id = e.player_id.ok_or_else(|| Error::validation("contact without player_id"))?;
                let track = players.get(&id).ok_or_else(|| {
                    Error::validation(format!("contact at frame {} has no {id} track", e.frame))
                })?;
                let foot = track.get(i).copied().ok_or_else(|| {
                    Error::validation(format!("contact at frame {} outside the {id} track", e.frame))
                })?;
                anchors.push((i, foot));
                contacts.push((i, foot));
            }
            _ => {}
        }
    }
    anchors.sort_by_key(|a| a.0);

    let mut flagged: Vec<Option<CourtPoint>> = ball.iter().copied().map(Some).collect();
    let mut path = vec![None; n];
    for w in anchors.windows(2) {
        let ((a, pa), (b, pb)) = (w[0], w[1]);
        for i in a + 1..b {
            let expected = pa.lerp(&pb, (i - a) as f64 / (b - a) as f64);
            path[i] = Some(expected);
            if (ball[i].y - expected.y).abs() > threshold_m {
                flagged[i] = None;
            }
        }
    }
    let mut out = if flagged.iter().any(Option::is_none) {
        let present = flagged.iter().filter(|s| s.is_some()).count();
        fill_gaps_knn(&flagged, k.min(present).max(1))?
    } else {
        ball.to_vec()
    };
    // a re-filled sample that still strays from the anchor path falls back
    // onto it, which keeps the check idempotent
    for i in 0..n {
        if let Some(expected) = path[i] {
            if flagged[i].is_none() && (out[i].y - expected.y).abs() > threshold_m {
                out[i] = expected;
            }
        }
    }
    for (i, foot) in contacts {
        out[i] = CourtPoint::new(foot.x, foot.y, out[i].z);
    }
    Ok(out)
}

/// Constant-velocity planar motion between two keyframes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarSegment {
    pub t0: f64,
    pub t1: f64,
    pub p0: CourtPoint,
    pub p1: CourtPoint,
    pub velocity: [f64; 2],
}

impl PlanarSegment {
    /// Planar position at `t`; keyframe endpoints are returned exactly.
    pub fn at(&self, t: f64) -> CourtPoint {
        if t <= self.t0 {
            return CourtPoint::planar(self.p0.x, self.p0.y);
        }
        if t >= self.t1 {
            return CourtPoint::planar(self.p1.x, self.p1.y);
        }
        let dt = t - self.t0;
        CourtPoint::planar(self.p0.x + self.velocity[0] * dt, self.p0.y + self.velocity[1] * dt)
    }
}

/// Piecewise constant-velocity reconstruction through planar keyframes.
pub fn reconstruct_planar(keyframes: &[(f64, CourtPoint)]) -> Result<Vec<PlanarSegment>> {
    if keyframes.len() < 2 {
        return Err(Error::validation("planar reconstruction needs at least 2 keyframes"));
    }
    keyframes
        .windows(2)
        .map(|w| {
            let ((t0, p0), (t1, p1)) = (w[0], w[1]);
            if !(t1 > t0) {
                return Err(Error::validation(format!("keyframe times not increasing at t={t1}")));
            }
            let dt = t1 - t0;
            Ok(PlanarSegment {
                t0,
                t1,
                p0,
                p1,
                velocity: [(p1.x - p0.x) / dt, (p1.y - p0.y) / dt],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{Homography, ReprojectionReport};
    use proptest::prelude::*;

    fn xs(v: &[Option<f64>]) -> Vec<Option<CourtPoint>> {
        v.iter().map(|x| x.map(|x| CourtPoint::planar(x, 0.0))).collect()
    }

    fn identity_calibration() -> Calibration {
        Calibration::from_homography(
            Homography::identity(),
            ReprojectionReport {
                max_px: 0.0,
                median_px: 0.0,
                count: 4,
            },
        )
        .unwrap()
    }

    #[test]
    fn knn_tie_prefers_earlier() {
        let series: Vec<Option<f64>> = (0..10).map(|i| (i != 5).then_some(i as f64)).collect();
        let out = fill_gaps_knn(&xs(&series), 5).unwrap();
        assert!((out[5].x - 4.4).abs() < 1e-12);
    }

    #[test]
    fn knn_too_few_present() {
        let series = xs(&[Some(1.0), None, Some(2.0), None, Some(3.0)]);
        assert!(matches!(
            fill_gaps_knn(&series, 5),
            Err(Error::InsufficientData { needed: 5, got: 3 })
        ));
    }

    #[test]
    fn moving_average_impulse() {
        let s: Vec<CourtPoint> = [0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0]
            .iter()
            .map(|&x| CourtPoint::planar(x, 0.0))
            .collect();
        let out = smooth_moving_average(&s, 5).unwrap();
        assert_eq!(out[3].x, 1.0);
        // boundary windows shrink: index 1 averages 0..=2
        assert_eq!(out[1].x, 0.0);
        assert!(matches!(smooth_moving_average(&s, 4), Err(Error::Config(_))));
    }

    #[test]
    fn stabilization_deadband() {
        let calib = identity_calibration();
        let s = vec![
            CourtPoint::planar(0.0, 0.0),
            CourtPoint::planar(0.5, 0.0),
            CourtPoint::planar(0.9, 0.0),
            CourtPoint::planar(1.2, 0.0),
        ];
        let out = stabilize_resolution(&s, &calib, 1.0).unwrap();
        assert_eq!(out[1], s[0]);
        assert_eq!(out[2], s[0]);
        assert_eq!(out[3], s[3]);
        assert_eq!(stabilize_resolution(&s, &calib, 0.0).unwrap(), s);
    }

    fn rally() -> (Vec<CourtPoint>, Vec<EventAnnotation>, BTreeMap<PlayerId, Vec<CourtPoint>>) {
        let n = 21;
        let ball: Vec<CourtPoint> = (0..n).map(|i| CourtPoint::planar(0.0, -10.0 + i as f64)).collect();
        let mut players = BTreeMap::new();
        players.insert(PlayerId::P1, vec![CourtPoint::planar(0.5, -10.0); n]);
        players.insert(PlayerId::P2, vec![CourtPoint::planar(0.5, 10.0); n]);
        let events = vec![
            EventAnnotation {
                frame: 100,
                kind: EventKind::Contact,
                player_id: Some(PlayerId::P1),
                how: None,
            },
            EventAnnotation {
                frame: 114,
                kind: EventKind::Bounce,
                player_id: None,
                how: None,
            },
            EventAnnotation {
                frame: 120,
                kind: EventKind::Contact,
                player_id: Some(PlayerId::P2),
                how: None,
            },
        ];
        (ball, events, players)
    }

    #[test]
    fn outlier_is_refilled_and_contacts_pinned() {
        let (mut ball, events, players) = rally();
        let clean = ball.clone();
        ball[7].y += 10.0;
        let out = validate_ball_planar(&ball, 100, &events, &players, 3.0, 5).unwrap();
        // neighbours 6, 8, 5, 9 and 4 (earlier frame wins the tie at distance 3)
        assert!((out[7].y - (-3.6)).abs() < 1e-12);
        assert_eq!(out[8], clean[8]);
        assert_eq!((out[0].x, out[0].y), (0.5, -10.0));
        assert_eq!((out[20].x, out[20].y), (0.5, 10.0));
        let again = validate_ball_planar(&out, 100, &events, &players, 3.0, 5).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn clean_series_without_contacts_unchanged() {
        let (ball, events, players) = rally();
        let bounces: Vec<_> = events.into_iter().filter(|e| e.kind == EventKind::Bounce).collect();
        assert_eq!(validate_ball_planar(&ball, 100, &bounces, &players, 3.0, 5).unwrap(), ball);
    }

    #[test]
    fn contact_without_track() {
        let (ball, events, mut players) = rally();
        players.remove(&PlayerId::P2);
        assert!(matches!(
            validate_ball_planar(&ball, 100, &events, &players, 3.0, 5),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn planar_velocity() {
        let segs = reconstruct_planar(&[
            (0.0, CourtPoint::planar(0.0, 0.0)),
            (1.0, CourtPoint::planar(0.0, 10.0)),
        ])
        .unwrap();
        assert_eq!(segs[0].velocity, [0.0, 10.0]);
        assert_eq!(segs[0].at(0.5), CourtPoint::planar(0.0, 5.0));
        let segs = reconstruct_planar(&[
            (0.0, CourtPoint::planar(0.0, 0.0)),
            (0.5, CourtPoint::planar(4.0, -2.0)),
        ])
        .unwrap();
        assert_eq!(segs[0].velocity, [8.0, -4.0]);
        assert_eq!(segs[0].at(0.25), CourtPoint::planar(2.0, -1.0));
        assert!(reconstruct_planar(&[(0.0, CourtPoint::default())]).is_err());
        assert!(reconstruct_planar(&[(1.0, CourtPoint::default()), (1.0, CourtPoint::default())]).is_err());
    }

    proptest! {
        #[test]
        fn knn_preserves_present_and_bounds_fills(
            vals in prop::collection::vec(prop::option::weighted(0.7, -50.0f64..50.0), 6..60),
            k in 1usize..6,
        ) {
            let series = xs(&vals);
            let present: Vec<f64> = vals.iter().flatten().copied().collect();
            prop_assume!(present.len() >= k);
            let out = fill_gaps_knn(&series, k).unwrap();
            let (lo, hi) = present.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            for (o, v) in out.iter().zip(&vals) {
                match v {
                    Some(x) => prop_assert_eq!(o.x, *x),
                    None => prop_assert!(o.x >= lo - 1e-9 && o.x <= hi + 1e-9),
                }
            }
        }

        #[test]
        fn moving_average_keeps_length_and_constants(c in -100.0f64..100.0, n in 1usize..40, half in 0usize..5) {
            let s = vec![CourtPoint::new(c, -c, 0.5 * c); n];
            let out = smooth_moving_average(&s, 2 * half + 1).unwrap();
            prop_assert_eq!(out, s);
        }

        #[test]
        fn stabilization_is_identity_above_deadband(steps in prop::collection::vec(1.01f64..5.0, 1..30)) {
            let calib = identity_calibration();
            let mut x = 0.0;
            let mut s = vec![CourtPoint::planar(0.0, 0.0)];
            for d in steps {
                x += d;
                s.push(CourtPoint::planar(x, 0.0));
            }
            prop_assert_eq!(stabilize_resolution(&s, &calib, 1.0).unwrap(), s);
        }

        #[test]
        fn planar_reconstruction_hits_keyframes(
            pts in prop::collection::vec((-10.0f64..10.0, -12.0f64..12.0, 0.05f64..2.0), 2..10)
        ) {
            let mut t = 0.0;
            let kfs: Vec<(f64, CourtPoint)> = pts.iter().map(|&(x, y, dt)| {
                t += dt;
                (t, CourtPoint::planar(x, y))
            }).collect();
            let segs = reconstruct_planar(&kfs).unwrap();
            for (s, w) in segs.iter().zip(kfs.windows(2)) {
                prop_assert_eq!(s.at(w[0].0), w[0].1);
                prop_assert_eq!(s.at(w[1].0), w[1].1);
            }
        }

        #[test]
        fn ball_check_is_idempotent(noise in prop::collection::vec(-6.0f64..6.0, 21)) {
            let (mut ball, events, players) = rally();
            for (b, d) in ball.iter_mut().zip(&noise) {
                b.y += d;
            }
            let once = validate_ball_planar(&ball, 100, &events, &players, 3.0, 5).unwrap();
            let twice = validate_ball_planar(&once, 100, &events, &players, 3.0, 5).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
