//! Court coordinate system, reference keypoints and zone partition.
//!
//! Coordinates are metres: `x` lateral (positive toward the broadcast-right
//! sideline), `y` longitudinal (net at 0, baselines at ±11.885), `z` up.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COURT_LENGTH_M: f64 = 23.77;
pub const HALF_LENGTH_M: f64 = COURT_LENGTH_M / 2.0;
pub const SINGLES_HALF_WIDTH_M: f64 = 4.115;
pub const DOUBLES_HALF_WIDTH_M: f64 = 5.485;
pub const SERVICE_LINE_Y_M: f64 = 6.40;
pub const NET_CORD_HEIGHT_M: f64 = 0.9;
pub const GROUND_Z_M: f64 = 0.0;

/// Serve direction band width; the rally centre band spans ±BAND_WIDTH_M.
pub const BAND_WIDTH_M: f64 = SINGLES_HALF_WIDTH_M / 3.0;
/// Boundary between the Mid and Deep rally depth bands.
pub const MID_DEEP_Y_M: f64 = (SERVICE_LINE_Y_M + HALF_LENGTH_M) / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CourtModel {
    pub length_m: f64,
    pub singles_half_width_m: f64,
    pub doubles_half_width_m: f64,
    pub service_line_y_m: f64,
    pub net_y_m: f64,
    pub net_cord_height_m: f64,
    pub ground_z_m: f64,
}

impl Default for CourtModel {
    fn default() -> Self {
        Self {
            length_m: COURT_LENGTH_M,
            singles_half_width_m: SINGLES_HALF_WIDTH_M,
            doubles_half_width_m: DOUBLES_HALF_WIDTH_M,
            service_line_y_m: SERVICE_LINE_Y_M,
            net_y_m: 0.0,
            net_cord_height_m: NET_CORD_HEIGHT_M,
            ground_z_m: GROUND_Z_M,
        }
    }
}

impl CourtModel {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("length_m", self.length_m),
            ("singles_half_width_m", self.singles_half_width_m),
            ("doubles_half_width_m", self.doubles_half_width_m),
            ("service_line_y_m", self.service_line_y_m),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(format!("court {name} must be positive")));
            }
        }
        if self.service_line_y_m >= self.length_m / 2.0 {
            return Err(Error::validation("court service_line_y_m must be inside the half court"));
        }
        if self.net_cord_height_m != NET_CORD_HEIGHT_M || self.ground_z_m != GROUND_Z_M {
            return Err(Error::validation("court keyframe constants are fixed"));
        }
        Ok(())
    }
}

/// A point in court space.
///
/// Serialized as a `[x, y, z]` array.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct CourtPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CourtPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn planar(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(&self, other: &CourtPoint) -> f64 {
        (*self - *other).norm()
    }

    pub fn planar_distance(&self, other: &CourtPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &CourtPoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, o: &CourtPoint) -> CourtPoint {
        CourtPoint::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn scale(&self, s: f64) -> CourtPoint {
        CourtPoint::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(&self) -> CourtPoint {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n)
        } else {
            *self
        }
    }

    pub fn lerp(&self, other: &CourtPoint, s: f64) -> CourtPoint {
        CourtPoint::new(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
            self.z + (other.z - self.z) * s,
        )
    }
}

impl std::ops::Add for CourtPoint {
    type Output = CourtPoint;
    fn add(self, o: CourtPoint) -> CourtPoint {
        CourtPoint::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for CourtPoint {
    type Output = CourtPoint;
    fn sub(self, o: CourtPoint) -> CourtPoint {
        CourtPoint::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl From<[f64; 3]> for CourtPoint {
    fn from(a: [f64; 3]) -> Self {
        CourtPoint::new(a[0], a[1], a[2])
    }
}

impl From<CourtPoint> for [f64; 3] {
    fn from(p: CourtPoint) -> Self {
        [p.x, p.y, p.z]
    }
}

/// The 14 court keypoints in the order the clip header lists them:
///
/// 0..4   doubles corners: near-left, near-right, far-left, far-right
/// 4..8   singles sideline × baseline, same corner order
/// 8..12  singles sideline × service line, same corner order
/// 12..14 centre service line × service line: near, far
pub fn reference_keypoints() -> [CourtPoint; 14] {
    let (d, s, l, sl) = (
        DOUBLES_HALF_WIDTH_M,
        SINGLES_HALF_WIDTH_M,
        HALF_LENGTH_M,
        SERVICE_LINE_Y_M,
    );
    [
        CourtPoint::planar(-d, -l),
        CourtPoint::planar(d, -l),
        CourtPoint::planar(-d, l),
        CourtPoint::planar(d, l),
        CourtPoint::planar(-s, -l),
        CourtPoint::planar(s, -l),
        CourtPoint::planar(-s, l),
        CourtPoint::planar(s, l),
        CourtPoint::planar(-s, -sl),
        CourtPoint::planar(s, -sl),
        CourtPoint::planar(-s, sl),
        CourtPoint::planar(s, sl),
        CourtPoint::planar(0.0, -sl),
        CourtPoint::planar(0.0, sl),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Serve,
    Rally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ServiceBox {
    Deuce,
    Ad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ServeDirection {
    Wide,
    Body,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lateral {
    Left,
    Center,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Short,
    Mid,
    Deep,
}

/// Court half: `Near` is y ≤ 0 (the broadcast camera end), `Far` is y > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Near,
    Far,
}

impl Side {
    pub fn of(y: f64) -> Side {
        if y > 0.0 {
            Side::Far
        } else {
            Side::Near
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Near => Side::Far,
            Side::Far => Side::Near,
        }
    }

    /// +1 for the far half, -1 for the near half.
    pub fn sign(self) -> f64 {
        match self {
            Side::Near => -1.0,
            Side::Far => 1.0,
        }
    }
}

/// Zone a court point falls into.
///
/// Serialized as a compact key such as `serve/deuce/wide`,
/// `rally/center/deep/far` or `out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ZoneId {
    Serve {
        service_box: ServiceBox,
        direction: ServeDirection,
    },
    Rally {
        lateral: Lateral,
        depth: Depth,
        side: Side,
    },
    OutOfBounds,
}

impl ZoneId {
    /// Every in-bounds zone of a phase, in a fixed order.
    pub fn all(phase: Phase) -> Vec<ZoneId> {
        match phase {
            Phase::Serve => {
                let mut v = Vec::with_capacity(6);
                for service_box in [ServiceBox::Deuce, ServiceBox::Ad] {
                    for direction in [ServeDirection::Wide, ServeDirection::Body, ServeDirection::T] {
                        v.push(ZoneId::Serve { service_box, direction });
                    }
                }
                v
            }
            Phase::Rally => {
                let mut v = Vec::with_capacity(18);
                for side in [Side::Near, Side::Far] {
                    for depth in [Depth::Short, Depth::Mid, Depth::Deep] {
                        for lateral in [Lateral::Left, Lateral::Center, Lateral::Right] {
                            v.push(ZoneId::Rally { lateral, depth, side });
                        }
                    }
                }
                v
            }
        }
    }

    /// Analytic area of the zone in square metres.
    ///
    /// Serve zones cover the matching box on both halves of the court.
    pub fn area_m2(&self) -> f64 {
        match self {
            ZoneId::Serve { .. } => 2.0 * BAND_WIDTH_M * SERVICE_LINE_Y_M,
            ZoneId::Rally { depth, .. } => {
                let d = match depth {
                    Depth::Short => SERVICE_LINE_Y_M,
                    Depth::Mid => MID_DEEP_Y_M - SERVICE_LINE_Y_M,
                    Depth::Deep => HALF_LENGTH_M - MID_DEEP_Y_M,
                };
                // lateral bands are a third of the singles width: 2 * BAND_WIDTH_M
                2.0 * BAND_WIDTH_M * d
            }
            ZoneId::OutOfBounds => f64::INFINITY,
        }
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoneId::Serve { service_box, direction } => {
                let b = match service_box {
                    ServiceBox::Deuce => "deuce",
                    ServiceBox::Ad => "ad",
                };
                let d = match direction {
                    ServeDirection::Wide => "wide",
                    ServeDirection::Body => "body",
                    ServeDirection::T => "t",
                };
                write!(f, "serve/{b}/{d}")
            }
            ZoneId::Rally { lateral, depth, side } => {
                let l = match lateral {
                    Lateral::Left => "left",
                    Lateral::Center => "center",
                    Lateral::Right => "right",
                };
                let d = match depth {
                    Depth::Short => "short",
                    Depth::Mid => "mid",
                    Depth::Deep => "deep",
                };
                let s = match side {
                    Side::Near => "near",
                    Side::Far => "far",
                };
                write!(f, "rally/{l}/{d}/{s}")
            }
            ZoneId::OutOfBounds => f.write_str("out"),
        }
    }
}

impl FromStr for ZoneId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        let bad = || Error::validation(format!("unknown zone key {s:?}"));
        match parts.as_slice() {
            ["out"] => Ok(ZoneId::OutOfBounds),
            ["serve", b, d] => Ok(ZoneId::Serve {
                service_box: match *b {
                    "deuce" => ServiceBox::Deuce,
                    "ad" => ServiceBox::Ad,
                    _ => return Err(bad()),
                },
                direction: match *d {
                    "wide" => ServeDirection::Wide,
                    "body" => ServeDirection::Body,
                    "t" => ServeDirection::T,
                    _ => return Err(bad()),
                },
            }),
            ["rally", l, d, sd] => Ok(ZoneId::Rally {
                lateral: match *l {
                    "left" => Lateral::Left,
                    "center" => Lateral::Center,
                    "right" => Lateral::Right,
                    _ => return Err(bad()),
                },
                depth: match *d {
                    "short" => Depth::Short,
                    "mid" => Depth::Mid,
                    "deep" => Depth::Deep,
                    _ => return Err(bad()),
                },
                side: match *sd {
                    "near" => Side::Near,
                    "far" => Side::Far,
                    _ => return Err(bad()),
                },
            }),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for ZoneId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ZoneId> for String {
    fn from(z: ZoneId) -> String {
        z.to_string()
    }
}

/// Classify a court point into a serve or rally zone.
///
/// Band boundaries belong to the band nearer the court centre. Serve zones
/// are evaluated on whichever half the point lies in; use
/// [`classify_serve_bounce`] when the receiving half is known.
pub fn classify_zone(p: &CourtPoint, phase: Phase) -> Result<ZoneId> {
    if !p.is_finite() {
        return Err(Error::validation("zone classification needs a finite point"));
    }
    let ax = p.x.abs();
    let ay = p.y.abs();
    if ax > SINGLES_HALF_WIDTH_M {
        return Ok(ZoneId::OutOfBounds);
    }
    let zone = match phase {
        Phase::Serve => {
            if ay == 0.0 || ay > SERVICE_LINE_Y_M {
                return Ok(ZoneId::OutOfBounds);
            }
            // Receiver faces the net: on the far half their right hand (deuce
            // court) is toward -x, on the near half toward +x.
            let on_right_of_receiver = if p.y > 0.0 { p.x < 0.0 } else { p.x >= 0.0 };
            let service_box = if on_right_of_receiver {
                ServiceBox::Deuce
            } else {
                ServiceBox::Ad
            };
            let direction = if ax <= BAND_WIDTH_M {
                ServeDirection::T
            } else if ax <= 2.0 * BAND_WIDTH_M {
                ServeDirection::Body
            } else {
                ServeDirection::Wide
            };
            ZoneId::Serve { service_box, direction }
        }
        Phase::Rally => {
            if ay > HALF_LENGTH_M {
                return Ok(ZoneId::OutOfBounds);
            }
            let lateral = if ax <= BAND_WIDTH_M {
                Lateral::Center
            } else if p.x < 0.0 {
                Lateral::Left
            } else {
                Lateral::Right
            };
            let depth = if ay <= SERVICE_LINE_Y_M {
                Depth::Short
            } else if ay <= MID_DEEP_Y_M {
                Depth::Mid
            } else {
                Depth::Deep
            };
            ZoneId::Rally {
                lateral,
                depth,
                side: Side::of(p.y),
            }
        }
    };
    Ok(zone)
}

/// Serve-phase classification that also rejects bounces on the server's half.
pub fn classify_serve_bounce(p: &CourtPoint, receiving: Side) -> Result<ZoneId> {
    let zone = classify_zone(p, Phase::Serve)?;
    if zone != ZoneId::OutOfBounds && Side::of(p.y) != receiving {
        return Ok(ZoneId::OutOfBounds);
    }
    Ok(zone)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_keypoints_symmetric() {
        let kps = reference_keypoints();
        assert_eq!(kps.len(), 14);
        assert_eq!(kps[0], CourtPoint::new(-5.485, -11.885, 0.0));
        for p in &kps {
            assert_eq!(p.z, 0.0);
            let mirrored = CourtPoint::new(-p.x, -p.y, 0.0);
            assert!(kps.iter().any(|q| q.x == mirrored.x && q.y == mirrored.y));
            let flipped = CourtPoint::new(-p.x, p.y, 0.0);
            assert!(kps.iter().any(|q| q.x == flipped.x && q.y == flipped.y));
        }
    }

    #[test]
    fn rally_examples() {
        let z = classify_zone(&CourtPoint::planar(0.5, 10.0), Phase::Rally).unwrap();
        assert_eq!(
            z,
            ZoneId::Rally {
                lateral: Lateral::Center,
                depth: Depth::Deep,
                side: Side::Far
            }
        );
        let z = classify_zone(&CourtPoint::planar(6.0, 5.0), Phase::Rally).unwrap();
        assert_eq!(z, ZoneId::OutOfBounds);
    }

    #[test]
    fn serve_wide_band() {
        let z = classify_zone(&CourtPoint::planar(-3.9, 4.0), Phase::Serve).unwrap();
        assert_eq!(
            z,
            ZoneId::Serve {
                service_box: ServiceBox::Deuce,
                direction: ServeDirection::Wide
            }
        );
        // outer 1.3717 m of the box is the wide band
        let z = classify_zone(&CourtPoint::planar(-2.80, 4.0), Phase::Serve).unwrap();
        assert!(matches!(z, ZoneId::Serve { direction: ServeDirection::Wide, .. }));
        let z = classify_zone(&CourtPoint::planar(-2.70, 4.0), Phase::Serve).unwrap();
        assert!(matches!(z, ZoneId::Serve { direction: ServeDirection::Body, .. }));
    }

    #[test]
    fn ties_go_toward_centre() {
        let z = classify_zone(&CourtPoint::planar(BAND_WIDTH_M, SERVICE_LINE_Y_M), Phase::Rally).unwrap();
        assert_eq!(
            z,
            ZoneId::Rally {
                lateral: Lateral::Center,
                depth: Depth::Short,
                side: Side::Far
            }
        );
        let z = classify_zone(&CourtPoint::planar(0.0, -MID_DEEP_Y_M), Phase::Rally).unwrap();
        assert!(matches!(z, ZoneId::Rally { depth: Depth::Mid, side: Side::Near, .. }));
        // lines are in
        let z = classify_zone(&CourtPoint::planar(SINGLES_HALF_WIDTH_M, HALF_LENGTH_M), Phase::Rally).unwrap();
        assert!(matches!(z, ZoneId::Rally { lateral: Lateral::Right, depth: Depth::Deep, .. }));
    }

    #[test]
    fn doubles_alley_is_out() {
        let z = classify_zone(&CourtPoint::planar(5.0, 3.0), Phase::Serve).unwrap();
        assert_eq!(z, ZoneId::OutOfBounds);
        let z = classify_zone(&CourtPoint::planar(-4.2, -9.0), Phase::Rally).unwrap();
        assert_eq!(z, ZoneId::OutOfBounds);
    }

    #[test]
    fn serve_on_servers_half_is_out() {
        let p = CourtPoint::planar(-1.0, 3.0);
        assert_ne!(classify_serve_bounce(&p, Side::Far).unwrap(), ZoneId::OutOfBounds);
        assert_eq!(classify_serve_bounce(&p, Side::Near).unwrap(), ZoneId::OutOfBounds);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(classify_zone(&CourtPoint::planar(f64::NAN, 1.0), Phase::Rally).is_err());
    }

    #[test]
    fn zone_keys_round_trip() {
        for phase in [Phase::Serve, Phase::Rally] {
            for z in ZoneId::all(phase) {
                assert_eq!(z.to_string().parse::<ZoneId>().unwrap(), z);
            }
        }
        assert_eq!("out".parse::<ZoneId>().unwrap(), ZoneId::OutOfBounds);
        assert!("rally/up/deep/far".parse::<ZoneId>().is_err());
    }

    #[test]
    fn default_court_valid() {
        CourtModel::default().validate().unwrap();
        let mut c = CourtModel::default();
        c.service_line_y_m = 12.0;
        assert!(c.validate().is_err());
    }
}
