//! Image ↔ court-plane homography estimation and application.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::court::CourtPoint;
use crate::error::{Error, Result};

const DET_EPS: f64 = 1e-12;
const W_EPS: f64 = 1e-12;

/// A pixel location, serialized as `[u, v]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Pixel {
    pub u: f64,
    pub v: f64,
}

impl Pixel {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn distance(&self, o: &Pixel) -> f64 {
        (self.u - o.u).hypot(self.v - o.v)
    }
}

impl From<[f64; 2]> for Pixel {
    fn from(a: [f64; 2]) -> Self {
        Pixel::new(a[0], a[1])
    }
}

impl From<Pixel> for [f64; 2] {
    fn from(p: Pixel) -> Self {
        [p.u, p.v]
    }
}

/// One image/court keypoint pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub image: Pixel,
    pub world: CourtPoint,
}

impl Correspondence {
    pub fn new(image: Pixel, world: CourtPoint) -> Self {
        Self { image, world }
    }
}

/// A normalized 3×3 projective map.
///
/// The bottom-right entry is 1 when it is nonzero; otherwise the matrix has
/// unit Frobenius norm. Serialized as three rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateConfiguration("non-finite homography entry".into()));
        }
        let m = if m[(2, 2)].abs() > DET_EPS {
            m / m[(2, 2)]
        } else {
            let n = m.norm();
            if n == 0.0 {
                return Err(Error::DegenerateConfiguration("zero homography".into()));
            }
            m / n
        };
        if m.determinant().abs() <= DET_EPS {
            return Err(Error::DegenerateConfiguration("homography is not invertible".into()));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(&rows.concat()))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.m;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn inverse(&self) -> Result<Homography> {
        let inv = self
            .m
            .try_inverse()
            .ok_or_else(|| Error::DegenerateConfiguration("homography is not invertible".into()))?;
        Homography::new(inv)
    }

    /// Maps a 2D point through the matrix.
    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let r = self.m * Vector3::new(x, y, 1.0);
        if r.z.abs() < W_EPS {
            return Err(Error::ProjectionSingularity);
        }
        Ok((r.x / r.z, r.y / r.z))
    }
}

impl TryFrom<[[f64; 3]; 3]> for Homography {
    type Error = Error;
    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self> {
        Homography::from_rows(rows)
    }
}

impl From<Homography> for [[f64; 3]; 3] {
    fn from(h: Homography) -> Self {
        h.rows()
    }
}

/// Image → court mapping for a homography `h` that maps court → image.
pub fn apply_homography(h: &Homography, p: Pixel) -> Result<CourtPoint> {
    let (x, y) = h.inverse()?.apply(p.u, p.v)?;
    Ok(CourtPoint::planar(x, y))
}

/// Hartley conditioning: translate to the centroid and scale to mean
/// distance √2. Returns `None` if all points coincide.
fn conditioning(points: &[(f64, f64)]) -> Option<Matrix3<f64>> {
    let n = points.len() as f64;
    let (cx, cy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (cx, cy) = (cx / n, cy / n);
    let mean = points
        .iter()
        .map(|(x, y)| (x - cx).hypot(y - cy))
        .sum::<f64>()
        / n;
    if mean <= 1e-12 {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean;
    Some(Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0))
}

fn condition_all(t: &Matrix3<f64>, pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    pts.iter()
        .map(|&(x, y)| {
            let v = t * Vector3::new(x, y, 1.0);
            (v.x, v.y)
        })
        .collect()
}

fn collinear(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    cross.abs() < 1e-9
}

fn any_collinear_triple(pts: &[(f64, f64)]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinear(pts[i], pts[j], pts[k]) {
                    return true;
                }
            }
        }
    }
    false
}

fn all_collinear(pts: &[(f64, f64)]) -> bool {
    let a = pts[0];
    match pts.iter().skip(1).find(|p| (p.0 - a.0).hypot(p.1 - a.1) > 1e-9) {
        None => true,
        Some(&b) => pts.iter().all(|&c| collinear(a, b, c)),
    }
}

/// Estimates the court → image homography with the normalized DLT.
///
/// Exact for four pairs, least squares (smallest right singular vector of
/// the conditioned design matrix) for more.
pub fn estimate_homography(pairs: &[Correspondence]) -> Result<Homography> {
    if pairs.len() < 4 {
        return Err(Error::InsufficientCorrespondences { got: pairs.len() });
    }
    if pairs.iter().any(|p| !p.image.is_finite() || !p.world.is_finite()) {
        return Err(Error::validation("correspondences must be finite"));
    }
    let world: Vec<(f64, f64)> = pairs.iter().map(|p| (p.world.x, p.world.y)).collect();
    let image: Vec<(f64, f64)> = pairs.iter().map(|p| (p.image.u, p.image.v)).collect();

    let degenerate = |what: &str| Error::DegenerateConfiguration(what.to_string());
    let tw = conditioning(&world).ok_or_else(|| degenerate("world points coincide"))?;
    let ti = conditioning(&image).ok_or_else(|| degenerate("image points coincide"))?;
    let wn = condition_all(&tw, &world);
    let im = condition_all(&ti, &image);

    if pairs.len() == 4 {
        if any_collinear_triple(&wn) || any_collinear_triple(&im) {
            return Err(degenerate("three of four points are collinear"));
        }
    } else if all_collinear(&wn) || all_collinear(&im) {
        return Err(degenerate("all points are collinear"));
    }

    // At least 9 rows so the SVD exposes the full right null space.
    let rows = (2 * pairs.len()).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, (&(x, y), &(u, v))) in wn.iter().zip(im.iter()).enumerate() {
        let r = 2 * k;
        a[(r, 0)] = -x;
        a[(r, 1)] = -y;
        a[(r, 2)] = -1.0;
        a[(r, 6)] = u * x;
        a[(r, 7)] = u * y;
        a[(r, 8)] = u;
        a[(r + 1, 3)] = -x;
        a[(r + 1, 4)] = -y;
        a[(r + 1, 5)] = -1.0;
        a[(r + 1, 6)] = v * x;
        a[(r + 1, 7)] = v * y;
        a[(r + 1, 8)] = v;
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| degenerate("SVD failed"))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let (smallest, second) = (order[0], order[1]);
    if sv[second] <= 1e-10 * sv[order[sv.len() - 1]] {
        return Err(degenerate("correspondences do not determine a unique homography"));
    }
    let h = v_t.row(smallest);
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let ti_inv = ti.try_inverse().ok_or_else(|| degenerate("conditioning not invertible"))?;
    Homography::new(ti_inv * hn * tw)
}

/// Court → image reprojection errors in pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReprojectionReport {
    pub max_px: f64,
    pub median_px: f64,
    pub count: usize,
}

/// Euclidean pixel errors of mapping each world point through `h`.
/// The median uses the lower-median rule.
pub fn reprojection_error(h: &Homography, pairs: &[Correspondence]) -> Result<ReprojectionReport> {
    if pairs.is_empty() {
        return Err(Error::validation("reprojection error needs at least one pair"));
    }
    let mut errs = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (u, v) = h.apply(p.world.x, p.world.y)?;
        errs.push((u - p.image.u).hypot(v - p.image.v));
    }
    errs.sort_by(f64::total_cmp);
    Ok(ReprojectionReport {
        max_px: *errs.last().unwrap(),
        median_px: errs[(errs.len() - 1) / 2],
        count: errs.len(),
    })
}

/// A calibrated view: court → image homography plus its cached inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub world_to_image: Homography,
    pub image_to_world: Homography,
    pub report: ReprojectionReport,
}

impl Calibration {
    /// Estimates and validates a calibration; rejects it when the median
    /// reprojection error exceeds `max_median_px`.
    pub fn from_pairs(pairs: &[Correspondence], max_median_px: f64) -> Result<Self> {
        let world_to_image = estimate_homography(pairs).map_err(|e| Error::Calibration {
            reason: e.to_string(),
            report: None,
        })?;
        let report = reprojection_error(&world_to_image, pairs)?;
        if report.median_px > max_median_px {
            return Err(Error::Calibration {
                reason: format!(
                    "median reprojection {:.3} px exceeds {:.3} px",
                    report.median_px, max_median_px
                ),
                report: Some(report),
            });
        }
        Self::from_homography(world_to_image, report)
    }

    pub fn from_homography(world_to_image: Homography, report: ReprojectionReport) -> Result<Self> {
        let image_to_world = world_to_image.inverse().map_err(|e| Error::Calibration {
            reason: e.to_string(),
            report: Some(report.clone()),
        })?;
        Ok(Self {
            world_to_image,
            image_to_world,
            report,
        })
    }

    pub fn to_court(&self, p: Pixel) -> Result<CourtPoint> {
        let (x, y) = self.image_to_world.apply(p.u, p.v)?;
        Ok(CourtPoint::planar(x, y))
    }

    pub fn to_image(&self, p: &CourtPoint) -> Result<Pixel> {
        let (u, v) = self.world_to_image.apply(p.x, p.y)?;
        Ok(Pixel::new(u, v))
    }

    /// Court-space length of a `px`-pixel step at the image location of
    /// `at`: the larger of the horizontal and vertical pixel footprints.
    pub fn footprint_m(&self, at: &CourtPoint, px: f64) -> Result<f64> {
        let c = self.to_image(at)?;
        let du = self.to_court(Pixel::new(c.u + px, c.v))?;
        let dv = self.to_court(Pixel::new(c.u, c.v + px))?;
        Ok(du.planar_distance(at).max(dv.planar_distance(at)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::court::reference_keypoints;

    fn pairs_through(h: &Homography) -> Vec<Correspondence> {
        reference_keypoints()
            .iter()
            .map(|w| {
                let (u, v) = h.apply(w.x, w.y).unwrap();
                Correspondence::new(Pixel::new(u, v), *w)
            })
            .collect()
    }

    #[test]
    fn identity_recovered() {
        let pairs = pairs_through(&Homography::identity());
        let h = estimate_homography(&pairs).unwrap();
        for (a, b) in h.matrix().iter().zip(Matrix3::<f64>::identity().iter()) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn known_scale_recovered() {
        let h0 = Homography::from_rows([[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let h = estimate_homography(&pairs_through(&h0)).unwrap();
        for (a, b) in h.matrix().iter().zip(h0.matrix().iter()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn too_few_pairs() {
        let pairs = pairs_through(&Homography::identity());
        assert!(matches!(
            estimate_homography(&pairs[..3]),
            Err(Error::InsufficientCorrespondences { got: 3 })
        ));
    }

    #[test]
    fn collinear_rejected() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0)];
        let pairs: Vec<_> = pts
            .iter()
            .map(|&(x, y)| Correspondence::new(Pixel::new(x, y), CourtPoint::planar(x, y)))
            .collect();
        assert!(matches!(
            estimate_homography(&pairs),
            Err(Error::DegenerateConfiguration(_))
        ));
        let line: Vec<_> = (0..6)
            .map(|i| {
                let x = i as f64;
                Correspondence::new(Pixel::new(x, 2.0 * x), CourtPoint::planar(x, 2.0 * x))
            })
            .collect();
        assert!(matches!(
            estimate_homography(&line),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn duplicated_points_rejected() {
        let p = Correspondence::new(Pixel::new(1.0, 1.0), CourtPoint::planar(1.0, 1.0));
        let q = Correspondence::new(Pixel::new(2.0, 5.0), CourtPoint::planar(2.0, 5.0));
        assert!(estimate_homography(&[p, p, q, q]).is_err());
    }

    #[test]
    fn apply_examples() {
        let p = apply_homography(&Homography::identity(), Pixel::new(3.2, 7.7)).unwrap();
        assert_eq!(p, CourtPoint::planar(3.2, 7.7));

        let h = Homography::from_rows([[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let p = apply_homography(&h, Pixel::new(1.0, 1.0)).unwrap();
        assert!((p.x - 0.5).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15);

        let swap = Homography::from_rows([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(swap.rows()[2][1] * 3f64.sqrt(), 1.0);
        assert!(matches!(
            apply_homography(&swap, Pixel::new(0.0, 0.0)),
            Err(Error::ProjectionSingularity)
        ));
    }

    #[test]
    fn reprojection_examples() {
        let h = Homography::identity();
        let mut pairs = pairs_through(&h);
        let r = reprojection_error(&h, &pairs).unwrap();
        assert!(r.max_px <= 1e-9);
        pairs[3].image.u += 3.0;
        pairs[3].image.v += 4.0;
        let r = reprojection_error(&h, &pairs).unwrap();
        assert!((r.max_px - 5.0).abs() < 1e-12);
        assert_eq!(r.median_px, 0.0);
        let one = reprojection_error(&h, &pairs[3..4]).unwrap();
        assert_eq!(one.median_px, one.max_px);
        assert!(reprojection_error(&h, &[]).is_err());
    }

    #[test]
    fn normalization_rules() {
        let h = Homography::new(Matrix3::identity() * 4.0).unwrap();
        assert_eq!(h, Homography::identity());
        assert!(Homography::new(Matrix3::zeros()).is_err());
        let singular = Matrix3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0);
        assert!(Homography::new(singular).is_err());
    }

    #[test]
    fn calibration_rejects_bad_median() {
        let h = Homography::identity();
        let mut pairs = pairs_through(&h);
        for p in pairs.iter_mut().step_by(2) {
            p.image.u += 40.0;
        }
        for p in pairs.iter_mut().skip(1).step_by(4) {
            p.image.v -= 40.0;
        }
        match Calibration::from_pairs(&pairs, 5.0) {
            Err(Error::Calibration { report: Some(r), .. }) => assert!(r.median_px > 5.0),
            other => panic!("expected calibration error, got {other:?}"),
        }
    }
}
