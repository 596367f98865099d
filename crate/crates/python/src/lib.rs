//! Python bindings: simulate, reconstruct and verify rallies, query the
//! resulting scene, and reach the geometry, kinematics and scoring helpers.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIOError, PyValueError};
use pyo3::prelude::*;

use rallyforge::cine::{evaluate_camera_pose, EntityRef, SceneQuery};
use rallyforge::config::{load_config, PipelineConfig};
use rallyforge::court::{classify_zone, reference_keypoints, CourtPoint, Phase};
use rallyforge::ingest::parse_clip;
use rallyforge::kinematics::SpinType;
use rallyforge::metrics::MetricsWindow;
use rallyforge::projection::{self, Correspondence, Pixel};
use rallyforge::scoring::{self, FinalSetRule, MatchFormat, PlayerId};
use rallyforge::sim::{self, GroundTruthRally, SimConfig};
use rallyforge::Error;

create_exception!(rallyforge_py, RallyforgeError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => RallyforgeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn player(id: &str) -> PyResult<PlayerId> {
    match id {
        "p1" => Ok(PlayerId::P1),
        "p2" => Ok(PlayerId::P2),
        _ => Err(PyValueError::new_err(format!("unknown player `{id}`, expected p1 or p2"))),
    }
}

fn point(p: CourtPoint) -> (f64, f64, f64) {
    (p.x, p.y, p.z)
}

fn pipeline(config_json: Option<&str>) -> PyResult<PipelineConfig> {
    match config_json {
        Some(text) => Ok(load_config(text).map_err(to_py)?.0),
        None => Ok(PipelineConfig::default()),
    }
}

/// Image ↔ court homography (court → image direction).
#[pyclass(name = "Homography", frozen)]
struct PyHomography {
    inner: projection::Homography,
}

#[pymethods]
impl PyHomography {
    #[new]
    fn new(rows: [[f64; 3]; 3]) -> PyResult<Self> {
        let inner = projection::Homography::from_rows(rows).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Normalized DLT fit from `[(u, v)]` image points and `[(x, y)]` court points.
    #[staticmethod]
    fn estimate(image: Vec<(f64, f64)>, world: Vec<(f64, f64)>) -> PyResult<Self> {
        if image.len() != world.len() {
            return Err(PyValueError::new_err("image and world point lists differ in length"));
        }
        let pairs: Vec<Correspondence> = image
            .iter()
            .zip(&world)
            .map(|(&(u, v), &(x, y))| Correspondence::new(Pixel::new(u, v), CourtPoint::planar(x, y)))
            .collect();
        let inner = projection::estimate_homography(&pairs).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Court (x, y) → image (u, v).
    fn project(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        self.inner.apply(x, y).map_err(to_py)
    }

    /// Image (u, v) → court (x, y).
    fn to_court(&self, u: f64, v: f64) -> PyResult<(f64, f64)> {
        let p = projection::apply_homography(&self.inner, Pixel::new(u, v)).map_err(to_py)?;
        Ok((p.x, p.y))
    }

    fn rows(&self) -> [[f64; 3]; 3] {
        self.inner.rows()
    }

    fn __repr__(&self) -> String {
        format!("Homography({:?})", self.inner.rows())
    }
}

/// Tennis score with serve rotation and tiebreaks.
#[pyclass(name = "ScoreState", frozen)]
struct PyScoreState {
    inner: scoring::ScoreState,
}

#[pymethods]
impl PyScoreState {
    #[new]
    #[pyo3(signature = (server="p1", best_of=3, final_set_tiebreak_at=6))]
    fn new(server: &str, best_of: u8, final_set_tiebreak_at: u8) -> PyResult<Self> {
        let final_set_rule = match final_set_tiebreak_at {
            6 => FinalSetRule::TiebreakAt6,
            12 => FinalSetRule::TiebreakAt12,
            n => return Err(PyValueError::new_err(format!("final-set tiebreak at {n} games is not supported"))),
        };
        let format = MatchFormat { best_of, final_set_rule };
        format.validate().map_err(to_py)?;
        Ok(Self {
            inner: scoring::ScoreState::new(player(server)?, format),
        })
    }

    /// The state after `winner` takes the next point.
    fn advance(&self, winner: &str) -> PyResult<Self> {
        let inner = scoring::advance_score(&self.inner, player(winner)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// What the next point could decide: "game point", "break point", ...
    fn labels(&self) -> Vec<&'static str> {
        scoring::point_context_labels(&self.inner)
            .into_iter()
            .map(|l| l.text())
            .collect()
    }

    #[getter]
    fn server(&self) -> &'static str {
        self.inner.server.as_str()
    }

    #[getter]
    fn winner(&self) -> Option<&'static str> {
        self.inner.winner.map(PlayerId::as_str)
    }

    #[getter]
    fn sets(&self) -> (u8, u8) {
        (self.inner.sets[0], self.inner.sets[1])
    }

    #[getter]
    fn games(&self) -> (u8, u8) {
        (self.inner.games[0], self.inner.games[1])
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &serde_json::to_string(&self.inner).expect("score serializes"))
    }

    fn __repr__(&self) -> String {
        serde_json::to_string(&self.inner).expect("score serializes")
    }
}

/// A reconstructed scene timeline.
#[pyclass(name = "SceneTimeline", frozen)]
struct PyScene {
    inner: rallyforge::scene::SceneTimeline,
}

#[pymethods]
impl PyScene {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = rallyforge::scene::SceneTimeline::from_json(text).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.to_json())
    }

    #[getter]
    fn span(&self) -> (f64, f64) {
        (self.inner.span.start, self.inner.span.end)
    }

    #[getter]
    fn point_count(&self) -> usize {
        self.inner.points.len()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn ball_position(&self, t: f64) -> Option<(f64, f64, f64)> {
        self.inner.ball_position(t).map(point)
    }

    fn player_position(&self, player_id: &str, t: f64) -> PyResult<Option<(f64, f64, f64)>> {
        Ok(self.inner.player_position(player(player_id)?, t).map(point))
    }

    /// Camera (position, look_at, fov_deg) at presentation time `t`.
    fn camera_pose(&self, t: f64) -> PyResult<((f64, f64, f64), (f64, f64, f64), f64)> {
        let p = evaluate_camera_pose(&self.inner.camera, t, &self.inner).map_err(to_py)?;
        Ok((point(p.position), point(p.look_at), p.fov_deg))
    }

    /// Clip time shown at presentation time `t`, and the playback rate there.
    fn scene_time(&self, t: f64) -> (f64, f64) {
        (self.inner.camera.scene_time(t), self.inner.camera.warp_factor(t))
    }

    fn entity_position(&self, entity: &str, t: f64) -> PyResult<Option<(f64, f64, f64)>> {
        let e = match entity {
            "ball" => EntityRef::Ball,
            id => EntityRef::player(player(id)?),
        };
        Ok(self.inner.entity_position(e, t).map(point))
    }

    /// Zone metrics as seen right after `point` (default: the last point).
    #[pyo3(signature = (window="match", point=None))]
    fn metrics<'py>(&self, py: Python<'py>, window: &str, point: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let window = match window {
            "match" => MetricsWindow::MatchStart,
            "game" => MetricsWindow::CurrentGame,
            w => return Err(PyValueError::new_err(format!("unknown window `{w}`, expected match or game"))),
        };
        let point = match point {
            Some(p) => p,
            None => self
                .inner
                .points
                .len()
                .checked_sub(1)
                .ok_or_else(|| PyValueError::new_err("scene has no points"))?,
        };
        let m = self
            .inner
            .metrics_for(window, point)
            .ok_or_else(|| PyValueError::new_err(format!("no metrics for point {point}")))?;
        json_to_py(py, &serde_json::to_string(m).expect("metrics serialize"))
    }
}

/// Generates a synthetic clip; returns `(clip_json, truth_json)`.
#[pyfunction]
#[pyo3(signature = (seed=42, points=3, noise_px=0.0, dropout=0.0, quantize=false))]
fn simulate(seed: u64, points: usize, noise_px: f64, dropout: f64, quantize: bool) -> PyResult<(String, String)> {
    let cfg = SimConfig {
        seed,
        points,
        pixel_noise_sigma_px: noise_px,
        dropout_rate: dropout,
        quantize_pixels: quantize,
        ..SimConfig::default()
    };
    let rally = sim::simulate_rally(&cfg).map_err(to_py)?;
    let (doc, truth) = sim::project_clip(&rally, &cfg).map_err(to_py)?;
    Ok((
        serde_json::to_string(&doc).expect("clip serializes"),
        serde_json::to_string(&truth).expect("truth serializes"),
    ))
}

/// Parses and reconstructs a clip document.
#[pyfunction]
#[pyo3(signature = (clip_json, config_json=None))]
fn reconstruct(clip_json: &str, config_json: Option<&str>) -> PyResult<PyScene> {
    let cfg = pipeline(config_json)?;
    let clip = parse_clip(clip_json).map_err(to_py)?;
    let inner = rallyforge::scene::reconstruct(&clip, &cfg).map_err(to_py)?;
    Ok(PyScene { inner })
}

/// Reconstructs a simulated clip and returns its error report against the
/// ground truth as a dict.
#[pyfunction]
#[pyo3(signature = (clip_json, truth_json, config_json=None))]
fn verify<'py>(
    py: Python<'py>,
    clip_json: &str,
    truth_json: &str,
    config_json: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let scene = reconstruct(clip_json, config_json)?;
    let truth: GroundTruthRally =
        serde_json::from_str(truth_json).map_err(|e| PyValueError::new_err(format!("truth document: {e}")))?;
    let report = sim::round_trip_report(&truth, &scene.inner).map_err(to_py)?;
    json_to_py(py, &serde_json::to_string(&report).expect("report serializes"))
}

/// Launch velocity and acceleration of the vertical segment joining two
/// heights: returns `(v0, accel)`.
#[pyfunction]
#[pyo3(signature = (h0, h1, duration, spin="topspin"))]
fn solve_vertical_segment(h0: f64, h1: f64, duration: f64, spin: &str) -> PyResult<(f64, f64)> {
    let spin = match spin {
        "topspin" => SpinType::Topspin,
        "backspin" => SpinType::Backspin,
        s => return Err(PyValueError::new_err(format!("unknown spin `{s}`"))),
    };
    let s = rallyforge::kinematics::solve_vertical_segment(h0, h1, duration, spin).map_err(to_py)?;
    Ok((s.v0, s.accel))
}

/// Zone key such as `rally/center/deep/far` for a court point.
#[pyfunction]
#[pyo3(signature = (x, y, phase="rally"))]
fn zone_of(x: f64, y: f64, phase: &str) -> PyResult<String> {
    let phase = match phase {
        "serve" => Phase::Serve,
        "rally" => Phase::Rally,
        p => return Err(PyValueError::new_err(format!("unknown phase `{p}`"))),
    };
    Ok(classify_zone(&CourtPoint::planar(x, y), phase).map_err(to_py)?.to_string())
}

/// The 14 court keypoints in clip-header order.
#[pyfunction]
fn court_keypoints() -> Vec<(f64, f64)> {
    reference_keypoints().iter().map(|p| (p.x, p.y)).collect()
}

#[pymodule]
fn rallyforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RallyforgeError", m.py().get_type::<RallyforgeError>())?;
    m.add_class::<PyHomography>()?;
    m.add_class::<PyScoreState>()?;
    m.add_class::<PyScene>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(solve_vertical_segment, m)?)?;
    m.add_function(wrap_pyfunction!(zone_of, m)?)?;
    m.add_function(wrap_pyfunction!(court_keypoints, m)?)?;
    Ok(())
}
