//! Zone-tagged event logging, the per-point score timeline, and windowed
//! zone metrics.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::court::{classify_serve_bounce, classify_zone, CourtPoint, Phase, Side, ZoneId};
use crate::error::{Error, Result};
use crate::ingest::EventKind;
use crate::kinematics::BallTrajectory3D;
use crate::scoring::{point_context_labels, PlayerId, PointLabel, ScoreState};

/// A ball event inside one point, before zone tagging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvent {
    pub t: f64,
    pub kind: EventKind,
    pub player_id: Option<PlayerId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub kind: EventKind,
    pub zone: ZoneId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player_id: Option<PlayerId>,
    pub point_index: usize,
    pub position: CourtPoint,
}

/// Tags every bounce, contact and net-cord event of one point with its zone.
///
/// Bounces before the receiver's first contact are serve bounces and are
/// classified against the receiving half; everything else uses rally zones.
pub fn log_zone_events(
    point_index: usize,
    trajectory: Option<&BallTrajectory3D>,
    events: &[PointEvent],
) -> Result<Vec<EventRecord>> {
    let mut server: Option<(PlayerId, Side)> = None;
    let mut serving = true;
    let mut out = Vec::new();
    for e in events.iter().filter(|e| e.kind.is_ball_event()) {
        let traj = trajectory.ok_or_else(|| {
            Error::validation(format!("event at t={} but point {point_index} has no trajectory", e.t))
        })?;
        let position = traj.position_at(e.t).ok_or_else(|| {
            Error::validation(format!(
                "event at t={} outside trajectory span [{}, {}]",
                e.t,
                traj.start(),
                traj.end()
            ))
        })?;
        let zone = match e.kind {
            EventKind::Contact => {
                let id = e.player_id;
                match server {
                    None => server = id.map(|p| (p, Side::of(position.y))),
                    Some((s, _)) if id != Some(s) => serving = false,
                    _ => {}
                }
                classify_zone(&position, Phase::Rally)?
            }
            EventKind::Bounce if serving => match server {
                Some((_, side)) => classify_serve_bounce(&position, side.opposite())?,
                None => classify_zone(&position, Phase::Serve)?,
            },
            _ => classify_zone(&position, Phase::Rally)?,
        };
        out.push(EventRecord {
            t: e.t,
            kind: e.kind,
            zone,
            player_id: e.player_id,
            point_index,
            position,
        });
    }
    Ok(out)
}

/// Score bookkeeping for one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub point_index: usize,
    /// Ordinal of the game this point was played in, counted from the clip
    /// start.
    pub game_number: u32,
    pub before: ScoreState,
    pub after: ScoreState,
    pub labels_before: BTreeSet<PointLabel>,
    pub winner: PlayerId,
    pub decided_game: bool,
    pub decided_set: bool,
    pub decided_match: bool,
}

pub fn build_score_timeline(initial: &ScoreState, winners: &[PlayerId]) -> Result<Vec<ScoreEntry>> {
    let mut state = *initial;
    let mut game = 0;
    let mut out = Vec::with_capacity(winners.len());
    for (i, &w) in winners.iter().enumerate() {
        let (after, effect) = state.apply_point(w)?;
        out.push(ScoreEntry {
            point_index: i,
            game_number: game,
            before: state,
            after,
            labels_before: point_context_labels(&state),
            winner: w,
            decided_game: effect.game,
            decided_set: effect.set,
            decided_match: effect.matched,
        });
        if effect.game {
            game += 1;
        }
        state = after;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricsWindow {
    #[serde(rename = "match")]
    MatchStart,
    #[serde(rename = "game")]
    CurrentGame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneMetrics {
    pub window: MetricsWindow,
    /// Metrics include every record up to and including this point.
    pub point_index: usize,
    pub counts: BTreeMap<EventKind, BTreeMap<ZoneId, u32>>,
    /// Per kind, rounded to one decimal so that each kind sums to exactly
    /// 100.0; kinds without records are omitted.
    pub percentages: BTreeMap<EventKind, BTreeMap<ZoneId, f64>>,
}

/// Counts and percentages per zone and kind over `window`, as seen right
/// after point `point_index`.
pub fn compute_zone_metrics(
    records: &[EventRecord],
    timeline: &[ScoreEntry],
    window: MetricsWindow,
    point_index: usize,
) -> ZoneMetrics {
    let game_of = |p: usize| timeline.get(p).map(|e| e.game_number);
    let current_game = game_of(point_index);
    let mut counts: BTreeMap<EventKind, BTreeMap<ZoneId, u32>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.point_index <= point_index) {
        if window == MetricsWindow::CurrentGame && game_of(r.point_index) != current_game {
            continue;
        }
        *counts.entry(r.kind).or_default().entry(r.zone).or_default() += 1;
    }
    let percentages = counts
        .iter()
        .map(|(k, zones)| (*k, rounded_percentages(zones)))
        .collect();
    ZoneMetrics {
        window,
        point_index,
        counts,
        percentages,
    }
}

/// Largest-remainder rounding to tenths of a percent.
fn rounded_percentages(zones: &BTreeMap<ZoneId, u32>) -> BTreeMap<ZoneId, f64> {
    let total: u64 = zones.values().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return BTreeMap::new();
    }
    let mut tenths: Vec<(ZoneId, u64, u64)> = zones
        .iter()
        .map(|(z, &c)| {
            let scaled = u64::from(c) * 1000;
            (*z, scaled / total, scaled % total)
        })
        .collect();
    let assigned: u64 = tenths.iter().map(|t| t.1).sum();
    let mut order: Vec<usize> = (0..tenths.len()).collect();
    order.sort_by(|&a, &b| tenths[b].2.cmp(&tenths[a].2).then(a.cmp(&b)));
    for &i in order.iter().take((1000 - assigned) as usize) {
        tenths[i].1 += 1;
    }
    tenths.into_iter().map(|(z, t, _)| (z, t as f64 / 10.0)).collect()
}
