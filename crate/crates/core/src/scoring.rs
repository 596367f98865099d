//! Tennis score state machine and point-context labels.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerId {
    P1,
    P2,
}

impl PlayerId {
    pub const BOTH: [PlayerId; 2] = [PlayerId::P1, PlayerId::P2];

    pub fn other(self) -> PlayerId {
        match self {
            PlayerId::P1 => PlayerId::P2,
            PlayerId::P2 => PlayerId::P1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            PlayerId::P1 => 0,
            PlayerId::P2 => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlayerId::P1 => "p1",
            PlayerId::P2 => "p2",
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum FinalSetRule {
    /// 7-point tiebreak at 6–6, like every other set.
    #[default]
    #[serde(rename = "tiebreak_at_6")]
    TiebreakAt6,
    /// 7-point tiebreak at 12–12.
    #[serde(rename = "tiebreak_at_12")]
    TiebreakAt12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchFormat {
    pub best_of: u8,
    #[serde(default)]
    pub final_set_rule: FinalSetRule,
}

impl Default for MatchFormat {
    fn default() -> Self {
        Self {
            best_of: 5,
            final_set_rule: FinalSetRule::TiebreakAt6,
        }
    }
}

impl MatchFormat {
    pub fn sets_to_win(&self) -> u8 {
        self.best_of / 2 + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.best_of != 3 && self.best_of != 5 {
            return Err(Error::validation("scoring best_of must be 3 or 5"));
        }
        Ok(())
    }
}

/// Points in a regular game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum GamePoints {
    #[default]
    #[serde(rename = "0")]
    Love,
    #[serde(rename = "15")]
    Fifteen,
    #[serde(rename = "30")]
    Thirty,
    #[serde(rename = "40")]
    Forty,
    #[serde(rename = "AD")]
    Advantage,
}

impl GamePoints {
    fn next(self) -> GamePoints {
        match self {
            GamePoints::Love => GamePoints::Fifteen,
            GamePoints::Fifteen => GamePoints::Thirty,
            GamePoints::Thirty => GamePoints::Forty,
            GamePoints::Forty | GamePoints::Advantage => GamePoints::Advantage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreState {
    pub sets: [u8; 2],
    pub games: [u8; 2],
    pub points: [GamePoints; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiebreak: Option<[u16; 2]>,
    pub server: PlayerId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<PlayerId>,
    #[serde(default)]
    pub format: MatchFormat,
}

impl Default for ScoreState {
    fn default() -> Self {
        Self::new(PlayerId::P1, MatchFormat::default())
    }
}

/// What a single point decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointEffect {
    pub game: bool,
    pub set: bool,
    pub matched: bool,
}

impl ScoreState {
    pub fn new(server: PlayerId, format: MatchFormat) -> Self {
        Self {
            sets: [0; 2],
            games: [0; 2],
            points: [GamePoints::Love; 2],
            tiebreak: None,
            server,
            winner: None,
            format,
        }
    }

    pub fn receiver(&self) -> PlayerId {
        self.server.other()
    }

    pub fn in_final_set(&self) -> bool {
        u16::from(self.sets[0]) + u16::from(self.sets[1]) == u16::from(self.format.best_of) - 1
    }

    /// Games each player must reach before a tiebreak is played.
    pub fn tiebreak_at(&self) -> u8 {
        if self.in_final_set() && self.format.final_set_rule == FinalSetRule::TiebreakAt12 {
            12
        } else {
            6
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.format.validate()?;
        let need = self.format.sets_to_win();
        match self.winner {
            None => {
                if self.sets.iter().any(|&s| s >= need) {
                    return Err(Error::validation("set count already decides the match"));
                }
            }
            Some(w) => {
                if self.sets[w.index()] != need || self.sets[w.other().index()] >= need {
                    return Err(Error::validation("match winner inconsistent with sets"));
                }
                return Ok(());
            }
        }

        let t = self.tiebreak_at();
        let (hi, lo) = (self.games[0].max(self.games[1]), self.games[0].min(self.games[1]));
        if hi > t || (hi >= 6 && hi - lo >= 2) || (hi == t && lo + 1 < t) {
            return Err(Error::validation(format!(
                "games {}-{} are not an in-progress set",
                self.games[0], self.games[1]
            )));
        }
        let at_tiebreak = self.games == [t, t];
        match (at_tiebreak, self.tiebreak) {
            (true, None) => return Err(Error::validation("tiebreak must be active at tiebreak games")),
            (false, Some(_)) => return Err(Error::validation("tiebreak active outside tiebreak games")),
            (true, Some(tb)) => {
                if self.points != [GamePoints::Love; 2] {
                    return Err(Error::validation("regular points set during tiebreak"));
                }
                let (h, l) = (tb[0].max(tb[1]), tb[0].min(tb[1]));
                if h >= 7 && h - l >= 2 {
                    return Err(Error::validation("tiebreak already decided"));
                }
            }
            (false, None) => {
                use GamePoints::*;
                for i in 0..2 {
                    if self.points[i] == Advantage && self.points[1 - i] != Forty {
                        return Err(Error::validation("advantage is only possible from deuce"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies one point and reports what it decided.
    pub fn apply_point(&self, point_winner: PlayerId) -> Result<(ScoreState, PointEffect)> {
        if self.winner.is_some() {
            return Err(Error::validation("match already decided"));
        }
        self.validate()?;
        let mut s = *self;
        let w = point_winner.index();
        let l = 1 - w;
        let mut effect = PointEffect::default();

        if let Some(mut tb) = s.tiebreak {
            let played = tb[0] + tb[1];
            let first = tiebreak_first_server(s.server, played);
            tb[w] += 1;
            if tb[w] >= 7 && tb[w] - tb[l] >= 2 {
                s.tiebreak = None;
                s.games[w] += 1;
                s.server = first.other();
                effect.game = true;
                s.finish_set(point_winner, &mut effect);
            } else {
                s.tiebreak = Some(tb);
                s.server = tiebreak_server(first, played + 1);
            }
            return Ok((s, effect));
        }

        use GamePoints::*;
        let won_game = match (s.points[w], s.points[l]) {
            (Advantage, _) => true,
            (Forty, Advantage) => {
                s.points[l] = Forty;
                false
            }
            (Forty, Forty) => {
                s.points[w] = Advantage;
                false
            }
            (Forty, _) => true,
            (p, _) => {
                s.points[w] = p.next();
                false
            }
        };
        if won_game {
            effect.game = true;
            s.points = [Love; 2];
            s.games[w] += 1;
            s.server = s.server.other();
            let t = s.tiebreak_at();
            if s.games[w] >= 6 && s.games[w] - s.games[l] >= 2 {
                s.finish_set(point_winner, &mut effect);
            } else if s.games == [t, t] {
                s.tiebreak = Some([0, 0]);
            }
        }
        Ok((s, effect))
    }

    fn finish_set(&mut self, w: PlayerId, effect: &mut PointEffect) {
        effect.set = true;
        self.sets[w.index()] += 1;
        self.games = [0; 2];
        if self.sets[w.index()] == self.format.sets_to_win() {
            self.winner = Some(w);
            effect.matched = true;
        }
    }
}

/// Who served the first point of a tiebreak, given the server of the point
/// about to be played and the number of tiebreak points already played.
fn tiebreak_first_server(current: PlayerId, played: u16) -> PlayerId {
    if ((played + 1) / 2) % 2 == 0 {
        current
    } else {
        current.other()
    }
}

/// Tiebreak rotation: first server serves one point, then two each.
fn tiebreak_server(first: PlayerId, point_index: u16) -> PlayerId {
    if ((point_index + 1) / 2) % 2 == 0 {
        first
    } else {
        first.other()
    }
}

/// Applies one point with standard scoring rules.
pub fn advance_score(state: &ScoreState, point_winner: PlayerId) -> Result<ScoreState> {
    state.apply_point(point_winner).map(|(s, _)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointLabel {
    GamePoint,
    BreakPoint,
    SetPoint,
    MatchPoint,
}

impl PointLabel {
    pub fn text(self) -> &'static str {
        match self {
            PointLabel::GamePoint => "game point",
            PointLabel::BreakPoint => "break point",
            PointLabel::SetPoint => "set point",
            PointLabel::MatchPoint => "match point",
        }
    }
}

/// Labels describing what the next point could decide, by one-step
/// lookahead over [`advance_score`].
pub fn point_context_labels(state: &ScoreState) -> BTreeSet<PointLabel> {
    let mut labels = BTreeSet::new();
    if state.winner.is_some() || state.validate().is_err() {
        return labels;
    }
    for p in PlayerId::BOTH {
        let Ok((_, effect)) = state.apply_point(p) else {
            continue;
        };
        if effect.game {
            labels.insert(PointLabel::GamePoint);
            if p == state.receiver() {
                labels.insert(PointLabel::BreakPoint);
            }
        }
        if effect.set {
            labels.insert(PointLabel::SetPoint);
        }
        if effect.matched {
            labels.insert(PointLabel::MatchPoint);
        }
    }
    labels
}
