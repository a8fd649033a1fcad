//! A human-versus-engine game, independent of any transport.

use modnim_core::analysis::Engine;
use modnim_core::game::{classify_move, IllegalMove};
use modnim_core::{Error as CoreError, MoveDelta, Position, Rules};
use serde::Serialize;

use crate::wire::MoveJson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Actor {
    Human,
    Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum GameResult {
    Ongoing,
    HumanWon,
    EngineWon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryStep {
    pub actor: Actor,
    pub delta: MoveDelta,
    pub result: Position,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SessionError {
    #[error("illegal move: {0}")]
    Illegal(IllegalMove),
    #[error("the game is already over")]
    Finished,
}

#[derive(Debug, Clone)]
pub struct PlaySession {
    id: String,
    rules: Rules,
    current: Position,
    human_to_move: bool,
    history: Vec<HistoryStep>,
    engine: Engine,
}

impl PlaySession {
    /// Starts a game. When the engine moves first it plays immediately.
    pub fn new(id: String, rules: Rules, start: Position, human_first: bool, budget: u64) -> Result<Self, CoreError> {
        let engine = Engine::new(rules, &start, budget)?;
        let mut s = PlaySession {
            id,
            rules,
            current: start,
            human_to_move: human_first,
            history: Vec::new(),
            engine,
        };
        if !human_first {
            s.engine_turn();
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn current(&self) -> &Position {
        &self.current
    }

    pub fn human_to_move(&self) -> bool {
        self.human_to_move
    }

    pub fn history(&self) -> &[HistoryStep] {
        &self.history
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn finished(&self) -> bool {
        self.current.is_terminal()
    }

    /// Under normal play whoever faces the empty position has lost.
    pub fn result(&self) -> GameResult {
        match (self.finished(), self.human_to_move) {
            (false, _) => GameResult::Ongoing,
            (true, true) => GameResult::EngineWon,
            (true, false) => GameResult::HumanWon,
        }
    }

    /// Applies a human move and, unless it ended the game, the engine's
    /// reply. Returns the reply.
    pub fn human_move(&mut self, removals: Vec<u64>) -> Result<Option<MoveDelta>, SessionError> {
        if self.finished() {
            return Err(SessionError::Finished);
        }
        let delta = classify_move(&self.rules, &self.current, removals).map_err(SessionError::Illegal)?;
        self.apply(Actor::Human, delta);
        Ok(self.engine_turn())
    }

    fn engine_turn(&mut self) -> Option<MoveDelta> {
        if self.finished() {
            return None;
        }
        let reply = self
            .engine
            .reply(&self.current)
            .expect("positions in play stay inside the engine's box")
            .expect("non-terminal positions have a move");
        self.apply(Actor::Engine, reply.clone());
        Some(reply)
    }

    fn apply(&mut self, actor: Actor, delta: MoveDelta) {
        let next = self.current.apply(&delta).expect("move was checked");
        self.history.push(HistoryStep {
            actor,
            delta,
            result: next.clone(),
        });
        self.current = next;
        self.human_to_move = actor == Actor::Engine;
    }

    pub fn state(&self) -> SessionState {
        SessionState {
            session_id: self.id.clone(),
            m: self.rules.m(),
            heaps: self.current.heaps().to_vec(),
            human_to_move: self.human_to_move,
            finished: self.finished(),
            result: self.result(),
            history: self
                .history
                .iter()
                .map(|h| HistoryJson {
                    actor: h.actor,
                    mv: MoveJson::from(&h.delta),
                    position: h.result.heaps().to_vec(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HistoryJson {
    pub actor: Actor,
    #[serde(rename = "move")]
    pub mv: MoveJson,
    pub position: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionState {
    pub session_id: String,
    pub m: u64,
    pub heaps: Vec<u64>,
    pub human_to_move: bool,
    pub finished: bool,
    pub result: GameResult,
    pub history: Vec<HistoryJson>,
}
