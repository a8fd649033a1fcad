//! Line-oriented terminal play against the engine.

use std::io::{self, BufRead, Write};

use modnim_core::{Position, Rules};

use crate::session::{GameResult, PlaySession, SessionError};

/// How a terminal game ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayEnd {
    Finished(GameResult),
    /// Input closed or the player quit.
    Abandoned,
}

fn parse_removals(line: &str) -> Option<Vec<u64>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect()
}

fn show(out: &mut impl Write, p: &Position) -> io::Result<()> {
    writeln!(out, "heaps: {p}  (tokens: {})", p.heap_sum())
}

/// Runs a game on `input`/`output`. Moves are removal vectors such as
/// `3,1` (one entry per heap); `?` asks for a hint and `q` quits.
pub fn run(
    rules: Rules,
    start: Position,
    human_first: bool,
    budget: u64,
    mut input: impl BufRead,
    mut out: impl Write,
) -> io::Result<PlayEnd> {
    let m = rules.m();
    let mut session = PlaySession::new("terminal".into(), rules, start, human_first, budget)
        .map_err(|e| io::Error::other(e.to_string()))?;
    writeln!(
        out,
        "{m}-Modular Nim. Remove tokens from one heap, or a positive multiple of {m} in total from any heaps."
    )?;
    writeln!(out, "Enter one removal per heap, e.g. 0,3. '?' for a hint, 'q' to quit.")?;
    if let Some(step) = session.history().first() {
        writeln!(out, "engine plays {:?} (type {})", step.delta.removals, step.delta.kind.label())?;
    }
    let mut line = String::new();
    loop {
        show(&mut out, session.current())?;
        match session.result() {
            GameResult::HumanWon => {
                writeln!(out, "you win!")?;
                return Ok(PlayEnd::Finished(GameResult::HumanWon));
            }
            GameResult::EngineWon => {
                writeln!(out, "engine wins.")?;
                return Ok(PlayEnd::Finished(GameResult::EngineWon));
            }
            GameResult::Ongoing => {}
        }
        write!(out, "your move> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(PlayEnd::Abandoned);
        }
        let cmd = line.trim();
        if cmd.eq_ignore_ascii_case("q") {
            return Ok(PlayEnd::Abandoned);
        }
        if cmd == "?" {
            match session.engine().best_move(session.current()) {
                Ok(Some(mv)) => writeln!(out, "hint: {:?} (type {})", mv.removals, mv.kind.label())?,
                Ok(None) => writeln!(out, "hint: every move loses against perfect play")?,
                Err(e) => writeln!(out, "hint unavailable: {e}")?,
            }
            continue;
        }
        let Some(removals) = parse_removals(cmd) else {
            writeln!(out, "could not read '{cmd}'; expected numbers like 0,3")?;
            continue;
        };
        match session.human_move(removals) {
            Ok(Some(reply)) => {
                writeln!(out, "engine plays {:?} (type {})", reply.removals, reply.kind.label())?;
            }
            Ok(None) => {}
            Err(SessionError::Illegal(rule)) => {
                writeln!(out, "illegal move ({}): {rule}", rule.rule())?;
            }
            Err(SessionError::Finished) => unreachable!("loop exits once finished"),
        }
    }
}
