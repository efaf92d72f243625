//! Replayable move sequences and the common K-stabilization of two records
//! with the same slope.

use serde::{Deserialize, Serialize};

use super::components::GeneralizedSplitting;
use super::moves::k_stabilize;
use super::record::KSplittingRecord;
use super::reduction::{
    collar_disk, peel_collar, second_stabilize, weak_reduce, weak_reduction_witness, COLLAR_TORUS, CORE_SURFACE,
    PRODUCT_TORUS,
};
use crate::error::{Error, Result};
use crate::geom::StabilizationSite;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    /// A K-stabilization, with the handle site when it was built geometrically.
    KStabilize(Option<StabilizationSite>),
    PeelCollar,
    SecondStabilize,
    WeakReduce,
    /// Stabilizations of the knot complement's splitting.
    RSStabilize(u32),
    /// Amalgamation along the listed gluings, in order.
    Amalgamate(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationTrace {
    pub input: KSplittingRecord,
    pub moves: Vec<Move>,
    pub output: KSplittingRecord,
}

enum State {
    Record(KSplittingRecord),
    Split(GeneralizedSplitting),
}

fn step(state: State, mv: &Move) -> Result<State> {
    let wrong = |what: &str| Err(Error::Protocol(format!("{mv:?} cannot be applied to {what}")));
    match (state, mv) {
        (State::Record(r), Move::KStabilize(_)) => Ok(State::Record(k_stabilize(&r)?)),
        (State::Record(r), Move::PeelCollar) => Ok(State::Record(peel_collar(&r).0)),
        (State::Record(r), Move::SecondStabilize) => Ok(State::Record(second_stabilize(&r, &collar_disk())?.0)),
        (State::Record(r), Move::WeakReduce) => Ok(State::Split(weak_reduce(&r, &weak_reduction_witness())?)),
        (State::Split(gs), Move::RSStabilize(n)) => Ok(State::Split(gs.rs_stabilize(*n)?)),
        (State::Split(gs), Move::Amalgamate(labels)) => {
            let gs = gs.amalgamate_along(labels)?;
            if gs.components().len() == 1 {
                Ok(State::Record(gs.into_record()?))
            } else {
                Ok(State::Split(gs))
            }
        }
        (State::Record(_), _) => wrong("a record"),
        (State::Split(_), _) => wrong("a generalized splitting"),
    }
}

/// Applies `moves` to `input`; the sequence must end on a single record.
pub fn apply_moves(input: &KSplittingRecord, moves: &[Move]) -> Result<KSplittingRecord> {
    let mut state = State::Record(input.clone());
    for mv in moves {
        state = step(state, mv)?;
    }
    match state {
        State::Record(r) => Ok(r),
        State::Split(_) => Err(Error::Protocol("the trace ends before the splitting is reassembled".into())),
    }
}

/// Replays a trace from its input record.
pub fn replay(trace: &StabilizationTrace) -> Result<KSplittingRecord> {
    apply_moves(&trace.input, &trace.moves)
}

impl StabilizationTrace {
    pub fn verify(&self) -> Result<()> {
        let r = replay(self)?;
        if r != self.output {
            return Err(Error::Protocol(format!(
                "replay reaches genus {} slope {}, the trace records genus {} slope {}",
                r.genus(),
                r.slope(),
                self.output.genus(),
                self.output.slope()
            )));
        }
        Ok(())
    }
}

fn pipeline(g: u32, target: u32, level: bool) -> Vec<Move> {
    let mut moves =
        vec![Move::PeelCollar, Move::SecondStabilize, Move::WeakReduce, Move::Amalgamate(vec![CORE_SURFACE.into()])];
    if level {
        moves.push(Move::RSStabilize(target - (g + 1)));
    }
    moves.push(Move::Amalgamate(vec![PRODUCT_TORUS.into(), COLLAR_TORUS.into()]));
    moves
}

/// Common K-stabilization of two records with equal slope: split each into
/// collar, `T² × I` and complement, stabilize both complements to genus
/// `max(gA, gB) + 1 + extra_stabs`, and amalgamate again. The result has
/// genus `max(gA, gB) + 2 + extra_stabs`.
pub fn common_stabilization(
    a: &KSplittingRecord,
    b: &KSplittingRecord,
    extra_stabs: u32,
) -> Result<(KSplittingRecord, StabilizationTrace, StabilizationTrace)> {
    if a.manifold() != b.manifold() {
        return Err(Error::ManifoldMismatch { a: a.manifold().to_string(), b: b.manifold().to_string() });
    }
    if a.knot() != b.knot() {
        return Err(Error::KnotMismatch { a: a.knot().name.clone(), b: b.knot().name.clone() });
    }
    if a.slope() != b.slope() {
        return Err(Error::SlopeMismatch { a: a.slope(), b: b.slope() });
    }
    let target = a.genus().max(b.genus()) + 1 + extra_stabs;
    // Leveling forgets provenance, so it runs on both sides or on neither.
    let level = a.genus() != b.genus() || extra_stabs > 0;
    let trace = |r: &KSplittingRecord| -> Result<StabilizationTrace> {
        let input = r.without_geometry();
        let moves = pipeline(r.genus(), target, level);
        let output = apply_moves(&input, &moves)?;
        Ok(StabilizationTrace { input, moves, output })
    };
    let (ta, tb) = (trace(a)?, trace(b)?);
    if ta.output != tb.output {
        return Err(Error::Protocol("the two pipelines reached different records".into()));
    }
    Ok((ta.output.clone(), ta, tb))
}
