use std::io::{BufReader, BufWriter};
use std::net::{TcpListener, TcpStream};

use log::{debug, info, warn};

use super::codec::{read_message, write_message, MsgType, WireMessage, WirePoint};
use super::BridgeError;
use crate::collision::Obstacle;
use crate::frenet::ReferencePathInput;
use crate::planner::{PlannerContext, PlannerSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionSummary {
    pub cycles: u64,
    /// Cycles answered with an empty trajectory.
    pub failures: u64,
}

pub fn bind(endpoint: &str) -> Result<TcpListener, BridgeError> {
    TcpListener::bind(endpoint).map_err(BridgeError::Bind)
}

/// Binds `endpoint` and serves exactly one driver session.
pub fn serve_planner(endpoint: &str, settings: PlannerSettings) -> Result<SessionSummary, BridgeError> {
    let listener = bind(endpoint)?;
    info!("listening on {}", listener.local_addr()?);
    serve_session(&listener, settings)
}

/// Accepts one connection on `listener` and runs it until `SHUTDOWN`.
pub fn serve_session(
    listener: &TcpListener,
    settings: PlannerSettings,
) -> Result<SessionSummary, BridgeError> {
    let (stream, peer) = listener.accept()?;
    info!("driver connected from {peer}");
    let result = run_session(stream, settings);
    match &result {
        Ok(s) => info!("session closed after {} cycles", s.cycles),
        Err(e) => warn!("session aborted: {e}"),
    }
    result
}

fn run_session(stream: TcpStream, settings: PlannerSettings) -> Result<SessionSummary, BridgeError> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let mut ctx: Option<PlannerContext> = None;
    let mut obstacles: Vec<Obstacle> = Vec::new();
    let mut summary = SessionSummary::default();

    loop {
        match read_message(&mut reader)? {
            WireMessage::ReferencePath(points) => {
                ctx = Some(PlannerContext::init(&ReferencePathInput::new(points), settings)?);
                debug!("planner initialized");
            }
            WireMessage::Obstacles(obs) => obstacles = obs,
            WireMessage::EvState(state) => {
                let ctx = ctx.as_mut().ok_or(BridgeError::ProtocolViolation {
                    expected: "REFERENCE_PATH",
                    got: MsgType::EvState,
                })?;
                // an empty trajectory tells the driver that planning failed
                let reply: Vec<WirePoint> = match ctx.plan_cycle(&state, &obstacles) {
                    Ok(r) => r.optimal.points.iter().map(WirePoint::from).collect(),
                    Err(e) => {
                        debug!("cycle {}: {e}", summary.cycles);
                        summary.failures += 1;
                        Vec::new()
                    }
                };
                summary.cycles += 1;
                write_message(&mut writer, &WireMessage::Trajectory(reply))?;
            }
            WireMessage::Shutdown => return Ok(summary),
            WireMessage::Trajectory(_) => {
                return Err(BridgeError::ProtocolViolation {
                    expected: "EV_STATE, OBSTACLES, REFERENCE_PATH or SHUTDOWN",
                    got: MsgType::Trajectory,
                })
            }
        }
    }
}
