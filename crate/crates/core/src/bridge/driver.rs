use std::io::{BufReader, BufWriter};
use std::net::TcpStream;
use std::time::{Duration, Instant};

use super::codec::{read_message, write_message, WireMessage};
use super::BridgeError;
use crate::frenet::FrenetFrame;
use crate::planner::{drive_loop, ClosedLoopOptions, ClosedLoopTrace, PhaseTimings, Termination};
use crate::scenario::Scenario;
use crate::state::TrajectoryPoint;

#[derive(Debug)]
pub struct DriveReport {
    pub trace: ClosedLoopTrace,
    /// Round-trip time of every answered cycle.
    pub latencies: Vec<Duration>,
    /// Set when the run ended on a transport or protocol failure.
    pub error: Option<BridgeError>,
}

/// Plays `scenario` closed-loop against a planner server.
///
/// Fails outright only when the server cannot be reached or initialized;
/// a failure mid-run is reported in [`DriveReport::error`] together with the
/// partial trace.
pub fn drive_scenario(
    endpoint: &str,
    scenario: &Scenario,
    opts: &ClosedLoopOptions,
) -> Result<DriveReport, BridgeError> {
    // the driver keeps its own copy of the frame for the goal check
    let frame = FrenetFrame::build(&scenario.reference_path, &scenario.frame)
        .map_err(|e| BridgeError::PlannerInit(e.into()))?;
    let stream = TcpStream::connect(endpoint)?;
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);

    write_message(&mut writer, &WireMessage::ReferencePath(scenario.reference_path.points.clone()))?;
    if !scenario.obstacles.is_empty() {
        write_message(&mut writer, &WireMessage::Obstacles(scenario.obstacles.clone()))?;
    }

    let mut latencies = Vec::with_capacity(opts.max_cycles.min(1 << 16));
    let mut error = None;
    let trace = drive_loop(&frame, scenario.initial_state, opts, scenario.sampling.dt, |_, state| {
        let frenet = frame.cart_to_frenet(state).map_err(|_| Termination::OutsideProjectionDomain)?;
        let start = Instant::now();
        let round_trip = write_message(&mut writer, &WireMessage::EvState(*state))
            .map_err(BridgeError::from)
            .and_then(|_| read_message(&mut reader).map_err(BridgeError::from));
        let elapsed = start.elapsed();
        match round_trip {
            Ok(WireMessage::Trajectory(points)) => {
                latencies.push(elapsed);
                if points.is_empty() {
                    return Err(Termination::NoTrajectory);
                }
                let optimal: Vec<TrajectoryPoint> = points.iter().map(TrajectoryPoint::from).collect();
                let timings = PhaseTimings { receive: elapsed, ..Default::default() };
                Ok((frenet, optimal, timings))
            }
            Ok(other) => {
                error =
                    Some(BridgeError::ProtocolViolation { expected: "TRAJECTORY", got: other.msg_type() });
                Err(Termination::ConnectionLost)
            }
            Err(e) => {
                error = Some(e);
                Err(Termination::ConnectionLost)
            }
        }
    });

    if error.is_none() {
        // best effort: the server may already be gone
        let _ = write_message(&mut writer, &WireMessage::Shutdown);
    }
    Ok(DriveReport { trace, latencies, error })
}
