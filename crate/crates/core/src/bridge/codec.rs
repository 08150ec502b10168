//! Frame layout: `"EPLN" | version | type | payload_len (u32 LE) | payload`.
//! All floats are IEEE-754 binary64 little-endian, all counts u32 LE.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::collision::{Obstacle, ObstaclePose};
use crate::geometry::Point2;
use crate::state::{EvState, TrajectoryPoint};

pub const MAGIC: [u8; 4] = *b"EPLN";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 10;
/// Upper bound on a declared payload; larger lengths are rejected before reading.
pub const MAX_PAYLOAD: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    EvState = 0x01,
    ReferencePath = 0x02,
    Obstacles = 0x03,
    Trajectory = 0x04,
    Shutdown = 0x05,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0x01 => MsgType::EvState,
            0x02 => MsgType::ReferencePath,
            0x03 => MsgType::Obstacles,
            0x04 => MsgType::Trajectory,
            0x05 => MsgType::Shutdown,
            _ => return None,
        })
    }
}

/// The six trajectory fields carried on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WirePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub a: f64,
}

impl From<&TrajectoryPoint> for WirePoint {
    fn from(p: &TrajectoryPoint) -> Self {
        Self { t: p.t, x: p.x, y: p.y, theta: p.theta, v: p.v, a: p.a }
    }
}

impl From<&WirePoint> for TrajectoryPoint {
    fn from(p: &WirePoint) -> Self {
        TrajectoryPoint { t: p.t, x: p.x, y: p.y, theta: p.theta, v: p.v, a: p.a, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    EvState(EvState),
    ReferencePath(Vec<Point2>),
    Obstacles(Vec<Obstacle>),
    /// Optimal trajectory of one cycle; empty when planning failed.
    Trajectory(Vec<WirePoint>),
    Shutdown,
}

impl WireMessage {
    pub fn msg_type(&self) -> MsgType {
        match self {
            WireMessage::EvState(_) => MsgType::EvState,
            WireMessage::ReferencePath(_) => MsgType::ReferencePath,
            WireMessage::Obstacles(_) => MsgType::Obstacles,
            WireMessage::Trajectory(_) => MsgType::Trajectory,
            WireMessage::Shutdown => MsgType::Shutdown,
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DecodeError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported protocol version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown message type {0:#04x}")]
    UnknownType(u8),
    #[error("payload length {declared} does not match the {msg_type:?} body")]
    LengthMismatch { msg_type: MsgType, declared: usize },
    /// More input is needed; `needed` is the total frame size known so far.
    #[error("truncated frame, need {needed} bytes")]
    Truncated { needed: usize },
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64s(out: &mut Vec<u8>, vs: &[f64]) {
    for v in vs {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn count(n: usize) -> u32 {
    u32::try_from(n).expect("element count exceeds u32")
}

/// Appends the encoded frame to `out`.
pub fn encode_into(msg: &WireMessage, out: &mut Vec<u8>) {
    let start = out.len();
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(msg.msg_type() as u8);
    put_u32(out, 0);
    match msg {
        WireMessage::EvState(s) => put_f64s(out, &[s.x, s.y, s.v, s.a, s.theta]),
        WireMessage::ReferencePath(pts) => {
            put_u32(out, count(pts.len()));
            for p in pts {
                put_f64s(out, &[p.x, p.y]);
            }
        }
        WireMessage::Obstacles(obs) => {
            put_u32(out, count(obs.len()));
            for o in obs {
                put_u32(out, o.id);
                put_f64s(out, &[o.half_length, o.half_width]);
                put_u32(out, count(o.prediction.len()));
                for p in &o.prediction {
                    put_f64s(out, &[p.t, p.x, p.y, p.theta]);
                }
            }
        }
        WireMessage::Trajectory(pts) => {
            put_u32(out, count(pts.len()));
            for p in pts {
                put_f64s(out, &[p.t, p.x, p.y, p.theta, p.v, p.a]);
            }
        }
        WireMessage::Shutdown => {}
    }
    let len = count(out.len() - start - HEADER_LEN);
    out[start + 6..start + HEADER_LEN].copy_from_slice(&len.to_le_bytes());
}

pub fn encode(msg: &WireMessage) -> Vec<u8> {
    let mut out = Vec::new();
    encode_into(msg, &mut out);
    out
}

/// Validated frame header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub msg_type: MsgType,
    pub payload_len: usize,
}

/// Parses the header from the first bytes of `buf`.
pub fn decode_header(buf: &[u8]) -> Result<Header, DecodeError> {
    let m = buf.len().min(4);
    if buf[..m] != MAGIC[..m] {
        return Err(DecodeError::BadMagic);
    }
    if buf.len() < 5 {
        return Err(DecodeError::Truncated { needed: HEADER_LEN });
    }
    if buf[4] != VERSION {
        return Err(DecodeError::UnsupportedVersion(buf[4]));
    }
    if buf.len() < 6 {
        return Err(DecodeError::Truncated { needed: HEADER_LEN });
    }
    let msg_type = MsgType::from_byte(buf[5]).ok_or(DecodeError::UnknownType(buf[5]))?;
    if buf.len() < HEADER_LEN {
        return Err(DecodeError::Truncated { needed: HEADER_LEN });
    }
    let payload_len = u32::from_le_bytes([buf[6], buf[7], buf[8], buf[9]]) as usize;
    if payload_len > MAX_PAYLOAD || !plausible_len(msg_type, payload_len) {
        return Err(DecodeError::LengthMismatch { msg_type, declared: payload_len });
    }
    Ok(Header { msg_type, payload_len })
}

/// Length checks that need no payload bytes.
fn plausible_len(t: MsgType, len: usize) -> bool {
    match t {
        MsgType::EvState => len == 40,
        MsgType::Shutdown => len == 0,
        MsgType::ReferencePath => len >= 4 && (len - 4).is_multiple_of(16),
        MsgType::Trajectory => len >= 4 && (len - 4).is_multiple_of(48),
        MsgType::Obstacles => len >= 4,
    }
}

/// Decodes one frame from the front of `buf`, returning the message and the
/// number of bytes consumed. Never reads past the declared frame.
pub fn decode(buf: &[u8]) -> Result<(WireMessage, usize), DecodeError> {
    let header = decode_header(buf)?;
    let total = HEADER_LEN + header.payload_len;
    if buf.len() < total {
        return Err(DecodeError::Truncated { needed: total });
    }
    let msg = decode_payload(header, &buf[HEADER_LEN..total])?;
    Ok((msg, total))
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Option<[u8; N]> {
        let bytes = self.buf.get(self.pos..self.pos + N)?;
        self.pos += N;
        bytes.try_into().ok()
    }

    fn u32(&mut self) -> Option<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Option<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

/// Decodes a payload whose header has already been validated.
pub fn decode_payload(header: Header, payload: &[u8]) -> Result<WireMessage, DecodeError> {
    let mismatch = DecodeError::LengthMismatch { msg_type: header.msg_type, declared: header.payload_len };
    if payload.len() != header.payload_len {
        return Err(mismatch);
    }
    let mut c = Cursor { buf: payload, pos: 0 };
    let msg = match header.msg_type {
        MsgType::EvState => parse_ev_state(&mut c),
        MsgType::ReferencePath => parse_path(&mut c),
        MsgType::Obstacles => parse_obstacles(&mut c),
        MsgType::Trajectory => parse_trajectory(&mut c),
        MsgType::Shutdown => Some(WireMessage::Shutdown),
    };
    match msg {
        Some(m) if c.remaining() == 0 => Ok(m),
        _ => Err(mismatch),
    }
}

fn parse_ev_state(c: &mut Cursor) -> Option<WireMessage> {
    let (x, y, v, a, theta) = (c.f64()?, c.f64()?, c.f64()?, c.f64()?, c.f64()?);
    Some(WireMessage::EvState(EvState { x, y, v, a, theta }))
}

fn parse_path(c: &mut Cursor) -> Option<WireMessage> {
    let n = c.u32()? as usize;
    if n.checked_mul(16)? != c.remaining() {
        return None;
    }
    let pts = (0..n).map(|_| Some(Point2::new(c.f64()?, c.f64()?))).collect::<Option<Vec<_>>>()?;
    Some(WireMessage::ReferencePath(pts))
}

fn parse_trajectory(c: &mut Cursor) -> Option<WireMessage> {
    let n = c.u32()? as usize;
    if n.checked_mul(48)? != c.remaining() {
        return None;
    }
    let pts = (0..n)
        .map(|_| {
            Some(WirePoint {
                t: c.f64()?,
                x: c.f64()?,
                y: c.f64()?,
                theta: c.f64()?,
                v: c.f64()?,
                a: c.f64()?,
            })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(WireMessage::Trajectory(pts))
}

fn parse_obstacles(c: &mut Cursor) -> Option<WireMessage> {
    let n = c.u32()? as usize;
    // each obstacle needs at least 24 bytes; bounds the allocation below
    if n.checked_mul(24)? > c.remaining() {
        return None;
    }
    let mut obs = Vec::with_capacity(n);
    for _ in 0..n {
        let id = c.u32()?;
        let (half_length, half_width) = (c.f64()?, c.f64()?);
        let m = c.u32()? as usize;
        if m.checked_mul(32)? > c.remaining() {
            return None;
        }
        let prediction = (0..m)
            .map(|_| Some(ObstaclePose { t: c.f64()?, x: c.f64()?, y: c.f64()?, theta: c.f64()? }))
            .collect::<Option<Vec<_>>>()?;
        obs.push(Obstacle { id, half_length, half_width, prediction });
    }
    Some(WireMessage::Obstacles(obs))
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    /// The peer closed the stream before a complete frame arrived.
    #[error("connection closed")]
    Closed,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads exactly one frame from a byte stream.
pub fn read_message<R: Read>(r: &mut R) -> Result<WireMessage, ReadError> {
    let mut header = [0u8; HEADER_LEN];
    read_exact(r, &mut header)?;
    let h = decode_header(&header)?;
    let mut payload = vec![0u8; h.payload_len];
    read_exact(r, &mut payload)?;
    Ok(decode_payload(h, &payload)?)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), ReadError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof | io::ErrorKind::ConnectionReset | io::ErrorKind::BrokenPipe => {
            ReadError::Closed
        }
        _ => ReadError::Io(e),
    })
}

pub fn write_message<W: Write>(w: &mut W, msg: &WireMessage) -> io::Result<()> {
    w.write_all(&encode(msg))?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shutdown_frame_bytes() {
        assert_eq!(encode(&WireMessage::Shutdown), [0x45, 0x50, 0x4C, 0x4E, 0x01, 0x05, 0, 0, 0, 0]);
    }

    #[test]
    fn zero_state_frame() {
        let bytes = encode(&WireMessage::EvState(EvState::default()));
        assert_eq!(bytes.len(), 50);
        assert_eq!(&bytes[..10], &[0x45, 0x50, 0x4C, 0x4E, 0x01, 0x01, 40, 0, 0, 0]);
        assert!(bytes[10..].iter().all(|&b| b == 0));
    }

    #[test]
    fn decode_examples() {
        let bytes = encode(&WireMessage::Shutdown);
        assert_eq!(decode(&bytes), Ok((WireMessage::Shutdown, 10)));
        assert_eq!(decode(b"XXXX\x01\x05\0\0\0\0"), Err(DecodeError::BadMagic));
        let state = encode(&WireMessage::EvState(EvState::new(1.0, 2.0, 3.0, 4.0, 0.5)));
        assert_eq!(decode(&state[..30]), Err(DecodeError::Truncated { needed: 50 }));
    }

    #[test]
    fn header_errors() {
        assert_eq!(decode(b"EPLN\x02\x05\0\0\0\0"), Err(DecodeError::UnsupportedVersion(2)));
        assert_eq!(decode(b"EPLN\x01\x09\0\0\0\0"), Err(DecodeError::UnknownType(9)));
        assert!(matches!(decode(b"EPLN\x01\x05\x01\0\0\0x"), Err(DecodeError::LengthMismatch { .. })));
        assert!(matches!(decode(b"EPLN\x01\x04\xff\xff\xff\xff"), Err(DecodeError::LengthMismatch { .. })));
        assert_eq!(decode(b"EP"), Err(DecodeError::Truncated { needed: 10 }));
        assert_eq!(decode(b""), Err(DecodeError::Truncated { needed: 10 }));
    }

    #[test]
    fn count_disagreeing_with_length() {
        let mut bytes = encode(&WireMessage::ReferencePath(vec![Point2::new(1.0, 2.0)]));
        bytes[10] = 2;
        assert!(matches!(decode(&bytes), Err(DecodeError::LengthMismatch { .. })));
    }

    #[test]
    fn obstacles_round_trip() {
        let msg = WireMessage::Obstacles(vec![Obstacle {
            id: 7,
            half_length: 2.25,
            half_width: 0.9,
            prediction: vec![
                ObstaclePose { t: 0.0, x: 1.0, y: 2.0, theta: 0.1 },
                ObstaclePose { t: 0.1, x: 1.5, y: 2.0, theta: 0.1 },
            ],
        }]);
        let bytes = encode(&msg);
        assert_eq!(bytes.len(), 10 + 4 + 4 + 16 + 4 + 64);
        assert_eq!(decode(&bytes), Ok((msg, bytes.len())));
    }

    #[test]
    fn stream_read() {
        let mut bytes = encode(&WireMessage::Trajectory(vec![WirePoint { t: 0.1, ..Default::default() }]));
        encode_into(&WireMessage::Shutdown, &mut bytes);
        let mut r = &bytes[..];
        assert!(matches!(read_message(&mut r), Ok(WireMessage::Trajectory(p)) if p.len() == 1));
        assert!(matches!(read_message(&mut r), Ok(WireMessage::Shutdown)));
        assert!(matches!(read_message(&mut r), Err(ReadError::Closed)));
    }
}
