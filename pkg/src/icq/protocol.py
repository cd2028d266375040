"""Pull schedule, uplink wire format and bit accounting.

Frame layout (big-endian)::

    u32 round | u16 arm | u16 payload bit length | payload bits, MSB first,
    zero-padded to a byte boundary

Frames are self-delimiting, so a message log is stored as plain
concatenation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator

from .errors import ParameterError, ProtocolError, ScheduleError

_HEADER = struct.Struct(">IHH")
MAX_PAYLOAD_BITS = 0xFFFF
_U64_MAX = 2**64 - 1


def schedule_t(alpha: int, i: int) -> int:
    """Cumulative pulls per active arm after round ``i`` (t(0) = 0)."""
    if alpha < 2:
        raise ParameterError("alpha must be >= 2")
    if i < 0:
        raise ParameterError("round index must be >= 0")
    if i == 0:
        return 0
    t = alpha**i
    if t > _U64_MAX:
        raise ScheduleError(f"alpha^{i} does not fit in 64 bits")
    return t


def schedule_b(alpha: int, i: int) -> int:
    """Pulls per active arm during round ``i >= 1``."""
    if i < 1:
        raise ParameterError("pull counts are defined for rounds i >= 1")
    return schedule_t(alpha, i) - schedule_t(alpha, i - 1)


@dataclass(frozen=True)
class Schedule:
    alpha: int

    def t(self, i: int) -> int:
        return schedule_t(self.alpha, i)

    def b(self, i: int) -> int:
        return schedule_b(self.alpha, i)


@dataclass(frozen=True)
class UplinkMessage:
    round: int
    arm: int
    payload: str


@dataclass(frozen=True)
class DownlinkAction:
    round: int
    active_set: frozenset
    pulls: int


def pack(msg: UplinkMessage) -> bytes:
    bits = msg.payload
    if not bits:
        raise ProtocolError("payload must be nonempty")
    if bits.strip("01"):
        raise ProtocolError("payload must be a bit string")
    if len(bits) > MAX_PAYLOAD_BITS:
        raise ProtocolError(f"payload of {len(bits)} bits exceeds the 16-bit length field")
    if not 0 <= msg.round <= 0xFFFFFFFF or not 0 <= msg.arm <= 0xFFFF:
        raise ProtocolError("round or arm does not fit its header field")
    n_bytes = (len(bits) + 7) // 8
    padded = bits.ljust(8 * n_bytes, "0")
    body = int(padded, 2).to_bytes(n_bytes, "big")
    return _HEADER.pack(msg.round, msg.arm, len(bits)) + body


def _unpack_at(data: bytes, offset: int) -> tuple:
    if len(data) - offset < _HEADER.size:
        raise ProtocolError("truncated frame header")
    rnd, arm, nbits = _HEADER.unpack_from(data, offset)
    if nbits == 0:
        raise ProtocolError("frame declares an empty payload")
    n_bytes = (nbits + 7) // 8
    start = offset + _HEADER.size
    if len(data) - start < n_bytes:
        raise ProtocolError(f"frame declares {nbits} bits but only {len(data) - start} bytes follow")
    chunk = data[start : start + n_bytes]
    bits = format(int.from_bytes(chunk, "big"), f"0{8 * n_bytes}b")[:nbits]
    return UplinkMessage(rnd, arm, bits), start + n_bytes


def unpack(data: bytes) -> UplinkMessage:
    msg, end = _unpack_at(data, 0)
    if end != len(data):
        raise ProtocolError(f"{len(data) - end} trailing bytes after frame")
    return msg


def iter_frames(data: bytes) -> Iterator[UplinkMessage]:
    offset = 0
    while offset < len(data):
        msg, offset = _unpack_at(data, offset)
        yield msg


def write_log(messages: Iterable[UplinkMessage], fh: BinaryIO) -> int:
    n = 0
    for m in messages:
        n += fh.write(pack(m))
    return n


def read_log(fh: BinaryIO) -> list:
    return list(iter_frames(fh.read()))


def account_bits(log: Iterable[UplinkMessage]) -> int:
    """Total payload bits; headers are framing, not information."""
    return sum(len(m.payload) for m in log)


def split_payload(round_: int, arm: int, codewords: Iterable[str]) -> list:
    """Pack whole codewords into as few frames as the length field allows."""
    frames, cur, size = [], [], 0
    for cw in codewords:
        if size + len(cw) > MAX_PAYLOAD_BITS and cur:
            frames.append(UplinkMessage(round_, arm, "".join(cur)))
            cur, size = [], 0
        cur.append(cw)
        size += len(cw)
    if cur:
        frames.append(UplinkMessage(round_, arm, "".join(cur)))
    return frames
