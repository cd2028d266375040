import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icq.errors import ParameterError, ProtocolError, ScheduleError
from icq.protocol import (
    MAX_PAYLOAD_BITS,
    Schedule,
    UplinkMessage,
    account_bits,
    iter_frames,
    pack,
    read_log,
    schedule_b,
    schedule_t,
    split_payload,
    unpack,
    write_log,
)


def test_schedule_alpha2():
    assert [schedule_t(2, i) for i in range(5)] == [0, 2, 4, 8, 16]
    assert [schedule_b(2, i) for i in range(1, 5)] == [2, 2, 4, 8]


def test_schedule_alpha3():
    assert [schedule_b(3, i) for i in range(1, 4)] == [3, 6, 18]
    s = Schedule(3)
    assert sum(s.b(i) for i in range(1, 8)) == s.t(7)


def test_schedule_overflow():
    assert schedule_t(2, 63) == 2**63
    # 2^64 no longer fits an unsigned 64-bit counter
    with pytest.raises(ScheduleError):
        schedule_t(2, 64)
    with pytest.raises(ParameterError):
        schedule_t(1, 3)
    with pytest.raises(ParameterError):
        schedule_b(2, 0)


def test_pack_example():
    frame = pack(UplinkMessage(3, 1, "01"))
    assert frame == bytes([0, 0, 0, 3, 0, 1, 0, 2, 0x40])
    assert unpack(frame) == UplinkMessage(3, 1, "01")


def test_truncated_frame():
    frame = bytes([0, 0, 0, 3, 0, 1, 0, 9, 0x40])
    with pytest.raises(ProtocolError):
        unpack(frame)
    with pytest.raises(ProtocolError):
        unpack(bytes([0, 0, 0]))


def test_pack_rejects_bad_payloads():
    for payload in ("", "012", "1" * (MAX_PAYLOAD_BITS + 1)):
        with pytest.raises(ProtocolError):
            pack(UplinkMessage(1, 0, payload))
    with pytest.raises(ProtocolError):
        pack(UplinkMessage(1, 70000, "1"))
    with pytest.raises(ProtocolError):
        unpack(pack(UplinkMessage(1, 0, "1")) + b"\x00")


messages = st.builds(
    UplinkMessage,
    st.integers(0, 2**32 - 1),
    st.integers(0, 2**16 - 1),
    st.text("01", min_size=1, max_size=300),
)


@settings(max_examples=300, deadline=None)
@given(messages)
def test_roundtrip(m):
    assert unpack(pack(m)) == m


@settings(max_examples=50, deadline=None)
@given(st.lists(messages, max_size=20))
def test_log_roundtrip(ms):
    buf = io.BytesIO()
    write_log(ms, buf)
    buf.seek(0)
    assert read_log(buf) == ms
    assert account_bits(ms) == sum(len(m.payload) for m in ms)
    assert list(iter_frames(b"".join(pack(m) for m in ms))) == ms


def test_split_payload_respects_length_field():
    words = ["1" * 1000] * 200
    frames = split_payload(4, 2, words)
    assert all(len(f.payload) <= MAX_PAYLOAD_BITS for f in frames)
    assert "".join(f.payload for f in frames) == "".join(words)
    assert len(frames) == 4
