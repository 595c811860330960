import random

import pytest

from asmisim.pi_protocol import (
    FRAME_LEN,
    BadCrc,
    BadLength,
    InvalidHeader,
    MsgType,
    PiFrame,
    PiProtocolError,
    UnknownType,
    UnknownVersion,
    crc8,
    decode,
    encode,
)

from golden_frames import GOLDEN_FRAMES, body_oracle, crc8_oracle


def test_crc8_check_value():
    assert crc8(b"123456789") == 0xF4


def test_crc8_matches_bitwise_oracle_on_random_payloads():
    rng = random.Random(0xC8C8)
    for _ in range(300):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 32)))
        assert crc8(data) == crc8_oracle(data)


def test_golden_encode():
    for (msg_type, sensor_id, seq_no, level_index), wire_hex in GOLDEN_FRAMES:
        frame = PiFrame(MsgType(msg_type), sensor_id, seq_no, level_index)
        assert encode(frame).hex() == wire_hex


def test_golden_decode():
    for (msg_type, sensor_id, seq_no, level_index), wire_hex in GOLDEN_FRAMES:
        frame = decode(bytes.fromhex(wire_hex))
        assert frame.msg_type == MsgType(msg_type)
        assert frame.sensor_id == sensor_id
        assert frame.seq_no == seq_no
        assert frame.level_index == level_index


def test_every_single_bit_corruption_is_rejected():
    for _fields, wire_hex in GOLDEN_FRAMES:
        wire = bytes.fromhex(wire_hex)
        flips = 0
        for byte_index in range(FRAME_LEN):
            for bit in range(8):
                corrupted = bytearray(wire)
                corrupted[byte_index] ^= 1 << bit
                with pytest.raises(PiProtocolError):
                    decode(bytes(corrupted))
                flips += 1
        assert flips == 112


def test_roundtrip_random_frames():
    rng = random.Random(1414)
    for _ in range(200):
        frame = PiFrame(
            msg_type=MsgType(rng.choice([1, 2])),
            sensor_id=rng.randrange(2**32),
            seq_no=rng.randrange(2**32),
            level_index=rng.randrange(-(2**31), 2**31),
        )
        wire = encode(frame)
        assert len(wire) == FRAME_LEN
        assert decode(wire) == frame


def test_bad_length():
    with pytest.raises(BadLength):
        decode(b"")
    with pytest.raises(BadLength):
        decode(bytes(13))
    with pytest.raises(BadLength):
        decode(bytes(15))


def test_unknown_version_rejected():
    body = bytearray(body_oracle(1, 5, 6, 7))
    body[0] = (3 << 4) | 1  # version 3
    wire = bytes(body) + bytes([crc8_oracle(bytes(body))])
    with pytest.raises(UnknownVersion):
        decode(wire)


def test_unknown_type_rejected():
    body = bytearray(body_oracle(1, 5, 6, 7))
    body[0] = (1 << 4) | 3  # type 3
    wire = bytes(body) + bytes([crc8_oracle(bytes(body))])
    with pytest.raises(UnknownType):
        decode(wire)


def test_crc_checked_before_version_and_type():
    # Garbage header with a wrong CRC must surface as BadCrc, not as a
    # header complaint: integrity first, interpretation second.
    body = bytearray(body_oracle(1, 5, 6, 7))
    body[0] = 0xFF
    wire = bytes(body) + bytes([crc8_oracle(bytes(body)) ^ 0x55])
    with pytest.raises(BadCrc):
        decode(wire)


def test_encode_rejects_out_of_range_fields():
    good = PiFrame(MsgType.EVENT, 1, 1, 0)
    for bad in [
        PiFrame(MsgType.EVENT, -1, 1, 0),
        PiFrame(MsgType.EVENT, 2**32, 1, 0),
        PiFrame(MsgType.EVENT, 1, -1, 0),
        PiFrame(MsgType.EVENT, 1, 2**32, 0),
        PiFrame(MsgType.EVENT, 1, 1, 2**31),
        PiFrame(MsgType.EVENT, 1, 1, -(2**31) - 1),
    ]:
        with pytest.raises(InvalidHeader):
            encode(bad)
    assert decode(encode(good)) == good


def test_encode_rejects_bad_version_and_type():
    with pytest.raises(InvalidHeader):
        encode(PiFrame(MsgType.EVENT, 1, 1, 0, version=2))
    frame = PiFrame.__new__(PiFrame)
    object.__setattr__(frame, "msg_type", 9)
    object.__setattr__(frame, "sensor_id", 1)
    object.__setattr__(frame, "seq_no", 1)
    object.__setattr__(frame, "level_index", 0)
    object.__setattr__(frame, "version", 1)
    with pytest.raises(InvalidHeader):
        encode(frame)
