"""Bit-exact codec for the 14-byte Pi protocol frame.

Wire layout (big-endian, 14 bytes total):

    byte 0      (version << 4) | msg_type      version is fixed at 1;
                                               msg_type 1=EVENT, 2=STATUS
    bytes 1-4   sensor_id    unsigned 32-bit
    bytes 5-8   seq_no       unsigned 32-bit, counts every frame the sensor
                             has ever transmitted (events and status alike)
    bytes 9-12  level_index  signed 32-bit two's-complement, net count of
                             upward minus downward delta crossings since
                             activation
    byte 13     CRC-8 over bytes 0-12, polynomial 0x07, init 0x00,
                no reflection, no final XOR

EVENT and STATUS share the one layout so sensors stay trivially simple;
STATUS repeats the current level_index, which lets the sink re-anchor a
quiet sensor after losses. This layout is the stable wire contract: golden
hex vectors in the test suite pin it bit-for-bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

FRAME_LEN = 14
PI_VERSION = 1

_BODY = struct.Struct(">BIIi")


class MsgType(IntEnum):
    EVENT = 1
    STATUS = 2


class PiProtocolError(Exception):
    """Base class for all codec failures."""


class InvalidHeader(PiProtocolError):
    """Encode refused: version or msg_type out of range."""


class BadLength(PiProtocolError):
    """Decode refused: input is not exactly 14 bytes."""


class BadCrc(PiProtocolError):
    """Decode refused: checksum mismatch."""


class UnknownVersion(PiProtocolError):
    """Decode refused: version nibble is not 1."""


class UnknownType(PiProtocolError):
    """Decode refused: msg_type nibble is neither EVENT nor STATUS."""


def _build_crc_table(poly: int = 0x07) -> tuple[int, ...]:
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = ((crc << 1) ^ poly) & 0xFF if crc & 0x80 else (crc << 1) & 0xFF
        table.append(crc)
    return tuple(table)


_CRC_TABLE = _build_crc_table()


def crc8(data: bytes) -> int:
    """CRC-8, polynomial 0x07, init 0x00, no reflection, no final XOR."""
    crc = 0
    for byte in data:
        crc = _CRC_TABLE[crc ^ byte]
    return crc


@dataclass(frozen=True)
class PiFrame:
    """One sensor transmission. The checksum lives only on the wire."""

    msg_type: MsgType
    sensor_id: int
    seq_no: int
    level_index: int
    version: int = PI_VERSION


def encode(frame: PiFrame) -> bytes:
    """Serialize a frame to its 14-byte wire form."""
    if frame.version != PI_VERSION:
        raise InvalidHeader(f"version must be {PI_VERSION}, got {frame.version}")
    if frame.msg_type not in (MsgType.EVENT, MsgType.STATUS):
        raise InvalidHeader(f"unknown msg_type {frame.msg_type!r}")
    if not 0 <= frame.sensor_id < 2**32:
        raise InvalidHeader(f"sensor_id {frame.sensor_id} outside unsigned 32-bit range")
    if not 0 <= frame.seq_no < 2**32:
        raise InvalidHeader(f"seq_no {frame.seq_no} outside unsigned 32-bit range")
    if not -(2**31) <= frame.level_index < 2**31:
        raise InvalidHeader(f"level_index {frame.level_index} outside signed 32-bit range")
    body = _BODY.pack(
        (frame.version << 4) | int(frame.msg_type),
        frame.sensor_id,
        frame.seq_no,
        frame.level_index,
    )
    return body + bytes((crc8(body),))


def decode(data: bytes) -> PiFrame:
    """Parse a 14-byte wire frame; inverse of encode on the valid domain.

    Failures are distinguishable: BadLength, BadCrc, UnknownVersion,
    UnknownType.
    """
    if len(data) != FRAME_LEN:
        raise BadLength(f"expected {FRAME_LEN} bytes, got {len(data)}")
    if crc8(data[:13]) != data[13]:
        raise BadCrc(f"crc mismatch: computed {crc8(data[:13]):#04x}, frame carries {data[13]:#04x}")
    header, sensor_id, seq_no, level_index = _BODY.unpack(data[:13])
    version = header >> 4
    msg_type = header & 0x0F
    if version != PI_VERSION:
        raise UnknownVersion(f"version {version}")
    if msg_type not in (MsgType.EVENT, MsgType.STATUS):
        raise UnknownType(f"msg_type {msg_type}")
    return PiFrame(
        msg_type=MsgType(msg_type),
        sensor_id=sensor_id,
        seq_no=seq_no,
        level_index=level_index,
    )
