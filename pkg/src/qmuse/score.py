"""Note events and Standard MIDI File (format 0) output."""

from __future__ import annotations

import os
import re
import struct
from dataclasses import dataclass, field

REST = None

NOTE_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
_NAME_TO_PC = {n: i for i, n in enumerate(NOTE_NAMES)}
_NAME_TO_PC.update({"Db": 1, "Eb": 3, "Gb": 6, "Ab": 8, "Bb": 10})
_LABEL_RE = re.compile(r"([A-G][#b]?)(-?\d+)")


def note_to_midi(label: str) -> int:
    """``"C4"`` -> 60, ``"G#4"`` -> 68."""
    m = _LABEL_RE.fullmatch(label.strip())
    if m is None or m.group(1) not in _NAME_TO_PC:
        raise ValueError(f"bad note label {label!r}")
    number = 12 * (int(m.group(2)) + 1) + _NAME_TO_PC[m.group(1)]
    if not 0 <= number <= 127:
        raise ValueError(f"note {label!r} outside MIDI range")
    return number


def midi_to_note(number: int) -> str:
    return f"{NOTE_NAMES[number % 12]}{number // 12 - 1}"


@dataclass(frozen=True)
class NoteEvent:
    pitch: int | None
    duration: float
    velocity: int = 96

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if not 1 <= self.velocity <= 127:
            raise ValueError("velocity must be in 1..127")

    @property
    def is_rest(self) -> bool:
        return self.pitch is REST

    def __str__(self):
        what = "rest" if self.is_rest else midi_to_note(self.pitch)
        return f"{what}:{self.duration:g}"


@dataclass
class Sequence:
    events: list[NoteEvent] = field(default_factory=list)
    tempo_bpm: float = 120.0

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def encode_vlq(value: int) -> bytes:
    """MIDI variable-length quantity, 7 bits per byte, MSB-first."""
    if not 0 <= value <= 0x0FFFFFFF:
        raise ValueError(f"VLQ value out of range: {value}")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def decode_vlq(data: bytes, pos: int = 0) -> tuple[int, int]:
    """Returns ``(value, next_pos)``."""
    value = 0
    while True:
        b = data[pos]
        pos += 1
        value = (value << 7) | (b & 0x7F)
        if not b & 0x80:
            return value, pos


def to_midi_bytes(seq: Sequence, ticks_per_quarter: int = 480) -> bytes:
    if not seq.events:
        raise ValueError("cannot encode an empty sequence")
    for ev in seq.events:
        if not ev.is_rest and not 0 <= ev.pitch <= 127:
            raise ValueError(f"pitch {ev.pitch} outside 0..127")

    usec_per_quarter = round(60_000_000 / seq.tempo_bpm)
    track = bytearray()
    track += encode_vlq(0) + b"\xff\x51\x03" + usec_per_quarter.to_bytes(3, "big")
    track += encode_vlq(0) + bytes([0xC0, 0])  # program 0, channel 0

    # Rounding is applied to absolute positions so event drift stays bounded.
    pos = 0.0
    last_tick = 0
    for ev in seq.events:
        start = round(pos * ticks_per_quarter)
        pos += ev.duration
        end = round(pos * ticks_per_quarter)
        if ev.is_rest:
            continue
        track += encode_vlq(start - last_tick) + bytes([0x90, ev.pitch, ev.velocity])
        track += encode_vlq(end - start) + bytes([0x80, ev.pitch, 0])
        last_tick = end
    pending = round(pos * ticks_per_quarter) - last_tick
    track += encode_vlq(pending) + b"\xff\x2f\x00"

    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, ticks_per_quarter)
    return header + b"MTrk" + struct.pack(">I", len(track)) + bytes(track)


def write_midi(seq: Sequence, path: str | os.PathLike, ticks_per_quarter: int = 480) -> None:
    data = to_midi_bytes(seq, ticks_per_quarter)
    with open(path, "wb") as fh:
        fh.write(data)
