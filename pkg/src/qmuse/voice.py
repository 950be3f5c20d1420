"""FOF (formant wave function) singing-voice synthesis.

Five formant generators share one grain clock driven by the vibrato-modulated
fundamental.  Every grain of formant ``k`` is

    a * env(tau) * sin(2 pi fq tau)
    env(tau) = 0.5 (1 - cos(pi tau / t_ex)) exp(-pi bw tau)   for tau < t_ex
             = exp(-pi bw tau)                                 otherwise

with ``t_ex = min(1 / (2 fq), 2 ms)``, truncated once ``exp(-pi bw tau)``
falls below 1e-4.  Formant frequency, bandwidth and level move linearly from
their start to end values over the note and are sampled at grain onset.
"""

from __future__ import annotations

import dataclasses
import wave
from dataclasses import dataclass
from os import PathLike

import numpy as np
from scipy.signal import find_peaks, welch

N_FORMANTS = 5
GRAIN_FLOOR = 1e-4
MAX_RISE = 0.002


def ramp(start: float, end: float, t, dur: float):
    """Linear interpolation from ``start`` at 0 to ``end`` at ``dur``."""
    if dur <= 0:
        raise ValueError("dur must be positive")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > dur):
        raise ValueError(f"t must lie in [0, {dur}]")
    out = start + (end - start) * (t_arr / dur)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class VoicePatch:
    # Formants 1-3 default to the first entry of each parameter family; 4-5
    # are fixed upper formants of a soprano /a/.
    fq1s: float = 310.0
    fq1e: float = 310.0
    fq2s: float = 600.0
    fq2e: float = 600.0
    fq3s: float = 2250.0
    fq3e: float = 2250.0
    fq4s: float = 3250.0
    fq4e: float = 3250.0
    fq5s: float = 3700.0
    fq5e: float = 3700.0
    amp1s: float = 0.0
    amp1e: float = 0.0
    amp2s: float = -15.0
    amp2e: float = -15.0
    amp3s: float = -9.0
    amp3e: float = -9.0
    amp4s: float = -24.0
    amp4e: float = -24.0
    amp5s: float = -40.0
    amp5e: float = -40.0
    bw1s: float = 35.0
    bw1e: float = 35.0
    bw2s: float = 65.0
    bw2e: float = 65.0
    bw3s: float = 128.0
    bw3e: float = 128.0
    bw4s: float = 130.0
    bw4e: float = 130.0
    bw5s: float = 140.0
    bw5e: float = 140.0
    fnds: float = 277.2
    fnde: float = 277.2
    dur: float = 3.25
    ldns: float = 0.8
    vibrato_rate: float = 5.5
    vibrato_depth: float = 0.01
    # (attack s, decay s, sustain level, release s); None -> (0.1, 0.1, 0.8, 0.2) x dur
    adsr: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if not self.dur > 0:
            raise ValueError("dur must be positive")
        if not 0 <= self.ldns <= 1:
            raise ValueError("ldns must lie in [0, 1]")
        for k in range(1, N_FORMANTS + 1):
            for edge in "se":
                if getattr(self, f"fq{k}{edge}") <= 0 or getattr(self, f"bw{k}{edge}") <= 0:
                    raise ValueError(f"formant {k} frequency and bandwidth must be positive")
                if getattr(self, f"amp{k}{edge}") > 0:
                    raise ValueError(f"amp{k}{edge} is an attenuation and must be <= 0 dB")
        if self.amp1s != 0 or self.amp1e != 0:
            raise ValueError("formant 1 is the 0 dB reference")
        if self.fnds <= 0 or self.fnde <= 0:
            raise ValueError("fundamental must be positive")
        if self.vibrato_rate < 0 or not 0 <= self.vibrato_depth < 1:
            raise ValueError("bad vibrato settings")
        if self.adsr is not None:
            a, d, s, r = self.adsr
            object.__setattr__(self, "adsr", (float(a), float(d), float(s), float(r)))
            if min(a, d, r) < 0 or not 0 <= s <= 1:
                raise ValueError("bad ADSR settings")
            if a + d + r > self.dur + 1e-12:
                raise ValueError("attack + decay + release exceeds the duration")

    def envelope_times(self) -> tuple[float, float, float, float]:
        if self.adsr is None:
            return (0.1 * self.dur, 0.1 * self.dur, 0.8, 0.2 * self.dur)
        return self.adsr

    def formant(self, k: int) -> dict[str, tuple[float, float]]:
        """``{"fq": (start, end), "amp": ..., "bw": ...}`` for formant ``k`` (1-based)."""
        return {
            name: (getattr(self, f"{name}{k}s"), getattr(self, f"{name}{k}e"))
            for name in ("fq", "amp", "bw")
        }

    def replace(self, **changes) -> "VoicePatch":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "VoicePatch":
        d = dict(d)
        if d.get("adsr") is not None:
            d["adsr"] = tuple(d["adsr"])
        return cls(**d)


@dataclass(frozen=True)
class RenderSettings:
    sample_rate: int = 44100
    bit_depth: int = 16
    channels: int = 1

    def __post_init__(self):
        if self.sample_rate < 8000:
            raise ValueError("sample_rate must be >= 8000")
        if self.bit_depth != 16 or self.channels != 1:
            raise ValueError("only 16-bit mono output is supported")


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def adsr_envelope(n: int, sr: int, attack: float, decay: float, sustain: float, release: float) -> np.ndarray:
    t = np.arange(n) / sr
    dur = n / sr
    env = np.full(n, sustain)
    if attack > 0:
        m = t < attack
        env[m] = t[m] / attack
    m = (t >= attack) & (t < attack + decay)
    if decay > 0:
        env[m] = 1.0 + (sustain - 1.0) * (t[m] - attack) / decay
    rel_start = dur - release
    if release > 0:
        m = t >= rel_start
        env[m] = sustain * np.clip((dur - t[m]) / release, 0.0, 1.0)
    return env


def grain_onsets(patch: VoicePatch, n: int, sr: int) -> np.ndarray:
    """Grain start times in seconds (sub-sample precision), first grain at t=0."""
    t = np.arange(n) / sr
    f0 = ramp(patch.fnds, patch.fnde, np.minimum(t, patch.dur), patch.dur)
    f0 = f0 * (1.0 + patch.vibrato_depth * np.sin(2 * np.pi * patch.vibrato_rate * t))
    # phase[i] is the number of fundamental cycles completed by sample i.
    phase = np.concatenate(([0.0], np.cumsum(f0[:-1]) / sr))
    cycles = np.floor(phase)
    crossings = np.flatnonzero(np.diff(cycles) > 0) + 1
    # Linear interpolation of the exact crossing inside each sample step.
    target = cycles[crossings]
    frac = (target - phase[crossings - 1]) / (phase[crossings] - phase[crossings - 1])
    onsets = (crossings - 1 + frac) / sr
    return np.concatenate(([0.0], onsets))


def _grain_params(patch: VoicePatch, k: int, onsets: np.ndarray):
    spec = patch.formant(k)
    onset_t = np.minimum(onsets, patch.dur)
    fq = ramp(*spec["fq"], onset_t, patch.dur)
    bw = ramp(*spec["bw"], onset_t, patch.dur)
    amp = 10.0 ** (ramp(*spec["amp"], onset_t, patch.dur) / 20.0)
    return fq, bw, amp


def _overlap_add_numpy(out, onsets, fq, bw, amp, sr):
    n = len(out)
    lengths = np.log(1.0 / GRAIN_FLOOR) / (np.pi * bw)
    for t0, f, b, a, life in zip(onsets, fq, bw, amp, lengths):
        i0 = int(np.ceil(t0 * sr))
        i1 = min(n, int(np.floor((t0 + life) * sr)) + 1)
        if i0 >= i1:
            continue
        tau = np.arange(i0, i1) / sr - t0
        env = np.exp(-np.pi * b * tau)
        t_ex = min(0.5 / f, MAX_RISE)
        rise = tau < t_ex
        env[rise] *= 0.5 * (1.0 - np.cos(np.pi * tau[rise] / t_ex))
        out[i0:i1] += a * env * np.sin(2 * np.pi * f * tau)


def _overlap_add_loops(out, onsets, fq, bw, amp, sr):
    # exp(-pi b tau) sin(2 pi f tau) = Im(exp(s tau)), s = -pi b + 2 pi i f,
    # advanced one sample at a time by a complex rotation.
    n = out.shape[0]
    floor_log = np.log(1.0 / GRAIN_FLOOR)
    for g in range(onsets.shape[0]):
        t0, f, b, a = onsets[g], fq[g], bw[g], amp[g]
        i0 = int(np.ceil(t0 * sr))
        i1 = min(n, int(np.floor((t0 + floor_log / (np.pi * b)) * sr)) + 1)
        t_ex = min(0.5 / f, MAX_RISE)
        s = complex(-np.pi * b, 2 * np.pi * f)
        step = np.exp(s / sr)
        z = a * np.exp(s * (i0 / sr - t0))
        for i in range(i0, i1):
            tau = i / sr - t0
            v = z.imag
            if tau < t_ex:
                v *= 0.5 * (1.0 - np.cos(np.pi * tau / t_ex))
            out[i] += v
            z *= step


try:
    from numba import njit

    _overlap_add = njit(cache=True)(_overlap_add_loops)
except ImportError:  # pragma: no cover
    _overlap_add = _overlap_add_numpy


def render_formant(
    patch: VoicePatch, k: int, onsets: np.ndarray, n: int, sr: int, fast: bool = True
) -> np.ndarray:
    out = np.zeros(n)
    fq, bw, amp = _grain_params(patch, k, onsets)
    kernel = _overlap_add if fast else _overlap_add_numpy
    kernel(out, np.ascontiguousarray(onsets, dtype=float), fq, bw, amp, float(sr))
    return out


def render_voice(
    patch: VoicePatch, settings: RenderSettings | None = None, fast: bool = True
) -> AudioBuffer:
    """``fast=False`` uses the vectorised numpy grain loop instead of the compiled one."""
    settings = settings or RenderSettings()
    sr = settings.sample_rate
    n = int(round(patch.dur * sr))
    if patch.ldns == 0:
        return AudioBuffer(np.zeros(n), sr)
    onsets = grain_onsets(patch, n, sr)
    mix = np.zeros(n)
    for k in range(1, N_FORMANTS + 1):
        mix += render_formant(patch, k, onsets, n, sr, fast)
    # Gain staging: normalise the formant sum so ldns is the peak level.
    peak = np.max(np.abs(mix))
    if peak > 0:
        mix /= peak
    env = adsr_envelope(n, sr, *patch.envelope_times())
    return AudioBuffer(patch.ldns * env * mix, sr)


def render_sequence(patches: list[VoicePatch], settings: RenderSettings | None = None) -> AudioBuffer:
    settings = settings or RenderSettings()
    parts = [render_voice(p, settings).samples for p in patches]
    return AudioBuffer(np.concatenate(parts), settings.sample_rate)


def magnitude_spectrum(
    buffer: AudioBuffer,
    at_time: float,
    window: float,
    segment: float | None = None,
    resolution: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Hann-windowed magnitude spectrum in dB (a full-scale sine reads 0 dB).

    With ``segment=None`` the whole window is one FFT (narrowband).  Passing a
    ``segment`` shorter than a pitch period averages wideband segments with
    75% overlap, which traces formant envelopes instead of individual
    harmonics.  Either way the FFT is zero-padded so bins sit at most
    ``resolution`` Hz apart.
    """
    sr = buffer.sample_rate
    i0 = int(round(at_time * sr))
    i1 = i0 + int(round(window * sr))
    if window <= 0 or i0 < 0 or i1 > len(buffer.samples) or i1 - i0 < 4:
        raise ValueError("analysis window falls outside the buffer")
    seg = buffer.samples[i0:i1]
    nperseg = len(seg) if segment is None else int(round(segment * sr))
    if not 4 <= nperseg <= len(seg):
        raise ValueError("segment must fit inside the analysis window")
    n_fft = max(nperseg, int(2 ** np.ceil(np.log2(sr / resolution))))
    freqs, power = welch(
        seg, sr, window="hann", nperseg=nperseg, noverlap=(3 * nperseg) // 4,
        nfft=n_fft, detrend=False, scaling="spectrum",
    )
    return freqs, 10 * np.log10(np.maximum(2 * power, 1e-24))


def spectral_peaks(
    buffer: AudioBuffer,
    at_time: float,
    window: float,
    segment: float | None = None,
    resolution: float = 1.0,
) -> list[tuple[float, float]]:
    """Local maxima of the windowed spectrum as ``(Hz, dB)``, loudest first."""
    freqs, db = magnitude_spectrum(buffer, at_time, window, segment, resolution)
    idx, _ = find_peaks(db)
    order = idx[np.argsort(db[idx])[::-1]]
    return [(float(freqs[i]), float(db[i])) for i in order]


def write_wav(buffer: AudioBuffer, path: str | PathLike) -> None:
    """16-bit signed PCM, mono, little-endian; samples scaled by 32767."""
    if len(buffer.samples) == 0:
        raise ValueError("cannot write an empty buffer")
    pcm = np.rint(np.clip(buffer.samples, -1.0, 1.0) * 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(buffer.sample_rate))
        w.writeframes(pcm.tobytes())
