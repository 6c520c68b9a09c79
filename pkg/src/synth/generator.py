"""
Synthetic Session Generator
Renders typed text into a time-aligned stereo audio + dual accelerometer
session with exact press-time labels.

Every keystroke is the key's damped-sinusoid signature, varied press to
press in force, pitch and release timing, and placed on both channels with
the hand's stereo gains and inter-channel delay. The accelerometers get a
z-axis burst, stronger on the side of the typing hand. Head motion modulates
the stereo balance and adds jitter to the delay; ambient noise is added last
at a target SNR.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import signal as sps

from src.core.localization import ALPHABET
from src.core.signal_io import DualAccel, KeyLabel, SensorSession, SessionMeta, StereoAudio
from src.errors import ConfigError, DataError
from src.synth.signatures import KeySignature, ParticipantJitter, Resonance, SynthConfig

logger = logging.getLogger(__name__)

ATTACK_S = 0.0005
CLICK_DECAY_S = 0.0004
CLICK_ATTACK_S = 0.00005
TAIL_DECAYS = 8
BABBLE_BAND = (300.0, 3400.0)
DISTRACTOR_BAND = (1300.0, 3700.0)


# ============================================================================
# KEYSTROKE RENDERING
# ============================================================================

def _attack(t: np.ndarray, attack_s: float) -> np.ndarray:
    ramp = 0.5 * (1.0 - np.cos(np.pi * np.clip(t / attack_s, 0.0, 1.0)))
    return np.where(t >= attack_s, 1.0, ramp)


def _damped_bank(resonances: Sequence[Resonance], t: np.ndarray, freq_scale: float) -> np.ndarray:
    out = np.zeros_like(t)
    for res in resonances:
        out += res.amplitude * np.exp(-t / res.decay_s) * np.sin(2 * np.pi * res.freq_hz * freq_scale * t)
    return out


def render_keystroke(signature: KeySignature, sample_rate: int, freq_scale: float = 1.0,
                     release_shift_s: float = 0.0, click_level: float = 0.0) -> np.ndarray:
    """
    Mono waveform of one press + release, starting at the press onset.

    ``click_level`` adds a short switch click at ``signature.click_hz`` with
    that fraction of the hit energy; it is dropped when the click lies above
    Nyquist.
    """
    longest = max(r.decay_s for r in signature.hit + signature.release)
    delay = max(signature.release_delay_s + release_shift_s, 0.005)
    n = int(np.ceil((delay + TAIL_DECAYS * longest) * sample_rate)) + 1
    t = np.arange(n) / sample_rate

    wave = _damped_bank(signature.hit, t, freq_scale) * _attack(t, ATTACK_S)
    hit_energy = float(np.sum(wave ** 2))
    first = int(np.ceil(delay * sample_rate))
    rel_t = t[first:] - delay
    wave[first:] += _damped_bank(signature.release, rel_t, freq_scale) * _attack(rel_t, ATTACK_S)

    if click_level > 0 and signature.click_hz and signature.click_hz < 0.5 * sample_rate:
        tone = np.exp(-t / CLICK_DECAY_S) * np.sin(2 * np.pi * signature.click_hz * t) * _attack(t, CLICK_ATTACK_S)
        tone_energy = float(np.sum(tone ** 2))
        if tone_energy > 0:
            wave += tone * np.sqrt(click_level * hit_energy / tone_energy)
    return wave


# ============================================================================
# PARTICIPANTS AND TIMING
# ============================================================================

@dataclass(frozen=True)
class ParticipantProfile:
    """Per-key gain factors, a global pitch scale and per-key release shifts."""
    gains: Dict[str, float] = field(default_factory=dict)
    freq_scale: float = 1.0
    release_shift_s: Dict[str, float] = field(default_factory=dict)

    def gain(self, key: str) -> float:
        return self.gains.get(key, 1.0)

    def release_shift(self, key: str) -> float:
        return self.release_shift_s.get(key, 0.0)


def participant_profile(jitter: ParticipantJitter, rng: np.random.Generator) -> ParticipantProfile:
    if jitter.gain == 0 and jitter.freq == 0 and jitter.release_ms == 0:
        return ParticipantProfile()
    gains = {k: float(max(0.5, 1.0 + jitter.gain * rng.standard_normal())) for k in ALPHABET}
    freq_scale = float(1.0 + jitter.freq * rng.standard_normal())
    shifts = {k: float(rng.uniform(-jitter.release_ms, jitter.release_ms)) / 1000.0 for k in ALPHABET}
    return ParticipantProfile(gains, freq_scale, shifts)


def plan_presses(text: str, config: SynthConfig, rng: np.random.Generator) -> List[Tuple[str, float]]:
    """
    Press times for the letters of ``text``; spaces become longer word gaps.

    Raises:
        ConfigError: a character other than a-z or space
        DataError: no letters at all
    """
    presses: List[Tuple[str, float]] = []
    t = config.lead_s
    pending_word_gap = False
    for ch in text.lower():
        if ch == " ":
            pending_word_gap = bool(presses)
            continue
        if ch not in ALPHABET:
            raise ConfigError(f"no key signature for character {ch!r}")
        if presses:
            lo, hi = config.word_gap_ms if pending_word_gap else config.gap_ms
            t += rng.uniform(lo, hi) / 1000.0
        presses.append((ch, t))
        pending_word_gap = False
    if not presses:
        raise DataError("text contains no letters to type")
    return presses


def _add_at(target: np.ndarray, wave: np.ndarray, start: int) -> None:
    if start >= target.size:
        return
    end = min(target.size, start + wave.size)
    target[start:end] += wave[:end - start]


# ============================================================================
# STREAMS
# ============================================================================

def _render_audio(presses, config: SynthConfig, profile: ParticipantProfile, n: int,
                  head_phase: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    rate = config.audio_rate
    left, right = np.zeros(n), np.zeros(n)
    head = config.head_motion
    jitter = int(head.tdoa_jitter_samples)
    press = config.press_jitter
    for key, t0 in presses:
        sig = config.signature(key)
        force = float(np.exp(press.gain * rng.standard_normal()))
        pitch = profile.freq_scale * (1.0 + press.freq * rng.standard_normal())
        release = profile.release_shift(key) + rng.uniform(-press.release_ms, press.release_ms) / 1000.0
        wave = render_keystroke(sig, rate, pitch, release, config.click_level)
        wave *= config.amplitude * config.envelope.gain * profile.gain(key) * force
        gain_left, gain_right = config.stereo_gains[sig.hand]
        sway = head.gain_depth * np.sin(2 * np.pi * head.median_freq_hz * t0 + head_phase)
        lag = int(config.tdoa_samples[sig.hand]) + (int(rng.integers(-jitter, jitter + 1)) if jitter else 0)
        start = int(round(t0 * rate))
        # positive lag: sound reaches the left microphone first
        _add_at(left, wave * gain_left * (1 + sway), start + max(-lag, 0))
        _add_at(right, wave * gain_right * (1 - sway), start + max(lag, 0))
    return left, right


def _add_ambient(left: np.ndarray, right: np.ndarray, config: SynthConfig, rng: np.random.Generator) -> None:
    noise = config.noise
    rate = config.audio_rate
    n = left.size
    clean_power = float(np.mean(left ** 2 + right ** 2) / 2)
    if noise.snr_db is not None and clean_power > 0:
        std = np.sqrt(clean_power / 10 ** (noise.snr_db / 10))
        left += rng.normal(0.0, std, n)
        right += rng.normal(0.0, std, n)
    if noise.babble_level > 0 and clean_power > 0:
        sos = sps.butter(4, [BABBLE_BAND[0], min(BABBLE_BAND[1], 0.45 * rate)], btype="bandpass",
                         output="sos", fs=rate)
        babble = sps.sosfilt(sos, rng.standard_normal(n))
        babble /= max(float(np.std(babble)), 1e-12)
        t = np.arange(n) / rate
        babble *= (1 + 0.5 * np.sin(2 * np.pi * 3.0 * t)) * noise.babble_level * np.sqrt(clean_power)
        left += babble
        right += 0.9 * babble
    if noise.distractor_rate_hz > 0 and noise.distractor_level > 0:
        count = int(rng.poisson(noise.distractor_rate_hz * n / rate))
        for _ in range(count):
            start = int(rng.integers(0, n))
            freq = rng.uniform(*DISTRACTOR_BAND)
            t = np.arange(int(0.04 * rate)) / rate
            wave = np.exp(-t / 0.005) * np.sin(2 * np.pi * freq * t) * _attack(t, ATTACK_S)
            wave *= noise.distractor_level * config.amplitude
            _add_at(left, wave * rng.uniform(0.6, 1.0), start)
            _add_at(right, wave * rng.uniform(0.6, 1.0), start)


def _render_accel(presses, config: SynthConfig, m: int, head_phase: float,
                  rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    model = config.accel
    head = config.head_motion
    rate = config.accel_rate
    t = np.arange(m) / rate
    sides = []
    for offset in (0.0, np.pi / 7):
        side = rng.normal(0.0, model.noise_g, (m, 3))
        side[:, 2] += model.gravity_g
        for axis in range(3):
            side[:, axis] += head.accel_g * np.sin(2 * np.pi * head.median_freq_hz * t + head_phase + offset + axis)
        sides.append(side)

    length = int(TAIL_DECAYS * model.decay_s * rate) + 1
    for key, t0 in presses:
        hand = config.signature(key).hand
        if hand == "left":
            amps = (model.burst_g, model.burst_g * model.coupling)
        elif hand == "right":
            amps = (model.burst_g * model.coupling, model.burst_g)
        else:
            amps = (model.burst_g * model.center_ratio,) * 2
        k0 = int(np.ceil(t0 * rate))
        if k0 >= m:
            continue
        tt = t[k0:k0 + length] - t0
        burst = np.exp(-tt / model.decay_s) * np.sin(2 * np.pi * model.freq_hz * tt)
        for side, amp in zip(sides, amps):
            side[k0:k0 + tt.size, 2] += amp * burst
            side[k0:k0 + tt.size, 0] += 0.2 * amp * burst
    return sides[0], sides[1]


def synth_session(text: str, config: Optional[SynthConfig] = None,
                  profile: Optional[ParticipantProfile] = None,
                  participant: str = "synthetic") -> SensorSession:
    """
    Render ``text`` (letters and spaces) into a labelled sensor session.

    Same config (seed included) and profile give an identical session.
    """
    config = config or SynthConfig()
    profile = profile or ParticipantProfile()
    rng = np.random.default_rng(config.seed)
    presses = plan_presses(text, config, rng)
    duration = presses[-1][1] + config.tail_s
    n = int(round(duration * config.audio_rate))
    m = int(round(duration * config.accel_rate))
    head_phase = float(rng.uniform(0, 2 * np.pi))

    left, right = _render_audio(presses, config, profile, n, head_phase, rng)
    _add_ambient(left, right, config, rng)
    peak = max(float(np.max(np.abs(left))), float(np.max(np.abs(right))))
    if peak > 1.0:
        logger.warning("synthetic audio peaks at %.2f, clipping to [-1, 1]", peak)
        np.clip(left, -1.0, 1.0, out=left)
        np.clip(right, -1.0, 1.0, out=right)
    accel_left, accel_right = _render_accel(presses, config, m, head_phase, rng)

    return SensorSession(
        audio=StereoAudio(left, right, config.audio_rate),
        accel=DualAccel(accel_left, accel_right, config.accel_rate),
        labels=tuple(KeyLabel(key, t0) for key, t0 in presses),
        meta=SessionMeta(participant=participant, keyboard=config.keyboard_class),
    )


# ============================================================================
# CORPORA
# ============================================================================

@dataclass(frozen=True)
class SyntheticSession:
    session: SensorSession
    kind: str  # "keys" or "words"
    text: str

    @property
    def participant(self) -> str:
        return self.session.meta.participant


def key_drill_text(reps: int) -> str:
    """Every key ``reps`` times in a row, a through z."""
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    return "".join(key * reps for key in ALPHABET)


def synth_corpus(n_participants: int, config: Optional[SynthConfig] = None, reps: int = 5,
                 words: Optional[Sequence[str]] = None,
                 jitter: ParticipantJitter = ParticipantJitter(),
                 participant_seeds: Optional[Sequence[int]] = None) -> List[SyntheticSession]:
    """
    One key-drill session per participant, plus a word session when ``words`` is given.

    Participant ``p`` gets its anatomy from ``config.seed + p`` and its
    sessions from ``participant_seeds[p]`` (default ``config.seed + 1000 * (p + 1)``).
    With zero jitter and equal participant seeds all participants are identical.
    """
    config = config or SynthConfig()
    if n_participants < 2:
        raise ConfigError(f"leave-one-participant-out needs >= 2 participants, got {n_participants}")
    if participant_seeds is not None and len(participant_seeds) != n_participants:
        raise ConfigError(f"{len(participant_seeds)} participant seeds for {n_participants} participants")

    corpus: List[SyntheticSession] = []
    drill = key_drill_text(reps)
    for p in range(n_participants):
        name = f"P{p + 1:02d}"
        profile = participant_profile(jitter, np.random.default_rng(config.seed + p))
        base = participant_seeds[p] if participant_seeds is not None else config.seed + 1000 * (p + 1)
        keys_session = synth_session(drill, replace(config, seed=int(base)), profile, name)
        corpus.append(SyntheticSession(keys_session, "keys", drill))
        if words:
            text = " ".join(words)
            words_session = synth_session(text, replace(config, seed=int(base) + 1), profile, name)
            corpus.append(SyntheticSession(words_session, "words", text))
        logger.debug("synthesized participant %s", name)
    return corpus


def synth_keyboard_session(config: SynthConfig, duration_s: float, participant: str = "synthetic") -> SensorSession:
    """Random letters typed for about ``duration_s`` seconds on ``config.keyboard_class``."""
    rng = np.random.default_rng([config.seed, 17])
    mean_gap = np.mean(config.gap_ms) / 1000.0
    n_keys = max(1, int((duration_s - config.lead_s - config.tail_s) / mean_gap))
    letters = rng.choice(list(ALPHABET), size=n_keys)
    return synth_session("".join(letters), config, participant=participant)
