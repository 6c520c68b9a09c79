"""
Synthetic Key Signatures
Per-key acoustic signatures (a bank of damped sinusoids for the hit and a
weaker, delayed bank for the release), keyboard-class envelopes, ambient
noise presets and the generator configuration.
"""

import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml

from src.core.localization import GROUP_KEYS, GROUP_ORDER, HandGroup
from src.errors import ConfigError, IoError

PASSBAND = (1200.0, 3800.0)
KEY_BAND = (1500.0, 3500.0)
CLICK_BAND = (8000.0, 18000.0)
RELEASE_DELAY_RANGE = (0.040, 0.070)
RELEASE_RATIO = 0.3
HAND_OF_GROUP = {HandGroup.G1: "left", HandGroup.G2: "right", HandGroup.G3: "center"}
HANDS = ("left", "right", "center")
LAYOUTS = ("default", "ablation", "rate_study")
# group-specific shift of the primary frequency grid, as a fraction of the grid step
GROUP_GRID_OFFSET = {HandGroup.G1: 0.0, HandGroup.G2: 1.0 / 3.0, HandGroup.G3: 2.0 / 3.0}

# ablation: key j of every hand group sits on pitch slot j
ABLATION_BASE_HZ = 2000.0
ABLATION_SLOT_STEP = 0.015
ABLATION_PITCH_JITTER = 0.012
ABLATION_RELEASE_DELAY_S = 0.055
# rate study: families of up to six keys share a tone, members differ by click frequency
RATE_STUDY_FAMILY_SIZE = 6
RATE_STUDY_CLICKS = tuple(float(f) for f in np.linspace(CLICK_BAND[0], CLICK_BAND[1], RATE_STUDY_FAMILY_SIZE))


@dataclass(frozen=True)
class Resonance:
    freq_hz: float
    decay_s: float
    amplitude: float


@dataclass(frozen=True)
class KeySignature:
    key: str
    hit: Tuple[Resonance, ...]
    release: Tuple[Resonance, ...]
    release_delay_s: float
    hand: str
    click_hz: Optional[float] = None

    def __post_init__(self):
        if self.hand not in HANDS:
            raise ConfigError(f"hand must be one of {HANDS}, got {self.hand!r}")
        for res in self.hit + self.release:
            if not PASSBAND[0] <= res.freq_hz <= PASSBAND[1]:
                raise ConfigError(f"{self.key}: resonance {res.freq_hz} Hz outside {PASSBAND}")
            if res.decay_s <= 0 or res.amplitude < 0:
                raise ConfigError(f"{self.key}: bad resonance {res}")
        if sum(r.amplitude for r in self.release) >= sum(r.amplitude for r in self.hit):
            raise ConfigError(f"{self.key}: release must be quieter than the hit")
        if self.release_delay_s <= 0:
            raise ConfigError(f"{self.key}: release delay must be positive")


@dataclass(frozen=True)
class KeyboardEnvelope:
    """Class-level sound of a keyboard: decay of the main resonance, loudness, frequency shift."""
    decay_s: float
    gain: float
    freq_shift_hz: float = 0.0


DEFAULT_ENVELOPES: Dict[str, KeyboardEnvelope] = {
    "K1": KeyboardEnvelope(decay_s=0.012, gain=1.0, freq_shift_hz=0.0),
    "K2": KeyboardEnvelope(decay_s=0.006, gain=0.7, freq_shift_hz=35.0),
    "K3": KeyboardEnvelope(decay_s=0.0035, gain=0.45, freq_shift_hz=-35.0),
}


# ============================================================================
# SIGNATURE LAYOUTS
# ============================================================================

def _reflect_into(freq: float, low: float, high: float) -> float:
    span = high - low
    offset = (freq - low) % (2 * span)
    return low + (offset if offset <= span else 2 * span - offset)


def _group_signatures(group: HandGroup, envelope: KeyboardEnvelope, keyboard: str) -> Dict[str, KeySignature]:
    keys = GROUP_KEYS[group]
    n = len(keys)
    step = (KEY_BAND[1] - KEY_BAND[0]) / n
    signatures = {}
    for j, key in enumerate(keys):
        rng = np.random.default_rng([ord(key), ord(keyboard[-1])])
        primary = KEY_BAND[0] + (j + 0.25 + 0.5 * GROUP_GRID_OFFSET[group]) * step + envelope.freq_shift_hz
        primary = _reflect_into(primary, *KEY_BAND)
        second = _reflect_into(primary * rng.uniform(1.18, 1.42), *KEY_BAND)
        third = _reflect_into(primary * rng.uniform(0.62, 0.84), *KEY_BAND)
        decays = (envelope.decay_s, 0.85 * envelope.decay_s, 0.7 * envelope.decay_s)
        amps = (1.0, 0.6, 0.4)
        hit = tuple(Resonance(f, d, a) for f, d, a in zip((primary, second, third), decays, amps))
        release = tuple(replace(r, amplitude=r.amplitude * RELEASE_RATIO) for r in hit)
        delay = RELEASE_DELAY_RANGE[0] + (RELEASE_DELAY_RANGE[1] - RELEASE_DELAY_RANGE[0]) * j / max(n - 1, 1)
        click = CLICK_BAND[0] + (j + 0.5 + 0.5 * GROUP_GRID_OFFSET[group]) * (CLICK_BAND[1] - CLICK_BAND[0]) / n
        signatures[key] = KeySignature(key, hit, release, delay, HAND_OF_GROUP[group], click)
    return signatures


def _slot_signature(slot: int, envelope: KeyboardEnvelope, key: str, hand: str) -> KeySignature:
    primary = ABLATION_BASE_HZ * (1.0 + ABLATION_SLOT_STEP) ** slot + envelope.freq_shift_hz
    decays = (envelope.decay_s, 0.85 * envelope.decay_s, 0.7 * envelope.decay_s)
    hit = tuple(Resonance(f, d, a) for f, d, a in
                zip((primary, 1.3 * primary, 0.7 * primary), decays, (1.0, 0.6, 0.4)))
    release = tuple(replace(r, amplitude=r.amplitude * RELEASE_RATIO) for r in hit)
    return KeySignature(key, hit, release, ABLATION_RELEASE_DELAY_S, hand)


def layout_families(layout: str) -> List[List[str]]:
    """
    Groups of keys that share one tonal signature.

    ``ablation``: the j-th key of every hand group sits on pitch slot j, so
    keys of different hands sound alike and neighbouring slots differ by a
    1.5% pitch step; only the hand tells slot-mates apart.
    ``rate_study``: each hand group splits into families of up to six keys
    with one tone; family members differ only by the frequency of a faint
    high-frequency switch click.
    """
    if layout == "default":
        return []
    if layout == "ablation":
        n_slots = max(len(GROUP_KEYS[g]) for g in GROUP_ORDER)
        return [[GROUP_KEYS[g][j] for g in GROUP_ORDER if j < len(GROUP_KEYS[g])] for j in range(n_slots)]
    if layout == "rate_study":
        return [list(GROUP_KEYS[g][i:i + RATE_STUDY_FAMILY_SIZE])
                for g in GROUP_ORDER for i in range(0, len(GROUP_KEYS[g]), RATE_STUDY_FAMILY_SIZE)]
    raise ConfigError(f"unknown signature layout {layout!r}; expected one of {LAYOUTS}")


def default_signatures(keyboard: str = "K1", layout: str = "default",
                       envelopes: Optional[Dict[str, KeyboardEnvelope]] = None) -> Dict[str, KeySignature]:
    envelopes = envelopes or DEFAULT_ENVELOPES
    if keyboard not in envelopes:
        raise ConfigError(f"no envelope for keyboard class {keyboard!r}")
    signatures: Dict[str, KeySignature] = {}
    for group in GROUP_ORDER:
        signatures.update(_group_signatures(group, envelopes[keyboard], keyboard))
    families = layout_families(layout)
    if layout == "ablation":
        for slot, family in enumerate(families):
            for key in family:
                signatures[key] = _slot_signature(slot, envelopes[keyboard], key, signatures[key].hand)
    elif layout == "rate_study":
        for family in families:
            leader = signatures[family[0]]
            for member, key in enumerate(family):
                signatures[key] = replace(leader, key=key, hand=signatures[key].hand,
                                          click_hz=RATE_STUDY_CLICKS[member])
    return signatures


# ============================================================================
# GENERATOR CONFIGURATION
# ============================================================================

@dataclass(frozen=True)
class AccelModel:
    """z-axis bursts at each key press; the other side gets ``coupling`` times the amplitude."""
    burst_g: float = 0.05
    decay_s: float = 0.015
    freq_hz: float = 40.0
    coupling: float = 0.5  # amplitude ratio; energy ratio is coupling ** 2
    center_ratio: float = 0.75
    noise_g: float = 0.002
    gravity_g: float = 1.0


@dataclass(frozen=True)
class HeadMotion:
    gain_depth: float = 0.1
    median_freq_hz: float = 0.5
    tdoa_jitter_samples: int = 3
    accel_g: float = 0.003


@dataclass(frozen=True)
class AmbientNoise:
    snr_db: Optional[float] = None  # None -> no broadband noise
    babble_level: float = 0.0
    distractor_rate_hz: float = 0.0
    distractor_level: float = 0.0


NOISE_PRESETS: Dict[str, AmbientNoise] = {
    "none": AmbientNoise(),
    "closed_office": AmbientNoise(snr_db=30.0),
    "open_office": AmbientNoise(snr_db=15.0, distractor_rate_hz=0.4, distractor_level=0.35),
    "cafeteria": AmbientNoise(snr_db=4.5, babble_level=0.5, distractor_rate_hz=0.9, distractor_level=0.6),
}


def noise_preset(name: str) -> AmbientNoise:
    try:
        return NOISE_PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown noise preset {name!r}; expected one of {sorted(NOISE_PRESETS)}") from None


@dataclass(frozen=True)
class ParticipantJitter:
    """Per-participant anatomy: per-key gain spread, global pitch scale, release timing."""
    gain: float = 0.1
    freq: float = 0.002
    release_ms: float = 2.0


@dataclass(frozen=True)
class PressJitter:
    """Press-to-press variation: log-normal force, pitch scale (strike position), release timing."""
    gain: float = 0.08
    freq: float = 0.002
    release_ms: float = 3.0

    def __post_init__(self):
        if self.gain < 0 or self.freq < 0 or self.release_ms < 0:
            raise ConfigError("press jitter magnitudes must be non-negative")


@dataclass(frozen=True)
class SynthConfig:
    keyboard_class: str = "K1"
    layout: str = "default"
    envelopes: Dict[str, KeyboardEnvelope] = field(default_factory=lambda: dict(DEFAULT_ENVELOPES))
    key_signatures: Optional[Dict[str, KeySignature]] = None
    stereo_gains: Dict[str, Tuple[float, float]] = field(default_factory=lambda: {
        "left": (1.0, 0.7), "right": (0.7, 1.0), "center": (0.85, 0.85)})
    tdoa_samples: Dict[str, int] = field(default_factory=lambda: {"left": 9, "right": -9, "center": 0})
    accel: AccelModel = AccelModel()
    head_motion: HeadMotion = HeadMotion()
    press_jitter: PressJitter = PressJitter()
    noise: AmbientNoise = AmbientNoise()
    gap_ms: Tuple[float, float] = (150.0, 300.0)
    word_gap_ms: Tuple[float, float] = (800.0, 1100.0)
    lead_s: float = 0.3
    tail_s: float = 0.4
    audio_rate: int = 96000
    accel_rate: float = 500.0
    amplitude: float = 0.25
    click_level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.keyboard_class not in self.envelopes:
            raise ConfigError(f"no envelope for keyboard class {self.keyboard_class!r}")
        if self.layout not in LAYOUTS:
            raise ConfigError(f"unknown layout {self.layout!r}")
        lo, hi = self.gap_ms
        if not 0 < lo <= hi:
            raise ConfigError("gap_ms must be (min, max) with 0 < min <= max")
        if self.click_level < 0 or self.amplitude <= 0:
            raise ConfigError("amplitude must be positive and click_level non-negative")
        if self.key_signatures is None:
            object.__setattr__(self, "key_signatures",
                               default_signatures(self.keyboard_class, self.layout, self.envelopes))

    def signature(self, key: str) -> KeySignature:
        try:
            return self.key_signatures[key]
        except KeyError:
            raise ConfigError(f"no key signature for character {key!r}") from None

    @property
    def envelope(self) -> KeyboardEnvelope:
        return self.envelopes[self.keyboard_class]

    def to_dict(self) -> Dict:
        data = asdict(self)
        data.pop("key_signatures")
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "SynthConfig":
        """Build from YAML-style dicts; unknown keys are ignored, signatures come from the layout."""
        data = dict(data or {})
        valid = {f.name: f for f in fields(cls)}
        kwargs = {}
        nested = {"accel": AccelModel, "head_motion": HeadMotion, "press_jitter": PressJitter,
                  "noise": AmbientNoise}
        for name, value in data.items():
            if name not in valid or name == "key_signatures":
                continue
            if name in nested and isinstance(value, dict):
                value = _build(nested[name], value)
            elif name == "noise" and isinstance(value, str):
                value = noise_preset(value)
            elif name == "envelopes":
                value = {k: v if is_dataclass(v) else _build(KeyboardEnvelope, v) for k, v in value.items()}
            elif name in ("stereo_gains",):
                value = {k: tuple(v) for k, v in value.items()}
            elif name in ("gap_ms", "word_gap_ms"):
                value = tuple(value)
            kwargs[name] = value
        return cls(**kwargs)


def _build(cls, data: Dict):
    valid = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in data.items() if k in valid})


# ============================================================================
# STUDY PRESETS
# ============================================================================

def ablation_config(base: Optional[SynthConfig] = None) -> SynthConfig:
    """
    Pitch-slot layout with no hand cue in the audio.

    Every hand gets the centre stereo gains and zero inter-channel delay, and
    the press pitch jitter spans most of a slot step, so the audio alone
    confuses slot-mates across hands and their neighbours; the accelerometer
    still tells the hands apart.
    """
    base = base or SynthConfig()
    center = base.stereo_gains["center"]
    return replace(base, layout="ablation", key_signatures=None,
                   stereo_gains={hand: center for hand in HANDS},
                   tdoa_samples={hand: 0 for hand in HANDS},
                   press_jitter=replace(base.press_jitter, freq=ABLATION_PITCH_JITTER))


def rate_study_config(base: Optional[SynthConfig] = None, click_level: float = 0.04) -> SynthConfig:
    """Families of keys share one tone and are told apart only by a faint high-frequency click."""
    base = base or SynthConfig()
    return replace(base, layout="rate_study", key_signatures=None, click_level=click_level)


def load_synth_config(path: str) -> SynthConfig:
    """
    Raises:
        IoError: file missing
        ConfigError: not a YAML mapping or invalid values
    """
    if not os.path.isfile(path):
        raise IoError(f"synth config not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping")
    return SynthConfig.from_dict(data.get("synth", data))
