"""Synthetic keystroke sessions with exact ground truth."""

from src.synth.generator import (
    ParticipantProfile,
    SyntheticSession,
    key_drill_text,
    participant_profile,
    render_keystroke,
    synth_corpus,
    synth_keyboard_session,
    synth_session,
)
from src.synth.signatures import (
    AccelModel,
    AmbientNoise,
    HeadMotion,
    KeySignature,
    KeyboardEnvelope,
    ParticipantJitter,
    PressJitter,
    Resonance,
    SynthConfig,
    ablation_config,
    default_signatures,
    load_synth_config,
    noise_preset,
    rate_study_config,
)

__all__ = [
    # Signatures & config
    'Resonance',
    'KeySignature',
    'KeyboardEnvelope',
    'AccelModel',
    'HeadMotion',
    'AmbientNoise',
    'ParticipantJitter',
    'PressJitter',
    'SynthConfig',
    'default_signatures',
    'noise_preset',
    'ablation_config',
    'rate_study_config',
    'load_synth_config',

    # Generation
    'ParticipantProfile',
    'SyntheticSession',
    'participant_profile',
    'render_keystroke',
    'key_drill_text',
    'synth_session',
    'synth_corpus',
    'synth_keyboard_session',
]
