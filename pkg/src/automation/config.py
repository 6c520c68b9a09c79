"""
Configuration Manager - YAML pipeline configs
Stores PipelineConfig trees as versioned YAML files in ``configs/``.
The same file drives every CLI command; ``OVERHEAR_SEED`` overrides the seed.
"""

import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from src.core.features import MfccConfig
from src.core.localization import ClusterThresholds
from src.core.preprocess import FilterSpec
from src.core.segmentation import PeakPickParams
from src.errors import ConfigError, IoError, OverhearError

load_dotenv()

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1
DEFAULT_CONFIG_DIR = "configs"
SEED_ENV = "OVERHEAR_SEED"


def _filtered(cls, data: Optional[Dict]) -> Dict:
    """Keep only fields that exist in the dataclass."""
    valid_fields = {f.name for f in cls.__dataclass_fields__.values()}
    return {k: v for k, v in (data or {}).items() if k in valid_fields}


@dataclass
class FilterConfig:
    """Pasma filtrów: audio bandpass + lowpass akcelerometru."""
    audio_low_hz: float = 1200.0
    audio_high_hz: float = 3800.0
    accel_cutoff_hz: float = 100.0
    order: int = 4

    def audio_spec(self) -> FilterSpec:
        return FilterSpec.bandpass(self.audio_low_hz, self.audio_high_hz, self.order)

    def accel_spec(self) -> FilterSpec:
        return FilterSpec.lowpass(self.accel_cutoff_hz, self.order)


@dataclass
class SegmentationConfig:
    window_ms: float = 1.0
    local_window_ms: float = 50.0
    offset_multiplier: float = 3.0
    min_gap_ms: float = 100.0
    min_peak_ratio: float = 0.01
    backtrack_ratio: float = 0.5
    pre_ms: float = 5.0
    post_ms: float = 80.0
    match_tolerance_ms: float = 10.0  # detected start <-> label pairing

    def peak_params(self) -> PeakPickParams:
        return PeakPickParams(self.local_window_ms, self.offset_multiplier, self.min_gap_ms,
                              self.min_peak_ratio, self.backtrack_ratio)


@dataclass
class MfccSection:
    n_coeffs: int = 14
    n_mel_filters: int = 26
    frame_ms: float = 10.0
    hop_ms: float = 5.0
    fft_size: Optional[int] = None
    log_floor: float = 1e-10

    def build(self) -> MfccConfig:
        return MfccConfig(**asdict(self))


@dataclass
class KeyboardConfig:
    """Rozpoznawanie typu klawiatury (okna 30 s, regresja logistyczna)."""
    n_coeffs: int = 6
    window_s: float = 30.0
    learning_rate: float = 0.1
    l2: float = 1e-3
    max_iter: int = 5000
    tol: float = 1e-6

    def mfcc(self, base: MfccSection) -> MfccConfig:
        return MfccConfig(**{**asdict(base), "n_coeffs": self.n_coeffs})


@dataclass
class ClusterConfig:
    epsilon: float = 1e-12
    gamma: float = 0.05
    lam: float = 0.5
    tdoa_max_lag_ms: float = 1.0

    def thresholds(self) -> ClusterThresholds:
        return ClusterThresholds(self.epsilon, self.gamma, self.lam)


@dataclass
class ModelConfig:
    classifier: str = "forest"  # forest | tree
    n_trees: int = 100
    max_depth: Optional[int] = None
    min_leaf: int = 1
    max_features: Optional[str] = "sqrt"
    bootstrap: bool = True
    grid: Optional[Dict[str, List[Any]]] = None  # None -> fixed params, no grid search
    n_folds: int = 3

    def params(self) -> Dict[str, Any]:
        return {"n_trees": self.n_trees, "max_depth": self.max_depth, "min_leaf": self.min_leaf,
                "max_features": self.max_features, "bootstrap": self.bootstrap}


@dataclass
class WordConfig:
    max_edit: int = 2
    beam_width: int = 500
    top_w: int = 100
    top_k_letters: int = 5
    word_pause_ms: float = 500.0
    distance_first: bool = False
    dictionary: Optional[str] = None  # None -> built-in word list


SECTIONS = {
    "filters": FilterConfig,
    "segmentation": SegmentationConfig,
    "mfcc": MfccSection,
    "keyboard": KeyboardConfig,
    "clustering": ClusterConfig,
    "models": ModelConfig,
    "words": WordConfig,
}


@dataclass
class PipelineConfig:
    """Pełna konfiguracja pipeline'u - jeden plik YAML dla wszystkich komend."""
    version: int = CONFIG_VERSION
    seed: int = 0
    filters: FilterConfig = field(default_factory=FilterConfig)
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    mfcc: MfccSection = field(default_factory=MfccSection)
    keyboard: KeyboardConfig = field(default_factory=KeyboardConfig)
    clustering: ClusterConfig = field(default_factory=ClusterConfig)
    models: ModelConfig = field(default_factory=ModelConfig)
    words: WordConfig = field(default_factory=WordConfig)

    def to_dict(self) -> Dict:
        """Konwertuje konfigurację do słownika."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> 'PipelineConfig':
        """
        Tworzy konfigurację ze słownika (nieznane klucze są ignorowane).

        Raises:
            ConfigError: schema version mismatch or a section that is not a mapping
        """
        data = _filtered(cls, data)
        version = data.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError(f"config version {version} not supported (expected {CONFIG_VERSION})")
        kwargs: Dict[str, Any] = {"version": version, "seed": int(data.get("seed", 0))}
        for name, section_cls in SECTIONS.items():
            section = data.get(name)
            if section is not None and not isinstance(section, dict):
                raise ConfigError(f"config section '{name}' must be a mapping")
            kwargs[name] = section_cls(**_filtered(section_cls, section))
        return cls(**kwargs)


class ConfigManager:
    """
    Configuration Manager - plain YAML files.

    Configs live in ``config_dir`` as ``<name>.yaml``; ``load_config`` also
    accepts a direct file path.
    """

    def __init__(self, config_dir: str = DEFAULT_CONFIG_DIR):
        self.config_dir = config_dir

    def _path(self, name: str) -> str:
        if name.endswith((".yaml", ".yml")) or os.sep in name:
            return name
        return os.path.join(self.config_dir, f"{name}.yaml")

    def save_config(self, config: PipelineConfig, name: str) -> str:
        """
        Zapisuje konfigurację do pliku YAML.

        Returns:
            Ścieżka zapisanego pliku
        """
        path = self._path(name)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(config.to_dict(), f, sort_keys=False)
        logger.info("💾 Saved config %s", path)
        return path

    def load_config(self, name: str) -> Optional[PipelineConfig]:
        """
        Ładuje konfigurację z pliku.

        Returns:
            Obiekt konfiguracji lub None jeśli plik nie istnieje

        Raises:
            ConfigError: invalid YAML, not a mapping or failed validation
        """
        path = self._path(name)
        if not os.path.isfile(path):
            return None
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as exc:
                raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must contain a mapping")
        if "pipeline" in data and isinstance(data["pipeline"], dict):
            data = data["pipeline"]
        config = PipelineConfig.from_dict(data)
        errors = self.validate_config(config)
        if errors:
            raise ConfigError(f"Invalid configuration {path}: {', '.join(errors)}")
        return config

    def list_configs(self) -> List[str]:
        """Nazwy wszystkich konfiguracji w katalogu."""
        if not os.path.isdir(self.config_dir):
            return []
        return sorted(os.path.splitext(f)[0] for f in os.listdir(self.config_dir)
                      if f.endswith((".yaml", ".yml")))

    def load_or_default(self, path: Optional[str] = None) -> PipelineConfig:
        """
        Config from ``path`` (or defaults), then the ``OVERHEAR_SEED`` override.

        Raises:
            IoError: an explicit path that does not exist
            ConfigError: invalid file or invalid seed override
        """
        if path:
            config = self.load_config(path)
            if config is None:
                raise IoError(f"config not found: {path}")
        else:
            config = PipelineConfig()
        seed_env = os.getenv(SEED_ENV)
        if seed_env:
            try:
                config.seed = int(seed_env)
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer, got {seed_env!r}") from None
            logger.debug("seed overridden from %s: %d", SEED_ENV, config.seed)
        return config

    # ========================================================================
    # VALIDATION HELPERS
    # ========================================================================

    def validate_config(self, config: PipelineConfig) -> List[str]:
        """
        Waliduje konfigurację.

        Returns:
            Lista błędów (pusta jeśli OK)
        """
        errors = []

        builders = [
            ("filters", lambda: (config.filters.audio_spec(), config.filters.accel_spec())),
            ("segmentation", config.segmentation.peak_params),
            ("mfcc", config.mfcc.build),
            ("keyboard", lambda: config.keyboard.mfcc(config.mfcc)),
            ("clustering", config.clustering.thresholds),
        ]
        for name, build in builders:
            try:
                build()
            except (OverhearError, TypeError, ValueError) as exc:
                errors.append(f"{name}: {exc}")

        f = config.filters
        if not 0 < f.audio_low_hz < f.audio_high_hz:
            errors.append("filters: need 0 < audio_low_hz < audio_high_hz")
        if config.segmentation.pre_ms < 0 or config.segmentation.post_ms <= 0:
            errors.append("segmentation: pre_ms must be >= 0 and post_ms > 0")
        if config.segmentation.window_ms <= 0 or config.segmentation.match_tolerance_ms <= 0:
            errors.append("segmentation: window_ms and match_tolerance_ms must be positive")

        m = config.models
        if m.classifier not in ("forest", "tree"):
            errors.append(f"models: classifier must be 'forest' or 'tree', got {m.classifier!r}")
        if m.n_trees < 1 or m.min_leaf < 1:
            errors.append("models: n_trees and min_leaf must be >= 1")
        if m.n_folds < 2:
            errors.append("models: n_folds must be >= 2")
        if m.grid is not None and not isinstance(m.grid, dict):
            errors.append("models: grid must be a mapping of parameter lists")

        w = config.words
        if not 0 <= w.max_edit <= 3:
            errors.append("words: max_edit must be within 0..3")
        if w.beam_width < 1 or w.top_w < 1 or w.top_k_letters < 1:
            errors.append("words: beam_width, top_w and top_k_letters must be >= 1")
        if w.word_pause_ms <= 0:
            errors.append("words: word_pause_ms must be positive")

        if config.keyboard.window_s <= 0:
            errors.append("keyboard: window_s must be positive")
        if config.clustering.tdoa_max_lag_ms < 0:
            errors.append("clustering: tdoa_max_lag_ms must be >= 0")

        return errors


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def create_config(name: Optional[str] = None, config_dir: str = DEFAULT_CONFIG_DIR,
                  **overrides) -> PipelineConfig:
    """
    Tworzy (i opcjonalnie zapisuje) konfigurację z nadpisaniami sekcji.

    Overrides are section dicts, e.g. ``clustering={"gamma": 0.1}``, or ``seed``.

    Raises:
        ConfigError: invalid configuration
    """
    data = PipelineConfig().to_dict()
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key].update(value)
        else:
            data[key] = value
    config = PipelineConfig.from_dict(data)

    manager = ConfigManager(config_dir)
    errors = manager.validate_config(config)
    if errors:
        raise ConfigError(f"Invalid configuration: {', '.join(errors)}")

    if name:
        manager.save_config(config, name)
    return config
