"""Dataclass configuration for the tracker, training and inference.

Defaults follow the full-scale setup (384x576 input, 256-wide model,
pool of 10 embeddings); ``toy()`` constructors shrink everything to
desk-scale dimensions used by the experiment scripts and tests. A single
YAML/JSON file with ``model`` / ``train`` / ``inference`` / ``synth``
sections configures the CLI; file values take precedence over flags.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml


@dataclass
class ModelConfig:
    image_height: int = 384
    image_width: int = 576
    channels: int = 256            # model width c, equals the embedding width
    pool_size: int = 10            # m, the hard upper bound on tracked objects
    backbone_widths: tuple[int, int, int, int] = (32, 64, 128, 256)
    heads: int = 8
    encoder_layers: int = 2
    decoder_layers: int = 1
    ffn_width: int = 1024
    reg_head_width: int = 256
    # Gaussian sigma in cells = sigma_scale * nominal_target_cells.
    # sigma_scale 0.25 is the raw configured value; 6 nominal cells gives
    # the 1.5-cell default that supervises a 24x36 map sensibly.
    gaussian_sigma_scale: float = 0.25
    gaussian_nominal_cells: float = 6.0

    @property
    def sigma_cells(self) -> float:
        return self.gaussian_sigma_scale * self.gaussian_nominal_cells

    @property
    def stride(self) -> int:
        return 16

    @property
    def high_stride(self) -> int:
        return 8

    def __post_init__(self):
        self.backbone_widths = tuple(self.backbone_widths)
        if self.image_height % 16 or self.image_width % 16:
            raise ValueError("image size must be divisible by 16")
        if self.channels % self.heads:
            raise ValueError("channels must be divisible by head count")

    @staticmethod
    def toy(channels: int = 64, image_height: int = 128, image_width: int = 192,
            pool_size: int = 10, **kw) -> "ModelConfig":
        kw.setdefault("backbone_widths", (16, 32, 64, 64))
        kw.setdefault("heads", 4)
        kw.setdefault("ffn_width", 4 * channels)
        kw.setdefault("reg_head_width", channels)
        return ModelConfig(image_height=image_height, image_width=image_width,
                           channels=channels, pool_size=pool_size, **kw)


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    weight_decay: float = 1e-4
    grad_clip_norm: float = 0.1
    epochs: int = 300
    steps_per_epoch: int = 100
    batch_size: int = 4
    lr_decay_factor: float = 0.2
    lr_decay_epoch_fracs: tuple[float, float] = (150 / 300, 250 / 300)
    lambda_cls: float = 100.0
    lambda_bbreg: float = 1.0
    focal_gamma: float = 2.0
    reg_mask_threshold: float = 0.05   # Gaussian value above which cells get box supervision
    seed: int = 0
    mixing_weights: tuple[float, ...] = ()   # per-corpus sampling weights, empty = uniform
    augment: "AugmentConfig" = field(default_factory=lambda: AugmentConfig())

    def __post_init__(self):
        if self.grad_clip_norm <= 0:
            raise ValueError("grad_clip_norm must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.lr_decay_epoch_fracs = tuple(self.lr_decay_epoch_fracs)
        self.mixing_weights = tuple(self.mixing_weights)
        if isinstance(self.augment, dict):
            self.augment = AugmentConfig(**self.augment)


@dataclass
class AugmentConfig:
    flip_prob: float = 0.5
    scale_range: tuple[float, float] = (0.85, 1.15)
    max_shift_frac: float = 0.1
    brightness_range: tuple[float, float] = (0.85, 1.15)
    contrast_range: tuple[float, float] = (0.85, 1.15)
    enabled: bool = True

    def __post_init__(self):
        self.scale_range = tuple(self.scale_range)
        self.brightness_range = tuple(self.brightness_range)
        self.contrast_range = tuple(self.contrast_range)

    @staticmethod
    def off() -> "AugmentConfig":
        return AugmentConfig(enabled=False)


@dataclass
class InferenceConfig:
    memory_threshold: float = 0.85   # all presence scores must exceed this to refresh memory
    report_threshold: float = 0.0    # presence needed to set the reported flag
    use_memory: bool = True
    zoom_enabled: bool = False       # single-object mode only
    zoom_min_size: float = 30.0


@dataclass
class SynthConfig:
    image_height: int = 128
    image_width: int = 192
    num_objects: int = 2
    num_frames: int = 30
    fps: float = 10.0
    seed: int = 0
    object_size_range: tuple[float, float] = (18.0, 40.0)
    motion: str = "linear"            # "linear" or "sinusoidal"
    speed_range: tuple[float, float] = (1.0, 4.0)
    sine_amplitude: float = 12.0
    sine_period: float = 24.0
    distractors: bool = False         # render all objects visually identical
    background_noise: float = 0.03
    visibility_threshold: float = 0.25
    # schedules: list of (object_index, start_frame, end_frame) inclusive-exclusive
    occluder_schedule: tuple[tuple[int, int, int], ...] = ()
    out_of_view_schedule: tuple[tuple[int, int, int], ...] = ()
    class_labels: tuple[str, ...] = ()

    def __post_init__(self):
        self.object_size_range = tuple(self.object_size_range)
        self.speed_range = tuple(self.speed_range)
        self.occluder_schedule = tuple(tuple(s) for s in self.occluder_schedule)
        self.out_of_view_schedule = tuple(tuple(s) for s in self.out_of_view_schedule)
        self.class_labels = tuple(self.class_labels)


@dataclass
class Config:
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    inference: InferenceConfig = field(default_factory=InferenceConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)


def _build(cls, data: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**data)


def load_config(path: str | Path) -> Config:
    """Load a YAML (or JSON) config file into a Config."""
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    cfg = Config()
    if "model" in raw:
        cfg.model = _build(ModelConfig, raw["model"])
    if "train" in raw:
        cfg.train = _build(TrainConfig, raw["train"])
    if "inference" in raw:
        cfg.inference = _build(InferenceConfig, raw["inference"])
    if "synth" in raw:
        cfg.synth = _build(SynthConfig, raw["synth"])
    return cfg


def dump_config(cfg: Config, path: str | Path) -> None:
    data = {
        "model": dataclasses.asdict(cfg.model),
        "train": dataclasses.asdict(cfg.train),
        "inference": dataclasses.asdict(cfg.inference),
        "synth": dataclasses.asdict(cfg.synth),
    }
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=True)
