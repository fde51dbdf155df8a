"""Variant configurations, presets, and the flat ``key = value`` file format.

A variant file holds one setting per line::

    # comments start with '#'
    name = stable
    border = zero_response
    detector.max_features = 2000
    orientation.method = sliding_window
    descriptor.method = overlapping

Keys not present keep their defaults.  ``border`` applies to detection and
description alike.
"""

from __future__ import annotations

import dataclasses
import enum
import os
from dataclasses import dataclass, field

from .descriptor import DescriptorMethod, DescriptorStrategy, OrientationMethod, OrientationStrategy
from .detector import DetectorConfig, PointInterpolation
from .errors import InvalidInputError
from .integral import BorderPolicy, DerivativeKernel, KernelFamily

_SECTIONS = {
    "detector": DetectorConfig,
    "orientation": OrientationStrategy,
    "descriptor": DescriptorStrategy,
    "kernel": DerivativeKernel,
}


@dataclass(frozen=True)
class VariantConfig:
    name: str = "custom"
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    orientation: OrientationStrategy = field(default_factory=OrientationStrategy)
    descriptor: DescriptorStrategy = field(default_factory=DescriptorStrategy)
    border: BorderPolicy = BorderPolicy.ZERO_RESPONSE
    kernel: DerivativeKernel = field(default_factory=DerivativeKernel)

    def __post_init__(self):
        object.__setattr__(self, "border", BorderPolicy(self.border))
        if not self.name or any(c.isspace() for c in self.name) or "," in self.name:
            raise InvalidInputError(f"variant name must be non-empty without spaces or commas: {self.name!r}")
        if self.detector.border is not self.border:
            object.__setattr__(self, "detector", dataclasses.replace(self.detector, border=self.border))


def fast_preset() -> VariantConfig:
    """Speed first: average-gradient orientation, nearest-neighbour sampling."""
    return VariantConfig(
        name="fast",
        detector=DetectorConfig(max_features=2000, interpolation=PointInterpolation.INDEPENDENT_1D),
        orientation=OrientationStrategy(OrientationMethod.AVERAGE_GRADIENT),
        descriptor=DescriptorStrategy(DescriptorMethod.NEAREST),
        kernel=DerivativeKernel(KernelFamily.SYMMETRIC),
    )


def stable_preset() -> VariantConfig:
    """Stability first: sliding-window orientation, overlapping subregions."""
    return VariantConfig(
        name="stable",
        detector=DetectorConfig(max_features=2000, interpolation=PointInterpolation.INDEPENDENT_1D),
        orientation=OrientationStrategy(OrientationMethod.SLIDING_WINDOW),
        descriptor=DescriptorStrategy(DescriptorMethod.OVERLAPPING),
        kernel=DerivativeKernel(KernelFamily.SYMMETRIC),
    )


PRESETS = {"fast": fast_preset, "stable": stable_preset}


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize(cfg: VariantConfig) -> str:
    lines = [f"name = {cfg.name}", f"border = {cfg.border.value}"]
    for section in _SECTIONS:
        sub = getattr(cfg, section)
        for f in dataclasses.fields(sub):
            if section == "detector" and f.name == "border":
                continue
            lines.append(f"{section}.{f.name} = {_format(getattr(sub, f.name))}")
    return "\n".join(lines) + "\n"


def _coerce(raw: str, default, key: str):
    text = raw.strip()
    try:
        if isinstance(default, enum.Enum):
            return type(default)(text.lower())
        if isinstance(default, bool):
            if text.lower() not in ("true", "false"):
                raise ValueError(text)
            return text.lower() == "true"
        if isinstance(default, int) or default is None:
            if text.lower() == "none":
                return None
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise InvalidInputError(f"bad value for {key}: {raw!r}") from None
    return text


def parse(text: str, source: str = "<config>") -> VariantConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise InvalidInputError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = (raw, lineno)
    name = values.pop("name", ("custom", 0))[0]
    border = BorderPolicy.ZERO_RESPONSE
    if "border" in values:
        border = _coerce(values.pop("border")[0], BorderPolicy.ZERO_RESPONSE, "border")
    parts = {}
    for section, cls in _SECTIONS.items():
        defaults = cls()
        kwargs = {}
        for f in dataclasses.fields(cls):
            key = f"{section}.{f.name}"
            if key in values:
                raw, lineno = values.pop(key)
                kwargs[f.name] = _coerce(raw, getattr(defaults, f.name), f"{source}:{lineno}: {key}")
        try:
            parts[section] = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"{source}: invalid {section} settings: {exc}") from exc
    if values:
        raise InvalidInputError(f"{source}: unknown keys: {', '.join(sorted(values))}")
    return VariantConfig(name=name, border=border, **parts)


def load_config(ref: str) -> VariantConfig:
    """A preset name or a path to a config file."""
    if ref in PRESETS and not os.path.exists(ref):
        return PRESETS[ref]()
    try:
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {ref}: {exc.strerror}") from exc
    return parse(text, source=ref)
