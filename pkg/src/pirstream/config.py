"""Experiment configuration: flat key = value files with [section] groups.

Parsed with configparser, validated eagerly with precise messages so the
CLI can fail with exit code 2 before any work starts.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field as dfield

from .errors import ConfigError
from .fields import Field, parse_field_spec
from .grs import GrsCode
from .protocol import (
    BLOCK,
    BYZANTINE,
    PLAIN,
    block_scheme,
    byzantine_scheme,
    plain_scheme,
)

_VARIANTS = {
    "plain": PLAIN,
    "plain_conv": PLAIN,
    "block-erasure": BLOCK,
    "block_erasure": BLOCK,
    "byzantine": BYZANTINE,
    "byzantine_um": BYZANTINE,
}


@dataclass
class ExperimentConfig:
    """Everything a command needs, already cross-validated."""

    scheme_cfg: dict = dfield(default_factory=dict)
    channel: dict = dfield(default_factory=dict)
    run: dict = dfield(default_factory=dict)
    search: dict = dfield(default_factory=dict)
    rates: dict = dfield(default_factory=dict)
    audit: dict = dfield(default_factory=dict)


def _int(section, key, raw, minimum=None):
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"[{section}] {key} = {v} must be >= {minimum}")
    return v


def _int_list(section, key, raw):
    out = []
    for part in raw.replace(",", " ").split():
        out.append(_int(section, key, part))
    return out


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    cfg = ExperimentConfig()
    for section in parser.sections():
        target = {
            "scheme": cfg.scheme_cfg,
            "channel": cfg.channel,
            "run": cfg.run,
            "search": cfg.search,
            "rates": cfg.rates,
            "audit": cfg.audit,
        }.get(section)
        if target is None:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, value in parser.items(section):
            target[key] = value.strip()
    return cfg


def build_field(scheme_cfg: dict) -> Field:
    spec = scheme_cfg.get("field") or scheme_cfg.get("q")
    if not spec:
        raise ConfigError("[scheme] field (e.g. 2^4 or 2^4:13) is required")
    try:
        return parse_field_spec(spec)
    except Exception as exc:
        raise ConfigError(f"[scheme] field = {spec!r}: {exc}") from exc


def build_scheme(cfg: ExperimentConfig):
    """(field, storage code, scheme, ell) from the [scheme] section."""
    sc = cfg.scheme_cfg
    variant_raw = sc.get("variant", "plain")
    variant = _VARIANTS.get(variant_raw)
    if variant is None:
        raise ConfigError(f"[scheme] variant = {variant_raw!r}; expected one of "
                          f"{sorted(set(_VARIANTS))}")
    field = build_field(sc)
    for key in ("n", "k", "t", "m", "ell"):
        if key not in sc:
            raise ConfigError(f"[scheme] {key} is required")
    n = _int("scheme", "n", sc["n"], 1)
    k = _int("scheme", "k", sc["k"], 1)
    t = _int("scheme", "t", sc["t"], 1)
    m = _int("scheme", "m", sc["m"], 1)
    ell = _int("scheme", "ell", sc["ell"], 1)
    desired = _int("scheme", "desired", sc.get("desired", "0"), 0)
    if "locators" in sc and sc["locators"]:
        locators = tuple(_int_list("scheme", "locators", sc["locators"]))
    else:
        if n > field.q - 1:
            raise ConfigError(f"[scheme] n = {n} needs a field with q > n")
        locators = tuple(range(1, n + 1))
    try:
        code = GrsCode(field, n, k, locators)
    except Exception as exc:
        raise ConfigError(f"[scheme] invalid storage code: {exc}") from exc
    try:
        if variant == PLAIN:
            memory = _int("scheme", "memory", sc.get("memory", "0"), 0)
            support = _support(sc, n, default_size=min(n - (k + t - 1), n))
            scheme = plain_scheme(code, t, memory, m, desired, support)
        elif variant == BLOCK:
            eps = _int("scheme", "epsilon", sc.get("epsilon", "1"), 1)
            window = _int("scheme", "window", sc.get("window", sc.get("n_window", "0")), 2)
            support = _support(sc, n, default_size=None)
            scheme = block_scheme(code, t, eps, window, m, desired, support)
        else:
            scheme = byzantine_scheme(code, t, m, desired)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"[scheme] {exc}") from exc
    return field, code, scheme, ell


def _support(sc: dict, n: int, default_size):
    if "support" in sc and sc["support"]:
        support = _int_list("scheme", "support", sc["support"])
        if any(not 0 <= j < n for j in support):
            raise ConfigError(f"[scheme] support indices must be in [0, {n - 1}]")
        return tuple(support)
    if default_size is None:
        raise ConfigError("[scheme] support is required for this variant")
    return tuple(range(n - default_size, n))
