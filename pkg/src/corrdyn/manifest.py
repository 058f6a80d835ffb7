"""Run manifests: config parsing, canonical hashing, provenance records.

A run directory is keyed by the hash of (command, canonical config), and the
manifest stores everything needed to reproduce the outputs bit-exactly in
serial mode: the correspondence record, the full numeric policy, seeds,
budgets and the hashes of every file written.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

from . import __version__ as _version
from .correspondence import Correspondence, content_hash, from_record
from .policy import DEFAULT_POLICY, NumericPolicy


class ConfigError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: line {e.lineno}, column {e.colno}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "config" in cfg and "command" in cfg:
        cfg = cfg["config"]            # accept a manifest as a config (re-run)
    if "correspondence" not in cfg:
        raise ConfigError("missing field: correspondence")
    return cfg


def parse_correspondence(cfg: dict) -> Correspondence:
    rec = cfg["correspondence"]
    try:
        return from_record(rec)
    except KeyError as e:
        raise ConfigError(f"correspondence record missing field {e}")
    except Exception as e:
        raise ConfigError(f"invalid correspondence: {e}")


def parse_policy(cfg: dict) -> NumericPolicy:
    overrides = cfg.get("policy", {})
    if not isinstance(overrides, dict):
        raise ConfigError("policy must be an object of field overrides")
    known = set(DEFAULT_POLICY.to_dict())
    bad = set(overrides) - known
    if bad:
        raise ConfigError(f"unknown policy fields: {sorted(bad)}")
    return DEFAULT_POLICY.replace(**overrides)


def run_id(command: str, cfg: dict) -> str:
    return sha256_text(command + "\n" + canonical_json(cfg))[:12]


@dataclass
class RunManifest:
    command: str
    config: dict
    correspondence_hash: str
    policy: dict
    seed: int
    serial: bool
    outputs: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    tool = "corrdyn"
    version = _version

    def record_output(self, path):
        self.outputs[os.path.basename(str(path))] = sha256_file(path)

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "correspondence_hash": self.correspondence_hash,
            "policy": self.policy,
            "seed": self.seed,
            "serial": self.serial,
            "threads": os.environ.get("CORRDYN_THREADS", ""),
            "outputs": self.outputs,
            "flags": self.flags,
            "wall_clock_s": self.wall_clock_s,
        }

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def start_manifest(command: str, cfg: dict, f: Correspondence,
                   policy: NumericPolicy, seed: int, serial: bool) -> RunManifest:
    return RunManifest(command=command, config=cfg, correspondence_hash=content_hash(f),
                       policy=policy.to_dict(), seed=seed, serial=serial)


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False
