"""JSON experiment configuration: parsing, validation and re-serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError
from .experiment import Experiment, SourceSpec, TargetState

UNITARY_TOL = 1e-10


def _schema() -> dict:
    return json.loads(resources.files("ngbsim").joinpath("config_schema.json").read_text())


def _complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def _pair(z: complex) -> list:
    return [float(z.real) + 0.0, float(z.imag) + 0.0]  # no -0.0 in reports


def preset_unitary(name: str, size: int) -> np.ndarray:
    if name == "identity":
        return np.eye(size, dtype=complex)
    if name == "dft":
        k = np.arange(size)
        return np.exp(-2j * np.pi * np.outer(k, k) / size) / np.sqrt(size)
    if name == "bs50":
        if size < 2:
            raise ConfigError("bs50 needs at least two modes")
        u = np.eye(size, dtype=complex)
        u[:2, :2] = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
        return u
    raise ConfigError(f"unknown interferometer preset {name!r}")


def parse_target(entry) -> TargetState:
    if isinstance(entry, str):
        entry = {"preset": entry}
    if "coeffs" in entry:
        try:
            return TargetState(tuple(_complex(c) for c in entry["coeffs"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    preset = entry["preset"]
    if preset == "single_photon":
        return TargetState.fock(1)
    if preset == "vacuum":
        return TargetState.fock(0)
    if preset == "fock_n":
        if "n" not in entry:
            raise ConfigError("fock_n preset needs 'n'")
        return TargetState.fock(int(entry["n"]))
    if preset == "cat_even":
        return TargetState.cat_even(_complex(entry.get("alpha", 1.0)), int(entry.get("n_max", 2)))
    raise ConfigError(f"unknown target preset {preset!r}")


@dataclass
class ExperimentConfig:
    targets: list
    r: float
    t: float
    interferometer: dict
    wiring: list = field(default_factory=list)
    cutoff: int = 4
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(doc, _schema())
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid configuration: {exc.message}") from exc
        cfg = cls(
            targets=list(doc["targets"]),
            r=float(doc["source_params"]["r"]),
            t=float(doc["source_params"]["t"]),
            interferometer=dict(doc["interferometer"]),
            wiring=list(doc.get("wiring", [])),
            cutoff=int(doc.get("cutoff", 4)),
            seed=int(doc.get("seed", 0)),
        )
        cfg.to_experiment()  # surface every semantic error at load time
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = {
            "targets": self.targets,
            "source_params": {"r": self.r, "t": self.t},
            "interferometer": self.interferometer,
            "cutoff": self.cutoff,
            "seed": self.seed,
        }
        if self.wiring:
            doc["wiring"] = self.wiring
        return doc

    def unitary(self) -> np.ndarray:
        spec = self.interferometer
        if "matrix" in spec:
            rows = spec["matrix"]
            if any(len(row) != len(rows) for row in rows):
                raise ConfigError("interferometer matrix must be square")
            u = np.array([[_complex(v) for v in row] for row in rows], dtype=complex)
        else:
            u = preset_unitary(spec["preset"], int(spec["size"]))
        defect = float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())
        if defect > UNITARY_TOL:
            raise ConfigError(f"interferometer is not unitary: max |U^dag U - I| = {defect:.3e}")
        return u

    def target_states(self) -> list[TargetState]:
        return [parse_target(t) for t in self.targets]

    def sources(self) -> list[SourceSpec]:
        try:
            specs = [SourceSpec.for_target(t, self.r, self.t) for t in self.target_states()]
            for spec in specs:
                spec.herald_displacements()
            return specs
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_experiment(self, cutoff: int | None = None) -> Experiment:
        try:
            return Experiment(
                tuple(self.sources()),
                self.unitary(),
                tuple(self.wiring),
                self.cutoff if cutoff is None else cutoff,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def dumps(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2)


def complex_pairs(values) -> list:
    return [_pair(complex(v)) for v in values]
