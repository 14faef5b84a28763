"""Model checkpoints: one JSON header line followed by little-endian float64 data.

QTRL checkpoints store φ (folded into [0, 2π)) then β; classical-baseline
checkpoints store θ. The header is validated before any array is accepted.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import CheckpointError, QTRLError
from .mapper import MappingParams, mapping_size
from .models import Mode
from .policy import ClassicalModel, PolicyTopology, TrainableModel
from .qsim import QuantumParams
from .qtgen import GlobalModel

logger = logging.getLogger(__name__)

FORMAT = "dist-qtrl-checkpoint"
VERSION = 1
PAYLOAD_DTYPE = np.dtype("<f8")


@dataclass(frozen=True)
class CheckpointHeader:
    mode: Mode
    n: int | None
    layers: int | None
    k: int
    topology: PolicyTopology
    sizes: dict[str, int]
    seed: int
    agents: int = 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": FORMAT,
                "version": VERSION,
                "mode": self.mode.value,
                "n": self.n,
                "L": self.layers,
                "k": self.k,
                "topology": self.topology.to_dict(),
                "sizes": self.sizes,
                "seed": self.seed,
                "agents": self.agents,
            },
            sort_keys=True,
        )

    @property
    def payload_size(self) -> int:
        return sum(self.sizes.values())


def _header_for(
    model: TrainableModel, mode: Mode, seed: int, agents: int
) -> CheckpointHeader:
    if isinstance(model, GlobalModel):
        return CheckpointHeader(
            mode=mode,
            n=model.n,
            layers=model.layers,
            k=model.k,
            topology=model.topology,
            sizes={"phi": model.phi.size, "beta": model.beta.size},
            seed=seed,
            agents=agents,
        )
    if isinstance(model, ClassicalModel):
        return CheckpointHeader(
            mode=Mode.CLASSICAL_BASELINE,
            n=None,
            layers=None,
            k=model.topology.size,
            topology=model.topology,
            sizes={"theta": model.topology.size},
            seed=seed,
        )
    raise CheckpointError(f"Cannot checkpoint a {type(model).__name__}")


def save_checkpoint(
    path: str | Path,
    model: TrainableModel,
    mode: Mode,
    seed: int = 0,
    agents: int = 1,
) -> Path:
    """Write `model` to `path`, creating parent directories as needed."""
    header = _header_for(model, mode, seed, agents)
    if isinstance(model, GlobalModel):
        payload = np.concatenate([model.phi.reduced().angles, model.beta.values])
    else:
        payload = model.parameters()

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(header.to_json().encode("utf-8") + b"\n")
            f.write(payload.astype(PAYLOAD_DTYPE).tobytes())
    except OSError as e:
        raise CheckpointError(f"Cannot write checkpoint {path}: {e}") from e
    logger.info(f"Checkpoint written to {path} ({payload.size} values)")
    return path


def _parse_header(raw: bytes) -> CheckpointHeader:
    try:
        data: dict[str, Any] = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Malformed checkpoint header: {e}") from e
    if data.get("format") != FORMAT:
        raise CheckpointError(f"Not a checkpoint file (format {data.get('format')!r})")
    if data.get("version") != VERSION:
        raise CheckpointError(f"Unsupported checkpoint version {data.get('version')}")
    try:
        header = CheckpointHeader(
            mode=Mode(data["mode"]),
            n=data["n"],
            layers=data["L"],
            k=int(data["k"]),
            topology=PolicyTopology.from_dict(data["topology"]),
            sizes={str(key): int(v) for key, v in data["sizes"].items()},
            seed=int(data["seed"]),
            agents=int(data.get("agents", 1)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"Incomplete checkpoint header: {e}") from e
    if header.topology.size != header.k:
        raise CheckpointError(
            f"Header topology {header.topology.describe()} has "
            f"{header.topology.size} weights, header says k={header.k}"
        )
    if header.mode is Mode.CLASSICAL_BASELINE:
        expected = {"theta": header.k}
    else:
        if header.n is None or header.layers is None:
            raise CheckpointError("QTRL checkpoint header lacks n or L")
        expected = {
            "phi": 3 * header.n * header.layers,
            "beta": mapping_size(header.n),
        }
    if header.sizes != expected:
        raise CheckpointError(f"Header sizes {header.sizes} do not match {expected}")
    return header


def load_checkpoint(path: str | Path) -> tuple[CheckpointHeader, TrainableModel]:
    """Read and validate a checkpoint.

    Raises:
        CheckpointError: On I/O failure, a bad header or a payload of the wrong size
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e
    head, sep, body = raw.partition(b"\n")
    if not sep:
        raise CheckpointError(f"Checkpoint {path} has no header line")
    header = _parse_header(head)

    expected_bytes = header.payload_size * PAYLOAD_DTYPE.itemsize
    if len(body) != expected_bytes:
        raise CheckpointError(
            f"Checkpoint payload has {len(body)} bytes, header implies {expected_bytes}"
        )
    values = np.frombuffer(body, dtype=PAYLOAD_DTYPE).astype(np.float64)

    try:
        if header.mode is Mode.CLASSICAL_BASELINE:
            model: TrainableModel = ClassicalModel(values, header.topology)
        else:
            assert header.n is not None and header.layers is not None
            m = header.sizes["phi"]
            model = GlobalModel(
                phi=QuantumParams(values[:m], header.n, header.layers),
                beta=MappingParams(values[m:], header.n),
                k=header.k,
                policy=header.topology,
            )
    except QTRLError as e:
        raise CheckpointError(f"Checkpoint {path} does not describe a valid model: {e}") from e
    logger.info(f"Loaded {header.mode.value} checkpoint from {path}")
    return header, model
