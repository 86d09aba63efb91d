"""
Fixture files - JSON documents describing channel or state ensembles

A fixture carries a version tag, a dimension, an optional comment and either
an `operations` list (channels) or a `states` list. Complex numbers are
[re, im] pairs and matrices are row-major nested lists. Floats are written
with Python's shortest round-trip repr, so parse -> serialize -> parse keeps
every payload bit-exact.
"""

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from models.distinguish import SU2Ensemble, paradox_ensembles
from models.errors import FixtureError, QDistError
from models.numkernel import ProbVector, as_complex_matrix, as_complex_vector
from models.qchannel import (PAULI, Channel, ChannelEnsemble, EBChannel,
                             KrausChannel, UnitaryChannel)
from models.qstate import DensityMatrix, PureState, StateEnsemble

logger = logging.getLogger(__name__)

FIXTURE_VERSION = "qdist-fixture/1"
OPERATION_TYPES = ("unitary", "kraus", "eb")
STATE_TYPES = ("density", "pure")

FIXTURE_DIR = Path(
    os.getenv("QDIST_FIXTURE_DIR", Path(__file__).resolve().parent.parent / "fixtures")
)


@dataclass(frozen=True, eq=False)
class OperationRecord:
    type: str
    weight: float
    matrices: Tuple[np.ndarray, ...] = ()
    phis: Tuple[np.ndarray, ...] = ()
    psis: Tuple[np.ndarray, ...] = ()

    def channel(self) -> Channel:
        if self.type == "unitary":
            return UnitaryChannel(self.matrices[0])
        if self.type == "kraus":
            return KrausChannel(self.matrices)
        return EBChannel(list(self.phis), list(self.psis))


@dataclass(frozen=True, eq=False)
class StateRecord:
    type: str
    weight: float
    data: np.ndarray

    def state(self) -> DensityMatrix:
        if self.type == "pure":
            return PureState(self.data).density()
        return DensityMatrix(self.data)


@dataclass(frozen=True, eq=False)
class FixtureFile:
    dimension: int
    operations: Tuple[OperationRecord, ...] = ()
    states: Tuple[StateRecord, ...] = ()
    comment: Optional[str] = None
    name: Optional[str] = field(default=None, compare=False)

    @property
    def kind(self) -> str:
        return "channels" if self.operations else "states"

    def weights(self) -> ProbVector:
        records = self.operations or self.states
        return ProbVector([r.weight for r in records])

    def channels(self) -> List[Channel]:
        if not self.operations:
            raise FixtureError(f"Fixture {self.label} has no operations")
        return [record.channel() for record in self.operations]

    def channel_ensemble(self) -> ChannelEnsemble:
        return ChannelEnsemble(self.weights(), self.channels())

    def su2_ensemble(self) -> SU2Ensemble:
        if any(r.type != "unitary" for r in self.operations) or not self.operations:
            raise FixtureError(f"Fixture {self.label} must contain only unitary operations")
        return SU2Ensemble(self.weights(), [r.matrices[0] for r in self.operations])

    def density_matrices(self) -> List[DensityMatrix]:
        if not self.states:
            raise FixtureError(f"Fixture {self.label} has no states")
        return [record.state() for record in self.states]

    def state_ensemble(self) -> StateEnsemble:
        return StateEnsemble(self.weights(), self.density_matrices())

    @property
    def label(self) -> str:
        return self.name or "<inline>"

    def validate(self) -> None:
        """Raise the first validation error found in weights or payloads"""
        if self.operations:
            ensemble = self.channel_ensemble()
            if ensemble.dim_in != self.dimension:
                raise FixtureError(
                    f"Fixture {self.label} declares dimension {self.dimension}, "
                    f"operations act on {ensemble.dim_in}"
                )
        else:
            ensemble = self.state_ensemble()
            if ensemble.dim != self.dimension:
                raise FixtureError(
                    f"Fixture {self.label} declares dimension {self.dimension}, states have {ensemble.dim}"
                )


# --- decoding ---------------------------------------------------------------


def _decode_complex(value, where: str) -> complex:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value)):
        raise FixtureError(f"{where}: complex numbers must be [re, im] pairs, got {value!r}")
    number = complex(float(value[0]), float(value[1]))
    if not (math.isfinite(number.real) and math.isfinite(number.imag)):
        raise FixtureError(f"{where}: non-finite complex value {value!r}")
    return number


def _decode_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise FixtureError(f"{where}: matrix must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FixtureError(f"{where}: matrix rows have different lengths")
    return as_complex_matrix(
        [[_decode_complex(z, where) for z in row] for row in rows]
    )


def _decode_vector(entries, where: str) -> np.ndarray:
    if not isinstance(entries, list) or not entries:
        raise FixtureError(f"{where}: vector must be a non-empty list")
    return as_complex_vector([_decode_complex(z, where) for z in entries])


def _decode_weight(record: dict, where: str) -> float:
    weight = record.get("weight")
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise FixtureError(f"{where}: weight must be a number")
    return float(weight)


def _decode_operation(record: dict, index: int) -> OperationRecord:
    where = f"operations[{index}]"
    if not isinstance(record, dict):
        raise FixtureError(f"{where}: expected an object")
    kind = record.get("type")
    if kind not in OPERATION_TYPES:
        raise FixtureError(f"{where}: type must be one of {OPERATION_TYPES}, got {kind!r}")
    weight = _decode_weight(record, where)
    if kind == "unitary":
        return OperationRecord(kind, weight, matrices=(_decode_matrix(record.get("matrix"), where),))
    if kind == "kraus":
        matrices = record.get("matrices")
        if not isinstance(matrices, list) or not matrices:
            raise FixtureError(f"{where}: kraus operations need a non-empty 'matrices' list")
        return OperationRecord(kind, weight, matrices=tuple(_decode_matrix(m, where) for m in matrices))
    phis, psis = record.get("phis"), record.get("psis")
    if not isinstance(phis, list) or not isinstance(psis, list):
        raise FixtureError(f"{where}: eb operations need 'phis' and 'psis' lists")
    return OperationRecord(
        kind,
        weight,
        phis=tuple(_decode_vector(v, where) for v in phis),
        psis=tuple(_decode_vector(v, where) for v in psis),
    )


def _decode_state(record: dict, index: int) -> StateRecord:
    where = f"states[{index}]"
    if not isinstance(record, dict):
        raise FixtureError(f"{where}: expected an object")
    kind = record.get("type")
    if kind not in STATE_TYPES:
        raise FixtureError(f"{where}: type must be one of {STATE_TYPES}, got {kind!r}")
    weight = _decode_weight(record, where)
    if kind == "pure":
        return StateRecord(kind, weight, _decode_vector(record.get("vector"), where))
    return StateRecord(kind, weight, _decode_matrix(record.get("matrix"), where))


def parse_fixture(text: str, name: Optional[str] = None, validate: bool = True) -> FixtureFile:
    """
    Parse and (by default) validate a fixture document

    Raises:
        FixtureError: malformed document
        ValidationError: payloads violate a state or channel invariant
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise FixtureError(f"Fixture {name or '<inline>'} is not valid JSON: {e}")
    if not isinstance(document, dict):
        raise FixtureError("Fixture must be a JSON object")
    if document.get("version") != FIXTURE_VERSION:
        raise FixtureError(f"Unsupported fixture version {document.get('version')!r}")
    dimension = document.get("dimension")
    if not isinstance(dimension, int) or dimension < 1:
        raise FixtureError(f"dimension must be a positive integer, got {dimension!r}")

    operations = document.get("operations") or []
    states = document.get("states") or []
    if bool(operations) == bool(states):
        raise FixtureError("Fixture needs exactly one non-empty 'operations' or 'states' list")

    fixture = FixtureFile(
        dimension=dimension,
        operations=tuple(_decode_operation(r, i) for i, r in enumerate(operations)),
        states=tuple(_decode_state(r, i) for i, r in enumerate(states)),
        comment=document.get("comment"),
        name=name,
    )
    if validate:
        fixture.validate()
    return fixture


# --- encoding ---------------------------------------------------------------


def _encode_complex(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _encode_matrix(m: np.ndarray) -> List[List[List[float]]]:
    return [[_encode_complex(z) for z in row] for row in m]


def _encode_vector(v: np.ndarray) -> List[List[float]]:
    return [_encode_complex(z) for z in v]


def fixture_to_dict(fixture: FixtureFile) -> dict:
    document = {"version": FIXTURE_VERSION}
    if fixture.comment:
        document["comment"] = fixture.comment
    document["dimension"] = fixture.dimension
    if fixture.operations:
        records = []
        for op in fixture.operations:
            record = {"type": op.type, "weight": op.weight}
            if op.type == "unitary":
                record["matrix"] = _encode_matrix(op.matrices[0])
            elif op.type == "kraus":
                record["matrices"] = [_encode_matrix(m) for m in op.matrices]
            else:
                record["phis"] = [_encode_vector(v) for v in op.phis]
                record["psis"] = [_encode_vector(v) for v in op.psis]
            records.append(record)
        document["operations"] = records
    else:
        document["states"] = [
            {"type": s.type, "weight": s.weight,
             ("vector" if s.type == "pure" else "matrix"):
                 _encode_vector(s.data) if s.type == "pure" else _encode_matrix(s.data)}
            for s in fixture.states
        ]
    return document


def serialize_fixture(fixture: FixtureFile) -> str:
    return json.dumps(fixture_to_dict(fixture), indent=2) + "\n"


# --- loading and bundled fixtures -------------------------------------------


def bundled_fixture_names() -> List[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


def resolve_fixture_path(reference: Union[str, Path]) -> Path:
    """A path to an existing file, or the bare name of a bundled fixture"""
    path = Path(reference)
    if path.is_file():
        return path
    bundled = FIXTURE_DIR / f"{path.stem if path.suffix == '.json' else reference}.json"
    if bundled.is_file():
        return bundled
    raise FixtureError(f"No fixture file or bundled fixture named {str(reference)!r}")


def load_fixture(reference: Union[str, Path], validate: bool = True) -> Tuple[FixtureFile, str]:
    """Returns the parsed fixture and its raw text (for the inputs digest)"""
    path = resolve_fixture_path(reference)
    text = path.read_text(encoding="utf-8")
    fixture = parse_fixture(text, name=path.stem, validate=validate)
    logger.info(f"Loaded fixture {path} ({fixture.kind}, {len(fixture.operations or fixture.states)} records)")
    return fixture, text


def inputs_digest(texts: Sequence[str]) -> str:
    digest = hashlib.sha256()
    for text in texts:
        digest.update(text.encode("utf-8"))
        digest.update(b"\0")
    return digest.hexdigest()


def _unitary_ops(weights: Sequence[float], matrices: Sequence[np.ndarray]) -> Tuple[OperationRecord, ...]:
    return tuple(
        OperationRecord("unitary", float(w), matrices=(np.asarray(m, dtype=np.complex128),))
        for w, m in zip(weights, matrices)
    )


def _phase_gate(angle: float) -> np.ndarray:
    return np.diag([1.0, complex(math.cos(angle), math.sin(angle))])


def _basis(d: int) -> List[np.ndarray]:
    return list(np.eye(d, dtype=np.complex128))


def build_bundled_fixtures() -> Dict[str, FixtureFile]:
    """Every shipped fixture, rebuilt from its closed-form definition"""
    third = 1.0 / 3.0
    first, second = paradox_ensembles()
    s = math.sqrt(0.5)
    quarter_turn = _phase_gate(math.pi / 2.0)
    plus_minus = (np.array([s, s], dtype=np.complex128), np.array([s, -s], dtype=np.complex128))

    fixtures = {
        "pauli": FixtureFile(
            2, _unitary_ops([0.25] * 4, [PAULI[k] for k in "IXYZ"]),
            comment="Pauli unitaries I, X, Y, Z with uniform weights",
        ),
        "ex3_u": FixtureFile(
            2, _unitary_ops([third] * 3, first.unitaries),
            comment="U1 = I; U2 = [[c, s], [-s, c]], c = s = sqrt(1/2); "
                    "U3 = [[sqrt(1/3), sqrt(2/3) e^{-ia}], [-sqrt(2/3) e^{ia}, sqrt(1/3)]], "
                    "cos a = sqrt(3)/4 - 1/sqrt(2), sin a >= 0",
        ),
        "ex3_v": FixtureFile(
            2, _unitary_ops([third] * 3, second.unitaries),
            comment="V1 = I; V2 = [[sqrt(1/2.1), sqrt(1.1/2.1)], [-sqrt(1.1/2.1), sqrt(1/2.1)]]; "
                    "V3 = [[sqrt(1/3.1), sqrt(2.1/3.1) e^{-ib}], [-sqrt(2.1/3.1) e^{ib}, sqrt(1/3.1)]], "
                    "cos b = -1/sqrt(2.1 * 1.1), sin b >= 0",
        ),
        "eb_measure_reprepare": FixtureFile(
            2,
            (
                OperationRecord("eb", 0.5, phis=tuple(_basis(2)), psis=tuple(_basis(2))),
                OperationRecord("eb", 0.5, phis=plus_minus, psis=plus_minus),
            ),
            comment="Measure and reprepare in the computational basis, or in the |+>, |-> basis",
        ),
        "depolarizing_pair": FixtureFile(
            2,
            (
                OperationRecord("unitary", 0.5, matrices=(np.eye(2, dtype=np.complex128),)),
                OperationRecord("kraus", 0.5, matrices=tuple(0.5 * PAULI[k] for k in "IXYZ")),
            ),
            comment="Identity and the completely depolarizing channel",
        ),
        "pair_z": FixtureFile(
            2, _unitary_ops([0.5, 0.5], [np.eye(2), PAULI["Z"]]),
            comment="I and sigma_z: eigenphases {0, pi}",
        ),
        "pair_quarter_turn": FixtureFile(
            2, _unitary_ops([0.5, 0.5], [np.eye(2), quarter_turn]),
            comment="I and diag(1, e^{i pi/2}): eigenphases {0, pi/2}",
        ),
        "pair_eighth_turn": FixtureFile(
            2, _unitary_ops([0.5, 0.5], [np.eye(2), _phase_gate(math.pi / 4.0)]),
            comment="I and diag(1, e^{i pi/4}): eigenphases {0, pi/4}",
        ),
        "copies_three": FixtureFile(
            2, _unitary_ops([third] * 3, [np.eye(2), quarter_turn, _phase_gate(math.pi / 4.0)]),
            comment="I, diag(1, e^{i pi/2}), diag(1, e^{i pi/4})",
        ),
        "identical_channels": FixtureFile(
            2, _unitary_ops([0.5, 0.5], [np.eye(2), np.eye(2)]),
            comment="The identity channel twice",
        ),
        "bell_probe": FixtureFile(
            4, states=(StateRecord("pure", 1.0, np.array([s, 0.0, 0.0, s], dtype=np.complex128)),),
            comment="Maximally entangled two-qubit state (|00> + |11>)/sqrt(2)",
        ),
        "states_orthogonal": FixtureFile(
            2, states=tuple(StateRecord("pure", 0.5, b) for b in _basis(2)),
            comment="|0> and |1> with uniform weights",
        ),
        "states_plus": FixtureFile(
            2,
            states=(
                StateRecord("pure", 0.5, _basis(2)[0]),
                StateRecord("pure", 0.5, np.array([s, s], dtype=np.complex128)),
            ),
            comment="|0> and |+> with uniform weights",
        ),
        "states_identical": FixtureFile(
            2, states=(StateRecord("pure", 0.5, _basis(2)[0]), StateRecord("pure", 0.5, _basis(2)[0])),
            comment="|0> twice",
        ),
        "states_commuting": FixtureFile(
            2,
            states=(
                StateRecord("density", 0.5, np.diag([0.5, 0.5]).astype(np.complex128)),
                StateRecord("density", 0.5, np.diag([0.8, 0.2]).astype(np.complex128)),
            ),
            comment="diag(0.5, 0.5) and diag(0.8, 0.2)",
        ),
    }
    return {name: FixtureFile(f.dimension, f.operations, f.states, f.comment, name) for name, f in fixtures.items()}


def export_fixtures(directory: Union[str, Path]) -> List[Path]:
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, fixture in sorted(build_bundled_fixtures().items()):
        path = target / f"{name}.json"
        path.write_text(serialize_fixture(fixture), encoding="utf-8")
        written.append(path)
    logger.info(f"Exported {len(written)} fixtures to {target}")
    return written


@dataclass(frozen=True)
class FixtureCheck:
    name: str
    passed: bool
    message: str


def check_bundled_fixtures() -> List[FixtureCheck]:
    """Validate every shipped fixture file; never raises for a bad fixture"""
    results = []
    for name in bundled_fixture_names():
        try:
            load_fixture(name)
            results.append(FixtureCheck(name, True, "ok"))
        except QDistError as e:
            logger.warning(f"Bundled fixture {name} failed validation: {e}")
            results.append(FixtureCheck(name, False, str(e)))
    return results
