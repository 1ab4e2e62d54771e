"""Declarative scenarios: systems, observers, events, and per-observer reports.

A scenario file names a set of systems, says which of them act as observers,
prepares every system, and lists a strictly ordered sequence of events
(measurements, unitary evolutions, queries).  The runner keeps one account
per observer -- a joint state over all *other* systems, tagged with that
observer -- and updates every account through each event:

* a measurement updates the measuring observer's account by outcome sampling
  and collapse, and every non-participating observer's account by the
  premeasurement unitary (the same physical event, two correct descriptions);
* an observer that gets measured loses its own unitary bookkeeping: its
  account is marked broken and later queries against it raise
  :class:`~relaqm.errors.DescriptionUnavailable`.

Two rules are enforced structurally: no system ever measures or describes
itself, and two observers cannot measure the same system "at the same event"
-- events are totally ordered, one of the two has to go first.

Every state in a report carries the observer it is relative to; the report
linter rejects untagged amplitude payloads.  Reports render as aligned text
or as a stable machine-readable tree (fixed key order, floats with 12
significant digits) suitable for golden-file comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .errors import (
    DescriptionUnavailable,
    NormalizationError,
    ParseError,
    ValidationError,
)
from .hilbert import ATOL, PAULI_X, PAULI_Y, PAULI_Z, StateVector
from .kernels import (
    classical_composite_probability,
    composite_probability,
    kernel_from_families,
    verify_double_stochastic,
)
from .measurement import MeasurementSetup, correlation_operator, premeasurement_unitary
from .questions import CompleteFamily

__all__ = [
    "Scenario",
    "SystemDecl",
    "MeasureEvent",
    "EvolveEvent",
    "QueryEvent",
    "Report",
    "parse_scenario",
    "load_scenario",
    "run",
    "emit_report",
    "lint_report",
    "fixture_path",
    "resolve_family",
]

_BUILTIN_HAMILTONIANS = {
    "pauli_x": PAULI_X,
    "pauli_y": PAULI_Y,
    "pauli_z": PAULI_Z,
}


@dataclass(frozen=True)
class SystemDecl:
    name: str
    dim: int


@dataclass(frozen=True)
class MeasureEvent:
    observer: str
    target: str
    family: str


@dataclass(frozen=True)
class EvolveEvent:
    target: str
    hamiltonian: np.ndarray
    t: float
    label: str


@dataclass(frozen=True)
class QueryEvent:
    kind: str
    params: dict


@dataclass(frozen=True)
class Scenario:
    name: str
    systems: tuple[SystemDecl, ...]
    observers: tuple[str, ...]
    preparations: dict[str, np.ndarray]
    families: dict[str, np.ndarray]
    events: tuple
    seed: int

    def dim_of(self, name: str) -> int:
        for s in self.systems:
            if s.name == name:
                return s.dim
        raise KeyError(name)


@dataclass
class Report:
    scenario: str
    seed: int
    entries: list = field(default_factory=list)
    violations: list = field(default_factory=list)


def fixture_path(name: str):
    """Filesystem path of a shipped fixture (scenario or matrix file)."""
    return resources.files("relaqm") / "fixtures" / name


# ---------------------------------------------------------------------------
# parsing


def _complex_value(raw, where: str) -> complex:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if (isinstance(raw, (list, tuple)) and len(raw) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw)):
        return complex(raw[0], raw[1])
    raise ParseError(f"{where}: expected a number or an [re, im] pair, got {raw!r}")


def _complex_vector(raw, where: str) -> np.ndarray:
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ParseError(f"{where}: expected a non-empty list of amplitudes")
    return np.array([_complex_value(x, where) for x in raw], dtype=complex)


def _complex_matrix(raw, where: str) -> np.ndarray:
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    rows = [_complex_vector(r, where) for r in raw]
    if len({r.size for r in rows}) != 1:
        raise ParseError(f"{where}: rows have differing lengths")
    return np.array(rows, dtype=complex)


def _require(mapping, key, where: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ParseError(f"{where}: missing required field {key!r}")
    return mapping[key]


def resolve_family(name: str, dim: int, declared: dict[str, np.ndarray]) -> CompleteFamily:
    """Look up a family by name: scenario-declared first, then builtins."""
    if name in declared:
        basis = declared[name]
        if basis.shape[0] != dim:
            raise ValidationError(
                "FamilyDimension",
                f"family {name!r} has dim {basis.shape[0]}, target has dim {dim}")
        return CompleteFamily(basis, name)
    if name == "computational":
        return CompleteFamily.computational(dim)
    if name == "hadamard":
        if dim != 2:
            raise ValidationError("FamilyDimension",
                                  f"hadamard family is two-dimensional, target has dim {dim}")
        return CompleteFamily.hadamard()
    if name == "fourier":
        return CompleteFamily.fourier(dim)
    raise ValidationError("UnknownFamily", f"no family named {name!r}")


def _parse_measure(body, idx: int, scenario_fields) -> MeasureEvent:
    where = f"events[{idx}].measure"
    systems, observers, families, dims = scenario_fields
    observer = _require(body, "observer", where)
    if isinstance(observer, (list, tuple)):
        raise ValidationError(
            "SimultaneousMeasurement",
            f"{where}: {list(observer)} cannot measure in one event; events are "
            "strictly ordered, one observer has to obtain the information first")
    target = _require(body, "target", where)
    family = body.get("family", "computational")
    if observer not in observers:
        raise ValidationError("NotAnObserver", f"{where}: {observer!r} is not an observer")
    if target not in dims:
        raise ValidationError("UnknownSystem", f"{where}: unknown system {target!r}")
    if observer == target:
        raise ValidationError(
            "SelfMeasurement",
            f"{where}: {observer!r} cannot measure itself; there is no meaning "
            "in being correlated with oneself")
    if dims[observer] < dims[target]:
        raise ValidationError(
            "PointerTooSmall",
            f"{where}: observer {observer!r} (dim {dims[observer]}) cannot record "
            f"all outcomes of {target!r} (dim {dims[target]})")
    resolve_family(family, dims[target], families)
    return MeasureEvent(observer, target, family)


def _parse_evolve(body, idx: int, scenario_fields) -> EvolveEvent:
    where = f"events[{idx}].evolve"
    _, _, _, dims = scenario_fields
    target = _require(body, "target", where)
    if target not in dims:
        raise ValidationError("UnknownSystem", f"{where}: unknown system {target!r}")
    t = _require(body, "t", where)
    if not isinstance(t, (int, float)) or isinstance(t, bool):
        raise ParseError(f"{where}: duration t must be a number")
    raw_h = _require(body, "hamiltonian", where)
    if isinstance(raw_h, str):
        if raw_h not in _BUILTIN_HAMILTONIANS:
            raise ValidationError("UnknownHamiltonian",
                                  f"{where}: no builtin Hamiltonian {raw_h!r}")
        h = _BUILTIN_HAMILTONIANS[raw_h]
        label = raw_h
    else:
        h = _complex_matrix(raw_h, where)
        label = "matrix"
    if h.shape[0] != dims[target]:
        raise ValidationError("DimensionMismatch",
                              f"{where}: Hamiltonian dim {h.shape[0]} vs "
                              f"system {target!r} dim {dims[target]}")
    if np.max(np.abs(h - h.conj().T)) > ATOL:
        raise ValidationError("NonHermitianHamiltonian",
                              f"{where}: Hamiltonian is not hermitian")
    return EvolveEvent(target, h, float(t), label)


def _parse_query(body, idx: int, scenario_fields) -> QueryEvent:
    where = f"events[{idx}].query"
    _, observers, families, dims = scenario_fields
    kind = _require(body, "kind", where)

    def observer_field(key="relative_to", forbidden=()):
        obs = _require(body, key, where)
        if obs not in observers:
            raise ValidationError("NotAnObserver", f"{where}: {obs!r} is not an observer")
        if obs in forbidden:
            raise ValidationError(
                "SelfDescription",
                f"{where}: no state of {obs!r} is defined relative to {obs!r} itself")
        return obs

    def system_field(key):
        name = _require(body, key, where)
        if name not in dims:
            raise ValidationError("UnknownSystem", f"{where}: unknown system {name!r}")
        return name

    if kind == "state":
        of = _require(body, "of", where)
        if isinstance(of, str):
            of = [of]
        if not isinstance(of, list) or not of:
            raise ParseError(f"{where}: 'of' must be a system name or list of names")
        for name in of:
            if name not in dims:
                raise ValidationError("UnknownSystem", f"{where}: unknown system {name!r}")
        if len(set(of)) != len(of):
            raise ParseError(f"{where}: duplicate systems in 'of'")
        obs = observer_field(forbidden=set(of))
        return QueryEvent("state", {"of": tuple(of), "relative_to": obs})
    if kind == "marginal":
        target = system_field("target")
        family = body.get("family", "computational")
        resolve_family(family, dims[target], families)
        obs = observer_field(forbidden={target})
        return QueryEvent("marginal", {"target": target, "family": family,
                                       "relative_to": obs})
    if kind == "completion":
        system = system_field("system")
        pointer = system_field("pointer")
        if system == pointer:
            raise ValidationError("SelfMeasurement",
                                  f"{where}: system and pointer must differ")
        family = body.get("family", "computational")
        resolve_family(family, dims[system], families)
        obs = observer_field(forbidden={system, pointer})
        return QueryEvent("completion", {"system": system, "pointer": pointer,
                                         "family": family, "relative_to": obs})
    if kind == "kernel":
        target = system_field("target")
        fam_a = _require(body, "family_a", where)
        fam_b = _require(body, "family_b", where)
        resolve_family(fam_a, dims[target], families)
        resolve_family(fam_b, dims[target], families)
        return QueryEvent("kernel", {"target": target, "family_a": fam_a,
                                     "family_b": fam_b})
    if kind == "interference":
        target = system_field("target")
        fam_a = _require(body, "family_a", where)
        fam_b = _require(body, "family_b", where)
        resolve_family(fam_a, dims[target], families)
        resolve_family(fam_b, dims[target], families)
        i = _require(body, "i", where)
        j = _require(body, "j", where)
        k = _require(body, "k", where)
        d = dims[target]
        for name, idx_ in (("i", i), ("j", j), ("k", k)):
            if not isinstance(idx_, int) or not 1 <= idx_ <= d:
                raise ValidationError(
                    "IndexOutOfRange",
                    f"{where}: {name}={idx_!r} outside outcome labels 1..{d}")
        if j == k:
            raise ValidationError("IndexOutOfRange",
                                  f"{where}: j and k must name distinct outcomes")
        return QueryEvent("interference", {"target": target, "family_a": fam_a,
                                           "family_b": fam_b, "i": i, "j": j, "k": k})
    raise ParseError(f"{where}: unknown query kind {kind!r}")


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises :class:`ParseError` on malformed structure and
    :class:`ValidationError` (with the violated rule's name) on semantic
    violations; every invariant is checked here, not at run time.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"not a well-formed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a mapping")

    name = doc.get("name", "scenario")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ParseError("seed must be a nonnegative integer")

    raw_systems = _require(doc, "systems", "scenario")
    if not isinstance(raw_systems, list) or not raw_systems:
        raise ParseError("systems must be a non-empty list")
    systems = []
    dims: dict[str, int] = {}
    for i, entry in enumerate(raw_systems):
        sname = _require(entry, "name", f"systems[{i}]")
        sdim = _require(entry, "dim", f"systems[{i}]")
        if not isinstance(sdim, int) or isinstance(sdim, bool) or sdim < 1:
            raise ParseError(f"systems[{i}]: dim must be a positive integer")
        if sname in dims:
            raise ValidationError("DuplicateSystem", f"system {sname!r} declared twice")
        systems.append(SystemDecl(sname, sdim))
        dims[sname] = sdim

    raw_observers = _require(doc, "observers", "scenario")
    if not isinstance(raw_observers, list) or not raw_observers:
        raise ParseError("observers must be a non-empty list")
    for obs in raw_observers:
        if obs not in dims:
            raise ValidationError(
                "ObserverNotDeclared",
                f"observer {obs!r} is not a declared system; all systems are "
                "equivalent and observers are systems too")
        if dims[obs] < 2:
            raise ValidationError(
                "ObserverTooSmall",
                f"observer {obs!r} has dim {dims[obs]}; an observer needs more "
                "than one state to carry correlations")
    observers = tuple(raw_observers)

    families: dict[str, np.ndarray] = {}
    for fname, raw in (doc.get("families") or {}).items():
        basis = _complex_matrix(raw, f"families.{fname}")
        gram = basis.conj().T @ basis
        if np.max(np.abs(gram - np.eye(basis.shape[0]))) > ATOL:
            raise ValidationError("FamilyNotUnitary",
                                  f"family {fname!r} basis is not unitary")
        families[fname] = basis

    raw_preps = _require(doc, "preparations", "scenario")
    preparations: dict[str, np.ndarray] = {}
    for sname, sdim in dims.items():
        if sname not in raw_preps:
            raise ValidationError("MissingPreparation",
                                  f"no preparation for system {sname!r}")
        vec = _complex_vector(raw_preps[sname], f"preparations.{sname}")
        if vec.size != sdim:
            raise ValidationError(
                "DimensionMismatch",
                f"preparations.{sname}: {vec.size} amplitudes for a dim-{sdim} system")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > ATOL:
            raise NormalizationError(
                f"preparations.{sname}: norm is {norm!r}, amplitudes must be "
                "normalized to 1")
        preparations[sname] = vec
    for extra in set(raw_preps) - set(dims):
        raise ValidationError("UnknownSystem",
                              f"preparations name undeclared system {extra!r}")

    scenario_fields = (systems, observers, families, dims)
    raw_events = doc.get("events") or []
    if not isinstance(raw_events, list):
        raise ParseError("events must be a list")
    events = []
    for idx, entry in enumerate(raw_events):
        if not isinstance(entry, dict) or len(entry) != 1:
            raise ParseError(f"events[{idx}]: each event is a one-key mapping "
                             "(measure / evolve / query)")
        (key, body), = entry.items()
        if key == "measure":
            events.append(_parse_measure(body, idx, scenario_fields))
        elif key == "evolve":
            events.append(_parse_evolve(body, idx, scenario_fields))
        elif key == "query":
            events.append(_parse_query(body, idx, scenario_fields))
        else:
            raise ParseError(f"events[{idx}]: unknown event kind {key!r}")

    return Scenario(name=name, systems=tuple(systems), observers=observers,
                    preparations=preparations, families=families,
                    events=tuple(events), seed=seed)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# running


class _Account:
    """One observer's joint description of every other system."""

    def __init__(self, observer: str, names: tuple[str, ...], dims: tuple[int, ...],
                 amps: np.ndarray):
        self.observer = observer
        self.names = names
        self.dims = dims
        self.amps = amps
        self.broken: str | None = None

    def position(self, name: str) -> int:
        return self.names.index(name)

    def apply_on(self, positions: tuple[int, ...], op: np.ndarray) -> None:
        self.amps = _apply_on_factors(self.amps, self.dims, positions, op)


def _apply_on_factors(amps: np.ndarray, dims: tuple[int, ...],
                      positions: tuple[int, ...], op: np.ndarray) -> np.ndarray:
    """Apply an operator to selected tensor factors (identity elsewhere)."""
    n = len(dims)
    tensor = amps.reshape(dims)
    order = list(positions) + [ax for ax in range(n) if ax not in positions]
    tensor = np.transpose(tensor, order)
    head = math.prod(dims[p] for p in positions)
    moved = tensor.reshape(head, -1)
    moved = op @ moved
    tensor = moved.reshape([dims[ax] for ax in order])
    return np.transpose(tensor, np.argsort(order)).reshape(-1)


def _canonical_phase(amps: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real nonnegative (global phase fix)."""
    idx = int(np.argmax(np.abs(amps)))
    a = amps[idx]
    if abs(a) < 1e-12:
        return amps
    return amps * (np.conj(a) / abs(a))


def _minimal_cluster(account: _Account, targets: tuple[str, ...]):
    """Smallest group of systems containing the targets whose joint state factors out.

    Returns (names, amplitudes).  Scans subsets in deterministic order of
    increasing size; the full account always factors trivially.
    """
    n = len(account.names)
    target_idx = frozenset(account.position(t) for t in targets)
    candidates = []
    for mask in range(1, 1 << n):
        subset = frozenset(i for i in range(n) if mask & (1 << i))
        if target_idx <= subset:
            candidates.append(sorted(subset))
    candidates.sort(key=lambda s: (len(s), s))
    tensor = account.amps.reshape(account.dims)
    for subset in candidates:
        rest = [i for i in range(n) if i not in subset]
        moved = np.transpose(tensor, subset + rest)
        block = moved.reshape(math.prod(account.dims[i] for i in subset), -1)
        if block.shape[1] == 1:
            factor = block[:, 0]
        else:
            u, s, _ = np.linalg.svd(block, full_matrices=False)
            if s.size > 1 and s[1] > 1e-9:
                continue
            factor = u[:, 0]
        names = tuple(account.names[i] for i in subset)
        return names, _canonical_phase(factor / np.linalg.norm(factor))
    raise RuntimeError("unreachable: the full set always factors")


def _state_payload(amps: np.ndarray, systems, relative_to: str) -> dict:
    return {
        "relative_to": relative_to,
        "systems": list(systems),
        "amplitudes": [[float(a.real), float(a.imag)] for a in amps],
    }


def _marginal(account: _Account, target: str, family: CompleteFamily) -> np.ndarray:
    pos = account.position(target)
    rotated = _apply_on_factors(account.amps, account.dims, (pos,),
                                family.basis.conj().T)
    tensor = np.abs(rotated.reshape(account.dims)) ** 2
    other = tuple(ax for ax in range(len(account.dims)) if ax != pos)
    return tensor.sum(axis=other)


def _measurement_setup(sc: Scenario, observer: str, target: str,
                       family: CompleteFamily) -> MeasurementSetup:
    d_t, d_o = sc.dim_of(target), sc.dim_of(observer)
    ready = StateVector(sc.preparations[observer], (d_o,), observer)
    marks = []
    for i in range(d_t):
        m = np.zeros(d_o, dtype=complex)
        m[i] = 1.0
        marks.append(StateVector(m, (d_o,), observer))
    return MeasurementSetup(family, ready, tuple(marks))


def _require_active(account: _Account, context: str) -> None:
    if account.broken is not None:
        raise DescriptionUnavailable(
            f"{context}: the unitary account of {account.observer!r} broke down "
            f"({account.broken})")


def _run_measure(sc: Scenario, ev: MeasureEvent, idx: int, accounts, rng,
                 report: Report) -> None:
    family = resolve_family(ev.family, sc.dim_of(ev.target), sc.families)
    measurer = accounts[ev.observer]
    _require_active(measurer, f"event {idx}: {ev.observer} measuring {ev.target}")

    # collapse description, relative to the measuring observer
    pos = measurer.position(ev.target)
    probs = _marginal(measurer, ev.target, family)
    outcome = _sample(probs, rng)
    rotated = _apply_on_factors(measurer.amps, measurer.dims, (pos,),
                                family.basis.conj().T)
    tensor = rotated.reshape(measurer.dims)
    mask = np.zeros(measurer.dims[pos])
    mask[outcome] = 1.0
    shape = [1] * len(measurer.dims)
    shape[pos] = measurer.dims[pos]
    tensor = tensor * mask.reshape(shape)
    collapsed = _apply_on_factors(tensor.reshape(-1), measurer.dims, (pos,),
                                  family.basis)
    measurer.amps = collapsed / np.linalg.norm(collapsed)

    entry = {
        "event": idx,
        "kind": "measure",
        "observer": ev.observer,
        "target": ev.target,
        "family": ev.family,
        "collapse": {
            "relative_to": ev.observer,
            "outcome": outcome + 1,
            "probabilities": [float(p) for p in probs],
            "post_state": _state_payload(_canonical_phase(family.basis[:, outcome]),
                                         [ev.target], ev.observer),
        },
        "entangled": [],
    }

    # entangling description, relative to every non-participating observer
    setup = _measurement_setup(sc, ev.observer, ev.target, family)
    u_pre = premeasurement_unitary(setup).matrix
    m_op = correlation_operator(setup).matrix
    for obs in sc.observers:
        if obs in (ev.observer, ev.target):
            continue
        account = accounts[obs]
        if account.broken is not None:
            continue
        pos_t = account.position(ev.target)
        pos_o = account.position(ev.observer)
        account.apply_on((pos_t, pos_o), u_pre)
        joint = _apply_on_factors(account.amps, account.dims, (pos_t, pos_o), m_op)
        completion = min(float(np.real(np.vdot(account.amps, joint))), 1.0)
        q_marginal = _marginal(account, ev.target, family)
        cluster_names, cluster_amps = _minimal_cluster(
            account, (ev.target, ev.observer))
        entry["entangled"].append({
            "relative_to": obs,
            "post_state": _state_payload(cluster_amps, cluster_names, obs),
            "completion_probability": completion,
            "q_marginal": [float(p) for p in q_marginal],
            "marginal_agreement": float(np.max(np.abs(q_marginal - probs))),
        })

    if ev.target in accounts:
        accounts[ev.target].broken = (
            f"measured by {ev.observer!r} at event {idx}; the interaction is not "
            "part of its own bookkeeping")
        entry["broken_accounts"] = [ev.target]
    report.entries.append(entry)


def _run_evolve(sc: Scenario, ev: EvolveEvent, idx: int, accounts,
                report: Report) -> None:
    w, v = np.linalg.eigh(ev.hamiltonian)
    u = (v * np.exp(-1j * ev.t * w)) @ v.conj().T
    for obs in sc.observers:
        account = accounts[obs]
        if account.broken is not None or ev.target == obs:
            continue
        account.apply_on((account.position(ev.target),), u)
    report.entries.append({
        "event": idx,
        "kind": "evolve",
        "target": ev.target,
        "hamiltonian": ev.label,
        "t": ev.t,
    })


def _run_query(sc: Scenario, ev: QueryEvent, idx: int, accounts,
               report: Report) -> None:
    params = ev.params
    entry = {"event": idx, "kind": "query", "query": ev.kind}
    if ev.kind == "state":
        account = accounts[params["relative_to"]]
        _require_active(account, f"event {idx}: state query")
        names, amps = _minimal_cluster(account, params["of"])
        defined = set(names) == set(params["of"])
        entry["of"] = list(params["of"])
        entry["relative_to"] = params["relative_to"]
        entry["defined"] = defined
        if not defined:
            entry["note"] = (f"{list(params['of'])} carry no state of their own; "
                             f"smallest factoring group is {list(names)}")
        entry["state"] = _state_payload(amps, names, params["relative_to"])
    elif ev.kind == "marginal":
        account = accounts[params["relative_to"]]
        _require_active(account, f"event {idx}: marginal query")
        family = resolve_family(params["family"], sc.dim_of(params["target"]),
                                sc.families)
        probs = _marginal(account, params["target"], family)
        entry.update({
            "target": params["target"],
            "family": params["family"],
            "relative_to": params["relative_to"],
            "probabilities": [float(p) for p in probs],
        })
    elif ev.kind == "completion":
        account = accounts[params["relative_to"]]
        _require_active(account, f"event {idx}: completion query")
        family = resolve_family(params["family"], sc.dim_of(params["system"]),
                                sc.families)
        setup = _measurement_setup(sc, params["pointer"], params["system"], family)
        m_op = correlation_operator(setup).matrix
        pos = (account.position(params["system"]),
               account.position(params["pointer"]))
        joint = _apply_on_factors(account.amps, account.dims, pos, m_op)
        value = min(float(np.real(np.vdot(account.amps, joint))), 1.0)
        entry.update({
            "system": params["system"],
            "pointer": params["pointer"],
            "family": params["family"],
            "relative_to": params["relative_to"],
            "completion_probability": value,
        })
    elif ev.kind == "kernel":
        dim = sc.dim_of(params["target"])
        fam_a = resolve_family(params["family_a"], dim, sc.families)
        fam_b = resolve_family(params["family_b"], dim, sc.families)
        kernel = kernel_from_families(fam_a, fam_b)
        check = verify_double_stochastic(kernel.p)
        entry.update({
            "target": params["target"],
            "to_family": params["family_a"],
            "from_family": params["family_b"],
            "p": [[float(x) for x in row] for row in kernel.p],
            "unitary": [[[float(x.real), float(x.imag)] for x in row]
                        for row in kernel.U],
            "max_stochastic_violation": check.max_violation,
        })
    elif ev.kind == "interference":
        dim = sc.dim_of(params["target"])
        fam_a = resolve_family(params["family_a"], dim, sc.families)
        fam_b = resolve_family(params["family_b"], dim, sc.families)
        kernel = kernel_from_families(fam_a, fam_b)
        i, j, k = params["i"] - 1, params["j"] - 1, params["k"] - 1
        composite = composite_probability(kernel, i, (j, k))
        classical = classical_composite_probability(kernel, i, (j, k))
        entry.update({
            "target": params["target"],
            "family_a": params["family_a"],
            "family_b": params["family_b"],
            "i": params["i"],
            "jk": [params["j"], params["k"]],
            "composite_probability": composite,
            "classical_probability": classical,
            "interference_gap": composite - classical,
        })
    report.entries.append(entry)


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    return min(int(np.searchsorted(cdf, u, side="right")), len(probs) - 1)


def run(sc: Scenario, seed: int | None = None) -> Report:
    """Execute a scenario and return the per-observer report.

    Fully deterministic for a given seed; the optional argument overrides the
    scenario's own seed (command-line flag or environment variable).
    """
    effective_seed = sc.seed if seed is None else seed
    rng = np.random.default_rng(effective_seed)
    report = Report(scenario=sc.name, seed=effective_seed)

    accounts: dict[str, _Account] = {}
    for obs in sc.observers:
        names = tuple(s.name for s in sc.systems if s.name != obs)
        dims = tuple(sc.dim_of(n) for n in names)
        amps = np.array([1.0], dtype=complex)
        for n in names:
            amps = np.kron(amps, sc.preparations[n])
        accounts[obs] = _Account(obs, names, dims, amps)

    for idx, ev in enumerate(sc.events):
        if isinstance(ev, MeasureEvent):
            _run_measure(sc, ev, idx, accounts, rng, report)
        elif isinstance(ev, EvolveEvent):
            _run_evolve(sc, ev, idx, accounts, report)
        elif isinstance(ev, QueryEvent):
            _run_query(sc, ev, idx, accounts, report)
        else:  # pragma: no cover - parse produces only the three kinds
            raise TypeError(f"unknown event type {type(ev)}")

    report.violations = lint_report(report)
    return report


# ---------------------------------------------------------------------------
# reporting


def lint_report(report: Report) -> list[str]:
    """Every amplitude payload must say which observer it is relative to."""
    problems: list[str] = []

    def walk(node, path):
        if isinstance(node, dict):
            if "amplitudes" in node and not node.get("relative_to"):
                problems.append(f"{path}: state without an observer tag")
            for key, value in node.items():
                walk(value, f"{path}.{key}")
        elif isinstance(node, list):
            for n, value in enumerate(node):
                walk(value, f"{path}[{n}]")

    walk(report.entries, "entries")
    return problems


def _fmt_float(x: float) -> str:
    if x == 0:
        x = 0.0  # normalize -0.0
    return format(x, ".12g")


def _render_json(node, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(node, dict):
        if not node:
            return "{}"
        rows = [f'{pad}  "{key}": {_render_json(value, indent + 1)}'
                for key, value in node.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(node, (list, tuple)):
        if not node:
            return "[]"
        flat = all(isinstance(v, (int, float, bool, str)) or v is None for v in node) \
            and len(node) <= 16
        if flat:
            return "[" + ", ".join(_render_json(v) for v in node) + "]"
        rows = [f"{pad}  {_render_json(v, indent + 1)}" for v in node]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(node, bool):
        return "true" if node else "false"
    if isinstance(node, (int, np.integer)):
        return str(int(node))
    if isinstance(node, (float, np.floating)):
        return _fmt_float(float(node))
    if node is None:
        return "null"
    return '"' + str(node).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _amplitudes_text(pairs) -> str:
    parts = []
    for re_, im_ in pairs:
        if im_ == 0:
            parts.append(_fmt_float(re_))
        else:
            parts.append(f"{_fmt_float(re_)}{'+' if im_ >= 0 else '-'}{_fmt_float(abs(im_))}i")
    return "(" + ", ".join(parts) + ")"


def _probs_text(probs) -> str:
    return "[" + ", ".join(_fmt_float(p) for p in probs) + "]"


def _table_lines(report: Report) -> list[str]:
    lines = [f"scenario: {report.scenario}", f"seed: {report.seed}"]
    for entry in report.entries:
        if entry["kind"] == "measure":
            lines.append(f"-- event {entry['event']}: {entry['observer']} measures "
                         f"{entry['target']} in family {entry['family']}")
            c = entry["collapse"]
            lines.append(f"   relative to {c['relative_to']}: outcome {c['outcome']}"
                         f"  probabilities {_probs_text(c['probabilities'])}")
            st = c["post_state"]
            lines.append(f"   relative to {c['relative_to']}: state of "
                         f"{','.join(st['systems'])} = "
                         f"{_amplitudes_text(st['amplitudes'])}")
            for ent in entry["entangled"]:
                st = ent["post_state"]
                lines.append(f"   relative to {ent['relative_to']}: state of "
                             f"{','.join(st['systems'])} = "
                             f"{_amplitudes_text(st['amplitudes'])}")
                lines.append(f"   relative to {ent['relative_to']}: completion "
                             f"probability {_fmt_float(ent['completion_probability'])}"
                             f"  q-marginal {_probs_text(ent['q_marginal'])}")
        elif entry["kind"] == "evolve":
            lines.append(f"-- event {entry['event']}: evolve {entry['target']} "
                         f"under {entry['hamiltonian']} for t={_fmt_float(entry['t'])}")
        else:
            lines.append(f"-- event {entry['event']}: query {entry['query']}")
            if entry["query"] == "state":
                st = entry["state"]
                status = "" if entry["defined"] else "  (no factor state; showing cluster)"
                lines.append(f"   state of {','.join(st['systems'])} relative to "
                             f"{st['relative_to']} = "
                             f"{_amplitudes_text(st['amplitudes'])}{status}")
            elif entry["query"] == "marginal":
                lines.append(f"   marginal of {entry['target']} ({entry['family']}) "
                             f"relative to {entry['relative_to']} = "
                             f"{_probs_text(entry['probabilities'])}")
            elif entry["query"] == "completion":
                lines.append(f"   completion probability of {entry['pointer']} having "
                             f"measured {entry['system']}, relative to "
                             f"{entry['relative_to']} = "
                             f"{_fmt_float(entry['completion_probability'])}")
            elif entry["query"] == "kernel":
                lines.append(f"   kernel {entry['to_family']} <- {entry['from_family']} "
                             f"on {entry['target']} (max stochastic violation "
                             f"{_fmt_float(entry['max_stochastic_violation'])})")
                for row in entry["p"]:
                    lines.append("     " + "  ".join(f"{x:.6f}" for x in row))
            elif entry["query"] == "interference":
                lines.append(
                    f"   composite {_fmt_float(entry['composite_probability'])}"
                    f"  classical {_fmt_float(entry['classical_probability'])}"
                    f"  gap {_fmt_float(entry['interference_gap'])}"
                    f"  (i={entry['i']}, jk={entry['jk']})")
    if report.violations:
        lines.append("-- violations")
        lines.extend(f"   {v}" for v in report.violations)
    return lines


def emit_report(report: Report, format: str = "table") -> str:
    """Render a report as aligned text or as a stable structured tree.

    The structured form is byte-identical across runs with the same scenario
    and seed: keys keep insertion order and floats print with 12 significant
    digits.
    """
    if format == "structured":
        tree = {
            "scenario": report.scenario,
            "seed": report.seed,
            "entries": report.entries,
            "violations": report.violations,
        }
        return _render_json(tree) + "\n"
    if format == "table":
        return "\n".join(_table_lines(report)) + "\n"
    raise ValueError(f"unknown report format {format!r}")
