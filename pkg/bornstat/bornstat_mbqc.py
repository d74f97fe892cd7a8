"""
.. module:: bornstat_mbqc
    :platform: Linux
    :synopsis: Measurement-based realization of the Trotter step

One Trotter step ``U = e^{ihX dt} e^{iJZZ dt}`` is enacted by measuring one
plaquette row of a Lieb-lattice cluster state attached to the logical
register:

* every bond (j, k) gets a bond-edge qubit joined by CZ to v_j and v_k,
  measured at (theta, phi) = (-2J dt, pi/2); outcome 1 inserts Z_j Z_k;
* every site j grows the chain v_j - e_j - w_j: the old vertex v_j is
  measured in X (outcome 1 inserts Z_j), the upper edge e_j at
  (pi/2, 2h dt) (outcome 1 inserts X_j), and w_j becomes logical site j.

The step therefore acts as ``e^{ihX dt} B e^{iJZZ dt}`` with B the
byproduct string. Vertex-class qubits (v, w) only touch edge-class qubits
(bond and upper edges), so the row graph is bipartite.

In corrected mode the byproducts are tracked as a Pauli frame ``X^a Z^b``
on the physical register and later measurement angles are adapted: a bond
polar angle flips sign when ``a_j xor a_k`` and an upper-edge azimuth
flips sign when the Z part on its site is set.

.. moduleauthor:: bornstat developers
"""
import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bornstat_errors import CapacityError, ConfigError
from .bornstat_evolution import (StateVector, apply_x_rotation, apply_zz_phase,
                                 initial_plus_state, random_state,
                                 state_fidelity, x_basis_transform)
from .bornstat_model import Bitstring, ModelParams
from .bornstat_utils import philox_generator

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: Largest logical width simulated by streaming
MAX_LAYOUT_L = 10

#: Largest logical width for dense verification and full-row simulation
MAX_VERIFY_L = 6

_PLUS = np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2)


@dataclass(frozen=True)
class MeasBasis(object):
    """
    Single-qubit basis: outcome 0 projects onto
    cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
    """
    theta: float
    phi: float

    def vectors(self):
        """ (outcome-0 vector, outcome-1 vector) """
        half = self.theta / 2
        phase = np.exp(1j * self.phi)
        zero = np.array([math.cos(half), phase * math.sin(half)])
        one = np.array([math.sin(half), -phase * math.cos(half)])
        return zero, one

    def adapted(self, flip_theta: bool = False,
                flip_phi: bool = False) -> "MeasBasis":
        return MeasBasis(-self.theta if flip_theta else self.theta,
                         -self.phi if flip_phi else self.phi)


class QubitRole(enum.Enum):
    """ Role of a qubit in one plaquette row """
    LOGICAL = "logical"
    VERTEX = "vertex"
    BOND_EDGE = "bond_edge"
    UPPER_EDGE = "upper_edge"


class ProtocolMode(enum.Enum):
    """ How bulk measurement outcomes are handled """
    POSTSELECT_ZERO = "postselect_zero"
    CORRECTED = "corrected"
    RANDOM_CIRCUIT = "random_circuit"

    @classmethod
    def parse(cls, value) -> "ProtocolMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError("Invalid protocol mode: {0}".format(value))


@dataclass(frozen=True)
class ClusterLayout(object):
    """
    One plaquette row: qubits as (role, index) pairs, the CZ adjacency and
    a basis per measured role. Bond-edge indices refer to ``bonds``.
    """
    L: int
    bonds: tuple
    qubits: tuple
    adjacency: tuple
    bases: dict = field(compare=False)

    @property
    def bulk(self) -> tuple:
        """ Measured qubits in measurement order """
        order = [(QubitRole.BOND_EDGE, i) for i in range(len(self.bonds))]
        for j in range(self.L):
            order.append((QubitRole.VERTEX, j))
            order.append((QubitRole.UPPER_EDGE, j))
        return tuple(order)

    @property
    def width(self) -> int:
        """ Register width of the full-row simulation """
        return len(self.qubits)

    def with_basis(self, role: QubitRole, basis: MeasBasis) -> "ClusterLayout":
        """ Copy with one role's basis replaced """
        bases = dict(self.bases)
        bases[role] = basis
        return replace(self, bases=bases)

    def is_bipartite(self) -> bool:
        """ Every CZ joins a vertex-class and an edge-class qubit """
        vertex_class = (QubitRole.VERTEX, QubitRole.LOGICAL)
        return all((a[0] in vertex_class) != (b[0] in vertex_class)
                   for a, b in self.adjacency)


def build_layout(params: ModelParams,
                 max_L: int = MAX_LAYOUT_L) -> ClusterLayout:
    """
    Lieb-lattice row for one Trotter step of the model.

    :raises CapacityError: when L exceeds max_L
    """
    if params.L > max_L:
        raise CapacityError(
            "MBQC layout for L={0} exceeds the streaming limit {1}".format(
                params.L, max_L), cap=max_L)
    bonds = tuple(params.bonds)
    qubits = [(QubitRole.VERTEX, j) for j in range(params.L)]
    qubits += [(QubitRole.BOND_EDGE, i) for i in range(len(bonds))]
    qubits += [(QubitRole.UPPER_EDGE, j) for j in range(params.L)]
    qubits += [(QubitRole.LOGICAL, j) for j in range(params.L)]
    adjacency = []
    for i, (j, k) in enumerate(bonds):
        adjacency.append(((QubitRole.BOND_EDGE, i), (QubitRole.VERTEX, j)))
        adjacency.append(((QubitRole.BOND_EDGE, i), (QubitRole.VERTEX, k)))
    for j in range(params.L):
        adjacency.append(((QubitRole.VERTEX, j), (QubitRole.UPPER_EDGE, j)))
        adjacency.append(((QubitRole.UPPER_EDGE, j), (QubitRole.LOGICAL, j)))
    bases = {
        QubitRole.BOND_EDGE: MeasBasis(-2 * params.J * params.dt,
                                       math.pi / 2),
        QubitRole.VERTEX: MeasBasis(math.pi / 2, 0.0),
        QubitRole.UPPER_EDGE: MeasBasis(math.pi / 2, 2 * params.h * params.dt),
    }
    return ClusterLayout(params.L, bonds, tuple(qubits), tuple(adjacency),
                         bases)


@dataclass(frozen=True)
class PauliString(object):
    """ The operator i^phase X^x Z^z (Z acts first) on L qubits """
    x: tuple
    z: tuple
    phase: int = 0

    @classmethod
    def identity(cls, L: int) -> "PauliString":
        return cls((0,) * L, (0,) * L)

    @property
    def L(self) -> int:
        return len(self.x)

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    def __mul__(self, other: "PauliString") -> "PauliString":
        # X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
        sign = sum(b & c for b, c in zip(self.z, other.x)) % 2
        return PauliString(tuple(a ^ c for a, c in zip(self.x, other.x)),
                           tuple(b ^ d for b, d in zip(self.z, other.z)),
                           (self.phase + other.phase + 2 * sign) % 4)

    def x_mask(self) -> int:
        return sum(bit << j for j, bit in enumerate(self.x))

    def z_mask(self) -> int:
        return sum(bit << j for j, bit in enumerate(self.z))

    def apply(self, state: StateVector) -> StateVector:
        """ Applies the operator to a Z-basis state vector """
        codes = np.arange(len(state), dtype=np.int64)
        zmask, xmask = self.z_mask(), self.x_mask()
        signs = np.ones(len(state))
        for j in range(self.L):
            if (zmask >> j) & 1:
                signs = signs * (1 - 2 * ((codes >> j) & 1))
        amps = state.amplitudes * signs * (1j ** self.phase)
        return StateVector(amps[codes ^ xmask], state.L)

    def __str__(self):
        letters = []
        for j, (xb, zb) in enumerate(zip(self.x, self.z)):
            if xb and zb:
                letters.append("X{0}Z{0}".format(j))
            elif xb:
                letters.append("X{0}".format(j))
            elif zb:
                letters.append("Z{0}".format(j))
        sign = ("+", "+i", "-", "-i")[self.phase]
        return sign + ("".join(letters) or "I")


def byproduct(outcomes: dict, layout: ClusterLayout) -> PauliString:
    """
    Pauli string inserted between the Trotter factors by one step's
    outcomes: bond-edge 1 gives Z_j Z_k, vertex 1 gives Z_j, upper-edge 1
    gives X_j.

    :param outcomes: (role, index) -> bit; missing qubits count as 0
    """
    x = [0] * layout.L
    z = [0] * layout.L
    for (role, index), bit in outcomes.items():
        if not bit:
            continue
        if role is QubitRole.BOND_EDGE:
            j, k = layout.bonds[index]
            z[j] ^= 1
            z[k] ^= 1
        elif role is QubitRole.VERTEX:
            z[index] ^= 1
        elif role is QubitRole.UPPER_EDGE:
            x[index] ^= 1
    return PauliString(tuple(x), tuple(z))


def step_unitary(state: StateVector, params: ModelParams,
                 inserted: PauliString = None) -> StateVector:
    """ e^{ihX dt} B e^{iJZZ dt} applied to a state """
    state = apply_zz_phase(state, params, params.dt)
    if inserted is not None:
        state = inserted.apply(state)
    return apply_x_rotation(state, params.h, params.dt)


class QubitRegister(object):
    """
    Dense register of labelled qubits; axis i of the tensor belongs to
    labels[i]. Measured qubits are projected out and discarded.
    """

    def __init__(self, state: StateVector, max_width: int = 24):
        L = state.L
        self.labels = [(QubitRole.LOGICAL, j) for j in reversed(range(L))]
        self.tensor = np.array(state.amplitudes).reshape((2,) * L)
        self.max_width = max_width
        self.peak_width = L

    @property
    def width(self) -> int:
        return len(self.labels)

    def _axis(self, label) -> int:
        return self.labels.index(label)

    def add_nodes(self, labels):
        """ Attaches fresh |+> qubits """
        for label in labels:
            if self.width + 1 > self.max_width:
                raise CapacityError("Register width exceeds {0}".format(
                    self.max_width), cap=self.max_width)
            self.tensor = np.multiply.outer(self.tensor, _PLUS)
            self.labels.append(label)
        self.peak_width = max(self.peak_width, self.width)

    def entangle_nodes(self, edges):
        """ Applies CZ on every (label, label) pair """
        for first, second in edges:
            index = [slice(None)] * self.width
            index[self._axis(first)] = 1
            index[self._axis(second)] = 1
            self.tensor[tuple(index)] *= -1

    def measure(self, label, basis: MeasBasis, uniform: float = None,
                forced: int = None):
        """
        Projects one qubit onto a basis vector and discards it.

        :returns: (outcome, Born probability of that outcome)
        """
        axis = self._axis(label)
        zero = np.take(self.tensor, 0, axis=axis)
        one = np.take(self.tensor, 1, axis=axis)
        branches = [np.conj(vec[0]) * zero + np.conj(vec[1]) * one
                    for vec in basis.vectors()]
        weights = [float(np.vdot(b, b).real) for b in branches]
        total = weights[0] + weights[1]
        if forced is not None:
            outcome = int(forced)
        else:
            outcome = int(uniform >= weights[0] / total)
        prob = weights[outcome] / total
        if prob <= 0:
            raise ConfigError("Forced outcome {0} of {1} has zero "
                              "probability".format(outcome, label))
        self.tensor = branches[outcome] / math.sqrt(weights[outcome])
        del self.labels[axis]
        return outcome, prob

    def rename(self, old, new):
        self.labels[self._axis(old)] = new

    def to_state(self) -> StateVector:
        """ Logical register as a StateVector (site 0 least significant) """
        L = self.width
        order = [self._axis((QubitRole.LOGICAL, j)) for j in reversed(range(L))]
        return StateVector(np.transpose(self.tensor, order).reshape(-1), L)


@dataclass
class StepRecord(object):
    """ Outcomes and probabilities of one step, in measurement order """
    outcomes: dict = field(default_factory=dict)
    probabilities: dict = field(default_factory=dict)
    bases: dict = field(default_factory=dict)


@dataclass
class OutcomeRecord(object):
    """ Bulk record of one protocol run and its final Pauli frame """
    seed: int
    shot: int
    mode: ProtocolMode
    steps: list = field(default_factory=list)
    frame: PauliString = None
    boundary_physical: Bitstring = None

    def rows(self):
        """ (shot, step, qubit_role, site, outcome) rows """
        for step, record in enumerate(self.steps):
            for (role, index), bit in record.outcomes.items():
                yield (self.shot, step, role.value, index, bit)


def _frame_adapted_basis(layout: ClusterLayout, role: QubitRole, index: int,
                         frame_x, frame_z):
    basis = layout.bases[role]
    if role is QubitRole.BOND_EDGE:
        j, k = layout.bonds[index]
        return basis.adapted(flip_theta=bool(frame_x[j] ^ frame_x[k]))
    if role is QubitRole.UPPER_EDGE:
        return basis.adapted(flip_phi=bool(frame_z[index]))
    return basis


def simulate_step(state: StateVector, layout: ClusterLayout, mode,
                  uniforms=None, frame: PauliString = None,
                  forced: dict = None, streaming: bool = True):
    """
    Attaches one plaquette row, entangles, measures the bulk and returns
    the new logical register.

    :param uniforms: one uniform per bulk qubit (measurement order)
    :param frame: incoming Pauli frame (corrected mode)
    :param forced: (role, index) -> outcome overrides
    :param streaming: keep at most L + 1 qubits alive; otherwise build the
        whole row before measuring
    :returns: (StateVector, StepRecord, PauliString frame)
    """
    mode = ProtocolMode.parse(mode)
    if state.L != layout.L:
        raise ConfigError("State width {0} does not match layout L={1}".format(
            state.L, layout.L))
    L = layout.L
    forced = dict(forced or {})
    if mode is ProtocolMode.POSTSELECT_ZERO:
        for qubit in layout.bulk:
            forced.setdefault(qubit, 0)
    frame = PauliString.identity(L) if frame is None else frame
    frame_x, frame_z = list(frame.x), list(frame.z)
    adapt = mode is ProtocolMode.CORRECTED
    order = {qubit: pos for pos, qubit in enumerate(layout.bulk)}
    register = QubitRegister(
        state, max_width=4 * L + 1 if not streaming else L + 2)
    for j in range(L):
        register.rename((QubitRole.LOGICAL, j), (QubitRole.VERTEX, j))
    record = StepRecord()

    def measure(qubit):
        role, index = qubit
        if adapt:
            basis = _frame_adapted_basis(layout, role, index, frame_x,
                                         frame_z)
        else:
            basis = layout.bases[role]
        uniform = None if uniforms is None else uniforms[order[qubit]]
        if uniform is None and qubit not in forced:
            raise ConfigError("No randomness supplied for {0}".format(qubit))
        outcome, prob = register.measure(qubit, basis, uniform,
                                         forced.get(qubit))
        record.outcomes[qubit] = outcome
        record.probabilities[qubit] = prob
        record.bases[qubit] = basis
        if role is QubitRole.BOND_EDGE and outcome:
            j, k = layout.bonds[index]
            frame_z[j] ^= 1
            frame_z[k] ^= 1
        elif role is QubitRole.VERTEX and outcome:
            frame_z[index] ^= 1
        elif role is QubitRole.UPPER_EDGE and outcome:
            frame_x[index] ^= 1

    if streaming:
        for i, (j, k) in enumerate(layout.bonds):
            label = (QubitRole.BOND_EDGE, i)
            register.add_nodes([label])
            register.entangle_nodes([(label, (QubitRole.VERTEX, j)),
                                     (label, (QubitRole.VERTEX, k))])
            measure(label)
        for j in range(L):
            vertex, edge = (QubitRole.VERTEX, j), (QubitRole.UPPER_EDGE, j)
            register.add_nodes([edge])
            register.entangle_nodes([(vertex, edge)])
            measure(vertex)
            register.add_nodes([(QubitRole.LOGICAL, j)])
            register.entangle_nodes([(edge, (QubitRole.LOGICAL, j))])
            measure(edge)
    else:
        new_nodes = [q for q in layout.qubits if q[0] is not QubitRole.VERTEX]
        register.add_nodes(new_nodes)
        register.entangle_nodes(layout.adjacency)
        for qubit in layout.bulk:
            measure(qubit)
    LOG.debug("Step done: peak register width %d", register.peak_width)
    new_frame = PauliString(tuple(frame_x), tuple(frame_z))
    return register.to_state(), record, new_frame


def logical_state(state: StateVector, frame: PauliString) -> StateVector:
    """ Removes the frame: physical = X^a Z^b logical """
    undo = PauliString(tuple(0 for _ in frame.x), frame.z) * \
        PauliString(frame.x, tuple(0 for _ in frame.z))
    return undo.apply(state)


def _step_uniforms(seed: int, shot: int, step: int, count: int):
    return philox_generator(seed, shot, step, 0).random(count)


def _boundary_sample(state: StateVector, seed: int, shot: int,
                     steps: int) -> int:
    probs = np.abs(x_basis_transform(state)) ** 2
    cdf = np.cumsum(probs)
    uniform = philox_generator(seed, shot, steps, 1).random() * cdf[-1]
    return int(min(np.searchsorted(cdf, uniform, side="right"),
                   probs.size - 1))


def run_protocol(params: ModelParams, steps: int, mode, seed: int,
                 shot: int = 0, layout: ClusterLayout = None,
                 streaming: bool = True):
    """
    Runs steps plaquette rows on |+...+> then measures the register in the
    X basis.

    In corrected mode the boundary outcome is classically corrected by the
    Z part of the frame; the uncorrected outcome is kept on the record.

    :returns: (boundary Bitstring, OutcomeRecord)
    """
    if steps < 1:
        raise ConfigError("The protocol needs steps >= 1")
    mode = ProtocolMode.parse(mode)
    layout = build_layout(params) if layout is None else layout
    state = initial_plus_state(params.L)
    frame = PauliString.identity(params.L)
    record = OutcomeRecord(seed, shot, mode)
    n_bulk = len(layout.bulk)
    for step in range(steps):
        uniforms = _step_uniforms(seed, shot, step, n_bulk)
        state, step_record, step_frame = simulate_step(
            state, layout, mode, uniforms, frame, streaming=streaming)
        if mode is ProtocolMode.CORRECTED:
            frame = step_frame
        record.steps.append(step_record)
    physical = _boundary_sample(state, seed, shot, steps)
    record.frame = frame
    record.boundary_physical = Bitstring(physical, params.L)
    boundary = physical ^ frame.z_mask()
    return Bitstring(boundary, params.L), record


def sample_protocol(params: ModelParams, steps: int, mode, seed: int,
                    shots: int, executor=None, layout: ClusterLayout = None):
    """ Independent shots with per-shot Philox streams, in shot order """
    layout = build_layout(params) if layout is None else layout

    def shot_unit(shot):
        return run_protocol(params, steps, mode, seed, shot, layout)

    if executor is None:
        return [shot_unit(shot) for shot in range(shots)]
    return list(executor.map(shot_unit, range(shots)))


def verify_report(params: ModelParams, trials: int, seed: int,
                  layout: ClusterLayout = None,
                  max_L: int = MAX_VERIFY_L) -> dict:
    """
    Worst 1 - fidelity per check over random inputs: the all-zero pattern
    against U(dt), and every single-1 pattern against the unitary with its
    byproduct inserted (grouped by role).
    """
    if params.L > max_L:
        raise CapacityError(
            "Dense verification is limited to L <= {0}".format(max_L),
            cap=max_L)
    layout = build_layout(params) if layout is None else layout
    report = {"all_zero": 0.0}
    for role in (QubitRole.BOND_EDGE, QubitRole.VERTEX, QubitRole.UPPER_EDGE):
        report[role.value] = 0.0
    zeros = {qubit: 0 for qubit in layout.bulk}
    for trial in range(trials):
        psi = random_state(params.L, seed, trial)
        out, _, _ = simulate_step(psi, layout, ProtocolMode.POSTSELECT_ZERO)
        deficit = 1 - state_fidelity(out, step_unitary(psi, params))
        report["all_zero"] = max(report["all_zero"], deficit)
        for qubit in layout.bulk:
            pattern = dict(zeros)
            pattern[qubit] = 1
            out, _, _ = simulate_step(psi, layout, ProtocolMode.RANDOM_CIRCUIT,
                                      forced=pattern)
            target = step_unitary(psi, params, byproduct(pattern, layout))
            deficit = 1 - state_fidelity(out, target)
            key = qubit[0].value
            report[key] = max(report[key], deficit)
    LOG.info("Verification over %d trials: worst deficit %.3g", trials,
             max(report.values()))
    return report


def verify_equivalence(params: ModelParams, trials: int, seed: int,
                       layout: ClusterLayout = None) -> float:
    """ Worst-case fidelity deficit over every check of verify_report """
    return max(verify_report(params, trials, seed, layout).values())
