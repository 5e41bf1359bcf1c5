"""Photon-count bookkeeping for the hopping cascade.

An excitation starts in one of the two split sublevels of the first
aligned pair and hops down the chain one pair per step, emitting one
photon per hop into the low (l), central (m), or high (n) frequency
accumulator. The evolution is incoherent: sublevel populations carry
probability mass and each step applies the branching rows, so the final
photon-count distribution is an exact dynamic program over states keyed
by (sublevel, l, n). The central count m is implied by the step number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum, isfinite, sqrt

from .coupling import BranchingModel
from .errors import DomainError, SequencingError

HIGH = "H"
LOW = "L"

StateKey = tuple[str, int, int]
CountKey = tuple[int, int, int]


@dataclass(frozen=True)
class InitialExcitation:
    """Amplitudes (c_h, c_l) of the starting sublevel superposition.

    Both are nonnegative and c_h^2 + c_l^2 = 1 within 1e-12. Only the
    squared magnitudes enter the evolution; the amplitudes themselves
    matter to the sign audit.
    """

    c_h: float
    c_l: float

    def __post_init__(self) -> None:
        if not isfinite(self.c_h) or not isfinite(self.c_l):
            raise DomainError("initial amplitudes must be finite")
        if self.c_h < 0 or self.c_l < 0:
            raise DomainError(
                f"initial amplitudes must be nonnegative, got ({self.c_h}, {self.c_l})"
            )
        norm = self.c_h * self.c_h + self.c_l * self.c_l
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(
                f"initial amplitudes must be normalized: |c|^2 = {norm}"
            )

    @classmethod
    def normalized(cls, c_h: float, c_l: float) -> "InitialExcitation":
        """Scale a nonnegative, not-all-zero pair onto the unit circle."""
        if c_h < 0 or c_l < 0:
            raise DomainError(
                f"initial amplitudes must be nonnegative, got ({c_h}, {c_l})"
            )
        norm = sqrt(c_h * c_h + c_l * c_l)
        if not (norm > 0) or not isfinite(norm):
            raise DomainError("initial amplitudes must not both vanish")
        return cls(c_h / norm, c_l / norm)

    @classmethod
    def balanced(cls) -> "InitialExcitation":
        return cls.normalized(1.0, 1.0)


@dataclass
class CascadeState:
    """Population over (sublevel, l, n) keys after ``step`` hops."""

    n_total: int
    step: int
    weights: dict[StateKey, float] = field(default_factory=dict)

    def mass(self) -> float:
        return fsum(self.weights[k] for k in sorted(self.weights))


@dataclass
class JointDistribution:
    """Final probability table over photon counts (l, m, n)."""

    n_total: int
    table: dict[CountKey, float] = field(default_factory=dict)

    def total(self) -> float:
        return fsum(self.table[k] for k in sorted(self.table))

    def amplitudes(self) -> dict[CountKey, float]:
        """Square roots of the probabilities, for the positive pure state."""
        return {k: sqrt(self.table[k]) for k in sorted(self.table)}


def initial_state(n_total: int, init: InitialExcitation) -> CascadeState:
    """Populate the first pair's sublevels with the squared amplitudes."""
    if n_total < 1:
        raise DomainError(f"photon number must be at least 1, got {n_total}")
    weights: dict[StateKey, float] = {}
    if init.c_h > 0:
        weights[(HIGH, 0, 0)] = init.c_h * init.c_h
    if init.c_l > 0:
        weights[(LOW, 0, 0)] = init.c_l * init.c_l
    return CascadeState(n_total=n_total, step=0, weights=weights)


def evolve_step(state: CascadeState, branching: BranchingModel) -> CascadeState:
    """Apply one hop: H emits into m or n, L emits into m or l.

    Staying on the same sublevel emits a central photon (m, implied by the
    step count); crossing from H raises n, crossing from L raises l. Only
    the first n_total - 1 hops are ladder steps; stepping past that is a
    sequencing error.
    """
    if state.step >= state.n_total - 1:
        raise SequencingError(
            f"cascade already at step {state.step} of {state.n_total - 1}; "
            "only the terminal transition remains"
        )
    new: dict[StateKey, float] = {}
    for key in sorted(state.weights):
        w = state.weights[key]
        branch, l, n = key
        if branch == HIGH:
            moves = (((HIGH, l, n), w * branching.p_hh),
                     ((LOW, l, n + 1), w * branching.p_hl))
        else:
            moves = (((HIGH, l + 1, n), w * branching.p_lh),
                     ((LOW, l, n), w * branching.p_ll))
        for target, dw in moves:
            if dw != 0.0:
                new[target] = new.get(target, 0.0) + dw
    return CascadeState(n_total=state.n_total, step=state.step + 1, weights=new)


def terminal_transition(state: CascadeState) -> JointDistribution:
    """Decay the last pair to the final ground level.

    The closing photon goes to n from an H sublevel and to l from an L
    sublevel, with probability 1 either way. Requires the state to have
    completed all ladder steps.
    """
    if state.step != state.n_total - 1:
        raise SequencingError(
            f"terminal transition requires step {state.n_total - 1}, "
            f"got step {state.step}"
        )
    m = state.n_total - 1
    table: dict[CountKey, float] = {}
    for key in sorted(state.weights):
        w = state.weights[key]
        if w == 0.0:
            continue
        branch, l, n = key
        target = (l, m - l - n, n + 1) if branch == HIGH else (l + 1, m - l - n, n)
        table[target] = table.get(target, 0.0) + w
    return JointDistribution(n_total=state.n_total, table=table)


def run_cascade(
    n_total: int, init: InitialExcitation, branching: BranchingModel
) -> JointDistribution:
    """Full evolution: n_total - 1 ladder steps then the terminal decay."""
    state = initial_state(n_total, init)
    for _ in range(n_total - 1):
        state = evolve_step(state, branching)
    return terminal_transition(state)


def support_set(n_total: int) -> frozenset[CountKey]:
    """All (l, m, n) reachable for ``n_total`` photons.

    The support is exactly {l + m + n = n_total, |l - n| <= 1, l + n >= 1};
    in particular the all-central triple (0, n_total, 0) never occurs.
    """
    if n_total < 1:
        raise DomainError(f"photon number must be at least 1, got {n_total}")
    keys = set()
    for k in range(1, n_total // 2 + 1):
        keys.add((k, n_total - 2 * k, k))
    for l in range((n_total - 1) // 2 + 1):
        keys.add((l, n_total - 2 * l - 1, l + 1))
        keys.add((l + 1, n_total - 2 * l - 1, l))
    return frozenset(keys)


def support_partition(n_total: int) -> dict[str, frozenset[CountKey]]:
    """Split the support by which starting sublevel can reach each triple.

    n = l + 1 triples are reachable only from an H start, l = n + 1 only
    from an L start, and the diagonal l = n >= 1 from both.
    """
    full = support_set(n_total)
    return {
        "h_only": frozenset(k for k in full if k[2] == k[0] + 1),
        "l_only": frozenset(k for k in full if k[0] == k[2] + 1),
        "shared": frozenset(k for k in full if k[0] == k[2]),
    }
