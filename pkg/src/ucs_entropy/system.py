"""Finite uncertain control systems and their elementary set operations.

States and inputs are interned to dense indices when a system is built.
Sets of states travel internally as ``int`` bit masks (bit ``i`` set means
state ``i`` is a member); the public functions in this module accept any
iterable of state ids and return ``frozenset`` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import NotStrict, UnknownInput, UnknownState


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True, eq=False)
class UncertainSystem:
    """A triple ``(X, U, F)`` with ``F`` strict and total.

    Build with :meth:`from_table`; the raw constructor expects the interned
    image table ``images[x][u]`` (bit masks) and checks it.
    """

    name: str
    states: tuple[str, ...]
    inputs: tuple[str, ...]
    images: tuple[tuple[int, ...], ...]
    _state_ix: dict = field(init=False, repr=False, compare=False)
    _input_ix: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.states or not self.inputs:
            raise NotStrict("a system needs at least one state and one input")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state ids")
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError("duplicate input ids")
        if len(self.images) != len(self.states):
            raise NotStrict("image table does not cover every state")
        full = (1 << len(self.states)) - 1
        for x, row in enumerate(self.images):
            if len(row) != len(self.inputs):
                raise NotStrict(f"state {self.states[x]} lacks an image for some input")
            for u, img in enumerate(row):
                if img == 0:
                    raise NotStrict(f"F({self.states[x]},{self.inputs[u]}) is empty")
                if img & ~full:
                    raise UnknownState(f"F({self.states[x]},{self.inputs[u]}) leaves the state space")
        object.__setattr__(self, "_state_ix", {s: i for i, s in enumerate(self.states)})
        object.__setattr__(self, "_input_ix", {u: i for i, u in enumerate(self.inputs)})

    @classmethod
    def from_table(
        cls,
        name: str,
        states: Iterable,
        inputs: Iterable,
        trans: Mapping[tuple, Iterable],
    ) -> UncertainSystem:
        """Build from ``{(state, input): successors}``; every pair is required."""
        states = tuple(str(s) for s in states)
        inputs = tuple(str(u) for u in inputs)
        six = {s: i for i, s in enumerate(states)}
        uix = {u: i for i, u in enumerate(inputs)}
        table = [[0] * len(inputs) for _ in states]
        seen = set()
        for (x, u), succ in trans.items():
            x, u = str(x), str(u)
            if x not in six:
                raise UnknownState(x)
            if u not in uix:
                raise UnknownInput(u)
            m = 0
            for y in succ:
                y = str(y)
                if y not in six:
                    raise UnknownState(y)
                m |= 1 << six[y]
            table[six[x]][uix[u]] = m
            seen.add((x, u))
        missing = [(x, u) for x in states for u in inputs if (x, u) not in seen]
        if missing:
            raise NotStrict(f"missing transitions: {missing}")
        return cls(name, states, inputs, tuple(tuple(r) for r in table))

    # -- interning -----------------------------------------------------

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.states)) - 1

    def state_index(self, s) -> int:
        try:
            return self._state_ix[str(s)]
        except KeyError:
            raise UnknownState(f"unknown state {s!r}") from None

    def input_index(self, u) -> int:
        try:
            return self._input_ix[str(u)]
        except KeyError:
            raise UnknownInput(f"unknown input {u!r}") from None

    def mask(self, states: Iterable) -> int:
        m = 0
        for s in states:
            m |= 1 << self.state_index(s)
        return m

    def labels(self, mask: int) -> tuple[str, ...]:
        """State ids of ``mask`` in system order."""
        return tuple(self.states[i] for i in iter_bits(mask))

    def stateset(self, mask: int) -> frozenset:
        return frozenset(self.labels(mask))

    # -- transitions ---------------------------------------------------

    def image(self, mask: int, u: int) -> int:
        """``F(A, u)`` for a state mask ``A`` and input index ``u``."""
        out = 0
        for x in iter_bits(mask):
            out |= self.images[x][u]
        return out

    def trans(self, x, u) -> frozenset:
        return self.stateset(self.images[self.state_index(x)][self.input_index(u)])

    def q_masks(self, target: int) -> tuple[int, ...]:
        """``Q_u`` for every input, as masks indexed by input."""
        out = []
        for u in range(self.n_inputs):
            m = 0
            for x in iter_bits(target):
                if self.images[x][u] & ~target == 0:
                    m |= 1 << x
            out.append(m)
        return tuple(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UncertainSystem):
            return NotImplemented
        return (self.name, self.states, self.inputs, self.images) == (
            other.name,
            other.states,
            other.inputs,
            other.images,
        )

    def __hash__(self) -> int:
        return hash((self.name, self.states, self.inputs, self.images))


@dataclass(frozen=True)
class InvarianceCheck:
    ok: bool
    witness: dict  # state -> input keeping it inside the target
    violators: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ConjugacyPair:
    state_map: Mapping  # states of the source -> states of the image system
    input_map: Mapping  # inputs of the source -> inputs of the image system


def q_u(sys: UncertainSystem, Q: Iterable, u) -> frozenset:
    """States of ``Q`` whose whole ``u``-image stays inside ``Q``."""
    ui = sys.input_index(u)
    target = sys.mask(Q)
    return sys.stateset(sys.q_masks(target)[ui])


def controlled_invariance_mask(sys: UncertainSystem, target: int) -> tuple[dict, int]:
    """Witness table ``{state index: input index}`` and the mask of violators."""
    witness = {}
    bad = 0
    qm = sys.q_masks(target)
    for x in iter_bits(target):
        for u in range(sys.n_inputs):
            if qm[u] >> x & 1:
                witness[x] = u
                break
        else:
            bad |= 1 << x
    return witness, bad


def is_controlled_invariant(sys: UncertainSystem, Q: Iterable) -> InvarianceCheck:
    target = sys.mask(Q)
    witness, bad = controlled_invariance_mask(sys, target)
    if bad:
        return InvarianceCheck(False, {}, sys.labels(bad))
    named = {sys.states[x]: sys.inputs[u] for x, u in sorted(witness.items())}
    return InvarianceCheck(True, named, ())


def maximal_invariant_subset(sys: UncertainSystem, target: int) -> int:
    """Largest controlled invariant subset of ``target`` (possibly empty)."""
    while True:
        _, bad = controlled_invariance_mask(sys, target)
        if not bad:
            return target
        target &= ~bad


def is_semi_conjugacy(s1: UncertainSystem, s2: UncertainSystem, c: ConjugacyPair) -> bool:
    """Whether ``F2(pi(x), r(u))`` is a subset of ``pi(F1(x, u))`` everywhere."""
    pi = [s2.state_index(c.state_map[x]) for x in s1.states]
    r = [s2.input_index(c.input_map[u]) for u in s1.inputs]
    for x in range(s1.n_states):
        for u in range(s1.n_inputs):
            pushed = 0
            for y in iter_bits(s1.images[x][u]):
                pushed |= 1 << pi[y]
            if s2.images[pi[x]][r[u]] & ~pushed:
                return False
    return True


def minimal_covers(target: int, sets) -> list[tuple[int, ...]]:
    """Inclusion-minimal index tuples whose sets jointly contain ``target``.

    Only sets meeting ``target`` take part. Output is sorted by size, then
    lexicographically; an empty ``target`` has the single cover ``()``.
    """
    if target == 0:
        return [()]
    found: set[tuple[int, ...]] = set()
    stack = [(target, ())]
    while stack:
        uncovered, chosen = stack.pop()
        if not uncovered:
            found.add(tuple(sorted(chosen)))
            continue
        low = uncovered & -uncovered
        for i, s in enumerate(sets):
            if s & low and i not in chosen:
                stack.append((uncovered & ~s, chosen + (i,)))
    out = []
    for cover in found:
        union_without = [0] * len(cover)
        for j in range(len(cover)):
            m = 0
            for t, i in enumerate(cover):
                if t != j:
                    m |= sets[i]
            union_without[j] = m
        if all(target & ~m for m in union_without):
            out.append(cover)
    out.sort(key=lambda c: (len(c), c))
    return out
