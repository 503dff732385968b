"""Oracle-query game: identify the classes of ``f0 ^ f1`` and ``f0 ^ f2``.

Functions take two bits to one bit and are written ``h_abcd`` with
``h(00)=a, h(01)=b, h(10)=c, h(11)=d``.  Each of f0, f1, f2 may be queried
once.  Two strategies are scored by exact probability propagation over the
48 admissible instances, and by Monte Carlo sampling as a cross-check.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import pcm
from .qcore import Operator, RandomSource, StateVector, measure_in_basis, tensor

INPUTS = ("00", "01", "10", "11")


@dataclass(frozen=True, order=True)
class Boolean2Fn:
    truth: tuple[int, int, int, int]

    def __post_init__(self):
        t = tuple(int(b) for b in self.truth)
        if len(t) != 4 or any(b not in (0, 1) for b in t):
            raise ValueError(f"truth table must be 4 bits, got {self.truth!r}")
        object.__setattr__(self, "truth", t)

    @classmethod
    def parse(cls, bits: str) -> "Boolean2Fn":
        bits = bits.removeprefix("h").removeprefix("_")
        return cls(tuple(int(b) for b in bits))

    def __call__(self, x: int) -> int:
        return self.truth[x]

    def __xor__(self, other: "Boolean2Fn") -> "Boolean2Fn":
        return Boolean2Fn(tuple(a ^ b for a, b in zip(self.truth, other.truth)))

    @property
    def bits(self) -> str:
        return "".join(map(str, self.truth))

    def __str__(self) -> str:
        return "h" + self.bits

    def __repr__(self) -> str:
        return f"h{self.bits}"


def h(bits: str) -> Boolean2Fn:
    return Boolean2Fn.parse(bits)


def xor_fn(f: Boolean2Fn, g: Boolean2Fn) -> Boolean2Fn:
    return f ^ g


S_F0 = (h("0010"), h("0101"), h("1001"))
S_1 = (h("0001"), h("0010"), h("0100"), h("1000"))
S_2 = (h("0000"), h("0011"), h("0101"), h("1001"))
S_F12 = tuple(sorted(set(S_1) | set(S_2)))
CLASSES = {
    "S0000": frozenset({h("0000"), h("1111")}),
    "S0011": frozenset({h("0011"), h("1100")}),
    "S0101": frozenset({h("0101"), h("1010")}),
    "S1001": frozenset({h("1001"), h("0110")}),
}
S_F = frozenset().union(*CLASSES.values())


def classify(fn: Boolean2Fn) -> str | None:
    """Name of the two-element class containing ``fn``, or None outside S_f."""
    for name, members in CLASSES.items():
        if fn in members:
            return name
    return None


@dataclass(frozen=True)
class TaskInstance:
    f0: Boolean2Fn
    f1: Boolean2Fn
    f2: Boolean2Fn
    weight: Fraction = Fraction(1, 48)

    def __post_init__(self):
        if self.f0 not in S_F0:
            raise ValueError(f"f0={self.f0} not in S_f0")
        for f in (self.f1, self.f2):
            if f not in S_F12:
                raise ValueError(f"{f} not in S_f12")
            if (self.f0 ^ f) not in S_F:
                raise ValueError(f"{self.f0} ^ {f} violates the class constraint")

    @property
    def answer(self) -> tuple[str, str]:
        return classify(self.f0 ^ self.f1), classify(self.f0 ^ self.f2)


def allowed_partners(f0: Boolean2Fn) -> tuple[Boolean2Fn, ...]:
    return tuple(f for f in S_F12 if (f0 ^ f) in S_F)


@lru_cache(maxsize=1)
def enumerate_instances() -> tuple[TaskInstance, ...]:
    """All admissible (f0, f1, f2): f0 uniform, f1 and f2 independently uniform."""
    out = []
    for f0 in S_F0:
        partners = allowed_partners(f0)
        w = Fraction(1, len(S_F0) * len(partners) ** 2)
        for f1, f2 in itertools.product(partners, repeat=2):
            out.append(TaskInstance(f0, f1, f2, w))
    return tuple(out)


# --- circuits -------------------------------------------------------------

def phase_state(fn: Boolean2Fn) -> StateVector:
    """``(1/2) sum_x (-1)^{fn(x)} |x>``."""
    return StateVector(np.array([(-1.0) ** b for b in fn.truth]) / 2.0)


S1_BASIS = {str(fn): phase_state(fn) for fn in S_1}
S2_BASIS = {str(fn): phase_state(fn) for fn in S_2}

_HADAMARD = Operator(np.array([[1, 1], [1, -1]]) / np.sqrt(2), unitary=True)
_MINUS = StateVector(np.array([1, -1]) / np.sqrt(2))
_ZERO = StateVector.basis(2, 0)


def oracle_unitary(fn: Boolean2Fn) -> Operator:
    """8x8 permutation ``|x>|y> -> |x>|y ^ fn(x)>`` (x is the two leading qubits)."""
    U = np.zeros((8, 8))
    for x in range(4):
        for y in range(2):
            U[2 * x + (y ^ fn(x)), 2 * x + y] = 1.0
    return Operator(U, unitary=True)


def _kickback(register: StateVector, fn: Boolean2Fn) -> StateVector:
    """Query ``fn`` with a |-> target and discard the target again."""
    out = oracle_unitary(fn).apply(tensor(register, _MINUS)).amplitudes.reshape(4, 2)
    reg = out @ _MINUS.amplitudes.conj()
    # the target factors out untouched, so nothing is lost by projecting on <-|
    return StateVector(reg)


def fig2_circuit(fn: Boolean2Fn) -> StateVector:
    """Hadamards on |00>, one phase-kickback query: returns the phase state of ``fn``."""
    hh = tensor(_HADAMARD, _HADAMARD)
    return _kickback(hh.apply(tensor(_ZERO, _ZERO)), fn)


def _branch_guesses(state: StateVector, basis: dict, assumed_f0: Boolean2Fn) -> dict[str, float]:
    """Measure ``state`` in ``basis`` and map label l to class(assumed_f0 ^ l)."""
    out: dict[str, float] = {}
    for label, p in measure_in_basis(state, basis).items():
        guess = classify(assumed_f0 ^ h(label))
        out[guess] = out.get(guess, 0.0) + p
    return out


# --- the f0 family and machines ------------------------------------------

F0_SIGNS = (1, -1, -1)
PAPER1 = (0.14165, 0.57122)
PAPER2 = (0.3485, 0.5258)


def f0_family(signs=F0_SIGNS) -> pcm.StateFamily:
    """States after one phase-kickback query of each candidate f0."""
    return pcm.StateFamily(tuple(phase_state(f) for f in S_F0), tuple(signs))


def machine_from_pair(g1: float, g2: float, signs=F0_SIGNS, tol: float = 1e-3) -> pcm.CloningMachine:
    """Machine with efficiency g1 on |h0010> and g2 on both |h0101>, |h1001>."""
    return pcm.CloningMachine(f0_family(signs), (g1, g2, g2), tol)


def fig3_pipeline(instance: TaskInstance, machine: pcm.CloningMachine) -> dict[tuple, float]:
    """Exact distribution over ``(flag, guess1, guess2)`` for one instance.

    Success: each branch holds a perfect copy of the f0 query state, queries
    its own f_i by phase kickback and is measured in the S2 phase basis.
    Failure: assume f0 = h0010, run the Fig. 2 circuit on f1 and f2 and
    measure in the S1 phase basis.
    """
    idx = S_F0.index(instance.f0)
    outcome = pcm.simulate_prob_clone(machine, idx)
    dist: dict[tuple, float] = {}

    def add(flag, g1, g2, p):
        if p > 0.0:
            key = (flag, g1, g2)
            dist[key] = dist.get(key, 0.0) + p

    if outcome.success > 0.0:
        clone = machine.family.states[idx]
        zero = h("0000")
        b1 = _branch_guesses(_kickback(clone, instance.f1), S2_BASIS, zero)
        b2 = _branch_guesses(_kickback(clone, instance.f2), S2_BASIS, zero)
        for (c1, p1), (c2, p2) in itertools.product(b1.items(), b2.items()):
            add(True, c1, c2, outcome.success * p1 * p2)
    if outcome.failure > 0.0:
        guess_f0 = h("0010")
        b1 = _branch_guesses(fig2_circuit(instance.f1), S1_BASIS, guess_f0)
        b2 = _branch_guesses(fig2_circuit(instance.f2), S1_BASIS, guess_f0)
        for (c1, p1), (c2, p2) in itertools.product(b1.items(), b2.items()):
            add(False, c1, c2, outcome.failure * p1 * p2)
    return dist


def no_cloning_distribution(instance: TaskInstance) -> dict[tuple, float]:
    """Exact distribution over ``(guess1, guess2)`` for the no-cloning strategy.

    One classical call f0(00) separates h0101 (0) from h1001 (1); f1 and f2
    are assumed to lie in S2 and measured in the S2 phase basis.
    """
    assumed = h("0101") if instance.f0(0) == 0 else h("1001")
    b1 = _branch_guesses(fig2_circuit(instance.f1), S2_BASIS, assumed)
    b2 = _branch_guesses(fig2_circuit(instance.f2), S2_BASIS, assumed)
    return {(c1, c2): p1 * p2 for (c1, p1), (c2, p2) in itertools.product(b1.items(), b2.items())}


def _correct_mass(dist: dict[tuple, float], answer: tuple[str, str]) -> float:
    return sum(p for key, p in dist.items() if key[-2:] == answer)


def strategy_no_cloning(instances=None) -> float:
    instances = enumerate_instances() if instances is None else instances
    return sum(float(i.weight) * _correct_mass(no_cloning_distribution(i), i.answer) for i in instances)


def strategy_cloning(machine: pcm.CloningMachine, instances=None) -> float:
    instances = enumerate_instances() if instances is None else instances
    return sum(float(i.weight) * _correct_mass(fig3_pipeline(i, machine), i.answer) for i in instances)


def success_given(instances, condition) -> float:
    """Success probability of the no-cloning strategy conditioned on a predicate."""
    sel = [i for i in instances if condition(i)]
    total = sum(float(i.weight) for i in sel)
    return sum(float(i.weight) * _correct_mass(no_cloning_distribution(i), i.answer) for i in sel) / total


def p_success(gammas) -> float:
    return float(np.mean(gammas))


def p0010(gammas) -> float:
    """Posterior of f0 = h0010 after a failed clone (uniform prior)."""
    fail = 1.0 - np.asarray(gammas, dtype=float)
    if fail.sum() <= 0.0:
        return float("nan")
    return float(fail[0] / fail.sum())


def p2_closed_form(gammas) -> float:
    """``ps + (1 - ps) [p0010 + (1 - p0010)/16]`` for efficiencies over S_f0."""
    ps = p_success(gammas)
    if ps >= 1.0:
        return 1.0
    q = p0010(gammas)
    return ps + (1.0 - ps) * (q + (1.0 - q) / 16.0)


def guaranteed_fractions(machine: pcm.CloningMachine) -> tuple[float, float]:
    """Flag-certified success fraction of the machine, and the no-cloning bound."""
    return machine.average_success(), no_cloning_guarantee_bound().value


@lru_cache(maxsize=1)
def no_cloning_guarantee_bound() -> pcm.OptimizationResult:
    """Best average efficiency of unambiguously identifying f0 from one query."""
    return pcm.optimize_efficiencies(
        f0_family(), lambda g: float(np.mean(g)), symmetry=[[0], [1, 2]], mode="identification"
    )


def optimize_machine(objective: str = "p2") -> pcm.OptimizationResult:
    """Search for the machine maximizing ``p2`` or the flag fraction ``flag``."""
    objectives = {"p2": p2_closed_form, "flag": p_success}
    if objective not in objectives:
        raise ValueError(f"unknown objective {objective!r}; choose from {sorted(objectives)}")
    return pcm.optimize_efficiencies(
        f0_family(), objectives[objective], symmetry=[[0], [1, 2]], mode="cloning"
    )


# --- Monte Carlo ----------------------------------------------------------

def _sample_shard(args) -> tuple[int, int, int]:
    """Sample instances and measurement outcomes; count successes per strategy."""
    gammas, seed, shard, n = args
    machine = machine_from_pair(gammas[0], gammas[1])
    rng = RandomSource(seed, shard)
    tables = []
    for f0 in S_F0:
        partners = allowed_partners(f0)
        rows = []
        for f1, f2 in itertools.product(partners, repeat=2):
            inst = TaskInstance(f0, f1, f2)
            rows.append((inst, _cdf(fig3_pipeline(inst, machine)), _cdf(no_cloning_distribution(inst))))
        tables.append((partners, rows))

    wins1 = wins2 = 0
    u = rng.uniform((n, 5))
    for row in u:
        partners, rows = tables[min(int(row[0] * 3), 2)]
        k = len(partners)
        i1, i2 = min(int(row[1] * k), k - 1), min(int(row[2] * k), k - 1)
        inst, cdf2, cdf1 = rows[i1 * k + i2]
        wins1 += _draw(cdf1, row[3])[-2:] == inst.answer
        wins2 += _draw(cdf2, row[4])[-2:] == inst.answer
    return n, wins1, wins2


def _cdf(dist: dict) -> tuple[list, np.ndarray]:
    keys = sorted(dist, key=repr)
    return keys, np.cumsum([dist[k] for k in keys])


def _draw(cdf, u: float):
    keys, cum = cdf
    return keys[min(int(np.searchsorted(cum, u * cum[-1], side="right")), len(keys) - 1)]


def _shards(samples: int, jobs: int) -> list[int]:
    base, extra = divmod(samples, jobs)
    return [base + (s < extra) for s in range(jobs)]


def monte_carlo(gammas=PAPER1, samples: int = 10**5, seed: int = 0, jobs: int = 1) -> dict:
    """Empirical p1, p2 with standard errors; deterministic for fixed (seed, jobs)."""
    if samples < 1 or jobs < 1:
        raise ValueError("samples and jobs must be positive")
    tasks = [(tuple(gammas), seed, s, n) for s, n in enumerate(_shards(samples, jobs))]
    if jobs == 1:
        results = [_sample_shard(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sample_shard, tasks))
    n = sum(r[0] for r in results)
    out = {}
    for key, wins in (("p1", sum(r[1] for r in results)), ("p2", sum(r[2] for r in results))):
        mean = wins / n
        out[f"mc_{key}"] = mean
        out[f"mc_{key}_stderr"] = float(np.sqrt(mean * (1 - mean) / n))
    return out


# --- report ---------------------------------------------------------------

@dataclass
class Task2Report:
    p1: float
    p2: float
    p_success: float
    p0010: float
    guaranteed_cloning: float
    guaranteed_no_cloning: float
    machine: pcm.CloningMachine
    empirical: dict = field(default_factory=dict)

    def analytic(self) -> dict:
        return {
            "p1": self.p1,
            "p2": self.p2,
            "p_success": self.p_success,
            "p0010": self.p0010,
            "guaranteed_cloning": self.guaranteed_cloning,
            "guaranteed_no_cloning": self.guaranteed_no_cloning,
        }


def run_example2(machine: pcm.CloningMachine, samples: int = 0, seed: int = 0, jobs: int = 1) -> Task2Report:
    g = machine.gammas
    cloning_frac, bound = guaranteed_fractions(machine)
    report = Task2Report(
        p1=strategy_no_cloning(),
        p2=strategy_cloning(machine),
        p_success=p_success(g),
        p0010=p0010(g),
        guaranteed_cloning=cloning_frac,
        guaranteed_no_cloning=bound,
        machine=machine,
    )
    if samples:
        if g[1] != g[2]:
            raise ValueError("Monte Carlo mode expects a machine with equal efficiencies on h0101, h1001")
        report.empirical = monte_carlo((g[0], g[1]), samples, seed, jobs)
    return report
