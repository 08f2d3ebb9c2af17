"""Network description: node capacities, traffic classes, routes, derived loads."""

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.special import zeta


class _EntrySentinel:
    """Marker returned by ``NetworkSpec.upstream`` at a route's first node."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ENTRY"


#: Distinguished "no upstream node" value (deliberately not a node index).
ENTRY = _EntrySentinel()


@dataclass(frozen=True)
class DurationLaw:
    """Discrete session-duration law with survival P{tau >= k} = min(1, alpha * k**-(1+beta)).

    ``alpha`` controls the tail weight and ``beta`` the decay: large durations
    obey P{tau >= k} = alpha * k**-(1+beta). Sampled durations are clamped to
    at least one slot, so for alpha < 1 the realized mean exceeds
    :func:`mean_duration` (which sums the unclamped survival) by 1 - alpha.

    ``light_tailed`` marks a class whose durations should be treated as
    decaying faster than any power law when computing decay exponents; such a
    class still loads the network through its mean rate. A light-tailed class
    may omit ``beta`` (set it to None), in which case it cannot be simulated
    or averaged, only carried through exponent analysis.
    """

    alpha: float
    beta: float | None
    light_tailed: bool = False

    def survival(self, k: int) -> float:
        """P{tau >= k} for integer k >= 1."""
        if k < 1:
            raise ValueError(f"survival defined for k >= 1, got {k}")
        if self.beta is None:
            raise ValueError("duration law has no beta; survival is undefined")
        return min(1.0, self.alpha * float(k) ** -(1.0 + self.beta))


@dataclass(frozen=True)
class TrafficClass:
    """One traffic type: Poisson session arrivals on a fixed loop-free route.

    ``arrival_rate`` is the Poisson rate (sessions per slot), ``rate`` the
    transmission rate of one active session (bits per slot), ``route`` the
    ordered node indices the fluid traverses.
    """

    arrival_rate: float
    rate: float
    duration: DurationLaw
    route: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "route", tuple(int(m) for m in self.route))


@dataclass(frozen=True)
class NetworkSpec:
    """Capacities plus traffic classes; class identity is list position."""

    capacities: tuple[float, ...]
    classes: tuple[TrafficClass, ...]

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(float(c) for c in self.capacities))
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def num_nodes(self) -> int:
        return len(self.capacities)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def classes_at_node(self, m: int) -> frozenset:
        """Indices of the classes whose route visits node ``m``."""
        return frozenset(n for n, cls in enumerate(self.classes) if m in cls.route)

    def upstream(self, n: int, m: int):
        """Route predecessor of node ``m`` for class ``n``, or ENTRY at the first hop."""
        route = self.classes[n].route
        try:
            i = route.index(m)
        except ValueError:
            raise ValueError(f"class {n} does not visit node {m}") from None
        return ENTRY if i == 0 else route[i - 1]

    def class_load(self, n: int) -> float:
        """Mean offered load rho of class ``n`` (arrival rate x rate x mean duration)."""
        cls = self.classes[n]
        return cls.arrival_rate * cls.rate * mean_duration(cls.duration)

    def node_load(self, m: int) -> float:
        """Sum of mean loads of the classes visiting node ``m``."""
        return sum(self.class_load(n) for n in self.classes_at_node(m))


@lru_cache(maxsize=4096)
def mean_duration(law: DurationLaw) -> float:
    """Mean of the duration law, E[tau] = sum_{k>=1} min(1, alpha * k**-(1+beta)).

    The sum splits at the largest k0 with alpha * k0**-(1+beta) >= 1 into
    k0 flat terms plus an exact Hurwitz-zeta tail, so the result is accurate
    to machine precision for any beta > 0.
    """
    if law.beta is None:
        raise ValueError("light-tailed law without beta has no computable mean")
    if law.alpha <= 0 or law.beta <= 0:
        raise ValueError(f"duration law needs alpha > 0 and beta > 0, got alpha={law.alpha}, beta={law.beta}")
    s = 1.0 + law.beta
    # k0 = #{k >= 1 : alpha * k**-s >= 1}; float pow is inexact at the boundary
    k0 = max(0, math.floor(law.alpha ** (1.0 / s)))
    while (k0 + 1) ** s <= law.alpha:
        k0 += 1
    while k0 >= 1 and k0**s > law.alpha:
        k0 -= 1
    return k0 + law.alpha * float(zeta(s, k0 + 1))


@dataclass(frozen=True)
class ValidationIssue:
    where: str
    problem: str

    def __str__(self):
        return f"{self.where}: {self.problem}"


@dataclass(frozen=True)
class ValidationReport:
    """All violated invariants of a NetworkSpec, plus the per-node load table."""

    issues: tuple[ValidationIssue, ...]
    #: offered load per node; None where a contributing class was itself invalid
    node_loads: tuple

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self):
        if self.ok:
            return "valid"
        return "; ".join(str(i) for i in self.issues)


def validate(spec: NetworkSpec) -> ValidationReport:
    """Check every model invariant, collecting all violations instead of failing fast.

    Reported problems: non-positive capacities or class parameters, malformed
    duration laws, empty routes, unknown node ids, routes revisiting a node,
    and per-node instability (offered load >= capacity).
    """
    issues = []
    M = spec.num_nodes

    for m, c in enumerate(spec.capacities):
        if not (c > 0) or not math.isfinite(c):
            issues.append(ValidationIssue(f"node {m}", f"capacity must be positive and finite, got {c}"))

    loads = {}
    for n, cls in enumerate(spec.classes):
        where = f"class {n}"
        bad = False
        if not (cls.arrival_rate > 0) or not math.isfinite(cls.arrival_rate):
            issues.append(ValidationIssue(where, f"lambda must be positive, got {cls.arrival_rate}"))
            bad = True
        if not (cls.rate > 0) or not math.isfinite(cls.rate):
            issues.append(ValidationIssue(where, f"rate must be positive, got {cls.rate}"))
            bad = True
        law = cls.duration
        if not (law.alpha > 0):
            issues.append(ValidationIssue(where, f"alpha must be positive, got {law.alpha}"))
            bad = True
        if law.beta is None:
            if not law.light_tailed:
                issues.append(ValidationIssue(where, "beta may be omitted only for light-tailed classes"))
            bad = True  # no computable mean either way
        elif not (law.beta > 0):
            issues.append(ValidationIssue(where, f"beta must be positive, got {law.beta}"))
            bad = True
        if not cls.route:
            issues.append(ValidationIssue(where, "route is empty"))
        else:
            unknown = [m for m in cls.route if not 0 <= m < M]
            for i, m in enumerate(cls.route):
                if not 0 <= m < M:
                    issues.append(ValidationIssue(where, f"route[{i}] references unknown node {m}"))
            if len(set(cls.route)) != len(cls.route) and not unknown:
                issues.append(ValidationIssue(where, f"route revisits a node: {list(cls.route)}"))
        if not bad:
            try:
                loads[n] = cls.arrival_rate * cls.rate * mean_duration(law)
            except ValueError as exc:
                issues.append(ValidationIssue(where, str(exc)))

    node_loads = []
    for m in range(M):
        members = spec.classes_at_node(m)
        if all(n in loads for n in members):
            total = sum(loads[n] for n in members)
            node_loads.append(total)
            if total >= spec.capacities[m] > 0:
                issues.append(
                    ValidationIssue(
                        f"node {m}",
                        f"unstable: offered load {total:.6g} >= capacity {spec.capacities[m]:.6g}",
                    )
                )
        else:
            node_loads.append(None)

    return ValidationReport(issues=tuple(issues), node_loads=tuple(node_loads))
