"""Middle-node bounds per family and the scalar-vs-vector field-size gap."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import asdict, dataclass
from typing import Iterator

from netgap.algebra import prime_power
from netgap.coding import (mds_regime, solve_tilde, tilde_vector_code, vector_solve_combination,
                           verify_solution, verify_star_instance)
from netgap.network import combination_network, tilde_network
from netgap.subspace import q_binomial

FAMILIES = ("combination", "star", "plus", "tilde")


def prime_powers(start: int = 2) -> Iterator[int]:
    for n in itertools.count(start):
        if prime_power(n):
            yield n


def scalar_bound(family: str, qs: int, *, h: int | None = None, ell: int = 2) -> int | None:
    """Largest r with a scalar solution over F_qs (None: no closed form)."""
    if family == "combination":
        if h is None:
            raise ValueError("combination bound needs h")
        r = qs + 1
        if mds_regime(h, qs + 2, qs):
            r = qs + 2
        return r
    if family == "star":
        if ell != 2:
            return None
        return (qs**2 + 1) * (qs**2 + qs + 1)
    if family == "plus":
        return q_binomial(2 * ell, ell, qs)
    if family == "tilde":
        return 2 * (qs**2 + qs + 1)
    raise ValueError(f"unknown family {family!r}")


def max_middle_nodes(family: str, scheme: str, *, q: int, t: int = 1, h: int | None = None,
                     ell: int = 2) -> int:
    """Closed-form middle-layer bound for a (family, scheme) pair.

    For the vector tilde network there is no closed form; the size of the
    searched triple-span code is returned.
    """
    if scheme == "scalar":
        b = scalar_bound(family, q, h=h, ell=ell)
        if b is None:
            raise ValueError(f"no closed-form scalar bound for {family} with ell={ell}")
        return b
    if scheme != "vector":
        raise ValueError(f"unknown scheme {scheme!r}")
    if family == "combination":
        return q**t + 1
    if family == "star":
        return q ** (ell * t * t + ell * t)
    if family == "plus":
        return q ** (ell * (ell - 1) * t * t + ell * t)
    if family == "tilde":
        return _tilde_search_size(q, t)
    raise ValueError(f"unknown family {family!r}")


@functools.lru_cache(maxsize=None)
def _tilde_search_size(q: int, t: int) -> int:
    return len(tilde_vector_code(q, t, q_binomial(3 * t, t, q)))


def min_scalar_field_size(family: str, r: int, *, h: int | None = None, ell: int = 2) -> int:
    """Smallest prime power whose scalar bound admits r middle nodes."""
    if r < 1:
        raise ValueError("r must be >= 1")
    for qs in prime_powers():
        b = scalar_bound(family, qs, h=h, ell=ell)
        if b is None:
            raise ValueError(f"no closed-form scalar bound for {family} with ell={ell}")
        if b >= r:
            return qs
    raise AssertionError("unreachable")  # pragma: no cover


def previous_prime_power(q: int) -> int | None:
    for n in range(q - 1, 1, -1):
        if prime_power(n):
            return n
    return None


def leading_exponent(family: str, t: int, ell: int = 2) -> float | None:
    """Leading term of the gap exponent in t, where one is known."""
    if family == "star":
        return t * t / 2
    if family == "plus":
        return (ell - 1) * t * t / ell
    return None


@dataclass
class GapReport:
    family: str
    h: int
    ell: int | None
    q: int
    t: int
    r: int
    scalar_q: int
    scalar_bound: int
    previous_q: int | None
    previous_bound: int | None
    vector_q: int
    vector_verified: bool
    verification: dict
    ratio: float
    exponent: float
    ratio_vs_qt: float
    leading_exponent: float | None
    residual: float | None

    def to_dict(self) -> dict:
        return asdict(self)

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("family", self.family), ("h", str(self.h)), ("ell", str(self.ell)),
            ("q", str(self.q)), ("t", str(self.t)), ("r", str(self.r)),
            ("min scalar q_s", str(self.scalar_q)),
            ("bound at q_s", str(self.scalar_bound)),
            ("previous prime power", str(self.previous_q)),
            ("bound at previous", str(self.previous_bound)),
            ("vector alphabet q", str(self.vector_q)),
            ("vector verified", str(self.vector_verified)),
            ("ratio q_s/q", f"{self.ratio:g}"),
            ("exponent log_q(q_s/q)", f"{self.exponent:.6g}"),
            ("ratio q_s/q^t", f"{self.ratio_vs_qt:g}"),
            ("leading exponent", "n/a" if self.leading_exponent is None
             else f"{self.leading_exponent:g}"),
            ("residual", "n/a" if self.residual is None else f"{self.residual:.6g}"),
        ]


def _family_h(family: str, h: int | None, ell: int) -> int:
    if family in ("star", "plus"):
        return 2 * ell
    if family == "tilde":
        return 3
    if h is None:
        raise ValueError("combination family needs h")
    return h


def gap_report(family: str, *, q: int, t: int, ell: int = 2, h: int | None = None,
               r: int | None = None, sample_cap: int = 2000, seed: int = 0,
               exhaustive: bool = False, workers: int | None = 1) -> GapReport:
    h = _family_h(family, h, ell)
    bound = max_middle_nodes(family, "vector", q=q, t=t, h=h, ell=ell)
    r = bound if r is None else r
    if r > bound:
        raise ValueError(f"r={r} exceeds the vector bound {bound}")
    if family in ("star", "plus"):
        rep = verify_star_instance(ell, q, t, r, family, samples=sample_cap, seed=seed,
                                   exhaustive=exhaustive, workers=workers)
    elif family == "combination":
        rep = verify_solution(combination_network(h, r, h), vector_solve_combination(h, q, t, r),
                              workers)
    else:
        rep = verify_solution(tilde_network(r), solve_tilde(r, {"vector": {"q": q, "t": t}}),
                              workers)
    if not rep.solved:
        raise ValueError(f"vector instance failed verification ({rep.failed} receivers)")
    qs = min_scalar_field_size(family, r, h=h, ell=ell)
    prev = previous_prime_power(qs)
    ratio = qs / q
    exponent = math.log(ratio, q)
    lead = leading_exponent(family, t, ell)
    summary = {"mode": rep.mode, "checked": rep.checked, "passed": rep.passed,
               "total_receivers": rep.total_receivers or rep.checked}
    return GapReport(
        family=family, h=h, ell=ell if family in ("star", "plus") else None, q=q, t=t, r=r,
        scalar_q=qs, scalar_bound=scalar_bound(family, qs, h=h, ell=ell),
        previous_q=prev,
        previous_bound=scalar_bound(family, prev, h=h, ell=ell) if prev else None,
        vector_q=q, vector_verified=rep.solved, verification=summary,
        ratio=ratio, exponent=exponent, ratio_vs_qt=qs / q**t,
        leading_exponent=lead, residual=None if lead is None else exponent - lead,
    )
