"""Parameter schedules for the iterative packing drivers.

Each deletion round degrades the uniformity parameters; the schedules track
that drift analytically.  Starting from (eps_0, p_0) = (eps, p):

    digraph:  eps_{t+1} = eps_t (1 + 4.23 eps_t^2 / (10^5 ln n))
              p_{t+1}   = p_t   (1 -      eps_t^2 / (10^5 ln n))
              stop at the least T with p_T <= (1/8) eps^{1/8} p

    3-graph:  eps_{t+1} = eps_t (1 + 6.6 eps_t^2 / (10^6 ln n))
              p_{t+1}   = p_t   (1 -     eps_t^2 / (10^6 ln n))
              stop at the least T with p_T <= (1/2) eps^{1/15} p

T can reach hundreds of millions for small eps, so the sequences are not
stored; the stop index and the terms around it come from a compiled scan,
and any prefix can be regenerated on demand with the identical float
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

DIGRAPH_DRIFT = 4.23
DIGRAPH_DENOM_SCALE = 1e5
DIGRAPH_STOP_FACTOR = 1.0 / 8.0
DIGRAPH_STOP_EXPONENT = 1.0 / 8.0

HYPER_DRIFT = 6.6
HYPER_DENOM_SCALE = 1e6
HYPER_STOP_FACTOR = 1.0 / 2.0
HYPER_STOP_EXPONENT = 1.0 / 15.0


@dataclass(frozen=True)
class Schedule:
    """Resolved schedule: stop index, boundary terms, and per-step formulas.

    eps_prev/p_prev are the terms at index T-1 (None when T = 0).
    eps_bound is the a-priori cap on eps_{T-1}: the drift compounds to at
    most eps * (1 / (stop_factor * eps^stop_exponent))^drift before the
    stop rule fires.
    """

    kind: str
    n: int
    eps0: float
    p0: float
    drift: float
    denom: float
    p_stop: float
    T: int
    eps_prev: float | None
    p_prev: float | None
    eps_final: float
    p_final: float
    eps_bound: float

    def terms(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """First ``count`` terms of (eps_t, p_t), starting at t = 0.

        Regenerated with the same float expressions as the stop-index scan,
        so terms(T + 1)[-1] equals (eps_final, p_final) exactly.
        """
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        eps = np.empty(count, dtype=np.float64)
        ps = np.empty(count, dtype=np.float64)
        e = self.eps0
        p = self.p0
        for t in range(count):
            eps[t] = e
            ps[t] = p
            e, p = self._step(e, p)
        return eps, ps

    def _step(self, e: float, p: float) -> tuple[float, float]:
        return (
            e * (1.0 + self.drift * e * e / self.denom),
            p * (1.0 - e * e / self.denom),
        )

    def kappa(self, eps_t: float) -> float:
        """Target cover multiplicity at uniformity eps_t."""
        return self.denom / (eps_t * eps_t)

    def r(self, eps_t: float, p_t: float) -> float:
        """Constructions per round at (eps_t, p_t)."""
        k = self.kappa(eps_t)
        if self.kind == "digraph":
            return 2.0 * k / p_t
        return k * self.n / (3.0 * p_t)

    @property
    def eps_bound_ok(self) -> bool:
        """Whether eps_{T-1} (when defined) respects the a-priori cap."""
        if self.eps_prev is None:
            return True
        return self.eps_prev <= self.eps_bound

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "eps0": self.eps0,
            "p0": self.p0,
            "p_stop": self.p_stop,
            "T": self.T,
            "eps_prev": self.eps_prev,
            "p_prev": self.p_prev,
            "eps_final": self.eps_final,
            "p_final": self.p_final,
            "eps_bound": self.eps_bound,
            "eps_bound_ok": self.eps_bound_ok,
        }


def _resolve(
    kind: str,
    n: int,
    eps: float,
    p: float,
    drift: float,
    denom_scale: float,
    stop_factor: float,
    stop_exponent: float,
) -> Schedule:
    eps = float(eps)
    p = float(p)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    denom = denom_scale * math.log(n)
    p_stop = stop_factor * eps**stop_exponent * p
    # p shrinks by at least (1 - eps^2/denom) per step, so this bounds T.
    max_steps = int(denom * math.log(p / p_stop) / (eps * eps) * 1.05) + 16
    T, eps_prev, p_prev, eps_final, p_final = kernels.schedule_scan(
        eps, p, drift, denom, p_stop, max_steps
    )
    eps_bound = eps * (1.0 / (stop_factor * eps**stop_exponent)) ** drift
    return Schedule(
        kind=kind,
        n=n,
        eps0=eps,
        p0=p,
        drift=drift,
        denom=denom,
        p_stop=p_stop,
        T=T,
        eps_prev=None if T == 0 else eps_prev,
        p_prev=None if T == 0 else p_prev,
        eps_final=eps_final,
        p_final=p_final,
        eps_bound=eps_bound,
    )


def digraph_schedule(n: int, eps: float, p: float) -> Schedule:
    """Schedule for packing directed Hamilton cycles in an (eps, p)-uniform digraph."""
    return _resolve(
        "digraph",
        n,
        eps,
        p,
        DIGRAPH_DRIFT,
        DIGRAPH_DENOM_SCALE,
        DIGRAPH_STOP_FACTOR,
        DIGRAPH_STOP_EXPONENT,
    )


def hyper_schedule(n: int, eps: float, p: float) -> Schedule:
    """Schedule for packing tight Hamilton cycles in an (eps, p)-uniform 3-graph."""
    return _resolve(
        "3graph",
        n,
        eps,
        p,
        HYPER_DRIFT,
        HYPER_DENOM_SCALE,
        HYPER_STOP_FACTOR,
        HYPER_STOP_EXPONENT,
    )
