"""Pseudo-boolean constraint models and their exhaustive enumeration."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import _kernel as K

log = logging.getLogger(__name__)

RELATIONS = ("<=", ">=", "=")

_INF = 1 << 62


class Capture(enum.Enum):
    NONE = "none"
    FIRST_K = "first-k"
    ALL = "all"


@dataclass(frozen=True)
class CspVariable:
    id: int
    domain: tuple
    label: object = None


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple  # of (coefficient, variable id)
    relation: str
    bound: int
    tag: object = field(default=None, compare=False)

    def holds(self, assignment) -> bool:
        total = sum(a * assignment[v] for a, v in self.terms)
        if self.relation == "<=":
            return total <= self.bound
        if self.relation == ">=":
            return total >= self.bound
        return total == self.bound

    def __str__(self) -> str:
        lhs = " ".join(f"{'+' if a >= 0 else '-'}{abs(a)}*x{v}" for a, v in self.terms)
        return f"{lhs} {self.relation} {self.bound}"


@dataclass(frozen=True)
class SolveLimits:
    """Resource limits for :meth:`Model.enumerate`.

    ``capture_k`` applies to ``Capture.FIRST_K``; ``sample_every`` keeps only
    every n-th solution for capture and visitors (counting is unaffected).
    """

    max_solutions: Optional[int] = None
    time_budget: Optional[float] = None
    capture: Capture = Capture.NONE
    capture_k: int = 0
    sample_every: int = 1

    def __post_init__(self):
        if self.max_solutions is not None and self.max_solutions < 0:
            raise ValueError("max_solutions must be non-negative")
        if self.time_budget is not None and self.time_budget < 0:
            raise ValueError("time_budget must be non-negative")
        if self.capture_k < 0 or self.sample_every < 1:
            raise ValueError("capture_k must be >= 0 and sample_every >= 1")


@dataclass
class EnumerationResult:
    solution_count: int
    captured: list
    exhausted: bool
    elapsed: float
    first_solution_latency: Optional[float] = None
    nodes: int = 0


@dataclass(frozen=True)
class Propagation:
    """Outcome of propagating a partial assignment."""

    values: tuple  # 0/1 or None per variable
    conflict: Optional[int] = None  # violated constraint id, or -1 for a clash with the partial

    @property
    def ok(self) -> bool:
        return self.conflict is None


class Model:
    """A set of 0/1 variables and linear constraints over them."""

    def __init__(self):
        self.variables: list[CspVariable] = []
        self.constraints: list[LinearConstraint] = []
        self._contradiction: Optional[str] = None
        self._arrays = None

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @property
    def contradiction(self) -> Optional[str]:
        return self._contradiction

    def add_variable(self, domain: Sequence[int] = (0, 1), label=None) -> int:
        domain = tuple(sorted(set(domain)))
        if not domain:
            raise ValueError("variable domain must be non-empty")
        if any(d not in (0, 1) for d in domain):
            raise ValueError(f"only 0/1 domains are supported, got {domain}")
        vid = len(self.variables)
        self.variables.append(CspVariable(vid, domain, label))
        self._arrays = None
        return vid

    def add_linear(self, terms, relation: str, bound: int, tag=None) -> int:
        """Record ``sum(coef * x[var]) <relation> bound``; returns the constraint id.

        Terms on the same variable are merged; a term list that cancels to
        nothing is rejected like an empty one.
        """
        if relation not in RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        merged: dict[int, int] = {}
        n = len(self.variables)
        for coef, var in terms:
            if not isinstance(var, (int, np.integer)) or not 0 <= var < n:
                raise KeyError(f"unknown variable id {var!r}")
            merged[int(var)] = merged.get(int(var), 0) + int(coef)
        items = tuple((a, v) for v, a in merged.items() if a != 0)
        if not items:
            raise ValueError("a linear constraint needs at least one non-zero term")
        self.constraints.append(LinearConstraint(items, relation, int(bound), tag))
        self._arrays = None
        return len(self.constraints) - 1

    def add_contradiction(self, reason: str):
        """Mark the model unsatisfiable (e.g. a constant predicate that is false)."""
        self._contradiction = self._contradiction or reason

    # -- compiled form -----------------------------------------------------

    def _compile(self):
        if self._arrays is not None:
            return self._arrays
        n = len(self.variables)
        m = len(self.constraints)
        lens = np.fromiter((len(c.terms) for c in self.constraints), dtype=np.int64, count=m)
        con_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(lens, out=con_ptr[1:])
        nnz = int(con_ptr[-1])
        con_var = np.empty(nnz, dtype=np.int64)
        con_coef = np.empty(nnz, dtype=np.int64)
        lo = np.empty(m, dtype=np.int64)
        hi = np.empty(m, dtype=np.int64)
        amax = np.zeros(m, dtype=np.int64)
        k = 0
        for ci, c in enumerate(self.constraints):
            for a, v in c.terms:
                con_var[k] = v
                con_coef[k] = a
                k += 1
            lo[ci] = c.bound if c.relation in (">=", "=") else -_INF
            hi[ci] = c.bound if c.relation in ("<=", "=") else _INF
        if nnz:
            absc = np.abs(con_coef)
            amax[lens > 0] = np.maximum.reduceat(absc, con_ptr[:-1][lens > 0])
        order = np.argsort(con_var, kind="stable")
        var_con = np.repeat(np.arange(m, dtype=np.int64), lens)[order]
        var_coef = con_coef[order]
        counts = np.bincount(con_var, minlength=n) if nnz else np.zeros(n, dtype=np.int64)
        var_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=var_ptr[1:])
        fixed = np.full(n, -1, dtype=np.int8)
        for var in self.variables:
            if len(var.domain) == 1:
                fixed[var.id] = var.domain[0]
        self._arrays = dict(
            fixed=fixed, lo=lo, hi=hi, amax=amax, con_ptr=con_ptr, con_var=con_var,
            con_coef=con_coef, var_ptr=var_ptr, var_con=var_con, var_coef=var_coef,
        )
        return self._arrays

    def _state(self):
        a = self._compile()
        n = len(self.variables)
        m = len(self.constraints)
        return dict(
            val=np.full(n, -1, dtype=np.int8),
            cmin=np.zeros(m, dtype=np.int64),
            cmax=np.zeros(m, dtype=np.int64),
            trail=np.zeros(max(n, 1), dtype=np.int64),
            queue=np.zeros(m, dtype=np.int64),
            inq=np.zeros(m, dtype=np.bool_),
            st=np.zeros(K.N_SCALARS, dtype=np.int64),
        ), a

    # -- operations --------------------------------------------------------

    def propagate(self, partial=None) -> Propagation:
        """Bounds-propagate ``partial`` (mapping var id -> 0/1) to a fixpoint."""
        n = len(self.variables)
        pv = np.full(n, -1, dtype=np.int8)
        for v, x in (partial or {}).items():
            if not 0 <= v < n:
                raise KeyError(f"unknown variable id {v!r}")
            pv[v] = x
        if self._contradiction:
            return Propagation(tuple(None if x < 0 else int(x) for x in pv), -1)
        s, a = self._state()
        code = K.propagate_partial(
            pv, a["fixed"], s["val"], s["cmin"], s["cmax"], a["lo"], a["hi"], a["amax"],
            a["con_ptr"], a["con_var"], a["con_coef"], a["var_ptr"], a["var_con"], a["var_coef"],
            s["trail"], s["queue"], s["inq"], s["st"],
        )
        values = tuple(None if x < 0 else int(x) for x in s["val"])
        if code == -1:
            return Propagation(values)
        return Propagation(values, int(code) if code >= 0 else -1)

    def search(self, limits: SolveLimits | None = None, emit: bool = True) -> "Search":
        return Search(self, limits or SolveLimits(), emit)

    def solutions(self, limits: SolveLimits | None = None) -> Iterator[np.ndarray]:
        """Yield solutions (int8 arrays) in lexicographic order."""
        yield from self.search(limits, emit=True)

    def enumerate(self, limits: SolveLimits | None = None,
                  visitor: Callable[[np.ndarray], None] | None = None) -> EnumerationResult:
        """Depth-first enumeration honouring ``limits``.

        ``visitor`` is called once per (sampled) solution in enumeration order.
        """
        limits = limits or SolveLimits()
        need_rows = visitor is not None or limits.capture is not Capture.NONE
        search = self.search(limits, emit=need_rows)
        captured = []
        for row in search:
            if visitor is not None:
                visitor(row)
            if limits.capture is Capture.ALL or (
                limits.capture is Capture.FIRST_K and len(captured) < limits.capture_k
            ):
                captured.append(row)
        return search.result(captured)

    def count_exact(self) -> int:
        return self.enumerate().solution_count

    def evaluate(self, assignment) -> bool:
        """Check a full assignment directly against every constraint."""
        if self._contradiction:
            return False
        return all(c.holds(assignment) for c in self.constraints)

    def dump(self) -> str:
        """Debug text form: one line per variable, then one per constraint."""
        lines = [f"vars {len(self.variables)} cons {len(self.constraints)}"]
        for var in self.variables:
            dom = ",".join(map(str, var.domain))
            lines.append(f"v{var.id} {{{dom}}} {_label_text(var.label)}")
        for i, c in enumerate(self.constraints):
            lines.append(f"c{i} {c}")
        if self._contradiction:
            lines.append(f"false {self._contradiction}")
        return "\n".join(lines) + "\n"


def _label_text(label) -> str:
    if label is None:
        return "-"
    if isinstance(label, tuple):
        return " ".join(str(x) for x in label)
    return str(label)


class Search:
    """A resumable enumeration; iterate it for solutions, then call :meth:`result`."""

    NODE_CHUNK = 1 << 22

    def __init__(self, model: Model, limits: SolveLimits, emit: bool):
        self.model = model
        self.limits = limits
        self.emit = emit
        n = model.num_variables
        rows = max(1, min(4096, (1 << 22) // max(n, 1))) if emit else 1
        self.buf = np.zeros((rows, max(n, 1)), dtype=np.int8)
        self.dec_var = np.zeros(max(n, 1), dtype=np.int64)
        self.dec_val = np.zeros(max(n, 1), dtype=np.int8)
        self.dec_trail = np.zeros(max(n, 1), dtype=np.int64)
        self.state, self.arrays = model._state()
        self.started = None
        self.elapsed = 0.0
        self.first_latency = None
        self.exhausted = False
        self.limit_hit = False

    @property
    def count(self) -> int:
        return int(self.state["st"][K.COUNT])

    @property
    def nodes(self) -> int:
        return int(self.state["st"][K.NODES])

    def _step(self, node_budget: int, max_solutions: int, stop_at_first: bool) -> int:
        s, a = self.state, self.arrays
        return K.search(
            a["fixed"], s["val"], s["cmin"], s["cmax"], a["lo"], a["hi"], a["amax"],
            a["con_ptr"], a["con_var"], a["con_coef"], a["var_ptr"], a["var_con"], a["var_coef"],
            s["trail"], s["queue"], s["inq"], s["st"],
            self.dec_var, self.dec_val, self.dec_trail, self.buf, self.emit,
            self.limits.sample_every, node_budget, max_solutions, stop_at_first,
        )

    def __iter__(self) -> Iterator[np.ndarray]:
        limits = self.limits
        self.started = time.perf_counter()
        n = self.model.num_variables
        if self.model.contradiction or limits.max_solutions == 0:
            self.exhausted = self.model.contradiction is not None
            self.limit_hit = not self.exhausted
            self.elapsed = time.perf_counter() - self.started
            return
        max_solutions = limits.max_solutions or 0
        budget = self.NODE_CHUNK if limits.time_budget is not None else (1 << 62)
        try:
            yield from self._run(budget, max_solutions, n)
        finally:
            self.elapsed = time.perf_counter() - self.started

    def _run(self, budget: int, max_solutions: int, n: int):
        limits = self.limits
        while True:
            code = self._step(budget, max_solutions, self.first_latency is None)
            now = time.perf_counter()
            if self.first_latency is None and self.count > 0:
                self.first_latency = now - self.started
            emitted = int(self.state["st"][K.EMITTED])
            for i in range(emitted):
                yield self.buf[i, :n].copy()
            if code == K.R_EXHAUSTED:
                self.exhausted = True
                break
            if code == K.R_SOLUTION_LIMIT:
                self.limit_hit = True
                break
            if limits.time_budget is not None and now - self.started >= limits.time_budget:
                self.limit_hit = True
                break

    def result(self, captured=None) -> EnumerationResult:
        return EnumerationResult(
            solution_count=self.count,
            captured=list(captured or []),
            exhausted=self.exhausted,
            elapsed=self.elapsed,
            first_solution_latency=self.first_latency,
            nodes=self.nodes,
        )


def warm_up():
    """Load (or compile) the search kernel so later timings exclude it."""
    m = Model()
    a, b = m.add_variable(), m.add_variable()
    m.add_linear([(1, a), (1, b)], "<=", 1)
    m.propagate()
    return m.count_exact()
