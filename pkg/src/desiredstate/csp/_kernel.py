"""Compiled search kernel: bounds propagation and resumable depth-first search.

Constraints are stored as ``lo <= sum(coef * x) <= hi`` rows in CSR form,
with a transposed occurrence list per variable.  Every routine works on
flat numpy arrays so that numba can compile it; all mutable search state
lives in the arrays of a :class:`SearchState` so a search can stop and
resume between Python calls.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# indices into the scalar state vector
PHASE = 0
DEPTH = 1
TRAIL_LEN = 2
PTR = 3
NODES = 4
COUNT = 5
EMITTED = 6
QHEAD = 7
QTAIL = 8
QSIZE = 9
CONFLICT = 10
N_SCALARS = 11

# phases
P_INIT = 0
P_DESCEND = 1
P_BACKTRACK = 2
P_DONE = 3

# return codes
R_EXHAUSTED = 0
R_BUFFER_FULL = 1
R_NODE_BUDGET = 2
R_SOLUTION_LIMIT = 3
R_FIRST = 4


@njit(cache=True)
def _enqueue(c, queue, inq, st):
    if inq[c]:
        return
    inq[c] = True
    m = queue.shape[0]
    queue[st[QTAIL]] = c
    st[QTAIL] = (st[QTAIL] + 1) % m
    st[QSIZE] += 1


@njit(cache=True)
def _clear_queue(queue, inq, st):
    m = queue.shape[0]
    while st[QSIZE] > 0:
        inq[queue[st[QHEAD]]] = False
        st[QHEAD] = (st[QHEAD] + 1) % m
        st[QSIZE] -= 1


@njit(cache=True)
def _assign(v, x, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st):
    val[v] = x
    trail[st[TRAIL_LEN]] = v
    st[TRAIL_LEN] += 1
    for k in range(var_ptr[v], var_ptr[v + 1]):
        c = var_con[k]
        a = var_coef[k]
        if x == 1:
            if a > 0:
                cmin[c] += a
            else:
                cmax[c] += a
        else:
            if a > 0:
                cmax[c] -= a
            else:
                cmin[c] -= a
        _enqueue(c, queue, inq, st)


@njit(cache=True)
def _unassign_to(pos, val, cmin, cmax, var_ptr, var_con, var_coef, trail, st):
    while st[TRAIL_LEN] > pos:
        st[TRAIL_LEN] -= 1
        v = trail[st[TRAIL_LEN]]
        x = val[v]
        for k in range(var_ptr[v], var_ptr[v + 1]):
            c = var_con[k]
            a = var_coef[k]
            if x == 1:
                if a > 0:
                    cmin[c] -= a
                else:
                    cmax[c] -= a
            else:
                if a > 0:
                    cmax[c] += a
                else:
                    cmin[c] += a
        val[v] = -1


@njit(cache=True)
def _propagate(val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
               var_ptr, var_con, var_coef, trail, queue, inq, st):
    """Run bounds propagation to a fixpoint. Returns False on conflict."""
    m = queue.shape[0]
    while st[QSIZE] > 0:
        c = queue[st[QHEAD]]
        st[QHEAD] = (st[QHEAD] + 1) % m
        st[QSIZE] -= 1
        inq[c] = False
        if cmin[c] > hi[c] or cmax[c] < lo[c]:
            st[CONFLICT] = c
            _clear_queue(queue, inq, st)
            return False
        if hi[c] - cmin[c] >= amax[c] and cmax[c] - lo[c] >= amax[c]:
            continue
        for k in range(con_ptr[c], con_ptr[c + 1]):
            v = con_var[k]
            if val[v] != -1:
                continue
            a = con_coef[k]
            if a > 0:
                if cmin[c] + a > hi[c]:
                    _assign(v, 0, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
                elif cmax[c] - a < lo[c]:
                    _assign(v, 1, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
            else:
                if cmax[c] + a < lo[c]:
                    _assign(v, 0, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
                elif cmin[c] - a > hi[c]:
                    _assign(v, 1, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
            if cmin[c] > hi[c] or cmax[c] < lo[c]:
                st[CONFLICT] = c
                _clear_queue(queue, inq, st)
                return False
    return True


@njit(cache=True)
def _initialise(fixed, val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                var_ptr, var_con, var_coef, trail, queue, inq, st):
    """Reset state, apply fixed-domain variables and propagate at the root."""
    n = val.shape[0]
    m = cmin.shape[0]
    for v in range(n):
        val[v] = -1
    for c in range(m):
        smin = 0
        smax = 0
        for k in range(con_ptr[c], con_ptr[c + 1]):
            a = con_coef[k]
            if a > 0:
                smax += a
            else:
                smin += a
        cmin[c] = smin
        cmax[c] = smax
        inq[c] = False
    for i in range(N_SCALARS):
        st[i] = 0
    st[CONFLICT] = -1
    for c in range(m):
        _enqueue(c, queue, inq, st)
    for v in range(n):
        if fixed[v] != -1:
            if val[v] == -1:
                _assign(v, fixed[v], val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
            elif val[v] != fixed[v]:
                _clear_queue(queue, inq, st)
                return False
    return _propagate(val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                      var_ptr, var_con, var_coef, trail, queue, inq, st)


@njit(cache=True)
def propagate_partial(partial, fixed, val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                      var_ptr, var_con, var_coef, trail, queue, inq, st):
    """Propagate from the root, then from ``partial`` (-1 = unassigned).

    Returns the index of a violated constraint, -2 if ``partial`` contradicts
    a forced value, or -1 at a consistent fixpoint; ``val`` holds the result.
    """
    if not _initialise(fixed, val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                       var_ptr, var_con, var_coef, trail, queue, inq, st):
        return st[CONFLICT] if st[CONFLICT] >= 0 else -2
    for v in range(val.shape[0]):
        x = partial[v]
        if x == -1:
            continue
        if val[v] == -1:
            _assign(v, x, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
            if not _propagate(val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                              var_ptr, var_con, var_coef, trail, queue, inq, st):
                return st[CONFLICT]
        elif val[v] != x:
            return -2
    return -1


@njit(cache=True)
def search(fixed, val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
           var_ptr, var_con, var_coef, trail, queue, inq, st,
           dec_var, dec_val, dec_trail, buf, emit, stride,
           node_budget, max_solutions, stop_at_first):
    """Advance the depth-first search.

    Variables are branched in id order, value 0 before 1, with propagation
    after every decision.  When ``emit`` is set every ``stride``-th solution
    is copied into ``buf``; the call returns when the buffer fills, the node
    budget is spent, the solution limit is hit, the first solution is found
    (if ``stop_at_first``), or the search space is exhausted.
    """
    n = val.shape[0]
    nodes_at_entry = st[NODES]
    st[EMITTED] = 0
    if st[PHASE] == P_DONE:
        return R_EXHAUSTED
    if st[PHASE] == P_INIT:
        if _initialise(fixed, val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                       var_ptr, var_con, var_coef, trail, queue, inq, st):
            st[PHASE] = P_DESCEND
            st[PTR] = 0
        else:
            st[PHASE] = P_DONE
            return R_EXHAUSTED

    while True:
        if st[PHASE] == P_DESCEND:
            v = st[PTR]
            while v < n and val[v] != -1:
                v += 1
            if v == n:
                st[COUNT] += 1
                st[PHASE] = P_BACKTRACK
                if emit and st[COUNT] % stride == 0:
                    row = st[EMITTED]
                    for i in range(n):
                        buf[row, i] = val[i]
                    st[EMITTED] = row + 1
                if max_solutions > 0 and st[COUNT] >= max_solutions:
                    return R_SOLUTION_LIMIT
                if emit and st[EMITTED] == buf.shape[0]:
                    return R_BUFFER_FULL
                if stop_at_first and st[COUNT] == 1:
                    return R_FIRST
                continue
            d = st[DEPTH]
            dec_var[d] = v
            dec_val[d] = 0
            dec_trail[d] = st[TRAIL_LEN]
            st[DEPTH] = d + 1
            st[NODES] += 1
            _assign(v, 0, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
            if _propagate(val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                          var_ptr, var_con, var_coef, trail, queue, inq, st):
                st[PTR] = v + 1
            else:
                st[PHASE] = P_BACKTRACK
            if st[NODES] - nodes_at_entry >= node_budget:
                return R_NODE_BUDGET
        else:
            resumed = False
            while st[DEPTH] > 0:
                d = st[DEPTH] - 1
                _unassign_to(dec_trail[d], val, cmin, cmax, var_ptr, var_con, var_coef, trail, st)
                if dec_val[d] == 0:
                    dec_val[d] = 1
                    v = dec_var[d]
                    st[NODES] += 1
                    _assign(v, 1, val, cmin, cmax, var_ptr, var_con, var_coef, trail, queue, inq, st)
                    if _propagate(val, cmin, cmax, lo, hi, amax, con_ptr, con_var, con_coef,
                                  var_ptr, var_con, var_coef, trail, queue, inq, st):
                        st[PTR] = v + 1
                        st[PHASE] = P_DESCEND
                        resumed = True
                        break
                else:
                    st[DEPTH] = d
            if not resumed:
                st[PHASE] = P_DONE
                return R_EXHAUSTED
            if st[NODES] - nodes_at_entry >= node_budget:
                return R_NODE_BUDGET
