"""Compiled walk kernel over CSR arrays.

The kernel consumes a pre-generated buffer of U[0,1) draws and stops when fewer
than two draws remain (no step needs more), so the caller can top the buffer up
and continue with an identical stream.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from ..catalog import TYPE_TABLE

ALGO_CODES = {"rwnbn": 0, "rwebe": 1, "rwomrn": 2, "rwmix": 3, "rwnr": 4}
MAX_DRAWS_PER_STEP = 2

OK = 0
DEAD_END = 1


@nb.njit(cache=True, nogil=True, inline="always")
def _draw(buf, pos, k):
    i = np.int64(buf[pos] * k)
    if i >= k:
        i = k - 1
    return i


@nb.njit(cache=True, nogil=True)
def _has(ptr, idx, u, v):
    lo = ptr[u]
    hi = ptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        x = idx[mid]
        if x < v:
            lo = mid + 1
        elif x > v:
            hi = mid
        else:
            return 1
    return 0


@nb.njit(cache=True, nogil=True)
def _nth_skip(ptr, idx, u, j, skip):
    lo = ptr[u]
    hi = ptr[u + 1]
    start = lo
    while lo < hi:
        mid = (lo + hi) >> 1
        if idx[mid] < skip:
            lo = mid + 1
        else:
            hi = mid
    k = lo - start
    if lo < ptr[u + 1] and idx[lo] == skip and j >= k:
        j += 1
    return idx[start + j]


@nb.njit(cache=True, nogil=True)
def _ham_red(r01, r12, r02, h):
    # red Hamiltonian paths of the triple that start at slot h
    if h == 0:
        return (r01 & r12) + (r02 & r12)
    if h == 1:
        return (r01 & r02) + (r12 & r02)
    return (r12 & r01) + (r02 & r01)


@nb.njit(cache=True, nogil=True)
def walk_kernel(
    algo, st, buf, pos, nsteps,
    bptr, bidx, rptr, ridx, walkable,
    type_table, alpha, alpha_base, presence, max_type,
    accumulate, C, visits, trace, trace_off,
):
    """Advance ``st`` in place; returns (steps_done, new_pos, status)."""
    bdeg_ptr = bptr
    done = 0
    n = buf.shape[0]
    while done < nsteps and pos + 2 <= n:
        x0 = st[0]
        x1 = st[1]
        x2 = st[2]
        h1 = st[3]
        h2 = st[4]
        if algo == 1:
            if h2 == 0:
                b = x1
                c = x2
                bb = bdeg_ptr[b + 1] - bdeg_ptr[b]
                bc = bdeg_ptr[c + 1] - bdeg_ptr[c]
                rb = rptr[b + 1] - rptr[b]
                rc = rptr[c + 1] - rptr[c]
                sh = 0
                if rb > 0 and rc > 0:
                    sh = _has(rptr, ridx, b, c)
                kb = bb - 1
                kc = bc - 1
                rb -= sh
                rc -= sh
                k = kb + kc + rb + rc
                if k <= 0:
                    return done, pos, DEAD_END
                i = _draw(buf, pos, k)
                pos += 1
                if i < kb:
                    st[0] = c
                    st[1] = b
                    st[2] = _nth_skip(bptr, bidx, b, i, c)
                    st[4] = 0
                elif i < kb + kc:
                    st[0] = b
                    st[1] = c
                    st[2] = _nth_skip(bptr, bidx, c, i - kb, b)
                    st[4] = 0
                elif i < kb + kc + rb:
                    j = _draw(buf, pos, rb)
                    pos += 1
                    st[0] = c
                    st[1] = b
                    st[2] = _nth_skip(rptr, ridx, b, j, c)
                    st[4] = 1
                else:
                    j = _draw(buf, pos, rc)
                    pos += 1
                    st[0] = b
                    st[1] = c
                    st[2] = _nth_skip(rptr, ridx, c, j, b)
                    st[4] = 1
            else:
                a = x0
                b = x1
                ka = bptr[a + 1] - bptr[a] - 1
                kb = bptr[b + 1] - bptr[b] - 1
                if ka + kb <= 0:
                    return done, pos, DEAD_END
                i = _draw(buf, pos, ka + kb)
                pos += 1
                if i < ka:
                    st[0] = b
                    st[1] = a
                    st[2] = _nth_skip(bptr, bidx, a, i, b)
                else:
                    st[0] = a
                    st[1] = b
                    st[2] = _nth_skip(bptr, bidx, b, i - ka, a)
                st[4] = 0
        elif algo == 4:
            c = x2
            bc = bptr[c + 1] - bptr[c]
            rc = rptr[c + 1] - rptr[c]
            if bc + rc == 0:
                return done, pos, DEAD_END
            i = _draw(buf, pos, bc + rc)
            pos += 1
            st[0] = x1
            st[1] = x2
            st[3] = h2
            if i < bc:
                st[2] = bidx[bptr[c] + i]
                st[4] = 0
            else:
                st[2] = ridx[rptr[c] + i - bc]
                st[4] = 1
        else:
            if h1 == 0 and h2 == 0:
                c = x2
                bc = bptr[c + 1] - bptr[c]
                rc = rptr[c + 1] - rptr[c]
                if bc + rc == 0:
                    return done, pos, DEAD_END
                i = _draw(buf, pos, bc + rc)
                pos += 1
                st[0] = x1
                st[1] = x2
                if i < bc:
                    st[2] = bidx[bptr[c] + i]
                    st[4] = 0
                else:
                    j = _draw(buf, pos, rc)
                    pos += 1
                    st[2] = ridx[rptr[c] + j]
                    st[4] = 1
                st[3] = 0
            elif h1 == 0:
                b = x1
                y = x2
                bb = bptr[b + 1] - bptr[b]
                ry = rptr[y + 1] - rptr[y]
                if algo == 0:
                    i = _draw(buf, pos, bb)
                    pos += 1
                    st[2] = bidx[bptr[b] + i]
                    st[4] = 0
                elif algo == 2:
                    i = _draw(buf, pos, ry)
                    pos += 1
                    st[0] = b
                    st[1] = y
                    st[2] = ridx[rptr[y] + i]
                    st[3] = 1
                    st[4] = 1
                else:
                    i = _draw(buf, pos, bb + ry)
                    pos += 1
                    if i < bb:
                        st[2] = bidx[bptr[b] + i]
                        st[4] = 0
                    else:
                        st[0] = b
                        st[1] = y
                        st[2] = ridx[rptr[y] + i - bb]
                        st[3] = 1
                        st[4] = 1
            else:
                xh = x0
                bx = bptr[xh + 1] - bptr[xh]
                if bx == 0:
                    return done, pos, DEAD_END
                p = _draw(buf, pos, bx)
                q = _draw(buf, pos + 1, bx)
                pos += 2
                st[0] = bidx[bptr[xh] + p]
                st[1] = xh
                st[2] = bidx[bptr[xh] + q]
                st[3] = 0
                st[4] = 0

        if trace.shape[0] > 0:
            for f in range(5):
                trace[trace_off + done, f] = st[f]
        done += 1
        if not accumulate:
            continue

        x0 = st[0]
        x1 = st[1]
        x2 = st[2]
        if x0 == x1 or x1 == x2 or x0 == x2:
            visits[0] += 1
            continue
        b01 = _has(bptr, bidx, x0, x1)
        b12 = _has(bptr, bidx, x1, x2)
        b02 = _has(bptr, bidx, x0, x2)
        r01 = _has(rptr, ridx, x0, x1)
        r12 = _has(rptr, ridx, x1, x2)
        r02 = _has(rptr, ridx, x0, x2)
        t = type_table[(b01 | (r01 << 1)) * 16 + (b12 | (r12 << 1)) * 4 + (b02 | (r02 << 1))]
        visits[t] += 1
        if t == 0 or t > max_type:
            continue
        if presence:
            a_t = alpha_base[t]
            if walkable[x0]:
                a_t += _ham_red(r01, r12, r02, 0)
            if walkable[x1]:
                a_t += _ham_red(r01, r12, r02, 1)
            if walkable[x2]:
                a_t += _ham_red(r01, r12, r02, 2)
        else:
            a_t = alpha[t]
        if a_t <= 0:
            continue
        bd1 = bptr[x1 + 1] - bptr[x1]
        rd1 = rptr[x1 + 1] - rptr[x1]
        if algo == 1:
            if st[4] == 0:
                pi = 1.0
            else:
                be = bptr[x0 + 1] - bptr[x0] + bd1 - 2
                re = rptr[x0 + 1] - rptr[x0] + rd1 - 2 * r01
                pi = be / (be + re)
        elif algo == 4:
            pi = 1.0 / (bd1 + rd1)
        elif st[3] == 0 and st[4] == 0:
            pi = 1.0 / bd1
        elif st[3] == 0:
            pi = 1.0 / (bd1 + rd1)
        else:
            bx = bptr[x0 + 1] - bptr[x0]
            rx = rptr[x0 + 1] - rptr[x0]
            if algo == 2:
                pi = bx / ((bx + rx) * rd1)
            else:
                pi = bx / ((bx + rx) * (rd1 + bx))
        C[t] += 1.0 / (a_t * pi)
    return done, pos, OK


def graph_arrays(g):
    return (
        np.ascontiguousarray(g.blue_indptr, dtype=np.int64),
        np.ascontiguousarray(g.blue_indices, dtype=np.int64),
        np.ascontiguousarray(g.red_indptr, dtype=np.int64),
        np.ascontiguousarray(g.red_indices, dtype=np.int64),
        np.ascontiguousarray(g.walkable(), dtype=np.uint8),
    )


TYPE_TABLE_I64 = np.ascontiguousarray(TYPE_TABLE, dtype=np.int64)
