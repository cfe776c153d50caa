# cython: language_level=3, boundscheck=False, wraparound=False
"""Two-watched-literal unit propagation (compiled backend).

Same contract as the pure Python version in ``_bcp_py``.
"""

from cpython.array cimport array


def propagate(array values, array levels, array reasons, array trail,
              int trail_len, int qhead, array lits, array start, array size,
              list watches, int level):
    cdef signed char[:] val = values
    cdef int[:] lev = levels
    cdef int[:] rsn = reasons
    cdef int[:] tr = trail
    cdef int[:] L = lits
    cdef int[:] st = start
    cdef int[:] sz = size
    cdef int fl, c, s, first, k, l, v, end
    cdef Py_ssize_t i, j, n
    cdef list ws
    cdef bint found
    while qhead < trail_len:
        fl = tr[qhead] ^ 1
        qhead += 1
        ws = <list>watches[fl]
        n = len(ws)
        i = 0
        j = 0
        while i < n:
            c = <int>ws[i]
            i += 1
            s = st[c]
            if L[s] == fl:
                L[s] = L[s + 1]
                L[s + 1] = fl
            first = L[s]
            if val[first] == 1:
                ws[j] = c
                j += 1
                continue
            found = False
            end = s + sz[c]
            k = s + 2
            while k < end:
                l = L[k]
                if val[l] != -1:
                    L[s + 1] = l
                    L[k] = fl
                    (<list>watches[l]).append(c)
                    found = True
                    break
                k += 1
            if found:
                continue
            ws[j] = c
            j += 1
            if val[first] == -1:
                while i < n:
                    ws[j] = ws[i]
                    j += 1
                    i += 1
                del ws[j:]
                return c, qhead, trail_len
            val[first] = 1
            val[first ^ 1] = -1
            v = first >> 1
            lev[v] = level
            rsn[v] = c
            tr[trail_len] = first
            trail_len += 1
        del ws[j:]
    return -1, qhead, trail_len
