"""Two-watched-literal unit propagation (pure Python backend).

Literal codes are ``2*var + neg``.  ``values`` is indexed by literal code
(1 true, -1 false, 0 unassigned).  Clause ``c`` occupies
``lits[start[c]:start[c]+size[c]]`` and watches its first two literals;
``watches[l]`` lists the clauses watching literal ``l``.
"""


def propagate(values, levels, reasons, trail, trail_len, qhead,
              lits, start, size, watches, level):
    """Returns ``(conflict_clause or -1, qhead, trail_len)``."""
    while qhead < trail_len:
        fl = trail[qhead] ^ 1
        qhead += 1
        ws = watches[fl]
        n = len(ws)
        i = j = 0
        while i < n:
            c = ws[i]
            i += 1
            s = start[c]
            if lits[s] == fl:
                lits[s] = lits[s + 1]
                lits[s + 1] = fl
            first = lits[s]
            if values[first] == 1:
                ws[j] = c
                j += 1
                continue
            found = False
            for k in range(s + 2, s + size[c]):
                l = lits[k]
                if values[l] != -1:
                    lits[s + 1] = l
                    lits[k] = fl
                    watches[l].append(c)
                    found = True
                    break
            if found:
                continue
            ws[j] = c
            j += 1
            if values[first] == -1:
                while i < n:
                    ws[j] = ws[i]
                    j += 1
                    i += 1
                del ws[j:]
                return c, qhead, trail_len
            values[first] = 1
            values[first ^ 1] = -1
            v = first >> 1
            levels[v] = level
            reasons[v] = c
            trail[trail_len] = first
            trail_len += 1
        del ws[j:]
    return -1, qhead, trail_len
