"""Independent reference builders used as oracles (plain modular arithmetic, prime s only)."""


def primitive_root(p):
    for g in range(2, p):
        if len({pow(g, k, p) for k in range(p - 1)}) == p - 1:
            return g
    return 1


def code(p, g, x):
    """0 for zero, k + 1 for g**k."""
    if x % p == 0:
        return 0
    return next(k for k in range(p - 1) if pow(g, k, p) == x % p) + 1


def coset(p, g, h, x):
    return (code(p, g, x) - 1) % h


def d1_table(p, h):
    """Unit table ``{id: (levels by factor, treatment)}`` of the first construction, from the formulas."""
    g = primitive_root(p)
    reps = [pow(g, i, p) for i in range(h)]
    out = {}
    for a in range(1, p):
        for b in range(p):
            uid = (code(p, g, a), code(p, g, b))
            levels = {f"p{i}": code(p, g, a * q + b) for i, q in enumerate(reps)}
            out[uid] = (levels, coset(p, g, h, a) * p + code(p, g, b))
    return out


def d2_table(p, h):
    g = primitive_root(p)
    alphas = [x for x in range(1, p) if coset(p, g, h, x) == 0]
    out = {}
    for j in range(h):
        for b in range(p):
            for a in [0] + [x for x in range(1, p) if coset(p, g, h, x) == j]:
                uid = (code(p, g, a), code(p, g, b), j)
                levels = {f"a{al}": code(p, g, a * al + b) for al in alphas}
                out[uid] = (levels, j * p + code(p, g, b))
    return out


def table_of(d):
    st = d.setting
    return {st.units[u]: ({f.name: f.levels[st.levels[u, k]] for k, f in enumerate(st.factors)},
                          d.treatments[d.alloc[u]]) for u in range(d.n)}
