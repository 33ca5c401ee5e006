"""Build the first construction for s=5, h=2 and look at what it is.

Run: python3 demos/01_build_and_inspect.py
"""
from multiway import build
from multiway import exactla as X
from multiway.designcore import classify_setting, is_totally_binary, replication_vector

d = build("d1", 5, 2)
print(f"{d.n} units, {d.v} treatments, factors {d.setting.names}")
print("setting:", classify_setting(d.setting).variant)
print("replications:", replication_vector(d).tolist())
print("totally binary:", is_totally_binary(d))

# layout: rows are levels of p0, columns levels of p1, cell = treatment label
grid = {}
for u in range(d.n):
    a, b = d.setting.levels[u]
    grid[a, b] = d.treatments[d.alloc[u]]
for a in range(5):
    print("  ".join(f"{str(grid.get((a, b), '.')):>8}" for b in range(5)))

C = X.c_matrix(d)
print("exact spectrum of C:", X.exact_spectrum(C).as_dict())
