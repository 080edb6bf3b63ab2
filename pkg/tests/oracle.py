"""Independent brute-force electrostatics oracle.

Recomputes configuration and kink energies from first principles (explicit
dot enumeration, double loop over dot pairs) without touching any of the
package's electrostatics code paths. Used to cross-check kink_matrix.
"""

import math

NM = 1e-9


def brute_dots(cell):
    d = cell.dot_offset
    if cell.rotation == 0:
        rel = [(d, d), (-d, d), (-d, -d), (d, -d)]
    else:
        rel = [(d, 0.0), (0.0, d), (-d, 0.0), (0.0, -d)]
    return [(cell.center_x + x, cell.center_y + y) for x, y in rel]


def brute_charges(sign, e, model):
    occupied = {0, 2} if sign > 0 else {1, 3}
    if model == "electron":
        return [-e if i in occupied else 0.0 for i in range(4)]
    return [-e / 2 if i in occupied else e / 2 for i in range(4)]


def brute_config_energy(cell_a, pol_a, cell_b, pol_b, k, e, model):
    total = 0.0
    for (xa, ya), qa in zip(brute_dots(cell_a), brute_charges(pol_a, e, model)):
        for (xb, yb), qb in zip(brute_dots(cell_b), brute_charges(pol_b, e, model)):
            if qa == 0.0 or qb == 0.0:
                continue
            r = math.hypot(xa - xb, ya - yb) * NM
            total += k * qa * qb / r
    return total


def brute_kink(cell_a, cell_b, k, e, model):
    if cell_b.id < cell_a.id:
        cell_a, cell_b = cell_b, cell_a
    return (brute_config_energy(cell_a, +1, cell_b, -1, k, e, model)
            - brute_config_energy(cell_a, +1, cell_b, +1, k, e, model))


def brute_kink_matrix(layout, radius, k, e, model):
    pairs = {}
    cells = list(layout.cells)
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            dist = math.hypot(a.center_x - b.center_x, a.center_y - b.center_y)
            if dist <= radius:
                key = tuple(sorted((a.id, b.id)))
                pairs[key] = brute_kink(a, b, k, e, model)
    return pairs
