#!/usr/bin/env python3
"""One-off generator for the golden regression JSON files.

The data below is transcribed by hand from the published classification
tables (basis theorems, infinitesimal-action tables, invariant tables and
geometric-condition tables) for the U7, U8 and U9 singularities.
"""
import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "algrest", "golden")


def vec(dim, entries):
    v = ["0"] * dim
    for idx, val in entries.items():
        v[idx] = str(val)
    return v


def action(dim, rows):
    """rows: field name -> {theta_col: {target_idx: value}}"""
    out = {}
    for name, cols in rows.items():
        out[name] = [vec(dim, cols.get(j, {})) for j in range(dim)]
    return out


INF = "inf"

u7 = {
    "family": "U7",
    "basis": {
        "full_dim": 8,
        "closed_dim": 7,
        "full_degrees": [7, 8, 9, 10, 11, 12, 13, 14],
        "closed_degrees": [7, 8, 9, 10, 11, 13, 14],
    },
    "action": {
        "images": action(7, {
            "E": {j: {j: d} for j, d in enumerate([7, 8, 9, 10, 11, 13, 14])},
            "x3*E": {0: {3: 10}, 1: {4: -22}, 3: {5: 13}, 4: {6: 14}},
            "x1*E": {0: {4: 11}, 2: {5: -39}, 3: {6: 14}},
            "x2*E": {1: {5: -78}, 2: {6: -84}},
            "x3^2*E": {0: {5: 13}, 1: {6: -28}},
            "x1*x3*E": {0: {6: 14}},
        })
    },
    "classification": [
        {"class": "0", "cod": 0, "musym": 2, "ind": 0},
        {"class": "1", "cod": 1, "musym": 3, "ind": 0},
        {"class": "2", "cod": 2, "musym": 4, "ind": 0},
        {"class": "3", "cod": 3, "musym": 4, "ind": 1},
        {"class": "4", "cod": 4, "musym": 5, "ind": 1},
        {"class": "5", "cod": 5, "musym": 6, "ind": 2},
        {"class": "6", "cod": 6, "musym": 6, "ind": 2},
        {"class": "7", "cod": 7, "musym": 7, "ind": INF},
    ],
    "tangency": [
        {"class": "0", "variant": "c1 != 0", "ind": 0, "ind2": 0, "lt": 3, "l2": 4},
        {"class": "0", "variant": "c1 = 0", "ind": 0, "ind2": 0, "lt": 4, "l2": 4},
        {"class": "1", "variant": "", "ind": 0, "ind2": 0, "lt": 3, "l2": 5},
        {"class": "2", "variant": "", "ind": 0, "ind2": 0, "lt": 4, "l2": 5},
        {"class": "3", "variant": "", "ind": 1, "ind2": 1, "lt": 7, "l2": 7},
        {"class": "4", "variant": "", "ind": 1, "ind2": 1, "lt": 8, "l2": 8},
        {"class": "5", "variant": "", "ind": 2, "ind2": INF, "lt": 10, "l2": INF},
        {"class": "6", "variant": "", "ind": 2, "ind2": INF, "lt": 11, "l2": INF},
        {"class": "7", "variant": "", "ind": INF, "ind2": INF, "lt": INF, "l2": INF},
    ],
    "geometry": [
        {"class": "0", "variant": "c1 != 0", "omega_v_nonzero": True, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "0", "variant": "c1 = 0", "omega_v_nonzero": True, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "1", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "2", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "3", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "4", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "5", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "6", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "7", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
    ],
}

u8 = {
    "family": "U8",
    "basis": {
        "full_dim": 9,
        "closed_dim": 8,
        "full_degrees": [5, 6, 7, 7, 8, 9, 9, 10, 11],
        "closed_degrees": [5, 6, 7, 7, 8, 9, 10, 11],
    },
    "action": {
        "images": action(8, {
            "E": {j: {j: d} for j, d in enumerate([5, 6, 7, 7, 8, 9, 10, 11])},
            "x3*E": {0: {3: 7}, 1: {4: -16}, 2: {5: 3}, 3: {5: 9}, 4: {6: 10}, 5: {7: 11}},
            "x1*E": {0: {4: 8}, 1: {5: -6}, 2: {6: -20}, 3: {6: 10}, 4: {7: "11/3"}},
            "x3^2*E": {0: {5: 9}, 1: {6: -20}, 2: {7: "11/3"}, 3: {7: 11}},
            "x2*E": {0: {5: -3}, 1: {6: -40}, 2: {7: "-55/3"}, 3: {7: "-11/3"}},
            "x1*x3*E": {0: {6: 10}, 1: {7: "-22/3"}},
            "x3^3*E": {0: {7: 11}},
            "x1^2*E": {0: {7: "11/3"}},
            "x2*x3*E": {0: {7: "-11/3"}},
        })
    },
    "classification": [
        {"class": "0", "cod": 0, "musym": 2, "ind": 0},
        {"class": "1", "cod": 1, "musym": 3, "ind": 0},
        {"class": "2", "cod": 2, "musym": 4, "ind": 0},
        {"class": "3,0_5", "cod": 3, "musym": 5, "ind": 0},
        {"class": "3,0_inf", "cod": 3, "musym": 5, "ind": 0},
        {"class": "3,1", "cod": 3, "musym": 4, "ind": 1},
        {"class": "4", "cod": 4, "musym": 5, "ind": 1},
        {"class": "5", "cod": 5, "musym": 6, "ind": 2},
        {"class": "6", "cod": 6, "musym": 7, "ind": 2},
        {"class": "7", "cod": 7, "musym": 7, "ind": 3},
        {"class": "8", "cod": 8, "musym": 8, "ind": INF},
    ],
    "tangency": [
        {"class": "0", "variant": "c1 != 0", "ind": 0, "lt": 1, "l12": 1, "l3": 3},
        {"class": "0", "variant": "c1 = 0", "ind": 0, "lt": 3, "l12": INF, "l3": 3},
        {"class": "1", "variant": "c2 != 2c1", "ind": 0, "lt": 1, "l12": 1, "l3": 5},
        {"class": "1", "variant": "c2 = 2c1", "ind": 0, "lt": 1, "l12": 1, "l3": INF},
        {"class": "2", "variant": "", "ind": 0, "lt": 3, "l12": INF, "l3": 5},
        {"class": "3,0_5", "variant": "", "ind": 0, "lt": 3, "l12": INF, "l3": 5},
        {"class": "3,0_inf", "variant": "", "ind": 0, "lt": 3, "l12": INF, "l3": INF},
        {"class": "3,1", "variant": "", "ind": 1, "lt": 5, "l12": INF, "l3": 5},
        {"class": "4", "variant": "", "ind": 1, "lt": 6, "l12": INF, "l3": INF},
        {"class": "5", "variant": "", "ind": 2, "lt": 7, "l12": INF, "l3": INF},
        {"class": "6", "variant": "", "ind": 2, "lt": 8, "l12": INF, "l3": INF},
        {"class": "7", "variant": "", "ind": 3, "lt": 9, "l12": INF, "l3": INF},
        {"class": "8", "variant": "", "ind": INF, "lt": INF, "l12": INF, "l3": INF},
    ],
    "geometry": [
        {"class": "0", "variant": "c1 != 0", "omega_v_nonzero": True, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "0", "variant": "c1 = 0", "omega_v_nonzero": True, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "1", "variant": "c2 != 2c1", "omega_v_nonzero": False, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "1", "variant": "c2 = 2c1", "omega_v_nonzero": False, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "2", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "3,0_5", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "3,0_inf", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "3,1", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "4", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "5", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "6", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "7", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "8", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
    ],
}

u9 = {
    "family": "U9",
    "basis": {
        "full_dim": 10,
        "closed_dim": 9,
        "full_degrees": [8, 10, 12, 11, 13, 14, 15, 16, 17, 19],
        "closed_degrees": [8, 10, 12, 11, 13, 14, 16, 17, 19],
    },
    "action": {
        "images": action(9, {
            "E": {j: {j: d} for j, d in enumerate([8, 10, 12, 11, 13, 14, 16, 17, 19])},
            "x3*E": {0: {3: 11}, 1: {4: -26}, 3: {5: 14}, 4: {6: 16}, 5: {7: 17}, 6: {8: 19}},
            "x1*E": {0: {4: 13}, 2: {7: -68}, 3: {6: 16}, 5: {8: 19}},
            "x3^2*E": {0: {5: 14}, 1: {6: -32}, 3: {7: 17}, 4: {8: 19}},
            "x2*E": {1: {7: -136}, 2: {8: -38}},
            "x1*x3*E": {0: {6: 16}, 3: {8: 19}},
            "x3^3*E": {0: {7: 17}, 1: {8: -38}},
            "x2*x3*E": {},
            "x1^2*E": {},
            "x1*x3^2*E": {0: {8: 19}},
        })
    },
    "classification": [
        {"class": "0", "cod": 0, "musym": 2, "ind": 0},
        {"class": "1", "cod": 1, "musym": 4, "ind": 0},
        {"class": "2", "cod": 2, "musym": 4, "ind": 0},
        {"class": "3,0", "cod": 3, "musym": 5, "ind": 0},
        {"class": "4,0", "cod": 4, "musym": 6, "ind": 0},
        {"class": "3,1", "cod": 3, "musym": 4, "ind": 1},
        {"class": "4,1", "cod": 4, "musym": 6, "ind": 1},
        {"class": "5", "cod": 5, "musym": 6, "ind": 2},
        {"class": "6", "cod": 6, "musym": 7, "ind": 2},
        {"class": "7", "cod": 7, "musym": 8, "ind": 3},
        {"class": "8", "cod": 8, "musym": 8, "ind": 3},
        {"class": "9", "cod": 9, "musym": 9, "ind": INF},
    ],
    "tangency": [
        {"class": "0", "variant": "c1 != 0", "ind": 0, "ind2": 0, "lt": 3, "l2": 5},
        {"class": "0", "variant": "c1 = 0", "ind": 0, "ind2": 0, "lt": 5, "l2": 5},
        {"class": "1", "variant": "", "ind": 0, "ind2": 0, "lt": 3, "l2": 7},
        {"class": "2", "variant": "", "ind": 0, "ind2": 0, "lt": 5, "l2": 7},
        {"class": "3,0", "variant": "", "ind": 0, "ind2": 0, "lt": 5, "l2": 7},
        {"class": "4,0", "variant": "", "ind": 0, "ind2": 0, "lt": 5, "l2": 7},
        {"class": "3,1", "variant": "", "ind": 1, "ind2": 1, "lt": 8, "l2": 8},
        {"class": "4,1", "variant": "", "ind": 1, "ind2": 1, "lt": 10, "l2": 10},
        {"class": "5", "variant": "", "ind": 2, "ind2": 2, "lt": 11, "l2": 11},
        {"class": "6", "variant": "", "ind": 2, "ind2": 2, "lt": 13, "l2": 13},
        {"class": "7", "variant": "", "ind": 3, "ind2": INF, "lt": 14, "l2": INF},
        {"class": "8", "variant": "", "ind": 3, "ind2": INF, "lt": 16, "l2": INF},
        {"class": "9", "variant": "", "ind": INF, "ind2": INF, "lt": INF, "l2": INF},
    ],
    "geometry": [
        {"class": "0", "variant": "c1 != 0", "omega_v_nonzero": True, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "0", "variant": "c1 = 0", "omega_v_nonzero": True, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "1", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": True, "ker_eq_l2": False, "omega_w_zero": False},
        {"class": "2", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "3,0", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "4,0", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": True, "omega_w_zero": False},
        {"class": "3,1", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "4,1", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "5", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "6", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "7", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "8", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
        {"class": "9", "variant": "", "omega_v_nonzero": False, "omega_l1l2_nonzero": False, "ker_eq_l2": False, "omega_w_zero": True},
    ],
}

os.makedirs(OUT, exist_ok=True)
for fam, data in [("u7", u7), ("u8", u8), ("u9", u9)]:
    path = os.path.join(OUT, fam + ".json")
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
    print("wrote", path)
