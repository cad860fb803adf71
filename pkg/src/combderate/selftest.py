"""Invariant suites run by ``combderate selftest``."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from .coeffs import table1
from .compensator import compensated_response, maxflat_coeffs, maxflat_coeffs_derated
from .response import DEFAULT_M, CombSpec, derated_response, deviation_sweep, stopband_dominance
from .stream import direct_fir_oracle, empirical_response, plan_wordlength, run_chain

# Values as printed in the published coefficient table.
TABLE1 = [
    (1, Fraction(22), 1, 5),
    (2, Fraction(10), 1, 4),
    (3, Fraction(6), 1, 3),
    (4, Fraction(4), 1, 3),
    (5, Fraction(14, 5), 5, 5),
    (6, Fraction(2), 1, 2),
    (7, Fraction(10, 7), 7, 5),
    (8, Fraction(1), 1, 2),
    (9, Fraction(2, 3), 3, 3),
    (10, Fraction(2, 5), 5, 4),
    (11, Fraction(2, 11), 11, 5),
]


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(np.abs(ys)), 1)[0])


def suite_table1(rng):
    rows = table1()
    return rows == TABLE1, f"{len(rows)} rows"


def suite_slope_law(rng):
    ms = [4, 8, 16, 32]
    worst_h, worst_g = -np.inf, -np.inf
    for n in range(1, 7):
        sh = loglog_slope(ms, deviation_sweep("conventional", n, ms).deviation_db)
        sg = loglog_slope(ms, deviation_sweep("derated", n, ms).deviation_db)
        worst_h = max(worst_h, abs(sh + 2))
        worst_g = max(worst_g, sg)
    return worst_h <= 0.15 and worst_g <= -3.5, f"max |slope_H + 2| = {worst_h:.4f}, max slope_G = {worst_g:.3f}"


def suite_derating_ratio(rng):
    worst = 0.0
    for n in range(1, 7):
        h = deviation_sweep("conventional", n).deviation_db
        g = deviation_sweep("derated", n).deviation_db
        worst = max(worst, max(abs(a) / abs(b) for a, b in zip(g, h)))
    return worst <= 1 / 20, f"max |dG|/|dH| = {worst:.5f}"


def suite_oracle_equivalence(rng):
    cases = 0
    for n in range(1, 7):
        for m in (2, 3, 4, 8, 16):
            for derated in (False, True):
                x = rng.integers(-(1 << 15) + 1, 1 << 15, 2000)
                plan = plan_wordlength(n, m, 16, derated)
                if not np.array_equal(run_chain(x, n, m, derated, plan), direct_fir_oracle(x, n, m, derated)):
                    return False, f"mismatch at N={n} M={m} derated={derated}"
                cases += 1
    return True, f"{cases} chains bit-exact"


def suite_stopband_dominance(rng):
    for n in range(1, 12):
        for m in (4, 8, 16, 32):
            if not stopband_dominance(CombSpec(n, m)).dominates:
                return False, f"|G| > |H| for N={n} M={m}"
    return True, "N=1..11, M in {4,8,16,32}"


def suite_sharpened(rng):
    u = deviation_sweep("sharpened", 2)
    d = deviation_sweep("sharpened-derated", 2)
    ok = abs(u.deviation_db[0] - 0.090) <= 0.005 and d.deviation_db[0] <= 0.01 and d.spread <= 0.01
    return ok, f"M=4 underated {u.deviation_db[0]:.4f} dB, derated spread {d.spread:.2e} dB"


def suite_cascade(rng):
    c = deviation_sweep("conventional", 3)
    u = deviation_sweep("cascade", 3)
    d = deviation_sweep("cascade-derated", 3)
    above = all(a >= b for a, b in zip(u.deviation_db, c.deviation_db))
    return above and d.spread <= 0.01, f"3+1 above conventional: {above}, derated spread {d.spread:.2e} dB"


def suite_compensator(rng):
    exact = maxflat_coeffs(3, 4).c0 == Fraction(-15, 128) and maxflat_coeffs_derated(3).c0 == Fraction(-1, 8)
    edge = np.pi / 8
    single = [abs(compensated_response(3, m, 8, False, edge)) for m in DEFAULT_M]
    two = [abs(compensated_response(3, m, 8, True, edge)) for m in DEFAULT_M]
    spread_s, spread_t = np.ptp(single), np.ptp(two)
    return exact and spread_t <= spread_s / 2, f"edge spread single {spread_s:.2e}, two-stage {spread_t:.2e}"


def suite_empirical_response(rng):
    omegas = (np.arange(16) + 0.5) * np.pi / 5
    measured = empirical_response(3, 4, True, omegas)
    expected = np.abs(derated_response(CombSpec(3, 4), omegas))
    err = float(np.max(np.abs(measured / expected - 1)))
    return err <= 1e-3, f"max relative error {err:.2e}"


SUITES: dict[str, Callable] = {
    "table1": suite_table1,
    "slope-law": suite_slope_law,
    "derating-ratio": suite_derating_ratio,
    "oracle-equivalence": suite_oracle_equivalence,
    "stopband-dominance": suite_stopband_dominance,
    "sharpened": suite_sharpened,
    "cascade": suite_cascade,
    "compensator": suite_compensator,
    "empirical-response": suite_empirical_response,
}


def run_all(seed: int = 0, names=None) -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in SUITES.items():
        if names and name not in names:
            continue
        rng = np.random.default_rng(seed)
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crashing suite is a failing suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
