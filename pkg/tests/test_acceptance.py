"""Acceptance criteria 1-8.

Run under pytest, or directly with ``python tests/test_acceptance.py`` to get
one pass/fail line per criterion.
"""

from __future__ import annotations

import sys
import time
from collections import Counter

from realtheta.klein_surface import KleinType, build_surface_basis, pic_torus, valid_types
from realtheta.orientability import symmetric_power_report
from realtheta.real_torus import sw_function
from realtheta.suites import (
    bridge_suite,
    components_suite,
    localization_suite,
    obstruction_suite,
    round_trip_suite,
)
from realtheta.theta_forms import all_refinements, eval_q, theta_class_p0

SEED = 0


def _summarise(checks) -> tuple[bool, str]:
    bad = [c for c in checks if not c.passed]
    detail = "; ".join(f"{c.name}: {c.detail}" for c in (bad or checks))
    return not bad, detail


def symmetric_power_table() -> tuple[bool, str]:
    t0 = time.perf_counter()
    t = KleinType(1, 2, 0)
    rows = {d: symmetric_power_report(t, d).by_label() for d in range(2, 10)}
    elapsed = time.perf_counter() - t0
    # odd d: both non-orientable; even d: only T1 orientable
    want = {d: {"T0": False, "T1": d % 2 == 0} for d in range(2, 10)}
    ok = rows == want and elapsed < 1.0
    return ok, f"d=2..9 table {'matches' if rows == want else 'differs'}, {elapsed:.2f}s"


def theta_worked_example() -> tuple[bool, str]:
    p = pic_torus(KleinType(1, 2, 0))
    sw = sw_function(theta_class_p0(p, 1))
    table = {c.label: sw.value(c, p.circle_dual(0)) for c in sw.components}
    return table == {"T0": 1, "T1": 0}, f"w on [C1] dual: {table}"


def component_counts() -> tuple[bool, str]:
    t0 = time.perf_counter()
    ok, detail = _summarise(components_suite(SEED, max_g=6))
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 5.0, f"{detail}, {elapsed:.2f}s"


def obstruction_vanishing() -> tuple[bool, str]:
    return _summarise(obstruction_suite(SEED, trials=1000))


def holonomy_bridge() -> tuple[bool, str]:
    t0 = time.perf_counter()
    checks = [c for c in bridge_suite(SEED, trials=500) if c.name != "ODE holonomy has modulus 1"]
    ok, detail = _summarise(checks)
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 30.0, f"{detail}, {elapsed:.2f}s"


def theta_realizability(max_g: int = 5) -> tuple[bool, str]:
    """All ``2^{2g}`` refinements, no reality condition imposed."""
    t0 = time.perf_counter()
    bad = []
    for t in valid_types(max_g):
        if t.g == 0:
            continue
        S = build_surface_basis(t)
        circles = [[int(x) % 2 for x in S.circle_classes[:, i]] for i in range(t.r)]
        locus = [sum(c[j] for c in circles) % 2 for j in range(2 * t.g)]
        counts: Counter = Counter()
        locus_ok = True
        for q in all_refinements(t.g):
            counts[tuple((eval_q(q, c) + 1) % 2 for c in circles)] += 1
            locus_ok &= eval_q(q, locus) == t.s % 2
        parity_set = {w for w in counts if sum(w) % 2 == (t.g - 1) % 2}
        ok = (
            set(counts) == parity_set
            and len(parity_set) == 2 ** (t.r - 1)
            and set(counts.values()) == {2 ** (2 * t.g - t.r + 1)}
            and locus_ok
        )
        if not ok:
            bad.append(f"{t}: {len(counts)} vectors, multiplicities {sorted(set(counts.values()))}")
    elapsed = time.perf_counter() - t0
    detail = f"{len(bad)} types fail" + (" [" + "; ".join(bad) + "]" if bad else "") + f", {elapsed:.2f}s"
    return not bad and elapsed < 60.0, detail


def localization_consistency() -> tuple[bool, str]:
    return _summarise(localization_suite(SEED, trials=500))


def classification_round_trips() -> tuple[bool, str]:
    return _summarise(round_trip_suite(SEED))


CRITERIA = [
    (1, "symmetric-power orientability table", symmetric_power_table),
    (2, "theta class worked example", theta_worked_example),
    (3, "Picard real component counts", component_counts),
    (4, "obstruction vanishing", obstruction_vanishing),
    (5, "exact/numeric holonomy bridge", holonomy_bridge),
    (6, "theta realizability over all refinements", theta_realizability),
    (7, "localization consistency", localization_consistency),
    (8, "classification round trips", classification_round_trips),
]


def _line(n: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {n} {'PASS' if ok else 'FAIL'} {title}: {detail}"


def _run(n: int, acceptance_line) -> None:
    _, title, fn = CRITERIA[n - 1]
    ok, detail = fn()
    acceptance_line(_line(n, title, ok, detail))
    assert ok, detail


def test_symmetric_power_table(acceptance_line):
    _run(1, acceptance_line)


def test_theta_worked_example(acceptance_line):
    _run(2, acceptance_line)


def test_component_counts(acceptance_line):
    _run(3, acceptance_line)


def test_obstruction_vanishing(acceptance_line):
    _run(4, acceptance_line)


def test_holonomy_bridge(acceptance_line):
    _run(5, acceptance_line)


def test_theta_realizability(acceptance_line):
    _run(6, acceptance_line)


def test_localization_consistency(acceptance_line):
    _run(7, acceptance_line)


def test_classification_round_trips(acceptance_line):
    _run(8, acceptance_line)


def main() -> int:
    failed = 0
    for n, title, fn in CRITERIA:
        ok, detail = fn()
        print(_line(n, title, ok, detail))
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
