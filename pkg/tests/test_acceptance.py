"""The twelve acceptance criteria, each at its stated tolerance.

Every test records a one-line PASS/FAIL verdict; the lines are printed at the
end of the pytest run and by running this file directly.
"""

from __future__ import annotations

import itertools
import math
import random
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from conftest import record
from oracles import INF, hardy_finite, monomial_text
from warpedhardy import (
    Direction,
    HardyProblem,
    Interval,
    Orientation,
    Status,
    SurfaceSpec,
    chi_surface,
    classify_interval,
    classify_surface,
    divergence_witness,
    extremal_ratio,
    hardy_constant,
    make_exponents,
    parse_symfun,
    profile,
)
from warpedhardy.surface import chi_surface_arclength

GOLDEN = Path(__file__).parent / "golden"
FWD, REV = Orientation.FORWARD, Orientation.REVERSED


def problem(p, q, v0, v1, lo=0.0, hi=INF, orientation=FWD) -> HardyProblem:
    iv = Interval(lo, hi, orientation)
    dom = iv.forward()
    return HardyProblem(make_exponents(p, q), iv, parse_symfun(v0, dom), parse_symfun(v1, dom))


def rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def test_classical_weight():
    # Profile (1/tau)^(1/2) * tau^(1/2) is identically 1, so chi = (p-1)^(-1/p) = 1 at p = 2.
    res = hardy_constant(problem(2, 2, "t^-1", "1"))
    expected = (2 - 1) ** (-1 / 2)
    ok = res.chi.is_finite and rel(res.chi.value, expected) <= 1e-6
    record(1, "classical weight t^-1 on (0,inf)", ok, f"chi={res.chi.value}, expected {expected}")
    assert ok


def test_unit_weight_finite_interval():
    res = hardy_constant(problem(2, 2, "1", "1", 0.0, 1.0))
    ok = res.chi.is_finite and abs(res.chi.value - 0.5) <= 1e-8 and abs(res.argmax_tau - 0.5) <= 1e-4
    record(2, "unit weights on [0,1)", ok, f"chi={res.chi.value}, argmax={res.argmax_tau}")
    assert ok


def test_integral_form_exponential():
    res = hardy_constant(problem(2, 4, "exp(-1*t)", "1"))
    expected = 128 ** -0.25
    ok = res.chi.is_finite and rel(res.chi.value, expected) <= 1e-6
    record(3, "integral form p=2 q=4 e^-t", ok, f"chi={res.chi.value}, expected {expected}")
    assert ok


def random_monomial_problems(count: int, seed: int):
    rng = random.Random(seed)
    sup = [(F(2), F(2)), (F(3), F(2)), (F(4), F(3, 2)), (F(3), F(3))]
    integral = [(F(2), F(4)), (F(3, 2), F(2)), (F(2), F(3)), (F(3, 2), F(4))]
    intervals = [(0.0, 1.0), (0.0, INF), (1.0, INF)]
    for i in range(count):
        p, q = rng.choice(sup if i % 2 == 0 else integral)
        lo, hi = rng.choice(intervals)
        orientation = FWD if rng.random() < 0.5 else REV
        a, b = (F(rng.randint(-6, 6), 2) for _ in range(2))
        d0, d1 = (F(rng.choice([-1, 0, 1])) if hi == INF else F(0) for _ in range(2))
        yield p, q, a, d0, b, d1, lo, hi, orientation


def test_finiteness_oracle_agreement():
    cases = list(random_monomial_problems(120, seed=20240601))
    mismatches = []
    regimes = {True: 0, False: 0}
    for p, q, a, d0, b, d1, lo, hi, orientation in cases:
        expected = hardy_finite(p, q, a, d0, b, d1, lo, hi, orientation is FWD)
        res = hardy_constant(problem(p, q, monomial_text(a, d0), monomial_text(b, d1), lo, hi, orientation))
        regimes[p >= q] += 1
        if not (res.chi.is_finite if expected else res.chi.is_divergent):
            mismatches.append((p, q, a, d0, b, d1, lo, hi, orientation.value, res.chi.tag.value))
    ok = not mismatches and min(regimes.values()) >= 50
    record(4, "finiteness oracle agreement", ok,
           f"{len(cases)} problems ({regimes[True]} sup, {regimes[False]} integral), {len(mismatches)} mismatches")
    assert ok, mismatches[:5]


def test_interval_truth_table():
    table = {
        ("1", 1.0): ("Trivial", "Trivial", "Trivial", "Trivial", "Trivial", "Trivial"),
        ("1", INF): ("Nontrivial", "Nontrivial", "Trivial", "Trivial", "Nontrivial", "Nontrivial"),
        ("exp(1*t)", INF): ("Nontrivial", "Trivial", "Trivial", "Nontrivial", "Trivial", "Trivial"),
    }
    wrong = []
    for (w, hi), expected in table.items():
        r = classify_interval(problem(2, 2, w, w, 0.0, hi))
        got = tuple(v.status.value for v in (r.h1_relative, r.h1_absolute, r.h1bar_absolute, r.h1bar_relative,
                                             r.torsion_absolute, r.torsion_relative))
        if got != expected:
            wrong.append((w, hi, got))
        if w.startswith("exp") and not r.relative_dim_one:
            wrong.append((w, hi, "relative_dim_one"))
    ok = not wrong
    record(5, "interval cohomology truth table", ok, f"{len(table)} examples, {len(wrong)} wrong")
    assert ok, wrong


def lemma4_grid():
    ps = [F(3, 2), F(2), F(5, 2), F(3), F(4)]
    for p, q in itertools.product(ps, ps):
        for n in range(1, 5):
            if 1 / q - 1 / p >= F(1, n + 1):
                continue  # outside the lemma's hypothesis
            for k in range(n + 1):
                yield p, q, n, k


def test_lemma4_sweep():
    profiles = [parse_symfun(f, Interval(0.0)) for f in ("exp(-1*t)", "t+1", "1")]
    grid = list(lemma4_grid())
    exceptions, checks = [], 0
    for f in profiles:
        for p, q, n, k in grid:
            spec = SurfaceSpec(f, n, k + 1, make_exponents(p, q))
            if F(n) / p - k <= 0:
                checks += 1
                if not chi_surface(spec, Direction.AT_INFINITY).chi.is_divergent:
                    exceptions.append((f.to_text(), p, q, n, k, "chi0"))
            if F(n) / q - k >= 0:
                checks += 1
                if not chi_surface(spec, Direction.AT_ZERO).chi.is_divergent:
                    exceptions.append((f.to_text(), p, q, n, k, "chi_inf"))
    ok = len(grid) >= 200 and not exceptions
    record(6, "finite-volume profile sweep", ok, f"{len(grid)} tuples x {len(profiles)} profiles, {checks} checks, "
                                   f"{len(exceptions)} exceptions")
    assert ok, exceptions[:5]


def test_surface_verdicts():
    problems = []
    exps = make_exponents(2, 2)
    n = 2
    for f_text, degrees, expect in (("1", (1, n + 1), Status.NONTRIVIAL), ("t+1", range(1, n + 2), Status.NONTRIVIAL)):
        f = parse_symfun(f_text, Interval(0.0))
        for j in degrees:
            r = classify_surface(SurfaceSpec(f, n, j, exps))
            if r.torsion_j.status is not expect:
                problems.append((f_text, j, r.torsion_j.status.value))
    r = classify_surface(SurfaceSpec(parse_symfun("exp(-1*t)", Interval(0.0)), 1, 1, exps))
    volume = 2 * math.pi * (math.sqrt(2) + math.log(1 + math.sqrt(2))) / 2
    if r.torsion_j.status is not Status.UNKNOWN or r.f_limit.value != "Zero" or not r.volume.is_finite:
        problems.append(("exp(-t)", r.torsion_j.status.value, r.f_limit.value, r.volume.tag.value))
    elif abs(r.volume.value - volume) > 1e-4:
        problems.append(("volume", r.volume.value, volume))
    ok = not problems
    record(7, "surface torsion verdicts and volume", ok, f"volume={r.volume.value}, closed form {volume}")
    assert ok, problems


def extremal_cases(count: int, seed: int):
    rng = random.Random(seed)
    pairs = [(2, 2), (3, 2), (4, 3), (3, 3), (F(5, 2), F(3, 2))]
    while count:
        p, q = map(F, rng.choice(pairs))
        qc = q / (q - 1)
        if rng.random() < 0.5:
            # [0, 1): B needs -b q' > -1 near 0.
            a = F(rng.randint(-2, 4), 4)
            b = F(rng.randint(-4, 0), 4)
            if a * p <= -1 or -b * qc <= -1:
                continue
            lo, hi, tau = 0.0, 1.0, rng.uniform(0.05, 0.95)
        else:
            # [1, inf): A needs a p < -1.
            a = F(rng.randint(-12, -3), 4)
            b = F(rng.randint(-4, 4), 4)
            if a * p >= -1:
                continue
            lo, hi, tau = 1.0, INF, 1 + rng.expovariate(0.3)
        count -= 1
        yield problem(p, q, monomial_text(a, F(0)), monomial_text(b, F(0)), lo, hi), tau


def test_extremal_lower_bound():
    bad, worst = [], math.inf
    for pr, tau in extremal_cases(50, seed=7):
        prof = profile(pr, tau).value
        ratio = extremal_ratio(pr, tau)
        worst = min(worst, ratio - prof)
        if ratio < prof - 1e-8:
            bad.append((pr.v0.to_text(), pr.v1.to_text(), tau, ratio, prof))
    ok = not bad
    record(8, "extremal lower bound", ok, f"50 pairs, min(ratio - profile)={worst:.3g}")
    assert ok, bad[:5]


def test_homogeneity():
    rng = random.Random(11)
    bases = [
        problem(2, 2, "1", "1", 0.0, 1.0),
        problem(3, 2, "exp(-1*t)", "exp(-1/2*t)"),
        problem(2, 4, "exp(-1*t)", "1"),
        problem(F(3, 2), 3, "exp(-1*t)", "exp(-1/2*t)"),
    ]
    base_chi = [hardy_constant(b).chi.value for b in bases]
    assert all(c is not None for c in base_chi)
    worst, regimes = 0.0, set()
    for i in range(50):
        k = i % len(bases)
        c0, c1 = rng.uniform(0.1, 10), rng.uniform(0.1, 10)
        scaled = hardy_constant(bases[k].scaled(c0, c1)).chi.value
        worst = max(worst, rel(scaled, c0 / c1 * base_chi[k]))
        regimes.add(bases[k].regime)
    ok = worst <= 1e-8 and len(regimes) == 2
    record(9, "homogeneity under weight scaling", ok, f"50 scalings, worst relative deviation {worst:.3g}")
    assert ok


def test_witness():
    pr = problem(2, 2, "1", "1", 1.0, INF)
    w = divergence_witness(pr)
    ev = w.lhs_divergence_evidence
    growing = all(b[1] > a[1] for a, b in zip(ev, ev[1:])) and ev[-1][1] > 10 * ev[0][1]
    ok = math.isfinite(w.rhs_integral) and growing and w.exponent == -1 and w.log_power == 0
    record(10, "divergence witness for unit weights on [1,inf)", ok,
           f"h={w.h.to_text()}, rhs={w.rhs_integral}, lhs partials {ev[0][1]:.3g} -> {ev[-1][1]:.3g}")
    assert ok
    assert w.rhs_integral == pytest.approx(1.0, rel=1e-8)


SMOOTH_PROFILES = [
    ("exp(-1*t)", 1, 1, 2, 2),
    ("exp(-1*t)", 1, 1, 2, 4),
    ("exp(-1*t) + 1/2*exp(-2*t)", 2, 1, 2, 2),
]


def test_parametrization_independence():
    worst, detail = 0.0, []
    for f, n, j, p, q in SMOOTH_PROFILES:
        spec = SurfaceSpec(parse_symfun(f, Interval(0.0)), n, j, make_exponents(p, q))
        x = chi_surface(spec, Direction.AT_INFINITY).chi
        s = chi_surface_arclength(spec, Direction.AT_INFINITY).chi
        assert x.is_finite and s.is_finite
        worst = max(worst, rel(s.value, x.value))
        detail.append(f"{x.value:.10g}")
    ok = worst <= 1e-5
    record(11, "parametrization independence", ok, f"chi0 = {', '.join(detail)}; worst deviation {worst:.3g}")
    assert ok


def run_cli(command: str, path: Path) -> bytes:
    out = subprocess.run([sys.executable, "-m", "warpedhardy", command, str(path)], capture_output=True, check=True)
    return out.stdout


def test_cli_determinism():
    runs = [("hardy", "hardy_unit_interval.json"), ("interval", "interval_unit_halfline.json"),
            ("surface", "surface_exp_decay.json")]
    differing = [name for cmd, name in runs if run_cli(cmd, GOLDEN / name) != run_cli(cmd, GOLDEN / name)]
    ok = not differing
    record(12, "CLI determinism on golden inputs", ok, f"{len(runs)} inputs, {len(differing)} differ")
    assert ok, differing


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
