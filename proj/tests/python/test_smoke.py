from fractions import Fraction

import pytest

import assemblies_lab as al


@pytest.fixture(scope="module")
def setp():
    return al.AssemblySpec.builtin("set-partitions")


def test_counts(setp):
    assert al.count_pnk(setp, 4, 2) == 7
    assert al.count_p(setp, 10) == 115975
    maps = al.AssemblySpec.builtin("mappings")
    assert al.count_p(maps, 6) == 6**6
    assert maps.m(3) == 17


def test_exact_law_rationals(setp):
    law = al.component_law(setp, 6, 4)
    probs = dict(zip(map(tuple, law["support"]), law["prob"]))
    assert probs[(1, 1)] == Fraction(9, 13)
    assert probs[(2,)] == Fraction(4, 13)


def test_low_rank_log_mode(setp):
    law = al.low_rank_law(setp, 200, 8, mode="log")
    assert abs(sum(law["l1_pmf"]) - 1.0) < 1e-9


def test_custom_assembly():
    spec = al.AssemblySpec.custom("pairs-only", [1, 1])
    assert al.count_p(spec, 4) == 10  # involutions on 4 points


def test_bounds_containment(setp):
    rep = al.bounds_report(setp, 10000, 10)
    assert rep["hyp_24"] and rep["hyp_needed"]
    exact = al.low_rank_law(setp, 10000, 10, mode="log")
    p3 = sum(p for c, p in zip(exact["support"], exact["prob"]) if c and max(c) == 2)
    assert p3 <= rep["l1_eq3_bound"] + 1e-9


def test_sampler_deterministic(setp):
    a = al.sample_components(setp, 30, 25, seed=5, samples=20)
    b = al.sample_components(setp, 30, 25, seed=5, samples=20)
    assert a == b
    assert all(sum(c) == 5 for c in a)


def test_solvers_and_limits(setp):
    x = al.solve_x_T(setp, 25)
    total = sum(i * al.lambda_i(setp, x, i) for i in range(1, 26))
    assert abs(total - 25.0) < 1e-8
    assert al.lambda_limit(setp, 1.0) == pytest.approx(2.0 / 3.0)


def test_largest_part_table():
    t = al.LargestPartTable(8)
    assert t.total == 22
    assert t.prob_eq(8) == Fraction(1, 22)


def test_errors(setp):
    with pytest.raises(al.DivergenceError):
        al.egf_M(setp, 100.0)
    with pytest.raises(al.NoSolutionError):
        al.solve_theta_x(setp, 10, 10)
