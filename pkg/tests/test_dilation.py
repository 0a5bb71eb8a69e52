import json
import math
from fractions import Fraction as F

import pytest

from fourier_dilation.cocycle import delta_psi, hamming_psi
from fourier_dilation.crossed import DilationContext
from fourier_dilation.dilation import (
    SCHEMA_VERSION,
    DilationReport,
    Check,
    builtin_pairs,
    explain,
    time_pairs,
    verify_markov,
    verify_reversed,
    verify_structure,
)
from fourier_dilation.groups import make_cyclic, make_dihedral, make_hypercube


@pytest.fixture(scope="module")
def z3():
    return DilationContext.build(delta_psi(make_cyclic(3)), horizon=2)


def test_builtin_pairs_cover_sweep():
    names = [p.group.name for p in builtin_pairs()]
    assert len(names) == 12 and len(set(names)) == 12


def test_time_pairs():
    pairs = time_pairs([0, F(1, 2), 1])
    assert pairs == [(0, 0), (0, F(1, 2)), (0, 1), (F(1, 2), F(1, 2)), (F(1, 2), 1), (1, 1)]
    assert all(u <= 2 for _, u in time_pairs(reversed_=True, horizon=2))
    assert max(u for _, u in time_pairs([0, 1, 3], reversed_=True, horizon=2)) == 1


def test_markov_passes_and_counts(z3):
    rep = verify_markov(z3, times=[(0, 1), (F(1, 4), F(3, 2))])
    kinds = {c.kind for c in rep.checks}
    assert kinds == {"markov", "markov_product"}
    # 3 basis + 5 random inputs, 9 basis products + 5 random products, 2 time pairs
    assert len(rep.checks) == 2 * (8 + 14)
    assert rep.passed and rep.max_residual < 1e-12


def test_malformed_time_pairs(z3):
    with pytest.raises(ValueError, match="malformed"):
        verify_markov(z3, times=[(1, F(1, 2))])
    with pytest.raises(ValueError):
        verify_reversed(z3, times=[(F(1, 2), 3)])
    with pytest.raises(ValueError):
        verify_reversed(z3, times=[(1, F(1, 2))])
    with pytest.raises(ValueError):
        verify_reversed(DilationContext.build(delta_psi(make_cyclic(3))))


def test_reversed_passes(z3):
    rep = verify_reversed(z3)
    assert rep.passed and rep.max_residual < 1e-12
    assert {c.kind for c in rep.checks} == {"reversed", "reversed_product"}


def test_structure_suite_small():
    ctx = DilationContext.build(hamming_psi(make_hypercube(2)))
    rep = verify_structure(ctx, samples=5)
    kinds = {c.kind for c in rep.checks}
    assert {"cocycle.gram", "weyl.cond_exp_tower", "crossed.plancherel", "crossed.pi_t_homomorphism"} <= kinds
    assert rep.passed, [(c.kind, c.residual) for c in rep.failures()]
    assert set(rep.extra["schoenberg"]) == {"0.1", "0.5", "1.0", "2.0", "5.0"}


def test_report_is_deterministic(z3):
    def run():
        d = verify_structure(z3, samples=3, seed=7).merge(verify_markov(z3, seed=7)).to_dict()
        d.pop("wall_time")
        return json.dumps(d, sort_keys=True)

    assert run() == run()


def test_report_json_schema(z3):
    rep = verify_markov(z3, times=[(0, 1)])
    d = json.loads(rep.to_json())
    assert d["schema_version"] == SCHEMA_VERSION
    assert {"group", "psi", "cocycle_dim", "tolerance", "passed", "max_residual", "checks", "wall_time"} <= set(d)
    c = d["checks"][0]
    assert set(c) == {"kind", "params", "residual", "tolerance", "passed"}


def test_report_failures_and_worst():
    rep = DilationReport("Z2", {}, 1, 1e-9, [Check("a", {}, 1e-12, 1e-9), Check("b", {}, 1e-3, 1e-9)])
    assert not rep.passed
    assert [c.kind for c in rep.failures()] == ["b"]
    assert rep.worst("a") == 1e-12 and rep.max_residual == 1e-3


def test_corrupted_context_fails_markov():
    ctx = DilationContext.build(delta_psi(make_dihedral(3)))
    bad_pi = ctx.corrupted(pi_entry=(1, 0, 0))
    assert not verify_markov(bad_pi).passed
    bad_psi = ctx.corrupted(psi_index=1)
    assert not verify_markov(bad_psi).passed


def test_explain_mentions_factor():
    ctx = DilationContext.build(delta_psi(make_cyclic(2)))
    text = explain(ctx, 1, F(1, 2), 1)
    assert f"{math.exp(-0.5):.10f}" in text
    with pytest.raises(ValueError):
        explain(ctx, 1, 1, F(1, 2))
