"""Smoke test for the `brane` Python extension.

Install first:  pip install --no-build-isolation -e crates/python
"""

from fractions import Fraction

import brane


def main():
    p = brane.Term("phago n.exo k[void] o cophago n{coexo m}.exo m[phago j[void]]")
    assert p.type == "sys"
    assert p == brane.Term("cophago n{coexo m}.exo m[phago j[void]] o phago n.exo k[void]")

    target = brane.Term("exo m[coexo m[exo k[void]] o phago j[void]]")
    steps = p.steps()
    assert ("id", target.normalize(), "id-phago-L(phago(phago-pref), cophago(cophago-pref))") in steps, steps

    rates = brane.RateTable("phago n = 2\ndefault = 1")
    assert brane.theta_sys("id", p, [target], rates) == Fraction(2)
    assert brane.behaviour(p, rates)["id"] == {target.normalize(): Fraction(2)}

    sta, tra = brane.export_ctmc(p, rates)
    assert tra == "2 1\n0 1 2\n", tra
    assert len(sta.splitlines()) == 2

    a = brane.Term("pino n{0} | pino n{0}[void]")
    b = brane.Term("pino n{0}.pino n{0}[void]")
    assert brane.strong_bisim(a, b)[0]
    same, why = brane.rate_bisim(a, b, brane.RateTable.uniform("2"))
    assert not same and "pino n" in why, why

    runs = brane.simulate(p, rates, seed=7, t_max=10.0, runs=3)
    assert runs == brane.simulate(p, rates, seed=7, t_max=10.0, runs=3)
    assert all(r[0] == (0.0, p.normalize()) for r in runs)

    try:
        brane.Term("\\X:sys. $X o $X")
    except ValueError as e:
        assert "more than once" in str(e)
    else:
        raise AssertionError("non-linear term accepted")

    print("brane smoke test passed:", brane.SSA_ALGORITHM)


if __name__ == "__main__":
    main()
