"""Smoke test for the affode Python extension."""

import json

import affode_py as af


def main():
    e = af.Expr("y'^3 + x")
    assert str(e.partial("y'")) == "3*y'^2"
    assert e.eval({"x": "1/2", "y'": "2"}) == "17/2"
    assert (e - e).is_zero()

    free = af.Ode("0")
    assert free.is_linearizable()
    assert free.branch() == "flat"
    assert all(i.is_zero() for i in free.invariants())

    ode = af.Ode("y'^3 + x")
    assert not ode.is_linearizable()
    r1, r2, r3 = ode.closure_residuals()
    assert str(r2) == "-x"
    assert af.Ode("y'^4").closure_residuals() is None
    assert str(af.Ode("y").relative_invariant()) == "1"

    report = json.loads(af.analyze("-3*y'/(2*x)"))
    assert report["branch"] == "flat" and report["curvature_zero"] is True
    k = json.loads(af.curvature("y'^3"))
    assert all(v == "0" for row in k["entries"] for v in row)
    suite = json.loads(af.verify("all"))
    assert suite["failed"] == 0

    try:
        af.curvature("y")
    except RuntimeError as err:
        assert "1" in str(err)
    else:
        raise AssertionError("non-flat curvature should raise")
    try:
        af.Expr("x +* y")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error should raise")

    print("smoke test passed")


if __name__ == "__main__":
    main()
