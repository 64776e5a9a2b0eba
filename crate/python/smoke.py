"""Smoke test for the hyperkg_py extension. Run with pytest or as a script."""

import cmath
import math

import hyperkg_py as hk


def test_h3_closed_form():
    lam, r = 2.0, 1.3
    got = hk.spherical_phi(3, lam, r)
    assert abs(got - math.sin(lam * r) / (lam * math.sinh(r))) < 1e-12
    assert abs(hk.spherical_phi(4, 0.7, 0.0) - 1) < 1e-14
    assert abs(hk.phi_zero(3, 1.0) - 1 / math.sinh(1.0)) < 1e-12


def test_kernel_conjugation():
    a, _ = hk.kernel(3, "w0", 3.0, 1.5, 0.5)
    b, _ = hk.kernel(3, "w0", 3.0, -1.5, 0.5)
    assert cmath.isclose(a, b.conjugate(), abs_tol=1e-12)


def test_exponents():
    c = hk.critical_powers(3)
    assert c["gamma_conf"] == 3.0 and abs(c["gamma4"] - 5.0) < 1e-12
    assert hk.critical_powers(2)["gamma4"] is None
    r = hk.min_regularity(3, 2.5, 1 / 400)
    assert r["branch"] == "sigma2" and abs(r["sigma_min"] - 1 / 3) < 1e-12
    assert r["oracle_gap"] <= 4 / 400
    assert hk.is_admissible(4, 0.5, 0.2)
    assert abs(hk.sigma_pq(4, 0.5, 0.2) - 0.75) < 1e-15
    assert abs(hk.stationary_point(1.0, 0.5, 1.0) - 1 / math.sqrt(3)) < 1e-14


def test_errors_are_value_errors():
    for call in (lambda: hk.critical_powers(1), lambda: hk.min_regularity(4, 3.5), lambda: hk.kernel(3, "x", 3.0, 1.0, 1.0)):
        try:
            call()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
