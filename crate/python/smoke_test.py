"""Smoke test for the rankone_py extension module.

Build and install first:
    pip install --no-build-isolation -e crates/rankone-py
"""

import json
import math

import rankone_py


def close(a, b, tol):
    return abs(a - b) < tol


def main():
    volumes = {"H2R": 2 * math.pi, "H3R": 4 * math.pi, "H2C": 2 * math.pi**2}
    for name, vol in volumes.items():
        m = rankone_py.Model(name)
        assert m.name == name and repr(m) == f"Model('{name}')"
        assert close(m.vol_sphere, vol, 1e-12)
        value, err = m.c_integral(complex(m.rho_check, 0))
        assert close(value.real, vol, 1e-7), (name, value, err)
        assert abs(m.beta(1, complex(-m.rho_check, 0))) == 0.0
        print(f"{name}: rho = {m.rho_check}, c(rho) = {value.real:.12f}")

    h2r = rankone_py.Model("H2R")
    z = complex(0.7, 0.4)
    assert close(h2r.c_integral(z)[0], h2r.c_closed_form(z), 1e-6)
    assert close(h2r.scattering(complex(1e-6, 0), 1)[0], 1.0, 1e-4)

    k, u, n = h2r.iwasawa(h2r.exp_a(0.8))
    assert close(u, 0.8, 1e-12)

    try:
        rankone_py.Model("H5Q")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown model accepted")

    report = json.loads(rankone_py.verify("regularization", model="H2R", seed=3))
    assert report["passed"] and report["seed"] == 3
    print(f"regularization suite: {len(report['records'])} checks passed")
    print("smoke test ok")


if __name__ == "__main__":
    main()
