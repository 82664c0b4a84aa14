"""Smoke test for the qsatom_py extension module.

Build and install first:
    cd crates/python && maturin build --release -o dist && pip install dist/qsatom_py-*.whl
"""

import math

import qsatom_py as q


def main():
    fig = q.ScatteringScalars(-0.03, 0.13, 0.005, 0.005, 0.02, -0.001)

    plateau = fig.norm2_pg_minus + math.sin(fig.delta0_minus) ** 2
    tot, el, inel = q.cross_sections(fig, q.DriveConfig(10.0, 1e4))
    assert abs(tot - plateau) < 5e-4 and abs(plateau - 0.0218) < 5e-5, (tot, plateau)
    assert abs(el + inel - tot) <= 1e-12 * tot

    tot, el, inel = q.cross_sections(q.ScatteringScalars.mollow(), q.DriveConfig(1.0, 0.0))
    assert (tot, el, inel) == (1 / 3, 1 / 9, 2 / 9)

    u, v = q.equilibrium(fig, q.DriveConfig(28.0, 3.0))
    assert 0.0 <= u <= 1.0 and abs(v) ** 2 <= u * (1 - u) + 1e-12
    ut, vt = q.evolve(fig, q.DriveConfig(28.0, 3.0), 200.0)
    assert abs(ut - u) < 1e-10 and abs(vt - v) < 1e-10

    xs = [-10.0, -5.0, 0.0, 5.0, 10.0]
    s_tot, s_inel, s_el = q.spectrum(q.ScatteringScalars.mollow(), q.DriveConfig(25.0, 0.0, 0.6), xs)
    assert all(abs(a - b) <= 1e-14 * a for a, b in zip(s_inel, reversed(s_inel)))
    assert all(abs(t - i - e) <= 1e-15 for t, i, e in zip(s_tot, s_inel, s_el))

    try:
        q.spectrum(fig, q.DriveConfig(10.0, 0.0, 0.0), xs)
    except ValueError:
        pass
    else:
        raise AssertionError("zero instrumental width must be rejected")

    try:
        q.ScatteringScalars(0.0, 0.0, 0.01, 0.01, 1.0, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("triangle bound must be enforced")

    assert abs(q.threshold_eta2() - 1 / 16) < 1e-9

    passed, checks = q.verify(random_sets=100)
    failed = [c for c in checks if not c[3]]
    assert passed and not failed, failed

    print(f"qsatom_py smoke test OK ({len(checks)} verification checks passed)")


if __name__ == "__main__":
    main()
