"""Smoke test for the majorant_py extension.

Build and install first:
    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

import json
import math

import mpmath

import majorant_py as m


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    close(m.erf(0.5), float(mpmath.erf(0.5)), 1e-15)
    close(m.erfc(6.0), float(mpmath.erfc(6.0)), 1e-28)
    close(m.erf(m.inv_erf(0.3)), 0.3, 1e-15)
    close(m.j0(7.5), float(mpmath.besselj(0, 7.5)), 1e-14)
    assert m.erf(math.inf) == 1.0

    ball = m.ball_check(2.0)
    assert ball and ball.kind == "strict"
    close(ball.lhs, 2.0 / 3.0, 1e-9)
    eq = m.ball_check(1.0)
    assert eq.kind == "equality" and abs(eq.margin) <= 1e-9

    db = m.discrete_ball_check(2, 2.0)
    close(db.lhs, 0.5, 1e-9)
    assert db.ok and db.rhs > db.lhs

    assert set(m.lemma_names()) >= {"erfc_engineering", "lemma_final", "lemma_james"}
    assert m.named_lemma_check("erfc_series", [1.5]).ok

    f = m.Density("gauss_pi")
    g = m.Density("sinc_sq")
    close(f.mass()[0], 1.0, 1e-12)
    v = m.majorization_verdict(f, g)
    assert v.passed and v.characterizations_agree, v
    assert not m.majorization_verdict(g, f).passed

    t = m.TransportMap(g, f)
    assert t.sup_derivative([0.1 * k for k in range(61)])[2]
    assert abs(t.inverse()(t(0.37)) - 0.37) < 1e-8

    counts = m.slice_counts([40, 40, 40])
    assert sum(counts) == 40 ** 3 and counts == counts[::-1]
    assert m.slice_bound_check([3, 5, 7]).ok
    assert 0.999 * math.sqrt(2) < m.tightness_ratio(2000) < math.sqrt(2)

    gap = m.entropy_of("gaussian", [0.0, 0.8], 2.0) - m.entropy_of("gaussian", [], 2.0)
    close(gap, math.log(0.8), 1e-9)
    h = m.entropy_of("gaussian", [], 3.0)
    close(m.psi(3.0, h), m.entropy_of("gaussian", [], 3.0, kind="tsallis"), 1e-12)

    code, text = m.run_suite("discrete-ball", n="2..4", p=[2, 4.5], grid=257)
    report = json.loads(text)
    assert code == 0 and report["schema"] == 1 and report["summary"]["failed"] == 0

    try:
        m.Density("no_such_density")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    print("smoke test passed")


if __name__ == "__main__":
    main()
