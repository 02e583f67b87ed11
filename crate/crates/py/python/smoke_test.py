"""Smoke test for the pygridnav extension module."""

import math
import tempfile

import pygridnav as gn


def main():
    g = gn.Grid.wall(5, 5)
    assert (g.width, g.height) == (5, 5)
    assert not g.is_free(2, 0)

    r = gn.plan(g, (0, 0), (4, 0))
    assert abs(r.cost - (8 + 2 * math.sqrt(2))) < 1e-12, r
    assert r.path[0] == (0, 0) and r.path[-1] == (4, 0)

    d = gn.plan(g, (0, 0), (4, 0), algorithm="dijkstra")
    assert d.cost == r.cost and d.expanded >= r.expanded

    cmp = gn.compare(gn.Grid.wall(100, 100), (5, 5), (95, 5))
    assert cmp["expanded_ratio"] < 0.75, cmp

    try:
        gn.plan(gn.Grid.wall(5, 5), (0, 0), (9, 9))
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-bounds goal accepted")

    s = gn.propagate((0.0, 0.0, 0.0), (1.0, 0.0), 0.1)
    assert abs(s[0] - 0.1) < 1e-15
    z = gn.predict_measurement((0.0, 0.0, 0.0), (3.0, 4.0))
    assert abs(z[0] - 5.0) < 1e-12

    with tempfile.TemporaryDirectory() as tmp:
        path = gn.write_reference_scenario(tmp)
        out = gn.run_scenario(path)
        assert out["outcome"] == "reached", out
        assert out["ekf_rmse"] < out["dead_reckoning_rmse"]
        print(f"reference scenario: {out['outcome']} in {out['steps']} steps, "
              f"final error {out['final_error']:.4f} m")

    print("smoke test passed")


if __name__ == "__main__":
    main()
