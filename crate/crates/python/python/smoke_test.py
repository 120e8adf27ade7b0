"""Smoke test for the pyfewnomial extension module."""

import json
from pathlib import Path

import pyfewnomial as fw

WORKED = (Path(__file__).resolve().parents[3] / "data" / "worked_example.json").read_text()


def main():
    sys = fw.System.from_json(WORKED)
    assert sys.n == 2
    assert sys.block_sizes() == [1, 1]
    assert sys.lattice_index() == 1
    assert fw.System.from_json(sys.to_json()).to_json() == sys.to_json()

    report = sys.best_bound()
    assert report["positive"] == 5 and report["real"] == 20
    assert report["bounds"]["mixed_real"]["bound"]["integer_bound"] == 57

    assert sys.count_positive() == 1
    assert sys.count_real() == 2
    phi = (1 + 5 ** 0.5) / 2
    sols = sys.solve(positive_only=True)
    assert abs(sols["points"][0]["x"][0] - phi) < 1e-9

    gale = sys.gale_system()
    assert len(gale["alpha"]) == 2
    assert sys.verify_gale()["passed"]

    assert fw.khovanskii_bound(1, 1)["integer_bound"] == 8
    assert fw.bs07_positive_bound(2, 2)["integer_bound"] == 20
    assert fw.bbs_real_bound(2, 2)["integer_bound"] == 115
    assert fw.mixed_bound([1, 1])["integer_bound"] == 10
    assert fw.mixed_bound([1, 1], "real")["integer_bound"] == 57
    assert [fw.a_k([1, 1], k) for k in range(3)] == [4, 6, 9]
    assert fw.multinomial(3, [1, 2]) == 3
    assert fw.verify_inequalities([1, 1, 1])["passed"]

    assert fw.lattice_index([[2, 0], [0, 1], [0, 2], [1, 0]]) == 1
    assert fw.lattice_index([[2, 0], [0, 2]]) == 4
    basis = fw.kernel_basis([[2, 0], [0, 1], [0, 2], [1, 0]])
    assert len(basis) == 2

    suite = fw.detdeg_suite([1, 1], trials=5, seed=1)
    assert suite["violations"] == 0 and suite["minor_violations"] == 0

    systems = fw.sample_systems([1, 1], 3, seed=7, odd_index=True)
    assert len(systems) == 3
    assert all(s.lattice_index() % 2 == 1 for s in systems)

    try:
        fw.System.from_json('{"n": 1, "polys": [[{"e": [1], "c": "0"}]]}')
    except ValueError as e:
        assert "zero coefficient" in str(e)
    else:
        raise AssertionError("zero coefficient accepted")

    print(json.dumps({"module": fw.__version__, "smoke": "ok"}))


if __name__ == "__main__":
    main()
