"""Smoke test for the Python bindings.

Build and install first, e.g. ``maturin develop --release -m crates/py/Cargo.toml``
or ``pip install target/wheels/streamseq-*.whl``.
"""

import streamseq as ss


def main():
    log = ss.EventLog.parse("1,a\n2,b\n3,a\n4,b\n5,c\n6,a\n7,b\n8,c\n")
    assert len(log) == 8 and log.labels() == ["a", "b", "c"]
    assert ss.EventLog.parse(log.to_text()).to_text() == log.to_text()

    params = ss.MiningParams("9/20", 0.2, span=2)
    w0 = ss.mine(log, params, [4])
    assert w0.frequent == [(["a"], 3), (["a", "b"], 2), (["b"], 3)], w0.frequent
    assert w0.border == [(["b", "a"], 1)], w0.border

    delta = ss.mine(log, params, [4], start=4)
    updated, work = ss.ius_update(log, w0, delta)
    composed = ss.mine(log, params, [4, 4])
    assert updated.frequent == composed.frequent
    assert updated.blocks == [(0, 4), (4, 8)]
    assert set(work) == {"window_evaluations", "lookups", "rescans_old", "rescans_delta"}
    assert ss.PatternSet.parse(updated.to_text(), log).to_text() == updated.to_text()

    sym_diff, union, d = ss.distance(w0, w0)
    assert (sym_diff, d) == (0, 0.0)
    assert 0.0 <= ss.distance(w0, updated)[2] <= 1.0

    assert ss.min_max_normalize([3.0, 1.0, 2.0]) == [1.0, 0.0, 0.5]
    assert ss.find_intersections([0.0, 1.0], [0.0, 1.0], [1.0, 0.0]) == [0.5]

    gen = ss.generate(40, 6000, seed=3, embedded=[([1, 2], 120.0)],
                      drift_at=1500, drift_embedded=[([5, 6], 300.0)])
    assert gen.event_count == 6000
    assert ss.generate(40, 6000, seed=3, embedded=[([1, 2], 120.0)],
                       drift_at=1500, drift_embedded=[([5, 6], 300.0)]).to_text() == gen.to_text()
    points = ss.sweep(gen, 1000, [200, 400, 600, 800],
                      ss.MiningParams("0.05", "0.005", 2))
    rec = ss.recommend(points, 1000)
    assert len(points) == 4 and all(p.speedup > 0 for p in points)
    assert {"crossings", "ratio", "degenerate"} <= set(rec)

    try:
        ss.MiningParams("0.1", "0.2", 2)
    except ValueError:
        pass
    else:
        raise AssertionError("inverted thresholds accepted")

    print("streamseq smoke test passed:", updated, "ratio", rec["ratio"])


if __name__ == "__main__":
    main()
