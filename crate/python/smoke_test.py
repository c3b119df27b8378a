#!/usr/bin/env python3
"""Smoke test for the dpc_py extension module.

Builds nothing itself: run `cargo build -p dpc-py` (or --release) first,
then `python3 python/smoke_test.py`. The script stages the compiled cdylib
under an importable name in a temporary directory and exercises the main
types and operations end to end.
"""

import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def stage_module(tmpdir):
    candidates = [
        os.path.join(ROOT, "target", profile, "libdpc_py.so")
        for profile in ("release", "debug")
    ]
    built = [p for p in candidates if os.path.exists(p)]
    if not built:
        sys.exit(
            "libdpc_py.so not found; build it first with: cargo build -p dpc-py"
        )
    newest = max(built, key=os.path.getmtime)
    shutil.copy(newest, os.path.join(tmpdir, "dpc_py.so"))
    sys.path.insert(0, tmpdir)


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def check_rng(dpc):
    a = dpc.RngStream(42, 0)
    b = dpc.RngStream(42, 0)
    assert [a.u01() for _ in range(4)] == [b.u01() for _ in range(4)]
    child = a.substream(7)
    assert child.stream_id == 7
    u = a.uniform(-2.0, 3.0)
    assert -2.0 <= u < 3.0
    assert 0 <= a.index(10) < 10
    assert math.isfinite(a.standard_normal())


def check_lattice(dpc):
    hexl = dpc.Lattice.hexagonal(1.0)
    assert hexl.k == 2
    approx(hexl.cell_volume(), 1.0, 1e-9)
    # A lattice point reduces to the origin.
    g = hexl.generator_rows()
    point = [3 * g[0][0] - 2 * g[1][0], 3 * g[0][1] - 2 * g[1][1]]
    folded = hexl.mod_lattice(point)
    assert max(abs(c) for c in folded) < 1e-9
    rng = dpc.RngStream(5, 1)
    dither = hexl.sample_dither(rng)
    assert hexl.nearest_point(dither) == [0.0, 0.0]
    second = hexl.second_moment_grid(128)
    assert 0.07 < second < 0.09  # hexagonal cell at volume 1

    rep = dpc.Lattice.construction_a([(0, 0), (1, 1)], 2, 1.0)
    assert rep.k == 2
    scalar = dpc.Lattice.scalar(4.0)
    # Voronoi reduction maps to the nearest lattice point: 5 - 4 = 1.
    approx(scalar.mod_lattice([5.0])[0], 1.0, 1e-12)


def check_constellation(dpc):
    bpsk = dpc.Constellation.bpsk()
    assert bpsk.points() == [[-1.0], [1.0]]
    approx(bpsk.average_power(), 1.0)
    qpsk = dpc.Constellation.qpsk(3.0)
    assert qpsk.cardinality == 4 and len(qpsk) == 4
    approx(qpsk.average_power(), 9.0, 1e-9)
    from_lat = dpc.Constellation.from_lattice(dpc.Lattice.hexagonal(1.0), 4)
    assert from_lat.k == 2 and from_lat.cardinality == 4


def check_classical(dpc):
    delta = 4.0
    v, s, u, n = 1.0, 13.7, 0.25, 0.05
    x = dpc.thp_encode(v, s, u, delta)
    assert -delta / 2 <= x < delta / 2
    y = x + s + n
    folded = dpc.thp_receive(y, u, delta)
    want = v + n - round((v + n) / delta) * delta
    approx(folded, want, 1e-9)

    approx(dpc.mmse_alpha(1.0, 1.0), 0.5)
    approx(dpc.q_function(0.0), 0.5, 1e-12)
    ser = dpc.bpsk_awgn_ser(dpc.from_db(0.0))
    approx(ser, dpc.q_function(math.sqrt(2.0)), 1e-12)
    exact = dpc.thp_ser_exact(4.0, 2, 0.25)
    assert 0.0 < exact < 1.0
    approx(dpc.to_db(10.0), 10.0, 1e-12)
    assert dpc.dpc_capacity_bits(1.0, 1.0) == 0.5

    lat = dpc.Lattice.hexagonal(8.0)
    cons = dpc.Constellation.from_lattice(lat, 4)
    dpcod = dpc.LatticeDpc(lat, cons, 1.0)
    rng = dpc.RngStream(11, 2)
    uv = dpcod.sample_dither(rng)
    xv = dpcod.encode(2, [7.5, -3.25], uv)
    yv = [xv[0] + 7.5, xv[1] - 3.25]  # noiseless channel
    assert dpcod.detect(dpcod.receive(yv, uv)) == 2


def check_neural(dpc, tmpdir):
    cons = dpc.Constellation.bpsk()
    chan = dpc.ChannelConfig(1, "gaussian:30", 1.0)
    assert chan.interference == "gaussian:30"
    ckpt, losses = dpc.train(
        cons,
        chan,
        lambda_=100.0,
        epochs=2,
        steps_per_epoch=10,
        batch_size=64,
        hidden_width=16,
        hidden_layers=2,
        seed=7,
    )
    assert len(losses) == 2 and all(math.isfinite(l) for l in losses)
    assert ckpt.k == 1 and ckpt.cardinality == 2
    assert ckpt.lambda_ == 100.0 and ckpt.seed == 7
    assert ckpt.activation == "sin"
    assert ckpt.param_count > 0
    assert "cmd=train" not in ckpt.config_echo  # library path, no CLI echo prefix

    path = os.path.join(tmpdir, "model.ndpc")
    ckpt.save(path)
    again = dpc.Checkpoint.load(path)
    assert bytes(again.to_bytes()) == bytes(ckpt.to_bytes())
    assert dpc.Checkpoint.from_bytes(bytes(ckpt.to_bytes())).seed == 7

    x = ckpt.encode(1, [2.5])
    assert len(x) == 1 and math.isfinite(x[0])
    probs = ckpt.decode_probs([0.3])
    approx(sum(probs), 1.0, 1e-9)
    assert ckpt.decode([0.3]) in (0, 1)

    report = dpc.evaluate(ckpt, chan, n_samples=4096, seed=3)
    assert 0.0 <= report["ser"] <= 1.0
    assert report["n_samples"] == 4096
    assert report["power"] > 0.0
    assert math.isfinite(report["snr_db"])

    rows = dpc.encoder_map(ckpt, lo=-6.0, hi=6.0, resolution=5)
    assert len(rows) == 5 and len(rows[0]) == 3  # s plus one column per message

    curve = dpc.thp_curve(chan, 2, [8.0], n_samples=4096, seed=1)
    assert len(curve) == 1
    assert curve[0]["scheme"].startswith("thp")
    assert 0.0 <= curve[0]["ser"] <= 1.0


def check_errors(dpc):
    try:
        dpc.Constellation.qpsk(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative scale accepted")
    try:
        dpc.Checkpoint.load("/nonexistent/model.ndpc")
    except IOError:
        pass
    else:
        raise AssertionError("missing checkpoint accepted")


def main():
    with tempfile.TemporaryDirectory() as tmpdir:
        stage_module(tmpdir)
        import dpc_py as dpc

        assert dpc.__version__
        check_rng(dpc)
        check_lattice(dpc)
        check_constellation(dpc)
        check_classical(dpc)
        check_neural(dpc, tmpdir)
        check_errors(dpc)
    print("smoke test passed")


if __name__ == "__main__":
    main()
