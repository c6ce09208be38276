"""CLI: reference CSV rows, determinism, cache behavior, exit codes."""

from __future__ import annotations

import io
import os
import sys

import pytest

from wjforms.cli import main


def run(argv):
    out = io.StringIO()
    old = sys.stdout
    sys.stdout = out
    try:
        code = main(argv)
    finally:
        sys.stdout = old
    return code, out.getvalue()


def test_dims_reference_rows():
    code, out = run(["dims", "--m-max", "6"])
    assert code == 0
    rows = dict()
    for line in out.strip().splitlines()[1:]:
        m, b, dim, hat = map(int, line.split(","))
        rows[(m, b)] = (dim, hat)
    assert rows[(1, 1)] == (1, 1)
    assert rows[(4, 2)] == (2, 1)
    assert rows[(6, 2)] == (2, 1)
    assert rows[(5, 1)] == (0, 0)


def test_pplus_spot_value():
    code, out = run(["pplus", "--m-max", "54"])
    assert code == 0
    assert out.strip().splitlines()[54] == "54,25"


def test_pm_and_pminus():
    code, out = run(["pm", "--m-max", "8"])
    assert code == 0
    assert out.splitlines()[1] == "1,1"
    code, out = run(["pminus", "--m-max", "12"])
    assert out.strip().splitlines()[-1] == "12,2"


def test_anchored_sums_reference_lines():
    code, out = run(["f", "--m", "6", "--a", "1", "--b", "5", "--n-max", "3", "--l-max", "10"])
    assert code == 0
    for line in out.strip().splitlines()[1:]:
        n, l, v = line.split(",")
        n, l, v = int(n), int(l), int(v)
        expected = -2 if (2 * n + l == 0 or 3 * n + l == 0) else 0
        assert v == expected, (n, l)


def test_polar_csv():
    code, out = run(["polar", "--m", "6"])
    assert code == 0
    assert len(out.strip().splitlines()) == 9  # header + 8 polar terms
    assert out.splitlines()[1] == "0,6,36"


def test_quotients_csv():
    code, out = run(["quotients", "--m", "6"])
    assert code == 0
    assert out.strip().splitlines()[1:] == ["6,1,1,1", "6,2,2,1"]
    code, out = run(["quotients", "--m", "6", "--b", "1", "--specs"])
    assert out.strip().splitlines()[1] == "6,1,4,2"


def test_classify_row(tmp_path):
    code, out = run(["classify", "--m", "5", "--a", "1", "--b", "5", "--l-max", "10"])
    assert code == 0
    assert out.strip().splitlines()[1] == "5,1,5,5,1,slow"


def test_chi_constant():
    code, out = run(["chi", "--m", "1", "--b", "1"])
    assert code == 0
    assert out.strip().splitlines()[1] == "0,1,12"


def test_byte_identical_reruns(tmp_path):
    args = ["dims", "--m-max", "8", "--output"]
    p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(args + [p1]) == 0
    assert main(args + [p2]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_cache_hit_matches_cold_run(tmp_path):
    cache = str(tmp_path / "cache")
    cold_code, cold = run(["basis", "--m", "4", "--order", "4", "--cache-dir", cache])
    assert cold_code == 0
    assert os.path.exists(os.path.join(cache, "basis_m4_o4.txt"))
    # force a re-read from disk
    from wjforms import forms

    forms._basis_cache.clear()
    warm_code, warm = run(["basis", "--m", "4", "--order", "4", "--cache-dir", cache])
    assert warm_code == 0
    assert warm == cold


def test_cache_rejects_corruption(tmp_path):
    from wjforms import cache as diskcache

    cache = str(tmp_path)
    run(["basis", "--m", "2", "--order", "3", "--cache-dir", cache])
    path = diskcache.cache_path(cache, 2, 3)
    body = open(path).read()
    open(path, "w").write(body.replace("WJF1", "WJF9"))
    with pytest.raises(ValueError):
        diskcache.load_basis(cache, 2, 3)


def test_insufficient_order_is_domain_error(capsys):
    code = main(["f", "--m", "6", "--a", "1", "--b", "5", "--n-max", "3",
                 "--l-max", "10", "--order", "5"])
    assert code == 1
    assert "insufficient" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["f", "--m", "6"])  # missing --b
    assert exc.value.code == 2


def test_figures(tmp_path):
    code, _ = run(["figures", "--m-max", "6", "--out-dir", str(tmp_path)])
    assert code == 0
    names = sorted(os.listdir(tmp_path))
    assert names == [
        "min_max_polarity.svg",
        "polarity_upper_bound.svg",
        "slow_dim_lower_bound.svg",
        "slow_dimensions.svg",
    ]
    first = (tmp_path / "min_max_polarity.svg").read_text()
    assert first.startswith("<svg") and "circle" in first
