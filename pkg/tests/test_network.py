import io
import random
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import line_scan_counts
from netcournot.exceptions import NetworkError, ParameterError
from netcournot.network import (
    GameParams,
    MarketNetwork,
    generate_synthetic,
    load_network,
    stats,
    write_network,
)


def write_rows(path, rows, header="firm_id,market_id"):
    path.write_text(header + "\n" + "".join(f"{f},{m}\n" for f, m in rows), encoding="utf-8")
    return path


def test_load_single_edge(tmp_path):
    net = load_network(write_rows(tmp_path / "a.csv", [("f1", "m1")]))
    assert (net.n_firms, net.n_markets, net.n_edges) == (1, 1, 1)
    assert net.edges == ((0, 0),)


def test_load_rejects_duplicate_and_names_pair(tmp_path):
    path = write_rows(tmp_path / "d.csv", [("f1", "m1"), ("f1", "m1")])
    with pytest.raises(NetworkError, match=r"f1, m1"):
        load_network(path)


def test_load_rejects_bad_header(tmp_path):
    with pytest.raises(NetworkError, match="header"):
        load_network(write_rows(tmp_path / "h.csv", [("f1", "m1")], header="firm,market"))


def test_load_count_mismatch_reports_actual(tmp_path):
    path = write_rows(tmp_path / "b.csv", [("f1", "m1"), ("f1", "m2"), ("f2", "m1")])
    assert load_network(path, expected_counts=(2, 2, 3)).n_edges == 3
    with pytest.raises(NetworkError, match=r"\(2, 2, 3\)"):
        load_network(path, expected_counts=(2, 2, 4))


def test_first_appearance_ids_and_canonical_order(tmp_path):
    path = write_rows(tmp_path / "o.csv", [("zeta", "beta"), ("alpha", "gamma"), ("zeta", "gamma")])
    net = load_network(path)
    assert net.firm_ids == ("zeta", "alpha")
    assert net.market_ids == ("beta", "gamma")
    assert net.edges == ((0, 0), (0, 1), (1, 1))
    assert all(net.edge_of[e] == i for i, e in enumerate(net.edges))


def test_from_edges_rejects_isolated_and_out_of_range():
    with pytest.raises(NetworkError, match="isolated"):
        MarketNetwork.from_edges(2, 1, [(0, 0)])
    with pytest.raises(NetworkError, match="isolated"):
        MarketNetwork.from_edges(1, 2, [(0, 0)])
    with pytest.raises(NetworkError, match="out of range"):
        MarketNetwork.from_edges(1, 1, [(0, 1)])


def test_stats_instances(instance_a, instance_b):
    s = stats(instance_a)
    assert (s.n_firms, s.n_markets, s.n_edges) == (1, 1, 1)
    s = stats(instance_b)
    assert (s.n_firms, s.n_markets, s.n_edges) == (2, 2, 3)
    assert instance_b.market_degrees().tolist() == [2, 1]
    assert s.market_degree_hist == {2: 1, 1: 1}
    assert sum(s.firm_degree_hist.values()) == 2
    assert sum(s.market_degree_hist.values()) == 2


@pytest.mark.parametrize(
    "counts,seed", [((1, 1, 1), 0), ((2, 2, 4), 3), ((3, 7, 7), 1), ((7, 3, 7), 2), ((135, 603, 2049), 7)]
)
def test_generate_exact_counts_no_isolated(counts, seed):
    net = generate_synthetic(*counts, seed=seed)
    assert (net.n_firms, net.n_markets, net.n_edges) == counts
    assert net.firm_degrees().min() >= 1 and net.market_degrees().min() >= 1
    assert list(net.edges) == sorted(net.edges)


def test_generate_complete_and_minimal():
    assert generate_synthetic(2, 2, 4, seed=3).edges == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert generate_synthetic(1, 1, 1, seed=0).edges == ((0, 0),)


@pytest.mark.parametrize("counts", [(2, 3, 2), (2, 2, 5), (0, 1, 1)])
def test_generate_infeasible(counts):
    with pytest.raises(NetworkError):
        generate_synthetic(*counts, seed=0)


def test_generate_seed_determinism():
    a = generate_synthetic(135, 603, 2049, seed=11)
    b = generate_synthetic(135, 603, 2049, seed=11)
    assert a.same_structure(b)
    differing = sum(
        not generate_synthetic(135, 603, 2049, seed=s).same_structure(generate_synthetic(135, 603, 2049, seed=s + 100))
        for s in range(10)
    )
    assert differing >= 1


def test_generated_round_trip(tmp_path):
    net = generate_synthetic(135, 603, 2049, seed=7)
    write_network(net, tmp_path / "e.csv")
    again = load_network(tmp_path / "e.csv", expected_counts=(135, 603, 2049))
    assert again.same_structure(net)
    assert stats(again).to_dict() == stats(net).to_dict()
    assert line_scan_counts(tmp_path / "e.csv") == (135, 603, 2049)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_loaded_round_trip(n, m, data):
    pairs = [(f, k) for f in range(n) for k in range(m)]
    chosen = data.draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    rows = [(f"F{f}", f"M{k}") for f, k in chosen]
    random.Random(len(rows)).shuffle(rows)
    with tempfile.TemporaryDirectory() as tmp:
        src = write_rows(Path(tmp) / "in.csv", rows)
        net = load_network(src)
        write_network(net, Path(tmp) / "out.csv")
        again = load_network(Path(tmp) / "out.csv")
        assert line_scan_counts(src) == (net.n_firms, net.n_markets, net.n_edges)
    assert again.same_structure(net)


def test_write_to_stream(instance_b):
    buf = io.StringIO()
    write_network(instance_b, buf)
    assert buf.getvalue() == "firm_id,market_id\nf1,m1\nf1,m2\nf2,m1\n"


def test_params_validation_and_gamma():
    p = GameParams.uniform(3, alpha=10.0, beta=1.0, c=1.0, q_t=0.5, budget=2.0)
    assert p.gamma == 0.25
    assert p.replace(c=3.0).gamma == 1.0 / 8.0
    assert p.symmetric
    assert not GameParams(alpha=[1.0, 2.0]).symmetric
    for bad in [dict(alpha=[0.0]), dict(alpha=[1.0], beta=0), dict(alpha=[1.0], c=-1), dict(alpha=[1.0], q_t=-1)]:
        with pytest.raises(ParameterError):
            GameParams(**bad)
    with pytest.raises(ValueError):
        p.alpha[0] = 3.0
    np.testing.assert_allclose(p.price_bounds, 10.0)
