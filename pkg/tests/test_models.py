import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specgraph.models import (
    DCSBM,
    ER,
    IERM,
    LSM,
    SBM,
    ExpectedMatrix,
    Graph,
    PlantedPartition,
    expected_matrix,
    max_expected_degree,
    model_from_json,
    model_to_json,
    planted_labels,
    read_labels,
    sample,
    write_labels,
)


def dense_adjacency(g):
    return g.adjacency().toarray()


# ---------------------------------------------------------------------------
# sampling basics
# ---------------------------------------------------------------------------

def test_er_p1_is_complete():
    g, labels = sample(ER(1.0), 4, 0)
    assert g.m == 6
    A = dense_adjacency(g)
    assert np.array_equal(A, np.ones((4, 4)) - np.eye(4))
    assert np.array_equal(labels, np.ones(4, dtype=np.int64))


def test_er_p0_is_empty():
    g, _ = sample(ER(0.0), 100, 1)
    assert g.m == 0
    assert g.n == 100


def test_sample_symmetric_zero_diagonal_binary():
    g, _ = sample(PlantedPartition(5.0, 1.0), 60, 3)
    A = dense_adjacency(g)
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)
    assert set(np.unique(A)) <= {0.0, 1.0}
    assert np.all(g.w == 1.0)


def test_sample_deterministic_given_seed():
    spec = DCSBM((0.4, 0.6), ((0.9, 0.1), (0.1, 0.7)), tuple([0.5, 1.0] * 15))
    g1, l1 = sample(spec, 30, 42)
    g2, l2 = sample(spec, 30, 42)
    assert g1 == g2
    assert np.array_equal(l1, l2)
    g3, _ = sample(spec, 30, 43)
    assert g1 != g3  # astronomically unlikely to collide


def test_planted_partition_split_convention():
    labels = planted_labels(PlantedPartition(3.0, 1.0), 5)
    assert labels.tolist() == [1, 1, 1, 2, 2]  # odd node goes to community 1
    _, sampled = sample(PlantedPartition(3.0, 1.0), 7, 0)
    assert sampled.tolist() == [1, 1, 1, 1, 2, 2, 2]


def test_sbm_labels_need_rng():
    spec = SBM((0.3, 0.7), ((0.5, 0.1), (0.1, 0.5)))
    with pytest.raises(ValueError):
        planted_labels(spec, 10)
    labels = planted_labels(spec, 500, np.random.default_rng(0))
    assert set(labels.tolist()) <= {1, 2}
    # frequency of community 1 near pi_1
    assert abs(np.mean(labels == 1) - 0.3) < 0.1


def test_pp_mean_edge_count_matches_expectation_sum():
    # oracle: sum of P_ij over the upper triangle, built independently
    n, a, b = 50, 5.0, 0.1
    labels = np.array([1] * 25 + [2] * 25)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += (a / n) if labels[i] == labels[j] else (b / n)
    assert abs(total - 61.25) < 1e-9  # hand arithmetic: 600*0.1 + 625*0.002

    R = 600
    counts = np.array([sample(PlantedPartition(a, b), n, s)[0].m
                       for s in range(R)], dtype=float)
    # per-draw variance = sum p(1-p); 3-stderr acceptance band
    var = 600 * (a / n) * (1 - a / n) + 625 * (b / n) * (1 - b / n)
    stderr = math.sqrt(var / R)
    assert abs(counts.mean() - total) < 3 * stderr


def test_edge_frequency_matches_probability_fixed_label_models():
    """Empirical Bernoulli means track P_ij uniformly (models with fixed labels)."""
    rng = np.random.default_rng(7)
    X = rng.uniform(-1, 1, size=(8, 2))
    P = rng.uniform(0, 0.8, size=(10, 10))
    P = 0.5 * (P + P.T)
    np.fill_diagonal(P, 0.0)
    specs = [
        (ER(0.3), 20),
        (PlantedPartition(4.0, 1.0), 20),
        (LSM(tuple(map(tuple, X))), 8),
        (IERM(tuple(map(tuple, P))), 10),
    ]
    R = 5000
    for spec, n in specs:
        acc = np.zeros((n, n))
        for s in range(R):
            g, labels = sample(spec, n, s)
            acc += dense_adjacency(g)
        Pexp = expected_matrix(spec, labels).to_dense()
        freq = acc / R
        band = 4 * np.sqrt(Pexp * (1 - Pexp) / R) + 0.01
        assert np.all(np.abs(freq - Pexp) <= band)


def test_edge_frequency_matches_probability_random_label_models():
    """SBM/DCSBM agreement conditioned on the drawn labels.

    Labels differ per seed, so accumulate the conditional P alongside the
    adjacency; by the tower rule the two running means must agree entrywise,
    and the conditional variance E[P(1-P)] <= Pbar(1-Pbar) keeps the Bernoulli
    band valid.
    """
    rng = np.random.default_rng(3)
    theta = tuple(rng.uniform(0.4, 1.1, size=16))
    for spec in (SBM((0.5, 0.5), ((0.8, 0.15), (0.15, 0.6))),
                 DCSBM((0.5, 0.5), ((0.8, 0.15), (0.15, 0.6)), theta)):
        R = 5000
        n = 16
        acc = np.zeros((n, n))
        accP = np.zeros((n, n))
        for s in range(R):
            g, labels = sample(spec, n, s)
            E = expected_matrix(spec, labels)
            assert np.all(E.entries(g.i, g.j) > 0)  # no zero-probability edges
            acc += dense_adjacency(g)
            accP += E.to_dense()
        freq = acc / R
        Pbar = accP / R
        band = 4 * np.sqrt(np.maximum(Pbar * (1 - Pbar), 1e-4) / R) + 0.01
        assert np.all(np.abs(freq - Pbar) <= band)


# ---------------------------------------------------------------------------
# expected matrices
# ---------------------------------------------------------------------------

def test_expected_matrix_er_constant_offdiag():
    E = expected_matrix(ER(0.37), np.ones(6, dtype=np.int64))
    P = E.to_dense()
    assert np.all(np.diag(P) == 0)
    off = P[~np.eye(6, dtype=bool)]
    assert np.all(off == 0.37)


def test_expected_matrix_pp_entries():
    n = 10
    labels = planted_labels(PlantedPartition(2.0, 1.0), n)
    P = expected_matrix(PlantedPartition(2.0, 1.0), labels).to_dense()
    for i in range(n):
        for j in range(n):
            if i == j:
                assert P[i, j] == 0
            elif labels[i] == labels[j]:
                assert P[i, j] == pytest.approx(0.2)
            else:
                assert P[i, j] == pytest.approx(0.1)


def test_dcsbm_unit_theta_equals_sbm():
    pi = (0.4, 0.6)
    B = ((0.7, 0.2), (0.2, 0.5))
    labels = planted_labels(SBM(pi, B), 40, np.random.default_rng(1))
    Ps = expected_matrix(SBM(pi, B), labels).to_dense()
    Pd = expected_matrix(DCSBM(pi, B, tuple([1.0] * 40)), labels).to_dense()
    assert np.array_equal(Ps, Pd)


def test_lsm_monotone_in_distance():
    X = ((0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (7.0, 0.0))
    spec = LSM(X)
    P = expected_matrix(spec, np.ones(4, dtype=np.int64)).to_dense()
    # d(0,1)=1 < d(0,2)=3 < d(0,3)=7 so P must decrease along that row
    assert P[0, 1] > P[0, 2] > P[0, 3]
    assert P[0, 1] == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_ierm_expected_is_p():
    P = np.array([[0.0, 0.3, 0.6], [0.3, 0.0, 0.1], [0.6, 0.1, 0.0]])
    E = expected_matrix(IERM(tuple(map(tuple, P))), np.ones(3, dtype=np.int64))
    assert np.allclose(E.to_dense(), P)


def test_block_matvec_matches_dense():
    rng = np.random.default_rng(5)
    n = 30
    labels = rng.integers(1, 4, size=n)
    B = rng.uniform(0, 1, size=(3, 3))
    B = 0.5 * (B + B.T)
    theta = rng.uniform(0.3, 1.0, size=n)
    E = ExpectedMatrix.block(labels, B, theta)
    P = E.to_dense()
    for _ in range(5):
        x = rng.standard_normal(n)
        assert np.linalg.norm(E.matvec(x) - P @ x) <= 1e-12 * max(1, np.linalg.norm(P @ x))
    assert np.allclose(E.row_sums(), P.sum(axis=1), atol=1e-12)
    assert np.allclose(E.row_sq_sums(), (P ** 2).sum(axis=1), atol=1e-12)
    assert E.max_entry() == pytest.approx(P.max(), abs=1e-14)
    ii, jj = np.triu_indices(n, 1)
    assert np.allclose(E.entries(ii, jj), P[ii, jj], atol=1e-14)


def test_max_expected_degree_conventions():
    rowmax, entrymax = max_expected_degree(ER(0.2), 10)
    assert rowmax == pytest.approx(9 * 0.2)
    assert entrymax == pytest.approx(10 * 0.2)

    _, entry = max_expected_degree(PlantedPartition(5.0, 0.1), 50)
    assert entry == pytest.approx(5.0)

    P0 = tuple(tuple(0.0 for _ in range(4)) for _ in range(4))
    assert max_expected_degree(IERM(P0), 4) == (0.0, 0.0)


def test_max_expected_degree_with_labels_exact():
    spec = SBM((0.5, 0.5), ((0.8, 0.1), (0.1, 0.4)))
    labels = np.array([1, 1, 1, 2, 2])
    rowmax, entrymax = max_expected_degree(spec, 5, labels)
    P = expected_matrix(spec, labels).to_dense()
    assert rowmax == pytest.approx(P.sum(axis=1).max())
    assert entrymax == pytest.approx(5 * P.max())


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [-0.1, 1.5])
def test_er_probability_validation(bad):
    with pytest.raises(ValueError):
        ER(bad)


def test_pp_negative_rates_rejected():
    with pytest.raises(ValueError):
        PlantedPartition(-1.0, 0.5)


def test_pp_rates_above_n_rejected_at_expectation():
    labels = planted_labels(PlantedPartition(3.0, 1.0), 2)
    with pytest.raises(ValueError):
        expected_matrix(PlantedPartition(3.0, 1.0), labels)  # a/n = 1.5


def test_sbm_validation():
    with pytest.raises(ValueError):
        SBM((0.5, 0.4), ((0.5, 0.1), (0.1, 0.5)))  # pi does not sum to 1
    with pytest.raises(ValueError):
        SBM((0.5, 0.5), ((0.5, 0.2), (0.1, 0.5)))  # asymmetric B
    with pytest.raises(ValueError):
        SBM((0.5, 0.5), ((1.5, 0.1), (0.1, 0.5)))  # entry out of [0, 1]


def test_dcsbm_validation():
    with pytest.raises(ValueError):
        DCSBM((0.5, 0.5), ((0.5, 0.1), (0.1, 0.5)), (1.0, -0.2))
    with pytest.raises(ValueError):
        # top two thetas against max B give probability > 1
        DCSBM((0.5, 0.5), ((0.9, 0.1), (0.1, 0.9)), (2.0, 2.0, 0.5))


def test_ierm_validation():
    with pytest.raises(ValueError):
        IERM(((0.0, 0.5), (0.4, 0.0)))  # asymmetric
    with pytest.raises(ValueError):
        IERM(((0.1, 0.5), (0.5, 0.0)))  # nonzero diagonal
    with pytest.raises(ValueError):
        IERM(((0.0, 1.5), (1.5, 0.0)))  # out of range


def test_lsm_validation():
    with pytest.raises(ValueError):
        LSM(((0.0, 0.0),), kernel="nope")


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(4, [2], [1], [1.0])  # i >= j
    with pytest.raises(ValueError):
        Graph(4, [0], [4], [1.0])  # endpoint out of range
    with pytest.raises(ValueError):
        Graph(4, [0, 1], [1], [1.0])  # ragged arrays
    with pytest.raises(ValueError):
        sample(ER(0.5), 0, 1)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_tsv_round_trip(tmp_path):
    g, _ = sample(PlantedPartition(6.0, 1.0), 40, 11)
    # exercise non-unit weights too
    g.w[:] = np.linspace(0.1, 1.0, g.m)
    path = tmp_path / "g.tsv"
    g.to_tsv(path)
    back = Graph.from_tsv(path)
    assert back == g


def test_tsv_format_details():
    g = Graph(3, [0], [2], [0.25])
    text = g.format_tsv()
    assert text == "# n=3\n0\t2\t0.25\n"
    assert Graph.parse_tsv(text) == g


def test_tsv_parse_errors():
    with pytest.raises(ValueError):
        Graph.parse_tsv("0\t1\t1.0\n")  # missing header
    with pytest.raises(ValueError):
        Graph.parse_tsv("# n=3\n0\t1\n")  # malformed line
    with pytest.raises(ValueError):
        Graph.parse_tsv("# n=3\n0\t1\t0\n")  # nonpositive weight


def test_labels_round_trip(tmp_path):
    labels = np.array([1, 2, 2, 1, 3])
    path = tmp_path / "labels.txt"
    write_labels(path, labels)
    assert np.array_equal(read_labels(path), labels)


def test_model_json_round_trip():
    rng = np.random.default_rng(2)
    P = rng.uniform(0, 0.5, size=(4, 4))
    P = 0.5 * (P + P.T)
    np.fill_diagonal(P, 0.0)
    specs = [
        ER(0.25),
        PlantedPartition(5.0, 0.1),
        SBM((0.3, 0.7), ((0.5, 0.1), (0.1, 0.6))),
        DCSBM((0.3, 0.7), ((0.5, 0.1), (0.1, 0.6)), (0.9, 1.1, 0.8)),
        LSM(((0.0, 1.0), (2.0, 0.0))),
        IERM(tuple(map(tuple, P))),
    ]
    for spec in specs:
        back = model_from_json(model_to_json(spec))
        assert back == spec


def test_model_json_unknown_kind():
    with pytest.raises(ValueError):
        model_from_json(json.dumps({"model": "wat"}))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_tsv_round_trip_property(n, seed, p):
    g, _ = sample(ER(p), n, seed)
    assert Graph.parse_tsv(g.format_tsv()) == g
