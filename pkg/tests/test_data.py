import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mbaselm import data
from mbaselm.data import Dataset
from mbaselm.errors import DataError, ParseError


def test_libsvm_single_line():
    ds = data.parse_libsvm("1.5 1:2 3:4")
    np.testing.assert_array_equal(ds.X, [[2.0, 0.0, 4.0]])
    np.testing.assert_array_equal(ds.Y, [[1.5]])


def test_libsvm_empty():
    with pytest.raises(ParseError):
        data.parse_libsvm("")
    with pytest.raises(ParseError):
        data.parse_libsvm("\n  \n")


def test_libsvm_fixture_matches_hand_parse():
    text = "0.5 1:1.25 2:-3\n-2 3:7e-1\n10 1:0 2:2 4:1\n"
    X = [[1.25, -3.0, 0.0, 0.0], [0.0, 0.0, 0.7, 0.0], [0.0, 2.0, 0.0, 1.0]]
    ds = data.parse_libsvm(text)
    np.testing.assert_array_equal(ds.X, X)
    np.testing.assert_array_equal(ds.Y[:, 0], [0.5, -2.0, 10.0])


@pytest.mark.parametrize("text,line", [
    ("1 1:2\n2 2:x", 2),
    ("1 1:2 1:3", 1),
    ("1 3:2 2:3", 1),
    ("abc 1:2", 1),
    ("1 2", 1),
    ("1 0:5", 1),
])
def test_libsvm_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        data.parse_libsvm(text)
    assert exc.value.line == line


def test_delimited_comma():
    ds = data.parse_delimited("1,2,3\n4,5,6", target_column=2)
    np.testing.assert_array_equal(ds.X, [[1, 2], [4, 5]])
    np.testing.assert_array_equal(ds.Y, [[3], [6]])


def test_delimited_ragged():
    with pytest.raises(ParseError) as exc:
        data.parse_delimited("1,2,3\n4,5")
    assert exc.value.line == 2


def test_delimited_non_numeric():
    with pytest.raises(ParseError, match="cell 2"):
        data.parse_delimited("1 2\n3 oops")


def test_delimited_whitespace_fixture():
    text = "# comment\n 0.1  2.0\t-1\n3 4 5\n\n"
    ds = data.parse_delimited(text, target_column=0)
    np.testing.assert_array_equal(ds.Y[:, 0], [0.1, 3.0])
    np.testing.assert_array_equal(ds.X, [[2.0, -1.0], [4.0, 5.0]])


def test_delimited_bad_target_column():
    with pytest.raises(DataError):
        data.parse_delimited("1,2", target_column=5)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_roundtrip_both_formats(n, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d)) * 10.0 ** rng.integers(-5, 5, size=(n, d))
    X[rng.uniform(size=X.shape) < 0.3] = 0.0
    X[:, -1] = 1.0  # keep the libsvm width determinable
    ds = Dataset(X, rng.standard_normal(n))
    for text, parse in ((data.to_libsvm(ds), data.parse_libsvm),
                        (data.to_delimited(ds), data.parse_delimited),
                        (data.to_delimited(ds, " "), data.parse_delimited)):
        back = parse(text)
        np.testing.assert_array_equal(back.X, ds.X)
        np.testing.assert_array_equal(back.Y, ds.Y)


def test_load_dataset_formats(tmp_path):
    (tmp_path / "a.libsvm").write_text("1 1:2 2:3\n2 1:4\n")
    (tmp_path / "a.csv").write_text("2,3,1\n4,0,2\n")
    a = data.load_dataset(tmp_path / "a.libsvm")
    b = data.load_dataset(tmp_path / "a.csv")
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.Y, b.Y)
    with pytest.raises(DataError):
        data.load_dataset(tmp_path / "missing.txt")
    with pytest.raises(DataError):
        data.load_dataset(tmp_path / "a.csv", fmt="xml")


def test_scaler_examples():
    train = Dataset([[0.0, 3.0], [5.0, 3.0], [10.0, 3.0]], [1.0, 2.0, 3.0])
    s = data.fit_scaler(train)
    scaled = data.apply_scaler(s, train)
    np.testing.assert_array_equal(scaled.X[:, 0], [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(scaled.X[:, 1], [0.0, 0.0, 0.0])
    assert s.constant_features.tolist() == [False, True]
    test = data.apply_scaler(s, Dataset([[12.0, 7.0]], [0.0]))
    assert test.X[0, 0] == pytest.approx(1.2)
    assert test.Y[0, 0] == pytest.approx(-0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_scaled_training_in_unit_box(n, d, seed):
    rng = np.random.default_rng(seed)
    train = Dataset(rng.standard_normal((n, d)) * 100, rng.standard_normal(n))
    s = data.apply_scaler(data.fit_scaler(train), train)
    assert s.X.min() >= 0 and s.X.max() <= 1
    assert s.Y.min() >= 0 and s.Y.max() <= 1


def _ids(ds):
    return set(ds.X[:, 0].astype(int).tolist())


def _indexed(n):
    return Dataset(np.arange(n, dtype=float)[:, None], np.zeros(n))


@pytest.mark.parametrize("n,n_train", [(252, 100), (506, 250)])
def test_split_sizes_from_benchmarks(n, n_train):
    tr, te = data.random_split(_indexed(n), n_train, np.random.default_rng(0))
    assert (len(tr), len(te)) == (n_train, n - n_train)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.data())
def test_split_partitions(n, draw):
    n_train = draw.draw(st.integers(1, n - 1))
    seed = draw.draw(st.integers(0, 2**32 - 1))
    tr, te = data.random_split(_indexed(n), n_train, np.random.default_rng(seed))
    assert _ids(tr) | _ids(te) == set(range(n))
    assert not _ids(tr) & _ids(te)
    tr2, _ = data.random_split(_indexed(n), n_train, np.random.default_rng(seed))
    assert _ids(tr) == _ids(tr2)


def test_split_bounds():
    with pytest.raises(DataError):
        data.random_split(_indexed(5), 5, np.random.default_rng(0))
    with pytest.raises(DataError):
        data.random_split(_indexed(5), 0, np.random.default_rng(0))


def test_kfold_sizes():
    assert [len(f) for f in data.kfold(_indexed(9), 3, np.random.default_rng(0))] == [3, 3, 3]
    assert sorted(len(f) for f in data.kfold(_indexed(10), 3, np.random.default_rng(0))) == [3, 3, 4]
    with pytest.raises(DataError):
        data.kfold(_indexed(2), 3, np.random.default_rng(0))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 80), st.integers(0, 2**32 - 1))
def test_kfold_partitions(n, seed):
    folds = data.kfold(_indexed(n), 3, np.random.default_rng(seed))
    ids = [_ids(f) for f in folds]
    assert set().union(*ids) == set(range(n))
    assert sum(len(i) for i in ids) == n
    assert max(map(len, ids)) - min(map(len, ids)) <= 1


def test_sinc_origin_and_formula():
    assert data.sinc(0.0) == 1.0
    ds = data.synthetic_sinc(50, 0.0, np.random.default_rng(3))
    x = ds.X[:, 0]
    np.testing.assert_allclose(ds.Y[:, 0], np.sin(x) / x, rtol=0, atol=1e-12)
    assert np.all(np.abs(x) <= 10)


def test_sinc_reproducible_and_noisy():
    a = data.synthetic_sinc(30, 0.1, np.random.default_rng(1))
    b = data.synthetic_sinc(30, 0.1, np.random.default_rng(1))
    np.testing.assert_array_equal(a.Y, b.Y)
    resid = a.Y[:, 0] - data.sinc(a.X[:, 0])
    assert 0 < np.std(resid) < 0.3
