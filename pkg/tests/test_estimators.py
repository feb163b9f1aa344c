import numpy as np
import pytest
from sklearn.base import clone

from bootperc.engine import closure_array, make_nr_family
from bootperc.estimators import BootstrapClosure, CriticalLengthEstimator
from bootperc.lattice import NeighborhoodSpec


def test_closure_transformer(rng):
    X = rng.random((5, 6, 6)) < 0.3
    est = BootstrapClosure(a=(1, 2), r=3).fit(X)
    assert est.grid_shape_ == (6, 6)
    Y = est.transform(X)
    fam = make_nr_family(NeighborhoodSpec((1, 2), 3))
    for x, y in zip(X, Y):
        assert np.array_equal(y, closure_array(x, fam))
    assert est.predict(X).tolist() == [bool(y.all()) for y in Y]


def test_closure_transformer_params():
    est = BootstrapClosure(a=(1, 1), r=2, geometry="torus")
    assert est.get_params()["geometry"] == "torus"
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(ValueError):
        BootstrapClosure(geometry="ring").fit()
    with pytest.raises(ValueError):
        BootstrapClosure(a=(1, 1), r=9).fit()


def test_closure_transformer_requires_fit():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        BootstrapClosure().transform(np.zeros((2, 2), bool))


def test_critical_length_estimator():
    est = CriticalLengthEstimator(a=(1, 1), r=2, trials_per_probe=300, seed=3, model="pure_power")
    P = np.array([[0.1], [0.15], [0.2], [0.3]])
    est.fit(P)
    assert len(est.critical_lengths_) == 4
    assert list(est.critical_lengths_) == sorted(est.critical_lengths_, reverse=True)
    pred = est.predict(P)
    assert pred.shape == (4,) and np.all(pred > 1)
    assert est.score(P) > 0.5
    assert est._index() == 1


def test_critical_length_estimator_too_few_points():
    est = CriticalLengthEstimator(a=(1, 1), r=2, trials_per_probe=100, seed=1).fit([0.2, 0.3])
    with pytest.raises(ValueError):
        est.predict([0.2])
