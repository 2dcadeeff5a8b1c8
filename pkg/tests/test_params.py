import pytest

from covertwalk.params import DelayModel, ParameterError, SystemParams, WalkModel


def test_valid_params_and_chunk_length():
    p = SystemParams(s=50, r=10, m=10, k=3, n=5, lam=1, w=50)
    assert p.chunk_length == 10 / 3
    assert isinstance(p.s, int) and isinstance(p.m, float)


@pytest.mark.parametrize("changes, fragment", [
    (dict(k=0), "1 <= k"),
    (dict(k=6), "k <= n"),
    (dict(n=11), "n <= r"),
    (dict(r=60), "r <= s"),
    (dict(lam=0), "lam"),
    (dict(w=-1), "w"),
    (dict(m=float("inf")), "m"),
    (dict(k=2.5), "integer"),
])
def test_invalid_params_name_the_constraint(changes, fragment):
    values = dict(s=50, r=10, m=10, k=3, n=5, lam=1, w=50)
    values.update(changes)
    with pytest.raises(ParameterError, match=fragment.replace("(", r"\(")):
        SystemParams(**values)


def test_model_parsing():
    assert DelayModel.parse("2") is DelayModel.MODEL2
    assert DelayModel.parse(1) is DelayModel.MODEL1
    assert WalkModel.parse("noselfloop") is WalkModel.NO_SELF_LOOP
    with pytest.raises(ParameterError):
        DelayModel.parse(3)
    with pytest.raises(ParameterError):
        WalkModel.parse("levy")
