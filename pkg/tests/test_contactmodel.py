import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kdecontact.contactmodel import (
    ForceSample,
    FrictionModel,
    GroundTruthLabel,
    SchmittTrigger,
    coulomb_stable,
    label_arrays,
    label_trace,
    schmitt_contact,
)
from kdecontact.core import ValidationError


def test_coulomb_examples():
    assert coulomb_stable(ForceSample(0.0, (0, 0, 10)), 0.1)
    assert not coulomb_stable(ForceSample(0.0, (3, 4, 10)), 0.1)
    assert not coulomb_stable((0, 0, 0), 0.1)
    assert not coulomb_stable((0, 0, 0), 5.0)


@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(-10, 1000), st.floats(1e-3, 2), st.floats(0, 2))
def test_coulomb_monotone_in_mu(fx, fy, fz, mu, extra):
    if coulomb_stable((fx, fy, fz), mu):
        assert coulomb_stable((fx, fy, fz), mu + extra)


@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(1, 1000), st.floats(0, 2 * math.pi))
def test_coulomb_rotation_invariant(fx, fy, fz, theta):
    tang = math.hypot(fx, fy)
    mu = tang / fz
    c, s = math.cos(theta), math.sin(theta)
    rotated = (c * fx - s * fy, s * fx + c * fy, fz)
    # stay clear of the cone boundary where rounding could flip the answer
    for m in (mu * 0.99, mu * 1.01 + 1e-9):
        assert coulomb_stable((fx, fy, fz), m) == coulomb_stable(rotated, m)


def test_friction_model_ordering():
    assert FrictionModel(0.1).mu_k == 0.1
    with pytest.raises(ValidationError):
        FrictionModel(0.1, 0.2)
    with pytest.raises(ValidationError):
        FrictionModel(0.0)


def test_label_examples():
    forces = [ForceSample(0.0, (0, 0, 400)), ForceSample(0.001, (0, 0, 400)), ForceSample(0.002, (0, 0, 0))]
    vel = [(0, 0, 0), (0.1, 0, 0), (0.5, 0, 0.3)]
    ang = [(0, 0, 0)] * 3
    labels = label_trace(forces, vel, ang, vel_eps=1e-3)
    assert [(l.stable, l.in_contact) for l in labels] == [(True, True), (False, True), (False, False)]


def test_label_angular_rate_breaks_stability():
    stable, contact = label_arrays([(0, 0, 400)], [(0, 0, 0)], [(0, 0.01, 0)])
    assert not stable[0] and contact[0]


def test_label_misaligned():
    with pytest.raises(ValidationError):
        label_arrays(np.zeros((3, 3)), np.zeros((2, 3)), np.zeros((3, 3)))


@given(st.lists(st.tuples(st.floats(-10, 500), st.floats(0, 0.01), st.floats(0, 0.01)), min_size=1, max_size=30))
def test_labels_never_stable_without_contact(rows):
    F = [(0, 0, fz) for fz, _, _ in rows]
    v = [(vx, 0, 0) for _, vx, _ in rows]
    w = [(0, 0, wz) for _, _, wz in rows]
    stable, contact = label_arrays(F, v, w)
    assert not np.any(stable & ~contact)


def test_ground_truth_label_invariant():
    with pytest.raises(ValidationError):
        GroundTruthLabel(0.0, "R", stable=True, in_contact=False)


def test_schmitt_examples():
    assert schmitt_contact((0, 50, 120, 80, 30), 100, 40, False) == [False, False, True, True, False]
    assert schmitt_contact([70.0] * 8, 100, 40, True) == [True] * 8
    with pytest.raises(ValidationError):
        schmitt_contact([1.0], 100, 100)


def reference_automaton(series, high, low, state):
    out = []
    for x in series:
        if state and x < low:
            state = False
        elif not state and x > high:
            state = True
        out.append(state)
    return out


def test_schmitt_exhaustive_against_reference():
    high, low = 100.0, 40.0
    levels = (0.0, 40.0, 70.0, 100.0, 130.0)  # below, on low, inside, on high, above
    for n in range(1, 7):
        for seq in itertools.product(levels, repeat=n):
            for initial in (False, True):
                got = schmitt_contact(seq, high, low, initial)
                assert got == reference_automaton(seq, high, low, initial)
                if all(low < x < high for x in seq):
                    assert got == [initial] * n


def test_schmitt_trigger_holds_state():
    trig = SchmittTrigger(10, 5)
    assert [trig.update(x) for x in (11, 7, 4, 7)] == [True, True, False, False]
