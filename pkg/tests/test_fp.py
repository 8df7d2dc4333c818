import random

import numpy as np
import pytest

from minuscy import fp
from minuscy.fp import FieldElement, Matrix


def test_field_element_requires_prime():
    with pytest.raises(ValueError):
        FieldElement(1, 6)
    x = FieldElement(103, 101)
    assert x.residue == 2


def test_field_arithmetic_exact():
    p = 101
    a, b = FieldElement(57, p), FieldElement(90, p)
    assert (a + b).residue == (57 + 90) % p
    assert (a * b).residue == (57 * 90) % p
    assert ((a / b) * b).residue == a.residue


def test_rank_empty_and_identity():
    assert Matrix.zeros(0, 0, 101).rank() == 0
    assert Matrix.identity(3, 101).rank() == 3


def test_rank_dependent_rows():
    # [[1,2],[2,4]] over F_101 -> 1, by hand elimination
    assert Matrix([[1, 2], [2, 4]], 101).rank() == 1


def test_kernel_and_cokernel_trivia():
    assert Matrix.identity(2, 101).kernel_basis().cols == 0
    assert Matrix.zeros(3, 2, 101).cokernel_dim() == 3


def test_solve_inconsistent():
    assert Matrix([[1, 0], [0, 0]], 101).solve([1, 1]) is None


def test_solve_shape_mismatch():
    with pytest.raises(fp.DimensionError):
        Matrix([[1, 0]], 101).solve([1, 1, 1])


@pytest.mark.parametrize("p", [2, 3, 101])
def test_rank_nullity_random_sweep(p):
    rng = random.Random(12345 + p)
    for _ in range(60):
        rows = rng.randrange(0, 7)
        cols = rng.randrange(0, 7)
        a = np.array([[rng.randrange(p) for _ in range(cols)] for _ in range(rows)],
                     dtype=np.int64).reshape(rows, cols)
        m = Matrix(a, p)
        assert m.rank() + m.kernel_basis().cols == cols
        # kernel columns really are killed
        k = m.kernel_basis()
        if rows and k.cols:
            assert not ((m.a @ k.a) % p).any()


@pytest.mark.parametrize("p", [2, 101])
def test_solve_exact_on_solvable_systems(p):
    rng = random.Random(99 + p)
    for _ in range(40):
        rows = rng.randrange(1, 6)
        cols = rng.randrange(1, 6)
        a = np.array([[rng.randrange(p) for _ in range(cols)] for _ in range(rows)],
                     dtype=np.int64)
        x = np.array([rng.randrange(p) for _ in range(cols)], dtype=np.int64)
        rhs = (a @ x) % p
        sol = fp.solve(a, rhs, p)
        assert sol is not None
        assert np.array_equal((a @ sol) % p, rhs)
