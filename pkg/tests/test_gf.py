"""
Tests for finite-field arithmetic
"""

import pytest
import numpy as np

from ldpc_secure_sketch.gf import (
    arith_tables,
    build_field,
    field_for_order,
    is_prime,
    is_prime_power,
    poly_mod,
    poly_mul,
)


class TestPrimes:
    """Test prime and prime-power detection."""

    def test_is_prime(self):
        assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]

    def test_is_prime_power(self):
        assert is_prime_power(16) == (2, 4)
        assert is_prime_power(9) == (3, 2)
        assert is_prime_power(7) == (7, 1)
        assert is_prime_power(12) is None
        assert is_prime_power(1) is None


class TestFieldConstruction:
    """Test deterministic field construction."""

    def test_gf4(self):
        f = field_for_order(4)
        assert f.modulus == (1, 1, 1)
        assert f.mul(2, 2) == 3
        assert f.inv(2) == 3
        assert f.add(2, 3) == 1

    def test_gf3_primitive_element(self):
        f = build_field(3)
        assert f.primitive_element == 2

    def test_gf9(self):
        f = build_field(3, 2)
        assert f.modulus == (1, 0, 1)
        assert f.primitive_element == 4

    def test_field_is_cached(self):
        assert field_for_order(8) is build_field(2, 3)

    def test_invalid_orders(self):
        with pytest.raises(ValueError):
            field_for_order(6)
        with pytest.raises(ValueError):
            build_field(4)

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            field_for_order(5).inv(0)

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 27])
    def test_field_axioms(self, q):
        f = field_for_order(q)
        for a in range(1, q):
            assert f.mul(a, f.inv(a)) == 1
            assert f.add(a, f.neg(a)) == 0
            assert f.exp(f.log(a)) == a
        # the primitive element generates the whole multiplicative group
        assert sorted(f.exp(i) for i in range(q - 1)) == list(range(1, q))

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
    def test_commutative_and_distributive(self, q):
        f = field_for_order(q)
        for a in range(q):
            for b in range(q):
                assert f.add(a, b) == f.add(b, a)
                assert f.mul(a, b) == f.mul(b, a)
                for c in range(q):
                    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))

    def test_location_order(self):
        f = field_for_order(8)
        order = f.elements_in_location_order()
        assert order[0] == 0
        assert order[1] == 1
        assert [f.location_index(a) for a in order] == list(range(8))


class TestPolynomials:
    """Test polynomial arithmetic over GF(q)."""

    def test_mul_and_mod(self):
        f = field_for_order(5)
        # (x + 1)(x + 4) = x^2 + 4 over GF(5)
        product = poly_mul([1, 1], [4, 1], f)
        assert product == [4, 0, 1]
        assert poly_mod(product, [1, 1], f) == []
        assert poly_mod([0, 0, 1], [1, 1], f) == [1]

    def test_mod_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            poly_mod([1, 1], [0], field_for_order(3))


class TestArithTables:
    """Test vectorised arithmetic tables."""

    def test_tables_match_scalar_ops(self):
        f = field_for_order(9)
        add_t, mul_t = arith_tables(f)
        assert add_t.shape == (9, 9)
        for a in range(9):
            for b in range(9):
                assert add_t[a, b] == f.add(a, b)
                assert mul_t[a, b] == f.mul(a, b)

    def test_tables_are_read_only(self):
        add_t, _ = arith_tables(field_for_order(4))
        with pytest.raises(ValueError):
            add_t[0, 0] = 1

    def test_characteristic_two_addition_is_xor(self):
        add_t, _ = arith_tables(field_for_order(16))
        a = np.arange(16)
        assert np.array_equal(add_t, a[:, None] ^ a[None, :])
