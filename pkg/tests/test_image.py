import pytest

from galimage import ffarith as ff
from galimage.dirichlet import CharacterDesc, descend
from galimage.errors import PreconditionFailed, ValidationFailed
from galimage.image import (
    check_subgroup,
    compute_image,
    delta_by_enumeration,
    delta_by_generators,
    group_order,
    subgroup_generated,
)
from galimage.nfresidue import NumberFieldDesc, ResiduePrime
from galimage.store import NewformRecord

import oracles

Q = NumberFieldDesc((0, 1))


def test_example1_surjective(ex1, lam1):
    im = compute_image(ex1, lam1, 337, certified=True)
    assert im.M == 189
    assert im.delta == (1, 2, 3, 4, 5, 6)
    assert im.is_full and im.projective == "PGL" and not im.forced_mode
    assert im.group_order == 2016 == oracles.gl2_order(7)
    assert im.group_name(7) == "GL2(F_7)"


def test_example2_forced_psl(ex2, lam2):
    im = compute_image(ex2, lam2, 71, certified=True)
    assert im.forced_mode
    assert set(im.delta) == oracles.squares_mod(41)
    assert im.delta_order == 20 and im.projective == "PSL"
    assert im.projective_name(41) == "PSL2(F_41)"
    assert im.group_order == 1_377_600


def test_ell_two():
    an = {n: Q.element((sum(ff.divisors(n)) % 2 + 1,)) for n in range(2, 20)}
    f = NewformRecord("11.2.a.z", 11, 2, CharacterDesc.trivial(11), Q, an, 19, "toy")
    im = compute_image(f, ResiduePrime(2, 0, Q), 11, certified=True)
    assert im.is_full and im.projective == "PSL=PGL" and im.group_order == 6


def test_needs_certification(ex1, lam1):
    with pytest.raises(PreconditionFailed):
        compute_image(ex1, lam1, 337, certified=False)


def test_group_order():
    assert group_order(7, 6) == 2016
    assert group_order(41, 20) == 41 * 40 * 42 * 20
    assert group_order(2, 1) == 6
    assert group_order(3, 2) == oracles.gl2_order(3) == 48
    with pytest.raises(ValidationFailed):
        group_order(7, 4)


def test_fast_path_matches_enumeration(ex1, lam1):
    chi = descend(ex1.nebentypus, 27)
    for k in (2, 3, 4):
        assert delta_by_generators(189, k, chi, lam1) == delta_by_enumeration(189, k, chi, lam1)


def test_standard_mode_generated_by_parts(ex1, lam1):
    chi = descend(ex1.nebentypus, 27)
    for k in (2, 3, 4, 7):
        got = set(delta_by_enumeration(189, k, chi, lam1))
        powers = {pow(x, k - 1, 7) for x in range(1, 7)}
        assert powers <= got
        assert got == oracles.subgroup_closure(powers, 7)


def test_subgroup_closure_check():
    check_subgroup((1, 2, 4), 7)
    with pytest.raises(ValidationFailed):
        check_subgroup((1, 2), 7)
    with pytest.raises(ValidationFailed):
        check_subgroup((2, 4), 7)


def test_subgroup_generated_against_closure():
    for ell in (5, 7, 41, 101):
        for gens in ([2], [3, 4], [ell - 1], [1]):
            got = subgroup_generated(gens, ell)
            assert set(got) == oracles.subgroup_closure([g % ell for g in gens], ell)
