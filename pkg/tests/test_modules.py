"""Module actions, validation, annihilation, orders, functors, the zoo."""

from fractions import Fraction

import pytest

from smashmod import (
    AVModule,
    Derivation,
    ModuleElement,
    ModuleSchemaError,
    Poly,
    ValidationError,
    differential_forms,
    dual_module,
    exterior_power,
    jet_module,
    min_annihilating_order,
    module_from_dict,
    module_to_dict,
    omega,
    oracle_order,
    parse_poly,
    smash_bracket,
    tangent_adjoint,
    tensor_product,
    trivial_dmodule,
    twist,
    zoo,
)
from smashmod.sampling import random_derivation, random_poly, seeded_rng

from oracles import (
    act_smash_by_terms,
    annihilates_by_sampling,
    jet_tensor_by_prolongation,
)

x = Poly.variable(1, 1)
one = Poly.constant(1, 1)
d = Derivation.partial(1, 1)


# -- zoo construction ----------------------------------------------------------------

def test_forms_one_dimensional_tensor():
    m = differential_forms(1)
    assert m.rank == 1 and m.order == 1
    assert m.tensor == {(1, (1,)): ((one,),)}


def test_jet_tensor_matches_spec_example():
    j = jet_module(1, 2)
    assert j.rank == 3 and j.order == 2
    g = parse_poly("x1^4", 1)  # generic enough: g' = 4x^3, g'' = 12x^2
    e0, e1, e2 = j.basis()
    assert j.act_derivation(g * d, e0).is_zero()
    got1 = j.act_derivation(g * d, e1)
    assert got1 == g.partial_derivative(1) * e1 + parse_poly("12*x1^2", 1) * e2
    got2 = j.act_derivation(g * d, e2)
    assert got2 == 2 * g.partial_derivative(1) * e2


@pytest.mark.parametrize("dim,n", [(1, 0), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
def test_jet_tensor_against_prolongation_oracle(dim, n):
    assert jet_module(dim, n).tensor == jet_tensor_by_prolongation(dim, n)


@pytest.mark.parametrize("dim,n", [(1, 2), (2, 1)])
def test_jet_prolongation_property(dim, n):
    # rho(g d_i)(jet of h) = jet of (g * d_i h)
    from smashmod import multi_indices, partial_power

    j = jet_module(dim, n)
    rng = seeded_rng(5, "jets", dim, n)
    betas = multi_indices(dim, n)

    def jet_of(h):
        return ModuleElement(tuple(partial_power(h, b) for b in betas))

    for _ in range(8):
        g = random_poly(rng, dim, 3)
        h = random_poly(rng, dim, 4)
        for i in range(1, dim + 1):
            eta = Derivation(tuple(g if t == i - 1 else Poly.zero(dim) for t in range(dim)))
            assert j.act_derivation(eta, jet_of(h)) == jet_of(g * h.partial_derivative(i))


def test_zoo_dispatch_and_aliases():
    assert zoo("forms", dim=2) == differential_forms(2)
    assert zoo("jets", dim=1, n=2) == jet_module(1, 2)
    assert zoo("dmodule", dim=1, rank=3) == trivial_dmodule(1, 3)
    assert zoo("twist", lam="1/2") == twist(Fraction(1, 2))
    with pytest.raises(ValueError, match="unknown zoo"):
        zoo("nonsense")
    with pytest.raises(ValueError):
        zoo("jets", dim=1, n=-1)
    with pytest.raises(ValueError):
        zoo("dmodule", dim=0)
    with pytest.raises(ValueError, match="unexpected"):
        zoo("forms", dim=1, n=2)
    with pytest.raises(ValueError, match="dim must be 1"):
        zoo("twist", dim=2, lam=1)


def test_twist_family_points():
    assert twist(0) == trivial_dmodule(1, 1)
    assert twist(1) == differential_forms(1)
    assert twist(-1) == tangent_adjoint(1)
    half = twist(Fraction(1, 2))
    assert half.validated and half.order == 1


# -- actions -------------------------------------------------------------------------

def test_act_derivation_forms_is_lie_derivative():
    m = differential_forms(1)
    dx = m.basis_element(0)
    assert m.act_derivation(x * d, dx) == dx  # L_{x d}(dx) = dx
    g, a = parse_poly("x1^2", 1), parse_poly("x1^3 - 2", 1)
    got = m.act_derivation(g * d, a * dx)
    expect = (g * a.partial_derivative(1) + a * g.partial_derivative(1)) * dx
    assert got == expect


def test_act_derivation_adjoint_is_bracket():
    m = tangent_adjoint(1)
    g, h = parse_poly("x1^2", 1), parse_poly("x1 + 1", 1)
    got = m.act_derivation(g * d, ModuleElement((h,)))
    expect = ModuleElement(((g * h.partial_derivative(1) - h * g.partial_derivative(1)),))
    assert got == expect


def test_act_zero_derivation():
    m = jet_module(1, 2)
    v = ModuleElement((x, x ** 2, one))
    assert m.act_derivation(Derivation.zero(1), v).is_zero()


def test_act_smash_forms_examples():
    m = differential_forms(1)
    dx = m.basis_element(0)
    assert m.act_smash(omega(1, x, d), dx) == -dx
    assert m.act_smash(omega(2, x, d), dx).is_zero()


def test_act_smash_adjoint_level_two_vanishes():
    for dim in (1, 2):
        m = tangent_adjoint(dim)
        rng = seeded_rng(11, "adjoint", dim)
        for _ in range(5):
            f = random_poly(rng, dim, 3)
            eta = random_derivation(rng, dim, 2)
            w = omega(2, f, eta)
            for b in m.basis():
                assert m.act_smash(w, b).is_zero()


def test_act_smash_matches_term_expansion():
    for mod in (differential_forms(2), jet_module(1, 2), tangent_adjoint(1)):
        rng = seeded_rng(13, "actsmash", mod.name)
        for _ in range(6):
            u = omega(rng.randint(0, 2), random_poly(rng, mod.dim, 2),
                      random_derivation(rng, mod.dim, 2))
            v = ModuleElement(tuple(random_poly(rng, mod.dim, 2, nonzero=False)
                                    for _ in range(mod.rank)))
            assert mod.act_smash(u, v) == act_smash_by_terms(mod, u, v)


def test_representation_property():
    mod = jet_module(1, 1)
    rng = seeded_rng(17, "rep")
    for _ in range(12):
        u = omega(rng.randint(0, 2), random_poly(rng, 1, 2), random_derivation(rng, 1, 2))
        v = omega(rng.randint(0, 2), random_poly(rng, 1, 2), random_derivation(rng, 1, 2))
        m = ModuleElement((random_poly(rng, 1, 2), random_poly(rng, 1, 2)))
        lhs = mod.act_smash(smash_bracket(u, v), m)
        rhs = mod.act_smash(u, mod.act_smash(v, m)) - mod.act_smash(v, mod.act_smash(u, m))
        assert lhs == rhs


def test_omega_action_commutes_with_multiplication():
    # the annihilator elements act A-linearly on every module
    mod = jet_module(1, 2)
    rng = seeded_rng(19, "lemma2")
    for _ in range(8):
        f = random_poly(rng, 1, 3)
        eta = random_derivation(rng, 1, 2)
        g = random_poly(rng, 1, 3)
        p = rng.randint(1, 3)
        w = omega(p, f, eta)
        m = ModuleElement(tuple(random_poly(rng, 1, 2) for _ in range(3)))
        assert mod.act_smash(w, g * m) == g * mod.act_smash(w, m)


# -- validation ----------------------------------------------------------------------

def test_validate_trivial_and_jets():
    assert trivial_dmodule(2, 2).validated
    assert jet_module(1, 2).validated


def test_validate_detects_tampered_tensor():
    # a non-flat, incompatible single entry in dim 2
    bad = AVModule(2, 2, 1, {(1, (1, 0)): (
        (Poly.variable(2, 1), Poly.zero(2)),
        (Poly.zero(2), Poly.zero(2)),
    )}, name="tampered")
    report = bad.validate()
    assert report.status == "fail"
    assert report.witness is not None and "defect" in report.witness
    assert not bad.validated


def test_unvalidated_module_refuses_to_act():
    raw = AVModule(1, 1, 1, {(1, (1,)): ((one,),)}, name="raw")
    with pytest.raises(ValidationError):
        raw.act_derivation(d, ModuleElement((one,)))
    with pytest.raises(ValidationError):
        raw.annihilates(omega(1, x, d))
    assert raw.validate().passed
    raw.act_derivation(d, ModuleElement((one,)))  # fine now


def test_schema_errors():
    with pytest.raises(ModuleSchemaError):
        AVModule(1, 0, 0, {})  # rank 0 rejected outside the sentinel path
    with pytest.raises(ModuleSchemaError):
        AVModule(1, 1, 0, {(1, (1,)): ((one,),)})  # entry above declared order
    with pytest.raises(ModuleSchemaError):
        AVModule(1, 1, 2, {(1, (1,)): ((one,),)})  # declared order not tight
    with pytest.raises(ModuleSchemaError):
        AVModule(1, 2, 1, {(1, (1,)): ((one,),)})  # wrong matrix shape
    with pytest.raises(ModuleSchemaError):
        AVModule(2, 1, 1, {(3, (1, 0)): ((parse_poly("x1", 2),),)})  # bad direction


# -- annihilation --------------------------------------------------------------------

def test_annihilates_examples():
    m = differential_forms(1)
    rng = seeded_rng(23, "ann")
    for _ in range(6):
        f = random_poly(rng, 1, 3)
        eta = random_derivation(rng, 1, 3)
        assert m.annihilates(omega(2, f, eta))
    assert not m.annihilates(omega(1, x, d))
    assert m.annihilates(omega(17, x, d))  # well beyond the order
    from smashmod import SmashElement
    assert m.annihilates(SmashElement.zero(1))


def test_annihilates_agrees_with_sampling_oracle():
    for mod in (differential_forms(1), jet_module(1, 2), tangent_adjoint(2)):
        rng = seeded_rng(29, "annorc", mod.name)
        for _ in range(6):
            u = omega(rng.randint(1, 3), random_poly(rng, mod.dim, 2),
                      random_derivation(rng, mod.dim, 2))
            assert mod.annihilates(u) == annihilates_by_sampling(mod, u)


def test_min_annihilating_order_examples():
    assert min_annihilating_order(differential_forms(1), x, d) == 2
    rng = seeded_rng(31, "trivial")
    triv = trivial_dmodule(2, 2)
    for _ in range(4):
        f = random_poly(rng, 2, 3)
        eta = random_derivation(rng, 2, 2)
        assert min_annihilating_order(triv, f, eta) == 1
    assert min_annihilating_order(jet_module(1, 2), x, d) == 3
    # constant localizing polynomial
    assert min_annihilating_order(differential_forms(1), Poly.constant(1, 3), d) == 1


def test_min_annihilating_order_brute_force_cross_check():
    j = jet_module(1, 2)
    # independent route: apply each level to a spanning family by term expansion
    fails = [q for q in range(1, j.order + 1)
             if not annihilates_by_sampling(j, omega(q, x, d))]
    assert fails == [1, 2]
    assert min_annihilating_order(j, x, d) == max(fails) + 1


# -- orders --------------------------------------------------------------------------

def test_lie_map_order_values():
    assert trivial_dmodule(1, 2).lie_map_order() == 0
    assert differential_forms(2).lie_map_order() == 1
    assert jet_module(1, 2).lie_map_order() == 2


def test_oracle_order_values():
    assert oracle_order(trivial_dmodule(1, 1), 2) == 0
    assert oracle_order(differential_forms(2), 4) == 1
    assert oracle_order(jet_module(1, 3), 9) == 3


def test_oracle_order_bound_exceeded():
    assert oracle_order(jet_module(1, 2), 1) == 2  # n_max + 1: no n <= 1 suffices


def test_min_order_bounded_by_lie_order_plus_one():
    rng = seeded_rng(53, "minbound")
    for mod in (differential_forms(1), differential_forms(2), jet_module(1, 2),
                tangent_adjoint(2), trivial_dmodule(1, 3)):
        for _ in range(6):
            f = random_poly(rng, mod.dim, 3)
            eta = random_derivation(rng, mod.dim, 2)
            assert min_annihilating_order(mod, f, eta) <= mod.lie_map_order() + 1


def test_jet_order_table():
    for n in range(4):
        j = jet_module(1, n)
        assert j.rank == n + 1
        assert j.lie_map_order() == n
        assert oracle_order(j, j.rank ** 2) == n
        # equality case of the annihilation bound on the jet family
        assert min_annihilating_order(j, x, d) == n + 1


# -- functors ------------------------------------------------------------------------

def test_exterior_power_examples():
    f2 = differential_forms(2)
    vol = exterior_power(f2, 2)
    assert vol.rank == 1 and vol.order == 1 and vol.validated
    # the wedge action of forms(2) on the top power is the divergence twist
    assert vol.tensor == {(1, (1, 0)): ((Poly.constant(2, 1),),),
                          (2, (0, 1)): ((Poly.constant(2, 1),),)}
    assert exterior_power(f2, 3).is_zero_module
    assert exterior_power(f2, 1) == f2
    with pytest.raises(ValueError):
        exterior_power(f2, 0)


def test_exterior_power_of_jets():
    j = jet_module(1, 2)
    top = exterior_power(j, 3)
    assert top.rank == 1 and top.validated
    assert exterior_power(j, 4).is_zero_module
    mid = exterior_power(j, 2)
    assert mid.rank == 3 and mid.validated


def test_dual_examples():
    assert dual_module(trivial_dmodule(1, 2)) == trivial_dmodule(1, 2)
    assert dual_module(differential_forms(1)) == tangent_adjoint(1)
    assert dual_module(differential_forms(2)) == tangent_adjoint(2)


def test_dual_pairing_invariance():
    # eta<phi, m> = <rho*(eta) phi, m> + <phi, rho(eta) m>
    m = differential_forms(2)
    md = dual_module(m)
    rng = seeded_rng(37, "pairing")
    for _ in range(6):
        eta = random_derivation(rng, 2, 2)
        mm = ModuleElement((random_poly(rng, 2, 2), random_poly(rng, 2, 2)))
        phi = ModuleElement((random_poly(rng, 2, 2), random_poly(rng, 2, 2)))
        pair = sum((a * b for a, b in zip(phi.entries, mm.entries)), Poly.zero(2))
        lhs = eta.apply(pair)
        rhs_elems = md.act_derivation(eta, phi), m.act_derivation(eta, mm)
        rhs = sum((a * b for a, b in zip(rhs_elems[0].entries, mm.entries)), Poly.zero(2)) \
            + sum((a * b for a, b in zip(phi.entries, rhs_elems[1].entries)), Poly.zero(2))
        assert lhs == rhs


def test_tensor_product_order_cancellation():
    m = differential_forms(1)
    prod = tensor_product(m, dual_module(m))
    assert prod.rank == 1
    assert prod.order == 0  # the +1 and -1 weights cancel: a plain D-module
    assert prod == trivial_dmodule(1, 1)


def test_tensor_product_rank_and_validation():
    t = tensor_product(differential_forms(2), tangent_adjoint(2))
    assert t.rank == 4 and t.validated and t.order <= 1


# -- serialization -------------------------------------------------------------------

def test_round_trip_every_zoo_module():
    mods = [trivial_dmodule(1, 2), differential_forms(2), tangent_adjoint(1),
            jet_module(1, 2), jet_module(2, 1), twist(Fraction(1, 2))]
    for mod in mods:
        again = module_from_dict(module_to_dict(mod))
        assert again == mod, mod.name


def test_from_dict_schema_errors():
    good = module_to_dict(differential_forms(1))
    bad = dict(good)
    bad["order"] = 0  # now the alpha=(1,) entry exceeds the declared order
    with pytest.raises(ModuleSchemaError, match="exceeds declared order"):
        module_from_dict(bad)
    bad2 = dict(good)
    bad2["rank"] = 2  # matrices no longer match the declared rank
    with pytest.raises(ModuleSchemaError):
        module_from_dict(bad2)
    with pytest.raises(ModuleSchemaError):
        module_from_dict({"dim": 1, "rank": 1})  # missing order
    with pytest.raises(ModuleSchemaError):
        module_from_dict({"dim": 1, "rank": 1, "order": "x"})


def test_from_dict_validation_failure():
    data = {
        "name": "broken", "dim": 2, "rank": 2, "order": 1,
        "terms": [{"i": 1, "alpha": [1, 0],
                   "matrix": [["x1", "0"], ["0", "0"]]}],
    }
    with pytest.raises(ValidationError) as exc:
        module_from_dict(data)
    assert exc.value.report is not None and exc.value.report.status == "fail"


def test_hand_encoded_forms_two():
    # the one-forms module in dim 2, written out by hand
    z, o = "0", "1"
    data = {
        "name": "forms-by-hand", "dim": 2, "rank": 2, "order": 1,
        "terms": [
            {"i": 1, "alpha": [1, 0], "matrix": [[o, z], [z, z]]},
            {"i": 1, "alpha": [0, 1], "matrix": [[z, z], [o, z]]},
            {"i": 2, "alpha": [1, 0], "matrix": [[z, o], [z, z]]},
            {"i": 2, "alpha": [0, 1], "matrix": [[z, z], [z, o]]},
        ],
    }
    mod = module_from_dict(data)
    assert mod == differential_forms(2)
    assert mod.lie_map_order() == 1
