import re

import pytest

from metamono.predicate import Disjunct, Equality, TraitBound, canonicalize
from metamono.rust.lexer import join_tokens, tokenize
from metamono.rust.parse import parse_predicate, parse_type
from metamono.synthesis import (
    AssociatedItem,
    ImplHeader,
    ImplSource,
    ParameterPartition,
    SpecializationRegistry,
    SynthesisError,
    TraitDecl,
    extract_impl,
    mangle_name,
    partition_parameters,
    synthesize_meta_trait,
)
from metamono.terms import Var, walk

Ty = parse_type


def D(*atoms):
    return Disjunct.of(atoms)


def method(sig: str, body: str | None = None) -> AssociatedItem:
    toks = tuple(tokenize(sig))
    name = toks[toks.index(next(t for t in toks if t.text == "fn")) + 1].text
    return AssociatedItem("fn", name, toks, body, "&self")


TRAIT = TraitDecl("Trait", ("T",), (), (method("fn f(&self, a: T)"),))
ZST = ImplHeader("ZST", (), "Trait", (Var("T"),), (("T", None),))


def only(d: Disjunct) -> Disjunct:
    (c,) = canonicalize(parse_predicate(d) if isinstance(d, str) else d).disjuncts
    return c


# ---------------------------------------------------------------- mangle_name


def test_mangle_examples():
    assert mangle_name("Trait", D(Equality("T", Ty("i32")))) == "Trait_i32"
    assert mangle_name("Trait", D(TraitBound("T", ("Clone",)))) == "Trait_Clone"
    assert mangle_name("Trait", D()) == "Trait"


def test_mangle_deterministic():
    d = D(Equality("T", Ty("&'a str")), Equality("U", Ty("&'a i32")))
    assert mangle_name("Trait", d) == mangle_name("Trait", d) == "Trait_ref_lt_a_str_ref_lt_a_i32"


def test_mangle_collision_gets_hash_suffix():
    pairs = [("A_B", "A<B>"), ("Vec<i32>", "Vec_i32")]
    for x, y in pairs:
        dx, dy = D(Equality("T", Ty(x))), D(Equality("T", Ty(y)))
        assert mangle_name("Trait", dx) == mangle_name("Trait", dy)  # readable forms collide
        reg = SpecializationRegistry()
        reg.register_base(TRAIT)
        first = mangle_name("Trait", dx, reg.taken())
        reg.add_meta_trait(TraitDecl(first, (), (), ()), "Trait", dx)
        second = mangle_name("Trait", dy, reg.taken())
        assert first != second
        assert re.fullmatch(r"Trait_[A-Za-z0-9_]+_[0-9a-f]{8}", second)


def test_mangle_invalid_identifier_is_hashed():
    name = mangle_name("Trait", D(Equality("T", Ty("!"))))
    assert re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*_[0-9a-f]{8}", name)


# ---------------------------------------------------------------- partition


def test_partition_zst_bool():
    header = ImplHeader("ZST", (Var("U"),), "Trait", (Var("T"), Var("U")), (("T", None), ("U", None)))
    trait = TraitDecl("Trait", ("T", "U"), (), (method("fn f(&self, a: T, b: U)"),))
    part = partition_parameters(trait, header, D(Equality("T", Ty("i32")), Equality("U", Ty("bool"))))
    assert part == ParameterPartition(eq_bound_in_trait=("T",), eq_bound_shared=("U",))


def test_partition_empty_disjunct_is_all_generic():
    part = partition_parameters(TRAIT, ZST, D())
    assert part == ParameterPartition(generic_in_trait=("T",))


def test_partition_trait_bound():
    assert partition_parameters(TRAIT, ZST, D(TraitBound("T", ("Clone",)))).trait_bound_in_trait == ("T",)


def test_partition_unknown_parameter():
    with pytest.raises(SynthesisError, match="`Q`"):
        partition_parameters(TRAIT, ZST, D(Equality("Q", Ty("i32"))))


# ---------------------------------------------------------------- synthesize / extract


def _sig(decl, name="f"):
    return join_tokens(list(decl.method(name).signature))


def test_synthesize_equality_bound():
    d = D(Equality("T", Ty("i32")))
    meta = synthesize_meta_trait(TRAIT, d, partition_parameters(TRAIT, ZST, d))
    assert meta.name == "Trait_i32" and meta.type_params == ()
    assert _sig(meta) == "fn f(&self, a: i32)"
    assert meta.render() == "trait Trait_i32 {\n    fn f(&self, a: i32);\n}"


def test_synthesize_trait_bound_keeps_generic():
    d = D(TraitBound("T", ("Clone",)))
    meta = synthesize_meta_trait(TRAIT, d, partition_parameters(TRAIT, ZST, d))
    assert meta.name == "Trait_Clone" and meta.type_params == ("T",)
    assert _sig(meta) == "fn f(&self, a: T)"


def test_synthesize_default_is_identity():
    assert synthesize_meta_trait(TRAIT, D(), partition_parameters(TRAIT, ZST, D())) is TRAIT


def test_synthesize_retains_lifetimes_of_bounds():
    trait = TraitDecl("Trait", ("T", "U"), (), (method("fn f(&self, a: T, b: U)"),))
    header = ImplHeader("ZST", (), "Trait", (Var("T"), Var("U")), (("T", None), ("U", None)), ("a",))
    d = only("all(T = &str, T: 'a, U = &'a i32)")
    meta = synthesize_meta_trait(trait, d, partition_parameters(trait, header, d), header)
    assert meta.lifetime_params == ("a",) and meta.type_params == ()
    assert _sig(meta) == "fn f(&self, a: &'a str, b: &'a i32)"


def test_extract_str_vs_i32():
    d = D(Equality("T", Ty("i32")))
    part = partition_parameters(TRAIT, ZST, d)
    meta = synthesize_meta_trait(TRAIT, d, part)
    src = ImplSource(ZST, (method("fn f(&self, a: T)", '{ println!("specialized i32"); }'),))
    out = extract_impl(src, meta, d, part)
    assert out.render() == 'impl Trait_i32 for ZST {\n    fn f(&self, a: i32) { println!("specialized i32"); }\n}'


def test_extract_trait_bound_generics():
    d = D(TraitBound("T", ("Clone",)))
    part = partition_parameters(TRAIT, ZST, d)
    meta = synthesize_meta_trait(TRAIT, d, part)
    out = extract_impl(ImplSource(ZST, (method("fn f(&self, a: T)", "{}"),)), meta, d, part)
    assert out.header.generics == (("T", ("Clone",)),)
    assert out.render().startswith("impl<T: Clone> Trait_Clone<T> for ZST {")


def test_extract_shared_parameter_substituted_in_implementor():
    trait = TraitDecl("Trait", ("T", "U"), (), (method("fn f(&self, a: T, b: U)"),))
    header = ImplHeader("ZST", (Var("U"),), "Trait", (Var("T"), Var("U")), (("T", None), ("U", None)))
    d = D(Equality("T", Ty("i32")), Equality("U", Ty("bool")))
    part = partition_parameters(trait, header, d)
    meta = synthesize_meta_trait(trait, d, part, header)
    out = extract_impl(ImplSource(header, (method("fn f(&self, a: T, b: U)", "{}"),)), meta, d, part)
    assert out.render().splitlines()[0] == "impl Trait_i32_bool for ZST<bool> {"
    assert _no_residue(out.header, d)


def _no_residue(header: ImplHeader, d: Disjunct) -> bool:
    eq = {a.param for a in d.atoms if isinstance(a, Equality)}
    terms = list(header.implementor_args) + list(header.trait_args)
    return not any(isinstance(s, Var) and s.name in eq for t in terms for s in walk(t))


def test_synthesis_is_deterministic():
    d = only("all(T = &str, T: 'a, U = &'a i32)")
    trait = TraitDecl("Trait", ("T", "U"), (), (method("fn f(&self, a: T, b: U)"),))
    header = ImplHeader("ZST", (), "Trait", (Var("T"), Var("U")), (("T", None), ("U", None)), ("a",))
    a = synthesize_meta_trait(trait, d, partition_parameters(trait, header, d), header)
    b = synthesize_meta_trait(trait, d, partition_parameters(trait, header, d), header)
    assert a == b


# ---------------------------------------------------------------- registry


def test_registry_contains_default_and_rejects_unknown_trait():
    reg = SpecializationRegistry()
    reg.register_base(TRAIT)
    assert reg.to_json()["meta_traits"] == [{"name": "Trait", "base": "Trait", "disjunct": []}]
    reg.seal()
    with pytest.raises(SynthesisError):
        reg.register_base(TRAIT)


def test_registry_identical_meta_trait_reused():
    reg = SpecializationRegistry()
    reg.register_base(TRAIT)
    d = D(Equality("T", Ty("i32")))
    meta = synthesize_meta_trait(TRAIT, d, partition_parameters(TRAIT, ZST, d))
    assert reg.add_meta_trait(meta, "Trait", d) is reg.add_meta_trait(meta, "Trait", d)
    assert len(reg.meta_traits) == 2
