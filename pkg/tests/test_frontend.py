import re

import pytest

from metamono.coherence import resolve_call_site
from metamono.frontend import ExpansionError, expand_program, parse_spec_marker, parse_when_attribute, rewrite_call_site
from metamono.predicate import All, Any, Atom, Equality, Outlives, TraitBound
from metamono.rust.lexer import tokenize
from metamono.rust.parse import ParseError, parse_type
from metamono.terms import WILDCARD, FnPtr, Ground, Named, Var

from conftest import PROGRAMS, compile_and_run, needs_rustc

Ty = parse_type
FIXTURES = ["str_vs_i32", "clone_bound", "zst_bool", "static_borrow", "closure_return", "priority"]


def tokens_of(src: str) -> list[str]:
    return [t.text for t in tokenize(src)]


# ---------------------------------------------------------------- #[when]


def test_when_equality():
    assert parse_when_attribute("T = i32") == Atom(Equality("T", Ground("i32")))


def test_when_any():
    p = parse_when_attribute("any(T = i32, T: Clone)")
    assert p == Any((Atom(Equality("T", Ground("i32"))), Atom(TraitBound("T", ("Clone",)))))


def test_when_higher_ranked():
    p = parse_when_attribute("all(T = &str, T: 'b, U = for<'a> fn(T, &'a i32) -> V)")
    assert isinstance(p, All) and len(p.children) == 3
    assert p.children[1] == Atom(Outlives("T", Named("b")))
    fn = p.children[2].atom.rhs
    assert isinstance(fn, FnPtr) and fn.binders == (Named("a",),) and fn.ret == Var("V")


@pytest.mark.parametrize("bad", ["T", "T ~ i32", "any()", "not(T = i32, U = i32)", "'a", "T = i32 U"])
def test_when_syntax_errors(bad):
    with pytest.raises(ParseError):
        parse_when_attribute(bad)


# ---------------------------------------------------------------- spec!


def test_marker_equality_bounds():
    cs = parse_spec_marker("s.f(42); ZST; [i32];")
    assert (cs.receiver_var, cs.method_name, cs.args) == ("s", "f", ("42",))
    assert cs.receiver_type == Ground("ZST") and cs.bounds == (Ground("i32"),)


def test_marker_trait_clause():
    cs = parse_spec_marker("s.f(v); ZST; [Vec<i32>]; Vec<i32>: Clone")
    assert cs.trait_bounds == ((Ty("Vec<i32>"), ("Clone",)),)


def test_marker_wildcard():
    cs = parse_spec_marker("s.f(x); ZST; [_];")
    assert cs.bounds == (WILDCARD,) and cs.trait_bounds == () and cs.lifetime_facts == ()


def test_marker_keeps_argument_text():
    cs = parse_spec_marker("zst.f(p, |s: &str, n: &i32| s.len() as u32 + *n as u32); ZST; [_, _, _];")
    assert cs.args == ("p", "|s: &str, n: &i32| s.len() as u32 + *n as u32")


def test_marker_lifetime_facts():
    cs = parse_spec_marker("s.f(p); ZST; [&'p str]; 'p: 'static")
    assert cs.lifetime_facts == (Outlives("'p", Named("static")),) or len(cs.lifetime_facts) == 1


@pytest.mark.parametrize("bad", ["s.f(1)", "s.f(1); ZST", "s.f(1); ZST; i32", "f(1); ZST; [i32]", "s.f; ZST; [i32]"])
def test_marker_errors(bad):
    with pytest.raises(ParseError):
        parse_spec_marker(bad)


# ---------------------------------------------------------------- rewriting


def _reg(name):
    return expand_program((PROGRAMS / name).read_text()).registry


def test_rewrite_specialized_and_default():
    reg = _reg("str_vs_i32.rs")
    cs = parse_spec_marker("s.f(42); ZST; [i32];")
    assert rewrite_call_site(cs, resolve_call_site(cs, reg), reg).text == "<ZST as Trait_i32>::f(&s, 42)"
    cs = parse_spec_marker('s.f("s"); ZST; [&str];')
    assert rewrite_call_site(cs, resolve_call_site(cs, reg), reg).text == '<ZST as Trait<&str>>::f(&s, "s")'


def test_rewrite_receiver_with_type_arguments():
    reg = _reg("zst_bool.rs")
    cs = parse_spec_marker("flag.f(1, true); ZST<bool>; [i32, bool];")
    assert rewrite_call_site(cs, resolve_call_site(cs, reg), reg).text == "<ZST<bool> as Trait_i32_bool>::f(&flag, 1, true)"
    cs = parse_spec_marker("byte.f(1, 7u8); ZST<u8>; [i32, u8];")
    assert rewrite_call_site(cs, resolve_call_site(cs, reg), reg).text == "<ZST<u8> as Trait<i32, u8>>::f(&byte, 1, 7u8)"


def test_rewrite_trait_bound_keeps_generic_argument():
    reg = _reg("clone_bound.rs")
    cs = parse_spec_marker("s.f(v); ZST; [Vec<i32>]; Vec<i32>: Clone")
    assert rewrite_call_site(cs, resolve_call_site(cs, reg), reg).text == "<ZST as Trait_Clone<Vec<i32>>>::f(&s, v)"


# ---------------------------------------------------------------- expand_program


def test_golden_str_vs_i32():
    out = expand_program((PROGRAMS / "str_vs_i32_plain.rs").read_text()).output
    assert tokens_of(out) == tokens_of((PROGRAMS / "str_vs_i32_plain.golden.rs").read_text())


@pytest.mark.parametrize("name", FIXTURES)
def test_markers_eliminated_and_idempotent(name):
    out = expand_program((PROGRAMS / f"{name}.rs").read_text()).output
    assert not re.search(r"#\[when|spec!", out)
    again = expand_program(out)
    assert again.output == out


def test_annotation_free_passthrough():
    src = (PROGRAMS / "plain_overlap.rs").read_text()
    assert expand_program(src).output == src
    odd = "fn  main ( ) {\n\tlet x=1 ;   // spacing kept\n}\n"
    assert expand_program(odd).output == odd


def test_registry_json_shape():
    reg = _reg("str_vs_i32.rs").to_json()
    assert reg["meta_traits"][1] == {"name": "Trait_i32", "base": "Trait", "disjunct": ["T = i32"]}
    assert {i["meta_trait"] for i in reg["impls"]} == {"Trait", "Trait_i32"}


def test_no_annotations_means_default_impls_only():
    reg = expand_program((PROGRAMS / "plain_overlap.rs").read_text().replace("i32 {", "String {")).registry
    assert all(i.meta_trait == i.base for i in reg.impls)


def _diags(src):
    with pytest.raises(ExpansionError) as err:
        expand_program(src)
    for d in err.value.diagnostics:
        assert 0 <= d.span[0] <= d.span[1] <= len(src), d
    return err.value.diagnostics


BASE = (PROGRAMS / "str_vs_i32.rs").read_text()


def test_opaque_return_type_rejected():
    src = BASE + "\nfn make() -> impl Trait<i32> {\n    ZST\n}\n"
    (d,) = _diags(src)
    assert d.code == "MM0003" and src[d.span[0] : d.span[1]] == "impl Trait"


def test_trait_object_parameter_rejected():
    (d,) = _diags(BASE + "\nfn take(x: &dyn Trait<i32>) {}\n")
    assert d.code == "MM0003"


def test_self_recursive_marker_rejected():
    src = BASE.replace('println!("specialized i32");', 'spec! { self.f(a); ZST; [i32]; }')
    codes = [d.code for d in _diags(src)]
    assert codes == ["MM0003"]


def test_unrelated_impl_trait_allowed():
    src = BASE + "\nfn show() -> impl std::fmt::Debug {\n    1\n}\n"
    assert "impl std::fmt::Debug" in expand_program(src).output


def test_all_independent_diagnostics_reported():
    src = (PROGRAMS / "duplicate.rs").read_text() + "\nfn take(x: &dyn Trait<i32>) {}\n"
    codes = sorted(d.code for d in _diags(src))
    assert codes == ["MM0001", "MM0003"]


def test_syntax_error_in_predicate():
    (d,) = _diags(BASE.replace("#[when(T = i32)]", "#[when(T ~ i32)]"))
    assert d.code == "MM0007"


def test_contradictory_predicate():
    assert "MM0004" in [d.code for d in _diags(BASE.replace("#[when(T = i32)]", "#[when(all(T = i32, T = bool))]"))]


def test_unknown_method_and_trait():
    assert [d.code for d in _diags(BASE.replace("s.f(42)", "s.g(42)"))] == ["MM0006"]


def test_disjunct_cap_reported():
    pred = "all(" + ", ".join(f"any(T: A{i}, T: B{i})" for i in range(9)) + ")"
    codes = [d.code for d in _diags(BASE.replace("#[when(T = i32)]", f"#[when({pred})]"))]
    assert codes and set(codes) == {"MM0004"}


# ---------------------------------------------------------------- host compiler round trips


@needs_rustc
def test_plain_overlap_rejected_by_host(tmp_path):
    r = compile_and_run((PROGRAMS / "plain_overlap.rs").read_text(), tmp_path)
    assert r.returncode != 0 and "E0119" in r.stderr


@needs_rustc
@pytest.mark.parametrize("name", FIXTURES)
def test_expanded_fixture_runs(name, tmp_path):
    out = expand_program((PROGRAMS / f"{name}.rs").read_text()).output
    r = compile_and_run(out, tmp_path)
    assert r.returncode == 0, r.stderr
    assert r.stdout == (PROGRAMS / f"{name}.expected").read_text()
