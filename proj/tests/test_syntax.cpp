#include <gtest/gtest.h>

#include "acorn/parse.hpp"
#include "acorn/pretty.hpp"
#include "acorn/programs.hpp"
#include "acorn/serialize.hpp"
#include "acorn/soundness.hpp"
#include "support.hpp"

using namespace acorn;
using acorn::testing::lib;
using acorn::testing::parse;

TEST(Indices, SharedIndexSpaceCountsTypeBinders)
{
    // /\A -> \x : A -> x : the term variable is #0, its type ^1 (the type
    // binder sits one level further out).
    Expr e = parse("/\\A -> \\(x : A) -> x");
    const auto* tl = e.as<expr::TyLam>();
    ASSERT_NE(tl, nullptr);
    const auto* l = tl->body.as<expr::Lam>();
    ASSERT_NE(l, nullptr);
    ASSERT_NE(l->dom.as<ty::Var>(), nullptr);
    EXPECT_EQ(l->dom.as<ty::Var>()->index, 0u);
    ASSERT_NE(l->body.as<expr::Var>(), nullptr);
    EXPECT_EQ(l->body.as<expr::Var>()->index, 0u);

    Expr e2 = parse("/\\A -> \\(x : A) -> \\(y : A) -> x");
    const auto* inner = e2.as<expr::TyLam>()->body.as<expr::Lam>()->body.as<expr::Lam>();
    EXPECT_EQ(inner->dom.as<ty::Var>()->index, 1u);
    EXPECT_EQ(inner->body.as<expr::Var>()->index, 1u);
}

TEST(Indices, RawIndexSyntax)
{
    EXPECT_EQ(parse("\\(x : Nat) -> #0"), parse("\\(x : Nat) -> x"));
    EXPECT_EQ(parse("\\(x : Nat) -> \\(y : Nat) -> addNat #1 #0"), parse("\\(x : Nat) -> \\(y : Nat) -> addNat x y"));
}

TEST(Indices, LiftShiftsOnlyFreeVariables)
{
    Expr open = Expr::app(Expr::lam("x", Ty::ind("Nat"), Expr::var(1)), Expr::var(0));
    Expr lifted = lift(open, 3);
    const auto* a = lifted.as<expr::App>();
    EXPECT_EQ(a->arg.as<expr::Var>()->index, 3u);
    EXPECT_EQ(a->fn.as<expr::Lam>()->body.as<expr::Var>()->index, 4u);
    EXPECT_EQ(lift(open, 0), open);
}

TEST(Closedness, LooseCounts)
{
    EXPECT_TRUE(expr_closed_under(0, parse("\\(x : Nat) -> x")));
    Expr open = Expr::lam("x", Ty::ind("Nat"), Expr::var(1));
    EXPECT_FALSE(expr_closed_under(0, open));
    EXPECT_TRUE(expr_closed_under(1, open));
    EXPECT_EQ(open.loose(), 1u);
}

TEST(WellFormedness, StandardLibraryIsWellFormed)
{
    EXPECT_TRUE(wf_global(lib().env).ok());
    for (auto name : programs::embedded_names())
        EXPECT_TRUE(wf_global(programs::load_embedded(name).env).ok()) << name;
}

TEST(WellFormedness, RejectsOpenConstantAndBadArgument)
{
    GlobalEnv env = lib().env;
    env.define("escape", Expr::lam("x", Ty::ind("Nat"), Expr::var(1)));
    auto r = wf_global(env);
    EXPECT_FALSE(r.ok());

    GlobalEnv env2 = lib().env;
    env2.add_inductive({"Broken", 0, {{"B", {Ty::var(3)}}}});
    EXPECT_FALSE(wf_global(env2).ok());
}

TEST(Names, UnboundNameIsReported)
{
    EXPECT_THROW(parse("\\(x : Nat) -> y"), UnboundName);
    EXPECT_THROW(parse_module("def f = g 1", lib()), UnboundName);
}

TEST(Names, SyntaxErrorCarriesPosition)
{
    try {
        parse_module("def f = (addNat 1\n", lib());
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_GE(e.line(), 1u);
    }
}

TEST(Names, ShadowingResolvesToInnermost)
{
    Expr e = parse("let x : Nat = 1 in let x : Nat = 2 in x");
    auto r = acorn::testing::run(lib(), e);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.value(), programs::nat_val(2));
}

// Printing then parsing gives back the same nameless term, for every corpus
// program and a batch of generated ones.
TEST(RoundTrip, PrintParse)
{
    std::size_t checked = 0;
    for (auto name : programs::embedded_names()) {
        if (name == "stdlib")
            continue;
        Module m = programs::load_embedded(name);
        for (const auto& [pname, e] : m.programs) {
            auto text = print(e, &m.env);
            EXPECT_EQ(parse_expr(text, m), e) << name << "/" << pname << ": " << text;
            ++checked;
        }
    }
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Expr e = soundness::gen_expr(seed, 12, lib().env);
        auto text = print(e, &lib().env);
        EXPECT_EQ(parse(text), e) << text;
        ++checked;
    }
    EXPECT_GT(checked, 200u);
}

TEST(RoundTrip, ExprJson)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Expr e = soundness::gen_expr(seed, 12, lib().env);
        Json j = to_json(e);
        EXPECT_EQ(expr_from_json(Json::parse(j.dump())), e);
    }
}

TEST(RoundTrip, ModuleJson)
{
    for (auto name : programs::embedded_names()) {
        const bool standalone = name == "stdlib";
        Module m = standalone ? programs::prelude() : programs::load_embedded(name);
        Module base = standalone ? empty_module() : programs::prelude();
        Module back = module_from_json(Json::parse(module_to_json(m).dump()), base);
        EXPECT_EQ(back.env, m.env) << name;
        EXPECT_EQ(back.definitions, m.definitions) << name;
        EXPECT_EQ(back.programs, m.programs) << name;
    }
}

TEST(RoundTrip, ModuleNamesListOnlyOwnDeclarations)
{
    Module m = programs::load_embedded("counter");
    EXPECT_EQ(std::count(m.inductive_names.begin(), m.inductive_names.end(), "List"), 0);
    EXPECT_EQ(std::count(m.inductive_names.begin(), m.inductive_names.end(), "CState"), 1);
}

TEST(Serialize, RejectsMalformedJson)
{
    EXPECT_ANY_THROW(expr_from_json(Json::parse(R"({"tag":"Nope"})")));
    EXPECT_ANY_THROW(expr_from_json(Json::parse(R"({"tag":"Var"})")));
}
