#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "acorn/kernel.hpp"
#include "acorn/pretty.hpp"
#include "acorn/programs.hpp"
#include "acorn/soundness.hpp"
#include "acorn/translate.hpp"
#include "support.hpp"

using namespace acorn;
using namespace acorn::soundness;
using acorn::testing::lib;
using acorn::testing::parse;
using kernel::Term;

namespace {

// Rebuilds a term bottom-up, letting `f` rewrite each node after its
// children.
template <class F> Term rewrite(const Term& t, const F& f)
{
    namespace kt = kernel::term;
    Term out = std::visit(
        [&](const auto& x) -> Term {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, kt::Lambda>)
                return Term::lambda(x.hint, rewrite(x.dom, f), rewrite(x.body, f));
            else if constexpr (std::is_same_v<T, kt::App>)
                return Term::app(rewrite(x.fn, f), rewrite(x.arg, f));
            else if constexpr (std::is_same_v<T, kt::LetIn>)
                return Term::let_in(x.hint, rewrite(x.ty, f), rewrite(x.bound, f), rewrite(x.body, f));
            else if constexpr (std::is_same_v<T, kt::Match>) {
                std::vector<Term::Branch> bs;
                for (const auto& b : x.branches)
                    bs.push_back({b.arity, rewrite(b.body, f)});
                return Term::match(x.ind, x.num_params, x.ty_params, x.ret_ty, rewrite(x.scrut, f), bs);
            } else if constexpr (std::is_same_v<T, kt::Fix>)
                return Term::fix(x.hint, x.fty, rewrite(x.body, f));
            else
                return t;
        },
        t.rep().node);
    return f(out);
}

// Let bodies are shifted as if the binder were counted twice.
Translator let_lifting_translator()
{
    auto std_tr = Translator::standard();
    return {[std_tr](const GlobalEnv& env, const Expr& e) {
                return rewrite(std_tr.expr(env, e), [](const Term& t) {
                    if (const auto* l = t.as<kernel::term::LetIn>())
                        return Term::let_in(l->hint, l->ty, l->bound, kernel::lift(l->body, 1, 1));
                    return t;
                });
            },
            std_tr.env};
}

// Constructors of two-constructor types are swapped when used as values but
// not in match positions.
Translator swapped_constructor_translator()
{
    auto std_tr = Translator::standard();
    return {[std_tr](const GlobalEnv& env, const Expr& e) {
                return rewrite(std_tr.expr(env, e), [](const Term& t) {
                    if (const auto* c = t.as<kernel::term::Construct>(); c && c->ind == "Bool")
                        return Term::construct(c->ind, 1 - c->index);
                    return t;
                });
            },
            std_tr.env};
}

}  // namespace

TEST(Generator, ClosedDeterministicAndBounded)
{
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Expr a = gen_expr(seed, 12, lib().env);
        EXPECT_EQ(a, gen_expr(seed, 12, lib().env));
        EXPECT_TRUE(expr_closed_under(0, a));
        EXPECT_FALSE(a.has_named());
    }
}

TEST(Generator, ProgramsMostlyTerminate)
{
    std::size_t ok = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed)
        ok += acorn::testing::run(lib(), gen_expr(seed, 12, lib().env), kDefaultFuel).ok();
    EXPECT_GT(ok, 290u);
}

TEST(DiffCheck, AgreesOnGeneratedPrograms)
{
    const auto kenv = translate_env(lib().env);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Expr e = gen_expr(seed, 12, lib().env);
        auto d = diff_check(lib().env, kenv, kDefaultFuel, e);
        EXPECT_EQ(d.verdict, Verdict::Agree) << print(e) << "\n" << d.detail;
    }
}

TEST(DiffCheck, LowFuelIsInconclusive)
{
    Expr e = parse("foldr @Int @Int plusInt 0z (Cons @Int 1z (Cons @Int 2z (Nil @Int)))");
    auto d = diff_check(lib().env, 2, e);
    EXPECT_EQ(d.verdict, Verdict::Inconclusive);
    EXPECT_TRUE(d.starved.has_value());
}

TEST(DiffCheck, StuckOnBothSides)
{
    Expr e = parse("(fix go (n : Nat) : Nat = go n) 3");
    auto d = diff_check(lib().env, 1000, e);
    EXPECT_EQ(d.verdict, Verdict::BothStuck);
}

TEST(DiffCheck, ClosureResultsCompareAfterReadBack)
{
    Expr e = parse("let k : Int = 5z in \\(x : Int) -> plusInt k x");
    auto d = diff_check(lib().env, 1000, e);
    EXPECT_EQ(d.verdict, Verdict::Agree) << d.detail;
    ASSERT_TRUE(d.rhs);
    EXPECT_EQ(*d.rhs, expr_to_term(lib().env, parse("\\(x : Int) -> plusInt 5z x")));
}

TEST(DiffCheck, CatchesBrokenTranslations)
{
    const auto kenv = translate_env(lib().env);
    for (const auto& [label, tr] : {std::pair{"let lifting", let_lifting_translator()},
                                    std::pair{"swapped Bool", swapped_constructor_translator()}}) {
        std::size_t disagree = 0;
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            auto d = diff_check(lib().env, kenv, kDefaultFuel, gen_expr(seed, 12, lib().env), tr);
            disagree += d.verdict == Verdict::Disagree;
        }
        EXPECT_GT(disagree, 0u) << label;
    }
}

TEST(Lemmas, SitesFromGeneratedPrograms)
{
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Expr e = gen_expr(seed, 12, lib().env);
        for (const auto& s : harvest_sites(lib().env, kDefaultFuel, e, 4, 3)) {
            auto c = check_subst_commutes(lib().env, s);
            if (!c.applicable)
                continue;
            ++checked;
            EXPECT_TRUE(c.holds) << c.detail;
        }
    }
    EXPECT_GT(checked, 200u);
}

TEST(Corpus, ShippedCorpusPasses)
{
    HarnessConfig cfg;
    auto r = run_corpus(ACORN_CORPUS_DIR, cfg);
    EXPECT_TRUE(r.success()) << report_text(r);
    EXPECT_GE(r.programs.size(), 30u);
    EXPECT_EQ(r.count(Verdict::Inconclusive), 0u);
    EXPECT_TRUE(r.errors.empty());
}

TEST(Corpus, JsonCorpusGivesTheSameReport)
{
    HarnessConfig cfg;
    auto a = report_text(run_corpus(ACORN_CORPUS_DIR, cfg));
    auto b = report_text(run_corpus(std::string(ACORN_CORPUS_DIR) + "/json", cfg));
    EXPECT_EQ(a, b);
}

TEST(Corpus, ReportsAreReproducible)
{
    HarnessConfig cfg;
    cfg.gen_count = 50;
    auto a = run_corpus(ACORN_CORPUS_DIR, cfg);
    auto b = run_corpus(ACORN_CORPUS_DIR, cfg);
    EXPECT_EQ(report_text(a), report_text(b));
    EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
}

TEST(Corpus, BadFilesAreReportedNotFatal)
{
    HarnessConfig cfg;
    auto r = run_corpus(std::string(ACORN_CORPUS_DIR) + "/bad", cfg);
    EXPECT_FALSE(r.success());
    EXPECT_GE(r.errors.size(), 3u);
    EXPECT_EQ(r.program_errors(), 1u);  // the non-exhaustive case
}
