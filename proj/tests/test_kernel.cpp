#include <gtest/gtest.h>

#include <map>
#include <random>
#include <string>

#include "acorn/kernel.hpp"
#include "acorn/pretty.hpp"
#include "acorn/serialize.hpp"
#include "acorn/translate.hpp"
#include "support.hpp"

using namespace acorn;
using kernel::Term;

namespace {

Term nat_ind()
{
    return Term::ind("Nat");
}

// A small named term language used as an independent oracle for lifting and
// substitution: binders get globally unique names, so substituting closed
// terms can never capture.
struct Named {
    enum Kind { Var, Free, Lam, App, Let, Leaf } kind = Leaf;
    std::string name;     // Var, Lam/Let binder
    std::size_t free = 0;  // Free: index counted from outside the term
    Term leaf = Term::sort_set();
    std::vector<Named> kids;
};

Named to_named(const Term& t, std::vector<std::string>& ctx, int& counter)
{
    namespace kt = kernel::term;
    Named n;
    if (const auto* r = t.as<kt::Rel>()) {
        if (r->index < ctx.size()) {
            n.kind = Named::Var;
            n.name = ctx[ctx.size() - 1 - r->index];
        } else {
            n.kind = Named::Free;
            n.free = r->index - ctx.size();
        }
    } else if (const auto* l = t.as<kt::Lambda>()) {
        n.kind = Named::Lam;
        n.name = "v" + std::to_string(counter++);
        n.kids.push_back(to_named(l->dom, ctx, counter));
        ctx.push_back(n.name);
        n.kids.push_back(to_named(l->body, ctx, counter));
        ctx.pop_back();
    } else if (const auto* a = t.as<kt::App>()) {
        n.kind = Named::App;
        n.kids.push_back(to_named(a->fn, ctx, counter));
        n.kids.push_back(to_named(a->arg, ctx, counter));
    } else if (const auto* le = t.as<kt::LetIn>()) {
        n.kind = Named::Let;
        n.name = "v" + std::to_string(counter++);
        n.kids.push_back(to_named(le->ty, ctx, counter));
        n.kids.push_back(to_named(le->bound, ctx, counter));
        ctx.push_back(n.name);
        n.kids.push_back(to_named(le->body, ctx, counter));
        ctx.pop_back();
    } else {
        n.leaf = t;
    }
    return n;
}

Term from_named(const Named& n, std::vector<std::string>& ctx)
{
    switch (n.kind) {
    case Named::Var:
        for (std::size_t i = 0; i < ctx.size(); ++i)
            if (ctx[ctx.size() - 1 - i] == n.name)
                return Term::rel(i);
        throw std::logic_error("unbound oracle variable");
    case Named::Free:
        return Term::rel(n.free + ctx.size());
    case Named::Lam: {
        Term dom = from_named(n.kids[0], ctx);
        ctx.push_back(n.name);
        Term body = from_named(n.kids[1], ctx);
        ctx.pop_back();
        return Term::lambda("x", dom, body);
    }
    case Named::App:
        return Term::app(from_named(n.kids[0], ctx), from_named(n.kids[1], ctx));
    case Named::Let: {
        Term ty = from_named(n.kids[0], ctx);
        Term bound = from_named(n.kids[1], ctx);
        ctx.push_back(n.name);
        Term body = from_named(n.kids[2], ctx);
        ctx.pop_back();
        return Term::let_in("x", ty, bound, body);
    }
    case Named::Leaf:
        return n.leaf;
    }
    return n.leaf;
}

// Replaces free variables by name: index i < |ts| becomes ts[i] (converted
// to named form, fresh binder names), others are renumbered.
Named named_subst(const Named& n, const std::vector<Named>& ts)
{
    if (n.kind == Named::Free) {
        if (n.free < ts.size())
            return ts[n.free];
        Named out = n;
        out.free -= ts.size();
        return out;
    }
    Named out = n;
    for (auto& k : out.kids)
        k = named_subst(k, ts);
    return out;
}

Named named_lift(const Named& n, std::size_t by, std::size_t cutoff)
{
    Named out = n;
    if (n.kind == Named::Free && n.free >= cutoff)
        out.free += by;
    for (auto& k : out.kids)
        k = named_lift(k, by, cutoff);
    return out;
}

Term random_term(std::mt19937_64& rng, int depth, std::size_t max_free)
{
    int choice = depth <= 0 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 7);
    switch (choice) {
    case 0:
        return Term::rel(rng() % (max_free + 1));
    case 1:
        return Term::construct("Bool", rng() % 2);
    case 2:
        return Term::prim(PrimVal::natural(rng() % 10));
    case 3:
    case 4:
        return Term::lambda("x", nat_ind(), random_term(rng, depth - 1, max_free + 1));
    case 5:
        return Term::app(random_term(rng, depth - 1, max_free), random_term(rng, depth - 1, max_free));
    default:
        return Term::let_in("y", nat_ind(), random_term(rng, depth - 1, max_free),
                            random_term(rng, depth - 1, max_free + 1));
    }
}

Term random_closed(std::mt19937_64& rng, int depth)
{
    for (;;) {
        Term t = random_term(rng, depth, 2);
        if (t.loose() == 0)
            return t;
    }
}

kernel::KernelEnv lib_kenv()
{
    return translate_env(acorn::testing::lib().env);
}

}  // namespace

TEST(Lift, Examples)
{
    EXPECT_EQ(kernel::lift(Term::rel(0), 1), Term::rel(1));
    Term lam = Term::lambda("_", Term::sort_set(), Term::rel(0));
    EXPECT_EQ(kernel::lift(lam, 1), lam);
    Term t = Term::app(Term::rel(0), Term::lambda("_", Term::sort_set(), Term::rel(1)));
    EXPECT_EQ(kernel::lift(t, 2), Term::app(Term::rel(2), Term::lambda("_", Term::sort_set(), Term::rel(3))));
}

TEST(Lift, Laws)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        Term t = random_term(rng, 5, 3);
        std::size_t k = rng() % 3, m = rng() % 3, n = rng() % 3;
        EXPECT_EQ(kernel::lift(t, 0, k), t);
        EXPECT_EQ(kernel::lift(kernel::lift(t, n, k), m, k), kernel::lift(t, m + n, k));
    }
}

TEST(Lift, AgreesWithNamedOracle)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        Term t = random_term(rng, 5, 3);
        std::size_t k = rng() % 3, n = rng() % 4;
        std::vector<std::string> ctx;
        int counter = 0;
        Named named = to_named(t, ctx, counter);
        EXPECT_EQ(kernel::lift(t, n, k), from_named(named_lift(named, n, k), ctx)) << print(t);
    }
}

TEST(Subst, Examples)
{
    Term t = Term::app(Term::rel(0), Term::rel(3));
    EXPECT_EQ(kernel::parallel_subst({}, t), t);
    std::vector<Term> ts{Term::construct("Bool", 0)};
    EXPECT_EQ(kernel::parallel_subst(ts, Term::rel(0)), Term::construct("Bool", 0));
    EXPECT_EQ(kernel::parallel_subst(ts, Term::rel(2)), Term::rel(1));
}

TEST(Subst, AgreesWithNamedOracle)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 500; ++i) {
        Term t = random_term(rng, 5, 3);
        std::vector<Term> ts;
        for (std::size_t j = 0, n = rng() % 4; j < n; ++j)
            ts.push_back(random_closed(rng, 3));

        std::vector<std::string> ctx;
        int counter = 0;
        Named named = to_named(t, ctx, counter);
        std::vector<Named> nts;
        for (const auto& s : ts)
            nts.push_back(to_named(s, ctx, counter));
        EXPECT_EQ(kernel::parallel_subst(ts, t), from_named(named_subst(named, nts), ctx)) << print(t);
    }
}

TEST(Subst, CommutesWithLiftOnClosedSubstituents)
{
    std::mt19937_64 rng(10);
    for (int i = 0; i < 500; ++i) {
        Term t = random_term(rng, 5, 3);
        std::vector<Term> ts;
        for (std::size_t j = 0, n = 1 + rng() % 3; j < n; ++j)
            ts.push_back(random_closed(rng, 3));
        std::size_t n = rng() % 3;
        // Lifting the free variables above the substituted block.
        EXPECT_EQ(kernel::lift(kernel::parallel_subst(ts, t), n),
                  kernel::parallel_subst(ts, kernel::lift(t, n, ts.size())));
    }
}

TEST(CbvEval, PlusOne)
{
    // (fun x : nat => S x) 0 with unary naturals.
    kernel::KernelEnv env;
    env.add_inductive({"nat", 0, {{"O", 0, {}, Term::rel(0)}, {"S", 1, {Term::rel(0)}, Term::rel(1)}}});
    Term plus_one = Term::lambda("x", Term::ind("nat"), Term::app(Term::construct("nat", 1), Term::rel(0)));
    auto r = kernel::cbv_eval(env, 100, Term::app(plus_one, Term::construct("nat", 0)));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.value(), Term::app(Term::construct("nat", 1), Term::construct("nat", 0)));
}

TEST(CbvEval, ValuesAreFixedPoints)
{
    auto env = lib_kenv();
    std::vector<Term> values{
        Term::lambda("x", nat_ind(), Term::rel(0)),
        Term::prim(PrimVal::integer(4)),
        Term::sort_set(),
        Term::prod("_", nat_ind(), nat_ind()),
        Term::app(Term::app(Term::construct("Maybe", 1), nat_ind()), Term::prim(PrimVal::natural(1))),
        Term::app(Term::ind("List"), nat_ind()),
        Term::app(Term::constant("plusInt"), Term::prim(PrimVal::integer(1))),
    };
    for (const auto& v : values) {
        auto r = kernel::cbv_eval(env, 10, v);
        ASSERT_TRUE(r.ok()) << print(v);
        EXPECT_EQ(r.value(), v);
    }
}

TEST(CbvEval, StuckAndFuel)
{
    auto env = lib_kenv();
    Term bad_match = Term::match("Bool", 0, {}, nat_ind(), Term::prim(PrimVal::natural(1)),
                                 {{0, Term::prim(PrimVal::natural(0))}, {0, Term::prim(PrimVal::natural(1))}});
    EXPECT_TRUE(kernel::cbv_eval(env, 100, bad_match).stuck());
    EXPECT_TRUE(kernel::cbv_eval(env, 100, Term::rel(0)).stuck());
    EXPECT_TRUE(kernel::cbv_eval(env, 0, Term::sort_set()).out_of_fuel());
}

TEST(CbvEval, BranchSelectionFollowsConstructorPosition)
{
    auto env = lib_kenv();
    for (const auto& ind : env.inductives()) {
        if (ind.num_params != 0)
            continue;
        for (std::size_t j = 0; j < ind.ctors.size(); ++j) {
            // Scrutinee: constructor j applied to dummy literal arguments.
            Term scrut = Term::construct(ind.name, j);
            for (std::size_t a = 0; a < ind.ctors[j].arity; ++a)
                scrut = Term::app(scrut, Term::prim(PrimVal::natural(0)));
            std::vector<Term::Branch> branches;
            for (std::size_t b = 0; b < ind.ctors.size(); ++b) {
                Term body = Term::prim(PrimVal::natural(b));
                for (std::size_t a = 0; a < ind.ctors[b].arity; ++a)
                    body = Term::lambda("a", nat_ind(), body);
                branches.push_back({ind.ctors[b].arity, body});
            }
            auto r = kernel::cbv_eval(env, 100, Term::match(ind.name, 0, {}, nat_ind(), scrut, branches));
            ASSERT_TRUE(r.ok()) << ind.name;
            EXPECT_EQ(r.value(), Term::prim(PrimVal::natural(j))) << ind.name << " ctor " << j;
        }
    }
}

TEST(CbvEval, Determinism)
{
    auto env = lib_kenv();
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i) {
        Term t = random_closed(rng, 5);
        EXPECT_EQ(kernel::cbv_eval(env, 1000, t), kernel::cbv_eval(env, 1000, t));
    }
}

TEST(TermJson, RoundTrip)
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i) {
        Term t = random_term(rng, 5, 3);
        EXPECT_EQ(term_from_json(Json::parse(to_json(t).dump())), t);
    }
    auto env = lib_kenv();
    for (const auto& [name, c] : env.constants()) {
        if (const auto* t = std::get_if<Term>(&c))
            EXPECT_EQ(term_from_json(to_json(*t)), *t) << name;
    }
}
