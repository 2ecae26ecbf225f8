// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acorn/chain.hpp"
#include "acorn/kernel.hpp"
#include "acorn/pretty.hpp"
#include "acorn/programs.hpp"
#include "acorn/soundness.hpp"
#include "acorn/stack.hpp"
#include "acorn/translate.hpp"
#include "support.hpp"

using namespace acorn;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    return buf;
}

chain::Scenario load_scenario(const std::string& name)
{
    std::ifstream in(std::string(ACORN_CORPUS_DIR) + "/scenarios/" + name + ".json");
    if (!in)
        throw std::runtime_error("missing scenario " + name);
    return chain::scenario_from_json(Json::parse(in));
}

soundness::HarnessConfig harness_config()
{
    soundness::HarnessConfig cfg;
    cfg.fuel = 10000;
    cfg.gen_count = 1000;
    cfg.seed = 7;
    cfg.gen_size = 12;
    return cfg;
}

// Shared between criteria 1 to 5.
struct DiffRun {
    soundness::CorpusReport report;
    std::string text;
    std::string json;
    double seconds = 0;
};

DiffRun diff_run()
{
    auto t0 = Clock::now();
    DiffRun r;
    r.report = soundness::run_corpus(ACORN_CORPUS_DIR, harness_config());
    r.seconds = seconds_since(t0);
    r.text = soundness::report_text(r.report);
    r.json = soundness::report_json(r.report).dump();
    return r;
}

std::size_t corpus_programs(const soundness::CorpusReport& r)
{
    std::size_t n = 0;
    for (const auto& p : r.programs)
        n += p.name.rfind("gen/", 0) != 0;
    return n;
}

// ---------------------------------------------------------------------------

Outcome ac1(const DiffRun& run)
{
    const auto& r = run.report;
    const auto corpus = corpus_programs(r);
    const auto generated = r.programs.size() - corpus;
    const auto disagree = r.count(soundness::Verdict::Disagree);
    const auto inconclusive = r.count(soundness::Verdict::Inconclusive);
    std::ostringstream d;
    d << corpus << " corpus + " << generated << " generated programs, disagree " << disagree << ", inconclusive "
      << inconclusive << ", both-stuck " << r.count(soundness::Verdict::BothStuck) << ", errors "
      << r.errors.size() + r.program_errors() << ", " << fmt_seconds(run.seconds);
    const bool pass = r.success() && corpus >= 30 && generated == 1000 && disagree == 0 && inconclusive == 0 &&
                      run.seconds < 60;
    return {pass, d.str()};
}

Outcome ac2(const DiffRun& first)
{
    auto second = diff_run();
    const bool same = second.text == first.text && second.json == first.json;

    // Kernel evaluation of each corpus program, twice.
    std::size_t programs = 0, repeatable = 0;
    for (const auto& entry : std::filesystem::directory_iterator(ACORN_CORPUS_DIR)) {
        if (entry.path().extension() != ".acorn")
            continue;
        Module m = programs::load_file(entry.path());
        const auto kenv = translate_env(m.env);
        for (const auto& [name, e] : m.programs) {
            auto t = expr_to_term(m.env, e);
            auto a = kernel::cbv_eval(kenv, 10000, t);
            auto b = kernel::cbv_eval(kenv, 10000, t);
            ++programs;
            repeatable += a.ok() && b.ok() && a.value() == b.value();
        }
    }
    std::ostringstream d;
    d << "report " << (same ? "byte-identical" : "DIFFERS") << " on rerun (" << first.text.size()
      << " bytes), kernel repeatable on " << repeatable << "/" << programs << " corpus programs";
    return {same && programs > 0 && repeatable == programs, d.str()};
}

Outcome ac3(const DiffRun& run)
{
    const auto checked = run.report.lemma1_checked();
    const auto failed = run.report.lemma1_failed();
    std::ostringstream d;
    d << checked << " (rho, e) sites checked, " << failed << " mismatches";
    return {checked >= 200 && failed == 0, d.str()};
}

Outcome ac4(const DiffRun& run)
{
    std::size_t values = 0, bad = 0;
    for (const auto& p : run.report.programs) {
        if (!p.outcome.value)
            continue;
        ++values;
        bad += !p.lemma2_ok;
    }
    // Independently re-check the generated values against the prelude.
    std::size_t rechecked = 0;
    for (const auto& p : run.report.programs)
        if (p.outcome.value && p.name.rfind("gen/", 0) == 0) {
            ++rechecked;
            bad += !interp::wf_val(programs::prelude().env, *p.outcome.value) || !interp::from_val(*p.outcome.value);
        }
    std::ostringstream d;
    d << values << " values (" << rechecked << " re-checked), " << bad << " ill-formed or without read-back";
    return {values > 0 && bad == 0, d.str()};
}

Outcome ac5()
{
    const Module& lib = programs::prelude();
    std::mt19937_64 rng(2024);
    std::size_t samples = 0, violations = 0, tried = 0;
    for (std::uint64_t seed = 0; samples < 500 && seed < 20000; ++seed) {
        Expr e = soundness::gen_expr(seed * 7919 + 3, 12, lib.env);
        ++tried;
        const std::size_t n = 1 + rng() % 80;
        auto r = interp::eval(lib.env, n, Env{}, e);
        if (!r.ok())
            continue;
        ++samples;
        auto r1 = interp::eval(lib.env, n + 1, Env{}, e);
        violations += !(r1.ok() && r1.value() == r.value());
    }
    std::ostringstream d;
    d << samples << " samples with Ok at fuel n (" << tried << " tried), " << violations << " changed at n+1";
    return {samples >= 500 && violations == 0, d.str()};
}

Outcome ac6()
{
    auto k = decl_to_kernel(*programs::prelude().env.find_inductive("AcornMap"));
    using kernel::Term;
    auto rels = [](std::size_t a, std::size_t b, std::size_t c) {
        return Term::app(Term::app(Term::rel(a), Term::rel(b)), Term::rel(c));
    };
    bool ok = k.ctors.size() == 2 && k.ctors[0].name == "MNil" && k.ctors[0].arity == 0 &&
              k.ctors[0].result_ty == rels(2, 1, 0) && k.ctors[1].name == "MCons" && k.ctors[1].arity == 3 &&
              k.ctors[1].arg_tys.size() == 3 && k.ctors[1].arg_tys[0] == Term::rel(1) &&
              k.ctors[1].arg_tys[1] == Term::rel(1) && k.ctors[1].arg_tys[2] == rels(4, 3, 2) &&
              k.ctors[1].result_ty == rels(5, 4, 3);
    auto text = print(k);
    std::string flat;
    for (char c : text)
        flat += c == '\n' ? ' ' : c;
    return {ok, flat};
}

Outcome ac7()
{
    const Module& lib = programs::prelude();
    std::mt19937_64 rng(77);
    auto t0 = Clock::now();
    std::size_t cases = 0, identity_failures = 0, oracle_failures = 0;
    for (; cases < 500; ++cases) {
        auto l = acorn::testing::random_ints(rng, 30, -1000, 1000);
        auto l2 = acorn::testing::random_ints(rng, 30, -1000, 1000);
        auto op = rng() % 2 ? programs::FoldOp::Plus : programs::FoldOp::Max;
        Integer i = static_cast<long>(rng() % 2001) - 1000;
        auto out = programs::foldr_concat_check(lib, op, i, l, l2);
        identity_failures += !out.holds;

        auto all = l;
        all.insert(all.end(), l2.begin(), l2.end());
        auto f = [op](const Integer& a, const Integer& b) {
            return op == programs::FoldOp::Plus ? Integer(a + b) : (a < b ? b : a);
        };
        auto expect = acorn::testing::native_foldr(f, i, all);
        auto deep = interp::eval(lib.env, 100000, Env{}, programs::foldr_expr(op, i, all));
        oracle_failures += !(deep.ok() && programs::prim_value(deep.value()) == expect && out.lhs == expect);
    }
    const double s = seconds_since(t0);
    std::ostringstream d;
    d << cases << " cases, identity failures " << identity_failures << ", native-fold mismatches " << oracle_failures
      << ", " << fmt_seconds(s);
    return {identity_failures == 0 && oracle_failures == 0 && s < 10, d.str()};
}

// Criteria 8, 9 and 12 share the generated crowdfunding traces.
struct ChainRun {
    std::vector<chain::Trace> cf_traces;
    chain::GenStats cf_stats;
    double seconds = 0;
};

ChainRun chain_run()
{
    auto t0 = Clock::now();
    ChainRun r;
    auto s = load_scenario("crowdfunding_random");
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
        r.cf_traces.push_back(chain::gen_trace(seed, 20, s, {}, &r.cf_stats));
    r.seconds = seconds_since(t0);
    return r;
}

Outcome ac8(ChainRun& run)
{
    auto t0 = Clock::now();
    std::size_t states = 0, bad = 0;
    for (const auto& tr : run.cf_traces)
        for (const auto& st : chain::reachable_states(tr)) {
            ++states;
            bad += !chain::cf_balance_consistent(st);
        }

    auto mutant = load_scenario("crowdfunding_mutant");
    std::size_t caught_first = 0;
    for (auto seed : mutant.seeds) {
        auto tr = chain::gen_trace(seed, mutant.max_blocks, mutant);
        auto cx = chain::check_invariant(tr, chain::cf_balance_consistent);
        std::size_t first_donation = 0;
        for (std::size_t k = 0; k < tr.steps.size() && !first_donation; ++k)
            for (const auto& a : tr.steps[k].actions)
                if (const auto* c = std::get_if<chain::action::Call>(&a); c && c->msg)
                    if (c->msg->as<val::Constr>()->ctor == "Donate")
                        first_donation = k + 1;
        caught_first += cx && first_donation > 0 && cx->steps == first_donation;
    }
    run.seconds += seconds_since(t0);
    std::ostringstream d;
    d << run.cf_traces.size() << " traces, " << states << " states, " << bad << " inconsistent; mutant caught at first "
      << "donating block in " << caught_first << "/" << mutant.seeds.size() << " seeds";
    return {run.cf_traces.size() == 100 && bad == 0 && caught_first == mutant.seeds.size() && !mutant.seeds.empty(),
            d.str()};
}

Outcome ac9(ChainRun& run)
{
    auto t0 = Clock::now();
    std::size_t blocks = 0, bad = 0;
    for (const auto& tr : run.cf_traces) {
        auto states = chain::reachable_states(tr);
        for (std::size_t k = 1; k < states.size(); ++k) {
            ++blocks;
            bad += !chain::cf_backed(states[k]);
        }
    }
    run.seconds += seconds_since(t0);
    std::ostringstream d;
    d << blocks << " successful blocks, " << bad << " under-backed; chain suite so far " << fmt_seconds(run.seconds);
    return {blocks > 0 && bad == 0 && run.seconds < 60, d.str()};
}

Outcome ac10()
{
    std::vector<std::string> failures;
    for (auto name : {"crowdfunding_refund", "crowdfunding_success"}) {
        auto rep = chain::run_scenario(load_scenario(name));
        if (!rep.ok())
            failures.push_back(name);
    }
    // Donation recording, fresh and repeat donor, straight through receive.
    Module m = programs::load_embedded("crowdfunding");
    auto ev = [&](const std::string& src) { return interp::eval(m.env, 100000, Env{}, parse_expr(src, m)); };
    auto fresh = ev("mfind (donations s1) alice");
    auto repeat = ev("mfind (donations s3) alice");
    auto want_fresh = ev("Just @Int 30z");
    auto want_repeat = ev("Just @Int 70z");
    if (!(fresh == want_fresh))
        failures.push_back("fresh donor");
    if (!(repeat == want_repeat))
        failures.push_back("repeat donor");

    std::string d = failures.empty() ? "refund, donation recording and claim-after-funding scenarios hold"
                                     : "failed: ";
    for (const auto& f : failures)
        d += f + " ";
    return {failures.empty(), d};
}

Outcome ac11()
{
    Module m = programs::load_embedded("counter");
    const auto kenv = translate_env(m.env);
    std::mt19937_64 rng(11);
    std::size_t cases = 0, interp_bad = 0, kernel_bad = 0;
    for (; cases < 200; ++cases) {
        Integer n = static_cast<long>(rng() % 20001) - 10000;
        Integer i = static_cast<long>(rng() % 5001);
        const bool inc = rng() % 2;
        Integer expect = inc ? Integer(n + i) : Integer(n - i);
        auto src = "count (MkCtx 7 1000 0z) (CState " + n.str() + "z 7) 7 0z (Just @Msg (" +
                   (inc ? "Inc " : "Dec ") + i.str() + "z))";
        Expr e = parse_expr(src, m);
        auto want = parse_expr("Pair @CState @Transaction (CState " + expect.str() + "z 7) txNone", m);

        auto r = interp::eval(m.env, 10000, Env{}, e);
        auto back = r.ok() ? interp::from_val(r.value()) : std::nullopt;
        interp_bad += !(back && *back == want);
        auto k = kernel::cbv_eval(kenv, 10000, expr_to_term(m.env, e));
        kernel_bad += !(k.ok() && k.value() == expr_to_term(m.env, want));
    }
    std::ostringstream d;
    d << cases << " Inc/Dec cases, interp mismatches " << interp_bad << ", kernel mismatches " << kernel_bad;
    return {interp_bad == 0 && kernel_bad == 0, d.str()};
}

Outcome ac12(ChainRun& run)
{
    auto t0 = Clock::now();
    std::vector<chain::Trace> traces = run.cf_traces;
    chain::GenStats stats = run.cf_stats;
    for (auto name : {"counter_random", "bouncer_loop"}) {
        auto s = load_scenario(name);
        for (auto seed : s.seeds)
            traces.push_back(chain::gen_trace(seed, s.max_blocks, s, {}, &stats));
        if (!s.blocks.empty())
            traces.push_back(chain::run_script(s).trace);
    }

    std::size_t states = 0, leaks = 0, atomic_checks = 0, atomic_bad = 0;
    for (const auto& tr : traces) {
        auto all = chain::reachable_states(tr);
        const auto total = all.front().total_money();
        for (const auto& st : all) {
            ++states;
            leaks += st.total_money() != total;
        }
        // Every block again with an overdraft appended: the whole block must
        // be rejected and the previous state left alone.
        for (std::size_t k = 0; k < tr.steps.size(); ++k) {
            const auto& prev = all[k];
            const chain::ChainState copy = prev;
            auto acts = tr.steps[k].actions;
            const chain::Address from = prev.balances.begin()->first;
            acts.push_back(chain::action::Transfer{from, from + 1, prev.total_money() + 1});
            auto r = chain::add_block(prev, tr.steps[k].header, acts);
            ++atomic_checks;
            atomic_bad += r.state.has_value() || !(prev == copy);
        }
    }
    run.seconds += seconds_since(t0);
    std::ostringstream d;
    d << traces.size() << " traces, " << states << " states, " << leaks << " conservation failures; "
      << stats.rejected_blocks << " generated blocks had failing actions; " << atomic_checks
      << " poisoned blocks, " << atomic_bad << " not atomic; chain suite " << fmt_seconds(run.seconds);
    return {leaks == 0 && atomic_bad == 0 && stats.rejected_blocks > 0 && run.seconds < 60, d.str()};
}

int run_all()
{
    int failed = 0;
    auto report = [&](int n, const char* title, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " AC" << n << " " << title << ": " << o.detail << std::endl;
    };

    DiffRun diff;
    ChainRun chain_data;
    report(1, "differential soundness", [&] {
        diff = diff_run();
        return ac1(diff);
    });
    report(2, "determinism", [&] { return ac2(diff); });
    report(3, "substitution commutes with translation", [&] { return ac3(diff); });
    report(4, "values well formed", [&] { return ac4(diff); });
    report(5, "fuel monotonicity", ac5);
    report(6, "AcornMap translation", ac6);
    report(7, "foldr/concat", ac7);
    report(8, "crowdfunding consistent balance", [&] {
        chain_data = chain_run();
        return ac8(chain_data);
    });
    report(9, "crowdfunding backed by its account", [&] { return ac9(chain_data); });
    report(10, "crowdfunding scenarios", ac10);
    report(11, "counter", ac11);
    report(12, "money conservation and atomicity", [&] { return ac12(chain_data); });
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main()
{
    return with_big_stack(run_all);
}
