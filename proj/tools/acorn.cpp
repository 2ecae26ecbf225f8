// acorn: command-line front end.
//
// Exit status: 0 on success, 1 when a checked property fails, 2 on usage,
// input or parse errors. Results go to stdout, diagnostics to stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acorn/chain.hpp"
#include "acorn/interp.hpp"
#include "acorn/kernel.hpp"
#include "acorn/parse.hpp"
#include "acorn/pretty.hpp"
#include "acorn/programs.hpp"
#include "acorn/serialize.hpp"
#include "acorn/soundness.hpp"
#include "acorn/stack.hpp"
#include "acorn/translate.hpp"

namespace {

using namespace acorn;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

// Raised for bad input that is not a parse error (missing file, bad flag
// value); maps to exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t default_fuel(std::size_t fallback)
{
    const char* env = std::getenv("ACORN_FUEL");
    if (!env || !*env)
        return fallback;
    try {
        std::size_t pos = 0;
        auto v = std::stoull(env, &pos);
        if (pos == std::string(env).size() && v > 0)
            return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("ACORN_FUEL is not a positive number: ") + env);
}

Module load(const std::string& path)
{
    if (!std::filesystem::exists(path))
        throw UsageError("no such file: " + path);
    return programs::load_file(path);
}

void print_parse_error(const std::string& file, const ParseError& e)
{
    // The message already carries line and column.
    std::cerr << file << ":" << e.what() << "\n";
}

// --------------------------------------------------------------------------
// check

int cmd_check(const std::string& file)
{
    Module m = load(file);
    std::vector<std::string> problems;

    auto unbound = [](const std::string& what, const Expr& e) {
        return "unbound variable in " + what + ": an index reaches " + std::to_string(e.loose()) +
               " binder(s) past the outermost one";
    };
    // Open constants get the more specific diagnostic below.
    for (const auto& p : wf_global(m.env).problems)
        if (!p.ends_with(" is not closed"))
            problems.push_back(p);
    for (const auto& [name, body] : m.env.constants())
        if (const auto* e = std::get_if<Expr>(&body); e && e->loose() > 0)
            problems.push_back(unbound(name, *e));
    for (const auto& [name, e] : m.programs)
        if (e.loose() > 0)
            problems.push_back(unbound("test " + name, e));

    // Everything must translate (cases exhaustive, constructors known).
    if (problems.empty()) {
        try {
            (void)translate_env(m.env);
            for (const auto& [name, e] : m.programs) {
                try {
                    (void)expr_to_term(m.env, e);
                } catch (const TranslateError& err) {
                    problems.push_back("test " + name + ": " + err.what());
                }
            }
        } catch (const TranslateError& err) {
            problems.push_back(err.what());
        }
    }

    for (const auto& p : problems)
        std::cerr << file << ": " << p << "\n";
    if (!problems.empty())
        return kViolation;
    std::cout << file << ": ok (" << m.inductive_names.size() << " types, " << m.definitions.size()
              << " definitions, " << m.programs.size() << " tests)\n";
    return kOk;
}

// --------------------------------------------------------------------------
// run

int report_eval(const std::string& label, const Module& m, const EvalResult<Val>& r)
{
    if (r.ok()) {
        std::cout << label << " = " << print(r.value(), &m.env) << "\n";
        return kOk;
    }
    if (r.out_of_fuel())
        std::cerr << label << ": out of fuel\n";
    else
        std::cerr << label << ": stuck: " << r.error() << "\n";
    return kViolation;
}

int cmd_run(const std::string& file, const std::optional<std::string>& entry, const std::vector<std::string>& args,
            std::size_t fuel)
{
    Module m = load(file);
    if (!entry) {
        if (!args.empty())
            throw UsageError("--args needs --entry");
        int status = kOk;
        for (const auto& [name, e] : m.programs)
            status = std::max(status, report_eval(name, m, interp::eval(m.env, fuel, Env{}, e)));
        return status;
    }
    if (!m.env.find_constant(*entry))
        throw UsageError("no definition named " + *entry);

    Expr call = Expr::constant(*entry);
    for (const auto& a : args)
        call = Expr::app(call, parse_expr(a, m));
    std::string label = *entry;
    for (const auto& a : args)
        label += " (" + a + ")";
    return report_eval(label, m, interp::eval(m.env, fuel, Env{}, call));
}

// --------------------------------------------------------------------------
// translate

int cmd_translate(const std::string& file, const std::optional<std::string>& entry, bool json)
{
    Module m = load(file);
    const auto kenv = translate_env(m.env);
    Json out = Json::object();
    std::ostringstream text;

    auto emit_constant = [&](const std::string& name) {
        const auto* c = kenv.find_constant(name);
        if (!c)
            throw UsageError("no definition named " + name);
        if (const auto* t = std::get_if<kernel::Term>(c)) {
            text << "Definition " << name << " := " << print(*t, &kenv) << ".\n";
            out["definitions"][name] = to_json(*t);
        } else {
            text << "(* " << name << " is a primitive *)\n";
            out["definitions"][name] = {{"builtin", name}};
        }
    };

    if (entry) {
        if (const auto* ind = kenv.find_inductive(*entry)) {
            text << print(*ind) << "\n";
            out["inductives"][*entry] = to_json(*ind);
        } else {
            emit_constant(*entry);
        }
    } else {
        for (const auto& name : m.inductive_names) {
            const auto* ind = kenv.find_inductive(name);
            text << print(*ind) << "\n";
            out["inductives"][name] = to_json(*ind);
        }
        for (const auto& name : m.definitions)
            emit_constant(name);
        for (const auto& [name, e] : m.programs) {
            auto t = expr_to_term(m.env, e);
            text << "Definition test_" << name << " := " << print(t, &kenv) << ".\n";
            out["tests"][name] = to_json(t);
        }
    }
    if (json)
        std::cout << out.dump(2) << "\n";
    else
        std::cout << text.str();
    return kOk;
}

// --------------------------------------------------------------------------
// diff-eval

int cmd_diff_eval(const std::string& path, const soundness::HarnessConfig& cfg, bool json)
{
    if (!std::filesystem::exists(path))
        throw UsageError("no such file or directory: " + path);
    auto report = soundness::run_corpus(path, cfg);
    if (json)
        std::cout << soundness::report_json(report).dump(2) << "\n";
    else
        std::cout << soundness::report_text(report);
    for (const auto& e : report.errors)
        std::cerr << e.file << ": " << e.message << "\n";
    for (const auto& p : report.programs)
        if (p.outcome.verdict == soundness::Verdict::Disagree && !p.error)
            std::cerr << "DISAGREE " << p.name << ": " << p.outcome.detail << "\n";
    return report.success() ? kOk : kViolation;
}

// --------------------------------------------------------------------------
// chain

struct ChainOptions {
    std::vector<std::string> scenarios;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> seeds;
    std::optional<std::size_t> max_blocks;
    std::vector<std::string> invariants;
    std::optional<std::string> dump_trace;
    bool json = false;
};

std::vector<std::uint64_t> parse_seed_range(const std::string& s)
{
    auto dash = s.find('-');
    try {
        if (dash == std::string::npos)
            return {std::stoull(s)};
        auto lo = std::stoull(s.substr(0, dash));
        auto hi = std::stoull(s.substr(dash + 1));
        if (lo > hi)
            throw UsageError("empty seed range " + s);
        std::vector<std::uint64_t> out;
        for (auto k = lo; k <= hi; ++k)
            out.push_back(k);
        return out;
    } catch (const std::logic_error&) {
        throw UsageError("bad seed range " + s + " (expected N or LO-HI)");
    }
}

int cmd_chain(const ChainOptions& opt, const chain::ChainConfig& cfg)
{
    Json all = Json::array();
    bool ok = true;
    for (const auto& file : opt.scenarios) {
        std::ifstream in(file);
        if (!in)
            throw UsageError("cannot read " + file);
        chain::Scenario s;
        try {
            s = chain::scenario_from_json(Json::parse(in));
        } catch (const Json::exception& e) {
            throw UsageError(file + ": " + e.what());
        }
        if (opt.seed)
            s.seeds = {*opt.seed};
        if (opt.seeds)
            s.seeds = parse_seed_range(*opt.seeds);
        if (opt.max_blocks)
            s.max_blocks = *opt.max_blocks;
        if (!opt.invariants.empty())
            s.invariants = opt.invariants;
        for (const auto& inv : s.invariants)
            if (!chain::invariant_by_name(inv, chain::ChainState{}))
                throw UsageError("unknown invariant " + inv);

        auto rep = chain::run_scenario(s, cfg);
        ok = ok && rep.ok();
        if (opt.json)
            all.push_back(chain::report_json(rep));
        else
            std::cout << chain::report_text(rep);
        for (const auto& v : rep.violations)
            std::cerr << file << ": " << v.invariant << " violated in " << v.where << " after " << v.steps
                      << " blocks\n";

        if (opt.dump_trace) {
            chain::Trace tr;
            if (!s.blocks.empty())
                tr = chain::run_script(s, cfg).trace;
            else if (!s.seeds.empty())
                tr = chain::gen_trace(s.seeds.front(), s.max_blocks, s, cfg);
            else
                tr.genesis = chain::genesis(s, cfg);
            std::ofstream dump(*opt.dump_trace);
            if (!dump)
                throw UsageError("cannot write " + *opt.dump_trace);
            dump << chain::trace_to_json(tr, cfg).dump(2) << "\n";
        }
    }
    if (opt.json)
        std::cout << all.dump(2) << "\n";
    return ok ? kOk : kViolation;
}

// --------------------------------------------------------------------------
// export

int cmd_export(const std::string& file, const std::string& out_path)
{
    Module m = load(file);
    std::ofstream out(out_path);
    if (!out)
        throw UsageError("cannot write " + out_path);
    out << module_to_json(m).dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acorn: interpreter, kernel translation and chain simulator"};
    app.require_subcommand(1);

    std::string file;
    std::optional<std::string> entry;
    std::vector<std::string> args;
    std::optional<std::size_t> fuel;
    bool json = false;

    auto* check = app.add_subcommand("check", "Parse, check well-formedness and closedness");
    check->add_option("file", file, "Source file (.acorn or .json)")->required();

    auto* run = app.add_subcommand("run", "Evaluate a definition applied to arguments, or every test");
    run->add_option("file", file, "Source file")->required();
    run->add_option("--entry", entry, "Definition to call");
    run->add_option("--args", args, "Argument expressions, in order")->expected(1, -1);
    run->add_option("--fuel", fuel, "Evaluation fuel")->check(CLI::PositiveNumber);

    auto* translate = app.add_subcommand("translate", "Print the kernel translation");
    translate->add_option("file", file, "Source file")->required();
    translate->add_option("--entry", entry, "Single definition or inductive");
    translate->add_flag("--json", json, "Kernel terms as JSON");

    soundness::HarnessConfig hcfg;
    std::size_t gen_count = 0;
    std::uint64_t seed = hcfg.seed;
    std::size_t size = hcfg.gen_size;
    auto* diff = app.add_subcommand("diff-eval", "Differential test of the translation");
    diff->add_option("path", file, "Corpus file or directory")->required();
    diff->add_option("--fuel", fuel, "Fuel for both evaluators")->check(CLI::PositiveNumber);
    diff->add_option("--gen", gen_count, "Number of generated programs");
    diff->add_option("--seed", seed, "Generator seed");
    diff->add_option("--size", size, "Generated program size bound")->check(CLI::PositiveNumber);
    diff->add_flag("--json", json, "JSON report");

    ChainOptions copt;
    auto* chain_cmd = app.add_subcommand("chain", "Run chain scenarios and check invariants");
    chain_cmd->add_option("scenario", copt.scenarios, "Scenario files")->required();
    auto* seed_opt = chain_cmd->add_option("--seed", copt.seed, "Single generator seed");
    chain_cmd->add_option("--seeds", copt.seeds, "Seed range LO-HI")->excludes(seed_opt);
    chain_cmd->add_option("--max-blocks", copt.max_blocks, "Blocks per generated trace");
    chain_cmd->add_option("--invariant", copt.invariants, "Invariant to check (repeatable)");
    chain_cmd->add_option("--dump-trace", copt.dump_trace, "Write the first trace as JSON");
    chain_cmd->add_option("--fuel", fuel, "Fuel per contract call")->check(CLI::PositiveNumber);
    chain_cmd->add_flag("--json", copt.json, "JSON report");

    std::string out_path;
    auto* exp = app.add_subcommand("export", "Write a module as JSON");
    exp->add_option("file", file, "Source file")->required();
    exp->add_option("-o,--output", out_path, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        return with_big_stack([&]() -> int {
            if (*check)
                return cmd_check(file);
            if (*run)
                return cmd_run(file, entry, args, fuel.value_or(default_fuel(soundness::kDefaultFuel)));
            if (*translate)
                return cmd_translate(file, entry, json);
            if (*diff) {
                hcfg.fuel = fuel.value_or(default_fuel(soundness::kDefaultFuel));
                hcfg.gen_count = gen_count;
                hcfg.seed = seed;
                hcfg.gen_size = size;
                return cmd_diff_eval(file, hcfg, json);
            }
            if (*chain_cmd) {
                chain::ChainConfig cfg;
                cfg.fuel = fuel.value_or(default_fuel(cfg.fuel));
                return cmd_chain(copt, cfg);
            }
            return cmd_export(file, out_path);
        });
    } catch (const ParseError& e) {
        print_parse_error(file, e);
        return kUsage;
    } catch (const UnboundName& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kViolation;
    } catch (const TranslateError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kViolation;
    } catch (const UsageError& e) {
        std::cerr << "acorn: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "acorn: " << e.what() << "\n";
        return kUsage;
    }
}
