#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "acorn/interp.hpp"
#include "acorn/kernel.hpp"
#include "acorn/parse.hpp"
#include "acorn/serialize.hpp"

// Differential testing of the translation: a closed program evaluated by the
// interpreter and read back must translate to what the kernel computes from
// the translated program.

namespace acorn::soundness {

inline constexpr std::size_t kDefaultFuel = 10000;

// The translation under test. Tests substitute deliberately broken variants.
struct Translator {
    std::function<kernel::Term(const GlobalEnv&, const Expr&)> expr;
    std::function<kernel::KernelEnv(const GlobalEnv&)> env;

    static Translator standard();
};

enum class Verdict { Agree, Disagree, Inconclusive, BothStuck };
enum class Side { Interp, Kernel, Both };

const char* to_string(Verdict v);
const char* to_string(Side s);

struct DiffOutcome {
    Verdict verdict = Verdict::Agree;
    // Kernel result of the translated program.
    std::optional<kernel::Term> lhs;
    // Translation of the read-back interpreter value.
    std::optional<kernel::Term> rhs;
    // The interpreter value, when it produced one.
    std::optional<Val> value;
    // Set on Disagree.
    std::optional<Expr> program;
    // Which side ran out of fuel, for Inconclusive.
    std::optional<Side> starved;
    std::string detail;
};

// Preconditions: wf_global(env), expr_closed_under(0, e), kenv is the
// translation of env. Throws TranslateError when `e` does not translate.
DiffOutcome diff_check(const GlobalEnv& env, const kernel::KernelEnv& kenv, std::size_t fuel, const Expr& e,
                       const Translator& tr = Translator::standard());
DiffOutcome diff_check(const GlobalEnv& env, std::size_t fuel, const Expr& e);

// Random closed programs over the standard library. Total for every seed;
// the result is nameless.
Expr gen_expr(std::uint64_t seed, std::size_t size, const GlobalEnv& env);

// (rho, e) pairs seen by the interpreter while evaluating `e`, sampled
// every `stride` steps, at most `limit` of them.
struct EvalSite {
    Env rho;
    Expr expr;
};
std::vector<EvalSite> harvest_sites(const GlobalEnv& env, std::size_t fuel, const Expr& e, std::size_t limit,
                                    std::size_t stride);

struct LemmaCheck {
    // False when the site does not meet the premises (an environment entry
    // that does not read back closed, or a body that fails validation).
    bool applicable = false;
    bool holds = false;
    std::string detail;
};

// Translating after substituting the environment equals substituting the
// translated environment into the translation.
LemmaCheck check_subst_commutes(const GlobalEnv& env, const EvalSite& site);

// Values are well formed and read back.
LemmaCheck check_value(const GlobalEnv& env, const Val& v);

// ---------------------------------------------------------------------------
// Corpus runs

struct HarnessConfig {
    std::size_t fuel = kDefaultFuel;
    std::size_t gen_count = 0;
    std::uint64_t seed = 7;
    std::size_t gen_size = 12;
    // Lemma sites per corpus program and per generated program.
    std::size_t sites_per_program = 16;
    std::size_t sites_per_generated = 2;
    std::size_t site_stride = 7;
};

struct ProgramReport {
    std::string name;
    DiffOutcome outcome;
    std::size_t lemma1_checked = 0;
    std::size_t lemma1_failed = 0;
    bool lemma2_ok = true;
    std::string result_text;
    std::vector<std::string> notes;
    // Set when the program could not be checked at all (it does not
    // translate); the outcome is then meaningless.
    std::optional<std::string> error;
};

struct FileError {
    std::string file;
    std::string message;
};

struct CorpusReport {
    std::vector<ProgramReport> programs;  // sorted by name
    std::vector<FileError> errors;        // sorted by file

    std::size_t count(Verdict v) const;
    std::size_t lemma1_checked() const;
    std::size_t lemma1_failed() const;
    std::size_t lemma2_failed() const;
    std::size_t program_errors() const;
    // No Disagree, no failed lemma check, no program or file error.
    bool success() const;
};

struct NamedProgram {
    std::string name;
    Expr expr;
};

// Checks the given programs of one module.
std::vector<ProgramReport> run_programs(const Module& m, const std::vector<NamedProgram>& programs,
                                        const HarnessConfig& cfg, bool generated = false);

// Runs every `.acorn` and `.json` file directly inside `path` (or the single
// file `path`), plus `cfg.gen_count` generated programs when positive.
CorpusReport run_corpus(const std::filesystem::path& path, const HarnessConfig& cfg);

std::string report_text(const CorpusReport& r);
Json report_json(const CorpusReport& r);

}  // namespace acorn::soundness
