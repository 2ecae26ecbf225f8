#include "acorn/soundness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "acorn/pretty.hpp"
#include "acorn/programs.hpp"
#include "acorn/translate.hpp"

namespace acorn::soundness {

Translator Translator::standard()
{
    return Translator{[](const GlobalEnv& env, const Expr& e) { return expr_to_term(env, e); },
                      [](const GlobalEnv& env) { return translate_env(env); }};
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Agree:
        return "AGREE";
    case Verdict::Disagree:
        return "DISAGREE";
    case Verdict::Inconclusive:
        return "INCONCLUSIVE";
    case Verdict::BothStuck:
        return "BOTH-STUCK";
    }
    return "?";
}

const char* to_string(Side s)
{
    switch (s) {
    case Side::Interp:
        return "interp";
    case Side::Kernel:
        return "kernel";
    case Side::Both:
        return "both";
    }
    return "?";
}

DiffOutcome diff_check(const GlobalEnv& env, const kernel::KernelEnv& kenv, std::size_t fuel, const Expr& e,
                       const Translator& tr)
{
    DiffOutcome out;
    const kernel::Term translated = tr.expr(env, e);
    auto k = kernel::cbv_eval(kenv, fuel, translated);
    auto i = interp::eval(env, fuel, Env{}, e);

    if (k.out_of_fuel() || i.out_of_fuel()) {
        out.verdict = Verdict::Inconclusive;
        out.starved = k.out_of_fuel() && i.out_of_fuel() ? Side::Both : k.out_of_fuel() ? Side::Kernel : Side::Interp;
        out.detail = std::string("out of fuel on ") + to_string(*out.starved) + " side";
        return out;
    }
    if (k.ok())
        out.lhs = k.value();
    if (i.ok())
        out.value = i.value();

    if (k.stuck() && i.stuck()) {
        out.verdict = Verdict::BothStuck;
        out.detail = "interp: " + i.error() + "; kernel: " + k.error();
        return out;
    }
    if (i.stuck()) {
        out.verdict = Verdict::Disagree;
        out.program = e;
        out.detail = "interp stuck: " + i.error();
        return out;
    }
    auto read = interp::from_val(i.value());
    if (!read) {
        out.verdict = Verdict::Disagree;
        out.program = e;
        out.detail = "interp value does not read back";
        return out;
    }
    out.rhs = tr.expr(env, *read);
    if (k.stuck()) {
        out.verdict = Verdict::Disagree;
        out.program = e;
        out.detail = "kernel stuck: " + k.error();
        return out;
    }
    if (!(*out.lhs == *out.rhs)) {
        out.verdict = Verdict::Disagree;
        out.program = e;
        out.detail = "results differ";
        return out;
    }
    // The kernel evaluator is a function: a second run gives the same term.
    auto again = kernel::cbv_eval(kenv, fuel, translated);
    if (!again.ok() || !(again.value() == *out.lhs)) {
        out.verdict = Verdict::Disagree;
        out.program = e;
        out.detail = "kernel evaluation is not repeatable";
        return out;
    }
    out.verdict = Verdict::Agree;
    return out;
}

DiffOutcome diff_check(const GlobalEnv& env, std::size_t fuel, const Expr& e)
{
    return diff_check(env, translate_env(env), fuel, e);
}

std::vector<EvalSite> harvest_sites(const GlobalEnv& env, std::size_t fuel, const Expr& e, std::size_t limit,
                                    std::size_t stride)
{
    std::vector<EvalSite> sites;
    if (limit == 0)
        return sites;
    std::size_t seen = 0;
    interp::Hooks hooks;
    hooks.on_eval = [&](const Env& rho, const Expr& body) {
        // Only sites that actually reach into the environment say anything.
        if (sites.size() >= limit || rho.empty() || body.loose() == 0)
            return;
        if (seen++ % std::max<std::size_t>(stride, 1) == 0)
            sites.push_back({rho, body});
    };
    (void)interp::eval(env, fuel, Env{}, e, &hooks);
    return sites;
}

LemmaCheck check_subst_commutes(const GlobalEnv& env, const EvalSite& site)
{
    LemmaCheck out;
    std::vector<Expr> rho;
    rho.reserve(site.rho.size());
    for (Env cur = site.rho; !cur.empty(); cur = cur.pop()) {
        auto r = interp::from_val(cur.front());
        if (!r || !expr_closed_under(0, *r))
            return out;
        rho.push_back(std::move(*r));
    }
    if (!interp::validate(site.rho, 0, site.expr))
        return out;
    auto closed = interp::subst_env_expr(rho, site.expr);
    if (!closed)
        return out;
    out.applicable = true;

    std::vector<kernel::Term> trho;
    trho.reserve(rho.size());
    for (const auto& r : rho)
        trho.push_back(expr_to_term(env, r));
    const auto lhs = expr_to_term(env, *closed);
    const auto rhs = kernel::parallel_subst(trho, expr_to_term(env, site.expr));
    out.holds = lhs == rhs;
    if (!out.holds)
        out.detail = "translate(subst) = " + print(lhs) + " but subst(translate) = " + print(rhs);
    return out;
}

LemmaCheck check_value(const GlobalEnv& env, const Val& v)
{
    LemmaCheck out;
    out.applicable = true;
    if (!interp::wf_val(env, v)) {
        out.detail = "value is not well formed";
        return out;
    }
    if (!interp::from_val(v)) {
        out.detail = "value does not read back";
        return out;
    }
    out.holds = true;
    return out;
}

// ---------------------------------------------------------------------------

std::size_t CorpusReport::count(Verdict v) const
{
    return std::count_if(programs.begin(), programs.end(),
                         [&](const auto& p) { return !p.error && p.outcome.verdict == v; });
}

std::size_t CorpusReport::lemma1_checked() const
{
    std::size_t n = 0;
    for (const auto& p : programs)
        n += p.lemma1_checked;
    return n;
}

std::size_t CorpusReport::lemma1_failed() const
{
    std::size_t n = 0;
    for (const auto& p : programs)
        n += p.lemma1_failed;
    return n;
}

std::size_t CorpusReport::lemma2_failed() const
{
    return std::count_if(programs.begin(), programs.end(), [](const auto& p) { return !p.lemma2_ok; });
}

std::size_t CorpusReport::program_errors() const
{
    return std::count_if(programs.begin(), programs.end(), [](const auto& p) { return p.error.has_value(); });
}

bool CorpusReport::success() const
{
    return count(Verdict::Disagree) == 0 && lemma1_failed() == 0 && lemma2_failed() == 0 && program_errors() == 0 &&
           errors.empty();
}

std::vector<ProgramReport> run_programs(const Module& m, const std::vector<NamedProgram>& programs,
                                        const HarnessConfig& cfg, bool generated)
{
    const auto kenv = translate_env(m.env);
    const std::size_t site_limit = generated ? cfg.sites_per_generated : cfg.sites_per_program;
    std::vector<ProgramReport> out;
    out.reserve(programs.size());
    for (const auto& p : programs) {
        ProgramReport r;
        r.name = p.name;
        try {
            r.outcome = diff_check(m.env, kenv, cfg.fuel, p.expr);
        } catch (const TranslateError& e) {
            r.error = std::string("does not translate: ") + e.what();
            out.push_back(std::move(r));
            continue;
        }
        if (r.outcome.value) {
            auto wf = check_value(m.env, *r.outcome.value);
            r.lemma2_ok = wf.holds;
            if (!wf.holds)
                r.notes.push_back(wf.detail);
            r.result_text = print(*r.outcome.value, &m.env);
        }
        for (const auto& site : harvest_sites(m.env, cfg.fuel, p.expr, site_limit, cfg.site_stride)) {
            auto c = check_subst_commutes(m.env, site);
            if (!c.applicable)
                continue;
            ++r.lemma1_checked;
            if (!c.holds) {
                ++r.lemma1_failed;
                r.notes.push_back(c.detail);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::string stem_of(const std::filesystem::path& p)
{
    return p.stem().string();
}

}  // namespace

CorpusReport run_corpus(const std::filesystem::path& path, const HarnessConfig& cfg)
{
    namespace fs = std::filesystem;
    CorpusReport report;

    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && (entry.path().extension() == ".acorn" || entry.path().extension() == ".json"))
                files.push_back(entry.path());
    } else if (fs::exists(path)) {
        files.push_back(path);
    } else {
        report.errors.push_back({path.string(), "no such file or directory"});
    }
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        try {
            Module m = programs::load_file(file);
            auto wf = wf_global(m.env);
            if (!wf.ok()) {
                report.errors.push_back({file.string(), "ill-formed environment: " + wf.problems.front()});
                continue;
            }
            std::vector<NamedProgram> progs;
            for (const auto& [name, e] : m.programs)
                progs.push_back({stem_of(file) + "/" + name, e});
            auto rs = run_programs(m, progs, cfg);
            report.programs.insert(report.programs.end(), rs.begin(), rs.end());
        } catch (const ParseError& e) {
            report.errors.push_back({file.string(), std::string("parse error at ") + e.what()});
        } catch (const std::exception& e) {
            report.errors.push_back({file.string(), e.what()});
        }
    }

    if (cfg.gen_count > 0) {
        const Module& base = programs::prelude();
        std::vector<NamedProgram> progs;
        for (std::size_t k = 0; k < cfg.gen_count; ++k) {
            std::ostringstream name;
            name << "gen/" << cfg.seed << "/";
            name.width(5);
            name.fill('0');
            name << k;
            progs.push_back({name.str(), gen_expr(cfg.seed * 1000003u + k, cfg.gen_size, base.env)});
        }
        auto rs = run_programs(base, progs, cfg, true);
        report.programs.insert(report.programs.end(), rs.begin(), rs.end());
    }

    std::sort(report.programs.begin(), report.programs.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    std::sort(report.errors.begin(), report.errors.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
    return report;
}

std::string report_text(const CorpusReport& r)
{
    std::ostringstream out;
    for (const auto& p : r.programs) {
        if (p.error) {
            out << "ERROR " << p.name << " : " << *p.error << "\n";
            continue;
        }
        out << to_string(p.outcome.verdict) << " " << p.name;
        if (p.outcome.verdict == Verdict::Agree)
            out << " = " << p.result_text;
        else
            out << " : " << p.outcome.detail;
        out << "\n";
        if (p.outcome.verdict == Verdict::Disagree) {
            if (p.outcome.lhs)
                out << "  kernel:    " << print(*p.outcome.lhs) << "\n";
            if (p.outcome.rhs)
                out << "  read back: " << print(*p.outcome.rhs) << "\n";
        }
        for (const auto& n : p.notes)
            out << "  note: " << n << "\n";
    }
    for (const auto& e : r.errors)
        out << "ERROR " << e.file << " : " << e.message << "\n";
    out << "summary: programs " << r.programs.size() << ", agree " << r.count(Verdict::Agree) << ", disagree "
        << r.count(Verdict::Disagree) << ", inconclusive " << r.count(Verdict::Inconclusive) << ", both-stuck "
        << r.count(Verdict::BothStuck) << ", subst sites " << r.lemma1_checked() << " (failed "
        << r.lemma1_failed() << "), ill-formed values " << r.lemma2_failed() << ", program errors "
        << r.program_errors() << ", file errors " << r.errors.size()
        << "\n";
    return out.str();
}

Json report_json(const CorpusReport& r)
{
    Json progs = Json::array();
    for (const auto& p : r.programs) {
        if (p.error) {
            progs.push_back({{"name", p.name}, {"error", *p.error}});
            continue;
        }
        Json j{{"name", p.name},
               {"verdict", to_string(p.outcome.verdict)},
               {"detail", p.outcome.detail},
               {"substSites", p.lemma1_checked},
               {"substFailures", p.lemma1_failed},
               {"valueWellFormed", p.lemma2_ok}};
        if (p.outcome.value)
            j["value"] = p.result_text;
        if (p.outcome.lhs)
            j["kernel"] = to_json(*p.outcome.lhs);
        if (p.outcome.rhs)
            j["readBack"] = to_json(*p.outcome.rhs);
        if (p.outcome.starved)
            j["starved"] = to_string(*p.outcome.starved);
        if (!p.notes.empty())
            j["notes"] = p.notes;
        progs.push_back(std::move(j));
    }
    Json errs = Json::array();
    for (const auto& e : r.errors)
        errs.push_back({{"file", e.file}, {"message", e.message}});
    return Json{{"programs", progs},
                {"errors", errs},
                {"summary",
                 {{"programs", r.programs.size()},
                  {"agree", r.count(Verdict::Agree)},
                  {"disagree", r.count(Verdict::Disagree)},
                  {"inconclusive", r.count(Verdict::Inconclusive)},
                  {"bothStuck", r.count(Verdict::BothStuck)},
                  {"substSites", r.lemma1_checked()},
                  {"substFailures", r.lemma1_failed()},
                  {"illFormedValues", r.lemma2_failed()},
                  {"programErrors", r.program_errors()},
                  {"fileErrors", r.errors.size()}}}};
}

}  // namespace acorn::soundness
