#include "acorn/programs.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "acorn/serialize.hpp"
#include "embedded_sources.hpp"

namespace acorn::programs {

std::optional<std::string_view> embedded_source(std::string_view name)
{
    for (const auto& s : embedded::sources)
        if (s.name == name)
            return s.text;
    return std::nullopt;
}

std::vector<std::string_view> embedded_names()
{
    std::vector<std::string_view> out;
    for (const auto& s : embedded::sources)
        out.push_back(s.name);
    return out;
}

const Module& prelude()
{
    static const Module m = parse_module(*embedded_source("stdlib"), empty_module());
    return m;
}

Module load_embedded(std::string_view name)
{
    auto src = embedded_source(name);
    if (!src)
        throw std::invalid_argument("no embedded program named " + std::string(name));
    if (name == "stdlib")
        return prelude();
    return parse_module(*src, prelude());
}

Module load_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    bool standalone = path.stem() == "stdlib";
    const Module base = standalone ? empty_module() : prelude();
    if (path.extension() == ".json")
        return module_from_json(Json::parse(buf.str()), base);
    return parse_module(buf.str(), base);
}

Val int_val(const Integer& n)
{
    return make_prim(PrimVal::integer(n));
}

Val nat_val(const Integer& n)
{
    return make_prim(PrimVal::natural(n));
}

Integer prim_value(const Val& v)
{
    const auto* p = v.as<val::Prim>();
    if (!p)
        throw ConversionError("expected a literal");
    return p->value.value;
}

Val to_acorn_list(std::span<const Val> items, const Ty& elem)
{
    Val out = make_constr("List", "Nil", {make_type(elem)});
    for (auto it = items.rbegin(); it != items.rend(); ++it)
        out = make_constr("List", "Cons", {make_type(elem), *it, out});
    return out;
}

std::vector<Val> from_acorn_list(const Val& v)
{
    std::vector<Val> out;
    const Val* cur = &v;
    for (;;) {
        const auto* c = cur->as<val::Constr>();
        if (!c || c->ind != "List")
            throw ConversionError("expected a list value");
        if (c->ctor == "Nil" && c->args.size() == 1)
            return out;
        if (c->ctor != "Cons" || c->args.size() != 3)
            throw ConversionError("malformed list constructor " + c->ctor);
        out.push_back(c->args[1]);
        cur = &c->args[2];
    }
}

Val to_acorn_map(std::span<const std::pair<Integer, Integer>> bindings)
{
    const Val k = make_type(Ty::ind("Nat"));
    const Val v = make_type(Ty::ind("Int"));
    Val out = make_constr("AcornMap", "MNil", {k, v});
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
        out = make_constr("AcornMap", "MCons", {k, v, nat_val(it->first), int_val(it->second), out});
    return out;
}

std::vector<std::pair<Integer, Integer>> from_acorn_map(const Val& v)
{
    std::vector<std::pair<Integer, Integer>> out;
    const Val* cur = &v;
    for (;;) {
        const auto* c = cur->as<val::Constr>();
        if (!c || c->ind != "AcornMap")
            throw ConversionError("expected a map value");
        if (c->ctor == "MNil" && c->args.size() == 2)
            return out;
        if (c->ctor != "MCons" || c->args.size() != 5)
            throw ConversionError("malformed map constructor " + c->ctor);
        out.emplace_back(prim_value(c->args[2]), prim_value(c->args[3]));
        cur = &c->args[4];
    }
}

Integer sum_map(const Val& m)
{
    Integer total = 0;
    std::unordered_set<std::string> seen;
    for (const auto& [k, v] : from_acorn_map(m))
        if (seen.insert(k.str()).second)
            total += v;
    return total;
}

CfState read_cf_state(const Val& state)
{
    const auto* c = state.as<val::Constr>();
    if (!c || c->ind != "State" || c->ctor != "mkState" || c->args.size() != 6)
        throw ConversionError("expected a crowdfunding State value");
    const auto* done = c->args[4].as<val::Constr>();
    if (!done || done->ind != "Bool")
        throw ConversionError("State.done is not a Bool");
    return CfState{prim_value(c->args[0]), c->args[1],           prim_value(c->args[2]),
                   prim_value(c->args[3]), done->ctor == "True", prim_value(c->args[5])};
}

bool consistent_balance(const Val& state)
{
    auto s = read_cf_state(state);
    return s.done || sum_map(s.donations) == s.balance;
}

const char* primitive_name(FoldOp op)
{
    return op == FoldOp::Plus ? "plusInt" : "maxInt";
}

Expr int_list_expr(std::span<const Integer> xs)
{
    const Ty int_ty = Ty::ind("Int");
    Expr out = Expr::app(Expr::constr("List", "Nil"), Expr::ty_expr(int_ty));
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
        const Expr args[] = {Expr::ty_expr(int_ty), Expr::lit(PrimVal::integer(*it)), out};
        out = Expr::apps(Expr::constr("List", "Cons"), args);
    }
    return out;
}

namespace {

Expr foldr_with(FoldOp f, Expr init, Expr list)
{
    const Ty int_ty = Ty::ind("Int");
    const Expr args[] = {Expr::ty_expr(int_ty), Expr::ty_expr(int_ty), Expr::constant(primitive_name(f)),
                         std::move(init), std::move(list)};
    return Expr::apps(Expr::constant("foldr"), args);
}

std::optional<Integer> run_int(const Module& m, std::size_t fuel, const Expr& e, std::string& diag,
                               const char* side)
{
    auto r = interp::eval(m.env, fuel, Env{}, e);
    if (!r.ok()) {
        diag += std::string(side) + ": " + (r.out_of_fuel() ? std::string("out of fuel") : r.error()) + "\n";
        return std::nullopt;
    }
    try {
        return prim_value(r.value());
    } catch (const ConversionError& err) {
        diag += std::string(side) + ": " + err.what() + "\n";
        return std::nullopt;
    }
}

}  // namespace

Expr foldr_expr(FoldOp f, const Integer& i, std::span<const Integer> xs)
{
    return foldr_with(f, Expr::lit(PrimVal::integer(i)), int_list_expr(xs));
}

FoldrConcatOutcome foldr_concat_check(const Module& m, FoldOp f, const Integer& i, std::span<const Integer> l,
                                      std::span<const Integer> l2, std::size_t fuel)
{
    const Expr lit_i = Expr::lit(PrimVal::integer(i));
    const Expr concat_args[] = {Expr::ty_expr(Ty::ind("Int")), int_list_expr(l), int_list_expr(l2)};
    const Expr lhs = foldr_with(f, lit_i, Expr::apps(Expr::constant("concat"), concat_args));
    const Expr rhs = foldr_with(f, foldr_with(f, lit_i, int_list_expr(l2)), int_list_expr(l));

    FoldrConcatOutcome out;
    out.lhs = run_int(m, fuel, lhs, out.diagnostic, "lhs");
    out.rhs = run_int(m, fuel, rhs, out.diagnostic, "rhs");
    out.holds = out.lhs && out.rhs && *out.lhs == *out.rhs;
    if (!out.holds && out.diagnostic.empty())
        out.diagnostic = "sides differ: " + out.lhs->str() + " vs " + out.rhs->str();
    return out;
}

}  // namespace acorn::programs
