#include "acorn/serialize.hpp"

namespace acorn {

namespace {

const Json& field(const Json& j, const char* name)
{
    if (!j.is_object() || !j.contains(name))
        throw SchemaError(std::string("missing field '") + name + "' in " + j.dump().substr(0, 80));
    return j.at(name);
}

std::string text(const Json& j, const char* name)
{
    const auto& f = field(j, name);
    if (!f.is_string())
        throw SchemaError(std::string("field '") + name + "' must be a string");
    return f.get<std::string>();
}

std::size_t number(const Json& j, const char* name)
{
    const auto& f = field(j, name);
    if (!f.is_number_unsigned() && !(f.is_number_integer() && f.get<long long>() >= 0))
        throw SchemaError(std::string("field '") + name + "' must be a natural number");
    return f.get<std::size_t>();
}

const Json& array(const Json& j, const char* name)
{
    const auto& f = field(j, name);
    if (!f.is_array())
        throw SchemaError(std::string("field '") + name + "' must be an array");
    return f;
}

}  // namespace

Json to_json(const PrimVal& p)
{
    return {{"tag", "Lit"}, {"kind", p.kind == PrimKind::Int ? "int" : "nat"}, {"value", p.value.str()}};
}

PrimVal prim_from_json(const Json& j)
{
    auto kind = text(j, "kind");
    Integer value;
    try {
        value = Integer(text(j, "value"));
    } catch (const std::exception&) {
        throw SchemaError("malformed literal value");
    }
    if (kind == "int")
        return PrimVal::integer(value);
    if (kind == "nat") {
        if (value < 0)
            throw SchemaError("negative natural literal");
        return PrimVal::natural(value);
    }
    throw SchemaError("literal kind must be 'int' or 'nat'");
}

Json to_json(const Ty& t)
{
    return std::visit(
        [&](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ty::Var>) {
                if (x.name)
                    return {{"tag", "TVar"}, {"name", *x.name}};
                return {{"tag", "TVar"}, {"index", x.index}};
            } else if constexpr (std::is_same_v<T, ty::Ind>) {
                return {{"tag", "TInd"}, {"name", x.name}};
            } else if constexpr (std::is_same_v<T, ty::Forall>) {
                return {{"tag", "TForall"}, {"hint", x.hint}, {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, ty::App>) {
                return {{"tag", "TApp"}, {"fn", to_json(x.fn)}, {"arg", to_json(x.arg)}};
            } else {
                return {{"tag", "TArr"}, {"dom", to_json(x.dom)}, {"cod", to_json(x.cod)}};
            }
        },
        t.rep().node);
}

Ty ty_from_json(const Json& j)
{
    auto tag = text(j, "tag");
    if (tag == "TVar")
        return j.contains("name") ? Ty::named_var(text(j, "name")) : Ty::var(number(j, "index"));
    if (tag == "TInd")
        return Ty::ind(text(j, "name"));
    if (tag == "TForall")
        return Ty::forall(text(j, "hint"), ty_from_json(field(j, "body")));
    if (tag == "TApp")
        return Ty::app(ty_from_json(field(j, "fn")), ty_from_json(field(j, "arg")));
    if (tag == "TArr")
        return Ty::arr(ty_from_json(field(j, "dom")), ty_from_json(field(j, "cod")));
    throw SchemaError("unknown type tag '" + tag + "'");
}

Json to_json(const Expr& e)
{
    return std::visit(
        [&](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, expr::Var>) {
                if (x.name)
                    return {{"tag", "Var"}, {"name", *x.name}};
                return {{"tag", "Var"}, {"index", x.index}};
            } else if constexpr (std::is_same_v<T, expr::Lam>) {
                return {{"tag", "Lam"}, {"hint", x.hint}, {"dom", to_json(x.dom)}, {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                return {{"tag", "TyLam"}, {"hint", x.hint}, {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, expr::Let>) {
                return {{"tag", "Let"},
                        {"hint", x.hint},
                        {"ty", to_json(x.ty)},
                        {"bound", to_json(x.bound)},
                        {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, expr::App>) {
                return {{"tag", "App"}, {"fn", to_json(x.fn)}, {"arg", to_json(x.arg)}};
            } else if constexpr (std::is_same_v<T, expr::Case>) {
                Json params = Json::array();
                for (const auto& p : x.ty_params)
                    params.push_back(to_json(p));
                Json branches = Json::array();
                for (const auto& b : x.branches)
                    branches.push_back({{"ctor", b.pat.ctor}, {"binders", b.pat.binders}, {"body", to_json(b.body)}});
                return {{"tag", "Case"},      {"scrut", to_json(x.scrut)},   {"ind", x.ind},
                        {"tyParams", params}, {"retTy", to_json(x.ret_ty)}, {"branches", branches}};
            } else if constexpr (std::is_same_v<T, expr::Constr>) {
                return {{"tag", "Constr"}, {"ind", x.ind}, {"ctor", x.ctor}};
            } else if constexpr (std::is_same_v<T, expr::Fix>) {
                return {{"tag", "Fix"},
                        {"fixHint", x.fix_hint},
                        {"argHint", x.arg_hint},
                        {"dom", to_json(x.dom)},
                        {"cod", to_json(x.cod)},
                        {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                return {{"tag", "TyAsExpr"}, {"ty", to_json(x.ty)}};
            } else if constexpr (std::is_same_v<T, expr::Const>) {
                return {{"tag", "Const"}, {"name", x.name}};
            } else {
                return to_json(x.value);
            }
        },
        e.rep().node);
}

Expr expr_from_json(const Json& j)
{
    auto tag = text(j, "tag");
    if (tag == "Var")
        return j.contains("name") ? Expr::named_var(text(j, "name")) : Expr::var(number(j, "index"));
    if (tag == "Lam")
        return Expr::lam(text(j, "hint"), ty_from_json(field(j, "dom")), expr_from_json(field(j, "body")));
    if (tag == "TyLam")
        return Expr::ty_lam(text(j, "hint"), expr_from_json(field(j, "body")));
    if (tag == "Let")
        return Expr::let_in(text(j, "hint"), ty_from_json(field(j, "ty")), expr_from_json(field(j, "bound")),
                            expr_from_json(field(j, "body")));
    if (tag == "App")
        return Expr::app(expr_from_json(field(j, "fn")), expr_from_json(field(j, "arg")));
    if (tag == "Case") {
        std::vector<Ty> params;
        for (const auto& p : array(j, "tyParams"))
            params.push_back(ty_from_json(p));
        std::vector<Expr::Branch> branches;
        for (const auto& b : array(j, "branches")) {
            Pat pat{text(b, "ctor"), {}};
            for (const auto& name : array(b, "binders")) {
                if (!name.is_string())
                    throw SchemaError("pattern binders must be strings");
                pat.binders.push_back(name.get<std::string>());
            }
            branches.push_back({std::move(pat), expr_from_json(field(b, "body"))});
        }
        return Expr::case_of(expr_from_json(field(j, "scrut")), text(j, "ind"), std::move(params),
                             ty_from_json(field(j, "retTy")), std::move(branches));
    }
    if (tag == "Constr")
        return Expr::constr(text(j, "ind"), text(j, "ctor"));
    if (tag == "Fix")
        return Expr::fix(text(j, "fixHint"), text(j, "argHint"), ty_from_json(field(j, "dom")),
                         ty_from_json(field(j, "cod")), expr_from_json(field(j, "body")));
    if (tag == "TyAsExpr")
        return Expr::ty_expr(ty_from_json(field(j, "ty")));
    if (tag == "Const")
        return Expr::constant(text(j, "name"));
    if (tag == "Lit")
        return Expr::lit(prim_from_json(j));
    throw SchemaError("unknown expression tag '" + tag + "'");
}

Json to_json(const InductiveDecl& d)
{
    Json ctors = Json::array();
    for (const auto& c : d.constrs) {
        Json args = Json::array();
        for (const auto& a : c.args)
            args.push_back(to_json(a));
        ctors.push_back({{"name", c.name}, {"args", args}});
    }
    return {{"name", d.name}, {"numParams", d.num_params}, {"constrs", ctors}};
}

InductiveDecl inductive_from_json(const Json& j)
{
    InductiveDecl d{text(j, "name"), number(j, "numParams"), {}};
    for (const auto& c : array(j, "constrs")) {
        ConstrDecl ctor{text(c, "name"), {}};
        for (const auto& a : array(c, "args"))
            ctor.args.push_back(ty_from_json(a));
        d.constrs.push_back(std::move(ctor));
    }
    return d;
}

Json to_json(const kernel::Term& t)
{
    namespace term = kernel::term;
    return std::visit(
        [&](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, term::Rel>) {
                return {{"tag", "Rel"}, {"index", x.index}};
            } else if constexpr (std::is_same_v<T, term::Lambda>) {
                return {{"tag", "Lambda"}, {"hint", x.hint}, {"dom", to_json(x.dom)}, {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, term::App>) {
                return {{"tag", "App"}, {"fn", to_json(x.fn)}, {"arg", to_json(x.arg)}};
            } else if constexpr (std::is_same_v<T, term::LetIn>) {
                return {{"tag", "LetIn"},
                        {"hint", x.hint},
                        {"ty", to_json(x.ty)},
                        {"bound", to_json(x.bound)},
                        {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, term::Const>) {
                return {{"tag", "Const"}, {"name", x.name}};
            } else if constexpr (std::is_same_v<T, term::Ind>) {
                return {{"tag", "Ind"}, {"name", x.name}};
            } else if constexpr (std::is_same_v<T, term::Construct>) {
                return {{"tag", "Construct"}, {"ind", x.ind}, {"index", x.index}};
            } else if constexpr (std::is_same_v<T, term::Match>) {
                Json params = Json::array();
                for (const auto& p : x.ty_params)
                    params.push_back(to_json(p));
                Json branches = Json::array();
                for (const auto& b : x.branches)
                    branches.push_back({{"arity", b.arity}, {"body", to_json(b.body)}});
                return {{"tag", "Match"},
                        {"ind", x.ind},
                        {"numParams", x.num_params},
                        {"tyParams", params},
                        {"retTy", to_json(x.ret_ty)},
                        {"scrut", to_json(x.scrut)},
                        {"branches", branches}};
            } else if constexpr (std::is_same_v<T, term::Fix>) {
                return {{"tag", "Fix"}, {"hint", x.hint}, {"fty", to_json(x.fty)}, {"body", to_json(x.body)}};
            } else if constexpr (std::is_same_v<T, term::Prod>) {
                return {{"tag", "Prod"}, {"hint", x.hint}, {"dom", to_json(x.dom)}, {"cod", to_json(x.cod)}};
            } else if constexpr (std::is_same_v<T, term::SortSet>) {
                return {{"tag", "SortSet"}};
            } else {
                auto j = to_json(x.value);
                j["tag"] = "PrimLit";
                return j;
            }
        },
        t.rep().node);
}

kernel::Term term_from_json(const Json& j)
{
    using kernel::Term;
    auto tag = text(j, "tag");
    if (tag == "Rel")
        return Term::rel(number(j, "index"));
    if (tag == "Lambda")
        return Term::lambda(text(j, "hint"), term_from_json(field(j, "dom")), term_from_json(field(j, "body")));
    if (tag == "App")
        return Term::app(term_from_json(field(j, "fn")), term_from_json(field(j, "arg")));
    if (tag == "LetIn")
        return Term::let_in(text(j, "hint"), term_from_json(field(j, "ty")), term_from_json(field(j, "bound")),
                            term_from_json(field(j, "body")));
    if (tag == "Const")
        return Term::constant(text(j, "name"));
    if (tag == "Ind")
        return Term::ind(text(j, "name"));
    if (tag == "Construct")
        return Term::construct(text(j, "ind"), number(j, "index"));
    if (tag == "Match") {
        std::vector<Term> params;
        for (const auto& p : array(j, "tyParams"))
            params.push_back(term_from_json(p));
        std::vector<Term::Branch> branches;
        for (const auto& b : array(j, "branches"))
            branches.push_back({number(b, "arity"), term_from_json(field(b, "body"))});
        return Term::match(text(j, "ind"), number(j, "numParams"), std::move(params), term_from_json(field(j, "retTy")),
                           term_from_json(field(j, "scrut")), std::move(branches));
    }
    if (tag == "Fix")
        return Term::fix(text(j, "hint"), term_from_json(field(j, "fty")), term_from_json(field(j, "body")));
    if (tag == "Prod")
        return Term::prod(text(j, "hint"), term_from_json(field(j, "dom")), term_from_json(field(j, "cod")));
    if (tag == "SortSet")
        return Term::sort_set();
    if (tag == "PrimLit")
        return Term::prim(prim_from_json(j));
    throw SchemaError("unknown term tag '" + tag + "'");
}

Json to_json(const kernel::KernelInductive& d)
{
    Json ctors = Json::array();
    for (const auto& c : d.ctors) {
        Json args = Json::array();
        for (const auto& a : c.arg_tys)
            args.push_back(to_json(a));
        ctors.push_back({{"name", c.name}, {"arity", c.arity}, {"argTys", args}, {"resultTy", to_json(c.result_ty)}});
    }
    return {{"name", d.name}, {"numParams", d.num_params}, {"ctors", ctors}};
}

Json module_to_json(const Module& m)
{
    Json inductives = Json::array();
    for (const auto& name : m.inductive_names)
        inductives.push_back(to_json(*m.env.find_inductive(name)));
    Json constants = Json::array();
    for (const auto& name : m.definitions)
        constants.push_back({{"name", name}, {"body", to_json(std::get<Expr>(*m.env.find_constant(name)))}});
    Json programs = Json::array();
    for (const auto& [name, e] : m.programs)
        programs.push_back({{"name", name}, {"body", to_json(e)}});
    return {{"inductives", inductives}, {"constants", constants}, {"programs", programs}};
}

Module module_from_json(const Json& j, const Module& base)
{
    Module m = base;
    // Only the environment and aliases carry over; the name lists describe
    // this module alone.
    m.inductive_names.clear();
    m.definitions.clear();
    m.programs.clear();
    if (j.contains("inductives"))
        for (const auto& d : array(j, "inductives")) {
            auto decl = inductive_from_json(d);
            if (m.env.find_inductive(decl.name))
                throw SchemaError("duplicate inductive '" + decl.name + "'");
            m.inductive_names.push_back(decl.name);
            m.env.add_inductive(std::move(decl));
        }
    std::vector<std::pair<Ident, Expr>> defs;
    if (j.contains("constants"))
        for (const auto& c : array(j, "constants"))
            defs.emplace_back(text(c, "name"), expr_from_json(field(c, "body")));
    GlobalEnv scope = m.env;
    for (const auto& [name, body] : defs) {
        if (scope.find_constant(name))
            throw SchemaError("duplicate constant '" + name + "'");
        scope.define(name, body);
    }
    for (const auto& [name, body] : defs) {
        m.env.define(name, indexify(scope, {}, body));
        m.definitions.push_back(name);
    }
    if (j.contains("programs"))
        for (const auto& p : array(j, "programs"))
            m.programs.emplace_back(text(p, "name"), indexify(m.env, {}, expr_from_json(field(p, "body"))));
    return m;
}

}  // namespace acorn
