#include "acorn/syntax.hpp"

#include <algorithm>
#include <set>

namespace acorn {

namespace {

std::size_t under(std::size_t loose, std::size_t binders)
{
    return loose > binders ? loose - binders : 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ty

Ty Ty::var(std::size_t index)
{
    return Ty(std::make_shared<const TyRep>(TyRep{ty::Var{index, std::nullopt}, index + 1, false}));
}

Ty Ty::named_var(Ident name)
{
    return Ty(std::make_shared<const TyRep>(TyRep{ty::Var{0, std::move(name)}, 0, true}));
}

Ty Ty::ind(Ident name)
{
    return Ty(std::make_shared<const TyRep>(TyRep{ty::Ind{std::move(name)}, 0, false}));
}

Ty Ty::forall(Ident hint, Ty body)
{
    auto loose = under(body.loose(), 1);
    bool named = body.has_named();
    return Ty(std::make_shared<const TyRep>(TyRep{ty::Forall{std::move(hint), std::move(body)}, loose, named}));
}

Ty Ty::app(Ty fn, Ty arg)
{
    auto loose = std::max(fn.loose(), arg.loose());
    bool named = fn.has_named() || arg.has_named();
    return Ty(std::make_shared<const TyRep>(TyRep{ty::App{std::move(fn), std::move(arg)}, loose, named}));
}

Ty Ty::arr(Ty dom, Ty cod)
{
    auto loose = std::max(dom.loose(), cod.loose());
    bool named = dom.has_named() || cod.has_named();
    return Ty(std::make_shared<const TyRep>(TyRep{ty::Arr{std::move(dom), std::move(cod)}, loose, named}));
}

bool operator==(const Ty& a, const Ty& b)
{
    if (a.rep_ == b.rep_)
        return true;
    if (a.rep_->node.index() != b.rep_->node.index() || a.loose() != b.loose())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rep_->node);
            if constexpr (std::is_same_v<T, ty::Var>)
                return x.index == y.index && x.name == y.name;
            else if constexpr (std::is_same_v<T, ty::Ind>)
                return x.name == y.name;
            else if constexpr (std::is_same_v<T, ty::Forall>)
                return x.hint == y.hint && x.body == y.body;
            else if constexpr (std::is_same_v<T, ty::App>)
                return x.fn == y.fn && x.arg == y.arg;
            else
                return x.dom == y.dom && x.cod == y.cod;
        },
        a.rep_->node);
}

// ---------------------------------------------------------------------------
// Expr

Expr Expr::make(ExprRep rep)
{
    return Expr(std::make_shared<const ExprRep>(std::move(rep)));
}

Expr Expr::var(std::size_t index)
{
    return make({expr::Var{index, std::nullopt}, index + 1, 0, 1, false});
}

Expr Expr::named_var(Ident name)
{
    return make({expr::Var{0, std::move(name)}, 0, 0, 1, true});
}

Expr Expr::lam(Ident hint, Ty dom, Expr body)
{
    ExprRep r;
    r.loose = std::max(dom.loose(), under(body.loose(), 1));
    r.ty_loose = std::max(dom.loose(), under(body.ty_loose(), 1));
    r.size = 1 + body.size();
    r.named = dom.has_named() || body.has_named();
    r.node = expr::Lam{std::move(hint), std::move(dom), std::move(body)};
    return make(std::move(r));
}

Expr Expr::ty_lam(Ident hint, Expr body)
{
    ExprRep r;
    r.loose = under(body.loose(), 1);
    r.ty_loose = under(body.ty_loose(), 1);
    r.size = 1 + body.size();
    r.named = body.has_named();
    r.node = expr::TyLam{std::move(hint), std::move(body)};
    return make(std::move(r));
}

Expr Expr::let_in(Ident hint, Ty ty, Expr bound, Expr body)
{
    ExprRep r;
    r.loose = std::max({ty.loose(), bound.loose(), under(body.loose(), 1)});
    r.ty_loose = std::max({ty.loose(), bound.ty_loose(), under(body.ty_loose(), 1)});
    r.size = 1 + bound.size() + body.size();
    r.named = ty.has_named() || bound.has_named() || body.has_named();
    r.node = expr::Let{std::move(hint), std::move(ty), std::move(bound), std::move(body)};
    return make(std::move(r));
}

Expr Expr::app(Expr fn, Expr arg)
{
    ExprRep r;
    r.loose = std::max(fn.loose(), arg.loose());
    r.ty_loose = std::max(fn.ty_loose(), arg.ty_loose());
    r.size = 1 + fn.size() + arg.size();
    r.named = fn.has_named() || arg.has_named();
    r.node = expr::App{std::move(fn), std::move(arg)};
    return make(std::move(r));
}

Expr Expr::apps(Expr fn, std::span<const Expr> args)
{
    for (const auto& a : args)
        fn = app(std::move(fn), a);
    return fn;
}

Expr Expr::case_of(Expr scrut, Ident ind, std::vector<Ty> ty_params, Ty ret_ty, std::vector<Branch> branches)
{
    ExprRep r;
    r.loose = std::max(scrut.loose(), ret_ty.loose());
    r.ty_loose = std::max(scrut.ty_loose(), ret_ty.loose());
    r.size = 1 + scrut.size();
    r.named = scrut.has_named() || ret_ty.has_named();
    for (const auto& t : ty_params) {
        r.loose = std::max(r.loose, t.loose());
        r.ty_loose = std::max(r.ty_loose, t.loose());
        r.named = r.named || t.has_named();
    }
    for (const auto& b : branches) {
        auto k = b.pat.binders.size();
        r.loose = std::max(r.loose, under(b.body.loose(), k));
        r.ty_loose = std::max(r.ty_loose, under(b.body.ty_loose(), k));
        r.size += b.body.size();
        r.named = r.named || b.body.has_named();
    }
    r.node = expr::Case{std::move(scrut), std::move(ind), std::move(ty_params), std::move(ret_ty), std::move(branches)};
    return make(std::move(r));
}

Expr Expr::constr(Ident ind, Ident ctor)
{
    return make({expr::Constr{std::move(ind), std::move(ctor)}, 0, 0, 1, false});
}

Expr Expr::fix(Ident fix_hint, Ident arg_hint, Ty dom, Ty cod, Expr body)
{
    ExprRep r;
    r.loose = std::max({dom.loose(), cod.loose(), under(body.loose(), 2)});
    r.ty_loose = std::max({dom.loose(), cod.loose(), under(body.ty_loose(), 2)});
    r.size = 1 + body.size();
    r.named = dom.has_named() || cod.has_named() || body.has_named();
    r.node = expr::Fix{std::move(fix_hint), std::move(arg_hint), std::move(dom), std::move(cod), std::move(body)};
    return make(std::move(r));
}

Expr Expr::ty_expr(Ty ty)
{
    ExprRep r;
    r.loose = ty.loose();
    r.ty_loose = ty.loose();
    r.named = ty.has_named();
    r.node = expr::TyAsExpr{std::move(ty)};
    return make(std::move(r));
}

Expr Expr::constant(Ident name)
{
    return make({expr::Const{std::move(name)}, 0, 0, 1, false});
}

Expr Expr::lit(PrimVal value)
{
    return make({expr::Lit{std::move(value)}, 0, 0, 1, false});
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.rep_ == b.rep_)
        return true;
    if (a.rep_->node.index() != b.rep_->node.index() || a.loose() != b.loose() || a.size() != b.size())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rep_->node);
            if constexpr (std::is_same_v<T, expr::Var>)
                return x.index == y.index && x.name == y.name;
            else if constexpr (std::is_same_v<T, expr::Lam>)
                return x.hint == y.hint && x.dom == y.dom && x.body == y.body;
            else if constexpr (std::is_same_v<T, expr::TyLam>)
                return x.hint == y.hint && x.body == y.body;
            else if constexpr (std::is_same_v<T, expr::Let>)
                return x.hint == y.hint && x.ty == y.ty && x.bound == y.bound && x.body == y.body;
            else if constexpr (std::is_same_v<T, expr::App>)
                return x.fn == y.fn && x.arg == y.arg;
            else if constexpr (std::is_same_v<T, expr::Case>)
                return x.ind == y.ind && x.ty_params == y.ty_params && x.ret_ty == y.ret_ty && x.scrut == y.scrut &&
                       x.branches == y.branches;
            else if constexpr (std::is_same_v<T, expr::Constr>)
                return x.ind == y.ind && x.ctor == y.ctor;
            else if constexpr (std::is_same_v<T, expr::Fix>)
                return x.fix_hint == y.fix_hint && x.arg_hint == y.arg_hint && x.dom == y.dom && x.cod == y.cod &&
                       x.body == y.body;
            else if constexpr (std::is_same_v<T, expr::TyAsExpr>)
                return x.ty == y.ty;
            else if constexpr (std::is_same_v<T, expr::Const>)
                return x.name == y.name;
            else
                return x.value == y.value;
        },
        a.rep_->node);
}

std::pair<Expr, std::vector<Expr>> unfold_app(const Expr& e)
{
    std::vector<Expr> args;
    Expr head = e;
    while (const auto* app = head.as<expr::App>()) {
        args.push_back(app->arg);
        head = app->fn;
    }
    std::reverse(args.begin(), args.end());
    return {head, std::move(args)};
}

// ---------------------------------------------------------------------------
// GlobalEnv

void GlobalEnv::add_inductive(InductiveDecl decl)
{
    if (by_name_.contains(decl.name))
        throw std::invalid_argument("duplicate inductive '" + decl.name + "'");
    by_name_.emplace(decl.name, inductives_.size());
    inductives_.push_back(std::move(decl));
}

void GlobalEnv::define(Ident name, Expr body)
{
    if (constants_.contains(name))
        throw std::invalid_argument("duplicate constant '" + name + "'");
    constants_.emplace(std::move(name), std::move(body));
}

void GlobalEnv::add_builtin(Ident name)
{
    if (constants_.contains(name))
        throw std::invalid_argument("duplicate constant '" + name + "'");
    auto key = name;
    constants_.emplace(std::move(key), Builtin{std::move(name)});
}

void GlobalEnv::add_primitives()
{
    for (const auto& p : primitives())
        if (!constants_.contains(p.name))
            add_builtin(p.name);
}

const InductiveDecl* GlobalEnv::find_inductive(std::string_view name) const
{
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &inductives_[it->second];
}

const ConstantBody* GlobalEnv::find_constant(std::string_view name) const
{
    auto it = constants_.find(Ident(name));
    return it == constants_.end() ? nullptr : &it->second;
}

std::optional<std::span<const ConstrDecl>> resolve_inductive(const GlobalEnv& env, std::string_view ind)
{
    const auto* decl = env.find_inductive(ind);
    if (!decl)
        return std::nullopt;
    return std::span<const ConstrDecl>(decl->constrs);
}

std::optional<ConstrRef> resolve_constr(const GlobalEnv& env, std::string_view ind, std::string_view ctor)
{
    const auto* decl = env.find_inductive(ind);
    if (!decl)
        return std::nullopt;
    for (std::size_t i = 0; i < decl->constrs.size(); ++i)
        if (decl->constrs[i].name == ctor)
            return ConstrRef{i, &decl->constrs[i], decl};
    return std::nullopt;
}

bool ty_closed_under(std::size_t n, const Ty& t)
{
    return !t.has_named() && t.loose() <= n;
}

bool expr_closed_under(std::size_t n, const Expr& e)
{
    return !e.has_named() && e.loose() <= n;
}

WfReport wf_global(const GlobalEnv& env)
{
    WfReport report;
    for (const auto& ind : env.inductives()) {
        std::set<std::string_view> seen;
        for (const auto& c : ind.constrs) {
            if (!seen.insert(c.name).second)
                report.problems.push_back("inductive " + ind.name + ": duplicate constructor " + c.name);
            for (std::size_t j = 0; j < c.args.size(); ++j)
                if (!ty_closed_under(ind.num_params, c.args[j]))
                    report.problems.push_back("inductive " + ind.name + ": argument " + std::to_string(j) + " of " +
                                              c.name + " is not closed under " + std::to_string(ind.num_params) +
                                              " parameter(s)");
        }
    }
    for (const auto& [name, body] : env.constants()) {
        if (const auto* e = std::get_if<Expr>(&body)) {
            if (!expr_closed_under(0, *e))
                report.problems.push_back("constant " + name + " is not closed");
        } else if (!find_primitive(std::get<Builtin>(body).name)) {
            report.problems.push_back("constant " + name + " names an unknown primitive");
        }
    }
    return report;
}

UnboundName::UnboundName(Ident name, const std::string& detail)
    : std::runtime_error("unbound name '" + name + "'" + (detail.empty() ? "" : ": " + detail)),
      name_(std::move(name))
{}

// ---------------------------------------------------------------------------
// Lifting

Ty lift(const Ty& t, std::size_t n, std::size_t cutoff)
{
    if (n == 0 || t.loose() <= cutoff)
        return t;
    return std::visit(
        [&](const auto& x) -> Ty {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ty::Var>)
                return Ty::var(x.index + n);
            else if constexpr (std::is_same_v<T, ty::Ind>)
                return t;
            else if constexpr (std::is_same_v<T, ty::Forall>)
                return Ty::forall(x.hint, lift(x.body, n, cutoff + 1));
            else if constexpr (std::is_same_v<T, ty::App>)
                return Ty::app(lift(x.fn, n, cutoff), lift(x.arg, n, cutoff));
            else
                return Ty::arr(lift(x.dom, n, cutoff), lift(x.cod, n, cutoff));
        },
        t.rep().node);
}

Expr lift(const Expr& e, std::size_t n, std::size_t cutoff)
{
    if (n == 0 || e.loose() <= cutoff)
        return e;
    return std::visit(
        [&](const auto& x) -> Expr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, expr::Var>) {
                return Expr::var(x.index + n);
            } else if constexpr (std::is_same_v<T, expr::Lam>) {
                return Expr::lam(x.hint, lift(x.dom, n, cutoff), lift(x.body, n, cutoff + 1));
            } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                return Expr::ty_lam(x.hint, lift(x.body, n, cutoff + 1));
            } else if constexpr (std::is_same_v<T, expr::Let>) {
                return Expr::let_in(x.hint, lift(x.ty, n, cutoff), lift(x.bound, n, cutoff),
                                    lift(x.body, n, cutoff + 1));
            } else if constexpr (std::is_same_v<T, expr::App>) {
                return Expr::app(lift(x.fn, n, cutoff), lift(x.arg, n, cutoff));
            } else if constexpr (std::is_same_v<T, expr::Case>) {
                std::vector<Ty> params;
                for (const auto& p : x.ty_params)
                    params.push_back(lift(p, n, cutoff));
                std::vector<Expr::Branch> branches;
                for (const auto& b : x.branches)
                    branches.push_back({b.pat, lift(b.body, n, cutoff + b.pat.binders.size())});
                return Expr::case_of(lift(x.scrut, n, cutoff), x.ind, std::move(params), lift(x.ret_ty, n, cutoff),
                                     std::move(branches));
            } else if constexpr (std::is_same_v<T, expr::Fix>) {
                return Expr::fix(x.fix_hint, x.arg_hint, lift(x.dom, n, cutoff), lift(x.cod, n, cutoff),
                                 lift(x.body, n, cutoff + 2));
            } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                return Expr::ty_expr(lift(x.ty, n, cutoff));
            } else {
                return e;
            }
        },
        e.rep().node);
}

}  // namespace acorn
