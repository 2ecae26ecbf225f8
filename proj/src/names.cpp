#include <algorithm>

#include "acorn/syntax.hpp"

namespace acorn {

namespace {

std::optional<std::size_t> lookup(const NamingContext& ctx, const Ident& name, std::optional<BinderKind> kind)
{
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        const auto& entry = ctx[ctx.size() - 1 - k];
        if (entry.name == name && (!kind || entry.kind == *kind))
            return k;
    }
    return std::nullopt;
}

class Indexifier {
public:
    explicit Indexifier(const GlobalEnv& env) : env_(env) {}

    Ty type(NamingContext& ctx, const Ty& t) const
    {
        if (!t.has_named())
            return t;
        return std::visit(
            [&](const auto& x) -> Ty {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ty::Var>) {
                    auto idx = lookup(ctx, *x.name, BinderKind::Type);
                    if (!idx)
                        throw UnboundName(*x.name, "no enclosing type binder");
                    return Ty::var(*idx);
                } else if constexpr (std::is_same_v<T, ty::Ind>) {
                    return t;
                } else if constexpr (std::is_same_v<T, ty::Forall>) {
                    ctx.push_back({x.hint, BinderKind::Type});
                    auto body = type(ctx, x.body);
                    ctx.pop_back();
                    return Ty::forall(x.hint, std::move(body));
                } else if constexpr (std::is_same_v<T, ty::App>) {
                    return Ty::app(type(ctx, x.fn), type(ctx, x.arg));
                } else {
                    return Ty::arr(type(ctx, x.dom), type(ctx, x.cod));
                }
            },
            t.rep().node);
    }

    Expr expr(NamingContext& ctx, const Expr& e) const
    {
        if (!e.has_named())
            return e;
        return std::visit(
            [&](const auto& x) -> Expr {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, expr::Var>) {
                    return variable(ctx, *x.name);
                } else if constexpr (std::is_same_v<T, expr::Lam>) {
                    auto dom = type(ctx, x.dom);
                    return Expr::lam(x.hint, std::move(dom), under(ctx, {{x.hint, BinderKind::Term}}, x.body));
                } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                    return Expr::ty_lam(x.hint, under(ctx, {{x.hint, BinderKind::Type}}, x.body));
                } else if constexpr (std::is_same_v<T, expr::Let>) {
                    auto ty = type(ctx, x.ty);
                    auto bound = expr(ctx, x.bound);
                    return Expr::let_in(x.hint, std::move(ty), std::move(bound),
                                        under(ctx, {{x.hint, BinderKind::Term}}, x.body));
                } else if constexpr (std::is_same_v<T, expr::App>) {
                    return Expr::app(expr(ctx, x.fn), expr(ctx, x.arg));
                } else if constexpr (std::is_same_v<T, expr::Case>) {
                    std::vector<Ty> params;
                    for (const auto& p : x.ty_params)
                        params.push_back(type(ctx, p));
                    std::vector<Expr::Branch> branches;
                    for (const auto& b : x.branches) {
                        std::vector<NameEntry> binders;
                        for (const auto& name : b.pat.binders)
                            binders.push_back({name, BinderKind::Term});
                        branches.push_back({b.pat, under(ctx, binders, b.body)});
                    }
                    return Expr::case_of(expr(ctx, x.scrut), x.ind, std::move(params), type(ctx, x.ret_ty),
                                         std::move(branches));
                } else if constexpr (std::is_same_v<T, expr::Fix>) {
                    auto dom = type(ctx, x.dom);
                    auto cod = type(ctx, x.cod);
                    return Expr::fix(
                        x.fix_hint, x.arg_hint, std::move(dom), std::move(cod),
                        under(ctx, {{x.fix_hint, BinderKind::Term}, {x.arg_hint, BinderKind::Term}}, x.body));
                } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                    return Expr::ty_expr(type(ctx, x.ty));
                } else {
                    return e;
                }
            },
            e.rep().node);
    }

private:
    Expr under(NamingContext& ctx, const std::vector<NameEntry>& binders, const Expr& body) const
    {
        for (const auto& b : binders)
            ctx.push_back(b);
        auto result = expr(ctx, body);
        ctx.resize(ctx.size() - binders.size());
        return result;
    }

    Expr variable(const NamingContext& ctx, const Ident& name) const
    {
        if (auto idx = lookup(ctx, name, std::nullopt))
            return Expr::var(*idx);
        if (env_.find_constant(name))
            return Expr::constant(name);
        const InductiveDecl* owner = nullptr;
        for (const auto& ind : env_.inductives()) {
            for (const auto& c : ind.constrs) {
                if (c.name != name)
                    continue;
                if (owner)
                    throw UnboundName(name, "constructor is ambiguous between " + owner->name + " and " + ind.name +
                                                "; qualify it");
                owner = &ind;
            }
        }
        if (owner)
            return Expr::constr(owner->name, name);
        throw UnboundName(name);
    }

    const GlobalEnv& env_;
};

}  // namespace

Expr indexify(const GlobalEnv& env, const NamingContext& ctx, const Expr& e)
{
    NamingContext scratch = ctx;
    return Indexifier(env).expr(scratch, e);
}

Ty indexify(const NamingContext& ctx, const Ty& t)
{
    static const GlobalEnv empty;
    NamingContext scratch = ctx;
    return Indexifier(empty).type(scratch, t);
}

// ---------------------------------------------------------------------------
// reindexify

namespace {

class Reindexer {
public:
    explicit Reindexer(std::size_t shift) : shift_(shift) {}

    Expr expr(const Expr& e)
    {
        return std::visit(
            [&](const auto& x) -> Expr {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, expr::Var>) {
                    return x.name ? e : Expr::var(merged(x.index, BinderKind::Term));
                } else if constexpr (std::is_same_v<T, expr::Lam>) {
                    auto dom = type(x.dom);
                    return Expr::lam(x.hint, std::move(dom), under({BinderKind::Term}, x.body));
                } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                    return Expr::ty_lam(x.hint, under({BinderKind::Type}, x.body));
                } else if constexpr (std::is_same_v<T, expr::Let>) {
                    auto ty = type(x.ty);
                    auto bound = expr(x.bound);
                    return Expr::let_in(x.hint, std::move(ty), std::move(bound), under({BinderKind::Term}, x.body));
                } else if constexpr (std::is_same_v<T, expr::App>) {
                    return Expr::app(expr(x.fn), expr(x.arg));
                } else if constexpr (std::is_same_v<T, expr::Case>) {
                    std::vector<Ty> params;
                    for (const auto& p : x.ty_params)
                        params.push_back(type(p));
                    std::vector<Expr::Branch> branches;
                    for (const auto& b : x.branches)
                        branches.push_back(
                            {b.pat,
                             under(std::vector<BinderKind>(b.pat.binders.size(), BinderKind::Term), b.body)});
                    return Expr::case_of(expr(x.scrut), x.ind, std::move(params), type(x.ret_ty),
                                         std::move(branches));
                } else if constexpr (std::is_same_v<T, expr::Fix>) {
                    auto dom = type(x.dom);
                    auto cod = type(x.cod);
                    return Expr::fix(x.fix_hint, x.arg_hint, std::move(dom), std::move(cod),
                                     under({BinderKind::Term, BinderKind::Term}, x.body));
                } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                    return Expr::ty_expr(type(x.ty));
                } else {
                    return e;
                }
            },
            e.rep().node);
    }

    Ty type(const Ty& t)
    {
        return std::visit(
            [&](const auto& x) -> Ty {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ty::Var>) {
                    return x.name ? t : Ty::var(merged(x.index, BinderKind::Type));
                } else if constexpr (std::is_same_v<T, ty::Ind>) {
                    return t;
                } else if constexpr (std::is_same_v<T, ty::Forall>) {
                    stack_.push_back(BinderKind::Type);
                    auto body = type(x.body);
                    stack_.pop_back();
                    return Ty::forall(x.hint, std::move(body));
                } else if constexpr (std::is_same_v<T, ty::App>) {
                    return Ty::app(type(x.fn), type(x.arg));
                } else {
                    return Ty::arr(type(x.dom), type(x.cod));
                }
            },
            t.rep().node);
    }

private:
    Expr under(const std::vector<BinderKind>& kinds, const Expr& body)
    {
        stack_.insert(stack_.end(), kinds.begin(), kinds.end());
        auto result = expr(body);
        stack_.resize(stack_.size() - kinds.size());
        return result;
    }

    // Position (from the innermost binder) of the index-th binder of `kind`.
    std::size_t merged(std::size_t index, BinderKind kind) const
    {
        std::size_t seen = 0;
        for (std::size_t depth = 0; depth < stack_.size(); ++depth) {
            if (stack_[stack_.size() - 1 - depth] != kind)
                continue;
            if (seen == index)
                return depth;
            ++seen;
        }
        return stack_.size() + (index - seen) + shift_;
    }

    std::size_t shift_;
    std::vector<BinderKind> stack_;
};

}  // namespace

Expr reindexify(std::size_t shift, const Expr& e)
{
    return Reindexer(shift).expr(e);
}

}  // namespace acorn
