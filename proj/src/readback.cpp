#include <unordered_map>
#include <unordered_set>

#include "acorn/interp.hpp"

namespace acorn::interp {

namespace {

struct SubstFailure {};

// Substitutes rho[j] for the free variable j (after `depth` local binders).
// Free variables past the environment are shifted down by |rho|.
class EnvSubst {
public:
    explicit EnvSubst(std::span<const Expr> rho) : rho_(rho) {}

    Ty type(std::size_t depth, const Ty& t) const
    {
        if (t.loose() <= depth)
            return t;
        return std::visit(
            [&](const auto& x) -> Ty {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ty::Var>) {
                    auto j = x.index - depth;
                    if (j >= rho_.size())
                        return Ty::var(x.index - rho_.size());
                    const auto* te = rho_[j].template as<expr::TyAsExpr>();
                    if (!te)
                        throw SubstFailure{};
                    return lift(te->ty, depth);
                } else if constexpr (std::is_same_v<T, ty::Ind>) {
                    return t;
                } else if constexpr (std::is_same_v<T, ty::Forall>) {
                    return Ty::forall(x.hint, type(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, ty::App>) {
                    return Ty::app(type(depth, x.fn), type(depth, x.arg));
                } else {
                    return Ty::arr(type(depth, x.dom), type(depth, x.cod));
                }
            },
            t.rep().node);
    }

    Expr expr(std::size_t depth, const Expr& e) const
    {
        if (e.loose() <= depth)
            return e;
        return std::visit(
            [&](const auto& x) -> Expr {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, expr::Var>) {
                    auto j = x.index - depth;
                    if (j >= rho_.size())
                        return Expr::var(x.index - rho_.size());
                    return lift(rho_[j], depth);
                } else if constexpr (std::is_same_v<T, expr::Lam>) {
                    return Expr::lam(x.hint, type(depth, x.dom), expr(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                    return Expr::ty_lam(x.hint, expr(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, expr::Let>) {
                    return Expr::let_in(x.hint, type(depth, x.ty), expr(depth, x.bound), expr(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, expr::App>) {
                    return Expr::app(expr(depth, x.fn), expr(depth, x.arg));
                } else if constexpr (std::is_same_v<T, expr::Case>) {
                    std::vector<Ty> params;
                    for (const auto& p : x.ty_params)
                        params.push_back(type(depth, p));
                    std::vector<Expr::Branch> branches;
                    for (const auto& b : x.branches)
                        branches.push_back({b.pat, expr(depth + b.pat.binders.size(), b.body)});
                    return Expr::case_of(expr(depth, x.scrut), x.ind, std::move(params), type(depth, x.ret_ty),
                                         std::move(branches));
                } else if constexpr (std::is_same_v<T, expr::Fix>) {
                    return Expr::fix(x.fix_hint, x.arg_hint, type(depth, x.dom), type(depth, x.cod),
                                     expr(depth + 2, x.body));
                } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                    return Expr::ty_expr(type(depth, x.ty));
                } else {
                    return e;
                }
            },
            e.rep().node);
    }

private:
    std::span<const Expr> rho_;
};

class Reader {
public:
    std::optional<Expr> read(const Val& v)
    {
        if (auto it = memo_.find(v.id()); it != memo_.end())
            return it->second;
        auto result = compute(v);
        memo_.emplace(v.id(), result);
        return result;
    }

private:
    std::optional<std::vector<Expr>> read_env(const Env& env)
    {
        std::vector<Expr> out;
        out.reserve(env.size());
        for (Env cur = env; !cur.empty(); cur = cur.pop()) {
            auto e = read(cur.front());
            if (!e)
                return std::nullopt;
            out.push_back(std::move(*e));
        }
        return out;
    }

    std::optional<Expr> close(const Env& env, const Expr& e)
    {
        auto rho = read_env(env);
        if (!rho)
            return std::nullopt;
        return subst_env_expr(*rho, e);
    }

    std::optional<Expr> compute(const Val& v)
    {
        return std::visit(
            [&](const auto& x) -> std::optional<Expr> {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, val::Constr>) {
                    std::vector<Expr> args;
                    for (const auto& a : x.args) {
                        auto e = read(a);
                        if (!e)
                            return std::nullopt;
                        args.push_back(std::move(*e));
                    }
                    return Expr::apps(Expr::constr(x.ind, x.ctor), args);
                } else if constexpr (std::is_same_v<T, val::ClosLam>) {
                    return close(x.env, Expr::lam(x.hint, x.dom, x.body));
                } else if constexpr (std::is_same_v<T, val::ClosFix>) {
                    return close(x.env, Expr::fix(x.fix_hint, x.arg_hint, x.dom, x.cod, x.body));
                } else if constexpr (std::is_same_v<T, val::TyClos>) {
                    return close(x.env, Expr::ty_lam(x.hint, x.body));
                } else if constexpr (std::is_same_v<T, val::Type>) {
                    return Expr::ty_expr(x.ty);
                } else if constexpr (std::is_same_v<T, val::Prim>) {
                    return Expr::lit(x.value);
                } else {
                    std::vector<Expr> args;
                    for (const auto& a : x.args) {
                        auto e = read(a);
                        if (!e)
                            return std::nullopt;
                        args.push_back(std::move(*e));
                    }
                    return Expr::apps(Expr::constant(x.name), args);
                }
            },
            v.rep().node);
    }

    std::unordered_map<const void*, std::optional<Expr>> memo_;
};

class WfChecker {
public:
    explicit WfChecker(const GlobalEnv& env) : env_(env) {}

    bool value(const Val& v)
    {
        if (good_.count(v.id()))
            return true;
        bool ok = compute(v);
        if (ok)
            good_.insert(v.id());
        return ok;
    }

private:
    bool environment(const Env& env)
    {
        for (Env cur = env; !cur.empty(); cur = cur.pop()) {
            if (good_envs_.count(cur.id()))
                return true;
            if (!value(cur.front()))
                return false;
            good_envs_.insert(cur.id());
        }
        return true;
    }

    bool compute(const Val& v)
    {
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, val::Constr>) {
                    auto ref = resolve_constr(env_, x.ind, x.ctor);
                    if (!ref || x.args.size() > ref->ind->num_params + ref->decl->args.size())
                        return false;
                    for (const auto& a : x.args)
                        if (!value(a))
                            return false;
                    return true;
                } else if constexpr (std::is_same_v<T, val::ClosLam>) {
                    return ty_closed_under(0, x.dom) && validate(x.env, 1, x.body) && environment(x.env);
                } else if constexpr (std::is_same_v<T, val::ClosFix>) {
                    return ty_closed_under(0, x.dom) && ty_closed_under(0, x.cod) && validate(x.env, 2, x.body) &&
                           environment(x.env);
                } else if constexpr (std::is_same_v<T, val::TyClos>) {
                    return validate(x.env, 1, x.body) && environment(x.env);
                } else if constexpr (std::is_same_v<T, val::Type>) {
                    return ty_closed_under(0, x.ty);
                } else if constexpr (std::is_same_v<T, val::Prim>) {
                    return true;
                } else {
                    const auto* prim = find_primitive(x.name);
                    if (!prim || x.args.size() >= prim->arity())
                        return false;
                    for (const auto& a : x.args)
                        if (!value(a))
                            return false;
                    return true;
                }
            },
            v.rep().node);
    }

    const GlobalEnv& env_;
    std::unordered_set<const void*> good_;
    std::unordered_set<const void*> good_envs_;
};

}  // namespace

std::optional<Expr> subst_env_expr(std::span<const Expr> rho, const Expr& e)
{
    try {
        return EnvSubst(rho).expr(0, e);
    } catch (const SubstFailure&) {
        return std::nullopt;
    }
}

std::optional<Ty> subst_env_ty(std::span<const Expr> rho, const Ty& t)
{
    try {
        return EnvSubst(rho).type(0, t);
    } catch (const SubstFailure&) {
        return std::nullopt;
    }
}

std::optional<Expr> from_val(const Val& v)
{
    return Reader().read(v);
}

bool wf_val(const GlobalEnv& env, const Val& v)
{
    return WfChecker(env).value(v);
}

}  // namespace acorn::interp
