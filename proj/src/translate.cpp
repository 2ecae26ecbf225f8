#include "acorn/translate.hpp"

#include <algorithm>
#include <unordered_map>

namespace acorn {

using kernel::Term;

TranslateError::TranslateError(Kind kind, std::string subject, std::string detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + subject + (detail.empty() ? "" : " (" + detail + ")")),
      kind_(kind), subject_(std::move(subject)), detail_(std::move(detail))
{}

TranslateError TranslateError::in_definition(std::string name) const
{
    auto detail = detail_.empty() ? "in " + name : detail_ + ", in " + name;
    TranslateError out(kind_, subject_, detail);
    out.definition_ = std::move(name);
    return out;
}

const char* to_string(TranslateError::Kind kind)
{
    switch (kind) {
    case TranslateError::Kind::MissingInductive:
        return "MissingInductive";
    case TranslateError::Kind::MissingConstructor:
        return "MissingConstructor";
    case TranslateError::Kind::MissingBranch:
        return "MissingBranch";
    case TranslateError::Kind::BranchArity:
        return "BranchArity";
    }
    return "?";
}

namespace {

class Translator {
public:
    explicit Translator(const GlobalEnv& env) : env_(env) {}

    Term type(const Ty& t)
    {
        if (t.has_named())
            throw std::invalid_argument("translation of a named type variable");
        if (auto it = ty_memo_.find(&t.rep()); it != ty_memo_.end())
            return it->second;
        auto out = std::visit(
            [&](const auto& x) -> Term {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ty::Var>)
                    return Term::rel(x.index);
                else if constexpr (std::is_same_v<T, ty::Ind>)
                    return Term::ind(x.name);
                else if constexpr (std::is_same_v<T, ty::Forall>)
                    return Term::prod(x.hint, Term::sort_set(), type(x.body));
                else if constexpr (std::is_same_v<T, ty::App>)
                    return Term::app(type(x.fn), type(x.arg));
                else
                    return Term::prod("_", type(x.dom), kernel::lift(type(x.cod), 1));
            },
            t.rep().node);
        ty_memo_.emplace(&t.rep(), out);
        return out;
    }

    Term expr(const Expr& e)
    {
        if (auto it = memo_.find(e.id()); it != memo_.end())
            return it->second;
        auto out = std::visit(
            [&](const auto& x) -> Term {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, expr::Var>) {
                    if (x.name)
                        throw std::invalid_argument("translation of named variable '" + *x.name + "'");
                    return Term::rel(x.index);
                } else if constexpr (std::is_same_v<T, expr::Lam>) {
                    return Term::lambda(x.hint, type(x.dom), expr(x.body));
                } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                    return Term::lambda(x.hint, Term::sort_set(), expr(x.body));
                } else if constexpr (std::is_same_v<T, expr::Let>) {
                    return Term::let_in(x.hint, type(x.ty), expr(x.bound), expr(x.body));
                } else if constexpr (std::is_same_v<T, expr::App>) {
                    return Term::app(expr(x.fn), expr(x.arg));
                } else if constexpr (std::is_same_v<T, expr::Constr>) {
                    if (!env_.find_inductive(x.ind))
                        throw TranslateError(TranslateError::Kind::MissingInductive, x.ind);
                    auto ref = resolve_constr(env_, x.ind, x.ctor);
                    if (!ref)
                        throw TranslateError(TranslateError::Kind::MissingConstructor, x.ind + "." + x.ctor);
                    return Term::construct(x.ind, ref->position);
                } else if constexpr (std::is_same_v<T, expr::Fix>) {
                    auto dom = type(x.dom);
                    auto fty = Term::prod(x.arg_hint, dom, kernel::lift(type(x.cod), 1));
                    return Term::fix(x.fix_hint, fty, Term::lambda(x.arg_hint, kernel::lift(dom, 1), expr(x.body)));
                } else if constexpr (std::is_same_v<T, expr::Case>) {
                    return match(x);
                } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                    return type(x.ty);
                } else if constexpr (std::is_same_v<T, expr::Const>) {
                    return Term::constant(x.name);
                } else {
                    return Term::prim(x.value);
                }
            },
            e.rep().node);
        memo_.emplace(e.id(), out);
        return out;
    }

    std::pair<std::size_t, Term> branch(std::span<const Ty> ty_params, std::span<const Expr::Branch> branches,
                                        const ConstrDecl& c)
    {
        auto found = std::find_if(branches.begin(), branches.end(),
                                  [&](const Expr::Branch& b) { return b.pat.ctor == c.name; });
        if (found == branches.end())
            throw TranslateError(TranslateError::Kind::MissingBranch, c.name);
        const auto k = c.args.size();
        if (found->pat.binders.size() != k)
            throw TranslateError(TranslateError::Kind::BranchArity, c.name,
                                 "pattern binds " + std::to_string(found->pat.binders.size()) + ", constructor takes " +
                                     std::to_string(k));
        // Parameter ^0 is the last one.
        std::vector<Term> params;
        for (auto it = ty_params.rbegin(); it != ty_params.rend(); ++it)
            params.push_back(type(*it));

        Term body = expr(found->body);
        for (std::size_t j = k; j-- > 0;) {
            std::vector<Term> lifted;
            for (const auto& p : params)
                lifted.push_back(kernel::lift(p, j));
            auto dom = kernel::parallel_subst(lifted, type(c.args[j]));
            body = Term::lambda(found->pat.binders[j], std::move(dom), std::move(body));
        }
        return {k, std::move(body)};
    }

private:
    Term match(const expr::Case& c)
    {
        const auto* ind = env_.find_inductive(c.ind);
        if (!ind)
            throw TranslateError(TranslateError::Kind::MissingInductive, c.ind);
        for (const auto& b : c.branches)
            if (!resolve_constr(env_, c.ind, b.pat.ctor))
                throw TranslateError(TranslateError::Kind::MissingConstructor, c.ind + "." + b.pat.ctor);
        std::vector<Term> params;
        for (const auto& p : c.ty_params)
            params.push_back(type(p));
        std::vector<Term::Branch> branches;
        for (const auto& ctor : ind->constrs) {
            auto [arity, body] = branch(c.ty_params, c.branches, ctor);
            branches.push_back({arity, std::move(body)});
        }
        return Term::match(c.ind, ind->num_params, std::move(params), kernel::lift(type(c.ret_ty), 1), expr(c.scrut),
                           std::move(branches));
    }

    const GlobalEnv& env_;
    std::unordered_map<const void*, Term> memo_;
    std::unordered_map<const void*, Term> ty_memo_;
};

// Constructor argument types inside a declaration: parameters and the
// inductive itself become binders outside the argument telescope.
Term ctor_arg(const Ty& t, const Ident& self, std::size_t num_params, std::size_t preceding, std::size_t depth)
{
    return std::visit(
        [&](const auto& x) -> Term {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ty::Var>) {
                return Term::rel(x.index < depth ? x.index : x.index + preceding);
            } else if constexpr (std::is_same_v<T, ty::Ind>) {
                if (x.name == self)
                    return Term::rel(depth + num_params + preceding);
                return Term::ind(x.name);
            } else if constexpr (std::is_same_v<T, ty::Forall>) {
                return Term::prod(x.hint, Term::sort_set(), ctor_arg(x.body, self, num_params, preceding, depth + 1));
            } else if constexpr (std::is_same_v<T, ty::App>) {
                return Term::app(ctor_arg(x.fn, self, num_params, preceding, depth),
                                 ctor_arg(x.arg, self, num_params, preceding, depth));
            } else {
                return Term::prod("_", ctor_arg(x.dom, self, num_params, preceding, depth),
                                  ctor_arg(x.cod, self, num_params, preceding, depth + 1));
            }
        },
        t.rep().node);
}

}  // namespace

Term ty_to_term(const Ty& t)
{
    static const GlobalEnv empty;
    return Translator(empty).type(t);
}

Term expr_to_term(const GlobalEnv& env, const Expr& e)
{
    return Translator(env).expr(e);
}

std::pair<std::size_t, Term> branch(const GlobalEnv& env, std::span<const Ty> ty_params,
                                    std::span<const Expr::Branch> branches, const ConstrDecl& c)
{
    return Translator(env).branch(ty_params, branches, c);
}

kernel::KernelInductive decl_to_kernel(const InductiveDecl& d)
{
    kernel::KernelInductive out{d.name, d.num_params, {}};
    const auto p = d.num_params;
    for (const auto& c : d.constrs) {
        kernel::KernelCtor ctor;
        ctor.name = c.name;
        ctor.arity = c.args.size();
        for (std::size_t j = 0; j < c.args.size(); ++j)
            ctor.arg_tys.push_back(ctor_arg(c.args[j], d.name, p, j, 0));
        const auto k = ctor.arity;
        Term result = Term::rel(p + k);
        for (std::size_t i = 0; i < p; ++i)
            result = Term::app(std::move(result), Term::rel(k + p - 1 - i));
        ctor.result_ty = std::move(result);
        out.ctors.push_back(std::move(ctor));
    }
    return out;
}

kernel::KernelEnv translate_env(const GlobalEnv& env)
{
    kernel::KernelEnv out;
    for (const auto& d : env.inductives())
        out.add_inductive(decl_to_kernel(d));
    Translator tr(env);
    for (const auto& [name, body] : env.constants()) {
        if (const auto* e = std::get_if<Expr>(&body)) {
            try {
                out.define(name, tr.expr(*e));
            } catch (const TranslateError& err) {
                throw err.in_definition(name);
            }
        } else {
            out.define(name, kernel::KernelBuiltin{std::get<Builtin>(body).name});
        }
    }
    return out;
}

}  // namespace acorn
