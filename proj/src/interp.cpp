#include "acorn/interp.hpp"

#include <cassert>

namespace acorn {

// ---------------------------------------------------------------------------
// Values and environments

bool operator==(const Val& a, const Val& b)
{
    if (a.rep_ == b.rep_)
        return true;
    if (a.rep_->node.index() != b.rep_->node.index())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rep_->node);
            if constexpr (std::is_same_v<T, val::Constr>)
                return x.ind == y.ind && x.ctor == y.ctor && x.args == y.args;
            else if constexpr (std::is_same_v<T, val::ClosLam>)
                return x.hint == y.hint && x.dom == y.dom && x.body == y.body && x.env == y.env;
            else if constexpr (std::is_same_v<T, val::ClosFix>)
                return x.fix_hint == y.fix_hint && x.arg_hint == y.arg_hint && x.dom == y.dom && x.cod == y.cod &&
                       x.body == y.body && x.env == y.env;
            else if constexpr (std::is_same_v<T, val::TyClos>)
                return x.hint == y.hint && x.body == y.body && x.env == y.env;
            else if constexpr (std::is_same_v<T, val::Type>)
                return x.ty == y.ty;
            else if constexpr (std::is_same_v<T, val::Prim>)
                return x.value == y.value;
            else
                return x.name == y.name && x.args == y.args;
        },
        a.rep_->node);
}

Env Env::push(Val v) const
{
    Env out;
    out.head_ = std::make_shared<const Cell>(Cell{std::move(v), head_});
    out.size_ = size_ + 1;
    return out;
}

Env Env::pop() const
{
    Env out;
    out.head_ = head_->tail;
    out.size_ = size_ - 1;
    return out;
}

const Val& Env::operator[](std::size_t i) const
{
    assert(i < size_);
    const Cell* cell = head_.get();
    for (; i > 0; --i)
        cell = cell->tail.get();
    return cell->head;
}

std::vector<Val> Env::to_vector() const
{
    std::vector<Val> out;
    out.reserve(size_);
    for (const Cell* cell = head_.get(); cell; cell = cell->tail.get())
        out.push_back(cell->head);
    return out;
}

Env Env::from_vector(std::span<const Val> innermost_first)
{
    Env env;
    for (auto it = innermost_first.rbegin(); it != innermost_first.rend(); ++it)
        env = env.push(*it);
    return env;
}

bool operator==(const Env& a, const Env& b)
{
    if (a.size_ != b.size_)
        return false;
    const Env::Cell* x = a.head_.get();
    const Env::Cell* y = b.head_.get();
    for (; x && x != y; x = x->tail.get(), y = y->tail.get())
        if (!(x->head == y->head))
            return false;
    return true;
}

Val make_constr(Ident ind, Ident ctor, std::vector<Val> args)
{
    return Val(std::make_shared<const ValRep>(ValRep{val::Constr{std::move(ind), std::move(ctor), std::move(args)}}));
}

Val make_prim(PrimVal p)
{
    return Val(std::make_shared<const ValRep>(ValRep{val::Prim{std::move(p)}}));
}

Val make_type(Ty t)
{
    return Val(std::make_shared<const ValRep>(ValRep{val::Type{std::move(t)}}));
}

Val make_bool(bool b)
{
    return make_constr("Bool", b ? "True" : "False");
}

namespace interp {

namespace {

Val make(auto node)
{
    return Val(std::make_shared<const ValRep>(ValRep{std::move(node)}));
}

class Evaluator {
public:
    Evaluator(const GlobalEnv& env, const Hooks* hooks) : env_(env), hooks_(hooks) {}

    EvalResult<Val> eval(std::size_t fuel, const Env& rho, const Expr& e) const
    {
        if (fuel == 0)
            return NotEnoughFuel{};
        const std::size_t n = fuel - 1;
        if (hooks_ && hooks_->on_eval)
            hooks_->on_eval(rho, e);

        return std::visit(
            [&](const auto& x) -> EvalResult<Val> {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, expr::Var>) {
                    if (x.name)
                        return eval_error("named variable '" + *x.name + "' in nameless evaluation");
                    if (x.index >= rho.size())
                        return eval_error("unbound index " + std::to_string(x.index));
                    return rho[x.index];
                } else if constexpr (std::is_same_v<T, expr::Lam>) {
                    auto dom = eval_type(rho, x.dom);
                    if (!dom)
                        return eval_error("ill-kinded lambda domain");
                    if (!validate(rho, 1, x.body))
                        return eval_error("lambda body does not validate against the environment");
                    return make(val::ClosLam{rho, x.hint, std::move(*dom), x.body});
                } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                    if (!validate(rho, 1, x.body))
                        return eval_error("type abstraction body does not validate against the environment");
                    return make(val::TyClos{rho, x.hint, x.body});
                } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                    auto t = eval_type(rho, x.ty);
                    if (!t)
                        return eval_error("ill-kinded type expression");
                    return make_type(std::move(*t));
                } else if constexpr (std::is_same_v<T, expr::Let>) {
                    if (!eval_type(rho, x.ty))
                        return eval_error("ill-kinded let annotation");
                    auto bound = eval(n, rho, x.bound);
                    if (!bound.ok())
                        return bound;
                    return eval(n, rho.push(bound.value()), x.body);
                } else if constexpr (std::is_same_v<T, expr::App>) {
                    auto arg = eval(n, rho, x.arg);
                    if (!arg.ok())
                        return arg;
                    auto fn = eval(n, rho, x.fn);
                    if (!fn.ok())
                        return fn;
                    return apply(n, fn.value(), arg.value());
                } else if constexpr (std::is_same_v<T, expr::Constr>) {
                    if (!resolve_constr(env_, x.ind, x.ctor))
                        return eval_error("unknown constructor " + x.ind + "." + x.ctor);
                    return make_constr(x.ind, x.ctor);
                } else if constexpr (std::is_same_v<T, expr::Const>) {
                    const auto* body = env_.find_constant(x.name);
                    if (!body)
                        return eval_error("unknown constant '" + x.name + "'");
                    if (const auto* def = std::get_if<Expr>(body))
                        return eval(n, Env{}, *def);
                    if (!find_primitive(std::get<Builtin>(*body).name))
                        return eval_error("unknown primitive '" + x.name + "'");
                    return make(val::Builtin{std::get<Builtin>(*body).name, {}});
                } else if constexpr (std::is_same_v<T, expr::Lit>) {
                    return make_prim(x.value);
                } else if constexpr (std::is_same_v<T, expr::Fix>) {
                    auto dom = eval_type(rho, x.dom);
                    auto cod = eval_type(rho, x.cod);
                    if (!dom || !cod)
                        return eval_error("ill-kinded fixpoint type");
                    if (!validate(rho, 2, x.body))
                        return eval_error("fixpoint body does not validate against the environment");
                    return make(val::ClosFix{rho, x.fix_hint, x.arg_hint, std::move(*dom), std::move(*cod), x.body});
                } else {
                    return eval_case(n, rho, x);
                }
            },
            e.rep().node);
    }

    EvalResult<Val> eval_case(std::size_t n, const Env& rho, const expr::Case& c) const
    {
        if (!validate_branches(rho, c.branches))
            return eval_error("case branches do not validate against the environment");
        if (!eval_type(rho, c.ret_ty))
            return eval_error("ill-kinded case return type");
        for (const auto& p : c.ty_params)
            if (!eval_type(rho, p))
                return eval_error("ill-kinded case type parameter");
        auto scrut = eval(n, rho, c.scrut);
        if (!scrut.ok())
            return scrut;
        const auto* v = scrut.value().as<val::Constr>();
        if (!v)
            return eval_error("case on a non-constructor value");
        auto ref = resolve_constr(env_, v->ind, v->ctor);
        if (!ref)
            return eval_error("unknown constructor " + v->ind + "." + v->ctor);
        if (v->ind != c.ind)
            return eval_error("case expects " + c.ind + " but the scrutinee is a " + v->ind);
        auto body = match_pat(v->ctor, ref->ind->num_params, ref->decl->args, v->args, c.branches);
        if (!body)
            return eval_error("no branch of arity " + std::to_string(ref->decl->args.size()) + " for " + v->ctor);
        Env extended = rho;
        for (std::size_t i = ref->ind->num_params; i < v->args.size(); ++i)
            extended = extended.push(v->args[i]);
        return eval(n, extended, *body);
    }

    EvalResult<Val> apply(std::size_t n, const Val& fn, const Val& arg) const
    {
        return std::visit(
            [&](const auto& f) -> EvalResult<Val> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, val::ClosLam>) {
                    return eval(n, f.env.push(arg), f.body);
                } else if constexpr (std::is_same_v<T, val::ClosFix>) {
                    if (!arg.as<val::Constr>())
                        return eval_error("fixpoint '" + f.fix_hint + "' applied to a non-constructor value");
                    return eval(n, f.env.push(fn).push(arg), f.body);
                } else if constexpr (std::is_same_v<T, val::TyClos>) {
                    if (!arg.as<val::Type>())
                        return eval_error("type abstraction applied to a non-type value");
                    return eval(n, f.env.push(arg), f.body);
                } else if constexpr (std::is_same_v<T, val::Constr>) {
                    auto ref = resolve_constr(env_, f.ind, f.ctor);
                    if (!ref)
                        return eval_error("unknown constructor " + f.ind + "." + f.ctor);
                    if (f.args.size() >= ref->ind->num_params + ref->decl->args.size())
                        return eval_error("constructor " + f.ctor + " applied to too many arguments");
                    auto args = f.args;
                    args.push_back(arg);
                    return make_constr(f.ind, f.ctor, std::move(args));
                } else if constexpr (std::is_same_v<T, val::Builtin>) {
                    return apply_builtin(f, arg);
                } else {
                    return eval_error("application of a non-function value");
                }
            },
            fn.rep().node);
    }

private:
    EvalResult<Val> apply_builtin(const val::Builtin& f, const Val& arg) const
    {
        const auto* prim = find_primitive(f.name);
        if (!prim)
            return eval_error("unknown primitive '" + f.name + "'");
        auto args = f.args;
        args.push_back(arg);
        if (args.size() < prim->arity())
            return make(val::Builtin{f.name, std::move(args)});
        std::vector<PrimVal> lits;
        for (const auto& a : args) {
            const auto* p = a.as<val::Prim>();
            if (!p)
                return eval_error("primitive '" + f.name + "' applied to a non-literal");
            lits.push_back(p->value);
        }
        auto result = apply_primitive(*prim, lits);
        if (!result)
            return eval_error("primitive '" + f.name + "' applied to arguments of the wrong kind");
        if (const auto* b = std::get_if<bool>(&*result))
            return make_bool(*b);
        return make_prim(std::get<PrimVal>(*result));
    }

    const GlobalEnv& env_;
    const Hooks* hooks_;
};

std::optional<Ty> eval_type_at(const Env& rho, std::size_t depth, const Ty& t)
{
    if (t.loose() <= depth && !t.has_named())
        return t;
    return std::visit(
        [&](const auto& x) -> std::optional<Ty> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ty::Var>) {
                if (x.name)
                    return std::nullopt;
                if (x.index < depth)
                    return t;
                auto j = x.index - depth;
                if (j >= rho.size())
                    return std::nullopt;
                const auto* type = rho[j].template as<val::Type>();
                if (!type)
                    return std::nullopt;
                return lift(type->ty, depth);
            } else if constexpr (std::is_same_v<T, ty::Ind>) {
                return t;
            } else if constexpr (std::is_same_v<T, ty::Forall>) {
                auto body = eval_type_at(rho, depth + 1, x.body);
                if (!body)
                    return std::nullopt;
                return Ty::forall(x.hint, std::move(*body));
            } else if constexpr (std::is_same_v<T, ty::App>) {
                auto fn = eval_type_at(rho, depth, x.fn);
                auto arg = eval_type_at(rho, depth, x.arg);
                if (!fn || !arg)
                    return std::nullopt;
                return Ty::app(std::move(*fn), std::move(*arg));
            } else {
                auto dom = eval_type_at(rho, depth, x.dom);
                auto cod = eval_type_at(rho, depth, x.cod);
                if (!dom || !cod)
                    return std::nullopt;
                return Ty::arr(std::move(*dom), std::move(*cod));
            }
        },
        t.rep().node);
}

// Every type variable of `t` that escapes `depth` binders hits a type value.
bool type_hits_types(const Env& rho, std::size_t depth, const Ty& t)
{
    if (t.loose() <= depth)
        return true;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ty::Var>) {
                auto j = x.index - depth;
                return j >= rho.size() || rho[j].template as<val::Type>() != nullptr;
            } else if constexpr (std::is_same_v<T, ty::Ind>) {
                return true;
            } else if constexpr (std::is_same_v<T, ty::Forall>) {
                return type_hits_types(rho, depth + 1, x.body);
            } else if constexpr (std::is_same_v<T, ty::App>) {
                return type_hits_types(rho, depth, x.fn) && type_hits_types(rho, depth, x.arg);
            } else {
                return type_hits_types(rho, depth, x.dom) && type_hits_types(rho, depth, x.cod);
            }
        },
        t.rep().node);
}

bool expr_types_hit_types(const Env& rho, std::size_t depth, const Expr& e)
{
    if (e.ty_loose() <= depth)
        return true;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, expr::Lam>) {
                return type_hits_types(rho, depth, x.dom) && expr_types_hit_types(rho, depth + 1, x.body);
            } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                return expr_types_hit_types(rho, depth + 1, x.body);
            } else if constexpr (std::is_same_v<T, expr::Let>) {
                return type_hits_types(rho, depth, x.ty) && expr_types_hit_types(rho, depth, x.bound) &&
                       expr_types_hit_types(rho, depth + 1, x.body);
            } else if constexpr (std::is_same_v<T, expr::App>) {
                return expr_types_hit_types(rho, depth, x.fn) && expr_types_hit_types(rho, depth, x.arg);
            } else if constexpr (std::is_same_v<T, expr::Case>) {
                if (!expr_types_hit_types(rho, depth, x.scrut) || !type_hits_types(rho, depth, x.ret_ty))
                    return false;
                for (const auto& p : x.ty_params)
                    if (!type_hits_types(rho, depth, p))
                        return false;
                for (const auto& b : x.branches)
                    if (!expr_types_hit_types(rho, depth + b.pat.binders.size(), b.body))
                        return false;
                return true;
            } else if constexpr (std::is_same_v<T, expr::Fix>) {
                return type_hits_types(rho, depth, x.dom) && type_hits_types(rho, depth, x.cod) &&
                       expr_types_hit_types(rho, depth + 2, x.body);
            } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                return type_hits_types(rho, depth, x.ty);
            } else {
                return true;
            }
        },
        e.rep().node);
}

}  // namespace

EvalResult<Val> eval(const GlobalEnv& env, std::size_t fuel, const Env& rho, const Expr& e, const Hooks* hooks)
{
    return Evaluator(env, hooks).eval(fuel, rho, e);
}

EvalResult<Val> apply(const GlobalEnv& env, std::size_t fuel, const Val& fn, const Val& arg, const Hooks* hooks)
{
    if (fuel == 0)
        return NotEnoughFuel{};
    return Evaluator(env, hooks).apply(fuel - 1, fn, arg);
}

EvalResult<Val> apply(const GlobalEnv& env, std::size_t fuel, const Val& fn, std::span<const Val> args,
                      const Hooks* hooks)
{
    EvalResult<Val> acc = fn;
    for (const auto& a : args) {
        acc = apply(env, fuel, acc.value(), a, hooks);
        if (!acc.ok())
            return acc;
    }
    return acc;
}

std::optional<Ty> eval_type(const Env& rho, const Ty& t)
{
    return eval_type_at(rho, 0, t);
}

std::optional<Expr> match_pat(const Ident& ctor, std::size_t num_params, std::span<const Ty> arg_tys,
                              std::span<const Val> args, std::span<const Expr::Branch> branches)
{
    for (const auto& b : branches) {
        if (b.pat.ctor != ctor)
            continue;
        if (args.size() < num_params)
            return std::nullopt;
        auto k = args.size() - num_params;
        if (k != arg_tys.size() || b.pat.binders.size() != k)
            return std::nullopt;
        return b.body;
    }
    return std::nullopt;
}

bool validate(const Env& rho, std::size_t extra, const Expr& e)
{
    return expr_closed_under(rho.size() + extra, e) && expr_types_hit_types(rho, extra, e);
}

bool validate_branches(const Env& rho, std::span<const Expr::Branch> branches)
{
    for (const auto& b : branches)
        if (!validate(rho, b.pat.binders.size(), b.body))
            return false;
    return true;
}

}  // namespace interp
}  // namespace acorn
