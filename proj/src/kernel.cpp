#include "acorn/kernel.hpp"

#include <algorithm>
#include <stdexcept>

namespace acorn::kernel {

namespace {

std::size_t under(std::size_t loose, std::size_t binders)
{
    return loose > binders ? loose - binders : 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Term Term::make(TermRep rep)
{
    return Term(std::make_shared<const TermRep>(std::move(rep)));
}

Term Term::rel(std::size_t index)
{
    return make({term::Rel{index}, index + 1, 1});
}

Term Term::lambda(Ident hint, Term dom, Term body)
{
    auto loose = std::max(dom.loose(), under(body.loose(), 1));
    auto size = 1 + dom.size() + body.size();
    return make({term::Lambda{std::move(hint), std::move(dom), std::move(body)}, loose, size});
}

Term Term::app(Term fn, Term arg)
{
    auto loose = std::max(fn.loose(), arg.loose());
    auto size = 1 + fn.size() + arg.size();
    return make({term::App{std::move(fn), std::move(arg)}, loose, size});
}

Term Term::apps(Term fn, std::span<const Term> args)
{
    for (const auto& a : args)
        fn = app(std::move(fn), a);
    return fn;
}

Term Term::let_in(Ident hint, Term ty, Term bound, Term body)
{
    auto loose = std::max({ty.loose(), bound.loose(), under(body.loose(), 1)});
    auto size = 1 + ty.size() + bound.size() + body.size();
    return make({term::LetIn{std::move(hint), std::move(ty), std::move(bound), std::move(body)}, loose, size});
}

Term Term::constant(Ident name)
{
    return make({term::Const{std::move(name)}, 0, 1});
}

Term Term::ind(Ident name)
{
    return make({term::Ind{std::move(name)}, 0, 1});
}

Term Term::construct(Ident ind, std::size_t index)
{
    return make({term::Construct{std::move(ind), index}, 0, 1});
}

Term Term::match(Ident ind, std::size_t num_params, std::vector<Term> ty_params, Term ret_ty, Term scrut,
                 std::vector<Branch> branches)
{
    auto loose = std::max(under(ret_ty.loose(), 1), scrut.loose());
    std::size_t size = 1 + ret_ty.size() + scrut.size();
    for (const auto& p : ty_params) {
        loose = std::max(loose, p.loose());
        size += p.size();
    }
    for (const auto& b : branches) {
        loose = std::max(loose, b.body.loose());
        size += b.body.size();
    }
    return make({term::Match{std::move(ind), num_params, std::move(ty_params), std::move(ret_ty), std::move(scrut),
                             std::move(branches)},
                 loose, size});
}

Term Term::fix(Ident hint, Term fty, Term body)
{
    auto loose = std::max(fty.loose(), under(body.loose(), 1));
    auto size = 1 + fty.size() + body.size();
    return make({term::Fix{std::move(hint), std::move(fty), std::move(body)}, loose, size});
}

Term Term::prod(Ident hint, Term dom, Term cod)
{
    auto loose = std::max(dom.loose(), under(cod.loose(), 1));
    auto size = 1 + dom.size() + cod.size();
    return make({term::Prod{std::move(hint), std::move(dom), std::move(cod)}, loose, size});
}

Term Term::sort_set()
{
    static const Term set = make({term::SortSet{}, 0, 1});
    return set;
}

Term Term::prim(PrimVal value)
{
    return make({term::PrimLit{std::move(value)}, 0, 1});
}

bool operator==(const Term& a, const Term& b)
{
    if (a.rep_ == b.rep_)
        return true;
    if (a.rep_->node.index() != b.rep_->node.index() || a.loose() != b.loose() || a.size() != b.size())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rep_->node);
            if constexpr (std::is_same_v<T, term::Rel>)
                return x.index == y.index;
            else if constexpr (std::is_same_v<T, term::Lambda>)
                return x.dom == y.dom && x.body == y.body;
            else if constexpr (std::is_same_v<T, term::Prod>)
                return x.dom == y.dom && x.cod == y.cod;
            else if constexpr (std::is_same_v<T, term::App>)
                return x.fn == y.fn && x.arg == y.arg;
            else if constexpr (std::is_same_v<T, term::LetIn>)
                return x.ty == y.ty && x.bound == y.bound && x.body == y.body;
            else if constexpr (std::is_same_v<T, term::Const> || std::is_same_v<T, term::Ind>)
                return x.name == y.name;
            else if constexpr (std::is_same_v<T, term::Construct>)
                return x.ind == y.ind && x.index == y.index;
            else if constexpr (std::is_same_v<T, term::Match>)
                return x.ind == y.ind && x.num_params == y.num_params && x.ty_params == y.ty_params &&
                       x.ret_ty == y.ret_ty && x.scrut == y.scrut && x.branches == y.branches;
            else if constexpr (std::is_same_v<T, term::Fix>)
                return x.fty == y.fty && x.body == y.body;
            else if constexpr (std::is_same_v<T, term::SortSet>)
                return true;
            else
                return x.value == y.value;
        },
        a.rep_->node);
}

std::pair<Term, std::vector<Term>> unfold_app(const Term& t)
{
    std::vector<Term> args;
    Term head = t;
    while (const auto* a = head.as<term::App>()) {
        args.push_back(a->arg);
        head = a->fn;
    }
    std::reverse(args.begin(), args.end());
    return {head, std::move(args)};
}

bool closed_under(std::size_t n, const Term& t)
{
    return t.loose() <= n;
}

// ---------------------------------------------------------------------------
// Lifting and substitution

namespace {

// Shared traversal: `leaf(depth, index)` rewrites each Rel at or above the
// current depth.
template <class Leaf> class Rewriter {
public:
    explicit Rewriter(Leaf leaf) : leaf_(std::move(leaf)) {}

    Term go(std::size_t depth, const Term& t) const
    {
        if (t.loose() <= depth)
            return t;
        return std::visit(
            [&](const auto& x) -> Term {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, term::Rel>) {
                    return leaf_(depth, x.index);
                } else if constexpr (std::is_same_v<T, term::Lambda>) {
                    return Term::lambda(x.hint, go(depth, x.dom), go(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, term::App>) {
                    return Term::app(go(depth, x.fn), go(depth, x.arg));
                } else if constexpr (std::is_same_v<T, term::LetIn>) {
                    return Term::let_in(x.hint, go(depth, x.ty), go(depth, x.bound), go(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, term::Match>) {
                    std::vector<Term> params;
                    for (const auto& p : x.ty_params)
                        params.push_back(go(depth, p));
                    std::vector<Term::Branch> branches;
                    for (const auto& b : x.branches)
                        branches.push_back({b.arity, go(depth, b.body)});
                    return Term::match(x.ind, x.num_params, std::move(params), go(depth + 1, x.ret_ty),
                                       go(depth, x.scrut), std::move(branches));
                } else if constexpr (std::is_same_v<T, term::Fix>) {
                    return Term::fix(x.hint, go(depth, x.fty), go(depth + 1, x.body));
                } else if constexpr (std::is_same_v<T, term::Prod>) {
                    return Term::prod(x.hint, go(depth, x.dom), go(depth + 1, x.cod));
                } else {
                    return t;
                }
            },
            t.rep().node);
    }

private:
    Leaf leaf_;
};

}  // namespace

Term lift(const Term& t, std::size_t n, std::size_t cutoff)
{
    if (n == 0)
        return t;
    auto leaf = [n](std::size_t, std::size_t i) { return Term::rel(i + n); };
    return Rewriter(leaf).go(cutoff, t);
}

Term parallel_subst(std::span<const Term> ts, const Term& t)
{
    if (ts.empty())
        return t;
    auto leaf = [ts](std::size_t depth, std::size_t i) {
        auto j = i - depth;
        if (j < ts.size())
            return lift(ts[j], depth);
        return Term::rel(i - ts.size());
    };
    return Rewriter(leaf).go(0, t);
}

// ---------------------------------------------------------------------------
// Environment

void KernelEnv::add_inductive(KernelInductive ind)
{
    if (by_name_.count(ind.name))
        throw std::invalid_argument("duplicate inductive '" + ind.name + "'");
    by_name_.emplace(ind.name, inductives_.size());
    inductives_.push_back(std::move(ind));
}

void KernelEnv::define(Ident name, KernelConstant body)
{
    if (constants_.count(name))
        throw std::invalid_argument("duplicate constant '" + name + "'");
    constants_.emplace(std::move(name), std::move(body));
}

const KernelInductive* KernelEnv::find_inductive(std::string_view name) const
{
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &inductives_[it->second];
}

const KernelConstant* KernelEnv::find_constant(std::string_view name) const
{
    auto it = constants_.find(std::string(name));
    return it == constants_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class Machine {
public:
    explicit Machine(const KernelEnv& env) : env_(env) {}

    EvalResult<Term> eval(std::size_t fuel, const Term& t) const
    {
        if (fuel == 0)
            return NotEnoughFuel{};
        const std::size_t n = fuel - 1;
        return std::visit(
            [&](const auto& x) -> EvalResult<Term> {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, term::Rel>) {
                    return eval_error("free variable Rel " + std::to_string(x.index));
                } else if constexpr (std::is_same_v<T, term::Const>) {
                    const auto* c = env_.find_constant(x.name);
                    if (!c)
                        return eval_error("unknown constant '" + x.name + "'");
                    if (const auto* body = std::get_if<Term>(c))
                        return eval(n, *body);
                    if (!find_primitive(std::get<KernelBuiltin>(*c).name))
                        return eval_error("unknown primitive '" + x.name + "'");
                    return t;
                } else if constexpr (std::is_same_v<T, term::LetIn>) {
                    auto bound = eval(n, x.bound);
                    if (!bound.ok())
                        return bound;
                    const Term sub[] = {bound.value()};
                    return eval(n, parallel_subst(sub, x.body));
                } else if constexpr (std::is_same_v<T, term::App>) {
                    auto arg = eval(n, x.arg);
                    if (!arg.ok())
                        return arg;
                    auto fn = eval(n, x.fn);
                    if (!fn.ok())
                        return fn;
                    return apply(n, fn.value(), arg.value());
                } else if constexpr (std::is_same_v<T, term::Match>) {
                    return eval_match(n, x);
                } else {
                    // Lambda, Prod, Fix, Ind, Construct, SortSet, PrimLit.
                    return t;
                }
            },
            t.rep().node);
    }

private:
    EvalResult<Term> apply(std::size_t n, const Term& fn, const Term& arg) const
    {
        if (const auto* lam = fn.as<term::Lambda>()) {
            const Term sub[] = {arg};
            return eval(n, parallel_subst(sub, lam->body));
        }
        if (const auto* fix = fn.as<term::Fix>()) {
            if (!unfold_app(arg).first.as<term::Construct>())
                return eval_error("fixpoint '" + fix->hint + "' applied to a non-constructor term");
            const Term self[] = {fn};
            auto unfolded = eval(n, parallel_subst(self, fix->body));
            if (!unfolded.ok())
                return unfolded;
            return apply(n, unfolded.value(), arg);
        }
        auto [head, args] = unfold_app(fn);
        if (const auto* c = head.as<term::Construct>()) {
            const auto* ind = env_.find_inductive(c->ind);
            if (!ind || c->index >= ind->ctors.size())
                return eval_error("unknown constructor " + c->ind + "#" + std::to_string(c->index));
            if (args.size() >= ind->num_params + ind->ctors[c->index].arity)
                return eval_error("constructor " + ind->ctors[c->index].name + " applied to too many arguments");
            return Term::app(fn, arg);
        }
        if (head.as<term::Ind>())
            return Term::app(fn, arg);
        if (const auto* k = head.as<term::Const>())
            return apply_builtin(k->name, fn, std::move(args), arg);
        return eval_error("application of a non-function term");
    }

    EvalResult<Term> apply_builtin(const Ident& name, const Term& fn, std::vector<Term> args, const Term& arg) const
    {
        const auto* c = env_.find_constant(name);
        const auto* builtin = c ? std::get_if<KernelBuiltin>(c) : nullptr;
        const auto* prim = builtin ? find_primitive(builtin->name) : nullptr;
        if (!prim)
            return eval_error("application of constant '" + name + "' that is not a primitive");
        args.push_back(arg);
        if (args.size() < prim->arity())
            return Term::app(fn, arg);
        std::vector<PrimVal> lits;
        for (const auto& a : args) {
            const auto* lit = a.as<term::PrimLit>();
            if (!lit)
                return eval_error("primitive '" + name + "' applied to a non-literal");
            lits.push_back(lit->value);
        }
        auto result = apply_primitive(*prim, lits);
        if (!result)
            return eval_error("primitive '" + name + "' applied to arguments of the wrong kind");
        if (const auto* b = std::get_if<bool>(&*result))
            return boolean(*b);
        return Term::prim(std::get<PrimVal>(*result));
    }

    EvalResult<Term> boolean(bool b) const
    {
        const auto* ind = env_.find_inductive("Bool");
        const char* want = b ? "True" : "False";
        if (ind)
            for (std::size_t i = 0; i < ind->ctors.size(); ++i)
                if (ind->ctors[i].name == want)
                    return Term::construct("Bool", i);
        return eval_error("primitive comparison needs Bool with True and False");
    }

    EvalResult<Term> eval_match(std::size_t n, const term::Match& m) const
    {
        auto scrut = eval(n, m.scrut);
        if (!scrut.ok())
            return scrut;
        auto [head, args] = unfold_app(scrut.value());
        const auto* c = head.as<term::Construct>();
        if (!c)
            return eval_error("match on a non-constructor term");
        if (c->ind != m.ind)
            return eval_error("match expects " + m.ind + " but the scrutinee is a " + c->ind);
        const auto* ind = env_.find_inductive(c->ind);
        if (!ind || c->index >= ind->ctors.size())
            return eval_error("unknown constructor " + c->ind + "#" + std::to_string(c->index));
        if (m.branches.size() != ind->ctors.size())
            return eval_error("match on " + m.ind + " has the wrong number of branches");
        const auto& ctor = ind->ctors[c->index];
        const auto& branch = m.branches[c->index];
        if (args.size() < ind->num_params || args.size() - ind->num_params != ctor.arity ||
            branch.arity != ctor.arity)
            return eval_error("constructor " + ctor.name + " does not match its branch arity");
        Term body = branch.body;
        for (std::size_t i = ind->num_params; i < args.size(); ++i) {
            const auto* lam = body.as<term::Lambda>();
            if (!lam)
                return eval_error("branch for " + ctor.name + " binds fewer arguments than its arity");
            const Term sub[] = {args[i]};
            body = parallel_subst(sub, lam->body);
        }
        return eval(n, body);
    }

    const KernelEnv& env_;
};

}  // namespace

EvalResult<Term> cbv_eval(const KernelEnv& env, std::size_t fuel, const Term& t)
{
    return Machine(env).eval(fuel, t);
}

}  // namespace acorn::kernel
