#include "acorn/pretty.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace acorn {

namespace {

const std::set<std::string_view> reserved = {"let",  "in",     "fix",  "case",   "return", "of",  "if",  "then",
                                             "else", "forall", "data", "record", "type",   "def", "test", "fun",
                                             "match", "with",  "end",  "as",     "Set"};

bool valid_ident(const std::string& s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; });
}

class Names {
public:
    explicit Names(const GlobalEnv* env) : env_(env) {}

    bool taken(const std::string& n) const
    {
        if (reserved.count(n) || std::find(ctx_.begin(), ctx_.end(), n) != ctx_.end())
            return true;
        if (!env_)
            return false;
        if (n == "Int" || n == "Nat" || env_->find_constant(n) || env_->find_inductive(n))
            return true;
        for (const auto& ind : env_->inductives())
            for (const auto& c : ind.constrs)
                if (c.name == n)
                    return true;
        return false;
    }

    std::string fresh(const std::string& hint, const char* fallback) const
    {
        std::string base = valid_ident(hint) && hint != "_" ? hint : fallback;
        if (!taken(base))
            return base;
        for (std::size_t k = 1;; ++k) {
            auto candidate = base + std::to_string(k);
            if (!taken(candidate))
                return candidate;
        }
    }

    void push(std::string n, BinderKind kind = BinderKind::Term)
    {
        ctx_.push_back(std::move(n));
        kinds_.push_back(kind);
    }
    void pop(std::size_t n = 1)
    {
        ctx_.resize(ctx_.size() - n);
        kinds_.resize(kinds_.size() - n);
    }

    // Type variables bound by a type binder print by name. Anything else
    // keeps its raw index so that reparsing restores it.
    std::string lookup_type(std::size_t index) const
    {
        if (index < ctx_.size() && kinds_[kinds_.size() - 1 - index] == BinderKind::Type)
            return ctx_[ctx_.size() - 1 - index];
        return "^" + std::to_string(index);
    }

    std::string lookup(std::size_t index) const
    {
        if (index < ctx_.size())
            return ctx_[ctx_.size() - 1 - index];
        return "#" + std::to_string(index - ctx_.size());
    }

    // Bare constructor name when it is unique and not shadowed.
    std::string constructor(const Ident& ind, const Ident& ctor) const
    {
        if (!env_ || env_->find_constant(ctor) || std::find(ctx_.begin(), ctx_.end(), ctor) != ctx_.end())
            return ind + "." + ctor;
        std::size_t owners = 0;
        for (const auto& d : env_->inductives())
            for (const auto& c : d.constrs)
                owners += c.name == ctor;
        return owners == 1 ? ctor : ind + "." + ctor;
    }

private:
    const GlobalEnv* env_;
    std::vector<std::string> ctx_;
    std::vector<BinderKind> kinds_;
};

// Precedence levels: where a subterm appears decides whether it needs
// parentheses.
enum Prec { Top = 0, Tail = 1, Fun = 2, Arg = 3 };

class SurfacePrinter {
public:
    explicit SurfacePrinter(const GlobalEnv* env) : names_(env) {}

    std::string type(const Ty& t, int prec)
    {
        return std::visit(
            [&](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ty::Var>) {
                    if (x.name)
                        return *x.name;
                    return names_.lookup_type(x.index);
                } else if constexpr (std::is_same_v<T, ty::Ind>) {
                    return x.name;
                } else if constexpr (std::is_same_v<T, ty::Forall>) {
                    auto name = names_.fresh(x.hint, "A");
                    names_.push(name, BinderKind::Type);
                    auto body = type(x.body, Top);
                    names_.pop();
                    return wrap(prec > Top, "forall " + name + ". " + body);
                } else if constexpr (std::is_same_v<T, ty::App>) {
                    return wrap(prec >= Arg, type(x.fn, Fun) + " " + type(x.arg, Arg));
                } else {
                    return wrap(prec > Top, type(x.dom, Fun) + " -> " + type(x.cod, Top));
                }
            },
            t.rep().node);
    }

    std::string expr(const Expr& e, int prec)
    {
        return std::visit(
            [&](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, expr::Var>) {
                    return x.name ? *x.name : names_.lookup(x.index);
                } else if constexpr (std::is_same_v<T, expr::Lam>) {
                    auto dom = type_in_scope(x.dom);
                    auto name = names_.fresh(x.hint, "x");
                    names_.push(name);
                    auto body = expr(x.body, inner(prec));
                    names_.pop();
                    return wrap(prec >= Fun, "\\(" + name + " : " + dom + ") -> " + body);
                } else if constexpr (std::is_same_v<T, expr::TyLam>) {
                    auto name = names_.fresh(x.hint, "A");
                    names_.push(name, BinderKind::Type);
                    auto body = expr(x.body, inner(prec));
                    names_.pop();
                    return wrap(prec >= Fun, "/\\" + name + " -> " + body);
                } else if constexpr (std::is_same_v<T, expr::Let>) {
                    auto ty = type_in_scope(x.ty);
                    auto bound = expr(x.bound, Tail);
                    auto name = names_.fresh(x.hint, "x");
                    names_.push(name);
                    auto body = expr(x.body, inner(prec));
                    names_.pop();
                    return wrap(prec >= Fun, "let " + name + " : " + ty + " = " + bound + " in " + body);
                } else if constexpr (std::is_same_v<T, expr::App>) {
                    return wrap(prec >= Arg, expr(x.fn, Fun) + " " + expr(x.arg, Arg));
                } else if constexpr (std::is_same_v<T, expr::Case>) {
                    return wrap(prec >= Tail, case_expr(x));
                } else if constexpr (std::is_same_v<T, expr::Constr>) {
                    return names_.constructor(x.ind, x.ctor);
                } else if constexpr (std::is_same_v<T, expr::Fix>) {
                    auto dom = type_in_scope(x.dom);
                    auto cod = type_in_scope(x.cod);
                    auto f = names_.fresh(x.fix_hint, "f");
                    names_.push(f);
                    auto arg = names_.fresh(x.arg_hint, "x");
                    names_.push(arg);
                    auto body = expr(x.body, inner(prec));
                    names_.pop(2);
                    return wrap(prec >= Fun, "fix " + f + " (" + arg + " : " + dom + ") : " + cod + " = " + body);
                } else if constexpr (std::is_same_v<T, expr::TyAsExpr>) {
                    return "@" + type_in_scope(x.ty, Arg);
                } else if constexpr (std::is_same_v<T, expr::Const>) {
                    return x.name;
                } else {
                    return wrap(prec >= Arg && x.value.value < 0, to_string(x.value));
                }
            },
            e.rep().node);
    }

private:
    static std::string wrap(bool parens, std::string s) { return parens ? "(" + s + ")" : s; }

    // A binder body extends to the right as far as it can, so in a branch a
    // case at its end would capture the following branches.
    static int inner(int prec) { return prec == Tail ? Tail : Top; }

    // Type variables in expressions count every binder, so the shared name
    // context already resolves them.
    std::string type_in_scope(const Ty& t, int prec = Top) { return type(t, prec); }

    std::string case_expr(const expr::Case& c)
    {
        std::string out = "case " + expr(c.scrut, Fun) + " : " + c.ind;
        for (const auto& p : c.ty_params)
            out += " " + type(p, Arg);
        out += " return " + type(c.ret_ty, Top) + " of";
        for (const auto& b : c.branches) {
            out += " | " + b.pat.ctor;
            for (const auto& binder : b.pat.binders) {
                auto name = names_.fresh(binder, "x");
                names_.push(name);
                out += " " + name;
            }
            out += " -> " + expr(b.body, Tail);
            names_.pop(b.pat.binders.size());
        }
        return out;
    }

    Names names_;
};

// ---------------------------------------------------------------------------
// Kernel terms

class KernelPrinter {
public:
    explicit KernelPrinter(const kernel::KernelEnv* env) : env_(env), names_(nullptr) {}

    std::string term(const kernel::Term& t, int prec)
    {
        namespace kt = kernel::term;
        return std::visit(
            [&](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, kt::Rel>) {
                    return names_.lookup(x.index);
                } else if constexpr (std::is_same_v<T, kt::Lambda>) {
                    auto dom = term(x.dom, Top);
                    auto name = names_.fresh(x.hint, "x");
                    names_.push(name);
                    auto body = term(x.body, Top);
                    names_.pop();
                    return wrap(prec >= Fun, "fun (" + name + " : " + dom + ") => " + body);
                } else if constexpr (std::is_same_v<T, kt::App>) {
                    return wrap(prec >= Arg, term(x.fn, Fun) + " " + term(x.arg, Arg));
                } else if constexpr (std::is_same_v<T, kt::LetIn>) {
                    auto ty = term(x.ty, Top);
                    auto bound = term(x.bound, Top);
                    auto name = names_.fresh(x.hint, "x");
                    names_.push(name);
                    auto body = term(x.body, Top);
                    names_.pop();
                    return wrap(prec >= Fun, "let " + name + " : " + ty + " := " + bound + " in " + body);
                } else if constexpr (std::is_same_v<T, kt::Const> || std::is_same_v<T, kt::Ind>) {
                    return x.name;
                } else if constexpr (std::is_same_v<T, kt::Construct>) {
                    return constructor_name(x.ind, x.index);
                } else if constexpr (std::is_same_v<T, kt::Match>) {
                    return wrap(prec >= Fun, match(x));
                } else if constexpr (std::is_same_v<T, kt::Fix>) {
                    return wrap(prec >= Fun, fix(x));
                } else if constexpr (std::is_same_v<T, kt::Prod>) {
                    auto dom = term(x.dom, Fun);
                    if (x.cod.loose() == 0 || (x.hint == "_" && !mentions_zero(x.cod))) {
                        names_.push("_");
                        auto cod = term(x.cod, Top);
                        names_.pop();
                        return wrap(prec >= Fun, dom + " -> " + cod);
                    }
                    auto name = names_.fresh(x.hint, "A");
                    names_.push(name);
                    auto cod = term(x.cod, Top);
                    names_.pop();
                    return wrap(prec >= Fun, "forall (" + name + " : " + term_at(x.dom) + "), " + cod);
                } else if constexpr (std::is_same_v<T, kt::SortSet>) {
                    return "Set";
                } else {
                    return wrap(prec >= Arg && x.value.value < 0, to_string(x.value));
                }
            },
            t.rep().node);
    }

private:
    static std::string wrap(bool parens, std::string s) { return parens ? "(" + s + ")" : s; }

    std::string term_at(const kernel::Term& t) { return term(t, Top); }

    static bool mentions_zero(const kernel::Term& t)
    {
        // Rel 0 is free in `t` exactly when lowering the binder changes it.
        return t.loose() > 0 && !(kernel::lift(kernel::parallel_subst(std::vector{kernel::Term::sort_set()}, t), 1) == t);
    }

    std::string constructor_name(const Ident& ind, std::size_t index) const
    {
        if (env_)
            if (const auto* d = env_->find_inductive(ind); d && index < d->ctors.size())
                return d->ctors[index].name;
        return ind + "#" + std::to_string(index);
    }

    std::string match(const kernel::term::Match& m)
    {
        std::string out = "match " + term(m.scrut, Top) + " as _ in " + m.ind;
        for (const auto& p : m.ty_params)
            out += " " + term(p, Arg);
        names_.push("_");
        out += " return " + term(m.ret_ty, Top) + " with";
        names_.pop();
        for (std::size_t j = 0; j < m.branches.size(); ++j) {
            const auto& b = m.branches[j];
            out += " | " + constructor_name(m.ind, j);
            kernel::Term body = b.body;
            std::size_t bound = 0;
            for (; bound < b.arity; ++bound) {
                const auto* lam = body.as<kernel::term::Lambda>();
                if (!lam)
                    break;
                auto name = names_.fresh(lam->hint, "x");
                out += " (" + name + " : " + term(lam->dom, Top) + ")";
                names_.push(name);
                body = lam->body;
            }
            out += " => " + term(body, Top);
            names_.pop(bound);
        }
        return out + " end";
    }

    std::string fix(const kernel::term::Fix& f)
    {
        auto self = names_.fresh(f.hint, "rec");
        const auto* lam = f.body.as<kernel::term::Lambda>();
        const auto* prod = f.fty.as<kernel::term::Prod>();
        if (!lam || !prod) {
            auto fty = term(f.fty, Top);
            names_.push(self);
            auto body = term(f.body, Top);
            names_.pop();
            return "fix " + self + " : " + fty + " := " + body;
        }
        names_.push(self);
        auto arg = names_.fresh(lam->hint, "x");
        auto dom = term(lam->dom, Top);
        names_.push(arg);
        auto body = term(lam->body, Top);
        names_.pop(2);
        // The codomain sits under the argument binder only.
        names_.push(arg);
        auto cod = term(prod->cod, Top);
        names_.pop();
        return "fix " + self + " (" + arg + " : " + dom + ") : " + cod + " := " + body;
    }

    const kernel::KernelEnv* env_;
    Names names_;
};

}  // namespace

std::string print(const Ty& t, const GlobalEnv* env)
{
    return SurfacePrinter(env).type(t, Top);
}

std::string print(const Expr& e, const GlobalEnv* env)
{
    return SurfacePrinter(env).expr(e, Top);
}

std::string print(const Val& v, const GlobalEnv* env)
{
    auto e = interp::from_val(v);
    return e ? print(*e, env) : "<ill-formed value>";
}

std::string print(const kernel::Term& t, const kernel::KernelEnv* env)
{
    return KernelPrinter(env).term(t, Top);
}

std::string print(const kernel::KernelInductive& d)
{
    // Raw indices: every Rel shows its number.
    auto raw = [](const kernel::Term& t) {
        std::function<std::string(const kernel::Term&, int)> go = [&](const kernel::Term& x, int prec) -> std::string {
            if (const auto* r = x.as<kernel::term::Rel>())
                return "#" + std::to_string(r->index);
            if (const auto* a = x.as<kernel::term::App>()) {
                auto s = go(a->fn, Fun) + " " + go(a->arg, Arg);
                return prec >= Arg ? "(" + s + ")" : s;
            }
            if (const auto* p = x.as<kernel::term::Prod>()) {
                auto s = "forall (_ : " + go(p->dom, Top) + "), " + go(p->cod, Top);
                return prec > Top ? "(" + s + ")" : s;
            }
            return KernelPrinter(nullptr).term(x, prec);
        };
        return go(t, Top);
    };
    std::string out = "Inductive " + d.name;
    if (d.num_params > 0) {
        out += " (";
        for (std::size_t i = 0; i < d.num_params; ++i)
            out += (i ? " A" : "A") + std::to_string(i + 1);
        out += " : Set)";
    }
    out += " : Set :=";
    for (const auto& c : d.ctors) {
        out += "\n  | " + c.name + " : ";
        if (!c.arg_tys.empty()) {
            out += "forall";
            for (const auto& a : c.arg_tys)
                out += " (_ : " + raw(a) + ")";
            out += ", ";
        }
        out += raw(c.result_ty);
    }
    return out + ".";
}

}  // namespace acorn
