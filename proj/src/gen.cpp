#include <random>

#include "acorn/soundness.hpp"

namespace acorn::soundness {

namespace {

// Types the generator knows how to inhabit.
struct GTy {
    enum Kind { Int, Nat, Bool, Peano, List, Maybe, Prod, Map, Fun } kind = Int;
    std::vector<GTy> args;

    friend bool operator==(const GTy&, const GTy&) = default;
};

GTy simple(GTy::Kind k)
{
    return GTy{k, {}};
}

GTy of(GTy::Kind k, std::vector<GTy> args)
{
    return GTy{k, std::move(args)};
}

Ty to_ty(const GTy& t)
{
    switch (t.kind) {
    case GTy::Int:
        return Ty::ind("Int");
    case GTy::Nat:
        return Ty::ind("Nat");
    case GTy::Bool:
        return Ty::ind("Bool");
    case GTy::Peano:
        return Ty::ind("Peano");
    case GTy::List:
        return Ty::app(Ty::ind("List"), to_ty(t.args[0]));
    case GTy::Maybe:
        return Ty::app(Ty::ind("Maybe"), to_ty(t.args[0]));
    case GTy::Prod:
        return Ty::app(Ty::app(Ty::ind("Prod"), to_ty(t.args[0])), to_ty(t.args[1]));
    case GTy::Map:
        return Ty::app(Ty::app(Ty::ind("AcornMap"), Ty::ind("Nat")), Ty::ind("Int"));
    case GTy::Fun:
        return Ty::arr(to_ty(t.args[0]), to_ty(t.args[1]));
    }
    return Ty::ind("Int");
}

// Inductive name and type parameters of a data type.
std::pair<Ident, std::vector<Ty>> head_of(const GTy& t)
{
    switch (t.kind) {
    case GTy::Bool:
        return {"Bool", {}};
    case GTy::Peano:
        return {"Peano", {}};
    case GTy::List:
        return {"List", {to_ty(t.args[0])}};
    case GTy::Maybe:
        return {"Maybe", {to_ty(t.args[0])}};
    case GTy::Prod:
        return {"Prod", {to_ty(t.args[0]), to_ty(t.args[1])}};
    default:
        return {"AcornMap", {Ty::ind("Nat"), Ty::ind("Int")}};
    }
}

// Constructors with their field types.
std::vector<std::pair<Ident, std::vector<GTy>>> constructors(const GTy& t)
{
    switch (t.kind) {
    case GTy::Bool:
        return {{"True", {}}, {"False", {}}};
    case GTy::Peano:
        return {{"Zero", {}}, {"Succ", {t}}};
    case GTy::List:
        return {{"Nil", {}}, {"Cons", {t.args[0], t}}};
    case GTy::Maybe:
        return {{"Nothing", {}}, {"Just", {t.args[0]}}};
    case GTy::Prod:
        return {{"Pair", {t.args[0], t.args[1]}}};
    default:
        return {{"MNil", {}}, {"MCons", {simple(GTy::Nat), simple(GTy::Int), t}}};
    }
}

Expr call(const Ident& name, std::vector<Expr> args)
{
    return Expr::apps(Expr::constant(name), args);
}

Expr tyarg(const GTy& t)
{
    return Expr::ty_expr(to_ty(t));
}

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    Expr program(std::size_t size)
    {
        // Mostly first-order results; now and then a closure to exercise
        // read-back of environments.
        GTy t = chance(10) ? of(GTy::Fun, {simple(GTy::Int), simple(GTy::Int)}) : data_type(1);
        return gen(t, size);
    }

private:
    struct Local {
        GTy type;
        Expr use;
    };

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool chance(std::size_t one_in) { return below(one_in) == 0; }
    std::string fresh(const char* prefix) { return prefix + std::to_string(next_++); }

    GTy base_type()
    {
        static const GTy::Kind kinds[] = {GTy::Int, GTy::Nat, GTy::Bool, GTy::Peano};
        return simple(kinds[below(4)]);
    }

    GTy data_type(int depth)
    {
        if (depth <= 0 || chance(2))
            return base_type();
        switch (below(4)) {
        case 0:
            return of(GTy::List, {data_type(depth - 1)});
        case 1:
            return of(GTy::Maybe, {data_type(depth - 1)});
        case 2:
            return of(GTy::Prod, {data_type(depth - 1), data_type(depth - 1)});
        default:
            return simple(GTy::Map);
        }
    }

    GTy inductive_type()
    {
        switch (below(6)) {
        case 0:
            return simple(GTy::Bool);
        case 1:
            return simple(GTy::Peano);
        case 2:
            return of(GTy::List, {base_type()});
        case 3:
            return of(GTy::Maybe, {base_type()});
        case 4:
            return of(GTy::Prod, {base_type(), base_type()});
        default:
            return simple(GTy::Map);
        }
    }

    Expr gen(const GTy& t, std::size_t size)
    {
        if (size == 0)
            return leaf(t);
        const std::size_t rest = size - 1;
        switch (below(10)) {
        case 0:
            return leaf(t);
        case 1: {
            GTy s = data_type(1);
            auto x = fresh("x");
            Expr bound = gen(s, rest / 2);
            ctx_.push_back({s, Expr::named_var(x)});
            Expr body = gen(t, rest - rest / 2);
            ctx_.pop_back();
            return Expr::let_in(x, to_ty(s), bound, body);
        }
        case 2: {
            GTy s = data_type(1);
            auto x = fresh("x");
            Expr arg = gen(s, rest / 2);
            ctx_.push_back({s, Expr::named_var(x)});
            Expr body = gen(t, rest - rest / 2);
            ctx_.pop_back();
            return Expr::app(Expr::lam(x, to_ty(s), body), arg);
        }
        case 3:
        case 4:
            return construct(t, rest);
        case 5:
        case 6:
            return operation(t, rest);
        case 7:
            return case_on(t, rest);
        case 8:
            return fixpoint(t, rest);
        default:
            return polymorphic(t, rest);
        }
    }

    Expr leaf(const GTy& t)
    {
        std::vector<const Local*> vars;
        for (const auto& l : ctx_)
            if (l.type == t)
                vars.push_back(&l);
        if (!vars.empty() && !chance(3))
            return vars[below(vars.size())]->use;
        switch (t.kind) {
        case GTy::Int:
            return Expr::lit(PrimVal::integer(static_cast<long>(below(41)) - 20));
        case GTy::Nat:
            return Expr::lit(PrimVal::natural(below(21)));
        case GTy::Bool:
            return Expr::constr("Bool", chance(2) ? "True" : "False");
        case GTy::Peano:
            return Expr::constr("Peano", "Zero");
        case GTy::List:
            return Expr::app(Expr::constr("List", "Nil"), tyarg(t.args[0]));
        case GTy::Maybe:
            return Expr::app(Expr::constr("Maybe", "Nothing"), tyarg(t.args[0]));
        case GTy::Prod: {
            const Expr args[] = {tyarg(t.args[0]), tyarg(t.args[1]), leaf(t.args[0]), leaf(t.args[1])};
            return Expr::apps(Expr::constr("Prod", "Pair"), args);
        }
        case GTy::Map: {
            const Expr args[] = {tyarg(simple(GTy::Nat)), tyarg(simple(GTy::Int))};
            return Expr::apps(Expr::constr("AcornMap", "MNil"), args);
        }
        case GTy::Fun: {
            auto x = fresh("x");
            ctx_.push_back({t.args[0], Expr::named_var(x)});
            Expr body = leaf(t.args[1]);
            ctx_.pop_back();
            return Expr::lam(x, to_ty(t.args[0]), body);
        }
        }
        return Expr::lit(PrimVal::integer(0));
    }

    // Splits `size` between `n` children.
    std::vector<std::size_t> split(std::size_t size, std::size_t n)
    {
        std::vector<std::size_t> parts(n, 0);
        for (std::size_t k = 0; k < size; ++k)
            ++parts[below(n)];
        return parts;
    }

    Expr construct(const GTy& t, std::size_t size)
    {
        if (t.kind == GTy::Int || t.kind == GTy::Nat)
            return leaf(t);
        if (t.kind == GTy::Fun) {
            auto x = fresh("x");
            ctx_.push_back({t.args[0], Expr::named_var(x)});
            Expr body = gen(t.args[1], size);
            ctx_.pop_back();
            return Expr::lam(x, to_ty(t.args[0]), body);
        }
        auto ctors = constructors(t);
        const auto& [name, fields] = ctors[below(ctors.size())];
        auto [ind, params] = head_of(t);
        std::vector<Expr> args;
        for (const auto& p : params)
            args.push_back(Expr::ty_expr(p));
        auto sizes = split(size, std::max<std::size_t>(fields.size(), 1));
        for (std::size_t k = 0; k < fields.size(); ++k)
            args.push_back(gen(fields[k], sizes[k]));
        return Expr::apps(Expr::constr(ind, name), args);
    }

    Expr binary(const Ident& op, const GTy& a, const GTy& b, std::size_t size)
    {
        auto s = split(size, 2);
        return call(op, {gen(a, s[0]), gen(b, s[1])});
    }

    Expr operation(const GTy& t, std::size_t size)
    {
        const GTy int_t = simple(GTy::Int), nat_t = simple(GTy::Nat), bool_t = simple(GTy::Bool);
        switch (t.kind) {
        case GTy::Int:
            switch (below(5)) {
            case 0: {
                static const char* ops[] = {"plusInt", "minusInt", "timesInt", "maxInt", "minInt"};
                return binary(ops[below(5)], int_t, int_t, size);
            }
            case 1:
                return call("intOfNat", {gen(nat_t, size)});
            case 2:
                return call("sum_map", {gen(simple(GTy::Map), size)});
            default:
                return fold(t, size);
            }
        case GTy::Nat:
            switch (below(3)) {
            case 0:
                return binary(chance(2) ? "addNat" : "mulNat", nat_t, nat_t, size);
            case 1: {
                GTy e = base_type();
                return call("length", {tyarg(e), gen(of(GTy::List, {e}), size)});
            }
            default:
                return fold(t, size);
            }
        case GTy::Bool:
            switch (below(4)) {
            case 0: {
                static const char* ops[] = {"leInt", "ltInt", "eqInt"};
                return binary(ops[below(3)], int_t, int_t, size);
            }
            case 1: {
                static const char* ops[] = {"lebNat", "ltbNat", "eqbNat"};
                return binary(ops[below(3)], nat_t, nat_t, size);
            }
            case 2:
                return binary(chance(2) ? "andb" : "orb", bool_t, bool_t, size);
            default:
                return call("negb", {gen(bool_t, size)});
            }
        case GTy::List: {
            const GTy& e = t.args[0];
            if (chance(2)) {
                auto s = split(size, 2);
                return call("concat", {tyarg(e), gen(t, s[0]), gen(t, s[1])});
            }
            GTy from = base_type();
            auto s = split(size, 2);
            auto x = fresh("x");
            ctx_.push_back({from, Expr::named_var(x)});
            Expr body = gen(e, s[0]);
            ctx_.pop_back();
            return call("map", {tyarg(from), tyarg(e), Expr::lam(x, to_ty(from), body), gen(of(GTy::List, {from}), s[1])});
        }
        case GTy::Maybe:
            if (t.args[0] == int_t)
                return binary("mfind", simple(GTy::Map), nat_t, size);
            return construct(t, size);
        case GTy::Map:
            if (chance(2)) {
                auto s = split(size, 3);
                return call("madd", {gen(nat_t, s[0]), gen(int_t, s[1]), gen(t, s[2])});
            }
            return binary("mremove", nat_t, t, size);
        default:
            return construct(t, size);
        }
    }

    // foldr @e @t (\x acc -> ..) init xs
    Expr fold(const GTy& t, std::size_t size)
    {
        GTy e = base_type();
        auto s = split(size, 3);
        auto x = fresh("x");
        auto acc = fresh("acc");
        ctx_.push_back({e, Expr::named_var(x)});
        ctx_.push_back({t, Expr::named_var(acc)});
        Expr body = gen(t, s[0]);
        ctx_.pop_back();
        ctx_.pop_back();
        Expr f = Expr::lam(x, to_ty(e), Expr::lam(acc, to_ty(t), body));
        return call("foldr", {tyarg(e), tyarg(t), f, gen(t, s[1]), gen(of(GTy::List, {e}), s[2])});
    }

    Expr case_on(const GTy& t, std::size_t size)
    {
        GTy s = inductive_type();
        auto ctors = constructors(s);
        auto sizes = split(size, ctors.size() + 1);
        Expr scrut = gen(s, sizes[0]);
        std::vector<Expr::Branch> branches;
        for (std::size_t k = 0; k < ctors.size(); ++k) {
            const auto& [name, fields] = ctors[k];
            Pat pat{name, {}};
            for (const auto& f : fields) {
                auto v = fresh("y");
                pat.binders.push_back(v);
                ctx_.push_back({f, Expr::named_var(v)});
            }
            Expr body = gen(t, sizes[k + 1]);
            ctx_.erase(ctx_.end() - static_cast<std::ptrdiff_t>(fields.size()), ctx_.end());
            branches.push_back({std::move(pat), std::move(body)});
        }
        auto [ind, params] = head_of(s);
        return Expr::case_of(scrut, ind, params, to_ty(t), std::move(branches));
    }

    // A structural fixpoint that cases on its argument; the recursive call on
    // the immediate subterm is available as a leaf of the result type.
    Expr fixpoint(const GTy& t, std::size_t size)
    {
        GTy dom = chance(3) ? simple(GTy::Peano) : of(GTy::List, {base_type()});
        auto f = fresh("f");
        auto xs = fresh("xs");
        auto sizes = split(size, 3);
        auto ctors = constructors(dom);
        std::vector<Expr::Branch> branches;
        for (std::size_t k = 0; k < ctors.size(); ++k) {
            const auto& [name, fields] = ctors[k];
            Pat pat{name, {}};
            std::size_t pushed = 0;
            for (const auto& fld : fields) {
                auto v = fresh("y");
                pat.binders.push_back(v);
                ctx_.push_back({fld, Expr::named_var(v)});
                ++pushed;
                if (fld == dom) {
                    ctx_.push_back({t, Expr::app(Expr::named_var(f), Expr::named_var(v))});
                    ++pushed;
                }
            }
            Expr body = gen(t, sizes[k]);
            ctx_.erase(ctx_.end() - static_cast<std::ptrdiff_t>(pushed), ctx_.end());
            branches.push_back({std::move(pat), std::move(body)});
        }
        auto [ind, params] = head_of(dom);
        Expr body = Expr::case_of(Expr::named_var(xs), ind, params, to_ty(t), std::move(branches));
        Expr fn = Expr::fix(f, xs, to_ty(dom), to_ty(t), body);
        return Expr::app(fn, gen(dom, sizes[2]));
    }

    // (/\A -> \(g : A -> t) (x : A) -> g x) @s (\z -> ..) arg
    Expr polymorphic(const GTy& t, std::size_t size)
    {
        GTy s = data_type(1);
        auto a = fresh("A");
        auto g = fresh("g");
        auto x = fresh("x");
        auto z = fresh("z");
        auto sizes = split(size, 2);
        Ty avar = Ty::named_var(a);
        Expr poly = Expr::ty_lam(
            a, Expr::lam(g, Ty::arr(avar, to_ty(t)),
                         Expr::lam(x, avar, Expr::app(Expr::named_var(g), Expr::named_var(x)))));
        ctx_.push_back({s, Expr::named_var(z)});
        Expr body = gen(t, sizes[0]);
        ctx_.pop_back();
        const Expr args[] = {tyarg(s), Expr::lam(z, to_ty(s), body), gen(s, sizes[1])};
        return Expr::apps(poly, args);
    }

    std::mt19937_64 rng_;
    std::vector<Local> ctx_;
    std::size_t next_ = 0;
};

}  // namespace

Expr gen_expr(std::uint64_t seed, std::size_t size, const GlobalEnv& env)
{
    Generator g(seed);
    return indexify(env, NamingContext{}, g.program(size));
}

}  // namespace acorn::soundness
