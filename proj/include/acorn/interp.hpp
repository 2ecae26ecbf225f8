#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "acorn/result.hpp"
#include "acorn/syntax.hpp"

namespace acorn {

struct ValRep;

class Val {
public:
    Val() = delete;
    explicit Val(std::shared_ptr<const ValRep> rep) : rep_(std::move(rep)) {}

    const ValRep& rep() const { return *rep_; }
    template <class T> const T* as() const;
    const void* id() const { return rep_.get(); }

    friend bool operator==(const Val& a, const Val& b);

private:
    std::shared_ptr<const ValRep> rep_;
};

// Evaluation environment: a persistent stack, index 0 is the most recent
// binding.
class Env {
public:
    Env() = default;

    Env push(Val v) const;
    const Val& operator[](std::size_t i) const;
    // Preconditions: !empty().
    const Val& front() const { return head_->head; }
    Env pop() const;
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    // Element 0 is the most recent binding.
    std::vector<Val> to_vector() const;
    const void* id() const { return head_.get(); }

    static Env from_vector(std::span<const Val> innermost_first);

    friend bool operator==(const Env& a, const Env& b);

private:
    struct Cell {
        Val head;
        std::shared_ptr<const Cell> tail;
    };
    std::shared_ptr<const Cell> head_;
    std::size_t size_ = 0;
};

namespace val {
// Arguments of a parameterised inductive start with one VTy per parameter.
struct Constr {
    Ident ind;
    Ident ctor;
    std::vector<Val> args;
};
struct ClosLam {
    Env env;
    Ident hint;
    Ty dom;
    Expr body;
};
struct ClosFix {
    Env env;
    Ident fix_hint;
    Ident arg_hint;
    Ty dom;
    Ty cod;
    Expr body;
};
struct TyClos {
    Env env;
    Ident hint;
    Expr body;
};
struct Type {
    Ty ty;
};
struct Prim {
    PrimVal value;
};
// A builtin constant applied to fewer arguments than its arity.
struct Builtin {
    Ident name;
    std::vector<Val> args;
};
}  // namespace val

struct ValRep {
    std::variant<val::Constr, val::ClosLam, val::ClosFix, val::TyClos, val::Type, val::Prim, val::Builtin> node;
};

template <class T> const T* Val::as() const { return std::get_if<T>(&rep_->node); }

Val make_constr(Ident ind, Ident ctor, std::vector<Val> args = {});
Val make_prim(PrimVal p);
Val make_type(Ty t);
Val make_bool(bool b);

namespace interp {

// Observation hook: called on entry to every evaluation step with fuel left.
struct Hooks {
    std::function<void(const Env&, const Expr&)> on_eval;
};

EvalResult<Val> eval(const GlobalEnv& env, std::size_t fuel, const Env& rho, const Expr& e,
                     const Hooks* hooks = nullptr);

// Applies an already-evaluated function value to an argument value, exactly
// as the application case of `eval` does after both sides are evaluated.
EvalResult<Val> apply(const GlobalEnv& env, std::size_t fuel, const Val& fn, const Val& arg,
                      const Hooks* hooks = nullptr);
EvalResult<Val> apply(const GlobalEnv& env, std::size_t fuel, const Val& fn, std::span<const Val> args,
                      const Hooks* hooks = nullptr);

// Replaces type variables by the types stored in `rho`. nullopt when a
// variable hits a non-type value or runs past the environment.
std::optional<Ty> eval_type(const Env& rho, const Ty& t);

// Selects the branch for constructor `ctor` applied to `args` (which include
// the leading `num_params` type arguments).
std::optional<Expr> match_pat(const Ident& ctor, std::size_t num_params, std::span<const Ty> arg_tys,
                              std::span<const Val> args, std::span<const Expr::Branch> branches);

// `e` is closed under |rho| + extra, and every type position that reaches
// into `rho` finds a type value.
bool validate(const Env& rho, std::size_t extra, const Expr& e);
bool validate_branches(const Env& rho, std::span<const Expr::Branch> branches);

// Value well-formedness: closures are closed over their environments, their
// environments are well-formed for the body, captured types are closed, and
// constructors resolve.
bool wf_val(const GlobalEnv& env, const Val& v);

// Parallel substitution of an environment of closed expressions.
std::optional<Expr> subst_env_expr(std::span<const Expr> rho, const Expr& e);
std::optional<Ty> subst_env_ty(std::span<const Expr> rho, const Ty& t);

// Reads a value back as an expression. nullopt only for ill-formed values.
std::optional<Expr> from_val(const Val& v);

}  // namespace interp
}  // namespace acorn
