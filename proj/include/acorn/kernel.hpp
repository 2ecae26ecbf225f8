#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acorn/prim.hpp"
#include "acorn/result.hpp"

// The target calculus: nameless terms with unary application, inductive
// types referenced by name, constructors referenced by position, and
// matches whose branches are iterated lambdas in constructor order.

namespace acorn::kernel {

using Ident = std::string;

struct TermRep;

class Term {
public:
    struct Branch;

    static Term rel(std::size_t index);
    static Term lambda(Ident hint, Term dom, Term body);
    static Term app(Term fn, Term arg);
    static Term apps(Term fn, std::span<const Term> args);
    static Term let_in(Ident hint, Term ty, Term bound, Term body);
    static Term constant(Ident name);
    static Term ind(Ident name);
    static Term construct(Ident ind, std::size_t index);
    static Term match(Ident ind, std::size_t num_params, std::vector<Term> ty_params, Term ret_ty, Term scrut,
                      std::vector<Branch> branches);
    static Term fix(Ident hint, Term fty, Term body);
    static Term prod(Ident hint, Term dom, Term cod);
    static Term sort_set();
    static Term prim(PrimVal value);

    const TermRep& rep() const { return *rep_; }
    template <class T> const T* as() const;

    // One past the largest free Rel index (0 when closed).
    std::size_t loose() const;
    std::size_t size() const;
    const void* id() const { return rep_.get(); }

    // Equality up to binder hints, which is alpha-equivalence for nameless
    // terms.
    friend bool operator==(const Term& a, const Term& b);

private:
    explicit Term(std::shared_ptr<const TermRep> rep) : rep_(std::move(rep)) {}
    static Term make(TermRep rep);
    std::shared_ptr<const TermRep> rep_;
};

struct Term::Branch {
    std::size_t arity = 0;
    Term body;

    friend bool operator==(const Branch&, const Branch&) = default;
};

namespace term {
struct Rel {
    std::size_t index = 0;
};
struct Lambda {
    Ident hint;
    Term dom;
    Term body;
};
struct App {
    Term fn;
    Term arg;
};
struct LetIn {
    Ident hint;
    Term ty;
    Term bound;
    Term body;
};
struct Const {
    Ident name;
};
struct Ind {
    Ident name;
};
struct Construct {
    Ident ind;
    std::size_t index = 0;
};
// `ret_ty` sits under one binder (the scrutinee). Branch bodies are closed
// lambdas over the constructor arguments and bind nothing themselves.
struct Match {
    Ident ind;
    std::size_t num_params = 0;
    std::vector<Term> ty_params;
    Term ret_ty;
    Term scrut;
    std::vector<Term::Branch> branches;
};
// `fty` is outside the binder; `body` sees the fixpoint itself as Rel 0.
struct Fix {
    Ident hint;
    Term fty;
    Term body;
};
struct Prod {
    Ident hint;
    Term dom;
    Term cod;
};
struct SortSet {};
struct PrimLit {
    PrimVal value;
};
}  // namespace term

struct TermRep {
    std::variant<term::Rel, term::Lambda, term::App, term::LetIn, term::Const, term::Ind, term::Construct,
                 term::Match, term::Fix, term::Prod, term::SortSet, term::PrimLit>
        node;
    std::size_t loose = 0;
    std::size_t size = 1;
};

template <class T> const T* Term::as() const { return std::get_if<T>(&rep_->node); }
inline std::size_t Term::loose() const { return rep_->loose; }
inline std::size_t Term::size() const { return rep_->size; }

std::pair<Term, std::vector<Term>> unfold_app(const Term& t);

bool closed_under(std::size_t n, const Term& t);

// Adds `n` to every Rel at or above `cutoff`.
Term lift(const Term& t, std::size_t n, std::size_t cutoff = 0);

// Rel i becomes ts[i] for i < |ts| and Rel (i - |ts|) otherwise. Substituents
// are lifted when pushed under binders, which is a no-op for closed ones.
Term parallel_subst(std::span<const Term> ts, const Term& t);

// ---------------------------------------------------------------------------
// Global environment

struct KernelCtor {
    Ident name;
    std::size_t arity = 0;
    // The j-th argument type sees, from the innermost outwards, the j
    // preceding arguments, the parameters (last one first) and the inductive
    // itself.
    std::vector<Term> arg_tys;
    // The inductive applied to its parameters, under all arguments.
    Term result_ty = Term::sort_set();

    friend bool operator==(const KernelCtor&, const KernelCtor&) = default;
};

struct KernelInductive {
    Ident name;
    std::size_t num_params = 0;
    std::vector<KernelCtor> ctors;

    friend bool operator==(const KernelInductive&, const KernelInductive&) = default;
};

struct KernelBuiltin {
    Ident name;
    friend bool operator==(const KernelBuiltin&, const KernelBuiltin&) = default;
};

using KernelConstant = std::variant<Term, KernelBuiltin>;

class KernelEnv {
public:
    void add_inductive(KernelInductive ind);
    void define(Ident name, KernelConstant body);

    const std::vector<KernelInductive>& inductives() const { return inductives_; }
    const std::map<Ident, KernelConstant>& constants() const { return constants_; }

    const KernelInductive* find_inductive(std::string_view name) const;
    const KernelConstant* find_constant(std::string_view name) const;

    friend bool operator==(const KernelEnv&, const KernelEnv&) = default;

private:
    std::vector<KernelInductive> inductives_;
    std::map<Ident, std::size_t, std::less<>> by_name_;
    std::map<Ident, KernelConstant> constants_;
};

// ---------------------------------------------------------------------------
// Evaluation

// Weak-head call-by-value evaluation of a closed term.
EvalResult<Term> cbv_eval(const KernelEnv& env, std::size_t fuel, const Term& t);

}  // namespace acorn::kernel
