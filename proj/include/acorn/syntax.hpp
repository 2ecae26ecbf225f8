#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "acorn/prim.hpp"

// Deep embedding of the core smart-contract language. Expressions and types
// share one de Bruijn index space: a type variable ^i and a term variable #i
// both count every enclosing binder, whatever its kind.
//
// All nodes are immutable and shared; copying a handle is cheap.

namespace acorn {

using Ident = std::string;

struct TyRep;
struct ExprRep;

class Ty {
public:
    static Ty var(std::size_t index);
    static Ty named_var(Ident name);
    static Ty ind(Ident name);
    static Ty forall(Ident hint, Ty body);
    static Ty app(Ty fn, Ty arg);
    static Ty arr(Ty dom, Ty cod);

    const TyRep& rep() const { return *rep_; }
    template <class T> const T* as() const;

    // One past the largest free index (0 when closed).
    std::size_t loose() const;
    bool has_named() const;

    bool same_node(const Ty& other) const { return rep_ == other.rep_; }

    friend bool operator==(const Ty& a, const Ty& b);

private:
    explicit Ty(std::shared_ptr<const TyRep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const TyRep> rep_;
};

namespace ty {
struct Var {
    std::size_t index = 0;
    std::optional<Ident> name;  // set only in named mode
};
struct Ind {
    Ident name;
};
struct Forall {
    Ident hint;
    Ty body;
};
struct App {
    Ty fn;
    Ty arg;
};
struct Arr {
    Ty dom;
    Ty cod;
};
}  // namespace ty

struct TyRep {
    std::variant<ty::Var, ty::Ind, ty::Forall, ty::App, ty::Arr> node;
    std::size_t loose = 0;
    bool named = false;
};

template <class T> const T* Ty::as() const { return std::get_if<T>(&rep_->node); }
inline std::size_t Ty::loose() const { return rep_->loose; }
inline bool Ty::has_named() const { return rep_->named; }

struct Pat {
    Ident ctor;
    std::vector<Ident> binders;

    friend bool operator==(const Pat&, const Pat&) = default;
};

class Expr {
public:
    struct Branch;

    static Expr var(std::size_t index);
    static Expr named_var(Ident name);
    static Expr lam(Ident hint, Ty dom, Expr body);
    static Expr ty_lam(Ident hint, Expr body);
    static Expr let_in(Ident hint, Ty ty, Expr bound, Expr body);
    static Expr app(Expr fn, Expr arg);
    static Expr apps(Expr fn, std::span<const Expr> args);
    static Expr case_of(Expr scrut, Ident ind, std::vector<Ty> ty_params, Ty ret_ty, std::vector<Branch> branches);
    static Expr constr(Ident ind, Ident ctor);
    static Expr fix(Ident fix_hint, Ident arg_hint, Ty dom, Ty cod, Expr body);
    static Expr ty_expr(Ty ty);
    static Expr constant(Ident name);
    static Expr lit(PrimVal value);

    const ExprRep& rep() const { return *rep_; }
    template <class T> const T* as() const;

    // One past the largest free index over both term and type positions.
    std::size_t loose() const;
    // Same bound restricted to occurrences in type positions.
    std::size_t ty_loose() const;
    bool has_named() const;
    std::size_t size() const;

    bool same_node(const Expr& other) const { return rep_ == other.rep_; }
    const void* id() const { return rep_.get(); }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const ExprRep> rep) : rep_(std::move(rep)) {}
    static Expr make(ExprRep rep);
    std::shared_ptr<const ExprRep> rep_;
};

struct Expr::Branch {
    Pat pat;
    Expr body;

    friend bool operator==(const Branch&, const Branch&) = default;
};

namespace expr {
struct Var {
    std::size_t index = 0;
    std::optional<Ident> name;
};
struct Lam {
    Ident hint;
    Ty dom;
    Expr body;
};
struct TyLam {
    Ident hint;
    Expr body;
};
struct Let {
    Ident hint;
    Ty ty;
    Expr bound;
    Expr body;
};
struct App {
    Expr fn;
    Expr arg;
};
struct Case {
    Expr scrut;
    Ident ind;
    std::vector<Ty> ty_params;
    Ty ret_ty;
    std::vector<Expr::Branch> branches;
};
struct Constr {
    Ident ind;
    Ident ctor;
};
// Binds two variables in `body`: the recursive function (index 1) and its
// argument (index 0).
struct Fix {
    Ident fix_hint;
    Ident arg_hint;
    Ty dom;
    Ty cod;
    Expr body;
};
struct TyAsExpr {
    Ty ty;
};
struct Const {
    Ident name;
};
struct Lit {
    PrimVal value;
};
}  // namespace expr

struct ExprRep {
    std::variant<expr::Var, expr::Lam, expr::TyLam, expr::Let, expr::App, expr::Case, expr::Constr, expr::Fix,
                 expr::TyAsExpr, expr::Const, expr::Lit>
        node;
    std::size_t loose = 0;
    std::size_t ty_loose = 0;
    std::size_t size = 1;
    bool named = false;
};

template <class T> const T* Expr::as() const { return std::get_if<T>(&rep_->node); }
inline std::size_t Expr::loose() const { return rep_->loose; }
inline std::size_t Expr::ty_loose() const { return rep_->ty_loose; }
inline bool Expr::has_named() const { return rep_->named; }
inline std::size_t Expr::size() const { return rep_->size; }

// Splits `f a1 ... an` into its head and arguments.
std::pair<Expr, std::vector<Expr>> unfold_app(const Expr& e);

// ---------------------------------------------------------------------------
// Global environment

struct ConstrDecl {
    Ident name;
    // May mention the enclosing inductive's parameters as ^0..^(numParams-1),
    // ^0 being the last parameter.
    std::vector<Ty> args;

    friend bool operator==(const ConstrDecl&, const ConstrDecl&) = default;
};

struct InductiveDecl {
    Ident name;
    std::size_t num_params = 0;
    std::vector<ConstrDecl> constrs;

    friend bool operator==(const InductiveDecl&, const InductiveDecl&) = default;
};

struct Builtin {
    Ident name;
    friend bool operator==(const Builtin&, const Builtin&) = default;
};

using ConstantBody = std::variant<Expr, Builtin>;

class GlobalEnv {
public:
    // Throws std::invalid_argument on a duplicate name.
    void add_inductive(InductiveDecl decl);
    void define(Ident name, Expr body);
    void add_builtin(Ident name);
    // Registers every primitive from the builtin table.
    void add_primitives();

    const std::vector<InductiveDecl>& inductives() const { return inductives_; }
    const std::map<Ident, ConstantBody>& constants() const { return constants_; }

    const InductiveDecl* find_inductive(std::string_view name) const;
    const ConstantBody* find_constant(std::string_view name) const;

    friend bool operator==(const GlobalEnv&, const GlobalEnv&) = default;

private:
    std::vector<InductiveDecl> inductives_;
    std::map<Ident, std::size_t, std::less<>> by_name_;
    std::map<Ident, ConstantBody> constants_;
};

struct ConstrRef {
    std::size_t position = 0;
    const ConstrDecl* decl = nullptr;
    const InductiveDecl* ind = nullptr;
};

std::optional<std::span<const ConstrDecl>> resolve_inductive(const GlobalEnv& env, std::string_view ind);
std::optional<ConstrRef> resolve_constr(const GlobalEnv& env, std::string_view ind, std::string_view ctor);

bool ty_closed_under(std::size_t n, const Ty& t);
bool expr_closed_under(std::size_t n, const Expr& e);

struct WfReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
    explicit operator bool() const { return ok(); }
};

WfReport wf_global(const GlobalEnv& env);

// ---------------------------------------------------------------------------
// Names and indices

class UnboundName : public std::runtime_error {
public:
    explicit UnboundName(Ident name, const std::string& detail = {});
    const Ident& name() const { return name_; }

private:
    Ident name_;
};

enum class BinderKind { Term, Type };

struct NameEntry {
    Ident name;
    BinderKind kind = BinderKind::Term;
};

// Innermost binder last.
using NamingContext = std::vector<NameEntry>;

// Converts a named expression into the nameless form. Free names that are not
// bound locally resolve to global constants, then to constructors (which must
// be unique across the environment, or written qualified as `I.C`).
Expr indexify(const GlobalEnv& env, const NamingContext& ctx, const Expr& e);
Ty indexify(const NamingContext& ctx, const Ty& t);

// Merges separate type/term index spaces into the shared one. Indices that
// escape the expression are offset by `shift`.
Expr reindexify(std::size_t shift, const Expr& e);

// ---------------------------------------------------------------------------
// Index manipulation on the surface syntax

Ty lift(const Ty& t, std::size_t n, std::size_t cutoff = 0);
Expr lift(const Expr& e, std::size_t n, std::size_t cutoff = 0);

}  // namespace acorn
