#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "acorn/kernel.hpp"
#include "acorn/syntax.hpp"

namespace acorn {

class TranslateError : public std::runtime_error {
public:
    enum class Kind { MissingInductive, MissingConstructor, MissingBranch, BranchArity };

    TranslateError(Kind kind, std::string subject, std::string detail = {});

    Kind kind() const { return kind_; }
    // The inductive, constructor or branch the error is about.
    const std::string& subject() const { return subject_; }
    // Set when the error surfaced while translating a named definition.
    const std::optional<std::string>& definition() const { return definition_; }

    TranslateError in_definition(std::string name) const;

private:
    Kind kind_;
    std::string subject_;
    std::string detail_;
    std::optional<std::string> definition_;
};

const char* to_string(TranslateError::Kind kind);

kernel::Term ty_to_term(const Ty& t);

// Throws TranslateError when a referenced inductive or constructor does not
// resolve, or a case is not exhaustive.
kernel::Term expr_to_term(const GlobalEnv& env, const Expr& e);

// The iterated lambda for constructor `c` of a case whose type parameters are
// `ty_params`.
std::pair<std::size_t, kernel::Term> branch(const GlobalEnv& env, std::span<const Ty> ty_params,
                                            std::span<const Expr::Branch> branches, const ConstrDecl& c);

kernel::KernelInductive decl_to_kernel(const InductiveDecl& d);

kernel::KernelEnv translate_env(const GlobalEnv& env);

}  // namespace acorn
