#pragma once

#include "json.hpp"

#include "acorn/kernel.hpp"
#include "acorn/parse.hpp"
#include "acorn/syntax.hpp"

// JSON encoding of syntax trees. Every node is an object whose "tag" names the
// variant; fields use the names of the corresponding struct members.

namespace acorn {

using Json = nlohmann::json;

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const PrimVal& p);
Json to_json(const Ty& t);
Json to_json(const Expr& e);
Json to_json(const InductiveDecl& d);
Json to_json(const kernel::Term& t);
Json to_json(const kernel::KernelInductive& d);

PrimVal prim_from_json(const Json& j);
Ty ty_from_json(const Json& j);
// Variables may carry a "name" instead of an "index"; such expressions need
// `indexify` before evaluation.
Expr expr_from_json(const Json& j);
InductiveDecl inductive_from_json(const Json& j);
kernel::Term term_from_json(const Json& j);

// Only the items the module itself declares are written.
Json module_to_json(const Module& m);
// Elaborates on top of `base`. Named bodies are indexified.
Module module_from_json(const Json& j, const Module& base);

}  // namespace acorn
