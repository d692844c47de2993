#pragma once

#include <string>
#include <vector>

#include "collq/expr.hpp"
#include "collq/schema.hpp"

namespace collq {

/// Built-in example queries, each a closed function expression taking its
/// root collections as curried parameters (in the listed order).
///
///   records  — the book/author running example over root "books":
///              filter by publisher, then one output record per author.
///   equijoin — nested-loop key-equality join of roots "left" and "right",
///              pairing their payload columns.
std::vector<std::string> named_query_names();

bool is_named_query(const std::string& name);

/// Root collection names the query expects, in application order.
std::vector<std::string> named_query_roots(const std::string& name);

/// Builds the query against the given registry (which must contain the
/// schemas the query mentions). Throws SchemaError / TypingError otherwise.
ExprPtr build_named_query(const std::string& name, const SchemaRegistry& reg);

} // namespace collq
