#pragma once

#include <string>

#include "collq/expr.hpp"
#include "collq/schema.hpp"

namespace collq {

/// Canonical S-expression rendering of a plan, single line, single-space
/// separators, binders renumbered to consecutive ids. Deterministic:
/// parse_plan(print_plan(e)) is structurally equal to renumber_binders(e).
///
/// Grammar:
///   (const <type> <literal>) | (var <id>) | (fun <id> <type> <body>)
///   | (app <f> <a>) | (concat <l> <r>) | (add|sub|mul|div <l> <r>)
///   | (eq|ne|lt|le|gt|ge <l> <r>) | (and|or <l> <r>) | (not <e>)
///   | (tuple <e>...) | (proj <i> <t>) | (record <Name> <e>...)
///   | (field <name> <rec>) | (lit seq|set <type> <e>...)
///   | (map <coll> <fun>) | (flatmap <coll> <fun>) | (filter <coll> <fun>)
///   | (size <coll>) | (union <l> <r>) | (toseq <c>) | (toset <c>)
///   | (hashjoin <outer> <inner> <okey> <ikey> <combine>)
///
/// <literal> is the canonical JSON of the constant's value; record constants
/// render as arrays of field values in schema order.
std::string print_plan(const ExprPtr& e);

/// Same grammar, one node per line with 2-space indentation per depth.
/// Used by the CLI's explain output; the parser accepts both renderings.
std::string print_plan_pretty(const ExprPtr& e);

/// Parses plan text back into a well-typed tree. Every (var id) must be
/// bound by an enclosing (fun id ...); record schemas resolve against reg.
/// Throws ParseError or TypingError.
ExprPtr parse_plan(const std::string& text, const SchemaRegistry& reg);

} // namespace collq
