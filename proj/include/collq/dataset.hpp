#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "collq/schema.hpp"
#include "collq/value.hpp"

namespace collq {

/// A root collection declared by a dataset descriptor.
struct RootDecl {
    std::string name;
    CollKind kind;
    TypeTag elemTag;

    TypeTag coll_tag() const { return TypeTag::coll(kind, elemTag); }
};

struct Dataset {
    SchemaRegistry registry;
    std::vector<RootDecl> roots;
    std::map<std::string, Value> collections;
};

/// Parses a descriptor document:
///   {"schemas":[{"name":..., "fields":[{"name":...,"type":...}]}],
///    "roots":[{"name":..., "kind":"seq"|"set", "element":...}]}
/// Type names: int, bool, string, double, tuple<...>, record<Name>,
/// seq<...>, set<...>. Schemas may reference only earlier schemas.
std::pair<SchemaRegistry, std::vector<RootDecl>>
load_descriptor(const std::string& text);

/// Parses a data document ({"rootName": [record, ...], ...}) against a
/// loaded descriptor. Set roots deduplicate silently; roots absent from the
/// document load as empty. Unknown collections or fields, missing fields,
/// and scalar mismatches are errors.
std::map<std::string, Value> load_data(const SchemaRegistry& reg,
                                       const std::vector<RootDecl>& roots,
                                       const std::string& text);

/// Converts a JSON datum to a Value of the given tag (records are objects
/// keyed by field name). Throws DataError / ValueTagMismatch.
Value json_to_value(const nlohmann::json& j, const TypeTag& tag,
                    const SchemaRegistry& reg);

/// Serializes a Value as JSON: records as objects, sequences as arrays,
/// sets as sorted arrays (their canonical order), tuples as arrays.
nlohmann::json value_to_json(const Value& v, const SchemaRegistry& reg);

/// Two n-row tables ("left", "right" of schemas LeftRow/RightRow with int
/// key and string payload) whose key columns are permutations of 0..n-1, so
/// each outer row matches exactly one inner row. Deterministic in seed.
Dataset gen_join_benchmark(int n, std::uint64_t seed);

} // namespace collq
