#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collq/type_tag.hpp"

namespace collq {

/// Registry of record schemas: the stand-in for application-specific
/// boilerplate generation. Field order is significant; record values store
/// their fields in schema order.
///
/// Concurrency: build the registry up front, then share it immutably
/// (const references) across query sessions.
class SchemaRegistry {
public:
    struct Field {
        std::string name;
        TypeTag tag;
    };
    struct Schema {
        std::string name;
        std::vector<Field> fields;

        const Field* find_field(const std::string& fieldName) const;
        int field_index(const std::string& fieldName) const; // -1 if absent
    };

    /// Registers a schema. Field tags may reference only already-registered
    /// schemas, so recursive schemas are impossible by construction.
    /// Throws SchemaError on duplicate schema name, duplicate field name, or
    /// unknown referenced schema.
    void register_schema(const std::string& name,
                         std::vector<Field> fields);

    bool contains(const std::string& name) const;
    const Schema* find(const std::string& name) const;
    /// Like find() but throws SchemaError when absent.
    const Schema& at(const std::string& name) const;

    const std::vector<Schema>& schemas() const { return schemas_; }

private:
    void check_tag_references(const TypeTag& tag,
                              const std::string& context) const;

    std::vector<Schema> schemas_; // registration order preserved
};

} // namespace collq
