#include "collq/schema.hpp"

#include <unordered_set>

#include "collq/error.hpp"

namespace collq {

const SchemaRegistry::Field*
SchemaRegistry::Schema::find_field(const std::string& fieldName) const {
    for (const auto& f : fields)
        if (f.name == fieldName) return &f;
    return nullptr;
}

int SchemaRegistry::Schema::field_index(const std::string& fieldName) const {
    for (size_t i = 0; i < fields.size(); ++i)
        if (fields[i].name == fieldName) return static_cast<int>(i);
    return -1;
}

void SchemaRegistry::register_schema(const std::string& name,
                                     std::vector<Field> fields) {
    if (contains(name))
        throw SchemaError("duplicate schema '" + name + "'");
    std::unordered_set<std::string> seen;
    for (const auto& f : fields) {
        if (!seen.insert(f.name).second)
            throw SchemaError("duplicate field '" + f.name + "' in schema '" +
                              name + "'");
        check_tag_references(f.tag, name + "." + f.name);
    }
    schemas_.push_back(Schema{name, std::move(fields)});
}

bool SchemaRegistry::contains(const std::string& name) const {
    return find(name) != nullptr;
}

const SchemaRegistry::Schema* SchemaRegistry::find(const std::string& name) const {
    for (const auto& s : schemas_)
        if (s.name == name) return &s;
    return nullptr;
}

const SchemaRegistry::Schema& SchemaRegistry::at(const std::string& name) const {
    if (const Schema* s = find(name)) return *s;
    throw SchemaError("unknown referenced schema '" + name + "'");
}

void SchemaRegistry::check_tag_references(const TypeTag& tag,
                                          const std::string& context) const {
    switch (tag.kind()) {
    case TypeTag::Kind::Record:
        if (!contains(tag.schema_name()))
            throw SchemaError("unknown referenced schema '" + tag.schema_name() +
                              "' in " + context);
        return;
    case TypeTag::Kind::Tuple:
        for (const auto& t : tag.tuple_elems()) check_tag_references(t, context);
        return;
    case TypeTag::Kind::Fun:
        check_tag_references(tag.fun_arg(), context);
        check_tag_references(tag.fun_res(), context);
        return;
    case TypeTag::Kind::Coll:
        check_tag_references(tag.elem(), context);
        return;
    default:
        return;
    }
}

} // namespace collq
