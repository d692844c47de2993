#include "collq/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "collq/error.hpp"

namespace collq {

using nlohmann::json;

namespace {

int line_of_offset(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

json parse_json_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(line_of_offset(text, e.byte), e.what());
    }
}

const json& require_member(const json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string(what) + " is missing \"" + key + "\"");
    return *it;
}

} // namespace

std::pair<SchemaRegistry, std::vector<RootDecl>>
load_descriptor(const std::string& text) {
    json doc = parse_json_document(text);
    if (!doc.is_object()) throw ParseError("descriptor must be a JSON object");

    SchemaRegistry reg;
    const json& schemas = require_member(doc, "schemas", "descriptor");
    if (!schemas.is_array()) throw ParseError("\"schemas\" must be an array");
    for (const json& s : schemas) {
        std::string name = require_member(s, "name", "schema").get<std::string>();
        const json& fields = require_member(s, "fields", "schema");
        if (!fields.is_array())
            throw ParseError("schema \"" + name + "\" fields must be an array");
        std::vector<SchemaRegistry::Field> parsed;
        for (const json& f : fields) {
            std::string fieldName =
                require_member(f, "name", "field").get<std::string>();
            std::string typeName =
                require_member(f, "type", "field").get<std::string>();
            // Parsing against the registry-so-far rejects forward references.
            parsed.push_back(SchemaRegistry::Field{
                fieldName, TypeTag::parse(typeName, &reg, /*allowFun=*/false)});
        }
        reg.register_schema(name, std::move(parsed));
    }

    std::vector<RootDecl> roots;
    const json& rootsJson = require_member(doc, "roots", "descriptor");
    if (!rootsJson.is_array()) throw ParseError("\"roots\" must be an array");
    for (const json& r : rootsJson) {
        std::string name = require_member(r, "name", "root").get<std::string>();
        std::string kind = require_member(r, "kind", "root").get<std::string>();
        if (kind != "seq" && kind != "set")
            throw ParseError("root \"" + name + "\" kind must be \"seq\" or \"set\"");
        std::string elem = require_member(r, "element", "root").get<std::string>();
        roots.push_back(RootDecl{
            name, kind == "seq" ? CollKind::Seq : CollKind::Set,
            TypeTag::parse(elem, &reg, /*allowFun=*/false)});
    }
    return {std::move(reg), std::move(roots)};
}

Value json_to_value(const json& j, const TypeTag& tag, const SchemaRegistry& reg) {
    switch (tag.kind()) {
    case TypeTag::Kind::Int:
        if (!j.is_number_integer())
            throw ValueTagMismatch("expected an integer, got " + j.dump());
        return Value::int_(j.get<std::int64_t>());
    case TypeTag::Kind::Bool:
        if (!j.is_boolean())
            throw ValueTagMismatch("expected a boolean, got " + j.dump());
        return Value::bool_(j.get<bool>());
    case TypeTag::Kind::String:
        if (!j.is_string())
            throw ValueTagMismatch("expected a string, got " + j.dump());
        return Value::string_(j.get<std::string>());
    case TypeTag::Kind::Double:
        if (!j.is_number())
            throw ValueTagMismatch("expected a number, got " + j.dump());
        return Value::double_(j.get<double>());
    case TypeTag::Kind::Tuple: {
        const auto& ts = tag.tuple_elems();
        if (!j.is_array() || j.size() != ts.size())
            throw ValueTagMismatch("expected an array of arity " +
                                   std::to_string(ts.size()) + " for " + tag.str());
        std::vector<Value> elems;
        for (size_t i = 0; i < ts.size(); ++i)
            elems.push_back(json_to_value(j[i], ts[i], reg));
        return Value::tuple(std::move(elems));
    }
    case TypeTag::Kind::Record: {
        const auto& schema = reg.at(tag.schema_name());
        if (!j.is_object())
            throw ValueTagMismatch("expected an object for " + tag.str() + ", got " +
                                   j.dump());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!schema.find_field(it.key()))
                throw DataError("unknown field \"" + it.key() + "\" for schema " +
                                schema.name);
        std::vector<Value> fields;
        for (const auto& f : schema.fields) {
            auto it = j.find(f.name);
            if (it == j.end())
                throw DataError("missing field \"" + f.name + "\" for schema " +
                                schema.name);
            fields.push_back(json_to_value(*it, f.tag, reg));
        }
        return Value::record(schema.name, std::move(fields));
    }
    case TypeTag::Kind::Coll: {
        if (!j.is_array())
            throw ValueTagMismatch("expected an array for " + tag.str());
        std::vector<Value> elems;
        for (const auto& x : j) elems.push_back(json_to_value(x, tag.elem(), reg));
        return tag.coll_kind() == CollKind::Seq ? Value::seq(std::move(elems))
                                                : Value::set(std::move(elems));
    }
    case TypeTag::Kind::Fun:
        throw ValueTagMismatch("function values cannot be loaded from data");
    }
    throw ValueTagMismatch("unhandled tag " + tag.str());
}

std::map<std::string, Value> load_data(const SchemaRegistry& reg,
                                       const std::vector<RootDecl>& roots,
                                       const std::string& text) {
    json doc = parse_json_document(text);
    if (!doc.is_object()) throw ParseError("data document must be a JSON object");

    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool declared = std::any_of(roots.begin(), roots.end(),
                                    [&](const RootDecl& r) { return r.name == it.key(); });
        if (!declared)
            throw DataError("unknown collection \"" + it.key() + "\"");
    }

    std::map<std::string, Value> out;
    for (const RootDecl& root : roots) {
        auto it = doc.find(root.name);
        if (it == doc.end()) {
            out.emplace(root.name, root.kind == CollKind::Seq
                                       ? Value::seq({})
                                       : Value::set({}));
            continue;
        }
        out.emplace(root.name, json_to_value(*it, root.coll_tag(), reg));
    }
    return out;
}

json value_to_json(const Value& v, const SchemaRegistry& reg) {
    switch (v.kind()) {
    case Value::Kind::Int: return json(v.as_int());
    case Value::Kind::Bool: return json(v.as_bool());
    case Value::Kind::String: return json(v.as_string());
    case Value::Kind::Double: return json(v.as_double());
    case Value::Kind::Tuple: {
        json a = json::array();
        for (const auto& e : v.tuple_elems()) a.push_back(value_to_json(e, reg));
        return a;
    }
    case Value::Kind::Record: {
        const auto& rec = v.record_data();
        const auto& schema = reg.at(rec.schemaName);
        json o = json::object();
        for (size_t i = 0; i < rec.fields.size(); ++i)
            o[schema.fields[i].name] = value_to_json(rec.fields[i], reg);
        return o;
    }
    case Value::Kind::Seq:
    case Value::Kind::Set: {
        json a = json::array();
        for (const auto& e : v.elems()) a.push_back(value_to_json(e, reg));
        return a;
    }
    case Value::Kind::Closure:
        throw EvalError("function values are not serializable");
    }
    return json();
}

Dataset gen_join_benchmark(int n, std::uint64_t seed) {
    if (n < 1) throw DataError("join benchmark needs n >= 1");
    Dataset ds;
    ds.registry.register_schema(
        "LeftRow", {{"key", TypeTag::int_()}, {"payload", TypeTag::string_()}});
    ds.registry.register_schema(
        "RightRow", {{"key", TypeTag::int_()}, {"payload", TypeTag::string_()}});
    ds.roots = {
        RootDecl{"left", CollKind::Seq, TypeTag::record("LeftRow")},
        RootDecl{"right", CollKind::Seq, TypeTag::record("RightRow")},
    };

    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> leftKeys(static_cast<size_t>(n));
    std::iota(leftKeys.begin(), leftKeys.end(), 0);
    std::vector<std::int64_t> rightKeys = leftKeys;
    std::shuffle(leftKeys.begin(), leftKeys.end(), rng);
    std::shuffle(rightKeys.begin(), rightKeys.end(), rng);

    auto rows = [](const char* schema, const char* prefix,
                   const std::vector<std::int64_t>& keys) {
        std::vector<Value> out;
        out.reserve(keys.size());
        for (size_t i = 0; i < keys.size(); ++i)
            out.push_back(Value::record(
                schema, {Value::int_(keys[i]),
                         Value::string_(prefix + std::to_string(i))}));
        return Value::seq(std::move(out));
    };
    ds.collections.emplace("left", rows("LeftRow", "L", leftKeys));
    ds.collections.emplace("right", rows("RightRow", "R", rightKeys));
    return ds;
}

} // namespace collq
