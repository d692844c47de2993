#include "collq/value.hpp"

#include <algorithm>
#include <functional>

#include "collq/expr.hpp"
#include "collq/interp.hpp"
#include "collq/schema.hpp"

namespace collq {

Value Value::int_(std::int64_t v) { return Value(Repr(v)); }
Value Value::bool_(bool v) { return Value(Repr(v)); }
Value Value::string_(std::string v) { return Value(Repr(std::move(v))); }
Value Value::double_(double v) { return Value(Repr(v)); }
Value Value::tuple(std::vector<Value> elems) { return Value(Repr(std::move(elems))); }

Value Value::record(std::string schemaName, std::vector<Value> fields) {
    return Value(Repr(RecordData{std::move(schemaName), std::move(fields)}));
}

Value Value::closure(TypedVar param, ExprPtr body, EnvPtr env) {
    return Value(Repr(ClosureData{std::move(param), std::move(body), std::move(env)}));
}

Value Value::seq(std::vector<Value> elems) {
    return Value(Repr(SeqData{std::move(elems)}));
}

Value Value::set(std::vector<Value> elems) {
    std::sort(elems.begin(), elems.end(),
              [](const Value& a, const Value& b) { return value_compare(a, b) < 0; });
    elems.erase(std::unique(elems.begin(), elems.end(),
                            [](const Value& a, const Value& b) {
                                return value_compare(a, b) == 0;
                            }),
                elems.end());
    return Value(Repr(SetData{std::move(elems)}));
}

Value::Kind Value::kind() const {
    switch (repr_->index()) {
    case 0: return Kind::Int;
    case 1: return Kind::Bool;
    case 2: return Kind::String;
    case 3: return Kind::Double;
    case 4: return Kind::Tuple;
    case 5: return Kind::Record;
    case 6: return Kind::Closure;
    case 7: return Kind::Seq;
    default: return Kind::Set;
    }
}

std::int64_t Value::as_int() const { return std::get<std::int64_t>(*repr_); }
bool Value::as_bool() const { return std::get<bool>(*repr_); }
const std::string& Value::as_string() const { return std::get<std::string>(*repr_); }
double Value::as_double() const { return std::get<double>(*repr_); }
const std::vector<Value>& Value::tuple_elems() const {
    return std::get<std::vector<Value>>(*repr_);
}
const Value::RecordData& Value::record_data() const {
    return std::get<RecordData>(*repr_);
}
const Value::ClosureData& Value::closure_data() const {
    return std::get<ClosureData>(*repr_);
}
const std::vector<Value>& Value::elems() const {
    if (kind() == Kind::Seq) return std::get<SeqData>(*repr_).elems;
    return std::get<SetData>(*repr_).elems;
}

namespace {

int three_way(std::int64_t a, std::int64_t b) { return a < b ? -1 : a > b ? 1 : 0; }

// IEEE-754 totalOrder via the sign-magnitude bit transform; total even for
// NaNs and signed zeros, so set canonicalization never sees an unordered pair.
int double_compare(double a, double b) {
    auto key = [](double d) {
        std::uint64_t bits;
        __builtin_memcpy(&bits, &d, sizeof(bits));
        return (bits & 0x8000000000000000ULL) ? ~bits
                                              : bits | 0x8000000000000000ULL;
    };
    std::uint64_t ka = key(a), kb = key(b);
    return ka < kb ? -1 : ka > kb ? 1 : 0;
}

int vector_compare(const std::vector<Value>& xs, const std::vector<Value>& ys) {
    size_t n = std::min(xs.size(), ys.size());
    for (size_t i = 0; i < n; ++i)
        if (int c = value_compare(xs[i], ys[i])) return c;
    return three_way(static_cast<std::int64_t>(xs.size()),
                     static_cast<std::int64_t>(ys.size()));
}

} // namespace

int value_compare(const Value& a, const Value& b) {
    if (a.kind() != b.kind())
        return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
    case Value::Kind::Int:
        return three_way(a.as_int(), b.as_int());
    case Value::Kind::Bool:
        return three_way(a.as_bool() ? 1 : 0, b.as_bool() ? 1 : 0);
    case Value::Kind::String:
        return a.as_string().compare(b.as_string()) < 0
                   ? -1
                   : a.as_string() == b.as_string() ? 0 : 1;
    case Value::Kind::Double:
        return double_compare(a.as_double(), b.as_double());
    case Value::Kind::Tuple:
        return vector_compare(a.tuple_elems(), b.tuple_elems());
    case Value::Kind::Record: {
        if (int c = a.record_data().schemaName.compare(b.record_data().schemaName))
            return c < 0 ? -1 : 1;
        return vector_compare(a.record_data().fields, b.record_data().fields);
    }
    case Value::Kind::Closure: {
        const auto& ca = a.closure_data();
        const auto& cb = b.closure_data();
        if (ca.param.id != cb.param.id) return ca.param.id < cb.param.id ? -1 : 1;
        if (int c = tag_compare(ca.param.tag, cb.param.tag)) return c;
        if (int c = expr_compare(ca.body, cb.body)) return c;
        auto ba = Env::flatten(ca.env);
        auto bb = Env::flatten(cb.env);
        auto ia = ba.begin();
        auto ib = bb.begin();
        for (; ia != ba.end() && ib != bb.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
            if (int c = value_compare(ia->second, ib->second)) return c;
        }
        if (ia != ba.end()) return 1;
        if (ib != bb.end()) return -1;
        return 0;
    }
    case Value::Kind::Seq:
    case Value::Kind::Set:
        return vector_compare(a.elems(), b.elems());
    }
    return 0;
}

bool value_equal(const Value& a, const Value& b) { return value_compare(a, b) == 0; }

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t h) {
    return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace

std::size_t value_hash(const Value& v) {
    std::size_t h = static_cast<std::size_t>(v.kind()) * 0x9e3779b97f4a7c15ULL;
    switch (v.kind()) {
    case Value::Kind::Int:
        return hash_combine(h, std::hash<std::int64_t>{}(v.as_int()));
    case Value::Kind::Bool:
        return hash_combine(h, v.as_bool() ? 1 : 2);
    case Value::Kind::String:
        return hash_combine(h, std::hash<std::string>{}(v.as_string()));
    case Value::Kind::Double: {
        // value_compare uses strong_order, so raw bits are the faithful key.
        double d = v.as_double();
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        __builtin_memcpy(&bits, &d, sizeof(bits));
        return hash_combine(h, std::hash<std::uint64_t>{}(bits));
    }
    case Value::Kind::Tuple: {
        for (const auto& e : v.tuple_elems()) h = hash_combine(h, value_hash(e));
        return h;
    }
    case Value::Kind::Record: {
        h = hash_combine(h, std::hash<std::string>{}(v.record_data().schemaName));
        for (const auto& e : v.record_data().fields)
            h = hash_combine(h, value_hash(e));
        return h;
    }
    case Value::Kind::Closure: {
        const auto& c = v.closure_data();
        h = hash_combine(h, static_cast<std::size_t>(c.param.id));
        h = hash_combine(h, static_cast<std::size_t>(max_var_id(c.body)));
        return h; // coarse, but consistent with value_equal
    }
    case Value::Kind::Seq:
    case Value::Kind::Set: {
        for (const auto& e : v.elems()) h = hash_combine(h, value_hash(e));
        return h;
    }
    }
    return h;
}

bool value_conforms(const Value& v, const TypeTag& tag, const SchemaRegistry* reg) {
    switch (tag.kind()) {
    case TypeTag::Kind::Int:
        return v.kind() == Value::Kind::Int;
    case TypeTag::Kind::Bool:
        return v.kind() == Value::Kind::Bool;
    case TypeTag::Kind::String:
        return v.kind() == Value::Kind::String;
    case TypeTag::Kind::Double:
        return v.kind() == Value::Kind::Double;
    case TypeTag::Kind::Tuple: {
        if (v.kind() != Value::Kind::Tuple) return false;
        const auto& es = v.tuple_elems();
        const auto& ts = tag.tuple_elems();
        if (es.size() != ts.size()) return false;
        for (size_t i = 0; i < es.size(); ++i)
            if (!value_conforms(es[i], ts[i], reg)) return false;
        return true;
    }
    case TypeTag::Kind::Record: {
        if (v.kind() != Value::Kind::Record) return false;
        const auto& rec = v.record_data();
        if (rec.schemaName != tag.schema_name()) return false;
        if (!reg) return false; // cannot verify fields without a registry
        const auto* schema = reg->find(rec.schemaName);
        if (!schema || rec.fields.size() != schema->fields.size()) return false;
        for (size_t i = 0; i < rec.fields.size(); ++i)
            if (!value_conforms(rec.fields[i], schema->fields[i].tag, reg))
                return false;
        return true;
    }
    case TypeTag::Kind::Fun: {
        if (v.kind() != Value::Kind::Closure) return false;
        const auto& c = v.closure_data();
        return c.param.tag == tag.fun_arg() && c.body->tag() == tag.fun_res();
    }
    case TypeTag::Kind::Coll: {
        if (tag.coll_kind() == CollKind::Seq && v.kind() != Value::Kind::Seq)
            return false;
        if (tag.coll_kind() == CollKind::Set && v.kind() != Value::Kind::Set)
            return false;
        for (const auto& e : v.elems())
            if (!value_conforms(e, tag.elem(), reg)) return false;
        return true;
    }
    }
    return false;
}

std::string Value::str() const {
    switch (kind()) {
    case Kind::Int: return std::to_string(as_int());
    case Kind::Bool: return as_bool() ? "true" : "false";
    case Kind::String: return "\"" + as_string() + "\"";
    case Kind::Double: return std::to_string(as_double());
    case Kind::Tuple: {
        std::string s = "(";
        for (size_t i = 0; i < tuple_elems().size(); ++i) {
            if (i) s += ", ";
            s += tuple_elems()[i].str();
        }
        return s + ")";
    }
    case Kind::Record: {
        std::string s = record_data().schemaName + "(";
        for (size_t i = 0; i < record_data().fields.size(); ++i) {
            if (i) s += ", ";
            s += record_data().fields[i].str();
        }
        return s + ")";
    }
    case Kind::Closure:
        return "<closure var " + std::to_string(closure_data().param.id) + ">";
    case Kind::Seq:
    case Kind::Set: {
        std::string s = kind() == Kind::Seq ? "[" : "{";
        for (size_t i = 0; i < elems().size(); ++i) {
            if (i) s += ", ";
            s += elems()[i].str();
        }
        return s + (kind() == Kind::Seq ? "]" : "}");
    }
    }
    return "?";
}

} // namespace collq
