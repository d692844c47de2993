#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "collq/type_tag.hpp"

namespace collq {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;
class Env;
using EnvPtr = std::shared_ptr<const Env>;

class SchemaRegistry;

/// Runtime datum produced by interpretation: scalar, tuple, record, closure,
/// or collection. Values are immutable; copies are deep for composites.
///
/// Sets are stored as canonically sorted, duplicate-free vectors (order per
/// value_compare), which makes set equality structural and set iteration
/// deterministic.
class Value {
public:
    enum class Kind { Int, Bool, String, Double, Tuple, Record, Closure, Seq, Set };

    struct RecordData {
        std::string schemaName;
        std::vector<Value> fields; // schema field order
    };
    struct ClosureData {
        TypedVar param;
        ExprPtr body;
        EnvPtr env; // captured environment; may be null (empty)
    };

    static Value int_(std::int64_t v);
    static Value bool_(bool v);
    static Value string_(std::string v);
    static Value double_(double v);
    static Value tuple(std::vector<Value> elems);
    static Value record(std::string schemaName, std::vector<Value> fields);
    static Value closure(TypedVar param, ExprPtr body, EnvPtr env);
    static Value seq(std::vector<Value> elems);
    /// Sorts and deduplicates.
    static Value set(std::vector<Value> elems);

    Kind kind() const;

    std::int64_t as_int() const;
    bool as_bool() const;
    const std::string& as_string() const;
    double as_double() const;
    const std::vector<Value>& tuple_elems() const;
    const RecordData& record_data() const;
    const ClosureData& closure_data() const;
    /// Elements of a Seq or Set (a Set's are in canonical sorted order).
    const std::vector<Value>& elems() const;
    bool is_collection() const {
        return kind() == Kind::Seq || kind() == Kind::Set;
    }

    /// Debug rendering, not part of any external format.
    std::string str() const;

private:
    struct SeqData { std::vector<Value> elems; };
    struct SetData { std::vector<Value> elems; }; // sorted, unique

    using Repr = std::variant<std::int64_t, bool, std::string, double,
                              std::vector<Value>, // tuple
                              RecordData, ClosureData, SeqData, SetData>;

    explicit Value(Repr r) : repr_(std::make_shared<Repr>(std::move(r))) {}

    std::shared_ptr<const Repr> repr_;
};

/// Canonical total order over Values: numeric by value, strings
/// lexicographic, composites lexicographic over components; values of
/// different kinds order by kind rank. Deterministic across runs.
int value_compare(const Value& a, const Value& b);
bool value_equal(const Value& a, const Value& b);
std::size_t value_hash(const Value& v);

/// Value-typing judgment: does `v` conform to `tag`? Record conformance
/// needs the registry; passing nullptr rejects record values outright.
bool value_conforms(const Value& v, const TypeTag& tag,
                    const SchemaRegistry* reg);

struct ValueHash {
    std::size_t operator()(const Value& v) const { return value_hash(v); }
};
struct ValueEq {
    bool operator()(const Value& a, const Value& b) const {
        return value_equal(a, b);
    }
};

} // namespace collq
