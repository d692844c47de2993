#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace collq {

class SchemaRegistry;

/// Semantic family of a collection. Sequences are ordered and keep
/// duplicates; sets are unordered and deduplicate.
enum class CollKind { Seq, Set };

std::string to_string(CollKind k);

/// Semantic type of an expression: scalar, tuple, record, function, or
/// collection-with-kind. Structural value type; equality is structural.
class TypeTag {
public:
    enum class Kind { Int, Bool, String, Double, Tuple, Record, Fun, Coll };

    static TypeTag int_();
    static TypeTag bool_();
    static TypeTag string_();
    static TypeTag double_();
    /// Tuple type; arity must be >= 2.
    static TypeTag tuple(std::vector<TypeTag> elems);
    /// Record type by schema name. The name is validated against a
    /// SchemaRegistry wherever tags enter the system (registration,
    /// descriptor/plan parsing, record node construction).
    static TypeTag record(std::string schemaName);
    static TypeTag fun(TypeTag arg, TypeTag res);
    static TypeTag coll(CollKind kind, TypeTag elem);
    static TypeTag seq_of(TypeTag elem) { return coll(CollKind::Seq, std::move(elem)); }
    static TypeTag set_of(TypeTag elem) { return coll(CollKind::Set, std::move(elem)); }

    Kind kind() const { return kind_; }
    bool is(Kind k) const { return kind_ == k; }
    bool is_coll() const { return kind_ == Kind::Coll; }
    bool is_fun() const { return kind_ == Kind::Fun; }
    bool is_numeric() const { return kind_ == Kind::Int || kind_ == Kind::Double; }
    /// Int, Double, or String: the tags that admit an ordering (Lt/Le/Gt/Ge).
    bool is_ordered_scalar() const {
        return kind_ == Kind::Int || kind_ == Kind::Double || kind_ == Kind::String;
    }

    const std::vector<TypeTag>& tuple_elems() const;
    const std::string& schema_name() const;
    const TypeTag& fun_arg() const;
    const TypeTag& fun_res() const;
    CollKind coll_kind() const;
    const TypeTag& elem() const;

    /// Canonical rendering: int, bool, string, double, tuple<a,b,...>,
    /// record<Name>, seq<t>, set<t>, fun<a,b>. No whitespace.
    std::string str() const;

    /// Parses the canonical rendering. When `reg` is given, record<Name>
    /// must name a registered schema. `allowFun` admits fun<a,b>, which the
    /// dataset descriptor grammar excludes.
    static TypeTag parse(std::string_view text, const SchemaRegistry* reg,
                         bool allowFun);

    friend bool operator==(const TypeTag& a, const TypeTag& b);
    friend bool operator!=(const TypeTag& a, const TypeTag& b) { return !(a == b); }

private:
    TypeTag(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<TypeTag> params_; // Tuple: elems; Fun: [arg, res]; Coll: [elem]
    std::string schemaName_;      // Record
    CollKind collKind_ = CollKind::Seq;
};

/// Three-way structural comparison; defines a total order used for
/// deterministic canonical forms.
int tag_compare(const TypeTag& a, const TypeTag& b);

/// Integer-identified bound variable. ids are unique among all binders of a
/// well-formed tree (Barendregt convention).
struct TypedVar {
    int id;
    TypeTag tag;
};

inline bool operator==(const TypedVar& a, const TypedVar& b) {
    return a.id == b.id && a.tag == b.tag;
}
inline bool operator!=(const TypedVar& a, const TypedVar& b) { return !(a == b); }

} // namespace collq
