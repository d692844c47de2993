#pragma once

#include <functional>

#include "collq/expr.hpp"
#include "collq/schema.hpp"

namespace collq {

/// Fresh-variable source. Strictly monotonic: every issued id is greater
/// than all earlier ones from this source.
///
/// One Gensym per query-construction session; the optimizer repairs id
/// collisions between sessions by alpha-renaming on entry.
class Gensym {
public:
    explicit Gensym(int start = 1) : next_(start) {}

    TypedVar fresh(const TypeTag& tag) { return TypedVar{next_++, tag}; }
    int next_id() const { return next_; }
    /// Ensures future ids are strictly greater than `id`.
    void advance_past(int id) {
        if (id >= next_) next_ = id + 1;
    }

private:
    int next_;
};

/// A host-level function body: higher-order abstract syntax. Must be pure —
/// its output may depend only on its input tree. Impure bodies yield
/// unspecified trees (a documented contract, not enforced).
using HoasFn = std::function<ExprPtr(const ExprPtr&)>;

// -- lifting of constants ---------------------------------------------------

/// Wraps a value in a Const node; the value must conform to the tag.
ExprPtr pure(Value v, TypeTag tag, const SchemaRegistry& reg);

// Scalar shorthands (no registry needed).
ExprPtr lit_int(std::int64_t v);
ExprPtr lit_bool(bool v);
ExprPtr lit_string(std::string v);
ExprPtr lit_double(double v);

// -- functions ---------------------------------------------------------------

/// HOAS -> FOAS: allocates a fresh variable, applies the host function to a
/// reference to it, and wraps the resulting body in a function literal.
/// Nested fun calls must share `g` for the result to satisfy the Barendregt
/// convention.
ExprPtr fun(const TypeTag& argTag, const HoasFn& hoasBody, Gensym& g);
ExprPtr app(ExprPtr f, ExprPtr arg);

// -- lifted first-order operators ---------------------------------------------

ExprPtr concat(ExprPtr l, ExprPtr r);
ExprPtr add(ExprPtr l, ExprPtr r);
ExprPtr sub(ExprPtr l, ExprPtr r);
ExprPtr mul(ExprPtr l, ExprPtr r);
ExprPtr div_(ExprPtr l, ExprPtr r);
ExprPtr eq(ExprPtr l, ExprPtr r);
ExprPtr ne(ExprPtr l, ExprPtr r);
ExprPtr lt(ExprPtr l, ExprPtr r);
ExprPtr le(ExprPtr l, ExprPtr r);
ExprPtr gt(ExprPtr l, ExprPtr r);
ExprPtr ge(ExprPtr l, ExprPtr r);
ExprPtr and_(ExprPtr l, ExprPtr r);
ExprPtr or_(ExprPtr l, ExprPtr r);
ExprPtr not_(ExprPtr e);
ExprPtr tuple(std::vector<ExprPtr> elems);
ExprPtr proj(ExprPtr t, int index1);
ExprPtr record(const SchemaRegistry& reg, const std::string& schemaName,
               std::vector<ExprPtr> fieldValues);
ExprPtr field(ExprPtr rec, const std::string& fieldName,
              const SchemaRegistry& reg);
ExprPtr coll_lit(CollKind kind, TypeTag elemTag, std::vector<ExprPtr> elems);
ExprPtr size(ExprPtr coll);
ExprPtr union_(ExprPtr l, ExprPtr r);
ExprPtr to_seq(ExprPtr coll);
ExprPtr to_set(ExprPtr coll);

// -- lifted higher-order collection operators ---------------------------------

/// map over c: coll<k,a> with a HOAS body of element type b -> coll<k,b>.
ExprPtr query_map(ExprPtr c, const HoasFn& hoasF, Gensym& g);
/// flatMap; the HOAS body must yield a collection (of any kind).
ExprPtr query_flat_map(ExprPtr c, const HoasFn& hoasF, Gensym& g);
/// filter; the HOAS body must yield bool.
ExprPtr query_filter(ExprPtr c, const HoasFn& hoasP, Gensym& g);

// Operator sugar on expression handles: + is addition or string
// concatenation depending on the operand tag; - * / are arithmetic. The
// named builders remain the contract.
ExprPtr operator+(const ExprPtr& l, const ExprPtr& r);
ExprPtr operator-(const ExprPtr& l, const ExprPtr& r);
ExprPtr operator*(const ExprPtr& l, const ExprPtr& r);
ExprPtr operator/(const ExprPtr& l, const ExprPtr& r);

} // namespace collq
