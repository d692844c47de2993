#include "collq/builder.hpp"

#include "collq/error.hpp"

namespace collq {

ExprPtr pure(Value v, TypeTag tag, const SchemaRegistry& reg) {
    return Expr::make_const(std::move(v), std::move(tag), &reg);
}

ExprPtr lit_int(std::int64_t v) {
    return Expr::make_const(Value::int_(v), TypeTag::int_());
}
ExprPtr lit_bool(bool v) {
    return Expr::make_const(Value::bool_(v), TypeTag::bool_());
}
ExprPtr lit_string(std::string v) {
    return Expr::make_const(Value::string_(std::move(v)), TypeTag::string_());
}
ExprPtr lit_double(double v) {
    return Expr::make_const(Value::double_(v), TypeTag::double_());
}

ExprPtr fun(const TypeTag& argTag, const HoasFn& hoasBody, Gensym& g) {
    TypedVar v = g.fresh(argTag);
    ExprPtr body = hoasBody(Expr::make_var(v));
    return Expr::make_fun(std::move(body), v);
}

ExprPtr app(ExprPtr f, ExprPtr arg) {
    return Expr::make_app(std::move(f), std::move(arg));
}

ExprPtr concat(ExprPtr l, ExprPtr r) {
    return Expr::make_concat(std::move(l), std::move(r));
}
ExprPtr add(ExprPtr l, ExprPtr r) {
    return Expr::make_arith(ArithOp::Add, std::move(l), std::move(r));
}
ExprPtr sub(ExprPtr l, ExprPtr r) {
    return Expr::make_arith(ArithOp::Sub, std::move(l), std::move(r));
}
ExprPtr mul(ExprPtr l, ExprPtr r) {
    return Expr::make_arith(ArithOp::Mul, std::move(l), std::move(r));
}
ExprPtr div_(ExprPtr l, ExprPtr r) {
    return Expr::make_arith(ArithOp::Div, std::move(l), std::move(r));
}
ExprPtr eq(ExprPtr l, ExprPtr r) {
    return Expr::make_cmp(CmpOp::Eq, std::move(l), std::move(r));
}
ExprPtr ne(ExprPtr l, ExprPtr r) {
    return Expr::make_cmp(CmpOp::Ne, std::move(l), std::move(r));
}
ExprPtr lt(ExprPtr l, ExprPtr r) {
    return Expr::make_cmp(CmpOp::Lt, std::move(l), std::move(r));
}
ExprPtr le(ExprPtr l, ExprPtr r) {
    return Expr::make_cmp(CmpOp::Le, std::move(l), std::move(r));
}
ExprPtr gt(ExprPtr l, ExprPtr r) {
    return Expr::make_cmp(CmpOp::Gt, std::move(l), std::move(r));
}
ExprPtr ge(ExprPtr l, ExprPtr r) {
    return Expr::make_cmp(CmpOp::Ge, std::move(l), std::move(r));
}
ExprPtr and_(ExprPtr l, ExprPtr r) {
    return Expr::make_bool(BoolOp::And, std::move(l), std::move(r));
}
ExprPtr or_(ExprPtr l, ExprPtr r) {
    return Expr::make_bool(BoolOp::Or, std::move(l), std::move(r));
}
ExprPtr not_(ExprPtr e) { return Expr::make_not(std::move(e)); }

ExprPtr tuple(std::vector<ExprPtr> elems) {
    return Expr::make_tuple(std::move(elems));
}
ExprPtr proj(ExprPtr t, int index1) {
    return Expr::make_proj(std::move(t), index1);
}
ExprPtr record(const SchemaRegistry& reg, const std::string& schemaName,
               std::vector<ExprPtr> fieldValues) {
    return Expr::make_record(schemaName, std::move(fieldValues), reg);
}
ExprPtr field(ExprPtr rec, const std::string& fieldName,
              const SchemaRegistry& reg) {
    return Expr::make_field_get(std::move(rec), fieldName, reg);
}
ExprPtr coll_lit(CollKind kind, TypeTag elemTag, std::vector<ExprPtr> elems) {
    return Expr::make_coll_lit(kind, std::move(elemTag), std::move(elems));
}
ExprPtr size(ExprPtr coll) { return Expr::make_size(std::move(coll)); }
ExprPtr union_(ExprPtr l, ExprPtr r) {
    return Expr::make_union(std::move(l), std::move(r));
}
ExprPtr to_seq(ExprPtr coll) { return Expr::make_to_seq(std::move(coll)); }
ExprPtr to_set(ExprPtr coll) { return Expr::make_to_set(std::move(coll)); }

namespace {

const TypeTag& elem_tag_of(const ExprPtr& c, const char* who) {
    if (!c->tag().is_coll())
        throw TypingError(std::string(who), "a collection type", c->tag().str());
    return c->tag().elem();
}

} // namespace

ExprPtr query_map(ExprPtr c, const HoasFn& hoasF, Gensym& g) {
    ExprPtr f = fun(elem_tag_of(c, "query_map"), hoasF, g);
    return Expr::make_map(std::move(c), std::move(f));
}

ExprPtr query_flat_map(ExprPtr c, const HoasFn& hoasF, Gensym& g) {
    ExprPtr f = fun(elem_tag_of(c, "query_flat_map"), hoasF, g);
    return Expr::make_flat_map(std::move(c), std::move(f));
}

ExprPtr query_filter(ExprPtr c, const HoasFn& hoasP, Gensym& g) {
    ExprPtr p = fun(elem_tag_of(c, "query_filter"), hoasP, g);
    return Expr::make_filter(std::move(c), std::move(p));
}

ExprPtr operator+(const ExprPtr& l, const ExprPtr& r) {
    if (l->tag() == TypeTag::string_()) return concat(l, r);
    return add(l, r);
}
ExprPtr operator-(const ExprPtr& l, const ExprPtr& r) { return sub(l, r); }
ExprPtr operator*(const ExprPtr& l, const ExprPtr& r) { return mul(l, r); }
ExprPtr operator/(const ExprPtr& l, const ExprPtr& r) { return div_(l, r); }

} // namespace collq
