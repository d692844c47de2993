#include "collq/expr.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include "collq/error.hpp"
#include "collq/schema.hpp"

namespace collq {

std::string to_string(ExprKind k) {
    switch (k) {
    case ExprKind::Const: return "Const";
    case ExprKind::VarRef: return "VarRef";
    case ExprKind::FoasFun: return "FoasFun";
    case ExprKind::App: return "App";
    case ExprKind::StringConcat: return "StringConcat";
    case ExprKind::ArithBin: return "ArithBin";
    case ExprKind::Cmp: return "Cmp";
    case ExprKind::BoolBin: return "BoolBin";
    case ExprKind::Not: return "Not";
    case ExprKind::TupleMake: return "TupleMake";
    case ExprKind::TupleProj: return "TupleProj";
    case ExprKind::RecordMake: return "RecordMake";
    case ExprKind::FieldGet: return "FieldGet";
    case ExprKind::CollLit: return "CollLit";
    case ExprKind::Map: return "Map";
    case ExprKind::FlatMap: return "FlatMap";
    case ExprKind::Filter: return "Filter";
    case ExprKind::Size: return "Size";
    case ExprKind::Union: return "Union";
    case ExprKind::ToSeq: return "ToSeq";
    case ExprKind::ToSet: return "ToSet";
    case ExprKind::HashJoin: return "HashJoin";
    }
    return "?";
}

namespace {

[[noreturn]] void type_fail(const std::string& where, const std::string& expected,
                            const TypeTag& found) {
    throw TypingError(where, expected, found.str());
}

void expect_tag(const std::string& where, const TypeTag& expected,
                const ExprPtr& child) {
    if (child->tag() != expected)
        type_fail(where, expected.str(), child->tag());
}

void expect_coll(const std::string& where, const ExprPtr& child) {
    if (!child->tag().is_coll())
        type_fail(where, "a collection type", child->tag());
}

} // namespace

const Value& Expr::const_value() const {
    assert(kind_ == ExprKind::Const);
    return *constValue_;
}

const TypedVar& Expr::var() const {
    assert(kind_ == ExprKind::VarRef || kind_ == ExprKind::FoasFun);
    return *var_;
}

ArithOp Expr::arith_op() const {
    assert(kind_ == ExprKind::ArithBin);
    return arithOp_;
}

CmpOp Expr::cmp_op() const {
    assert(kind_ == ExprKind::Cmp);
    return cmpOp_;
}

BoolOp Expr::bool_op() const {
    assert(kind_ == ExprKind::BoolBin);
    return boolOp_;
}

int Expr::proj_index() const {
    assert(kind_ == ExprKind::TupleProj);
    return index_;
}

const std::string& Expr::name() const {
    assert(kind_ == ExprKind::RecordMake || kind_ == ExprKind::FieldGet);
    return name_;
}

int Expr::field_index() const {
    assert(kind_ == ExprKind::FieldGet);
    return index_;
}

CollKind Expr::lit_kind() const {
    assert(kind_ == ExprKind::CollLit);
    return litKind_;
}

const TypeTag& Expr::lit_elem_tag() const {
    assert(kind_ == ExprKind::CollLit);
    return *litElemTag_;
}

ExprPtr Expr::make_const(Value v, TypeTag tag, const SchemaRegistry* reg) {
    if (!value_conforms(v, tag, reg))
        throw ValueTagMismatch("constant value " + v.str() +
                               " does not conform to tag " + tag.str());
    Expr e(ExprKind::Const, std::move(tag), {});
    e.constValue_ = std::make_shared<const Value>(std::move(v));
    return finish(std::move(e));
}

ExprPtr Expr::make_var(TypedVar v) {
    Expr e(ExprKind::VarRef, v.tag, {});
    e.var_ = std::make_shared<const TypedVar>(std::move(v));
    return finish(std::move(e));
}

ExprPtr Expr::make_fun(ExprPtr body, TypedVar param) {
    TypeTag tag = TypeTag::fun(param.tag, body->tag());
    Expr e(ExprKind::FoasFun, std::move(tag), {std::move(body)});
    e.var_ = std::make_shared<const TypedVar>(std::move(param));
    return finish(std::move(e));
}

ExprPtr Expr::make_app(ExprPtr f, ExprPtr arg) {
    if (!f->tag().is_fun())
        type_fail("App.fun", "a function type", f->tag());
    expect_tag("App.arg", f->tag().fun_arg(), arg);
    TypeTag tag = f->tag().fun_res();
    return finish(Expr(ExprKind::App, std::move(tag), {std::move(f), std::move(arg)}));
}

ExprPtr Expr::make_concat(ExprPtr l, ExprPtr r) {
    expect_tag("StringConcat.left", TypeTag::string_(), l);
    expect_tag("StringConcat.right", TypeTag::string_(), r);
    return finish(Expr(ExprKind::StringConcat, TypeTag::string_(),
                       {std::move(l), std::move(r)}));
}

ExprPtr Expr::make_arith(ArithOp op, ExprPtr l, ExprPtr r) {
    if (!l->tag().is_numeric())
        type_fail("ArithBin.left", "int or double", l->tag());
    expect_tag("ArithBin.right", l->tag(), r);
    TypeTag tag = l->tag();
    Expr e(ExprKind::ArithBin, std::move(tag), {std::move(l), std::move(r)});
    e.arithOp_ = op;
    return finish(std::move(e));
}

ExprPtr Expr::make_cmp(CmpOp op, ExprPtr l, ExprPtr r) {
    expect_tag("Cmp.right", l->tag(), r);
    if (op != CmpOp::Eq && op != CmpOp::Ne && !l->tag().is_ordered_scalar())
        type_fail("Cmp.left", "int, double, or string", l->tag());
    Expr e(ExprKind::Cmp, TypeTag::bool_(), {std::move(l), std::move(r)});
    e.cmpOp_ = op;
    return finish(std::move(e));
}

ExprPtr Expr::make_bool(BoolOp op, ExprPtr l, ExprPtr r) {
    expect_tag("BoolBin.left", TypeTag::bool_(), l);
    expect_tag("BoolBin.right", TypeTag::bool_(), r);
    Expr e(ExprKind::BoolBin, TypeTag::bool_(), {std::move(l), std::move(r)});
    e.boolOp_ = op;
    return finish(std::move(e));
}

ExprPtr Expr::make_not(ExprPtr x) {
    expect_tag("Not", TypeTag::bool_(), x);
    return finish(Expr(ExprKind::Not, TypeTag::bool_(), {std::move(x)}));
}

ExprPtr Expr::make_tuple(std::vector<ExprPtr> elems) {
    std::vector<TypeTag> tags;
    tags.reserve(elems.size());
    for (const auto& e : elems) tags.push_back(e->tag());
    TypeTag tag = TypeTag::tuple(std::move(tags)); // checks arity >= 2
    return finish(Expr(ExprKind::TupleMake, std::move(tag), std::move(elems)));
}

ExprPtr Expr::make_proj(ExprPtr t, int index1) {
    if (!t->tag().is(TypeTag::Kind::Tuple))
        type_fail("TupleProj", "a tuple type", t->tag());
    const auto& elems = t->tag().tuple_elems();
    if (index1 < 1 || static_cast<size_t>(index1) > elems.size())
        throw TypingError("TupleProj index " + std::to_string(index1) +
                          " out of range for " + t->tag().str());
    TypeTag tag = elems[static_cast<size_t>(index1 - 1)];
    Expr e(ExprKind::TupleProj, std::move(tag), {std::move(t)});
    e.index_ = index1;
    return finish(std::move(e));
}

ExprPtr Expr::make_record(const std::string& schemaName,
                          std::vector<ExprPtr> fieldValues,
                          const SchemaRegistry& reg) {
    const auto& schema = reg.at(schemaName);
    if (fieldValues.size() != schema.fields.size())
        throw ArityError("RecordMake " + schemaName + ": expected " +
                         std::to_string(schema.fields.size()) + " fields, got " +
                         std::to_string(fieldValues.size()));
    for (size_t i = 0; i < fieldValues.size(); ++i)
        expect_tag("RecordMake " + schemaName + "." + schema.fields[i].name,
                   schema.fields[i].tag, fieldValues[i]);
    Expr e(ExprKind::RecordMake, TypeTag::record(schemaName),
           std::move(fieldValues));
    e.name_ = schemaName;
    return finish(std::move(e));
}

ExprPtr Expr::make_field_get(ExprPtr rec, const std::string& fieldName,
                             const SchemaRegistry& reg) {
    if (!rec->tag().is(TypeTag::Kind::Record))
        type_fail("FieldGet", "a record type", rec->tag());
    const auto& schema = reg.at(rec->tag().schema_name());
    int idx = schema.field_index(fieldName);
    if (idx < 0)
        throw TypingError("FieldGet: schema " + schema.name + " has no field '" +
                          fieldName + "'");
    TypeTag tag = schema.fields[static_cast<size_t>(idx)].tag;
    Expr e(ExprKind::FieldGet, std::move(tag), {std::move(rec)});
    e.name_ = fieldName;
    e.index_ = idx;
    return finish(std::move(e));
}

ExprPtr Expr::make_coll_lit(CollKind kind, TypeTag elemTag,
                            std::vector<ExprPtr> elems) {
    for (const auto& e : elems)
        expect_tag("CollLit element", elemTag, e);
    TypeTag tag = TypeTag::coll(kind, elemTag);
    Expr e(ExprKind::CollLit, std::move(tag), std::move(elems));
    e.litKind_ = kind;
    e.litElemTag_ = std::make_shared<const TypeTag>(std::move(elemTag));
    return finish(std::move(e));
}

ExprPtr Expr::make_map(ExprPtr coll, ExprPtr f) {
    expect_coll("Map.coll", coll);
    if (!f->tag().is_fun())
        type_fail("Map.f", "a function type", f->tag());
    if (f->tag().fun_arg() != coll->tag().elem())
        type_fail("Map.f", "fun<" + coll->tag().elem().str() + ",_>", f->tag());
    TypeTag tag = TypeTag::coll(coll->tag().coll_kind(), f->tag().fun_res());
    return finish(Expr(ExprKind::Map, std::move(tag),
                       {std::move(coll), std::move(f)}));
}

ExprPtr Expr::make_flat_map(ExprPtr coll, ExprPtr f) {
    expect_coll("FlatMap.coll", coll);
    if (!f->tag().is_fun())
        type_fail("FlatMap.f", "a function type", f->tag());
    if (f->tag().fun_arg() != coll->tag().elem())
        type_fail("FlatMap.f", "fun<" + coll->tag().elem().str() + ",_>", f->tag());
    if (!f->tag().fun_res().is_coll())
        type_fail("FlatMap.f result", "a collection type", f->tag().fun_res());
    // The result takes the receiver's kind; the inner collection may have
    // any kind and is coerced element-by-element during interpretation.
    TypeTag tag =
        TypeTag::coll(coll->tag().coll_kind(), f->tag().fun_res().elem());
    return finish(Expr(ExprKind::FlatMap, std::move(tag),
                       {std::move(coll), std::move(f)}));
}

ExprPtr Expr::make_filter(ExprPtr coll, ExprPtr p) {
    expect_coll("Filter.coll", coll);
    if (!p->tag().is_fun())
        type_fail("Filter.p", "a function type", p->tag());
    TypeTag expected = TypeTag::fun(coll->tag().elem(), TypeTag::bool_());
    if (p->tag() != expected)
        type_fail("Filter.p", expected.str(), p->tag());
    TypeTag tag = coll->tag();
    return finish(Expr(ExprKind::Filter, std::move(tag),
                       {std::move(coll), std::move(p)}));
}

ExprPtr Expr::make_size(ExprPtr coll) {
    expect_coll("Size", coll);
    return finish(Expr(ExprKind::Size, TypeTag::int_(), {std::move(coll)}));
}

ExprPtr Expr::make_union(ExprPtr l, ExprPtr r) {
    expect_coll("Union.left", l);
    expect_tag("Union.right", l->tag(), r);
    TypeTag tag = l->tag();
    return finish(Expr(ExprKind::Union, std::move(tag), {std::move(l), std::move(r)}));
}

ExprPtr Expr::make_to_seq(ExprPtr coll) {
    expect_coll("ToSeq", coll);
    TypeTag tag = TypeTag::coll(CollKind::Seq, coll->tag().elem());
    return finish(Expr(ExprKind::ToSeq, std::move(tag), {std::move(coll)}));
}

ExprPtr Expr::make_to_set(ExprPtr coll) {
    expect_coll("ToSet", coll);
    TypeTag tag = TypeTag::coll(CollKind::Set, coll->tag().elem());
    return finish(Expr(ExprKind::ToSet, std::move(tag), {std::move(coll)}));
}

ExprPtr Expr::make_hash_join(HashJoinKey, ExprPtr outer, ExprPtr inner,
                             ExprPtr outerKey, ExprPtr innerKey,
                             ExprPtr combine) {
    return hash_join_impl(std::move(outer), std::move(inner),
                          std::move(outerKey), std::move(innerKey),
                          std::move(combine));
}

ExprPtr Expr::hash_join_impl(ExprPtr outer, ExprPtr inner, ExprPtr outerKey,
                             ExprPtr innerKey, ExprPtr combine) {
    expect_coll("HashJoin.outer", outer);
    expect_coll("HashJoin.inner", inner);
    const TypeTag& elemOuter = outer->tag().elem();
    const TypeTag& elemInner = inner->tag().elem();
    if (!outerKey->tag().is_fun() || outerKey->tag().fun_arg() != elemOuter)
        type_fail("HashJoin.outerKey", "fun<" + elemOuter.str() + ",K>",
                  outerKey->tag());
    if (!innerKey->tag().is_fun() || innerKey->tag().fun_arg() != elemInner)
        type_fail("HashJoin.innerKey", "fun<" + elemInner.str() + ",K>",
                  innerKey->tag());
    if (outerKey->tag().fun_res() != innerKey->tag().fun_res())
        type_fail("HashJoin.innerKey", "key tag " + outerKey->tag().fun_res().str(),
                  innerKey->tag());
    TypeTag pairTag = TypeTag::tuple({elemOuter, elemInner});
    if (!combine->tag().is_fun() || combine->tag().fun_arg() != pairTag)
        type_fail("HashJoin.combine", "fun<" + pairTag.str() + ",R>",
                  combine->tag());
    TypeTag tag =
        TypeTag::coll(outer->tag().coll_kind(), combine->tag().fun_res());
    return finish(Expr(ExprKind::HashJoin, std::move(tag),
                       {std::move(outer), std::move(inner), std::move(outerKey),
                        std::move(innerKey), std::move(combine)}));
}

const TypeTag& type_of(const ExprPtr& e) { return e->tag(); }

ExprPtr rebuild(const ExprPtr& e, std::vector<ExprPtr> cs) {
    if (cs.size() != e->children().size())
        throw ArityError("rebuild of " + to_string(e->kind()) + ": expected " +
                         std::to_string(e->children().size()) + " children, got " +
                         std::to_string(cs.size()));
    switch (e->kind()) {
    case ExprKind::Const:
    case ExprKind::VarRef:
        return e; // leaves: nothing to replace
    case ExprKind::FoasFun:
        return Expr::make_fun(std::move(cs[0]), e->var());
    case ExprKind::App:
        return Expr::make_app(std::move(cs[0]), std::move(cs[1]));
    case ExprKind::StringConcat:
        return Expr::make_concat(std::move(cs[0]), std::move(cs[1]));
    case ExprKind::ArithBin:
        return Expr::make_arith(e->arith_op(), std::move(cs[0]), std::move(cs[1]));
    case ExprKind::Cmp:
        return Expr::make_cmp(e->cmp_op(), std::move(cs[0]), std::move(cs[1]));
    case ExprKind::BoolBin:
        return Expr::make_bool(e->bool_op(), std::move(cs[0]), std::move(cs[1]));
    case ExprKind::Not:
        return Expr::make_not(std::move(cs[0]));
    case ExprKind::TupleMake:
        return Expr::make_tuple(std::move(cs));
    case ExprKind::TupleProj:
        return Expr::make_proj(std::move(cs[0]), e->proj_index());
    case ExprKind::RecordMake: {
        // The original construction validated against the schema; requiring
        // identical child tags re-establishes the same rule without the
        // registry.
        for (size_t i = 0; i < cs.size(); ++i)
            expect_tag("RecordMake " + e->name() + " field " + std::to_string(i),
                       e->children()[i]->tag(), cs[i]);
        Expr n(ExprKind::RecordMake, e->tag(), std::move(cs));
        n.name_ = e->name();
        return std::make_shared<const Expr>(std::move(n));
    }
    case ExprKind::FieldGet: {
        expect_tag("FieldGet ." + e->name(), e->children()[0]->tag(), cs[0]);
        Expr n(ExprKind::FieldGet, e->tag(), std::move(cs));
        n.name_ = e->name();
        n.index_ = e->field_index();
        return std::make_shared<const Expr>(std::move(n));
    }
    case ExprKind::CollLit:
        return Expr::make_coll_lit(e->lit_kind(), e->lit_elem_tag(), std::move(cs));
    case ExprKind::Map:
        return Expr::make_map(std::move(cs[0]), std::move(cs[1]));
    case ExprKind::FlatMap:
        return Expr::make_flat_map(std::move(cs[0]), std::move(cs[1]));
    case ExprKind::Filter:
        return Expr::make_filter(std::move(cs[0]), std::move(cs[1]));
    case ExprKind::Size:
        return Expr::make_size(std::move(cs[0]));
    case ExprKind::Union:
        return Expr::make_union(std::move(cs[0]), std::move(cs[1]));
    case ExprKind::ToSeq:
        return Expr::make_to_seq(std::move(cs[0]));
    case ExprKind::ToSet:
        return Expr::make_to_set(std::move(cs[0]));
    case ExprKind::HashJoin:
        return Expr::hash_join_impl(std::move(cs[0]), std::move(cs[1]),
                                    std::move(cs[2]), std::move(cs[3]),
                                    std::move(cs[4]));
    }
    throw TypingError("rebuild: unknown node kind");
}

VarSet free_vars(const ExprPtr& e) {
    switch (e->kind()) {
    case ExprKind::Const:
        return {};
    case ExprKind::VarRef:
        return {e->var()};
    case ExprKind::FoasFun: {
        VarSet fv = free_vars(e->children()[0]);
        fv.erase(e->var());
        return fv;
    }
    default: {
        VarSet fv;
        for (const auto& c : e->children()) {
            VarSet sub = free_vars(c);
            fv.insert(sub.begin(), sub.end());
        }
        return fv;
    }
    }
}

int expr_compare(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (int c = tag_compare(a->tag(), b->tag())) return c;
    if (a->kind() != b->kind())
        return static_cast<int>(a->kind()) < static_cast<int>(b->kind()) ? -1 : 1;
    switch (a->kind()) {
    case ExprKind::Const:
        if (int c = value_compare(a->const_value(), b->const_value())) return c;
        break;
    case ExprKind::VarRef:
    case ExprKind::FoasFun:
        if (a->var().id != b->var().id) return a->var().id < b->var().id ? -1 : 1;
        if (int c = tag_compare(a->var().tag, b->var().tag)) return c;
        break;
    case ExprKind::ArithBin:
        if (a->arith_op() != b->arith_op())
            return static_cast<int>(a->arith_op()) < static_cast<int>(b->arith_op())
                       ? -1 : 1;
        break;
    case ExprKind::Cmp:
        if (a->cmp_op() != b->cmp_op())
            return static_cast<int>(a->cmp_op()) < static_cast<int>(b->cmp_op())
                       ? -1 : 1;
        break;
    case ExprKind::BoolBin:
        if (a->bool_op() != b->bool_op())
            return a->bool_op() == BoolOp::And ? -1 : 1;
        break;
    case ExprKind::TupleProj:
        if (a->proj_index() != b->proj_index())
            return a->proj_index() < b->proj_index() ? -1 : 1;
        break;
    case ExprKind::RecordMake:
    case ExprKind::FieldGet:
        if (int c = a->name().compare(b->name())) return c;
        break;
    case ExprKind::CollLit:
        if (a->lit_kind() != b->lit_kind())
            return a->lit_kind() == CollKind::Seq ? -1 : 1;
        if (int c = tag_compare(a->lit_elem_tag(), b->lit_elem_tag())) return c;
        break;
    default:
        break;
    }
    const auto& xs = a->children();
    const auto& ys = b->children();
    if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
    for (size_t i = 0; i < xs.size(); ++i)
        if (int c = expr_compare(xs[i], ys[i])) return c;
    return 0;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    return expr_compare(a, b) == 0;
}

int max_var_id(const ExprPtr& e) {
    int m = 0;
    if (e->kind() == ExprKind::VarRef || e->kind() == ExprKind::FoasFun)
        m = e->var().id;
    for (const auto& c : e->children()) m = std::max(m, max_var_id(c));
    return m;
}

namespace {

bool collect_binders(const ExprPtr& e, std::set<int>& ids) {
    if (e->kind() == ExprKind::FoasFun && !ids.insert(e->var().id).second)
        return false;
    for (const auto& c : e->children())
        if (!collect_binders(c, ids)) return false;
    return true;
}

} // namespace

bool barendregt_ok(const ExprPtr& e) {
    std::set<int> binders;
    if (!collect_binders(e, binders)) return false;
    for (const auto& fv : free_vars(e))
        if (binders.count(fv.id)) return false;
    return true;
}

namespace {

struct Renumberer {
    int counter;
    std::map<int, TypedVar> mapping; // old binder id -> new var

    ExprPtr run(const ExprPtr& e) {
        switch (e->kind()) {
        case ExprKind::VarRef: {
            auto it = mapping.find(e->var().id);
            return it == mapping.end() ? e : Expr::make_var(it->second);
        }
        case ExprKind::FoasFun: {
            TypedVar oldVar = e->var();
            TypedVar newVar{counter++, oldVar.tag};
            auto it = mapping.find(oldVar.id);
            bool hadPrev = it != mapping.end();
            TypedVar prev = hadPrev ? it->second : newVar;
            mapping.insert_or_assign(oldVar.id, newVar);
            ExprPtr body = run(e->children()[0]);
            if (hadPrev)
                mapping.insert_or_assign(oldVar.id, prev);
            else
                mapping.erase(oldVar.id);
            return Expr::make_fun(std::move(body), newVar);
        }
        default: {
            std::vector<ExprPtr> cs;
            cs.reserve(e->children().size());
            for (const auto& c : e->children()) cs.push_back(run(c));
            return rebuild(e, std::move(cs));
        }
        }
    }
};

} // namespace

ExprPtr renumber_binders(const ExprPtr& e) {
    int start = 1;
    for (const auto& fv : free_vars(e)) start = std::max(start, fv.id + 1);
    Renumberer r{start, {}};
    return r.run(e);
}

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
    return expr_equal(renumber_binders(a), renumber_binders(b));
}

} // namespace collq
