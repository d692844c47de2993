#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "collq/type_tag.hpp"
#include "collq/value.hpp"

namespace collq {

class SchemaRegistry;

enum class ExprKind {
    Const,
    VarRef,
    FoasFun, // function literal, first-order form
    App,
    StringConcat,
    ArithBin,
    Cmp,
    BoolBin,
    Not,
    TupleMake,
    TupleProj,
    RecordMake,
    FieldGet,
    CollLit,
    Map,
    FlatMap,
    Filter,
    Size,
    Union,
    ToSeq,
    ToSet,
    HashJoin, // optimizer-introduced only
};

enum class ArithOp { Add, Sub, Mul, Div };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class BoolOp { And, Or };

std::string to_string(ExprKind k);

/// Immutable typed expression-tree node. Every node's TypeTag is computed
/// and checked at construction; an inconsistent node cannot exist (the
/// factory throws TypingError instead). Nodes are shared via ExprPtr; trees
/// are values — rewrites may share subtrees but never mutate them.
///
/// Thread safety: nodes are immutable and safely shareable across threads.
class Expr {
public:
    ExprKind kind() const { return kind_; }
    /// The node's semantic type, fixed at construction.
    const TypeTag& tag() const { return tag_; }
    /// Direct subexpressions in canonical left-to-right order; leaves yield
    /// an empty list. For FoasFun the single child is the body.
    const std::vector<ExprPtr>& children() const { return children_; }

    // Payload accessors; each asserts the node kind that carries it.
    const Value& const_value() const;
    /// VarRef: the referenced variable. FoasFun: the bound parameter.
    const TypedVar& var() const;
    ArithOp arith_op() const;
    CmpOp cmp_op() const;
    BoolOp bool_op() const;
    int proj_index() const; // 1-based
    /// RecordMake: schema name. FieldGet: field name.
    const std::string& name() const;
    /// FieldGet: resolved index of the field within its schema.
    int field_index() const;
    CollKind lit_kind() const;
    const TypeTag& lit_elem_tag() const;

    // -- factories (each enforces its typing rule; see type rules below) --

    /// Const requires the value to conform to the tag. `reg` is needed only
    /// when the value contains records; without it record values are
    /// rejected.
    static ExprPtr make_const(Value v, TypeTag tag,
                              const SchemaRegistry* reg = nullptr);
    static ExprPtr make_var(TypedVar v);
    /// tag = fun<param.tag, body.tag>.
    static ExprPtr make_fun(ExprPtr body, TypedVar param);
    static ExprPtr make_app(ExprPtr f, ExprPtr arg);
    static ExprPtr make_concat(ExprPtr l, ExprPtr r);
    /// Int or double operands, both the same; result has the operand type.
    static ExprPtr make_arith(ArithOp op, ExprPtr l, ExprPtr r);
    /// Identical operand tags; Lt/Le/Gt/Ge need int, double, or string.
    static ExprPtr make_cmp(CmpOp op, ExprPtr l, ExprPtr r);
    static ExprPtr make_bool(BoolOp op, ExprPtr l, ExprPtr r);
    static ExprPtr make_not(ExprPtr e);
    static ExprPtr make_tuple(std::vector<ExprPtr> elems);
    static ExprPtr make_proj(ExprPtr t, int index1);
    static ExprPtr make_record(const std::string& schemaName,
                               std::vector<ExprPtr> fieldValues,
                               const SchemaRegistry& reg);
    static ExprPtr make_field_get(ExprPtr rec, const std::string& fieldName,
                                  const SchemaRegistry& reg);
    static ExprPtr make_coll_lit(CollKind kind, TypeTag elemTag,
                                 std::vector<ExprPtr> elems);
    /// map: coll<k,a> x fun<a,b> -> coll<k,b>; result kind is the
    /// receiver's kind. Explicit to_seq/to_set are the only kind changers.
    static ExprPtr make_map(ExprPtr coll, ExprPtr f);
    /// flatMap: coll<k,a> x fun<a,coll<k',b>> -> coll<k,b> for any k'.
    static ExprPtr make_flat_map(ExprPtr coll, ExprPtr f);
    static ExprPtr make_filter(ExprPtr coll, ExprPtr p);
    static ExprPtr make_size(ExprPtr coll);
    static ExprPtr make_union(ExprPtr l, ExprPtr r);
    static ExprPtr make_to_seq(ExprPtr coll);
    static ExprPtr make_to_set(ExprPtr coll);

    /// Passkey gating HashJoin construction: only the optimizer's join
    /// transformation and the plan parser may mint one. The query-authoring
    /// front-end never emits hash joins.
    class HashJoinKey {
        HashJoinKey() = default;
        friend class HashJoinRewriter;
        friend class PlanParser;
    };
    /// outerKey: fun<elemOuter,K>, innerKey: fun<elemInner,K>, combine:
    /// fun<tuple<elemOuter,elemInner>,R>; tag = coll<kind(outer), R>.
    static ExprPtr make_hash_join(HashJoinKey, ExprPtr outer, ExprPtr inner,
                                  ExprPtr outerKey, ExprPtr innerKey,
                                  ExprPtr combine);

private:
    Expr(ExprKind k, TypeTag tag, std::vector<ExprPtr> children)
        : kind_(k), tag_(std::move(tag)), children_(std::move(children)) {}

    static ExprPtr finish(Expr e) {
        return std::make_shared<const Expr>(std::move(e));
    }

    static ExprPtr hash_join_impl(ExprPtr outer, ExprPtr inner, ExprPtr outerKey,
                                  ExprPtr innerKey, ExprPtr combine);

    ExprKind kind_;
    TypeTag tag_;
    std::vector<ExprPtr> children_;

    // Payload (populated per kind; see accessors).
    std::shared_ptr<const Value> constValue_;
    std::shared_ptr<const TypedVar> var_;
    ArithOp arithOp_ = ArithOp::Add;
    CmpOp cmpOp_ = CmpOp::Eq;
    BoolOp boolOp_ = BoolOp::And;
    int index_ = 0; // TupleProj index (1-based) / FieldGet resolved index
    std::string name_;
    CollKind litKind_ = CollKind::Seq;
    std::shared_ptr<const TypeTag> litElemTag_;

    friend ExprPtr rebuild(const ExprPtr&, std::vector<ExprPtr>);

public:
    // make_shared needs a reachable constructor; not part of the API.
    Expr(const Expr&) = default;
};

/// Returns the cached construction-time tag.
const TypeTag& type_of(const ExprPtr& e);

/// Same-variant node with the children replaced and the original typing
/// rule re-checked. Throws ArityError on length mismatch, TypingError if
/// the rebuilt node is ill-typed. rebuild(e, children(e)) == e structurally.
ExprPtr rebuild(const ExprPtr& e, std::vector<ExprPtr> newChildren);

struct TypedVarIdLess {
    bool operator()(const TypedVar& a, const TypedVar& b) const {
        return a.id < b.id;
    }
};
using VarSet = std::set<TypedVar, TypedVarIdLess>;

/// Variables occurring free in e; a FoasFun removes its own parameter from
/// its body's free set.
VarSet free_vars(const ExprPtr& e);

/// Structural equality, including variable ids. Alpha-equivalence is the
/// separate alpha_equal utility; no rewrite side condition relies on it.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Three-way structural comparison (total order, used by value_compare for
/// closure payloads).
int expr_compare(const ExprPtr& a, const ExprPtr& b);

/// Largest variable id mentioned anywhere in the tree (binders and
/// references); 0 for trees without variables.
int max_var_id(const ExprPtr& e);

/// True when all binder ids are pairwise distinct and no binder reuses the
/// id of a free variable — the Barendregt convention.
bool barendregt_ok(const ExprPtr& e);

/// Renumbers binders to consecutive ids in traversal (pre-)order, leaving
/// free variables untouched. Closed trees number from 1; open trees number
/// from max(free ids) + 1 so renumbering never captures.
ExprPtr renumber_binders(const ExprPtr& e);

/// Alpha-equivalence test utility: equality modulo consistent binder
/// renaming.
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

} // namespace collq
