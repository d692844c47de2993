#include "collq/optimizer.hpp"

#include <cassert>
#include <set>

#include "collq/builder.hpp"
#include "collq/error.hpp"
#include "collq/interp.hpp"

namespace collq {

namespace {

bool is_fun_literal(const ExprPtr& e) { return e->kind() == ExprKind::FoasFun; }

const ExprPtr& fun_body(const ExprPtr& f) { return f->children()[0]; }

bool free_vars_subset(const ExprPtr& e, const VarSet& allowed) {
    for (const auto& v : free_vars(e))
        if (!allowed.count(v)) return false;
    return true;
}

/// free ids of e all equal `id` (or e is closed).
bool free_only(const ExprPtr& e, int id) {
    for (const auto& v : free_vars(e))
        if (v.id != id) return false;
    return true;
}

} // namespace

ExprPtr rewrite_bottom_up(const ExprPtr& e, const RewriteRule& rule) {
    std::vector<ExprPtr> cs;
    cs.reserve(e->children().size());
    bool childChanged = false;
    for (const auto& c : e->children()) {
        ExprPtr c2 = rewrite_bottom_up(c, rule);
        childChanged |= c2.get() != c.get();
        cs.push_back(std::move(c2));
    }
    ExprPtr node = childChanged ? rebuild(e, std::move(cs)) : e;
    if (std::optional<ExprPtr> result = rule.apply(node)) {
        if (type_of(*result) != type_of(node))
            throw TypingError("rewrite rule '" + rule.name + "' changed the type " +
                              type_of(node).str() + " to " + type_of(*result).str());
        if (!free_vars_subset(*result, free_vars(node)))
            throw TypingError("rewrite rule '" + rule.name +
                              "' invented a free variable");
        return *result;
    }
    return node;
}

namespace {

struct Substituter {
    const TypedVar& var;
    const ExprPtr& replacement;
#ifndef NDEBUG
    VarSet replacementFree;
#endif

    ExprPtr run(const ExprPtr& e) {
        switch (e->kind()) {
        case ExprKind::VarRef:
            return e->var().id == var.id ? replacement : e;
        case ExprKind::FoasFun: {
            if (e->var().id == var.id) return e; // shadowed below this binder
            // Capture-freedom under the Barendregt convention.
            assert(!replacementFree.count(e->var()) &&
                   "substitution would capture a free variable of the replacement");
            ExprPtr body = run(e->children()[0]);
            if (body.get() == e->children()[0].get()) return e;
            return Expr::make_fun(std::move(body), e->var());
        }
        default: {
            std::vector<ExprPtr> cs;
            cs.reserve(e->children().size());
            bool changed = false;
            for (const auto& c : e->children()) {
                ExprPtr c2 = run(c);
                changed |= c2.get() != c.get();
                cs.push_back(std::move(c2));
            }
            return changed ? rebuild(e, std::move(cs)) : e;
        }
        }
    }
};

} // namespace

ExprPtr substitute(const ExprPtr& e, const TypedVar& v, const ExprPtr& replacement) {
    if (replacement->tag() != v.tag)
        throw TypingError("substitute for variable " + std::to_string(v.id),
                          v.tag.str(), replacement->tag().str());
    Substituter s{v, replacement
#ifndef NDEBUG
                  ,
                  free_vars(replacement)
#endif
    };
    return s.run(e);
}

namespace {

/// Renames any binder whose id was already seen, restoring pairwise-distinct
/// binder ids after a rewrite duplicated subtrees.
ExprPtr restore_unique_binders(const ExprPtr& e, std::set<int>& seen, Gensym& g) {
    if (e->kind() == ExprKind::FoasFun) {
        TypedVar param = e->var();
        ExprPtr body = e->children()[0];
        bool renamed = false;
        if (!seen.insert(param.id).second) {
            TypedVar fresh = g.fresh(param.tag);
            seen.insert(fresh.id);
            body = substitute(body, param, Expr::make_var(fresh));
            param = fresh;
            renamed = true;
        }
        ExprPtr body2 = restore_unique_binders(body, seen, g);
        if (!renamed && body2.get() == e->children()[0].get()) return e;
        return Expr::make_fun(std::move(body2), param);
    }
    std::vector<ExprPtr> cs;
    cs.reserve(e->children().size());
    bool changed = false;
    for (const auto& c : e->children()) {
        ExprPtr c2 = restore_unique_binders(c, seen, g);
        changed |= c2.get() != c.get();
        cs.push_back(std::move(c2));
    }
    return changed ? rebuild(e, std::move(cs)) : e;
}

ExprPtr restore_barendregt(const ExprPtr& e, Gensym& g) {
    std::set<int> seen;
    for (const auto& fv : free_vars(e)) seen.insert(fv.id);
    return restore_unique_binders(e, seen, g);
}

/// Runs one rule bottom-up repeatedly until a whole pass changes nothing,
/// restoring binder uniqueness between passes.
ExprPtr run_rule_fixpoint(const ExprPtr& e, const RewriteRule& rule,
                          int maxRounds) {
    Gensym g(max_var_id(e) + 1);
    ExprPtr cur = e;
    for (int round = 0; round < maxRounds; ++round) {
        ExprPtr next = rewrite_bottom_up(cur, rule);
        if (next.get() == cur.get()) return cur;
        cur = restore_barendregt(next, g);
    }
    throw IterationLimitExceeded("rule '" + rule.name + "' did not stabilize in " +
                                 std::to_string(maxRounds) + " rounds");
}

const RewriteRule& beta_rule() {
    static const RewriteRule rule{
        "beta",
        [](const ExprPtr& n) -> std::optional<ExprPtr> {
            if (n->kind() != ExprKind::App) return std::nullopt;
            const ExprPtr& f = n->children()[0];
            if (f->kind() != ExprKind::FoasFun) return std::nullopt;
            return substitute(fun_body(f), f->var(), n->children()[1]);
        }};
    return rule;
}

} // namespace

ExprPtr beta_reduce(const ExprPtr& e) {
    return run_rule_fixpoint(e, beta_rule(), 1000);
}

// ---------------------------------------------------------------------------
// simplify
// ---------------------------------------------------------------------------

namespace {

bool is_const(const ExprPtr& e) { return e->kind() == ExprKind::Const; }

bool is_int_const(const ExprPtr& e, std::int64_t v) {
    return is_const(e) && e->tag() == TypeTag::int_() && e->const_value().as_int() == v;
}

bool is_bool_const(const ExprPtr& e, bool v) {
    return is_const(e) && e->tag() == TypeTag::bool_() &&
           e->const_value().as_bool() == v;
}

bool is_empty_string_const(const ExprPtr& e) {
    return is_const(e) && e->tag() == TypeTag::string_() &&
           e->const_value().as_string().empty();
}

bool is_zero_divisor(const ExprPtr& e) {
    if (!is_const(e)) return false;
    const Value& v = e->const_value();
    if (v.kind() == Value::Kind::Int) return v.as_int() == 0;
    if (v.kind() == Value::Kind::Double) return v.as_double() == 0.0;
    return false;
}

bool foldable_scalar_op(const ExprPtr& n) {
    switch (n->kind()) {
    case ExprKind::StringConcat:
    case ExprKind::ArithBin:
    case ExprKind::Cmp:
    case ExprKind::BoolBin:
    case ExprKind::Not:
        break;
    default:
        return false;
    }
    for (const auto& c : n->children())
        if (!is_const(c)) return false;
    // Never fold a division by a zero constant: that error belongs to run
    // time, not to optimization.
    if (n->kind() == ExprKind::ArithBin && n->arith_op() == ArithOp::Div &&
        is_zero_divisor(n->children()[1]))
        return false;
    return true;
}

std::optional<ExprPtr> try_projection(const ExprPtr& n) {
    if (n->kind() == ExprKind::TupleProj &&
        n->children()[0]->kind() == ExprKind::TupleMake)
        return n->children()[0]->children()[static_cast<size_t>(n->proj_index() - 1)];
    if (n->kind() == ExprKind::FieldGet &&
        n->children()[0]->kind() == ExprKind::RecordMake)
        return n->children()[0]->children()[static_cast<size_t>(n->field_index())];
    return std::nullopt;
}

std::optional<ExprPtr> try_identities(const ExprPtr& n) {
    // Only effect-safe laws: a dropped operand is never one that the
    // original would have evaluated (errors are the IR's only effect).
    if (n->kind() == ExprKind::BoolBin) {
        const ExprPtr& l = n->children()[0];
        const ExprPtr& r = n->children()[1];
        if (n->bool_op() == BoolOp::And) {
            if (is_bool_const(l, true)) return r;
            if (is_bool_const(r, true)) return l;
            if (is_bool_const(l, false)) return l; // short-circuit: r unevaluated
        } else {
            if (is_bool_const(l, false)) return r;
            if (is_bool_const(r, false)) return l;
            if (is_bool_const(l, true)) return l;
        }
        return std::nullopt;
    }
    if (n->kind() == ExprKind::ArithBin && n->tag() == TypeTag::int_()) {
        const ExprPtr& l = n->children()[0];
        const ExprPtr& r = n->children()[1];
        switch (n->arith_op()) {
        case ArithOp::Add:
            if (is_int_const(l, 0)) return r;
            if (is_int_const(r, 0)) return l;
            break;
        case ArithOp::Sub:
            if (is_int_const(r, 0)) return l;
            break;
        case ArithOp::Mul:
            if (is_int_const(l, 1)) return r;
            if (is_int_const(r, 1)) return l;
            break;
        case ArithOp::Div:
            break;
        }
        return std::nullopt;
    }
    if (n->kind() == ExprKind::StringConcat) {
        if (is_empty_string_const(n->children()[0])) return n->children()[1];
        if (is_empty_string_const(n->children()[1])) return n->children()[0];
    }
    return std::nullopt;
}

// Flattens nested chains of one associative operator, folds the constant
// operands into one, and rebuilds a canonical left-associated chain with the
// folded constant last. Int add/mul are commutative (wrapping), so their
// constants gather across non-constants; string concatenation only merges
// adjacent constants.
std::optional<ExprPtr> try_reassociate(const ExprPtr& n) {
    const bool isConcat = n->kind() == ExprKind::StringConcat;
    const bool isIntAddMul = n->kind() == ExprKind::ArithBin &&
                             n->tag() == TypeTag::int_() &&
                             (n->arith_op() == ArithOp::Add ||
                              n->arith_op() == ArithOp::Mul);
    if (!isConcat && !isIntAddMul) return std::nullopt;

    auto same_chain_op = [&](const ExprPtr& e) {
        if (isConcat) return e->kind() == ExprKind::StringConcat;
        return e->kind() == ExprKind::ArithBin && e->tag() == TypeTag::int_() &&
               e->arith_op() == n->arith_op();
    };
    std::vector<ExprPtr> operands;
    auto flatten = [&](auto&& self, const ExprPtr& e) -> void {
        if (same_chain_op(e)) {
            self(self, e->children()[0]);
            self(self, e->children()[1]);
        } else {
            operands.push_back(e);
        }
    };
    flatten(flatten, n);

    std::vector<ExprPtr> rebuiltOps;
    if (isIntAddMul) {
        const ArithOp op = n->arith_op();
        const std::int64_t identity = op == ArithOp::Add ? 0 : 1;
        std::int64_t acc = identity;
        bool sawConst = false;
        for (const auto& x : operands) {
            if (is_const(x)) {
                sawConst = true;
                acc = eval_arith_scalar(op, Value::int_(acc), x->const_value()).as_int();
            } else {
                rebuiltOps.push_back(x);
            }
        }
        if (rebuiltOps.empty())
            return Expr::make_const(Value::int_(acc), TypeTag::int_());
        if (sawConst && acc != identity)
            rebuiltOps.push_back(
                Expr::make_const(Value::int_(acc), TypeTag::int_()));
    } else {
        std::string run;
        bool inRun = false;
        auto flushRun = [&]() {
            if (!inRun) return;
            if (!run.empty())
                rebuiltOps.push_back(Expr::make_const(Value::string_(run),
                                                      TypeTag::string_()));
            run.clear();
            inRun = false;
        };
        for (const auto& x : operands) {
            if (is_const(x)) {
                run += x->const_value().as_string();
                inRun = true;
            } else {
                flushRun();
                rebuiltOps.push_back(x);
            }
        }
        flushRun();
        if (rebuiltOps.empty())
            return Expr::make_const(Value::string_(""), TypeTag::string_());
    }

    ExprPtr result = rebuiltOps[0];
    for (size_t i = 1; i < rebuiltOps.size(); ++i)
        result = isConcat ? Expr::make_concat(result, rebuiltOps[i])
                          : Expr::make_arith(n->arith_op(), result, rebuiltOps[i]);
    if (expr_equal(result, n)) return std::nullopt;
    return result;
}

std::optional<ExprPtr> simplify_step(const ExprPtr& n) {
    if (auto r = try_projection(n)) return r;
    if (auto r = try_identities(n)) return r;
    if (foldable_scalar_op(n)) {
        Value v = interpret_closed(n).value;
        return Expr::make_const(std::move(v), n->tag());
    }
    return try_reassociate(n);
}

const RewriteRule& simplify_rule() {
    static const RewriteRule rule{
        "simplify",
        [](const ExprPtr& n) -> std::optional<ExprPtr> {
            ExprPtr cur = n;
            bool changed = false;
            for (int guard = 0; guard < 64; ++guard) {
                std::optional<ExprPtr> next = simplify_step(cur);
                if (!next) break;
                cur = *next;
                changed = true;
            }
            return changed ? std::optional<ExprPtr>(cur) : std::nullopt;
        }};
    return rule;
}

} // namespace

ExprPtr simplify(const ExprPtr& e) {
    return run_rule_fixpoint(e, simplify_rule(), 1000);
}

ExprPtr beta_simplify_fixpoint(const ExprPtr& e, int maxRounds) {
    ExprPtr cur = e;
    for (int round = 0; round < maxRounds; ++round) {
        ExprPtr next = simplify(beta_reduce(cur));
        if (expr_equal(next, cur)) return next;
        cur = next;
    }
    throw IterationLimitExceeded("beta/simplify fixpoint exceeded " +
                                 std::to_string(maxRounds) + " rounds");
}

// ---------------------------------------------------------------------------
// fusion, unnesting
// ---------------------------------------------------------------------------

namespace {

/// g after f as a single function literal: x => g.body[g.param := f.body],
/// reusing f's binder as x.
ExprPtr compose_fun_literals(const ExprPtr& g, const ExprPtr& f) {
    return Expr::make_fun(substitute(fun_body(g), g->var(), fun_body(f)),
                          f->var());
}

/// The kind condition shared by unnesting-shaped rewrites: pushing work
/// inside the inner collection is sound unless a set's duplicate
/// elimination would be skipped under a sequence result.
bool unnest_kinds_ok(CollKind outer, CollKind inner) {
    return inner == outer || inner == CollKind::Seq;
}

std::optional<ExprPtr> fuse_step(const ExprPtr& n) {
    if (n->kind() == ExprKind::Map) {
        const ExprPtr& recv = n->children()[0];
        const ExprPtr& g = n->children()[1];
        if (!is_fun_literal(g)) return std::nullopt;
        if (recv->kind() == ExprKind::Map && is_fun_literal(recv->children()[1]))
            return Expr::make_map(recv->children()[0],
                                  compose_fun_literals(g, recv->children()[1]));
        if (recv->kind() == ExprKind::FlatMap &&
            is_fun_literal(recv->children()[1])) {
            const ExprPtr& f = recv->children()[1];
            CollKind outerKind = recv->tag().coll_kind();
            CollKind innerKind = f->tag().fun_res().coll_kind();
            if (!unnest_kinds_ok(outerKind, innerKind)) return std::nullopt;
            return Expr::make_flat_map(
                recv->children()[0],
                Expr::make_fun(Expr::make_map(fun_body(f), g), f->var()));
        }
        return std::nullopt;
    }
    if (n->kind() == ExprKind::FlatMap) {
        const ExprPtr& recv = n->children()[0];
        const ExprPtr& g = n->children()[1];
        if (recv->kind() == ExprKind::Map && is_fun_literal(g) &&
            is_fun_literal(recv->children()[1]))
            return Expr::make_flat_map(recv->children()[0],
                                       compose_fun_literals(g, recv->children()[1]));
        return std::nullopt;
    }
    if (n->kind() == ExprKind::Filter) {
        const ExprPtr& recv = n->children()[0];
        const ExprPtr& q = n->children()[1];
        if (recv->kind() == ExprKind::Filter && is_fun_literal(q) &&
            is_fun_literal(recv->children()[1])) {
            const ExprPtr& p = recv->children()[1];
            // Predicate order is preserved: p ran first in the input, so it
            // becomes the left (short-circuiting) conjunct.
            ExprPtr body = Expr::make_bool(
                BoolOp::And, fun_body(p),
                substitute(fun_body(q), q->var(), Expr::make_var(p->var())));
            return Expr::make_filter(recv->children()[0],
                                     Expr::make_fun(std::move(body), p->var()));
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<ExprPtr> unnest_step(const ExprPtr& n) {
    if (n->kind() != ExprKind::FlatMap) return std::nullopt;
    const ExprPtr& recv = n->children()[0];
    const ExprPtr& g = n->children()[1];
    if (recv->kind() != ExprKind::FlatMap) return std::nullopt;
    const ExprPtr& f = recv->children()[1];
    if (!is_fun_literal(f)) return std::nullopt;
    CollKind outerKind = recv->tag().coll_kind();
    CollKind innerKind = f->tag().fun_res().coll_kind();
    if (!unnest_kinds_ok(outerKind, innerKind)) return std::nullopt;
    return Expr::make_flat_map(
        recv->children()[0],
        Expr::make_fun(Expr::make_flat_map(fun_body(f), g), f->var()));
}

} // namespace

ExprPtr fuse(const ExprPtr& e) {
    return run_rule_fixpoint(e, RewriteRule{"fuse", fuse_step}, 1000);
}

ExprPtr unnest(const ExprPtr& e) {
    return run_rule_fixpoint(e, RewriteRule{"unnest", unnest_step}, 1000);
}

// ---------------------------------------------------------------------------
// filter hoisting
// ---------------------------------------------------------------------------

namespace {

void split_conjuncts(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e->kind() == ExprKind::BoolBin && e->bool_op() == BoolOp::And) {
        split_conjuncts(e->children()[0], out);
        split_conjuncts(e->children()[1], out);
    } else {
        out.push_back(e);
    }
}

ExprPtr and_chain(const std::vector<ExprPtr>& conjuncts) {
    ExprPtr result = conjuncts[0];
    for (size_t i = 1; i < conjuncts.size(); ++i)
        result = Expr::make_bool(BoolOp::And, result, conjuncts[i]);
    return result;
}

/// Walks the receiver chain of a flatMap body (map/flatMap/filter/toSeq/
/// toSet receivers only: contexts that yield an empty result whenever the
/// filtered collection is empty). Removes conjuncts that mention nothing
/// but the outer binder and returns them for hoisting.
struct HoistWalk {
    int outerBinderId;
    std::vector<ExprPtr> hoisted;

    ExprPtr walk(const ExprPtr& e) {
        switch (e->kind()) {
        case ExprKind::Filter: {
            ExprPtr recv = walk(e->children()[0]);
            const ExprPtr& pred = e->children()[1];
            if (!is_fun_literal(pred)) {
                if (recv.get() == e->children()[0].get()) return e;
                return Expr::make_filter(std::move(recv), pred);
            }
            std::vector<ExprPtr> conjuncts;
            split_conjuncts(fun_body(pred), conjuncts);
            std::vector<ExprPtr> keep;
            bool lifted = false;
            for (const auto& q : conjuncts) {
                if (free_only(q, outerBinderId)) {
                    hoisted.push_back(q);
                    lifted = true;
                } else {
                    keep.push_back(q);
                }
            }
            if (!lifted) {
                if (recv.get() == e->children()[0].get()) return e;
                return Expr::make_filter(std::move(recv), pred);
            }
            if (keep.empty()) return recv; // the whole filter moved out
            return Expr::make_filter(
                std::move(recv), Expr::make_fun(and_chain(keep), pred->var()));
        }
        case ExprKind::Map:
        case ExprKind::FlatMap: {
            ExprPtr recv = walk(e->children()[0]);
            if (recv.get() == e->children()[0].get()) return e;
            return rebuild(e, {std::move(recv), e->children()[1]});
        }
        case ExprKind::ToSeq:
        case ExprKind::ToSet: {
            ExprPtr recv = walk(e->children()[0]);
            if (recv.get() == e->children()[0].get()) return e;
            return rebuild(e, {std::move(recv)});
        }
        default:
            return e;
        }
    }
};

struct HoistRule {
    Gensym& g;

    std::optional<ExprPtr> operator()(const ExprPtr& n) {
        if (n->kind() != ExprKind::FlatMap) return std::nullopt;
        const ExprPtr& lam = n->children()[1];
        if (!is_fun_literal(lam)) return std::nullopt;
        const TypedVar& x = lam->var();
        HoistWalk walk{x.id, {}};
        ExprPtr newBody = walk.walk(fun_body(lam));
        if (walk.hoisted.empty()) return std::nullopt;
        TypedVar xf = g.fresh(x.tag);
        ExprPtr pred = Expr::make_fun(
            substitute(and_chain(walk.hoisted), x, Expr::make_var(xf)), xf);
        ExprPtr filteredOuter =
            Expr::make_filter(n->children()[0], std::move(pred));
        return Expr::make_flat_map(std::move(filteredOuter),
                                   Expr::make_fun(std::move(newBody), x));
    }
};

} // namespace

ExprPtr hoist_filter(const ExprPtr& e) {
    Gensym g(max_var_id(e) + 1);
    return run_rule_fixpoint(e, RewriteRule{"hoist_filter", HoistRule{g}}, 1000);
}

// ---------------------------------------------------------------------------
// hash-join transformation
// ---------------------------------------------------------------------------

/// Named (not in an anonymous namespace) because it holds the passkey
/// friendship that lets the optimizer mint HashJoin nodes.
class HashJoinRewriter {
public:
    explicit HashJoinRewriter(Gensym& g) : g_(g) {}

    bool fired() const { return fired_; }

    ExprPtr run(const ExprPtr& e) {
        std::vector<ExprPtr> cs;
        cs.reserve(e->children().size());
        bool changed = false;
        for (const auto& c : e->children()) {
            ExprPtr c2 = fired_ ? c : run(c);
            changed |= c2.get() != c.get();
            cs.push_back(std::move(c2));
        }
        ExprPtr node = changed ? rebuild(e, std::move(cs)) : e;
        if (!fired_) {
            if (std::optional<ExprPtr> r = try_match(node)) {
                fired_ = true;
                return *r;
            }
        }
        return node;
    }

private:
    std::optional<ExprPtr> try_match(const ExprPtr& n) {
        if (n->kind() != ExprKind::FlatMap) return std::nullopt;
        const ExprPtr& outer = n->children()[0];
        const ExprPtr& lamX = n->children()[1];
        if (!is_fun_literal(lamX)) return std::nullopt;
        const TypedVar& x = lamX->var();

        const ExprPtr& mapNode = fun_body(lamX);
        if (mapNode->kind() != ExprKind::Map) return std::nullopt;
        const ExprPtr& filterNode = mapNode->children()[0];
        const ExprPtr& lamY2 = mapNode->children()[1];
        if (!is_fun_literal(lamY2)) return std::nullopt;
        const TypedVar& y2 = lamY2->var();

        if (filterNode->kind() != ExprKind::Filter) return std::nullopt;
        const ExprPtr& inner = filterNode->children()[0];
        const ExprPtr& lamY = filterNode->children()[1];
        if (!is_fun_literal(lamY)) return std::nullopt;
        const TypedVar& y = lamY->var();

        const ExprPtr& pred = fun_body(lamY);
        if (pred->kind() != ExprKind::Cmp || pred->cmp_op() != CmpOp::Eq)
            return std::nullopt;

        // Equi-join only: one key side per loop variable.
        ExprPtr kx, ky;
        const ExprPtr& l = pred->children()[0];
        const ExprPtr& r = pred->children()[1];
        if (free_only(l, x.id) && free_only(r, y.id)) {
            kx = l;
            ky = r;
        } else if (free_only(l, y.id) && free_only(r, x.id)) {
            kx = r;
            ky = l;
        } else {
            return std::nullopt;
        }

        // The inner collection must not depend on the outer loop variable.
        for (const auto& fv : free_vars(inner))
            if (fv.id == x.id) return std::nullopt;

        // Pair-wise emission matches map-over-inner semantics unless a set
        // inner feeds a sequence result (the unnesting kind condition).
        if (!unnest_kinds_ok(n->tag().coll_kind(), inner->tag().coll_kind()))
            return std::nullopt;

        TypedVar pair =
            g_.fresh(TypeTag::tuple({outer->tag().elem(), inner->tag().elem()}));
        ExprPtr pairRef = Expr::make_var(pair);
        ExprPtr combineBody =
            substitute(substitute(fun_body(lamY2), x, Expr::make_proj(pairRef, 1)),
                       y2, Expr::make_proj(pairRef, 2));
        return Expr::make_hash_join(
            Expr::HashJoinKey{}, outer, inner, Expr::make_fun(kx, x),
            Expr::make_fun(ky, y), Expr::make_fun(std::move(combineBody), pair));
    }

    Gensym& g_;
    bool fired_ = false;
};

ExprPtr hash_join(const ExprPtr& e) {
    Gensym g(max_var_id(e) + 1);
    ExprPtr cur = e;
    for (int round = 0; round < 1000; ++round) {
        HashJoinRewriter rw(g);
        ExprPtr next = rw.run(cur);
        if (!rw.fired()) return cur;
        cur = restore_barendregt(next, g);
    }
    throw IterationLimitExceeded("hash_join did not stabilize in 1000 rounds");
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

Pipeline default_pipeline(int maxRounds) {
    Pipeline p;
    p.phases = {
        *phase_by_name("beta_simplify", maxRounds),
        *phase_by_name("fuse", maxRounds),
        *phase_by_name("unnest", maxRounds),
        *phase_by_name("hoist_filter", maxRounds),
        *phase_by_name("hash_join", maxRounds),
        *phase_by_name("beta_simplify", maxRounds),
    };
    return p;
}

std::vector<std::string> phase_names() {
    return {"beta_simplify", "fuse", "unnest", "hoist_filter", "hash_join"};
}

std::optional<Phase> phase_by_name(const std::string& name, int maxRounds) {
    if (name == "beta_simplify")
        return Phase{name, [maxRounds](const ExprPtr& e) {
                         return beta_simplify_fixpoint(e, maxRounds);
                     }};
    if (name == "fuse") return Phase{name, [](const ExprPtr& e) { return fuse(e); }};
    if (name == "unnest")
        return Phase{name, [](const ExprPtr& e) { return unnest(e); }};
    if (name == "hoist_filter")
        return Phase{name, [](const ExprPtr& e) { return hoist_filter(e); }};
    if (name == "hash_join")
        return Phase{name, [](const ExprPtr& e) { return hash_join(e); }};
    return std::nullopt;
}

ExprPtr optimize(const ExprPtr& e, const Pipeline& pipeline) {
    const TypeTag tagIn = type_of(e);
    const VarSet freeIn = free_vars(e);

    ExprPtr cur = e;
    // Queries built against distinct Gensyms may collide; repair on entry.
    if (!barendregt_ok(cur)) cur = renumber_binders(cur);
    for (const Phase& phase : pipeline.phases) cur = phase.run(cur);
    cur = renumber_binders(cur); // deterministic ids for rendered plans

    if (type_of(cur) != tagIn)
        throw TypingError("optimizer pipeline", tagIn.str(), type_of(cur).str());
    if (!free_vars_subset(cur, freeIn))
        throw TypingError("optimizer pipeline invented a free variable");
    return cur;
}

ExprPtr optimize(const ExprPtr& e) { return optimize(e, default_pipeline()); }

} // namespace collq
