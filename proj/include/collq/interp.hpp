#pragma once

#include <cstdint>
#include <map>

#include "collq/expr.hpp"
#include "collq/value.hpp"

namespace collq {

/// Immutable environment: a persistent chain of (variable id, Value)
/// bindings. The empty environment is a null EnvPtr. Lookup of an unbound
/// id is an error, never a default.
class Env {
public:
    static EnvPtr extend(EnvPtr parent, int varId, Value v) {
        return std::make_shared<const Env>(Env(std::move(parent), varId, std::move(v)));
    }

    /// Walks the chain; nullptr when unbound.
    static const Value* lookup(const EnvPtr& env, int varId) {
        for (const Env* e = env.get(); e; e = e->parent_.get())
            if (e->varId_ == varId) return &e->value_;
        return nullptr;
    }

    /// Visible bindings, innermost shadowing outermost. Used by value
    /// comparison of closures.
    static std::map<int, Value> flatten(const EnvPtr& env);

private:
    Env(EnvPtr parent, int varId, Value v)
        : parent_(std::move(parent)), varId_(varId), value_(std::move(v)) {}

    EnvPtr parent_;
    int varId_;
    Value value_;
};

/// Instrumentation for the complexity-class measurements. Monotonically
/// non-decreasing during one interpretation.
///
/// Counting discipline: map and flatMap count one element visit per input
/// element; filter counts one element visit plus one predicate evaluation
/// per input element; hash join counts one element visit per inner element
/// while building its key multimap and one hash lookup per outer element.
struct CostCounters {
    std::int64_t elementsVisited = 0;
    std::int64_t predicateEvals = 0;
    std::int64_t hashLookups = 0;
};

/// Big-step environment-based evaluation. Every free variable of e must be
/// bound in env with a matching tag. Throws UnboundVariable or
/// DivisionByZero for runtime errors; anything else indicates an IR bug
/// (trees are construction-checked).
Value interpret(const ExprPtr& e, const EnvPtr& env, CostCounters& counters);

struct EvalResult {
    Value value;
    CostCounters counters;
};

/// interpret with an empty environment and fresh counters; e must be closed.
EvalResult interpret_closed(const ExprPtr& e);

/// Applies a closure value to an argument (used to bind dataset roots to
/// root-parameterized query plans).
Value apply_function(const Value& fn, Value arg, CostCounters& counters);

/// Scalar operator semantics, shared between the interpreter and constant
/// folding so the two can never disagree. Integer arithmetic wraps per
/// 64-bit two's complement; Div throws DivisionByZero on a zero divisor
/// (both int and double).
Value eval_arith_scalar(ArithOp op, const Value& l, const Value& r);
Value eval_cmp_scalar(CmpOp op, const Value& l, const Value& r);

} // namespace collq
