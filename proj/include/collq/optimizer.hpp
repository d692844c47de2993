#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "collq/expr.hpp"

namespace collq {

/// A named partial tree transformation. Contract (checked whenever a rule
/// fires): the result has the same TypeTag as the input and introduces no
/// new free variables.
struct RewriteRule {
    std::string name;
    std::function<std::optional<ExprPtr>(const ExprPtr&)> apply;
};

/// One bottom-up pass: children are rewritten first (post-order), then the
/// rule is applied once at the rebuilt node if it matches. Deterministic.
/// A rule that violates its contract surfaces loudly as TypingError.
ExprPtr rewrite_bottom_up(const ExprPtr& e, const RewriteRule& rule);

/// Replaces every free occurrence of v in e. Capture is impossible while
/// the Barendregt convention holds (asserted in debug builds). Throws
/// TypingError when the replacement's tag differs from v's.
ExprPtr substitute(const ExprPtr& e, const TypedVar& v, const ExprPtr& replacement);

/// Rewrites every App(FoasFun(body, v), arg) redex to body[v := arg],
/// bottom-up to a fixpoint. Binders duplicated by substitution are
/// freshened, so the Barendregt convention holds on output.
ExprPtr beta_reduce(const ExprPtr& e);

/// Bundle of bottom-up simplifications: constant folding (except division
/// by a zero constant, which is left intact), reassociation of int add/mul
/// and string concatenation to gather constants (double arithmetic is never
/// reassociated), tuple/record projection simplification, and
/// boolean/arithmetic identity laws.
ExprPtr simplify(const ExprPtr& e);

/// Alternates beta_reduce and simplify until two successive iterates are
/// structurally equal. The IR has no general recursion, so this terminates;
/// exceeding the round cap signals an optimizer bug via
/// IterationLimitExceeded.
ExprPtr beta_simplify_fixpoint(const ExprPtr& e, int maxRounds = 1000);

/// Fusion of bulk operators: map/map, filter/filter, flatMap/map, and
/// map-over-flatMap (the last subject to the unnesting kind condition).
ExprPtr fuse(const ExprPtr& e);

/// Flattens flatMap-of-flatMap by associativity. Applied only when the
/// inner collection's kind equals the outer kind or the inner kind is a
/// sequence; rewrites that would skip a set's duplicate elimination under a
/// sequence result are not applied.
ExprPtr unnest(const ExprPtr& e);

/// Moves conjuncts of inner filter predicates that depend only on the
/// enclosing flatMap binder outward onto the outer collection. Splitting
/// operates over top-level And chains only.
ExprPtr hoist_filter(const ExprPtr& e);

/// Rewrites the nested-loop equi-join pattern
///   flatMap(outer, x => map(filter(inner, y => kx == ky), y2 => r))
/// into a HashJoin node when kx depends only on x, ky only on y, and the
/// inner collection does not mention x. Only the innermost match per
/// traversal is rewritten per pass; the phase runs to a fixpoint.
ExprPtr hash_join(const ExprPtr& e);

/// A named, total, semantics-preserving transformation. Each phase restores
/// the Barendregt convention before returning.
struct Phase {
    std::string name;
    std::function<ExprPtr(const ExprPtr&)> run;
};

struct Pipeline {
    std::vector<Phase> phases;
};

/// [beta_simplify, fuse, unnest, hoist_filter, hash_join, beta_simplify].
Pipeline default_pipeline(int maxRounds = 1000);

/// Phase names accepted by the CLI's --phases flag.
std::vector<std::string> phase_names();
std::optional<Phase> phase_by_name(const std::string& name, int maxRounds = 1000);

/// Runs the phases in order. Repairs binder-id collisions on entry and
/// renumbers binders to consecutive ids on exit so rendered plans are
/// deterministic. The output is well-typed with the input's TypeTag and no
/// new free variables.
ExprPtr optimize(const ExprPtr& e, const Pipeline& pipeline);
ExprPtr optimize(const ExprPtr& e);

} // namespace collq
