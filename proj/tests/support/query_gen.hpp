#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "collq/builder.hpp"
#include "collq/expr.hpp"
#include "collq/schema.hpp"

namespace collq::testgen {

/// Registry shared by the generator-based suites: Author, Book (with a
/// nested author sequence), and BookData.
const SchemaRegistry& test_registry();

struct GenConfig {
    int maxDepth = 6;
    int maxCollLit = 8; // elements per collection literal
};

/// Type-directed random generator of well-typed closed queries. Division is
/// only generated with nonzero constant divisors, so generated queries
/// never fault at run time and rewrites cannot change error behavior.
class QueryGen {
public:
    explicit QueryGen(std::uint64_t seed, GenConfig cfg = {});

    /// A random closed collection-valued query.
    ExprPtr closed_query();

    /// A random closed expression of the given tag.
    ExprPtr closed_expr(const TypeTag& tag);

    /// A random expression of `tag` under the current scope.
    ExprPtr gen(const TypeTag& tag, int depth);

    /// Random value/type helpers (bounded sizes).
    TypeTag random_elem_tag(int depth);
    Value random_value(const TypeTag& tag);

    std::mt19937_64& rng() { return rng_; }
    Gensym& gensym() { return gensym_; }

    // Trigger-pattern instances for the per-rule oracle suites. All closed.
    ExprPtr map_map_instance();
    ExprPtr filter_filter_instance();
    ExprPtr flatmap_map_instance();
    ExprPtr map_flatmap_instance();
    ExprPtr flatmap_flatmap_instance();
    ExprPtr hoist_instance();
    ExprPtr join_instance();
    ExprPtr simplify_instance();
    /// App(FoasFun(...), arg) redex over random scalars.
    ExprPtr beta_instance();

private:
    int pick(int n); // uniform [0, n)
    bool chance(double p);
    std::int64_t small_int();
    std::string small_string();
    double small_double();
    CollKind random_kind();
    ExprPtr gen_collection(const TypeTag& tag, int depth);
    ExprPtr gen_fun(const TypeTag& tag, int depth);
    ExprPtr var_of(const TypeTag& tag); // nullptr when none in scope

    std::mt19937_64 rng_;
    GenConfig cfg_;
    Gensym gensym_;
    std::vector<TypedVar> scope_;
};

} // namespace collq::testgen
