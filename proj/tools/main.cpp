// Command-line front door: run built-in or serialized query plans against
// JSON datasets, toggle optimization phases, print plans, and benchmark the
// join transformation.
//
// Exit codes: 0 success, 2 usage error, 3 parse/typing error, 4 runtime
// evaluation error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "collq/builder.hpp"
#include "collq/dataset.hpp"
#include "collq/error.hpp"
#include "collq/interp.hpp"
#include "collq/optimizer.hpp"
#include "collq/plan_text.hpp"
#include "collq/queries.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParseOrTyping = 3;
constexpr int kExitEval = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

collq::Pipeline pipeline_from_flag(const std::string& phasesCsv) {
    if (phasesCsv.empty()) return collq::default_pipeline();
    collq::Pipeline p;
    std::stringstream ss(phasesCsv);
    std::string name;
    while (std::getline(ss, name, ',')) {
        auto phase = collq::phase_by_name(name);
        if (!phase) {
            std::string valid;
            for (const auto& n : collq::phase_names()) {
                if (!valid.empty()) valid += ", ";
                valid += n;
            }
            throw UsageError("unknown phase '" + name + "' (valid phases: " +
                             valid + ")");
        }
        p.phases.push_back(std::move(*phase));
    }
    return p;
}

/// Builds the query expression plus the root names to apply, from either a
/// built-in name or a plan file. Plans are functions of the descriptor's
/// roots in declaration order.
collq::ExprPtr load_query(const std::string& queryName, const std::string& planPath,
                          const collq::SchemaRegistry& reg,
                          const std::vector<collq::RootDecl>& roots,
                          std::vector<std::string>& rootNamesOut) {
    if (!queryName.empty()) {
        if (!collq::is_named_query(queryName)) {
            std::string valid;
            for (const auto& n : collq::named_query_names()) {
                if (!valid.empty()) valid += ", ";
                valid += n;
            }
            throw UsageError("unknown query '" + queryName + "' (built-in queries: " +
                             valid + ")");
        }
        rootNamesOut = collq::named_query_roots(queryName);
        return collq::build_named_query(queryName, reg);
    }
    for (const auto& r : roots) rootNamesOut.push_back(r.name);
    return collq::parse_plan(read_file(planPath), reg);
}

/// Evaluates a (possibly root-parameterized) plan: interprets it, then
/// applies root collections while the result is still a function.
collq::Value evaluate_plan(const collq::ExprPtr& plan,
                           const std::vector<std::string>& rootNames,
                           const std::map<std::string, collq::Value>& collections,
                           collq::CostCounters& counters) {
    collq::Value v = collq::interpret(plan, nullptr, counters);
    size_t next = 0;
    while (v.kind() == collq::Value::Kind::Closure && next < rootNames.size()) {
        auto it = collections.find(rootNames[next]);
        if (it == collections.end())
            throw collq::DataError("no data for root collection '" +
                                   rootNames[next] + "'");
        v = collq::apply_function(v, it->second, counters);
        ++next;
    }
    if (v.kind() == collq::Value::Kind::Closure)
        throw collq::TypingError(
            "plan still expects arguments after binding all root collections");
    return v;
}

nlohmann::json counters_json(const collq::CostCounters& c) {
    return {{"elementsVisited", c.elementsVisited},
            {"predicateEvals", c.predicateEvals},
            {"hashLookups", c.hashLookups}};
}

struct RunArgs {
    std::string schemaPath, dataPath, queryName, planPath, phasesCsv, outPath;
    bool noOpt = false, explain = false, stats = false;
};

int cmd_run(const RunArgs& args) {
    auto [reg, roots] = collq::load_descriptor(read_file(args.schemaPath));
    auto collections = collq::load_data(reg, roots, read_file(args.dataPath));

    std::vector<std::string> rootNames;
    collq::ExprPtr plan = load_query(args.queryName, args.planPath, reg, roots,
                                     rootNames);
    collq::Pipeline pipeline = pipeline_from_flag(args.phasesCsv);

    collq::ExprPtr finalPlan =
        args.noOpt ? plan : collq::optimize(plan, pipeline);
    if (args.explain) {
        std::cerr << "before:\n" << collq::print_plan_pretty(plan) << "\n"
                  << "after:\n" << collq::print_plan_pretty(finalPlan) << "\n";
    }

    collq::CostCounters counters;
    collq::Value result = evaluate_plan(finalPlan, rootNames, collections, counters);
    std::string rendered = collq::value_to_json(result, reg).dump();

    if (!args.outPath.empty()) {
        std::ofstream out(args.outPath, std::ios::binary);
        if (!out) throw UsageError("cannot write file: " + args.outPath);
        out << rendered << "\n";
    } else {
        std::cout << rendered << "\n";
    }
    if (args.stats) std::cerr << counters_json(counters).dump() << "\n";
    return 0;
}

struct ExplainArgs {
    std::string schemaPath, queryName, planPath;
};

int cmd_explain(const ExplainArgs& args) {
    auto [reg, roots] = collq::load_descriptor(read_file(args.schemaPath));
    std::vector<std::string> rootNames;
    collq::ExprPtr plan = load_query(args.queryName, args.planPath, reg, roots,
                                     rootNames);
    collq::ExprPtr optimized = collq::optimize(plan);
    std::cout << "before:\n" << collq::print_plan_pretty(plan) << "\n"
              << "after:\n" << collq::print_plan_pretty(optimized) << "\n";
    return 0;
}

struct BenchArgs {
    int joinN = 100;
    std::uint64_t seed = 0;
    bool noOpt = false;
};

int cmd_bench(const BenchArgs& args) {
    collq::Dataset ds = collq::gen_join_benchmark(args.joinN, args.seed);
    collq::ExprPtr plan = collq::build_named_query("equijoin", ds.registry);
    if (!args.noOpt) plan = collq::optimize(plan);

    collq::CostCounters counters;
    auto t0 = std::chrono::steady_clock::now();
    collq::Value result =
        evaluate_plan(plan, {"left", "right"}, ds.collections, counters);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    nlohmann::json out = counters_json(counters);
    out["n"] = args.joinN;
    out["seed"] = args.seed;
    out["optimized"] = !args.noOpt;
    out["resultSize"] = static_cast<std::int64_t>(result.elems().size());
    out["wallTimeMs"] = ms;
    std::cout << out.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collection-query reification, optimization, and interpretation"};
    app.require_subcommand(1);

    RunArgs runArgs;
    CLI::App* run = app.add_subcommand("run", "evaluate a query against a dataset");
    run->add_option("--schema", runArgs.schemaPath, "dataset descriptor (JSON)")
        ->required();
    run->add_option("--data", runArgs.dataPath, "data document (JSON)")->required();
    auto* runQuery = run->add_option("--query", runArgs.queryName, "built-in query name");
    auto* runPlan = run->add_option("--plan", runArgs.planPath, "plan text file");
    runQuery->excludes(runPlan);
    run->add_flag("--no-opt", runArgs.noOpt, "skip optimization");
    run->add_option("--phases", runArgs.phasesCsv, "comma-separated phase list");
    run->add_flag("--explain", runArgs.explain, "print plans to stderr");
    run->add_flag("--stats", runArgs.stats, "print cost counters to stderr");
    run->add_option("--out", runArgs.outPath, "write the result here instead of stdout");

    ExplainArgs explainArgs;
    CLI::App* explain =
        app.add_subcommand("explain", "print a plan before and after optimization");
    explain->add_option("--schema", explainArgs.schemaPath, "dataset descriptor (JSON)")
        ->required();
    auto* exQuery = explain->add_option("--query", explainArgs.queryName,
                                        "built-in query name");
    auto* exPlan = explain->add_option("--plan", explainArgs.planPath,
                                       "plan text file");
    exQuery->excludes(exPlan);

    BenchArgs benchArgs;
    CLI::App* bench = app.add_subcommand("bench", "run the join benchmark");
    bench->add_option("--join-n", benchArgs.joinN, "rows per side")
        ->required()
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", benchArgs.seed, "benchmark data seed");
    bench->add_flag("--no-opt", benchArgs.noOpt, "skip optimization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            if (runArgs.queryName.empty() == runArgs.planPath.empty())
                throw UsageError("run needs exactly one of --query or --plan");
            return cmd_run(runArgs);
        }
        if (explain->parsed()) {
            if (explainArgs.queryName.empty() == explainArgs.planPath.empty())
                throw UsageError("explain needs exactly one of --query or --plan");
            return cmd_explain(explainArgs);
        }
        return cmd_bench(benchArgs);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const collq::EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEval;
    } catch (const collq::IterationLimitExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEval;
    } catch (const collq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParseOrTyping;
    }
}
