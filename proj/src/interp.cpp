#include "collq/interp.hpp"

#include <unordered_map>

#include "collq/error.hpp"

namespace collq {

std::map<int, Value> Env::flatten(const EnvPtr& env) {
    std::map<int, Value> out;
    for (const Env* e = env.get(); e; e = e->parent_.get())
        out.emplace(e->varId_, e->value_); // emplace keeps the innermost
    return out;
}

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                     static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                     static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                     static_cast<std::uint64_t>(b));
}

} // namespace

Value eval_arith_scalar(ArithOp op, const Value& l, const Value& r) {
    if (l.kind() == Value::Kind::Int) {
        std::int64_t a = l.as_int(), b = r.as_int();
        switch (op) {
        case ArithOp::Add: return Value::int_(wrap_add(a, b));
        case ArithOp::Sub: return Value::int_(wrap_sub(a, b));
        case ArithOp::Mul: return Value::int_(wrap_mul(a, b));
        case ArithOp::Div:
            if (b == 0) throw DivisionByZero();
            // Truncating division; INT64_MIN / -1 wraps like the other ops.
            if (b == -1) return Value::int_(wrap_sub(0, a));
            return Value::int_(a / b);
        }
    }
    double a = l.as_double(), b = r.as_double();
    switch (op) {
    case ArithOp::Add: return Value::double_(a + b);
    case ArithOp::Sub: return Value::double_(a - b);
    case ArithOp::Mul: return Value::double_(a * b);
    case ArithOp::Div:
        if (b == 0.0) throw DivisionByZero();
        return Value::double_(a / b);
    }
    throw EvalError("unreachable arithmetic case");
}

Value eval_cmp_scalar(CmpOp op, const Value& l, const Value& r) {
    int c = value_compare(l, r);
    switch (op) {
    case CmpOp::Eq: return Value::bool_(c == 0);
    case CmpOp::Ne: return Value::bool_(c != 0);
    case CmpOp::Lt: return Value::bool_(c < 0);
    case CmpOp::Le: return Value::bool_(c <= 0);
    case CmpOp::Gt: return Value::bool_(c > 0);
    case CmpOp::Ge: return Value::bool_(c >= 0);
    }
    throw EvalError("unreachable comparison case");
}

namespace {

[[noreturn]] void ir_bug(const std::string& what) {
    // Trees are construction-checked, so hitting this means the IR itself
    // is broken, not that the user made a mistake.
    throw EvalError("internal type mismatch: " + what);
}

struct Interp {
    CostCounters& counters;

    Value eval(const ExprPtr& e, const EnvPtr& env) {
        switch (e->kind()) {
        case ExprKind::Const:
            return e->const_value();
        case ExprKind::VarRef: {
            const Value* v = Env::lookup(env, e->var().id);
            if (!v) throw UnboundVariable(e->var().id);
            return *v;
        }
        case ExprKind::FoasFun:
            return Value::closure(e->var(), e->children()[0], env);
        case ExprKind::App: {
            Value fn = eval(e->children()[0], env);
            Value arg = eval(e->children()[1], env);
            return apply(fn, std::move(arg));
        }
        case ExprKind::StringConcat: {
            Value l = eval(e->children()[0], env);
            Value r = eval(e->children()[1], env);
            return Value::string_(l.as_string() + r.as_string());
        }
        case ExprKind::ArithBin: {
            Value l = eval(e->children()[0], env);
            Value r = eval(e->children()[1], env);
            return eval_arith_scalar(e->arith_op(), l, r);
        }
        case ExprKind::Cmp: {
            Value l = eval(e->children()[0], env);
            Value r = eval(e->children()[1], env);
            return eval_cmp_scalar(e->cmp_op(), l, r);
        }
        case ExprKind::BoolBin: {
            bool l = eval(e->children()[0], env).as_bool();
            if (e->bool_op() == BoolOp::And)
                return l ? eval(e->children()[1], env) : Value::bool_(false);
            return l ? Value::bool_(true) : eval(e->children()[1], env);
        }
        case ExprKind::Not:
            return Value::bool_(!eval(e->children()[0], env).as_bool());
        case ExprKind::TupleMake: {
            std::vector<Value> elems;
            elems.reserve(e->children().size());
            for (const auto& c : e->children()) elems.push_back(eval(c, env));
            return Value::tuple(std::move(elems));
        }
        case ExprKind::TupleProj:
            return eval(e->children()[0], env)
                .tuple_elems()[static_cast<size_t>(e->proj_index() - 1)];
        case ExprKind::RecordMake: {
            std::vector<Value> fields;
            fields.reserve(e->children().size());
            for (const auto& c : e->children()) fields.push_back(eval(c, env));
            return Value::record(e->name(), std::move(fields));
        }
        case ExprKind::FieldGet:
            return eval(e->children()[0], env)
                .record_data()
                .fields[static_cast<size_t>(e->field_index())];
        case ExprKind::CollLit: {
            std::vector<Value> elems;
            elems.reserve(e->children().size());
            for (const auto& c : e->children()) elems.push_back(eval(c, env));
            return e->lit_kind() == CollKind::Seq ? Value::seq(std::move(elems))
                                                  : Value::set(std::move(elems));
        }
        case ExprKind::Map: {
            Value coll = eval(e->children()[0], env);
            Value fn = eval(e->children()[1], env);
            std::vector<Value> out;
            out.reserve(coll.elems().size());
            for (const auto& x : coll.elems()) {
                ++counters.elementsVisited;
                out.push_back(apply(fn, x));
            }
            return e->tag().coll_kind() == CollKind::Seq
                       ? Value::seq(std::move(out))
                       : Value::set(std::move(out));
        }
        case ExprKind::FlatMap: {
            Value coll = eval(e->children()[0], env);
            Value fn = eval(e->children()[1], env);
            std::vector<Value> out;
            for (const auto& x : coll.elems()) {
                ++counters.elementsVisited;
                Value part = apply(fn, x);
                // Inner results of any kind are coerced element-by-element
                // into the receiver's kind.
                for (const auto& y : part.elems()) out.push_back(y);
            }
            return e->tag().coll_kind() == CollKind::Seq
                       ? Value::seq(std::move(out))
                       : Value::set(std::move(out));
        }
        case ExprKind::Filter: {
            Value coll = eval(e->children()[0], env);
            Value fn = eval(e->children()[1], env);
            std::vector<Value> out;
            for (const auto& x : coll.elems()) {
                ++counters.elementsVisited;
                ++counters.predicateEvals;
                if (apply(fn, x).as_bool()) out.push_back(x);
            }
            // Filtering preserves kind; a filtered set is already sorted and
            // unique, so rebuilding it through Value::set is just a no-op
            // normalization.
            return e->tag().coll_kind() == CollKind::Seq
                       ? Value::seq(std::move(out))
                       : Value::set(std::move(out));
        }
        case ExprKind::Size:
            return Value::int_(static_cast<std::int64_t>(
                eval(e->children()[0], env).elems().size()));
        case ExprKind::Union: {
            Value l = eval(e->children()[0], env);
            Value r = eval(e->children()[1], env);
            std::vector<Value> out = l.elems();
            out.insert(out.end(), r.elems().begin(), r.elems().end());
            return e->tag().coll_kind() == CollKind::Seq
                       ? Value::seq(std::move(out))
                       : Value::set(std::move(out));
        }
        case ExprKind::ToSeq:
            // Set elements are stored in canonical order, so the resulting
            // sequence order is deterministic.
            return Value::seq(eval(e->children()[0], env).elems());
        case ExprKind::ToSet:
            return Value::set(eval(e->children()[0], env).elems());
        case ExprKind::HashJoin: {
            Value outer = eval(e->children()[0], env);
            Value inner = eval(e->children()[1], env);
            Value okey = eval(e->children()[2], env);
            Value ikey = eval(e->children()[3], env);
            Value combine = eval(e->children()[4], env);
            std::unordered_map<Value, std::vector<Value>, ValueHash, ValueEq> index;
            for (const auto& y : inner.elems()) {
                ++counters.elementsVisited;
                index[apply(ikey, y)].push_back(y);
            }
            std::vector<Value> out;
            for (const auto& x : outer.elems()) {
                ++counters.hashLookups;
                auto it = index.find(apply(okey, x));
                if (it == index.end()) continue;
                for (const auto& y : it->second)
                    out.push_back(apply(combine, Value::tuple({x, y})));
            }
            return e->tag().coll_kind() == CollKind::Seq
                       ? Value::seq(std::move(out))
                       : Value::set(std::move(out));
        }
        }
        ir_bug("unknown node kind");
    }

    Value apply(const Value& fn, Value arg) {
        if (fn.kind() != Value::Kind::Closure) ir_bug("applied a non-closure");
        const auto& c = fn.closure_data();
        EnvPtr extended = Env::extend(c.env, c.param.id, std::move(arg));
        return eval(c.body, extended);
    }
};

} // namespace

Value interpret(const ExprPtr& e, const EnvPtr& env, CostCounters& counters) {
    Interp in{counters};
    return in.eval(e, env);
}

EvalResult interpret_closed(const ExprPtr& e) {
    CostCounters counters;
    Value v = interpret(e, nullptr, counters);
    return EvalResult{std::move(v), counters};
}

Value apply_function(const Value& fn, Value arg, CostCounters& counters) {
    Interp in{counters};
    return in.apply(fn, std::move(arg));
}

} // namespace collq
