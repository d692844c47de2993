#include "query_gen.hpp"

#include <array>

#include "collq/error.hpp"

namespace collq::testgen {

const SchemaRegistry& test_registry() {
    static const SchemaRegistry reg = [] {
        SchemaRegistry r;
        r.register_schema("Author", {{"firstName", TypeTag::string_()},
                                     {"lastName", TypeTag::string_()}});
        r.register_schema(
            "Book", {{"title", TypeTag::string_()},
                     {"publisher", TypeTag::string_()},
                     {"authors", TypeTag::seq_of(TypeTag::record("Author"))}});
        r.register_schema("BookData", {{"title", TypeTag::string_()},
                                       {"authorName", TypeTag::string_()},
                                       {"coauthors", TypeTag::int_()}});
        return r;
    }();
    return reg;
}

QueryGen::QueryGen(std::uint64_t seed, GenConfig cfg)
    : rng_(seed), cfg_(cfg), gensym_(1) {}

int QueryGen::pick(int n) {
    return static_cast<int>(rng_() % static_cast<std::uint64_t>(n));
}

bool QueryGen::chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
}

std::int64_t QueryGen::small_int() { return pick(41) - 20; }

std::string QueryGen::small_string() {
    static const std::array<const char*, 8> pool = {
        "", "a", "b", "ab", "x y", "pub", "q\"z", "b\\s"};
    return pool[static_cast<size_t>(pick(static_cast<int>(pool.size())))];
}

double QueryGen::small_double() {
    static const std::array<double, 6> pool = {-2.5, -1.0, 0.0, 0.5, 1.5, 3.25};
    return pool[static_cast<size_t>(pick(static_cast<int>(pool.size())))];
}

CollKind QueryGen::random_kind() {
    return pick(2) == 0 ? CollKind::Seq : CollKind::Set;
}

TypeTag QueryGen::random_elem_tag(int depth) {
    int roll = pick(depth > 0 ? 10 : 7);
    switch (roll) {
    case 0:
    case 1:
    case 2: return TypeTag::int_();
    case 3:
    case 4: return TypeTag::string_();
    case 5: return TypeTag::bool_();
    case 6: return TypeTag::double_();
    case 7:
        return TypeTag::tuple({random_elem_tag(depth - 1), random_elem_tag(depth - 1)});
    case 8:
        return TypeTag::record(pick(2) == 0 ? "Author" : "BookData");
    default:
        return TypeTag::coll(random_kind(), random_elem_tag(depth - 1));
    }
}

Value QueryGen::random_value(const TypeTag& tag) {
    switch (tag.kind()) {
    case TypeTag::Kind::Int: return Value::int_(small_int());
    case TypeTag::Kind::Bool: return Value::bool_(pick(2) == 0);
    case TypeTag::Kind::String: return Value::string_(small_string());
    case TypeTag::Kind::Double: return Value::double_(small_double());
    case TypeTag::Kind::Tuple: {
        std::vector<Value> elems;
        for (const auto& t : tag.tuple_elems()) elems.push_back(random_value(t));
        return Value::tuple(std::move(elems));
    }
    case TypeTag::Kind::Record: {
        const auto& schema = test_registry().at(tag.schema_name());
        std::vector<Value> fields;
        for (const auto& f : schema.fields) fields.push_back(random_value(f.tag));
        return Value::record(schema.name, std::move(fields));
    }
    case TypeTag::Kind::Coll: {
        std::vector<Value> elems;
        int n = pick(5);
        for (int i = 0; i < n; ++i) elems.push_back(random_value(tag.elem()));
        return tag.coll_kind() == CollKind::Seq ? Value::seq(std::move(elems))
                                                : Value::set(std::move(elems));
    }
    case TypeTag::Kind::Fun:
        throw Error("generator does not produce function constants");
    }
    throw Error("unhandled tag in random_value");
}

ExprPtr QueryGen::var_of(const TypeTag& tag) {
    std::vector<const TypedVar*> candidates;
    for (const auto& v : scope_)
        if (v.tag == tag) candidates.push_back(&v);
    if (candidates.empty()) return nullptr;
    return Expr::make_var(*candidates[static_cast<size_t>(
        pick(static_cast<int>(candidates.size())))]);
}

ExprPtr QueryGen::gen_fun(const TypeTag& tag, int depth) {
    return fun(
        tag.fun_arg(),
        [&](const ExprPtr& x) {
            scope_.push_back(x->var());
            ExprPtr body = gen(tag.fun_res(), depth);
            scope_.pop_back();
            return body;
        },
        gensym_);
}

ExprPtr QueryGen::gen_collection(const TypeTag& tag, int depth) {
    const TypeTag& elem = tag.elem();
    const CollKind kind = tag.coll_kind();
    switch (pick(9)) {
    case 0:
    case 1: { // literal
        std::vector<ExprPtr> elems;
        int n = pick(cfg_.maxCollLit + 1);
        for (int i = 0; i < n; ++i) elems.push_back(gen(elem, depth - 1));
        return coll_lit(kind, elem, std::move(elems));
    }
    case 2: { // map
        TypeTag a = random_elem_tag(1);
        ExprPtr src = gen(TypeTag::coll(kind, a), depth - 1);
        return Expr::make_map(std::move(src),
                              gen_fun(TypeTag::fun(a, elem), depth - 1));
    }
    case 3: { // flatMap; the inner kind is free
        TypeTag a = random_elem_tag(1);
        TypeTag innerColl = TypeTag::coll(random_kind(), elem);
        ExprPtr src = gen(TypeTag::coll(kind, a), depth - 1);
        return Expr::make_flat_map(std::move(src),
                                   gen_fun(TypeTag::fun(a, innerColl), depth - 1));
    }
    case 4: { // filter
        ExprPtr src = gen(tag, depth - 1);
        return Expr::make_filter(std::move(src),
                                 gen_fun(TypeTag::fun(elem, TypeTag::bool_()),
                                         depth - 1));
    }
    case 5: { // union
        ExprPtr l = gen(tag, depth - 1);
        return Expr::make_union(std::move(l), gen(tag, depth - 1));
    }
    case 6: { // kind conversion
        TypeTag other = TypeTag::coll(
            kind == CollKind::Seq ? CollKind::Set : CollKind::Seq, elem);
        ExprPtr src = gen(other, depth - 1);
        return kind == CollKind::Seq ? Expr::make_to_seq(std::move(src))
                                     : Expr::make_to_set(std::move(src));
    }
    case 7: // constant collection
        return Expr::make_const(random_value(tag), tag, &test_registry());
    default: { // application
        TypeTag a = random_elem_tag(1);
        ExprPtr f = gen_fun(TypeTag::fun(a, tag), depth - 1);
        return Expr::make_app(std::move(f), gen(a, depth - 1));
    }
    }
}

ExprPtr QueryGen::gen(const TypeTag& tag, int depth) {
    if (ExprPtr v = var_of(tag); v && chance(0.35)) return v;

    if (depth <= 0) {
        if (tag.is_fun()) return gen_fun(tag, 0);
        return Expr::make_const(random_value(tag), tag, &test_registry());
    }

    switch (tag.kind()) {
    case TypeTag::Kind::Int:
    case TypeTag::Kind::Double: {
        const bool isInt = tag.kind() == TypeTag::Kind::Int;
        switch (pick(isInt ? 8 : 6)) {
        case 0:
        case 1:
            return Expr::make_const(random_value(tag), tag);
        case 2:
        case 3: {
            ArithOp op = std::array{ArithOp::Add, ArithOp::Sub,
                                    ArithOp::Mul}[static_cast<size_t>(pick(3))];
            ExprPtr l = gen(tag, depth - 1);
            return Expr::make_arith(op, std::move(l), gen(tag, depth - 1));
        }
        case 4: { // division by a nonzero constant
            ExprPtr l = gen(tag, depth - 1);
            ExprPtr divisor =
                isInt ? lit_int(pick(2) == 0 ? 3 : -7)
                      : lit_double(pick(2) == 0 ? 0.5 : -2.0);
            return Expr::make_arith(ArithOp::Div, std::move(l), std::move(divisor));
        }
        case 5: { // tuple projection
            TypeTag other = random_elem_tag(1);
            bool first = pick(2) == 0;
            TypeTag tup = first ? TypeTag::tuple({tag, other})
                                : TypeTag::tuple({other, tag});
            return Expr::make_proj(gen(tup, depth - 1), first ? 1 : 2);
        }
        case 6: // int only: collection size
            return Expr::make_size(
                gen(TypeTag::coll(random_kind(), random_elem_tag(1)), depth - 1));
        default: // int only: record field
            return Expr::make_field_get(gen(TypeTag::record("BookData"), depth - 1),
                                        "coauthors", test_registry());
        }
    }
    case TypeTag::Kind::Bool: {
        switch (pick(7)) {
        case 0:
            return Expr::make_const(random_value(tag), tag);
        case 1: {
            ExprPtr l = gen(tag, depth - 1);
            return Expr::make_bool(pick(2) == 0 ? BoolOp::And : BoolOp::Or,
                                   std::move(l), gen(tag, depth - 1));
        }
        case 2:
            return Expr::make_not(gen(tag, depth - 1));
        case 3:
        case 4: { // ordered comparison over a scalar tag
            static const std::array<TypeTag (*)(), 3> scalars = {
                &TypeTag::int_, &TypeTag::double_, &TypeTag::string_};
            TypeTag s = scalars[static_cast<size_t>(pick(3))]();
            CmpOp op = std::array{CmpOp::Eq, CmpOp::Ne, CmpOp::Lt,
                                  CmpOp::Le,  CmpOp::Gt,
                                  CmpOp::Ge}[static_cast<size_t>(pick(6))];
            ExprPtr l = gen(s, depth - 1);
            return Expr::make_cmp(op, std::move(l), gen(s, depth - 1));
        }
        default: { // (in)equality over an arbitrary non-function tag
            TypeTag t = random_elem_tag(1);
            ExprPtr l = gen(t, depth - 1);
            return Expr::make_cmp(pick(2) == 0 ? CmpOp::Eq : CmpOp::Ne,
                                  std::move(l), gen(t, depth - 1));
        }
        }
    }
    case TypeTag::Kind::String: {
        switch (pick(5)) {
        case 0:
        case 1:
            return Expr::make_const(random_value(tag), tag);
        case 2: {
            ExprPtr l = gen(tag, depth - 1);
            return Expr::make_concat(std::move(l), gen(tag, depth - 1));
        }
        case 3: {
            const char* fld = pick(2) == 0 ? "firstName" : "lastName";
            return Expr::make_field_get(gen(TypeTag::record("Author"), depth - 1),
                                        fld, test_registry());
        }
        default: {
            TypeTag other = random_elem_tag(1);
            TypeTag tup = TypeTag::tuple({other, tag});
            return Expr::make_proj(gen(tup, depth - 1), 2);
        }
        }
    }
    case TypeTag::Kind::Tuple: {
        std::vector<ExprPtr> elems;
        for (const auto& t : tag.tuple_elems()) elems.push_back(gen(t, depth - 1));
        return Expr::make_tuple(std::move(elems));
    }
    case TypeTag::Kind::Record: {
        const auto& schema = test_registry().at(tag.schema_name());
        std::vector<ExprPtr> fields;
        for (const auto& f : schema.fields) fields.push_back(gen(f.tag, depth - 1));
        return Expr::make_record(schema.name, std::move(fields), test_registry());
    }
    case TypeTag::Kind::Fun:
        return gen_fun(tag, depth - 1);
    case TypeTag::Kind::Coll:
        return gen_collection(tag, depth);
    }
    throw Error("unhandled tag in gen");
}

ExprPtr QueryGen::closed_query() {
    TypeTag tag = TypeTag::coll(random_kind(), random_elem_tag(2));
    return gen(tag, cfg_.maxDepth);
}

ExprPtr QueryGen::closed_expr(const TypeTag& tag) { return gen(tag, cfg_.maxDepth); }

namespace {

TypeTag scalar_tag(int roll) {
    switch (roll % 4) {
    case 0: return TypeTag::int_();
    case 1: return TypeTag::string_();
    case 2: return TypeTag::bool_();
    default: return TypeTag::double_();
    }
}

} // namespace

ExprPtr QueryGen::map_map_instance() {
    TypeTag a = scalar_tag(pick(4)), b = scalar_tag(pick(4)), c = scalar_tag(pick(4));
    CollKind k = random_kind();
    ExprPtr src = gen(TypeTag::coll(k, a), 2);
    ExprPtr inner = Expr::make_map(std::move(src), gen_fun(TypeTag::fun(a, b), 2));
    return Expr::make_map(std::move(inner), gen_fun(TypeTag::fun(b, c), 2));
}

ExprPtr QueryGen::filter_filter_instance() {
    TypeTag a = scalar_tag(pick(4));
    CollKind k = random_kind();
    ExprPtr src = gen(TypeTag::coll(k, a), 2);
    TypeTag predTag = TypeTag::fun(a, TypeTag::bool_());
    ExprPtr inner = Expr::make_filter(std::move(src), gen_fun(predTag, 2));
    return Expr::make_filter(std::move(inner), gen_fun(predTag, 2));
}

ExprPtr QueryGen::flatmap_map_instance() {
    TypeTag a = scalar_tag(pick(4)), b = scalar_tag(pick(4)), c = scalar_tag(pick(4));
    CollKind k = random_kind();
    ExprPtr src = gen(TypeTag::coll(k, a), 2);
    ExprPtr inner = Expr::make_map(std::move(src), gen_fun(TypeTag::fun(a, b), 2));
    TypeTag gTag = TypeTag::fun(b, TypeTag::coll(random_kind(), c));
    return Expr::make_flat_map(std::move(inner), gen_fun(gTag, 2));
}

ExprPtr QueryGen::map_flatmap_instance() {
    TypeTag a = scalar_tag(pick(4)), b = scalar_tag(pick(4)), c = scalar_tag(pick(4));
    CollKind k = random_kind();
    ExprPtr src = gen(TypeTag::coll(k, a), 2);
    TypeTag fTag = TypeTag::fun(a, TypeTag::coll(random_kind(), b));
    ExprPtr inner = Expr::make_flat_map(std::move(src), gen_fun(fTag, 2));
    return Expr::make_map(std::move(inner), gen_fun(TypeTag::fun(b, c), 2));
}

ExprPtr QueryGen::flatmap_flatmap_instance() {
    TypeTag a = scalar_tag(pick(4)), b = scalar_tag(pick(4)), c = scalar_tag(pick(4));
    CollKind k = random_kind();
    ExprPtr src = gen(TypeTag::coll(k, a), 2);
    TypeTag fTag = TypeTag::fun(a, TypeTag::coll(random_kind(), b));
    ExprPtr inner = Expr::make_flat_map(std::move(src), gen_fun(fTag, 2));
    TypeTag gTag = TypeTag::fun(b, TypeTag::coll(random_kind(), c));
    return Expr::make_flat_map(std::move(inner), gen_fun(gTag, 2));
}

ExprPtr QueryGen::hoist_instance() {
    TypeTag a = scalar_tag(pick(4));
    TypeTag b = scalar_tag(pick(4));
    TypeTag c = scalar_tag(pick(4));
    CollKind k = random_kind(), k2 = random_kind();
    ExprPtr outer = gen(TypeTag::coll(k, a), 2);
    const int predShape = pick(3); // 0: x-only, 1: x-only ∧ y, 2: y-only
    return query_flat_map(
        outer,
        [&](const ExprPtr& x) {
            scope_.push_back(x->var());
            ExprPtr inner = gen(TypeTag::coll(k2, b), 2); // may mention x
            ExprPtr filtered = query_filter(
                inner,
                [&](const ExprPtr& y) {
                    // Conjuncts over the outer binder only must not see y.
                    ExprPtr px;
                    {
                        std::vector<TypedVar> onlyX{x->var()};
                        std::swap(scope_, onlyX);
                        px = gen(TypeTag::bool_(), 2);
                        std::swap(scope_, onlyX);
                    }
                    scope_.push_back(y->var());
                    ExprPtr py = gen(TypeTag::bool_(), 2);
                    scope_.pop_back();
                    if (predShape == 0) return px;
                    if (predShape == 1) return and_(px, py);
                    return py;
                },
                gensym_);
            ExprPtr result = query_map(
                filtered,
                [&](const ExprPtr& y2) {
                    scope_.push_back(y2->var());
                    ExprPtr r = gen(c, 2);
                    scope_.pop_back();
                    return r;
                },
                gensym_);
            scope_.pop_back();
            return result;
        },
        gensym_);
}

ExprPtr QueryGen::join_instance() {
    TypeTag keyTag = pick(2) == 0 ? TypeTag::int_() : TypeTag::string_();
    TypeTag to = TypeTag::tuple({keyTag, TypeTag::string_()});
    TypeTag ti = TypeTag::tuple({keyTag, TypeTag::int_()});
    CollKind k1 = random_kind(), k2 = random_kind();

    // Dense keys so matches actually occur.
    auto denseKey = [&]() {
        return keyTag == TypeTag::int_()
                   ? Value::int_(pick(4))
                   : Value::string_(std::string(1, static_cast<char>('a' + pick(4))));
    };
    auto side = [&](const TypeTag& elemTag, bool payloadString) {
        std::vector<ExprPtr> elems;
        int n = 2 + pick(7);
        for (int i = 0; i < n; ++i) {
            Value payload = payloadString
                                ? Value::string_(small_string())
                                : Value::int_(small_int());
            elems.push_back(Expr::make_const(
                Value::tuple({denseKey(), std::move(payload)}), elemTag));
        }
        return coll_lit(payloadString ? k1 : k2, elemTag, std::move(elems));
    };
    ExprPtr outer = side(to, true);
    ExprPtr inner = side(ti, false);
    const bool swapEq = pick(2) == 0;

    return query_flat_map(
        outer,
        [&](const ExprPtr& x) {
            ExprPtr filtered = query_filter(
                inner,
                [&](const ExprPtr& y) {
                    ExprPtr kx = proj(x, 1);
                    ExprPtr ky = proj(y, 1);
                    return swapEq ? eq(std::move(ky), std::move(kx))
                                  : eq(std::move(kx), std::move(ky));
                },
                gensym_);
            return query_map(
                filtered,
                [&](const ExprPtr& y) {
                    return tuple({proj(x, 2), proj(y, 2)});
                },
                gensym_);
        },
        gensym_);
}

ExprPtr QueryGen::simplify_instance() {
    switch (pick(4)) {
    case 0: // constant-heavy scalar tree
        return gen(scalar_tag(pick(4)), 4);
    case 1: { // tuple projection through a literal tuple
        TypeTag a = scalar_tag(pick(4)), b = scalar_tag(pick(4));
        ExprPtr t = Expr::make_tuple({gen(a, 3), gen(b, 3)});
        return Expr::make_proj(std::move(t), pick(2) + 1);
    }
    case 2: { // record field through a literal record
        ExprPtr r = gen(TypeTag::record("BookData"), 3);
        const char* fld =
            std::array{"title", "authorName", "coauthors"}[static_cast<size_t>(pick(3))];
        return Expr::make_field_get(std::move(r), fld, test_registry());
    }
    default: { // identity-law shapes
        switch (pick(4)) {
        case 0: return and_(lit_bool(true), gen(TypeTag::bool_(), 3));
        case 1: return or_(gen(TypeTag::bool_(), 3), lit_bool(false));
        case 2: return add(gen(TypeTag::int_(), 3), lit_int(0));
        default: return mul(lit_int(1), gen(TypeTag::int_(), 3));
        }
    }
    }
}

ExprPtr QueryGen::beta_instance() {
    TypeTag a = scalar_tag(pick(4)), b = scalar_tag(pick(4));
    ExprPtr f = gen_fun(TypeTag::fun(a, b), 3);
    return Expr::make_app(std::move(f), gen(a, 3));
}

} // namespace collq::testgen
