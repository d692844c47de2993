#include "collq/queries.hpp"

#include "collq/builder.hpp"
#include "collq/error.hpp"

namespace collq {

std::vector<std::string> named_query_names() { return {"records", "equijoin"}; }

bool is_named_query(const std::string& name) {
    for (const auto& n : named_query_names())
        if (n == name) return true;
    return false;
}

std::vector<std::string> named_query_roots(const std::string& name) {
    if (name == "records") return {"books"};
    if (name == "equijoin") return {"left", "right"};
    throw Error("unknown named query '" + name + "'");
}

namespace {

ExprPtr build_records(const SchemaRegistry& reg) {
    Gensym g;
    TypeTag booksTag = TypeTag::set_of(TypeTag::record("Book"));
    return fun(booksTag, [&](const ExprPtr& books) {
        ExprPtr filtered = query_filter(
            books,
            [&](const ExprPtr& book) {
                return eq(field(book, "publisher", reg),
                          lit_string("Pearson Education"));
            },
            g);
        return query_flat_map(
            filtered,
            [&](const ExprPtr& book) {
                return query_map(
                    field(book, "authors", reg),
                    [&](const ExprPtr& author) {
                        return record(
                            reg, "BookData",
                            {field(book, "title", reg),
                             concat(concat(field(author, "firstName", reg),
                                           lit_string(" ")),
                                    field(author, "lastName", reg)),
                             sub(size(field(book, "authors", reg)), lit_int(1))});
                    },
                    g);
            },
            g);
    }, g);
}

ExprPtr build_equijoin(const SchemaRegistry& reg) {
    Gensym g;
    TypeTag leftTag = TypeTag::seq_of(TypeTag::record("LeftRow"));
    TypeTag rightTag = TypeTag::seq_of(TypeTag::record("RightRow"));
    return fun(leftTag, [&](const ExprPtr& left) {
        return fun(rightTag, [&](const ExprPtr& right) {
            return query_flat_map(
                left,
                [&](const ExprPtr& x) {
                    ExprPtr matching = query_filter(
                        right,
                        [&](const ExprPtr& y) {
                            return eq(field(x, "key", reg), field(y, "key", reg));
                        },
                        g);
                    return query_map(
                        matching,
                        [&](const ExprPtr& y) {
                            return tuple({field(x, "payload", reg),
                                          field(y, "payload", reg)});
                        },
                        g);
                },
                g);
        }, g);
    }, g);
}

} // namespace

ExprPtr build_named_query(const std::string& name, const SchemaRegistry& reg) {
    if (name == "records") return build_records(reg);
    if (name == "equijoin") return build_equijoin(reg);
    throw Error("unknown named query '" + name + "'");
}

} // namespace collq
