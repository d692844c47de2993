#include "collq/type_tag.hpp"

#include <utility>

#include "collq/error.hpp"
#include "collq/schema.hpp"

namespace collq {

std::string to_string(CollKind k) {
    return k == CollKind::Seq ? "seq" : "set";
}

TypeTag TypeTag::int_() { return TypeTag(Kind::Int); }
TypeTag TypeTag::bool_() { return TypeTag(Kind::Bool); }
TypeTag TypeTag::string_() { return TypeTag(Kind::String); }
TypeTag TypeTag::double_() { return TypeTag(Kind::Double); }

TypeTag TypeTag::tuple(std::vector<TypeTag> elems) {
    if (elems.size() < 2)
        throw TypingError("tuple type needs arity >= 2, got arity " +
                          std::to_string(elems.size()));
    TypeTag t(Kind::Tuple);
    t.params_ = std::move(elems);
    return t;
}

TypeTag TypeTag::record(std::string schemaName) {
    TypeTag t(Kind::Record);
    t.schemaName_ = std::move(schemaName);
    return t;
}

TypeTag TypeTag::fun(TypeTag arg, TypeTag res) {
    TypeTag t(Kind::Fun);
    t.params_.push_back(std::move(arg));
    t.params_.push_back(std::move(res));
    return t;
}

TypeTag TypeTag::coll(CollKind kind, TypeTag elem) {
    TypeTag t(Kind::Coll);
    t.collKind_ = kind;
    t.params_.push_back(std::move(elem));
    return t;
}

const std::vector<TypeTag>& TypeTag::tuple_elems() const { return params_; }
const std::string& TypeTag::schema_name() const { return schemaName_; }
const TypeTag& TypeTag::fun_arg() const { return params_[0]; }
const TypeTag& TypeTag::fun_res() const { return params_[1]; }
CollKind TypeTag::coll_kind() const { return collKind_; }
const TypeTag& TypeTag::elem() const { return params_[0]; }

std::string TypeTag::str() const {
    switch (kind_) {
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::String: return "string";
    case Kind::Double: return "double";
    case Kind::Record: return "record<" + schemaName_ + ">";
    case Kind::Tuple: {
        std::string s = "tuple<";
        for (size_t i = 0; i < params_.size(); ++i) {
            if (i) s += ',';
            s += params_[i].str();
        }
        return s + ">";
    }
    case Kind::Fun:
        return "fun<" + params_[0].str() + "," + params_[1].str() + ">";
    case Kind::Coll:
        return to_string(collKind_) + "<" + params_[0].str() + ">";
    }
    return "?";
}

bool operator==(const TypeTag& a, const TypeTag& b) {
    return tag_compare(a, b) == 0;
}

int tag_compare(const TypeTag& a, const TypeTag& b) {
    if (a.kind() != b.kind())
        return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
    case TypeTag::Kind::Int:
    case TypeTag::Kind::Bool:
    case TypeTag::Kind::String:
    case TypeTag::Kind::Double:
        return 0;
    case TypeTag::Kind::Record:
        return a.schema_name().compare(b.schema_name());
    case TypeTag::Kind::Tuple: {
        const auto& xs = a.tuple_elems();
        const auto& ys = b.tuple_elems();
        if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
        for (size_t i = 0; i < xs.size(); ++i)
            if (int c = tag_compare(xs[i], ys[i])) return c;
        return 0;
    }
    case TypeTag::Kind::Fun:
        if (int c = tag_compare(a.fun_arg(), b.fun_arg())) return c;
        return tag_compare(a.fun_res(), b.fun_res());
    case TypeTag::Kind::Coll:
        if (a.coll_kind() != b.coll_kind())
            return a.coll_kind() == CollKind::Seq ? -1 : 1;
        return tag_compare(a.elem(), b.elem());
    }
    return 0;
}

namespace {

// Recursive-descent parser over the canonical type grammar.
struct TypeNameParser {
    std::string_view text;
    size_t pos = 0;
    const SchemaRegistry* reg;
    bool allowFun;

    [[noreturn]] void fail(const std::string& why) {
        throw ParseError("bad type name '" + std::string(text) + "': " + why);
    }

    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string ident() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected identifier at offset " + std::to_string(pos));
        return std::string(text.substr(start, pos - start));
    }

    TypeTag parse() {
        std::string head = ident();
        if (head == "int") return TypeTag::int_();
        if (head == "bool") return TypeTag::bool_();
        if (head == "string") return TypeTag::string_();
        if (head == "double") return TypeTag::double_();
        if (head == "record") {
            if (!eat('<')) fail("record needs <Name>");
            std::string name = ident();
            if (!eat('>')) fail("unterminated record<...>");
            if (reg && !reg->contains(name))
                throw SchemaError("unknown referenced schema '" + name + "'");
            return TypeTag::record(std::move(name));
        }
        if (head == "seq" || head == "set") {
            if (!eat('<')) fail(head + " needs <elem>");
            TypeTag elem = parse();
            if (!eat('>')) fail("unterminated " + head + "<...>");
            return TypeTag::coll(head == "seq" ? CollKind::Seq : CollKind::Set,
                                 std::move(elem));
        }
        if (head == "tuple") {
            if (!eat('<')) fail("tuple needs <elems>");
            std::vector<TypeTag> elems;
            elems.push_back(parse());
            while (eat(',')) elems.push_back(parse());
            if (!eat('>')) fail("unterminated tuple<...>");
            return TypeTag::tuple(std::move(elems));
        }
        if (head == "fun") {
            if (!allowFun) fail("fun<...> not allowed in this context");
            if (!eat('<')) fail("fun needs <arg,res>");
            TypeTag arg = parse();
            if (!eat(',')) fail("fun needs two parameters");
            TypeTag res = parse();
            if (!eat('>')) fail("unterminated fun<...>");
            return TypeTag::fun(std::move(arg), std::move(res));
        }
        fail("unknown type constructor '" + head + "'");
    }
};

} // namespace

TypeTag TypeTag::parse(std::string_view text, const SchemaRegistry* reg,
                       bool allowFun) {
    TypeNameParser p{text, 0, reg, allowFun};
    TypeTag t = p.parse();
    if (p.pos != text.size())
        p.fail("trailing characters at offset " + std::to_string(p.pos));
    return t;
}

} // namespace collq
