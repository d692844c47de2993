#include "collq/plan_text.hpp"

#include <map>

#include <json.hpp>

#include "collq/error.hpp"

namespace collq {

using nlohmann::json;

namespace {

// -- printing ----------------------------------------------------------------

json literal_json(const Value& v) {
    switch (v.kind()) {
    case Value::Kind::Int: return json(v.as_int());
    case Value::Kind::Bool: return json(v.as_bool());
    case Value::Kind::String: return json(v.as_string());
    case Value::Kind::Double: return json(v.as_double());
    case Value::Kind::Tuple: {
        json a = json::array();
        for (const auto& e : v.tuple_elems()) a.push_back(literal_json(e));
        return a;
    }
    case Value::Kind::Record: {
        json a = json::array();
        for (const auto& e : v.record_data().fields) a.push_back(literal_json(e));
        return a;
    }
    case Value::Kind::Seq:
    case Value::Kind::Set: {
        json a = json::array();
        for (const auto& e : v.elems()) a.push_back(literal_json(e));
        return a;
    }
    case Value::Kind::Closure:
        throw Error("function constants have no plan-text rendering");
    }
    return json();
}

const char* head_of(const ExprPtr& e) {
    switch (e->kind()) {
    case ExprKind::Const: return "const";
    case ExprKind::VarRef: return "var";
    case ExprKind::FoasFun: return "fun";
    case ExprKind::App: return "app";
    case ExprKind::StringConcat: return "concat";
    case ExprKind::ArithBin:
        switch (e->arith_op()) {
        case ArithOp::Add: return "add";
        case ArithOp::Sub: return "sub";
        case ArithOp::Mul: return "mul";
        case ArithOp::Div: return "div";
        }
        return "?";
    case ExprKind::Cmp:
        switch (e->cmp_op()) {
        case CmpOp::Eq: return "eq";
        case CmpOp::Ne: return "ne";
        case CmpOp::Lt: return "lt";
        case CmpOp::Le: return "le";
        case CmpOp::Gt: return "gt";
        case CmpOp::Ge: return "ge";
        }
        return "?";
    case ExprKind::BoolBin: return e->bool_op() == BoolOp::And ? "and" : "or";
    case ExprKind::Not: return "not";
    case ExprKind::TupleMake: return "tuple";
    case ExprKind::TupleProj: return "proj";
    case ExprKind::RecordMake: return "record";
    case ExprKind::FieldGet: return "field";
    case ExprKind::CollLit: return "lit";
    case ExprKind::Map: return "map";
    case ExprKind::FlatMap: return "flatmap";
    case ExprKind::Filter: return "filter";
    case ExprKind::Size: return "size";
    case ExprKind::Union: return "union";
    case ExprKind::ToSeq: return "toseq";
    case ExprKind::ToSet: return "toset";
    case ExprKind::HashJoin: return "hashjoin";
    }
    return "?";
}

/// Atoms that sit on the head's line, before the subexpression children.
std::vector<std::string> head_atoms(const ExprPtr& e) {
    switch (e->kind()) {
    case ExprKind::Const:
        return {e->tag().str(), literal_json(e->const_value()).dump()};
    case ExprKind::VarRef:
        return {std::to_string(e->var().id)};
    case ExprKind::FoasFun:
        return {std::to_string(e->var().id), e->var().tag.str()};
    case ExprKind::TupleProj:
        return {std::to_string(e->proj_index())};
    case ExprKind::RecordMake:
    case ExprKind::FieldGet:
        return {e->name()};
    case ExprKind::CollLit:
        return {to_string(e->lit_kind()), e->lit_elem_tag().str()};
    default:
        return {};
    }
}

void render_compact(const ExprPtr& e, std::string& out) {
    out += '(';
    out += head_of(e);
    for (const auto& a : head_atoms(e)) {
        out += ' ';
        out += a;
    }
    for (const auto& c : e->children()) {
        out += ' ';
        render_compact(c, out);
    }
    out += ')';
}

void render_pretty(const ExprPtr& e, int depth, std::string& out) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += '(';
    out += head_of(e);
    for (const auto& a : head_atoms(e)) {
        out += ' ';
        out += a;
    }
    for (const auto& c : e->children()) {
        out += '\n';
        render_pretty(c, depth + 1, out);
    }
    out += ')';
}

} // namespace

std::string print_plan(const ExprPtr& e) {
    std::string out;
    render_compact(renumber_binders(e), out);
    return out;
}

std::string print_plan_pretty(const ExprPtr& e) {
    std::string out;
    render_pretty(renumber_binders(e), 0, out);
    return out;
}

// -- parsing -------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { LParen, RParen, Atom } kind;
    std::string text;
    int line;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    int line = 1;
    size_t i = 0;
    auto scan_string = [&](std::string& out) {
        out += text[i++]; // opening quote
        while (i < text.size()) {
            char c = text[i];
            out += c;
            ++i;
            if (c == '\\') {
                if (i >= text.size()) throw ParseError(line, "dangling escape");
                out += text[i++];
            } else if (c == '"') {
                return;
            } else if (c == '\n') {
                throw ParseError(line, "newline inside string literal");
            }
        }
        throw ParseError(line, "unterminated string literal");
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            tokens.push_back({Token::Kind::LParen, "(", line});
            ++i;
        } else if (c == ')') {
            tokens.push_back({Token::Kind::RParen, ")", line});
            ++i;
        } else if (c == '"') {
            std::string s;
            scan_string(s);
            tokens.push_back({Token::Kind::Atom, std::move(s), line});
        } else if (c == '[' || c == '{') {
            // A composite JSON literal is one atom; brackets balance across
            // string contents.
            std::string s;
            int depth = 0;
            while (i < text.size()) {
                char d = text[i];
                if (d == '"') {
                    scan_string(s);
                    continue;
                }
                s += d;
                ++i;
                if (d == '[' || d == '{') ++depth;
                if (d == ']' || d == '}') {
                    if (--depth == 0) break;
                }
                if (d == '\n') ++line;
            }
            if (depth != 0) throw ParseError(line, "unbalanced JSON literal");
            tokens.push_back({Token::Kind::Atom, std::move(s), line});
        } else {
            size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
                   text[i] != '(' && text[i] != ')')
                ++i;
            tokens.push_back({Token::Kind::Atom, text.substr(start, i - start), line});
        }
    }
    return tokens;
}

Value json_to_plan_value(const json& j, const TypeTag& tag,
                         const SchemaRegistry& reg, int line) {
    switch (tag.kind()) {
    case TypeTag::Kind::Int:
        if (!j.is_number_integer())
            throw ParseError(line, "expected an integer literal for " + tag.str());
        return Value::int_(j.get<std::int64_t>());
    case TypeTag::Kind::Bool:
        if (!j.is_boolean())
            throw ParseError(line, "expected a boolean literal for " + tag.str());
        return Value::bool_(j.get<bool>());
    case TypeTag::Kind::String:
        if (!j.is_string())
            throw ParseError(line, "expected a string literal for " + tag.str());
        return Value::string_(j.get<std::string>());
    case TypeTag::Kind::Double:
        if (!j.is_number())
            throw ParseError(line, "expected a number literal for " + tag.str());
        return Value::double_(j.get<double>());
    case TypeTag::Kind::Tuple: {
        const auto& ts = tag.tuple_elems();
        if (!j.is_array() || j.size() != ts.size())
            throw ParseError(line, "expected an array of arity " +
                                       std::to_string(ts.size()) + " for " + tag.str());
        std::vector<Value> elems;
        for (size_t i = 0; i < ts.size(); ++i)
            elems.push_back(json_to_plan_value(j[i], ts[i], reg, line));
        return Value::tuple(std::move(elems));
    }
    case TypeTag::Kind::Record: {
        const auto& schema = reg.at(tag.schema_name());
        if (!j.is_array() || j.size() != schema.fields.size())
            throw ParseError(line, "expected an array of " +
                                       std::to_string(schema.fields.size()) +
                                       " field values for " + tag.str());
        std::vector<Value> fields;
        for (size_t i = 0; i < schema.fields.size(); ++i)
            fields.push_back(
                json_to_plan_value(j[i], schema.fields[i].tag, reg, line));
        return Value::record(schema.name, std::move(fields));
    }
    case TypeTag::Kind::Coll: {
        if (!j.is_array())
            throw ParseError(line, "expected an array literal for " + tag.str());
        std::vector<Value> elems;
        for (const auto& x : j)
            elems.push_back(json_to_plan_value(x, tag.elem(), reg, line));
        return tag.coll_kind() == CollKind::Seq ? Value::seq(std::move(elems))
                                                : Value::set(std::move(elems));
    }
    case TypeTag::Kind::Fun:
        throw ParseError(line, "function constants are not expressible in plan text");
    }
    throw ParseError(line, "unhandled literal tag " + tag.str());
}

} // namespace

/// Named (not in an anonymous namespace) because it holds the passkey
/// friendship for HashJoin nodes: a printed optimized plan must parse back.
class PlanParser {
public:
    PlanParser(std::vector<Token> tokens, const SchemaRegistry& reg)
        : tokens_(std::move(tokens)), reg_(reg) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr();
        if (pos_ != tokens_.size())
            throw ParseError(tokens_[pos_].line, "trailing tokens after plan");
        return e;
    }

private:
    const Token& peek() {
        if (pos_ >= tokens_.size()) throw ParseError("unexpected end of plan text");
        return tokens_[pos_];
    }
    Token next() {
        Token t = peek();
        ++pos_;
        return t;
    }
    void expect_rparen() {
        Token t = next();
        if (t.kind != Token::Kind::RParen)
            throw ParseError(t.line, "expected ')', found '" + t.text + "'");
    }
    std::string atom() {
        Token t = next();
        if (t.kind != Token::Kind::Atom)
            throw ParseError(t.line, "expected an atom, found '" + t.text + "'");
        return t.text;
    }
    int int_atom() {
        Token t = next();
        if (t.kind != Token::Kind::Atom)
            throw ParseError(t.line, "expected an integer");
        try {
            return std::stoi(t.text);
        } catch (const std::exception&) {
            throw ParseError(t.line, "expected an integer, found '" + t.text + "'");
        }
    }
    TypeTag type_atom(int line) {
        try {
            return TypeTag::parse(atom(), &reg_, /*allowFun=*/true);
        } catch (const ParseError&) {
            throw;
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line, e.what());
        }
    }

    ExprPtr parse_expr() {
        Token open = next();
        if (open.kind != Token::Kind::LParen)
            throw ParseError(open.line, "expected '(', found '" + open.text + "'");
        Token headTok = next();
        if (headTok.kind != Token::Kind::Atom)
            throw ParseError(headTok.line, "expected a node head");
        const std::string& head = headTok.text;
        const int line = headTok.line;
        ExprPtr result;

        if (head == "const") {
            TypeTag tag = type_atom(line);
            std::string lit = atom();
            json j;
            try {
                j = json::parse(lit);
            } catch (const json::parse_error& e) {
                throw ParseError(line, std::string("bad literal: ") + e.what());
            }
            Value v = json_to_plan_value(j, tag, reg_, line);
            result = Expr::make_const(std::move(v), std::move(tag), &reg_);
        } else if (head == "var") {
            int id = int_atom();
            auto it = scope_.find(id);
            if (it == scope_.end())
                throw ParseError(line, "unbound variable " + std::to_string(id));
            result = Expr::make_var(it->second);
        } else if (head == "fun") {
            int id = int_atom();
            TypeTag tag = type_atom(line);
            TypedVar v{id, tag};
            auto prev = scope_.find(id);
            bool hadPrev = prev != scope_.end();
            TypedVar saved = hadPrev ? prev->second : v;
            scope_.insert_or_assign(id, v);
            ExprPtr body = parse_expr();
            if (hadPrev)
                scope_.insert_or_assign(id, saved);
            else
                scope_.erase(id);
            result = Expr::make_fun(std::move(body), v);
        } else if (head == "app") {
            ExprPtr f = parse_expr();
            result = Expr::make_app(std::move(f), parse_expr());
        } else if (head == "concat") {
            ExprPtr l = parse_expr();
            result = Expr::make_concat(std::move(l), parse_expr());
        } else if (head == "add" || head == "sub" || head == "mul" || head == "div") {
            ArithOp op = head == "add"   ? ArithOp::Add
                         : head == "sub" ? ArithOp::Sub
                         : head == "mul" ? ArithOp::Mul
                                         : ArithOp::Div;
            ExprPtr l = parse_expr();
            result = Expr::make_arith(op, std::move(l), parse_expr());
        } else if (head == "eq" || head == "ne" || head == "lt" || head == "le" ||
                   head == "gt" || head == "ge") {
            CmpOp op = head == "eq"   ? CmpOp::Eq
                       : head == "ne" ? CmpOp::Ne
                       : head == "lt" ? CmpOp::Lt
                       : head == "le" ? CmpOp::Le
                       : head == "gt" ? CmpOp::Gt
                                      : CmpOp::Ge;
            ExprPtr l = parse_expr();
            result = Expr::make_cmp(op, std::move(l), parse_expr());
        } else if (head == "and" || head == "or") {
            ExprPtr l = parse_expr();
            result = Expr::make_bool(head == "and" ? BoolOp::And : BoolOp::Or,
                                     std::move(l), parse_expr());
        } else if (head == "not") {
            result = Expr::make_not(parse_expr());
        } else if (head == "tuple") {
            std::vector<ExprPtr> elems;
            while (peek().kind == Token::Kind::LParen) elems.push_back(parse_expr());
            result = Expr::make_tuple(std::move(elems));
        } else if (head == "proj") {
            int idx = int_atom();
            result = Expr::make_proj(parse_expr(), idx);
        } else if (head == "record") {
            std::string name = atom();
            std::vector<ExprPtr> fields;
            while (peek().kind == Token::Kind::LParen) fields.push_back(parse_expr());
            result = Expr::make_record(name, std::move(fields), reg_);
        } else if (head == "field") {
            std::string name = atom();
            result = Expr::make_field_get(parse_expr(), name, reg_);
        } else if (head == "lit") {
            std::string kindName = atom();
            if (kindName != "seq" && kindName != "set")
                throw ParseError(line, "lit kind must be seq or set");
            TypeTag elemTag = type_atom(line);
            std::vector<ExprPtr> elems;
            while (peek().kind == Token::Kind::LParen) elems.push_back(parse_expr());
            result = Expr::make_coll_lit(
                kindName == "seq" ? CollKind::Seq : CollKind::Set,
                std::move(elemTag), std::move(elems));
        } else if (head == "map") {
            ExprPtr c = parse_expr();
            result = Expr::make_map(std::move(c), parse_expr());
        } else if (head == "flatmap") {
            ExprPtr c = parse_expr();
            result = Expr::make_flat_map(std::move(c), parse_expr());
        } else if (head == "filter") {
            ExprPtr c = parse_expr();
            result = Expr::make_filter(std::move(c), parse_expr());
        } else if (head == "size") {
            result = Expr::make_size(parse_expr());
        } else if (head == "union") {
            ExprPtr l = parse_expr();
            result = Expr::make_union(std::move(l), parse_expr());
        } else if (head == "toseq") {
            result = Expr::make_to_seq(parse_expr());
        } else if (head == "toset") {
            result = Expr::make_to_set(parse_expr());
        } else if (head == "hashjoin") {
            ExprPtr outer = parse_expr();
            ExprPtr inner = parse_expr();
            ExprPtr okey = parse_expr();
            ExprPtr ikey = parse_expr();
            ExprPtr combine = parse_expr();
            result = Expr::make_hash_join(Expr::HashJoinKey{}, std::move(outer),
                                          std::move(inner), std::move(okey),
                                          std::move(ikey), std::move(combine));
        } else {
            throw ParseError(line, "unknown node head '" + head + "'");
        }
        expect_rparen();
        return result;
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
    const SchemaRegistry& reg_;
    std::map<int, TypedVar> scope_;
};

ExprPtr parse_plan(const std::string& text, const SchemaRegistry& reg) {
    PlanParser parser(tokenize(text), reg);
    return parser.parse();
}

} // namespace collq
