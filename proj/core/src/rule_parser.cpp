// Recursive-descent parser for rule text.
//
//   rule      := "rule" ident "{" clause* "}"
//   clause    := "when" cond "=>" "{" bundle (";" bundle)* [";"] "}"
//   cond      := atom ("and" atom)*
//   atom      := ident "==" symbol
//   bundle    := prob-expr ":" action ("," action)*
//   action    := "set" ident "=" symbol
//              | "move" ident "->" (site-id | "current" | "@" ident)
//   prob-expr := term (("+"|"-") term)*
//   term      := factor (("*"|"/") factor)*
//   factor    := "-" factor | number | "(" prob-expr ")"
//              | "proportion" "(" ident "," cond ")" | ident
//   symbol    := ident | integer
//
// A bare ident in prob-expr position reads the group's (integer) feature of
// that name; "@rel" as a move target means "the site my relation `rel`
// points at". Whitespace is free-form; there are no comments.

#include "pram/rule_parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

#include "pram/error.hpp"

namespace pram {

namespace {

struct Token {
    enum class Type {
        ident,
        number,    // has a '.' or exponent, or plain digits: value in text
        integer,   // digits only
        lbrace,
        rbrace,
        lparen,
        rparen,
        colon,
        semicolon,
        comma,
        eq,        // =
        eqeq,      // ==
        arrow,     // ->
        fat_arrow, // =>
        plus,
        minus,
        star,
        slash,
        at,
        end
    };
    Type type;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        int line = line_, col = col_;
        if (pos_ >= src_.size()) return {Token::Type::end, "", line, col};
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                advance();
            }
            return {Token::Type::ident, std::string(src_.substr(start, pos_ - start)), line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            std::size_t start = pos_;
            bool real = false;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            if (pos_ < src_.size() && src_[pos_] == '.') {
                real = true;
                advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                real = true;
                advance();
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            }
            return {real ? Token::Type::number : Token::Type::integer,
                    std::string(src_.substr(start, pos_ - start)), line, col};
        }
        advance();
        switch (c) {
            case '{': return {Token::Type::lbrace, "{", line, col};
            case '}': return {Token::Type::rbrace, "}", line, col};
            case '(': return {Token::Type::lparen, "(", line, col};
            case ')': return {Token::Type::rparen, ")", line, col};
            case ':': return {Token::Type::colon, ":", line, col};
            case ';': return {Token::Type::semicolon, ";", line, col};
            case ',': return {Token::Type::comma, ",", line, col};
            case '+': return {Token::Type::plus, "+", line, col};
            case '*': return {Token::Type::star, "*", line, col};
            case '/': return {Token::Type::slash, "/", line, col};
            case '@': return {Token::Type::at, "@", line, col};
            case '-':
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    advance();
                    return {Token::Type::arrow, "->", line, col};
                }
                return {Token::Type::minus, "-", line, col};
            case '=':
                if (pos_ < src_.size() && src_[pos_] == '=') {
                    advance();
                    return {Token::Type::eqeq, "==", line, col};
                }
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    advance();
                    return {Token::Type::fat_arrow, "=>", line, col};
                }
                return {Token::Type::eq, "=", line, col};
        }
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::string_view src, NormalizationMode mode) : lexer_(src), mode_(mode) {
        cur_ = lexer_.next();
    }

    bool at_end() const { return cur_.type == Token::Type::end; }
    int line() const { return cur_.line; }
    int col() const { return cur_.col; }

    Rule rule() {
        expect_keyword("rule");
        Rule r;
        r.name = expect_ident("rule name");
        expect(Token::Type::lbrace, "'{'");
        std::set<std::string> seen_conditions;
        while (!accept(Token::Type::rbrace)) {
            Token at = cur_;
            Clause c = clause();
            std::string norm = c.condition.normalized();
            if (!seen_conditions.insert(norm).second) {
                throw ParseError(at.line, at.col,
                                 "duplicate clause condition (" + norm + ") in rule '" + r.name + "'");
            }
            check_static(r.name, c, at);
            r.clauses.push_back(std::move(c));
        }
        return r;
    }

private:
    Clause clause() {
        expect_keyword("when");
        Clause c;
        c.condition = condition();
        check_satisfiable(c.condition);
        expect(Token::Type::fat_arrow, "'=>'");
        expect(Token::Type::lbrace, "'{'");
        c.bundles.push_back(bundle());
        while (accept(Token::Type::semicolon)) {
            if (cur_.type == Token::Type::rbrace) break;  // trailing ';'
            c.bundles.push_back(bundle());
        }
        expect(Token::Type::rbrace, "'}'");
        return c;
    }

    Condition condition() {
        Condition cond;
        cond.atoms.push_back(atom());
        while (cur_.type == Token::Type::ident && cur_.text == "and") {
            consume();
            cond.atoms.push_back(atom());
        }
        return cond;
    }

    ConditionAtom atom() {
        ConditionAtom a;
        a.name = expect_ident("attribute name");
        expect(Token::Type::eqeq, "'=='");
        a.value = symbol();
        return a;
    }

    AttrValue symbol() {
        if (cur_.type == Token::Type::integer) {
            AttrValue v = AttrValue::integer(std::strtoll(cur_.text.c_str(), nullptr, 10));
            consume();
            return v;
        }
        if (cur_.type == Token::Type::minus) {
            Token t = consume();
            if (cur_.type != Token::Type::integer) {
                throw ParseError(t.line, t.col, "expected integer after '-'");
            }
            AttrValue v = AttrValue::integer(-std::strtoll(cur_.text.c_str(), nullptr, 10));
            consume();
            return v;
        }
        std::string name = expect_ident("symbol");
        return AttrValue::token(std::move(name));
    }

    ActionBundle bundle() {
        ActionBundle b;
        b.probability = expr();
        expect(Token::Type::colon, "':'");
        b.actions.push_back(action());
        while (accept(Token::Type::comma)) b.actions.push_back(action());
        return b;
    }

    Action action() {
        Token t = cur_;
        std::string kw = expect_ident("action");
        Action a;
        if (kw == "set") {
            a.kind = Action::Kind::set_feature;
            a.attr = expect_ident("feature name");
            expect(Token::Type::eq, "'='");
            a.value = symbol();
            return a;
        }
        if (kw == "move") {
            a.kind = Action::Kind::move_relation;
            a.attr = expect_ident("relation name");
            expect(Token::Type::arrow, "'->'");
            if (accept(Token::Type::at)) {
                a.target = Action::MoveTarget::relation_ref;
                a.target_name = expect_ident("relation name after '@'");
                return a;
            }
            std::string target = expect_ident("site id or 'current'");
            if (target == "current") {
                a.target = Action::MoveTarget::current;
            } else {
                a.target = Action::MoveTarget::site;
                a.target_name = std::move(target);
            }
            return a;
        }
        throw ParseError(t.line, t.col, "unknown action '" + kw + "' (expected 'set' or 'move')");
    }

    Expression expr() {
        Expression e = term();
        while (cur_.type == Token::Type::plus || cur_.type == Token::Type::minus) {
            bool add = cur_.type == Token::Type::plus;
            consume();
            e = Expression::binary(add ? Expression::Kind::add : Expression::Kind::sub,
                                   std::move(e), term());
        }
        return e;
    }

    Expression term() {
        Expression e = factor();
        while (cur_.type == Token::Type::star || cur_.type == Token::Type::slash) {
            bool mul = cur_.type == Token::Type::star;
            consume();
            e = Expression::binary(mul ? Expression::Kind::mul : Expression::Kind::div,
                                   std::move(e), factor());
        }
        return e;
    }

    Expression factor() {
        if (accept(Token::Type::minus)) return Expression::negate(factor());
        if (cur_.type == Token::Type::number || cur_.type == Token::Type::integer) {
            double v = std::strtod(cur_.text.c_str(), nullptr);
            consume();
            return Expression::constant(v);
        }
        if (accept(Token::Type::lparen)) {
            Expression e = expr();
            expect(Token::Type::rparen, "')'");
            return e;
        }
        Token t = cur_;
        std::string name = expect_ident("number, '(', 'proportion' or feature name");
        if (name == "proportion") {
            expect(Token::Type::lparen, "'('");
            std::string relation = expect_ident("relation name");
            expect(Token::Type::comma, "','");
            Condition cond = condition();
            expect(Token::Type::rparen, "')'");
            Predicate pred;
            for (const ConditionAtom& a : cond.atoms) pred.require(a.name, a.value);
            return Expression::proportion(std::move(relation), std::move(pred));
        }
        if (name == "current" || name == "set" || name == "move" || name == "when" ||
            name == "rule" || name == "and") {
            throw ParseError(t.line, t.col, "'" + name + "' cannot be used in an expression");
        }
        return Expression::feature_ref(std::move(name));
    }

    // Conditions like "flu == s and flu == e" can never hold; almost surely a typo.
    void check_satisfiable(const Condition& cond) {
        for (std::size_t i = 0; i < cond.atoms.size(); ++i) {
            for (std::size_t j = i + 1; j < cond.atoms.size(); ++j) {
                if (cond.atoms[i].name == cond.atoms[j].name &&
                    !(cond.atoms[i].value == cond.atoms[j].value)) {
                    throw ParseError(cur_.line, cur_.col,
                                     "condition requires '" + cond.atoms[i].name +
                                     "' to equal two different values");
                }
            }
        }
    }

    void check_static(const std::string& rule_name, const Clause& c, const Token& at) {
        double sum = 0.0;
        bool all_constant = true;
        // dummy context folds constant arithmetic like "1 - 0.4"
        Snapshot empty{Population{}};
        Group dummy{Signature{}, 0.0};
        for (const ActionBundle& b : c.bundles) {
            if (!b.probability.is_constant()) {
                all_constant = false;
                continue;
            }
            double p = b.probability.evaluate(dummy, empty);
            if (p < 0.0 || p > 1.0) {
                throw ParseError(at.line, at.col,
                                 "rule '" + rule_name + "': constant probability " +
                                 std::to_string(p) + " outside [0,1]");
            }
            sum += p;
        }
        if (!all_constant) return;
        if (mode_ == NormalizationMode::strict) {
            if (std::fabs(sum - 1.0) > 1e-9) {
                throw ParseError(at.line, at.col,
                                 "rule '" + rule_name + "': clause probabilities sum to " +
                                 std::to_string(sum) + " (strict mode requires 1)");
            }
        } else if (sum > 1.0 + 1e-9) {
            throw ParseError(at.line, at.col, "rule '" + rule_name +
                                              "': clause probabilities sum to more than 1");
        }
    }

    Token consume() {
        Token t = cur_;
        cur_ = lexer_.next();
        return t;
    }

    bool accept(Token::Type type) {
        if (cur_.type != type) return false;
        consume();
        return true;
    }

    void expect(Token::Type type, const std::string& what) {
        if (cur_.type != type) {
            throw ParseError(cur_.line, cur_.col,
                             "expected " + what + ", got '" + printable(cur_) + "'");
        }
        consume();
    }

    std::string expect_ident(const std::string& what) {
        if (cur_.type != Token::Type::ident) {
            throw ParseError(cur_.line, cur_.col,
                             "expected " + what + ", got '" + printable(cur_) + "'");
        }
        return consume().text;
    }

    void expect_keyword(const std::string& kw) {
        if (cur_.type != Token::Type::ident || cur_.text != kw) {
            throw ParseError(cur_.line, cur_.col,
                             "expected '" + kw + "', got '" + printable(cur_) + "'");
        }
        consume();
    }

    static std::string printable(const Token& t) {
        return t.type == Token::Type::end ? "end of input" : t.text;
    }

    Lexer lexer_;
    NormalizationMode mode_;
    Token cur_;
};

}  // namespace

Rule parse_rule(std::string_view text, NormalizationMode mode) {
    Parser p(text, mode);
    Rule r = p.rule();
    if (!p.at_end()) {
        throw ParseError(p.line(), p.col(), "trailing input after rule '" + r.name + "'");
    }
    return r;
}

std::vector<Rule> parse_rules(std::string_view text, NormalizationMode mode) {
    Parser p(text, mode);
    std::vector<Rule> rules;
    while (!p.at_end()) rules.push_back(p.rule());
    return rules;
}

}  // namespace pram
