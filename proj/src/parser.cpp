#include "kb/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace kb {

namespace {

struct Token {
    enum class Type { ident, symbol, eof };
    Type type = Type::eof;
    std::string text;
    int line = 1;
    int col = 1;
};

[[noreturn]] void fail_at(std::string_view file, int line, int col, const std::string& msg) {
    throw ParseError({std::string(file), line, col, msg, Severity::error});
}

/// Tokenizes one logical chunk of text. Identifiers are alnum/underscore
/// runs (apostrophes allowed after the first character); `#` starts a
/// comment to end of line.
class Lexer {
  public:
    Lexer(std::string_view text, std::string_view file, int first_line = 1)
        : text_(text), file_(file), line_(first_line) {
        advance();
    }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }
    bool at_end() const { return tok_.type == Token::Type::eof; }

    bool accept_symbol(std::string_view s) {
        if (tok_.type == Token::Type::symbol && tok_.text == s) {
            advance();
            return true;
        }
        return false;
    }
    bool accept_ident(std::string_view s) {
        if (tok_.type == Token::Type::ident && tok_.text == s) {
            advance();
            return true;
        }
        return false;
    }
    Token expect_symbol(std::string_view s) {
        if (tok_.type != Token::Type::symbol || tok_.text != s)
            fail("expected '" + std::string(s) + "'");
        return next();
    }
    Token expect_ident() {
        if (tok_.type != Token::Type::ident) fail("expected a name");
        return next();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        fail_at(file_, tok_.line, tok_.col, msg);
    }
    [[noreturn]] void fail(const Token& at, const std::string& msg) const {
        fail_at(file_, at.line, at.col, msg);
    }

  private:
    static bool ident_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return ident_start(c) || c == '\''; }

    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++col_;
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_.type = Token::Type::eof;
            tok_.text.clear();
            return;
        }
        char c = text_[pos_];
        if (ident_start(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
            tok_.type = Token::Type::ident;
            tok_.text.assign(text_.substr(start, pos_ - start));
            col_ += static_cast<int>(pos_ - start);
            return;
        }
        tok_.type = Token::Type::symbol;
        auto two = text_.substr(pos_, 2);
        if (two == "==" || two == "->" || two == ":=") {
            tok_.text.assign(two);
            pos_ += 2;
            col_ += 2;
            return;
        }
        static const std::string singles = "(),.:;=";
        if (singles.find(c) == std::string::npos)
            fail_at(file_, line_, col_, std::string("unexpected character '") + c + "'");
        tok_.text.assign(1, c);
        ++pos_;
        ++col_;
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_;
    int col_ = 1;
    Token tok_;
};

struct Line {
    std::string_view text;
    int number;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> out;
    int n = 1;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            out.push_back({text.substr(start, i - start), n});
            start = i + 1;
            ++n;
        }
    }
    return out;
}

bool blank_line(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '#') return true;
        if (s[i] != ' ' && s[i] != '\t' && s[i] != '\r') return false;
    }
    return true;
}

std::string_view first_word(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
        ++j;
    return s.substr(i, j - i);
}

// ---------------------------------------------------------------------------
// Formula parsing
// ---------------------------------------------------------------------------

bool is_keyword(std::string_view s) {
    return s == "true" || s == "false" || s == "not" || s == "and" || s == "or" ||
           s == "exists" || s == "forall";
}

class FormulaParser {
  public:
    FormulaParser(Lexer& lex, const Signature& sig, const Context& ctx, bool allow_fresh)
        : lex_(lex), sig_(sig), scope_(ctx), allow_fresh_(allow_fresh) {}

    Formula parse() { return parse_or(); }

  private:
    Formula parse_or() {
        Formula f = parse_and();
        while (lex_.accept_ident("or")) f = Formula::disjunction(std::move(f), parse_and());
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (lex_.accept_ident("and")) f = Formula::conjunction(std::move(f), parse_unary());
        return f;
    }

    Formula parse_unary() {
        if (lex_.accept_ident("not")) return Formula::negation(parse_unary());
        if (lex_.peek().type == Token::Type::ident &&
            (lex_.peek().text == "exists" || lex_.peek().text == "forall")) {
            bool universal = lex_.next().text == "forall";
            Token var = lex_.expect_ident();
            if (is_keyword(var.text)) lex_.fail(var, "expected a variable name");
            SortId sort;
            bool fresh = false;
            if (lex_.peek().type == Token::Type::symbol && lex_.peek().text == ":") {
                lex_.next();
                Token sort_tok = lex_.expect_ident();
                auto s = sig_.find_sort(sort_tok.text);
                if (!s) lex_.fail(sort_tok, "unknown sort '" + sort_tok.text + "'");
                if (auto i = scope_.index_of(var.text)) {
                    if (scope_.vars[*i].sort != *s)
                        lex_.fail(var, "variable '" + var.text + "' is declared at a different sort");
                    sort = *s;
                } else {
                    if (!allow_fresh_)
                        lex_.fail(var, "bound variable '" + var.text + "' not in context");
                    sort = *s;
                    fresh = true;
                }
            } else {
                auto i = scope_.index_of(var.text);
                if (!i) lex_.fail(var, "bound variable '" + var.text + "' not in context");
                sort = scope_.vars[*i].sort;
            }
            lex_.expect_symbol(".");
            if (fresh) scope_.vars.push_back({var.text, sort});
            Formula body = parse_or();  // the body extends maximally right
            if (fresh) scope_.vars.pop_back();
            return universal ? Formula::forall(var.text, sort, std::move(body))
                             : Formula::exists(var.text, sort, std::move(body));
        }
        return parse_primary();
    }

    Formula parse_primary() {
        const Token& t = lex_.peek();
        if (t.type == Token::Type::ident) {
            if (t.text == "true") {
                lex_.next();
                return Formula::verum();
            }
            if (t.text == "false") {
                lex_.next();
                return Formula::falsum();
            }
            if (is_keyword(t.text)) lex_.fail("unexpected keyword '" + t.text + "'");
            // A relation atom or the left-hand term of an equality.
            Token name = t;
            if (auto rel = sig_.find_rel(name.text)) {
                lex_.next();
                return parse_relation_atom(name, *rel);
            }
            return parse_equality();
        }
        if (t.type == Token::Type::symbol && t.text == "(") {
            lex_.next();
            Formula f = parse_or();
            lex_.expect_symbol(")");
            return f;
        }
        lex_.fail("expected a formula");
    }

    Formula parse_relation_atom(const Token& name, RelId rel) {
        const RelSymbol& sym = sig_.rels[rel];
        Token open = lex_.expect_symbol("(");
        (void)open;
        std::vector<Term> args;
        if (!lex_.accept_symbol(")")) {
            do {
                args.push_back(parse_term());
            } while (lex_.accept_symbol(","));
            lex_.expect_symbol(")");
        }
        if (args.size() != sym.arg_sorts.size())
            lex_.fail(name, "arity mismatch: relation '" + sym.name + "' expects " +
                                std::to_string(sym.arg_sorts.size()) + " arguments, got " +
                                std::to_string(args.size()));
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i].sort != sym.arg_sorts[i])
                lex_.fail(name, "sort mismatch: argument " + std::to_string(i + 1) + " of '" +
                                    sym.name + "' must have sort '" +
                                    sig_.sorts[sym.arg_sorts[i]] + "'");
        }
        return Formula::relation(rel, std::move(args));
    }

    Formula parse_equality() {
        Term lhs = parse_term();
        Token eq = lex_.peek();
        lex_.expect_symbol("==");
        Term rhs = parse_term();
        if (lhs.sort != rhs.sort)
            lex_.fail(eq, "equality between terms of different sorts ('" + sig_.sorts[lhs.sort] +
                              "' vs '" + sig_.sorts[rhs.sort] + "')");
        return Formula::equality(std::move(lhs), std::move(rhs));
    }

    Term parse_term() {
        Token name = lex_.expect_ident();
        if (is_keyword(name.text)) lex_.fail(name, "expected a term");
        if (lex_.peek().type == Token::Type::symbol && lex_.peek().text == "(") {
            auto op = sig_.find_op(name.text);
            if (!op) {
                if (sig_.find_rel(name.text))
                    lex_.fail(name, "relation '" + name.text + "' used in term position");
                lex_.fail(name, "unknown symbol '" + name.text + "'");
            }
            lex_.next();
            std::vector<Term> args;
            if (!lex_.accept_symbol(")")) {
                do {
                    args.push_back(parse_term());
                } while (lex_.accept_symbol(","));
                lex_.expect_symbol(")");
            }
            const OpSymbol& sym = sig_.ops[*op];
            if (args.size() != sym.arg_sorts.size())
                lex_.fail(name, "arity mismatch: operation '" + sym.name + "' expects " +
                                    std::to_string(sym.arg_sorts.size()) + " arguments, got " +
                                    std::to_string(args.size()));
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (args[i].sort != sym.arg_sorts[i])
                    lex_.fail(name, "sort mismatch: argument " + std::to_string(i + 1) + " of '" +
                                        sym.name + "' must have sort '" +
                                        sig_.sorts[sym.arg_sorts[i]] + "'");
            }
            return Term::apply(*op, sym.result_sort, std::move(args));
        }
        if (auto i = scope_.index_of(name.text))
            return Term::variable(name.text, scope_.vars[*i].sort);
        if (auto op = sig_.find_op(name.text)) {
            const OpSymbol& sym = sig_.ops[*op];
            if (!sym.arg_sorts.empty())
                lex_.fail(name, "arity mismatch: operation '" + sym.name + "' expects " +
                                    std::to_string(sym.arg_sorts.size()) + " arguments, got 0");
            return Term::apply(*op, sym.result_sort, {});
        }
        lex_.fail(name, "unknown symbol '" + name.text + "'");
    }

    Lexer& lex_;
    const Signature& sig_;
    Context scope_;
    bool allow_fresh_;
};

Formula parse_formula_with(Lexer& lex, const Signature& sig, const Context& ctx,
                           bool allow_fresh) {
    FormulaParser p(lex, sig, ctx, allow_fresh);
    Formula f = p.parse();
    return f;
}

Context parse_context_with(Lexer& lex, const Signature& sig) {
    Context ctx;
    if (lex.at_end()) return ctx;
    do {
        Token var = lex.expect_ident();
        lex.expect_symbol(":");
        Token sort_tok = lex.expect_ident();
        auto s = sig.find_sort(sort_tok.text);
        if (!s) lex.fail(sort_tok, "unknown sort '" + sort_tok.text + "'");
        if (ctx.contains(var.text)) lex.fail(var, "duplicate variable '" + var.text + "'");
        ctx.vars.push_back({var.text, *s});
    } while (lex.accept_symbol(","));
    return ctx;
}

// ---------------------------------------------------------------------------
// Model file parsing
// ---------------------------------------------------------------------------

class ModelParser {
  public:
    ModelParser(std::string_view text, std::string_view file) : file_(file) {
        lines_ = split_lines(text);
    }

    MultiModel parse() {
        for (std::size_t li = 0; li < lines_.size(); ++li) {
            if (blank_line(lines_[li].text)) continue;
            std::string_view word = first_word(lines_[li].text);
            Lexer lex(lines_[li].text, file_, lines_[li].number);
            if (word == "sorts") parse_sorts(lex);
            else if (word == "carrier") parse_carrier(lex);
            else if (word == "op") parse_op_header(lex);
            else if (word == "rel") parse_rel(lex);
            else if (word == "identity") parse_identity(lex);
            else if (word == "instance") parse_instance_header(lex);
            else if (current_op_) parse_op_row(lex);
            else if (current_instance_) parse_instance_rel(lex);
            else lex.fail("expected a declaration");
        }
        return finish();
    }

  private:
    void close_sections() {
        finish_op();
        current_instance_.reset();
    }

    void parse_sorts(Lexer& lex) {
        close_sections();
        Token kw = lex.next();
        if (!sig_.sorts.empty()) lex.fail(kw, "duplicate sorts declaration");
        lex.expect_symbol(":");
        do {
            Token t = lex.expect_ident();
            if (sig_.find_sort(t.text)) lex.fail(t, "duplicate sort name '" + t.text + "'");
            sig_.sorts.push_back(t.text);
        } while (lex.accept_symbol(","));
        if (!lex.at_end()) lex.fail("trailing input after sort list");
        carriers_.resize(sig_.sorts.size());
        carrier_seen_.resize(sig_.sorts.size(), false);
    }

    void parse_carrier(Lexer& lex) {
        close_sections();
        lex.next();
        Token sort_tok = lex.expect_ident();
        auto s = sig_.find_sort(sort_tok.text);
        if (!s) lex.fail(sort_tok, "unknown sort '" + sort_tok.text + "'");
        if (carrier_seen_[*s]) lex.fail(sort_tok, "duplicate carrier for sort '" + sort_tok.text + "'");
        carrier_seen_[*s] = true;
        lex.expect_symbol(":");
        while (!lex.at_end()) {
            Token e = lex.expect_ident();
            for (const auto& existing : carriers_[*s])
                if (existing == e.text) lex.fail(e, "duplicate element name '" + e.text + "'");
            carriers_[*s].push_back(e.text);
        }
        if (carriers_[*s].empty()) lex.fail(sort_tok, "empty carrier for sort '" + sort_tok.text + "'");
    }

    SortId require_sort(Lexer& lex, const Token& t) {
        auto s = sig_.find_sort(t.text);
        if (!s) lex.fail(t, "unknown sort '" + t.text + "'");
        return *s;
    }

    void parse_op_header(Lexer& lex) {
        close_sections();
        Token kw = lex.next();
        Token name = lex.expect_ident();
        if (sig_.find_op(name.text)) lex.fail(name, "duplicate operation name '" + name.text + "'");
        OpSymbol sym;
        sym.name = name.text;
        lex.expect_symbol("(");
        if (!lex.accept_symbol(")")) {
            do {
                sym.arg_sorts.push_back(require_sort(lex, lex.expect_ident()));
            } while (lex.accept_symbol(","));
            lex.expect_symbol(")");
        }
        lex.expect_symbol("->");
        sym.result_sort = require_sort(lex, lex.expect_ident());
        lex.expect_symbol(":");
        if (!lex.at_end()) lex.fail("trailing input after operation header");
        for (SortId s : sym.arg_sorts)
            if (!carrier_seen_.at(s))
                lex.fail(kw, "carrier for sort '" + sig_.sorts[s] + "' must precede operation '" +
                                 sym.name + "'");
        if (!carrier_seen_.at(sym.result_sort))
            lex.fail(kw, "carrier for sort '" + sig_.sorts[sym.result_sort] +
                             "' must precede operation '" + sym.name + "'");
        std::uint64_t rows = 1;
        for (SortId s : sym.arg_sorts) rows *= carriers_[s].size();
        sig_.ops.push_back(sym);
        tables_.emplace_back(rows, std::optional<std::uint32_t>{});
        current_op_ = sig_.ops.size() - 1;
        op_header_line_ = kw.line;
        op_header_col_ = kw.col;
    }

    std::uint32_t require_element(Lexer& lex, const Token& t, SortId sort) {
        const auto& carrier = carriers_.at(sort);
        for (std::size_t i = 0; i < carrier.size(); ++i)
            if (carrier[i] == t.text) return static_cast<std::uint32_t>(i);
        lex.fail(t, "element '" + t.text + "' is not in the carrier of sort '" +
                        sig_.sorts[sort] + "'");
    }

    void parse_op_row(Lexer& lex) {
        const OpSymbol& sym = sig_.ops[*current_op_];
        std::vector<std::uint32_t> args;
        while (!(lex.peek().type == Token::Type::symbol && lex.peek().text == "=")) {
            Token e = lex.expect_ident();
            if (args.size() == sym.arg_sorts.size())
                lex.fail(e, "too many arguments in row for operation '" + sym.name + "'");
            args.push_back(require_element(lex, e, sym.arg_sorts[args.size()]));
        }
        Token eq = lex.expect_symbol("=");
        if (args.size() != sym.arg_sorts.size())
            lex.fail(eq, "too few arguments in row for operation '" + sym.name + "'");
        Token result = lex.expect_ident();
        std::uint32_t value = require_element(lex, result, sym.result_sort);
        if (!lex.at_end()) lex.fail("trailing input after table row");
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < args.size(); ++i)
            idx = idx * carriers_[sym.arg_sorts[i]].size() + args[i];
        if (tables_[*current_op_][idx].has_value())
            lex.fail(eq, "duplicate table row for operation '" + sym.name + "'");
        tables_[*current_op_][idx] = value;
    }

    void finish_op() {
        if (!current_op_) return;
        const OpSymbol& sym = sig_.ops[*current_op_];
        const auto& table = tables_[*current_op_];
        for (std::size_t idx = 0; idx < table.size(); ++idx) {
            if (table[idx].has_value()) continue;
            std::string row;
            std::uint64_t rest = idx;
            std::vector<std::uint32_t> args(sym.arg_sorts.size());
            for (std::size_t i = sym.arg_sorts.size(); i-- > 0;) {
                std::size_t radius = carriers_[sym.arg_sorts[i]].size();
                args[i] = static_cast<std::uint32_t>(rest % radius);
                rest /= radius;
            }
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) row += " ";
                row += carriers_[sym.arg_sorts[i]][args[i]];
            }
            fail_at(file_, op_header_line_, op_header_col_,
                    "operation table not total: '" + sym.name + "' is missing row " + row);
        }
        current_op_.reset();
    }

    void parse_rel(Lexer& lex) {
        close_sections();
        lex.next();
        Token name = lex.expect_ident();
        if (sig_.find_rel(name.text)) lex.fail(name, "duplicate relation name '" + name.text + "'");
        RelSymbol sym;
        sym.name = name.text;
        lex.expect_symbol("(");
        if (!lex.accept_symbol(")")) {
            do {
                sym.arg_sorts.push_back(require_sort(lex, lex.expect_ident()));
            } while (lex.accept_symbol(","));
            lex.expect_symbol(")");
        }
        if (sym.arg_sorts.empty()) lex.fail(name, "relation '" + name.text + "' must have arity >= 1");
        if (!lex.at_end()) lex.fail("trailing input after relation declaration");
        sig_.rels.push_back(sym);
    }

    void parse_identity(Lexer& lex) {
        close_sections();
        Token kw = lex.next();
        lex.expect_symbol("(");
        Context ctx;
        if (!lex.accept_symbol(")")) {
            do {
                Token var = lex.expect_ident();
                lex.expect_symbol(":");
                SortId sort = require_sort(lex, lex.expect_ident());
                if (ctx.contains(var.text)) lex.fail(var, "duplicate variable '" + var.text + "'");
                ctx.vars.push_back({var.text, sort});
            } while (lex.accept_symbol(","));
            lex.expect_symbol(")");
        }
        lex.expect_symbol(":");
        Formula eq = parse_formula_with(lex, sig_, ctx, false);
        if (!lex.at_end()) lex.fail("trailing input after identity");
        if (eq.kind != Formula::Kind::equality)
            lex.fail(kw, "identity must be a term equation");
        sig_.identities.push_back({std::move(ctx), std::move(eq.lhs), std::move(eq.rhs)});
        identity_lines_.push_back({kw.line, kw.col});
    }

    void parse_instance_header(Lexer& lex) {
        close_sections();
        lex.next();
        Token name = lex.expect_ident();
        for (const auto& existing : instance_names_)
            if (existing == name.text) lex.fail(name, "duplicate instance name '" + name.text + "'");
        lex.expect_symbol(":");
        if (!lex.at_end()) lex.fail("trailing input after instance header");
        instance_names_.push_back(name.text);
        instance_rels_.emplace_back(sig_.rels.size());
        for (RelId r = 0; r < sig_.rels.size(); ++r) {
            std::uint64_t tuples = 1;
            for (SortId s : sig_.rels[r].arg_sorts) tuples *= carriers_[s].size();
            instance_rels_.back()[r].membership.assign(tuples, 0);
        }
        rel_seen_.assign(sig_.rels.size(), false);
        current_instance_ = instance_names_.size() - 1;
    }

    void parse_instance_rel(Lexer& lex) {
        Token name = lex.expect_ident();
        auto rel = sig_.find_rel(name.text);
        if (!rel) lex.fail(name, "unknown relation '" + name.text + "'");
        if (rel_seen_[*rel])
            lex.fail(name, "duplicate relation '" + name.text + "' in instance '" +
                               instance_names_[*current_instance_] + "'");
        rel_seen_[*rel] = true;
        lex.expect_symbol(":");
        const RelSymbol& sym = sig_.rels[*rel];
        auto& relation = instance_rels_[*current_instance_][*rel];
        while (!lex.at_end()) {
            Token open = lex.expect_symbol("(");
            std::vector<std::uint32_t> tuple;
            do {
                Token e = lex.expect_ident();
                if (tuple.size() == sym.arg_sorts.size())
                    lex.fail(e, "type-mismatched tuple: relation '" + sym.name + "' has arity " +
                                    std::to_string(sym.arg_sorts.size()));
                tuple.push_back(require_element(lex, e, sym.arg_sorts[tuple.size()]));
            } while (lex.accept_symbol(","));
            lex.expect_symbol(")");
            if (tuple.size() != sym.arg_sorts.size())
                lex.fail(open, "type-mismatched tuple: relation '" + sym.name + "' has arity " +
                                   std::to_string(sym.arg_sorts.size()));
            std::uint64_t idx = 0;
            for (std::size_t i = 0; i < tuple.size(); ++i)
                idx = idx * carriers_[sym.arg_sorts[i]].size() + tuple[i];
            relation.membership[idx] = 1;
        }
    }

    MultiModel finish() {
        finish_op();
        if (sig_.sorts.empty()) fail_at(file_, 1, 1, "model file declares no sorts");
        for (std::size_t s = 0; s < sig_.sorts.size(); ++s)
            if (!carrier_seen_[s])
                fail_at(file_, 1, 1, "missing carrier for sort '" + sig_.sorts[s] + "'");

        auto algebra = std::make_shared<FiniteAlgebra>();
        algebra->sig = sig_;
        algebra->carriers = carriers_;
        algebra->tables.reserve(tables_.size());
        for (const auto& t : tables_) {
            std::vector<std::uint32_t> flat;
            flat.reserve(t.size());
            for (const auto& v : t) flat.push_back(*v);
            algebra->tables.push_back(std::move(flat));
        }
        for (std::size_t i = 0; i < sig_.identities.size(); ++i) {
            const Identity& id = sig_.identities[i];
            for (const auto& mu : enumerate_points(*algebra, id.context)) {
                if (eval_term(*algebra, id.context, mu, id.lhs) !=
                    eval_term(*algebra, id.context, mu, id.rhs))
                    fail_at(file_, identity_lines_[i].first, identity_lines_[i].second,
                            "declared identity fails in this algebra");
            }
        }
        algebra->validate();

        MultiModel mm;
        mm.algebra = algebra;
        mm.instance_names = instance_names_;
        for (auto& rels : instance_rels_) {
            Model m;
            m.algebra = algebra;
            m.rels = std::move(rels);
            mm.instances.push_back(std::move(m));
        }
        return mm;
    }

    std::string file_;
    std::vector<Line> lines_;
    Signature sig_;
    std::vector<std::vector<std::string>> carriers_;
    std::vector<bool> carrier_seen_;
    std::vector<std::vector<std::optional<std::uint32_t>>> tables_;
    std::optional<std::size_t> current_op_;
    int op_header_line_ = 0;
    int op_header_col_ = 0;
    std::vector<std::pair<int, int>> identity_lines_;
    std::vector<std::string> instance_names_;
    std::vector<std::vector<Relation>> instance_rels_;
    std::vector<bool> rel_seen_;
    std::optional<std::size_t> current_instance_;
};

}  // namespace

MultiModel parse_model(std::string_view text, std::string_view filename) {
    return ModelParser(text, filename).parse();
}

Formula parse_formula(std::string_view text, const Signature& sig, const Context& ctx,
                      std::string_view filename, bool allow_fresh_bound) {
    Lexer lex(text, filename);
    Formula f = parse_formula_with(lex, sig, ctx, allow_fresh_bound);
    if (!lex.at_end()) lex.fail("trailing input after formula");
    return f;
}

Context parse_context(std::string_view text, const Signature& sig, std::string_view filename) {
    Lexer lex(text, filename);
    Context ctx = parse_context_with(lex, sig);
    if (!lex.at_end()) lex.fail("trailing input after variable list");
    return ctx;
}

Description parse_query(std::string_view text, const Signature& sig, std::string_view filename) {
    auto lines = split_lines(text);
    Description d;
    bool header_seen = false;
    for (const auto& line : lines) {
        if (blank_line(line.text)) continue;
        Lexer lex(line.text, filename, line.number);
        if (!header_seen) {
            Token kw = lex.expect_ident();
            if (kw.text != "vars") lex.fail(kw, "query file must start with a 'vars' header");
            // `vars;` declares the empty context.
            if (!(lex.peek().type == Token::Type::symbol && lex.peek().text == ";"))
                d.context = parse_context_with(lex, sig);
            lex.expect_symbol(";");
            if (!lex.at_end()) lex.fail("trailing input after vars header");
            header_seen = true;
            continue;
        }
        Formula f = parse_formula_with(lex, sig, d.context, false);
        if (!lex.at_end()) lex.fail("trailing input after formula");
        d.formulas.push_back(std::move(f));
    }
    if (!header_seen)
        fail_at(filename, 1, 1, "query file must start with a 'vars' header");
    return d;
}

namespace {

class WitnessParser {
  public:
    WitnessParser(std::string_view text, std::string_view file, const MultiModel& left,
                  const MultiModel& right)
        : file_(file), left_(left), right_(right) {
        lines_ = split_lines(text);
    }

    EquivalenceWitness parse() {
        for (const auto& line : lines_) {
            if (blank_line(line.text)) continue;
            Lexer lex(line.text, file_, line.number);
            std::string_view word = first_word(line.text);
            if (word == "alpha") parse_alpha(lex);
            else if (word == "delta") parse_delta(lex);
            else if (word == "beta") parse_beta(lex, false);
            else if (word == "beta'") parse_beta(lex, true);
            else lex.fail("expected an alpha, delta, beta or beta' line");
        }
        finish();
        return w_;
    }

  private:
    std::size_t require_pair(Lexer& lex, const Token& f) {
        for (std::size_t i = 0; i < w_.alpha.size(); ++i)
            if (w_.alpha[i].first == f.text) return i;
        lex.fail(f, "instance '" + f.text + "' does not appear in any alpha line");
    }

    void parse_alpha(Lexer& lex) {
        lex.next();
        lex.expect_symbol(":");
        Token f = lex.expect_ident();
        lex.expect_symbol("->");
        Token g = lex.expect_ident();
        if (!lex.at_end()) lex.fail("trailing input after alpha line");
        if (!left_.find_instance(f.text))
            lex.fail(f, "unknown instance '" + f.text + "' in the left model");
        if (!right_.find_instance(g.text))
            lex.fail(g, "unknown instance '" + g.text + "' in the right model");
        for (const auto& [a, b] : w_.alpha) {
            if (a == f.text) lex.fail(f, "instance '" + f.text + "' already mapped");
            if (b == g.text) lex.fail(g, "instance '" + g.text + "' already targeted");
        }
        w_.alpha.emplace_back(f.text, g.text);
        w_.deltas.emplace_back();
        w_.betas.emplace_back();
        w_.beta_primes.emplace_back();
        delta_seen_.push_back(false);
    }

    void parse_delta(Lexer& lex) {
        lex.next();
        Token f = lex.expect_ident();
        lex.expect_symbol("->");
        Token g = lex.expect_ident();
        std::size_t pair = require_pair(lex, f);
        if (w_.alpha[pair].second != g.text)
            lex.fail(g, "delta target '" + g.text + "' contradicts the alpha line");
        if (delta_seen_[pair]) lex.fail(f, "duplicate delta for instance '" + f.text + "'");
        lex.expect_symbol(":");

        const Signature& lsig = left_.algebra->sig;
        SortedMap delta;
        delta.src = left_.algebra;
        delta.dst = right_.algebra;
        delta.images.resize(lsig.sorts.size());
        std::vector<bool> sort_seen(lsig.sorts.size(), false);
        while (!lex.at_end()) {
            Token kw = lex.expect_ident();
            if (kw.text != "sort") lex.fail(kw, "expected 'sort'");
            Token sort_tok = lex.expect_ident();
            auto s = lsig.find_sort(sort_tok.text);
            if (!s) lex.fail(sort_tok, "unknown sort '" + sort_tok.text + "'");
            if (sort_seen[*s]) lex.fail(sort_tok, "duplicate sort section");
            sort_seen[*s] = true;
            lex.expect_symbol(":");
            std::vector<std::optional<std::uint32_t>> img(left_.algebra->carrier_size(*s));
            while (!lex.at_end() && !(lex.peek().type == Token::Type::ident &&
                                      lex.peek().text == "sort")) {
                Token src_el = lex.expect_ident();
                auto src_idx = left_.algebra->find_element(*s, src_el.text);
                if (!src_idx)
                    lex.fail(src_el, "element '" + src_el.text + "' is not in the left carrier");
                lex.expect_symbol("->");
                Token dst_el = lex.expect_ident();
                auto dst_idx = right_.algebra->find_element(*s, dst_el.text);
                if (!dst_idx)
                    lex.fail(dst_el, "element '" + dst_el.text + "' is not in the right carrier");
                if (img[*src_idx].has_value())
                    lex.fail(src_el, "element '" + src_el.text + "' mapped twice");
                img[*src_idx] = *dst_idx;
            }
            delta.images[*s].reserve(img.size());
            for (std::size_t e = 0; e < img.size(); ++e) {
                if (!img[e])
                    lex.fail(sort_tok, "delta does not map element '" +
                                           left_.algebra->element_name(*s, e) + "'");
                delta.images[*s].push_back(*img[e]);
            }
        }
        for (std::size_t s = 0; s < lsig.sorts.size(); ++s)
            if (!sort_seen[s]) lex.fail(f, "delta is missing sort '" + lsig.sorts[s] + "'");
        w_.deltas[pair] = std::move(delta);
        delta_seen_[pair] = true;
    }

    void parse_beta(Lexer& lex, bool prime) {
        lex.next();
        Token f = lex.expect_ident();
        std::size_t pair = require_pair(lex, f);
        lex.expect_symbol(":");
        const Signature& atom_sig = prime ? right_.algebra->sig : left_.algebra->sig;
        const Signature& body_sig = prime ? left_.algebra->sig : right_.algebra->sig;
        Token rel_tok = lex.expect_ident();
        auto rel = atom_sig.find_rel(rel_tok.text);
        if (!rel) lex.fail(rel_tok, "unknown relation '" + rel_tok.text + "'");
        const RelSymbol& sym = atom_sig.rels[*rel];
        lex.expect_symbol("(");
        Context params;
        std::size_t argi = 0;
        if (!lex.accept_symbol(")")) {
            do {
                Token var = lex.expect_ident();
                if (argi >= sym.arg_sorts.size())
                    lex.fail(var, "arity mismatch: relation '" + sym.name + "' expects " +
                                      std::to_string(sym.arg_sorts.size()) + " parameters");
                if (params.contains(var.text))
                    lex.fail(var, "duplicate parameter '" + var.text + "'");
                params.vars.push_back({var.text, sym.arg_sorts[argi]});
                ++argi;
            } while (lex.accept_symbol(","));
            lex.expect_symbol(")");
        }
        if (argi != sym.arg_sorts.size())
            lex.fail(rel_tok, "arity mismatch: relation '" + sym.name + "' expects " +
                                  std::to_string(sym.arg_sorts.size()) + " parameters");
        lex.expect_symbol(":=");
        Formula body = parse_formula_with(lex, body_sig, params, true);
        if (!lex.at_end()) lex.fail("trailing input after definition");

        auto& slot = prime ? w_.beta_primes[pair] : w_.betas[pair];
        if (!slot.has_value()) {
            slot.emplace();
            slot->defs.resize(atom_sig.rels.size());
        }
        if (slot->defs[*rel].has_value())
            lex.fail(rel_tok, "duplicate definition for relation '" + sym.name + "'");
        slot->defs[*rel] = Interpretation::Definition{params.vars, std::move(body)};
    }

    void finish() {
        for (std::size_t i = 0; i < w_.alpha.size(); ++i) {
            if (!delta_seen_[i])
                fail_at(file_, 1, 1, "missing delta for instance '" + w_.alpha[i].first + "'");
            auto complete = [&](const std::optional<Interpretation>& interp, const Signature& sig,
                                const char* kind) {
                if (!interp) return;
                for (RelId r = 0; r < sig.rels.size(); ++r)
                    if (!interp->defs[r].has_value())
                        fail_at(file_, 1, 1,
                                std::string("missing ") + kind + " definition for relation '" +
                                    sig.rels[r].name + "' of instance '" + w_.alpha[i].first + "'");
            };
            complete(w_.betas[i], left_.algebra->sig, "beta");
            complete(w_.beta_primes[i], right_.algebra->sig, "beta'");
        }
    }

    std::string file_;
    const MultiModel& left_;
    const MultiModel& right_;
    std::vector<Line> lines_;
    EquivalenceWitness w_;
    std::vector<bool> delta_seen_;
};

}  // namespace

EquivalenceWitness parse_witness(std::string_view text, const MultiModel& left,
                                 const MultiModel& right, std::string_view filename) {
    return WitnessParser(text, filename, left, right).parse();
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

std::string serialize_term(const Term& t, const Signature& sig) {
    if (t.kind == Term::Kind::variable) return t.var_name;
    const OpSymbol& sym = sig.ops[t.op];
    if (t.args.empty()) return sym.name;
    std::string out = sym.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += serialize_term(t.args[i], sig);
    }
    out += ")";
    return out;
}

namespace {

// Precedence levels: or = 1, and = 2, not = 3, atoms = 4. A quantifier body
// extends maximally right, so a quantified formula needs parentheses in any
// position that continues with a connective.
void print_formula(const Formula& f, const Signature& sig, Context& scope, int min_prec,
                   std::string& out) {
    switch (f.kind) {
        case Formula::Kind::verum:
            out += "true";
            return;
        case Formula::Kind::falsum:
            out += "false";
            return;
        case Formula::Kind::equality:
            out += serialize_term(f.lhs, sig);
            out += " == ";
            out += serialize_term(f.rhs, sig);
            return;
        case Formula::Kind::relation: {
            out += sig.rels[f.rel].name;
            out += "(";
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ", ";
                out += serialize_term(f.args[i], sig);
            }
            out += ")";
            return;
        }
        case Formula::Kind::negation: {
            bool parens = min_prec > 3;
            if (parens) out += "(";
            out += "not ";
            print_formula(f.kids[0], sig, scope, 3, out);
            if (parens) out += ")";
            return;
        }
        case Formula::Kind::conjunction: {
            bool parens = min_prec > 2;
            if (parens) out += "(";
            print_formula(f.kids[0], sig, scope, 2, out);
            out += " and ";
            print_formula(f.kids[1], sig, scope, 3, out);
            if (parens) out += ")";
            return;
        }
        case Formula::Kind::disjunction: {
            bool parens = min_prec > 1;
            if (parens) out += "(";
            print_formula(f.kids[0], sig, scope, 1, out);
            out += " or ";
            print_formula(f.kids[1], sig, scope, 2, out);
            if (parens) out += ")";
            return;
        }
        case Formula::Kind::exists: {
            bool parens = min_prec > 1;
            if (parens) out += "(";
            out += "exists ";
            out += f.bound_name;
            bool fresh = !scope.contains(f.bound_name);
            if (fresh) {
                out += ":";
                out += sig.sorts[f.bound_sort];
            }
            out += ". ";
            if (fresh) scope.vars.push_back({f.bound_name, f.bound_sort});
            print_formula(f.kids[0], sig, scope, 1, out);
            if (fresh) scope.vars.pop_back();
            if (parens) out += ")";
            return;
        }
    }
}

}  // namespace

std::string serialize_formula(const Formula& f, const Signature& sig, const Context& ctx) {
    std::string out;
    Context scope = ctx;
    print_formula(f, sig, scope, 1, out);
    return out;
}

std::string serialize_query(const Description& d, const Signature& sig) {
    std::string out = "vars";
    for (std::size_t i = 0; i < d.context.vars.size(); ++i) {
        out += i ? ", " : " ";
        out += d.context.vars[i].name;
        out += ":";
        out += sig.sorts[d.context.vars[i].sort];
    }
    out += ";\n";
    for (const auto& f : d.formulas) {
        out += serialize_formula(f, sig, d.context);
        out += "\n";
    }
    return out;
}

std::string serialize_model(const MultiModel& m) {
    const FiniteAlgebra& g = *m.algebra;
    const Signature& sig = g.sig;
    std::string out = "sorts: ";
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
        if (s) out += ", ";
        out += sig.sorts[s];
    }
    out += "\n";
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
        out += "carrier " + sig.sorts[s] + ":";
        for (const auto& e : g.carriers[s]) out += " " + e;
        out += "\n";
    }
    for (OpId op = 0; op < sig.ops.size(); ++op) {
        const OpSymbol& sym = sig.ops[op];
        out += "op " + sym.name + "(";
        for (std::size_t i = 0; i < sym.arg_sorts.size(); ++i) {
            if (i) out += ", ";
            out += sig.sorts[sym.arg_sorts[i]];
        }
        out += ") -> " + sig.sorts[sym.result_sort] + ":\n";
        std::vector<std::uint32_t> radii;
        for (SortId s : sym.arg_sorts) radii.push_back(static_cast<std::uint32_t>(g.carrier_size(s)));
        std::vector<std::uint32_t> args(sym.arg_sorts.size(), 0);
        std::uint64_t idx = 0;
        do {
            out += " ";
            for (std::size_t i = 0; i < args.size(); ++i)
                out += " " + g.carriers[sym.arg_sorts[i]][args[i]];
            out += " = " + g.carriers[sym.result_sort][g.tables[op][idx]] + "\n";
            ++idx;
        } while (next_tuple(args, radii));
    }
    for (const auto& rel : sig.rels) {
        out += "rel " + rel.name + "(";
        for (std::size_t i = 0; i < rel.arg_sorts.size(); ++i) {
            if (i) out += ", ";
            out += sig.sorts[rel.arg_sorts[i]];
        }
        out += ")\n";
    }
    for (const auto& id : sig.identities) {
        out += "identity (";
        for (std::size_t i = 0; i < id.context.vars.size(); ++i) {
            if (i) out += ", ";
            out += id.context.vars[i].name + ":" + sig.sorts[id.context.vars[i].sort];
        }
        out += "): " + serialize_term(id.lhs, sig) + " == " + serialize_term(id.rhs, sig) + "\n";
    }
    for (std::size_t inst = 0; inst < m.instances.size(); ++inst) {
        out += "instance " + m.instance_names[inst] + ":\n";
        for (RelId r = 0; r < sig.rels.size(); ++r) {
            const RelSymbol& sym = sig.rels[r];
            out += "  " + sym.name + ":";
            std::vector<std::uint32_t> radii;
            for (SortId s : sym.arg_sorts)
                radii.push_back(static_cast<std::uint32_t>(g.carrier_size(s)));
            std::vector<std::uint32_t> tuple(sym.arg_sorts.size(), 0);
            std::uint64_t idx = 0;
            do {
                if (m.instances[inst].rels[r].membership[idx]) {
                    out += " (";
                    for (std::size_t i = 0; i < tuple.size(); ++i) {
                        if (i) out += ",";
                        out += g.carriers[sym.arg_sorts[i]][tuple[i]];
                    }
                    out += ")";
                }
                ++idx;
            } while (next_tuple(tuple, radii));
            out += "\n";
        }
    }
    return out;
}

std::string serialize_witness(const EquivalenceWitness& w, const MultiModel& left,
                              const MultiModel& right) {
    const Signature& lsig = left.algebra->sig;
    const Signature& rsig = right.algebra->sig;
    std::string out;
    for (const auto& [f, g] : w.alpha) out += "alpha: " + f + " -> " + g + "\n";
    for (std::size_t i = 0; i < w.alpha.size(); ++i) {
        out += "delta " + w.alpha[i].first + "->" + w.alpha[i].second + ":";
        for (std::size_t s = 0; s < lsig.sorts.size(); ++s) {
            out += " sort " + lsig.sorts[s] + ":";
            for (std::size_t e = 0; e < w.deltas[i].images[s].size(); ++e) {
                out += " " + left.algebra->element_name(s, static_cast<std::uint32_t>(e)) + "->" +
                       right.algebra->element_name(s, w.deltas[i].images[s][e]);
            }
        }
        out += "\n";
    }
    auto emit_defs = [&](const std::optional<Interpretation>& interp, const std::string& inst,
                         const Signature& atom_sig, const Signature& body_sig, const char* kw) {
        if (!interp) return;
        for (RelId r = 0; r < atom_sig.rels.size(); ++r) {
            if (!interp->defs[r]) continue;
            const auto& def = *interp->defs[r];
            std::string line = std::string(kw) + " " + inst + ": " + atom_sig.rels[r].name + "(";
            for (std::size_t p = 0; p < def.params.size(); ++p) {
                if (p) line += ", ";
                line += def.params[p].name;
            }
            Context params;
            params.vars = def.params;
            line += ") := " + serialize_formula(def.body, body_sig, params);
            out += line + "\n";
        }
    };
    for (std::size_t i = 0; i < w.alpha.size(); ++i) {
        emit_defs(w.betas[i], w.alpha[i].first, lsig, rsig, "beta");
        emit_defs(w.beta_primes[i], w.alpha[i].first, rsig, lsig, "beta'");
    }
    return out;
}

}  // namespace kb
