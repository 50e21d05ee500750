#pragma once

// Surface syntax for programs and datasets.
//
//   rule     ::= head '.' | head ':-' body '.'
//   head     ::= atom ('|' atom)* | 'bot'
//   body     ::= atom (',' atom)*
//   atom     ::= pred ['(' term (',' term)* ')'] | term '=' term
//   pred     ::= lowercase identifier
//   term     ::= variable (uppercase start) | constant (lowercase start)
//
// '%' starts a comment running to end of line.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "ast.hpp"

namespace wldlog {

struct SourceSpan {
    int line = 0, column = 0;
    int end_line = 0, end_column = 0;
};

struct ParseError : std::runtime_error {
    SourceSpan span;
    ParseError(const std::string& msg, SourceSpan s)
        : std::runtime_error(msg + " at line " + std::to_string(s.line) + ", column " +
                             std::to_string(s.column)),
          span(s) {}
};

namespace detail {

enum class TokKind { Ident, Var, LParen, RParen, Comma, Pipe, Dot, Implies, Equals, End };

struct Token {
    TokKind kind;
    std::string text;
    SourceSpan span;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        SourceSpan span{line_, col_, line_, col_};
        if (pos_ >= src_.size()) return {TokKind::End, "", span};
        char c = src_[pos_];
        if (c == '(') return single(TokKind::LParen, span);
        if (c == ')') return single(TokKind::RParen, span);
        if (c == ',') return single(TokKind::Comma, span);
        if (c == '|') return single(TokKind::Pipe, span);
        if (c == '.') return single(TokKind::Dot, span);
        if (c == '=') return single(TokKind::Equals, span);
        if (c == ':') {
            if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
                advance();
                advance();
                span.end_column = col_;
                return {TokKind::Implies, ":-", span};
            }
            throw ParseError("unexpected ':'", span);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string text;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                bool ident_char = std::isalnum(static_cast<unsigned char>(d)) || d == '_' ||
                                  (internal_names && (d == '\'' || d == '^'));
                if (!ident_char) break;
                text += d;
                advance();
            }
            span.end_column = col_;
            bool is_var = std::isupper(static_cast<unsigned char>(text[0]));
            return {is_var ? TokKind::Var : TokKind::Ident, text, span};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", span);
    }

    bool internal_names = false;

  private:
    Token single(TokKind k, SourceSpan span) {
        std::string t(1, src_[pos_]);
        advance();
        span.end_column = col_;
        return {k, t, span};
    }
    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
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
    int line_ = 1, col_ = 1;
};

class Parser {
  public:
    Parser(std::string_view src, bool internal) : lex_(src), internal_(internal) {
        lex_.internal_names = internal;
        cur_ = lex_.next();
    }

    std::vector<Rule> rules() {
        std::vector<Rule> out;
        while (cur_.kind != TokKind::End) out.push_back(rule());
        return out;
    }

    std::vector<Atom> facts() {
        std::vector<Atom> out;
        while (cur_.kind != TokKind::End) {
            Atom a = atom();
            expect(TokKind::Dot, "'.'");
            out.push_back(std::move(a));
        }
        return out;
    }

  private:
    Rule rule() {
        Rule r;
        r.head.push_back(atom());
        while (cur_.kind == TokKind::Pipe) {
            consume();
            r.head.push_back(atom());
        }
        if (cur_.kind == TokKind::Implies) {
            consume();
            r.body.push_back(atom());
            while (cur_.kind == TokKind::Comma) {
                consume();
                r.body.push_back(atom());
            }
        }
        expect(TokKind::Dot, "'.'");
        return r;
    }

    Atom atom() {
        if (cur_.kind == TokKind::Var) {
            // infix equality: T = T
            Term lhs = term();
            expect_peek(TokKind::Equals, "'='");
            consume();
            Term rhs = term();
            return Atom{eq_pred(), {lhs, rhs}};
        }
        Token name = expect(TokKind::Ident, "predicate or constant");
        if (cur_.kind == TokKind::Equals) {  // c = T
            consume();
            Term rhs = term();
            return Atom{eq_pred(), {cst(name.text), rhs}};
        }
        if (name.text == "bot" && cur_.kind != TokKind::LParen)
            return Atom{bot_pred(), {}};
        std::vector<Term> args;
        if (cur_.kind == TokKind::LParen) {
            consume();
            args.push_back(term());
            while (cur_.kind == TokKind::Comma) {
                consume();
                args.push_back(term());
            }
            expect(TokKind::RParen, "')'");
        }
        Predicate p{name.text, static_cast<int>(args.size()), Builtin::None};
        if (name.text == "top") {
            if (args.size() != 1) throw ParseError("top takes exactly one argument", name.span);
            p = top_pred();
        } else if (name.text == "eq") {
            if (args.size() != 2) throw ParseError("eq takes exactly two arguments", name.span);
            p = eq_pred();
        } else if (name.text == "bot") {
            throw ParseError("bot takes no arguments", name.span);
        }
        return Atom{p, std::move(args)};
    }

    Term term() {
        if (cur_.kind == TokKind::Var) {
            Token t = consume();
            return var(t.text);
        }
        Token t = expect(TokKind::Ident, "term");
        return cst(t.text);
    }

    Token consume() {
        Token t = cur_;
        cur_ = lex_.next();
        return t;
    }
    Token expect(TokKind k, const char* what) {
        if (cur_.kind != k) throw ParseError(std::string("expected ") + what, cur_.span);
        return consume();
    }
    void expect_peek(TokKind k, const char* what) {
        if (cur_.kind != k) throw ParseError(std::string("expected ") + what, cur_.span);
    }

    Lexer lex_;
    bool internal_;
    Token cur_;
};

}  // namespace detail

// Parses and validates a program. With internal=true, derived predicate
// names (primed / caret) and equality bodies are admitted.
inline Program parse_program(std::string_view text, bool internal = false) {
    detail::Parser parser(text, internal);
    return validate_program(parser.rules(),
                            internal ? Provenance::Derived : Provenance::Original, internal);
}

// Parses a dataset: one ground fact per line, `p(a,b).`
inline Dataset parse_dataset(std::string_view text, bool internal = false) {
    detail::Parser parser(text, internal);
    return validate_dataset(parser.facts());
}

}  // namespace wldlog
