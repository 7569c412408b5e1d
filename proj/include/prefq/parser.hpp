#ifndef PREFQ_PARSER_HPP_
#define PREFQ_PARSER_HPP_

#include "prefq/errors.hpp"
#include "prefq/formula.hpp"
#include "prefq/preference_formula.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace prefq {

namespace detail {

struct Token
{
    enum class Kind
    {
        Ident,
        String,
        Number,
        LParen,
        RParen,
        Dot,
        Cmp,
        End
    };
    Kind kind = Kind::End;
    std::string text;
    std::size_t pos = 0;
};

inline std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < src.size())
    {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c)))
        {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (is_ident_start(c))
        {
            std::size_t j = i;
            while (j < src.size() && is_ident(src[j]))
                ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(src.substr(i, j - i));
            i = j;
        }
        else if (c == '\'')
        {
            std::string text;
            std::size_t j = i + 1;
            for (;;)
            {
                if (j >= src.size())
                    throw SyntaxError(i, "unterminated string literal");
                if (src[j] == '\'')
                {
                    if (j + 1 < src.size() && src[j + 1] == '\'')
                    {
                        text += '\'';
                        j += 2;
                        continue;
                    }
                    break;
                }
                text += src[j++];
            }
            t.kind = Token::Kind::String;
            t.text = std::move(text);
            i = j + 1;
        }
        else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '-' || c == '+') && i + 1 < src.size() &&
                  std::isdigit(static_cast<unsigned char>(src[i + 1]))))
        {
            std::size_t j = i + 1;
            auto digits = [&] {
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                    ++j;
            };
            digits();
            if (j + 1 < src.size() && (src[j] == '.' || src[j] == '/') &&
                std::isdigit(static_cast<unsigned char>(src[j + 1])))
            {
                ++j;
                digits();
            }
            t.kind = Token::Kind::Number;
            t.text = std::string(src.substr(i, j - i));
            i = j;
        }
        else if (c == '(' || c == ')' || c == '.')
        {
            t.kind = c == '(' ? Token::Kind::LParen : c == ')' ? Token::Kind::RParen : Token::Kind::Dot;
            t.text = std::string(1, c);
            ++i;
        }
        else if (c == '=' || c == '<' || c == '>' || c == '!')
        {
            std::size_t len = (i + 1 < src.size() && src[i + 1] == '=') ? 2 : 1;
            std::string op(src.substr(i, len));
            if (op == "!" )
                throw SyntaxError(i, "expected '!='");
            if (op == "==")
                op = "=";
            if (c == '<' && i + 1 < src.size() && src[i + 1] == '>')
            {
                op = "!=";
                len = 2;
            }
            t.kind = Token::Kind::Cmp;
            t.text = op;
            i += len;
        }
        else
        {
            throw SyntaxError(i, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = src.size();
    out.push_back(end);
    return out;
}

inline bool keyword_is(const Token& t, std::string_view kw)
{
    if (t.kind != Token::Kind::Ident || t.text.size() != kw.size())
        return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i])
            return false;
    return true;
}

class FormulaParser
{
  public:
    FormulaParser(std::string_view src, const Schema& schema, bool allow_aux)
        : tokens_(tokenize(src)), schema_(schema), allow_aux_(allow_aux)
    {
    }

    Formula parse()
    {
        Formula f = parse_or();
        if (peek().kind != Token::Kind::End)
            fail("AND, OR, ')' or end of input");
        return f;
    }

    const std::vector<std::string>& aux_names() const noexcept { return aux_; }

  private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const std::string& expected) const
    {
        const Token& t = peek();
        std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.pos, "expected " + expected + ", got " + got);
    }

    Formula parse_or()
    {
        std::vector<Formula> parts{parse_and()};
        while (keyword_is(peek(), "OR"))
        {
            advance();
            parts.push_back(parse_and());
        }
        return f_or(std::move(parts));
    }

    Formula parse_and()
    {
        std::vector<Formula> parts{parse_unary()};
        while (keyword_is(peek(), "AND"))
        {
            advance();
            parts.push_back(parse_unary());
        }
        return f_and(std::move(parts));
    }

    Formula parse_unary()
    {
        if (keyword_is(peek(), "NOT"))
        {
            advance();
            return f_not(parse_unary());
        }
        if (keyword_is(peek(), "TRUE"))
        {
            advance();
            return f_true();
        }
        if (keyword_is(peek(), "FALSE"))
        {
            advance();
            return f_false();
        }
        if (peek().kind == Token::Kind::LParen)
        {
            advance();
            Formula f = parse_or();
            if (peek().kind != Token::Kind::RParen)
                fail("')'");
            advance();
            return f;
        }
        return parse_atom();
    }

    struct Typed
    {
        Term term;
        Sort sort;
        std::size_t pos;
    };

    Typed parse_term()
    {
        const Token& t = peek();
        if (t.kind == Token::Kind::String)
        {
            advance();
            if (t.text.empty())
                throw TypeError("empty string constant at " + std::to_string(t.pos));
            return {Term::literal(Value::text(t.text)), Sort::D, t.pos};
        }
        if (t.kind == Token::Kind::Number)
        {
            advance();
            auto q = parse_rational(t.text);
            if (!q)
                throw SyntaxError(t.pos, "malformed rational literal '" + t.text + "'");
            return {Term::literal(Value::rational(*q)), Sort::Q, t.pos};
        }
        if (t.kind != Token::Kind::Ident || keyword_is(t, "AND") || keyword_is(t, "OR") ||
            keyword_is(t, "NOT"))
            fail("a term (x.attr, y.attr, 'text' or a number)");
        advance();
        const VarId var = resolve_var(t);
        if (peek().kind != Token::Kind::Dot)
            fail("'.'");
        advance();
        const Token& attr = peek();
        if (attr.kind != Token::Kind::Ident)
            fail("an attribute name");
        advance();
        auto idx = schema_.index_of(attr.text);
        if (!idx)
            throw TypeError("unknown attribute '" + attr.text + "' at " + std::to_string(attr.pos));
        return {Term::attribute(var, *idx), schema_[*idx].sort, t.pos};
    }

    VarId resolve_var(const Token& t)
    {
        std::string name = t.text;
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (name == "x")
            return kVarX;
        if (name == "y")
            return kVarY;
        if (!allow_aux_)
            throw TypeError("unknown tuple variable '" + t.text + "' at " + std::to_string(t.pos) +
                            " (only x and y are allowed)");
        auto it = std::find(aux_.begin(), aux_.end(), name);
        if (it == aux_.end())
        {
            aux_.push_back(name);
            return static_cast<VarId>(aux_.size() + 1);
        }
        return static_cast<VarId>(it - aux_.begin() + 2);
    }

    Formula parse_atom()
    {
        Typed lhs = parse_term();
        const Token& op_tok = peek();
        if (op_tok.kind != Token::Kind::Cmp)
            fail("a comparator (=, !=, <, >, <=, >=)");
        advance();
        Cmp op = Cmp::Eq;
        if (op_tok.text == "=")
            op = Cmp::Eq;
        else if (op_tok.text == "!=")
            op = Cmp::Ne;
        else if (op_tok.text == "<")
            op = Cmp::Lt;
        else if (op_tok.text == "<=")
            op = Cmp::Le;
        else if (op_tok.text == ">")
            op = Cmp::Gt;
        else if (op_tok.text == ">=")
            op = Cmp::Ge;
        Typed rhs = parse_term();
        if (lhs.sort != rhs.sort)
            throw TypeError("sort mismatch at " + std::to_string(lhs.pos) + ": " +
                            std::string(sort_name(lhs.sort)) + " compared with " +
                            std::string(sort_name(rhs.sort)));
        if (lhs.sort == Sort::D && op != Cmp::Eq && op != Cmp::Ne)
            throw TypeError("order comparator '" + op_tok.text + "' on a str attribute at " +
                            std::to_string(op_tok.pos));
        return f_atom(Atom{lhs.term, op, rhs.term, lhs.sort});
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const Schema& schema_;
    bool allow_aux_;
    std::vector<std::string> aux_;
};

} // namespace detail

/// Parses a preference formula over the tuple variables x and y.
inline PreferenceFormula parse_formula(std::string_view text, const Schema& schema)
{
    detail::FormulaParser p(text, schema, false);
    return PreferenceFormula(schema, p.parse());
}

/// Parses a constraint that may mention further tuple variables; x and y
/// are variables 0 and 1, others are numbered from 2 in order of appearance.
inline Formula parse_constraint(std::string_view text, const Schema& schema,
                                std::vector<std::string>* aux_names = nullptr)
{
    detail::FormulaParser p(text, schema, true);
    Formula f = p.parse();
    if (aux_names)
        *aux_names = p.aux_names();
    return f;
}

} // namespace prefq

#endif // PREFQ_PARSER_HPP_
