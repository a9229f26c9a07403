#include "sosltl/poly.hpp"

#include <cctype>
#include <charconv>

namespace sosltl {

namespace {

class PolyParser {
public:
    PolyParser(const std::string& text, const std::vector<std::string>& names)
        : s_(text), names_(names) {}

    Polynomial run()
    {
        Polynomial p = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw PolyParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return p;
    }

private:
    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr()
    {
        Polynomial p = term();
        for (;;) {
            if (accept('+'))
                p += term();
            else if (accept('-'))
                p -= term();
            else
                return p;
        }
    }

    Polynomial term()
    {
        Polynomial p = unary();
        for (;;) {
            if (accept('*')) {
                p = p * unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Polynomial d = unary();
                if (d.degree() > 0)
                    throw PolyParseError("division by a non-constant", at);
                const double c = d.coefficient(Monomial(names_.size()));
                if (c == 0.0)
                    throw PolyParseError("division by zero", at);
                p *= 1.0 / c;
            } else {
                return p;
            }
        }
    }

    Polynomial unary()
    {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return power();
    }

    Polynomial power()
    {
        Polynomial base = atom();
        if (!accept('^'))
            return base;
        skip_ws();
        const std::size_t at = pos_;
        unsigned k = 0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), k);
        if (ec != std::errc() || ptr == s_.data() + pos_)
            throw PolyParseError("expected non-negative integer exponent", at);
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        return base.pow(k);
    }

    Polynomial atom()
    {
        skip_ws();
        if (pos_ >= s_.size())
            throw PolyParseError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial p = expr();
            if (!accept(')'))
                throw PolyParseError("expected ')'", pos_);
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc())
                throw PolyParseError("malformed number", pos_);
            pos_ = static_cast<std::size_t>(ptr - s_.data());
            return Polynomial::constant(names_.size(), v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size()
                   && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            for (std::size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == name)
                    return Polynomial::variable(names_.size(), i);
            throw PolyParseError("unknown variable '" + name + "'", start);
        }
        throw PolyParseError(std::string("unexpected '") + c + "'", pos_);
    }

    const std::string& s_;
    const std::vector<std::string>& names_;
    std::size_t pos_ = 0;
};

} // namespace

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names)
{
    return PolyParser(text, names).run();
}

} // namespace sosltl
