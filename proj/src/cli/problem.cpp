#include "sosltl/problem.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace sosltl::cli {

const Value* Section::find(const std::string& key) const
{
    for (const auto& [k, v] : entries)
        if (k == key)
            return &v;
    return nullptr;
}

namespace {

class Reader {
public:
    explicit Reader(const std::string& text) : s_(text) {}

    std::vector<Section> document()
    {
        std::vector<Section> out{Section{"", 1, {}}};
        std::set<std::string> names;
        for (;;) {
            skip_blank(true);
            if (eof())
                break;
            if (peek() == '[') {
                const int l = line_, c = col_;
                get();
                skip_blank(false);
                std::string name = key();
                skip_blank(false);
                expect(']');
                if (!names.insert(name).second)
                    throw ProblemError(l, c, "duplicate section [" + name + "]");
                out.push_back(Section{name, l, {}});
            } else {
                const int l = line_, c = col_;
                std::string k = key();
                skip_blank(false);
                expect('=');
                skip_blank(false);
                Value v = value();
                if (out.back().find(k))
                    throw ProblemError(l, c, "duplicate key '" + k + "'");
                out.back().entries.emplace_back(std::move(k), std::move(v));
            }
            skip_blank(false);
            if (!eof() && peek() != '\n')
                fail("unexpected text after value");
        }
        if (out.front().entries.empty())
            out.erase(out.begin());
        return out;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    [[nodiscard]] bool eof() const { return pos_ >= s_.size(); }
    [[nodiscard]] char peek() const { return s_[pos_]; }
    char get()
    {
        const char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ProblemError(line_, col_, msg); }
    void expect(char c)
    {
        if (eof() || peek() != c)
            fail(std::string("expected '") + c + "'");
        get();
    }

    void skip_blank(bool newlines)
    {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n'))
                get();
            else if (c == '#')
                while (!eof() && peek() != '\n')
                    get();
            else
                break;
        }
    }

    std::string key()
    {
        if (!eof() && peek() == '"')
            return string_body();
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            k += get();
        if (k.empty())
            fail("expected a key");
        return k;
    }

    std::string string_body()
    {
        expect('"');
        std::string out;
        for (;;) {
            if (eof() || peek() == '\n')
                fail("unterminated string");
            const char c = get();
            if (c == '"')
                return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof())
                fail("unterminated string");
            const char e = get();
            switch (e) {
            case '"':
            case '\\':
                out += e;
                break;
            case 'n':
                out += '\n';
                break;
            case 't':
                out += '\t';
                break;
            default:
                fail(std::string("unknown escape \\") + e);
            }
        }
    }

    Value value()
    {
        Value v;
        v.line = line_;
        v.column = col_;
        if (eof())
            fail("expected a value");
        const char c = peek();
        if (c == '"') {
            v.kind = Value::Kind::String;
            v.str = string_body();
        } else if (c == '[') {
            v.kind = Value::Kind::Array;
            get();
            for (;;) {
                skip_blank(true);
                if (!eof() && peek() == ']') {
                    get();
                    break;
                }
                v.items.push_back(value());
                skip_blank(true);
                if (!eof() && peek() == ',') {
                    get();
                    continue;
                }
                skip_blank(true);
                expect(']');
                break;
            }
        } else if (s_.compare(pos_, 4, "true") == 0 || s_.compare(pos_, 5, "false") == 0) {
            v.kind = Value::Kind::Bool;
            v.boolean = c == 't';
            for (int k = 0, n = v.boolean ? 4 : 5; k < n; ++k)
                get();
        } else {
            std::size_t end = pos_;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                                       s_[end] == '+' || s_[end] == '-'))
                ++end;
            const std::string tok = s_.substr(pos_, end - pos_);
            char* stop = nullptr;
            v.num = std::strtod(tok.c_str(), &stop);
            if (tok.empty() || *stop != '\0')
                fail("expected a value");
            v.kind = Value::Kind::Number;
            v.integer = tok.find_first_of(".eE") == std::string::npos;
            while (pos_ < end)
                get();
        }
        return v;
    }
};

[[noreturn]] void bad(const Value& v, const std::string& msg) { throw ProblemError(v.line, v.column, msg); }

const std::string& as_string(const Value& v)
{
    if (v.kind != Value::Kind::String)
        bad(v, "expected a string");
    return v.str;
}

double as_number(const Value& v)
{
    if (v.kind != Value::Kind::Number)
        bad(v, "expected a number");
    return v.num;
}

long as_integer(const Value& v, long lo, long hi)
{
    if (v.kind != Value::Kind::Number || !v.integer)
        bad(v, "expected an integer");
    if (v.num < lo || v.num > hi)
        bad(v, "value out of range");
    return static_cast<long>(v.num);
}

const std::vector<Value>& as_array(const Value& v)
{
    if (v.kind != Value::Kind::Array)
        bad(v, "expected an array");
    return v.items;
}

Polynomial as_poly(const Value& v, const std::vector<std::string>& vars)
{
    const std::string& s = as_string(v);
    try {
        return parse_polynomial(s, vars);
    } catch (const PolyParseError& e) {
        throw ProblemError(v.line, v.column + 1 + static_cast<int>(e.position), e.what());
    } catch (const PolyError& e) {
        bad(v, e.what());
    }
}

// ["g1", "g2"] is one piece; [["g1"], ["g2", "g3"]] is a union of pieces.
region::Region as_region(const Value& v, const std::vector<std::string>& vars)
{
    const auto& items = as_array(v);
    if (items.empty())
        bad(v, "a region needs at least one inequality");
    region::Region r(vars.size());
    auto piece = [&](const Value& p) {
        region::BasicRegion b;
        for (const auto& g : as_array(p))
            b.g.push_back(as_poly(g, vars));
        if (b.g.empty())
            bad(p, "a piece needs at least one inequality");
        r.pieces.push_back(std::move(b));
    };
    if (items.front().kind == Value::Kind::Array)
        for (const auto& p : items)
            piece(p);
    else
        piece(v);
    return r;
}

const Section* section(const std::vector<Section>& doc, const std::string& name)
{
    for (const auto& s : doc)
        if (s.name == name)
            return &s;
    return nullptr;
}

const Value& required(const Section& s, const std::string& key)
{
    const Value* v = s.find(key);
    if (!v)
        throw ProblemError(s.line, 1, "[" + s.name + "] needs '" + key + "'");
    return *v;
}

void check_keys(const Section& s, const std::set<std::string>& allowed)
{
    for (const auto& [k, v] : s.entries)
        if (!allowed.count(k))
            bad(v, "unknown key '" + k + "' in [" + s.name + "]");
}

void read_options(const Section& s, Problem& p)
{
    check_keys(s, {"max_degree", "degrees", "epsilon", "time_budget", "seed", "samples", "horizon", "step",
                   "grid", "validation_samples", "validation_trajectories"});
    auto& o = p.options;
    for (const auto& [k, v] : s.entries) {
        if (k == "max_degree") {
            o.max_degree = static_cast<int>(as_integer(v, 0, 40));
        } else if (k == "degrees") {
            o.degrees.clear();
            for (const auto& d : as_array(v))
                o.degrees.push_back(static_cast<int>(as_integer(d, 0, 40)));
        } else if (k == "epsilon") {
            o.epsilon = as_number(v);
            if (!(o.epsilon > 0.0))
                bad(v, "epsilon must be positive");
        } else if (k == "time_budget") {
            o.time_budget = as_number(v);
        } else if (k == "seed") {
            const auto seed = static_cast<unsigned>(as_integer(v, 0, 4294967295L));
            p.falsify.seed = seed;
            o.validation.seed = seed;
            o.disjoint.seed = seed;
        } else if (k == "samples") {
            p.falsify.samples = static_cast<std::size_t>(as_integer(v, 0, 100000000));
        } else if (k == "horizon") {
            p.falsify.horizon = as_number(v);
        } else if (k == "step") {
            p.falsify.step = as_number(v);
        } else if (k == "grid") {
            p.grid = static_cast<int>(as_integer(v, 0, 100000));
        } else if (k == "validation_samples") {
            o.validation.samples_per_piece = static_cast<std::size_t>(as_integer(v, 1, 100000000));
        } else if (k == "validation_trajectories") {
            o.validation.trajectories = static_cast<std::size_t>(as_integer(v, 0, 1000000));
        }
    }
}

} // namespace

std::vector<Section> parse_toml(const std::string& text) { return Reader(text).document(); }

Problem parse_problem(const std::string& text)
{
    const auto doc = parse_toml(text);
    for (const auto& s : doc)
        if (s.name != "system" && s.name != "propositions" && s.name != "specification" && s.name != "options")
            throw ProblemError(s.line, 1, "unknown section [" + s.name + "]");
    const Section* sys = section(doc, "system");
    const Section* props = section(doc, "propositions");
    const Section* spec = section(doc, "specification");
    if (!sys)
        throw ProblemError(1, 1, "missing [system]");
    if (!spec)
        throw ProblemError(1, 1, "missing [specification]");
    check_keys(*sys, {"variables", "dynamics", "domain"});
    check_keys(*spec, {"formula"});

    Problem p;
    auto& s = p.system;
    const Value& vars = required(*sys, "variables");
    std::set<std::string> seen;
    for (const auto& v : as_array(vars)) {
        const std::string& name = as_string(v);
        if (name.empty() || !seen.insert(name).second)
            bad(v, "variable names must be unique and nonempty");
        s.vars.push_back(name);
    }
    if (s.vars.empty())
        bad(vars, "at least one variable is needed");

    const Value& dyn = required(*sys, "dynamics");
    std::vector<Polynomial> f;
    for (const auto& d : as_array(dyn))
        f.push_back(as_poly(d, s.vars));
    if (f.size() != s.vars.size())
        bad(dyn, "need one right-hand side per variable");
    s.f = VectorField(std::move(f));
    s.domain = as_region(required(*sys, "domain"), s.vars);

    if (props) {
        for (const auto& [name, v] : props->entries) {
            if (s.props.find(name) >= 0)
                bad(v, "duplicate proposition '" + name + "'");
            if (s.props.size() >= 16)
                bad(v, "at most 16 propositions are supported");
            s.props.add(name);
            s.regions.push_back(as_region(v, s.vars));
        }
    }

    const Value& fv = required(*spec, "formula");
    p.formula = as_string(fv);
    p.formula_line = fv.line;
    ltl::PropositionTable table = s.props;
    try {
        ltl::parse(p.formula, table, false);
    } catch (const std::exception& e) {
        bad(fv, std::string("formula: ") + e.what());
    }

    p.options.disjoint.box = region::bounding_box(s.domain, {});
    if (const Section* o = section(doc, "options"))
        read_options(*o, p);
    return p;
}

Problem load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ProblemError(0, 0, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

} // namespace sosltl::cli
