#include "sosltl/sdp.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace sosltl::sdp {

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_entry(std::string& out, int matno, const Entry& e, double value)
{
    out += std::to_string(matno) + " " + std::to_string(e.block + 1) + " " + std::to_string(e.row + 1) + " "
        + std::to_string(e.col + 1) + " " + fmt17(value) + "\n";
}

bool is_separator(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == ',' || c == '{' || c == '}' || c == '(' || c == ')';
}

struct Token {
    std::string text;
    int line;
};

double to_double(const Token& t)
{
    double v = 0.0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (!t.text.empty() && *b == '+')
        ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
        throw SdpaParseError("expected a number, got '" + t.text + "'", t.line);
    return v;
}

int to_int(const Token& t)
{
    int v = 0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (!t.text.empty() && *b == '+')
        ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
        throw SdpaParseError("expected an integer, got '" + t.text + "'", t.line);
    return v;
}

} // namespace

// The objective is written as matrix 0 with flipped sign: SDPA's dual problem
// maximises <F0, Y>, which equals minimising <C, X> in our equality form.
std::string export_sdpa(const Problem& p)
{
    p.validate();
    std::string out = "* sosltl semidefinite program\n";
    out += std::to_string(p.num_constraints()) + "\n";
    out += std::to_string(p.num_blocks()) + "\n";
    for (int i = 0; i < p.num_blocks(); ++i)
        out += (i ? " " : "") + std::to_string(p.block_sizes[i]);
    out += "\n";
    for (int i = 0; i < p.num_constraints(); ++i)
        out += (i ? " " : "") + fmt17(p.rhs[i]);
    out += "\n";
    for (const auto& e : p.objective)
        write_entry(out, 0, e, -e.value);
    for (const auto& e : p.constraints)
        write_entry(out, e.con + 1, e, e.value);
    return out;
}

Problem import_sdpa(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<Token> tokens;
    bool header = true;
    int header_lines = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (header && (line.empty() || line[0] == '"' || line[0] == '*'))
            continue;
        header = false;
        // m and nblocks lines may carry trailing annotations ("2 = mdim").
        const bool first_token_only = header_lines < 2;
        std::size_t i = 0;
        bool took = false;
        while (i < line.size()) {
            while (i < line.size() && is_separator(line[i]))
                ++i;
            if (i >= line.size())
                break;
            std::size_t j = i;
            while (j < line.size() && !is_separator(line[j]))
                ++j;
            tokens.push_back({line.substr(i, j - i), lineno});
            took = true;
            i = j;
            if (first_token_only)
                break;
        }
        if (took && header_lines < 2)
            ++header_lines;
    }

    std::size_t pos = 0;
    auto next = [&](const char* what) -> const Token& {
        if (pos >= tokens.size())
            throw SdpaParseError(std::string("unexpected end of input, expected ") + what, lineno);
        return tokens[pos++];
    };

    Problem p;
    const int m = to_int(next("constraint count"));
    if (m < 0)
        throw SdpaParseError("negative constraint count", tokens[pos - 1].line);
    const int nb = to_int(next("block count"));
    if (nb <= 0)
        throw SdpaParseError("block count must be positive", tokens[pos - 1].line);
    for (int k = 0; k < nb; ++k) {
        const Token& t = next("block size");
        const int s = to_int(t);
        if (s == 0)
            throw SdpaParseError("zero block size", t.line);
        p.block_sizes.push_back(s);
    }
    for (int i = 0; i < m; ++i)
        p.rhs.push_back(to_double(next("right-hand side")));

    while (pos < tokens.size()) {
        const Token& tm = next("matrix number");
        const Token& tb = next("block number");
        const Token& ti = next("row");
        const Token& tj = next("column");
        const Token& tv = next("value");
        Entry e;
        const int matno = to_int(tm);
        e.block = to_int(tb) - 1;
        e.row = to_int(ti) - 1;
        e.col = to_int(tj) - 1;
        e.value = to_double(tv);
        if (matno < 0 || matno > m)
            throw SdpaParseError("matrix number out of range", tm.line);
        if (e.block < 0 || e.block >= nb)
            throw SdpaParseError("block number out of range", tb.line);
        const int n = std::abs(p.block_sizes[e.block]);
        if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
            throw SdpaParseError("entry index out of range", ti.line);
        if (e.row > e.col)
            std::swap(e.row, e.col);
        if (p.block_sizes[e.block] < 0 && e.row != e.col)
            throw SdpaParseError("off-diagonal entry in a diagonal block", ti.line);
        if (matno == 0) {
            e.con = 0;
            e.value = -e.value;
            p.objective.push_back(e);
        } else {
            e.con = matno - 1;
            p.constraints.push_back(e);
        }
    }
    return p;
}

} // namespace sosltl::sdp
