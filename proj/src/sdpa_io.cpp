#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "codesdp/sdp.hpp"

namespace codesdp::sdp {

void SdpProblem::validate() const {
    if (m < 0 || static_cast<int>(c.size()) != m)
        throw std::invalid_argument("SdpProblem: objective length does not match m");
    if (static_cast<int>(F.size()) != m + 1)
        throw std::invalid_argument("SdpProblem: need m+1 constraint matrices");
    for (int b : block_layout)
        if (b == 0) throw std::invalid_argument("SdpProblem: zero block size");
    for (const auto& mat : F) {
        for (const auto& e : mat) {
            if (e.block < 0 || e.block >= num_blocks())
                throw std::invalid_argument("SdpProblem: entry block out of range");
            const int d = block_dim(e.block);
            if (e.row < 0 || e.col < 0 || e.row >= d || e.col >= d || e.row > e.col)
                throw std::invalid_argument("SdpProblem: entry indices out of range");
            if (block_diagonal(e.block) && e.row != e.col)
                throw std::invalid_argument("SdpProblem: off-diagonal entry in diagonal block");
        }
    }
    if (!variable_box.empty() && static_cast<int>(variable_box.size()) != m)
        throw std::invalid_argument("SdpProblem: variable_box length does not match m");
}

void SdpProblem::canonicalize() {
    auto key = [](const Entry& e) { return std::tuple(e.block, e.row, e.col); };
    for (auto& mat : F) {
        std::sort(mat.begin(), mat.end(),
                  [&](const Entry& a, const Entry& b) { return key(a) < key(b); });
        std::vector<Entry> merged;
        for (const auto& e : mat) {
            if (!merged.empty() && key(merged.back()) == key(e))
                merged.back().value += e.value;
            else
                merged.push_back(e);
        }
        std::erase_if(merged, [](const Entry& e) { return e.value == 0.0; });
        mat = std::move(merged);
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, ptr);
    if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
        s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

void write_sdpa(const SdpProblem& p, std::ostream& os) {
    p.validate();
    os << p.m << '\n';
    os << p.num_blocks() << '\n';
    for (int b = 0; b < p.num_blocks(); ++b) os << (b ? " " : "") << p.block_layout[b];
    os << '\n';
    for (int i = 0; i < p.m; ++i) os << (i ? " " : "") << format_double(p.c[i]);
    os << '\n';
    for (int matno = 0; matno <= p.m; ++matno) {
        auto entries = p.F[matno];
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return std::tuple(a.block, a.row, a.col) < std::tuple(b.block, b.row, b.col);
        });
        for (const auto& e : entries) {
            if (e.value == 0.0) continue;
            os << matno << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' '
               << format_double(e.value) << '\n';
        }
    }
    if (!os) throw std::runtime_error("write_sdpa: write failure");
}

namespace {

[[noreturn]] void parse_fail(int lineno, const std::string& what) {
    throw std::runtime_error("sdpa parse error at line " + std::to_string(lineno) + ": " + what);
}

bool comment_or_blank(const std::string& line) {
    for (char ch : line) {
        if (ch == ' ' || ch == '\t' || ch == '\r') continue;
        return ch == '*' || ch == '"';
    }
    return true;
}

// Fetch the next content line; returns false at EOF.
bool next_line(std::istream& is, std::string& line, int& lineno) {
    while (std::getline(is, line)) {
        ++lineno;
        if (!comment_or_blank(line)) return true;
    }
    return false;
}

std::vector<double> parse_numbers(std::string line, int lineno) {
    for (char& ch : line)
        if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    std::istringstream ss(line);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) parse_fail(lineno, "bad number '" + tok + "'");
        } catch (const std::logic_error&) {
            parse_fail(lineno, "bad number '" + tok + "'");
        }
    }
    return out;
}

}  // namespace

SdpProblem read_sdpa(std::istream& is) {
    SdpProblem p;
    std::string line;
    int lineno = 0;
    if (!next_line(is, line, lineno)) parse_fail(lineno + 1, "missing variable count");
    {
        std::istringstream ss(line);
        if (!(ss >> p.m) || p.m < 0) parse_fail(lineno, "bad variable count");
    }
    int nblocks = 0;
    if (!next_line(is, line, lineno)) parse_fail(lineno + 1, "missing block count");
    {
        std::istringstream ss(line);
        if (!(ss >> nblocks) || nblocks <= 0) parse_fail(lineno, "bad block count");
    }
    if (!next_line(is, line, lineno)) parse_fail(lineno + 1, "missing block sizes");
    for (double v : parse_numbers(line, lineno)) p.block_layout.push_back(static_cast<int>(v));
    if (static_cast<int>(p.block_layout.size()) != nblocks)
        parse_fail(lineno, "block size count does not match block count");
    if (!next_line(is, line, lineno)) parse_fail(lineno + 1, "missing objective");
    p.c = parse_numbers(line, lineno);
    // Objective values may continue on following lines in some writers; we
    // keep reading number-only lines until m values are present.
    while (static_cast<int>(p.c.size()) < p.m) {
        if (!next_line(is, line, lineno)) parse_fail(lineno + 1, "objective shorter than m");
        for (double v : parse_numbers(line, lineno)) p.c.push_back(v);
    }
    if (static_cast<int>(p.c.size()) != p.m) parse_fail(lineno, "objective longer than m");
    p.F.assign(p.m + 1, {});
    while (next_line(is, line, lineno)) {
        std::istringstream ss(line);
        long matno, blk, i, j;
        double v;
        if (!(ss >> matno >> blk >> i >> j >> v)) parse_fail(lineno, "bad entry line");
        std::string rest;
        if (ss >> rest) parse_fail(lineno, "trailing tokens");
        if (matno < 0 || matno > p.m) parse_fail(lineno, "matno out of range");
        if (blk < 1 || blk > nblocks) parse_fail(lineno, "block out of range");
        const int d = p.block_dim(static_cast<int>(blk - 1));
        if (i < 1 || j < 1 || i > d || j > d) parse_fail(lineno, "index out of range");
        if (i > j) std::swap(i, j);
        p.F[matno].push_back(Entry{static_cast<int>(blk - 1), static_cast<int>(i - 1),
                                   static_cast<int>(j - 1), v});
    }
    p.validate();
    return p;
}

void write_sdpa_solution(const SdpSolution& sol, const SdpProblem& p, std::ostream& os) {
    for (int i = 0; i < p.m; ++i) os << (i ? " " : "") << format_double(sol.x[i]);
    os << '\n';
    auto dump = [&](int matno, const BlockMatrix& M) {
        if (M.empty()) return;
        for (int b = 0; b < M.num_blocks(); ++b) {
            const int d = M.dim(b);
            for (int r = 0; r < d; ++r)
                for (int c = r; c < d; ++c) {
                    const double v = M.is_diag(b) ? (r == c ? M.dvec(b)(r) : 0.0) : M.mat(b)(r, c);
                    if (v == 0.0) continue;
                    os << matno << ' ' << b + 1 << ' ' << r + 1 << ' ' << c + 1 << ' '
                       << format_double(v) << '\n';
                }
        }
    };
    dump(1, sol.Xslack);
    dump(2, sol.Y);
}

SdpSolution read_sdpa_solution(std::istream& is, const SdpProblem& p) {
    SdpSolution sol;
    std::string line;
    int lineno = 0;
    if (!next_line(is, line, lineno)) parse_fail(lineno + 1, "missing primal vector");
    sol.x = parse_numbers(line, lineno);
    if (static_cast<int>(sol.x.size()) != p.m)
        throw std::runtime_error("sdpa solution: primal vector length " +
                                 std::to_string(sol.x.size()) + " does not match m=" +
                                 std::to_string(p.m));
    sol.Xslack = BlockMatrix(p);
    sol.Y = BlockMatrix(p);
    bool saw_dual = false;
    while (next_line(is, line, lineno)) {
        std::istringstream ss(line);
        long matno, blk, i, j;
        double v;
        if (!(ss >> matno >> blk >> i >> j >> v)) parse_fail(lineno, "bad entry line");
        if (matno != 1 && matno != 2) parse_fail(lineno, "matno must be 1 or 2");
        if (blk < 1 || blk > p.num_blocks())
            throw std::runtime_error("sdpa solution: block " + std::to_string(blk) +
                                     " out of range (problem has " +
                                     std::to_string(p.num_blocks()) + " blocks)");
        const int b = static_cast<int>(blk - 1);
        const int d = p.block_dim(b);
        if (i < 1 || j < 1 || i > d || j > d) parse_fail(lineno, "index out of range");
        BlockMatrix& M = (matno == 1) ? sol.Xslack : sol.Y;
        if (matno == 2) saw_dual = true;
        if (M.is_diag(b)) {
            if (i != j) parse_fail(lineno, "off-diagonal entry in diagonal block");
            M.dvec(b)(i - 1) = v;
        } else {
            M.mat(b)(i - 1, j - 1) = v;
            M.mat(b)(j - 1, i - 1) = v;
        }
    }
    sol.status = saw_dual ? SolveStatus::optimal : SolveStatus::failed;
    double pobj = 0.0;
    for (int i = 0; i < p.m; ++i) pobj += p.c[i] * sol.x[i];
    sol.primal_obj = pobj;
    sol.dual_obj = sparse_inner(p.F[0], sol.Y);
    sol.gap = std::fabs(sol.primal_obj - sol.dual_obj) /
              (1.0 + std::fabs(sol.primal_obj) + std::fabs(sol.dual_obj));
    return sol;
}

}  // namespace codesdp::sdp
