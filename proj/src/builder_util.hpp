#pragma once

// Internal assembly helpers shared by the bound builders. Programs are put
// together as affine expressions over a compressed variable set (symmetry
// aliasing, zeroing and constant substitution all happen here), then packed
// into the standard SDP form.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <optional>
#include <stdexcept>
#include <vector>

#include "codesdp/sdp.hpp"

namespace codesdp::detail {

struct LinExpr {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;  // sorted by variable, merged

    void add_term(int var, double coef) {
        if (coef == 0.0) return;
        auto it = std::lower_bound(terms.begin(), terms.end(), var,
                                   [](const auto& t, int v) { return t.first < v; });
        if (it != terms.end() && it->first == var)
            it->second += coef;
        else
            terms.insert(it, {var, coef});
    }
    void add(const LinExpr& o, double scale) {
        constant += scale * o.constant;
        for (const auto& [v, c] : o.terms) add_term(v, scale * c);
    }
    void prune() {
        std::erase_if(terms, [](const auto& t) { return t.second == 0.0; });
    }
    bool is_zero() const {
        for (const auto& t : terms)
            if (t.second != 0.0) return false;
        return constant == 0.0;
    }
    static LinExpr variable(int v) {
        LinExpr e;
        e.terms.push_back({v, 1.0});
        return e;
    }
    static LinExpr value(double c) {
        LinExpr e;
        e.constant = c;
        return e;
    }
};

class ProgramBuilder {
  public:
    int new_variable() { return num_vars_++; }
    int num_vars() const { return num_vars_; }

    int add_dense_block(int size) {
        dense_sizes_.push_back(size);
        return static_cast<int>(dense_sizes_.size()) - 1;
    }

    // X(x) at (block,r,c) += e
    void entry(int block, int r, int c, const LinExpr& e) {
        if (e.is_zero()) return;
        if (r > c) std::swap(r, c);
        entries_[{block, r, c}].add(e, 1.0);
    }

    // lhs >= 0 becomes one row of the diagonal block (normalized by its
    // largest coefficient, duplicates dropped).
    void inequality(LinExpr lhs) {
        lhs.prune();
        if (lhs.terms.empty()) {
            if (lhs.constant < 0.0)
                throw std::invalid_argument("builder: constraint is constant and violated");
            return;
        }
        double scale = 0.0;
        for (const auto& [v, c] : lhs.terms) scale = std::max(scale, std::fabs(c));
        for (auto& [v, c] : lhs.terms) c /= scale;
        lhs.constant /= scale;
        if (seen_rows_.insert(row_key(lhs)).second) rows_.push_back(std::move(lhs));
    }

    // minimize (maximize=false) or maximize the expression; the constant part
    // is reported back through objective_constant().
    void set_objective(const LinExpr& obj, bool maximize) {
        objective_ = obj;
        maximize_ = maximize;
    }
    double objective_constant() const { return objective_.constant; }
    bool maximize() const { return maximize_; }

    sdp::SdpProblem finish() {
        sdp::SdpProblem p;
        p.m = num_vars_;
        p.c.assign(num_vars_, 0.0);
        for (const auto& [v, c] : objective_.terms) p.c[v] = maximize_ ? -c : c;

        // detect structurally present rows per dense block
        std::vector<std::vector<bool>> present(dense_sizes_.size());
        for (size_t b = 0; b < dense_sizes_.size(); ++b) present[b].assign(dense_sizes_[b], false);
        for (const auto& [key, e] : entries_) {
            if (e.is_zero()) continue;
            present[std::get<0>(key)][std::get<1>(key)] = true;
            present[std::get<0>(key)][std::get<2>(key)] = true;
        }
        std::vector<std::vector<int>> remap(dense_sizes_.size());
        std::vector<int> block_id(dense_sizes_.size(), -1);
        for (size_t b = 0; b < dense_sizes_.size(); ++b) {
            remap[b].assign(dense_sizes_[b], -1);
            int r = 0;
            for (int i = 0; i < dense_sizes_[b]; ++i)
                if (present[b][i]) remap[b][i] = r++;
            if (r > 0) {
                block_id[b] = p.num_blocks();
                p.block_layout.push_back(r);
            }
        }
        const int diag_block = rows_.empty() ? -1 : p.num_blocks();
        if (!rows_.empty()) p.block_layout.push_back(-static_cast<int>(rows_.size()));

        p.F.assign(num_vars_ + 1, {});
        auto put = [&](int matno, int blk, int r, int c, double v) {
            if (v != 0.0) p.F[matno].push_back(sdp::Entry{blk, r, c, v});
        };
        for (const auto& [key, e] : entries_) {
            const auto [b, r0, c0] = key;
            if (block_id[b] < 0) continue;
            const int r = remap[b][r0], c = remap[b][c0];
            put(0, block_id[b], r, c, -e.constant);
            for (const auto& [v, coef] : e.terms) put(v + 1, block_id[b], r, c, coef);
        }
        for (size_t i = 0; i < rows_.size(); ++i) {
            const int r = static_cast<int>(i);
            put(0, diag_block, r, r, -rows_[i].constant);
            for (const auto& [v, coef] : rows_[i].terms) put(v + 1, diag_block, r, r, coef);
        }
        p.canonicalize();
        p.validate();
        return p;
    }

  private:
    using Key = std::tuple<int, int, int>;
    static std::string row_key(const LinExpr& e) {
        std::string k = std::to_string(e.constant);
        for (const auto& [v, c] : e.terms) {
            k += '|';
            k += std::to_string(v);
            k += ':';
            k += std::to_string(c);
        }
        return k;
    }

    int num_vars_ = 0;
    std::vector<int> dense_sizes_;
    std::map<Key, LinExpr> entries_;
    std::vector<LinExpr> rows_;
    std::set<std::string> seen_rows_;
    LinExpr objective_;
    bool maximize_ = false;
};

}  // namespace codesdp::detail
