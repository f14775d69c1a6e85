#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "codesdp/combinatorics.hpp"

namespace codesdp::terwilliger {

// Orbit class of an ordered word triple (base, v, w) under the
// distance-preserving automorphisms fixing the base word:
//   i = d(base,v), j = d(base,w),
//   t = #{h : v_h != 0 and w_h != 0},  p = #{h : v_h = w_h != 0}.
// The distance d(v,w) equals i + j - t - p. For q = 2 always p = t.
struct TripleClass {
    int i = 0, j = 0, t = 0, p = 0;
    friend auto operator<=>(const TripleClass&, const TripleClass&) = default;
    int dist() const { return i + j - t - p; }
};

bool class_valid(int q, int n, const TripleClass& c);

// All members of I(q,n) in lexicographic (i,j,t,p) order, with O(1) lookup.
class ClassIndex {
  public:
    ClassIndex(int q, int n);

    int q() const { return q_; }
    int n() const { return n_; }
    bool binary() const { return q_ == 2; }
    int size() const { return static_cast<int>(classes_.size()); }
    const std::vector<TripleClass>& classes() const { return classes_; }
    const TripleClass& at(int ordinal) const { return classes_[ordinal]; }
    // -1 when the tuple is not a member of I(q,n).
    int ordinal(const TripleClass& c) const;

    // Ordinal of the lexicographically smallest member of the symmetry orbit
    // of `c`: classes with equal t-p whose distance triples
    // (i, j, i+j-t-p) are permutations of each other carry equal
    // coefficients for any matrix arising from a code.
    int canonical(const TripleClass& c) const;
    // All members of the orbit of `c` (each valid assignment of the distance
    // triple), sorted and unique.
    std::vector<TripleClass> orbit(const TripleClass& c) const;

  private:
    int q_, n_;
    std::vector<TripleClass> classes_;
    std::vector<int> lut_;  // (i,j,t,p) -> ordinal, -1 if absent
    int lut_at(int i, int j, int t, int p) const;
};

ClassIndex enumerate_classes(int q, int n);

// Number of nonzero entries of the basis matrix M_{i,j}^{t,p}:
//   (q-1)^{i+j-t} (q-2)^{t-p} * multinomial(n; p, t-p, i-t, j-t),
// with the convention 0^0 = 1.
Int gamma(int q, int n, const TripleClass& c);

// beta_{i,j,k}^{m,t} = C(m-2k,i-k) *
//     sum_p (-1)^{k-p} C(k,p) C(i-p,t-p) C(m+p-i-k, m+t-i-j).
Int beta(int m, int i, int j, int k, int t);

// The equivalent form that is manifestly symmetric in i and j:
//   sum_u (-1)^{u-t} C(u,t) C(m-2k,u-k) C(m-k-u,i-u) C(m-k-u,j-u).
// Kept as an independent route for cross-checking.
Int beta_symmetric(int m, int i, int j, int k, int t);

// Exact integer core of the nonbinary block coefficient:
//   beta_{i-a,j-a,k-a}^{n-a,t-a} *
//     sum_g (-1)^{a-g} C(a,g) C(t-a,p-g) (q-2)^{t-a-p+g}.
Int alpha_core(int q, int n, int i, int j, int t, int p, int a, int k);

// alpha(i,j,t,p,a,k) = alpha_core * (q-1)^{(i+j)/2 - t}; the half-integer
// power of (q-1) is the only inexact factor. Requires q >= 3 and
// 0 <= a <= k <= min(i,j).
double alpha(int q, int n, int i, int j, int t, int p, int a, int k);

// One block of the reduced algebra: rows and columns labelled by
// i = k .. n+a-k, repeated `multiplicity` times in the full unitary image.
struct BlockSpec {
    int a = 0, k = 0;
    int size = 0;  // n + a + 1 - 2k
    Int multiplicity;
    std::vector<int> row_labels;
};

// Admissible (a,k) sorted by (a,k). For q = 2 only a = 0 occurs and the
// multiplicities degenerate to C(n,k) - C(n,k-1).
std::vector<BlockSpec> block_specs(int q, int n);

// Real coefficient vector over I(q,n), ordered like the ClassIndex.
struct AlgebraElement {
    const ClassIndex* index = nullptr;
    std::vector<double> coeff;

    AlgebraElement() = default;
    explicit AlgebraElement(const ClassIndex& idx)
        : index(&idx), coeff(idx.size(), 0.0) {}
    double& operator[](const TripleClass& c);
    double get(const TripleClass& c) const;
};

struct BlockDiagonalForm {
    std::vector<BlockSpec> specs;
    std::vector<Eigen::MatrixXd> blocks;
    // When set, blocks[0] belongs to (a,k)=(0,0) and carries an extra
    // 0-indexed border row/column.
    bool bordered = false;

    double min_eigenvalue() const;
};

// Blocks (sum_{t,p} alpha(i,j,t,p,a,k) x_{i,j}^{t,p})_{i,j=k}^{n+a-k} for all
// admissible (a,k). The binomial^{-1/2} prefactors of the unitary image are
// deliberately omitted; positive semidefiniteness is unaffected.
BlockDiagonalForm block_image(const AlgebraElement& x);

// As block_image, but the (a,k)=(0,0) block L is replaced by
// [[corner, b^T],[b, L]] with b_i = C(n,i)(q-1)^i x_{i,i}^{i,i}. With
// corner = 1 this tests R(M) >= 0 for the represented matrix M.
BlockDiagonalForm bordered_block_image(const AlgebraElement& x, double corner);

// Binary counterparts using beta_{i,j,k}^{n,t} over I(2,n).
BlockDiagonalForm binary_block_image(const AlgebraElement& x);
BlockDiagonalForm binary_bordered_block_image(const AlgebraElement& x, double corner);

// ---- Johnson scheme -------------------------------------------------------

// Orbit class of a pair (U,V) of w-subsets relative to a fixed w-set W:
// i = |U cap W|, j = |V cap W|, s = |U cap V cap W|, t = |U cap V \ W|.
struct JohnsonClass {
    int i = 0, j = 0, s = 0, t = 0;
    friend auto operator<=>(const JohnsonClass&, const JohnsonClass&) = default;
};

std::vector<JohnsonClass> enumerate_johnson_classes(int n, int w);

struct JohnsonBlockSpec {
    int k = 0, kp = 0;
    Int multiplicity;
    std::vector<int> row_labels;  // values of i = |U cap W|
};

// Block image of sum coeff_{i,j,s,t} M_{i,j}^{s,t} in the Terwilliger algebra
// of the Johnson scheme J(n,w): blocks indexed by (k,k'), k <= floor(w/2),
// k' <= floor((n-w)/2), k+k' <= w, entries
//   sum_{s,t} coeff * beta_{i,j,k}^{w,s} * beta_{w-i,w-j,k'}^{n-w,t}
// with rows labelled by i in {k..w-k} with w-i in {k'..n-w-k'} (prefactors
// omitted as above). Requires 1 <= w <= floor(n/2).
struct JohnsonBlockForm {
    std::vector<JohnsonBlockSpec> specs;
    std::vector<Eigen::MatrixXd> blocks;
};
JohnsonBlockForm johnson_block_image(int n, int w,
                                     const std::vector<std::pair<JohnsonClass, double>>& coeffs);

// ---- dense oracle for tiny Hamming spaces ----------------------------------

// Materializes the full q^n x q^n picture: the class of every word pair, and
// the unitary U assembled column by column from the Psi vectors (binary case:
// the u_{k,b,i}). Intended for cross-checking the block formulas on tiny
// instances; requires q^n <= 4096.
class DenseOracle {
  public:
    DenseOracle(int q, int n);

    int q() const { return q_; }
    int n() const { return n_; }
    int space() const { return space_; }
    const ClassIndex& index() const { return index_; }

    // Class ordinal of the pair (word u, word v); words are encoded base q.
    int pair_class(int u, int v) const { return pair_class_[static_cast<size_t>(u) * space_ + v]; }

    Eigen::MatrixXd dense_matrix(const AlgebraElement& x) const;
    // R(M) = [[1, diag(M)^T],[diag(M), M]] of the dense matrix.
    Eigen::MatrixXd dense_bordered(const AlgebraElement& x, double corner) const;

    const Eigen::MatrixXcd& unitary() const { return U_; }
    // Column metadata, aligned with the columns of U.
    struct Column {
        int a, k, i;
        int a_word;   // encoded word with support of size a, letters < q-1
        int b_index;  // which orthonormal basis vector of L_{k-a}
    };
    const std::vector<Column>& columns() const { return columns_; }

    // U* M U, for comparison against the predicted block layout.
    Eigen::MatrixXcd conjugated(const AlgebraElement& x) const;

    // max |U*U - I|.
    double unitarity_error() const;

  private:
    int q_, n_, space_;
    ClassIndex index_;
    std::vector<int> pair_class_;
    Eigen::MatrixXcd U_;
    std::vector<Column> columns_;
};

// Dense oracle for the Johnson space of w-subsets of an n-set.
class JohnsonDenseOracle {
  public:
    JohnsonDenseOracle(int n, int w);
    int space() const { return static_cast<int>(subsets_.size()); }
    const std::vector<JohnsonClass>& classes() const { return classes_; }
    Eigen::MatrixXd dense_matrix(const std::vector<std::pair<JohnsonClass, double>>& coeffs) const;

  private:
    int n_, w_;
    std::vector<unsigned> subsets_;
    std::vector<JohnsonClass> classes_;
    std::vector<int> pair_class_;
};

// ---- serialization ----------------------------------------------------------

// Text format: header line "q n", then one line per class
// "i j t p coefficient", coefficient in full-precision decimal or num/den.
void write_element(std::ostream& os, const AlgebraElement& x);
// The returned element references `idx`; the header must match it.
AlgebraElement read_element(std::istream& is, const ClassIndex& idx);

}  // namespace codesdp::terwilliger
