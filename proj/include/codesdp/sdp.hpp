#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace codesdp::sdp {

// One nonzero of a constraint matrix; row <= col, 0-based.
struct Entry {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
    friend bool operator==(const Entry&, const Entry&) = default;
};

// Standard-form block SDP:
//   minimize c^T x  subject to  X(x) := sum_i x_i F_i - F_0 >= 0 blockwise.
// A negative block size denotes a diagonal (LP) block. Linear inequalities
// a^T x >= b are rows of diagonal blocks.
struct SdpProblem {
    int m = 0;
    std::vector<double> c;
    std::vector<int> block_layout;
    std::vector<std::vector<Entry>> F;  // size m+1, F[0] is F_0
    // Optional per-variable intervals; used only by certification.
    std::vector<std::pair<double, double>> variable_box;

    int num_blocks() const { return static_cast<int>(block_layout.size()); }
    int block_dim(int b) const { return std::abs(block_layout[b]); }
    bool block_diagonal(int b) const { return block_layout[b] < 0; }
    void validate() const;           // throws std::invalid_argument
    void canonicalize();             // sort entries, merge duplicates
    friend bool operator==(const SdpProblem&, const SdpProblem&) = default;
};

// Block-diagonal symmetric matrix; diagonal blocks store only their diagonal.
class BlockMatrix {
  public:
    BlockMatrix() = default;
    explicit BlockMatrix(const SdpProblem& p);

    int num_blocks() const { return static_cast<int>(diag_.size()); }
    bool is_diag(int b) const { return diag_[b]; }
    Eigen::VectorXd& dvec(int b) { return dvecs_[b]; }
    const Eigen::VectorXd& dvec(int b) const { return dvecs_[b]; }
    Eigen::MatrixXd& mat(int b) { return mats_[b]; }
    const Eigen::MatrixXd& mat(int b) const { return mats_[b]; }
    int dim(int b) const { return diag_[b] ? static_cast<int>(dvecs_[b].size())
                                           : static_cast<int>(mats_[b].rows()); }
    int total_dim() const;

    void set_zero();
    void set_identity(double scale);
    double inner(const BlockMatrix& other) const;  // <A,B> = tr(AB)
    double min_eigenvalue() const;
    double max_abs_eigenvalue() const;
    // this += s * other
    void axpy(double s, const BlockMatrix& other);

    bool empty() const { return diag_.empty(); }

  private:
    std::vector<bool> diag_;
    std::vector<Eigen::VectorXd> dvecs_;
    std::vector<Eigen::MatrixXd> mats_;
};

// <F_i, Y> for a sparse matno against a block matrix (off-diagonal entries
// count twice). Plain summation.
double sparse_inner(const std::vector<Entry>& f, const BlockMatrix& y);

enum class SolveStatus { optimal, near_optimal, infeasible, unbounded, failed };
std::string to_string(SolveStatus s);

struct SdpSolution {
    SolveStatus status = SolveStatus::failed;
    std::vector<double> x;
    BlockMatrix Y;       // dual matrix
    BlockMatrix Xslack;  // primal slack sum x_i F_i - F_0
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;        // relative duality gap
    double primal_infeas = 0.0;
    double dual_infeas = 0.0;
    int iterations = 0;
    std::string message;
};

struct SolveOptions {
    double tol_gap = 1e-7;
    double tol_feas = 1e-8;
    int max_iterations = 200;
    enum class Backend { builtin, external };
    Backend backend = Backend::builtin;
    // Command with {in} and {out} placeholders; used when backend==external.
    std::string command_template;
    bool verbose = false;
};

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});

// ---- SDPA sparse format ------------------------------------------------------

// Emits the .dat-s dialect bit-exactly: m, nblocks, block sizes, objective,
// then "matno blkno i j value" lines (1-based, i <= j) sorted by
// (matno, blkno, i, j), values in shortest round-trip decimal.
void write_sdpa(const SdpProblem& p, std::ostream& os);

// Inverse of write_sdpa; accepts comment lines ('*' or '"'), braces and
// commas in the block-size line, and any decimal/exponent number format.
SdpProblem read_sdpa(std::istream& is);

// Solution file layout (CSDP style): line 1 holds the m primal values, then
// entries "matno blkno i j value" with matno 1 = primal slack X and
// matno 2 = dual matrix Y.
SdpSolution read_sdpa_solution(std::istream& is, const SdpProblem& p);
void write_sdpa_solution(const SdpSolution& sol, const SdpProblem& p, std::ostream& os);

// Shortest round-trip decimal with a trailing ".0" for integral values.
std::string format_double(double v);

}  // namespace codesdp::sdp
