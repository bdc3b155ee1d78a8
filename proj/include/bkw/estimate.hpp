#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bkw {

struct CostModelKnobs {
    double reduction_multiplier = 1.1; // 1.0 optimistic, 1.1 reasonable, 2.0 pessimistic
    double quantizer_variance_gain = 1.3; // 1.0 naive, 1.3 reasonable, 2*pi*e/12 asymptotic
    double svp_exponent = 0.2972;      // c in {2, 1, 0.2972, 0.286}

    static CostModelKnobs optimistic() { return {1.0, 2.0 * M_E * M_PI / 12.0, 0.2972}; }
    static CostModelKnobs reasonable() { return {1.1, 1.3, 0.2972}; }
    static CostModelKnobs pessimistic() { return {2.0, 1.0, 0.2972}; }
};

enum class SecretKind { SwitchedGaussian, Binary, DiscreteGaussianOfParam };

struct BkwEstimate {
    std::size_t n = 0;
    std::int64_t q = 0;
    double sigma = 0.0;     // error stddev
    std::size_t k = 0;
    double log_m = 0.0;
    double log_N = 0.0;
    double bits = 0.0;
};

// Cost unit (the single documented calibration, fixed against Table 1 row
// n = 64): one reduction step costs m N n log2(q) bit operations, i.e.
// bits = log2 m + log2 N + log2 n + log2 log2 q.
double bkw_cost_bits(std::size_t n, std::int64_t q, double log_m, double log_N);

// Searches (k, log m, log N) minimizing the bit cost subject to the
// knob-scaled per-step variance evolution supporting the final distinguisher.
// `secret_param` is the per-coordinate stddev for DiscreteGaussianOfParam and
// ignored otherwise. Throws when no parameter choice is feasible.
BkwEstimate estimate_bkw(std::size_t n, std::int64_t q, double sigma_err, SecretKind secret,
                         const CostModelKnobs& knobs, double secret_param = 0.0);

struct CostReportRow {
    std::size_t n;
    std::int64_t q;
    double sigma;
    std::size_t k;
    double log_m;
    double log_N;
    double bits_reasonable;
    double bits_optimistic;
    double bits_pessimistic;
};

struct CostReport {
    std::vector<CostReportRow> rows;
    std::string provenance; // knob documentation
};

// Builds the three-knob report for a list of (n, q) pairs under a noise rule.
CostReport bkw_report_regev(const std::vector<std::pair<std::size_t, std::int64_t>>& sets,
                            SecretKind secret);

void write_cost_csv(std::ostream& os, const CostReport& report);

// ---------------------------------------------------------------------------
// lattice-attack estimates (analytic only)
// ---------------------------------------------------------------------------

// Primal (Babai-decoding) attack bits: solves the reduced-basis decoding
// condition for the BKZ block size d and returns c * d.
double estimate_lattice_primal(std::size_t n, std::int64_t q, double alpha, double c);

// Dual (short-vector distinguisher) attack bits.
double estimate_lattice_dual(std::size_t n, std::int64_t q, double alpha, double c);

// Asymptotic exponents (cost = 2^{exponent * n}) on the (a, b) grid with
// alpha = n^-a and q = n^b.
double bkw_asymptotic_exponent(double a, double b);
double dual_asymptotic_exponent(double a, double b, double c_svp);

struct ContourCell {
    double a, b;
    std::string best; // "bkw" or "dual"
    double bits;      // exponent of 2^{k n}
};

struct ContourGrid {
    double a_lo = 0.3, a_hi = 5.0, a_step = 0.1;
    double b_lo = 0.3, b_hi = 5.0, b_step = 0.1;
};

std::vector<ContourCell> emit_contours(const ContourGrid& grid, const CostModelKnobs& knobs);
void write_contour_csv(std::ostream& os, const std::vector<ContourCell>& cells);
std::vector<ContourCell> read_contour_csv(std::istream& is);

// ---------------------------------------------------------------------------
// LPN / subset-sum formulas
// ---------------------------------------------------------------------------

double estimate_lpn(std::size_t n, double p);
double estimate_subset_sum(std::size_t n, double density);
double subset_sum_failure_bound(std::size_t n, double density, double c);

// ---------------------------------------------------------------------------
// published reference tables (displayed alongside, never recomputed)
// ---------------------------------------------------------------------------

struct RegevTableRow {
    std::size_t n;
    std::int64_t q;
    std::size_t k;
    double log_m, log_N;
    double reasonable, optimistic, pessimistic, previous;
};

struct LindnerPeikertTableRow {
    std::size_t n;
    std::int64_t q;
    double s;
    std::size_t k;
    double log_m, log_N;
    double reasonable, optimistic, pessimistic;
};

extern const std::array<RegevTableRow, 10> kRegevTable;
extern const std::array<LindnerPeikertTableRow, 3> kLindnerPeikertTable;
extern const std::array<RegevTableRow, 3> kBinarySecretTable;

// Error stddev of the Regev parameter set: q / (sqrt(2 pi n) log2^2 n).
double regev_sigma(std::size_t n, std::int64_t q);

} // namespace bkw
