#ifndef GBX_BOUNDS_HPP
#define GBX_BOUNDS_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace gbx {

// Parameters of the chance-level failure bound.
struct BoundSpec {
    std::vector<double> rho;  // per-direction zero-set probabilities, each < 1
    std::size_t r = 1;        // discriminative rank
    double delta = 0.05;      // target failure probability
    std::optional<double> epsilon;  // excess-risk annotation; no effect on the query term

    // single-rho convenience: all directions share one probability
    static BoundSpec uniform(double rho_value, std::size_t r, double delta = 0.05);

    double max_rho() const;
    void validate() const;
};

// Exponential decay fit a * rho^m + gamma.
struct DecayFit {
    double a = 0.0;
    double rho = 0.0;
    double gamma = 0.0;
    double rss = 0.0;
};

// Query term of the failure bound: min(1, sum_l rho_l^m), which is
// min(1, r * rho^m) in single-rho form. Monotone nonincreasing in m.
double failure_bound(const BoundSpec& spec, std::size_t m);

// Smallest integer m with r * rho^m <= delta/2 (rho = max over
// directions), seeded by ceil(ln(delta/2r)/ln rho) and adjusted so the
// inequality holds exactly in double arithmetic. rho = 0 returns 1;
// rho >= 1 throws ("direction not covered").
std::size_t query_budget(const BoundSpec& spec);

// Box-constrained least squares fit of a * rho^m + gamma with
// a in [0,10], rho in [0,1], gamma in [0,1]; grid-seeded over rho with
// golden-section refinement, deterministic. Requires >= 3 distinct m.
DecayFit fit_decay_curve(const std::vector<std::size_t>& m_values, const std::vector<double>& failures);

}  // namespace gbx

#endif
