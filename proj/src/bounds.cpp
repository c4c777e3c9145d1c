#include "gbx/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "gbx/error.hpp"

namespace gbx {

BoundSpec BoundSpec::uniform(double rho_value, std::size_t r, double delta) {
    BoundSpec spec;
    spec.rho.assign(r, rho_value);
    spec.r = r;
    spec.delta = delta;
    return spec;
}

double BoundSpec::max_rho() const {
    double mx = 0.0;
    for (double p : rho) mx = std::max(mx, p);
    return mx;
}

void BoundSpec::validate() const {
    if (r < 1) throw validation_error("bound spec: r must be >= 1");
    if (rho.size() != 1 && rho.size() != r)
        throw validation_error("bound spec: rho must hold one shared value or one value per direction");
    for (double p : rho)
        if (!(p >= 0.0 && p < 1.0))
            throw validation_error("bound spec: each rho must lie in [0, 1) (direction not covered)");
    if (!(delta > 0.0 && delta < 1.0)) throw validation_error("bound spec: delta must lie in (0, 1)");
    if (epsilon && !(*epsilon > 0.0)) throw validation_error("bound spec: epsilon must be > 0");
}

double failure_bound(const BoundSpec& spec, std::size_t m) {
    spec.validate();
    if (m < 1) throw validation_error("failure bound: m must be >= 1");
    double sum = 0.0;
    if (spec.rho.size() == 1) {
        sum = static_cast<double>(spec.r) * std::pow(spec.rho[0], static_cast<double>(m));
    } else {
        for (double p : spec.rho) sum += std::pow(p, static_cast<double>(m));
    }
    return std::min(1.0, sum);
}

std::size_t query_budget(const BoundSpec& spec) {
    spec.validate();
    const double rho = spec.max_rho();
    if (rho == 0.0) return 1;
    const double r = static_cast<double>(spec.r);
    const double target = spec.delta / 2.0;

    auto term = [&](std::size_t m) { return r * std::pow(rho, static_cast<double>(m)); };

    // analytic seed, then exact adjustment in double arithmetic
    const double raw = std::log(spec.delta / (2.0 * r)) / std::log(rho);
    std::size_t m = raw <= 1.0 ? 1 : static_cast<std::size_t>(std::ceil(raw));
    while (term(m) > target) ++m;
    while (m > 1 && term(m - 1) <= target) --m;
    return m;
}

namespace {

struct LinearFit {
    double a = 0.0, gamma = 0.0, rss = 0.0;
};

// Best (a, gamma) for fixed rho: least squares on y ~ a x + gamma with
// a in [0, 10], gamma in [0, 1], and the fitted value at the smallest m
// capped at `cap`. Solved by enumerating the active-set candidates of
// this 2-variable problem.
LinearFit solve_linear(const std::vector<double>& x, const std::vector<double>& y, double x_max,
                       double cap) {
    const std::size_t n = x.size();
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sxx += x[i] * x[i];
        sy += y[i];
        sxy += x[i] * y[i];
    }
    const double nn = static_cast<double>(n);

    std::vector<std::pair<double, double>> candidates;
    const double det = nn * sxx - sx * sx;
    if (det > 1e-300) {
        const double a = (nn * sxy - sx * sy) / det;
        candidates.emplace_back(a, (sy - a * sx) / nn);
    }
    for (double a : {0.0, 10.0}) candidates.emplace_back(a, sy / nn - a * sx / nn);
    for (double g : {0.0, 1.0})
        candidates.emplace_back(sxx > 1e-300 ? (sxy - g * sx) / sxx : 0.0, g);
    // cap boundary: a x_max + gamma = cap
    if (x_max > 1e-300) {
        // minimize along the cap line: substitute gamma = cap - a x_max
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += (x[i] - x_max) * (y[i] - cap);
            den += (x[i] - x_max) * (x[i] - x_max);
        }
        if (den > 1e-300) {
            const double a = num / den;
            candidates.emplace_back(a, cap - a * x_max);
        }
    }

    LinearFit best;
    bool have = false;
    for (auto [a, g] : candidates) {
        a = std::clamp(a, 0.0, 10.0);
        g = std::clamp(g, 0.0, 1.0);
        if (a * x_max + g > cap + 1e-12) {
            if (x_max > 1e-300) a = std::max(0.0, (cap - g) / x_max);
        }
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rsd = a * x[i] + g - y[i];
            rss += rsd * rsd;
        }
        if (!have || rss < best.rss) {
            have = true;
            best = {a, g, rss};
        }
    }
    return best;
}

}  // namespace

DecayFit fit_decay_curve(const std::vector<std::size_t>& m_values, const std::vector<double>& failures) {
    if (m_values.size() != failures.size()) throw validation_error("decay fit: length mismatch");
    {
        std::vector<std::size_t> distinct = m_values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 3) throw validation_error("decay fit: need >= 3 distinct m values");
    }
    double y_max = 0.0;
    for (double f : failures) {
        if (!(f >= 0.0) || !std::isfinite(f))
            throw validation_error("decay fit: failures must be finite and nonnegative");
        y_max = std::max(y_max, f);
    }
    // predictions stay within [0, 1] (+0.02) whenever the data does
    const double cap = std::max(1.02, y_max + 0.02);

    const std::size_t n = m_values.size();
    const std::size_t m_min = *std::min_element(m_values.begin(), m_values.end());

    auto eval = [&](double rho) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(rho, static_cast<double>(m_values[i]));
        return solve_linear(x, failures, std::pow(rho, static_cast<double>(m_min)), cap);
    };

    // grid seed over rho, then golden-section refinement in the
    // bracketing interval
    const int grid = 1000;
    double best_rho = 0.0;
    LinearFit best = eval(0.0);
    for (int g = 1; g <= grid; ++g) {
        const double rho = static_cast<double>(g) / grid;
        const LinearFit fit = eval(rho);
        if (fit.rss < best.rss) {
            best = fit;
            best_rho = rho;
        }
    }
    double lo = std::max(0.0, best_rho - 1.0 / grid);
    double hi = std::min(1.0, best_rho + 1.0 / grid);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 120; ++it) {
        const double c = hi - inv_phi * (hi - lo);
        const double d = lo + inv_phi * (hi - lo);
        if (eval(c).rss < eval(d).rss)
            hi = d;
        else
            lo = c;
    }
    const double rho = 0.5 * (lo + hi);
    const LinearFit refined = eval(rho);
    if (refined.rss <= best.rss) {
        best = refined;
        best_rho = rho;
    }

    DecayFit out;
    out.a = best.a;
    out.rho = best_rho;
    out.gamma = best.gamma;
    out.rss = best.rss;
    return out;
}

}  // namespace gbx
