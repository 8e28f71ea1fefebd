#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "twrn/errors.hpp"
#include "twrn/rng.hpp"
#include "twrn/signal_model.hpp"

namespace twrn {

/// Rectangular search region for (tau_1, tau_2, nu_2). Both timing axes
/// share the tau bounds.
struct SearchBox {
    double tau_lo = -0.5, tau_hi = 0.5;
    double nu_lo = -0.5, nu_hi = 0.5;

    void validate() const {
        if (!(tau_lo < tau_hi) || !(nu_lo < nu_hi))
            throw ConfigError("search box bounds must be ordered");
    }
};

/// Exhaustive-search resolution. Nodes are cell-centered, so a unit-wide box
/// at the default steps yields 100 x 100 x 10^4 = 10^8 cost evaluations.
struct GridSpec {
    double tau_step = 1e-2;
    double nu_step = 1e-4;
    SearchBox box;

    void validate() const {
        if (!(tau_step > 0.0) || !(nu_step > 0.0))
            throw ConfigError("grid steps must be positive");
        box.validate();
    }
};

/// rand/1/bin differential evolution settings.
struct DeConfig {
    int population = 40;
    double weight = 0.7;          // differential weight F
    double crossover = 0.9;       // crossover rate CR
    int max_generations = 500;
    double tolerance = 1e-10;     // stop when best-vs-worst cost spread drops below
    std::uint64_t seed = 0;

    void validate() const {
        if (population < 4)
            throw ConfigError("DE population must be >= 4 (mutation needs three partners)");
        if (!(weight > 0.0) || weight > 2.0)
            throw ConfigError("DE weight must lie in (0, 2]");
        if (crossover < 0.0 || crossover > 1.0)
            throw ConfigError("DE crossover rate must lie in [0, 1]");
        if (max_generations < 0) throw ConfigError("DE generation cap must be >= 0");
        if (tolerance < 0.0) throw ConfigError("DE tolerance must be >= 0");
    }
};

struct EstimationResult {
    cxd alpha_1{0.0, 0.0};
    cxd alpha_2{0.0, 0.0};
    double tau_1 = 0.0;
    double tau_2 = 0.0;
    double nu_2 = 0.0;
    double cost = 0.0;           // concentrated ML cost at the returned offsets
    std::uint64_t evals = 0;     // cost-function evaluations spent
    bool converged = true;
};

/// Builds the LQ x 2 training basis
///   Omega(tau_1, tau_2, nu_2) = [ G(tau_1) t1,  Lambda(nu_2) G(tau_2) t2 ]
/// and evaluates the concentrated ML machinery on it. The two-column QR is
/// hand-rolled so a cost evaluation costs O(L Q span) with no allocation
/// beyond the reused workspace.
class OmegaBuilder {
public:
    OmegaBuilder(Eigen::VectorXcd training_1, Eigen::VectorXcd training_2,
                 ModelGeometry geom = {})
        : t1_(std::move(training_1)), t2_(std::move(training_2)), geom_(geom) {
        if (t1_.size() != t2_.size() || t1_.size() < 2)
            throw ConfigError("OmegaBuilder: training sequences must share length >= 2");
        length_ = static_cast<int>(t1_.size());
        n_samples_ = length_ * geom_.oversampling;
    }

    int length() const { return length_; }
    int sample_count() const { return n_samples_; }
    const ModelGeometry& geometry() const { return geom_; }
    const Eigen::VectorXcd& training_1() const { return t1_; }
    const Eigen::VectorXcd& training_2() const { return t2_; }

    Eigen::MatrixXcd build(double tau_1, double tau_2, double nu_2) const {
        Eigen::MatrixXcd omega(n_samples_, 2);
        omega.col(0) =
            shaped_vector(t1_, tau_1, geom_.oversampling, geom_.rolloff, geom_.span);
        Eigen::VectorXcd c2 =
            shaped_vector(t2_, tau_2, geom_.oversampling, geom_.rolloff, geom_.span);
        c2.array() *= build_cfo_matrix(nu_2, length_, geom_.oversampling).array();
        omega.col(1) = c2;
        return omega;
    }

    /// chi(tau_1, tau_2, nu_2) = -|| projection of y onto col(Omega) ||^2,
    /// optionally with the concentrated gain estimate of the same point.
    double chi(const Eigen::VectorXcd& y, double tau_1, double tau_2, double nu_2,
               Eigen::Vector2cd* alpha = nullptr) const {
        Eigen::VectorXcd w1 =
            shaped_vector(t1_, tau_1, geom_.oversampling, geom_.rolloff, geom_.span);
        Eigen::VectorXcd w2 =
            shaped_vector(t2_, tau_2, geom_.oversampling, geom_.rolloff, geom_.span);
        w2.array() *= build_cfo_matrix(nu_2, length_, geom_.oversampling).array();

        // Modified Gram-Schmidt on the two columns.
        const double r11 = w1.norm();
        if (!(r11 > 0.0)) throw NumericalError("ml_cost: first basis column vanished");
        const Eigen::VectorXcd q1 = w1 / r11;
        const cxd r12 = q1.dot(w2);
        const Eigen::VectorXcd v = w2 - r12 * q1;
        const double r22 = v.norm();
        if (r22 <= 1e-10 * r11)
            throw NumericalError("ml_cost: training basis is rank deficient");
        const cxd c1 = q1.dot(y);
        const cxd c2 = v.dot(y) / r22;
        if (alpha != nullptr) {
            (*alpha)[1] = c2 / r22;
            (*alpha)[0] = (c1 - r12 * (*alpha)[1]) / r11;
        }
        return -(std::norm(c1) + std::norm(c2));
    }

private:
    Eigen::VectorXcd t1_, t2_;
    ModelGeometry geom_;
    int length_ = 0;
    int n_samples_ = 0;
};

/// Least-squares gain estimate (Omega^H Omega)^-1 Omega^H y through a
/// rank-revealing QR factorization.
inline Eigen::Vector2cd ls_channel_estimate(const Eigen::VectorXcd& y,
                                            const Eigen::MatrixXcd& omega) {
    if (omega.cols() != 2 || omega.rows() != y.size())
        throw ConfigError("ls_channel_estimate: dimension mismatch");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(omega);
    qr.setThreshold(1e-10);
    if (qr.rank() < 2)
        throw NumericalError("ls_channel_estimate: training basis is rank deficient");
    return qr.solve(y);
}

/// Concentrated ML cost bound to one received vector; keeps the evaluation
/// tally that the complexity accounting and DE bookkeeping rely on.
class MlCost {
public:
    MlCost(const OmegaBuilder& omega, const Eigen::VectorXcd& y) : omega_(omega), y_(y) {
        if (y_.size() != omega.sample_count())
            throw ConfigError("ml_cost: received vector length mismatch");
    }

    double operator()(double tau_1, double tau_2, double nu_2) {
        ++evals_;
        return omega_.chi(y_, tau_1, tau_2, nu_2);
    }

    /// Gain estimate at fixed offsets; an LS solve, not a cost evaluation.
    Eigen::Vector2cd solve_alpha(double tau_1, double tau_2, double nu_2) const {
        Eigen::Vector2cd alpha;
        omega_.chi(y_, tau_1, tau_2, nu_2, &alpha);
        return alpha;
    }

    std::uint64_t evals() const { return evals_; }
    const OmegaBuilder& omega() const { return omega_; }
    const Eigen::VectorXcd& received() const { return y_; }

private:
    const OmegaBuilder& omega_;
    Eigen::VectorXcd y_;
    std::uint64_t evals_ = 0;
};

namespace detail {

inline std::vector<double> grid_axis(double lo, double hi, double step) {
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    if (n < 1) throw ConfigError("grid axis holds no nodes");
    std::vector<double> nodes(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) nodes[static_cast<std::size_t>(k)] = lo + (k + 0.5) * step;
    return nodes;
}

} // namespace detail

/// Exhaustive search of the concentrated cost over the cell-centered grid.
/// Ties resolve to the lexicographically smallest (tau_1, tau_2, nu_2), which
/// the ascending iteration order provides with a strict comparison.
inline EstimationResult ml_grid_search(MlCost& cost, const GridSpec& grid) {
    grid.validate();
    const auto tau_nodes = detail::grid_axis(grid.box.tau_lo, grid.box.tau_hi, grid.tau_step);
    const auto nu_nodes = detail::grid_axis(grid.box.nu_lo, grid.box.nu_hi, grid.nu_step);

    const std::uint64_t evals_before = cost.evals();
    double best = std::numeric_limits<double>::infinity();
    double best_tau_1 = tau_nodes.front(), best_tau_2 = tau_nodes.front();
    double best_nu_2 = nu_nodes.front();
    for (double tau_1 : tau_nodes)
        for (double tau_2 : tau_nodes)
            for (double nu_2 : nu_nodes) {
                const double c = cost(tau_1, tau_2, nu_2);
                if (c < best) {
                    best = c;
                    best_tau_1 = tau_1;
                    best_tau_2 = tau_2;
                    best_nu_2 = nu_2;
                }
            }

    EstimationResult r;
    r.tau_1 = best_tau_1;
    r.tau_2 = best_tau_2;
    r.nu_2 = best_nu_2;
    r.cost = best;
    const Eigen::Vector2cd alpha = cost.solve_alpha(best_tau_1, best_tau_2, best_nu_2);
    r.alpha_1 = alpha[0];
    r.alpha_2 = alpha[1];
    r.evals = cost.evals() - evals_before;
    r.converged = true;
    return r;
}

namespace detail {

inline double reflect_into(double v, double lo, double hi) {
    while (v < lo || v > hi) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
    }
    return v;
}

} // namespace detail

/// rand/1/bin differential evolution over (tau_1, tau_2, nu_2). Mutants
/// leaving the box are reflected back inside. Selection is synchronous per
/// generation; the run stops when the population's best-vs-worst cost spread
/// drops below the tolerance or the generation cap is reached (in which case
/// converged is false and the best point found is still returned).
inline EstimationResult de_estimate(MlCost& cost, const SearchBox& box,
                                    const DeConfig& config) {
    config.validate();
    box.validate();
    const int pop = config.population;
    Rng rng(config.seed);

    using Point = std::array<double, 3>;
    const double lo[3] = {box.tau_lo, box.tau_lo, box.nu_lo};
    const double hi[3] = {box.tau_hi, box.tau_hi, box.nu_hi};

    const std::uint64_t evals_before = cost.evals();
    std::vector<Point> members(static_cast<std::size_t>(pop));
    std::vector<double> costs(static_cast<std::size_t>(pop));
    for (int p = 0; p < pop; ++p) {
        for (int j = 0; j < 3; ++j) members[p][j] = rng.uniform(lo[j], hi[j]);
        costs[p] = cost(members[p][0], members[p][1], members[p][2]);
    }

    auto spread = [&] {
        auto [mn, mx] = std::minmax_element(costs.begin(), costs.end());
        return *mx - *mn;
    };

    bool converged = spread() < config.tolerance;
    int generation = 0;
    std::vector<Point> trials(static_cast<std::size_t>(pop));
    std::vector<double> trial_costs(static_cast<std::size_t>(pop));
    while (!converged && generation < config.max_generations) {
        ++generation;
        for (int p = 0; p < pop; ++p) {
            auto pick = [&](std::initializer_list<int> avoid) {
                while (true) {
                    int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(pop));
                    bool clash = false;
                    for (int a : avoid) clash = clash || (k == a);
                    if (!clash) return k;
                }
            };
            const int r1 = pick({p});
            const int r2 = pick({p, r1});
            const int r3 = pick({p, r1, r2});
            const int j_rand = static_cast<int>(rng.next_u64() % 3ull);
            Point trial = members[p];
            for (int j = 0; j < 3; ++j) {
                const double mutant = members[r1][j] +
                                      config.weight * (members[r2][j] - members[r3][j]);
                if (rng.uniform() < config.crossover || j == j_rand)
                    trial[j] = detail::reflect_into(mutant, lo[j], hi[j]);
            }
            trials[p] = trial;
            trial_costs[p] = cost(trial[0], trial[1], trial[2]);
        }
        for (int p = 0; p < pop; ++p) {
            if (trial_costs[p] <= costs[p]) {
                members[p] = trials[p];
                costs[p] = trial_costs[p];
            }
        }
        converged = spread() < config.tolerance;
    }

    int best = 0;
    for (int p = 1; p < pop; ++p) {
        const auto key = std::make_tuple(costs[p], members[p][0], members[p][1], members[p][2]);
        const auto best_key =
            std::make_tuple(costs[best], members[best][0], members[best][1], members[best][2]);
        if (key < best_key) best = p;
    }

    EstimationResult r;
    r.tau_1 = members[best][0];
    r.tau_2 = members[best][1];
    r.nu_2 = members[best][2];
    r.cost = costs[best];
    const Eigen::Vector2cd alpha = cost.solve_alpha(r.tau_1, r.tau_2, r.nu_2);
    r.alpha_1 = alpha[0];
    r.alpha_2 = alpha[1];
    r.evals = cost.evals() - evals_before;
    r.converged = converged;
    return r;
}

/// Operation counts contrasting exhaustive search with differential
/// evolution at the same per-evaluation least-squares arithmetic.
struct ComplexityReport {
    std::uint64_t grid_evals = 0;     // grid cardinality
    std::uint64_t de_evals = 0;       // population x (generations + 1)
    double flops_per_eval = 0.0;
    double ml_total_flops = 0.0;
    double de_total_flops = 0.0;
    double eval_ratio = 0.0;          // grid_evals / de_evals
    double flop_ratio = 0.0;
    std::string flop_formula;
};

/// Pure arithmetic: no cost function is ever executed. The per-evaluation
/// flop model counts the definitional dense construction of the LQ x 2 basis
/// plus its least-squares solve; the formula ships with the report so the
/// totals can be audited.
inline ComplexityReport count_complexity(const GridSpec& grid, const DeConfig& de,
                                         int training_length, int oversampling) {
    grid.validate();
    de.validate();
    detail::check_geometry(training_length, oversampling);

    ComplexityReport rep;
    const auto tau_nodes =
        detail::grid_axis(grid.box.tau_lo, grid.box.tau_hi, grid.tau_step);
    const auto nu_nodes = detail::grid_axis(grid.box.nu_lo, grid.box.nu_hi, grid.nu_step);
    rep.grid_evals = static_cast<std::uint64_t>(tau_nodes.size()) * tau_nodes.size() *
                     nu_nodes.size();
    rep.de_evals = static_cast<std::uint64_t>(de.population) *
                   (static_cast<std::uint64_t>(de.max_generations) + 1);

    const double lq = static_cast<double>(training_length) * oversampling;
    const double l = static_cast<double>(training_length);
    rep.flops_per_eval = 8.0 * lq * l   // two LQ x L shaping mat-vecs
                         + 6.0 * lq     // carrier rotation of column 2
                         + 24.0 * lq    // 2x2 Gram (three complex inner products)
                         + 16.0 * lq    // Omega^H y
                         + 48.0         // 2x2 solve
                         + 16.0;        // cost inner product
    rep.flop_formula =
        "flops_per_eval = 8*L*Q*L + 6*L*Q + 24*L*Q + 16*L*Q + 64 "
        "(two LQx" +
        std::to_string(training_length) +
        " shaping mat-vecs, carrier rotation, 2x2 Gram, Omega^H y, 2x2 solve + cost)";
    rep.ml_total_flops = static_cast<double>(rep.grid_evals) * rep.flops_per_eval;
    rep.de_total_flops = static_cast<double>(rep.de_evals) * rep.flops_per_eval;
    rep.eval_ratio = static_cast<double>(rep.grid_evals) / static_cast<double>(rep.de_evals);
    rep.flop_ratio = rep.ml_total_flops / rep.de_total_flops;
    return rep;
}

} // namespace twrn
