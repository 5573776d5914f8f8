#include "dynlogit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "dynlogit/error.hpp"
#include "dynlogit/parallel.hpp"
#include "text_util.hpp"

namespace dynlogit {

using json = nlohmann::json;

// -----------------------------------------------------------------------------
// Priors
// -----------------------------------------------------------------------------

const StudentT& PriorSpec::for_column(const std::string& name) const {
    auto it = overrides.find(name);
    return it == overrides.end() ? base : it->second;
}

void PriorSpec::check() const {
    if (kind == Kind::none) return;
    auto ok = [](const StudentT& t) {
        return std::isfinite(t.center) && std::isfinite(t.scale) && std::isfinite(t.df) && t.scale > 0 && t.df > 0;
    };
    if (!ok(base)) throw SpecError("prior: scale and df must be positive and finite");
    for (const auto& [name, t] : overrides) {
        if (!ok(t)) throw SpecError("prior override for " + name + ": scale and df must be positive and finite");
    }
}

std::string PriorSpec::describe() const {
    if (kind == Kind::none) return "none";
    std::ostringstream s;
    s << "student_t(center=" << base.center << ", scale=" << base.scale << ", df=" << base.df << ")";
    if (!overrides.empty()) s << " with " << overrides.size() << " column overrides";
    return s.str();
}

PriorSpec parse_prior(const std::string& text) {
    if (text == "none" || text == "mle") return PriorSpec::none();
    auto colon = text.find(':');
    const std::string family = text.substr(0, colon);
    PriorSpec prior;
    if (family == "cauchy") {
        prior.base = {0.0, 2.5, 1.0};
    } else if (family == "t" || family == "student_t") {
        prior.base = {0.0, 2.5, 1.0};
    } else {
        throw SpecError("prior '" + text + "': expected none, cauchy[:...] or t[:...]");
    }
    if (colon != std::string::npos) {
        std::stringstream rest(text.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw SpecError("prior '" + text + "': expected key=value, got '" + item + "'");
            const auto key = item.substr(0, eq);
            double value = 0.0;
            try {
                std::size_t used = 0;
                value = std::stod(item.substr(eq + 1), &used);
                if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw SpecError("prior '" + text + "': bad number in '" + item + "'");
            }
            if (key == "scale") prior.base.scale = value;
            else if (key == "df") prior.base.df = value;
            else if (key == "center") prior.base.center = value;
            else throw SpecError("prior '" + text + "': unknown parameter '" + key + "'");
        }
    }
    prior.check();
    return prior;
}

// -----------------------------------------------------------------------------
// Row-block reductions
// -----------------------------------------------------------------------------

double logistic(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

namespace {

constexpr std::size_t kBlockRows = 8192;
constexpr double kHessianBudget = 256.0 * 1024 * 1024;  // bytes of per-chunk p x p partials

double log1pexp(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

/// Row ranges fixed by the problem shape alone, so sums never depend on the worker count.
std::vector<std::size_t> chunk_bounds(std::size_t rows, std::size_t max_chunks) {
    std::size_t chunks = std::max<std::size_t>(1, (rows + kBlockRows - 1) / kBlockRows);
    chunks = std::max<std::size_t>(1, std::min(chunks, max_chunks));
    std::vector<std::size_t> b(chunks + 1);
    for (std::size_t c = 0; c <= chunks; ++c) b[c] = rows * c / chunks;
    return b;
}

class Problem {
public:
    Problem(const DesignMatrix& dm, std::size_t threads) : x_(dm.features), y_(dm.responses), threads_(threads) {
        p_ = dm.cols();
        vec_chunks_ = chunk_bounds(dm.rows(), std::numeric_limits<std::size_t>::max());
        const double per = 8.0 * static_cast<double>(std::max<std::size_t>(p_, 1) * std::max<std::size_t>(p_, 1));
        mat_chunks_ = chunk_bounds(dm.rows(), static_cast<std::size_t>(std::max(1.0, kHessianBudget / per)));
    }

    std::size_t cols() const { return p_; }
    std::size_t rows() const { return y_.size(); }

    double eta(std::size_t r, const std::vector<double>& theta) const { return x_.row_dot(r, theta); }

    double loglik(const std::vector<double>& theta) const {
        std::vector<double> part(chunks(vec_chunks_), 0.0);
        parallel_for(part.size(), threads_, [&](std::size_t c) {
            double s = 0.0;
            for (auto r = vec_chunks_[c]; r < vec_chunks_[c + 1]; ++r) {
                const double e = eta(r, theta);
                s += (y_[r] ? e : 0.0) - log1pexp(e);
            }
            part[c] = s;
        });
        return ordered_sum(part);
    }

    /// Log-likelihood and score; optionally stores the IRLS weights per row.
    double gradient(const std::vector<double>& theta, std::vector<double>& g, std::vector<double>* weights) const {
        const auto n = chunks(vec_chunks_);
        std::vector<double> ll(n, 0.0);
        std::vector<double> part(n * p_, 0.0);
        if (weights) weights->assign(rows(), 0.0);
        parallel_for(n, threads_, [&](std::size_t c) {
            double s = 0.0;
            double* gp = part.data() + c * p_;
            for (auto r = vec_chunks_[c]; r < vec_chunks_[c + 1]; ++r) {
                const double e = eta(r, theta);
                const double mu = logistic(e);
                s += (y_[r] ? e : 0.0) - log1pexp(e);
                const double resid = (y_[r] ? 1.0 : 0.0) - mu;
                if (weights) (*weights)[r] = mu * (1.0 - mu);
                auto cols = x_.row_cols(r);
                auto vals = x_.row_values(r);
                for (std::size_t k = 0; k < cols.size(); ++k) gp[cols[k]] += resid * vals[k];
            }
            ll[c] = s;
        });
        g.assign(p_, 0.0);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < p_; ++k) g[k] += part[c * p_ + k];
        return ordered_sum(ll);
    }

    /// Fisher information X' W X at theta.
    Eigen::MatrixXd information(const std::vector<double>& theta) const {
        const auto n = chunks(mat_chunks_);
        std::vector<Eigen::MatrixXd> part(n);
        parallel_for(n, threads_, [&](std::size_t c) {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(p_));
            for (auto r = mat_chunks_[c]; r < mat_chunks_[c + 1]; ++r) {
                const double mu = logistic(eta(r, theta));
                const double w = mu * (1.0 - mu);
                auto cols = x_.row_cols(r);
                auto vals = x_.row_values(r);
                for (std::size_t a = 0; a < cols.size(); ++a) {
                    const double wa = w * vals[a];
                    for (std::size_t b = 0; b <= a; ++b) h(cols[a], cols[b]) += wa * vals[b];
                }
            }
            part[c] = std::move(h);
        });
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(p_));
        for (const auto& m : part) h += m;
        return h.selfadjointView<Eigen::Lower>();
    }

    /// X' diag(w) X v without forming the matrix.
    std::vector<double> information_times(const std::vector<double>& w, const std::vector<double>& v) const {
        const auto n = chunks(vec_chunks_);
        std::vector<double> part(n * p_, 0.0);
        parallel_for(n, threads_, [&](std::size_t c) {
            double* out = part.data() + c * p_;
            for (auto r = vec_chunks_[c]; r < vec_chunks_[c + 1]; ++r) {
                const double xv = w[r] * x_.row_dot(r, v);
                if (xv == 0.0) continue;
                auto cols = x_.row_cols(r);
                auto vals = x_.row_values(r);
                for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += xv * vals[k];
            }
        });
        std::vector<double> out(p_, 0.0);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < p_; ++k) out[k] += part[c * p_ + k];
        return out;
    }

    /// diag(X' W X) for the conjugate-gradient preconditioner.
    std::vector<double> information_diagonal(const std::vector<double>& w) const {
        const auto n = chunks(vec_chunks_);
        std::vector<double> part(n * p_, 0.0);
        parallel_for(n, threads_, [&](std::size_t c) {
            double* out = part.data() + c * p_;
            for (auto r = vec_chunks_[c]; r < vec_chunks_[c + 1]; ++r) {
                auto cols = x_.row_cols(r);
                auto vals = x_.row_values(r);
                for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += w[r] * vals[k] * vals[k];
            }
        });
        std::vector<double> out(p_, 0.0);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < p_; ++k) out[k] += part[c * p_ + k];
        return out;
    }

private:
    static std::size_t chunks(const std::vector<std::size_t>& b) { return b.size() - 1; }
    static double ordered_sum(const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }

    const SparseRows& x_;
    const std::vector<std::uint8_t>& y_;
    std::size_t threads_;
    std::size_t p_ = 0;
    std::vector<std::size_t> vec_chunks_;
    std::vector<std::size_t> mat_chunks_;
};

// -----------------------------------------------------------------------------
// Penalty
// -----------------------------------------------------------------------------

/// Log Student-t kernel per column, or nothing for maximum likelihood.
class Penalty {
public:
    Penalty(const PriorSpec& prior, const std::vector<std::string>& names) {
        active_ = prior.kind == PriorSpec::Kind::student_t;
        if (!active_) return;
        for (const auto& n : names) params_.push_back(prior.for_column(n));
    }

    bool active() const { return active_; }
    double center(std::size_t c) const { return active_ ? params_[c].center : 0.0; }

    double value(const std::vector<double>& theta) const {
        if (!active_) return 0.0;
        double s = 0.0;
        for (std::size_t c = 0; c < theta.size(); ++c) {
            const auto& q = params_[c];
            const double d = theta[c] - q.center;
            s -= 0.5 * (q.df + 1.0) * std::log1p(d * d / (q.df * q.scale * q.scale));
        }
        return s;
    }
    /// Exact prior score: -(df + 1) d / (df s^2 + d^2) = -w(d) d with the EM weight w.
    double gradient(std::size_t c, double theta) const {
        if (!active_) return 0.0;
        return -em_weight(c, theta) * (theta - params_[c].center);
    }
    /// Precision of the normal component given the current deviation (E-step).
    double em_weight(std::size_t c, double theta) const {
        if (!active_) return 0.0;
        const auto& q = params_[c];
        const double d = theta - q.center;
        return (q.df + 1.0) / (q.df * q.scale * q.scale + d * d);
    }
    /// Negative second derivative of the log kernel; negative in the tails.
    double curvature(std::size_t c, double theta) const {
        if (!active_) return 0.0;
        const auto& q = params_[c];
        const double d = theta - q.center;
        const double a = q.df * q.scale * q.scale;
        return (q.df + 1.0) * (a - d * d) / ((a + d * d) * (a + d * d));
    }

private:
    bool active_ = false;
    std::vector<StudentT> params_;
};

double norm2(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto k : idx) s += v[k] * v[k];
    return std::sqrt(s);
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
    return out;
}

/// Solves h x = g, adding a growing ridge until the factorization is positive definite.
Eigen::VectorXd solve_spd(Eigen::MatrixXd h, const Eigen::VectorXd& g, bool& ridged) {
    ridged = false;
    const double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
    double ridge = 0.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            const auto d = ldlt.vectorD();
            if (d.minCoeff() > 1e-13 * scale) return ldlt.solve(g);
        }
        const double next = ridge == 0.0 ? 1e-10 * scale : ridge * 10.0;
        h.diagonal().array() += next - ridge;
        ridge = next;
        ridged = true;
    }
    return Eigen::VectorXd::Zero(g.size());
}

std::optional<Eigen::VectorXd> try_solve_spd(const Eigen::MatrixXd& h, const Eigen::VectorXd& g) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
    const double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.vectorD().minCoeff() <= 1e-13 * scale) return std::nullopt;
    return Eigen::VectorXd(ldlt.solve(g));
}

std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& h) {
    if (h.rows() == 0) return Eigen::MatrixXd(0, 0);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
    const double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.vectorD().minCoeff() <= 1e-13 * scale) return std::nullopt;
    return ldlt.solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
}

struct CgResult {
    std::vector<double> step;
    std::size_t iterations = 0;
};

/// Preconditioned conjugate gradients on (X'WX + diag(extra)) d = g over the active columns.
CgResult newton_cg(const Problem& problem, const std::vector<double>& w, const std::vector<double>& extra,
                   const std::vector<double>& g, const std::vector<std::size_t>& active, double gnorm) {
    const std::size_t p = problem.cols();
    auto apply = [&](const std::vector<double>& v) {
        auto out = problem.information_times(w, v);
        for (std::size_t k = 0; k < p; ++k) out[k] += extra[k] * v[k];
        return out;
    };
    auto diag = problem.information_diagonal(w);
    std::vector<double> inv(p, 0.0);
    std::vector<char> is_active(p, 0);
    for (auto k : active) {
        is_active[k] = 1;
        const double d = diag[k] + extra[k];
        inv[k] = d > 0 ? 1.0 / d : 1.0;
    }
    std::vector<double> x(p, 0.0), r(p, 0.0), z(p, 0.0), d(p, 0.0);
    for (auto k : active) r[k] = g[k];
    for (auto k : active) z[k] = inv[k] * r[k];
    d = z;
    double rz = 0.0;
    for (auto k : active) rz += r[k] * z[k];
    const double target = std::min(0.1, std::sqrt(gnorm)) * gnorm;
    const std::size_t max_iter = std::min<std::size_t>(std::max<std::size_t>(active.size(), 10), 500);
    CgResult res;
    for (; res.iterations < max_iter; ++res.iterations) {
        if (norm2(r, active) <= target) break;
        auto hd = apply(d);
        double dhd = 0.0;
        for (auto k : active) dhd += d[k] * hd[k];
        if (dhd <= 0) break;
        const double a = rz / dhd;
        for (auto k : active) {
            x[k] += a * d[k];
            r[k] -= a * hd[k];
            z[k] = inv[k] * r[k];
        }
        double rz_next = 0.0;
        for (auto k : active) rz_next += r[k] * z[k];
        const double beta = rz_next / rz;
        rz = rz_next;
        for (auto k : active) d[k] = z[k] + beta * d[k];
    }
    if (res.iterations == 0 && norm2(x, active) == 0.0) {
        for (auto k : active) x[k] = inv[k] * g[k];
    }
    for (std::size_t k = 0; k < p; ++k)
        if (!is_active[k]) x[k] = 0.0;
    res.step = std::move(x);
    return res;
}

FitResult run_fit(const DesignMatrix& dm, const PriorSpec& prior, const SolverOptions& options) {
    if (dm.rows() == 0) throw EmptyDesignError("cannot fit an empty design");
    if (dm.features.cols != dm.cols()) throw DimensionError("design column count disagrees with column names");
    prior.check();
    const Problem problem(dm, options.threads);
    const Penalty penalty(prior, dm.column_names);
    const std::size_t p = problem.cols();

    FitResult fit;
    fit.column_names = dm.column_names;
    fit.vertex_columns = dm.vertex_columns;
    fit.prior = prior;
    fit.n_obs = dm.rows();
    fit.method = p > options.dense_column_limit ? "newton-cg" : "newton";

    // Columns without a nonzero entry carry no data; they stay at the prior center.
    std::vector<char> seen(p, 0);
    for (auto c : dm.features.col_idx) seen[c] = 1;
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < p; ++c) {
        if (seen[c]) {
            active.push_back(c);
        } else {
            fit.diagnostics.push_back("column " + dm.column_names[c] + " is all zero; coefficient fixed at " +
                                      (penalty.active() ? "the prior center" : "0"));
        }
    }
    std::vector<double> theta(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) theta[c] = penalty.center(c) * (seen[c] ? 0.0 : 1.0);

    auto objective = [&](const std::vector<double>& th) { return problem.loglik(th) + penalty.value(th); };

    std::vector<double> g;
    std::vector<double> weights;
    double ll = 0.0;
    double obj = 0.0;
    bool ridge_noted = false;
    const bool use_cg = fit.method == "newton-cg";
    for (;;) {
        ll = problem.gradient(theta, g, use_cg ? &weights : nullptr);
        obj = ll + penalty.value(theta);
        for (std::size_t c = 0; c < p; ++c) g[c] += penalty.gradient(c, theta[c]);
        fit.gradient_norm = norm2(g, active);
        if (fit.gradient_norm <= options.tolerance) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= options.max_iter) {
            fit.diagnostics.push_back("no convergence within " + std::to_string(options.max_iter) +
                                      " iterations (gradient norm " + std::to_string(fit.gradient_norm) + ")");
            break;
        }

        std::vector<double> step(p, 0.0);
        if (use_cg) {
            std::vector<double> extra(p, 0.0);
            for (std::size_t c = 0; c < p; ++c) {
                const double k = penalty.curvature(c, theta[c]);
                extra[c] = k > 0 ? k : penalty.em_weight(c, theta[c]);
            }
            step = newton_cg(problem, weights, extra, g, active, fit.gradient_norm).step;
        } else {
            const Eigen::MatrixXd info = problem.information(theta);
            Eigen::VectorXd ga(static_cast<Eigen::Index>(active.size()));
            for (std::size_t a = 0; a < active.size(); ++a) ga(static_cast<Eigen::Index>(a)) = g[active[a]];
            bool ridged = false;
            std::optional<Eigen::VectorXd> exact_step;
            if (penalty.active()) {
                // Exact penalized curvature when it is positive definite, else the EM weights.
                Eigen::MatrixXd h = info;
                for (std::size_t c = 0; c < p; ++c) h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += penalty.curvature(c, theta[c]);
                exact_step = try_solve_spd(restrict(h, active), ga);
            }
            Eigen::VectorXd d;
            if (exact_step) {
                d = *exact_step;
            } else {
                Eigen::MatrixXd h = info;
                for (std::size_t c = 0; c < p; ++c) h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += penalty.em_weight(c, theta[c]);
                d = solve_spd(restrict(h, active), ga, ridged);
            }
            if (ridged && !ridge_noted) {
                fit.diagnostics.push_back("information matrix is singular or ill-conditioned (collinear columns?); ridge added to Newton steps");
                ridge_noted = true;
            }
            for (std::size_t a = 0; a < active.size(); ++a) step[active[a]] = d(static_cast<Eigen::Index>(a));
        }

        // Step halving on the true objective. Near the optimum the change is below
        // rounding noise, so steps within that noise are accepted.
        const double noise = 1e-12 * (1.0 + std::abs(obj));
        double s = 1.0;
        bool accepted = false;
        std::vector<double> next(p);
        double next_obj = obj;
        for (int halving = 0; halving < 60; ++halving, s *= 0.5) {
            for (std::size_t c = 0; c < p; ++c) next[c] = theta[c] + s * step[c];
            next_obj = objective(next);
            if (std::isfinite(next_obj) && next_obj >= obj - noise) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            fit.diagnostics.push_back("line search found no improving step (gradient norm " +
                                      std::to_string(fit.gradient_norm) + ")");
            break;
        }
        theta.swap(next);
        ++fit.iterations;
        if (!penalty.active()) {
            double biggest = 0.0;
            for (double v : theta) biggest = std::max(biggest, std::abs(v));
            if (biggest > options.separation_threshold && next_obj > obj + noise) {
                fit.separation_warning = true;
                fit.diagnostics.push_back("separation: a coefficient exceeds " +
                                          std::to_string(options.separation_threshold) +
                                          " in magnitude while the likelihood still improves; estimates diverge");
                ll = problem.gradient(theta, g, nullptr);
                obj = ll;
                fit.gradient_norm = norm2(g, active);
                break;
            }
        }
    }

    fit.coefficients = theta;
    fit.log_likelihood = ll;
    fit.penalized_objective = obj;
    fit.deviance = -2.0 * ll;
    std::tie(fit.bic, fit.aic) = information_criteria(fit);

    // Standard errors from the curvature of the fitted objective.
    fit.std_errors.assign(p, std::numeric_limits<double>::quiet_NaN());
    if (active.size() <= 5000) {
        Eigen::MatrixXd info = problem.information(theta);
        Eigen::MatrixXd exact = info;
        for (std::size_t c = 0; c < p; ++c) exact(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += penalty.curvature(c, theta[c]);
        auto inv = spd_inverse(restrict(exact, active));
        if (!inv && penalty.active()) {
            Eigen::MatrixXd em = info;
            for (std::size_t c = 0; c < p; ++c) em(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += penalty.em_weight(c, theta[c]);
            inv = spd_inverse(restrict(em, active));
            if (inv) fit.diagnostics.push_back("penalized curvature not positive definite; standard errors use the EM prior weights");
        }
        if (inv) {
            for (std::size_t a = 0; a < active.size(); ++a) {
                const double v = (*inv)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
                fit.std_errors[active[a]] = v > 0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
            }
        } else {
            fit.diagnostics.push_back("information matrix is singular; standard errors unavailable");
        }
        for (std::size_t c = 0; c < p; ++c) {
            if (!seen[c] && penalty.active()) {
                const double k = penalty.curvature(c, theta[c]);
                if (k > 0) fit.std_errors[c] = 1.0 / std::sqrt(k);
            }
        }
    } else {
        fit.diagnostics.push_back("standard errors skipped for more than 5000 active columns");
    }
    return fit;
}

}  // namespace

// -----------------------------------------------------------------------------
// Public fitting API
// -----------------------------------------------------------------------------

FitResult fit_mle(const DesignMatrix& dm, const SolverOptions& options) {
    return run_fit(dm, PriorSpec::none(), options);
}

FitResult fit_posterior_mode(const DesignMatrix& dm, const PriorSpec& prior, const SolverOptions& options) {
    if (prior.kind != PriorSpec::Kind::student_t) throw SpecError("fit_posterior_mode needs a Student-t prior");
    return run_fit(dm, prior, options);
}

FitResult fit(const DesignMatrix& dm, const PriorSpec& prior, const SolverOptions& options) {
    return run_fit(dm, prior, options);
}

std::pair<double, double> information_criteria(const FitResult& fit) {
    const double p = static_cast<double>(fit.parameters());
    const double bic = fit.deviance + (p > 0 ? p * std::log(static_cast<double>(fit.n_obs)) : 0.0);
    return {bic, fit.deviance + 2.0 * p};
}

std::vector<double> predict_probabilities(const FitResult& fit, const DesignMatrix& dm) {
    if (fit.coefficients.size() != dm.cols() || dm.features.cols != dm.cols()) {
        throw DimensionError("predict_probabilities: fit has " + std::to_string(fit.coefficients.size()) +
                             " coefficients, design has " + std::to_string(dm.cols()) + " columns");
    }
    std::vector<double> out(dm.rows());
    for (std::size_t r = 0; r < dm.rows(); ++r) out[r] = logistic(dm.features.row_dot(r, fit.coefficients));
    return out;
}

double log_likelihood(const DesignMatrix& dm, std::span<const double> coef) {
    if (coef.size() != dm.cols()) throw DimensionError("log_likelihood: coefficient count mismatch");
    return Problem(dm, 1).loglik({coef.begin(), coef.end()});
}

std::vector<double> score(const DesignMatrix& dm, std::span<const double> coef) {
    if (coef.size() != dm.cols()) throw DimensionError("score: coefficient count mismatch");
    std::vector<double> g;
    Problem(dm, 1).gradient({coef.begin(), coef.end()}, g, nullptr);
    return g;
}

// -----------------------------------------------------------------------------
// Reports
// -----------------------------------------------------------------------------

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json prior_json(const PriorSpec& prior) {
    if (prior.kind == PriorSpec::Kind::none) return json{{"kind", "none"}};
    auto one = [](const StudentT& t) { return json{{"center", t.center}, {"scale", t.scale}, {"df", t.df}}; };
    json j = one(prior.base);
    j["kind"] = "student_t";
    json o = json::object();
    for (const auto& [name, t] : prior.overrides) o[name] = one(t);
    j["overrides"] = o;
    return j;
}

}  // namespace

std::string fit_report_json(const FitResult& fit, const std::string& manifest_json) {
    json cols = json::array();
    for (std::size_t c = 0; c < fit.parameters(); ++c) {
        const double se = fit.std_errors[c];
        cols.push_back({{"name", fit.column_names[c]},
                        {"block", c < fit.vertex_columns ? "vertex" : "edge"},
                        {"estimate", number(fit.coefficients[c])},
                        {"std_error", number(se)},
                        {"z", number(fit.coefficients[c] / se)}});
    }
    json j;
    j["columns"] = cols;
    j["vertex_columns"] = fit.vertex_columns;
    j["log_likelihood"] = number(fit.log_likelihood);
    j["deviance"] = number(fit.deviance);
    j["bic"] = number(fit.bic);
    j["aic"] = number(fit.aic);
    j["penalized_objective"] = number(fit.penalized_objective);
    j["n_obs"] = fit.n_obs;
    j["parameters"] = fit.parameters();
    j["criteria_note"] = "deviance excludes the prior; n_obs counts every Bernoulli row of the fitted design";
    j["convergence"] = {{"converged", fit.converged},
                        {"iterations", fit.iterations},
                        {"gradient_norm", number(fit.gradient_norm)},
                        {"separation_warning", fit.separation_warning},
                        {"method", fit.method},
                        {"diagnostics", fit.diagnostics}};
    j["prior"] = prior_json(fit.prior);
    if (!manifest_json.empty()) j["manifest"] = json::parse(manifest_json);
    return j.dump(2) + "\n";
}

std::string fit_table_csv(const FitResult& fit) {
    std::ostringstream s;
    s.precision(10);
    s << "name,block,estimate,std_error,z,significant\n";
    for (std::size_t c = 0; c < fit.parameters(); ++c) {
        const double b = fit.coefficients[c];
        const double se = fit.std_errors[c];
        const double z = b / se;
        s << '"' << fit.column_names[c] << "\"," << (c < fit.vertex_columns ? "vertex" : "edge") << ',' << b << ',';
        if (std::isfinite(se)) s << se << ',' << z << ',' << (std::abs(z) > 1.959963984540054 ? "*" : "");
        else s << ",,";
        s << '\n';
    }
    return s.str();
}

FitResult parse_fit_report(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(detail::line_of_offset(text, e.byte)), e.what());
    }
    FitResult fit;
    try {
        for (const auto& c : j.at("columns")) {
            fit.column_names.push_back(c.at("name").get<std::string>());
            fit.coefficients.push_back(read_number(c.at("estimate")));
            fit.std_errors.push_back(read_number(c.at("std_error")));
        }
        fit.vertex_columns = j.at("vertex_columns").get<std::size_t>();
        fit.log_likelihood = read_number(j.at("log_likelihood"));
        fit.deviance = read_number(j.at("deviance"));
        fit.bic = read_number(j.at("bic"));
        fit.aic = read_number(j.at("aic"));
        fit.penalized_objective = read_number(j.at("penalized_objective"));
        fit.n_obs = j.at("n_obs").get<std::size_t>();
        const auto& conv = j.at("convergence");
        fit.converged = conv.at("converged").get<bool>();
        fit.iterations = conv.at("iterations").get<std::size_t>();
        fit.gradient_norm = read_number(conv.at("gradient_norm"));
        fit.separation_warning = conv.at("separation_warning").get<bool>();
        fit.method = conv.at("method").get<std::string>();
        fit.diagnostics = conv.at("diagnostics").get<std::vector<std::string>>();
        const auto& pr = j.at("prior");
        if (pr.at("kind").get<std::string>() == "none") {
            fit.prior = PriorSpec::none();
        } else {
            auto one = [](const json& t) {
                return StudentT{t.at("center").get<double>(), t.at("scale").get<double>(), t.at("df").get<double>()};
            };
            fit.prior.kind = PriorSpec::Kind::student_t;
            fit.prior.base = one(pr);
            if (auto it = pr.find("overrides"); it != pr.end())
                for (auto o = it->begin(); o != it->end(); ++o) fit.prior.overrides[o.key()] = one(o.value());
        }
    } catch (const json::exception& e) {
        throw ParseError("fit report", e.what());
    }
    if (fit.vertex_columns > fit.column_names.size()) throw ValidationError("fit report: vertex_columns out of range");
    return fit;
}

FitResult load_fit_report(const std::filesystem::path& path) { return parse_fit_report(detail::read_file(path)); }

}  // namespace dynlogit
