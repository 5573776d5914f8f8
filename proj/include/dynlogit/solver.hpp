#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynlogit/design.hpp"

namespace dynlogit {

/// Independent Student-t prior on each coefficient. df = 1 is the Cauchy prior.
struct StudentT {
    double center = 0.0;
    double scale = 2.5;
    double df = 1.0;

    bool operator==(const StudentT&) const = default;
};

struct PriorSpec {
    enum class Kind { none, student_t };
    Kind kind = Kind::student_t;
    StudentT base;
    std::map<std::string, StudentT> overrides;  // keyed by column name

    static PriorSpec none() { return PriorSpec{Kind::none, {}, {}}; }
    static PriorSpec cauchy(double scale = 2.5) { return PriorSpec{Kind::student_t, {0.0, scale, 1.0}, {}}; }

    const StudentT& for_column(const std::string& name) const;
    /// Throws SpecError unless every scale and df is positive and finite.
    void check() const;
    std::string describe() const;

    bool operator==(const PriorSpec&) const = default;
};

/// Parses "none", "cauchy", "cauchy:scale=2.5,df=1" or "t:scale=..,df=..,center=..".
PriorSpec parse_prior(const std::string& text);

struct SolverOptions {
    double tolerance = 1e-8;          // on the Euclidean norm of the objective gradient
    std::size_t max_iter = 100;
    std::size_t threads = 0;
    std::size_t dense_column_limit = 1500;  // above this, Newton steps use conjugate gradients
    double separation_threshold = 15.0;
};

struct FitResult {
    std::vector<std::string> column_names;
    std::size_t vertex_columns = 0;
    std::vector<double> coefficients;
    std::vector<double> std_errors;  // NaN when undefined
    double log_likelihood = 0.0;
    double deviance = 0.0;
    double bic = 0.0;
    double aic = 0.0;
    double penalized_objective = 0.0;  // log-likelihood plus log prior kernel
    std::size_t n_obs = 0;
    bool converged = false;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    bool separation_warning = false;
    std::vector<std::string> diagnostics;
    PriorSpec prior = PriorSpec::none();
    std::string method;  // "newton" or "newton-cg"

    std::size_t parameters() const noexcept { return coefficients.size(); }
};

FitResult fit_mle(const DesignMatrix& dm, const SolverOptions& options = {});
FitResult fit_posterior_mode(const DesignMatrix& dm, const PriorSpec& prior, const SolverOptions& options = {});

/// Dispatches on prior.kind.
FitResult fit(const DesignMatrix& dm, const PriorSpec& prior, const SolverOptions& options = {});

/// (BIC, AIC) from deviance, parameter count and n_obs.
std::pair<double, double> information_criteria(const FitResult& fit);

/// Inverse-logit of each row's linear predictor. Throws DimensionError.
std::vector<double> predict_probabilities(const FitResult& fit, const DesignMatrix& dm);

/// Data log-likelihood at `coef`.
double log_likelihood(const DesignMatrix& dm, std::span<const double> coef);
/// Score vector of the data log-likelihood at `coef`.
std::vector<double> score(const DesignMatrix& dm, std::span<const double> coef);

double logistic(double eta);

// Reports

/// Deterministic JSON report; `manifest_json` (a JSON object or empty) is embedded verbatim.
std::string fit_report_json(const FitResult& fit, const std::string& manifest_json = {});
/// Coefficient table: name,block,estimate,std_error,z,significant.
std::string fit_table_csv(const FitResult& fit);
FitResult parse_fit_report(const std::string& text);
FitResult load_fit_report(const std::filesystem::path& path);

}  // namespace dynlogit
