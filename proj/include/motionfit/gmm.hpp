#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "motionfit/parallel.hpp"

namespace motionfit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows are observations.
using DataMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-feature z-scoring applied before clustering.
struct Standardization {
    Vector mean;
    Vector sd;  // 1 for features without spread

    static Standardization identity(std::size_t dim);
    static Standardization fit(const DataMatrix& data);
    DataMatrix apply(const DataMatrix& data) const;
    double log_jacobian() const;  // sum of log sd
};

// Mixture parameters live in the standardized space; accessors map them back.
struct GmmModel {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> weights;
    std::vector<Vector> means;        // standardized units
    std::vector<Matrix> covariances;  // standardized units
    Standardization standardization;
    std::uint64_t seed = 0;
    double log_likelihood = 0.0;  // of the training data, original units
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> log_likelihood_trace;  // per EM iteration, standardized units

    Vector original_mean(std::size_t component) const;
    Matrix original_covariance(std::size_t component) const;
    std::size_t parameter_count() const;
};

struct GmmOptions {
    std::size_t k = 3;
    std::uint64_t seed = 0;
    std::size_t max_iter = 500;
    double tol = 1e-7;  // on the per-point mean log-likelihood gain
    double reg_floor = 1e-6;
    bool standardize = true;
    std::size_t kmeans_iterations = 10;
};

// EM from a seeded k-means++ start. Rows are put in a canonical
// (lexicographic) order first, so the result does not depend on input order.
GmmModel fit_em(const DataMatrix& data, const GmmOptions& options, Workers workers = {});

// Same as fit_em but starting from the given standardized-space parameters.
GmmModel fit_em_from(const DataMatrix& data, const GmmModel& start, const GmmOptions& options,
                     Workers workers = {});

// Sum over rows of log sum_k w_k N(x; mu_k, Sigma_k), in original units.
double log_likelihood(const GmmModel& model, const DataMatrix& data, Workers workers = {});

// Posterior component probabilities for one observation (original units).
std::vector<double> responsibilities(const GmmModel& model, std::span<const double> point);

struct ElbowPoint {
    std::size_t k = 0;
    double mean_nll = 0.0;  // per point
    std::size_t parameters = 0;
    double log_likelihood = 0.0;
};

struct ElbowResult {
    std::vector<ElbowPoint> curve;
    std::vector<GmmModel> models;  // best model per k
    std::size_t pick = 0;
};

// Best of `restarts` seeded fits per k; each k > k_min also tries a warm start
// that splits the largest component of the previous best model.
ElbowResult elbow_curve(const DataMatrix& data, const std::vector<std::size_t>& k_range, std::uint64_t seed,
                        std::size_t restarts = 5, const GmmOptions& base = {}, Workers workers = {});

inline constexpr double kElbowMinCurvature = 0.05;  // nats per point

// k with the largest discrete second difference; the first k if no interior
// point bends by at least `min_curvature`.
std::size_t pick_elbow(const std::vector<ElbowPoint>& curve, double min_curvature = kElbowMinCurvature);

nlohmann::json to_json(const GmmModel& model);
GmmModel gmm_from_json(const nlohmann::json& j);

}  // namespace motionfit
