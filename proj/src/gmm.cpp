#include "motionfit/gmm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <numeric>
#include <random>

#include "motionfit/error.hpp"

namespace motionfit {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

// Deterministic uniform in [0, 1) from the top 53 bits.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_data(const DataMatrix& data) {
    if (!data.allFinite()) throw Error("non-finite data");
}

DataMatrix canonical_rows(const DataMatrix& data) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (data(a, j) != data(b, j)) return data(a, j) < data(b, j);
        }
        return false;
    });
    DataMatrix sorted(data.rows(), data.cols());
    for (std::size_t i = 0; i < order.size(); ++i) sorted.row(static_cast<Eigen::Index>(i)) = data.row(order[i]);
    return sorted;
}

// Clamps eigenvalues from below so the matrix stays SPD with a known floor.
Matrix floor_covariance(const Matrix& cov, double floor) {
    Matrix sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= floor) return sym;
    Vector values = eig.eigenvalues().cwiseMax(floor);
    Matrix out = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

// Cholesky factor of one component, with the lower triangle stored row-major
// for forward substitution.
struct ComponentFactor {
    std::vector<double> mean;
    std::vector<double> lower;  // dim x dim
    double log_norm = 0.0;      // log w - (d log 2pi + log det) / 2
};

std::vector<ComponentFactor> factorize(const GmmModel& m) {
    std::vector<ComponentFactor> out(m.k);
    const std::size_t dim = m.dim;
    for (std::size_t c = 0; c < m.k; ++c) {
        Eigen::LLT<Matrix> chol(m.covariances[c]);
        if (chol.info() != Eigen::Success) throw Error("covariance is not positive definite");
        const Matrix L = chol.matrixL();
        out[c].mean.assign(m.means[c].data(), m.means[c].data() + dim);
        out[c].lower.assign(dim * dim, 0.0);
        double log_det = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                out[c].lower[i * dim + j] = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            log_det += 2.0 * std::log(out[c].lower[i * dim + i]);
        }
        const double log_w = m.weights[c] > 0.0 ? std::log(m.weights[c]) : -std::numeric_limits<double>::infinity();
        out[c].log_norm = log_w - 0.5 * (static_cast<double>(dim) * kLog2Pi + log_det);
    }
    return out;
}

// log w_c + log N(x; mu_c, Sigma_c) for every component, then log-sum-exp.
// `scratch` holds dim doubles.
double point_log_terms(const std::vector<ComponentFactor>& factors, const double* x, std::size_t dim,
                       double* log_terms, double* scratch) {
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < factors.size(); ++c) {
        const ComponentFactor& f = factors[c];
        double maha = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double r = x[i] - f.mean[i];
            for (std::size_t j = 0; j < i; ++j) r -= f.lower[i * dim + j] * scratch[j];
            scratch[i] = r / f.lower[i * dim + i];
            maha += scratch[i] * scratch[i];
        }
        log_terms[c] = f.log_norm - 0.5 * maha;
        max_term = std::max(max_term, log_terms[c]);
    }
    if (!std::isfinite(max_term)) return max_term;
    double sum = 0.0;
    for (std::size_t c = 0; c < factors.size(); ++c) sum += std::exp(log_terms[c] - max_term);
    return max_term + std::log(sum);
}

// E-step over all rows: fills resp (n x k, row-major) and returns the summed
// log-likelihood.
double e_step(const GmmModel& m, const DataMatrix& z, std::vector<double>* resp, int threads) {
    const auto factors = factorize(m);
    const auto n = static_cast<std::ptrdiff_t>(z.rows());
    const std::size_t k = m.k;
    const std::size_t dim = m.dim;
    std::vector<double> per_point(static_cast<std::size_t>(n));
#pragma omp parallel num_threads(threads)
    {
        std::vector<double> terms(k);
        std::vector<double> scratch(dim);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto row = static_cast<std::size_t>(i);
            const double lse = point_log_terms(factors, z.data() + row * dim, dim, terms.data(), scratch.data());
            per_point[row] = lse;
            if (resp) {
                for (std::size_t c = 0; c < k; ++c) (*resp)[row * k + c] = std::exp(terms[c] - lse);
            }
        }
    }
    double total = 0.0;
    for (double v : per_point) total += v;
    return total;
}

void m_step(GmmModel& m, const DataMatrix& z, const std::vector<double>& resp, double reg_floor, int threads) {
    const auto n = static_cast<std::size_t>(z.rows());
    const std::size_t k = m.k;
    const std::size_t dim = m.dim;
    const double* data = z.data();
    std::vector<double> mass(k, 0.0);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(k); ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        double nk = 0.0;
        std::vector<double> sum(dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resp[i * k + c];
            nk += r;
            for (std::size_t a = 0; a < dim; ++a) sum[a] += r * data[i * dim + a];
        }
        mass[c] = nk;
        if (nk < 1e-10) continue;  // empty component keeps its shape; weight goes to ~0
        std::vector<double> mean(dim);
        for (std::size_t a = 0; a < dim; ++a) mean[a] = sum[a] / nk;
        std::vector<double> cov(dim * dim, 0.0);
        std::vector<double> d(dim);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resp[i * k + c];
            for (std::size_t a = 0; a < dim; ++a) d[a] = data[i * dim + a] - mean[a];
            for (std::size_t a = 0; a < dim; ++a) {
                const double ra = r * d[a];
                for (std::size_t b = 0; b <= a; ++b) cov[a * dim + b] += ra * d[b];
            }
        }
        Matrix full(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                const double v = cov[a * dim + b] / nk;
                full(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
                full(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
            }
        }
        m.means[c] = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(dim));
        m.covariances[c] = floor_covariance(full, reg_floor);
    }
    double total = 0.0;
    for (double v : mass) total += v;
    for (std::size_t c = 0; c < k; ++c) m.weights[c] = mass[c] / total;
}

GmmModel kmeans_start(const DataMatrix& z, const GmmOptions& options) {
    const auto n = z.rows();
    const auto dim = z.cols();
    const std::size_t k = options.k;
    std::mt19937_64 rng(options.seed);

    std::vector<Vector> centers;
    centers.push_back(z.row(std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(next_unit(rng) * n))).transpose());
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& di = d2[static_cast<std::size_t>(i)];
            di = std::min(di, (z.row(i).transpose() - centers.back()).squaredNorm());
            total += di;
        }
        const double u = next_unit(rng);
        Eigen::Index pick = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(u * n));
        if (total > 0.0) {
            const double target = u * total;
            double cum = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += d2[static_cast<std::size_t>(i)];
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(z.row(pick).transpose());
    }

    std::vector<std::size_t> label(static_cast<std::size_t>(n), 0);
    auto assign = [&] {
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = (z.row(i).transpose() - centers[c]).squaredNorm();
                if (d < best) {
                    best = d;
                    label[static_cast<std::size_t>(i)] = c;
                }
            }
        }
    };
    for (std::size_t it = 0; it < options.kmeans_iterations; ++it) {
        assign();
        std::vector<Vector> sums(k, Vector::Zero(dim));
        std::vector<double> counts(k, 0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums[label[static_cast<std::size_t>(i)]] += z.row(i).transpose();
            counts[label[static_cast<std::size_t>(i)]] += 1.0;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0.0) centers[c] = sums[c] / counts[c];
        }
    }
    assign();

    const Vector global_mean = z.colwise().mean().transpose();
    Matrix global_cov = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector d = z.row(i).transpose() - global_mean;
        global_cov += d * d.transpose();
    }
    global_cov /= static_cast<double>(n);

    GmmModel m;
    m.k = k;
    m.dim = static_cast<std::size_t>(dim);
    m.weights.assign(k, 0.0);
    m.means = centers;
    m.covariances.assign(k, Matrix());
    std::vector<double> counts(k, 0.0);
    for (auto l : label) counts[l] += 1.0;
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        counts[c] = std::max(counts[c], 1.0);
        total += counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
        m.weights[c] = counts[c] / total;
        Matrix cov = Matrix::Zero(dim, dim);
        double members = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (label[static_cast<std::size_t>(i)] != c) continue;
            const Vector d = z.row(i).transpose() - centers[c];
            cov += d * d.transpose();
            members += 1.0;
        }
        cov = members > static_cast<double>(dim) ? Matrix(cov / members) : global_cov;
        m.covariances[c] = floor_covariance(cov, options.reg_floor);
    }
    return m;
}

GmmModel run_em(const DataMatrix& z, GmmModel m, const GmmOptions& options, int threads) {
    const auto n = static_cast<double>(z.rows());
    std::vector<double> resp(static_cast<std::size_t>(z.rows()) * m.k);
    m.log_likelihood_trace.clear();
    m.converged = false;
    m.iterations = 0;

    double ll = e_step(m, z, &resp, threads);
    m.log_likelihood_trace.push_back(ll);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        m_step(m, z, resp, options.reg_floor, threads);
        const double next = e_step(m, z, &resp, threads);
        m.log_likelihood_trace.push_back(next);
        m.iterations = it;
        assert(next >= ll - 1e-8 * std::max(1.0, std::abs(ll)) && "EM log-likelihood decreased");
        const double gain = (next - ll) / n;
        ll = next;
        if (gain < options.tol) {
            m.converged = true;
            break;
        }
    }
    m.log_likelihood = ll - n * m.standardization.log_jacobian();
    return m;
}

void check_options(const DataMatrix& data, const GmmOptions& options) {
    if (options.k == 0) throw Error("k must be at least 1");
    const auto needed = options.k * (static_cast<std::size_t>(data.cols()) + 1);
    if (data.cols() == 0 || static_cast<std::size_t>(data.rows()) < needed) {
        throw Error("insufficient data: " + std::to_string(data.rows()) + " rows for k=" + std::to_string(options.k) +
                    " needs at least " + std::to_string(needed));
    }
    check_data(data);
}

}  // namespace

// ---------------------------------------------------------------------------

Standardization Standardization::identity(std::size_t dim) {
    return {Vector::Zero(static_cast<Eigen::Index>(dim)), Vector::Ones(static_cast<Eigen::Index>(dim))};
}

Standardization Standardization::fit(const DataMatrix& data) {
    Standardization s;
    const auto n = static_cast<double>(data.rows());
    s.mean = data.colwise().mean().transpose();
    s.sd = Vector::Ones(data.cols());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const double var = (data.col(j).array() - s.mean(j)).square().sum() / n;
        if (var > 0.0) s.sd(j) = std::sqrt(var);
    }
    return s;
}

DataMatrix Standardization::apply(const DataMatrix& data) const {
    DataMatrix out = data;
    for (Eigen::Index j = 0; j < data.cols(); ++j) out.col(j) = (data.col(j).array() - mean(j)) / sd(j);
    return out;
}

double Standardization::log_jacobian() const {
    return sd.array().log().sum();
}

Vector GmmModel::original_mean(std::size_t component) const {
    return standardization.mean + standardization.sd.cwiseProduct(means[component]);
}

Matrix GmmModel::original_covariance(std::size_t component) const {
    return standardization.sd.asDiagonal() * covariances[component] * standardization.sd.asDiagonal();
}

std::size_t GmmModel::parameter_count() const {
    return (k - 1) + k * dim + k * dim * (dim + 1) / 2;
}

GmmModel fit_em(const DataMatrix& data, const GmmOptions& options, Workers workers) {
    check_options(data, options);
    const DataMatrix sorted = canonical_rows(data);
    const Standardization standardization =
        options.standardize ? Standardization::fit(sorted) : Standardization::identity(static_cast<std::size_t>(data.cols()));
    const DataMatrix z = standardization.apply(sorted);
    GmmModel start = kmeans_start(z, options);
    start.standardization = standardization;
    start.seed = options.seed;
    return run_em(z, std::move(start), options, resolve_workers(workers));
}

GmmModel fit_em_from(const DataMatrix& data, const GmmModel& start, const GmmOptions& options, Workers workers) {
    check_options(data, options);
    if (start.dim != static_cast<std::size_t>(data.cols())) throw Error("start model dimension does not match data");
    const DataMatrix z = start.standardization.apply(canonical_rows(data));
    GmmModel m = start;
    for (auto& c : m.covariances) c = floor_covariance(c, options.reg_floor);
    return run_em(z, std::move(m), options, resolve_workers(workers));
}

double log_likelihood(const GmmModel& model, const DataMatrix& data, Workers workers) {
    if (static_cast<std::size_t>(data.cols()) != model.dim) throw Error("data dimension does not match the model");
    const DataMatrix z = model.standardization.apply(data);
    return e_step(model, z, nullptr, resolve_workers(workers)) -
           static_cast<double>(data.rows()) * model.standardization.log_jacobian();
}

std::vector<double> responsibilities(const GmmModel& model, std::span<const double> point) {
    if (point.size() != model.dim) throw Error("point dimension does not match the model");
    Vector x(static_cast<Eigen::Index>(model.dim));
    for (std::size_t j = 0; j < model.dim; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        x(jj) = (point[j] - model.standardization.mean(jj)) / model.standardization.sd(jj);
    }
    const auto factors = factorize(model);
    std::vector<double> terms(model.k);
    std::vector<double> scratch(model.dim);
    const double lse = point_log_terms(factors, x.data(), model.dim, terms.data(), scratch.data());
    for (double& t : terms) t = std::exp(t - lse);
    return terms;
}

// ---------------------------------------------------------------------------

namespace {

// Splits the heaviest component along its principal axis.
GmmModel split_heaviest(const GmmModel& m) {
    const auto heaviest = static_cast<std::size_t>(
        std::max_element(m.weights.begin(), m.weights.end()) - m.weights.begin());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m.covariances[heaviest]);
    const Eigen::Index top = m.covariances[heaviest].rows() - 1;
    const Vector offset = 0.5 * std::sqrt(std::max(eig.eigenvalues()(top), 0.0)) * eig.eigenvectors().col(top);

    GmmModel out = m;
    out.k = m.k + 1;
    out.weights[heaviest] *= 0.5;
    out.weights.push_back(out.weights[heaviest]);
    out.means[heaviest] = m.means[heaviest] + offset;
    out.means.push_back(m.means[heaviest] - offset);
    out.covariances.push_back(m.covariances[heaviest]);
    return out;
}

}  // namespace

ElbowResult elbow_curve(const DataMatrix& data, const std::vector<std::size_t>& k_range, std::uint64_t seed,
                        std::size_t restarts, const GmmOptions& base, Workers workers) {
    if (k_range.empty()) throw Error("k range must be non-empty");
    for (std::size_t i = 1; i < k_range.size(); ++i) {
        if (k_range[i] <= k_range[i - 1]) throw Error("k range must be ascending");
    }
    if (restarts == 0) restarts = 1;

    ElbowResult result;
    const double n = static_cast<double>(data.rows());
    for (std::size_t k : k_range) {
        GmmOptions options = base;
        options.k = k;
        std::optional<GmmModel> best;
        auto consider = [&](GmmModel candidate) {
            if (!best || candidate.log_likelihood > best->log_likelihood) best = std::move(candidate);
        };
        for (std::size_t r = 0; r < restarts; ++r) {
            options.seed = seed + r;
            consider(fit_em(data, options, workers));
        }
        if (!result.models.empty() && result.models.back().k + 1 == k) {
            GmmModel warm = fit_em_from(data, split_heaviest(result.models.back()), options, workers);
            warm.seed = seed;
            consider(std::move(warm));
        }
        ElbowPoint point;
        point.k = k;
        point.log_likelihood = best->log_likelihood;
        point.mean_nll = -best->log_likelihood / n;
        point.parameters = best->parameter_count();
        result.curve.push_back(point);
        result.models.push_back(std::move(*best));
    }
    result.pick = pick_elbow(result.curve);
    return result;
}

std::size_t pick_elbow(const std::vector<ElbowPoint>& curve, double min_curvature) {
    if (curve.empty()) throw Error("empty elbow curve");
    std::size_t pick = curve.front().k;
    double best = min_curvature;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double d2 = curve[i - 1].mean_nll - 2.0 * curve[i].mean_nll + curve[i + 1].mean_nll;
        if (d2 >= best) {
            best = d2;
            pick = curve[i].k;
        }
    }
    return pick;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
    }
    return rows;
}

Vector from_std(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const GmmModel& model) {
    nlohmann::json means = nlohmann::json::array();
    nlohmann::json original = nlohmann::json::array();
    nlohmann::json covs = nlohmann::json::array();
    for (std::size_t c = 0; c < model.k; ++c) {
        means.push_back(to_std(model.means[c]));
        original.push_back(to_std(model.original_mean(c)));
        covs.push_back(to_rows(model.covariances[c]));
    }
    return {{"k", model.k},
            {"dim", model.dim},
            {"weights", model.weights},
            {"means", means},
            {"covariances", covs},
            {"means_original_units", original},
            {"standardization",
             {{"feature_means", to_std(model.standardization.mean)}, {"feature_sds", to_std(model.standardization.sd)}}},
            {"seed", model.seed},
            {"log_likelihood", model.log_likelihood},
            {"iterations", model.iterations},
            {"converged", model.converged}};
}

GmmModel gmm_from_json(const nlohmann::json& j) {
    try {
        GmmModel m;
        m.k = j.at("k").get<std::size_t>();
        m.dim = j.at("dim").get<std::size_t>();
        m.weights = j.at("weights").get<std::vector<double>>();
        for (const auto& mean : j.at("means")) m.means.push_back(from_std(mean.get<std::vector<double>>()));
        for (const auto& cov : j.at("covariances")) {
            const auto rows = cov.get<std::vector<std::vector<double>>>();
            Matrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.dim));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != m.dim) throw Error("covariance row has the wrong length");
                for (std::size_t q = 0; q < m.dim; ++q) {
                    c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = rows[r][q];
                }
            }
            m.covariances.push_back(c);
        }
        const auto& s = j.at("standardization");
        m.standardization.mean = from_std(s.at("feature_means").get<std::vector<double>>());
        m.standardization.sd = from_std(s.at("feature_sds").get<std::vector<double>>());
        m.seed = j.value("seed", std::uint64_t{0});
        m.log_likelihood = j.value("log_likelihood", 0.0);
        m.iterations = j.value("iterations", std::size_t{0});
        m.converged = j.value("converged", false);
        if (m.weights.size() != m.k || m.means.size() != m.k || m.covariances.size() != m.k) {
            throw Error("component count does not match k");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed gmm model: ") + e.what());
    }
}

}  // namespace motionfit
