#include "motionfit/kde.hpp"

#include <cmath>
#include <numbers>

#include "motionfit/error.hpp"
#include "motionfit/kernels.hpp"

namespace motionfit {

std::string_view to_string(BandwidthRule rule) {
    return rule == BandwidthRule::scott ? "scott" : "manual";
}

BandwidthRule parse_bandwidth_rule(std::string_view text) {
    if (text == "scott") return BandwidthRule::scott;
    if (text == "manual") return BandwidthRule::manual;
    throw Error("unknown bandwidth rule '" + std::string(text) + "'");
}

KdeModel::KdeModel(std::size_t dim, std::vector<double> samples, std::vector<double> bandwidths)
    : dim_(dim), samples_(std::move(samples)), bandwidths_(std::move(bandwidths)) {
    if (dim_ == 0) throw Error("kde dimension must be positive");
    if (samples_.empty()) throw Error("kde needs at least one sample");
    if (samples_.size() % dim_ != 0) throw Error("kde samples do not match the dimension");
    if (bandwidths_.size() != dim_) throw Error("kde bandwidth count does not match the dimension");
    for (double h : bandwidths_) {
        if (!(h > 0.0) || !std::isfinite(h)) throw Error("bandwidths must be positive");
    }
    for (double s : samples_) {
        if (!std::isfinite(s)) throw Error("kde samples must be finite");
    }

    scaled_.resize(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) scaled_[i] = samples_[i] / bandwidths_[i % dim_];

    double log_norm = -std::log(static_cast<double>(sample_count())) -
                      0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi);
    for (double h : bandwidths_) log_norm -= std::log(h);
    normalizer_ = std::exp(log_norm);
}

namespace {

double column_sd(std::span<const double> samples, std::size_t dim, std::size_t j) {
    const std::size_t n = samples.size() / dim;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += samples[i * dim + j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = samples[i * dim + j] - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double scott_factor(std::size_t n, std::size_t dim) {
    return std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(dim) + 4.0));
}

}  // namespace

std::vector<double> scott_bandwidths(std::span<const double> samples, std::size_t dim) {
    const std::size_t n = samples.size() / dim;
    if (n < 2) throw Error("scott bandwidth needs at least 2 samples");
    const double factor = scott_factor(n, dim);
    std::vector<double> h(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const double sd = column_sd(samples, dim, j);
        if (!(sd > 0.0)) throw Error("degenerate dimension");
        h[j] = sd * factor;
    }
    return h;
}

std::vector<double> resolve_bandwidths(std::span<const double> samples, std::size_t dim,
                                       const BandwidthConfig& config) {
    if (!(config.scale > 0.0)) throw Error("bandwidth scale must be positive");
    std::vector<double> h;
    if (config.rule == BandwidthRule::scott) {
        h = scott_bandwidths(samples, dim);
    } else {
        if (config.manual.size() != dim) throw Error("manual bandwidths must give one value per dimension");
        for (double b : config.manual) {
            if (!(b > 0.0)) throw Error("bandwidths must be positive");
        }
        h = config.manual;
    }
    for (double& b : h) b *= config.scale;
    return h;
}

KdeModel fit_kde(std::span<const double> samples, std::size_t dim, const BandwidthConfig& config) {
    if (dim == 0 || samples.empty() || samples.size() % dim != 0) throw Error("kde needs at least one sample");
    auto h = resolve_bandwidths(samples, dim, config);
    return KdeModel(dim, std::vector<double>(samples.begin(), samples.end()), std::move(h));
}

KdeModel fit_kde(const std::vector<std::vector<double>>& samples, const BandwidthConfig& config) {
    if (samples.empty()) throw Error("kde needs at least one sample");
    const std::size_t dim = samples.front().size();
    std::vector<double> flat;
    flat.reserve(samples.size() * dim);
    for (const auto& s : samples) {
        if (s.size() != dim) throw Error("kde samples do not match the dimension");
        flat.insert(flat.end(), s.begin(), s.end());
    }
    return fit_kde(flat, dim, config);
}

double density(const KdeModel& model, std::span<const double> point) {
    const std::size_t dim = model.dim();
    const std::size_t n = model.sample_count();
    const auto h = model.bandwidths();
    const auto s = model.scaled_samples();

    double q[8];
    std::vector<double> q_heap;
    double* qp = q;
    if (dim > 8) {
        q_heap.resize(dim);
        qp = q_heap.data();
    }
    for (std::size_t j = 0; j < dim; ++j) qp[j] = point[j] / h[j];

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* si = s.data() + i * dim;
        double e = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double z = qp[j] - si[j];
            e += z * z;
        }
        if (e < kKernelCutoff) sum += std::exp(-0.5 * e);
    }
    return model.normalizer() * sum;
}

double commitment_weight(std::size_t committed, std::size_t uncommitted) {
    if (committed == 0 || uncommitted == 0) throw Error("cannot weight one-sided data");
    return static_cast<double>(committed) / static_cast<double>(committed + uncommitted);
}

double combine_commitment(double f1, double f0, double w, double epsilon_floor) {
    const double a = w * f1;
    const double b = (1.0 - w) * f0;
    const double denom = a + b;
    if (!(denom >= epsilon_floor)) return 0.0;
    return a / denom;
}

double commitment_probability(const CommitmentModel& model, const CommitmentPoint& point) {
    return combine_commitment(density(model.f1, point), density(model.f0, point), model.w, model.epsilon_floor);
}

CommitmentModel fit_commitment_model(const std::vector<CommitmentSample>& samples, const BandwidthConfig& config) {
    std::vector<double> pooled, committed, uncommitted;
    pooled.reserve(samples.size() * 4);
    for (const auto& s : samples) {
        const double row[4] = {s.x, s.y, s.v, s.t};
        pooled.insert(pooled.end(), row, row + 4);
        auto& side = s.c == 1 ? committed : uncommitted;
        side.insert(side.end(), row, row + 4);
    }
    CommitmentModel model;
    model.w = commitment_weight(committed.size() / 4, uncommitted.size() / 4);
    model.bandwidth = config;
    auto h = resolve_bandwidths(pooled, 4, config);
    model.f1 = KdeModel(4, std::move(committed), h);
    model.f0 = KdeModel(4, std::move(uncommitted), h);
    return model;
}

KdeModel fit_displacement_model(const std::vector<CommitmentSample>& samples, const BandwidthConfig& config) {
    std::vector<double> flat;
    flat.reserve(samples.size() * 4);
    for (const auto& s : samples) flat.insert(flat.end(), {s.x, s.y, s.v, s.t});
    if (samples.size() < 2) throw Error("displacement model needs at least 2 samples");
    if (config.rule == BandwidthRule::manual) return fit_kde(flat, 4, config);
    if (!(config.scale > 0.0)) throw Error("bandwidth scale must be positive");

    // Samples from a single horizon have no spread in t; that dimension then
    // gets a fixed width, which only rescales slices taken at the horizon.
    const double factor = scott_factor(samples.size(), 4);
    std::vector<double> h(4);
    for (std::size_t j = 0; j < 4; ++j) {
        const double sd = column_sd(flat, 4, j);
        if (sd > 0.0) {
            h[j] = sd * factor * config.scale;
        } else if (j == 3) {
            h[j] = kDisplacementTimeBandwidth * config.scale;
        } else {
            throw Error("degenerate dimension");
        }
    }
    return KdeModel(4, std::move(flat), std::move(h));
}

FieldGrid slice_grid(const CommitmentModel& model, double v, double t, const GridSpec& window, Workers workers) {
    if (window.size() == 0) throw Error("empty grid window");
    FieldGrid grid(window);
    kernels::omp::commitment_slice(model, v, t, window, grid.values, workers);
    return grid;
}

FieldGrid slice_density(const KdeModel& model, double v, double t, const GridSpec& window, Workers workers) {
    if (window.size() == 0) throw Error("empty grid window");
    if (model.dim() != 4) throw Error("density slices need a 4-D model");
    FieldGrid grid(window);
    kernels::omp::density_slice(model, v, t, window, grid.values, workers);
    return grid;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json rows_to_json(const KdeModel& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.sample_count(); ++i) {
        auto s = m.sample(i);
        rows.push_back(std::vector<double>(s.begin(), s.end()));
    }
    return rows;
}

std::vector<double> rows_from_json(const nlohmann::json& rows, std::size_t dim) {
    std::vector<double> flat;
    for (const auto& row : rows) {
        if (row.size() != dim) throw Error("model sample has the wrong dimension");
        for (const auto& v : row) flat.push_back(v.get<double>());
    }
    return flat;
}

}  // namespace

nlohmann::json to_json(const KdeModel& model) {
    return {{"dim", model.dim()},
            {"bandwidths", std::vector<double>(model.bandwidths().begin(), model.bandwidths().end())},
            {"samples", rows_to_json(model)}};
}

KdeModel kde_model_from_json(const nlohmann::json& j) {
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        return KdeModel(dim, rows_from_json(j.at("samples"), dim), j.at("bandwidths").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed kde model: ") + e.what());
    }
}

nlohmann::json to_json(const CommitmentModel& model) {
    return {{"dim", 4},
            {"bandwidths", std::vector<double>(model.f1.bandwidths().begin(), model.f1.bandwidths().end())},
            {"w", model.w},
            {"epsilon_floor", model.epsilon_floor},
            {"samples_c1", rows_to_json(model.f1)},
            {"samples_c0", rows_to_json(model.f0)},
            {"metadata",
             {{"source_counts", {{"c1", model.committed_count()}, {"c0", model.uncommitted_count()}}},
              {"bandwidth_rule", to_string(model.bandwidth.rule)},
              {"bandwidth_scale", model.bandwidth.scale}}}};
}

CommitmentModel commitment_model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("dim").get<std::size_t>() != 4) throw Error("commitment model must be 4-dimensional");
        const auto h = j.at("bandwidths").get<std::vector<double>>();
        CommitmentModel m;
        m.f1 = KdeModel(4, rows_from_json(j.at("samples_c1"), 4), h);
        m.f0 = KdeModel(4, rows_from_json(j.at("samples_c0"), 4), h);
        m.w = j.at("w").get<double>();
        m.epsilon_floor = j.value("epsilon_floor", kDefaultDensityFloor);
        if (j.contains("metadata")) {
            const auto& meta = j.at("metadata");
            m.bandwidth.rule = parse_bandwidth_rule(meta.value("bandwidth_rule", std::string("scott")));
            m.bandwidth.scale = meta.value("bandwidth_scale", 1.0);
        }
        if (!(m.w > 0.0 && m.w < 1.0)) throw Error("commitment weight must lie in (0, 1)");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed commitment model: ") + e.what());
    }
}

}  // namespace motionfit
