#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "motionfit/field_grid.hpp"
#include "motionfit/ingest.hpp"
#include "motionfit/parallel.hpp"

namespace motionfit {

enum class BandwidthRule { scott, manual };

std::string_view to_string(BandwidthRule rule);
BandwidthRule parse_bandwidth_rule(std::string_view text);

struct BandwidthConfig {
    BandwidthRule rule = BandwidthRule::scott;
    std::vector<double> manual;  // per dimension, used by BandwidthRule::manual
    double scale = 1.0;          // multiplies whatever the rule produces
};

// Gaussian product-kernel density with per-dimension bandwidths.
class KdeModel {
public:
    KdeModel() = default;
    // `samples` is row-major, sample_count x dim. Throws on empty data,
    // ragged data or non-positive bandwidths.
    KdeModel(std::size_t dim, std::vector<double> samples, std::vector<double> bandwidths);

    std::size_t dim() const { return dim_; }
    std::size_t sample_count() const { return dim_ == 0 ? 0 : samples_.size() / dim_; }
    std::span<const double> samples() const { return samples_; }
    std::span<const double> sample(std::size_t i) const { return std::span(samples_).subspan(i * dim_, dim_); }
    std::span<const double> bandwidths() const { return bandwidths_; }

    // Samples divided by the bandwidths, and the constant
    // 1 / (n * prod(h) * (2 pi)^(dim/2)); the kernels work in these units.
    std::span<const double> scaled_samples() const { return scaled_; }
    double normalizer() const { return normalizer_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> samples_;
    std::vector<double> bandwidths_;
    std::vector<double> scaled_;
    double normalizer_ = 0.0;
};

// Per-dimension Scott factor: sd_j * n^(-1/(dim+4)). Throws "degenerate dimension".
std::vector<double> scott_bandwidths(std::span<const double> samples, std::size_t dim);

std::vector<double> resolve_bandwidths(std::span<const double> samples, std::size_t dim,
                                       const BandwidthConfig& config);

KdeModel fit_kde(std::span<const double> samples, std::size_t dim, const BandwidthConfig& config);
KdeModel fit_kde(const std::vector<std::vector<double>>& samples, const BandwidthConfig& config);

double density(const KdeModel& model, std::span<const double> point);

// Exponents above this underflow exp(-e/2) to exactly zero in double.
inline constexpr double kKernelCutoff = 1492.0;

using CommitmentPoint = std::array<double, 4>;  // (x, y, v, t)

inline constexpr double kDefaultDensityFloor = 1e-12;

struct CommitmentModel {
    KdeModel f1;  // committed (c = 1)
    KdeModel f0;  // not committed (c = 0)
    double w = 0.5;
    double epsilon_floor = kDefaultDensityFloor;
    BandwidthConfig bandwidth;  // how the shared bandwidths were chosen

    std::size_t committed_count() const { return f1.sample_count(); }
    std::size_t uncommitted_count() const { return f0.sample_count(); }
};

// Frequency weight of the committed set.
double commitment_weight(std::size_t committed, std::size_t uncommitted);

// w f1 / (w f1 + (1 - w) f0), or 0 when the denominator is below the floor.
double combine_commitment(double f1, double f0, double w, double epsilon_floor = kDefaultDensityFloor);

double commitment_probability(const CommitmentModel& model, const CommitmentPoint& point);

// Splits on c, fits both densities with bandwidths chosen once on the pooled
// samples. Throws "cannot weight one-sided data" if either side is empty.
CommitmentModel fit_commitment_model(const std::vector<CommitmentSample>& samples,
                                     const BandwidthConfig& config = {});

// Probability over the (x, y) cells of `window` with v and t held fixed.
FieldGrid slice_grid(const CommitmentModel& model, double v, double t, const GridSpec& window, Workers workers = {});

// Raw density over (x, y) with v and t fixed, for 4-D displacement models.
FieldGrid slice_density(const KdeModel& model, double v, double t, const GridSpec& window, Workers workers = {});

inline constexpr double kDisplacementTimeBandwidth = 0.25;  // s

// 4-D density of observed displacements (all c = 1).
KdeModel fit_displacement_model(const std::vector<CommitmentSample>& samples, const BandwidthConfig& config = {});

nlohmann::json to_json(const KdeModel& model);
KdeModel kde_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CommitmentModel& model);
CommitmentModel commitment_model_from_json(const nlohmann::json& j);

}  // namespace motionfit
