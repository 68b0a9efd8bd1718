#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "motionfit/error.hpp"
#include "motionfit/gmm.hpp"

using namespace motionfit;

namespace {

struct Blob {
    std::vector<double> mean;
    double sd;
    double weight;
};

DataMatrix sample_blobs(const std::vector<Blob>& blobs, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const std::size_t dim = blobs[0].mean.size();
    DataMatrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    std::size_t row = 0;
    for (std::size_t b = 0; b < blobs.size(); ++b) {
        const auto count = b + 1 == blobs.size() ? n - row
                                                  : static_cast<std::size_t>(std::llround(blobs[b].weight * n));
        for (std::size_t i = 0; i < count; ++i, ++row) {
            for (std::size_t j = 0; j < dim; ++j) {
                data(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
                    blobs[b].mean[j] + blobs[b].sd * z(rng);
            }
        }
    }
    return data;
}

// Direct density: explicit inverse and determinant, no log-sum-exp.
double naive_log_likelihood(const GmmModel& m, const DataMatrix& data) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        double mix = 0.0;
        for (std::size_t c = 0; c < m.k; ++c) {
            const Matrix cov = m.original_covariance(c);
            const Vector d = data.row(i).transpose() - m.original_mean(c);
            const double q = d.dot(cov.inverse() * d);
            mix += m.weights[c] * std::exp(-0.5 * q) /
                   std::sqrt(std::pow(2.0 * std::numbers::pi, static_cast<double>(m.dim)) * cov.determinant());
        }
        ll += std::log(mix);
    }
    return ll;
}

GmmOptions with_k(std::size_t k, std::uint64_t seed = 1) {
    GmmOptions o;
    o.k = k;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_CASE("single component is the sample mean and covariance") {
    const DataMatrix data = sample_blobs({{{2.0, -1.0, 30.0}, 1.5, 1.0}}, 400, 3);
    const GmmModel m = fit_em(data, with_k(1));
    CHECK(m.weights == std::vector<double>{1.0});
    const Vector mean = data.colwise().mean().transpose();
    const DataMatrix centered = data.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(data.rows());
    CHECK((m.original_mean(0) - mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((m.original_covariance(0) - cov).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(m.converged);
}

TEST_CASE("duplicating every row leaves the fit unchanged") {
    const DataMatrix data = sample_blobs({{{0, 0}, 1.0, 0.5}, {{5, 3}, 1.0, 0.5}}, 200, 4);
    DataMatrix twice(data.rows() * 2, data.cols());
    twice << data, data;
    const GmmModel a = fit_em(data, with_k(2, 9));
    const GmmModel b = fit_em(twice, with_k(2, 9));
    CHECK(a.iterations == b.iterations);
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(std::abs(a.weights[c] - b.weights[c]) < 1e-9);
        CHECK((a.original_mean(c) - b.original_mean(c)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((a.original_covariance(c) - b.original_covariance(c)).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK(std::abs(2.0 * a.log_likelihood - b.log_likelihood) < 1e-7);
}

TEST_CASE("three separated clusters are recovered") {
    const std::vector<Blob> blobs = {{{0, 0}, 1.0, 0.5}, {{10, 0}, 1.0, 0.3}, {{5, 9}, 1.0, 0.2}};
    const DataMatrix data = sample_blobs(blobs, 1500, 5);
    const GmmModel m = fit_em(data, with_k(3, 2));
    for (const auto& blob : blobs) {
        std::size_t best = 0;
        double best_d = 1e9;
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = (m.original_mean(c) - Eigen::Map<const Vector>(blob.mean.data(), 2)).norm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        CHECK(best_d < 0.5 * blob.sd);
        CHECK(std::abs(m.weights[best] - blob.weight) < 0.05);
    }
}

TEST_CASE("log-likelihood examples") {
    SUBCASE("unit Gaussian at its mean") {
        for (std::size_t dim : {1u, 2u, 4u}) {
            GmmModel m;
            m.k = 1;
            m.dim = dim;
            m.weights = {1.0};
            m.means = {Vector::Constant(static_cast<Eigen::Index>(dim), 0.7)};
            m.covariances = {Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
            m.standardization = Standardization::identity(dim);
            const DataMatrix x = DataMatrix::Constant(1, static_cast<Eigen::Index>(dim), 0.7);
            CHECK(log_likelihood(m, x) ==
                  doctest::Approx(-0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
        }
    }
    SUBCASE("additivity and the direct formula") {
        const DataMatrix data = sample_blobs({{{0, 0, 0}, 1.0, 0.6}, {{4, 4, -2}, 2.0, 0.4}}, 300, 6);
        const GmmModel m = fit_em(data, with_k(2, 3));
        const double ll = log_likelihood(m, data);
        CHECK(std::abs(ll - m.log_likelihood) <= 1e-9 * std::abs(ll));
        CHECK(std::abs(ll - naive_log_likelihood(m, data)) <= 1e-9 * std::abs(ll));

        DataMatrix more(data.rows() + 1, data.cols());
        more << data, data.row(17);
        const double single = log_likelihood(m, data.row(17));
        CHECK(std::abs(log_likelihood(m, more) - (ll + single)) <= 1e-9);
    }
}

TEST_CASE("responsibilities") {
    const DataMatrix data = sample_blobs({{{0, 0}, 1.0, 0.5}, {{40, 0}, 1.0, 0.5}}, 400, 7);
    const GmmModel m = fit_em(data, with_k(2, 1));
    for (std::size_t c = 0; c < 2; ++c) {
        const Vector mu = m.original_mean(c);
        const auto g = responsibilities(m, std::vector<double>{mu(0), mu(1)});
        CHECK(g[c] > 1.0 - 1e-12);
    }

    GmmModel twin;
    twin.k = 2;
    twin.dim = 2;
    twin.weights = {0.3, 0.7};
    twin.means = {Vector::Zero(2), Vector::Zero(2)};
    twin.covariances = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    twin.standardization = Standardization::identity(2);
    const auto g = responsibilities(twin, std::vector<double>{1.5, -2.0});
    CHECK(g[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(0.7).epsilon(1e-14));

    const DataMatrix mixed = sample_blobs({{{0, 0}, 1.0, 0.5}, {{2, 1}, 1.5, 0.5}}, 300, 8);
    const GmmModel close = fit_em(mixed, with_k(2, 4));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 5);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> p = {u(rng), u(rng)};
        std::vector<double> dens(2);
        for (std::size_t c = 0; c < 2; ++c) {
            const Matrix cov = close.original_covariance(c);
            const Vector d = Eigen::Map<const Vector>(p.data(), 2) - close.original_mean(c);
            dens[c] = close.weights[c] * std::exp(-0.5 * d.dot(cov.inverse() * d)) / std::sqrt(cov.determinant());
        }
        const auto r = responsibilities(close, p);
        CHECK(std::abs(r[0] - dens[0] / (dens[0] + dens[1])) <= 1e-12);
        CHECK(std::abs(r[0] + r[1] - 1.0) <= 1e-12);
    }
}

TEST_CASE("fit invariants") {
    const DataMatrix data = sample_blobs({{{0, 0, 0}, 1.0, 0.4}, {{3, 1, 2}, 0.7, 0.35}, {{-2, 4, 1}, 1.2, 0.25}}, 600, 10);
    const GmmModel m = fit_em(data, with_k(3, 11));

    SUBCASE("monotone EM and valid parameters") {
        for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i) {
            CHECK(m.log_likelihood_trace[i] >= m.log_likelihood_trace[i - 1] - 1e-8);
        }
        double total = 0.0;
        for (double w : m.weights) total += w;
        CHECK(std::abs(total - 1.0) <= 1e-12);
        for (const auto& c : m.covariances) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(c);
            CHECK(es.eigenvalues().minCoeff() >= 1e-6 * (1.0 - 1e-9));
            CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("seeded determinism") {
        const GmmModel again = fit_em(data, with_k(3, 11));
        CHECK(to_json(again).dump() == to_json(m).dump());
        CHECK(fit_em(data, with_k(3, 11), Workers{3}).log_likelihood == m.log_likelihood);
    }
    SUBCASE("row order does not matter") {
        DataMatrix shuffled = data;
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(data.rows()));
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Eigen::Index>(i);
        std::mt19937_64 rng(12);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (Eigen::Index i = 0; i < data.rows(); ++i) shuffled.row(i) = data.row(perm[static_cast<std::size_t>(i)]);
        const GmmModel s = fit_em(shuffled, with_k(3, 11));
        CHECK(std::abs(s.log_likelihood - m.log_likelihood) <= 1e-9 * std::abs(m.log_likelihood));
        CHECK(s.weights == m.weights);
    }
    SUBCASE("degenerate feature is regularized") {
        DataMatrix flat = data;
        flat.col(2).setConstant(1.0);
        const GmmModel f = fit_em(flat, with_k(2, 1));
        CHECK(std::isfinite(f.log_likelihood));
    }
}

TEST_CASE("fit errors") {
    DataMatrix tiny(5, 2);
    tiny << 0, 0, 1, 1, 2, 0, 3, 1, 4, 0;
    CHECK_THROWS_AS(fit_em(tiny, with_k(2)), Error);
    CHECK_THROWS_AS(fit_em(tiny, with_k(0)), Error);
    DataMatrix bad = DataMatrix::Zero(10, 2);
    bad(3, 1) = std::nan("");
    CHECK_THROWS_WITH_AS(fit_em(bad, with_k(1)), "non-finite data", Error);
}

TEST_CASE("model JSON round trip") {
    const DataMatrix data = sample_blobs({{{0, 10}, 1.0, 0.5}, {{5, 0}, 2.0, 0.5}}, 200, 13);
    const GmmModel m = fit_em(data, with_k(2, 5));
    const auto j = to_json(m);
    const GmmModel back = gmm_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.k == 2);
    CHECK(back.weights == m.weights);
    CHECK(back.means[1] == m.means[1]);
    CHECK(back.covariances[0] == m.covariances[0]);
    CHECK(back.standardization.sd == m.standardization.sd);
    CHECK(log_likelihood(back, data) == log_likelihood(m, data));
    CHECK(j.contains("means_original_units"));
    CHECK_THROWS_AS(gmm_from_json(nlohmann::json{{"k", 2}}), Error);
}

TEST_CASE("elbow curve") {
    SUBCASE("one Gaussian") {
        const DataMatrix data = sample_blobs({{{1, 2}, 0.5, 1.0}}, 600, 14);
        const ElbowResult r = elbow_curve(data, {1, 2, 3, 4}, 3, 3);
        CHECK(r.pick == 1);
        for (std::size_t i = 1; i < r.curve.size(); ++i) {
            CHECK(r.curve[i].mean_nll <= r.curve[i - 1].mean_nll + 1e-6);
            CHECK(r.curve[i - 1].mean_nll - r.curve[i].mean_nll < 0.05);
        }
    }
    SUBCASE("three separated clusters") {
        for (const auto& blobs :
             {std::vector<Blob>{{{0, 0}, 1.0, 0.5}, {{8, 0}, 1.0, 0.3}, {{16, 0}, 1.0, 0.2}},
              std::vector<Blob>{{{0, 0}, 1.0, 1.0 / 3}, {{8, 0}, 1.0, 1.0 / 3}, {{4, 6.9282}, 1.0, 1.0 / 3}}}) {
            const DataMatrix data = sample_blobs(blobs, 900, 15);
            const ElbowResult r = elbow_curve(data, {1, 2, 3, 4, 5}, 7, 5);
            CHECK(r.pick == 3);
            REQUIRE(r.models.size() == 5);
            CHECK(r.models[2].k == 3);
            for (std::size_t i = 1; i < r.curve.size(); ++i) {
                CHECK(r.curve[i].mean_nll <= r.curve[i - 1].mean_nll + 1e-6);
                CHECK(r.curve[i].parameters > r.curve[i - 1].parameters);
            }
        }
    }
    CHECK_THROWS_AS(elbow_curve(DataMatrix::Zero(50, 2), {3, 2}, 1), Error);
    CHECK_THROWS_AS(elbow_curve(DataMatrix::Zero(50, 2), {}, 1), Error);
}

TEST_CASE("elbow pick rule") {
    auto curve = [](std::vector<double> nll) {
        std::vector<ElbowPoint> c;
        for (std::size_t i = 0; i < nll.size(); ++i) c.push_back({i + 1, nll[i], 0, 0.0});
        return c;
    };
    CHECK(pick_elbow(curve({10, 6, 5, 4.9, 4.8})) == 2);
    CHECK(pick_elbow(curve({10, 9, 5, 4.9, 4.8})) == 3);
    CHECK(pick_elbow(curve({5, 4.99, 4.98, 4.97})) == 1);
    CHECK(pick_elbow(curve({5, 4})) == 1);
}
