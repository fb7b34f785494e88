#include "plaq/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plaq::channel {

void ArrayConfig::validate() const {
    if (n_rx < 1) throw std::invalid_argument("ArrayConfig: n_rx must be >= 1");
    if (!(delta_r > 0.0)) throw std::invalid_argument("ArrayConfig: delta_r must be > 0");
    if (!(carrier_freq > 0.0)) throw std::invalid_argument("ArrayConfig: carrier_freq must be > 0");
    if (std::abs(orientation.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("ArrayConfig: orientation must be a unit vector");
}

double PathLossModel::power_at(double distance) const {
    const double e = exponent == PathLossExponent::half_beta ? 0.5 * beta : beta;
    return p0 * std::pow(distance, -e);
}

void PathLossModel::validate() const {
    if (!(p0 > 0.0)) throw std::invalid_argument("PathLossModel: p0 must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("PathLossModel: beta must be > 0");
    if (n0 != 1.0) throw std::invalid_argument("PathLossModel: n0 is normalized to 1");
}

void Deployment::validate() const {
    array.validate();
    pathloss.validate();
    if (!(rice_k >= 0.0)) throw std::invalid_argument("Deployment: rice_k must be >= 0");
    if (!(corr >= 0.0 && corr < 1.0)) throw std::invalid_argument("Deployment: corr must be in [0,1)");
    std::vector<std::string> seen;
    for (const auto& d : devices) {
        if (d.position.norm() == 0.0)
            throw std::invalid_argument("Deployment: device position coincides with the access point");
        for (const auto& s : seen)
            if (s == d.id) throw std::invalid_argument("Deployment: duplicate device id " + d.id);
        seen.push_back(d.id);
    }
}

const DeviceEntry& Deployment::device(const std::string& id) const {
    for (const auto& d : devices)
        if (d.id == id) return d;
    throw std::invalid_argument("Deployment: unknown device id " + id);
}

VectorXcd spatial_signature(double omega, const ArrayConfig& array) {
    if (std::abs(omega) > 1.0 + 1e-12)
        throw std::invalid_argument("spatial_signature: |omega| must be <= 1");
    const int n = array.n_rx;
    VectorXcd e(n);
    const double phase_step = -2.0 * std::numbers::pi * array.delta_r * omega;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) e[m] = std::polar(scale, phase_step * m);
    return e;
}

DeviceChannelStats stats_for_position(const Vector2d& position, double rice_k,
                                      const Deployment& dep) {
    const double d = position.norm();
    if (d == 0.0) throw std::invalid_argument("stats_for_position: position at the origin");

    DeviceChannelStats st;
    st.distance = d;
    st.rice_k = rice_k;
    st.corr = dep.corr;
    st.dir_cosine = position.dot(dep.array.orientation) / d;
    st.dir_cosine = std::clamp(st.dir_cosine, -1.0, 1.0);
    st.aoa = std::acos(st.dir_cosine);
    st.power = dep.pathloss.power_at(d);

    const int n = dep.array.n_rx;
    const double a = std::sqrt(st.power * n * rice_k / (rice_k + 1.0));
    const std::complex<double> carrier =
        std::polar(1.0, -2.0 * std::numbers::pi * d / dep.array.wavelength());
    st.mean = a * carrier * spatial_signature(st.dir_cosine, dep.array);

    st.covariance.resize(n, n);
    const double scale = st.power / (rice_k + 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            st.covariance(i, j) = scale * std::pow(dep.corr, std::abs(i - j));
    return st;
}

DeviceChannelStats device_stats(const Deployment& dep, const std::string& id) {
    return stats_for_position(dep.device(id).position, dep.rice_k, dep);
}

DeviceChannelStats attacker_stats(const Deployment& dep) {
    if (!dep.attacker) throw std::invalid_argument("attacker_stats: deployment has no attacker");
    return stats_for_position(dep.attacker->position, dep.attacker->rice_k, dep);
}

Vector2d position_from_aoa(const ArrayConfig& array, double distance, double phi) {
    const double base = std::atan2(array.orientation.y(), array.orientation.x());
    const double th = base + phi;
    return distance * Vector2d{std::cos(th), std::sin(th)};
}

std::pair<double, double> snr_moments(const DeviceChannelStats& stats) {
    const auto& m = stats.mean;
    const auto& S = stats.covariance;
    const double mean = S.trace().real() + m.squaredNorm();
    const double var = (S * S).trace().real() + (m.adjoint() * S * m).value().real();
    return {mean, var};
}

ChannelSampler::ChannelSampler(const DeviceChannelStats& stats) : mean_(stats.mean) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(stats.covariance);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("ChannelSampler: covariance eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-12)
            throw std::runtime_error("ChannelSampler: covariance is not PSD");
        ev[i] = std::sqrt(std::max(ev[i], 0.0));
    }
    factor_ = es.eigenvectors() * ev.asDiagonal();
}

VectorXcd ChannelSampler::draw(std::mt19937_64& rng) const {
    static thread_local std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index n = mean_.size();
    VectorXcd z(n);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (Eigen::Index i = 0; i < n; ++i)
        z[i] = std::complex<double>(normal(rng) * inv_sqrt2, normal(rng) * inv_sqrt2);
    return mean_ + factor_ * z;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 step on master + stream * golden gamma
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace plaq::channel
