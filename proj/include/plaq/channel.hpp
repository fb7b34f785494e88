#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

// Deployment geometry and per-link Rice SIMO channel statistics: LOS mean
// from the phased-array response, exponentially correlated covariance, and
// correlated complex Gaussian sampling.

namespace plaq::channel {

using Eigen::MatrixXcd;
using Eigen::Vector2d;
using Eigen::VectorXcd;

inline constexpr double kSpeedOfLight = 299792458.0;

struct ArrayConfig {
    int n_rx = 4;
    double delta_r = 0.5;          // antenna spacing / wavelength
    double carrier_freq = 2.4e9;   // Hz
    Vector2d orientation{1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2};

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    void validate() const;
};

// Received power P_i = P0 * d^{-beta/2} as printed; the conventional d^{-beta}
// form is selectable.
enum class PathLossExponent { half_beta, beta };

struct PathLossModel {
    double p0 = 1.0;
    double beta = 3.0;
    double n0 = 1.0;  // noise PSD, fixed to 1 by normalization
    PathLossExponent exponent = PathLossExponent::half_beta;

    double power_at(double distance) const;
    void validate() const;
};

// Per-link Rice SIMO distribution h ~ CN(mean, covariance) with
// E[||h||^2] = power * n_rx.
struct DeviceChannelStats {
    VectorXcd mean;
    MatrixXcd covariance;
    double power = 0.0;
    double rice_k = 0.0;
    double distance = 0.0;
    double aoa = 0.0;         // Phi in [0, pi], relative to the array axis
    double dir_cosine = 0.0;  // Omega = cos(Phi)
    double corr = 0.0;        // rho

    int n_rx() const { return static_cast<int>(mean.size()); }
};

struct DeviceEntry {
    std::string id;
    Vector2d position;
};

struct AttackerSpec {
    Vector2d position;
    double rice_k = 1.0;  // linear
};

struct Deployment {
    std::vector<DeviceEntry> devices;
    std::optional<AttackerSpec> attacker;
    ArrayConfig array;
    PathLossModel pathloss;
    double rice_k = 3.9810717055349722;  // 6 dB, common to legitimate devices
    double corr = 0.0;

    void validate() const;
    const DeviceEntry& device(const std::string& id) const;
};

// Unit spatial signature e(Omega) = (1/sqrt(N)) [z^0, ..., z^{(N-1)Omega}],
// z = exp(-j 2 pi Delta_r).
VectorXcd spatial_signature(double omega, const ArrayConfig& array);

// Channel statistics for a transmitter at `position` with the given Rice
// factor, under the deployment's array/path-loss parameters.
DeviceChannelStats stats_for_position(const Vector2d& position, double rice_k,
                                      const Deployment& dep);

// Statistics of a deployment device / of the configured attacker.
DeviceChannelStats device_stats(const Deployment& dep, const std::string& id);
DeviceChannelStats attacker_stats(const Deployment& dep);

// Attacker placement by (distance, AoA): the bearing is the array axis
// rotated counterclockwise by phi.
Vector2d position_from_aoa(const ArrayConfig& array, double distance, double phi);

// (E[gamma], Var[gamma]) for gamma = ||h||^2: (Tr S + m'm, Tr S^2 + m'Sm).
std::pair<double, double> snr_moments(const DeviceChannelStats& stats);

// Draws h = mean + L z with L a PSD square root of the covariance
// (Hermitian eigendecomposition, eigenvalues clamped at -1e-12 -> 0) and z
// i.i.d. standard complex Gaussian. One sampler per thread; sampling mutates
// only the caller-supplied RNG.
class ChannelSampler {
  public:
    explicit ChannelSampler(const DeviceChannelStats& stats);

    const VectorXcd& mean() const { return mean_; }
    VectorXcd draw(std::mt19937_64& rng) const;

    // Standard normal pairs consumed per draw; exposed for stream accounting.
    int normals_per_draw() const { return 2 * static_cast<int>(mean_.size()); }

  private:
    VectorXcd mean_;
    MatrixXcd factor_;  // L with L L^H = covariance
};

// Derives an independent per-stream seed from a master seed (splitmix64).
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace plaq::channel
