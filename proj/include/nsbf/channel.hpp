#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nsbf {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Raised for inputs that violate a documented precondition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Network parameters. Powers and noise variances are in watts, channel
 * variances are dimensionless. Defaults are the all-unit benchmark with
 * a 20 dBW total budget split 1/4, 1/4, 1/2.
 */
struct SystemConfig {
    int n_antennas = 3;

    double p1 = 25.0;
    double p2 = 25.0;
    double p_relay = 50.0;

    double sigma2_node1 = 1.0;
    double sigma2_node2 = 1.0;
    double sigma2_relay = 1.0;
    double sigma2_eve1 = 1.0;
    double sigma2_eve2 = 1.0;

    double var_f1 = 1.0;
    double var_f2 = 1.0;
    double var_fe = 1.0;
    double var_g1 = 1.0;
    double var_g2 = 1.0;

    /// Throws nsbf::Error describing the first violated invariant.
    void validate() const;
};

/// One quasi-static draw of every channel in the network.
struct ChannelRealization {
    CVector f1;  // S1 -> relay
    CVector f2;  // S2 -> relay
    CVector fe;  // relay -> eavesdropper
    cplx g1{0.0, 0.0};  // S1 -> eavesdropper
    cplx g2{0.0, 0.0};  // S2 -> eavesdropper

    int n_antennas() const { return static_cast<int>(f1.size()); }

    /// Finite entries, consistent lengths, nonzero f1 and f2.
    void validate() const;
};

/**
 * Draws every coefficient as CN(0, var): real and imaginary parts are
 * independent N(0, var/2). Draw order is f1, f2, fe, g1, g2. A draw with
 * a zero f1 or f2 is redrawn once from the same stream, then rejected.
 */
ChannelRealization sample_channel(const SystemConfig& cfg, std::uint64_t seed);

/// Stream seed for realization `index` of an experiment (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Multiplies every channel coefficient by exp(j*theta).
ChannelRealization rotate_phase(const ChannelRealization& ch, double theta);

struct PowerSplit {
    double p1;
    double p2;
    double p_relay;
};

/// P1 = P2 = P_T/4, P_R = P_T/2 with P_T given in dBW.
PowerSplit power_split_from_total(double pt_dbw);

double dbw_to_watts(double dbw);

/// Throws std::domain_error for non-positive input.
double watts_to_dbw(double watts);

}  // namespace nsbf
