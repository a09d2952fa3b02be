#include "nsbf/channel.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace nsbf {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw Error(what);
    }
}

bool all_finite(const CVector& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
            return false;
        }
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class ComplexGaussian {
public:
    explicit ComplexGaussian(std::uint64_t seed) : engine_(seed) {}

    cplx draw(double variance)
    {
        // both normals are consumed even for zero variance so the stream
        // layout does not depend on the configuration
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        if (variance == 0.0) {
            return {0.0, 0.0};
        }
        const double scale = std::sqrt(variance / 2.0);
        return {scale * re, scale * im};
    }

    CVector draw(int n, double variance)
    {
        CVector v(n);
        for (int i = 0; i < n; ++i) {
            v[i] = draw(variance);
        }
        return v;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

void SystemConfig::validate() const
{
    require(n_antennas >= 2, "n_antennas must be >= 2");
    require(p1 >= 0.0 && p2 >= 0.0 && p_relay >= 0.0, "transmit powers must be >= 0");
    require(std::isfinite(p1) && std::isfinite(p2) && std::isfinite(p_relay),
            "transmit powers must be finite");
    require(sigma2_node1 > 0.0 && sigma2_node2 > 0.0 && sigma2_relay > 0.0 &&
                sigma2_eve1 > 0.0 && sigma2_eve2 > 0.0,
            "noise variances must be > 0");
    require(var_f1 >= 0.0 && var_f2 >= 0.0 && var_fe >= 0.0 && var_g1 >= 0.0 &&
                var_g2 >= 0.0,
            "channel variances must be >= 0");
}

void ChannelRealization::validate() const
{
    const auto n = f1.size();
    require(n >= 2, "channel vectors must have length >= 2");
    require(f2.size() == n && fe.size() == n, "channel vectors must have equal length");
    require(all_finite(f1) && all_finite(f2) && all_finite(fe) &&
                std::isfinite(std::abs(g1)) && std::isfinite(std::abs(g2)),
            "channel entries must be finite");
    require(f1.norm() > 0.0, "f1 is identically zero");
    require(f2.norm() > 0.0, "f2 is identically zero");
}

ChannelRealization sample_channel(const SystemConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    ComplexGaussian gen(seed);
    const int n = cfg.n_antennas;

    for (int attempt = 0; attempt < 2; ++attempt) {
        ChannelRealization ch;
        ch.f1 = gen.draw(n, cfg.var_f1);
        ch.f2 = gen.draw(n, cfg.var_f2);
        ch.fe = gen.draw(n, cfg.var_fe);
        ch.g1 = gen.draw(cfg.var_g1);
        ch.g2 = gen.draw(cfg.var_g2);
        if (ch.f1.norm() > 0.0 && ch.f2.norm() > 0.0) {
            return ch;
        }
    }
    std::ostringstream msg;
    msg << "degenerate channel draw (zero f1 or f2) for seed " << seed;
    throw Error(msg.str());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

ChannelRealization rotate_phase(const ChannelRealization& ch, double theta)
{
    const cplx rot = std::polar(1.0, theta);
    ChannelRealization out = ch;
    out.f1 *= rot;
    out.f2 *= rot;
    out.fe *= rot;
    out.g1 *= rot;
    out.g2 *= rot;
    return out;
}

PowerSplit power_split_from_total(double pt_dbw)
{
    const double total = dbw_to_watts(pt_dbw);
    return {total / 4.0, total / 4.0, total / 2.0};
}

double dbw_to_watts(double dbw)
{
    return std::pow(10.0, dbw / 10.0);
}

double watts_to_dbw(double watts)
{
    if (!(watts > 0.0)) {
        throw std::domain_error("watts_to_dbw: power must be > 0");
    }
    return 10.0 * std::log10(watts);
}

}  // namespace nsbf
