#pragma once

#include <string>

#include <json.hpp>

#include "nsbf/channel.hpp"
#include "nsbf/optimizer.hpp"

namespace nsbf {

using json = nlohmann::json;

/// Complex numbers are written as [re, im] pairs, vectors as arrays of
/// pairs and matrices as arrays of rows.
json to_json(cplx z);
json to_json(const CVector& v);
json to_json(const CMatrix& m);
cplx complex_from_json(const json& j);
CVector cvector_from_json(const json& j);
CMatrix cmatrix_from_json(const json& j);

json to_json(const SystemConfig& cfg);
json to_json(const ChannelRealization& ch);

/// Keys missing from `j` keep their value in `base`. Unknown keys and
/// wrongly typed values throw nsbf::Error. The result is validated.
SystemConfig config_from_json(const json& j, const SystemConfig& base = {});
ChannelRealization channel_from_json(const json& j);

json to_json(const Candidate& cand);

/// Full report of one solve: inputs, recovered W, rate diagnostics of the
/// winner, nulling residuals and solver counters.
json solve_report(const ChannelRealization& ch, const SystemConfig& cfg,
                  const OptimizationResult& res);

/// Reads and parses a JSON file; throws nsbf::Error on I/O or syntax errors.
json read_json_file(const std::string& path);

}  // namespace nsbf
