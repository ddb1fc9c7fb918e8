#pragma once

#include <filesystem>

#include <json.hpp>

#include "ecodrive/nn/adam.hpp"
#include "ecodrive/nn/mlp.hpp"

namespace ecodrive::nn {

using Json = nlohmann::json;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Doubles are written in shortest round-trip form, so every value reads
/// back bit-identical.
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

Json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const Json& j);

Json adam_to_json(const AdamState& s);
AdamState adam_from_json(const Json& j);

void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

}  // namespace ecodrive::nn
