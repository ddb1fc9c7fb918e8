#include "ecodrive/nn/checkpoint.hpp"

#include <fstream>

namespace ecodrive::nn {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw CheckpointError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw CheckpointError("non-numeric entry in parameter array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json mlp_to_json(const Mlp& net) {
  return Json{{"widths", net.widths()}, {"activation", to_string(net.activation())},
              {"params", vector_to_json(net.params())}};
}

Mlp mlp_from_json(const Json& j) {
  try {
    Mlp net(j.at("widths").get<std::vector<int>>(), parse_activation(j.at("activation").get<std::string>()));
    Eigen::VectorXd params = vector_from_json(j.at("params"));
    if (params.size() != net.num_params()) {
      throw CheckpointError("parameter count " + std::to_string(params.size()) + " does not match layer shapes (" +
                            std::to_string(net.num_params()) + ")");
    }
    if (first_non_finite(params) >= 0) throw CheckpointError("non-finite network parameter");
    net.params() = std::move(params);
    return net;
  } catch (const Json::exception& e) {
    throw CheckpointError(std::string("malformed network: ") + e.what());
  }
}

Json adam_to_json(const AdamState& s) {
  return Json{{"m", vector_to_json(s.m)},   {"v", vector_to_json(s.v)},         {"step", s.step},
              {"lr", s.lr},                 {"beta1", s.beta1},                 {"beta2", s.beta2},
              {"epsilon", s.epsilon}};
}

AdamState adam_from_json(const Json& j) {
  try {
    AdamState s;
    s.m = vector_from_json(j.at("m"));
    s.v = vector_from_json(j.at("v"));
    s.step = j.at("step").get<long>();
    s.lr = j.at("lr").get<double>();
    s.beta1 = j.at("beta1").get<double>();
    s.beta2 = j.at("beta2").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    if (s.m.size() != s.v.size() || s.step < 0) throw CheckpointError("inconsistent optimizer state");
    return s;
  } catch (const Json::exception& e) {
    throw CheckpointError(std::string("malformed optimizer state: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw CheckpointError("write failed for " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace ecodrive::nn
