#include "robustagg/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace robustagg {

namespace {

using nlohmann::json;

json net_to_json(const Mlp& net) {
  json j;
  j["input_dim"] = net.shape().input_dim;
  j["hidden_dim"] = net.shape().hidden_dim;
  j["n_hidden"] = net.shape().n_hidden;
  json layers = json::array();
  for (const auto& l : net.layers()) {
    json lj;
    lj["rows"] = l.w.rows();
    lj["cols"] = l.w.cols();
    std::vector<double> w(static_cast<std::size_t>(l.w.size()));
    for (Eigen::Index r = 0; r < l.w.rows(); ++r)
      for (Eigen::Index c = 0; c < l.w.cols(); ++c)
        w[static_cast<std::size_t>(r * l.w.cols() + c)] = l.w(r, c);  // row-major
    lj["w"] = std::move(w);
    lj["b"] = std::vector<double>(l.b.data(), l.b.data() + l.b.size());
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j;
}

Mlp net_from_json(const json& j) {
  MlpShape shape{j.at("input_dim").get<int>(), j.at("hidden_dim").get<int>(),
                 j.at("n_hidden").get<int>()};
  Mlp net(shape);
  const auto& layers = j.at("layers");
  require(layers.size() == net.layers().size(), "checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto& dst = net.layers()[l];
    const auto& lj = layers.at(l);
    auto rows = lj.at("rows").get<Eigen::Index>();
    auto cols = lj.at("cols").get<Eigen::Index>();
    require(rows == dst.w.rows() && cols == dst.w.cols(), "checkpoint: layer shape mismatch");
    auto w = lj.at("w").get<std::vector<double>>();
    auto b = lj.at("b").get<std::vector<double>>();
    require(w.size() == static_cast<std::size_t>(rows * cols), "checkpoint: weight size mismatch");
    require(b.size() == static_cast<std::size_t>(rows), "checkpoint: bias size mismatch");
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        dst.w(r, c) = w[static_cast<std::size_t>(r * cols + c)];
    for (Eigen::Index r = 0; r < rows; ++r) dst.b(r) = b[static_cast<std::size_t>(r)];
  }
  return net;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  json j;
  j["format"] = "robustagg-checkpoint";
  j["format_version"] = 1;
  j["seed"] = ck.seed;
  j["lambda"] = ck.potentials.lambda;
  j["aux"] = ck.potentials.aux;
  j["g"] = net_to_json(ck.potentials.g);
  json hs = json::array();
  for (const auto& h : ck.potentials.h_blocks) hs.push_back(net_to_json(h));
  j["h"] = std::move(hs);
  if (!ck.resolved_config_json.empty()) j["config"] = json::parse(ck.resolved_config_json);
  std::ofstream out(path);
  require(out.good(), "cannot write checkpoint: " + path);
  out << j.dump();
  require(out.good(), "failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error("malformed checkpoint json: " + std::string(e.what()));
  }
  try {
    require(j.at("format") == "robustagg-checkpoint", "not a robustagg checkpoint");
    require(j.at("format_version").get<int>() == 1, "unsupported checkpoint version");
    Checkpoint ck;
    ck.seed = j.value("seed", std::uint64_t{0});
    ck.potentials.lambda = j.at("lambda").get<double>();
    ck.potentials.aux = j.value("aux", AuxMap{});
    ck.potentials.g = net_from_json(j.at("g"));
    for (const auto& hj : j.at("h")) ck.potentials.h_blocks.push_back(net_from_json(hj));
    if (j.contains("config")) ck.resolved_config_json = j.at("config").dump();
    return ck;
  } catch (const json::exception& e) {
    throw config_error("invalid checkpoint structure: " + std::string(e.what()));
  }
}

}  // namespace robustagg
