#include "wf/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "wf/config.hpp"

namespace wf {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw std::runtime_error("malformed matrix");
  const size_t cols = rows.front().size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::runtime_error("ragged matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

json net_to_json(const Mlp& net) {
  json j;
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    j["weights"].push_back(matrix_to_json(net.weights[l]));
    j["biases"].push_back(vector_to_json(net.biases[l]));
  }
  return j;
}

Mlp net_from_json(const json& j) {
  Mlp net;
  for (const auto& w : j.at("weights")) net.weights.push_back(matrix_from_json(w));
  for (const auto& b : j.at("biases")) net.biases.push_back(vector_from_json(b));
  net.validate();
  return net;
}

json opt_to_json(const RmsProp& opt) {
  json j;
  j["learning_rate"] = opt.learning_rate;
  j["decay"] = opt.decay;
  j["epsilon"] = opt.epsilon;
  j["weight_acc"] = json::array();
  j["bias_acc"] = json::array();
  for (const auto& w : opt.weight_acc) j["weight_acc"].push_back(matrix_to_json(w.matrix()));
  for (const auto& b : opt.bias_acc) j["bias_acc"].push_back(vector_to_json(Eigen::VectorXd(b)));
  j["extra_acc"] = vector_to_json(Eigen::VectorXd(opt.extra_acc));
  return j;
}

RmsProp opt_from_json(const json& j) {
  RmsProp opt;
  opt.learning_rate = j.at("learning_rate").get<double>();
  opt.decay = j.at("decay").get<double>();
  opt.epsilon = j.at("epsilon").get<double>();
  for (const auto& w : j.at("weight_acc")) opt.weight_acc.push_back(matrix_from_json(w).array());
  for (const auto& b : j.at("bias_acc")) opt.bias_acc.push_back(vector_from_json(b).array());
  opt.extra_acc = vector_from_json(j.at("extra_acc")).array();
  return opt;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "hcmappo-checkpoint";
  j["group_size"] = checkpoint.group_size;
  j["episodes_trained"] = checkpoint.episodes_trained;
  j["seed"] = checkpoint.seed;
  j["shared_actor"] = checkpoint.policy.shared;
  j["actors"] = json::array();
  for (const auto& actor : checkpoint.policy.actors) {
    json a = net_to_json(actor.net);
    a["log_std"] = vector_to_json(actor.log_std);
    j["actors"].push_back(std::move(a));
  }
  j["critic"] = net_to_json(checkpoint.critic);
  j["actor_opts"] = json::array();
  for (const auto& opt : checkpoint.actor_opts) j["actor_opts"].push_back(opt_to_json(opt));
  j["critic_opt"] = opt_to_json(checkpoint.critic_opt);

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint file " + path.string());
  out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("kind").get<std::string>() != "hcmappo-checkpoint")
      throw std::runtime_error("not a checkpoint file");
    Checkpoint checkpoint;
    checkpoint.group_size = j.at("group_size").get<int>();
    checkpoint.episodes_trained = j.at("episodes_trained").get<int>();
    checkpoint.seed = j.at("seed").get<uint64_t>();
    checkpoint.policy.shared = j.at("shared_actor").get<bool>();
    for (const auto& a : j.at("actors")) {
      GaussianPolicy actor;
      actor.net = net_from_json(a);
      actor.log_std = vector_from_json(a.at("log_std"));
      if (actor.log_std.size() != actor.net.output_dim())
        throw std::runtime_error("log_std does not match the action head");
      checkpoint.policy.actors.push_back(std::move(actor));
    }
    if (checkpoint.policy.actors.empty()) throw std::runtime_error("checkpoint has no actors");
    checkpoint.critic = net_from_json(j.at("critic"));
    for (const auto& o : j.at("actor_opts")) checkpoint.actor_opts.push_back(opt_from_json(o));
    checkpoint.critic_opt = opt_from_json(j.at("critic_opt"));
    return checkpoint;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace wf
