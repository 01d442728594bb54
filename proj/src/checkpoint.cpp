#include "mepsac/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace mepsac {

namespace {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j.at(0).size() : 0;
  Mat m(rows, cols);
  for (size_t i = 0; i < rows; ++i)
    for (size_t k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec vector_from_json(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json mlp_to_json(const MlpParams& p) {
  json j;
  j["layer_dims"] = p.layer_dims;
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (const auto& w : p.weights) j["weights"].push_back(matrix_to_json(w));
  for (const auto& b : p.biases) j["biases"].push_back(vector_to_json(b));
  return j;
}

MlpParams mlp_from_json(const json& j) {
  MlpParams p;
  p.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  for (const auto& w : j.at("weights")) p.weights.push_back(matrix_from_json(w));
  for (const auto& b : j.at("biases")) p.biases.push_back(vector_from_json(b));
  return p;
}

json adam_to_json(const AdamState& s) {
  json j;
  j["timestep"] = s.timestep;
  j["m_weights"] = json::array();
  j["v_weights"] = json::array();
  j["m_biases"] = json::array();
  j["v_biases"] = json::array();
  for (const auto& m : s.m_weights) j["m_weights"].push_back(matrix_to_json(m));
  for (const auto& v : s.v_weights) j["v_weights"].push_back(matrix_to_json(v));
  for (const auto& m : s.m_biases) j["m_biases"].push_back(vector_to_json(m));
  for (const auto& v : s.v_biases) j["v_biases"].push_back(vector_to_json(v));
  return j;
}

AdamState adam_from_json(const json& j) {
  AdamState s;
  s.timestep = j.at("timestep").get<long>();
  for (const auto& m : j.at("m_weights")) s.m_weights.push_back(matrix_from_json(m));
  for (const auto& v : j.at("v_weights")) s.v_weights.push_back(matrix_from_json(v));
  for (const auto& m : j.at("m_biases")) s.m_biases.push_back(vector_from_json(m));
  for (const auto& v : j.at("v_biases")) s.v_biases.push_back(vector_from_json(v));
  return s;
}

json adam_vec_to_json(const AdamVecState& s) {
  return {{"timestep", s.timestep},
          {"m", vector_to_json(s.m)},
          {"v", vector_to_json(s.v)}};
}

AdamVecState adam_vec_from_json(const json& j) {
  AdamVecState s;
  s.timestep = j.at("timestep").get<long>();
  s.m = vector_from_json(j.at("m"));
  s.v = vector_from_json(j.at("v"));
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const SacState& sac) {
  json j;
  j["format"] = kCheckpointFormat;
  j["actor"] = mlp_to_json(sac.actor.mlp);
  j["log_std"] = vector_to_json(sac.actor.log_std);
  j["critic1"] = mlp_to_json(sac.critic1);
  j["critic2"] = mlp_to_json(sac.critic2);
  j["target1"] = mlp_to_json(sac.target1);
  j["target2"] = mlp_to_json(sac.target2);
  j["critic1_adam"] = adam_to_json(sac.critic1_adam);
  j["critic2_adam"] = adam_to_json(sac.critic2_adam);
  j["actor_adam"] = adam_to_json(sac.actor_adam.mlp);
  j["log_std_adam"] = adam_vec_to_json(sac.actor_adam.log_std);
  j["alpha_adam"] = adam_vec_to_json(sac.alpha.adam);
  j["log_alpha"] = sac.alpha.log_alpha;
  j["alpha_tunable"] = sac.alpha.tunable;

  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out << j.dump();
  out << "\n";
}

SacState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint '" + path + "': " + e.what());
  }
  const std::string format = j.value("format", "");
  if (format != kCheckpointFormat)
    throw CheckpointError("checkpoint format mismatch in '" + path +
                          "': found '" + format + "', expected '" +
                          kCheckpointFormat + "'");
  SacState sac;
  sac.actor.mlp = mlp_from_json(j.at("actor"));
  sac.actor.log_std = vector_from_json(j.at("log_std"));
  sac.critic1 = mlp_from_json(j.at("critic1"));
  sac.critic2 = mlp_from_json(j.at("critic2"));
  sac.target1 = mlp_from_json(j.at("target1"));
  sac.target2 = mlp_from_json(j.at("target2"));
  sac.critic1_adam = adam_from_json(j.at("critic1_adam"));
  sac.critic2_adam = adam_from_json(j.at("critic2_adam"));
  sac.actor_adam.mlp = adam_from_json(j.at("actor_adam"));
  sac.actor_adam.log_std = adam_vec_from_json(j.at("log_std_adam"));
  sac.alpha.adam = adam_vec_from_json(j.at("alpha_adam"));
  sac.alpha.log_alpha = j.at("log_alpha").get<double>();
  sac.alpha.tunable = j.at("alpha_tunable").get<bool>();
  return sac;
}

}  // namespace mepsac
