#include "mepsac/config.hpp"

#include <fstream>
#include <sstream>

namespace mepsac {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected on/off, got '" + value + "'");
}

Vec parse_point(const std::string& key, const std::string& value) {
  std::vector<double> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(parse_double(key, trim(item)));
  if (parts.empty()) throw ConfigError("config key '" + key + "': empty point");
  Vec p(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) p[i] = parts[i];
  return p;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(parse_int(key, trim(item)));
  if (parts.empty()) throw ConfigError("config key '" + key + "': empty list");
  return parts;
}

std::string format_point(const Vec& p) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) out << ", ";
    out << p[i];
  }
  return out.str();
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void apply_config_key(RunConfig& c, const std::string& key,
                      const std::string& value) {
  if (key == "surface") c.env.surface_id = value;
  else if (key == "start") c.env.start = parse_point(key, value);
  else if (key == "goal") c.env.goal = parse_point(key, value);
  else if (key == "lambda") c.env.lambda = parse_double(key, value);
  else if (key == "delta") c.env.delta = parse_double(key, value);
  else if (key == "reset_noise_std") c.env.reset_noise_std = parse_double(key, value);
  else if (key == "max_steps") c.env.max_steps = parse_int(key, value);
  else if (key == "gamma") c.agent.gamma = parse_double(key, value);
  else if (key == "tau") c.agent.tau = parse_double(key, value);
  else if (key == "actor_lr") c.agent.actor_lr = parse_double(key, value);
  else if (key == "critic_lr") c.agent.critic_lr = parse_double(key, value);
  else if (key == "alpha_init") c.agent.alpha_init = parse_double(key, value);
  else if (key == "alpha_lr") c.agent.alpha_lr = parse_double(key, value);
  else if (key == "alpha_mode") {
    if (value == "tunable") c.agent.alpha_fixed.reset();
    else c.agent.alpha_fixed = parse_double(key, value);
  } else if (key == "batch_size") c.agent.batch_size = parse_int(key, value);
  else if (key == "noise_std") c.agent.noise_std = parse_double(key, value);
  else if (key == "noise_clip") c.agent.noise_clip = parse_double(key, value);
  else if (key == "policy_delay") c.agent.policy_delay = parse_int(key, value);
  else if (key == "agent_update_interval") c.agent.agent_update_interval = parse_int(key, value);
  else if (key == "grad_clip") c.agent.grad_clip = parse_double(key, value);
  else if (key == "epochs") c.agent.epochs = parse_int(key, value);
  else if (key == "target_smoothing") c.agent.target_smoothing = parse_bool(key, value);
  else if (key == "hidden_dims") c.agent.hidden_dims = parse_int_list(key, value);
  else if (key == "eval_interval") c.agent.eval_interval = parse_int(key, value);
  else if (key == "eval_episodes") c.eval_episodes = parse_int(key, value);
  else if (key == "success_radius") c.success_radius = parse_double(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    apply_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::map<std::string, std::string> config_to_map(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["surface"] = c.env.surface_id;
  m["start"] = format_point(c.env.start);
  m["goal"] = format_point(c.env.goal);
  m["lambda"] = format_double(c.env.lambda);
  m["delta"] = format_double(c.env.delta);
  m["reset_noise_std"] = format_double(c.env.reset_noise_std);
  m["max_steps"] = std::to_string(c.env.max_steps);
  m["gamma"] = format_double(c.agent.gamma);
  m["tau"] = format_double(c.agent.tau);
  m["actor_lr"] = format_double(c.agent.actor_lr);
  m["critic_lr"] = format_double(c.agent.critic_lr);
  m["alpha_init"] = format_double(c.agent.alpha_init);
  m["alpha_lr"] = format_double(c.agent.alpha_lr);
  m["alpha_mode"] = c.agent.alpha_fixed ? format_double(*c.agent.alpha_fixed)
                                        : std::string("tunable");
  m["batch_size"] = std::to_string(c.agent.batch_size);
  m["noise_std"] = format_double(c.agent.noise_std);
  m["noise_clip"] = format_double(c.agent.noise_clip);
  m["policy_delay"] = std::to_string(c.agent.policy_delay);
  m["agent_update_interval"] = std::to_string(c.agent.agent_update_interval);
  m["grad_clip"] = format_double(c.agent.grad_clip);
  m["epochs"] = std::to_string(c.agent.epochs);
  m["target_smoothing"] = c.agent.target_smoothing ? "on" : "off";
  {
    std::ostringstream hd;
    for (size_t i = 0; i < c.agent.hidden_dims.size(); ++i) {
      if (i) hd << ", ";
      hd << c.agent.hidden_dims[i];
    }
    m["hidden_dims"] = hd.str();
  }
  m["eval_interval"] = std::to_string(c.agent.eval_interval);
  m["eval_episodes"] = std::to_string(c.eval_episodes);
  m["success_radius"] = format_double(c.success_radius);
  return m;
}

std::string config_to_text(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config_to_map(config))
    out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace mepsac
