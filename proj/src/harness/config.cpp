#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mrl/harness.hpp"

namespace mrl::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& item : split(v, ',')) {
    if (!item.empty()) out.push_back(to_int(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' expects a list");
  return out;
}

}  // namespace

bandit::BetaConfig ExperimentConfig::parsed_beta() const {
  if (beta_mode == "theory") {
    bandit::BetaConfig b;
    b.ibe = ibe;
    return b;
  }
  if (beta_mode.rfind("tuned", 0) == 0) {
    bandit::BetaConfig b = bandit::BetaConfig::tuned(0.4, 0.5, 2.0);
    b.ibe = ibe;
    const auto colon = beta_mode.find(':');
    if (colon != std::string::npos) {
      const auto parts = split(beta_mode.substr(colon + 1), ',');
      if (parts.size() != 3)
        throw std::invalid_argument("config: beta_mode tuned wants tuned:a,b,c");
      b.a = to_double("beta_mode", parts[0]);
      b.b = to_double("beta_mode", parts[1]);
      b.c = to_double("beta_mode", parts[2]);
    }
    return b;
  }
  throw std::invalid_argument("config: beta_mode must be theory or tuned[:a,b,c]");
}

double ExperimentConfig::parsed_alpha() const {
  if (alpha == "auto") return -1.0;
  return to_double("alpha", alpha);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "kind") cfg.kind = value;
    else if (key == "env") cfg.env = value;
    else if (key == "algorithm") cfg.algorithm = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "T") cfg.horizon = to_int(key, value);
    else if (key == "M") cfg.num_tasks = to_int(key, value);
    else if (key == "k") cfg.dim_k = to_int(key, value);
    else if (key == "categories") cfg.categories = to_int(key, value);
    else if (key == "K") cfg.actions = to_int(key, value);
    else if (key == "n_members") cfg.num_members = to_int(key, value);
    else if (key == "perturb_sigma") cfg.perturb_sigma = to_double(key, value);
    else if (key == "noise_sigma") cfg.noise_sigma = to_double(key, value);
    else if (key == "decoy_style") cfg.decoy_style = value;
    else if (key == "delta") cfg.delta = to_double(key, value);
    else if (key == "alpha") cfg.alpha = value;
    else if (key == "ridge") cfg.ridge = to_double(key, value);
    else if (key == "strategy") cfg.strategy = value;
    else if (key == "beta_mode") cfg.beta_mode = value;
    else if (key == "ibe") cfg.ibe = to_double(key, value);
    else if (key == "record_width") cfg.record_width = to_bool(key, value);
    else if (key == "record_containment") cfg.record_containment = to_bool(key, value);
    else if (key == "S") cfg.num_states = to_int(key, value);
    else if (key == "A") cfg.num_actions = to_int(key, value);
    else if (key == "H") cfg.mdp_horizon = to_int(key, value);
    else if (key == "eps_schedule") cfg.eps_schedule = value;
    else if (key == "eps0") cfg.eps0 = to_double(key, value);
    else if (key == "sweep_M") cfg.sweep_tasks = to_int_list(key, value);
    else if (key == "sweep_T") cfg.sweep_horizon = to_int_list(key, value);
    else if (key == "n_seeds") cfg.n_seeds = to_int(key, value);
    else if (key == "group_total") cfg.group_total = to_int(key, value);
    else if (key == "mixture") cfg.mixture = value;
    else if (key == "pretrain_T") cfg.pretrain_steps = to_int_list(key, value);
    else if (key == "transfer_t") cfg.transfer_steps = to_int(key, value);
    else if (key == "linucb_lambda") cfg.linucb_lambda = to_double(key, value);
    else if (key == "linucb_bonus_scale") cfg.linucb_bonus_scale = to_double(key, value);
    else if (key == "eluder_class") cfg.eluder_class = value;
    else if (key == "eps") cfg.eps = to_double(key, value);
    else if (key == "el_dim") cfg.el_dim = to_int(key, value);
    else if (key == "el_step") cfg.el_step = to_double(key, value);
    else if (key == "el_functions") cfg.el_functions = to_int(key, value);
    else if (key == "el_points") cfg.el_points = to_int(key, value);
    else if (key == "train_sizes") cfg.train_sizes = to_int_list(key, value);
    else if (key == "heldout") cfg.heldout = to_int(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "svg") cfg.svg = to_bool(key, value);
    else if (key == "workers") cfg.workers = to_int(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate(const ExperimentConfig& cfg) {
  const std::vector<std::string> kinds = {"bandit", "mdp", "transfer", "eluder", "diagnostics"};
  if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end())
    throw std::invalid_argument("config: unknown kind '" + cfg.kind + "'");
  if (cfg.kind == "bandit" || cfg.kind == "mdp" || cfg.kind == "transfer") {
    if (cfg.horizon < 1) throw std::invalid_argument("config: T must be >= 1");
    if (cfg.num_tasks < 1) throw std::invalid_argument("config: M must be >= 1");
  }
  if (cfg.kind == "bandit" && cfg.algorithm != "gfucb" && cfg.algorithm != "eps_greedy")
    throw std::invalid_argument("config: algorithm must be gfucb or eps_greedy");
  if (cfg.env != "latent_category" && cfg.env != "linear_rep" && cfg.env != "grid_maze" &&
      cfg.env != "random_linear")
    throw std::invalid_argument("config: unknown env '" + cfg.env + "'");
  if (cfg.decoy_style != "random_anchor" && cfg.decoy_style != "pair_merge")
    throw std::invalid_argument("config: decoy_style must be random_anchor or pair_merge");
  if (cfg.n_seeds < 1) throw std::invalid_argument("config: n_seeds must be >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (cfg.delta <= 0.0 || cfg.delta > 1.0)
    throw std::invalid_argument("config: delta must be in (0, 1]");
  if (cfg.group_total > 0) {
    if (cfg.env != "latent_category")
      throw std::invalid_argument("config: group_total requires the latent_category env");
    if (cfg.group_total % cfg.num_tasks != 0)
      throw std::invalid_argument("config: group_total must be divisible by M");
    for (int m : cfg.sweep_tasks) {
      if (m < 1 || cfg.group_total % m != 0)
        throw std::invalid_argument("config: every sweep_M value must divide group_total");
    }
  }
  cfg.parsed_beta();
  cfg.parsed_alpha();
  cfg.parsed_strategy();
  if (cfg.kind == "bandit" && cfg.algorithm == "eps_greedy") {
    if (cfg.eps_schedule != "const" && cfg.eps_schedule != "inv_t" &&
        cfg.eps_schedule != "inv_sqrt_t")
      throw std::invalid_argument("config: eps_schedule must be const, inv_t or inv_sqrt_t");
  }
}

}  // namespace mrl::harness
