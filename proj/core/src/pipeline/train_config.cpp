#include "calr/pipeline/train_config.hpp"

#include "calr/core/numeric.hpp"

#include "calr/core/error.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace calr::pipeline {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& v) {
  std::size_t pos = 0;
  const int x = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(v);
  return x;
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(v);
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(v);
}

std::string fmt_double(double v) { return shortest_repr(v); }

const char* linkage_name(graph::Linkage l) { return l == graph::Linkage::Ward ? "ward" : "average"; }
const char* weighting_name(ClusterWeighting w) {
  return w == ClusterWeighting::Uniform ? "uniform" : "camera_diversity";
}

using Setter = std::function<void(TrainConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"train.intra_epochs", [](TrainConfig& c, const std::string& v) { c.intra_epochs = to_int(v); }},
      {"train.inter_epochs", [](TrainConfig& c, const std::string& v) { c.inter_epochs = to_int(v); }},
      {"train.seed", [](TrainConfig& c, const std::string& v) { c.seed = std::stoull(v); }},
      {"train.threads", [](TrainConfig& c, const std::string& v) { c.threads = to_int(v); }},
      {"batch.labels", [](TrainConfig& c, const std::string& v) { c.labels_per_batch = to_int(v); }},
      {"batch.instances", [](TrainConfig& c, const std::string& v) { c.instances_per_label = to_int(v); }},
      {"batch.iters_per_epoch", [](TrainConfig& c, const std::string& v) { c.iters_per_epoch = to_int(v); }},
      {"memory.temperature", [](TrainConfig& c, const std::string& v) { c.temperature = to_double(v); }},
      {"memory.momentum", [](TrainConfig& c, const std::string& v) { c.momentum = to_double(v); }},
      {"graph.k", [](TrainConfig& c, const std::string& v) { c.knn.k = to_int(v); }},
      {"graph.mutual", [](TrainConfig& c, const std::string& v) { c.knn.mutual = to_bool(v); }},
      {"graph.sim_threshold", [](TrainConfig& c, const std::string& v) { c.knn.sim_threshold = to_double(v); }},
      {"infomap.trials", [](TrainConfig& c, const std::string& v) { c.infomap_trials = to_int(v); }},
      {"intra.linkage",
       [](TrainConfig& c, const std::string& v) {
         if (v == "ward") c.linkage = graph::Linkage::Ward;
         else if (v == "average") c.linkage = graph::Linkage::Average;
         else throw std::invalid_argument(v);
       }},
      {"refine.schedule", [](TrainConfig& c, const std::string& v) { c.schedule = refine::parse_schedule(v); }},
      {"refine.p_start", [](TrainConfig& c, const std::string& v) { c.p_start = to_double(v); }},
      {"refine.p_end", [](TrainConfig& c, const std::string& v) { c.p_end = to_double(v); }},
      {"refine.pivot_neighbors", [](TrainConfig& c, const std::string& v) { c.pivot_neighbors = to_int(v); }},
      {"loss.beta", [](TrainConfig& c, const std::string& v) { c.beta = to_double(v); }},
      {"loss.cluster_weights",
       [](TrainConfig& c, const std::string& v) {
         if (v == "uniform") c.cluster_weighting = ClusterWeighting::Uniform;
         else if (v == "camera_diversity") c.cluster_weighting = ClusterWeighting::CameraDiversity;
         else throw std::invalid_argument(v);
       }},
      {"grl.lambda", [](TrainConfig& c, const std::string& v) { c.lambda = to_double(v); }},
      {"optim.lr", [](TrainConfig& c, const std::string& v) { c.adam.lr = to_double(v); }},
      {"optim.weight_decay", [](TrainConfig& c, const std::string& v) { c.adam.weight_decay = to_double(v); }},
      {"optim.beta1", [](TrainConfig& c, const std::string& v) { c.adam.beta1 = to_double(v); }},
      {"optim.beta2", [](TrainConfig& c, const std::string& v) { c.adam.beta2 = to_double(v); }},
      {"optim.eps", [](TrainConfig& c, const std::string& v) { c.adam.eps = to_double(v); }},
      {"model.arch", [](TrainConfig& c, const std::string& v) { c.arch = model::parse_arch(v); }},
      {"model.output_dim", [](TrainConfig& c, const std::string& v) { c.output_dim = to_int(v); }},
      {"model.hidden_dim", [](TrainConfig& c, const std::string& v) { c.hidden_dim = to_int(v); }},
      {"model.identity_init", [](TrainConfig& c, const std::string& v) { c.identity_init = to_bool(v); }},
      {"ablation.use_refinement", [](TrainConfig& c, const std::string& v) { c.use_refinement = to_bool(v); }},
      {"ablation.use_domain_alignment",
       [](TrainConfig& c, const std::string& v) { c.use_domain_alignment = to_bool(v); }},
      {"eval.every", [](TrainConfig& c, const std::string& v) { c.eval_every = to_int(v); }},
      {"eval.max_rank", [](TrainConfig& c, const std::string& v) { c.max_rank = to_int(v); }},
  };
  return table;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidArgument("train config: " + m); };
  if (intra_epochs < 0 || inter_epochs < 1) fail("need intra_epochs >= 0 and inter_epochs >= 1");
  if (labels_per_batch < 1 || instances_per_label < 1) fail("batch.labels and batch.instances must be >= 1");
  if (iters_per_epoch < 0) fail("batch.iters_per_epoch must be >= 0");
  if (!(temperature > 0.0)) fail("memory.temperature must be > 0");
  if (!(momentum >= 0.0 && momentum <= 1.0)) fail("memory.momentum must be in [0, 1]");
  if (knn.k < 1) fail("graph.k must be >= 1");
  if (infomap_trials < 1) fail("infomap.trials must be >= 1");
  if (!(0.0 <= p_end && p_end <= p_start && p_start <= 1.0)) fail("need 0 <= refine.p_end <= refine.p_start <= 1");
  if (pivot_neighbors < 1) fail("refine.pivot_neighbors must be >= 1");
  if (!(beta >= 0.0) || !(lambda >= 0.0)) fail("loss.beta and grl.lambda must be >= 0");
  if (!(adam.lr > 0.0) || !(adam.weight_decay >= 0.0)) fail("optim.lr must be > 0, optim.weight_decay >= 0");
  if (output_dim < 0 || hidden_dim < 1) fail("model dims must be positive");
  if (eval_every < 0 || max_rank < 1) fail("eval.every must be >= 0 and eval.max_rank >= 1");
  if (threads < 1) fail("train.threads must be >= 1");
}

std::string to_text(const TrainConfig& c) {
  std::ostringstream o;
  o << "train.intra_epochs: " << c.intra_epochs << "\n"
    << "train.inter_epochs: " << c.inter_epochs << "\n"
    << "train.seed: " << c.seed << "\n"
    << "train.threads: " << c.threads << "\n"
    << "batch.labels: " << c.labels_per_batch << "\n"
    << "batch.instances: " << c.instances_per_label << "\n"
    << "batch.iters_per_epoch: " << c.iters_per_epoch << "\n"
    << "memory.temperature: " << fmt_double(c.temperature) << "\n"
    << "memory.momentum: " << fmt_double(c.momentum) << "\n"
    << "graph.k: " << c.knn.k << "\n"
    << "graph.mutual: " << (c.knn.mutual ? "true" : "false") << "\n"
    << "graph.sim_threshold: " << fmt_double(c.knn.sim_threshold) << "\n"
    << "infomap.trials: " << c.infomap_trials << "\n"
    << "intra.linkage: " << linkage_name(c.linkage) << "\n"
    << "refine.schedule: " << refine::to_string(c.schedule) << "\n"
    << "refine.p_start: " << fmt_double(c.p_start) << "\n"
    << "refine.p_end: " << fmt_double(c.p_end) << "\n"
    << "refine.pivot_neighbors: " << c.pivot_neighbors << "\n"
    << "loss.beta: " << fmt_double(c.beta) << "\n"
    << "loss.cluster_weights: " << weighting_name(c.cluster_weighting) << "\n"
    << "grl.lambda: " << fmt_double(c.lambda) << "\n"
    << "optim.lr: " << fmt_double(c.adam.lr) << "\n"
    << "optim.weight_decay: " << fmt_double(c.adam.weight_decay) << "\n"
    << "optim.beta1: " << fmt_double(c.adam.beta1) << "\n"
    << "optim.beta2: " << fmt_double(c.adam.beta2) << "\n"
    << "optim.eps: " << fmt_double(c.adam.eps) << "\n"
    << "model.arch: " << model::to_string(c.arch) << "\n"
    << "model.output_dim: " << c.output_dim << "\n"
    << "model.hidden_dim: " << c.hidden_dim << "\n"
    << "model.identity_init: " << (c.identity_init ? "true" : "false") << "\n"
    << "ablation.use_refinement: " << (c.use_refinement ? "true" : "false") << "\n"
    << "ablation.use_domain_alignment: " << (c.use_domain_alignment ? "true" : "false") << "\n"
    << "eval.every: " << c.eval_every << "\n"
    << "eval.max_rank: " << c.max_rank << "\n";
  return o.str();
}

TrainConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                              TrainConfig base) {
  const auto& table = setters();
  for (const auto& [key, value] : pairs) {
    const auto it = table.find(key);
    if (it == table.end()) throw InvalidArgument("train config: unknown key '" + key + "'");
    try {
      it->second(base, value);
    } catch (const std::exception&) {
      throw InvalidArgument("train config: bad value for '" + key + "': '" + value + "'");
    }
  }
  base.validate();
  return base;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto sep = line.find_first_of(":=");
    if (sep == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    auto key = trim(line.substr(0, sep));
    auto value = trim(line.substr(sep + 1));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

}  // namespace calr::pipeline
