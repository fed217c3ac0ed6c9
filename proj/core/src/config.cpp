#include "clickbait/config.hpp"

#include <cstdlib>
#include <functional>
#include <map>

#include "json.hpp"

#include "clickbait/util.hpp"

namespace clickbait {

namespace {

using nlohmann::json;

// One row per config key: JSON/env name, reader from a JSON value, and
// whether the key participates in the config hash.
struct KeyBinding {
  const char* key;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
  bool hashed;
};

json size_json(std::size_t v) { return static_cast<std::uint64_t>(v); }

const std::vector<KeyBinding>& key_bindings() {
  static const std::vector<KeyBinding> bindings = {
      {"instances",
       [](RunConfig& c, const json& v) { c.instances_path = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.instances_path); }, false},
      {"truth",
       [](RunConfig& c, const json& v) { c.truth_path = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.truth_path); }, false},
      {"data_dir",
       [](RunConfig& c, const json& v) { c.data_dir = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.data_dir); }, false},
      {"out_dir",
       [](RunConfig& c, const json& v) { c.out_dir = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.out_dir); }, false},
      {"model_dir",
       [](RunConfig& c, const json& v) { c.model_dir = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.model_dir); }, false},
      {"binarization",
       [](RunConfig& c, const json& v) { c.binarization = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.binarization); }, true},
      {"blocks",
       [](RunConfig& c, const json& v) { c.blocks = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.blocks); }, true},
      {"source",
       [](RunConfig& c, const json& v) { c.source = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.source); }, true},
      {"split_a",
       [](RunConfig& c, const json& v) { c.split_a = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.split_a); }, true},
      {"split_b",
       [](RunConfig& c, const json& v) { c.split_b = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.split_b); }, true},
      {"split_c",
       [](RunConfig& c, const json& v) { c.split_c = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.split_c); }, true},
      {"seed",
       [](RunConfig& c, const json& v) { c.seed = v.get<std::uint64_t>(); },
       [](const RunConfig& c) { return json(c.seed); }, true},
      {"folds",
       [](RunConfig& c, const json& v) { c.folds = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.folds); }, true},
      {"stacking",
       [](RunConfig& c, const json& v) { c.stacking = v.get<std::string>(); },
       [](const RunConfig& c) { return json(c.stacking); }, true},
      {"holdout",
       [](RunConfig& c, const json& v) { c.holdout = v.get<bool>(); },
       [](const RunConfig& c) { return json(c.holdout); }, true},
      {"bow_cap",
       [](RunConfig& c, const json& v) { c.bow_cap = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.bow_cap); }, true},
      {"ngr_cap",
       [](RunConfig& c, const json& v) { c.ngr_cap = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.ngr_cap); }, true},
      {"vocab_min_freq",
       [](RunConfig& c, const json& v) { c.vocab_min_freq = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.vocab_min_freq); }, true},
      {"lambda",
       [](RunConfig& c, const json& v) { c.lambda = v.get<double>(); },
       [](const RunConfig& c) { return json(c.lambda); }, true},
      {"max_epochs",
       [](RunConfig& c, const json& v) { c.max_epochs = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.max_epochs); }, true},
      {"tol",
       [](RunConfig& c, const json& v) { c.tol = v.get<double>(); },
       [](const RunConfig& c) { return json(c.tol); }, true},
      {"threads",
       [](RunConfig& c, const json& v) { c.threads = v.get<std::size_t>(); },
       [](const RunConfig& c) { return size_json(c.threads); }, false},
      {"quick",
       [](RunConfig& c, const json& v) { c.quick = v.get<bool>(); },
       [](const RunConfig& c) { return json(c.quick); }, true},
  };
  return bindings;
}

std::string env_name(const char* key) {
  std::string name = "CLICKBAIT_";
  for (const char* p = key; *p; ++p) {
    char c = *p;
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    name += c;
  }
  return name;
}

// Env values arrive as strings; coerce through the JSON reader so numbers,
// booleans and strings all share one code path.
json env_value_to_json(const KeyBinding& binding, const RunConfig& current,
                       const std::string& value) {
  json probe = binding.get(current);
  if (probe.is_string()) return json(value);
  if (probe.is_boolean()) {
    if (value == "true" || value == "1") return json(true);
    if (value == "false" || value == "0") return json(false);
    throw UsageError(std::string("boolean expected for ") + binding.key +
                     ", got: " + value);
  }
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_number()) {
    throw UsageError(std::string("number expected for ") + binding.key +
                     ", got: " + value);
  }
  return parsed;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw UsageError("config file is not a JSON object: " + path.string());
  }

  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const KeyBinding& binding : key_bindings()) {
      if (key == binding.key) {
        try {
          binding.set(config, value);
        } catch (const json::exception& e) {
          throw UsageError("config key '" + key + "': " + e.what());
        }
        known = true;
        break;
      }
    }
    if (!known) throw UsageError("unknown config key: " + key);
  }
  return config;
}

void apply_env_overrides(RunConfig& config) {
  for (const KeyBinding& binding : key_bindings()) {
    const char* value = std::getenv(env_name(binding.key).c_str());
    if (value == nullptr || *value == '\0') continue;
    binding.set(config, env_value_to_json(binding, config, value));
  }
}

std::string config_canonical_json(const RunConfig& config) {
  // std::map keeps keys sorted; nlohmann emits them in that order.
  std::map<std::string, json> entries;
  for (const KeyBinding& binding : key_bindings()) {
    if (binding.hashed) entries[binding.key] = binding.get(config);
  }
  json j(entries);
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a64(config_canonical_json(config));
}

void validate_config(const RunConfig& config) {
  if (config.binarization != "truth-class-or-mean" &&
      config.binarization != "mean-threshold") {
    throw UsageError("binarization must be 'truth-class-or-mean' or "
                     "'mean-threshold', got: " + config.binarization);
  }
  if (config.stacking != "second-level" &&
      config.stacking != "majority-vote") {
    throw UsageError("stacking must be 'second-level' or 'majority-vote', "
                     "got: " + config.stacking);
  }
  if (config.folds < 2) throw UsageError("folds must be at least 2");
  if (config.bow_cap == 0 || config.ngr_cap == 0) {
    throw UsageError("vocabulary caps must be positive");
  }
  if (config.lambda < 0) throw UsageError("lambda must be non-negative");
  if (config.max_epochs == 0) throw UsageError("max_epochs must be positive");
  if (config.tol <= 0) throw UsageError("tol must be positive");
}

BinarizationPolicy binarization_policy(const RunConfig& config) {
  return config.binarization == "mean-threshold"
             ? BinarizationPolicy::MeanThreshold
             : BinarizationPolicy::TruthClassOrMean;
}

TrainConfig trainer_config(const RunConfig& config) {
  TrainConfig trainer;
  trainer.lambda = config.lambda;
  trainer.max_epochs = config.max_epochs;
  trainer.tol = config.tol;
  return trainer;
}

StackingOptions stacking_options(const RunConfig& config) {
  StackingOptions options;
  options.k = config.folds;
  options.seed = config.seed;
  options.trainer = trainer_config(config);
  options.bow_cap = config.bow_cap;
  options.ngr_cap = config.ngr_cap;
  options.vocab_min_freq = config.vocab_min_freq;
  options.threads = config.threads;
  options.majority_only = config.stacking == "majority-vote";
  options.holdout = config.holdout;
  return options;
}

AssembleRequest assemble_request(const RunConfig& config) {
  AssembleRequest request;
  std::string token;
  std::string rest = config.blocks;
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    token = rest.substr(0, comma);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    while (!token.empty() && token.front() == ' ') token.erase(token.begin());
    while (!token.empty() && token.back() == ' ') token.pop_back();
    const std::string folded = lower_ascii(token);
    bool found = false;
    for (Block b : {Block::MOR, Block::STY, Block::GRA, Block::SEN,
                    Block::GID, Block::BOW, Block::NGR}) {
      if (folded == block_name(b)) {
        request.blocks.push_back(b);
        found = true;
        break;
      }
    }
    if (!found) throw UsageError("unknown block name: " + token);
  }
  if (request.blocks.empty()) throw UsageError("no blocks selected");

  if (config.source == "post") request.source = Source::Post;
  else if (config.source == "title") request.source = Source::Title;
  else if (config.source == "post_and_title") request.source = Source::PostAndTitle;
  else throw UsageError("unknown source: " + config.source);
  return request;
}

}  // namespace clickbait
