#include "config.h"

#include <charconv>

#include "poolforge/error.h"
#include "poolforge/io.h"

namespace poolforge::cli {

extern const char *const kConfigSchemaText;  // generated from docs/

namespace {

[[noreturn]] void invalid(const std::string &path, const std::string &msg) {
  throw Error(ErrorCode::kInvalidConfig,
              (path.empty() ? std::string("config") : path) + ": " + msg);
}

bool has_type(const json &v, const std::string &type) {
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "array") return v.is_array();
  if (type == "object") return v.is_object();
  throw Error(ErrorCode::kInvalidConfig, "schema uses unknown type " + type);
}

void check(const json &v, const json &s, const std::string &path) {
  if (auto it = s.find("type"); it != s.end()) {
    std::vector<std::string> types;
    if (it->is_array()) {
      types = it->get<std::vector<std::string>>();
    } else {
      types.push_back(it->get<std::string>());
    }
    bool ok = false;
    for (const auto &t : types) ok = ok || has_type(v, t);
    if (!ok) {
      std::string want;
      for (const auto &t : types) want += (want.empty() ? "" : " or ") + t;
      invalid(path, "expected " + want + ", got " + v.dump());
    }
  }
  if (auto it = s.find("enum"); it != s.end()) {
    bool found = false;
    for (const auto &e : *it) found = found || e == v;
    if (!found) invalid(path, v.dump() + " is not one of " + it->dump());
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>()) {
      invalid(path, "must be >= " + s["minimum"].dump());
    }
    if (s.contains("maximum") && x > s["maximum"].get<double>()) {
      invalid(path, "must be <= " + s["maximum"].dump());
    }
    if (s.contains("exclusiveMinimum") &&
        x <= s["exclusiveMinimum"].get<double>()) {
      invalid(path, "must be > " + s["exclusiveMinimum"].dump());
    }
    if (s.contains("exclusiveMaximum") &&
        x >= s["exclusiveMaximum"].get<double>()) {
      invalid(path, "must be < " + s["exclusiveMaximum"].dump());
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") &&
        v.size() < s["minItems"].get<std::size_t>()) {
      invalid(path, "needs at least " + s["minItems"].dump() + " items");
    }
    if (auto it = s.find("items"); it != s.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(v[i], *it, path + "[" + std::to_string(i) + "]");
      }
    }
  }
  if (v.is_object()) {
    const json empty = json::object();
    const json &props = s.contains("properties") ? s["properties"] : empty;
    const bool closed = s.value("additionalProperties", true) == false;
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string sub = path.empty() ? it.key() : path + "." + it.key();
      if (auto p = props.find(it.key()); p != props.end()) {
        check(it.value(), *p, sub);
      } else if (closed) {
        invalid(sub, "unknown key");
      }
    }
  }
}

json defaults_of(const json &schema) {
  if (schema.contains("properties")) {
    json out = json::object();
    for (auto it = schema["properties"].begin();
         it != schema["properties"].end(); ++it) {
      out[it.key()] = defaults_of(it.value());
    }
    return out;
  }
  return schema.value("default", json(nullptr));
}

void merge(json &into, const json &from) {
  for (auto it = from.begin(); it != from.end(); ++it) {
    if (it.value().is_object() && into.contains(it.key()) &&
        into[it.key()].is_object()) {
      merge(into[it.key()], it.value());
    } else {
      into[it.key()] = it.value();
    }
  }
}

}  // namespace

const json &config_schema() {
  static const json schema = json::parse(kConfigSchemaText);
  return schema;
}

json default_config() { return defaults_of(config_schema()); }

void validate_schema(const json &doc, const json &schema) {
  check(doc, schema, "");
}

void apply_override(json &doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "override must look like key=value: " +
                    std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception &) {
    value = text;
  }
  json *node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "bad override key " + key);
    }
    if (!node->is_object()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "override " + key + " descends into a non-object");
    }
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

json resolve_config(const std::optional<std::string> &config_path,
                    const std::vector<std::string> &overrides,
                    const char *env_seed) {
  json config = default_config();
  if (config_path) {
    json file;
    try {
      file = json::parse(read_file(*config_path));
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kParse, *config_path + ": " + e.what());
    }
    if (!file.is_object()) {
      throw Error(ErrorCode::kInvalidConfig,
                  *config_path + ": config must be a JSON object");
    }
    // Validate the file on its own first so errors name what the user wrote.
    validate_schema(file, config_schema());
    merge(config, file);
  }
  if (env_seed && *env_seed) {
    std::uint64_t seed = 0;
    const char *end = env_seed + std::char_traits<char>::length(env_seed);
    auto [ptr, ec] = std::from_chars(env_seed, end, seed);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidConfig,
                  "POOLFORGE_SEED must be a non-negative integer");
    }
    config["seed"] = seed;
  }
  for (const auto &o : overrides) apply_override(config, o);
  validate_schema(config, config_schema());
  return config;
}

SimulationConfig simulation_config(const json &config,
                                   SelectionStrategy strategy) {
  json sim = config.at("simulation");
  sim.erase("strategies");
  sim.erase("topics");
  sim.erase("prevalence_bins");
  sim["strategy"] = strategy_name(strategy);
  sim["rng_seed"] = config.at("seed");
  return simulation_config_from_json(sim.dump());
}

SynthSpec synth_spec(const json &config) {
  const json &s = config.at("synth");
  SynthSpec spec;
  spec.num_topics = s.at("num_topics");
  spec.pool_size = s.at("pool_size");
  spec.prevalences = s.at("prevalences").get<std::vector<double>>();
  spec.prevalence_jitter = s.at("prevalence_jitter");
  spec.background_vocab = s.at("background_vocab");
  spec.query_vocab = s.at("query_vocab");
  spec.query_strength = s.at("query_strength");
  spec.num_facets = s.at("num_facets");
  spec.num_distractors = s.at("num_distractors");
  spec.signal_vocab = s.at("signal_vocab");
  spec.signal_strength = s.at("signal_strength");
  spec.noise_strength = s.at("noise_strength");
  spec.signal_spread = s.at("signal_spread");
  spec.doc_length_min = s.at("doc_length_min");
  spec.doc_length_max = s.at("doc_length_max");
  spec.num_systems = s.at("num_systems");
  spec.quality_min = s.at("quality_min");
  spec.quality_max = s.at("quality_max");
  spec.topic_quality_noise = s.at("topic_quality_noise");
  spec.foreign_docs = s.at("foreign_docs");
  spec.rng_seed = config.at("seed");
  spec.validate();
  return spec;
}

}  // namespace poolforge::cli
