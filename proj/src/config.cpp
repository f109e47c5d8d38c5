#include "advrex/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "advrex/dataio.hpp"

namespace advrex {

using json = nlohmann::ordered_json;

namespace {

const char* kMnistPaperPreset = R"json({
  "seed": 1,
  "out_dir": "runs/mnist-paper",
  "epochs": 300,
  "batch_size": 128,
  "workers": 1,
  "dataset": {
    "type": "mnist",
    "images": "data/train-images-idx3-ubyte",
    "labels": "data/train-labels-idx1-ubyte",
    "test_images": "data/test-images-idx3-ubyte",
    "test_labels": "data/test-labels-idx1-ubyte",
    "n_train": 5000,
    "n_val": 1000,
    "n_test": 1000
  },
  "architecture": { "layer_sizes": [784, 512, 512, 10] },
  "optimizer": { "lr": 0.01, "momentum": 0.9, "weight_decay": 0.0, "milestones": [] },
  "defense": {
    "mode": "avg",
    "seen_domains": ["clean", "p1", "p2", "pinf"],
    "beta": 10.0,
    "rex_activation_epoch": 150,
    "rex_domains": ["clean", "p1", "p2", "pinf"]
  },
  "domains": {
    "clean": { "kind": "clean" },
    "p1":   { "kind": "pgd", "norm": "l1",   "epsilon": 10.0, "step_size": 0.5,  "n_iter": 40 },
    "p2":   { "kind": "pgd", "norm": "l2",   "epsilon": 2.0,  "step_size": 0.1,  "n_iter": 40 },
    "pinf": { "kind": "pgd", "norm": "linf", "epsilon": 0.3,  "step_size": 0.01, "n_iter": 40 },
    "df":   { "kind": "deepfool", "epsilon": 0.11, "n_iter": 30, "overshoot": 0.02 },
    "cw2":  { "kind": "cw2", "max_iterations": 20, "learning_rate": 0.1, "binary_search_steps": 5, "kappa": 0.0 },
    "pinf_hard": { "kind": "pgd", "norm": "linf", "epsilon": 0.4, "step_size": 0.033, "n_iter": 40 },
    "df_hard":   { "kind": "deepfool", "epsilon": 0.4, "n_iter": 50, "overshoot": 0.02 },
    "cw2_hard":  { "kind": "cw2", "max_iterations": 30, "learning_rate": 0.12, "binary_search_steps": 7, "kappa": 0.0 },
    "msd": {
      "kind": "msd", "n_iter": 40,
      "linf": { "epsilon": 0.3,  "step_size": 0.01 },
      "l2":   { "epsilon": 2.0,  "step_size": 0.1 },
      "l1":   { "epsilon": 10.0, "step_size": 0.5 }
    }
  },
  "eval": {
    "every": 10,
    "n_restarts": 1,
    "test_n_restarts": 10,
    "sets": { "unseen-by-all": ["pinf_hard", "df_hard", "cw2_hard"] }
  }
})json";

const char* kDeskSmallPreset = R"json({
  "seed": 1,
  "out_dir": "runs/desk-small",
  "epochs": 40,
  "batch_size": 64,
  "workers": 1,
  "dataset": { "type": "synthetic", "kind": "moons", "n": 600, "noise": 0.1 },
  "architecture": { "layer_sizes": [2, 32, 2] },
  "optimizer": { "lr": 0.05, "momentum": 0.9, "weight_decay": 0.0, "milestones": [] },
  "defense": {
    "mode": "avg",
    "seen_domains": ["clean", "pinf", "p2"],
    "beta": 10.0,
    "rex_activation_epoch": 20,
    "rex_domains": ["clean", "pinf", "p2"]
  },
  "domains": {
    "clean": { "kind": "clean" },
    "pinf": { "kind": "pgd", "norm": "linf", "epsilon": 0.08, "step_size": 0.01, "n_iter": 20 },
    "p2":   { "kind": "pgd", "norm": "l2",   "epsilon": 0.15, "step_size": 0.03, "n_iter": 20 }
  },
  "eval": { "every": 5, "n_restarts": 1, "test_n_restarts": 3, "sets": {} }
})json";

void merge_into(json& base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object())
      merge_into(base[key], value);
    else
      base[key] = value;
  }
}

class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& message) {
    errors_.push_back(path + ": " + message);
  }

  double number(const json& obj, const std::string& path, const std::string& key,
                double fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) error(path + "." + key, "missing required field");
      return fallback;
    }
    if (!obj[key].is_number()) {
      error(path + "." + key, "expected a number");
      return fallback;
    }
    return obj[key].get<double>();
  }

  std::int64_t integer(const json& obj, const std::string& path,
                       const std::string& key, std::int64_t fallback,
                       bool required = false) {
    if (!obj.contains(key)) {
      if (required) error(path + "." + key, "missing required field");
      return fallback;
    }
    if (!obj[key].is_number_integer()) {
      error(path + "." + key, "expected an integer");
      return fallback;
    }
    return obj[key].get<std::int64_t>();
  }

  std::string text(const json& obj, const std::string& path, const std::string& key,
                   const std::string& fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) error(path + "." + key, "missing required field");
      return fallback;
    }
    if (!obj[key].is_string()) {
      error(path + "." + key, "expected a string");
      return fallback;
    }
    return obj[key].get<std::string>();
  }

  std::vector<std::string> name_list(const json& obj, const std::string& path,
                                     const std::string& key) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    if (!obj[key].is_array()) {
      error(path + "." + key, "expected an array of names");
      return out;
    }
    for (const auto& item : obj[key]) {
      if (!item.is_string()) {
        error(path + "." + key, "expected strings");
        return out;
      }
      out.push_back(item.get<std::string>());
    }
    return out;
  }

 private:
  std::vector<std::string>& errors_;
};

Norm norm_from_string(const std::string& s, const std::string& path,
                      FieldReader& reader) {
  if (s == "l1") return Norm::L1;
  if (s == "l2") return Norm::L2;
  if (s == "linf") return Norm::Linf;
  reader.error(path, "unknown norm '" + s + "' (expected l1|l2|linf)");
  return Norm::Linf;
}

Domain parse_domain(const std::string& name, const json& obj,
                    FieldReader& reader) {
  const std::string path = "domains." + name;
  Domain domain;
  domain.name = name;
  if (!obj.is_object()) {
    reader.error(path, "expected an object");
    return domain;
  }
  const std::string kind = reader.text(obj, path, "kind", "", true);
  if (kind == "clean") {
    domain.kind = AttackKind::Clean;
  } else if (kind == "fgsm") {
    domain.kind = AttackKind::FGSM;
    domain.step_size = reader.number(obj, path, "step_size", 0.0, true);
  } else if (kind == "pgd") {
    domain.kind = AttackKind::PGD;
    domain.norm = norm_from_string(reader.text(obj, path, "norm", "linf", true),
                                   path + ".norm", reader);
    domain.epsilon = reader.number(obj, path, "epsilon", 0.0, true);
    domain.step_size = reader.number(obj, path, "step_size", 0.0, true);
    domain.n_iter = static_cast<int>(reader.integer(obj, path, "n_iter", 0, true));
  } else if (kind == "deepfool") {
    domain.kind = AttackKind::DeepFool;
    domain.epsilon = reader.number(obj, path, "epsilon", 0.0, true);
    domain.n_iter = static_cast<int>(reader.integer(obj, path, "n_iter", 0, true));
    domain.df_overshoot = reader.number(obj, path, "overshoot", 0.02);
  } else if (kind == "cw2") {
    domain.kind = AttackKind::CW2;
    domain.cw_max_iterations =
        static_cast<int>(reader.integer(obj, path, "max_iterations", 20));
    domain.cw_learning_rate = reader.number(obj, path, "learning_rate", 0.1);
    domain.cw_binary_search_steps =
        static_cast<int>(reader.integer(obj, path, "binary_search_steps", 5));
    domain.cw_kappa = reader.number(obj, path, "kappa", 0.0);
  } else if (kind == "msd") {
    domain.kind = AttackKind::MSD;
    domain.n_iter = static_cast<int>(reader.integer(obj, path, "n_iter", 0, true));
    for (const char* norm_key : {"linf", "l2", "l1"}) {
      if (!obj.contains(norm_key) || !obj[norm_key].is_object()) {
        reader.error(path + "." + norm_key, "missing msd norm tuning");
        continue;
      }
      NormTuning tuning;
      tuning.epsilon = reader.number(obj[norm_key], path + "." + norm_key, "epsilon", 0.0, true);
      tuning.step_size = reader.number(obj[norm_key], path + "." + norm_key, "step_size", 0.0, true);
      if (std::string(norm_key) == "linf") domain.msd_linf = tuning;
      else if (std::string(norm_key) == "l2") domain.msd_l2 = tuning;
      else domain.msd_l1 = tuning;
    }
  } else if (!kind.empty()) {
    reader.error(path + ".kind", "unknown attack kind '" + kind + "'");
  }
  return domain;
}

json domain_to_json(const Domain& domain) {
  json obj;
  obj["kind"] = to_string(domain.kind);
  switch (domain.kind) {
    case AttackKind::Clean:
      break;
    case AttackKind::FGSM:
      obj["step_size"] = domain.step_size;
      break;
    case AttackKind::PGD:
      obj["norm"] = to_string(domain.norm);
      obj["epsilon"] = domain.epsilon;
      obj["step_size"] = domain.step_size;
      obj["n_iter"] = domain.n_iter;
      break;
    case AttackKind::DeepFool:
      obj["epsilon"] = domain.epsilon;
      obj["n_iter"] = domain.n_iter;
      obj["overshoot"] = domain.df_overshoot;
      break;
    case AttackKind::CW2:
      obj["max_iterations"] = domain.cw_max_iterations;
      obj["learning_rate"] = domain.cw_learning_rate;
      obj["binary_search_steps"] = domain.cw_binary_search_steps;
      obj["kappa"] = domain.cw_kappa;
      break;
    case AttackKind::MSD:
      obj["n_iter"] = domain.n_iter;
      for (const auto& [key, tuning] :
           {std::pair{"linf", *domain.msd_linf}, {"l2", *domain.msd_l2}, {"l1", *domain.msd_l1}}) {
        obj[key] = {{"epsilon", tuning.epsilon}, {"step_size", tuning.step_size}};
      }
      break;
  }
  return obj;
}

void validate_semantics(const ExperimentConfig& config,
                        std::vector<std::string>& errors) {
  FieldReader reader(errors);
  if (config.epochs < 1) reader.error("epochs", "must be >= 1");
  if (config.batch_size < 1) reader.error("batch_size", "must be >= 1");
  if (config.workers < 1) reader.error("workers", "must be >= 1");
  if (config.layer_sizes.size() < 2)
    reader.error("architecture.layer_sizes", "need at least 2 entries");
  for (std::size_t s : config.layer_sizes)
    if (s == 0) reader.error("architecture.layer_sizes", "entries must be > 0");

  if (config.dataset.type == "mnist") {
    if (config.dataset.images.empty()) reader.error("dataset.images", "missing path");
    if (config.dataset.labels.empty()) reader.error("dataset.labels", "missing path");
    if (config.dataset.n_train < 1) reader.error("dataset.n_train", "must be >= 1");
  } else if (config.dataset.type == "synthetic") {
    if (config.dataset.kind != "gaussians" && config.dataset.kind != "moons")
      reader.error("dataset.kind", "expected gaussians|moons");
    if (config.dataset.n < 2) reader.error("dataset.n", "must be >= 2");
  } else {
    reader.error("dataset.type", "expected mnist|synthetic");
  }

  if (config.lr <= 0.0) reader.error("optimizer.lr", "must be > 0");
  if (config.momentum < 0.0 || config.momentum >= 1.0)
    reader.error("optimizer.momentum", "must be in [0,1)");
  if (config.weight_decay < 0.0) reader.error("optimizer.weight_decay", "must be >= 0");
  for (const auto& [epoch, lr] : config.milestones) {
    if (epoch < 0) reader.error("optimizer.milestones", "milestone epochs must be >= 0");
    if (lr <= 0.0) reader.error("optimizer.milestones", "milestone lr must be > 0");
  }

  if (config.beta < 0.0) reader.error("defense.beta", "must be >= 0");
  auto check_names = [&](const std::vector<std::string>& names, const char* path) {
    for (const std::string& name : names)
      if (!config.domains.count(name))
        reader.error(path, "unknown domain '" + name + "'");
  };
  check_names(config.seen_domain_names, "defense.seen_domains");
  check_names(config.rex_domain_names, "defense.rex_domains");
  if (config.seen_domain_names.empty())
    reader.error("defense.seen_domains", "must be nonempty");

  for (const auto& [name, domain] : config.domains) {
    try {
      domain.validate();
    } catch (const std::invalid_argument& e) {
      reader.error("domains." + name, e.what());
    }
  }

  try {
    defense_mode_from_string(config.defense_mode);
    DefenseConfig defense = build_defense(config);
    defense.validate();
  } catch (const std::exception& e) {
    reader.error("defense", e.what());
  }

  if (config.eval.every < 1) reader.error("eval.every", "must be >= 1");
  if (config.eval.n_restarts < 1) reader.error("eval.n_restarts", "must be >= 1");
  if (config.eval.test_n_restarts < 1)
    reader.error("eval.test_n_restarts", "must be >= 1");
  for (const auto& [name, members] : config.eval.sets) {
    if (name == "seen" || name == "all")
      reader.error("eval.sets." + name, "name is reserved for the implicit set");
    if (members.empty()) reader.error("eval.sets." + name, "must be nonempty");
    check_names(members, ("eval.sets." + name).c_str());
  }
}

ExperimentConfig from_json(json doc) {
  if (doc.contains("preset")) {
    const std::string preset = doc["preset"].get<std::string>();
    json base = json::parse(preset_text(preset));
    doc.erase("preset");
    merge_into(base, doc);
    doc = std::move(base);
  }

  std::vector<std::string> errors;
  FieldReader reader(errors);
  ExperimentConfig config;

  config.seed = static_cast<std::uint64_t>(reader.integer(doc, "", "seed", 1));
  config.out_dir = reader.text(doc, "", "out_dir", config.out_dir);
  config.epochs = static_cast<int>(reader.integer(doc, "", "epochs", 1, true));
  config.batch_size = static_cast<int>(reader.integer(doc, "", "batch_size", 128));
  config.workers = static_cast<int>(reader.integer(doc, "", "workers", 1));

  if (doc.contains("dataset") && doc["dataset"].is_object()) {
    const json& ds = doc["dataset"];
    config.dataset.type = reader.text(ds, "dataset", "type", "", true);
    config.dataset.images = reader.text(ds, "dataset", "images", "");
    config.dataset.labels = reader.text(ds, "dataset", "labels", "");
    config.dataset.test_images = reader.text(ds, "dataset", "test_images", "");
    config.dataset.test_labels = reader.text(ds, "dataset", "test_labels", "");
    config.dataset.n_train = static_cast<std::size_t>(reader.integer(ds, "dataset", "n_train", 0));
    config.dataset.n_val = static_cast<std::size_t>(reader.integer(ds, "dataset", "n_val", 0));
    config.dataset.n_test = static_cast<std::size_t>(reader.integer(ds, "dataset", "n_test", 0));
    config.dataset.kind = reader.text(ds, "dataset", "kind", "");
    config.dataset.n = static_cast<std::size_t>(reader.integer(ds, "dataset", "n", 0));
    config.dataset.noise = reader.number(ds, "dataset", "noise", 0.0);
  } else {
    reader.error("dataset", "missing required section");
  }

  if (doc.contains("architecture") && doc["architecture"].is_object() &&
      doc["architecture"].contains("layer_sizes") &&
      doc["architecture"]["layer_sizes"].is_array()) {
    for (const auto& v : doc["architecture"]["layer_sizes"]) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        reader.error("architecture.layer_sizes", "entries must be positive integers");
        break;
      }
      config.layer_sizes.push_back(v.get<std::size_t>());
    }
  } else {
    reader.error("architecture.layer_sizes", "missing required field");
  }

  if (doc.contains("optimizer") && doc["optimizer"].is_object()) {
    const json& opt = doc["optimizer"];
    config.lr = reader.number(opt, "optimizer", "lr", 0.01);
    config.momentum = reader.number(opt, "optimizer", "momentum", 0.9);
    config.weight_decay = reader.number(opt, "optimizer", "weight_decay", 0.0);
    if (opt.contains("milestones")) {
      if (!opt["milestones"].is_array()) {
        reader.error("optimizer.milestones", "expected an array of [epoch, lr] pairs");
      } else {
        for (const auto& m : opt["milestones"]) {
          if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() ||
              !m[1].is_number()) {
            reader.error("optimizer.milestones", "expected [epoch, lr] pairs");
            break;
          }
          config.milestones.emplace_back(m[0].get<int>(), m[1].get<double>());
        }
      }
    }
  }

  if (doc.contains("defense") && doc["defense"].is_object()) {
    const json& def = doc["defense"];
    config.defense_mode = reader.text(def, "defense", "mode", "avg", true);
    config.seen_domain_names = reader.name_list(def, "defense", "seen_domains");
    config.beta = reader.number(def, "defense", "beta", 10.0);
    if (def.contains("rex_activation_epoch") && !def["rex_activation_epoch"].is_null()) {
      if (!def["rex_activation_epoch"].is_number_integer())
        reader.error("defense.rex_activation_epoch", "expected an integer");
      else
        config.rex_activation_epoch = def["rex_activation_epoch"].get<int>();
    }
    config.rex_domain_names = reader.name_list(def, "defense", "rex_domains");
  } else {
    reader.error("defense", "missing required section");
  }

  if (doc.contains("domains") && doc["domains"].is_object()) {
    for (const auto& [name, obj] : doc["domains"].items())
      config.domains.emplace(name, parse_domain(name, obj, reader));
  } else {
    reader.error("domains", "missing required section");
  }

  if (doc.contains("eval") && doc["eval"].is_object()) {
    const json& ev = doc["eval"];
    config.eval.every = static_cast<int>(reader.integer(ev, "eval", "every", 5));
    config.eval.n_restarts = static_cast<int>(reader.integer(ev, "eval", "n_restarts", 1));
    config.eval.test_n_restarts =
        static_cast<int>(reader.integer(ev, "eval", "test_n_restarts", 10));
    if (ev.contains("sets")) {
      if (!ev["sets"].is_object()) {
        reader.error("eval.sets", "expected an object of name -> domain list");
      } else {
        for (const auto& [name, members] : ev["sets"].items())
          config.eval.sets.emplace_back(name,
                                        reader.name_list(ev["sets"], "eval.sets", name));
      }
    }
  }

  if (errors.empty()) validate_semantics(config, errors);

  if (!errors.empty()) {
    std::string message = "invalid config:";
    for (const std::string& e : errors) message += "\n  " + e;
    throw ConfigError(message);
  }
  return config;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(std::move(doc));
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  json doc;
  doc["seed"] = config.seed;
  doc["out_dir"] = config.out_dir;
  doc["epochs"] = config.epochs;
  doc["batch_size"] = config.batch_size;
  doc["workers"] = config.workers;

  json ds;
  ds["type"] = config.dataset.type;
  if (config.dataset.type == "mnist") {
    ds["images"] = config.dataset.images;
    ds["labels"] = config.dataset.labels;
    if (!config.dataset.test_images.empty()) {
      ds["test_images"] = config.dataset.test_images;
      ds["test_labels"] = config.dataset.test_labels;
    }
    ds["n_train"] = config.dataset.n_train;
    ds["n_val"] = config.dataset.n_val;
    ds["n_test"] = config.dataset.n_test;
  } else {
    ds["kind"] = config.dataset.kind;
    ds["n"] = config.dataset.n;
    ds["noise"] = config.dataset.noise;
  }
  doc["dataset"] = ds;

  doc["architecture"] = {{"layer_sizes", config.layer_sizes}};

  json opt;
  opt["lr"] = config.lr;
  opt["momentum"] = config.momentum;
  opt["weight_decay"] = config.weight_decay;
  json milestones = json::array();
  for (const auto& [epoch, lr] : config.milestones)
    milestones.push_back(json::array({epoch, lr}));
  opt["milestones"] = milestones;
  doc["optimizer"] = opt;

  json def;
  def["mode"] = config.defense_mode;
  def["seen_domains"] = config.seen_domain_names;
  def["beta"] = config.beta;
  if (config.rex_activation_epoch)
    def["rex_activation_epoch"] = *config.rex_activation_epoch;
  def["rex_domains"] = config.rex_domain_names;
  doc["defense"] = def;

  json domains;
  for (const auto& [name, domain] : config.domains)
    domains[name] = domain_to_json(domain);
  doc["domains"] = domains;

  json ev;
  ev["every"] = config.eval.every;
  ev["n_restarts"] = config.eval.n_restarts;
  ev["test_n_restarts"] = config.eval.test_n_restarts;
  json sets = json::object();
  for (const auto& [name, members] : config.eval.sets) sets[name] = members;
  ev["sets"] = sets;
  doc["eval"] = ev;

  return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  ExperimentConfig canonical = config;
  canonical.out_dir.clear();
  const std::string text = serialize_config(canonical);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

std::string preset_text(const std::string& name) {
  if (name == "mnist-paper") return kMnistPaperPreset;
  if (name == "desk-small") return kDeskSmallPreset;
  throw ConfigError("unknown preset '" + name + "' (expected mnist-paper|desk-small)");
}

DefenseConfig build_defense(const ExperimentConfig& config) {
  DefenseConfig defense;
  defense.mode = defense_mode_from_string(config.defense_mode);
  for (const std::string& name : config.seen_domain_names)
    defense.seen_domains.push_back(config.domains.at(name));
  defense.beta = config.beta;
  defense.rex_activation_epoch = config.rex_activation_epoch;
  const std::vector<std::string>& rex_names = config.rex_domain_names.empty()
                                                  ? config.seen_domain_names
                                                  : config.rex_domain_names;
  for (const std::string& name : rex_names)
    defense.rex_domains.push_back(config.domains.at(name));
  return defense;
}

std::vector<DomainSet> build_eval_sets(const ExperimentConfig& config,
                                       int n_restarts) {
  const DefenseConfig defense = build_defense(config);
  std::vector<DomainSet> sets;

  DomainSet seen;
  seen.name = "seen";
  seen.n_restarts = n_restarts;
  // For msd_rex early stopping tracks the REx-phase training domains.
  seen.domains = defense.mode == DefenseMode::MSD_REX ? defense.rex_domains
                                                      : defense.seen_domains;
  sets.push_back(seen);

  std::set<std::string> all_names;
  for (const Domain& d : seen.domains) all_names.insert(d.name);

  for (const auto& [name, members] : config.eval.sets) {
    DomainSet set;
    set.name = name;
    set.n_restarts = n_restarts;
    for (const std::string& member : members) {
      set.domains.push_back(config.domains.at(member));
      all_names.insert(member);
    }
    sets.push_back(std::move(set));
  }

  DomainSet all;
  all.name = "all";
  all.n_restarts = n_restarts;
  for (const std::string& name : all_names)
    all.domains.push_back(config.domains.at(name));
  sets.push_back(std::move(all));
  return sets;
}

DatasetSplits load_dataset(const ExperimentConfig& config) {
  DatasetSplits splits;
  if (config.dataset.type == "synthetic") {
    Batch full = synthetic_dataset(config.dataset.kind, config.dataset.n,
                                   config.dataset.noise, config.seed);
    // 60/20/20 split in generation order.
    const std::size_t n = full.size();
    const std::size_t n_train = n * 3 / 5;
    const std::size_t n_val = n / 5;
    auto slice = [&](std::size_t begin, std::size_t end) {
      Batch part;
      part.inputs = Matrix(end - begin, full.inputs.cols);
      std::copy(full.inputs.data.begin() + static_cast<long>(begin * full.inputs.cols),
                full.inputs.data.begin() + static_cast<long>(end * full.inputs.cols),
                part.inputs.data.begin());
      part.labels.assign(full.labels.begin() + static_cast<long>(begin),
                         full.labels.begin() + static_cast<long>(end));
      return part;
    };
    splits.train = slice(0, n_train);
    splits.val = slice(n_train, n_train + n_val);
    splits.test = slice(n_train + n_val, n);
    return splits;
  }

  const DatasetSpec& ds = config.dataset;
  const bool separate_test = !ds.test_images.empty();
  const std::size_t from_train = ds.n_train + ds.n_val + (separate_test ? 0 : ds.n_test);
  Batch pool = load_mnist_idx(ds.images, ds.labels, from_train);
  if (pool.size() < from_train)
    throw FormatError(ds.images + ": file holds " + std::to_string(pool.size()) +
                      " samples, config needs " + std::to_string(from_train));

  auto slice = [&](std::size_t begin, std::size_t end) {
    Batch part;
    part.inputs = Matrix(end - begin, pool.inputs.cols);
    std::copy(pool.inputs.data.begin() + static_cast<long>(begin * pool.inputs.cols),
              pool.inputs.data.begin() + static_cast<long>(end * pool.inputs.cols),
              part.inputs.data.begin());
    part.labels.assign(pool.labels.begin() + static_cast<long>(begin),
                       pool.labels.begin() + static_cast<long>(end));
    return part;
  };
  splits.train = slice(0, ds.n_train);
  splits.val = slice(ds.n_train, ds.n_train + ds.n_val);
  if (separate_test)
    splits.test = load_mnist_idx(ds.test_images, ds.test_labels, ds.n_test);
  else
    splits.test = slice(ds.n_train + ds.n_val, from_train);
  return splits;
}

}  // namespace advrex
