#include "rfrl/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>

#include "rfrl/env_io.hpp"
#include "rfrl/errors.hpp"
#include "rfrl/generators.hpp"

namespace rfrl::harness {

using nlohmann::json;

namespace {

std::string format_error(const std::string& source, std::size_t line, const std::string& message) {
  std::ostringstream os;
  os << source << ":" << line << ": " << message;
  return os.str();
}

std::string escape_token(const std::string& key) {
  std::string out;
  for (const char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// Walks the text once more through the SAX interface to learn the line of every
// JSON pointer. The iterator reports the line of the last non-blank character
// consumed, so a number read with one character of lookahead keeps its own line.
class CountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator(const char* at, std::size_t* line, std::size_t* significant)
      : at_(at), line_(line), significant_(significant) {}

  reference operator*() const { return *at_; }
  CountingIterator& operator++() {
    const char c = *at_;
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') *significant_ = *line_;
    if (c == '\n') ++*line_;
    ++at_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator copy = *this;
    ++*this;
    return copy;
  }
  bool operator==(const CountingIterator& other) const { return at_ == other.at_; }
  bool operator!=(const CountingIterator& other) const { return at_ != other.at_; }

 private:
  const char* at_;
  std::size_t* line_;
  std::size_t* significant_;
};

class LineSax : public nlohmann::json_sax<json> {
 public:
  LineSax(std::map<std::string, std::size_t>& lines, const std::size_t& line) : lines_(lines), line_(line) {}

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }

  bool start_object(std::size_t) override { return open(false); }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }

  bool key(string_t& name) override {
    stack_.back().key = name;
    lines_.emplace(stack_.back().pointer + "/" + escape_token(name), line_);
    return true;
  }

  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array;
    std::string pointer;
    std::string key;
    std::size_t index = 0;
  };

  std::string next_pointer() {
    if (stack_.empty()) return "";
    Frame& top = stack_.back();
    if (top.array) return top.pointer + "/" + std::to_string(top.index++);
    return top.pointer + "/" + escape_token(top.key);
  }

  bool value() {
    lines_.emplace(next_pointer(), line_);
    return true;
  }

  bool open(bool array) {
    std::string pointer = next_pointer();
    lines_.emplace(pointer, line_);
    stack_.push_back({array, std::move(pointer), {}, 0});
    return true;
  }

  bool close() {
    stack_.pop_back();
    return true;
  }

  std::map<std::string, std::size_t>& lines_;
  const std::size_t& line_;
  std::vector<Frame> stack_;
};

class Locator {
 public:
  Locator(std::string source, const std::string& text) : source_(std::move(source)) {
    std::size_t line = 1, significant = 1;
    LineSax sax(lines_, significant);
    json::sax_parse(CountingIterator(text.data(), &line, &significant),
                    CountingIterator(text.data() + text.size(), &line, &significant), &sax);
  }

  std::size_t line(std::string pointer) const {
    while (true) {
      const auto it = lines_.find(pointer);
      if (it != lines_.end()) return it->second;
      if (pointer.empty()) return 1;
      pointer.erase(pointer.rfind('/'));
    }
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw ConfigError(source_, line(pointer), message);
  }

 private:
  std::string source_;
  std::map<std::string, std::size_t> lines_;
};

// A value inside the document together with its pointer, for anchored errors.
class Node {
 public:
  Node(const json& value, std::string pointer, const Locator& locator)
      : value_(&value), pointer_(std::move(pointer)), locator_(&locator) {}

  const json& raw() const { return *value_; }
  const std::string& pointer() const { return pointer_; }
  [[noreturn]] void fail(const std::string& message) const { locator_->fail(pointer_, message); }

  std::string label() const {
    if (pointer_.empty()) return "document";
    return "'" + pointer_.substr(1) + "'";
  }

  const Node& object(std::initializer_list<const char*> allowed) const {
    if (!value_->is_object()) fail(label() + " must be an object");
    for (const auto& [key, unused] : value_->items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
      if (!known) locator_->fail(pointer_ + "/" + escape_token(key), "unknown key '" + key + "' in " + label());
    }
    return *this;
  }

  bool has(const char* key) const { return value_->contains(key); }

  Node at(const char* key) const {
    if (!value_->contains(key)) fail("missing field '" + std::string(key) + "' in " + label());
    return Node((*value_)[key], pointer_ + "/" + escape_token(key), *locator_);
  }

  Node at(std::size_t index) const {
    return Node((*value_)[index], pointer_ + "/" + std::to_string(index), *locator_);
  }

  std::size_t size() const { return value_->size(); }

  const Node& array() const {
    if (!value_->is_array()) fail(label() + " must be an array");
    return *this;
  }

  double number() const {
    if (!value_->is_number()) fail(label() + " must be a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail(label() + " must be finite");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail(label() + " must be positive");
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (!value_->is_number_integer()) fail(label() + " must be an integer");
    if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
    if (value_->get<std::int64_t>() < 0) fail(label() + " must be nonnegative");
    return value_->get<std::uint64_t>();
  }

  std::size_t count(std::size_t minimum) const {
    const std::uint64_t v = unsigned_integer();
    if (v < minimum) fail(label() + " must be at least " + std::to_string(minimum));
    return static_cast<std::size_t>(v);
  }

  bool boolean() const {
    if (!value_->is_boolean()) fail(label() + " must be true or false");
    return value_->get<bool>();
  }

  std::string string() const {
    if (!value_->is_string()) fail(label() + " must be a string");
    return value_->get<std::string>();
  }

 private:
  const json* value_;
  std::string pointer_;
  const Locator* locator_;
};

std::string one_of(const Node& node, std::initializer_list<const char*> keys) {
  if (!node.raw().is_object()) node.fail(node.label() + " must be an object");
  std::string found;
  for (const char* key : keys) {
    if (!node.has(key)) continue;
    if (!found.empty()) node.fail(node.label() + " takes only one of '" + found + "' and '" + key + "'");
    found = key;
  }
  if (found.empty()) {
    std::string names;
    for (const char* key : keys) names += std::string(names.empty() ? "" : ", ") + "'" + key + "'";
    node.fail(node.label() + " needs one of " + names);
  }
  for (const auto& [key, unused] : node.raw().items())
    if (key != found) node.at(key.c_str()).fail("unknown key '" + key + "' in " + node.label());
  return found;
}

std::filesystem::path resolve_path(const std::filesystem::path& source, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  return source.parent_path() / p;
}

EmbeddingSpec parse_embedding(const Node& node, const EnvShape& shape) {
  node.object({"mode", "dim", "seed", "normalize", "matrix"});
  EmbeddingSpec spec;
  if (node.has("mode")) {
    const Node mode = node.at("mode");
    try {
      spec.mode = embedding_mode_from_string(mode.string());
    } catch (const std::exception&) {
      mode.fail("'embedding/mode' must be one_hot, random_sphere or user_matrix");
    }
  }
  if (node.has("dim")) spec.dim = node.at("dim").count(1);
  if (node.has("seed")) spec.seed = node.at("seed").unsigned_integer();
  if (node.has("normalize")) spec.normalize = node.at("normalize").boolean();
  if (spec.mode == EmbeddingMode::random_sphere && spec.dim == 0) node.fail("random_sphere embedding needs 'dim'");
  if (spec.mode == EmbeddingMode::user_matrix) {
    const Node matrix = node.at("matrix").array();
    if (matrix.size() != shape.points()) matrix.fail("'matrix' needs one row per (state, action) point");
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      const Node row = matrix.at(r).array();
      if (r == 0) {
        if (row.size() == 0) row.fail("embedding rows must be nonempty");
        spec.dim = row.size();
        spec.user_rows.resize(static_cast<Eigen::Index>(matrix.size()), static_cast<Eigen::Index>(spec.dim));
      }
      if (row.size() != spec.dim) row.fail("embedding rows must all have the same length");
      for (std::size_t c = 0; c < row.size(); ++c)
        spec.user_rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).number();
    }
  } else if (node.has("matrix")) {
    node.at("matrix").fail("'matrix' is only allowed with mode user_matrix");
  }
  return spec;
}

EnvGenerator parse_generator(const Node& node) {
  node.object({"states", "actions_p1", "actions_p2", "horizon", "alpha", "seed", "embedding"});
  EnvGenerator gen;
  gen.shape.states = node.at("states").count(1);
  gen.shape.actions_p1 = node.at("actions_p1").count(1);
  gen.shape.actions_p2 = node.has("actions_p2") ? node.at("actions_p2").count(1) : 1;
  gen.shape.horizon = node.at("horizon").count(1);
  if (node.has("alpha")) gen.alpha = node.at("alpha").positive();
  if (node.has("seed")) {
    const Node seed = node.at("seed");
    if (seed.raw().is_string()) {
      if (seed.string() != "run") seed.fail("'seed' must be an integer or \"run\"");
    } else {
      gen.seed = seed.unsigned_integer();
    }
  }
  if (node.has("embedding")) gen.embedding = parse_embedding(node.at("embedding"), gen.shape);
  return gen;
}

EnvSpec parse_env_document(const Node& node, const std::string& text) {
  try {
    return env_from_json(text);
  } catch (const std::exception& e) {
    node.fail(std::string("invalid environment: ") + e.what());
  }
}

std::variant<EnvGenerator, EnvSpec> parse_env(const Node& node, const std::filesystem::path& source) {
  const std::string kind = one_of(node, {"generator", "file", "inline"});
  const Node body = node.at(kind.c_str());
  if (kind == "generator") return parse_generator(body);
  if (kind == "inline") {
    if (!body.raw().is_object()) body.fail("'env/inline' must be an object");
    return parse_env_document(body, body.raw().dump());
  }
  const auto path = resolve_path(source, body.string());
  if (!std::filesystem::exists(path)) body.fail("environment file not found: " + path.string());
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    body.fail(e.what());
  }
  return parse_env_document(body, text);
}

GdConfig parse_gd(const Node& node) {
  node.object({"max_iterations", "gradient_tolerance", "initial_step", "armijo", "divergence_window"});
  GdConfig gd;
  if (node.has("max_iterations")) gd.max_iterations = node.at("max_iterations").count(1);
  if (node.has("gradient_tolerance")) gd.gradient_tolerance = node.at("gradient_tolerance").positive();
  if (node.has("initial_step")) gd.initial_step = node.at("initial_step").positive();
  if (node.has("armijo")) gd.armijo = node.at("armijo").positive();
  if (node.has("divergence_window")) gd.divergence_window = node.at("divergence_window").count(1);
  return gd;
}

std::variant<KernelChoice, NeuralBackendConfig> parse_backend(const Node& node) {
  const std::string kind = one_of(node, {"kernel", "neural"});
  const Node body = node.at(kind.c_str());
  if (kind == "kernel") {
    body.object({"kind", "bandwidth"});
    KernelChoice choice;
    const Node k = body.at("kind");
    const std::string name = k.string();
    if (name == "one_hot")
      choice.kind = KernelKind::one_hot;
    else if (name == "linear")
      choice.kind = KernelKind::linear;
    else if (name == "rbf")
      choice.kind = KernelKind::rbf;
    else
      k.fail("'backend/kernel/kind' must be one_hot, linear or rbf");
    if (body.has("bandwidth")) {
      if (choice.kind != KernelKind::rbf) body.at("bandwidth").fail("'bandwidth' applies only to the rbf kernel");
      choice.bandwidth = body.at("bandwidth").positive();
    }
    return choice;
  }
  body.object({"m", "init_seed", "bonus_features", "warm_start", "gd"});
  NeuralBackendConfig config;
  if (body.has("m")) config.half_width = body.at("m").count(1);
  if (body.has("init_seed")) config.init_seed = body.at("init_seed").unsigned_integer();
  if (body.has("bonus_features")) {
    const Node features = body.at("bonus_features");
    const std::string name = features.string();
    if (name == "fitted")
      config.bonus_features = BonusFeatures::fitted;
    else if (name == "initial")
      config.bonus_features = BonusFeatures::initial;
    else
      features.fail("'bonus_features' must be fitted or initial");
  }
  if (body.has("warm_start")) config.warm_start = body.at("warm_start").boolean();
  if (body.has("gd")) config.gd = parse_gd(body.at("gd"));
  return config;
}

RewardTable parse_reward_document(const Node& node, const std::string& text, const EnvShape& shape) {
  try {
    RewardTable table = reward_from_json(text);
    if (!(table.shape() == shape)) node.fail("reward table shape differs from the environment");
    return table;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    node.fail(std::string("invalid reward table: ") + e.what());
  }
}

std::variant<RewardGenerator, std::vector<RewardTable>> parse_rewards(const Node& node, const EnvShape& shape,
                                                                       const std::filesystem::path& source) {
  const std::string kind = one_of(node, {"generator", "files", "tables"});
  const Node body = node.at(kind.c_str());
  if (kind == "generator") {
    body.object({"count", "seed"});
    RewardGenerator gen;
    gen.count = body.at("count").count(1);
    if (body.has("seed")) gen.seed = body.at("seed").unsigned_integer();
    return gen;
  }
  body.array();
  if (body.size() == 0) body.fail(body.label() + " must not be empty");
  std::vector<RewardTable> tables;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Node item = body.at(i);
    if (kind == "tables") {
      if (!item.raw().is_object()) item.fail("reward tables must be objects");
      tables.push_back(parse_reward_document(item, item.raw().dump(), shape));
      continue;
    }
    const auto path = resolve_path(source, item.string());
    if (!std::filesystem::exists(path)) item.fail("reward file not found: " + path.string());
    std::string text;
    try {
      text = read_text(path);
    } catch (const std::exception& e) {
      item.fail(e.what());
    }
    tables.push_back(parse_reward_document(item, text, shape));
  }
  return tables;
}

json embedding_json(const EmbeddingSpec& spec) {
  json out{{"mode", to_string(spec.mode)}, {"normalize", spec.normalize}, {"seed", spec.seed}};
  if (spec.mode != EmbeddingMode::one_hot) out["dim"] = spec.dim;
  if (spec.mode == EmbeddingMode::user_matrix) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < spec.user_rows.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < spec.user_rows.cols(); ++c) row.push_back(spec.user_rows(r, c));
      rows.push_back(row);
    }
    out["matrix"] = rows;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(format_error(source, line, message)), line_(line) {}

EnvShape RunConfig::shape() const {
  if (const auto* gen = std::get_if<EnvGenerator>(&env)) return gen->shape;
  return std::get<EnvSpec>(env).shape();
}

double RunConfig::explore_beta() const { return beta ? *beta : 2.0 * static_cast<double>(shape().horizon); }

double RunConfig::explore_lambda(std::size_t k) const {
  return lambda ? *lambda : 1.0 + 1.0 / static_cast<double>(k);
}

double RunConfig::planning_beta() const { return plan_beta ? *plan_beta : explore_beta(); }

double RunConfig::planning_lambda(std::size_t k) const { return plan_lambda ? *plan_lambda : explore_lambda(k); }

EnvSpec RunConfig::environment(std::uint64_t run_seed) const {
  if (const auto* gen = std::get_if<EnvGenerator>(&env))
    return random_env(gen->shape, gen->embedding, gen->seed ? *gen->seed : run_seed, gen->alpha);
  return std::get<EnvSpec>(env);
}

std::vector<RewardTable> RunConfig::reward_tables() const {
  if (const auto* tables = std::get_if<std::vector<RewardTable>>(&rewards)) return *tables;
  const auto& gen = std::get<RewardGenerator>(rewards);
  std::vector<RewardTable> out;
  for (std::size_t i = 0; i < gen.count; ++i) out.push_back(random_reward(shape(), gen.seed + i));
  return out;
}

std::unique_ptr<ApproximatorBackend> RunConfig::make_backend() const {
  if (const auto* neural = std::get_if<NeuralBackendConfig>(&backend)) return std::make_unique<NeuralBackend>(*neural);
  const auto& choice = std::get<KernelChoice>(backend);
  switch (choice.kind) {
    case KernelKind::linear:
      return std::make_unique<KernelBackend>(Kernel::linear());
    case KernelKind::rbf:
      return std::make_unique<KernelBackend>(Kernel::rbf(choice.bandwidth));
    default:
      return std::make_unique<KernelBackend>(Kernel::one_hot());
  }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  const std::string name = source.string();
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
    std::string message = e.what();
    if (const auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
    throw ConfigError(name, line, "invalid JSON: " + message);
  }
  const Locator locator(name, text);
  const Node doc(root, "", locator);
  doc.object({"setting", "env", "backend", "episodes", "beta", "lambda", "plan_beta", "plan_lambda", "tol", "rewards",
              "seeds", "workers", "output", "manifest"});

  RunConfig config;
  {
    const Node setting = doc.at("setting");
    const std::string value = setting.string();
    if (value == "single")
      config.setting = Setting::single;
    else if (value == "game")
      config.setting = Setting::game;
    else
      setting.fail("'setting' must be single or game");
  }

  const Node env = doc.at("env");
  config.env = parse_env(env, source);
  const EnvShape shape = config.shape();
  if (config.setting == Setting::single && shape.actions_p2 != 1)
    env.fail("single-agent setting needs actions_p2 = 1");
  if (config.setting == Setting::game && shape.actions_p2 < 2) env.fail("game setting needs actions_p2 >= 2");

  const Node backend = doc.at("backend");
  config.backend = parse_backend(backend);
  if (std::holds_alternative<NeuralBackendConfig>(config.backend)) {
    bool unit = true;
    if (const auto* gen = std::get_if<EnvGenerator>(&config.env)) {
      if (gen->embedding.mode == EmbeddingMode::user_matrix || !gen->embedding.normalize)
        unit = Embedding(gen->embedding, shape).unit_norm();
    } else {
      unit = std::get<EnvSpec>(config.env).embedding().unit_norm();
    }
    if (!unit) backend.fail("the neural backend needs a unit-norm embedding");
  }

  const Node episodes = doc.at("episodes").array();
  if (episodes.size() == 0) episodes.fail("'episodes' must not be empty");
  for (std::size_t i = 0; i < episodes.size(); ++i) config.episodes.push_back(episodes.at(i).count(1));

  if (doc.has("beta")) config.beta = doc.at("beta").positive();
  if (doc.has("lambda")) {
    const Node lambda = doc.at("lambda");
    if (lambda.raw().is_string()) {
      if (lambda.string() != "auto") lambda.fail("'lambda' must be a positive number or \"auto\"");
    } else {
      config.lambda = lambda.positive();
    }
  }
  if (doc.has("plan_beta")) config.plan_beta = doc.at("plan_beta").positive();
  if (doc.has("plan_lambda")) config.plan_lambda = doc.at("plan_lambda").positive();

  if (doc.has("tol")) {
    const Node tol = doc.at("tol");
    tol.object({"exact", "iterative", "max_rounds"});
    if (tol.has("exact")) config.tol.exact_tolerance = tol.at("exact").positive();
    if (tol.has("iterative")) config.tol.iterative_tolerance = tol.at("iterative").positive();
    if (tol.has("max_rounds")) config.tol.max_rounds = tol.at("max_rounds").count(1);
  }

  config.rewards = parse_rewards(doc.at("rewards"), shape, source);

  const Node seeds = doc.at("seeds").array();
  if (seeds.size() == 0) seeds.fail("'seeds' must not be empty");
  for (std::size_t i = 0; i < seeds.size(); ++i) config.seeds.push_back(seeds.at(i).unsigned_integer());

  if (doc.has("workers")) config.workers = doc.at("workers").count(1);
  if (doc.has("output")) {
    const Node output = doc.at("output");
    const std::string value = output.string();
    if (value.empty()) output.fail("'output' must not be empty");
    config.output = value;
  }
  if (doc.has("manifest") && !doc.at("manifest").raw().is_object()) doc.at("manifest").fail("'manifest' must be an object");
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError(path.string(), 0, e.what());
  }
  return parse_config(text, path);
}

std::string resolved_json(const RunConfig& config, const std::string& version, const std::string& git) {
  json doc;
  doc["setting"] = config.setting == Setting::single ? "single" : "game";
  if (const auto* gen = std::get_if<EnvGenerator>(&config.env)) {
    json g{{"states", gen->shape.states},
           {"actions_p1", gen->shape.actions_p1},
           {"actions_p2", gen->shape.actions_p2},
           {"horizon", gen->shape.horizon},
           {"alpha", gen->alpha},
           {"embedding", embedding_json(gen->embedding)}};
    g["seed"] = gen->seed ? json(*gen->seed) : json("run");
    doc["env"] = {{"generator", g}};
  } else {
    doc["env"] = {{"inline", json::parse(env_to_json(std::get<EnvSpec>(config.env)))}};
  }
  if (const auto* kernel = std::get_if<KernelChoice>(&config.backend)) {
    json k;
    switch (kernel->kind) {
      case KernelKind::linear:
        k["kind"] = "linear";
        break;
      case KernelKind::rbf:
        k["kind"] = "rbf";
        k["bandwidth"] = kernel->bandwidth;
        break;
      default:
        k["kind"] = "one_hot";
    }
    doc["backend"] = {{"kernel", k}};
  } else {
    const auto& neural = std::get<NeuralBackendConfig>(config.backend);
    doc["backend"] = {{"neural",
                       {{"m", neural.half_width},
                        {"init_seed", neural.init_seed},
                        {"bonus_features", neural.bonus_features == BonusFeatures::fitted ? "fitted" : "initial"},
                        {"warm_start", neural.warm_start},
                        {"gd",
                         {{"max_iterations", neural.gd.max_iterations},
                          {"gradient_tolerance", neural.gd.gradient_tolerance},
                          {"initial_step", neural.gd.initial_step},
                          {"armijo", neural.gd.armijo},
                          {"divergence_window", neural.gd.divergence_window}}}}}};
  }
  doc["episodes"] = config.episodes;
  doc["beta"] = config.explore_beta();
  doc["lambda"] = config.lambda ? json(*config.lambda) : json("auto");
  if (config.plan_beta) doc["plan_beta"] = *config.plan_beta;
  if (config.plan_lambda) doc["plan_lambda"] = *config.plan_lambda;
  doc["tol"] = {{"exact", config.tol.exact_tolerance},
                {"iterative", config.tol.iterative_tolerance},
                {"max_rounds", config.tol.max_rounds}};
  if (const auto* gen = std::get_if<RewardGenerator>(&config.rewards)) {
    doc["rewards"] = {{"generator", {{"count", gen->count}, {"seed", gen->seed}}}};
  } else {
    json tables = json::array();
    for (const RewardTable& table : std::get<std::vector<RewardTable>>(config.rewards))
      tables.push_back(json::parse(reward_to_json(table)));
    doc["rewards"] = {{"tables", tables}};
  }
  doc["seeds"] = config.seeds;
  doc["workers"] = config.workers;
  doc["output"] = config.output.string();
  doc["manifest"] = {{"version", version}, {"git", git}};
  return doc.dump(2) + "\n";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream stream(text);
  std::string item;
  auto number = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("invalid seed list '" + text + "'");
    return static_cast<std::uint64_t>(std::stoull(s));
  };
  while (std::getline(stream, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const std::uint64_t first = number(item.substr(0, dash));
    const std::uint64_t last = number(item.substr(dash + 1));
    if (last < first) throw std::invalid_argument("invalid seed range '" + item + "'");
    for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

}  // namespace rfrl::harness
