#include "rfrl/env_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rfrl/errors.hpp"

namespace rfrl {
namespace {

using nlohmann::json;

json nest(const EnvShape& shape, std::span<const double> flat, std::size_t leaf) {
  // flat layout: [h][s][a][b][leaf...]; b level omitted for single-agent shapes.
  json steps = json::array();
  std::size_t pos = 0;
  auto leaf_value = [&]() {
    if (leaf == 0) return json(flat[pos++]);
    json row = json::array();
    for (std::size_t i = 0; i < leaf; ++i) row.push_back(flat[pos++]);
    return row;
  };
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    json by_state = json::array();
    for (std::size_t s = 0; s < shape.states; ++s) {
      json by_a = json::array();
      for (std::size_t a = 0; a < shape.actions_p1; ++a) {
        if (shape.two_player()) {
          json by_b = json::array();
          for (std::size_t b = 0; b < shape.actions_p2; ++b) by_b.push_back(leaf_value());
          by_a.push_back(std::move(by_b));
        } else {
          by_a.push_back(leaf_value());
        }
      }
      by_state.push_back(std::move(by_a));
    }
    steps.push_back(std::move(by_state));
  }
  return steps;
}

void expect_array(const json& node, std::size_t size, const char* what) {
  if (!node.is_array() || node.size() != size) {
    std::ostringstream os;
    os << what << ": expected an array of length " << size;
    throw PreconditionError(os.str());
  }
}

std::vector<double> flatten(const EnvShape& shape, const json& root, std::size_t leaf, const char* what) {
  std::vector<double> out;
  out.reserve(shape.horizon * shape.points() * std::max<std::size_t>(leaf, 1));
  auto take_leaf = [&](const json& node) {
    if (leaf == 0) {
      if (!node.is_number()) throw PreconditionError(std::string(what) + ": expected a number");
      out.push_back(node.get<double>());
      return;
    }
    expect_array(node, leaf, what);
    for (const auto& v : node) {
      if (!v.is_number()) throw PreconditionError(std::string(what) + ": expected a number");
      out.push_back(v.get<double>());
    }
  };
  expect_array(root, shape.horizon, what);
  for (const auto& by_state : root) {
    expect_array(by_state, shape.states, what);
    for (const auto& by_a : by_state) {
      expect_array(by_a, shape.actions_p1, what);
      for (const auto& node : by_a) {
        if (shape.two_player()) {
          expect_array(node, shape.actions_p2, what);
          for (const auto& inner : node) take_leaf(inner);
        } else {
          take_leaf(node);
        }
      }
    }
  }
  return out;
}

EnvShape shape_from(const json& doc) {
  EnvShape shape;
  shape.states = doc.at("states").get<std::size_t>();
  shape.actions_p1 = doc.at("actions_p1").get<std::size_t>();
  shape.actions_p2 = doc.value("actions_p2", std::size_t{1});
  shape.horizon = doc.at("horizon").get<std::size_t>();
  shape.validate();
  return shape;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename Fn>
auto translating(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

const char* to_string(EmbeddingMode mode) {
  switch (mode) {
    case EmbeddingMode::one_hot: return "one_hot";
    case EmbeddingMode::random_sphere: return "random_sphere";
    case EmbeddingMode::user_matrix: return "user_matrix";
  }
  return "unknown";
}

EmbeddingMode embedding_mode_from_string(std::string_view name) {
  if (name == "one_hot") return EmbeddingMode::one_hot;
  if (name == "random_sphere") return EmbeddingMode::random_sphere;
  if (name == "user_matrix") return EmbeddingMode::user_matrix;
  throw PreconditionError("unknown embedding mode '" + std::string(name) + "'");
}

std::string env_to_json(const EnvSpec& env) {
  const EnvShape& shape = env.shape();
  const EmbeddingSpec& spec = env.embedding_spec();
  json embedding = {{"mode", to_string(spec.mode)},
                    {"dim", spec.dim},
                    {"seed", spec.seed},
                    {"normalize", spec.normalize}};
  if (spec.mode == EmbeddingMode::user_matrix) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < spec.user_rows.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < spec.user_rows.cols(); ++c) row.push_back(spec.user_rows(r, c));
      rows.push_back(std::move(row));
    }
    embedding["matrix"] = std::move(rows);
  }
  json doc = {{"states", shape.states},
              {"actions_p1", shape.actions_p1},
              {"actions_p2", shape.actions_p2},
              {"horizon", shape.horizon},
              {"initial_state", env.initial_state()},
              {"transition", nest(shape, env.transition(), shape.states)},
              {"embedding", std::move(embedding)},
              {"seed", env.seed()}};
  return doc.dump(1);
}

EnvSpec env_from_json(std::string_view text) {
  const json doc = parse(text);
  return translating([&] {
    const EnvShape shape = shape_from(doc);
    EmbeddingSpec spec;
    if (doc.contains("embedding")) {
      const json& e = doc.at("embedding");
      spec.mode = embedding_mode_from_string(e.at("mode").get<std::string>());
      spec.dim = e.value("dim", std::size_t{0});
      spec.seed = e.value("seed", std::uint64_t{0});
      spec.normalize = e.value("normalize", true);
      if (spec.mode == EmbeddingMode::user_matrix) {
        const json& rows = e.at("matrix");
        expect_array(rows, shape.points(), "embedding.matrix");
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        spec.user_rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          expect_array(rows[r], cols, "embedding.matrix row");
          for (std::size_t c = 0; c < cols; ++c)
            spec.user_rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
        }
        spec.dim = cols;
      }
    }
    return EnvSpec(shape, flatten(shape, doc.at("transition"), shape.states, "transition"),
                   doc.value("initial_state", std::size_t{0}), std::move(spec),
                   doc.value("seed", std::uint64_t{0}));
  });
}

std::string reward_to_json(const RewardTable& reward) {
  const EnvShape& shape = reward.shape();
  json doc = {{"states", shape.states},
              {"actions_p1", shape.actions_p1},
              {"actions_p2", shape.actions_p2},
              {"horizon", shape.horizon},
              {"reward", nest(shape, reward.values(), 0)}};
  return doc.dump(1);
}

RewardTable reward_from_json(std::string_view text) {
  const json doc = parse(text);
  return translating([&] {
    const EnvShape shape = shape_from(doc);
    return RewardTable(shape, flatten(shape, doc.at("reward"), 0, "reward"));
  });
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void save_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

EnvSpec load_env(const std::filesystem::path& path) { return env_from_json(read_text(path)); }

RewardTable load_reward(const std::filesystem::path& path) { return reward_from_json(read_text(path)); }

}  // namespace rfrl
