#include "hft/config.hpp"

#include <fstream>
#include <sstream>

#include "hft/error.hpp"

namespace hft {

using nlohmann::json;

RunConfig::RunConfig() {
  const auto tokens = default_domain_tokens();
  added_tokens.assign(tokens.begin(), tokens.end());
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (rounds < 1) fail("rounds must be >= 1");
  if (train_batch_size < 1) fail("train_batch_size must be >= 1");
  if (eval_batch_size < 1) fail("eval_batch_size must be >= 1");
  if (vocab_size < kMinVocabSize) fail("vocab_size must be >= " + std::to_string(kMinVocabSize));
  if (!(learning_rate >= 0.0)) fail("learning_rate must be >= 0");
  if (!(warmup >= 0.0 && warmup <= 1.0)) fail("warmup must be in [0, 1]");
  if (fusion_head.hidden < 1) fail("fusion_head.hidden must be >= 1");
  if (fusion_head.batch_size < 1) fail("fusion_head.batch_size must be >= 1");
  if (fusion_head.init != "random" && fusion_head.init != "pass_through") {
    fail("fusion_head.init must be 'random' or 'pass_through'");
  }
  adv.validate();
  ModelConfig m = model;
  m.vocab_size = std::max<std::size_t>(m.vocab_size, 4);
  m.validate();
}

RunConfig desk_scale_config() {
  RunConfig c;
  c.learning_rate = 1e-3;
  c.epochs = 15;
  c.patience = 0;
  c.train_batch_size = 16;
  c.schedule = TemperatureSchedule({{0, 4.0}, {5, 1.0}, {10, 0.5}});
  c.model.init_std = 0.1;
  c.adv.epsilon = 0.1;
  return c;
}

json to_json(const RunConfig& c) {
  json model = c.model;
  return json{{"seed", c.seed},
              {"epochs", c.epochs},
              {"patience", c.patience},
              {"rounds", c.rounds},
              {"train_batch_size", c.train_batch_size},
              {"eval_batch_size", c.eval_batch_size},
              {"vocab_size", c.vocab_size},
              {"learning_rate", c.learning_rate},
              {"warmup", c.warmup},
              {"new_tokens", c.new_tokens},
              {"heated_loss", c.heated_loss},
              {"fusion", c.fusion},
              {"added_tokens", c.added_tokens},
              {"divide_by_classes", c.divide_by_classes},
              {"schedule", c.schedule},
              {"model", model},
              {"adv", c.adv},
              {"fusion_head",
               {{"mode", to_string(c.fusion_head.mode)},
                {"hidden", c.fusion_head.hidden},
                {"epochs", c.fusion_head.epochs},
                {"learning_rate", c.fusion_head.learning_rate},
                {"batch_size", c.fusion_head.batch_size},
                {"init", c.fusion_head.init}}}};
}

namespace {

// Objects merge key by key; anything else replaces. Keys absent from the
// defaults are rejected.
void merge_checked(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) {
    throw Error(ErrorCode::InvalidConfig, (path.empty() ? "config" : path) + " must be a table/object");
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

template <typename T>
T field(const json& doc, const char* key, const std::string& path) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig,
                "config key '" + (path.empty() ? std::string() : path + ".") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig run_config_from_json(const json& overrides) {
  json doc = to_json(RunConfig{});
  if (!overrides.is_null()) merge_checked(doc, overrides, "");

  RunConfig c;
  c.seed = field<std::uint64_t>(doc, "seed", "");
  c.epochs = field<std::size_t>(doc, "epochs", "");
  c.patience = field<std::size_t>(doc, "patience", "");
  c.rounds = field<std::size_t>(doc, "rounds", "");
  c.train_batch_size = field<std::size_t>(doc, "train_batch_size", "");
  c.eval_batch_size = field<std::size_t>(doc, "eval_batch_size", "");
  c.vocab_size = field<std::size_t>(doc, "vocab_size", "");
  c.learning_rate = field<double>(doc, "learning_rate", "");
  c.warmup = field<double>(doc, "warmup", "");
  c.new_tokens = field<bool>(doc, "new_tokens", "");
  c.heated_loss = field<bool>(doc, "heated_loss", "");
  c.fusion = field<bool>(doc, "fusion", "");
  c.added_tokens = field<std::vector<std::string>>(doc, "added_tokens", "");
  c.divide_by_classes = field<bool>(doc, "divide_by_classes", "");
  c.schedule = schedule_from_json(doc.at("schedule"));

  const json& m = doc.at("model");
  c.model.vocab_size = field<std::size_t>(m, "vocab_size", "model");
  c.model.max_len = field<std::size_t>(m, "max_len", "model");
  c.model.hidden_dim = field<std::size_t>(m, "hidden_dim", "model");
  c.model.num_layers = field<std::size_t>(m, "num_layers", "model");
  c.model.num_heads = field<std::size_t>(m, "num_heads", "model");
  c.model.ff_dim = field<std::size_t>(m, "ff_dim", "model");
  c.model.num_classes = field<std::size_t>(m, "num_classes", "model");
  c.model.dropout = field<double>(m, "dropout", "model");
  c.model.init_std = field<double>(m, "init_std", "model");
  c.model.seed = field<std::uint64_t>(m, "seed", "model");

  const json& a = doc.at("adv");
  c.adv.enabled = field<bool>(a, "enabled", "adv");
  c.adv.epsilon = field<double>(a, "epsilon", "adv");
  c.adv.combine_weight = field<double>(a, "combine_weight", "adv");
  c.adv.per_token_norm = field<bool>(a, "per_token_norm", "adv");

  const json& f = doc.at("fusion_head");
  c.fusion_head.mode = parse_fusion_mode(field<std::string>(f, "mode", "fusion_head"));
  c.fusion_head.hidden = field<std::size_t>(f, "hidden", "fusion_head");
  c.fusion_head.epochs = field<std::size_t>(f, "epochs", "fusion_head");
  c.fusion_head.learning_rate = field<double>(f, "learning_rate", "fusion_head");
  c.fusion_head.batch_size = field<std::size_t>(f, "batch_size", "fusion_head");
  c.fusion_head.init = field<std::string>(f, "init", "fusion_head");

  c.validate();
  return c;
}

namespace {

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_string) {
      if (ch == '\\' && quote == '"') {
        ++i;
      } else if (ch == quote) {
        in_string = false;
      }
    } else if (ch == '"' || ch == '\'') {
      in_string = true;
      quote = ch;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// TOML literal strings ('...') become JSON strings.
std::string toml_value_to_json(const std::string& value) {
  std::string out;
  bool in_literal = false, in_basic = false;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const char ch = value[i];
    if (in_basic) {
      out.push_back(ch);
      if (ch == '\\' && i + 1 < value.size()) out.push_back(value[++i]);
      else if (ch == '"') in_basic = false;
    } else if (in_literal) {
      if (ch == '\'') {
        out.push_back('"');
        in_literal = false;
      } else if (ch == '"' || ch == '\\') {
        out.push_back('\\');
        out.push_back(ch);
      } else {
        out.push_back(ch);
      }
    } else if (ch == '"') {
      in_basic = true;
      out.push_back(ch);
    } else if (ch == '\'') {
      in_literal = true;
      out.push_back('"');
    } else if (ch == ']') {
      // TOML allows a trailing comma inside arrays; JSON does not.
      while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
      if (!out.empty() && out.back() == ',') out.pop_back();
      out.push_back(ch);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  char quote = 0;
  for (char ch : s) {
    if (in_string) {
      if (ch == quote) in_string = false;
    } else if (ch == '"' || ch == '\'') {
      in_string = true;
      quote = ch;
    } else if (ch == '[') {
      ++depth;
    } else if (ch == ']') {
      --depth;
    }
  }
  return depth;
}

json parse_toml_subset(std::string_view text) {
  json doc = json::object();
  json* table = &doc;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&lineno](const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3 || line[1] == '[') fail("bad table header");
      table = &doc;
      std::string name = trim(line.substr(1, line.size() - 2));
      std::size_t start = 0;
      while (true) {
        const auto dot = name.find('.', start);
        const std::string part = trim(name.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (part.empty()) fail("bad table name");
        table = &(*table)[part];
        if (table->is_null()) *table = json::object();
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    while (bracket_balance(value) > 0 && std::getline(in, line)) {
      ++lineno;
      value += " " + trim(strip_comment(line));
    }
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    try {
      (*table)[key] = json::parse(toml_value_to_json(value));
    } catch (const json::exception&) {
      fail("cannot parse value for '" + key + "'");
    }
  }
  return doc;
}

}  // namespace

json parse_config_text(std::string_view text, bool is_toml) {
  if (is_toml) return parse_toml_subset(text);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.extension() == ".toml");
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::InvalidConfig, "override '" + std::string(assignment) + "' must be key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  // Validate the path against the defaults.
  const json defaults = to_json(RunConfig{});
  const json* probe = &defaults;
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const auto& part : parts) {
    if (!probe->is_object() || !probe->contains(part)) {
      throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
    probe = &(*probe)[part];
  }

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  if (doc.is_null()) doc = json::object();
  json* slot = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    slot = &(*slot)[parts[i]];
    if (slot->is_null()) *slot = json::object();
  }
  (*slot)[parts.back()] = value;
}

}  // namespace hft
