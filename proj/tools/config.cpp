#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sensched/errors.hpp"

namespace sensched::cli {

using nlohmann::json;

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

Matrix read_matrix(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected {rows, cols, data}");
  for (const char* key : {"rows", "cols", "data"}) {
    if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  }
  const auto& rows_j = j.at("rows");
  const auto& cols_j = j.at("cols");
  if (!rows_j.is_number_integer() || !cols_j.is_number_integer() || rows_j.get<long>() < 0 ||
      cols_j.get<long>() < 0) {
    throw ValidationError(where + ": rows/cols must be non-negative integers");
  }
  const auto rows = rows_j.get<long>();
  const auto cols = cols_j.get<long>();
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<long>(data.size()) != rows * cols) {
    throw DimensionError(where + ": data must hold rows*cols = " + std::to_string(rows * cols) +
                         " numbers");
  }
  Matrix M(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const auto& v = data[static_cast<std::size_t>(r * cols + c)];
      if (!v.is_number()) throw ValidationError(where + ": non-numeric entry");
      M(r, c) = v.get<double>();
    }
  }
  return M;
}

[[noreturn]] void rethrow_for(const std::string& who, const Error& e) {
  const std::string msg = who + ": " + e.what();
  if (dynamic_cast<const DimensionError*>(&e)) throw DimensionError(msg);
  if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(msg);
  throw Error(e.error_class(), msg);
}

void read_options(const json& o, ProblemOptions& opts) {
  static const std::set<std::string> known = {
      "bound_mode", "bound_slack", "bound_scan_cap", "bounds", "rh_window", "max_period",
      "construction_cap", "mef_rule", "check_controllability", "check_observability"};
  for (const auto& [key, _] : o.items()) {
    if (!known.count(key)) throw ValidationError("options: unknown key '" + key + "'");
  }
  if (o.contains("bound_mode")) opts.bounds.mode = parse_bound_mode(o.at("bound_mode").get<std::string>());
  if (o.contains("bound_slack")) opts.bounds.slack = o.at("bound_slack").get<int>();
  if (o.contains("bound_scan_cap")) opts.bounds.scan_cap = o.at("bound_scan_cap").get<long>();
  if (o.contains("bounds")) opts.fixed_bounds = o.at("bounds").get<std::vector<long>>();
  if (o.contains("rh_window")) opts.rh_window = o.at("rh_window").get<int>();
  if (o.contains("max_period")) opts.max_period = o.at("max_period").get<int>();
  if (o.contains("construction_cap")) opts.construction_cap = o.at("construction_cap").get<long>();
  if (o.contains("mef_rule")) opts.mef_rule = parse_mef_rule(o.at("mef_rule").get<std::string>());
  if (o.contains("check_controllability")) opts.checks.controllability = o.at("check_controllability").get<bool>();
  if (o.contains("check_observability")) opts.checks.observability = o.at("check_observability").get<bool>();
}

}  // namespace

ProblemConfig parse_config(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ":" + line_col(text, e.byte > 0 ? e.byte - 1 : 0) +
                          ": JSON syntax error");
  }

  ProblemConfig cfg;
  cfg.source = source;
  try {
    if (!doc.is_object() || !doc.contains("systems") || !doc.at("systems").is_array()) {
      throw ValidationError("top level must be an object with a 'systems' array");
    }
    if (doc.contains("options")) read_options(doc.at("options"), cfg.options);

    struct Raw {
      int id;
      LinearSystem sys;
    };
    std::vector<Raw> raws;
    std::size_t pos = 0;
    for (const auto& s : doc.at("systems")) {
      ++pos;
      const std::string who = s.contains("id") && s.at("id").is_number_integer()
                                  ? "system " + std::to_string(s.at("id").get<int>())
                                  : "system #" + std::to_string(pos);
      try {
        if (!s.contains("id") || !s.at("id").is_number_integer()) {
          throw ValidationError("missing integer 'id'");
        }
        for (const char* key : {"A", "C", "Q", "R"}) {
          if (!s.contains(key)) throw ValidationError(std::string("missing matrix ") + key);
        }
        raws.push_back({s.at("id").get<int>(),
                        make_linear_system(read_matrix(s.at("A"), "A"), read_matrix(s.at("C"), "C"),
                                           read_matrix(s.at("Q"), "Q"), read_matrix(s.at("R"), "R"))});
      } catch (const Error& e) {
        rethrow_for(who, e);
      }
    }
    const int n = static_cast<int>(raws.size());
    if (n == 0) throw ValidationError("no systems defined");
    std::set<int> ids;
    for (const auto& r : raws) {
      if (r.id < 1 || r.id > n || !ids.insert(r.id).second) {
        throw ValidationError("system ids must be unique and cover 1.." + std::to_string(n));
      }
    }
    std::sort(raws.begin(), raws.end(), [](const Raw& a, const Raw& b) { return a.id < b.id; });
    for (auto& r : raws) {
      try {
        cfg.systems.emplace_back(r.id, std::move(r.sys), cfg.options.checks);
      } catch (const Error& e) {
        rethrow_for("system " + std::to_string(r.id), e);
      }
    }
    if (cfg.options.fixed_bounds && cfg.options.fixed_bounds->size() != cfg.systems.size()) {
      throw DimensionError("options.bounds must list one value per system");
    }
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  } catch (const Error& e) {
    rethrow_for(source, e);
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace sensched::cli
