#include "rdo/cli/instance_io.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rdo::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw Error(ErrorCode::kParseError, source + ": " + what);
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

double number(const json& v, const std::string& source, const std::string& key) {
  if (!v.is_number()) fail(source, "key \"" + key + "\": expected a number, got " + v.type_name());
  return v.get<double>();
}

std::vector<double> vector_of(const json& v, const std::string& source, const std::string& key) {
  if (!v.is_array()) fail(source, "key \"" + key + "\": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], source, key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> matrix_of(const json& v, const std::string& source,
                                           const std::string& key) {
  if (!v.is_array()) fail(source, "key \"" + key + "\": expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(vector_of(v[i], source, key + "[" + std::to_string(i) + "]"));
    if (out.back().size() != out.front().size()) {
      fail(source, "key \"" + key + "\": row " + std::to_string(i) + " has " +
                       std::to_string(out.back().size()) + " entries, row 0 has " +
                       std::to_string(out.front().size()));
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row_text(const std::vector<double>& row) {
  std::string s = "[";
  for (std::size_t i = 0; i < row.size(); ++i) s += (i ? ", " : "") + fmt(row[i]);
  return s + "]";
}

std::string matrix_text(const std::vector<std::vector<double>>& m, const std::string& indent) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    s += (i ? ",\n" + indent + " " : "") + row_text(m[i]);
  }
  return s + "]";
}

std::vector<std::vector<double>> rows_of(const MatrixXd& M) {
  std::vector<std::vector<double>> out(M.rows());
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) out[i].push_back(M(i, j));
  }
  return out;
}

}  // namespace

InstanceDocument parse_document(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) fail(source, "top level must be an object");

  static const char* known[] = {"c", "A", "b", "G", "Gs", "name", "rho_star", "query"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      fail(source, "unknown key \"" + key + "\"");
    }
  }
  for (const char* key : {"c", "A", "b"}) {
    if (!doc.contains(key)) fail(source, std::string("missing key \"") + key + "\"");
  }
  const bool single = doc.contains("G");
  const bool multiple = doc.contains("Gs");
  if (single == multiple) fail(source, "exactly one of \"G\" and \"Gs\" is required");

  InstanceDocument out;
  RawInstance& raw = out.raw;
  raw.c = vector_of(doc["c"], source, "c");
  raw.A = matrix_of(doc["A"], source, "A");
  raw.b = vector_of(doc["b"], source, "b");
  if (single) {
    raw.Gs.push_back(matrix_of(doc["G"], source, "G"));
  } else {
    const json& gs = doc["Gs"];
    if (!gs.is_array()) fail(source, "key \"Gs\": expected an array of matrices");
    for (std::size_t j = 0; j < gs.size(); ++j) {
      raw.Gs.push_back(matrix_of(gs[j], source, "Gs[" + std::to_string(j) + "]"));
    }
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(source, "key \"name\": expected a string");
    raw.name = doc["name"].get<std::string>();
  }
  if (doc.contains("rho_star")) raw.rho_star = number(doc["rho_star"], source, "rho_star");
  if (doc.contains("query")) {
    const std::vector<double> q = vector_of(doc["query"], source, "query");
    out.query = Eigen::Map<const VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  }
  return out;
}

InstanceDocument read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

RdoInstance parse_instance(const std::string& path) {
  return validate_instance(read_document(path).raw);
}

RawInstance to_raw(const RdoInstance& inst) {
  RawInstance raw;
  raw.c.assign(inst.c.data(), inst.c.data() + inst.c.size());
  raw.A = rows_of(inst.polytope.A());
  raw.b.assign(inst.polytope.b().data(), inst.polytope.b().data() + inst.polytope.b().size());
  for (const auto& G : inst.dynamics.matrices()) raw.Gs.push_back(rows_of(G));
  raw.name = inst.name;
  raw.rho_star = inst.rho_star;
  return raw;
}

std::string emit_document(const InstanceDocument& doc) {
  const RawInstance& raw = doc.raw;
  std::string s = "{\n";
  if (!raw.name.empty()) s += "  \"name\": " + json(raw.name).dump() + ",\n";
  s += "  \"c\": " + row_text(raw.c) + ",\n";
  s += "  \"A\": " + matrix_text(raw.A, "       ") + ",\n";
  s += "  \"b\": " + row_text(raw.b) + ",\n";
  if (raw.Gs.size() == 1) {
    s += "  \"G\": " + matrix_text(raw.Gs[0], "       ");
  } else {
    s += "  \"Gs\": [";
    for (std::size_t j = 0; j < raw.Gs.size(); ++j) {
      s += (j ? ",\n         " : "") + matrix_text(raw.Gs[j], "         ");
    }
    s += "]";
  }
  if (raw.rho_star) s += ",\n  \"rho_star\": " + fmt(*raw.rho_star);
  if (doc.query) {
    s += ",\n  \"query\": " +
         row_text(std::vector<double>(doc.query->data(), doc.query->data() + doc.query->size()));
  }
  return s + "\n}\n";
}

std::string emit_instance(const RdoInstance& inst) {
  return emit_document(InstanceDocument{to_raw(inst), std::nullopt});
}

}  // namespace rdo::cli
