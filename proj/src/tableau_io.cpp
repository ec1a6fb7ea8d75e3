#include "dvi/tableau_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dvi {

namespace {

using nlohmann::json;

// Line number (1-based) of the start of row `row` of the matrix stored under
// `key`, found by scanning the raw text. Returns 0 when it cannot be located.
int locate_row(const std::string& text, const std::string& key, std::size_t row) {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t p = pos + quoted.size();
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    if (p < text.size() && text[p] == ':') break;
    pos = p;
  }
  if (pos == std::string::npos) return 0;

  int depth = 0;
  std::size_t seen = 0;
  bool in_string = false;
  for (std::size_t p = text.find(':', pos) + 1; p < text.size(); ++p) {
    const char c = text[p];
    if (in_string) {
      if (c == '\\') ++p;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
      if (depth == 2 && seen++ == row) {
        return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(p), '\n'));
      }
    } else if (c == ']') {
      if (--depth == 0) break;
    }
  }
  return 0;
}

std::string at_line(int line) { return line > 0 ? " (line " + std::to_string(line) + ")" : ""; }

Mat read_matrix(const json& doc, const std::string& text, const std::string& key) {
  if (!doc.contains(key)) throw InputError("tableau: missing field \"" + key + "\"");
  const json& m = doc.at(key);
  if (!m.is_array() || m.empty()) throw InputError("tableau: \"" + key + "\" must be a non-empty array of rows");
  const std::size_t rows = m.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = m[i];
    if (!row.is_array()) {
      throw InputError("tableau: row " + std::to_string(i) + " of \"" + key + "\" is not an array" +
                       at_line(locate_row(text, key, i)));
    }
    if (i == 0) cols = row.size();
    if (row.size() != cols || cols == 0) {
      throw InputError("tableau: ragged matrix \"" + key + "\": row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(cols) +
                       at_line(locate_row(text, key, i)));
    }
  }
  Mat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const json& v = m[i][j];
      if (!v.is_number()) {
        throw InputError("tableau: non-numeric entry in \"" + key + "\" at row " + std::to_string(i) +
                         ", column " + std::to_string(j) + at_line(locate_row(text, key, i)));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.get<double>();
    }
  }
  return out;
}

int read_count(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw InputError("tableau: missing field \"" + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long>() < 1) {
    throw InputError("tableau: \"" + key + "\" must be a positive integer");
  }
  return v.get<int>();
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Tableau parse_tableau(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("tableau: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("tableau: document must be a JSON object");

  const int s = read_count(doc, "s");
  const int r = read_count(doc, "r");
  Mat A = read_matrix(doc, text, "A");
  Mat U = read_matrix(doc, text, "U");
  Mat B = read_matrix(doc, text, "B");
  Mat V = read_matrix(doc, text, "V");
  if (A.rows() != s) {
    throw InputError("tableau: \"s\" is " + std::to_string(s) + " but A has " + std::to_string(A.rows()) + " rows");
  }
  if (V.rows() != r) {
    throw InputError("tableau: \"r\" is " + std::to_string(r) + " but V has " + std::to_string(V.rows()) + " rows");
  }
  std::string id = doc.contains("id") && doc["id"].is_string() ? doc["id"].get<std::string>() : "";
  return Tableau::make(std::move(A), std::move(U), std::move(B), std::move(V), std::move(id));
}

Tableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tableau file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Tableau tab = parse_tableau(buf.str());
  return tab;
}

std::string tableau_to_json(const Tableau& tab) {
  json doc;
  if (!tab.id().empty()) doc["id"] = tab.id();
  doc["s"] = tab.stages();
  doc["r"] = tab.inputs();
  doc["A"] = matrix_json(tab.A());
  doc["U"] = matrix_json(tab.U());
  doc["B"] = matrix_json(tab.B());
  doc["V"] = matrix_json(tab.V());
  return doc.dump(2);
}

}  // namespace dvi
